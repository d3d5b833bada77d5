#![allow(dead_code)]

use std::collections::BTreeSet;

/// Sorted score lists of every result assignment among `n` teams.
pub fn football_by_brute_force(n: usize) -> BTreeSet<Vec<u32>> {
    let matches: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = BTreeSet::new();
    let mut s = vec![0u32; n];
    let total = 3usize.pow(matches.len() as u32);
    for code in 0..total {
        s.iter_mut().for_each(|v| *v = 0);
        let mut c = code;
        for &(i, j) in &matches {
            match c % 3 {
                0 => s[i] += 3,
                1 => {
                    s[i] += 1;
                    s[j] += 1;
                }
                _ => s[j] += 3,
            }
            c /= 3;
        }
        let mut sorted = s.clone();
        sorted.sort_unstable();
        out.insert(sorted);
    }
    out
}

/// Degree vectors, in vertex order, of every simple graph on `n` vertices.
pub fn degree_vectors_by_brute_force(n: usize) -> BTreeSet<Vec<u32>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut d = vec![0u32; n];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                d[i] += 1;
                d[j] += 1;
            }
        }
        out.insert(d);
    }
    out
}
