mod common;

use common::degree_vectors_by_brute_force;
use footseq::filters_linear::is_graphical;

fn all_vectors(n: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

#[test]
fn erdos_gallai_matches_brute_force() {
    for n in 1..=7 {
        let realizable = degree_vectors_by_brute_force(n);
        for d in all_vectors(n, 6) {
            assert_eq!(is_graphical(&d), realizable.contains(&d), "{d:?}");
        }
    }
}

#[test]
fn moving_one_unit_towards_the_smaller_entry_keeps_graphicality() {
    for n in 2..=7 {
        for d in degree_vectors_by_brute_force(n) {
            for i in 0..n {
                for j in 0..n {
                    if d[i] < d[j] {
                        let mut e = d.clone();
                        e[i] += 1;
                        e[j] -= 1;
                        assert!(is_graphical(&e), "{d:?} -> {e:?}");
                    }
                }
            }
        }
    }
}
