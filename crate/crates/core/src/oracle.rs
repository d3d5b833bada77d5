//! Exact deciders: exhaustive search over match results, and the recursion
//! that derives length-`n` football sequences from the stored length-`n-1`
//! ones by adding a weakest team.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seqcore::{max_score, RegularSequences, ResultMatrix, Stage, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BacktrackOptions {
    /// Treat teams with equal residual demand as interchangeable within a row.
    pub symmetry: bool,
}

impl Default for BacktrackOptions {
    fn default() -> Self {
        BacktrackOptions { symmetry: true }
    }
}

/// Remaining demand `r` with `m` matches left is reachable as `3a + b`,
/// `a + b <= m`.
fn reachable(r: i64, m: i64) -> bool {
    r >= 0 && r <= 3 * m && r != 3 * m - 1
}

struct Search<'a> {
    n: usize,
    residual: Vec<i64>,
    matrix: ResultMatrix,
    failed: HashSet<Vec<i64>>,
    /// Residuals at the start of each open row, innermost last.
    row_starts: Vec<Vec<i64>>,
    opts: &'a BacktrackOptions,
}

impl Search<'_> {
    /// Sums and sorted-prefix bounds for the teams that still play each other.
    fn subtournament_plausible(&self, from: usize) -> bool {
        let mut rest: Vec<i64> = self.residual[from..].to_vec();
        rest.sort_unstable();
        let k = rest.len() as i64;
        let mut sum = 0i64;
        for (j, &v) in rest.iter().enumerate() {
            let j = j as i64 + 1;
            sum += v;
            if sum < j * (j - 1) {
                return false;
            }
        }
        let matches = k * (k - 1) / 2;
        sum >= 2 * matches && sum <= 3 * matches
    }

    fn row(&mut self, i: usize) -> bool {
        if i + 1 >= self.n {
            return self.residual[i] == 0;
        }
        if !self.subtournament_plausible(i) {
            return false;
        }
        let mut key: Vec<i64> = self.residual[i..].to_vec();
        key.sort_unstable();
        if self.failed.contains(&key) {
            return false;
        }
        self.row_starts.push(self.residual.clone());
        let ok = self.cell(i, i + 1);
        self.row_starts.pop();
        if !ok {
            self.failed.insert(key);
        }
        ok
    }

    fn cell(&mut self, i: usize, j: usize) -> bool {
        if j == self.n {
            return self.residual[i] == 0 && self.row(i + 1);
        }
        let left_i = (self.n - j - 1) as i64;
        let left_j = (self.n - i - 2) as i64;
        for points in [0u8, 1, 3] {
            let other: u8 = match points {
                3 => 0,
                0 => 3,
                _ => 1,
            };
            let start = self.row_starts.last().expect("inside a row");
            if self.opts.symmetry
                && j > i + 1
                && start[j] == start[j - 1]
                && other > self.matrix.get(j - 1, i).unwrap_or(3)
            {
                continue;
            }
            let ri = self.residual[i] - points as i64;
            let rj = self.residual[j] - other as i64;
            if !reachable(ri, left_i) || !reachable(rj, left_j) {
                continue;
            }
            self.residual[i] = ri;
            self.residual[j] = rj;
            self.matrix.put(i, j, points);
            let ok = self.cell(i, j + 1);
            self.residual[i] += points as i64;
            self.residual[j] += other as i64;
            if ok {
                return true;
            }
        }
        false
    }
}

/// Exhaustive search over all match results; always decides.
pub fn backtrack_decide(s: &[u32]) -> Verdict {
    backtrack_decide_with(s, &BacktrackOptions::default())
}

pub fn backtrack_decide_with(s: &[u32], opts: &BacktrackOptions) -> Verdict {
    let n = s.len();
    if n == 0 {
        return Verdict::Bad(Stage::BT);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (s[i], i));
    let sorted: Vec<i64> = order.iter().map(|&i| s[i] as i64).collect();
    if sorted.iter().any(|&v| !reachable(v, n as i64 - 1)) {
        return Verdict::Bad(Stage::BT);
    }
    let mut search = Search {
        n,
        residual: sorted,
        matrix: ResultMatrix::new(n),
        failed: HashSet::new(),
        row_starts: Vec::new(),
        opts,
    };
    if search.row(0) {
        Verdict::Good(Stage::BT, search.matrix.relabeled(&order))
    } else {
        Verdict::Bad(Stage::BT)
    }
}

/// All football sequences of one length, sorted, with an index on the first
/// element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodStore {
    n: usize,
    sequences: Vec<Vec<u32>>,
    /// Entry `i` is the position of the first sequence whose first score is
    /// at least `i`.
    prefix_index: Vec<usize>,
}

const STORE_MAGIC: &str = "footseq-store v1";

impl GoodStore {
    pub fn new(n: usize, mut sequences: Vec<Vec<u32>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("stores need at least one team"));
        }
        sequences.sort_unstable();
        sequences.dedup();
        let max = max_score(n);
        for s in &sequences {
            let shape_ok = s.len() == n
                && s.windows(2).all(|w| w[0] <= w[1])
                && s.iter().all(|&v| v <= max);
            if !shape_ok {
                return Err(Error::invalid(format!("{s:?} is not a regular sequence of length {n}")));
            }
        }
        let prefix_index = (0..=max as usize + 1)
            .map(|i| sequences.partition_point(|s| (s[0] as usize) < i))
            .collect();
        Ok(GoodStore {
            n,
            sequences,
            prefix_index,
        })
    }

    /// The store for a single team: only `(0)`.
    pub fn base() -> Self {
        GoodStore::new(1, vec![vec![0]]).expect("base store is valid")
    }

    pub fn teams(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn sequences(&self) -> &[Vec<u32>] {
        &self.sequences
    }

    pub fn prefix_index(&self) -> &[usize] {
        &self.prefix_index
    }

    /// Stored sequences whose first score lies in `lo..=hi`.
    pub fn starting_between(&self, lo: i64, hi: i64) -> &[Vec<u32>] {
        let last = self.prefix_index.len() as i64 - 1;
        let clamp = |v: i64| v.clamp(0, last) as usize;
        let a = self.prefix_index[clamp(lo)];
        let b = self.prefix_index[clamp(hi + 1)];
        &self.sequences[a..b.max(a)]
    }

    pub fn contains(&self, s: &[u32]) -> bool {
        if s.len() != self.n {
            return false;
        }
        let block = self.starting_between(s[0] as i64, s[0] as i64);
        block.binary_search_by(|probe| probe.as_slice().cmp(s)).is_ok()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{STORE_MAGIC} n={} count={}\n", self.n, self.len());
        for s in &self.sequences {
            for (i, v) in s.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let malformed = |line: usize, reason: &str| Error::MalformedStore {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.split_terminator('\n');
        let header = lines.next().ok_or_else(|| malformed(1, "missing header"))?;
        let rest = header
            .strip_prefix(STORE_MAGIC)
            .ok_or_else(|| malformed(1, "unknown header"))?;
        let mut n = None;
        let mut count = None;
        for field in rest.split_whitespace() {
            if let Some(v) = field.strip_prefix("n=") {
                n = v.parse::<usize>().ok();
            } else if let Some(v) = field.strip_prefix("count=") {
                count = v.parse::<usize>().ok();
            } else {
                return Err(malformed(1, "unexpected header field"));
            }
        }
        let (n, count) = match (n, count) {
            (Some(n), Some(c)) if n >= 1 => (n, c),
            _ => return Err(malformed(1, "header needs n and count")),
        };
        let mut sequences = Vec::with_capacity(count);
        for (idx, line) in lines.enumerate() {
            let seq = line
                .split(' ')
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<Vec<u32>, _>>()
                .map_err(|_| malformed(idx + 2, "not a list of integers"))?;
            if seq.len() != n {
                return Err(malformed(idx + 2, "wrong sequence length"));
            }
            if let Some(prev) = sequences.last() {
                if prev >= &seq {
                    return Err(malformed(idx + 2, "sequences out of order"));
                }
            }
            sequences.push(seq);
        }
        if sequences.len() != count {
            return Err(malformed(count + 2, "count does not match the header"));
        }
        if !text.is_empty() && !text.ends_with('\n') {
            return Err(malformed(count + 1, "missing final newline"));
        }
        GoodStore::new(n, sequences)
    }

    pub fn file_name(n: usize) -> String {
        format!("good-{n}.txt")
    }

    /// Writes through a temporary file in the same directory, then renames.
    pub fn write_to(&self, path: &Path) -> Result<()> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
        tmp.write_all(self.to_text().as_bytes())?;
        tmp.flush()?;
        tmp.persist(path).map_err(|e| Error::Io(e.error))?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        GoodStore::from_text(&fs::read_to_string(path)?)
    }
}

/// How a length-`n` sequence arises from a stored length-`n-1` one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncrementalWitness {
    pub ancestor: Vec<u32>,
    /// Points each of `s_2..s_n` took from the removed weakest team.
    pub diffs: Vec<u8>,
}

fn complement(points: u8) -> u8 {
    match points {
        3 => 0,
        0 => 3,
        _ => 1,
    }
}

/// Groups of equal values in a sorted slice as `(value, count)`.
fn groups(tail: &[u32]) -> Vec<(u32, usize)> {
    let mut out: Vec<(u32, usize)> = Vec::new();
    for &v in tail {
        match out.last_mut() {
            Some((x, c)) if *x == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

struct Deriver<'a> {
    groups: Vec<(u32, usize)>,
    store: &'a GoodStore,
    /// Counts of (0, 1, 3) differences per group.
    choice: Vec<[usize; 3]>,
}

impl Deriver<'_> {
    fn search(&mut self, g: usize, removed_points: i64) -> Option<Vec<u32>> {
        if g == self.groups.len() {
            if removed_points != 0 {
                return None;
            }
            let mut reduced = Vec::with_capacity(self.store.n);
            for (&(v, _), c) in self.groups.iter().zip(&self.choice) {
                for (k, diff) in [0u32, 1, 3].into_iter().enumerate() {
                    if c[k] > 0 {
                        reduced.extend(std::iter::repeat_n(v - diff, c[k]));
                    }
                }
            }
            reduced.sort_unstable();
            return self.store.contains(&reduced).then_some(reduced);
        }
        let (v, size) = self.groups[g];
        let rest: usize = self.groups[g + 1..].iter().map(|x| x.1).sum();
        for zeros in 0..=size {
            let after_zeros = removed_points - 3 * zeros as i64;
            if after_zeros < 0 {
                break;
            }
            for ones in 0..=size - zeros {
                let threes = size - zeros - ones;
                if (ones > 0 && v < 1) || (threes > 0 && v < 3) {
                    continue;
                }
                let left = after_zeros - ones as i64;
                if left < 0 || left > 3 * rest as i64 {
                    continue;
                }
                self.choice[g] = [zeros, ones, threes];
                if let Some(found) = self.search(g + 1, left) {
                    return Some(found);
                }
            }
        }
        None
    }
}

/// Looks for a stored ancestor and a pairing of the tail with it whose
/// differences are all 0, 1 or 3 and leave the removed team with `s_1`
/// points.
pub fn incremental_witness(s: &[u32], store: &GoodStore) -> Result<Option<IncrementalWitness>> {
    let n = s.len();
    if n == 0 || store.n + 1 != n {
        return Err(Error::SizeMismatch {
            expected: store.n + 1,
            actual: n,
        });
    }
    let tail = &s[1..];
    let mut d = Deriver {
        groups: groups(tail),
        store,
        choice: Vec::new(),
    };
    d.choice = vec![[0; 3]; d.groups.len()];
    let Some(ancestor) = d.search(0, s[0] as i64) else {
        return Ok(None);
    };
    let mut diffs = Vec::with_capacity(tail.len());
    for (&(_, _), c) in d.groups.iter().zip(&d.choice) {
        for (k, diff) in [0u8, 1, 3].into_iter().enumerate() {
            diffs.extend(std::iter::repeat_n(diff, c[k]));
        }
    }
    Ok(Some(IncrementalWitness { ancestor, diffs }))
}

/// Membership test through the stored sequences one team shorter.
pub fn incremental_decide(s: &[u32], store: &GoodStore) -> Result<bool> {
    Ok(incremental_witness(s, store)?.is_some())
}

/// Position-by-position variant: the tail is compared with each candidate
/// ancestor entry by entry, with no reordering. Kept to report where it
/// disagrees with the full matching.
pub fn incremental_decide_order_preserving(s: &[u32], store: &GoodStore) -> Result<bool> {
    let n = s.len();
    if n < 2 || store.n + 1 != n {
        return Err(Error::SizeMismatch {
            expected: store.n + 1,
            actual: n,
        });
    }
    let tail = &s[1..];
    let first = tail[0] as i64;
    for start in [first, first - 1, first - 3] {
        if start < 0 {
            continue;
        }
        for m in store.starting_between(start, start) {
            let mut removed = 0i64;
            let ok = tail.iter().zip(m).all(|(&t, &a)| {
                let diff = t as i64 - a as i64;
                if matches!(diff, 0 | 1 | 3) {
                    removed += complement(diff as u8) as i64;
                    true
                } else {
                    false
                }
            });
            if ok && removed == s[0] as i64 {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Rebuilds a result matrix by unwinding witnesses down to one team.
/// `stores[k]` must be the store for `k + 1` teams.
pub fn incremental_certificate(s: &[u32], stores: &[GoodStore]) -> Result<Option<ResultMatrix>> {
    let n = s.len();
    if n == 1 {
        return Ok((s[0] == 0).then(|| ResultMatrix::new(1)));
    }
    let store = stores
        .get(n - 2)
        .ok_or_else(|| Error::invalid(format!("no store for {} teams", n - 1)))?;
    let Some(w) = incremental_witness(s, store)? else {
        return Ok(None);
    };
    let Some(inner) = incremental_certificate(&w.ancestor, stores)? else {
        return Ok(None);
    };
    let tail = &s[1..];
    let reduced: Vec<u32> = tail.iter().zip(&w.diffs).map(|(&t, &d)| t - d as u32).collect();
    let mut order: Vec<usize> = (0..tail.len()).collect();
    order.sort_by_key(|&k| (reduced[k], k));
    let mut position = vec![0usize; tail.len()];
    for (p, &k) in order.iter().enumerate() {
        position[k] = p;
    }
    let mut m = ResultMatrix::new(n);
    for a in 0..tail.len() {
        m.put(a + 1, 0, w.diffs[a]);
        for b in a + 1..tail.len() {
            let r = inner
                .get(position[a], position[b])
                .ok_or_else(|| Error::invalid("ancestor certificate is incomplete"))?;
            m.put(a + 1, b + 1, r);
        }
    }
    Ok(Some(m))
}

/// How `build_store` decides membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StoreDecider {
    /// The default pipeline ending in backtracking.
    Pipeline,
    /// Filters, then the incremental recursion against the previous store.
    Incremental,
}

/// Ranks of sequences in `n` teams, split for parallel work.
fn parts(n: usize) -> Vec<std::ops::Range<u128>> {
    RegularSequences::partition(n, 256)
}

/// Builds the store for `n` teams. `previous` must hold the store for
/// `n - 1` teams when the incremental decider is used.
pub fn build_store(n: usize, decider: StoreDecider, previous: Option<&GoodStore>) -> Result<GoodStore> {
    if n == 0 {
        return Err(Error::invalid("at least one team is required"));
    }
    if n == 1 {
        return Ok(GoodStore::base());
    }
    let chunks: Vec<Vec<Vec<u32>>> = match decider {
        StoreDecider::Pipeline => parts(n)
            .into_par_iter()
            .map(|r| {
                let mut out = Vec::new();
                let mut it = RegularSequences::ranks(n, r).expect("n >= 1");
                while let Some(s) = it.next_slice() {
                    if crate::pipeline::decide_fast(s).is_good() {
                        out.push(s.to_vec());
                    }
                }
                out
            })
            .collect(),
        StoreDecider::Incremental => {
            let prev = previous.ok_or_else(|| {
                Error::invalid(format!("the incremental decider needs the store for {} teams", n - 1))
            })?;
            if prev.n + 1 != n {
                return Err(Error::SizeMismatch {
                    expected: n - 1,
                    actual: prev.n,
                });
            }
            parts(n)
                .into_par_iter()
                .map(|r| {
                    let mut out = Vec::new();
                    let mut it = RegularSequences::ranks(n, r).expect("n >= 1");
                    while let Some(s) = it.next_slice() {
                        if crate::pipeline::filters_reject(s).is_none()
                            && incremental_witness(s, prev).ok().flatten().is_some()
                        {
                            out.push(s.to_vec());
                        }
                    }
                    out
                })
                .collect()
        }
    };
    GoodStore::new(n, chunks.into_iter().flatten().collect())
}

/// Stores for `1..=n` teams, built bottom-up with the incremental decider,
/// reusing files in `dir` when present and writing new ones there.
pub fn stores_up_to(n: usize, dir: Option<&Path>) -> Result<Vec<GoodStore>> {
    let mut stores: Vec<GoodStore> = Vec::with_capacity(n);
    for k in 1..=n {
        let cached = dir
            .map(|d| d.join(GoodStore::file_name(k)))
            .filter(|p| p.exists())
            .map(|p| GoodStore::read_from(&p))
            .transpose()?
            .filter(|s| s.teams() == k);
        let store = match cached {
            Some(s) => s,
            None => {
                let built = build_store(k, StoreDecider::Incremental, stores.last())?;
                if let Some(d) = dir {
                    built.write_to(&d.join(GoodStore::file_name(k)))?;
                }
                built
            }
        };
        stores.push(store);
    }
    Ok(stores)
}
