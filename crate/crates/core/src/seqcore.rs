//! Core domain types and the universe of regular sequences that every filter
//! and oracle works over.

use std::fmt;
use std::ops::{Deref, Range};
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest score a team can collect in an `n`-team round robin.
pub fn max_score(n: usize) -> u32 {
    3 * (n.saturating_sub(1)) as u32
}

/// `binomial(k, 2)`, the number of matches among `k` teams.
pub(crate) fn pairs(k: usize) -> i64 {
    let k = k as i64;
    k * (k - 1) / 2
}

/// A nondecreasing sequence of team scores with entries in `[0, 3(n-1)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct ScoreSequence(Vec<u32>);

impl ScoreSequence {
    pub fn new(scores: Vec<u32>) -> Result<Self> {
        let widened: Vec<i64> = scores.iter().map(|&v| v as i64).collect();
        check_regular(&widened)?;
        Ok(ScoreSequence(scores))
    }

    /// Sorts arbitrary input into canonical order. The returned permutation maps
    /// each sorted position to the index it had in `scores`.
    pub fn from_unsorted(scores: &[i64]) -> Result<(Self, Vec<usize>)> {
        if scores.is_empty() {
            return Err(Error::EmptySequence);
        }
        let n = scores.len();
        let max = max_score(n);
        for (i, &v) in scores.iter().enumerate() {
            if v < 0 || v > max as i64 {
                return Err(Error::ScoreOutOfRange {
                    position: i + 1,
                    value: v,
                    max,
                    teams: n,
                });
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&i| (scores[i], i));
        let sorted = perm.iter().map(|&i| scores[i] as u32).collect();
        Ok((ScoreSequence(sorted), perm))
    }

    pub fn teams(&self) -> usize {
        self.0.len()
    }

    pub fn scores(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> i64 {
        self.0.iter().map(|&v| v as i64).sum()
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

fn check_regular(scores: &[i64]) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::EmptySequence);
    }
    let n = scores.len();
    let max = max_score(n);
    for (i, &v) in scores.iter().enumerate() {
        if v < 0 || v > max as i64 {
            return Err(Error::ScoreOutOfRange {
                position: i + 1,
                value: v,
                max,
                teams: n,
            });
        }
        if i > 0 && v < scores[i - 1] {
            return Err(Error::NotNondecreasing { position: i + 1 });
        }
    }
    Ok(())
}

impl Deref for ScoreSequence {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl TryFrom<Vec<u32>> for ScoreSequence {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        ScoreSequence::new(v)
    }
}

impl From<ScoreSequence> for Vec<u32> {
    fn from(s: ScoreSequence) -> Self {
        s.0
    }
}

impl fmt::Display for ScoreSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Identifier of a deciding procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
    L7,
    L8,
    Q1,
    Q2,
    Q3,
    R1,
    R2,
    R3,
    /// Exhaustive backtracking over match results.
    BT,
    /// Incremental recursion against the store of shorter good sequences.
    INC,
}

impl Stage {
    pub const ALL: [Stage; 25] = [
        Stage::C1,
        Stage::C2,
        Stage::C3,
        Stage::C4,
        Stage::C5,
        Stage::C6,
        Stage::C7,
        Stage::C8,
        Stage::C9,
        Stage::L1,
        Stage::L2,
        Stage::L3,
        Stage::L4,
        Stage::L5,
        Stage::L6,
        Stage::L7,
        Stage::L8,
        Stage::Q1,
        Stage::Q2,
        Stage::Q3,
        Stage::R1,
        Stage::R2,
        Stage::R3,
        Stage::BT,
        Stage::INC,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::C1 => "C1",
            Stage::C2 => "C2",
            Stage::C3 => "C3",
            Stage::C4 => "C4",
            Stage::C5 => "C5",
            Stage::C6 => "C6",
            Stage::C7 => "C7",
            Stage::C8 => "C8",
            Stage::C9 => "C9",
            Stage::L1 => "L1",
            Stage::L2 => "L2",
            Stage::L3 => "L3",
            Stage::L4 => "L4",
            Stage::L5 => "L5",
            Stage::L6 => "L6",
            Stage::L7 => "L7",
            Stage::L8 => "L8",
            Stage::Q1 => "Q1",
            Stage::Q2 => "Q2",
            Stage::Q3 => "Q3",
            Stage::R1 => "R1",
            Stage::R2 => "R2",
            Stage::R3 => "R3",
            Stage::BT => "BT",
            Stage::INC => "INC",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .iter()
            .copied()
            .find(|st| st.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown stage `{s}`")))
    }
}

/// Outcome of a deciding procedure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Bad(Stage),
    /// Good, with a complete result matrix proving it.
    Good(Stage, ResultMatrix),
    Undecided,
}

impl Verdict {
    pub fn is_bad(&self) -> bool {
        matches!(self, Verdict::Bad(_))
    }

    pub fn is_good(&self) -> bool {
        matches!(self, Verdict::Good(..))
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, Verdict::Undecided)
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            Verdict::Bad(st) | Verdict::Good(st, _) => Some(*st),
            Verdict::Undecided => None,
        }
    }

    pub fn certificate(&self) -> Option<&ResultMatrix> {
        match self {
            Verdict::Good(_, m) => Some(m),
            _ => None,
        }
    }
}

/// Points a team takes from one match.
pub const RESULTS: [u8; 3] = [3, 1, 0];

fn complement(points: u8) -> u8 {
    match points {
        3 => 0,
        0 => 3,
        _ => 1,
    }
}

/// `n x n` table of match outcomes; entry `(i, j)` is the number of points
/// team `i` took from its match against team `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResultMatrix {
    n: usize,
    cells: Vec<Option<u8>>,
}

impl ResultMatrix {
    pub fn new(n: usize) -> Self {
        ResultMatrix {
            n,
            cells: vec![None; n * n],
        }
    }

    pub fn teams(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<u8> {
        self.cells[i * self.n + j]
    }

    /// Records that team `i` took `points` (3, 1 or 0) against team `j`.
    pub fn set(&mut self, i: usize, j: usize, points: u8) -> Result<()> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::invalid(format!("no match between {i} and {j}")));
        }
        if !RESULTS.contains(&points) {
            return Err(Error::invalid(format!("{points} is not a football result")));
        }
        self.put(i, j, points);
        Ok(())
    }

    pub(crate) fn put(&mut self, i: usize, j: usize, points: u8) {
        let n = self.n;
        self.cells[i * n + j] = Some(points);
        self.cells[j * n + i] = Some(complement(points));
    }

    /// First off-diagonal match without a result, if any.
    pub fn first_unknown(&self) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| i != j && self.get(i, j).is_none())
    }

    pub fn is_complete(&self) -> bool {
        self.first_unknown().is_none()
    }

    /// Row sums, counting unknown entries as zero.
    pub fn row_sums(&self) -> Vec<u32> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .filter(|&j| j != i)
                    .map(|j| self.get(i, j).unwrap_or(0) as u32)
                    .sum()
            })
            .collect()
    }

    /// Unordered pairs `(i, j)`, `i < j`, whose match ended in a draw.
    pub fn draw_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.get(i, j) == Some(1) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Relabels teams: team `k` of `self` becomes team `perm[k]` of the result.
    pub fn relabeled(&self, perm: &[usize]) -> ResultMatrix {
        assert_eq!(perm.len(), self.n);
        let mut out = ResultMatrix::new(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    out.cells[perm[i] * self.n + perm[j]] = self.get(i, j);
                }
            }
        }
        out
    }

    /// Rows with `None` on the diagonal and for unknown results.
    pub fn to_rows(&self) -> Vec<Vec<Option<u8>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| if i == j { None } else { self.get(i, j) }).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<Option<u8>>]) -> Result<Self> {
        let n = rows.len();
        let mut m = ResultMatrix::new(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            for (j, &cell) in row.iter().enumerate() {
                if i == j {
                    continue;
                }
                if let Some(p) = cell {
                    if !RESULTS.contains(&p) {
                        return Err(Error::invalid(format!("{p} is not a football result")));
                    }
                }
                m.cells[i * n + j] = cell;
            }
        }
        Ok(m)
    }
}

impl fmt::Display for ResultMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    write!(f, " ")?;
                }
                match (i == j, self.get(i, j)) {
                    (true, _) => write!(f, "-")?,
                    (false, Some(p)) => write!(f, "{p}")?,
                    (false, None) => write!(f, "?")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Checks a complete matrix against a score sequence: every match must be
/// 3:0, 1:1 or 0:3 and the row sums must equal `s` as a multiset.
pub fn validate_result_matrix(m: &ResultMatrix, s: &[u32]) -> Result<bool> {
    if m.teams() != s.len() {
        return Err(Error::SizeMismatch {
            expected: s.len(),
            actual: m.teams(),
        });
    }
    if let Some((row, col)) = m.first_unknown() {
        return Err(Error::IncompleteMatrix { row, col });
    }
    for i in 0..m.n {
        for j in i + 1..m.n {
            let pair = (m.get(i, j).unwrap(), m.get(j, i).unwrap());
            if !matches!(pair, (3, 0) | (0, 3) | (1, 1)) {
                return Ok(false);
            }
        }
    }
    let mut sums = m.row_sums();
    sums.sort_unstable();
    let mut expected = s.to_vec();
    expected.sort_unstable();
    Ok(sums == expected)
}

/// Number of nondecreasing length-`m` sequences with entries in `[l, u]`,
/// i.e. `binomial(u - l + m, m)`.
pub fn count_regular(l: i64, u: i64, m: usize) -> Result<BigUint> {
    if u < l {
        return Err(Error::invalid(format!("upper bound {u} is below lower bound {l}")));
    }
    if m < 1 {
        return Err(Error::invalid("sequence length must be at least 1"));
    }
    let top = BigUint::from((u - l) as u64 + m as u64);
    Ok(num_integer::binomial(top, BigUint::from(m as u64)))
}

/// `binomial(n, k)` in `u128`; callers stay well inside its range.
pub(crate) fn binom_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of `(0, 3n-3, n)`-regular sequences as a machine integer.
pub fn regular_total(n: usize) -> u128 {
    if n == 0 {
        return 0;
    }
    binom_u128(4 * n as u64 - 3, n as u64)
}

/// Nondecreasing sequences of `len` entries, all in `[lo, max]`.
fn tails(len: usize, lo: u32, max: u32) -> u128 {
    if lo > max {
        return if len == 0 { 1 } else { 0 };
    }
    binom_u128((max - lo) as u64 + len as u64, len as u64)
}

/// Lexicographic rank of a regular sequence among all sequences of its length.
pub fn regular_rank(s: &[u32]) -> u128 {
    let n = s.len();
    let max = max_score(n);
    let mut rank = 0u128;
    let mut lo = 0u32;
    for (p, &v) in s.iter().enumerate() {
        for smaller in lo..v {
            rank += tails(n - p - 1, smaller, max);
        }
        lo = v;
    }
    rank
}

/// The regular sequence of length `n` at lexicographic position `rank`.
pub fn regular_unrank(n: usize, mut rank: u128) -> Option<Vec<u32>> {
    if n == 0 || rank >= regular_total(n) {
        return None;
    }
    let max = max_score(n);
    let mut out = Vec::with_capacity(n);
    let mut lo = 0u32;
    for p in 0..n {
        let mut v = lo;
        loop {
            let block = tails(n - p - 1, v, max);
            if rank < block {
                break;
            }
            rank -= block;
            v += 1;
        }
        out.push(v);
        lo = v;
    }
    Some(out)
}

/// Lexicographic stream of `(0, 3n-3, n)`-regular sequences.
///
/// The state is the last emitted sequence plus the number still to emit, so a
/// stream can start anywhere and partitions can be described by rank ranges.
#[derive(Clone, Debug)]
pub struct RegularSequences {
    current: Vec<u32>,
    max: u32,
    remaining: u128,
    started: bool,
}

impl RegularSequences {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("at least one team is required"));
        }
        Self::ranks(n, 0..regular_total(n))
    }

    /// Sequences whose lexicographic rank lies in `ranks`.
    pub fn ranks(n: usize, ranks: Range<u128>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("at least one team is required"));
        }
        let total = regular_total(n);
        let end = ranks.end.min(total);
        let start = ranks.start.min(end);
        let current = regular_unrank(n, start).unwrap_or_else(|| vec![0; n]);
        Ok(RegularSequences {
            current,
            max: max_score(n),
            remaining: end - start,
            started: false,
        })
    }

    /// Sequences beginning with `prefix`.
    pub fn with_prefix(n: usize, prefix: &[u32]) -> Result<Self> {
        if prefix.len() > n {
            return Err(Error::invalid("prefix longer than the sequence"));
        }
        let max = max_score(n);
        let mut first = prefix.to_vec();
        let fill = prefix.last().copied().unwrap_or(0);
        first.resize(n, fill);
        let mut widened: Vec<i64> = first.iter().map(|&v| v as i64).collect();
        widened.truncate(n);
        check_regular(&widened)?;
        let start = regular_rank(&first);
        let count = tails(n - prefix.len(), fill, max);
        Self::ranks(n, start..start + count)
    }

    /// Splits the full stream into `parts` contiguous rank ranges.
    pub fn partition(n: usize, parts: usize) -> Vec<Range<u128>> {
        let total = regular_total(n);
        let parts = parts.max(1) as u128;
        (0..parts)
            .map(|i| (total * i / parts)..(total * (i + 1) / parts))
            .filter(|r| !r.is_empty())
            .collect()
    }

    /// Advances to the successor; the lexicographic successor of a
    /// nondecreasing sequence bumps the rightmost non-maximal entry and copies
    /// it into every later slot.
    fn advance(&mut self) {
        let Some(pos) = self.current.iter().rposition(|&v| v < self.max) else {
            return;
        };
        let v = self.current[pos] + 1;
        for slot in &mut self.current[pos..] {
            *slot = v;
        }
    }

    /// Lending variant of `next` that avoids an allocation per sequence.
    pub fn next_slice(&mut self) -> Option<&[u32]> {
        if self.remaining == 0 {
            return None;
        }
        if self.started {
            self.advance();
        }
        self.started = true;
        self.remaining -= 1;
        Some(&self.current)
    }
}

impl Iterator for RegularSequences {
    type Item = ScoreSequence;

    fn next(&mut self) -> Option<ScoreSequence> {
        self.next_slice().map(|s| ScoreSequence(s.to_vec()))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}

/// Convenience constructor for the full stream of length `n`.
pub fn generate_regular(n: usize) -> Result<RegularSequences> {
    RegularSequences::new(n)
}

/// Accepted counts along the cascade for one team count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageStats {
    pub n: usize,
    /// `(label, accepted)` in cascade order, starting with `regular` and ending
    /// with `football`.
    pub counters: Vec<(String, u64)>,
    pub football_count: u64,
    /// Good verdicts per reconstruction stage, `[R1, R2, R3]`.
    pub reconstructed: [u64; 3],
    /// Sequences that reached the exact oracle.
    pub oracle_decided: u64,
    /// Sequences the exact oracle accepted.
    pub oracle_good: u64,
}

impl StageStats {
    pub fn counter(&self, label: &str) -> Option<u64> {
        self.counters
            .iter()
            .find(|(l, _)| l == label)
            .map(|&(_, c)| c)
    }

    pub fn reconstructed_total(&self) -> u64 {
        self.reconstructed.iter().sum()
    }

    pub fn is_monotone(&self) -> bool {
        self.counters.windows(2).all(|w| w[0].1 >= w[1].1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(n: usize) -> Vec<Vec<u32>> {
        generate_regular(n).unwrap().map(|s| s.into_inner()).collect()
    }

    #[test]
    fn count_regular_examples() {
        assert_eq!(count_regular(0, 3, 2).unwrap(), BigUint::from(10u32));
        assert_eq!(count_regular(0, 6, 3).unwrap(), BigUint::from(84u32));
        assert_eq!(count_regular(5, 5, 4).unwrap(), BigUint::from(1u32));
        assert!(count_regular(3, 2, 1).is_err());
        assert!(count_regular(0, 2, 0).is_err());
    }

    #[test]
    fn count_regular_matches_closed_form() {
        for n in 1..=20usize {
            let expected = num_integer::binomial(BigUint::from(4 * n - 3), BigUint::from(n));
            assert_eq!(count_regular(0, 3 * n as i64 - 3, n).unwrap(), expected);
            assert_eq!(BigUint::from(regular_total(n)), expected);
        }
    }

    #[test]
    fn generation_small_cases() {
        // one team can only score zero
        assert_eq!(all(1), vec![vec![0]]);
        let two = all(2);
        assert_eq!(two.len(), 10);
        assert_eq!(two.first().unwrap(), &vec![0, 0]);
        assert_eq!(two.last().unwrap(), &vec![3, 3]);
        assert_eq!(all(3).len(), 84);
        assert!(generate_regular(0).is_err());
    }

    #[test]
    fn generation_is_complete_and_strictly_increasing() {
        for n in 1..=5usize {
            let max = max_score(n);
            let got = all(n);
            assert!(got.windows(2).all(|w| w[0] < w[1]));
            // brute-force cross product over [0, max]^n
            let mut brute = Vec::new();
            let total = (max as usize + 1).pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    v.push((c % (max as usize + 1)) as u32);
                    c /= max as usize + 1;
                }
                v.reverse();
                if v.windows(2).all(|w| w[0] <= w[1]) {
                    brute.push(v);
                }
            }
            brute.sort();
            assert_eq!(got, brute, "n = {n}");
        }
    }

    #[test]
    fn rank_unrank_roundtrip() {
        for n in 1..=5 {
            for (rank, s) in all(n).iter().enumerate() {
                assert_eq!(regular_rank(s), rank as u128);
                assert_eq!(regular_unrank(n, rank as u128).as_ref(), Some(s));
            }
        }
    }

    #[test]
    fn partitions_and_prefixes_cover_the_stream() {
        let full = all(5);
        for parts in [1, 3, 8, 50] {
            let joined: Vec<Vec<u32>> = RegularSequences::partition(5, parts)
                .into_iter()
                .flat_map(|r| RegularSequences::ranks(5, r).unwrap().map(|s| s.into_inner()))
                .collect();
            assert_eq!(joined, full);
        }
        let with: Vec<Vec<u32>> = RegularSequences::with_prefix(5, &[1, 2])
            .unwrap()
            .map(|s| s.into_inner())
            .collect();
        let expected: Vec<Vec<u32>> = full.iter().filter(|s| s[..2] == [1, 2]).cloned().collect();
        assert_eq!(with, expected);
    }

    #[test]
    fn score_sequence_validation() {
        assert!(ScoreSequence::new(vec![0, 3, 6]).is_ok());
        assert!(matches!(
            ScoreSequence::new(vec![0, 3, 7]),
            Err(Error::ScoreOutOfRange { position: 3, .. })
        ));
        assert!(matches!(
            ScoreSequence::new(vec![3, 0, 6]),
            Err(Error::NotNondecreasing { position: 2 })
        ));
        assert!(matches!(ScoreSequence::new(vec![]), Err(Error::EmptySequence)));

        let (s, perm) = ScoreSequence::from_unsorted(&[6, 0, 3]).unwrap();
        assert_eq!(s.scores(), &[0, 3, 6]);
        assert_eq!(perm, vec![1, 2, 0]);
    }

    fn all_draws(n: usize) -> ResultMatrix {
        let mut m = ResultMatrix::new(n);
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, 1).unwrap();
            }
        }
        m
    }

    #[test]
    fn validate_examples() {
        let rows: Vec<Vec<Option<u8>>> = [
            [9, 1, 0, 0, 0, 0],
            [1, 9, 0, 0, 0, 0],
            [3, 3, 9, 1, 1, 0],
            [3, 3, 1, 9, 0, 1],
            [3, 3, 1, 3, 9, 0],
            [3, 3, 3, 1, 3, 9],
        ]
        .iter()
        .map(|r| r.iter().map(|&v| if v == 9 { None } else { Some(v) }).collect())
        .collect();
        let m = ResultMatrix::from_rows(&rows).unwrap();
        assert!(validate_result_matrix(&m, &[1, 1, 8, 8, 10, 13]).unwrap());

        assert!(validate_result_matrix(&all_draws(3), &[2, 2, 2]).unwrap());
        assert!(!validate_result_matrix(&all_draws(3), &[0, 3, 6]).unwrap());

        let partial = ResultMatrix::new(3);
        assert!(matches!(
            validate_result_matrix(&partial, &[2, 2, 2]),
            Err(Error::IncompleteMatrix { .. })
        ));
    }

    #[test]
    fn inconsistent_pair_is_rejected() {
        let rows = vec![vec![None, Some(3)], vec![Some(3), None]];
        let m = ResultMatrix::from_rows(&rows).unwrap();
        assert!(!validate_result_matrix(&m, &[3, 3]).unwrap());
    }

    #[test]
    fn relabel_keeps_results() {
        let mut m = ResultMatrix::new(3);
        m.set(0, 1, 3).unwrap();
        m.set(0, 2, 1).unwrap();
        m.set(1, 2, 0).unwrap();
        let r = m.relabeled(&[2, 0, 1]);
        assert_eq!(r.get(2, 0), Some(3));
        assert_eq!(r.get(2, 1), Some(1));
        assert_eq!(r.get(0, 1), Some(0));
        let mut a = m.row_sums();
        let mut b = r.row_sums();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
