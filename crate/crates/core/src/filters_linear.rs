//! Linear-time rejection tests. The early ones bound prefix sums; the later
//! ones reason about how many draws each team must have.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::{pairs, Stage, Verdict};

fn prefix_sums(s: &[u32]) -> Vec<i64> {
    let mut out = Vec::with_capacity(s.len() + 1);
    out.push(0i64);
    for &v in s {
        out.push(out.last().unwrap() + v as i64);
    }
    out
}

fn verdict(bad: bool, stage: Stage) -> Verdict {
    if bad {
        Verdict::Bad(stage)
    } else {
        Verdict::Undecided
    }
}

fn total_points(n: usize) -> i64 {
    3 * pairs(n)
}

/// Prefix bounds of a complete tournament with 2 or 3 points per match.
pub fn l1_complete(s: &[u32]) -> Verdict {
    let n = s.len();
    let sums = prefix_sums(s);
    let total = total_points(n);
    let bad = (1..=n).any(|k| {
        let upper = total - (n - k) as i64 * s[k - 1] as i64;
        sums[k] < 2 * pairs(k) || sums[k] > upper
    });
    verdict(bad, Stage::L1)
}

/// Prefix bounds tightened by a lower bound on the number of drawn matches.
pub fn l2_point_losses(s: &[u32]) -> Verdict {
    let n = s.len();
    let sums = prefix_sums(s);
    let total = total_points(n);
    let mut losses = 0i64;
    let mut remainders = 0i64;
    for k in 1..=n {
        remainders += (s[k - 1] % 3) as i64;
        losses = losses
            .max(3 * pairs(k) - sums[k])
            .max((remainders + 1) / 2);
        let upper = total - (n - k) as i64 * s[k - 1] as i64 - losses;
        if sums[k] < 2 * pairs(k) || sums[k] > upper {
            return Verdict::Bad(Stage::L2);
        }
    }
    Verdict::Undecided
}

/// Largest possible sum of the top `k` scores.
fn top_max(n: usize, k: usize) -> i64 {
    3 * (k * (n - k)) as i64 + 3 * pairs(k)
}

fn top_sums(s: &[u32]) -> Vec<i64> {
    let mut out = vec![0i64];
    for &v in s.iter().rev() {
        out.push(out.last().unwrap() + v as i64);
    }
    out
}

/// A weak block whose internal matches were all drawn, or a strong block that
/// won every match, fixes the scores around it.
pub fn l3_reduction0(s: &[u32]) -> Verdict {
    let n = s.len();
    let sums = prefix_sums(s);
    for k in 1..=n {
        if sums[k] == (k * (k - 1)) as i64 && !all_draw_block_ok(s, k) {
            return Verdict::Bad(Stage::L3);
        }
    }
    let tops = top_sums(s);
    for k in 1..=n {
        if tops[k] == top_max(n, k) && !winning_block_ok(s, k) {
            return Verdict::Bad(Stage::L3);
        }
    }
    Verdict::Undecided
}

pub(crate) fn all_draw_block_ok(s: &[u32], k: usize) -> bool {
    let n = s.len();
    s[..k].iter().all(|&v| v as usize == k - 1) && (k == n || s[k] as usize >= 3 * k)
}

pub(crate) fn winning_block_ok(s: &[u32], k: usize) -> bool {
    let n = s.len();
    s[n - k..].iter().all(|&v| v % 3 == 0) && (k == n || s[n - k - 1] as usize <= 3 * (n - k - 1))
}

/// Shape of a weak block that dropped exactly one point against the minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum NearDrawBlock {
    /// All internal draws plus one drawn match against a stronger team.
    ExternalDraw,
    /// All internal draws except one decisive match.
    InternalWin,
}

pub(crate) fn near_draw_block(s: &[u32], k: usize) -> Option<NearDrawBlock> {
    let n = s.len();
    let k32 = k as u32;
    let middle_ok = |range: std::ops::Range<usize>| s[range].iter().all(|&v| v + 1 == k32);
    if k < n && middle_ok(0..k - 1) && s[k - 1] == k32 && s[k] as usize + 2 >= 3 * k {
        return Some(NearDrawBlock::ExternalDraw);
    }
    if k >= 2
        && s[0] + 2 == k32
        && middle_ok(1..k - 1)
        && s[k - 1] == k32 + 1
        && (k == n || s[k] as usize >= 3 * k)
    {
        return Some(NearDrawBlock::InternalWin);
    }
    None
}

pub(crate) fn near_winning_block_ok(s: &[u32], k: usize) -> bool {
    let n = s.len();
    let top = &s[n - k..];
    let ones = top.iter().filter(|&&v| v % 3 == 1).count();
    let zeros = top.iter().filter(|&&v| v % 3 == 0).count();
    k >= 2 && ones == 2 && zeros == k - 2 && (k == n || s[n - k - 1] as usize <= 3 * (n - k - 1))
}

/// Blocks exactly one point away from the extremes of [`l3_reduction0`].
pub fn l4_reduction1(s: &[u32]) -> Verdict {
    let n = s.len();
    let sums = prefix_sums(s);
    for k in 1..=n {
        if sums[k] == (k * (k - 1)) as i64 + 1 && near_draw_block(s, k).is_none() {
            return Verdict::Bad(Stage::L4);
        }
    }
    let tops = top_sums(s);
    for k in 1..=n {
        if tops[k] == top_max(n, k) - 1 && !near_winning_block_ok(s, k) {
            return Verdict::Bad(Stage::L4);
        }
    }
    Verdict::Undecided
}

/// Per-team ranges for wins, draws and losses implied by the scores alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawBounds {
    pub n: usize,
    /// Number of drawn matches in any realization.
    pub dn: i64,
    /// `s_i mod 3`, the draws every realization must give team `i`.
    pub r: Vec<i64>,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    /// Most packets of three extra draws team `i` can absorb; negative means
    /// the score cannot be reached at all.
    pub packets: Vec<i64>,
    pub wins_min: Vec<i64>,
    pub losses_min: Vec<i64>,
    pub wins_max: Vec<i64>,
    pub losses_max: Vec<i64>,
}

impl DrawBounds {
    /// Total decisive matches, which is both the total wins and the total losses.
    pub fn decisive(&self) -> i64 {
        pairs(self.n) - self.dn
    }

    pub fn feasible_per_team(&self) -> bool {
        self.packets.iter().all(|&x| x >= 0)
    }

    /// Packets of three that must be spread beyond the obligatory draws.
    pub fn free_packets(&self) -> i64 {
        let need = 2 * self.dn - self.r.iter().sum::<i64>();
        if need.rem_euclid(3) != 0 {
            return -1;
        }
        need / 3
    }
}

pub fn draw_bounds(s: &[u32]) -> DrawBounds {
    let n = s.len();
    let m = n as i64 - 1;
    let total: i64 = s.iter().map(|&v| v as i64).sum();
    let dn = total_points(n) - total;
    let mut b = DrawBounds {
        n,
        dn,
        r: Vec::with_capacity(n),
        lower: Vec::with_capacity(n),
        upper: Vec::with_capacity(n),
        packets: Vec::with_capacity(n),
        wins_min: Vec::with_capacity(n),
        losses_min: Vec::with_capacity(n),
        wins_max: Vec::with_capacity(n),
        losses_max: Vec::with_capacity(n),
    };
    for &v in s {
        let v = v as i64;
        let r = v % 3;
        let x = ((v - r) / 3)
            .min((m - r).div_euclid(3))
            .min((3 * m - 2 * r - v).div_euclid(6));
        b.r.push(r);
        b.lower.push(r);
        b.upper.push(r + 3 * x);
        b.packets.push(x);
        b.wins_min.push(0.max((v - m + 1).div_euclid(2)));
        b.losses_min.push(0.max(m - v));
        b.wins_max.push(((v - r) / 3).min(m - r));
        b.losses_max.push((3 * m - v).div_euclid(3).min(m - r));
    }
    b
}

/// Win / draw / loss counts per team.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SportMatrix {
    /// `(wins, draws, losses, points)` per team.
    pub rows: Vec<(u32, u32, u32, u32)>,
}

impl SportMatrix {
    /// Derives wins and losses from a draw sequence; `None` when some team's
    /// counts would be negative or inconsistent with its score.
    pub fn from_draws(s: &[u32], d: &[u32]) -> Option<SportMatrix> {
        let n = s.len() as i64;
        let rows = s
            .iter()
            .zip(d)
            .map(|(&v, &dr)| {
                let (v, dr) = (v as i64, dr as i64);
                if dr > v || (v - dr) % 3 != 0 {
                    return None;
                }
                let w = (v - dr) / 3;
                let l = n - 1 - w - dr;
                (l >= 0).then_some((w as u32, dr as u32, l as u32, v as u32))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(SportMatrix { rows })
    }

    pub fn wins(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r.0).collect()
    }

    pub fn draws(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r.1).collect()
    }

    pub fn losses(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r.2).collect()
    }
}

/// Erdős–Gallai test for the degree sequence of a simple graph.
pub fn is_graphical(d: &[u32]) -> bool {
    let mut d = d.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let total: u64 = d.iter().map(|&v| v as u64).sum();
    if total % 2 == 1 {
        return false;
    }
    let n = d.len();
    let mut left = 0u64;
    for k in 1..=n {
        left += d[k - 1] as u64;
        let kk = k as u64;
        let right: u64 = kk * (kk - 1) + d[k..].iter().map(|&v| (v as u64).min(kk)).sum::<u64>();
        if left > right {
            return false;
        }
    }
    true
}

/// The draw sequence when the bounds leave no choice.
pub fn unique_draws(b: &DrawBounds) -> Option<Vec<u32>> {
    if !b.feasible_per_team() {
        return None;
    }
    let lo: i64 = b.lower.iter().sum();
    let hi: i64 = b.upper.iter().sum();
    let target = 2 * b.dn;
    let pick = if lo == target {
        &b.lower
    } else if hi == target {
        &b.upper
    } else {
        return None;
    };
    Some(pick.iter().map(|&v| v as u32).collect())
}

fn bounds_admit_draws(b: &DrawBounds) -> bool {
    let lo: i64 = b.lower.iter().sum();
    let hi: i64 = b.upper.iter().sum();
    b.feasible_per_team() && lo <= 2 * b.dn && 2 * b.dn <= hi
}

/// Rejects when no draw sequence fits the bounds, or when the only one that
/// fits is not the degree sequence of a simple graph.
pub fn l5_draw_unique(s: &[u32]) -> Verdict {
    let b = draw_bounds(s);
    if !bounds_admit_draws(&b) {
        return Verdict::Bad(Stage::L5);
    }
    match unique_draws(&b) {
        Some(d) => verdict(!is_graphical(&d), Stage::L5),
        None => Verdict::Undecided,
    }
}

/// Every win needs an opponent with a loss left, and vice versa.
pub fn l6_balanced(w: &[u32], l: &[u32]) -> Result<Verdict> {
    if w.len() != l.len() {
        return Err(Error::SizeMismatch {
            expected: w.len(),
            actual: l.len(),
        });
    }
    let sw: u64 = w.iter().map(|&v| v as u64).sum();
    let sl: u64 = l.iter().map(|&v| v as u64).sum();
    if sw != sl {
        return Err(Error::invalid(format!("win total {sw} differs from loss total {sl}")));
    }
    let with_losses = l.iter().filter(|&&v| v > 0).count();
    let with_wins = w.iter().filter(|&&v| v > 0).count();
    let bad = (0..w.len()).any(|i| {
        let losers = with_losses - usize::from(l[i] > 0);
        let winners = with_wins - usize::from(w[i] > 0);
        w[i] as usize > losers || l[i] as usize > winners
    });
    Ok(verdict(bad, Stage::L6))
}

/// Spreads the free packets of three draws as evenly as the caps allow, always
/// feeding the teams with the fewest draws first. `None` when the packets do
/// not fit.
pub fn uniform_draws(b: &DrawBounds) -> Option<Vec<u32>> {
    if !b.feasible_per_team() {
        return None;
    }
    let mut left = b.free_packets();
    if left < 0 {
        return None;
    }
    let n = b.n;
    let mut given = vec![0i64; n];
    while left > 0 {
        let mut eligible: Vec<usize> = (0..n).filter(|&i| given[i] < b.packets[i]).collect();
        if eligible.is_empty() {
            return None;
        }
        if left as usize >= eligible.len() {
            for &i in &eligible {
                given[i] += 1;
            }
            left -= eligible.len() as i64;
        } else {
            eligible.sort_by_key(|&i| (b.r[i], i));
            for &i in &eligible[..left as usize] {
                given[i] += 1;
            }
            left = 0;
        }
    }
    Some((0..n).map(|i| (b.lower[i] + 3 * given[i]) as u32).collect())
}

/// Rejects when the most even draw allocation is not graphical; any other
/// allocation is less even and therefore not graphical either.
pub fn l7_sport_uniform(s: &[u32]) -> (Verdict, Option<Vec<u32>>) {
    let b = draw_bounds(s);
    match uniform_draws(&b) {
        None => (Verdict::Bad(Stage::L7), None),
        Some(d) if !is_graphical(&d) => (Verdict::Bad(Stage::L7), Some(d)),
        Some(d) => (Verdict::Undecided, Some(d)),
    }
}

/// Global capacity checks on draws, wins and losses, plus a graphicality test
/// when the sorted draw sequence is forced.
pub fn l8_draw_sorted_unique(s: &[u32]) -> Verdict {
    let b = draw_bounds(s);
    let sum = |v: &[i64]| v.iter().sum::<i64>();
    let decisive = b.decisive();
    let target = 2 * b.dn;
    let obligatory = sum(&b.r);
    let capacity: i64 = b.packets.iter().map(|&x| x.max(0)).sum();
    if obligatory > target
        || obligatory + 3 * capacity < target
        || sum(&b.wins_min) > decisive
        || sum(&b.wins_max) < decisive
        || sum(&b.losses_min) > decisive
        || sum(&b.losses_max) < decisive
    {
        return Verdict::Bad(Stage::L8);
    }
    match sorted_forced_draws(s, &b) {
        Some(d) => verdict(!is_graphical(&d), Stage::L8),
        None => Verdict::Undecided,
    }
}

/// Runs even rounds of packets; if a final partial round is needed and its
/// candidates do not all share one score, the sorted outcome is ambiguous.
fn sorted_forced_draws(s: &[u32], b: &DrawBounds) -> Option<Vec<u32>> {
    if !b.feasible_per_team() {
        return None;
    }
    let mut left = b.free_packets();
    if left < 0 {
        return None;
    }
    let n = b.n;
    let mut given = vec![0i64; n];
    while left > 0 {
        let eligible: Vec<usize> = (0..n).filter(|&i| given[i] < b.packets[i]).collect();
        if eligible.is_empty() {
            return None;
        }
        if left as usize >= eligible.len() {
            for &i in &eligible {
                given[i] += 1;
            }
            left -= eligible.len() as i64;
        } else {
            if eligible.iter().any(|&i| s[i] != s[eligible[0]]) {
                return None;
            }
            for &i in &eligible[..left as usize] {
                given[i] += 1;
            }
            left = 0;
        }
    }
    Some((0..n).map(|i| (b.lower[i] + 3 * given[i]) as u32).collect())
}

/// Every linear test in order; the first rejection wins.
pub fn linear_cascade(s: &[u32]) -> Verdict {
    let quick: [fn(&[u32]) -> Verdict; 5] = [
        l1_complete,
        l2_point_losses,
        l3_reduction0,
        l4_reduction1,
        l5_draw_unique,
    ];
    for test in quick {
        let v = test(s);
        if v.is_bad() {
            return v;
        }
    }
    let b = draw_bounds(s);
    if let Some(d) = unique_draws(&b) {
        if let Some(sport) = SportMatrix::from_draws(s, &d) {
            if let Ok(v @ Verdict::Bad(_)) = l6_balanced(&sport.wins(), &sport.losses()) {
                return v;
            }
        }
    }
    let (v, _) = l7_sport_uniform(s);
    if v.is_bad() {
        return v;
    }
    l8_draw_sorted_unique(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters_const::constant_cascade;
    use crate::seqcore::generate_regular;

    fn bad(v: Verdict, stage: Stage) -> bool {
        v == Verdict::Bad(stage)
    }

    #[test]
    fn l1_examples() {
        assert!(bad(l1_complete(&[0, 0, 0]), Stage::L1));
        assert!(l1_complete(&[3, 3, 3]).is_undecided());
        assert!(l1_complete(&[0, 3, 6]).is_undecided());
    }

    #[test]
    fn l2_examples() {
        assert!(bad(l2_point_losses(&[0, 4, 5]), Stage::L2));
        assert!(l2_point_losses(&[2, 2, 2]).is_undecided());
        assert!(l2_point_losses(&[1, 1, 6]).is_undecided());
    }

    #[test]
    fn l3_examples() {
        assert!(bad(l3_reduction0(&[1, 1, 4]), Stage::L3));
        assert!(l3_reduction0(&[0, 4, 4]).is_undecided());
        assert!(l3_reduction0(&[0, 3, 6]).is_undecided());
    }

    #[test]
    fn l4_examples() {
        assert!(bad(l4_reduction1(&[1, 2, 3]), Stage::L4));
        assert!(l4_reduction1(&[1, 2, 4]).is_undecided());
        assert!(bad(l4_reduction1(&[2, 2, 6, 8]), Stage::L4));
    }

    #[test]
    fn draw_bounds_examples() {
        let b = draw_bounds(&[3, 3, 3, 5]);
        assert_eq!(b.dn, 4);
        assert_eq!(b.lower, vec![0, 0, 0, 2]);
        assert_eq!(b.upper, vec![3, 3, 3, 2]);
        let b = draw_bounds(&[2, 2, 2]);
        assert_eq!((b.dn, b.lower.clone(), b.upper.clone()), (3, vec![2; 3], vec![2; 3]));
        let b = draw_bounds(&[0, 3, 6]);
        assert_eq!((b.dn, b.lower.clone(), b.upper.clone()), (0, vec![0; 3], vec![0; 3]));
    }

    #[test]
    fn graphical_examples() {
        assert!(is_graphical(&[2, 2, 2]));
        assert!(!is_graphical(&[1, 1, 1]));
        assert!(!is_graphical(&[3, 3, 2, 0]));
        assert!(is_graphical(&[]));
    }

    #[test]
    fn l5_examples() {
        assert!(bad(l5_draw_unique(&[0, 4, 5]), Stage::L5));
        assert!(l5_draw_unique(&[0, 4, 4]).is_undecided());
        assert!(l5_draw_unique(&[1, 1, 8, 9, 9]).is_undecided());
        assert_eq!(unique_draws(&draw_bounds(&[0, 4, 4])), Some(vec![0, 1, 1]));
    }

    #[test]
    fn l6_examples() {
        assert!(l6_balanced(&[0, 0, 2, 3, 3], &[3, 3, 0, 1, 1]).unwrap().is_undecided());
        assert!(bad(l6_balanced(&[0, 0, 0, 0, 4], &[4, 0, 0, 0, 0]).unwrap(), Stage::L6));
        assert!(l6_balanced(&[0, 1, 2], &[2, 1, 0]).unwrap().is_undecided());
        assert!(l6_balanced(&[1, 2], &[1]).is_err());
        assert!(l6_balanced(&[1, 2], &[1, 1]).is_err());
    }

    #[test]
    fn l7_examples() {
        let (v, d) = l7_sport_uniform(&[3, 3, 3, 5]);
        assert!(bad(v, Stage::L7));
        let mut d = d.unwrap();
        d.sort_unstable();
        assert_eq!(d, vec![0, 2, 3, 3]);
        assert_eq!(l7_sport_uniform(&[2, 2, 2]), (Verdict::Undecided, Some(vec![2, 2, 2])));
        assert_eq!(
            l7_sport_uniform(&[1, 1, 8, 8, 10, 13]),
            (Verdict::Undecided, Some(vec![1, 1, 2, 2, 1, 1]))
        );
    }

    #[test]
    fn l8_examples() {
        assert!(bad(l8_draw_sorted_unique(&[3, 3, 3, 5]), Stage::L8));
        assert!(l8_draw_sorted_unique(&[1, 1, 7, 7]).is_undecided());
        assert!(l8_draw_sorted_unique(&[0, 3, 6]).is_undecided());
    }

    #[test]
    fn cascade_examples() {
        // top three sum to one below their maximum, yet one of them is 2 mod 3
        assert!(bad(linear_cascade(&[1, 1, 8, 9, 9]), Stage::L4));
        assert!(linear_cascade(&[1, 1, 8, 8, 10, 13]).is_undecided());
        assert!(linear_cascade(&[1, 1, 7, 7]).is_undecided());
    }

    fn survivors(n: usize) -> usize {
        generate_regular(n)
            .unwrap()
            .filter(|s| constant_cascade(&s[..]).is_undecided() && linear_cascade(s).is_undecided())
            .count()
    }

    #[test]
    fn survivor_counts() {
        assert_eq!(survivors(4), 40);
        assert_eq!(survivors(5), 360);
    }

    #[test]
    fn uniform_draws_stay_within_bounds() {
        for n in 1..=6 {
            for s in generate_regular(n).unwrap() {
                let b = draw_bounds(&s);
                if let Some(d) = uniform_draws(&b) {
                    let total: i64 = d.iter().map(|&v| v as i64).sum();
                    assert_eq!(total, 2 * b.dn);
                    for i in 0..n {
                        assert!(b.lower[i] <= d[i] as i64 && d[i] as i64 <= b.upper[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn sport_matrix_identities() {
        let s = [1u32, 1, 8, 8, 10, 13];
        let sm = SportMatrix::from_draws(&s, &[1, 1, 2, 2, 1, 1]).unwrap();
        assert_eq!(sm.wins(), vec![0, 0, 2, 2, 3, 4]);
        assert_eq!(sm.losses(), vec![4, 4, 1, 1, 1, 0]);
        let w: u32 = sm.wins().iter().sum();
        let total: u32 = s.iter().sum();
        assert_eq!(w as usize, total as usize - 6 * 5);
        assert!(SportMatrix::from_draws(&[3], &[1]).is_none());
    }
}
