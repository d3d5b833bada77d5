//! Classical realization tests for tournament-like score sequences and the
//! closed-form ratios describing how much of the regular universe the
//! constant tests remove.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters_const::ConstFilterId;
use crate::seqcore::pairs;

fn prefix_sums(s: &[u32]) -> Vec<i64> {
    let mut out = Vec::with_capacity(s.len() + 1);
    out.push(0);
    let mut acc = 0i64;
    for &v in s {
        acc += v as i64;
        out.push(acc);
    }
    out
}

fn sorted(s: &[u32]) -> Vec<u32> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v
}

/// Score sequence of some tournament: prefix sums at least `k(k-1)/2`, with
/// equality for the whole sequence.
pub fn landau_test(s: &[u32]) -> bool {
    moon_bound(s, 1)
}

fn moon_bound(s: &[u32], b: i64) -> bool {
    let s = sorted(s);
    let n = s.len();
    let sums = prefix_sums(&s);
    (1..=n).all(|k| sums[k] >= b * pairs(k)) && sums[n] == b * pairs(n)
}

/// Score sequence of some tournament where each match distributes exactly `b`
/// points in any integer split.
pub fn moon_test(s: &[u32], b: u32) -> Result<bool> {
    if b == 0 {
        return Err(Error::invalid("points per match must be positive"));
    }
    Ok(moon_bound(s, b as i64))
}

/// Lower bounds on the points lost by the first `k` teams.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointLossVector {
    pub b: u32,
    /// `losses[k]` covers the `k` weakest teams; `losses[0] = 0`.
    pub losses: Vec<i64>,
}

pub fn point_loss(s: &[u32], b: u32) -> Result<PointLossVector> {
    if b == 0 {
        return Err(Error::invalid("points per win must be positive"));
    }
    let sums = prefix_sums(s);
    let mut losses = vec![0i64; s.len() + 1];
    for k in 1..=s.len() {
        losses[k] = losses[k - 1].max(b as i64 * pairs(k) - sums[k]);
    }
    Ok(PointLossVector { b, losses })
}

/// Score sequence of some complete tournament where every match hands out
/// between `a` and `b` points.
pub fn interval_complete_test(s: &[u32], a: u32, b: u32) -> Result<bool> {
    if b == 0 || a > b {
        return Err(Error::invalid(format!("need 0 <= a <= b and b >= 1, got a={a}, b={b}")));
    }
    let n = s.len();
    let sums = prefix_sums(s);
    let loss = point_loss(s, b)?;
    let total = b as i64 * pairs(n);
    Ok((1..=n).all(|k| {
        let upper = total - loss.losses[k] - (n - k) as i64 * s[k - 1] as i64;
        a as i64 * pairs(k) <= sums[k] && sums[k] <= upper
    }))
}

/// Score sequence of some semicomplete digraph (every pair joined by one arc
/// or by two opposite arcs).
pub fn reid_zhang_test(s: &[u32]) -> bool {
    let s = sorted(s);
    let n = s.len();
    let sums = prefix_sums(&s);
    (1..=n).all(|k| sums[k] >= pairs(k) && (s[k - 1] as usize) < n.max(1))
}

/// Out-degree / in-degree pairs of a digraph with no loops and at most one arc
/// per ordered pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigraphPairSequence {
    pairs: Vec<(u32, u32)>,
}

impl DigraphPairSequence {
    /// Sorts by out-degree descending, breaking ties by in-degree descending.
    pub fn new(mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.sort_by(|x, y| y.0.cmp(&x.0).then(y.1.cmp(&x.1)));
        DigraphPairSequence { pairs }
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }
}

/// Realizability of out/in-degree pairs as a simple digraph.
pub fn berger_test(d: &DigraphPairSequence) -> bool {
    let p = d.pairs();
    let n = p.len();
    let out_total: i64 = p.iter().map(|x| x.0 as i64).sum();
    let in_total: i64 = p.iter().map(|x| x.1 as i64).sum();
    if out_total != in_total {
        return false;
    }
    let mut out_prefix = 0i64;
    for k in 1..=n {
        out_prefix += p[k - 1].0 as i64;
        let inside: i64 = p[..k].iter().map(|x| (x.1 as i64).min(k as i64 - 1)).sum();
        let outside: i64 = p[k..].iter().map(|x| (x.1 as i64).min(k as i64)).sum();
        if out_prefix > inside + outside {
            return false;
        }
    }
    true
}

/// Fewest decisive matches that still give every team a different score.
/// Exhaustive over all result matrices, so only small fields are supported.
pub fn min_wins_strict(n: usize) -> Result<u32> {
    if !(2..=5).contains(&n) {
        return Err(Error::invalid(format!("min_wins_strict supports 2..=5 teams, got {n}")));
    }
    let matches: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut best = u32::MAX;
    let mut scores = vec![0u32; n];
    search_min_wins(&matches, 0, &mut scores, 0, &mut best);
    Ok(best)
}

fn search_min_wins(
    matches: &[(usize, usize)],
    at: usize,
    scores: &mut [u32],
    decisive: u32,
    best: &mut u32,
) {
    if decisive >= *best {
        return;
    }
    if at == matches.len() {
        let mut s = scores.to_vec();
        s.sort_unstable();
        if s.windows(2).all(|w| w[0] < w[1]) {
            *best = decisive;
        }
        return;
    }
    let (i, j) = matches[at];
    for (pi, pj) in [(1, 1), (3, 0), (0, 3)] {
        scores[i] += pi;
        scores[j] += pj;
        let extra = u32::from(pi != 1);
        search_min_wins(matches, at + 1, scores, decisive + extra, best);
        scores[i] -= pi;
        scores[j] -= pj;
    }
}

#[cfg(test)]
/// Builds a matrix realizing the minimum found by [`min_wins_strict`]; used in
/// tests to double check that the minimum is attained by a real table.
pub(crate) fn min_wins_witness(n: usize, wins: u32) -> Option<crate::seqcore::ResultMatrix> {
    let matches: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let total = 3usize.pow(matches.len() as u32);
    (0..total).find_map(|mut code| {
        let mut m = crate::seqcore::ResultMatrix::new(n);
        let mut decisive = 0;
        for &(i, j) in &matches {
            let p = [1u8, 3, 0][code % 3];
            code /= 3;
            decisive += u32::from(p != 1);
            m.put(i, j, p);
        }
        let mut s = m.row_sums();
        s.sort_unstable();
        (decisive == wins && s.windows(2).all(|w| w[0] < w[1])).then_some(m)
    })
}

/// Which constant tests an efficiency figure refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FilterSelector {
    One(ConstFilterId),
    All,
}

/// A team count or the limit as it grows without bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Horizon {
    Finite(u64),
    Limit,
}

#[derive(Clone, Copy)]
enum Side {
    Bottom,
    Top,
}

/// Fixed outermost entries of a rejected pattern, listed from the edge of the
/// sequence inwards.
struct Pattern {
    side: Side,
    fixed: Vec<i64>,
}

fn patterns(id: ConstFilterId, n: i64) -> Vec<Pattern> {
    use ConstFilterId::*;
    let top = |fixed: Vec<i64>| Pattern { side: Side::Top, fixed };
    let bottom = |fixed: Vec<i64>| Pattern { side: Side::Bottom, fixed };
    let u = 3 * n - 3;
    match id {
        C1 => vec![top(vec![3 * n - 4])],
        C2 => (3 * n - 5..=u).map(|v| top(vec![u, v])).collect(),
        C3 => (0..=2).map(|v| bottom(vec![0, v])).collect(),
        C4 => (1..=5).map(|v| bottom(vec![1, 1, v])).collect(),
        C5 => (3 * n - 8..=3 * n - 5)
            .map(|v| top(vec![3 * n - 5, 3 * n - 5, v]))
            .collect(),
        C6 => (3 * n - 8..=3 * n - 6)
            .map(|v| top(vec![u, 3 * n - 6, v]))
            .collect(),
        C7 => (3..=5).map(|v| bottom(vec![0, 3, v])).collect(),
        C8 => (2..=3).map(|v| bottom(vec![1, 2, v])).collect(),
        C9 => vec![top(vec![3 * n - 5, 3 * n - 7, 3 * n - 7])],
    }
}

/// `x! / y!` as an exact rational.
fn factorial_ratio(x: i64, y: i64) -> BigRational {
    let mut acc = BigInt::one();
    for f in x.min(y) + 1..=x.max(y) {
        acc *= f;
    }
    if x >= y {
        BigRational::from_integer(acc)
    } else {
        BigRational::new(BigInt::one(), acc)
    }
}

/// `binomial(a, b) / binomial(top, bottom)`, cheap when the arguments are
/// close to each other.
fn binomial_ratio(a: i64, b: i64, top: i64, bottom: i64) -> BigRational {
    if b < 0 || b > a {
        return BigRational::zero();
    }
    factorial_ratio(a, top) * factorial_ratio(bottom, b) * factorial_ratio(top - bottom, a - b)
}

fn pattern_fraction(p: &Pattern, n: i64) -> BigRational {
    let u = 3 * n - 3;
    let j = p.fixed.len() as i64;
    if j > n || n < 1 {
        return BigRational::zero();
    }
    if p.fixed.iter().any(|&v| v < 0 || v > u) {
        return BigRational::zero();
    }
    let monotone = p.fixed.windows(2).all(|w| match p.side {
        Side::Top => w[0] >= w[1],
        Side::Bottom => w[0] <= w[1],
    });
    if !monotone {
        return BigRational::zero();
    }
    let inner = *p.fixed.last().unwrap();
    let free = n - j;
    let span = match p.side {
        Side::Top => inner,
        Side::Bottom => u - inner,
    };
    binomial_ratio(span + free, free, 4 * n - 3, n)
}

fn limit_constant(id: ConstFilterId) -> BigRational {
    use ConstFilterId::*;
    let (num, den): (i64, i64) = match id {
        C1 => (3, 16),
        C2 | C3 => (37, 256),
        C4 => (2343, 1 << 16),
        C5 => (1575, 1 << 16),
        C6 | C7 => (999, 1 << 16),
        C8 => (63, 1 << 12),
        C9 => (81, 1 << 14),
    };
    BigRational::new(num.into(), den.into())
}

/// Share of `(0, 3n-3, n)`-regular sequences rejected by a constant test,
/// taken in isolation. The combined figure is the sum of the nine shares.
pub fn filter_efficiency(filter: FilterSelector, n: Horizon) -> Result<BigRational> {
    let ids: Vec<ConstFilterId> = match filter {
        FilterSelector::One(id) => vec![id],
        FilterSelector::All => ConstFilterId::ALL.to_vec(),
    };
    match n {
        Horizon::Limit => Ok(ids.into_iter().map(limit_constant).sum()),
        Horizon::Finite(0) => Err(Error::invalid("at least one team is required")),
        Horizon::Finite(n) => {
            let n = i64::try_from(n).map_err(|_| Error::invalid("team count too large"))?;
            Ok(ids
                .into_iter()
                .filter(|id| id.applies_to(n as usize))
                .flat_map(|id| patterns(id, n))
                .map(|p| pattern_fraction(&p, n))
                .sum())
        }
    }
}

/// `R(n+1) / R(n)`, the growth of the regular universe per extra team.
pub fn regular_growth_ratio(n: Horizon) -> Result<BigRational> {
    match n {
        Horizon::Limit => Ok(BigRational::new(256.into(), 27.into())),
        Horizon::Finite(0) => Err(Error::invalid("at least one team is required")),
        Horizon::Finite(n) => {
            let n = i64::try_from(n).map_err(|_| Error::invalid("team count too large"))?;
            Ok(binomial_ratio(4 * n + 1, n + 1, 4 * n - 3, n))
        }
    }
}

/// Fixed-point decimal rendering, truncated toward zero after `digits` places.
pub fn format_decimal(r: &BigRational, digits: usize) -> String {
    let negative = r.is_negative();
    let num = r.numer().abs().to_biguint().unwrap_or_default();
    let den = r.denom().abs().to_biguint().unwrap_or_else(BigUint::one);
    let (whole, mut rem) = num.div_rem(&den);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&whole.to_string());
    if digits > 0 {
        out.push('.');
        for _ in 0..digits {
            rem *= 10u32;
            let (d, r2) = rem.div_rem(&den);
            out.push_str(&d.to_string());
            rem = r2;
        }
    }
    out
}

/// Nearest `f64`, good enough for comparisons at reporting tolerances.
pub fn to_f64(r: &BigRational) -> f64 {
    let scale = BigInt::from(10u64).pow(17);
    let scaled = (r.numer() * &scale) / r.denom();
    scaled.to_f64().unwrap_or(f64::NAN) / 1e17
}

#[cfg(test)]
pub(crate) fn regular_count_big(n: usize) -> BigUint {
    num_integer::binomial(BigUint::from(4 * n - 3), BigUint::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters_const::constant_test;
    use crate::seqcore::generate_regular;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn all_tournament_scores(n: usize, outcomes: &[(u32, u32)]) -> Vec<Vec<u32>> {
        let matches: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let k = outcomes.len();
        let mut out = Vec::new();
        for mut code in 0..k.pow(matches.len() as u32) {
            let mut s = vec![0u32; n];
            for &(i, j) in &matches {
                let (a, b) = outcomes[code % k];
                code /= k;
                s[i] += a;
                s[j] += b;
            }
            s.sort_unstable();
            out.push(s);
        }
        out.sort();
        out.dedup();
        out
    }

    fn all_sorted(n: usize, max: u32) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::new();
            for p in &out {
                let lo = p.last().copied().unwrap_or(0);
                for v in lo..=max {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn landau_examples() {
        assert!(landau_test(&[0, 1, 2]));
        assert!(landau_test(&[1, 1, 1]));
        assert!(!landau_test(&[0, 0, 3]));
    }

    #[test]
    fn landau_matches_exhaustive_tournaments() {
        for n in 1..=5 {
            let real = all_tournament_scores(n, &[(1, 0), (0, 1)]);
            for s in all_sorted(n, n as u32) {
                assert_eq!(landau_test(&s), real.binary_search(&s).is_ok(), "{s:?}");
            }
        }
    }

    #[test]
    fn moon_examples_and_exhaustive() {
        assert!(moon_test(&[2, 2, 2], 2).unwrap());
        assert!(moon_test(&[0, 2, 4], 2).unwrap());
        assert!(!moon_test(&[0, 1, 5], 2).unwrap());
        assert!(moon_test(&[1], 0).is_err());
        for b in 1..=2u32 {
            let outcomes: Vec<(u32, u32)> = (0..=b).map(|x| (x, b - x)).collect();
            for n in 1..=4 {
                let real = all_tournament_scores(n, &outcomes);
                for s in all_sorted(n, b * (n as u32 - 1) + 1) {
                    assert_eq!(moon_test(&s, b).unwrap(), real.binary_search(&s).is_ok());
                }
            }
        }
    }

    #[test]
    fn point_loss_examples() {
        assert_eq!(point_loss(&[0, 3, 6], 3).unwrap().losses, vec![0, 0, 0, 0]);
        assert_eq!(point_loss(&[0, 0, 9], 3).unwrap().losses, vec![0, 0, 3, 3]);
        assert_eq!(point_loss(&[3, 3, 3], 3).unwrap().losses, vec![0, 0, 0, 0]);
    }

    #[test]
    fn interval_examples() {
        assert!(interval_complete_test(&[0, 3, 6], 2, 3).unwrap());
        assert!(!interval_complete_test(&[0, 0, 6], 2, 3).unwrap());
        assert!(interval_complete_test(&[2, 2, 2], 2, 3).unwrap());
        assert!(interval_complete_test(&[2, 2, 2], 4, 3).is_err());
    }

    #[test]
    fn interval_test_is_necessary_for_football() {
        for n in 1..=4 {
            let football = all_tournament_scores(n, &[(3, 0), (1, 1), (0, 3)]);
            for s in &football {
                assert!(interval_complete_test(s, 2, 3).unwrap(), "{s:?}");
            }
        }
    }

    #[test]
    fn reid_zhang_examples() {
        assert!(reid_zhang_test(&[1, 1, 1]));
        assert!(!reid_zhang_test(&[0, 1, 3]));
        assert!(reid_zhang_test(&[1, 1, 2]));
    }

    #[test]
    fn berger_examples() {
        assert!(berger_test(&DigraphPairSequence::new(vec![(1, 1), (1, 1)])));
        assert!(!berger_test(&DigraphPairSequence::new(vec![(2, 0), (0, 2)])));
        assert!(berger_test(&DigraphPairSequence::new(vec![(0, 0); 4])));
    }

    #[test]
    fn berger_matches_exhaustive_digraphs() {
        for n in 1..=4usize {
            let arcs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .collect();
            let mut real = std::collections::HashSet::new();
            for mask in 0u32..(1 << arcs.len()) {
                let mut deg = vec![(0u32, 0u32); n];
                for (b, &(i, j)) in arcs.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        deg[i].0 += 1;
                        deg[j].1 += 1;
                    }
                }
                real.insert(DigraphPairSequence::new(deg));
            }
            let mut candidates = vec![vec![]];
            for _ in 0..n {
                candidates = candidates
                    .into_iter()
                    .flat_map(|p: Vec<(u32, u32)>| {
                        (0..n as u32).flat_map(move |a| {
                            let p = p.clone();
                            (0..n as u32).map(move |b| {
                                let mut q = p.clone();
                                q.push((a, b));
                                q
                            })
                        })
                    })
                    .collect();
            }
            for c in candidates {
                let d = DigraphPairSequence::new(c);
                assert_eq!(berger_test(&d), real.contains(&d), "{:?}", d.pairs());
            }
        }
    }

    #[test]
    fn min_wins_values() {
        assert_eq!(min_wins_strict(2).unwrap(), 1);
        assert_eq!(min_wins_strict(3).unwrap(), 1);
        assert_eq!(min_wins_strict(4).unwrap(), 2);
        assert!(min_wins_strict(1).is_err());
        assert!(min_wins_strict(6).is_err());
        let m = min_wins_witness(4, 2).unwrap();
        let s = m.row_sums();
        assert!(crate::seqcore::validate_result_matrix(&m, &s).unwrap());
    }

    #[test]
    fn efficiency_examples() {
        let c1 = FilterSelector::One(ConstFilterId::C1);
        assert_eq!(filter_efficiency(c1, Horizon::Finite(2)).unwrap(), ratio(3, 10));
        assert_eq!(filter_efficiency(c1, Horizon::Limit).unwrap(), ratio(3, 16));
        assert_eq!(
            filter_efficiency(FilterSelector::All, Horizon::Limit).unwrap(),
            ratio(38480, 65536)
        );
    }

    #[test]
    fn efficiency_matches_exhaustive_counts() {
        for n in 1..=6usize {
            let total = regular_count_big(n);
            for id in ConstFilterId::ALL {
                let rejected = generate_regular(n)
                    .unwrap()
                    .filter(|s| constant_test(id, s).is_bad())
                    .count();
                let expected = BigRational::new(
                    BigInt::from(rejected),
                    BigInt::from(total.clone()),
                );
                let got = filter_efficiency(FilterSelector::One(id), Horizon::Finite(n as u64))
                    .unwrap();
                assert_eq!(got, expected, "{id:?} at n = {n}");
            }
        }
    }

    #[test]
    fn efficiency_approaches_limits() {
        let far = Horizon::Finite(1_000_000);
        for id in ConstFilterId::ALL {
            let sel = FilterSelector::One(id);
            let gap = to_f64(&filter_efficiency(sel, far).unwrap())
                - to_f64(&filter_efficiency(sel, Horizon::Limit).unwrap());
            assert!(gap.abs() < 1e-4, "{id:?}: {gap}");
        }
    }

    #[test]
    fn growth_ratio_is_exact() {
        assert_eq!(regular_growth_ratio(Horizon::Finite(2)).unwrap(), ratio(42, 5));
        let three = regular_growth_ratio(Horizon::Finite(3)).unwrap();
        assert_eq!(format_decimal(&three, 3), "8.511");
        assert_eq!(regular_growth_ratio(Horizon::Limit).unwrap(), ratio(256, 27));
        for n in 1..=14usize {
            let r = regular_growth_ratio(Horizon::Finite(n as u64)).unwrap();
            let lhs = r * BigRational::from_integer(BigInt::from(regular_count_big(n)));
            assert_eq!(lhs, BigRational::from_integer(BigInt::from(regular_count_big(n + 1))));
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(&ratio(3, 16), 4), "0.1875");
        assert_eq!(format_decimal(&ratio(-1, 3), 2), "-0.33");
        assert!((to_f64(&ratio(38480, 65536)) - 0.587158203125).abs() < 1e-12);
    }
}
