//! Building result matrices for sequences the filters could not reject:
//! forced blocks (R1), a Havel–Hakimi draw graph with greedy decisive results
//! (R2), and a bounded search over draw graphs that honours draws forced among
//! the weakest teams (R3).

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters_linear::{draw_bounds, uniform_draws, SportMatrix};
use crate::filters_quad::{quad_cascade, BlockKind, QuadOutcome, ReducedSequence, StripSide};
use crate::seqcore::{pairs, validate_result_matrix, ResultMatrix, Stage, Verdict};

/// Draw graphs tried by the R3 search before it gives up.
pub const PAIRING_BUDGET: usize = 64;

/// Which teams drew with each other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrawAssignment {
    pub d: Vec<u32>,
    /// Unordered pairs `(i, j)` with `i < j`, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub forced: Vec<(usize, usize)>,
}

impl DrawAssignment {
    pub fn degree(&self, team: usize) -> usize {
        self.pairs.iter().filter(|&&(i, j)| i == team || j == team).count()
    }

    fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.d.len();
        let mut adj = vec![vec![false; n]; n];
        for &(i, j) in &self.pairs {
            adj[i][j] = true;
            adj[j][i] = true;
        }
        adj
    }
}

/// Lower bound on the draws among the `k` weakest teams, for every `k`
/// (index `k - 1`).
pub fn inner_draw_bounds(s: &[u32]) -> Vec<u32> {
    let mut sum = 0i64;
    s.iter()
        .enumerate()
        .map(|(i, &v)| {
            sum += v as i64;
            let gap = 3 * pairs(i + 1) - sum;
            if gap > 0 {
                ((gap + 1) / 2) as u32
            } else {
                0
            }
        })
        .collect()
}

struct PairingSearch<'a> {
    residual: Vec<i64>,
    adj: Vec<Vec<bool>>,
    leaves: usize,
    budget: usize,
    accept: &'a mut dyn FnMut(&[Vec<bool>]) -> ControlFlow<()>,
}

impl PairingSearch<'_> {
    fn run(&mut self) -> ControlFlow<()> {
        let n = self.residual.len();
        let Some(v) = (0..n)
            .filter(|&i| self.residual[i] > 0)
            .max_by_key(|&i| (self.residual[i], std::cmp::Reverse(i)))
        else {
            self.leaves += 1;
            let flow = (self.accept)(&self.adj);
            if flow.is_break() || self.leaves >= self.budget {
                return ControlFlow::Break(());
            }
            return ControlFlow::Continue(());
        };
        let mut candidates: Vec<usize> = (0..n)
            .filter(|&u| u != v && !self.adj[v][u] && self.residual[u] > 0)
            .collect();
        candidates.sort_by_key(|&u| (std::cmp::Reverse(self.residual[u]), u));
        let need = self.residual[v] as usize;
        if candidates.len() < need {
            return ControlFlow::Continue(());
        }
        let mut chosen = Vec::with_capacity(need);
        self.choose(v, &candidates, 0, need, &mut chosen)
    }

    fn choose(
        &mut self,
        v: usize,
        candidates: &[usize],
        from: usize,
        need: usize,
        chosen: &mut Vec<usize>,
    ) -> ControlFlow<()> {
        if chosen.len() == need {
            for &u in chosen.iter() {
                self.link(v, u, true);
            }
            let saved = self.residual[v];
            self.residual[v] = 0;
            let flow = if residual_graphical(&self.residual) {
                self.run()
            } else {
                ControlFlow::Continue(())
            };
            self.residual[v] = saved;
            for &u in chosen.iter() {
                self.link(v, u, false);
            }
            return flow;
        }
        let left = need - chosen.len();
        for idx in from..candidates.len() {
            if candidates.len() - idx < left {
                break;
            }
            chosen.push(candidates[idx]);
            let flow = self.choose(v, candidates, idx + 1, need, chosen);
            chosen.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn link(&mut self, v: usize, u: usize, on: bool) {
        self.adj[v][u] = on;
        self.adj[u][v] = on;
        self.residual[u] += if on { -1 } else { 1 };
    }
}

fn residual_graphical(res: &[i64]) -> bool {
    let d: Vec<u32> = res.iter().map(|&v| v as u32).collect();
    crate::filters_linear::is_graphical(&d)
}

/// Enumerates draw graphs realizing `d` that contain `forced`, starting with
/// the Havel–Hakimi graph (the maximum-residual team is joined to the teams
/// with the next largest residuals, ties by lowest index). `accept` is called
/// once per graph; the search ends on `Break` or after `budget` graphs.
fn for_each_pairing(
    d: &[u32],
    forced: &[(usize, usize)],
    budget: usize,
    accept: &mut dyn FnMut(&[Vec<bool>]) -> ControlFlow<()>,
) {
    let n = d.len();
    let mut residual: Vec<i64> = d.iter().map(|&v| v as i64).collect();
    let mut adj = vec![vec![false; n]; n];
    for &(i, j) in forced {
        if i == j || i >= n || j >= n || adj[i][j] {
            return;
        }
        adj[i][j] = true;
        adj[j][i] = true;
        residual[i] -= 1;
        residual[j] -= 1;
    }
    if residual.iter().any(|&r| r < 0) || residual.iter().sum::<i64>() % 2 != 0 {
        return;
    }
    let mut search = PairingSearch {
        residual,
        adj,
        leaves: 0,
        budget: budget.max(1),
        accept,
    };
    let _ = search.run();
}

fn edges(adj: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let n = adj.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if adj[i][j] {
                out.push((i, j));
            }
        }
    }
    out
}

fn normalized(forced: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut f: Vec<(usize, usize)> = forced.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    f.sort_unstable();
    f
}

/// A simple graph with degrees `d` containing every forced pair, or `None`
/// when none exists. The Havel–Hakimi graph is returned whenever it works;
/// otherwise the search falls back to exhaustive backtracking.
pub fn pair_draws(d: &[u32], forced: &[(usize, usize)]) -> Option<DrawAssignment> {
    let total: u64 = d.iter().map(|&v| v as u64).sum();
    if total % 2 == 1 {
        return None;
    }
    let mut found = None;
    for_each_pairing(d, forced, usize::MAX, &mut |adj| {
        found = Some(edges(adj));
        ControlFlow::Break(())
    });
    found.map(|pairs| DrawAssignment {
        d: d.to_vec(),
        pairs,
        forced: normalized(forced),
    })
}

/// Places wins greedily: teams with more wins go first and beat the
/// opponents with the most losses still to hand out. `Ok(None)` when the
/// greedy gets stuck.
pub fn assign_decisive(
    draws: &DrawAssignment,
    w: &[u32],
    l: &[u32],
) -> Result<Option<ResultMatrix>> {
    let n = draws.d.len();
    if w.len() != n || l.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: w.len().min(l.len()),
        });
    }
    for i in 0..n {
        if w[i] as usize + draws.d[i] as usize + l[i] as usize + 1 != n.max(1) {
            return Err(Error::invalid(format!(
                "team {i}: wins, draws and losses do not add up to {} matches",
                n - 1
            )));
        }
        if draws.degree(i) != draws.d[i] as usize {
            return Err(Error::invalid(format!("team {i} has the wrong number of draw partners")));
        }
    }
    let adj = draws.adjacency();
    let mut m = ResultMatrix::new(n);
    for &(i, j) in &draws.pairs {
        m.put(i, j, 1);
    }
    let mut wins: Vec<i64> = w.iter().map(|&v| v as i64).collect();
    let mut losses: Vec<i64> = l.iter().map(|&v| v as i64).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(w[i]), i));
    for &i in &order {
        let mut open: Vec<usize> = (0..n)
            .filter(|&j| j != i && !adj[i][j] && m.get(i, j).is_none())
            .collect();
        if open.len() as i64 != wins[i] + losses[i] {
            return Ok(None);
        }
        open.sort_by_key(|&j| (std::cmp::Reverse(losses[j]), j));
        let take = wins[i] as usize;
        for (rank, &j) in open.iter().enumerate() {
            let (winner, loser) = if rank < take { (i, j) } else { (j, i) };
            if wins[winner] <= 0 || losses[loser] <= 0 {
                return Ok(None);
            }
            m.put(winner, loser, 3);
            wins[winner] -= 1;
            losses[loser] -= 1;
        }
    }
    Ok(Some(m))
}

/// Internal results of a block that won everything outside: the strongest
/// team loses to the teams with the next largest scores and beats the rest.
fn transitive_block(scores: &[i64]) -> Option<Vec<(usize, usize)>> {
    let k = scores.len();
    let mut left: Vec<(usize, i64)> = scores.iter().copied().enumerate().collect();
    let mut wins = Vec::new();
    while let Some(top_at) = (0..left.len()).max_by_key(|&p| (left[p].1, std::cmp::Reverse(p))) {
        let (top, score) = left.remove(top_at);
        let beaten_by = left.len() as i64 - score;
        if score < 0 || beaten_by < 0 {
            return None;
        }
        let mut order: Vec<usize> = (0..left.len()).collect();
        order.sort_by_key(|&p| (std::cmp::Reverse(left[p].1), p));
        for (rank, &p) in order.iter().enumerate() {
            if (rank as i64) < beaten_by {
                wins.push((left[p].0, top));
                left[p].1 -= 1;
            } else {
                wins.push((top, left[p].0));
            }
        }
        if left.is_empty() {
            break;
        }
    }
    debug_assert_eq!(wins.len(), k * k.saturating_sub(1) / 2);
    Some(wins)
}

/// Result matrix rebuilt from the blocks removed by the quadratic filters.
pub fn forced_certificate(n: usize, reduced: &ReducedSequence) -> Option<ResultMatrix> {
    if !reduced.fully_forced() {
        return None;
    }
    let mut m = ResultMatrix::new(n);
    let (mut lo, mut hi) = (0usize, n);
    for strip in &reduced.strip_log {
        let k = strip.size;
        match strip.side {
            StripSide::Prefix => {
                let block = lo..lo + k;
                for i in block.clone() {
                    for j in i + 1..lo + k {
                        m.put(i, j, 1);
                    }
                    for j in lo + k..hi {
                        m.put(j, i, 3);
                    }
                }
                if strip.kind == BlockKind::OneInternalWin {
                    m.put(lo + k - 1, lo, 3);
                }
                lo += k;
            }
            StripSide::Suffix => {
                let outside = hi - lo - k;
                let internal: Vec<i64> = strip
                    .scores
                    .iter()
                    .map(|&v| (v as i64 - 3 * outside as i64) / 3)
                    .collect();
                let base = hi - k;
                for (a, b) in transitive_block(&internal)? {
                    m.put(base + a, base + b, 3);
                }
                for i in base..hi {
                    for j in lo..base {
                        m.put(i, j, 3);
                    }
                }
                hi -= k;
            }
        }
    }
    m.is_complete().then_some(m)
}

fn sport_for(s: &[u32], d: &[u32]) -> Option<(Vec<u32>, Vec<u32>)> {
    let sport = SportMatrix::from_draws(s, d)?;
    Some((sport.wins(), sport.losses()))
}

/// One Havel–Hakimi draw graph and one greedy pass.
pub fn r2_greedy(s: &[u32], d: &[u32]) -> Option<ResultMatrix> {
    let (w, l) = sport_for(s, d)?;
    let mut result = None;
    for_each_pairing(d, &[], 1, &mut |adj| {
        let draws = DrawAssignment {
            d: d.to_vec(),
            pairs: edges(adj),
            forced: Vec::new(),
        };
        result = assign_decisive(&draws, &w, &l).ok().flatten();
        ControlFlow::Break(())
    });
    result.filter(|m| validate_result_matrix(m, s).unwrap_or(false))
}

/// Draw graphs that respect the draws forced among the weakest teams, tried in
/// Havel–Hakimi order up to [`PAIRING_BUDGET`] graphs.
pub fn r3_inner_draws(s: &[u32], d: &[u32]) -> Option<ResultMatrix> {
    let (w, l) = sport_for(s, d)?;
    let bounds = inner_draw_bounds(s);
    let mut forced = Vec::new();
    let mut demands = Vec::new();
    for (idx, &q) in bounds.iter().enumerate() {
        let k = idx + 1;
        if q == 0 {
            continue;
        }
        if q as i64 > pairs(k) {
            return None;
        }
        if q as i64 == pairs(k) {
            forced.clear();
            for i in 0..k {
                for j in i + 1..k {
                    forced.push((i, j));
                }
            }
        } else {
            demands.push((k, q as usize));
        }
    }
    let mut result = None;
    for_each_pairing(d, &forced, PAIRING_BUDGET, &mut |adj| {
        let inside_ok = demands.iter().all(|&(k, q)| {
            let inside = (0..k).map(|i| (i + 1..k).filter(|&j| adj[i][j]).count()).sum::<usize>();
            inside >= q
        });
        if !inside_ok {
            return ControlFlow::Continue(());
        }
        let draws = DrawAssignment {
            d: d.to_vec(),
            pairs: edges(adj),
            forced: forced.clone(),
        };
        match assign_decisive(&draws, &w, &l) {
            Ok(Some(m)) if validate_result_matrix(&m, s).unwrap_or(false) => {
                result = Some(m);
                ControlFlow::Break(())
            }
            _ => ControlFlow::Continue(()),
        }
    });
    result
}

/// R1, then R2, then R3, using evidence the filters already produced.
pub fn reconstruct_with(s: &[u32], quad: &QuadOutcome, draws: Option<&[u32]>) -> Verdict {
    if quad.fully_forced() {
        if let Some(m) = forced_certificate(s.len(), &quad.reduced) {
            if validate_result_matrix(&m, s).unwrap_or(false) {
                return Verdict::Good(Stage::R1, m);
            }
        }
    }
    let owned;
    let d = match draws {
        Some(d) => d,
        None => match uniform_draws(&draw_bounds(s)) {
            Some(d) => {
                owned = d;
                &owned
            }
            None => return Verdict::Undecided,
        },
    };
    if let Some(m) = r2_greedy(s, d) {
        return Verdict::Good(Stage::R2, m);
    }
    if let Some(m) = r3_inner_draws(s, d) {
        return Verdict::Good(Stage::R3, m);
    }
    Verdict::Undecided
}

/// Tries to prove `s` good by construction; never returns `Bad`.
pub fn reconstruct_pipeline(s: &[u32]) -> Verdict {
    let quad = quad_cascade(s);
    if quad.verdict.is_bad() {
        return Verdict::Undecided;
    }
    reconstruct_with(s, &quad, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs1(p: &[(usize, usize)]) -> Vec<(usize, usize)> {
        p.iter().map(|&(a, b)| (a + 1, b + 1)).collect()
    }

    #[test]
    fn inner_bounds_examples() {
        assert_eq!(inner_draw_bounds(&[1, 1, 8, 8, 10, 13])[1], 1);
        assert!(inner_draw_bounds(&[3, 3, 3]).iter().all(|&q| q == 0));
        assert_eq!(inner_draw_bounds(&[0, 0, 9])[1], 2);
    }

    #[test]
    fn havel_hakimi_pairings() {
        let a = pair_draws(&[1, 1, 2, 2, 1, 1], &[]).unwrap();
        assert_eq!(pairs1(&a.pairs), vec![(1, 3), (2, 4), (3, 4), (5, 6)]);
        let b = pair_draws(&[1, 1, 2, 2, 1, 1], &[(0, 1)]).unwrap();
        assert_eq!(pairs1(&b.pairs), vec![(1, 2), (3, 4), (3, 5), (4, 6)]);
        assert_eq!(b.forced, vec![(0, 1)]);
        assert!(pair_draws(&[3, 3, 2, 0], &[]).is_none());
        assert!(pair_draws(&[1, 1, 1], &[]).is_none());
        assert_eq!(pairs1(&pair_draws(&[1, 1, 1, 1], &[]).unwrap().pairs), vec![(1, 2), (3, 4)]);
    }

    #[test]
    fn forced_pairs_are_kept() {
        let a = pair_draws(&[2, 2, 2, 2], &[(0, 1)]).unwrap();
        for i in 0..4 {
            assert_eq!(a.degree(i), 2);
        }
        assert!(a.pairs.contains(&(0, 1)));
        assert!(pair_draws(&[1, 1, 0], &[(0, 2)]).is_none());
    }

    fn draws_of(d: &[u32], p: &[(usize, usize)]) -> DrawAssignment {
        DrawAssignment {
            d: d.to_vec(),
            pairs: normalized(p),
            forced: Vec::new(),
        }
    }

    #[test]
    fn greedy_examples() {
        let w = [0, 0, 2, 2];
        let l = [2, 2, 0, 0];
        let good = assign_decisive(&draws_of(&[1; 4], &[(0, 1), (2, 3)]), &w, &l).unwrap().unwrap();
        assert_eq!(good.get(2, 0), Some(3));
        assert_eq!(good.get(3, 1), Some(3));
        assert!(validate_result_matrix(&good, &[1, 1, 7, 7]).unwrap());
        assert!(assign_decisive(&draws_of(&[1; 4], &[(0, 3), (1, 2)]), &w, &l).unwrap().is_none());

        let d = [1, 1, 2, 2, 1, 1];
        let m = assign_decisive(
            &draws_of(&d, &[(0, 1), (2, 3), (2, 4), (3, 5)]),
            &[0, 0, 2, 2, 3, 4],
            &[4, 4, 1, 1, 1, 0],
        )
        .unwrap()
        .unwrap();
        let mut sums = m.row_sums();
        sums.sort_unstable();
        assert_eq!(sums, vec![1, 1, 8, 8, 10, 13]);
        assert!(assign_decisive(&draws_of(&d, &[]), &[0; 6], &[0; 6]).is_err());
    }

    #[test]
    fn pipeline_examples() {
        match reconstruct_pipeline(&[2, 2, 2]) {
            Verdict::Good(Stage::R1, m) => assert_eq!(m.draw_pairs().len(), 3),
            other => panic!("{other:?}"),
        }
        match reconstruct_pipeline(&[1, 1, 8, 8, 10, 13]) {
            Verdict::Good(Stage::R3, m) => {
                assert!(validate_result_matrix(&m, &[1, 1, 8, 8, 10, 13]).unwrap())
            }
            other => panic!("{other:?}"),
        }
        assert!(reconstruct_pipeline(&[1, 1, 8, 9, 9]).is_undecided());
    }

    #[test]
    fn forced_certificates() {
        for s in [vec![0u32], vec![0, 3], vec![1, 1], vec![0, 3, 6], vec![1, 1, 6], vec![1, 1, 7, 7]] {
            let q = quad_cascade(&s);
            assert!(q.fully_forced(), "{s:?}");
            let m = forced_certificate(s.len(), &q.reduced).unwrap();
            assert!(validate_result_matrix(&m, &s).unwrap(), "{s:?}");
        }
        let q = quad_cascade(&[1, 1, 7, 7]);
        let m = forced_certificate(4, &q.reduced).unwrap();
        assert_eq!(m.draw_pairs(), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn transitive_blocks_realize_scores() {
        for scores in [vec![0i64, 1, 2], vec![1, 1, 1], vec![1, 1, 2, 2], vec![0, 2, 2, 2, 4]] {
            let wins = transitive_block(&scores).unwrap();
            let mut got = vec![0i64; scores.len()];
            for (a, _) in wins {
                got[a] += 1;
            }
            assert_eq!(got, scores);
        }
    }
}
