//! Quadratic tests: a win/loss pairing bound and the recursive removal of
//! blocks whose results are forced at either end of the sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters_const::constant_cascade;
use crate::filters_linear::{
    all_draw_block_ok, draw_bounds, linear_cascade, near_draw_block, near_winning_block_ok,
    unique_draws, winning_block_ok, NearDrawBlock, SportMatrix,
};
use crate::seqcore::{max_score, pairs, Stage, Verdict};
use crate::theory::{berger_test, landau_test, DigraphPairSequence};

/// Win and loss counts must pair up: no group of teams can collect more wins
/// than there are losses available to it.
pub fn q1_balanced_quad(w: &[u32], l: &[u32]) -> Result<Verdict> {
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
    let d = DigraphPairSequence::new(w.iter().copied().zip(l.iter().copied()).collect());
    Ok(if berger_test(&d) {
        Verdict::Undecided
    } else {
        Verdict::Bad(Stage::Q1)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StripSide {
    Prefix,
    Suffix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    /// Every internal match drawn, every external match lost.
    AllDraws,
    /// As `AllDraws`, except the strongest team of the block beat the weakest.
    OneInternalWin,
    /// Every external match won and no internal draws.
    AllWins,
}

/// One removed block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strip {
    pub side: StripSide,
    pub kind: BlockKind,
    pub size: usize,
    /// Amount subtracted from every remaining score.
    pub adjustment: u32,
    /// Block scores at the moment of removal.
    pub scores: Vec<u32>,
}

/// Working sequence after forced blocks have been removed. The survivors are
/// the original teams `first..last`, in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedSequence {
    pub scores: Vec<u32>,
    pub first: usize,
    pub last: usize,
    pub strip_log: Vec<Strip>,
}

impl ReducedSequence {
    pub fn new(s: &[u32]) -> Self {
        ReducedSequence {
            scores: s.to_vec(),
            first: 0,
            last: s.len(),
            strip_log: Vec::new(),
        }
    }

    /// Every team was removed, so the whole result matrix is determined.
    pub fn fully_forced(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn stripped(&self) -> bool {
        !self.strip_log.is_empty()
    }

    fn strip_prefix(&mut self, k: usize, kind: BlockKind) {
        let block: Vec<u32> = self.scores.drain(..k).collect();
        let adjustment = 3 * k as u32;
        for v in &mut self.scores {
            *v -= adjustment;
        }
        self.first += k;
        self.strip_log.push(Strip {
            side: StripSide::Prefix,
            kind,
            size: k,
            adjustment,
            scores: block,
        });
    }

    fn strip_suffix(&mut self, k: usize) {
        let at = self.scores.len() - k;
        let block: Vec<u32> = self.scores.drain(at..).collect();
        self.last -= k;
        self.strip_log.push(Strip {
            side: StripSide::Suffix,
            kind: BlockKind::AllWins,
            size: k,
            adjustment: 0,
            scores: block,
        });
    }
}

fn prefix_sum(e: &[u32], k: usize) -> i64 {
    e[..k].iter().map(|&v| v as i64).sum()
}

/// Removes forced weak blocks until none is left at the bottom.
pub fn q2_reduce_small(mut r: ReducedSequence) -> (Verdict, ReducedSequence) {
    'restart: loop {
        let len = r.scores.len();
        for k in 1..=len {
            let sum = prefix_sum(&r.scores, k);
            let minimum = (k * (k - 1)) as i64;
            if sum == minimum {
                if !all_draw_block_ok(&r.scores, k) {
                    return (Verdict::Bad(Stage::Q2), r);
                }
                r.strip_prefix(k, BlockKind::AllDraws);
                continue 'restart;
            }
            if sum == minimum + 1 {
                match near_draw_block(&r.scores, k) {
                    None => return (Verdict::Bad(Stage::Q2), r),
                    Some(NearDrawBlock::InternalWin) => {
                        r.strip_prefix(k, BlockKind::OneInternalWin);
                        continue 'restart;
                    }
                    Some(NearDrawBlock::ExternalDraw) => {}
                }
            }
        }
        return (Verdict::Undecided, r);
    }
}

/// Points the top `k` of `len` teams collect when they win every match
/// except those among themselves, which are all decisive.
fn winning_total(len: usize, k: usize) -> i64 {
    3 * (k * (len - k)) as i64 + 3 * pairs(k)
}

/// Internal part of a winning block as a plain tournament score sequence.
fn block_tournament(block: &[u32], outside: usize) -> Option<Vec<u32>> {
    block
        .iter()
        .map(|&v| v.checked_sub(3 * outside as u32).map(|x| x / 3))
        .collect()
}

/// Removes forced strong blocks until none is left at the top.
pub fn q3_reduce_large(mut r: ReducedSequence) -> (Verdict, ReducedSequence) {
    'restart: loop {
        let len = r.scores.len();
        let mut top = 0i64;
        for k in 1..=len {
            top += r.scores[len - k] as i64;
            let maximum = winning_total(len, k);
            if top == maximum {
                let block = &r.scores[len - k..];
                let internal = block_tournament(block, len - k);
                if !winning_block_ok(&r.scores, k) || !internal.is_some_and(|t| landau_test(&t)) {
                    return (Verdict::Bad(Stage::Q3), r);
                }
                r.strip_suffix(k);
                continue 'restart;
            }
            if top == maximum - 1 && !near_winning_block_ok(&r.scores, k) {
                return (Verdict::Bad(Stage::Q3), r);
            }
        }
        return (Verdict::Undecided, r);
    }
}

/// Outcome of [`quad_cascade`] together with the working sequence it reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadOutcome {
    pub verdict: Verdict,
    pub reduced: ReducedSequence,
}

impl QuadOutcome {
    pub fn fully_forced(&self) -> bool {
        self.verdict.is_undecided() && self.reduced.fully_forced()
    }
}

/// Strips forced blocks from both ends and re-filters what is left. The pairing
/// bound runs when the draws of the remainder are determined.
pub fn quad_cascade(s: &[u32]) -> QuadOutcome {
    let mut r = ReducedSequence::new(s);
    loop {
        let before = r.strip_log.len();
        let (v, next) = q2_reduce_small(r);
        if v.is_bad() {
            return QuadOutcome { verdict: v, reduced: next };
        }
        let (v, next) = q3_reduce_large(next);
        if v.is_bad() {
            return QuadOutcome { verdict: v, reduced: next };
        }
        r = next;
        if r.strip_log.len() == before {
            break;
        }
    }
    if r.fully_forced() {
        return QuadOutcome {
            verdict: Verdict::Undecided,
            reduced: r,
        };
    }
    let e = r.scores.clone();
    if let Some(last) = r.strip_log.last() {
        let blame = match last.side {
            StripSide::Prefix => Stage::Q2,
            StripSide::Suffix => Stage::Q3,
        };
        let in_range = e.iter().all(|&v| v <= max_score(e.len()));
        if !in_range || constant_cascade(&e[..]).is_bad() || linear_cascade(&e).is_bad() {
            return QuadOutcome {
                verdict: Verdict::Bad(blame),
                reduced: r,
            };
        }
    }
    if let Some(d) = unique_draws(&draw_bounds(&e)) {
        if let Some(sport) = SportMatrix::from_draws(&e, &d) {
            if let Ok(v @ Verdict::Bad(_)) = q1_balanced_quad(&sport.wins(), &sport.losses()) {
                return QuadOutcome { verdict: v, reduced: r };
            }
        }
    }
    QuadOutcome {
        verdict: Verdict::Undecided,
        reduced: r,
    }
}
