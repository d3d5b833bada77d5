//! Constant-time rejection tests that inspect a handful of entries near either
//! end of a sorted score sequence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqcore::{ScoreSequence, Stage, Verdict};

/// Read access to a sorted sequence by 1-based position.
pub trait ScoreAccess {
    fn teams(&self) -> usize;
    fn at(&self, position: usize) -> i64;
}

impl ScoreAccess for [u32] {
    fn teams(&self) -> usize {
        self.len()
    }

    fn at(&self, position: usize) -> i64 {
        self[position - 1] as i64
    }
}

impl ScoreAccess for ScoreSequence {
    fn teams(&self) -> usize {
        self.len()
    }

    fn at(&self, position: usize) -> i64 {
        self[position - 1] as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstFilterId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
}

impl ConstFilterId {
    pub const ALL: [ConstFilterId; 9] = [
        ConstFilterId::C1,
        ConstFilterId::C2,
        ConstFilterId::C3,
        ConstFilterId::C4,
        ConstFilterId::C5,
        ConstFilterId::C6,
        ConstFilterId::C7,
        ConstFilterId::C8,
        ConstFilterId::C9,
    ];

    pub fn stage(self) -> Stage {
        Stage::ALL[self as usize]
    }

    /// Number of distinct positions the test reads.
    pub fn width(self) -> usize {
        match self {
            ConstFilterId::C1 => 1,
            ConstFilterId::C2 | ConstFilterId::C3 => 2,
            _ => 3,
        }
    }

    /// Tests that would read missing positions are skipped.
    pub fn applies_to(self, n: usize) -> bool {
        n >= self.width()
    }
}

impl fmt::Display for ConstFilterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.stage().fmt(f)
    }
}

impl FromStr for ConstFilterId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstFilterId::ALL
            .iter()
            .copied()
            .find(|id| id.stage().name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown constant filter `{s}`")))
    }
}

fn rejects<S: ScoreAccess + ?Sized>(id: ConstFilterId, s: &S) -> bool {
    let n = s.teams();
    if !id.applies_to(n) {
        return false;
    }
    let m = n as i64;
    let last = |back: usize| s.at(n - back);
    match id {
        ConstFilterId::C1 => last(0) == 3 * m - 4,
        ConstFilterId::C2 => last(0) == 3 * m - 3 && last(1) >= 3 * m - 5,
        ConstFilterId::C3 => s.at(1) == 0 && s.at(2) <= 2,
        ConstFilterId::C4 => s.at(1) == 1 && s.at(2) == 1 && s.at(3) <= 5,
        ConstFilterId::C5 => {
            last(0) == 3 * m - 5 && last(1) == 3 * m - 5 && last(2) >= 3 * m - 8
        }
        ConstFilterId::C6 => {
            last(0) == 3 * m - 3 && last(1) == 3 * m - 6 && last(2) >= 3 * m - 8
        }
        ConstFilterId::C7 => s.at(1) == 0 && s.at(2) == 3 && s.at(3) <= 5,
        ConstFilterId::C8 => s.at(1) == 1 && s.at(2) == 2 && s.at(3) <= 3,
        ConstFilterId::C9 => {
            last(0) == 3 * m - 5 && last(1) == 3 * m - 7 && last(2) >= 3 * m - 7
        }
    }
}

/// Applies one constant test; never returns `Good`.
pub fn constant_test<S: ScoreAccess + ?Sized>(id: ConstFilterId, s: &S) -> Verdict {
    if rejects(id, s) {
        Verdict::Bad(id.stage())
    } else {
        Verdict::Undecided
    }
}

/// Runs every constant test in order and reports the first rejection.
pub fn constant_cascade<S: ScoreAccess + ?Sized>(s: &S) -> Verdict {
    ConstFilterId::ALL
        .iter()
        .find(|&&id| rejects(id, s))
        .map_or(Verdict::Undecided, |id| Verdict::Bad(id.stage()))
}
