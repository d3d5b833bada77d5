//! Deciding and enumerating football score sequences: the score lists that can
//! arise from a round robin where every match ends 3:0, 1:1 or 0:3.
//!
//! Cheap rejection tests run first. Survivors get a direct attempt at a result
//! matrix, and only the remaining cases reach an exact search.

pub mod error;
pub mod filters_const;
pub mod filters_linear;
pub mod filters_quad;
pub mod oracle;
pub mod pipeline;
pub mod reconstruct;
pub mod seqcore;
pub mod theory;

pub use error::{Error, Result};
pub use seqcore::{
    count_regular, generate_regular, max_score, regular_rank, regular_total, regular_unrank,
    validate_result_matrix, RegularSequences, ResultMatrix, ScoreSequence, Stage, StageStats,
    Verdict,
};
