//! Dempster-Shafer evidence machinery over small finite frames.
//!
//! A [`Frame`] fixes an ordered set of hypotheses. Subsets of the frame are
//! [`FocalSet`]s, encoded as bit patterns over the label order, and a
//! [`MassFunction`] assigns evidence weight densely over the whole power set.
//! Evidence from independent sources is fused with [`combine`] (Dempster's
//! rule), and queried through [`belief`], [`plausibility`] and [`interval`].
//!
//! All values are immutable; every operation returns a fresh value.

mod belief;
mod combine;
mod frame;
mod mass;

pub use belief::{belief, interval, plausibility, BeliefInterval};
pub use combine::{combine, combine_sequence, combine_sequence_with_conflict, combine_with_conflict, Combination};
pub use frame::{FocalSet, Frame, MAX_FRAME_SIZE};
pub use mass::MassFunction;

use thiserror::Error;

/// Allowed deviation of a mass total from one for a value to count as normalized.
pub const MASS_SUM_TOLERANCE: f64 = 1e-9;

/// Largest deviation from one that is silently repaired by renormalization.
pub const RENORMALIZE_LIMIT: f64 = 1e-6;

/// Combination fails when the conflict reaches `1 - CONFLICT_MARGIN`.
pub const CONFLICT_MARGIN: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DstError {
    #[error("frame must contain between 1 and {MAX_FRAME_SIZE} labels, got {0}")]
    FrameSize(usize),
    #[error("frame label at position {0} is empty")]
    EmptyLabel(usize),
    #[error("duplicate frame label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?} for this frame")]
    UnknownLabel(String),
    #[error("operands are defined over different frames")]
    FrameMismatch,
    #[error("expected {expected} mass entries for this frame, got {actual}")]
    WrongLength { expected: usize, actual: usize },
    #[error("mass {value} assigned to {set} is outside [0, 1]")]
    MassOutOfRange { set: String, value: f64 },
    #[error("mass {0} assigned to the empty set")]
    MassOnEmptySet(f64),
    #[error("masses sum to {0}, which is too far from 1 to renormalize")]
    Unnormalized(f64),
    #[error("total conflict between sources (K = {0})")]
    TotalConflict(f64),
    #[error("cannot combine an empty list of mass functions")]
    EmptyInput,
}

pub type Result<T, E = DstError> = std::result::Result<T, E>;
