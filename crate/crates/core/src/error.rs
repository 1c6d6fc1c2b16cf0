use thiserror::Error;

use crate::model::JointKind;

/// Errors produced by parsers, the step detector, and the gait pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("input contains no frames")]
    EmptyInput,

    #[error("duplicate timestamp {t}s in track {track:?}")]
    DuplicateTimestamp { track: String, t: f64 },

    #[error("timestamps not strictly increasing at frame {index}")]
    NonMonotoneTimestamps { index: usize },

    #[error("duplicate joint {kind:?} in frame {frame}")]
    DuplicateJoint { frame: u64, kind: JointKind },

    #[error("calibration: {0}")]
    Calibration(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("foot track lengths differ: left {left}, right {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("kernel width {width} exceeds signal length {len}")]
    KernelTooLarge { width: usize, len: usize },

    #[error("signal of length {len} too short for extrema search")]
    SignalTooShort { len: usize },

    #[error("too few frames: got {got}, need at least {need}")]
    TooFewFrames { got: usize, need: usize },

    #[error("no steps detected: {found} maxima survive, need {min}")]
    NoStepsDetected { found: usize, min: usize },

    #[error("no frame contains a foot or ankle joint")]
    NoFootJoints,

    #[error("frame {frame} lacks a usable foot position")]
    MissingFoot { frame: usize },

    #[error("invalid scenario: {0}")]
    ScenarioInvalid(String),

    #[error("nothing to evaluate")]
    EmptyEvaluation,

    #[error("both stride lengths are zero")]
    BothZero,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
