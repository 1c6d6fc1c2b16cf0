//! Gait analysis from 3D skeletal joint time series.
//!
//! The pipeline stages are:
//!
//! 1. **Ingest** — parse Kinect-style skeleton text or pose JSONL into
//!    [`PoseSequence`]s; optionally back-project image-space poses to 3D
//!    with a pinhole camera model.
//! 2. **Filter** — drop skeletons with implausible dimensions, link
//!    detections into tracks by temporal consistency, and repair short
//!    per-joint gaps.
//! 3. **Detect** — compute the horizontal feet-distance signal, smooth
//!    it with a uniform kernel, extract alternating extrema, remove
//!    false pairs below a range-proportional threshold, and read the
//!    retained maxima as steps.
//! 4. **Metrics** — turn step events into gait speed, left/right stride
//!    length, step length, step width, swing time, and an asymmetry
//!    index.
//! 5. **Synth / Eval** — generate synthetic gait with exact ground truth
//!    and score detections by count accuracy and mean L1 frame error.

pub mod detect;
pub mod error;
pub mod eval;
pub mod filter;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod synth;

pub use detect::{
    detect_steps, DetectorParams, DistanceSignal, Extremum, ExtremumKind, StepDetectionResult,
};
pub use error::{Error, Result};
pub use eval::{evaluate, match_events, ClipEval, EvalResult};
pub use filter::FilterParams;
pub use metrics::{compute_gait_report, Foot, GaitReport, StepEvent};
pub use model::{
    foot_positions, FootPrefs, Joint, JointKind, Plane, Point3, PoseSequence, SkeletonFrame,
};
pub use synth::{GaitScenario, SyntheticGroundTruth};
