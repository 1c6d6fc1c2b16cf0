//! Clinical gait parameters from step events.
//!
//! Terminology follows the report schema: a "stride" sample is the feet
//! separation at a step maximum, attributed to the swing foot; "step
//! length" is the distance between two successive placements of the same
//! foot. Note this inverts the common biomechanics convention, where the
//! same-foot distance is called stride length.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::detect::{Extremum, ExtremumKind, StepDetectionResult};
use crate::error::{Error, Result};
use crate::model::{Plane, Point3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Foot {
    Left,
    Right,
}

impl Foot {
    pub fn other(&self) -> Foot {
        match self {
            Foot::Left => Foot::Right,
            Foot::Right => Foot::Left,
        }
    }
}

impl fmt::Display for Foot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Foot::Left => write!(f, "left"),
            Foot::Right => write!(f, "right"),
        }
    }
}

/// One step: a retained maximum enriched with foot attribution and the
/// foot positions at that frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepEvent {
    pub frame: usize,
    pub time: f64,
    /// The swing foot completing this step.
    pub foot: Foot,
    pub left_pos: Point3,
    pub right_pos: Point3,
    /// Raw feet distance at this frame.
    pub separation: f64,
    /// True when the displacement rule contradicted alternation and the
    /// foot was forced to alternate.
    pub forced_alternation: bool,
}

/// Attributes each retained maximum to a swing foot.
///
/// The swing foot is the foot with greater horizontal displacement since
/// the previous retained minimum (for the first maximum: since the start
/// of the clip). Consecutive assignments must alternate; when the
/// displacement rule disagrees, alternation wins and the event is flagged.
pub fn assign_feet(
    result: &StepDetectionResult,
    left: &[Point3],
    right: &[Point3],
    timestamps: &[f64],
    plane: Plane,
) -> Vec<StepEvent> {
    let mut events = Vec::new();
    let mut window_start = 0usize;
    let mut prev_foot: Option<Foot> = None;
    for e in &result.extrema {
        match e.kind {
            ExtremumKind::Min => window_start = e.frame,
            ExtremumKind::Max => {
                let frame = e.frame;
                let dl = plane.distance(left[frame], left[window_start]);
                let dr = plane.distance(right[frame], right[window_start]);
                let by_displacement = if dl > dr {
                    Foot::Left
                } else if dr > dl {
                    Foot::Right
                } else {
                    // exact tie: keep alternation if any, else default left
                    prev_foot.map_or(Foot::Left, |f| f.other())
                };
                let (foot, forced) = match prev_foot {
                    Some(prev) if by_displacement == prev => (prev.other(), true),
                    _ => (by_displacement, false),
                };
                prev_foot = Some(foot);
                events.push(StepEvent {
                    frame,
                    time: timestamps[frame],
                    foot,
                    left_pos: left[frame],
                    right_pos: right[frame],
                    separation: e.value,
                    forced_alternation: forced,
                });
            }
        }
    }
    events
}

/// Raw per-event samples backing each reported mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerStep {
    pub event_index: usize,
    pub frame: usize,
    pub time_s: f64,
    pub foot: Foot,
    /// Feet separation at this maximum.
    pub stride_m: f64,
    /// Time since the previous maximum; absent for the first event.
    pub swing_time_s: Option<f64>,
    /// Distance from the previous placement of the same foot, if any.
    pub step_length_m: Option<f64>,
}

/// The reported gait parameters. Parameters whose minimum event count is
/// unmet are absent, never zero, so aggregation cannot average in fake
/// values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitReport {
    pub speed_mps: Option<f64>,
    pub stride_left_m: Option<f64>,
    pub stride_right_m: Option<f64>,
    pub step_length_m: Option<f64>,
    pub step_width_m: Option<f64>,
    pub swing_time_s: Option<f64>,
    pub asymmetry_index: Option<f64>,
    pub n_steps: usize,
    pub per_step: Vec<PerStep>,
}

impl GaitReport {
    pub fn empty() -> GaitReport {
        GaitReport {
            speed_mps: None,
            stride_left_m: None,
            stride_right_m: None,
            step_length_m: None,
            step_width_m: None,
            swing_time_s: None,
            asymmetry_index: None,
            n_steps: 0,
            per_step: Vec::new(),
        }
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Computes the report from step events and the retained minima.
///
/// - stride per foot: mean separation at that foot's maxima
/// - step length: mean over consecutive same-foot placements
/// - step width: mean raw distance at the retained minima
/// - swing time: mean time between consecutive maxima
/// - speed: sum of all stride samples over the first-to-last-maximum span
pub fn compute_gait_report(events: &[StepEvent], minima: &[Extremum], plane: Plane) -> GaitReport {
    let mut per_step = Vec::with_capacity(events.len());
    let mut last_placement: [Option<Point3>; 2] = [None, None];
    for (i, e) in events.iter().enumerate() {
        let foot_pos = match e.foot {
            Foot::Left => e.left_pos,
            Foot::Right => e.right_pos,
        };
        let slot = match e.foot {
            Foot::Left => 0,
            Foot::Right => 1,
        };
        let step_length_m = last_placement[slot].map(|prev| plane.distance(foot_pos, prev));
        last_placement[slot] = Some(foot_pos);
        per_step.push(PerStep {
            event_index: i,
            frame: e.frame,
            time_s: e.time,
            foot: e.foot,
            stride_m: e.separation,
            swing_time_s: if i > 0 { Some(e.time - events[i - 1].time) } else { None },
            step_length_m,
        });
    }

    let strides_left: Vec<f64> =
        per_step.iter().filter(|s| s.foot == Foot::Left).map(|s| s.stride_m).collect();
    let strides_right: Vec<f64> =
        per_step.iter().filter(|s| s.foot == Foot::Right).map(|s| s.stride_m).collect();
    let step_lengths: Vec<f64> = per_step.iter().filter_map(|s| s.step_length_m).collect();
    let swings: Vec<f64> = per_step.iter().filter_map(|s| s.swing_time_s).collect();
    let widths: Vec<f64> = minima.iter().map(|m| m.value).collect();

    let stride_left_m = mean(&strides_left);
    let stride_right_m = mean(&strides_right);

    let speed_mps = if events.len() >= 2 {
        let span = events[events.len() - 1].time - events[0].time;
        let total: f64 = per_step.iter().map(|s| s.stride_m).sum();
        (span > 0.0).then(|| total / span)
    } else {
        None
    };

    let asymmetry_index = match (stride_left_m, stride_right_m) {
        (Some(l), Some(r)) => asymmetry_index(l, r).ok(),
        _ => None,
    };

    GaitReport {
        speed_mps,
        stride_left_m,
        stride_right_m,
        step_length_m: mean(&step_lengths),
        step_width_m: mean(&widths),
        swing_time_s: mean(&swings),
        asymmetry_index,
        n_steps: events.len(),
        per_step,
    }
}

/// |L - R| / (0.5 (L + R)): 0 for a symmetric gait, at most 2.
pub fn asymmetry_index(stride_left: f64, stride_right: f64) -> Result<f64> {
    if stride_left + stride_right <= 0.0 {
        return Err(Error::BothZero);
    }
    Ok((stride_left - stride_right).abs() / (0.5 * (stride_left + stride_right)))
}
