//! Synthetic gait trajectories with exact ground truth.
//!
//! Each foot alternates stance and swing; a swing advances the foot with
//! a smoothstep profile to land its step length ahead of the stance
//! foot, over half a gait cycle. The clip starts standing with the feet
//! apart (the walk's entry posture) and ends with the rear foot closing
//! up, so every landing is an interior maximum of the feet-distance
//! signal and the first extremum of a clip is a passing minimum, not a
//! step. Jitter and dropout are applied last, all driven by the scenario
//! seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Foot;
use crate::model::{Joint, JointKind, Point3, PoseSequence, SkeletonFrame};

/// Per-step forward advance in meters; a single value for a symmetric
/// gait or one per foot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepLength {
    Symmetric(f64),
    PerFoot { left: f64, right: f64 },
}

impl StepLength {
    pub fn per_foot(&self) -> (f64, f64) {
        match *self {
            StepLength::Symmetric(s) => (s, s),
            StepLength::PerFoot { left, right } => (left, right),
        }
    }
}

/// Generator parameters. All randomness flows from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitScenario {
    pub step_length_m: StepLength,
    /// Steps per second.
    pub cadence_hz: f64,
    /// Walking time; the number of step events is `duration_s * cadence_hz`
    /// rounded down. Lead-in and closing padding are added around it.
    pub duration_s: f64,
    /// Lateral offset between the feet.
    #[serde(default = "default_stance_width")]
    pub stance_width_m: f64,
    /// Gaussian positional jitter std-dev applied to every coordinate.
    #[serde(default)]
    pub noise_sigma_m: f64,
    /// Per-joint per-frame probability of a missing observation.
    #[serde(default)]
    pub dropout_prob: f64,
    /// Walking direction in the x-y plane, degrees from +x.
    #[serde(default)]
    pub heading_deg: f64,
    #[serde(default = "default_frame_rate")]
    pub frame_rate_hz: f64,
    pub seed: u64,
    #[serde(default = "default_first_foot")]
    pub first_swing_foot: Foot,
    /// Standing time before the first swing.
    #[serde(default = "default_lead_in")]
    pub lead_in_s: f64,
    /// Offset added to every timestamp, e.g. UNIX seconds for batch runs.
    #[serde(default)]
    pub start_time_s: f64,
}

fn default_stance_width() -> f64 {
    0.1
}
fn default_frame_rate() -> f64 {
    30.0
}
fn default_first_foot() -> Foot {
    Foot::Right
}
fn default_lead_in() -> f64 {
    0.5
}

impl GaitScenario {
    /// A zero-noise symmetric walk; the usual starting point for tests.
    pub fn symmetric(step_length_m: f64, cadence_hz: f64, duration_s: f64, seed: u64) -> GaitScenario {
        GaitScenario {
            step_length_m: StepLength::Symmetric(step_length_m),
            cadence_hz,
            duration_s,
            stance_width_m: default_stance_width(),
            noise_sigma_m: 0.0,
            dropout_prob: 0.0,
            heading_deg: 0.0,
            frame_rate_hz: default_frame_rate(),
            seed,
            first_swing_foot: default_first_foot(),
            lead_in_s: default_lead_in(),
            start_time_s: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (l, r) = self.step_length_m.per_foot();
        let nonneg = [
            ("step_length left", l),
            ("step_length right", r),
            ("stance_width_m", self.stance_width_m),
            ("noise_sigma_m", self.noise_sigma_m),
            ("lead_in_s", self.lead_in_s),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::ScenarioInvalid(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.cadence_hz.is_finite() && self.cadence_hz > 0.0) {
            return Err(Error::ScenarioInvalid(format!(
                "cadence_hz must be positive, got {}",
                self.cadence_hz
            )));
        }
        if !(self.frame_rate_hz.is_finite() && self.frame_rate_hz > 0.0) {
            return Err(Error::ScenarioInvalid(format!(
                "frame_rate_hz must be positive, got {}",
                self.frame_rate_hz
            )));
        }
        if !(0.0..1.0).contains(&self.dropout_prob) {
            return Err(Error::ScenarioInvalid(format!(
                "dropout_prob must be in [0, 1), got {}",
                self.dropout_prob
            )));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::ScenarioInvalid(format!(
                "duration_s must be positive, got {}",
                self.duration_s
            )));
        }
        if self.n_steps() < 1 {
            return Err(Error::ScenarioInvalid(
                "duration_s * cadence_hz yields no step events".into(),
            ));
        }
        if !self.heading_deg.is_finite() || !self.start_time_s.is_finite() {
            return Err(Error::ScenarioInvalid("non-finite heading or start time".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.duration_s * self.cadence_hz + 1e-9).floor() as usize
    }
}

/// Exact step events and ideal parameter values for a generated clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticGroundTruth {
    /// Frame index of each step event (maximal feet separation).
    pub step_frames: Vec<usize>,
    /// Swing foot per event; strictly alternating.
    pub swing_foot: Vec<Foot>,
    pub frame_rate_hz: f64,
    #[serde(rename = "true")]
    pub truth: TrueGaitParams,
}

/// The commanded gait parameters, in report units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueGaitParams {
    pub speed_mps: f64,
    pub step_length_m: f64,
    pub stride_left_m: f64,
    pub stride_right_m: f64,
    pub swing_time_s: f64,
    pub step_width_m: f64,
    pub asymmetry_index: f64,
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// One swing: `foot` moves from `from_x` to `to_x` over `[t0, t1)`.
struct SwingSpec {
    foot: Foot,
    t0: f64,
    t1: f64,
    from_x: f64,
    to_x: f64,
}

fn foot_x_at(swings: &[SwingSpec], foot: Foot, start_x: f64, t: f64) -> f64 {
    let mut x = start_x;
    for s in swings.iter().filter(|s| s.foot == foot) {
        if t >= s.t1 {
            x = s.to_x;
        } else if t >= s.t0 {
            return s.from_x + (s.to_x - s.from_x) * smoothstep((t - s.t0) / (s.t1 - s.t0));
        } else {
            break;
        }
    }
    x
}

struct NoiseSource {
    rng: ChaCha8Rng,
}

impl NoiseSource {
    fn new(seed: u64) -> NoiseSource {
        NoiseSource { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Box-Muller transform; one draw per call.
    fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(1e-300);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Generates a pose sequence and its ground truth for a scenario.
pub fn generate(sc: &GaitScenario) -> Result<(PoseSequence, SyntheticGroundTruth)> {
    sc.validate()?;
    let (s_left, s_right) = sc.step_length_m.per_foot();
    let step_of = |foot: Foot| match foot {
        Foot::Left => s_left,
        Foot::Right => s_right,
    };
    let n = sc.n_steps();
    let swing_dur = 1.0 / sc.cadence_hz;
    let fps = sc.frame_rate_hz;
    let w = sc.stance_width_m;

    // placement schedule: the non-swinging foot starts in front so the
    // first swing is a full, countable step
    let first = sc.first_swing_foot;
    let mut x = [0.0f64; 2]; // [left, right]
    let idx = |f: Foot| match f {
        Foot::Left => 0usize,
        Foot::Right => 1usize,
    };
    x[idx(first.other())] = step_of(first.other());
    let start_x = x;

    let mut swings = Vec::with_capacity(n + 1);
    let mut swing_feet = Vec::with_capacity(n);
    let mut placements = Vec::with_capacity(n); // (t_land, x_land)
    let mut foot = first;
    for k in 0..n {
        let t0 = sc.lead_in_s + k as f64 * swing_dur;
        let to_x = x[idx(foot.other())] + step_of(foot);
        swings.push(SwingSpec { foot, t0, t1: t0 + swing_dur, from_x: x[idx(foot)], to_x });
        placements.push((t0 + swing_dur, to_x));
        swing_feet.push(foot);
        x[idx(foot)] = to_x;
        foot = foot.other();
    }
    // closing: the rear foot draws level with the front foot
    let rear = foot;
    let t_close = sc.lead_in_s + n as f64 * swing_dur;
    swings.push(SwingSpec {
        foot: rear,
        t0: t_close,
        t1: t_close + swing_dur,
        from_x: x[idx(rear)],
        to_x: x[idx(rear.other())],
    });

    let tail_s = 0.5;
    let total = sc.lead_in_s + (n as f64 + 1.0) * swing_dur + tail_s;
    let n_frames = (total * fps).floor() as usize + 1;

    let heading = sc.heading_deg.to_radians();
    let (cos_h, sin_h) = (heading.cos(), heading.sin());
    let rotate = |p: Point3| -> Point3 {
        Point3::new(p.x * cos_h - p.y * sin_h, p.x * sin_h + p.y * cos_h, p.z)
    };

    let mut noise = NoiseSource::new(sc.seed);
    let mut frames = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let t = i as f64 / fps;
        let xl = foot_x_at(&swings, Foot::Left, start_x[0], t);
        let xr = foot_x_at(&swings, Foot::Right, start_x[1], t);
        let mid = 0.5 * (xl + xr);
        let body = skeleton_at(xl, xr, mid, w);
        let mut joints = Vec::with_capacity(body.len());
        for (kind, p) in body {
            let mut p = rotate(p);
            if sc.noise_sigma_m > 0.0 {
                p = Point3::new(
                    p.x + sc.noise_sigma_m * noise.normal(),
                    p.y + sc.noise_sigma_m * noise.normal(),
                    p.z + sc.noise_sigma_m * noise.normal(),
                );
            }
            if sc.dropout_prob > 0.0 && noise.uniform() < sc.dropout_prob {
                continue;
            }
            joints.push(Joint::new(kind, p));
        }
        frames.push(SkeletonFrame::new(i as u64, sc.start_time_s + t, joints)?);
    }
    let seq = PoseSequence::new(frames, fps, format!("synth-{}", sc.seed))?;

    let step_frames: Vec<usize> =
        placements.iter().map(|(t, _)| (t * fps).round() as usize).collect();
    let true_speed = if n >= 2 {
        let (t0, x0) = placements[0];
        let (t1, x1) = placements[n - 1];
        (x1 - x0) / (t1 - t0)
    } else {
        0.5 * (s_left + s_right) * sc.cadence_hz
    };
    let asym = if s_left + s_right > 0.0 {
        (s_left - s_right).abs() / (0.5 * (s_left + s_right))
    } else {
        0.0
    };
    let truth = SyntheticGroundTruth {
        step_frames,
        swing_foot: swing_feet,
        frame_rate_hz: fps,
        truth: TrueGaitParams {
            speed_mps: true_speed,
            step_length_m: s_left + s_right,
            stride_left_m: s_left,
            stride_right_m: s_right,
            swing_time_s: swing_dur,
            step_width_m: w,
            asymmetry_index: asym,
        },
    };
    Ok((seq, truth))
}

/// A plausible 20-joint body around the feet: enough realism for the
/// dimension filter and the fixed-layout writer.
fn skeleton_at(xl: f64, xr: f64, mid: f64, w: f64) -> Vec<(JointKind, Point3)> {
    let hw = w / 2.0;
    vec![
        (JointKind::HipCenter, Point3::new(mid, 0.0, 0.95)),
        (JointKind::Spine, Point3::new(mid, 0.0, 1.15)),
        (JointKind::ShoulderCenter, Point3::new(mid, 0.0, 1.45)),
        (JointKind::Head, Point3::new(mid, 0.0, 1.70)),
        (JointKind::LeftShoulder, Point3::new(mid, 0.20, 1.45)),
        (JointKind::LeftElbow, Point3::new(mid, 0.25, 1.20)),
        (JointKind::LeftWrist, Point3::new(mid, 0.27, 0.95)),
        (JointKind::LeftHand, Point3::new(mid, 0.28, 0.85)),
        (JointKind::RightShoulder, Point3::new(mid, -0.20, 1.45)),
        (JointKind::RightElbow, Point3::new(mid, -0.25, 1.20)),
        (JointKind::RightWrist, Point3::new(mid, -0.27, 0.95)),
        (JointKind::RightHand, Point3::new(mid, -0.28, 0.85)),
        (JointKind::LeftHip, Point3::new(mid, 0.10, 0.90)),
        (JointKind::LeftKnee, Point3::new(0.5 * (xl + mid), hw, 0.50)),
        (JointKind::LeftAnkle, Point3::new(xl, hw, 0.08)),
        (JointKind::LeftFoot, Point3::new(xl, hw, 0.05)),
        (JointKind::RightHip, Point3::new(mid, -0.10, 0.90)),
        (JointKind::RightKnee, Point3::new(0.5 * (xr + mid), -hw, 0.50)),
        (JointKind::RightAnkle, Point3::new(xr, -hw, 0.08)),
        (JointKind::RightFoot, Point3::new(xr, -hw, 0.05)),
    ]
}
