//! Shared domain types for skeleton sequences.
//!
//! All coordinates are meters in a right-handed world frame; all times are
//! seconds. Parsers convert at the boundary. Types are immutable value
//! objects after construction and safe to share across threads.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 3D point in meters. Components are finite for any point that passed
/// a validating constructor (parsers reject NaN/infinite input).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ZERO: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Point3 {
        Point3 { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scale(&self, c: f64) -> Point3 {
        Point3::new(self.x * c, self.y * c, self.z * c)
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// One coordinate axis of the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn of(&self, p: Point3) -> f64 {
        match self {
            Axis::X => p.x,
            Axis::Y => p.y,
            Axis::Z => p.z,
        }
    }
}

/// The two axes spanning the horizontal (walking) plane. The remaining
/// axis is treated as vertical, e.g. for skeleton height checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plane {
    #[default]
    Xy,
    Xz,
    Yz,
}

impl Plane {
    pub fn axes(&self) -> (Axis, Axis) {
        match self {
            Plane::Xy => (Axis::X, Axis::Y),
            Plane::Xz => (Axis::X, Axis::Z),
            Plane::Yz => (Axis::Y, Axis::Z),
        }
    }

    pub fn vertical(&self) -> Axis {
        match self {
            Plane::Xy => Axis::Z,
            Plane::Xz => Axis::Y,
            Plane::Yz => Axis::X,
        }
    }

    /// Euclidean distance between two points restricted to this plane.
    pub fn distance(&self, a: Point3, b: Point3) -> f64 {
        let (u, v) = self.axes();
        let du = u.of(a) - u.of(b);
        let dv = v.of(a) - v.of(b);
        (du * du + dv * dv).sqrt()
    }
}

impl std::str::FromStr for Plane {
    type Err = Error;
    fn from_str(s: &str) -> Result<Plane> {
        match s.to_ascii_lowercase().as_str() {
            "xy" | "x-y" => Ok(Plane::Xy),
            "xz" | "x-z" => Ok(Plane::Xz),
            "yz" | "y-z" => Ok(Plane::Yz),
            other => Err(Error::InvalidParam(format!("unknown plane {other:?}"))),
        }
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Plane::Xy => write!(f, "xy"),
            Plane::Xz => write!(f, "xz"),
            Plane::Yz => write!(f, "yz"),
        }
    }
}

/// Named skeletal joints. Covers the 20 Kinect-v1 joints by name; any
/// other keypoint name round-trips through `Other`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum JointKind {
    HipCenter,
    Spine,
    ShoulderCenter,
    Head,
    LeftShoulder,
    LeftElbow,
    LeftWrist,
    LeftHand,
    RightShoulder,
    RightElbow,
    RightWrist,
    RightHand,
    LeftHip,
    LeftKnee,
    LeftAnkle,
    LeftFoot,
    RightHip,
    RightKnee,
    RightAnkle,
    RightFoot,
    Other(String),
}

impl JointKind {
    pub fn name(&self) -> &str {
        match self {
            JointKind::HipCenter => "hip_center",
            JointKind::Spine => "spine",
            JointKind::ShoulderCenter => "shoulder_center",
            JointKind::Head => "head",
            JointKind::LeftShoulder => "left_shoulder",
            JointKind::LeftElbow => "left_elbow",
            JointKind::LeftWrist => "left_wrist",
            JointKind::LeftHand => "left_hand",
            JointKind::RightShoulder => "right_shoulder",
            JointKind::RightElbow => "right_elbow",
            JointKind::RightWrist => "right_wrist",
            JointKind::RightHand => "right_hand",
            JointKind::LeftHip => "left_hip",
            JointKind::LeftKnee => "left_knee",
            JointKind::LeftAnkle => "left_ankle",
            JointKind::LeftFoot => "left_foot",
            JointKind::RightHip => "right_hip",
            JointKind::RightKnee => "right_knee",
            JointKind::RightAnkle => "right_ankle",
            JointKind::RightFoot => "right_foot",
            JointKind::Other(name) => name,
        }
    }

    pub fn from_name(name: &str) -> JointKind {
        match name {
            "hip_center" => JointKind::HipCenter,
            "spine" => JointKind::Spine,
            "shoulder_center" => JointKind::ShoulderCenter,
            "head" => JointKind::Head,
            "left_shoulder" => JointKind::LeftShoulder,
            "left_elbow" => JointKind::LeftElbow,
            "left_wrist" => JointKind::LeftWrist,
            "left_hand" => JointKind::LeftHand,
            "right_shoulder" => JointKind::RightShoulder,
            "right_elbow" => JointKind::RightElbow,
            "right_wrist" => JointKind::RightWrist,
            "right_hand" => JointKind::RightHand,
            "left_hip" => JointKind::LeftHip,
            "left_knee" => JointKind::LeftKnee,
            "left_ankle" => JointKind::LeftAnkle,
            "left_foot" => JointKind::LeftFoot,
            "right_hip" => JointKind::RightHip,
            "right_knee" => JointKind::RightKnee,
            "right_ankle" => JointKind::RightAnkle,
            "right_foot" => JointKind::RightFoot,
            other => JointKind::Other(other.to_string()),
        }
    }
}

impl From<String> for JointKind {
    fn from(s: String) -> JointKind {
        JointKind::from_name(&s)
    }
}

impl From<JointKind> for String {
    fn from(k: JointKind) -> String {
        k.name().to_string()
    }
}

/// A single joint observation within one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Joint {
    pub kind: JointKind,
    pub position: Point3,
    /// Detection confidence in [0, 1]; 1.0 when the source format has none.
    pub confidence: f64,
    /// True for positions synthesized by gap interpolation.
    #[serde(default)]
    pub interpolated: bool,
}

impl Joint {
    pub fn new(kind: JointKind, position: Point3) -> Joint {
        Joint { kind, position, confidence: 1.0, interpolated: false }
    }

    pub fn with_confidence(kind: JointKind, position: Point3, confidence: f64) -> Joint {
        Joint { kind, position, confidence, interpolated: false }
    }
}

/// One time-stamped skeleton observation. No joint kind appears twice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonFrame {
    pub frame_index: u64,
    /// Seconds; strictly increasing within a `PoseSequence`.
    pub timestamp: f64,
    joints: Vec<Joint>,
}

impl SkeletonFrame {
    pub fn new(frame_index: u64, timestamp: f64, joints: Vec<Joint>) -> Result<SkeletonFrame> {
        if !timestamp.is_finite() {
            return Err(Error::InvalidParam(format!(
                "non-finite timestamp in frame {frame_index}"
            )));
        }
        for (i, j) in joints.iter().enumerate() {
            if !j.position.is_finite() {
                return Err(Error::InvalidParam(format!(
                    "non-finite joint position ({:?}) in frame {frame_index}",
                    j.kind
                )));
            }
            if !(0.0..=1.0).contains(&j.confidence) {
                return Err(Error::InvalidParam(format!(
                    "confidence {} out of [0,1] for {:?} in frame {frame_index}",
                    j.confidence, j.kind
                )));
            }
            if joints[..i].iter().any(|p| p.kind == j.kind) {
                return Err(Error::DuplicateJoint { frame: frame_index, kind: j.kind.clone() });
            }
        }
        Ok(SkeletonFrame { frame_index, timestamp, joints })
    }

    pub fn joints(&self) -> &[Joint] {
        &self.joints
    }

    pub fn joint(&self, kind: &JointKind) -> Option<&Joint> {
        self.joints.iter().find(|j| &j.kind == kind)
    }

    /// Insert or replace the joint of `joint.kind`.
    pub fn set_joint(&mut self, joint: Joint) {
        match self.joints.iter_mut().find(|j| j.kind == joint.kind) {
            Some(slot) => *slot = joint,
            None => self.joints.push(joint),
        }
    }

    /// Mean position over all joints in the frame.
    pub fn centroid(&self) -> Option<Point3> {
        if self.joints.is_empty() {
            return None;
        }
        let sum = self
            .joints
            .iter()
            .fold(Point3::ZERO, |acc, j| acc + j.position);
        Some(sum.scale(1.0 / self.joints.len() as f64))
    }
}

/// A time-ordered sequence of skeleton frames for one person track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseSequence {
    frames: Vec<SkeletonFrame>,
    frame_rate_hz: f64,
    pub source_id: String,
}

impl PoseSequence {
    /// Builds a sequence, rejecting non-monotone timestamps or frame
    /// indices. Input is never silently reordered here; tolerant sorting
    /// is a parser concern.
    pub fn new(
        frames: Vec<SkeletonFrame>,
        frame_rate_hz: f64,
        source_id: impl Into<String>,
    ) -> Result<PoseSequence> {
        if !(frame_rate_hz.is_finite() && frame_rate_hz > 0.0) {
            return Err(Error::InvalidParam(format!(
                "frame rate must be positive, got {frame_rate_hz}"
            )));
        }
        for i in 1..frames.len() {
            if frames[i].timestamp <= frames[i - 1].timestamp
                || frames[i].frame_index <= frames[i - 1].frame_index
            {
                return Err(Error::NonMonotoneTimestamps { index: i });
            }
        }
        Ok(PoseSequence { frames, frame_rate_hz, source_id: source_id.into() })
    }

    pub(crate) fn from_validated(
        frames: Vec<SkeletonFrame>,
        frame_rate_hz: f64,
        source_id: impl Into<String>,
    ) -> PoseSequence {
        PoseSequence { frames, frame_rate_hz, source_id: source_id.into() }
    }

    pub fn frames(&self) -> &[SkeletonFrame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame_rate_hz(&self) -> f64 {
        self.frame_rate_hz
    }

    pub fn timestamps(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.timestamp).collect()
    }
}

/// Which joints to read a foot position from, in preference order, and
/// the minimum confidence a candidate must carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootPrefs {
    pub left: Vec<JointKind>,
    pub right: Vec<JointKind>,
    pub min_confidence: f64,
}

impl Default for FootPrefs {
    fn default() -> FootPrefs {
        FootPrefs {
            left: vec![JointKind::LeftFoot, JointKind::LeftAnkle],
            right: vec![JointKind::RightFoot, JointKind::RightAnkle],
            min_confidence: 0.0,
        }
    }
}

/// Per-frame foot positions; `None` marks a frame where no preferred
/// joint qualified. Both tracks always have length `seq.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct FootTracks {
    pub left: Vec<Option<Point3>>,
    pub right: Vec<Option<Point3>>,
}

/// Extracts left/right foot positions for every frame of a sequence.
///
/// Falls back through the preference lists per frame; a missing entry is
/// an explicit `None`, never a sentinel coordinate.
pub fn foot_positions(seq: &PoseSequence, prefs: &FootPrefs) -> Result<FootTracks> {
    let pick = |frame: &SkeletonFrame, kinds: &[JointKind]| -> Option<Point3> {
        kinds.iter().find_map(|k| {
            frame
                .joint(k)
                .filter(|j| j.confidence >= prefs.min_confidence)
                .map(|j| j.position)
        })
    };
    let left: Vec<Option<Point3>> = seq.frames().iter().map(|f| pick(f, &prefs.left)).collect();
    let right: Vec<Option<Point3>> = seq.frames().iter().map(|f| pick(f, &prefs.right)).collect();
    if !seq.is_empty() && left.iter().all(Option::is_none) && right.iter().all(Option::is_none) {
        // Ignore the confidence gate here: the check is about the format
        // carrying foot joints at all.
        let any_foot = seq.frames().iter().any(|f| {
            prefs.left.iter().chain(prefs.right.iter()).any(|k| f.joint(k).is_some())
        });
        if !any_foot {
            return Err(Error::NoFootJoints);
        }
    }
    Ok(FootTracks { left, right })
}
