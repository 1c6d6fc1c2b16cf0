//! Kinect-v1 style skeleton text files.
//!
//! One frame per line: an integer frame index followed by 20 joints by
//! 3 coordinates, whitespace-separated ASCII decimal floats in meters
//! (camera coordinates). The fixed joint order is [`KINECT20_JOINTS`].

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::model::{Joint, JointKind, Point3, PoseSequence, SkeletonFrame};

/// The 20-joint layout, frozen: column group `i` (3 floats) is joint
/// `KINECT20_JOINTS[i]`.
pub const KINECT20_JOINTS: [JointKind; 20] = [
    JointKind::HipCenter,
    JointKind::Spine,
    JointKind::ShoulderCenter,
    JointKind::Head,
    JointKind::LeftShoulder,
    JointKind::LeftElbow,
    JointKind::LeftWrist,
    JointKind::LeftHand,
    JointKind::RightShoulder,
    JointKind::RightElbow,
    JointKind::RightWrist,
    JointKind::RightHand,
    JointKind::LeftHip,
    JointKind::LeftKnee,
    JointKind::LeftAnkle,
    JointKind::LeftFoot,
    JointKind::RightHip,
    JointKind::RightKnee,
    JointKind::RightAnkle,
    JointKind::RightFoot,
];

/// Parses a Kinect skeleton file. The format carries no timing, so
/// timestamps are synthesized as `frame_index / frame_rate_hz`.
pub fn parse_kinect_skeleton(
    reader: impl BufRead,
    frame_rate_hz: f64,
    source_id: &str,
) -> Result<PoseSequence> {
    let mut frames = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 1 + 20 * 3 {
            return Err(Error::Format {
                line: line_no,
                msg: format!("expected 61 fields (index + 20 joints x 3), got {}", fields.len()),
            });
        }
        let frame_index: u64 = fields[0].parse().map_err(|_| Error::Format {
            line: line_no,
            msg: format!("bad frame index {:?}", fields[0]),
        })?;
        let mut joints = Vec::with_capacity(20);
        for (j, kind) in KINECT20_JOINTS.iter().enumerate() {
            let mut c = [0.0f64; 3];
            for (a, slot) in c.iter_mut().enumerate() {
                let field = fields[1 + j * 3 + a];
                let v: f64 = field.parse().map_err(|_| Error::Format {
                    line: line_no,
                    msg: format!("bad float {field:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Format {
                        line: line_no,
                        msg: format!("non-finite coordinate {field:?}"),
                    });
                }
                *slot = v;
            }
            joints.push(Joint::new(kind.clone(), Point3::new(c[0], c[1], c[2])));
        }
        let timestamp = frame_index as f64 / frame_rate_hz;
        frames.push(SkeletonFrame::new(frame_index, timestamp, joints)?);
    }
    if frames.is_empty() {
        return Err(Error::EmptyInput);
    }
    PoseSequence::new(frames, frame_rate_hz, source_id)
}

/// Writes the fixed-layout skeleton text. Every frame must carry all 20
/// joints; the format cannot represent a missing joint.
pub fn write_kinect_skeleton(seq: &PoseSequence, mut out: impl Write) -> Result<()> {
    for frame in seq.frames() {
        let mut line = frame.frame_index.to_string();
        for kind in &KINECT20_JOINTS {
            let j = frame.joint(kind).ok_or_else(|| Error::InvalidParam(format!(
                "frame {} lacks {:?}; the fixed-layout format needs all 20 joints",
                frame.frame_index, kind
            )))?;
            let p = j.position;
            line.push_str(&format!(" {} {} {}", p.x, p.y, p.z));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}
