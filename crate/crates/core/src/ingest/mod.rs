//! Parsers and writers for skeleton inputs, plus camera back-projection.

mod camera;
mod jsonl;
mod kinect;

pub use camera::{
    back_project, parse_camera_config, CameraExtrinsics, CameraIntrinsics, ImageJoint, ImagePose,
};
pub use jsonl::{parse_pose_jsonl, write_pose_jsonl};
pub use kinect::{parse_kinect_skeleton, write_kinect_skeleton, KINECT20_JOINTS};

use crate::error::{Error, Result};

/// Parses a `key = value` document: one pair per line, `#` comments and
/// blank lines ignored. Used for camera configs and mirrored by the CLI
/// run config.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Format {
            line: i + 1,
            msg: format!("expected `key = value`, got {line:?}"),
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}
