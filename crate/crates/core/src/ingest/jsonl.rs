//! Line-delimited pose records, the generic ingestion format for pose
//! estimator output.
//!
//! One JSON object per line:
//! `{"t": <seconds>, "track": <id>, "joints": [{"name", "x", "y", "z", "conf"?}, ...]}`.
//! Records group by track id; within a track they are sorted by `t`
//! (out-of-order input is tolerated, duplicate timestamps are not).

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Joint, JointKind, Point3, PoseSequence, SkeletonFrame};

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    t: f64,
    track: String,
    joints: Vec<JointRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JointRecord {
    name: String,
    x: f64,
    y: f64,
    z: f64,
    #[serde(default = "default_conf")]
    conf: f64,
}

fn default_conf() -> f64 {
    1.0
}

/// Parses pose JSONL into one sequence per track, ordered by first
/// appearance in the stream. The format carries real timestamps, so
/// `frame_rate_hz` is metadata supplied by the caller.
pub fn parse_pose_jsonl(
    reader: impl BufRead,
    frame_rate_hz: f64,
) -> Result<Vec<PoseSequence>> {
    let mut order: Vec<String> = Vec::new();
    let mut by_track: Vec<Vec<Record>> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line).map_err(|e| Error::Format {
            line: line_no,
            msg: e.to_string(),
        })?;
        if !rec.t.is_finite() {
            return Err(Error::Format { line: line_no, msg: format!("non-finite t {}", rec.t) });
        }
        match order.iter().position(|id| *id == rec.track) {
            Some(k) => by_track[k].push(rec),
            None => {
                order.push(rec.track.clone());
                by_track.push(vec![rec]);
            }
        }
    }
    if order.is_empty() {
        return Err(Error::EmptyInput);
    }

    let mut sequences = Vec::with_capacity(order.len());
    for (track_id, mut records) in order.into_iter().zip(by_track) {
        records.sort_by(|a, b| a.t.total_cmp(&b.t));
        for pair in records.windows(2) {
            if pair[0].t == pair[1].t {
                return Err(Error::DuplicateTimestamp { track: track_id, t: pair[0].t });
            }
        }
        let mut frames = Vec::with_capacity(records.len());
        for (i, rec) in records.into_iter().enumerate() {
            let mut joints = Vec::with_capacity(rec.joints.len());
            for j in rec.joints {
                let p = Point3::new(j.x, j.y, j.z);
                joints.push(Joint::with_confidence(JointKind::from_name(&j.name), p, j.conf));
            }
            frames.push(SkeletonFrame::new(i as u64, rec.t, joints)?);
        }
        sequences.push(PoseSequence::new(frames, frame_rate_hz, track_id)?);
    }
    Ok(sequences)
}

/// Writes a sequence as pose JSONL with canonical joint names.
pub fn write_pose_jsonl(seq: &PoseSequence, mut out: impl Write) -> Result<()> {
    for frame in seq.frames() {
        let rec = Record {
            t: frame.timestamp,
            track: seq.source_id.clone(),
            joints: frame
                .joints()
                .iter()
                .map(|j| JointRecord {
                    name: j.kind.name().to_string(),
                    x: j.position.x,
                    y: j.position.y,
                    z: j.position.z,
                    conf: j.confidence,
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &rec)
            .map_err(|e| Error::Format { line: 0, msg: e.to_string() })?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
