//! False-positive skeleton removal and short-gap repair ahead of the
//! step detector.

use serde::{Deserialize, Serialize};

use crate::model::{Joint, JointKind, Plane, Point3, PoseSequence, SkeletonFrame};

/// Thresholds for the dimension, temporal, and gap-repair filters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterParams {
    /// Tracks shorter than this many frames are discarded as spurious.
    pub min_track_frames: usize,
    /// Longest missing-joint span that gap interpolation will bridge.
    pub max_gap_frames: usize,
    pub min_height_m: f64,
    pub max_height_m: f64,
    pub max_width_m: f64,
    /// Association radius: a detection joins a track only if its centroid
    /// is within this distance of the track's last centroid.
    pub max_centroid_jump_m: f64,
    pub dimension_filter: bool,
    pub temporal_filter: bool,
}

impl Default for FilterParams {
    fn default() -> FilterParams {
        FilterParams {
            min_track_frames: 10,
            max_gap_frames: 5,
            min_height_m: 0.5,
            max_height_m: 2.5,
            max_width_m: 1.5,
            max_centroid_jump_m: 0.5,
            dimension_filter: true,
            temporal_filter: true,
        }
    }
}

/// Drops frames whose skeleton bounding extent is implausible: vertical
/// extent (height) outside `[min_height_m, max_height_m]` or horizontal
/// extent (width) above `max_width_m`. Surviving frames keep their
/// timestamps and coordinates.
pub fn filter_dimensions(seq: &PoseSequence, p: &FilterParams, plane: Plane) -> PoseSequence {
    let vertical = plane.vertical();
    let (u, v) = plane.axes();
    let keep = |frame: &SkeletonFrame| -> bool {
        let mut height = (f64::INFINITY, f64::NEG_INFINITY);
        let mut du = (f64::INFINITY, f64::NEG_INFINITY);
        let mut dv = (f64::INFINITY, f64::NEG_INFINITY);
        for j in frame.joints() {
            let h = vertical.of(j.position);
            height = (height.0.min(h), height.1.max(h));
            let a = u.of(j.position);
            du = (du.0.min(a), du.1.max(a));
            let b = v.of(j.position);
            dv = (dv.0.min(b), dv.1.max(b));
        }
        if frame.joints().is_empty() {
            return false;
        }
        let h = height.1 - height.0;
        let w = (du.1 - du.0).max(dv.1 - dv.0);
        h >= p.min_height_m && h <= p.max_height_m && w <= p.max_width_m
    };
    let frames: Vec<SkeletonFrame> = seq.frames().iter().filter(|f| keep(f)).cloned().collect();
    PoseSequence::from_validated(frames, seq.frame_rate_hz(), seq.source_id.clone())
}

struct Track {
    frames: Vec<SkeletonFrame>,
    last_centroid: Point3,
    last_t: f64,
    origin: String,
    frame_rate_hz: f64,
}

/// Re-associates detections from all input sequences into tracks by
/// nearest-centroid linking, then discards tracks shorter than
/// `min_track_frames`. Output is ordered by track length descending.
///
/// Association is greedy on ascending centroid distance and depends only
/// on the set of detections per timestamp, not their input order.
pub fn filter_temporal(seqs: &[PoseSequence], p: &FilterParams) -> Vec<PoseSequence> {
    struct Detection {
        t: f64,
        frame: SkeletonFrame,
        centroid: Point3,
        origin: String,
        frame_rate_hz: f64,
    }

    let mut detections: Vec<Detection> = Vec::new();
    for seq in seqs {
        for frame in seq.frames() {
            if let Some(centroid) = frame.centroid() {
                detections.push(Detection {
                    t: frame.timestamp,
                    frame: frame.clone(),
                    centroid,
                    origin: seq.source_id.clone(),
                    frame_rate_hz: seq.frame_rate_hz(),
                });
            }
        }
    }
    detections.sort_by(|a, b| {
        a.t.total_cmp(&b.t).then_with(|| centroid_cmp(a.centroid, b.centroid))
    });

    let mut tracks: Vec<Track> = Vec::new();
    let mut i = 0;
    while i < detections.len() {
        let t = detections[i].t;
        let mut group_end = i;
        while group_end < detections.len() && detections[group_end].t == t {
            group_end += 1;
        }
        let group = &detections[i..group_end];

        // all (distance, track, detection) candidates within the radius
        let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
        for (di, det) in group.iter().enumerate() {
            for (ti, track) in tracks.iter().enumerate() {
                if track.last_t >= t {
                    continue;
                }
                let d = (det.centroid - track.last_centroid).norm();
                if d <= p.max_centroid_jump_m {
                    candidates.push((d, ti, di));
                }
            }
        }
        candidates.sort_by(|a, b| {
            a.0.total_cmp(&b.0).then_with(|| {
                centroid_cmp(group[a.2].centroid, group[b.2].centroid)
                    .then(a.1.cmp(&b.1))
            })
        });

        let mut det_taken = vec![false; group.len()];
        let mut track_taken = vec![false; tracks.len()];
        for (_, ti, di) in candidates {
            if det_taken[di] || track_taken[ti] {
                continue;
            }
            det_taken[di] = true;
            track_taken[ti] = true;
            tracks[ti].frames.push(group[di].frame.clone());
            tracks[ti].last_centroid = group[di].centroid;
            tracks[ti].last_t = t;
        }

        // leftover detections found new tracks, in deterministic order
        let mut fresh: Vec<&Detection> = group
            .iter()
            .enumerate()
            .filter(|(di, _)| !det_taken[*di])
            .map(|(_, d)| d)
            .collect();
        fresh.sort_by(|a, b| centroid_cmp(a.centroid, b.centroid));
        for det in fresh {
            tracks.push(Track {
                frames: vec![det.frame.clone()],
                last_centroid: det.centroid,
                last_t: t,
                origin: det.origin.clone(),
                frame_rate_hz: det.frame_rate_hz,
            });
        }
        i = group_end;
    }

    tracks.retain(|t| t.frames.len() >= p.min_track_frames);
    tracks.sort_by(|a, b| {
        b.frames
            .len()
            .cmp(&a.frames.len())
            .then_with(|| a.frames[0].timestamp.total_cmp(&b.frames[0].timestamp))
            .then_with(|| a.origin.cmp(&b.origin))
    });

    tracks
        .into_iter()
        .map(|t| {
            let monotone = t.frames.windows(2).all(|w| w[0].frame_index < w[1].frame_index);
            let mut frames = t.frames;
            if !monotone {
                for (i, f) in frames.iter_mut().enumerate() {
                    f.frame_index = i as u64;
                }
            }
            PoseSequence::from_validated(frames, t.frame_rate_hz, t.origin)
        })
        .collect()
}

fn centroid_cmp(a: Point3, b: Point3) -> std::cmp::Ordering {
    a.x.total_cmp(&b.x)
        .then(a.y.total_cmp(&b.y))
        .then(a.z.total_cmp(&b.z))
}

/// Outcome of gap repair: the longest contiguous piece plus how many
/// unbridgeable spans split the sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRepair {
    pub sequence: PoseSequence,
    pub splits: usize,
}

const FOOT_KINDS: [JointKind; 4] = [
    JointKind::LeftFoot,
    JointKind::RightFoot,
    JointKind::LeftAnkle,
    JointKind::RightAnkle,
];

/// Repairs per-joint gaps of at most `max_gap_frames` by linear
/// interpolation (interpolated joints are flagged as synthetic). Longer
/// gaps in foot-capable joints split the sequence; the longest piece is
/// returned. Other joints never force a split: auxiliary keypoints may
/// be legitimately sparse.
pub fn interpolate_gaps(seq: &PoseSequence, p: &FilterParams) -> GapRepair {
    let n = seq.len();
    if n == 0 {
        return GapRepair { sequence: seq.clone(), splits: 0 };
    }

    let mut kinds: Vec<JointKind> = Vec::new();
    for frame in seq.frames() {
        for j in frame.joints() {
            if !kinds.contains(&j.kind) {
                kinds.push(j.kind.clone());
            }
        }
    }

    let mut frames: Vec<SkeletonFrame> = seq.frames().to_vec();
    let mut cut = vec![false; n];

    for kind in &kinds {
        let present: Vec<bool> = frames.iter().map(|f| f.joint(kind).is_some()).collect();
        let splits_matter = FOOT_KINDS.contains(kind);
        let mut i = 0;
        while i < n {
            if present[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i < n && !present[i] {
                i += 1;
            }
            let end = i; // missing span is [start, end)
            let interior = start > 0 && end < n;
            if interior && end - start <= p.max_gap_frames {
                let (before, after) = (start - 1, end);
                let a = frames[before].joint(kind).unwrap().clone();
                let b = frames[after].joint(kind).unwrap().clone();
                let (ta, tb) = (frames[before].timestamp, frames[after].timestamp);
                for frame in &mut frames[start..end] {
                    let u = (frame.timestamp - ta) / (tb - ta);
                    let pos = Point3::new(
                        a.position.x + (b.position.x - a.position.x) * u,
                        a.position.y + (b.position.y - a.position.y) * u,
                        a.position.z + (b.position.z - a.position.z) * u,
                    );
                    frame.set_joint(Joint {
                        kind: kind.clone(),
                        position: pos,
                        confidence: a.confidence.min(b.confidence),
                        interpolated: true,
                    });
                }
            } else if splits_matter {
                for flag in cut.iter_mut().take(end).skip(start) {
                    *flag = true;
                }
            }
        }
    }

    // contiguous uncut pieces; keep the longest, count the cut regions
    let mut splits = 0;
    let mut best: (usize, usize) = (0, 0); // [start, end)
    let mut i = 0;
    while i < n {
        if cut[i] {
            splits += 1;
            while i < n && cut[i] {
                i += 1;
            }
        } else {
            let start = i;
            while i < n && !cut[i] {
                i += 1;
            }
            if i - start > best.1 - best.0 {
                best = (start, i);
            }
        }
    }

    let piece = frames[best.0..best.1].to_vec();
    GapRepair {
        sequence: PoseSequence::from_validated(piece, seq.frame_rate_hz(), seq.source_id.clone()),
        splits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::JointKind;

    fn body_frame(idx: u64, t: f64, height: f64, width: f64) -> SkeletonFrame {
        let joints = vec![
            Joint::new(JointKind::Head, Point3::new(0.0, 0.0, height)),
            Joint::new(JointKind::LeftFoot, Point3::new(-width / 2.0, 0.1, 0.0)),
            Joint::new(JointKind::RightFoot, Point3::new(width / 2.0, -0.1, 0.0)),
        ];
        SkeletonFrame::new(idx, t, joints).unwrap()
    }

    fn seq_of(frames: Vec<SkeletonFrame>) -> PoseSequence {
        PoseSequence::new(frames, 30.0, "t").unwrap()
    }

    #[test]
    fn dimension_filter_drops_implausible_heights() {
        let seq = seq_of(vec![
            body_frame(0, 0.0, 1.7, 0.5),
            body_frame(1, 0.1, 3.5, 0.5),
            body_frame(2, 0.2, 1.7, 0.5),
        ]);
        let out = filter_dimensions(&seq, &FilterParams::default(), Plane::Xy);
        assert_eq!(out.len(), 2);
        assert_eq!(out.frames()[0].frame_index, 0);
        assert_eq!(out.frames()[1].frame_index, 2);
        assert_eq!(out.frames()[1].timestamp, 0.2);
    }

    #[test]
    fn dimension_filter_keeps_plausible_frames() {
        let seq = seq_of(vec![body_frame(0, 0.0, 1.7, 0.5)]);
        let out = filter_dimensions(&seq, &FilterParams::default(), Plane::Xy);
        assert_eq!(out.len(), 1);
        assert_eq!(out.frames(), seq.frames());
    }

    #[test]
    fn dimension_filter_may_empty_the_sequence() {
        let seq = seq_of(vec![body_frame(0, 0.0, 3.0, 0.5)]);
        let out = filter_dimensions(&seq, &FilterParams::default(), Plane::Xy);
        assert!(out.is_empty());
    }

    fn shifted_frame(idx: u64, t: f64, x: f64) -> SkeletonFrame {
        let joints = vec![
            Joint::new(JointKind::Head, Point3::new(x, 0.0, 1.7)),
            Joint::new(JointKind::LeftFoot, Point3::new(x, 0.1, 0.0)),
            Joint::new(JointKind::RightFoot, Point3::new(x, -0.1, 0.0)),
        ];
        SkeletonFrame::new(idx, t, joints).unwrap()
    }

    #[test]
    fn temporal_filter_discards_short_spurious_tracks() {
        let long: Vec<SkeletonFrame> =
            (0..100).map(|i| shifted_frame(i, i as f64 / 30.0, 0.01 * i as f64)).collect();
        let spurious = vec![shifted_frame(0, 50.0 / 30.0, 5.0)];
        let out = filter_temporal(
            &[seq_of(long), PoseSequence::new(spurious, 30.0, "ghost").unwrap()],
            &FilterParams::default(),
        );
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].len(), 100);
    }

    #[test]
    fn temporal_filter_keeps_single_track_unchanged() {
        let frames: Vec<SkeletonFrame> =
            (0..30).map(|i| shifted_frame(i, i as f64 / 30.0, 0.01 * i as f64)).collect();
        let seq = seq_of(frames);
        let out = filter_temporal(std::slice::from_ref(&seq), &FilterParams::default());
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], seq);
    }

    #[test]
    fn temporal_filter_is_permutation_invariant_per_frame() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..25u64 {
            let t = i as f64 / 30.0;
            a.push(shifted_frame(i, t, 0.01 * i as f64));
            b.push(shifted_frame(i, t, 2.0 - 0.01 * i as f64));
        }
        let sa = seq_of(a);
        let sb = PoseSequence::new(b, 30.0, "u").unwrap();
        let fwd = filter_temporal(&[sa.clone(), sb.clone()], &FilterParams::default());
        let rev = filter_temporal(&[sb, sa], &FilterParams::default());
        assert_eq!(fwd, rev);
    }

    #[test]
    fn temporal_filter_separates_interleaved_streams() {
        // two people 2 m apart, detections interleaved in one stream
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..40u64 {
            let t = i as f64 / 30.0;
            a.push(shifted_frame(i, t, 0.01 * i as f64));
            b.push(shifted_frame(i, t, 2.0 + 0.01 * i as f64));
        }
        let seqs = vec![seq_of(a.clone()), PoseSequence::new(b.clone(), 30.0, "u").unwrap()];
        let out = filter_temporal(&seqs, &FilterParams::default());
        assert_eq!(out.len(), 2);
        // recovered assignment matches the generating one
        for track in &out {
            let x0 = track.frames()[0].centroid().unwrap().x;
            let expect: &Vec<SkeletonFrame> = if x0 < 1.0 { &a } else { &b };
            assert_eq!(track.len(), 40);
            for (got, want) in track.frames().iter().zip(expect) {
                assert_eq!(got.joints(), want.joints());
            }
        }
    }

    fn feet_frame(idx: u64, t: f64, left: Option<Point3>, right: Option<Point3>) -> SkeletonFrame {
        let mut joints = Vec::new();
        if let Some(p) = left {
            joints.push(Joint::new(JointKind::LeftFoot, p));
        }
        if let Some(p) = right {
            joints.push(Joint::new(JointKind::RightFoot, p));
        }
        joints.push(Joint::new(JointKind::Head, Point3::new(0.0, 0.0, 1.7)));
        SkeletonFrame::new(idx, t, joints).unwrap()
    }

    #[test]
    fn interpolates_single_frame_gap_at_midpoint() {
        let mut frames = Vec::new();
        for i in 0..15u64 {
            let left = if i == 7 {
                None
            } else if i < 7 {
                Some(Point3::new(0.0, 0.0, 0.0))
            } else {
                Some(Point3::new(0.2, 0.0, 0.0))
            };
            frames.push(feet_frame(i, i as f64 / 30.0, left, Some(Point3::new(0.1, -0.1, 0.0))));
        }
        let repaired = interpolate_gaps(&seq_of(frames), &FilterParams::default());
        assert_eq!(repaired.splits, 0);
        assert_eq!(repaired.sequence.len(), 15);
        let j = repaired.sequence.frames()[7].joint(&JointKind::LeftFoot).unwrap();
        assert_eq!(j.position, Point3::new(0.1, 0.0, 0.0));
        assert!(j.interpolated);
    }

    #[test]
    fn long_gap_splits_and_longest_piece_wins() {
        let mut frames = Vec::new();
        for i in 0..30u64 {
            let left = if (10..16).contains(&i) {
                None // 6-frame gap > default max of 5
            } else {
                Some(Point3::new(0.0, 0.0, 0.0))
            };
            frames.push(feet_frame(i, i as f64 / 30.0, left, Some(Point3::new(0.1, -0.1, 0.0))));
        }
        let repaired = interpolate_gaps(&seq_of(frames), &FilterParams::default());
        assert_eq!(repaired.splits, 1);
        assert_eq!(repaired.sequence.len(), 14); // frames 16..30
        assert_eq!(repaired.sequence.frames()[0].frame_index, 16);
    }

    #[test]
    fn no_gaps_is_identity() {
        let frames: Vec<SkeletonFrame> = (0..10)
            .map(|i| {
                feet_frame(
                    i,
                    i as f64 / 30.0,
                    Some(Point3::new(0.0, 0.1, 0.0)),
                    Some(Point3::new(0.0, -0.1, 0.0)),
                )
            })
            .collect();
        let seq = seq_of(frames);
        let repaired = interpolate_gaps(&seq, &FilterParams::default());
        assert_eq!(repaired.splits, 0);
        assert_eq!(repaired.sequence, seq);
    }

    #[test]
    fn gap_repair_is_idempotent() {
        let mut frames = Vec::new();
        for i in 0..20u64 {
            let left = if i == 5 || i == 12 || i == 13 {
                None
            } else {
                Some(Point3::new(0.02 * i as f64, 0.1, 0.0))
            };
            frames.push(feet_frame(i, i as f64 / 30.0, left, Some(Point3::new(0.1, -0.1, 0.0))));
        }
        let once = interpolate_gaps(&seq_of(frames), &FilterParams::default());
        let twice = interpolate_gaps(&once.sequence, &FilterParams::default());
        assert_eq!(twice.splits, 0);
        assert_eq!(once.sequence, twice.sequence);
    }
}
