use gaitpipe_core::detect::{detect_steps, DetectorParams, StepDetectionResult};
use gaitpipe_core::metrics::{assign_feet, compute_gait_report, GaitReport};
use gaitpipe_core::model::{foot_positions, Point3, PoseSequence};

/// Detection plus gait report for a sequence with complete foot tracks.
pub fn analyze(seq: &PoseSequence, params: &DetectorParams) -> (StepDetectionResult, GaitReport) {
    let (left, right) = feet(seq, params);
    let result = detect_steps(seq, params).expect("detection");
    let ts = seq.timestamps();
    let events = assign_feet(&result, &left, &right, &ts, params.plane);
    let minima: Vec<_> = result.minima().copied().collect();
    let report = compute_gait_report(&events, &minima, params.plane);
    (result, report)
}

pub fn feet(seq: &PoseSequence, params: &DetectorParams) -> (Vec<Point3>, Vec<Point3>) {
    let tracks = foot_positions(seq, &params.feet).expect("foot joints");
    let left = tracks.left.iter().map(|p| p.expect("left foot present")).collect();
    let right = tracks.right.iter().map(|p| p.expect("right foot present")).collect();
    (left, right)
}
