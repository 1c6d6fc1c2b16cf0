//! Step detection from the feet-distance signal.
//!
//! The pipeline: per-frame horizontal feet distance, uniform-kernel
//! smoothing, strict local extrema, range-threshold false-pair removal,
//! first-extremum removal. Maxima of the smoothed curve mark the frames
//! where the feet are widest apart, i.e. the steps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{foot_positions, FootPrefs, Plane, Point3, PoseSequence};

/// Detector tuning. Defaults: 5-frame kernel, threshold fraction 0.2,
/// x-y walking plane, at least 2 steps for a clip to count as walking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorParams {
    /// Uniform smoothing kernel width in frames; odd, >= 1.
    pub kernel_width: usize,
    /// Threshold fraction of the extrema range, in (0, 1).
    pub alpha: f64,
    pub plane: Plane,
    /// Minimum surviving maxima for a detection to succeed.
    pub min_steps: usize,
    pub feet: FootPrefs,
}

impl Default for DetectorParams {
    fn default() -> DetectorParams {
        DetectorParams {
            kernel_width: 5,
            alpha: 0.2,
            plane: Plane::Xy,
            min_steps: 2,
            feet: FootPrefs::default(),
        }
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<()> {
        if self.kernel_width == 0 || self.kernel_width.is_multiple_of(2) {
            return Err(Error::InvalidParam(format!(
                "kernel width must be odd and >= 1, got {}",
                self.kernel_width
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParam(format!(
                "alpha must be in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.min_steps == 0 {
            return Err(Error::InvalidParam("min_steps must be >= 1".into()));
        }
        Ok(())
    }
}

/// The feet-distance signal, raw and smoothed, with per-frame times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSignal {
    pub raw: Vec<f64>,
    pub smoothed: Vec<f64>,
    pub timestamps: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Max,
    Min,
}

/// A local extremum of the smoothed curve. In a final detection result
/// the value is read from the raw signal at the detected frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    /// Index into the signal (not the source file's frame id).
    pub frame: usize,
    pub value: f64,
    pub kind: ExtremumKind,
}

/// An adjacent extremum pair discarded by the range threshold, recorded
/// with the smoothed values the decision compared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemovedPair {
    pub first: Extremum,
    pub second: Extremum,
}

/// Full detection output with audit trail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDetectionResult {
    /// Surviving extrema, strictly alternating, values from the raw signal.
    pub extrema: Vec<Extremum>,
    /// Extrema range r = max maxima - min minima, from the smoothed curve.
    pub range_r: f64,
    /// theta = alpha * r exactly.
    pub threshold_theta: f64,
    /// Frames of the retained maxima: the step events.
    pub step_frames: Vec<usize>,
    pub removed_pairs: Vec<RemovedPair>,
}

impl StepDetectionResult {
    pub fn maxima(&self) -> impl Iterator<Item = &Extremum> {
        self.extrema.iter().filter(|e| e.kind == ExtremumKind::Max)
    }

    pub fn minima(&self) -> impl Iterator<Item = &Extremum> {
        self.extrema.iter().filter(|e| e.kind == ExtremumKind::Min)
    }
}

/// Per-frame Euclidean distance between the feet restricted to the
/// walking plane.
pub fn feet_distance(left: &[Point3], right: &[Point3], plane: Plane) -> Result<Vec<f64>> {
    if left.len() != right.len() {
        return Err(Error::LengthMismatch { left: left.len(), right: right.len() });
    }
    Ok(left.iter().zip(right).map(|(l, r)| plane.distance(*l, *r)).collect())
}

/// Centered moving average. At the boundaries the window shrinks to the
/// valid range `[max(0, t-h), min(T-1, t+h)]` and averages over the
/// actual window size, so constant signals stay constant.
pub fn smooth_uniform(raw: &[f64], kernel_width: usize) -> Result<Vec<f64>> {
    if kernel_width == 0 || kernel_width.is_multiple_of(2) {
        return Err(Error::InvalidParam(format!(
            "kernel width must be odd and >= 1, got {kernel_width}"
        )));
    }
    if kernel_width > raw.len() {
        return Err(Error::KernelTooLarge { width: kernel_width, len: raw.len() });
    }
    let h = (kernel_width - 1) / 2;
    let n = raw.len();
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        let a = t.saturating_sub(h);
        let b = (t + h).min(n - 1);
        let sum: f64 = raw[a..=b].iter().sum();
        out.push(sum / (b - a + 1) as f64);
    }
    Ok(out)
}

/// Interior strict local extrema of a signal. A plateau of equal values
/// counts once, at its first index; plateaus touching either end are not
/// extrema. Output alternates Max/Min by construction.
///
/// Values within 1e-12 of the signal's range count as equal: rounding in
/// the moving average can dent an otherwise constant stretch by an ulp,
/// and such dents must not become extrema. Real features sit far above
/// this, the range threshold removes anything near it anyway, and the
/// relative form keeps the rule scale-equivariant.
pub fn find_extrema(smoothed: &[f64]) -> Result<Vec<Extremum>> {
    let n = smoothed.len();
    if n < 3 {
        return Err(Error::SignalTooShort { len: n });
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in smoothed {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let tol = 1e-12 * (hi - lo);
    // runs of equal values, anchored at the run's first value:
    // (start index, value)
    let mut runs: Vec<(usize, f64)> = Vec::new();
    for (i, &v) in smoothed.iter().enumerate() {
        match runs.last() {
            Some(&(_, anchor)) if (v - anchor).abs() <= tol => {}
            _ => runs.push((i, v)),
        }
    }
    let mut out = Vec::new();
    for w in runs.windows(3) {
        let (prev, cur, next) = (w[0].1, w[1], w[2].1);
        let kind = if cur.1 > prev && cur.1 > next {
            ExtremumKind::Max
        } else if cur.1 < prev && cur.1 < next {
            ExtremumKind::Min
        } else {
            continue;
        };
        out.push(Extremum { frame: cur.0, value: cur.1, kind });
    }
    Ok(out)
}

/// Outcome of range-threshold false-pair removal.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredExtrema {
    pub kept: Vec<Extremum>,
    pub removed_pairs: Vec<RemovedPair>,
    pub range_r: f64,
    pub threshold_theta: f64,
}

/// Removes false extrema: with r = max maxima - min minima and
/// theta = alpha * r (computed once, before any removal), repeatedly
/// delete the adjacent pair with the smallest absolute value difference
/// while that difference is below theta. Without both a maximum and a
/// minimum, theta is 0 and nothing is removed.
pub fn remove_false_extrema(extrema: Vec<Extremum>, alpha: f64) -> FilteredExtrema {
    let hi = extrema
        .iter()
        .filter(|e| e.kind == ExtremumKind::Max)
        .map(|e| e.value)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let lo = extrema
        .iter()
        .filter(|e| e.kind == ExtremumKind::Min)
        .map(|e| e.value)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
    let range_r = match (hi, lo) {
        (Some(hi), Some(lo)) => hi - lo,
        _ => 0.0,
    };
    let threshold_theta = alpha * range_r;

    let mut kept = extrema;
    let mut removed_pairs = Vec::new();
    loop {
        if kept.len() < 2 {
            break;
        }
        let (mut best_i, mut best_d) = (0usize, f64::INFINITY);
        for i in 0..kept.len() - 1 {
            let d = (kept[i + 1].value - kept[i].value).abs();
            if d < best_d {
                best_d = d;
                best_i = i;
            }
        }
        if best_d >= threshold_theta {
            break;
        }
        removed_pairs.push(RemovedPair { first: kept[best_i], second: kept[best_i + 1] });
        kept.drain(best_i..=best_i + 1);
        // Deleting an adjacent pair of alternating extrema cannot create a
        // same-kind adjacency; the merge below only fires on input that
        // already violated alternation.
        if best_i > 0 && best_i < kept.len() && kept[best_i - 1].kind == kept[best_i].kind {
            let keep_left = match kept[best_i].kind {
                ExtremumKind::Max => kept[best_i - 1].value >= kept[best_i].value,
                ExtremumKind::Min => kept[best_i - 1].value <= kept[best_i].value,
            };
            kept.remove(if keep_left { best_i } else { best_i - 1 });
        }
    }
    FilteredExtrema { kept, removed_pairs, range_r, threshold_theta }
}

/// Builds the raw and smoothed feet-distance signal for a sequence.
pub fn compute_distance_signal(seq: &PoseSequence, params: &DetectorParams) -> Result<DistanceSignal> {
    params.validate()?;
    let need = params.kernel_width.max(3);
    if seq.len() < need {
        return Err(Error::TooFewFrames { got: seq.len(), need });
    }
    let tracks = foot_positions(seq, &params.feet)?;
    let mut left = Vec::with_capacity(seq.len());
    let mut right = Vec::with_capacity(seq.len());
    for (i, (l, r)) in tracks.left.iter().zip(&tracks.right).enumerate() {
        match (l, r) {
            (Some(l), Some(r)) => {
                left.push(*l);
                right.push(*r);
            }
            _ => return Err(Error::MissingFoot { frame: i }),
        }
    }
    let raw = feet_distance(&left, &right, params.plane)?;
    let smoothed = smooth_uniform(&raw, params.kernel_width)?;
    Ok(DistanceSignal { raw, smoothed, timestamps: seq.timestamps() })
}

/// Runs extrema extraction and false-pair removal on a prepared signal,
/// then drops the first surviving extremum (the start of a clip is not
/// a step). Returns `NoStepsDetected` when fewer than `min_steps` maxima
/// remain, which marks a non-walking clip rather than a crash.
pub fn detect_steps_on_signal(
    signal: &DistanceSignal,
    params: &DetectorParams,
) -> Result<StepDetectionResult> {
    params.validate()?;
    let extrema = find_extrema(&signal.smoothed)?;
    let filtered = remove_false_extrema(extrema, params.alpha);

    let mut kept = filtered.kept;
    if !kept.is_empty() {
        kept.remove(0);
    }
    // report surviving extrema at their raw-signal values
    for e in &mut kept {
        e.value = signal.raw[e.frame];
    }
    let step_frames: Vec<usize> = kept
        .iter()
        .filter(|e| e.kind == ExtremumKind::Max)
        .map(|e| e.frame)
        .collect();
    if step_frames.len() < params.min_steps {
        return Err(Error::NoStepsDetected { found: step_frames.len(), min: params.min_steps });
    }
    Ok(StepDetectionResult {
        extrema: kept,
        range_r: filtered.range_r,
        threshold_theta: filtered.threshold_theta,
        step_frames,
        removed_pairs: filtered.removed_pairs,
    })
}

/// The full detector: feet distance, smoothing, extrema, false-pair
/// removal, first-extremum removal.
pub fn detect_steps(seq: &PoseSequence, params: &DetectorParams) -> Result<StepDetectionResult> {
    let signal = compute_distance_signal(seq, params)?;
    detect_steps_on_signal(&signal, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    #[test]
    fn feet_distance_ignores_the_third_axis() {
        let d = feet_distance(&[p(0.0, 0.0, 1.0)], &[p(3.0, 4.0, 9.0)], Plane::Xy).unwrap();
        assert_eq!(d, vec![5.0]);
    }

    #[test]
    fn feet_distance_of_identical_tracks_is_zero() {
        let track = vec![p(0.1, 0.2, 0.3); 8];
        let d = feet_distance(&track, &track, Plane::Xy).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn feet_distance_checks_lengths() {
        let err = feet_distance(&[p(0.0, 0.0, 0.0)], &[], Plane::Xy).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { left: 1, right: 0 }));
    }

    #[test]
    fn smoothing_shrinks_the_window_at_boundaries() {
        let out = smooth_uniform(&[0.0, 3.0, 0.0], 3).unwrap();
        assert_eq!(out, vec![1.5, 1.0, 1.5]);
    }

    #[test]
    fn width_one_kernel_is_identity() {
        let sig = vec![0.3, 0.7, 0.1, 0.9];
        assert_eq!(smooth_uniform(&sig, 1).unwrap(), sig);
    }

    #[test]
    fn oversized_kernel_is_rejected() {
        assert!(matches!(
            smooth_uniform(&[1.0, 2.0], 5),
            Err(Error::KernelTooLarge { width: 5, len: 2 })
        ));
    }

    #[test]
    fn even_kernel_is_rejected() {
        assert!(matches!(smooth_uniform(&[1.0, 2.0, 3.0], 2), Err(Error::InvalidParam(_))));
    }

    #[test]
    fn smoothing_reduces_white_noise_variance() {
        // fixed-seed xorshift noise, variance must strictly drop
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut noise = Vec::with_capacity(1000);
        for _ in 0..1000 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            noise.push((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5);
        }
        let smoothed = smooth_uniform(&noise, 5).unwrap();
        let var = |xs: &[f64]| {
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
        };
        assert!(var(&smoothed) < var(&noise));
    }

    #[test]
    fn single_peak_is_found() {
        let ex = find_extrema(&[1.0, 3.0, 1.0]).unwrap();
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].frame, 1);
        assert_eq!(ex[0].kind, ExtremumKind::Max);
    }

    #[test]
    fn plateau_counts_once_at_first_index() {
        let ex = find_extrema(&[1.0, 3.0, 3.0, 1.0]).unwrap();
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].frame, 1);
        assert_eq!(ex[0].kind, ExtremumKind::Max);
    }

    #[test]
    fn monotone_signal_has_no_extrema() {
        let sig: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(find_extrema(&sig).unwrap().is_empty());
    }

    #[test]
    fn boundary_plateaus_are_not_extrema() {
        let ex = find_extrema(&[2.0, 2.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(ex.len(), 1);
        assert_eq!(ex[0].kind, ExtremumKind::Min);
        assert_eq!(ex[0].frame, 2);
    }

    #[test]
    fn too_short_signal_is_rejected() {
        assert!(matches!(find_extrema(&[1.0, 2.0]), Err(Error::SignalTooShort { len: 2 })));
    }

    fn alt(values: &[(f64, ExtremumKind)]) -> Vec<Extremum> {
        values
            .iter()
            .enumerate()
            .map(|(i, &(value, kind))| Extremum { frame: i * 10, value, kind })
            .collect()
    }

    use ExtremumKind::{Max, Min};

    #[test]
    fn shallow_pair_is_removed_and_result_matches_fixed_point() {
        let input = alt(&[(0.0, Min), (10.0, Max), (9.5, Min), (10.0, Max), (0.0, Min)]);
        let out = remove_false_extrema(input, 0.2);
        assert_eq!(out.range_r, 10.0);
        assert_eq!(out.threshold_theta, 2.0);
        assert_eq!(out.removed_pairs.len(), 1);
        let kinds: Vec<ExtremumKind> = out.kept.iter().map(|e| e.kind).collect();
        let values: Vec<f64> = out.kept.iter().map(|e| e.value).collect();
        assert_eq!(kinds, vec![Min, Max, Min]);
        assert_eq!(values, vec![0.0, 10.0, 0.0]);
    }

    #[test]
    fn nothing_below_threshold_is_untouched() {
        let input = alt(&[(0.0, Min), (10.0, Max), (0.0, Min), (10.0, Max)]);
        let out = remove_false_extrema(input.clone(), 0.2);
        assert_eq!(out.kept, input);
        assert!(out.removed_pairs.is_empty());
    }

    #[test]
    fn single_maximum_survives_with_zero_threshold() {
        let input = alt(&[(5.0, Max)]);
        let out = remove_false_extrema(input.clone(), 0.2);
        assert_eq!(out.kept, input);
        assert_eq!(out.range_r, 0.0);
        assert_eq!(out.threshold_theta, 0.0);
    }

    #[test]
    fn survivors_alternate_and_clear_the_threshold() {
        let input = alt(&[
            (0.1, Min),
            (9.0, Max),
            (8.8, Min),
            (9.4, Max),
            (0.3, Min),
            (9.9, Max),
            (9.7, Min),
            (9.8, Max),
            (0.0, Min),
        ]);
        let out = remove_false_extrema(input, 0.2);
        for w in out.kept.windows(2) {
            assert_ne!(w[0].kind, w[1].kind);
            assert!((w[1].value - w[0].value).abs() >= out.threshold_theta);
        }
    }
}
