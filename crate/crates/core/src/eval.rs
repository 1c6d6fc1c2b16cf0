//! Accuracy metrics against ground truth: step-count accuracy and the
//! average L1 frame error over matched events.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pairs predicted and true event frames.
///
/// Equal counts pair in order. Otherwise the shorter list is assigned
/// into the longer by the minimum-total-L1 monotone (order-preserving)
/// mapping, found by dynamic programming; step events are ordered in
/// time, so crossings are physically meaningless. Returns
/// `(predicted, truth)` frame pairs; unmatched events are simply absent.
pub fn match_events(predicted: &[usize], truth: &[usize]) -> Vec<(usize, usize)> {
    if predicted.len() == truth.len() {
        return predicted.iter().copied().zip(truth.iter().copied()).collect();
    }
    let pred_shorter = predicted.len() < truth.len();
    let (short, long) = if pred_shorter { (predicted, truth) } else { (truth, predicted) };
    let (m, n) = (short.len(), long.len());
    if m == 0 {
        return Vec::new();
    }

    // dp[i][j]: min cost of matching short[..i] into long[..j]
    let inf = f64::INFINITY;
    let mut dp = vec![vec![inf; n + 1]; m + 1];
    dp[0].fill(0.0);
    for i in 1..=m {
        for j in i..=n {
            let cost = (short[i - 1] as f64 - long[j - 1] as f64).abs();
            dp[i][j] = dp[i][j - 1].min(dp[i - 1][j - 1] + cost);
        }
    }

    let mut pairs = Vec::with_capacity(m);
    let (mut i, mut j) = (m, n);
    while i > 0 {
        if j > i && dp[i][j] == dp[i][j - 1] {
            j -= 1;
        } else {
            pairs.push((short[i - 1], long[j - 1]));
            i -= 1;
            j -= 1;
        }
    }
    pairs.reverse();
    if pred_shorter {
        pairs
    } else {
        pairs.into_iter().map(|(t, p)| (p, t)).collect()
    }
}

/// One clip's prediction and ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipEval {
    pub id: String,
    pub predicted: Vec<usize>,
    pub truth: Vec<usize>,
    pub frame_rate_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerClip {
    pub id: String,
    pub predicted_count: usize,
    pub true_count: usize,
    /// |predicted - truth| per matched pair, in frames.
    pub frame_errors: Vec<f64>,
    pub unmatched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub n_clips: usize,
    /// Fraction of clips whose predicted step count is exactly right.
    pub count_accuracy: f64,
    /// Mean L1 error over matched events pooled across clips.
    pub mean_frame_error: f64,
    /// Frame errors divided by each clip's frame rate, pooled.
    pub mean_time_error_s: f64,
    pub per_clip: Vec<PerClip>,
}

/// Aggregates per-clip matchings into the two reported metrics.
/// Unmatched events affect count accuracy only, never the frame error.
pub fn evaluate(clips: &[ClipEval]) -> Result<EvalResult> {
    if clips.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    let mut exact = 0usize;
    let mut frame_errors_all = Vec::new();
    let mut time_errors_all = Vec::new();
    let mut per_clip = Vec::with_capacity(clips.len());
    for clip in clips {
        if clip.predicted.len() == clip.truth.len() {
            exact += 1;
        }
        let pairs = match_events(&clip.predicted, &clip.truth);
        let errors: Vec<f64> =
            pairs.iter().map(|&(p, t)| (p as f64 - t as f64).abs()).collect();
        for e in &errors {
            frame_errors_all.push(*e);
            time_errors_all.push(*e / clip.frame_rate_hz);
        }
        let total_events = clip.predicted.len() + clip.truth.len();
        per_clip.push(PerClip {
            id: clip.id.clone(),
            predicted_count: clip.predicted.len(),
            true_count: clip.truth.len(),
            frame_errors: errors,
            unmatched: total_events - 2 * pairs.len(),
        });
    }
    // summed in value order, so the aggregate is independent of clip order
    let pooled_mean = |mut xs: Vec<f64>| -> f64 {
        if xs.is_empty() {
            return 0.0;
        }
        xs.sort_by(|a, b| a.total_cmp(b));
        let n = xs.len() as f64;
        xs.into_iter().sum::<f64>() / n
    };
    Ok(EvalResult {
        n_clips: clips.len(),
        count_accuracy: exact as f64 / clips.len() as f64,
        mean_frame_error: pooled_mean(frame_errors_all),
        mean_time_error_s: pooled_mean(time_errors_all),
        per_clip,
    })
}
