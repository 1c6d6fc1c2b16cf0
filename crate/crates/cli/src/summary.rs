//! Long-term aggregation of per-clip reports: calendar buckets, median
//! and mean speeds, and the least-squares speed trend.

use chrono::{DateTime, Datelike};
use serde::{Deserialize, Serialize};

use crate::config::Bucket;

/// Inputs to aggregation: one analyzed clip. `start_time_s` is the first
/// timestamp of the analyzed track, read as UNIX seconds.
#[derive(Debug, Clone)]
pub struct ClipStats {
    pub input: String,
    pub start_time_s: f64,
    pub n_steps: usize,
    pub speed_mps: Option<f64>,
    pub asymmetry_index: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodAggregate {
    pub period: String,
    pub n_clips: usize,
    pub n_steps: usize,
    pub mean_speed_mps: Option<f64>,
    pub median_speed_mps: Option<f64>,
    pub mean_asymmetry_index: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureEntry {
    pub input: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongTermSummary {
    pub schema: u32,
    pub n_inputs: usize,
    pub n_analyzed: usize,
    pub n_failed: usize,
    pub periods: Vec<PeriodAggregate>,
    /// Least-squares slope of clip speed over time, m/s per day.
    pub speed_trend_mps_per_day: Option<f64>,
    pub failures: Vec<FailureEntry>,
}

fn bucket_label(start_time_s: f64, bucket: Bucket) -> String {
    let secs = start_time_s.floor() as i64;
    let date = DateTime::from_timestamp(secs, 0)
        .map(|dt| dt.date_naive())
        .unwrap_or_default();
    match bucket {
        Bucket::Day => date.format("%Y-%m-%d").to_string(),
        Bucket::Week => {
            let week = date.iso_week();
            format!("{}-W{:02}", week.year(), week.week())
        }
        Bucket::Month => date.format("%Y-%m").to_string(),
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

fn median(xs: &mut [f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    Some(if n % 2 == 1 { xs[n / 2] } else { 0.5 * (xs[n / 2 - 1] + xs[n / 2]) })
}

/// Slope of the least-squares line through (day, speed) points; absent
/// with fewer than two distinct observation times.
fn speed_trend(clips: &[ClipStats]) -> Option<f64> {
    let points: Vec<(f64, f64)> = clips
        .iter()
        .filter_map(|c| c.speed_mps.map(|v| (c.start_time_s / 86_400.0, v)))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    Some(sxy / sxx)
}

/// Builds the summary. Clips are sorted by input path first, so the
/// outcome is independent of analysis order and parallelism.
pub fn summarize(
    mut clips: Vec<ClipStats>,
    mut failures: Vec<FailureEntry>,
    bucket: Bucket,
) -> LongTermSummary {
    clips.sort_by(|a, b| a.input.cmp(&b.input));
    failures.sort_by(|a, b| a.input.cmp(&b.input));

    let mut period_keys: Vec<String> = Vec::new();
    let mut grouped: Vec<Vec<&ClipStats>> = Vec::new();
    let mut ordered: Vec<(f64, String)> = clips
        .iter()
        .map(|c| (c.start_time_s, bucket_label(c.start_time_s, bucket)))
        .collect();
    ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (_, label) in ordered {
        if !period_keys.contains(&label) {
            period_keys.push(label);
        }
    }
    for key in &period_keys {
        grouped.push(
            clips
                .iter()
                .filter(|c| bucket_label(c.start_time_s, bucket) == *key)
                .collect(),
        );
    }

    let periods = period_keys
        .iter()
        .zip(&grouped)
        .map(|(period, members)| {
            let mut speeds: Vec<f64> = members.iter().filter_map(|c| c.speed_mps).collect();
            let asyms: Vec<f64> = members.iter().filter_map(|c| c.asymmetry_index).collect();
            PeriodAggregate {
                period: period.clone(),
                n_clips: members.len(),
                n_steps: members.iter().map(|c| c.n_steps).sum(),
                mean_speed_mps: mean(&speeds),
                median_speed_mps: median(&mut speeds),
                mean_asymmetry_index: mean(&asyms),
            }
        })
        .collect();

    LongTermSummary {
        schema: 1,
        n_inputs: clips.len() + failures.len(),
        n_analyzed: clips.len(),
        n_failed: failures.len(),
        periods,
        speed_trend_mps_per_day: speed_trend(&clips),
        failures,
    }
}

impl LongTermSummary {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "period,n_clips,n_steps,mean_speed_mps,median_speed_mps,mean_asymmetry_index\n",
        );
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for p in &self.periods {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.period,
                p.n_clips,
                p.n_steps,
                cell(p.mean_speed_mps),
                cell(p.median_speed_mps),
                cell(p.mean_asymmetry_index)
            ));
        }
        out
    }
}
