//! The stable report schema (versioned with `schema: 1`) and the
//! per-step CSV. Absent parameters serialize as null, never zero.

use std::path::Path;

use serde::{Deserialize, Serialize};

use gaitpipe_core::{DetectorParams, GaitReport, StepDetectionResult};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: u32,
    pub source: String,
    pub n_steps: usize,
    pub speed_mps: Option<f64>,
    pub stride_left_m: Option<f64>,
    pub stride_right_m: Option<f64>,
    pub step_length_m: Option<f64>,
    pub step_width_m: Option<f64>,
    pub swing_time_s: Option<f64>,
    pub asymmetry_index: Option<f64>,
    pub steps: Vec<StepRow>,
    pub detector: DetectorInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub event_index: usize,
    pub frame: usize,
    pub time_s: f64,
    pub foot: String,
    pub stride_m: f64,
    pub swing_time_s: Option<f64>,
    pub step_length_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorInfo {
    pub alpha: f64,
    pub kernel_width: usize,
    pub range_r: Option<f64>,
    pub threshold_theta: Option<f64>,
}

impl ReportFile {
    pub fn new(
        source: String,
        report: &GaitReport,
        detection: Option<&StepDetectionResult>,
        params: &DetectorParams,
    ) -> ReportFile {
        ReportFile {
            schema: 1,
            source,
            n_steps: report.n_steps,
            speed_mps: report.speed_mps,
            stride_left_m: report.stride_left_m,
            stride_right_m: report.stride_right_m,
            step_length_m: report.step_length_m,
            step_width_m: report.step_width_m,
            swing_time_s: report.swing_time_s,
            asymmetry_index: report.asymmetry_index,
            steps: report
                .per_step
                .iter()
                .map(|s| StepRow {
                    event_index: s.event_index,
                    frame: s.frame,
                    time_s: s.time_s,
                    foot: s.foot.to_string(),
                    stride_m: s.stride_m,
                    swing_time_s: s.swing_time_s,
                    step_length_m: s.step_length_m,
                })
                .collect(),
            detector: DetectorInfo {
                alpha: params.alpha,
                kernel_width: params.kernel_width,
                range_r: detection.map(|d| d.range_r),
                threshold_theta: detection.map(|d| d.threshold_theta),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn load(path: &Path) -> Result<ReportFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(path, format!("cannot read report: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::input(path, format!("bad report json: {e}")))
    }

    /// The per-step CSV: one row per event, absent values as empty fields.
    pub fn steps_csv(&self) -> String {
        let mut out = String::from("event_index,frame,time_s,foot,stride_m,swing_time_s\n");
        for s in &self.steps {
            let swing = s.swing_time_s.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.event_index, s.frame, s.time_s, s.foot, s.stride_m, swing
            ));
        }
        out
    }
}
