//! Orchestration for the analyze / batch / synth / eval subcommands.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use gaitpipe_core::detect::{compute_distance_signal, detect_steps_on_signal, DistanceSignal};
use gaitpipe_core::ingest::{
    back_project, parse_camera_config, parse_kinect_skeleton, parse_pose_jsonl,
    write_kinect_skeleton, write_pose_jsonl, ImageJoint, ImagePose,
};
use gaitpipe_core::metrics::assign_feet;
use gaitpipe_core::synth::{generate, GaitScenario, SyntheticGroundTruth};
use gaitpipe_core::{
    compute_gait_report, evaluate, filter, foot_positions, ClipEval, Error, GaitReport,
    PoseSequence, StepDetectionResult,
};

use crate::config::{Format, RunConfig};
use crate::report::ReportFile;
use crate::summary::{summarize, ClipStats, FailureEntry, LongTermSummary};
use crate::svg::render_distance_svg;
use crate::CliError;

pub struct AnalyzeOutcome {
    pub report: ReportFile,
    pub signal: Option<DistanceSignal>,
    pub detection: Option<StepDetectionResult>,
    pub start_time_s: Option<f64>,
    pub written: Vec<PathBuf>,
}

fn input_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::input(path, e.to_string())
}

fn load_sequences(path: &Path, cfg: &RunConfig) -> Result<Vec<PoseSequence>, CliError> {
    let format = cfg
        .format
        .or_else(|| Format::from_extension(path))
        .ok_or_else(|| {
            CliError::Config(format!(
                "cannot infer format of {} from its extension; pass --format",
                path.display()
            ))
        })?;
    let file = fs::File::open(path).map_err(|e| input_err(path, e))?;
    let reader = BufReader::new(file);
    let source_id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input").to_string();
    let seqs = match format {
        Format::KinectSkeleton => {
            vec![parse_kinect_skeleton(reader, cfg.fps, &source_id).map_err(|e| input_err(path, e))?]
        }
        Format::PoseJsonl => parse_pose_jsonl(reader, cfg.fps).map_err(|e| input_err(path, e))?,
    };
    match &cfg.camera {
        None => Ok(seqs),
        Some(camera_path) => {
            let text = fs::read_to_string(camera_path).map_err(|e| {
                CliError::Config(format!("cannot read camera config {}: {e}", camera_path.display()))
            })?;
            let (intr, extr) = parse_camera_config(&text)
                .map_err(|e| CliError::Config(format!("camera config {}: {e}", camera_path.display())))?;
            // joints arrive as (u px, v px, depth m); back-project to world
            seqs.into_iter()
                .map(|seq| {
                    let frames = seq
                        .frames()
                        .iter()
                        .map(|f| {
                            let pose = ImagePose {
                                frame_index: f.frame_index,
                                timestamp: f.timestamp,
                                joints: f
                                    .joints()
                                    .iter()
                                    .map(|j| ImageJoint {
                                        kind: j.kind.clone(),
                                        u: j.position.x,
                                        v: j.position.y,
                                        depth: j.position.z,
                                        confidence: j.confidence,
                                    })
                                    .collect(),
                            };
                            back_project(&pose, &intr, &extr)
                        })
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| input_err(path, e))?;
                    PoseSequence::new(frames, seq.frame_rate_hz(), seq.source_id.clone())
                        .map_err(|e| input_err(path, e))
                })
                .collect()
        }
    }
}

fn select_track(
    path: &Path,
    seqs: Vec<PoseSequence>,
    cfg: &RunConfig,
) -> Result<PoseSequence, CliError> {
    let tracks = if cfg.filter.temporal_filter {
        filter::filter_temporal(&seqs, &cfg.filter)
    } else {
        seqs
    };
    if let Some(wanted) = &cfg.track {
        return tracks
            .into_iter()
            .find(|t| &t.source_id == wanted)
            .ok_or_else(|| input_err(path, format!("no track {wanted:?} in input")));
    }
    tracks
        .into_iter()
        .max_by_key(PoseSequence::len)
        .ok_or_else(|| input_err(path, "no usable track after filtering"))
}

/// Parses one input, runs the filter and detection pipeline, and builds
/// the report. A clip with no detectable steps is a normal outcome, not
/// an error: the report carries `n_steps: 0` and absent gait fields.
pub fn analyze_path(path: &Path, cfg: &RunConfig) -> Result<AnalyzeOutcome, CliError> {
    let seqs = load_sequences(path, cfg)?;
    let track = select_track(path, seqs, cfg)?;
    let track = if cfg.filter.dimension_filter {
        filter::filter_dimensions(&track, &cfg.filter, cfg.detector.plane)
    } else {
        track
    };
    let repaired = filter::interpolate_gaps(&track, &cfg.filter);
    let seq = repaired.sequence;
    let source = seq.source_id.clone();
    let start_time_s = seq.frames().first().map(|f| f.timestamp);

    let signal = compute_distance_signal(&seq, &cfg.detector).map_err(|e| input_err(path, e))?;
    match detect_steps_on_signal(&signal, &cfg.detector) {
        Ok(detection) => {
            let tracks = foot_positions(&seq, &cfg.detector.feet).map_err(|e| input_err(path, e))?;
            let left: Vec<_> = tracks.left.iter().map(|p| p.expect("gap repair fills feet")).collect();
            let right: Vec<_> = tracks.right.iter().map(|p| p.expect("gap repair fills feet")).collect();
            let ts = seq.timestamps();
            let events = assign_feet(&detection, &left, &right, &ts, cfg.detector.plane);
            let mut minima: Vec<_> = detection.minima().copied().collect();
            if cfg.width_from_smoothed {
                for m in &mut minima {
                    m.value = signal.smoothed[m.frame];
                }
            }
            let report = compute_gait_report(&events, &minima, cfg.detector.plane);
            let file = ReportFile::new(source, &report, Some(&detection), &cfg.detector);
            Ok(AnalyzeOutcome {
                report: file,
                signal: Some(signal),
                detection: Some(detection),
                start_time_s,
                written: Vec::new(),
            })
        }
        Err(Error::NoStepsDetected { .. }) => {
            let file = ReportFile::new(source, &GaitReport::empty(), None, &cfg.detector);
            Ok(AnalyzeOutcome {
                report: file,
                signal: Some(signal),
                detection: None,
                start_time_s,
                written: Vec::new(),
            })
        }
        Err(e) => Err(input_err(path, e)),
    }
}

fn write_outputs(path: &Path, cfg: &RunConfig, outcome: &mut AnalyzeOutcome) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", cfg.out_dir.display())))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
    let report_path = cfg.out_dir.join(format!("{stem}.report.json"));
    fs::write(&report_path, outcome.report.to_json()).map_err(|e| input_err(path, e))?;
    outcome.written.push(report_path);
    let csv_path = cfg.out_dir.join(format!("{stem}.steps.csv"));
    fs::write(&csv_path, outcome.report.steps_csv()).map_err(|e| input_err(path, e))?;
    outcome.written.push(csv_path);
    if cfg.emit_plots {
        if let Some(signal) = &outcome.signal {
            let svg = render_distance_svg(&outcome.report.source, signal, outcome.detection.as_ref());
            let svg_path = cfg.out_dir.join(format!("{stem}.distance.svg"));
            fs::write(&svg_path, svg).map_err(|e| input_err(path, e))?;
            outcome.written.push(svg_path);
        }
    }
    Ok(())
}

/// `analyze` on one input: pipeline plus report/CSV/SVG files.
pub fn run_analyze(path: &Path, cfg: &RunConfig) -> Result<AnalyzeOutcome, CliError> {
    let mut outcome = analyze_path(path, cfg)?;
    write_outputs(path, cfg, &mut outcome)?;
    Ok(outcome)
}

pub struct BatchOutcome {
    pub summary: LongTermSummary,
    pub all_failed: bool,
}

/// `batch` over a set of glob patterns: per-clip analysis in parallel,
/// then a deterministic aggregation independent of processing order.
pub fn run_batch(patterns: &[String], cfg: &RunConfig) -> Result<BatchOutcome, CliError> {
    let mut inputs: Vec<PathBuf> = Vec::new();
    for pattern in patterns {
        let matched = glob::glob(pattern)
            .map_err(|e| CliError::Config(format!("bad glob {pattern:?}: {e}")))?
            .filter_map(|m| m.ok());
        let before = inputs.len();
        inputs.extend(matched);
        if inputs.len() == before {
            let literal = PathBuf::from(pattern);
            if literal.exists() {
                inputs.push(literal);
            }
        }
    }
    inputs.sort();
    inputs.dedup();
    if inputs.is_empty() {
        return Err(CliError::Config(format!("no inputs match {patterns:?}")));
    }

    let results: Vec<(PathBuf, Result<AnalyzeOutcome, CliError>)> = inputs
        .par_iter()
        .map(|path| (path.clone(), run_analyze(path, cfg)))
        .collect();

    let mut clips = Vec::new();
    let mut failures = Vec::new();
    for (path, result) in &results {
        match result {
            Ok(outcome) => clips.push(ClipStats {
                input: path.display().to_string(),
                start_time_s: outcome.start_time_s.unwrap_or(0.0),
                n_steps: outcome.report.n_steps,
                speed_mps: outcome.report.speed_mps,
                asymmetry_index: outcome.report.asymmetry_index,
            }),
            Err(e) => failures.push(FailureEntry {
                input: path.display().to_string(),
                error: e.to_string(),
            }),
        }
    }
    let all_failed = clips.is_empty();
    let summary = summarize(clips, failures, cfg.bucket);
    fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", cfg.out_dir.display())))?;
    fs::write(cfg.out_dir.join("summary.json"), summary.to_json())
        .map_err(|e| CliError::Config(format!("cannot write summary: {e}")))?;
    fs::write(cfg.out_dir.join("summary.csv"), summary.to_csv())
        .map_err(|e| CliError::Config(format!("cannot write summary: {e}")))?;
    Ok(BatchOutcome { summary, all_failed })
}

/// `synth`: generate a scenario into a pose file plus ground-truth JSON.
pub fn run_synth(
    scenario_path: &Path,
    out_dir: &Path,
    format: Format,
) -> Result<(PathBuf, PathBuf), CliError> {
    let text = fs::read_to_string(scenario_path).map_err(|e| {
        CliError::Config(format!("cannot read scenario {}: {e}", scenario_path.display()))
    })?;
    let scenario: GaitScenario = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("scenario {}: {e}", scenario_path.display())))?;
    if scenario.dropout_prob > 0.0 && format == Format::KinectSkeleton {
        return Err(CliError::Config(
            "the fixed-layout kinect format cannot represent dropped joints; use pose-jsonl".into(),
        ));
    }
    let (seq, truth) = generate(&scenario).map_err(|e| CliError::Config(e.to_string()))?;

    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out_dir.display())))?;
    let stem = scenario_path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    let data_path = match format {
        Format::PoseJsonl => {
            let p = out_dir.join(format!("{stem}.jsonl"));
            let mut buf = Vec::new();
            write_pose_jsonl(&seq, &mut buf).map_err(|e| input_err(&p, e))?;
            fs::write(&p, buf).map_err(|e| input_err(&p, e))?;
            p
        }
        Format::KinectSkeleton => {
            let p = out_dir.join(format!("{stem}.txt"));
            let mut buf = Vec::new();
            write_kinect_skeleton(&seq, &mut buf).map_err(|e| input_err(&p, e))?;
            fs::write(&p, buf).map_err(|e| input_err(&p, e))?;
            p
        }
    };
    let truth_path = out_dir.join(format!("{stem}.truth.json"));
    let mut json = serde_json::to_string_pretty(&truth).expect("truth serializes");
    json.push('\n');
    fs::write(&truth_path, json).map_err(|e| input_err(&truth_path, e))?;
    Ok((data_path, truth_path))
}

/// `eval`: score predicted reports against ground-truth files.
pub fn run_eval(pairs: &[String], out_dir: &Path) -> Result<gaitpipe_core::EvalResult, CliError> {
    let mut clips = Vec::new();
    for pair in pairs {
        let (pred, truth) = pair.split_once(',').ok_or_else(|| {
            CliError::Config(format!("expected PRED,TRUTH but got {pair:?}"))
        })?;
        let pred_path = Path::new(pred);
        let truth_path = Path::new(truth);
        let report = ReportFile::load(pred_path)?;
        let text = fs::read_to_string(truth_path).map_err(|e| input_err(truth_path, e))?;
        let truth: SyntheticGroundTruth =
            serde_json::from_str(&text).map_err(|e| input_err(truth_path, e))?;
        let id = pred_path
            .file_name()
            .and_then(|s| s.to_str())
            .unwrap_or("clip")
            .trim_end_matches(".report.json")
            .to_string();
        clips.push(ClipEval {
            id,
            predicted: report.steps.iter().map(|s| s.frame).collect(),
            truth: truth.step_frames,
            frame_rate_hz: truth.frame_rate_hz,
        });
    }
    let result = evaluate(&clips).map_err(|e| CliError::Config(e.to_string()))?;

    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut json = serde_json::to_string_pretty(&result).expect("eval serializes");
    json.push('\n');
    fs::write(out_dir.join("eval.json"), json)
        .map_err(|e| CliError::Config(format!("cannot write eval.json: {e}")))?;
    let mut csv =
        String::from("id,predicted_count,true_count,n_matched,mean_frame_error,unmatched\n");
    for c in &result.per_clip {
        let mean = if c.frame_errors.is_empty() {
            String::new()
        } else {
            (c.frame_errors.iter().sum::<f64>() / c.frame_errors.len() as f64).to_string()
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.id,
            c.predicted_count,
            c.true_count,
            c.frame_errors.len(),
            mean,
            c.unmatched
        ));
    }
    fs::write(out_dir.join("eval_clips.csv"), csv)
        .map_err(|e| CliError::Config(format!("cannot write eval_clips.csv: {e}")))?;
    Ok(result)
}
