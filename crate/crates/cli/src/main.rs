use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gaitpipe::config::{Bucket, Format, RunConfig};
use gaitpipe::run::{run_analyze, run_batch, run_eval, run_synth};
use gaitpipe::CliError;
use gaitpipe_core::Plane;

#[derive(Parser)]
#[command(
    name = "gaitpipe",
    version,
    about = "Step detection and gait parameters from 3D skeleton sequences"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze one input file into a gait report (JSON + CSV, optional SVG plot)
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Analyze many inputs (glob patterns) and aggregate a long-term summary
    Batch {
        #[arg(required = true)]
        inputs: Vec<String>,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Generate a synthetic gait clip plus ground truth from a scenario JSON
    Synth {
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Output pose format (pose-jsonl or kinect-skeleton)
        #[arg(long, default_value = "pose-jsonl")]
        format: Format,
    },
    /// Score predicted reports against ground truth; args are PRED,TRUTH pairs
    Eval {
        #[arg(required = true)]
        pairs: Vec<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct CommonOpts {
    /// Key-value config file; CLI flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input format (kinect-skeleton or pose-jsonl); default from extension
    #[arg(long)]
    format: Option<Format>,
    /// Frame rate metadata for formats without timestamps
    #[arg(long)]
    fps: Option<f64>,
    /// Threshold fraction of the extrema range, in (0, 1)
    #[arg(long)]
    alpha: Option<f64>,
    /// Uniform smoothing kernel width in frames (odd)
    #[arg(long)]
    kernel_width: Option<usize>,
    /// Walking plane: xy, xz or yz
    #[arg(long)]
    plane: Option<Plane>,
    /// Minimum surviving maxima for a clip to count as walking
    #[arg(long)]
    min_steps: Option<usize>,
    /// Minimum joint confidence for a foot position
    #[arg(long)]
    min_confidence: Option<f64>,
    /// Camera config for back-projecting image-space inputs
    #[arg(long)]
    camera: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a distance-curve SVG per clip
    #[arg(long)]
    plots: bool,
    /// Analyze this track id instead of the longest track
    #[arg(long)]
    track: Option<String>,
    #[arg(long)]
    min_track_frames: Option<usize>,
    #[arg(long)]
    max_gap_frames: Option<usize>,
    #[arg(long)]
    min_height: Option<f64>,
    #[arg(long)]
    max_height: Option<f64>,
    #[arg(long)]
    max_width: Option<f64>,
    #[arg(long)]
    max_centroid_jump: Option<f64>,
    /// Disable the skeleton-dimension filter
    #[arg(long)]
    no_dimension_filter: bool,
    /// Disable the temporal-consistency filter
    #[arg(long)]
    no_temporal_filter: bool,
    /// Read step width from the smoothed curve instead of the raw one
    #[arg(long)]
    width_from_smoothed: bool,
    /// Aggregation period for batch summaries: day, week or month
    #[arg(long)]
    bucket: Option<Bucket>,
}

impl CommonOpts {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(v) = self.format {
            cfg.format = Some(v);
        }
        if let Some(v) = self.fps {
            cfg.fps = v;
        }
        if let Some(v) = self.alpha {
            cfg.detector.alpha = v;
        }
        if let Some(v) = self.kernel_width {
            cfg.detector.kernel_width = v;
        }
        if let Some(v) = self.plane {
            cfg.detector.plane = v;
        }
        if let Some(v) = self.min_steps {
            cfg.detector.min_steps = v;
        }
        if let Some(v) = self.min_confidence {
            cfg.detector.feet.min_confidence = v;
        }
        if let Some(v) = self.camera {
            cfg.camera = Some(v);
        }
        if let Some(v) = self.out {
            cfg.out_dir = v;
        }
        if self.plots {
            cfg.emit_plots = true;
        }
        if let Some(v) = self.track {
            cfg.track = Some(v);
        }
        if let Some(v) = self.min_track_frames {
            cfg.filter.min_track_frames = v;
        }
        if let Some(v) = self.max_gap_frames {
            cfg.filter.max_gap_frames = v;
        }
        if let Some(v) = self.min_height {
            cfg.filter.min_height_m = v;
        }
        if let Some(v) = self.max_height {
            cfg.filter.max_height_m = v;
        }
        if let Some(v) = self.max_width {
            cfg.filter.max_width_m = v;
        }
        if let Some(v) = self.max_centroid_jump {
            cfg.filter.max_centroid_jump_m = v;
        }
        if self.no_dimension_filter {
            cfg.filter.dimension_filter = false;
        }
        if self.no_temporal_filter {
            cfg.filter.temporal_filter = false;
        }
        if self.width_from_smoothed {
            cfg.width_from_smoothed = true;
        }
        if let Some(v) = self.bucket {
            cfg.bucket = v;
        }
        cfg.detector.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into())
}

fn real_main() -> Result<(), CliError> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit 2; usage errors are exit 1 here
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match cli.cmd {
        Cmd::Analyze { input, opts } => {
            let cfg = opts.into_config()?;
            let outcome = run_analyze(&input, &cfg)?;
            println!(
                "{}: steps {} speed {} m/s -> {}",
                input.display(),
                outcome.report.n_steps,
                fmt_opt(outcome.report.speed_mps),
                outcome.written[0].display()
            );
            Ok(())
        }
        Cmd::Batch { inputs, opts } => {
            let cfg = opts.into_config()?;
            let outcome = run_batch(&inputs, &cfg)?;
            println!(
                "analyzed {} of {} inputs across {} periods -> {}",
                outcome.summary.n_analyzed,
                outcome.summary.n_inputs,
                outcome.summary.periods.len(),
                cfg.out_dir.join("summary.json").display()
            );
            for failure in &outcome.summary.failures {
                eprintln!("failed: {}: {}", failure.input, failure.error);
            }
            if outcome.all_failed {
                return Err(CliError::input(
                    std::path::Path::new("batch"),
                    "all inputs failed",
                ));
            }
            Ok(())
        }
        Cmd::Synth { scenario, out, format } => {
            let (data, truth) = run_synth(&scenario, &out, format)?;
            println!("wrote {} and {}", data.display(), truth.display());
            Ok(())
        }
        Cmd::Eval { pairs, out } => {
            let result = run_eval(&pairs, &out)?;
            println!(
                "{} clips: count accuracy {:.3}, mean frame error {:.3} ({:.4} s) -> {}",
                result.n_clips,
                result.count_accuracy,
                result.mean_frame_error,
                result.mean_time_error_s,
                out.join("eval.json").display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
