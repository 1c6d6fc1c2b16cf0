//! Run configuration: defaults, optional key-value config file, CLI
//! flag overrides (flags win over file values).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use gaitpipe_core::ingest::parse_key_values;
use gaitpipe_core::{DetectorParams, FilterParams, Plane};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    KinectSkeleton,
    PoseJsonl,
}

impl Format {
    pub fn from_extension(path: &std::path::Path) -> Option<Format> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") => Some(Format::PoseJsonl),
            Some("txt") | Some("skel") => Some(Format::KinectSkeleton),
            _ => None,
        }
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Format, String> {
        match s {
            "kinect-skeleton" => Ok(Format::KinectSkeleton),
            "pose-jsonl" => Ok(Format::PoseJsonl),
            other => Err(format!(
                "unknown format {other:?} (expected kinect-skeleton or pose-jsonl)"
            )),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Format::KinectSkeleton => write!(f, "kinect-skeleton"),
            Format::PoseJsonl => write!(f, "pose-jsonl"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bucket {
    Day,
    Week,
    Month,
}

impl FromStr for Bucket {
    type Err = String;
    fn from_str(s: &str) -> Result<Bucket, String> {
        match s {
            "day" => Ok(Bucket::Day),
            "week" => Ok(Bucket::Week),
            "month" => Ok(Bucket::Month),
            other => Err(format!("unknown bucket {other:?} (expected day, week or month)")),
        }
    }
}

/// Everything a run needs; mirrored by the config file keys.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub format: Option<Format>,
    pub fps: f64,
    pub out_dir: PathBuf,
    pub emit_plots: bool,
    pub camera: Option<PathBuf>,
    pub track: Option<String>,
    pub detector: DetectorParams,
    pub filter: FilterParams,
    pub width_from_smoothed: bool,
    pub bucket: Bucket,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            format: None,
            fps: 30.0,
            out_dir: PathBuf::from("."),
            emit_plots: false,
            camera: None,
            track: None,
            detector: DetectorParams::default(),
            filter: FilterParams::default(),
            width_from_smoothed: false,
            bucket: Bucket::Day,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Config(format!("config key {key}: {e} (value {value:?})")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(CliError::Config(format!("config key {key}: expected a boolean, got {other:?}"))),
    }
}

impl RunConfig {
    /// Applies a config file over the defaults.
    pub fn apply_file(&mut self, path: &std::path::Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let pairs = parse_key_values(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        for (key, value) in pairs {
            match key.as_str() {
                "format" => {
                    self.format =
                        Some(value.parse::<Format>().map_err(CliError::Config)?)
                }
                "fps" => self.fps = parse_value(&key, &value)?,
                "out_dir" => self.out_dir = PathBuf::from(value),
                "emit_plots" => self.emit_plots = parse_bool(&key, &value)?,
                "camera" => self.camera = Some(PathBuf::from(value)),
                "track" => self.track = Some(value),
                "alpha" => self.detector.alpha = parse_value(&key, &value)?,
                "kernel_width" => self.detector.kernel_width = parse_value(&key, &value)?,
                "plane" => {
                    self.detector.plane = Plane::from_str(&value)
                        .map_err(|e| CliError::Config(format!("config key plane: {e}")))?
                }
                "min_steps" => self.detector.min_steps = parse_value(&key, &value)?,
                "min_confidence" => {
                    self.detector.feet.min_confidence = parse_value(&key, &value)?
                }
                "min_track_frames" => self.filter.min_track_frames = parse_value(&key, &value)?,
                "max_gap_frames" => self.filter.max_gap_frames = parse_value(&key, &value)?,
                "min_height_m" => self.filter.min_height_m = parse_value(&key, &value)?,
                "max_height_m" => self.filter.max_height_m = parse_value(&key, &value)?,
                "max_width_m" => self.filter.max_width_m = parse_value(&key, &value)?,
                "max_centroid_jump_m" => {
                    self.filter.max_centroid_jump_m = parse_value(&key, &value)?
                }
                "dimension_filter" => self.filter.dimension_filter = parse_bool(&key, &value)?,
                "temporal_filter" => self.filter.temporal_filter = parse_bool(&key, &value)?,
                "width_from_smoothed" => self.width_from_smoothed = parse_bool(&key, &value)?,
                "bucket" => self.bucket = value.parse::<Bucket>().map_err(CliError::Config)?,
                other => {
                    return Err(CliError::Config(format!("unknown config key {other:?}")));
                }
            }
        }
        Ok(())
    }
}
