//! End-to-end processing: crop → threshold → smooth → curvature → classify
//! → detect, driven by one [`PipelineConfig`].
//!
//! The configuration has a flat `key=value` text form (one pair per line,
//! `#` starts a comment) whose keys match the command-line flag names.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{classify, compute_curvature_field_with_pitch, ClassMap, ClassifyParams, CurvatureField};
use crate::landmarks::{detect_landmarks, intensity_map, DetectionParams, IntensityMap, LandmarkResult};
use crate::preprocess::{apply_threshold, gaussian_smooth, otsu_threshold, SmoothingParams};
use crate::quadfit::FitWindow;
use crate::rangeio::{crop, CropRect, RangeImage};

/// Crop applied before anything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CropSpec {
    /// Explicit rectangle.
    Rect(CropRect),
    /// `rows x cols` window centered in the image (clamped to the image).
    Center { rows: usize, cols: usize },
}

impl CropSpec {
    pub fn resolve(&self, img: &RangeImage) -> CropRect {
        match *self {
            CropSpec::Rect(r) => r,
            CropSpec::Center { rows, cols } => CropRect::centered(img.height(), img.width(), rows, cols),
        }
    }
}

impl fmt::Display for CropSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CropSpec::Rect(r) => write!(f, "{},{},{},{}", r.row0, r.col0, r.rows, r.cols),
            CropSpec::Center { rows, cols } => write!(f, "center:{rows}x{cols}"),
        }
    }
}

/// Parses `none`, `center:RxC` or `r0,c0,rows,cols`.
pub fn parse_crop(s: &str) -> Result<Option<CropSpec>, ConfigError> {
    let s = s.trim();
    let err = || ConfigError::BadValue {
        key: "crop".into(),
        value: s.into(),
    };
    if s.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    if let Some(rest) = s.strip_prefix("center:") {
        let (r, c) = rest.split_once('x').ok_or_else(err)?;
        let rows: usize = r.trim().parse().map_err(|_| err())?;
        let cols: usize = c.trim().parse().map_err(|_| err())?;
        if rows == 0 || cols == 0 {
            return Err(err());
        }
        return Ok(Some(CropSpec::Center { rows, cols }));
    }
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| err())?;
    match parts[..] {
        [r0, c0, rows, cols] if rows > 0 && cols > 0 => Ok(Some(CropSpec::Rect(CropRect::new(r0, c0, rows, cols)))),
        _ => Err(err()),
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("line {0}: expected `key=value`")]
    Syntax(usize),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read config file: {0}")]
    Io(String),
}

/// Every tunable of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub crop: Option<CropSpec>,
    pub threshold: bool,
    pub otsu_bins: usize,
    pub smooth: bool,
    pub smoothing: SmoothingParams,
    pub fit: FitWindow,
    pub pixel_pitch: f64,
    pub classify: ClassifyParams,
    pub detect: DetectionParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            crop: None,
            threshold: true,
            otsu_bins: 256,
            smooth: true,
            smoothing: SmoothingParams::default(),
            fit: FitWindow::default(),
            pixel_pitch: 1.0,
            classify: ClassifyParams::default(),
            detect: DetectionParams::default(),
        }
    }
}

/// Keys of the text form, in output order.
pub const CONFIG_KEYS: &[&str] = &[
    "crop",
    "threshold",
    "otsu-bins",
    "smooth",
    "sigma",
    "radius",
    "fit-window",
    "pixel-pitch",
    "eps-h",
    "eps-k",
    "k-threshold",
    "top-n-nose",
    "min-separation",
    "border-margin",
];

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::BadValue {
            key: key.into(),
            value: value.into(),
        }),
    }
}

impl PipelineConfig {
    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "crop" => self.crop = parse_crop(value)?,
            "threshold" => self.threshold = parse_bool(key, value)?,
            "otsu-bins" => self.otsu_bins = parse_num(key, value)?,
            "smooth" => self.smooth = parse_bool(key, value)?,
            "sigma" => self.smoothing.sigma = parse_num(key, value)?,
            "radius" => self.smoothing.radius = parse_num(key, value)?,
            "fit-window" => self.fit.half_width = parse_num(key, value)?,
            "pixel-pitch" => self.pixel_pitch = parse_num(key, value)?,
            "eps-h" => self.classify.eps_h = parse_num(key, value)?,
            "eps-k" => self.classify.eps_k = parse_num(key, value)?,
            "k-threshold" => self.detect.k_threshold = parse_num(key, value)?,
            "top-n-nose" => self.detect.top_n_nose = parse_num(key, value)?,
            "min-separation" => self.detect.min_separation = parse_num(key, value)?,
            "border-margin" => self.detect.border_margin = parse_num(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.into())),
        }
        Ok(())
    }

    /// Text value of one key.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "crop" => self.crop.map_or_else(|| "none".to_string(), |c| c.to_string()),
            "threshold" => self.threshold.to_string(),
            "otsu-bins" => self.otsu_bins.to_string(),
            "smooth" => self.smooth.to_string(),
            "sigma" => self.smoothing.sigma.to_string(),
            "radius" => self.smoothing.radius.to_string(),
            "fit-window" => self.fit.half_width.to_string(),
            "pixel-pitch" => self.pixel_pitch.to_string(),
            "eps-h" => self.classify.eps_h.to_string(),
            "eps-k" => self.classify.eps_k.to_string(),
            "k-threshold" => self.detect.k_threshold.to_string(),
            "top-n-nose" => self.detect.top_n_nose.to_string(),
            "min-separation" => self.detect.min_separation.to_string(),
            "border-margin" => self.detect.border_margin.to_string(),
            _ => return None,
        })
    }

    /// Applies `key=value` lines on top of `self`.
    pub fn merge_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax(n + 1))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.merge_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn to_text(&self) -> String {
        CONFIG_KEYS
            .iter()
            .map(|k| format!("{k}={}\n", self.get(k).expect("all listed keys are known")))
            .collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let inv = |m: String| Err(ConfigError::Invalid(m));
        if self.otsu_bins < 2 {
            return inv(format!("otsu-bins must be >= 2, got {}", self.otsu_bins));
        }
        if self.smoothing.validate().is_err() {
            return inv(format!(
                "sigma must be > 0 and radius >= 1, got sigma={} radius={}",
                self.smoothing.sigma, self.smoothing.radius
            ));
        }
        if self.fit.half_width < 1 {
            return inv("fit-window must be >= 1".into());
        }
        if !(self.pixel_pitch.is_finite() && self.pixel_pitch > 0.0) {
            return inv(format!("pixel-pitch must be > 0, got {}", self.pixel_pitch));
        }
        if !(self.classify.eps_h >= 0.0 && self.classify.eps_k >= 0.0) {
            return inv("eps-h and eps-k must be >= 0".into());
        }
        self.detect.validate().map_err(ConfigError::Invalid)
    }
}

/// Pipeline stage names, as reported in errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Load,
    Crop,
    Threshold,
    Smooth,
    Curvature,
    Detect,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("stage serializes");
        f.write_str(s.as_str().expect("stage is a string"))
    }
}

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("{stage} stage failed ({code}): {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub code: String,
    pub message: String,
}

impl PipelineError {
    pub fn new(stage: Stage, code: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            stage,
            code: code.into(),
            message: message.to_string(),
        }
    }

    /// 2: unreadable input, 3: processing or detection failure, 4: bad configuration.
    pub fn exit_code(&self) -> i32 {
        match self.stage {
            Stage::Load => 2,
            Stage::Config | Stage::Crop => 4,
            _ => 3,
        }
    }
}

/// Intermediate products of one run.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Image after crop, threshold and smoothing.
    pub image: RangeImage,
    /// Otsu threshold, when thresholding ran.
    pub threshold: Option<f64>,
    pub field: CurvatureField,
    pub classes: ClassMap,
    pub intensity: IntensityMap,
}

/// Runs every stage up to classification.
pub fn analyze(img: &RangeImage, cfg: &PipelineConfig) -> Result<PipelineOutput, PipelineError> {
    cfg.validate()
        .map_err(|e| PipelineError::new(Stage::Config, "InvalidConfig", e))?;

    let mut cur = match cfg.crop {
        Some(spec) => {
            let rect = spec.resolve(img);
            crop(img, &rect).map_err(|e| PipelineError::new(Stage::Crop, "RectOutOfBounds", e))?
        }
        None => img.clone(),
    };

    let mut threshold = None;
    if cfg.threshold {
        let t = otsu_threshold(&cur, cfg.otsu_bins)
            .map_err(|e| PipelineError::new(Stage::Threshold, "DegenerateHistogram", e))?;
        cur = apply_threshold(&cur, t);
        threshold = Some(t);
    }

    if cfg.smooth {
        cur = gaussian_smooth(&cur, &cfg.smoothing)
            .map_err(|e| PipelineError::new(Stage::Smooth, "BadSmoothing", e))?;
    }

    let field = compute_curvature_field_with_pitch(&cur, cfg.fit, cfg.pixel_pitch)
        .map_err(|e| PipelineError::new(Stage::Curvature, "BadFit", e))?;
    let classes = classify(&field, &cfg.classify);
    let intensity = intensity_map(&cur).map_err(|e| PipelineError::new(Stage::Detect, e.code(), e))?;
    Ok(PipelineOutput {
        image: cur,
        threshold,
        field,
        classes,
        intensity,
    })
}

/// Full pipeline including landmark detection.
pub fn detect(img: &RangeImage, cfg: &PipelineConfig) -> Result<(PipelineOutput, LandmarkResult), PipelineError> {
    let out = analyze(img, cfg)?;
    let res = detect_landmarks(&out.field, &out.classes, &out.intensity, &cfg.detect)
        .map_err(|e| PipelineError::new(Stage::Detect, e.code(), e))?;
    Ok((out, res))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut cfg = PipelineConfig {
            crop: Some(CropSpec::Rect(CropRect::new(1, 2, 30, 40))),
            ..Default::default()
        };
        cfg.smoothing.sigma = 1.25;
        cfg.detect.k_threshold = 3.3e-5;
        cfg.threshold = false;
        let back = PipelineConfig::from_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);

        cfg.crop = Some(CropSpec::Center { rows: 70, cols: 70 });
        assert_eq!(PipelineConfig::from_text(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            PipelineConfig::from_text("bogus=1"),
            Err(ConfigError::UnknownKey("bogus".into()))
        );
        assert!(matches!(
            PipelineConfig::from_text("sigma=abc"),
            Err(ConfigError::BadValue { .. })
        ));
        assert_eq!(PipelineConfig::from_text("\n# note\nsigma"), Err(ConfigError::Syntax(3)));
        assert!(matches!(
            PipelineConfig::from_text("sigma=0"),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(
            PipelineConfig::from_text("top-n-nose=0"),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn comments_and_partial_files() {
        let cfg = PipelineConfig::from_text("# defaults otherwise\nsigma = 2.0  # wider\ncrop=center:70x70\n").unwrap();
        assert_eq!(cfg.smoothing.sigma, 2.0);
        assert_eq!(cfg.crop, Some(CropSpec::Center { rows: 70, cols: 70 }));
        assert_eq!(cfg.smoothing.radius, 2);
    }

    #[test]
    fn crop_specs() {
        assert_eq!(parse_crop("none").unwrap(), None);
        assert_eq!(
            parse_crop("15,15,70,70").unwrap(),
            Some(CropSpec::Rect(CropRect::new(15, 15, 70, 70)))
        );
        assert!(parse_crop("1,2,3").is_err());
        assert!(parse_crop("1,2,0,3").is_err());
        assert!(parse_crop("center:0x4").is_err());
    }

    #[test]
    fn stage_errors_carry_exit_codes() {
        let flat = RangeImage::from_fn(20, 20, |_, _| 1.0);
        let err = analyze(&flat, &PipelineConfig::default()).unwrap_err();
        assert_eq!(err.stage, Stage::Threshold);
        assert_eq!(err.exit_code(), 3);

        let cfg = PipelineConfig {
            crop: Some(CropSpec::Rect(CropRect::new(10, 10, 20, 20))),
            ..Default::default()
        };
        let err = analyze(&flat, &cfg).unwrap_err();
        assert_eq!((err.stage, err.exit_code()), (Stage::Crop, 4));

        // A tilted plane survives thresholding but has no curved points.
        let ramp = RangeImage::from_fn(20, 20, |_, c| c as f64);
        let err = detect(&ramp, &PipelineConfig::default()).unwrap_err();
        assert_eq!((err.stage, err.code.as_str()), (Stage::Detect, "NoCandidates"));
        assert_eq!(Stage::Detect.to_string(), "detect");
    }
}
