//! Command-line front end: `detect`, `classify-map`, `synth` and `eval`.
//!
//! Exit codes: 0 success, 2 input error, 3 detection failure, 4 config error.
//! Failures print a JSON object with `stage`, `code` and `message` on stdout.
//! Option values come from flags first, then `--config`, then defaults.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::curvature::{segment_regions, HkClass};
use crate::eval::{evaluate, standard_poses, EvalSettings};
use crate::landmarks::LandmarkResult;
use crate::pipeline::{analyze, detect, ConfigError, PipelineConfig, PipelineError, Stage};
use crate::rangeio::{load_range_image, save_range_image, write_pgm8, RangeFormat, RangeImage, RangeIoError};
use crate::synth::{
    add_depth_noise, make_phantom, make_surface, rotate_and_rasterize, rotate_with_truth, Axis, FacePhantom,
    PoseSpec, SurfaceKind, Truth,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DETECT: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "rangeface", version, about = "Curvature-based landmark detection on range images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect the nose tip and eye corners in a range image or a directory of them.
    Detect(DetectArgs),
    /// Write an 8-bit HK classification map.
    ClassifyMap(ClassifyMapArgs),
    /// Generate an analytic surface or a face phantom.
    Synth(SynthArgs),
    /// Run the pose sweep over seeded phantoms.
    Eval(EvalArgs),
}

/// Pipeline options shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct PipelineFlags {
    /// Flat `key=value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `r0,c0,rows,cols`, `center:RxC` or `none`.
    #[arg(long)]
    pub crop: Option<String>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Gaussian kernel half-width.
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long)]
    pub otsu_bins: Option<usize>,
    /// Skip Otsu background removal.
    #[arg(long)]
    pub no_threshold: bool,
    /// Skip Gaussian smoothing.
    #[arg(long)]
    pub no_smooth: bool,
    /// Half-width of the fit window.
    #[arg(long)]
    pub fit_window: Option<usize>,
    #[arg(long)]
    pub pixel_pitch: Option<f64>,
    #[arg(long)]
    pub eps_h: Option<f64>,
    #[arg(long)]
    pub eps_k: Option<f64>,
    #[arg(long)]
    pub k_threshold: Option<f64>,
    #[arg(long)]
    pub top_n_nose: Option<usize>,
    #[arg(long)]
    pub min_separation: Option<f64>,
    /// Radius around a candidate that must be free of holes and edges.
    #[arg(long)]
    pub border_margin: Option<usize>,
}

impl PipelineFlags {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<PipelineConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| ConfigError::Io(format!("{}: {e}", p.display())))?;
                let mut c = PipelineConfig::default();
                c.merge_text(&text)?;
                c
            }
            None => PipelineConfig::default(),
        };
        if let Some(c) = &self.crop {
            cfg.set("crop", c)?;
        }
        if self.no_threshold {
            cfg.threshold = false;
        }
        if self.no_smooth {
            cfg.smooth = false;
        }
        macro_rules! take {
            ($field:ident => $($target:tt)+) => {
                if let Some(v) = self.$field {
                    cfg.$($target)+ = v;
                }
            };
        }
        take!(sigma => smoothing.sigma);
        take!(radius => smoothing.radius);
        take!(otsu_bins => otsu_bins);
        take!(fit_window => fit.half_width);
        take!(pixel_pitch => pixel_pitch);
        take!(eps_h => classify.eps_h);
        take!(eps_k => classify.eps_k);
        take!(k_threshold => detect.k_threshold);
        take!(top_n_nose => detect.top_n_nose);
        take!(min_separation => detect.min_separation);
        take!(border_margin => detect.border_margin);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Ascii,
    Pgm16,
}

impl From<InputFormat> for RangeFormat {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Ascii => RangeFormat::AsciiGrid,
            InputFormat::Pgm16 => RangeFormat::Pgm16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Range image file, or a directory processed as a batch.
    pub input: PathBuf,
    #[command(flatten)]
    pub flags: PipelineFlags,
    /// Input format; guessed from the extension when omitted.
    #[arg(long)]
    pub input_format: Option<InputFormat>,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
    /// Write the result here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyMapArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub flags: PipelineFlags,
    #[arg(long)]
    pub input_format: Option<InputFormat>,
    /// Output PGM path.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Format of the class summary printed on stdout.
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Phantom,
    Plane,
    Hemisphere,
    Cylinder,
    Saddle,
    Paraboloid,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = SynthKind::Phantom)]
    pub kind: SynthKind,
    /// Grid side for analytic surfaces (the phantom is always 128).
    #[arg(long, default_value_t = 101)]
    pub size: usize,
    /// Radius of the hemisphere, cylinder or paraboloid.
    #[arg(long, default_value_t = 50.0)]
    pub surface_radius: f64,
    /// Pose as `AXIS:ANGLE`, e.g. `Y:30` or `X:-15`.
    #[arg(long)]
    pub pose: Option<String>,
    /// Seed for phantom jitter and depth noise. Without it the default
    /// phantom is used unchanged.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    /// Output path; `.pgm` selects 16-bit PGM unless `--out-format` says otherwise.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long)]
    pub out_format: Option<InputFormat>,
    #[command(flatten)]
    pub flags: PipelineFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum EvalFormat {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub flags: PipelineFlags,
    /// `standard`, `frontal`, or a comma list such as `Y:30,Y:-30,X:15`.
    #[arg(long, default_value = "standard")]
    pub poses: String,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = crate::eval::DEFAULT_NOSE_TOLERANCE)]
    pub nose_tolerance: f64,
    #[arg(long, default_value_t = crate::eval::DEFAULT_EYE_TOLERANCE)]
    pub eye_tolerance: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: EvalFormat,
    /// Also write the JSON report here.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
}

/// A failure that ends a subcommand.
#[derive(Debug)]
struct Failure {
    exit: i32,
    body: serde_json::Value,
}

impl Failure {
    fn new(exit: i32, stage: &str, code: &str, message: impl std::fmt::Display) -> Self {
        Self {
            exit,
            body: json!({ "stage": stage, "code": code, "message": message.to_string() }),
        }
    }

    fn config(e: ConfigError) -> Self {
        Self::new(EXIT_CONFIG, "config", "InvalidConfig", e)
    }

    fn pipeline(e: &PipelineError, cfg: &PipelineConfig) -> Self {
        let mut f = Self::new(e.exit_code(), &e.stage.to_string(), &e.code, &e.message);
        f.body["config"] = json!(cfg);
        f
    }

    fn output(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::new(EXIT_INPUT, "output", "WriteFailed", format!("{}: {e}", path.display()))
    }
}

fn io_code(e: &RangeIoError) -> &'static str {
    match e {
        RangeIoError::FileNotFound(_) => "FileNotFound",
        RangeIoError::Io(_) => "Io",
        RangeIoError::ParseError { .. } => "ParseError",
        RangeIoError::DimensionMismatch { .. } => "DimensionMismatch",
        RangeIoError::RectOutOfBounds { .. } => "RectOutOfBounds",
        RangeIoError::InvalidImage(_) => "InvalidImage",
        RangeIoError::Unrepresentable { .. } => "Unrepresentable",
    }
}

fn load(path: &Path, fmt: Option<InputFormat>) -> Result<RangeImage, PipelineError> {
    let fmt = fmt.map_or_else(|| RangeFormat::from_path(path), RangeFormat::from);
    load_range_image(path, fmt).map_err(|e| PipelineError::new(Stage::Load, io_code(&e), e))
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::output(p, e)),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::output(Path::new("<stdout>"), e)),
    }
}

fn landmark_json(file: Option<&Path>, res: &LandmarkResult, cfg: &PipelineConfig) -> serde_json::Value {
    let mut v = json!({ "nose": res.nose, "eyes": res.eyes, "params": res.params, "config": cfg });
    if let Some(f) = file {
        v["file"] = json!(f.display().to_string());
    }
    v
}

fn cmd_detect(a: &DetectArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = a.flags.resolve().map_err(Failure::config)?;
    if a.input.is_dir() {
        return detect_batch(a, &cfg, out);
    }
    let img = load(&a.input, a.input_format).map_err(|e| Failure::pipeline(&e, &cfg))?;
    let (_, res) = detect(&img, &cfg).map_err(|e| Failure::pipeline(&e, &cfg))?;
    let text = match a.format {
        OutputFormat::Json => pretty(&landmark_json(None, &res, &cfg)),
        OutputFormat::Csv => format!("{}\n{}\n", LandmarkResult::csv_header(), res.to_csv_line()),
    };
    emit(out, a.output.as_deref(), &text)
}

/// Processes every file in a directory in name order. Per-file failures are
/// recorded in the output and do not stop the batch.
fn detect_batch(a: &DetectArgs, cfg: &PipelineConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(&a.input)
        .map_err(|e| Failure::new(EXIT_INPUT, "load", "Io", format!("{}: {e}", a.input.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && !p.to_string_lossy().ends_with(".json"))
        .collect();
    files.sort();
    let results: Vec<(PathBuf, Result<LandmarkResult, PipelineError>)> = files
        .into_par_iter()
        .map(|f| {
            let r = load(&f, a.input_format).and_then(|img| detect(&img, cfg).map(|(_, r)| r));
            (f, r)
        })
        .collect();

    let text = match a.format {
        OutputFormat::Json => {
            let items: Vec<serde_json::Value> = results
                .iter()
                .map(|(f, r)| match r {
                    Ok(res) => json!({ "file": f.display().to_string(), "nose": res.nose, "eyes": res.eyes }),
                    Err(e) => json!({ "file": f.display().to_string(), "error": e }),
                })
                .collect();
            let failed = results.iter().filter(|(_, r)| r.is_err()).count();
            pretty(&json!({ "config": cfg, "processed": results.len(), "failed": failed, "results": items }))
        }
        OutputFormat::Csv => {
            let mut s = format!("file,{},error\n", LandmarkResult::csv_header());
            for (f, r) in &results {
                let (line, err) = match r {
                    Ok(res) => (res.to_csv_line(), String::new()),
                    Err(e) => (",".repeat(9), format!("{}:{}", e.stage, e.code)),
                };
                s.push_str(&format!("{},{line},{err}\n", f.display()));
            }
            s
        }
    };
    emit(out, a.output.as_deref(), &text)
}

fn cmd_classify_map(a: &ClassifyMapArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = a.flags.resolve().map_err(Failure::config)?;
    let img = load(&a.input, a.input_format).map_err(|e| Failure::pipeline(&e, &cfg))?;
    let res = analyze(&img, &cfg).map_err(|e| Failure::pipeline(&e, &cfg))?;
    let (w, h) = (res.classes.width(), res.classes.height());
    std::fs::write(&a.out, write_pgm8(w, h, &res.classes.to_palette())).map_err(|e| Failure::output(&a.out, e))?;

    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for &c in res.classes.labels() {
        *counts.entry(format!("{c:?}")).or_default() += 1;
    }
    let regions = segment_regions(&res.classes, &res.field);
    let text = match a.format {
        OutputFormat::Json => pretty(&json!({
            "output": a.out.display().to_string(),
            "width": w,
            "height": h,
            "counts": counts,
            "regions": regions.len(),
            "largest_regions": regions.iter().take(10).map(|r| json!({
                "class": r.class, "pixels": r.len(), "mean_h": r.mean_h, "mean_k": r.mean_k,
            })).collect::<Vec<_>>(),
            "config": cfg,
        })),
        OutputFormat::Csv => {
            let mut s = String::from("class,palette,pixels\n");
            for c in ALL_CLASSES {
                s.push_str(&format!(
                    "{c:?},{},{}\n",
                    c.palette(),
                    counts.get(&format!("{c:?}")).copied().unwrap_or(0)
                ));
            }
            s
        }
    };
    emit(out, None, &text)
}

const ALL_CLASSES: [HkClass; 10] = [
    HkClass::EllipticalConvex,
    HkClass::CylindricalConvex,
    HkClass::HyperbolicConvex,
    HkClass::HyperbolicSymmetric,
    HkClass::Planar,
    HkClass::EllipticalConcave,
    HkClass::CylindricalConcave,
    HkClass::HyperbolicConcave,
    HkClass::Impossible,
    HkClass::Unclassified,
];

/// Parses `Y:30`, `Y+30`, `x-15` or `Z30`.
pub fn parse_pose(s: &str) -> Result<PoseSpec, String> {
    let s = s.trim();
    let mut chars = s.chars();
    let axis = match chars.next().map(|c| c.to_ascii_uppercase()) {
        Some('X') => Axis::X,
        Some('Y') => Axis::Y,
        Some('Z') => Axis::Z,
        _ => return Err(format!("bad pose `{s}`: expected an axis X, Y or Z")),
    };
    let rest = chars.as_str().trim_start_matches(':').trim();
    let angle: f64 = rest.parse().map_err(|_| format!("bad pose `{s}`: angle `{rest}`"))?;
    PoseSpec::new(axis, angle).map_err(|e| e.to_string())
}

pub fn parse_pose_set(s: &str) -> Result<Vec<PoseSpec>, String> {
    match s.trim() {
        "standard" => Ok(standard_poses()),
        "frontal" => Ok(vec![PoseSpec::identity()]),
        list => list.split(',').map(parse_pose).collect(),
    }
}

fn cmd_synth(a: &SynthArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let bad = |e: &dyn std::fmt::Display| Failure::new(EXIT_CONFIG, "synth", "BadParams", e);
    // Pipeline flags are accepted for uniformity and checked, but unused.
    a.flags.resolve().map_err(Failure::config)?;
    let pose = match &a.pose {
        Some(p) => parse_pose(p).map_err(|e| bad(&e))?,
        None => PoseSpec::identity(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed.unwrap_or(0));

    let (img, truth, phantom) = match a.kind {
        SynthKind::Phantom => {
            let spec = match a.seed {
                Some(_) => FacePhantom::jittered(&mut rng),
                None => FacePhantom::default(),
            };
            let (img, truth) = make_phantom(&spec).map_err(|e| bad(&e))?;
            let (img, truth) = rotate_with_truth(&img, &truth, &pose).map_err(|e| bad(&e))?;
            (img, Some(truth), Some(spec))
        }
        kind => {
            let r = a.surface_radius;
            let k = match kind {
                SynthKind::Plane => SurfaceKind::Plane,
                SynthKind::Hemisphere => SurfaceKind::Hemisphere(r),
                SynthKind::Cylinder => SurfaceKind::Cylinder(r),
                SynthKind::Saddle => SurfaceKind::Saddle,
                _ => SurfaceKind::Paraboloid(r),
            };
            let img = make_surface(k, a.size).map_err(|e| bad(&e))?;
            let img = rotate_and_rasterize(&img, &pose).map_err(|e| bad(&e))?;
            (img, None, None)
        }
    };
    let img = add_depth_noise(&img, a.noise_sigma, &mut rng).map_err(|e| bad(&e))?;

    let fmt = a.out_format.map_or_else(|| RangeFormat::from_path(&a.out), RangeFormat::from);
    save_range_image(&img, &a.out, fmt).map_err(|e| Failure::output(&a.out, e))?;
    let sidecar = sidecar_path(&a.out);
    let meta = SynthMeta {
        kind: a.kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default(),
        width: img.width(),
        height: img.height(),
        nose: truth.map(|t: Truth| t.nose),
        eyes: truth.map(|t| t.eyes),
        pose,
        seed: a.seed,
        noise_sigma: a.noise_sigma,
        phantom,
    };
    std::fs::write(&sidecar, pretty(&meta)).map_err(|e| Failure::output(&sidecar, e))?;
    emit(
        out,
        None,
        &pretty(&json!({ "image": a.out.display().to_string(), "truth": sidecar.display().to_string() })),
    )
}

#[derive(Serialize)]
struct SynthMeta {
    kind: String,
    width: usize,
    height: usize,
    nose: Option<[f64; 2]>,
    eyes: Option<[[f64; 2]; 2]>,
    pose: PoseSpec,
    seed: Option<u64>,
    noise_sigma: f64,
    phantom: Option<FacePhantom>,
}

/// `face.txt` → `face.truth.json`.
pub fn sidecar_path(image: &Path) -> PathBuf {
    image.with_extension("truth.json")
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = a.flags.resolve().map_err(Failure::config)?;
    let bad = |m: String| Failure::new(EXIT_CONFIG, "config", "InvalidConfig", m);
    let poses = parse_pose_set(&a.poses).map_err(bad)?;
    if a.trials == 0 {
        return Err(bad("trials must be >= 1".into()));
    }
    if !(a.nose_tolerance >= 0.0 && a.eye_tolerance >= 0.0) {
        return Err(bad("tolerances must be >= 0".into()));
    }
    let settings = EvalSettings {
        trials: a.trials,
        seed: a.seed,
        nose_tolerance: a.nose_tolerance,
        eye_tolerance: a.eye_tolerance,
    };
    let report = evaluate(&poses, &cfg, &settings);
    if let Some(p) = &a.json_out {
        std::fs::write(p, pretty(&report)).map_err(|e| Failure::output(p, e))?;
    }
    let text = match a.format {
        EvalFormat::Text => report.to_table(),
        EvalFormat::Json => pretty(&report),
        EvalFormat::Csv => {
            let mut s = String::from("axis,angle,total,nose_detected,eyes_detected,baseline_nose_detected\n");
            for c in &report.cells {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    c.axis, c.angle, c.total, c.nose_detected, c.eyes_detected, c.baseline_nose_detected
                ));
            }
            s
        }
    };
    emit(out, None, &text)
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Detect(a) => cmd_detect(a, out),
        Command::ClassifyMap(a) => cmd_classify_map(a, out),
        Command::Synth(a) => cmd_synth(a, out),
        Command::Eval(a) => cmd_eval(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = out.write_all(pretty(&f.body).as_bytes());
            let _ = writeln!(err, "error: {}", f.body["message"].as_str().unwrap_or(""));
            f.exit
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poses_parse() {
        assert_eq!(parse_pose("Y:30").unwrap(), PoseSpec { axis: Axis::Y, angle: 30.0 });
        assert_eq!(parse_pose("x-15").unwrap(), PoseSpec { axis: Axis::X, angle: -15.0 });
        assert_eq!(parse_pose("Z+18").unwrap(), PoseSpec { axis: Axis::Z, angle: 18.0 });
        assert!(parse_pose("Y:61").is_err());
        assert!(parse_pose("W:1").is_err());
        assert_eq!(parse_pose_set("standard").unwrap().len(), 22);
        assert_eq!(parse_pose_set("Y:1,X:2").unwrap().len(), 2);
    }

    #[test]
    fn flag_beats_file_beats_default() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.cfg");
        std::fs::write(&path, "sigma=2.5\nradius=3\n").unwrap();
        let flags = PipelineFlags {
            config: Some(path),
            sigma: Some(0.75),
            ..Default::default()
        };
        let cfg = flags.resolve().unwrap();
        assert_eq!(cfg.smoothing.sigma, 0.75);
        assert_eq!(cfg.smoothing.radius, 3);
        assert_eq!(cfg.detect.top_n_nose, PipelineConfig::default().detect.top_n_nose);
    }

    #[test]
    fn usage_errors_are_config_errors() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["rangeface", "detect"], &mut o, &mut e), EXIT_CONFIG);
        assert_eq!(run(["rangeface", "--help"], &mut o, &mut e), EXIT_OK);
    }

    #[test]
    fn missing_input_is_an_input_error() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(["rangeface", "detect", "/nonexistent/x.txt"], &mut o, &mut e);
        assert_eq!(code, EXIT_INPUT);
        let v: serde_json::Value = serde_json::from_slice(&o).unwrap();
        assert_eq!(v["stage"], "load");
        assert_eq!(v["code"], "FileNotFound");
    }

    #[test]
    fn sidecar_names() {
        assert_eq!(sidecar_path(Path::new("a/face.txt")), PathBuf::from("a/face.truth.json"));
    }
}
