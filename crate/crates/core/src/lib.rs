//! Nose-tip and eye-corner detection on range images by HK curvature
//! analysis.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! 1. [`rangeio`]: load, crop and store depth maps.
//! 2. [`preprocess`]: Otsu background removal and Gaussian smoothing.
//! 3. [`quadfit`]: per-pixel least-squares biquadratic fits.
//! 4. [`curvature`]: mean (H) and Gaussian (K) curvature, HK labels, regions.
//! 5. [`landmarks`]: eye corners, nose tip and the max-intensity baseline.
//!
//! [`synth`] builds analytic surfaces and a face phantom with rotated poses,
//! [`pipeline`] chains the stages under one configuration and [`eval`] runs
//! pose sweeps over phantoms.

pub mod cli;
pub mod curvature;
pub mod eval;
pub mod landmarks;
pub mod pipeline;
pub mod preprocess;
pub mod quadfit;
pub mod rangeio;
pub mod synth;

pub use curvature::{
    classify, compute_curvature_field, curvature_from_derivatives, segment_regions, ClassMap,
    ClassifyParams, CurvatureField, HkClass, Region,
};
pub use landmarks::{
    detect_eye_corners, detect_nose_tip, detect_nose_tip_max_intensity, intensity_map,
    DetectionParams, IntensityMap, LandmarkError, LandmarkResult,
};
pub use pipeline::{PipelineConfig, PipelineError, PipelineOutput};
pub use preprocess::{apply_threshold, gaussian_smooth, otsu_threshold, SmoothingParams};
pub use quadfit::{fit_biquadratic, FitWindow, QuadFit};
pub use rangeio::{crop, load_range_image, save_range_image, CropRect, RangeFormat, RangeImage};
pub use synth::{make_phantom, make_surface, rotate_and_rasterize, Axis, FacePhantom, PoseSpec, SurfaceKind, Truth};
