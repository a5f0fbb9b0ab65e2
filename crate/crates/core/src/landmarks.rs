//! Nose-tip and eye-corner detection from curvature maps, plus the
//! maximum-intensity nose baseline.
//!
//! Eye corners are the two strongest elliptical concave points (H > 0,
//! K above threshold) that are at least `min_separation` pixels apart. The
//! nose tip is taken among the `top_n_nose` strongest elliptical convex
//! points (H < 0, K above threshold) as the one with the highest intensity.
//! All orderings fall back to row-major pixel order on ties.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{ClassMap, CurvatureField, HkClass};
use crate::rangeio::RangeImage;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum LandmarkError {
    #[error("no pixel passes the curvature test")]
    NoCandidates,
    #[error("only one candidate cluster; cannot report two separated corners")]
    SingleCandidate,
    #[error("image has no valid pixels")]
    NoValidPixels,
}

impl LandmarkError {
    pub fn code(&self) -> &'static str {
        match self {
            LandmarkError::NoCandidates => "NoCandidates",
            LandmarkError::SingleCandidate => "SingleCandidate",
            LandmarkError::NoValidPixels => "NoValidPixels",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionParams {
    /// Gaussian curvature a candidate must exceed.
    pub k_threshold: f64,
    /// How many top-K convex candidates compete on intensity.
    pub top_n_nose: usize,
    /// Minimum pixel distance between the two reported eye corners.
    pub min_separation: f64,
    /// Candidates need every pixel within this Chebyshev radius to carry a
    /// curvature value. Smoothing and partial fits bend the surface near
    /// holes and image edges, which shows up as spurious curvature there.
    pub border_margin: usize,
}

impl Default for DetectionParams {
    fn default() -> Self {
        Self {
            k_threshold: 1e-4,
            top_n_nose: 5,
            min_separation: 8.0,
            border_margin: 3,
        }
    }
}

impl DetectionParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.k_threshold.is_finite() && self.k_threshold > 0.0) {
            return Err(format!("k_threshold must be > 0, got {}", self.k_threshold));
        }
        if self.top_n_nose < 1 {
            return Err("top_n_nose must be at least 1".into());
        }
        if !(self.min_separation.is_finite() && self.min_separation >= 0.0) {
            return Err(format!("min_separation must be >= 0, got {}", self.min_separation));
        }
        Ok(())
    }
}

/// Depth rescaled to 0..=255 over the valid pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    width: usize,
    height: usize,
    values: Vec<Option<u8>>,
}

impl IntensityMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<u8> {
        self.values[row * self.width + col]
    }
}

/// `round(255 (z - min) / (max - min))`; a constant image maps to 255.
pub fn intensity_map(img: &RangeImage) -> Result<IntensityMap, LandmarkError> {
    let (lo, hi) = img.depth_range().ok_or(LandmarkError::NoValidPixels)?;
    let span = hi - lo;
    let values = img
        .depths()
        .iter()
        .zip(img.mask())
        .map(|(&z, &v)| {
            v.then(|| {
                if span > 0.0 {
                    (255.0 * (z - lo) / span).round().clamp(0.0, 255.0) as u8
                } else {
                    255
                }
            })
        })
        .collect();
    Ok(IntensityMap {
        width: img.width(),
        height: img.height(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EyeCorner {
    pub row: usize,
    pub col: usize,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoseTip {
    pub row: usize,
    pub col: usize,
    pub k: f64,
    pub intensity: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityPeak {
    pub row: usize,
    pub col: usize,
    pub intensity: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    row: usize,
    col: usize,
    k: f64,
}

/// Pixels whose `(2 margin + 1)²` neighborhood lies inside the image and
/// is entirely valid.
pub fn interior_mask(field: &CurvatureField, margin: usize) -> Vec<bool> {
    let (w, h) = (field.width(), field.height());
    if margin == 0 {
        return field.mask().to_vec();
    }
    // Summed-area table of invalid pixels.
    let mut sat = vec![0u32; (w + 1) * (h + 1)];
    for r in 0..h {
        let mut row = 0u32;
        for c in 0..w {
            row += u32::from(!field.mask()[r * w + c]);
            sat[(r + 1) * (w + 1) + c + 1] = sat[r * (w + 1) + c + 1] + row;
        }
    }
    let mut out = vec![false; w * h];
    for r in margin..h.saturating_sub(margin) {
        for c in margin..w.saturating_sub(margin) {
            let (r0, c0, r1, c1) = (r - margin, c - margin, r + margin + 1, c + margin + 1);
            let bad = sat[r1 * (w + 1) + c1] + sat[r0 * (w + 1) + c0] - sat[r0 * (w + 1) + c1] - sat[r1 * (w + 1) + c0];
            out[r * w + c] = bad == 0;
        }
    }
    out
}

/// Interior pixels accepted by `keep`, sorted by K descending then row-major.
fn ranked_candidates(
    field: &CurvatureField,
    classes: &ClassMap,
    margin: usize,
    keep: impl Fn(f64, f64, HkClass) -> bool,
) -> Vec<Candidate> {
    let interior = interior_mask(field, margin);
    let w = field.width();
    let mut out: Vec<Candidate> = field
        .valid_pixels()
        .filter(|&(r, c, h, k)| interior[r * w + c] && keep(h, k, classes.get(r, c)))
        .map(|(row, col, _, k)| Candidate { row, col, k })
        .collect();
    // Stable sort keeps row-major order among equal K.
    out.sort_by(|a, b| b.k.total_cmp(&a.k));
    out
}

fn eye_candidates(field: &CurvatureField, classes: &ClassMap, p: &DetectionParams) -> Vec<Candidate> {
    ranked_candidates(field, classes, p.border_margin, |h, k, class| {
        h > 0.0 && k > p.k_threshold && class == HkClass::EllipticalConcave
    })
}

fn nose_candidates(field: &CurvatureField, classes: &ClassMap, p: &DetectionParams) -> Vec<Candidate> {
    ranked_candidates(field, classes, p.border_margin, |h, k, class| {
        h < 0.0 && k > p.k_threshold && class == HkClass::EllipticalConvex
    })
}

/// Sizes of the eye and nose candidate sets.
pub fn candidate_counts(field: &CurvatureField, classes: &ClassMap, p: &DetectionParams) -> (usize, usize) {
    (
        eye_candidates(field, classes, p).len(),
        nose_candidates(field, classes, p).len(),
    )
}

fn dist(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dr = a.0 as f64 - b.0 as f64;
    let dc = a.1 as f64 - b.1 as f64;
    (dr * dr + dc * dc).sqrt()
}

/// Two strongest concave points at least `min_separation` apart, strongest first.
pub fn detect_eye_corners(
    field: &CurvatureField,
    classes: &ClassMap,
    p: &DetectionParams,
) -> Result<[EyeCorner; 2], LandmarkError> {
    let cands = eye_candidates(field, classes, p);
    let first = *cands.first().ok_or(LandmarkError::NoCandidates)?;
    let second = cands
        .iter()
        .skip(1)
        .find(|c| dist((c.row, c.col), (first.row, first.col)) >= p.min_separation)
        .ok_or(LandmarkError::SingleCandidate)?;
    let corner = |c: &Candidate| EyeCorner {
        row: c.row,
        col: c.col,
        k: c.k,
    };
    Ok([corner(&first), corner(second)])
}

/// Brightest of the `top_n_nose` strongest convex points; intensity ties go
/// to the higher K.
pub fn detect_nose_tip(
    field: &CurvatureField,
    classes: &ClassMap,
    ints: &IntensityMap,
    p: &DetectionParams,
) -> Result<NoseTip, LandmarkError> {
    let cands = nose_candidates(field, classes, p);
    let mut best: Option<NoseTip> = None;
    for c in cands.iter().take(p.top_n_nose) {
        let Some(intensity) = ints.get(c.row, c.col) else {
            continue;
        };
        // Candidates arrive in descending K, so strict > keeps the higher K on ties.
        if best.is_none_or(|b| intensity > b.intensity) {
            best = Some(NoseTip {
                row: c.row,
                col: c.col,
                k: c.k,
                intensity,
            });
        }
    }
    best.ok_or(LandmarkError::NoCandidates)
}

/// Globally brightest valid pixel (first in row-major order on ties).
pub fn detect_nose_tip_max_intensity(ints: &IntensityMap) -> Result<IntensityPeak, LandmarkError> {
    let mut best: Option<IntensityPeak> = None;
    for row in 0..ints.height {
        for col in 0..ints.width {
            if let Some(v) = ints.get(row, col) {
                if best.is_none_or(|b| v > b.intensity) {
                    best = Some(IntensityPeak {
                        row,
                        col,
                        intensity: v,
                    });
                }
            }
        }
    }
    best.ok_or(LandmarkError::NoValidPixels)
}

/// Combined result of both detectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkResult {
    pub nose: Option<NoseTip>,
    pub eyes: Option<[EyeCorner; 2]>,
    pub params: DetectionParams,
}

impl LandmarkResult {
    /// `nose_row,nose_col,nose_k,nose_intensity,eye1_row,eye1_col,eye1_k,eye2_row,eye2_col,eye2_k`,
    /// empty fields for missing landmarks.
    pub fn csv_header() -> &'static str {
        "nose_row,nose_col,nose_k,nose_intensity,eye1_row,eye1_col,eye1_k,eye2_row,eye2_col,eye2_k"
    }

    pub fn to_csv_line(&self) -> String {
        let mut fields: Vec<String> = match &self.nose {
            Some(n) => vec![
                n.row.to_string(),
                n.col.to_string(),
                n.k.to_string(),
                n.intensity.to_string(),
            ],
            None => vec![String::new(); 4],
        };
        match &self.eyes {
            Some(eyes) => {
                for e in eyes {
                    fields.extend([e.row.to_string(), e.col.to_string(), e.k.to_string()]);
                }
            }
            None => fields.extend(std::iter::repeat_n(String::new(), 6)),
        }
        fields.join(",")
    }
}

/// Runs both detectors. Fails only when neither landmark is found; the
/// error then comes from the nose detector.
pub fn detect_landmarks(
    field: &CurvatureField,
    classes: &ClassMap,
    ints: &IntensityMap,
    p: &DetectionParams,
) -> Result<LandmarkResult, LandmarkError> {
    let nose = detect_nose_tip(field, classes, ints, p);
    let eyes = detect_eye_corners(field, classes, p);
    match (nose, eyes) {
        (Err(e), Err(_)) => Err(e),
        (nose, eyes) => Ok(LandmarkResult {
            nose: nose.ok(),
            eyes: eyes.ok(),
            params: *p,
        }),
    }
}
