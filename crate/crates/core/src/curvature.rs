//! Mean and Gaussian curvature fields, HK classification and region
//! segmentation.
//!
//! For a graph surface `z = f(x, y)`:
//!
//! ```text
//! H = ((1 + fy²) fxx − 2 fx fy fxy + (1 + fx²) fyy) / (2 (1 + fx² + fy²)^{3/2})
//! K = (fxx fyy − fxy²) / (1 + fx² + fy²)²
//! ```
//!
//! Depth grows toward the viewer, so a bump facing the camera has `H < 0`.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::quadfit::{Derivatives, FitError, FitWindow, QuadFitter};
use crate::rangeio::RangeImage;

/// `(H, K)` from the first and second partial derivatives.
pub fn curvature_from_derivatives(d: &Derivatives) -> (f64, f64) {
    let g = 1.0 + d.fx * d.fx + d.fy * d.fy;
    let h = ((1.0 + d.fy * d.fy) * d.fxx - 2.0 * d.fx * d.fy * d.fxy
        + (1.0 + d.fx * d.fx) * d.fyy)
        / (2.0 * g * g.sqrt());
    let k = (d.fxx * d.fyy - d.fxy * d.fxy) / (g * g);
    (h, k)
}

/// Per-pixel H and K. Pixels without a usable fit are invalid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    width: usize,
    height: usize,
    h: Vec<f64>,
    k: Vec<f64>,
    valid: Vec<bool>,
}

impl CurvatureField {
    /// Assembles a field from raw buffers (row-major, `width * height` each).
    pub fn from_parts(
        width: usize,
        height: usize,
        h: Vec<f64>,
        k: Vec<f64>,
        valid: Vec<bool>,
    ) -> Self {
        let n = width * height;
        assert!(h.len() == n && k.len() == n && valid.len() == n, "buffer size mismatch");
        Self {
            width,
            height,
            h,
            k,
            valid,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    /// `(H, K)` at a valid pixel.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<(f64, f64)> {
        let i = self.index(row, col);
        self.valid[i].then(|| (self.h[i], self.k[i]))
    }

    pub fn mean(&self) -> &[f64] {
        &self.h
    }

    pub fn gaussian(&self) -> &[f64] {
        &self.k
    }

    pub fn mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// `(row, col, H, K)` for valid pixels, row-major.
    pub fn valid_pixels(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        let w = self.width;
        (0..self.h.len())
            .filter(|&i| self.valid[i])
            .map(move |i| (i / w, i % w, self.h[i], self.k[i]))
    }
}

/// Fits every valid pixel and evaluates H, K. Pixels whose window has fewer
/// than six valid samples, or whose fit is rank deficient, come out invalid.
pub fn compute_curvature_field(img: &RangeImage, window: FitWindow) -> CurvatureField {
    compute_curvature_field_with_pitch(img, window, 1.0)
        .expect("unit pitch and a validated window are always accepted")
}

pub fn compute_curvature_field_with_pitch(
    img: &RangeImage,
    window: FitWindow,
    pitch: f64,
) -> Result<CurvatureField, FitError> {
    let fitter = QuadFitter::new(window, pitch)?;
    let (w, h) = (img.width(), img.height());
    let per_pixel: Vec<Option<(f64, f64)>> = (0..h)
        .into_par_iter()
        .flat_map_iter(|row| {
            let fitter = &fitter;
            (0..w).map(move |col| {
                if !img.is_valid(row, col) {
                    return None;
                }
                match fitter.fit(img, row, col) {
                    Ok(q) if !q.rank_deficient => {
                        let (hh, kk) = curvature_from_derivatives(&q.derivatives());
                        (hh.is_finite() && kk.is_finite()).then_some((hh, kk))
                    }
                    _ => None,
                }
            })
        })
        .collect();

    let mut hv = vec![0.0; w * h];
    let mut kv = vec![0.0; w * h];
    let mut valid = vec![false; w * h];
    for (i, v) in per_pixel.into_iter().enumerate() {
        if let Some((hh, kk)) = v {
            hv[i] = hh;
            kv[i] = kk;
            valid[i] = true;
        }
    }
    Ok(CurvatureField::from_parts(w, h, hv, kv, valid))
}

/// Surface type from the signs of H and K.
///
/// | H \ K | K > 0              | K = 0               | K < 0               |
/// |-------|--------------------|---------------------|---------------------|
/// | H < 0 | EllipticalConvex   | CylindricalConvex   | HyperbolicConvex    |
/// | H = 0 | Impossible         | Planar              | HyperbolicSymmetric |
/// | H > 0 | EllipticalConcave  | CylindricalConcave  | HyperbolicConcave   |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum HkClass {
    EllipticalConvex,
    CylindricalConvex,
    HyperbolicConvex,
    HyperbolicSymmetric,
    Planar,
    EllipticalConcave,
    CylindricalConcave,
    HyperbolicConcave,
    Impossible,
    Unclassified,
}

impl HkClass {
    /// Gray level in exported classification maps. Hyperbolic classes are
    /// darkest, elliptical concave brightest.
    pub fn palette(self) -> u8 {
        match self {
            HkClass::Unclassified => 0,
            HkClass::Impossible => 16,
            HkClass::HyperbolicConvex | HkClass::HyperbolicSymmetric | HkClass::HyperbolicConcave => 32,
            HkClass::Planar => 64,
            HkClass::CylindricalConvex => 96,
            HkClass::EllipticalConvex => 128,
            HkClass::CylindricalConcave => 192,
            HkClass::EllipticalConcave => 224,
        }
    }

    pub fn is_hyperbolic(self) -> bool {
        matches!(
            self,
            HkClass::HyperbolicConvex | HkClass::HyperbolicSymmetric | HkClass::HyperbolicConcave
        )
    }

    /// The class with convex and concave exchanged (what negating depth does).
    pub fn mirrored(self) -> Self {
        match self {
            HkClass::EllipticalConvex => HkClass::EllipticalConcave,
            HkClass::EllipticalConcave => HkClass::EllipticalConvex,
            HkClass::CylindricalConvex => HkClass::CylindricalConcave,
            HkClass::CylindricalConcave => HkClass::CylindricalConvex,
            HkClass::HyperbolicConvex => HkClass::HyperbolicConcave,
            HkClass::HyperbolicConcave => HkClass::HyperbolicConvex,
            other => other,
        }
    }
}

/// Half-widths of the bands treated as zero curvature.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ClassifyParams {
    pub eps_h: f64,
    pub eps_k: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            eps_h: 1e-6,
            eps_k: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Neg,
    Zero,
    Pos,
}

fn band_sign(v: f64, eps: f64) -> Sign {
    if v > eps {
        Sign::Pos
    } else if v < -eps {
        Sign::Neg
    } else {
        Sign::Zero
    }
}

pub fn classify_hk(h: f64, k: f64, p: &ClassifyParams) -> HkClass {
    use HkClass::*;
    match (band_sign(h, p.eps_h), band_sign(k, p.eps_k)) {
        (Sign::Neg, Sign::Pos) => EllipticalConvex,
        (Sign::Neg, Sign::Zero) => CylindricalConvex,
        (Sign::Neg, Sign::Neg) => HyperbolicConvex,
        (Sign::Zero, Sign::Pos) => Impossible,
        (Sign::Zero, Sign::Zero) => Planar,
        (Sign::Zero, Sign::Neg) => HyperbolicSymmetric,
        (Sign::Pos, Sign::Pos) => EllipticalConcave,
        (Sign::Pos, Sign::Zero) => CylindricalConcave,
        (Sign::Pos, Sign::Neg) => HyperbolicConcave,
    }
}

/// Per-pixel HK labels for one field.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMap {
    width: usize,
    height: usize,
    labels: Vec<HkClass>,
}

impl ClassMap {
    pub fn from_labels(width: usize, height: usize, labels: Vec<HkClass>) -> Self {
        assert_eq!(labels.len(), width * height, "label buffer size mismatch");
        Self {
            width,
            height,
            labels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> HkClass {
        self.labels[row * self.width + col]
    }

    pub fn labels(&self) -> &[HkClass] {
        &self.labels
    }

    pub fn count(&self, class: HkClass) -> usize {
        self.labels.iter().filter(|&&c| c == class).count()
    }

    /// Labels mapped through [`HkClass::palette`].
    pub fn to_palette(&self) -> Vec<u8> {
        self.labels.iter().map(|c| c.palette()).collect()
    }
}

pub fn classify(field: &CurvatureField, p: &ClassifyParams) -> ClassMap {
    let labels = (0..field.h.len())
        .map(|i| {
            if field.valid[i] {
                classify_hk(field.h[i], field.k[i], p)
            } else {
                HkClass::Unclassified
            }
        })
        .collect();
    ClassMap::from_labels(field.width, field.height, labels)
}

/// A 4-connected set of pixels sharing one label.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub class: HkClass,
    pub pixels: Vec<(usize, usize)>,
    pub mean_h: f64,
    pub mean_k: f64,
}

impl Region {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.pixels.contains(&(row, col))
    }
}

/// Connected components of equal label (unclassified pixels excluded),
/// largest first; equal sizes keep row-major discovery order.
pub fn segment_regions(classes: &ClassMap, field: &CurvatureField) -> Vec<Region> {
    let (w, h) = (classes.width, classes.height);
    let mut seen = vec![false; w * h];
    let mut regions = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        let class = classes.labels[start];
        if seen[start] || class == HkClass::Unclassified {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut pixels = Vec::new();
        let (mut sum_h, mut sum_k) = (0.0, 0.0);
        while let Some(i) = queue.pop_front() {
            let (r, c) = (i / w, i % w);
            pixels.push((r, c));
            sum_h += field.h[i];
            sum_k += field.k[i];
            let mut visit = |j: usize| {
                if !seen[j] && classes.labels[j] == class {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if r > 0 {
                visit(i - w);
            }
            if r + 1 < h {
                visit(i + w);
            }
            if c > 0 {
                visit(i - 1);
            }
            if c + 1 < w {
                visit(i + 1);
            }
        }
        pixels.sort_unstable();
        let n = pixels.len() as f64;
        regions.push(Region {
            class,
            pixels,
            mean_h: sum_h / n,
            mean_k: sum_k / n,
        });
    }
    regions.sort_by_key(|r| std::cmp::Reverse(r.len()));
    regions
}
