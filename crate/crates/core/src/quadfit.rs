//! Windowed least-squares biquadratic fitting.
//!
//! Around pixel `(row, col)` the depth is modelled as
//!
//! ```text
//! g(x, y) = a + b·x + c·y + d·x·y + e·x² + f·y²
//! ```
//!
//! with `x` the column offset and `y` the row offset from the center, both
//! scaled by the pixel pitch. The derivatives of the surface at the center
//! are then `fx = b`, `fy = c`, `fxy = d`, `fxx = 2e`, `fyy = 2f`.

use nalgebra::{DMatrix, Matrix6, SymmetricEigen, Vector6};
use thiserror::Error;

use crate::rangeio::RangeImage;

/// Number of unknowns in the biquadratic model.
pub const UNKNOWNS: usize = 6;

/// Relative eigenvalue cutoff for rank detection of the normal matrix.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("center pixel ({row}, {col}) is invalid")]
    CenterInvalid { row: usize, col: usize },
    #[error("only {found} valid pixels in the window, need at least 6")]
    InsufficientSupport { found: usize },
    #[error("pixel ({row}, {col}) is outside the image")]
    OutOfBounds { row: usize, col: usize },
    #[error("fit window half-width must be at least 1")]
    BadWindow,
    #[error("pixel pitch must be positive and finite, got {0}")]
    BadPitch(f64),
}

/// Square fitting neighborhood of side `2 * half_width + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FitWindow {
    pub half_width: usize,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self { half_width: 2 }
    }
}

impl FitWindow {
    pub fn new(half_width: usize) -> Result<Self, FitError> {
        if half_width < 1 {
            return Err(FitError::BadWindow);
        }
        Ok(Self { half_width })
    }

    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }
}

/// Coefficients of one local fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    /// Valid pixels that entered the fit.
    pub support: usize,
    /// The normal matrix was singular; the coefficients are the minimum-norm
    /// least-squares solution.
    pub rank_deficient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub fx: f64,
    pub fy: f64,
    pub fxy: f64,
    pub fxx: f64,
    pub fyy: f64,
}

impl QuadFit {
    pub fn coefficients(&self) -> [f64; UNKNOWNS] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn derivatives(&self) -> Derivatives {
        Derivatives {
            fx: self.b,
            fy: self.c,
            fxy: self.d,
            fxx: 2.0 * self.e,
            fyy: 2.0 * self.f,
        }
    }

    /// Model value at local offset `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a + self.b * x + self.c * y + self.d * x * y + self.e * x * x + self.f * y * y
    }

    fn from_coefficients(s: &[f64; UNKNOWNS], support: usize, rank_deficient: bool) -> Self {
        Self {
            a: s[0],
            b: s[1],
            c: s[2],
            d: s[3],
            e: s[4],
            f: s[5],
            support,
            rank_deficient,
        }
    }
}

/// Equivalent to `q.derivatives()`.
pub fn derivatives(q: &QuadFit) -> Derivatives {
    q.derivatives()
}

#[inline]
fn basis(x: f64, y: f64) -> [f64; UNKNOWNS] {
    [1.0, x, y, x * y, x * x, y * y]
}

/// Pseudo-inverse of a symmetric PSD matrix with its numerical rank.
fn pinv_sym(n: Matrix6<f64>) -> (Matrix6<f64>, usize) {
    let eig = SymmetricEigen::new(n);
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let tol = max * RANK_TOL;
    let mut inv_diag = Vector6::zeros();
    let mut rank = 0;
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > tol {
            inv_diag[i] = 1.0 / l;
            rank += 1;
        }
    }
    let v = eig.eigenvectors;
    (v * Matrix6::from_diagonal(&inv_diag) * v.transpose(), rank)
}

/// Reusable fitter for one window size and pixel pitch.
///
/// A fully valid window always has the same design matrix, so its
/// least-squares solution operator is precomputed once and applied as a
/// fixed set of weights.
#[derive(Debug, Clone)]
pub struct QuadFitter {
    window: FitWindow,
    pitch: f64,
    /// `UNKNOWNS x side²` solution operator for a complete window.
    full_weights: DMatrix<f64>,
}

impl QuadFitter {
    pub fn new(window: FitWindow, pitch: f64) -> Result<Self, FitError> {
        if window.half_width < 1 {
            return Err(FitError::BadWindow);
        }
        if !(pitch.is_finite() && pitch > 0.0) {
            return Err(FitError::BadPitch(pitch));
        }
        let offsets = Self::offsets(window, pitch);
        let mut normal = Matrix6::zeros();
        for &(x, y) in &offsets {
            let phi = Vector6::from(basis(x, y));
            normal += phi * phi.transpose();
        }
        let (inv, rank) = pinv_sym(normal);
        debug_assert_eq!(rank, UNKNOWNS, "a complete window is always full rank");
        let mut full_weights = DMatrix::zeros(UNKNOWNS, offsets.len());
        for (k, &(x, y)) in offsets.iter().enumerate() {
            let w = inv * Vector6::from(basis(x, y));
            full_weights.set_column(k, &w);
        }
        Ok(Self {
            window,
            pitch,
            full_weights,
        })
    }

    pub fn window(&self) -> FitWindow {
        self.window
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    /// Window offsets in row-major order, as `(x, y)` = (column, row) offsets.
    fn offsets(window: FitWindow, pitch: f64) -> Vec<(f64, f64)> {
        let h = window.half_width as i64;
        let mut out = Vec::with_capacity(window.side() * window.side());
        for dr in -h..=h {
            for dc in -h..=h {
                out.push((dc as f64 * pitch, dr as f64 * pitch));
            }
        }
        out
    }

    pub fn fit(&self, img: &RangeImage, row: usize, col: usize) -> Result<QuadFit, FitError> {
        if row >= img.height() || col >= img.width() {
            return Err(FitError::OutOfBounds { row, col });
        }
        if !img.is_valid(row, col) {
            return Err(FitError::CenterInvalid { row, col });
        }
        let h = self.window.half_width;
        let complete = row >= h
            && col >= h
            && row + h < img.height()
            && col + h < img.width()
            && (row - h..=row + h)
                .all(|r| (col - h..=col + h).all(|c| img.is_valid(r, c)));
        if complete {
            return Ok(self.fit_complete(img, row, col));
        }
        self.fit_partial(img, row, col)
    }

    fn fit_complete(&self, img: &RangeImage, row: usize, col: usize) -> QuadFit {
        let h = self.window.half_width;
        let mut s = [0.0; UNKNOWNS];
        let mut k = 0;
        for r in row - h..=row + h {
            for c in col - h..=col + h {
                let z = img.depths()[img.index(r, c)];
                for (j, sj) in s.iter_mut().enumerate() {
                    *sj += self.full_weights[(j, k)] * z;
                }
                k += 1;
            }
        }
        QuadFit::from_coefficients(&s, k, false)
    }

    fn fit_partial(&self, img: &RangeImage, row: usize, col: usize) -> Result<QuadFit, FitError> {
        let h = self.window.half_width as i64;
        let mut normal = Matrix6::zeros();
        let mut rhs = Vector6::zeros();
        let mut support = 0;
        for dr in -h..=h {
            for dc in -h..=h {
                let (r, c) = (row as i64 + dr, col as i64 + dc);
                if r < 0 || c < 0 || r >= img.height() as i64 || c >= img.width() as i64 {
                    continue;
                }
                let Some(z) = img.get(r as usize, c as usize) else {
                    continue;
                };
                let phi = Vector6::from(basis(dc as f64 * self.pitch, dr as f64 * self.pitch));
                normal += phi * phi.transpose();
                rhs += phi * z;
                support += 1;
            }
        }
        if support < UNKNOWNS {
            return Err(FitError::InsufficientSupport { found: support });
        }
        let (inv, rank) = pinv_sym(normal);
        let sol = inv * rhs;
        let s: [f64; UNKNOWNS] = sol.into();
        Ok(QuadFit::from_coefficients(&s, support, rank < UNKNOWNS))
    }
}

/// One-off fit with unit pixel pitch.
pub fn fit_biquadratic(
    img: &RangeImage,
    row: usize,
    col: usize,
    window: FitWindow,
) -> Result<QuadFit, FitError> {
    QuadFitter::new(window, 1.0)?.fit(img, row, col)
}

/// Sum of squared residuals of `q` over the valid pixels of its window.
pub fn window_residual(img: &RangeImage, row: usize, col: usize, window: FitWindow, q: &QuadFit) -> f64 {
    let h = window.half_width as i64;
    let mut ssr = 0.0;
    for dr in -h..=h {
        for dc in -h..=h {
            let (r, c) = (row as i64 + dr, col as i64 + dc);
            if r < 0 || c < 0 || r >= img.height() as i64 || c >= img.width() as i64 {
                continue;
            }
            if let Some(z) = img.get(r as usize, c as usize) {
                let e = q.eval(dc as f64, dr as f64) - z;
                ssr += e * e;
            }
        }
    }
    ssr
}
