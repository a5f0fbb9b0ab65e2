//! Synthetic range images with known geometry.
//!
//! * Closed-form test surfaces (plane, hemisphere, cylinder, saddle,
//!   paraboloid) for checking curvature estimates.
//! * A face phantom: a curved face shell carrying a Gaussian nose bump and
//!   two Gaussian eye pits, with ground-truth landmark positions.
//! * Rigid rotation about the X, Y or Z axis followed by orthographic
//!   re-rasterization with a z-buffer, to emulate scans taken in other poses.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rangeio::RangeImage;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("bad parameters: {0}")]
    BadParams(String),
}

fn bad(msg: impl Into<String>) -> SynthError {
    SynthError::BadParams(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SurfaceKind {
    /// Constant depth.
    Plane,
    /// Upper half of a sphere of the given radius, apex at the grid center.
    Hemisphere(f64),
    /// Half-cylinder of the given radius whose ridge runs down the center column.
    Cylinder(f64),
    /// `(u² − v²) / 2`.
    Saddle,
    /// Dome `R − (u² + v²) / (2R)` with apex radius of curvature `R`.
    Paraboloid(f64),
}

/// Depth of the plane surface.
pub const PLANE_DEPTH: f64 = 10.0;

/// Samples `kind` on an `n x n` unit-pitch grid centered at `((n−1)/2, (n−1)/2)`.
/// `u` runs along columns and `v` along rows; points outside the surface's
/// domain are invalid.
pub fn make_surface(kind: SurfaceKind, n: usize) -> Result<RangeImage, SynthError> {
    if n < 16 {
        return Err(bad(format!("grid size must be at least 16, got {n}")));
    }
    if let SurfaceKind::Hemisphere(r) | SurfaceKind::Cylinder(r) | SurfaceKind::Paraboloid(r) = kind {
        if !(r.is_finite() && r > 0.0) {
            return Err(bad(format!("radius must be positive, got {r}")));
        }
    }
    let c0 = (n as f64 - 1.0) / 2.0;
    let mut depth = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            let (u, v) = (col as f64 - c0, row as f64 - c0);
            let z = match kind {
                SurfaceKind::Plane => PLANE_DEPTH,
                SurfaceKind::Hemisphere(r) => {
                    let s = r * r - u * u - v * v;
                    if s > 0.0 {
                        s.sqrt()
                    } else {
                        f64::NAN
                    }
                }
                SurfaceKind::Cylinder(r) => {
                    let s = r * r - u * u;
                    if s > 0.0 {
                        s.sqrt()
                    } else {
                        f64::NAN
                    }
                }
                SurfaceKind::Saddle => (u * u - v * v) / 2.0,
                SurfaceKind::Paraboloid(r) => r - (u * u + v * v) / (2.0 * r),
            };
            depth.push(z);
        }
    }
    RangeImage::from_depths(n, n, depth).map_err(|e| bad(e.to_string()))
}

/// A Gaussian feature `amplitude · exp(−d² / (2 width²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFeature {
    pub row: f64,
    pub col: f64,
    pub amplitude: f64,
    pub width: f64,
}

impl GaussianFeature {
    fn at(&self, row: f64, col: f64) -> f64 {
        let d2 = (row - self.row).powi(2) + (col - self.col).powi(2);
        self.amplitude * (-d2 / (2.0 * self.width * self.width)).exp()
    }

    fn distance(&self, other: &GaussianFeature) -> f64 {
        ((self.row - other.row).powi(2) + (self.col - other.col).powi(2)).sqrt()
    }
}

/// Parameters of the face phantom.
///
/// The face shell is the paraboloid `−x² / (2 rx) − y² / (2 ry)` centered on
/// the nose, so that the face is curved across much more than along.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FacePhantom {
    pub size: usize,
    pub base: f64,
    pub face_rx: f64,
    pub face_ry: f64,
    /// Bump toward the camera (amplitude > 0).
    pub nose: GaussianFeature,
    /// Pits away from the camera (amplitude < 0).
    pub eyes: [GaussianFeature; 2],
}

impl Default for FacePhantom {
    fn default() -> Self {
        Self {
            size: 128,
            base: 100.0,
            face_rx: 40.0,
            face_ry: 200.0,
            nose: GaussianFeature {
                row: 64.0,
                col: 64.0,
                amplitude: 7.5,
                width: 8.0,
            },
            eyes: [
                GaussianFeature {
                    row: 44.0,
                    col: 44.0,
                    amplitude: -4.0,
                    width: 6.0,
                },
                GaussianFeature {
                    row: 44.0,
                    col: 84.0,
                    amplitude: -4.0,
                    width: 6.0,
                },
            ],
        }
    }
}

impl FacePhantom {
    /// Default phantom with feature centers moved by up to one pixel,
    /// amplitudes scaled by up to ±10% and widths by up to ±5%.
    pub fn jittered<R: Rng>(rng: &mut R) -> Self {
        let mut p = Self::default();
        let vary = |f: &mut GaussianFeature, rng: &mut R| {
            f.row += f64::from(rng.random_range(-1i32..=1));
            f.col += f64::from(rng.random_range(-1i32..=1));
            f.amplitude *= rng.random_range(0.9..=1.1);
            f.width *= rng.random_range(0.95..=1.05);
        };
        vary(&mut p.nose, rng);
        for eye in &mut p.eyes {
            vary(eye, rng);
        }
        p
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.size < 16 {
            return Err(bad(format!("phantom size must be at least 16, got {}", self.size)));
        }
        if !(self.face_rx > 0.0 && self.face_ry > 0.0) {
            return Err(bad("face curvature radii must be positive"));
        }
        if self.nose.amplitude <= 0.0 {
            return Err(bad("nose amplitude must be positive"));
        }
        if self.eyes.iter().any(|e| e.amplitude >= 0.0) {
            return Err(bad("eye amplitudes must be negative"));
        }
        let feats = [self.nose, self.eyes[0], self.eyes[1]];
        if feats.iter().any(|f| f.width.is_nan() || f.width <= 0.0) {
            return Err(bad("feature widths must be positive"));
        }
        let lim = (self.size - 1) as f64;
        if feats
            .iter()
            .any(|f| f.row < 0.0 || f.col < 0.0 || f.row > lim || f.col > lim)
        {
            return Err(bad("feature centers must lie on the grid"));
        }
        for (i, a) in feats.iter().enumerate() {
            for b in &feats[i + 1..] {
                let need = 3.0 * a.width.max(b.width);
                if a.distance(b) <= need {
                    return Err(bad(format!(
                        "features at ({}, {}) and ({}, {}) closer than 3 widths",
                        a.row, a.col, b.row, b.col
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn depth_at(&self, row: f64, col: f64) -> f64 {
        let (x, y) = (col - self.nose.col, row - self.nose.row);
        let shell = -x * x / (2.0 * self.face_rx) - y * y / (2.0 * self.face_ry);
        self.base + shell + self.nose.at(row, col) + self.eyes[0].at(row, col) + self.eyes[1].at(row, col)
    }
}

/// Ground-truth landmark positions as `[row, col]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub nose: [f64; 2],
    pub eyes: [[f64; 2]; 2],
}

pub fn make_phantom(spec: &FacePhantom) -> Result<(RangeImage, Truth), SynthError> {
    spec.validate()?;
    let n = spec.size;
    let img = RangeImage::from_fn(n, n, |r, c| spec.depth_at(r as f64, c as f64));
    let truth = Truth {
        nose: [spec.nose.row, spec.nose.col],
        eyes: [
            [spec.eyes[0].row, spec.eyes[0].col],
            [spec.eyes[1].row, spec.eyes[1].col],
        ],
    };
    Ok((img, truth))
}

/// Adds independent Gaussian noise to every valid depth.
pub fn add_depth_noise<R: Rng>(img: &RangeImage, sigma: f64, rng: &mut R) -> Result<RangeImage, SynthError> {
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| bad(format!("noise sigma: {e}")))?;
    let depth = img
        .depths()
        .iter()
        .zip(img.mask())
        .map(|(&z, &v)| if v { z + normal.sample(rng) } else { z })
        .collect();
    RangeImage::new(img.width(), img.height(), depth, img.mask().to_vec()).map_err(|e| bad(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        })
    }
}

/// Largest rotation accepted, in degrees.
pub const MAX_POSE_ANGLE: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseSpec {
    pub axis: Axis,
    pub angle: f64,
}

impl PoseSpec {
    pub fn new(axis: Axis, angle: f64) -> Result<Self, SynthError> {
        let p = Self { axis, angle };
        p.validate()?;
        Ok(p)
    }

    pub fn identity() -> Self {
        Self {
            axis: Axis::Z,
            angle: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if !(self.angle.is_finite() && self.angle.abs() <= MAX_POSE_ANGLE) {
            return Err(bad(format!(
                "pose angle must be within ±{MAX_POSE_ANGLE}°, got {}",
                self.angle
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for PoseSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{:+}", self.axis, self.angle)
    }
}

/// `(sin, cos)` with exact values on multiples of 90°.
fn sin_cos_deg(deg: f64) -> (f64, f64) {
    let quarter = deg / 90.0;
    if quarter.fract() == 0.0 {
        match (quarter as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        deg.to_radians().sin_cos()
    }
}

/// Depth of the surface at the grid center: the mean of the valid pixels
/// among the one to four pixels nearest the center, or the mean valid depth
/// when those are all holes. A point on the surface maps to itself, so a
/// rotation followed by its inverse finds the same pivot again.
fn pivot_depth(img: &RangeImage) -> f64 {
    let (w, h) = (img.width(), img.height());
    let rows = [(h - 1) / 2, h / 2];
    let cols = [(w - 1) / 2, w / 2];
    let mut center: Vec<f64> = Vec::with_capacity(4);
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            if (i == 1 && rows[0] == rows[1]) || (j == 1 && cols[0] == cols[1]) {
                continue;
            }
            center.extend(img.get(r, c));
        }
    }
    if center.is_empty() {
        let n = img.valid_count().max(1) as f64;
        img.valid_pixels().map(|(_, _, z)| z).sum::<f64>() / n
    } else {
        center.iter().sum::<f64>() / center.len() as f64
    }
}

/// A rigid rotation about an axis through the pivot point.
///
/// Points are `(x, y, z)` = (column, row, depth). The pivot is the grid
/// center in `x, y` and the surface depth there in `z`. The angle is allowed
/// to be arbitrary here; [`PoseSpec`] restricts it for pose sweeps.
#[derive(Debug, Clone, Copy)]
pub struct Rotation {
    axis: Axis,
    sin: f64,
    cos: f64,
    pivot: [f64; 3],
}

impl Rotation {
    pub fn for_image(img: &RangeImage, axis: Axis, angle_deg: f64) -> Self {
        let (sin, cos) = sin_cos_deg(angle_deg);
        Self {
            axis,
            sin,
            cos,
            pivot: [
                (img.width() as f64 - 1.0) / 2.0,
                (img.height() as f64 - 1.0) / 2.0,
                pivot_depth(img),
            ],
        }
    }

    /// Rotates a point. The coordinate along the rotation axis is passed
    /// through untouched.
    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        let [px, py, pz] = self.pivot;
        let (s, c) = (self.sin, self.cos);
        match self.axis {
            Axis::Z => {
                let (x, y) = (p[0] - px, p[1] - py);
                [x * c - y * s + px, x * s + y * c + py, p[2]]
            }
            Axis::Y => {
                let (x, z) = (p[0] - px, p[2] - pz);
                [x * c - z * s + px, p[1], x * s + z * c + pz]
            }
            Axis::X => {
                let (y, z) = (p[1] - py, p[2] - pz);
                [p[0], y * c - z * s + py, y * s + z * c + pz]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterOptions {
    /// Triangles whose depth changes faster than this (per pixel of grid
    /// distance) along any edge are treated as spanning a depth
    /// discontinuity and are not drawn.
    pub max_depth_slope: f64,
}

impl Default for RasterOptions {
    fn default() -> Self {
        Self {
            max_depth_slope: 5.0,
        }
    }
}

pub fn rotate_and_rasterize(img: &RangeImage, pose: &PoseSpec) -> Result<RangeImage, SynthError> {
    pose.validate()?;
    Ok(rasterize_rotated(img, pose.axis, pose.angle, &RasterOptions::default()))
}

/// Rotates the image and moves the truth landmarks with it. Landmark depths
/// are read from the source pixel nearest to each landmark.
pub fn rotate_with_truth(
    img: &RangeImage,
    truth: &Truth,
    pose: &PoseSpec,
) -> Result<(RangeImage, Truth), SynthError> {
    pose.validate()?;
    let out = rasterize_rotated(img, pose.axis, pose.angle, &RasterOptions::default());
    if pose.angle == 0.0 {
        return Ok((out, *truth));
    }
    let rot = Rotation::for_image(img, pose.axis, pose.angle);
    let move_point = |rc: [f64; 2]| -> Result<[f64; 2], SynthError> {
        let (r, c) = (rc[0].round(), rc[1].round());
        if r < 0.0 || c < 0.0 || r >= img.height() as f64 || c >= img.width() as f64 {
            return Err(bad(format!("landmark ({}, {}) is off the grid", rc[0], rc[1])));
        }
        let z = img
            .get(r as usize, c as usize)
            .ok_or_else(|| bad(format!("landmark ({}, {}) sits on a hole", rc[0], rc[1])))?;
        let p = rot.apply([rc[1], rc[0], z]);
        Ok([p[1], p[0]])
    };
    let moved = Truth {
        nose: move_point(truth.nose)?,
        eyes: [move_point(truth.eyes[0])?, move_point(truth.eyes[1])?],
    };
    Ok((out, moved))
}

/// Rotation followed by orthographic z-buffer rasterization onto the source
/// grid. The lifted grid is drawn as a triangle mesh, each cell center
/// taking the depth of the nearest (largest-depth) surface point over it.
/// Cells no triangle covers are invalid. A rotation of exactly zero returns
/// the input unchanged.
pub fn rasterize_rotated(img: &RangeImage, axis: Axis, angle_deg: f64, opts: &RasterOptions) -> RangeImage {
    if angle_deg == 0.0 {
        return img.clone();
    }
    let (w, h) = (img.width(), img.height());
    let rot = Rotation::for_image(img, axis, angle_deg);
    let lifted: Vec<Option<[f64; 3]>> = (0..w * h)
        .map(|i| {
            let (r, c) = (i / w, i % w);
            img.get(r, c).map(|z| rot.apply([c as f64, r as f64, z]))
        })
        .collect();

    let mut zbuf = vec![f64::NEG_INFINITY; w * h];
    let mut plot = |x: usize, y: usize, z: f64| {
        let i = y * w + x;
        if z > zbuf[i] {
            zbuf[i] = z;
        }
    };

    // Vertices that land exactly on a cell center keep their depth verbatim.
    for p in lifted.iter().flatten() {
        if p[0].fract() == 0.0 && p[1].fract() == 0.0 && p[0] >= 0.0 && p[1] >= 0.0 {
            let (x, y) = (p[0] as usize, p[1] as usize);
            if x < w && y < h {
                plot(x, y, p[2]);
            }
        }
    }

    let src = |r: usize, c: usize| img.get(r, c);
    let torn = |a: (usize, usize), b: (usize, usize)| -> bool {
        let (Some(za), Some(zb)) = (src(a.0, a.1), src(b.0, b.1)) else {
            return true;
        };
        let gd = ((a.0 as f64 - b.0 as f64).powi(2) + (a.1 as f64 - b.1 as f64).powi(2)).sqrt();
        (za - zb).abs() > opts.max_depth_slope * gd
    };

    for r in 0..h.saturating_sub(1) {
        for c in 0..w.saturating_sub(1) {
            let quad = [(r, c), (r, c + 1), (r + 1, c + 1), (r + 1, c)];
            let ok: Vec<bool> = quad.iter().map(|&(rr, cc)| img.is_valid(rr, cc)).collect();
            let tris: Vec<[(usize, usize); 3]> = match ok.iter().filter(|&&v| v).count() {
                4 => vec![[quad[0], quad[1], quad[2]], [quad[0], quad[2], quad[3]]],
                3 => {
                    let t: Vec<(usize, usize)> =
                        quad.iter().zip(&ok).filter(|(_, &v)| v).map(|(&q, _)| q).collect();
                    vec![[t[0], t[1], t[2]]]
                }
                _ => continue,
            };
            for tri in tris {
                if torn(tri[0], tri[1]) || torn(tri[1], tri[2]) || torn(tri[2], tri[0]) {
                    continue;
                }
                let v = tri.map(|(rr, cc)| lifted[rr * w + cc].expect("vertex is valid"));
                raster_triangle(&v, w, h, &mut plot);
            }
        }
    }

    let valid: Vec<bool> = zbuf.iter().map(|z| z.is_finite()).collect();
    let depth: Vec<f64> = zbuf.iter().map(|&z| if z.is_finite() { z } else { 0.0 }).collect();
    RangeImage::new(w, h, depth, valid).expect("z-buffer has the source dimensions")
}

fn raster_triangle(v: &[[f64; 3]; 3], w: usize, h: usize, plot: &mut impl FnMut(usize, usize, f64)) {
    let edge = |a: &[f64; 3], b: &[f64; 3], px: f64, py: f64| {
        (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0])
    };
    let area = edge(&v[0], &v[1], v[2][0], v[2][1]);
    if area.abs() < 1e-9 {
        return;
    }
    let xmin = v.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min).ceil().max(0.0);
    let xmax = v.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max).floor().min(w as f64 - 1.0);
    let ymin = v.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min).ceil().max(0.0);
    let ymax = v.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max).floor().min(h as f64 - 1.0);
    if xmin > xmax || ymin > ymax {
        return;
    }
    const TOL: f64 = 1e-9;
    for y in ymin as usize..=ymax as usize {
        for x in xmin as usize..=xmax as usize {
            let (px, py) = (x as f64, y as f64);
            let l0 = edge(&v[1], &v[2], px, py) / area;
            let l1 = edge(&v[2], &v[0], px, py) / area;
            let l2 = edge(&v[0], &v[1], px, py) / area;
            if l0 < -TOL || l1 < -TOL || l2 < -TOL {
                continue;
            }
            plot(x, y, l0 * v[0][2] + l1 * v[1][2] + l2 * v[2][2]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn surfaces() {
        let plane = make_surface(SurfaceKind::Plane, 32).unwrap();
        assert_eq!(plane.valid_count(), 32 * 32);
        assert!(plane.valid_pixels().all(|(_, _, z)| z == PLANE_DEPTH));

        let hemi = make_surface(SurfaceKind::Hemisphere(50.0), 101).unwrap();
        assert_eq!(hemi.get(50, 50), Some(50.0));
        assert!(!hemi.is_valid(0, 50) && !hemi.is_valid(50, 0) && !hemi.is_valid(0, 0));
        assert!(hemi.is_valid(50, 1));

        let saddle = make_surface(SurfaceKind::Saddle, 64).unwrap();
        let (u, v) = (10.0 - 31.5, 3.0 - 31.5);
        assert_eq!(saddle.get(3, 10), Some((u * u - v * v) / 2.0));

        assert!(make_surface(SurfaceKind::Plane, 15).is_err());
        assert!(make_surface(SurfaceKind::Hemisphere(-1.0), 32).is_err());
    }

    #[test]
    fn default_phantom_peak_is_nose() {
        let (img, truth) = make_phantom(&FacePhantom::default()).unwrap();
        let (r, c, _) = img
            .valid_pixels()
            .fold((0, 0, f64::NEG_INFINITY), |b, p| if p.2 > b.2 { p } else { b });
        assert_eq!((r, c), (64, 64));
        assert_eq!(truth.nose, [64.0, 64.0]);
        assert_eq!(truth.eyes, [[44.0, 44.0], [44.0, 84.0]]);
    }

    #[test]
    fn jittered_phantoms_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = FacePhantom::jittered(&mut rng);
            p.validate().unwrap();
            let (img, truth) = make_phantom(&p).unwrap();
            let best = img
                .valid_pixels()
                .fold((0, 0, f64::NEG_INFINITY), |b, q| if q.2 > b.2 { q } else { b });
            assert_eq!([best.0 as f64, best.1 as f64], truth.nose);
        }
    }

    #[test]
    fn phantom_validation() {
        let mut p = FacePhantom::default();
        p.nose.amplitude = -1.0;
        assert!(make_phantom(&p).is_err());
        let mut p = FacePhantom::default();
        p.eyes[0].amplitude = 2.0;
        assert!(p.validate().is_err());
        let mut p = FacePhantom::default();
        p.eyes[1].col = 50.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn zero_angle_is_identity() {
        let (img, truth) = make_phantom(&FacePhantom::default()).unwrap();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let pose = PoseSpec::new(axis, 0.0).unwrap();
            let (out, t) = rotate_with_truth(&img, &truth, &pose).unwrap();
            assert_eq!(out, img);
            assert_eq!(t, truth);
        }
    }

    #[test]
    fn quarter_turn_is_a_permutation() {
        let img = make_surface(SurfaceKind::Hemisphere(20.0), 40).unwrap();
        let out = rasterize_rotated(&img, Axis::Z, -90.0, &RasterOptions::default());
        assert_eq!(out, img.rot90());
        let odd = RangeImage::from_fn(17, 17, |r, c| (r * 31 + c * 7) as f64 * 0.1);
        let out = rasterize_rotated(&odd, Axis::Z, 90.0, &RasterOptions::default());
        assert_eq!(out, odd.rot90().rot90().rot90());
    }

    #[test]
    fn pose_range_is_enforced() {
        assert!(PoseSpec::new(Axis::Y, 60.0).is_ok());
        assert!(PoseSpec::new(Axis::Y, 61.0).is_err());
        assert!(PoseSpec::new(Axis::Y, f64::NAN).is_err());
    }

    #[test]
    fn tilted_plane_stays_planar() {
        let img = RangeImage::from_fn(40, 40, |r, c| 50.0 + 0.2 * c as f64 - 0.1 * r as f64);
        for (axis, ang) in [(Axis::X, 25.0), (Axis::Y, -35.0), (Axis::Z, 15.0)] {
            let out = rasterize_rotated(&img, axis, ang, &RasterOptions::default());
            assert!(out.valid_count() > 800);
            // Every rasterized value lies on one plane: second differences vanish.
            for r in 1..39 {
                for c in 1..39 {
                    if let (Some(a), Some(b), Some(m)) = (out.get(r, c - 1), out.get(r, c + 1), out.get(r, c)) {
                        assert!((a + b - 2.0 * m).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn depth_steps_are_not_bridged() {
        // Two plateaus 100 apart: every rasterized cell must sit on one of them.
        let img = RangeImage::from_fn(30, 30, |_, c| if c < 15 { 0.0 } else { 100.0 });
        let out = rasterize_rotated(&img, Axis::Y, 20.0, &RasterOptions::default());
        let rot = Rotation::for_image(&img, Axis::Y, 20.0);
        let range = |cols: std::ops::Range<usize>, z: f64| {
            cols.map(|c| rot.apply([c as f64, 0.0, z])[2])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let (lo0, hi0) = range(0..15, 0.0);
        let (lo1, hi1) = range(15..30, 100.0);
        assert!(hi0 < lo1);
        for (_, _, z) in out.valid_pixels() {
            let on_low = z >= lo0 - 1e-9 && z <= hi0 + 1e-9;
            let on_high = z >= lo1 - 1e-9 && z <= hi1 + 1e-9;
            assert!(on_low || on_high, "bridged value {z}");
        }
    }
}
