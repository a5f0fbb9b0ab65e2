//! Background removal by Otsu thresholding and mask-aware Gaussian smoothing.

use rayon::prelude::*;
use thiserror::Error;

use crate::rangeio::RangeImage;

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("histogram is degenerate: need at least two distinct valid depths")]
    DegenerateHistogram,
    #[error("bin count must be at least 2, got {0}")]
    TooFewBins(usize),
    #[error("invalid smoothing parameters: sigma={sigma}, radius={radius}")]
    BadSmoothing { sigma: f64, radius: usize },
}

/// Equal-width histogram over `[min, max]` of the valid depths.
///
/// Bin `k` covers `[edge(k), edge(k + 1))`, the last bin is closed on the
/// right. `bin_of` and `edge` agree exactly, so "bin index < k" and
/// "depth < edge(k)" select the same pixels.
#[derive(Debug, Clone)]
pub struct DepthHistogram {
    pub min: f64,
    pub max: f64,
    pub counts: Vec<u64>,
}

impl DepthHistogram {
    pub fn build(img: &RangeImage, bins: usize) -> Result<Self, PreprocessError> {
        if bins < 2 {
            return Err(PreprocessError::TooFewBins(bins));
        }
        let (min, max) = img
            .depth_range()
            .ok_or(PreprocessError::DegenerateHistogram)?;
        if min >= max {
            return Err(PreprocessError::DegenerateHistogram);
        }
        let mut h = Self {
            min,
            max,
            counts: vec![0; bins],
        };
        for (_, _, z) in img.valid_pixels() {
            let k = h.bin_of(z);
            h.counts[k] += 1;
        }
        Ok(h)
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    /// Lower edge of bin `k` (`k == bins` gives `max`).
    pub fn edge(&self, k: usize) -> f64 {
        if k >= self.bins() {
            return self.max;
        }
        self.min + (self.max - self.min) * (k as f64) / (self.bins() as f64)
    }

    pub fn bin_of(&self, z: f64) -> usize {
        let n = self.bins();
        let guess = ((z - self.min) / (self.max - self.min) * n as f64).floor();
        let mut k = if guess.is_nan() || guess < 0.0 {
            0
        } else {
            (guess as usize).min(n - 1)
        };
        // Nudge the floor estimate so it agrees with `edge` bit-for-bit.
        while k > 0 && z < self.edge(k) {
            k -= 1;
        }
        while k + 1 < n && z >= self.edge(k + 1) {
            k += 1;
        }
        k
    }
}

/// Index `k` in `1..bins` maximizing the between-class variance of the split
/// "bins below k" / "bins from k up". Ties go to the smallest `k`.
pub fn otsu_split(counts: &[u64]) -> Option<usize> {
    let total: u64 = counts.iter().sum();
    if counts.len() < 2 || total == 0 {
        return None;
    }
    let total_f = total as f64;
    let sum_all: f64 = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();

    let mut w0 = 0u64;
    let mut sum0 = 0.0;
    let mut best: Option<(usize, f64)> = None;
    for k in 1..counts.len() {
        w0 += counts[k - 1];
        sum0 += (k - 1) as f64 * counts[k - 1] as f64;
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let (p0, p1) = (w0 as f64, w1 as f64);
        let m0 = sum0 / p0;
        let m1 = (sum_all - sum0) / p1;
        let between = p0 * p1 * (m0 - m1) * (m0 - m1) / (total_f * total_f);
        if best.is_none_or(|(_, b)| between > b) {
            best = Some((k, between));
        }
    }
    best.map(|(k, _)| k)
}

/// Otsu threshold over the valid depths: pixels with `depth < t` form the
/// background class.
pub fn otsu_threshold(img: &RangeImage, bins: usize) -> Result<f64, PreprocessError> {
    let hist = DepthHistogram::build(img, bins)?;
    let k = otsu_split(&hist.counts).ok_or(PreprocessError::DegenerateHistogram)?;
    Ok(hist.edge(k))
}

/// Invalidates every pixel with `depth < t`.
pub fn apply_threshold(img: &RangeImage, t: f64) -> RangeImage {
    let keep = img
        .depths()
        .iter()
        .zip(img.mask())
        .map(|(&z, &v)| v && z >= t)
        .collect();
    img.with_mask(keep)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SmoothingParams {
    /// Standard deviation in pixels.
    pub sigma: f64,
    /// Kernel half-width in pixels.
    pub radius: usize,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            radius: 2,
        }
    }
}

impl SmoothingParams {
    pub fn validate(&self) -> Result<(), PreprocessError> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) || self.radius < 1 {
            return Err(PreprocessError::BadSmoothing {
                sigma: self.sigma,
                radius: self.radius,
            });
        }
        Ok(())
    }

    /// Normalized 1-D kernel of length `2 * radius + 1`.
    pub fn kernel(&self) -> Vec<f64> {
        let r = self.radius as i64;
        let raw: Vec<f64> = (-r..=r)
            .map(|i| (-((i * i) as f64) / (2.0 * self.sigma * self.sigma)).exp())
            .collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / s).collect()
    }
}

/// Symmetric 1-D pass over `(weighted depth, weight)` pairs. Samples at
/// equal distance are added before weighting, so the result is exactly
/// invariant under mirroring.
fn symmetric_pass(half: &[f64], at: impl Fn(isize) -> Option<(f64, f64)>) -> (f64, f64) {
    let (n0, d0) = at(0).unwrap_or((0.0, 0.0));
    let mut num = half[0] * n0;
    let mut den = half[0] * d0;
    for (d, wt) in half.iter().enumerate().skip(1) {
        let (nl, dl) = at(-(d as isize)).unwrap_or((0.0, 0.0));
        let (nr, dr) = at(d as isize).unwrap_or((0.0, 0.0));
        num += wt * (nl + nr);
        den += wt * (dl + dr);
    }
    (num, den)
}

/// Separable normalized convolution: both the masked depths and the mask
/// are blurred, and their ratio is taken at every valid pixel. Invalid
/// pixels contribute nothing and stay invalid.
pub fn gaussian_smooth(
    img: &RangeImage,
    p: &SmoothingParams,
) -> Result<RangeImage, PreprocessError> {
    p.validate()?;
    let kernel = p.kernel();
    // Center weight followed by the weights at distance 1..=radius.
    let half = &kernel[p.radius..];
    let (w, h) = (img.width() as isize, img.height() as isize);
    let depth = img.depths();
    let mask = img.mask();

    // Horizontal pass: (weighted depth sum, weight sum) per pixel.
    let horiz: Vec<(f64, f64)> = (0..h)
        .into_par_iter()
        .flat_map_iter(|row| {
            (0..w).map(move |col| {
                symmetric_pass(half, |d| {
                    let c = col + d;
                    if c < 0 || c >= w {
                        return None;
                    }
                    let i = (row * w + c) as usize;
                    mask[i].then(|| (depth[i], 1.0))
                })
            })
        })
        .collect();

    let out: Vec<f64> = (0..h)
        .into_par_iter()
        .flat_map_iter(|row| {
            let horiz = &horiz;
            (0..w).map(move |col| {
                let i = (row * w + col) as usize;
                if !mask[i] {
                    return depth[i];
                }
                let (num, den) = symmetric_pass(half, |d| {
                    let rr = row + d;
                    (rr >= 0 && rr < h).then(|| horiz[(rr * w + col) as usize])
                });
                // den > 0: the center pixel itself is valid.
                num / den
            })
        })
        .collect();
    Ok(img.with_depths(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bimodal() -> RangeImage {
        RangeImage::from_fn(10, 10, |r, _| if r < 5 { 0.0 } else { 100.0 })
    }

    #[test]
    fn bimodal_split_is_exact() {
        let img = bimodal();
        let t = otsu_threshold(&img, 256).unwrap();
        assert!(t > 0.0 && t <= 100.0);
        let kept = apply_threshold(&img, t);
        for (r, c, _) in img.valid_pixels() {
            assert_eq!(kept.is_valid(r, c), r >= 5);
        }
        assert_eq!(kept.valid_count(), 50);
    }

    #[test]
    fn constant_image_is_degenerate() {
        let img = RangeImage::from_fn(4, 4, |_, _| 3.0);
        assert_eq!(
            otsu_threshold(&img, 256),
            Err(PreprocessError::DegenerateHistogram)
        );
        assert_eq!(otsu_threshold(&bimodal(), 1), Err(PreprocessError::TooFewBins(1)));
    }

    #[test]
    fn threshold_extremes() {
        let img = bimodal();
        assert_eq!(apply_threshold(&img, -1e300), img);
        assert_eq!(apply_threshold(&img, 101.0).valid_count(), 0);
    }

    /// Exhaustive between-class variance from raw class members.
    fn brute_force_split(counts: &[u64]) -> usize {
        let values: Vec<f64> = counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i as f64, c as usize))
            .collect();
        let n = values.len() as f64;
        let mut best = (0usize, -1.0f64);
        for k in 1..counts.len() {
            let lo: Vec<f64> = values.iter().copied().filter(|&v| v < k as f64).collect();
            let hi: Vec<f64> = values.iter().copied().filter(|&v| v >= k as f64).collect();
            if lo.is_empty() || hi.is_empty() {
                continue;
            }
            let m0 = lo.iter().sum::<f64>() / lo.len() as f64;
            let m1 = hi.iter().sum::<f64>() / hi.len() as f64;
            let var = (lo.len() as f64 / n) * (hi.len() as f64 / n) * (m0 - m1).powi(2);
            if var > best.1 {
                best = (k, var);
            }
        }
        best.0
    }

    #[test]
    fn random_histograms_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let counts: Vec<u64> = (0..64).map(|_| rng.random_range(0..40)).collect();
            assert_eq!(otsu_split(&counts), Some(brute_force_split(&counts)));
        }
    }

    #[test]
    fn bin_edges_agree_with_binning() {
        let img = RangeImage::from_fn(7, 7, |r, c| (r as f64 * 0.37 + c as f64 * 1.3).sin());
        let h = DepthHistogram::build(&img, 13).unwrap();
        for (_, _, z) in img.valid_pixels() {
            let k = h.bin_of(z);
            assert!(z >= h.edge(k));
            assert!(k + 1 == h.bins() || z < h.edge(k + 1));
        }
        assert_eq!(h.counts.iter().sum::<u64>(), 49);
    }

    #[test]
    fn constant_is_preserved() {
        let img = RangeImage::from_fn(9, 7, |_, _| 4.25);
        let out = gaussian_smooth(&img, &SmoothingParams::default()).unwrap();
        for (_, _, z) in out.valid_pixels() {
            assert!((z - 4.25).abs() < 1e-12);
        }
    }

    #[test]
    fn ramp_interior_is_preserved() {
        let img = RangeImage::from_fn(12, 12, |_, c| 0.7 * c as f64);
        let out = gaussian_smooth(&img, &SmoothingParams::default()).unwrap();
        for r in 2..10 {
            for c in 2..10 {
                assert!((out.get(r, c).unwrap() - img.get(r, c).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn impulse_response_is_normalized_kernel() {
        // Independent 2-D kernel: direct exp weights over the 5x5 support.
        let sigma = 1.0f64;
        let mut k2 = [[0.0f64; 5]; 5];
        let mut total = 0.0;
        for (i, row) in k2.iter_mut().enumerate() {
            for (j, w) in row.iter_mut().enumerate() {
                let (di, dj) = (i as f64 - 2.0, j as f64 - 2.0);
                *w = (-(di * di + dj * dj) / (2.0 * sigma * sigma)).exp();
                total += *w;
            }
        }
        let img = RangeImage::from_fn(11, 11, |r, c| if (r, c) == (5, 5) { 1.0 } else { 0.0 });
        let out = gaussian_smooth(&img, &SmoothingParams { sigma, radius: 2 }).unwrap();
        for r in 3..=7 {
            for c in 3..=7 {
                let expect = k2[r - 3][c - 3] / total;
                assert!((out.get(r, c).unwrap() - expect).abs() < 1e-15);
            }
        }
        assert!((out.get(5, 5).unwrap() - k2[2][2] / total).abs() < 1e-15);
        assert_eq!(out.get(5, 8), Some(0.0));
    }

    #[test]
    fn holes_stay_holes_and_do_not_leak() {
        let mut depth: Vec<f64> = (0..25).map(|_| 2.0).collect();
        depth[12] = f64::NAN;
        depth[13] = 1e9;
        let mut img = RangeImage::from_depths(5, 5, depth).unwrap();
        img = img.with_mask(img.mask().iter().enumerate().map(|(i, &v)| v && i != 13).collect());
        let out = gaussian_smooth(&img, &SmoothingParams::default()).unwrap();
        assert_eq!(out.mask(), img.mask());
        for (_, _, z) in out.valid_pixels() {
            assert!((z - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_params() {
        let img = bimodal();
        assert!(gaussian_smooth(&img, &SmoothingParams { sigma: 0.0, radius: 2 }).is_err());
        assert!(gaussian_smooth(&img, &SmoothingParams { sigma: 1.0, radius: 0 }).is_err());
    }
}
