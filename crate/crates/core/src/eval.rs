//! Pose-sweep evaluation on jittered face phantoms.
//!
//! For every pose and trial a phantom is drawn from a seeded generator,
//! rotated, re-rasterized and run through the pipeline. A nose counts as
//! found when it lies within `nose_tolerance` pixels of the moved truth; the
//! eyes count when both detected corners lie within `eye_tolerance` of the
//! two moved pit centers (in either order). The max-intensity baseline is
//! scored on the same preprocessed image.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::landmarks::{detect_landmarks, detect_nose_tip_max_intensity, EyeCorner};
use crate::pipeline::{analyze, PipelineConfig};
use crate::synth::{make_phantom, rotate_with_truth, Axis, FacePhantom, PoseSpec, Truth};

pub const DEFAULT_NOSE_TOLERANCE: f64 = 3.0;
pub const DEFAULT_EYE_TOLERANCE: f64 = 4.0;

/// The standard angle grid: ±15/±18/±30/±38/±40 about Y, ±15/±18/±60 about
/// X and ±15/±18/±30 about Z.
pub fn standard_poses() -> Vec<PoseSpec> {
    let grid: [(Axis, &[f64]); 3] = [
        (Axis::Y, &[15.0, 18.0, 30.0, 38.0, 40.0]),
        (Axis::X, &[15.0, 18.0, 60.0]),
        (Axis::Z, &[15.0, 18.0, 30.0]),
    ];
    let mut out = Vec::new();
    for (axis, angles) in grid {
        for &a in angles {
            out.push(PoseSpec { axis, angle: -a });
            out.push(PoseSpec { axis, angle: a });
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EvalSettings {
    pub trials: usize,
    pub seed: u64,
    pub nose_tolerance: f64,
    pub eye_tolerance: f64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            trials: 20,
            seed: 0,
            nose_tolerance: DEFAULT_NOSE_TOLERANCE,
            eye_tolerance: DEFAULT_EYE_TOLERANCE,
        }
    }
}

/// Counts for one (axis, angle) cell.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EvalCell {
    pub axis: Axis,
    pub angle: f64,
    pub total: usize,
    pub nose_detected: usize,
    pub eyes_detected: usize,
    pub baseline_nose_detected: usize,
}

impl EvalCell {
    fn rate(n: usize, total: usize) -> f64 {
        if total == 0 {
            0.0
        } else {
            n as f64 / total as f64
        }
    }

    pub fn nose_rate(&self) -> f64 {
        Self::rate(self.nose_detected, self.total)
    }

    pub fn eye_rate(&self) -> f64 {
        Self::rate(self.eyes_detected, self.total)
    }

    pub fn baseline_rate(&self) -> f64 {
        Self::rate(self.baseline_nose_detected, self.total)
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EvalReport {
    pub settings: EvalSettings,
    pub config: PipelineConfig,
    pub cells: Vec<EvalCell>,
    pub total: usize,
    pub nose_rate: f64,
    pub eye_rate: f64,
    pub baseline_nose_rate: f64,
}

/// Outcome of a single trial.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub nose: bool,
    pub eyes: bool,
    pub baseline_nose: bool,
}

/// The phantom used for `trial`; identical across poses.
pub fn trial_phantom(seed: u64, trial: usize) -> FacePhantom {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    FacePhantom::jittered(&mut rng)
}

fn dist(rc: [f64; 2], row: usize, col: usize) -> f64 {
    ((rc[0] - row as f64).powi(2) + (rc[1] - col as f64).powi(2)).sqrt()
}

fn eyes_match(found: &[EyeCorner; 2], truth: &Truth, tol: f64) -> bool {
    let ok = |e: &EyeCorner, t: [f64; 2]| dist(t, e.row, e.col) <= tol;
    (ok(&found[0], truth.eyes[0]) && ok(&found[1], truth.eyes[1]))
        || (ok(&found[0], truth.eyes[1]) && ok(&found[1], truth.eyes[0]))
}

/// Runs one phantom through one pose. Any failure scores as a miss.
pub fn run_trial(phantom: &FacePhantom, pose: &PoseSpec, cfg: &PipelineConfig, s: &EvalSettings) -> TrialOutcome {
    let Ok((img, truth)) = make_phantom(phantom) else {
        return TrialOutcome::default();
    };
    let Ok((img, truth)) = rotate_with_truth(&img, &truth, pose) else {
        return TrialOutcome::default();
    };
    let Ok(out) = analyze(&img, cfg) else {
        return TrialOutcome::default();
    };
    let mut o = TrialOutcome::default();
    if let Ok(peak) = detect_nose_tip_max_intensity(&out.intensity) {
        o.baseline_nose = dist(truth.nose, peak.row, peak.col) <= s.nose_tolerance;
    }
    if let Ok(res) = detect_landmarks(&out.field, &out.classes, &out.intensity, &cfg.detect) {
        o.nose = res.nose.is_some_and(|n| dist(truth.nose, n.row, n.col) <= s.nose_tolerance);
        o.eyes = res.eyes.is_some_and(|e| eyes_match(&e, &truth, s.eye_tolerance));
    }
    o
}

/// Runs every (pose, trial) pair in parallel and tallies results in pose
/// order.
pub fn evaluate(poses: &[PoseSpec], cfg: &PipelineConfig, s: &EvalSettings) -> EvalReport {
    let phantoms: Vec<FacePhantom> = (0..s.trials).map(|t| trial_phantom(s.seed, t)).collect();
    let jobs: Vec<(usize, usize)> = (0..poses.len())
        .flat_map(|p| (0..s.trials).map(move |t| (p, t)))
        .collect();
    let outcomes: Vec<TrialOutcome> = jobs
        .par_iter()
        .map(|&(p, t)| run_trial(&phantoms[t], &poses[p], cfg, s))
        .collect();

    let cells: Vec<EvalCell> = poses
        .iter()
        .enumerate()
        .map(|(p, pose)| {
            let chunk = &outcomes[p * s.trials..(p + 1) * s.trials];
            EvalCell {
                axis: pose.axis,
                angle: pose.angle,
                total: chunk.len(),
                nose_detected: chunk.iter().filter(|o| o.nose).count(),
                eyes_detected: chunk.iter().filter(|o| o.eyes).count(),
                baseline_nose_detected: chunk.iter().filter(|o| o.baseline_nose).count(),
            }
        })
        .collect();

    let total: usize = cells.iter().map(|c| c.total).sum();
    let sum = |f: fn(&EvalCell) -> usize| cells.iter().map(f).sum::<usize>();
    EvalReport {
        settings: s.clone(),
        config: *cfg,
        total,
        nose_rate: EvalCell::rate(sum(|c| c.nose_detected), total),
        eye_rate: EvalCell::rate(sum(|c| c.eyes_detected), total),
        baseline_nose_rate: EvalCell::rate(sum(|c| c.baseline_nose_detected), total),
        cells,
    }
}

impl EvalReport {
    /// Cells about `axis` with `|angle| >= min_abs`.
    pub fn cells_where(&self, axis: Axis, min_abs: f64) -> impl Iterator<Item = &EvalCell> {
        self.cells
            .iter()
            .filter(move |c| c.axis == axis && c.angle.abs() >= min_abs)
    }

    /// Fixed-width text table, one row per pose plus an overall row.
    pub fn to_table(&self) -> String {
        let s = &self.settings;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# hit = nose within {} px, both eye corners within {} px of moved truth",
            s.nose_tolerance, s.eye_tolerance
        );
        let _ = writeln!(out, "# trials per pose: {}, seed: {}", s.trials, s.seed);
        let _ = writeln!(
            out,
            "{:<6} {:>7} {:>6} {:>10} {:>10} {:>14}",
            "axis", "angle", "total", "nose", "eyes", "max-intensity"
        );
        let frac = |n: usize, t: usize| format!("{n}/{t}");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{:<6} {:>+7} {:>6} {:>10} {:>10} {:>14}",
                c.axis.to_string(),
                c.angle,
                c.total,
                frac(c.nose_detected, c.total),
                frac(c.eyes_detected, c.total),
                frac(c.baseline_nose_detected, c.total)
            );
        }
        let _ = writeln!(
            out,
            "{:<6} {:>7} {:>6} {:>9.2}% {:>9.2}% {:>13.2}%",
            "all",
            "",
            self.total,
            100.0 * self.nose_rate,
            100.0 * self.eye_rate,
            100.0 * self.baseline_nose_rate
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_grid_shape() {
        let p = standard_poses();
        assert_eq!(p.len(), 22);
        assert_eq!(p.iter().filter(|p| p.axis == Axis::Y).count(), 10);
        assert!(p.iter().all(|p| p.validate().is_ok()));
    }

    #[test]
    fn trial_phantoms_are_seeded() {
        assert_eq!(trial_phantom(3, 7), trial_phantom(3, 7));
        assert_ne!(trial_phantom(3, 7), trial_phantom(3, 8));
        assert_ne!(trial_phantom(3, 7), trial_phantom(4, 7));
    }

    #[test]
    fn eye_matching_ignores_order() {
        let t = Truth {
            nose: [0.0, 0.0],
            eyes: [[10.0, 10.0], [10.0, 30.0]],
        };
        let e = |row, col| EyeCorner { row, col, k: 1.0 };
        assert!(eyes_match(&[e(11, 31), e(9, 12)], &t, 4.0));
        assert!(!eyes_match(&[e(10, 10), e(10, 11)], &t, 4.0));
    }

    #[test]
    fn frontal_cell_counts() {
        let s = EvalSettings {
            trials: 3,
            ..Default::default()
        };
        let r = evaluate(&[PoseSpec::identity()], &PipelineConfig::default(), &s);
        assert_eq!(r.cells.len(), 1);
        let c = &r.cells[0];
        assert_eq!(c.total, 3);
        assert_eq!(c.nose_detected, 3);
        assert!(r.to_table().contains("3/3"));
    }
}
