//! Detects the nose tip and eye corners on a rotated phantom and reports the
//! distance to the known landmark positions.

use rangeface::pipeline::detect;
use rangeface::synth::rotate_with_truth;
use rangeface::{make_phantom, Axis, FacePhantom, PipelineConfig, PoseSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = PipelineConfig::default();
    let (img, truth) = make_phantom(&FacePhantom::default())?;
    for pose in [PoseSpec::identity(), PoseSpec::new(Axis::Y, 30.0)?, PoseSpec::new(Axis::Z, -18.0)?] {
        let (img, truth) = rotate_with_truth(&img, &truth, &pose)?;
        let (_, res) = detect(&img, &cfg)?;
        let d = |t: [f64; 2], r: usize, c: usize| (t[0] - r as f64).hypot(t[1] - c as f64);
        print!("{}{:+}: ", pose.axis, pose.angle);
        match res.nose {
            Some(n) => print!("nose ({}, {}) off by {:.2} px", n.row, n.col, d(truth.nose, n.row, n.col)),
            None => print!("nose not found"),
        }
        match res.eyes {
            Some([a, b]) => println!("; eyes ({}, {}) and ({}, {})", a.row, a.col, b.row, b.col),
            None => println!("; eyes not found"),
        }
    }
    Ok(())
}
