//! Labels a handful of (H, K) pairs and prints the palette value of each
//! class.

use rangeface::curvature::classify_hk;
use rangeface::ClassifyParams;

fn main() {
    let p = ClassifyParams::default();
    let pairs = [
        (-0.02, 4e-4),
        (-0.01, 0.0),
        (-0.01, -1e-4),
        (0.0, -1e-4),
        (0.0, 0.0),
        (0.0, 1e-4),
        (0.01, -1e-4),
        (0.01, 0.0),
        (0.02, 4e-4),
    ];
    for (h, k) in pairs {
        let class = classify_hk(h, k, &p);
        println!("H={h:>7} K={k:>7} -> {class:?} (palette {})", class.palette());
    }
}
