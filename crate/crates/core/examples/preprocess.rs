//! Background removal and smoothing on a noisy phantom placed in front of a
//! flat backdrop.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rangeface::preprocess::{apply_threshold, gaussian_smooth, otsu_threshold, SmoothingParams};
use rangeface::synth::add_depth_noise;
use rangeface::{make_phantom, FacePhantom, RangeImage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (face, _) = make_phantom(&FacePhantom::default())?;
    // Outside a central ellipse the scene is a wall far behind the face.
    let scene = RangeImage::from_fn(face.width(), face.height(), |r, c| {
        let (y, x) = ((r as f64 - 64.0) / 60.0, (c as f64 - 64.0) / 44.0);
        if x * x + y * y <= 1.0 {
            face.get(r, c).unwrap_or(0.0)
        } else {
            5.0
        }
    });
    let noisy = add_depth_noise(&scene, 0.3, &mut ChaCha8Rng::seed_from_u64(1))?;

    let t = otsu_threshold(&noisy, 256)?;
    let fg = apply_threshold(&noisy, t);
    println!("otsu threshold {t:.3}: kept {} of {} pixels", fg.valid_count(), noisy.valid_count());

    let smooth = gaussian_smooth(&fg, &SmoothingParams::default())?;
    let rough = |img: &RangeImage| {
        let (mut sum, mut n) = (0.0, 0usize);
        for (r, c, z) in img.valid_pixels() {
            if let Some(z2) = img.get(r, c + 1) {
                sum += (z2 - z).abs();
                n += 1;
            }
        }
        sum / n as f64
    };
    println!("mean horizontal step: {:.4} before smoothing, {:.4} after", rough(&fg), rough(&smooth));
    Ok(())
}
