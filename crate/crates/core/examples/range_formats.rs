//! Writes a range image in both on-disk formats, reads it back and crops it.

use rangeface::rangeio::{load_range_image, save_range_image, RangeFormat};
use rangeface::{crop, CropRect, RangeImage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let img = RangeImage::from_fn(64, 48, |r, c| {
        let (y, x) = (r as f64 - 24.0, c as f64 - 32.0);
        if x * x + y * y < 400.0 {
            100.0 - (x * x + y * y) / 40.0
        } else {
            f64::NAN
        }
    });
    let dir = std::env::temp_dir().join(format!("rangeface-formats-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    for (name, fmt) in [("disk.txt", RangeFormat::AsciiGrid), ("disk.pgm", RangeFormat::Pgm16)] {
        let path = dir.join(name);
        save_range_image(&img, &path, fmt)?;
        let back = load_range_image(&path, fmt)?;
        let worst = img
            .valid_pixels()
            .filter_map(|(r, c, z)| back.get(r, c).map(|z2| (z2 - z).abs()))
            .fold(0.0, f64::max);
        println!(
            "{name}: {} bytes, {} valid pixels, same mask: {}, max depth error {worst:.2e}",
            std::fs::metadata(&path)?.len(),
            back.valid_count(),
            back.mask() == img.mask()
        );
    }

    let center = CropRect::centered(img.height(), img.width(), 32, 32);
    let cut = crop(&img, &center)?;
    println!("central 32x32 crop keeps {} valid pixels", cut.valid_count());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
