//! HK-labels the default phantom and lists its largest connected regions.

use rangeface::pipeline::analyze;
use rangeface::{make_phantom, segment_regions, FacePhantom, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (img, _) = make_phantom(&FacePhantom::default())?;
    let out = analyze(&img, &PipelineConfig::default())?;
    let regions = segment_regions(&out.classes, &out.field);
    println!("{} regions", regions.len());
    for r in regions.iter().take(8) {
        let (row, col) = r.pixels[r.pixels.len() / 2];
        println!(
            "{:<20} {:>6} px  mean H {:>10.3e}  mean K {:>10.3e}  e.g. ({row}, {col})",
            format!("{:?}", r.class),
            r.len(),
            r.mean_h,
            r.mean_k
        );
    }
    Ok(())
}
