//! Estimates H and K at the apex of analytic surfaces and compares them with
//! the closed-form values.

use rangeface::{compute_curvature_field, make_surface, FitWindow, SurfaceKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 101;
    let c = n / 2;
    let window = FitWindow::new(2)?;
    let r = 50.0;
    let cases = [
        ("hemisphere R=50", SurfaceKind::Hemisphere(r), -1.0 / r, 1.0 / (r * r)),
        ("cylinder R=50", SurfaceKind::Cylinder(r), -0.5 / r, 0.0),
        ("saddle", SurfaceKind::Saddle, 0.0, -1.0),
        ("plane", SurfaceKind::Plane, 0.0, 0.0),
    ];
    println!("{:<16} {:>12} {:>12} {:>12} {:>12}", "surface", "H", "H exact", "K", "K exact");
    for (name, kind, h_true, k_true) in cases {
        let field = compute_curvature_field(&make_surface(kind, n)?, window);
        let (h, k) = field.get(c, c).ok_or("apex has no fit")?;
        println!("{name:<16} {h:>12.3e} {h_true:>12.3e} {k:>12.3e} {k_true:>12.3e}");
    }
    Ok(())
}
