//! Magnitude heatmaps as plain PPM (`P3`) plus the matrix as CSV.
//!
//! Rows are scales with `a_max` at the top, columns are time. Colours follow
//! the fixed "hot" ramp on `t = |v| / max|v|`: black to red over `t ∈ [0, 1/3]`,
//! red to yellow over `[1/3, 2/3]`, yellow to white over `[2/3, 1]`. An all-zero
//! surface renders black.

use crate::g17::g17;
use crate::surface::SurfaceFile;

/// `(r, g, b)` for `t ∈ [0, 1]`.
pub fn hot(t: f64) -> [u8; 3] {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let channel = |offset: f64| (((3.0 * t - offset).clamp(0.0, 1.0)) * 255.0).round() as u8;
    [channel(0.0), channel(1.0), channel(2.0)]
}

pub struct Heatmap {
    pub ppm: String,
    pub csv: String,
}

pub fn render_heatmap(surface: &SurfaceFile) -> Heatmap {
    let magnitudes = surface.magnitudes();
    let scales = surface.scales();
    let cols = magnitudes.first().map_or(0, Vec::len);
    let peak = magnitudes.iter().flatten().fold(0.0f64, |m, &v| m.max(v));

    let mut ppm = format!("P3\n{cols} {}\n255\n", magnitudes.len());
    let mut csv = String::from("scale");
    for j in 0..cols {
        csv.push(',');
        csv.push_str(&g17(surface.column_time(j)));
    }
    csv.push('\n');
    for (row, a) in magnitudes.iter().zip(scales).rev() {
        csv.push_str(&g17(*a));
        for &v in row {
            let [r, g, b] = hot(if peak > 0.0 { v / peak } else { 0.0 });
            ppm.push_str(&format!("{r} {g} {b}\n"));
            csv.push(',');
            csv.push_str(&g17(v));
        }
        csv.push('\n');
    }
    Heatmap { ppm, csv }
}
