//! File formats: PGM/PPM images, CSV tables, AMPH accumulators and detection
//! reports. Every reader treats its input as untrusted.

mod amph;
mod pgm;
mod table;

pub use amph::{read_amph, write_amph, AMPH_MAGIC};
pub use pgm::{
    heatmap_range, read_heatmap_scale, read_pgm, write_heatmap_pgm, write_heatmap_ppm, write_pgm, PgmEncoding,
    MAX_PIXELS,
};
pub use table::{
    read_detection_report, read_grid_csv, read_sinogram_csv, write_detection_report, write_grid_csv, write_matrix_csv,
    write_sinogram_csv,
};

/// Formats `v` like C's `printf("%.17g", v)`, independent of locale.
pub fn fmt_g17(v: f64) -> String {
    fmt_g(v, 17)
}

fn fmt_g(v: f64, precision: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let p = precision.max(1);
    // Round to p significant digits first; the exponent after rounding picks
    // the style.
    let sci = format!("{:.*e}", p - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp) as usize;
        trim_fraction(&format!("{:.*}", decimals, v)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Parses a real written by [`fmt_g17`] (or any ordinary decimal form).
pub(crate) fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let v: f64 = s.parse().ok()?;
    v.is_finite().then_some(v)
}
