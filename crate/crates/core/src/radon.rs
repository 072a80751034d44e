//! Line Radon transform and the Fourier-slice relation.
//!
//! A line is `x cos(phi) + y sin(phi) = r`. Integrals are taken by walking the
//! line from its foot point `r (cos phi, sin phi)` in steps of half a sample
//! spacing, bilinearly sampling the zero-padded grid.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::ScalarGrid;
use crate::wave::Amplitude;

/// Radon samples over `r` in `[r_min, r_max]` (inclusive, `n_r` points) and
/// `phi = j pi / n_phi` for `j < n_phi`. Stored one row per angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    r_min: f64,
    r_max: f64,
    n_r: usize,
    n_phi: usize,
    values: Vec<f64>,
}

impl Sinogram {
    pub fn new(r_min: f64, r_max: f64, n_r: usize, n_phi: usize, values: Vec<f64>) -> Result<Self> {
        check_lattice(r_min, r_max, n_r, n_phi)?;
        if values.len() != n_r * n_phi {
            return Err(Error::BadLattice(format!(
                "{} values for a {n_phi}x{n_r} sinogram",
                values.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::BadLattice("non-finite sinogram value".into()));
        }
        Ok(Self {
            r_min,
            r_max,
            n_r,
            n_phi,
            values,
        })
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }
    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn n_r(&self) -> usize {
        self.n_r
    }
    pub fn n_phi(&self) -> usize {
        self.n_phi
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dr(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n_r - 1) as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        self.r_min + i as f64 * self.dr()
    }

    pub fn phi(&self, j: usize) -> f64 {
        j as f64 * PI / self.n_phi as f64
    }

    pub fn get(&self, phi_idx: usize, r_idx: usize) -> f64 {
        self.values[phi_idx * self.n_r + r_idx]
    }

    pub fn column(&self, phi_idx: usize) -> &[f64] {
        &self.values[phi_idx * self.n_r..(phi_idx + 1) * self.n_r]
    }

    /// Index of the largest sample at angle `phi_idx`; the first wins ties.
    pub fn argmax_r(&self, phi_idx: usize) -> usize {
        let col = self.column(phi_idx);
        let mut best = 0;
        for (i, v) in col.iter().enumerate() {
            if *v > col[best] {
                best = i;
            }
        }
        best
    }
}

fn check_lattice(r_min: f64, r_max: f64, n_r: usize, n_phi: usize) -> Result<()> {
    if n_r < 2 || n_phi < 1 {
        return Err(Error::BadLattice(format!(
            "need n_r >= 2 and n_phi >= 1, got {n_r} and {n_phi}"
        )));
    }
    if !(r_min.is_finite() && r_max.is_finite() && r_min < r_max) {
        return Err(Error::BadLattice(format!(
            "r range [{r_min}, {r_max}] is empty or not finite"
        )));
    }
    Ok(())
}

/// Implicit line `nx x + ny y = offset` with unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub nx: f64,
    pub ny: f64,
    pub offset: f64,
}

impl Line {
    /// Signed distance from `(x, y)` to the line.
    pub fn signed_distance(&self, x: f64, y: f64) -> f64 {
        self.nx * x + self.ny * y - self.offset
    }
}

pub fn line_from_params(r: f64, phi: f64) -> Line {
    Line {
        nx: phi.cos(),
        ny: phi.sin(),
        offset: r,
    }
}

/// Step used when walking a line through `f`.
pub fn line_step(f: &ScalarGrid) -> f64 {
    0.5 * f.spacing()
}

/// Number of steps either side of the foot point needed to cross the whole
/// support of `f`, for any line.
pub fn line_half_count(f: &ScalarGrid) -> usize {
    (f.frame().support_radius() / line_step(f)).ceil() as usize
}

/// Integral of `f` along `x cos(phi) + y sin(phi) = r`.
pub fn line_integral(f: &ScalarGrid, r: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    line_integral_cs(f, r, c, s)
}

fn line_integral_cs(f: &ScalarGrid, r: f64, c: f64, s: f64) -> f64 {
    let step = line_step(f);
    let k_max = line_half_count(f) as i64;
    // Only the stretch crossing the padded bounding box can be nonzero; the
    // samples skipped here are exact zeros.
    let Some((t_lo, t_hi)) = clip_to_support(f, r, c, s) else {
        return 0.0;
    };
    let k_lo = ((t_lo / step).floor() as i64).max(-k_max);
    let k_hi = ((t_hi / step).ceil() as i64).min(k_max);
    let mut sum = 0.0;
    for k in k_lo..=k_hi {
        let t = k as f64 * step;
        sum += f.sample_bilinear(r * c - t * s, r * s + t * c);
    }
    sum * step
}

/// Parameter interval over which the line `r (c, s) + t (-s, c)` lies in the
/// padded support box of `f`.
fn clip_to_support(f: &ScalarGrid, r: f64, c: f64, s: f64) -> Option<(f64, f64)> {
    let fr = f.frame();
    let h = fr.spacing;
    let (x_lo, x_hi) = (fr.origin_x - h, fr.x(fr.width - 1) + h);
    let (y_lo, y_hi) = (fr.origin_y - h, fr.y(fr.height - 1) + h);
    let (px, py) = (r * c, r * s);
    let (dx, dy) = (-s, c);
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (p, d, a, b) in [(px, dx, x_lo, x_hi), (py, dy, y_lo, y_hi)] {
        if d.abs() < 1e-300 {
            if p < a || p > b {
                return None;
            }
        } else {
            let (t0, t1) = ((a - p) / d, (b - p) / d);
            lo = lo.max(t0.min(t1));
            hi = hi.min(t0.max(t1));
        }
    }
    // Widen by a step so boundary rounding never drops a nonzero sample.
    let pad = h;
    (lo <= hi).then_some((lo - pad, hi + pad))
}

/// Discrete Radon transform of `f`. Angles are processed independently and in
/// parallel; every value is computed by the same sequential sum, so the
/// result does not depend on the schedule.
pub fn radon_transform(f: &ScalarGrid, r_min: f64, r_max: f64, n_r: usize, n_phi: usize) -> Result<Sinogram> {
    check_lattice(r_min, r_max, n_r, n_phi)?;
    let dr = (r_max - r_min) / (n_r - 1) as f64;
    let rows: Vec<Vec<f64>> = (0..n_phi)
        .into_par_iter()
        .map(|j| {
            let phi = j as f64 * PI / n_phi as f64;
            let (s, c) = phi.sin_cos();
            (0..n_r)
                .map(|i| line_integral_cs(f, r_min + i as f64 * dr, c, s))
                .collect()
        })
        .collect();
    Sinogram::new(r_min, r_max, n_r, n_phi, rows.concat())
}

/// Projection of `f` at angle `phi` with the 1-D transform applied.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceTransform {
    pub values: Vec<Amplitude>,
    /// Set when some requested frequency is beyond `1 / (2 spacing)`; the
    /// values are still computed.
    pub warning: Option<Error>,
}

/// `sum_r exp(-2 pi i r k) R_f(r, phi) dr` for each `k`.
///
/// The projection is sampled at `dr = spacing`, on an `r` lattice anchored at
/// the projection of sample `(0, 0)` so that axis-aligned projections fall on
/// sample columns. The lattice spans the full support of `f`.
pub fn fourier_slice(f: &ScalarGrid, phi: f64, k_samples: &[f64]) -> SliceTransform {
    let fr = f.frame();
    let h = fr.spacing;
    let nyquist = 0.5 / h;
    let warning = k_samples
        .iter()
        .find(|k| k.abs() > nyquist || !k.is_finite())
        .map(|k| Error::NyquistExceeded { k: *k, limit: nyquist });

    let (s, c) = phi.sin_cos();
    let anchor = fr.origin_x * c + fr.origin_y * s;
    let radius = fr.support_radius();
    let m_lo = ((-radius - anchor) / h).floor() as i64;
    let m_hi = ((radius - anchor) / h).ceil() as i64;
    let projection: Vec<(f64, f64)> = (m_lo..=m_hi)
        .into_par_iter()
        .map(|m| {
            let r = anchor + m as f64 * h;
            (r, line_integral_cs(f, r, c, s))
        })
        .collect();

    let values = k_samples
        .iter()
        .map(|&k| {
            projection
                .iter()
                .map(|&(r, p)| Complex64::from_polar(p, -TAU * r * k))
                .sum::<Complex64>()
                * h
        })
        .collect();
    SliceTransform { values, warning }
}
