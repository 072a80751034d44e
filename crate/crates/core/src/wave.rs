//! Plane waves, intensities and interference.
//!
//! Phase conventions: a wave of amplitude `a` and phase `phi` is
//! `a * exp(-i phi)`; spatial transforms use the kernel `exp(-2 pi i k.x)`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::ScalarGrid;

/// Complex probability amplitude. `|A|^2` is the measured intensity.
pub type Amplitude = Complex64;

/// Monochromatic plane wave `a exp(2 pi i (omega t - k.x) + i phase0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    a: f64,
    omega: f64,
    kx: f64,
    ky: f64,
    phase0: f64,
}

impl PlaneWave {
    pub fn new(a: f64, omega: f64, kx: f64, ky: f64, phase0: f64) -> Result<Self> {
        if !(a.is_finite() && omega.is_finite() && kx.is_finite() && ky.is_finite() && phase0.is_finite()) {
            return Err(Error::InvalidGrid("plane wave parameters must be finite".into()));
        }
        if a < 0.0 {
            return Err(Error::NegativeAmplitude(a));
        }
        Ok(Self {
            a,
            omega,
            kx,
            ky,
            phase0,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.a
    }

    /// Wave value at time `t` and position `(x, y)`.
    pub fn at(&self, t: f64, x: f64, y: f64) -> Amplitude {
        let phase = TAU * (self.omega * t - (self.kx * x + self.ky * y)) + self.phase0;
        Complex64::from_polar(self.a, phase)
    }
}

pub fn plane_wave_at(w: &PlaneWave, t: f64, x: f64, y: f64) -> Amplitude {
    w.at(t, x, y)
}

pub fn intensity(a: Amplitude) -> f64 {
    a.norm_sqr()
}

/// Intensity of `a1 e^{-i phi1} + a2 e^{-i phi2}` from the closed form
/// `I1 + I2 + 2 sqrt(I1 I2) cos(phi2 - phi1)`.
pub fn two_wave_intensity(a1: f64, phi1: f64, a2: f64, phi2: f64) -> Result<f64> {
    if a1 < 0.0 {
        return Err(Error::NegativeAmplitude(a1));
    }
    if a2 < 0.0 {
        return Err(Error::NegativeAmplitude(a2));
    }
    let (i1, i2) = (a1 * a1, a2 * a2);
    Ok(i1 + i2 + 2.0 * (i1 * i2).sqrt() * (phi2 - phi1).cos())
}

/// `a e^{-i phi}`.
pub fn wave(a: f64, phi: f64) -> Amplitude {
    Complex64::from_polar(a, -phi)
}

/// Coherent sum of amplitudes.
pub fn superpose(amps: &[Amplitude]) -> Result<Amplitude> {
    if amps.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(amps.iter().sum())
}

/// Sum of individual intensities: the limit where cross terms average out.
pub fn incoherent_intensity(amps: &[Amplitude]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Far-field amplitude of a transmittance `t` illuminated by a plane wave of
/// wavenumber `k`, observed along direction `(alpha, beta)`:
/// a midpoint sum of `t(x, y) exp(-2 pi i k (alpha x + beta y))` over the grid
/// weighted by cell area. The overall optical constant is dropped.
pub fn fraunhofer_ft(t: &ScalarGrid, alpha: f64, beta: f64, k: f64) -> Result<Amplitude> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidGrid(format!("wavenumber {k} must be positive")));
    }
    let fr = t.frame();
    let (u, v) = (k * alpha, k * beta);
    // Separable phase factors, one table per axis.
    let col: Vec<Complex64> = (0..fr.width)
        .map(|i| Complex64::from_polar(1.0, -TAU * u * fr.x(i)))
        .collect();
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..fr.height {
        let row_phase = Complex64::from_polar(1.0, -TAU * v * fr.y(j));
        let row: Complex64 = (0..fr.width).map(|i| col[i] * t.get(i, j)).sum();
        sum += row * row_phase;
    }
    Ok(sum * fr.cell_area())
}

/// Closed-form far field of a transparent square of side `a` centred on the
/// origin: `sin(pi a u)/(pi u) * sin(pi a v)/(pi v)`, with limit `a` per axis
/// at zero frequency.
pub fn square_aperture_analytic(a: f64, u: f64, v: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::BadGeometry(format!("aperture side {a} must be positive")));
    }
    Ok(slit(a, u) * slit(a, v))
}

fn slit(a: f64, u: f64) -> f64 {
    let x = std::f64::consts::PI * u;
    if x.abs() < 1e-12 {
        a
    } else {
        (a * x).sin() / x
    }
}
