//! The four-parameter similarity group acting on the plane,
//! `G(u, v) = (x0, y0) + s R(theta) (u, v)`, and the machinery that sweeps it.

mod curve;
mod lattice;

pub use curve::{extended_radon, make_template_curve, CurveGeometry, CurveKind, TemplateCurve};
pub use lattice::{AmplitudeAccumulator, Axis, AxisKind, ParamLattice, ScaleSpacing, AXES};

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::grid::{Frame, ScalarGrid};

/// Translation `(x0, y0)`, scale `s > 0` and rotation `theta` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    x0: f64,
    y0: f64,
    s: f64,
    theta: f64,
    cos: f64,
    sin: f64,
}

impl GroupElement {
    pub fn new(x0: f64, y0: f64, s: f64, theta: f64) -> Result<Self> {
        if !(x0.is_finite() && y0.is_finite() && s.is_finite() && theta.is_finite()) {
            return Err(Error::BadGroupElement("parameters must be finite".into()));
        }
        if s <= 0.0 {
            return Err(Error::BadGroupElement(format!("scale {s} must be positive")));
        }
        let mut theta = theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        let (sin, cos) = theta.sin_cos();
        Ok(Self {
            x0,
            y0,
            s,
            theta,
            cos,
            sin,
        })
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 1.0, 0.0).expect("identity is valid")
    }

    pub fn translation(x0: f64, y0: f64) -> Result<Self> {
        Self::new(x0, y0, 1.0, 0.0)
    }

    /// Line-detection convention: translation `(r cos theta, r sin theta)` at
    /// unit scale, so the template's v-axis maps onto `x cos theta + y sin theta = r`.
    pub fn line(r: f64, theta: f64) -> Result<Self> {
        let g = Self::new(0.0, 0.0, 1.0, theta)?;
        Self::new(r * g.cos, r * g.sin, 1.0, theta)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn y0(&self) -> f64 {
        self.y0
    }
    pub fn s(&self) -> f64 {
        self.s
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `(cos theta, sin theta)` as used by [`apply`](Self::apply).
    pub fn rotation(&self) -> (f64, f64) {
        (self.cos, self.sin)
    }

    /// Maps template coordinates `(u, v)` into the image plane.
    #[inline]
    pub fn apply(&self, u: f64, v: f64) -> (f64, f64) {
        (
            self.x0 + self.s * (u * self.cos - v * self.sin),
            self.y0 + self.s * (u * self.sin + v * self.cos),
        )
    }

    pub fn inverse(&self) -> Self {
        let inv_s = 1.0 / self.s;
        // -(1/s) R(-theta) (x0, y0)
        let tx = -inv_s * (self.cos * self.x0 + self.sin * self.y0);
        let ty = -inv_s * (-self.sin * self.x0 + self.cos * self.y0);
        Self::new(tx, ty, inv_s, -self.theta).expect("inverse of a valid element is valid")
    }

    /// `self . other`: apply `other` first.
    pub fn compose(&self, other: &GroupElement) -> Self {
        let (tx, ty) = self.apply(other.x0, other.y0);
        Self::new(tx, ty, self.s * other.s, self.theta + other.theta).expect("composition of valid elements is valid")
    }

    /// Area factor `|J| = s^-2` of the pull-back `(x, y) -> G^-1(x, y)`.
    pub fn jacobian(&self) -> f64 {
        1.0 / (self.s * self.s)
    }
}

pub fn group_apply(g: &GroupElement, u: f64, v: f64) -> (f64, f64) {
    g.apply(u, v)
}

pub fn group_inverse(g: &GroupElement) -> GroupElement {
    g.inverse()
}

pub fn jacobian(g: &GroupElement) -> f64 {
    g.jacobian()
}

/// Resamples `f` moved by `g`: `out(p) = f(g^-1(p))` on `frame`.
pub fn warp_grid(f: &ScalarGrid, g: &GroupElement, frame: Frame) -> Result<ScalarGrid> {
    let inv = g.inverse();
    ScalarGrid::from_fn(frame, |x, y| {
        let (u, v) = inv.apply(x, y);
        f.sample_bilinear(u, v)
    })
}
