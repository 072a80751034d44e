use num_complex::Complex64;

use super::GroupElement;
use crate::error::{Error, Result};

/// Axis names in storage order; `theta` varies fastest.
pub const AXES: [&str; 4] = ["x0", "y0", "s", "theta"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    /// `count` points from `min` to `max` inclusive.
    Linear,
    /// Log-uniform from `min` to `max` inclusive.
    Geometric,
    /// `count` points on `[min, max)`; the axis wraps.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleSpacing {
    #[default]
    Geometric,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub kind: AxisKind,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        let n = self.count;
        match self.kind {
            _ if n == 1 => self.min,
            AxisKind::Linear => self.min + i as f64 * (self.max - self.min) / (n - 1) as f64,
            AxisKind::Geometric => self.min * (self.max / self.min).powf(i as f64 / (n - 1) as f64),
            AxisKind::Periodic => self.min + i as f64 * (self.max - self.min) / n as f64,
        }
    }

    /// Index distance, wrapping on periodic axes.
    pub fn distance(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        if self.kind == AxisKind::Periodic {
            d.min(self.count - d)
        } else {
            d
        }
    }

    /// Index of the axis point closest to `value` (log distance on geometric
    /// axes, wrapped distance on periodic ones).
    pub fn nearest(&self, value: f64) -> usize {
        (0..self.count)
            .min_by(|&a, &b| {
                let da = self.gap(a, value);
                let db = self.gap(b, value);
                da.total_cmp(&db)
            })
            .unwrap_or(0)
    }

    fn gap(&self, i: usize, value: f64) -> f64 {
        let d = (self.value(i) - value).abs();
        if self.kind == AxisKind::Periodic {
            let p = self.max - self.min;
            if p > 0.0 {
                let m = d.rem_euclid(p);
                return m.min(p - m);
            }
        }
        if self.kind == AxisKind::Geometric && value > 0.0 {
            return (self.value(i) / value).ln().abs();
        }
        d
    }
}

/// Discretized domain of the group: `x0`, `y0` linear, `s` geometric (or
/// linear), `theta` periodic. Cells are stored row-major in `(x0, y0, s, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamLattice {
    axes: [Axis; 4],
}

impl ParamLattice {
    pub fn new(
        x0: (f64, f64, usize),
        y0: (f64, f64, usize),
        s: (f64, f64, usize),
        theta: (f64, f64, usize),
        scale_spacing: ScaleSpacing,
    ) -> Result<Self> {
        let axis = |(min, max, count): (f64, f64, usize), kind| Axis { min, max, count, kind };
        let s_kind = match scale_spacing {
            ScaleSpacing::Geometric => AxisKind::Geometric,
            ScaleSpacing::Linear => AxisKind::Linear,
        };
        Self::from_axes([
            axis(x0, AxisKind::Linear),
            axis(y0, AxisKind::Linear),
            axis(s, s_kind),
            axis(theta, AxisKind::Periodic),
        ])
    }

    pub fn from_axes(axes: [Axis; 4]) -> Result<Self> {
        for (a, name) in axes.iter().zip(AXES) {
            if a.count == 0 {
                return Err(Error::BadLattice(format!("{name}: count must be at least 1")));
            }
            if !(a.min.is_finite() && a.max.is_finite()) || a.max < a.min {
                return Err(Error::BadLattice(format!(
                    "{name}: range [{}, {}] is invalid",
                    a.min, a.max
                )));
            }
        }
        if axes[2].min <= 0.0 {
            return Err(Error::BadLattice(format!(
                "s: minimum {} must be positive",
                axes[2].min
            )));
        }
        if axes[0].kind != AxisKind::Linear || axes[1].kind != AxisKind::Linear || axes[3].kind != AxisKind::Periodic {
            return Err(Error::BadLattice("x0/y0 must be linear and theta periodic".into()));
        }
        if axes[2].kind == AxisKind::Periodic {
            return Err(Error::BadLattice("s cannot be periodic".into()));
        }
        let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.count));
        if total.is_none() {
            return Err(Error::BadLattice("cell count overflows".into()));
        }
        Ok(Self { axes })
    }

    pub fn axes(&self) -> &[Axis; 4] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn scale_spacing(&self) -> ScaleSpacing {
        match self.axes[2].kind {
            AxisKind::Linear => ScaleSpacing::Linear,
            _ => ScaleSpacing::Geometric,
        }
    }

    pub fn counts(&self) -> [usize; 4] {
        self.axes.map(|a| a.count)
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ravel(&self, idx: [usize; 4]) -> usize {
        let c = self.counts();
        ((idx[0] * c[1] + idx[1]) * c[2] + idx[2]) * c[3] + idx[3]
    }

    pub fn unravel(&self, mut flat: usize) -> [usize; 4] {
        let c = self.counts();
        let mut idx = [0; 4];
        for k in (0..4).rev() {
            idx[k] = flat % c[k];
            flat /= c[k];
        }
        idx
    }

    pub fn values(&self, idx: [usize; 4]) -> [f64; 4] {
        [0, 1, 2, 3].map(|k| self.axes[k].value(idx[k]))
    }

    pub fn element(&self, idx: [usize; 4]) -> GroupElement {
        let [x0, y0, s, theta] = self.values(idx);
        GroupElement::new(x0, y0, s, theta).expect("lattice points are valid group elements")
    }

    pub fn element_at(&self, flat: usize) -> GroupElement {
        self.element(self.unravel(flat))
    }

    /// Lattice indices nearest to the parameters of `g`.
    pub fn nearest(&self, g: &GroupElement) -> [usize; 4] {
        let p = [g.x0(), g.y0(), g.s(), g.theta()];
        [0, 1, 2, 3].map(|k| self.axes[k].nearest(p[k]))
    }
}

/// Complex evidence per lattice cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeAccumulator {
    lattice: ParamLattice,
    cells: Vec<Complex64>,
}

impl AmplitudeAccumulator {
    pub fn new(lattice: ParamLattice, cells: Vec<Complex64>) -> Result<Self> {
        if cells.len() != lattice.len() {
            return Err(Error::BadLattice(format!(
                "{} cells for a lattice of {}",
                cells.len(),
                lattice.len()
            )));
        }
        if !cells.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::BadLattice("non-finite accumulator cell".into()));
        }
        Ok(Self { lattice, cells })
    }

    pub fn zeros(lattice: ParamLattice) -> Self {
        Self {
            cells: vec![Complex64::new(0.0, 0.0); lattice.len()],
            lattice,
        }
    }

    pub fn lattice(&self) -> &ParamLattice {
        &self.lattice
    }

    pub fn cells(&self) -> &[Complex64] {
        &self.cells
    }

    pub fn get(&self, idx: [usize; 4]) -> Complex64 {
        self.cells[self.lattice.ravel(idx)]
    }

    /// 2-D slice over axes `rows` x `cols`, the other two axes held at the
    /// indices given in `at`.
    pub fn slice(&self, rows: usize, cols: usize, at: [usize; 4]) -> Result<Vec<Vec<Complex64>>> {
        if rows >= 4 || cols >= 4 || rows == cols {
            return Err(Error::InvalidParameter(format!(
                "slice axes {rows}, {cols} are invalid"
            )));
        }
        let counts = self.lattice.counts();
        if at.iter().zip(counts).any(|(i, c)| *i >= c) {
            return Err(Error::InvalidParameter("slice index out of range".into()));
        }
        Ok((0..counts[rows])
            .map(|a| {
                (0..counts[cols])
                    .map(|b| {
                        let mut idx = at;
                        idx[rows] = a;
                        idx[cols] = b;
                        self.get(idx)
                    })
                    .collect()
            })
            .collect())
    }
}
