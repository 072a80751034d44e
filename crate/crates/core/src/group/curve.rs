use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{AmplitudeAccumulator, GroupElement, ParamLattice};
use crate::error::{Error, Result};
use crate::grid::ScalarGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    LineSegment,
    Circle,
    Polyline,
}

/// Shape parameters for [`make_template_curve`].
#[derive(Debug, Clone, PartialEq)]
pub enum CurveGeometry {
    /// Segment of the given length along the v-axis, centred on the origin.
    LineSegment { length: f64 },
    /// Circle of the given radius centred on the origin.
    Circle { radius: f64 },
    /// Path through `vertices`, optionally closed back to the first one.
    Polyline { vertices: Vec<(f64, f64)>, closed: bool },
}

/// Template curve sampled at uniform arclength in template coordinates.
///
/// For segments and circles, consecutive samples are exactly `step` apart
/// (circles are closed, with the step shrunk to the chord of an integer
/// number of arcs). For polylines, `step` is measured along the path.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateCurve {
    kind: CurveKind,
    samples: Vec<(f64, f64)>,
    step: f64,
}

impl TemplateCurve {
    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// Arclength weight carried by each sample.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Evidence for one group element: `sum_i f(G(u_i, v_i)) * step`.
    pub fn evidence(&self, f: &ScalarGrid, g: &GroupElement) -> f64 {
        let mut sum = 0.0;
        for &(u, v) in &self.samples {
            let (x, y) = g.apply(u, v);
            sum += f.sample_bilinear(x, y);
        }
        sum * self.step
    }
}

pub fn make_template_curve(geometry: &CurveGeometry, step: f64) -> Result<TemplateCurve> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::BadGeometry(format!("step {step} must be positive")));
    }
    match geometry {
        CurveGeometry::LineSegment { length } => {
            if !(length.is_finite() && *length > 0.0) {
                return Err(Error::BadGeometry(format!("segment length {length} must be positive")));
            }
            let n = (length / step + 1e-9).floor() as usize + 1;
            if n < 2 {
                return Err(Error::BadGeometry("segment is shorter than one step".into()));
            }
            let mid = (n - 1) as f64 / 2.0;
            let samples = (0..n).map(|i| (0.0, (i as f64 - mid) * step)).collect();
            Ok(TemplateCurve {
                kind: CurveKind::LineSegment,
                samples,
                step,
            })
        }
        CurveGeometry::Circle { radius } => {
            if !(radius.is_finite() && *radius > 0.0) {
                return Err(Error::BadGeometry(format!("radius {radius} must be positive")));
            }
            let n = ((TAU * radius / step - 1e-9).ceil() as usize).max(3);
            let chord = 2.0 * radius * (std::f64::consts::PI / n as f64).sin();
            let samples = (0..n)
                .map(|i| {
                    let a = i as f64 * TAU / n as f64;
                    (radius * a.cos(), radius * a.sin())
                })
                .collect();
            Ok(TemplateCurve {
                kind: CurveKind::Circle,
                samples,
                step: chord,
            })
        }
        CurveGeometry::Polyline { vertices, closed } => polyline(vertices, *closed, step),
    }
}

fn polyline(vertices: &[(f64, f64)], closed: bool, step: f64) -> Result<TemplateCurve> {
    if vertices.len() < 2 || vertices.iter().any(|(u, v)| !(u.is_finite() && v.is_finite())) {
        return Err(Error::BadGeometry("polyline needs at least two finite vertices".into()));
    }
    let mut path: Vec<(f64, f64)> = vertices.to_vec();
    if closed {
        path.push(vertices[0]);
    }
    let seg_len: Vec<f64> = path
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
        .collect();
    let total: f64 = seg_len.iter().sum();
    if total <= 0.0 {
        return Err(Error::BadGeometry("polyline has zero length".into()));
    }
    // Closed paths get a whole number of equal steps; open ones keep the
    // requested step and may stop short of the last vertex.
    let (n, step) = if closed {
        let n = ((total / step - 1e-9).ceil() as usize).max(3);
        (n, total / n as f64)
    } else {
        ((total / step + 1e-9).floor() as usize + 1, step)
    };
    if n < 2 {
        return Err(Error::BadGeometry("polyline is shorter than one step".into()));
    }
    let mut samples = Vec::with_capacity(n);
    let mut seg = 0;
    let mut seg_start = 0.0;
    for i in 0..n {
        let s = i as f64 * step;
        while seg + 1 < seg_len.len() && s > seg_start + seg_len[seg] {
            seg_start += seg_len[seg];
            seg += 1;
        }
        let t = if seg_len[seg] > 0.0 {
            ((s - seg_start) / seg_len[seg]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (a, b) = (path[seg], path[seg + 1]);
        samples.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
    }
    Ok(TemplateCurve {
        kind: CurveKind::Polyline,
        samples,
        step,
    })
}

/// Curve evidence at every lattice cell. Cells are independent and written
/// once, so the result does not depend on the thread schedule.
pub fn extended_radon(f: &ScalarGrid, curve: &TemplateCurve, lattice: &ParamLattice) -> Result<AmplitudeAccumulator> {
    let cells = (0..lattice.len())
        .into_par_iter()
        .map(|flat| Complex64::new(curve.evidence(f, &lattice.element_at(flat)), 0.0))
        .collect();
    AmplitudeAccumulator::new(*lattice, cells)
}
