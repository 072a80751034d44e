//! Correlation filters over the similarity group and their complex superposition.
//!
//! A filter pairs a template operand `T_i` with a data operand `F_j` and
//! evaluates, for a group element `g`,
//!
//! ```text
//! A_ij(g) = sum over template cells (x, y) of T_i(x, y) F_j(g(x, y)) h_t^2
//! ```
//!
//! with `F_j` bilinearly sampled. Summing filters with complex coefficients
//! and squaring the magnitude gives the probability map.
//!
//! Gradient data is rotated into the template frame before the dot product,
//! i.e. `grad t . R(-theta) grad f(g(x, y))`, so a rotated instance matches
//! its template with the same sign and strength as an upright one. For pure
//! translations this is the plain `grad t . grad f`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{threshold_binary, ComplexGrid, Component, FeatureStack, ScalarGrid};
use crate::group::{make_template_curve, AmplitudeAccumulator, CurveGeometry, GroupElement, ParamLattice};
use crate::radon::{line_half_count, line_step};

/// One side of a filter: a scalar stack member or the gradient vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operand {
    Scalar(Component),
    Gradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Combine {
    /// `T_i * F_j` on scalar operands.
    ScalarProduct,
    /// `grad T . grad F` on gradient operands.
    VectorDot,
    /// Threshold the data first, then correlate: scalar data becomes a 0/1
    /// map (`> level`), gradient data is kept only where `|grad f| > level`.
    Thresholded { level: f64 },
}

/// Which template and data members a filter correlates, and how.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    template: Operand,
    data: Operand,
    combine: Combine,
}

impl FilterSpec {
    pub fn new(template: Operand, data: Operand, combine: Combine) -> Result<Self> {
        use Operand::*;
        match (template, data, combine) {
            (Gradient, Gradient, Combine::VectorDot) => {}
            (Scalar(_), Scalar(_), Combine::ScalarProduct) => {}
            (Gradient, Gradient, Combine::Thresholded { .. }) | (Scalar(_), Scalar(_), Combine::Thresholded { .. }) => {
            }
            _ => {
                return Err(Error::IncompatibleComponents(format!(
                    "{template:?} with {data:?} under {combine:?}"
                )))
            }
        }
        if let Combine::Thresholded { level } = combine {
            if !level.is_finite() {
                return Err(Error::IncompatibleComponents("threshold must be finite".into()));
            }
        }
        Ok(Self {
            template,
            data,
            combine,
        })
    }

    /// Area correlation `t * f(G)`.
    pub fn a00() -> Self {
        Self::scalar(Component::Value)
    }

    /// Edge-strength correlation `|grad t| |grad f(G)|`.
    pub fn a11() -> Self {
        Self::scalar(Component::GradMag)
    }

    /// Oriented-edge correlation `grad t . grad f(G)`.
    pub fn a22() -> Self {
        Self {
            template: Operand::Gradient,
            data: Operand::Gradient,
            combine: Combine::VectorDot,
        }
    }

    /// Curvature correlation `lap t * lap f(G)`.
    pub fn a33() -> Self {
        Self::scalar(Component::Laplacian)
    }

    /// Binary edge correlation: `|grad t|` against the thresholded edge map.
    pub fn binary_edge(level: f64) -> Result<Self> {
        Self::new(
            Operand::Scalar(Component::GradMag),
            Operand::Scalar(Component::GradMag),
            Combine::Thresholded { level },
        )
    }

    /// Gradient dot product with weak data edges removed.
    pub fn gated_gradient(level: f64) -> Result<Self> {
        Self::new(Operand::Gradient, Operand::Gradient, Combine::Thresholded { level })
    }

    fn scalar(c: Component) -> Self {
        Self {
            template: Operand::Scalar(c),
            data: Operand::Scalar(c),
            combine: Combine::ScalarProduct,
        }
    }

    pub fn template(&self) -> Operand {
        self.template
    }
    pub fn data(&self) -> Operand {
        self.data
    }
    pub fn combine(&self) -> Combine {
        self.combine
    }
}

/// Template side of a filter.
#[derive(Debug, Clone, Copy)]
pub enum Template<'a> {
    Features(&'a FeatureStack),
    /// A complex template used directly; pairs with scalar data operands.
    Complex(&'a ComplexGrid),
}

#[derive(Debug, Clone, Copy)]
enum Weight {
    Real(f64),
    Complex(Complex64),
    Vector(f64, f64),
}

/// Prepared data side.
enum Data {
    Scalar(ScalarGrid),
    Gradient(ScalarGrid, ScalarGrid),
}

/// A filter bound to a template and a data stack, ready to be evaluated at
/// many group elements.
pub struct PreparedFilter {
    support: Vec<(f64, f64, Weight)>,
    data: Data,
}

impl PreparedFilter {
    pub fn new(spec: &FilterSpec, template: Template<'_>, data: &FeatureStack) -> Result<Self> {
        let support = template_support(spec, template)?;
        let data = match (spec.data, spec.combine) {
            (Operand::Scalar(c), Combine::Thresholded { level }) => {
                Data::Scalar(threshold_binary(scalar_member(data, c)?, level))
            }
            (Operand::Scalar(c), _) => Data::Scalar(scalar_member(data, c)?.clone()),
            (Operand::Gradient, Combine::Thresholded { level }) => {
                let (gx, gy) = data.gradient();
                let mag = data.component(Component::GradMag).expect("always present");
                let keep = threshold_binary(mag, level);
                Data::Gradient(gx.zip_with(&keep, |a, k| a * k)?, gy.zip_with(&keep, |a, k| a * k)?)
            }
            (Operand::Gradient, _) => {
                let (gx, gy) = data.gradient();
                Data::Gradient(gx.clone(), gy.clone())
            }
        };
        Ok(Self { support, data })
    }

    /// Number of template cells that contribute.
    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn evaluate(&self, g: &GroupElement) -> Complex64 {
        match &self.data {
            Data::Scalar(f) => {
                let mut re = 0.0;
                let mut cx = Complex64::new(0.0, 0.0);
                for &(x, y, w) in &self.support {
                    let (gx, gy) = g.apply(x, y);
                    let d = f.sample_bilinear(gx, gy);
                    match w {
                        Weight::Real(t) => re += t * d,
                        Weight::Complex(t) => cx += t * d,
                        Weight::Vector(..) => unreachable!("vector weights pair with gradient data"),
                    }
                }
                cx + re
            }
            Data::Gradient(fx, fy) => {
                let (c, s) = g.rotation();
                let mut re = 0.0;
                for &(x, y, w) in &self.support {
                    let Weight::Vector(tx, ty) = w else {
                        unreachable!("gradient data pairs with vector weights")
                    };
                    let (gx, gy) = g.apply(x, y);
                    let (dx, dy) = (fx.sample_bilinear(gx, gy), fy.sample_bilinear(gx, gy));
                    // Data gradient expressed in the template frame.
                    let (ux, uy) = (c * dx + s * dy, -s * dx + c * dy);
                    re += tx * ux + ty * uy;
                }
                Complex64::new(re, 0.0)
            }
        }
    }
}

fn scalar_member(stack: &FeatureStack, c: Component) -> Result<&ScalarGrid> {
    stack
        .component(c)
        .ok_or_else(|| Error::IncompatibleComponents(format!("{c:?} is not present in the feature stack")))
}

fn template_support(spec: &FilterSpec, template: Template<'_>) -> Result<Vec<(f64, f64, Weight)>> {
    let mut out = Vec::new();
    match (template, spec.template) {
        (Template::Features(t), Operand::Scalar(c)) => {
            let g = scalar_member(t, c)?;
            let fr = g.frame();
            let area = fr.cell_area();
            for j in 0..fr.height {
                for i in 0..fr.width {
                    let v = g.get(i, j);
                    if v != 0.0 {
                        out.push((fr.x(i), fr.y(j), Weight::Real(v * area)));
                    }
                }
            }
        }
        (Template::Features(t), Operand::Gradient) => {
            let (gx, gy) = t.gradient();
            let fr = gx.frame();
            let area = fr.cell_area();
            for j in 0..fr.height {
                for i in 0..fr.width {
                    let (a, b) = (gx.get(i, j), gy.get(i, j));
                    if a != 0.0 || b != 0.0 {
                        out.push((fr.x(i), fr.y(j), Weight::Vector(a * area, b * area)));
                    }
                }
            }
        }
        (Template::Complex(t), Operand::Scalar(_)) => {
            let fr = t.frame();
            let area = fr.cell_area();
            for j in 0..fr.height {
                for i in 0..fr.width {
                    let v = t.get(i, j);
                    if v.re != 0.0 || v.im != 0.0 {
                        out.push((fr.x(i), fr.y(j), Weight::Complex(v * area)));
                    }
                }
            }
        }
        (Template::Complex(_), Operand::Gradient) => {
            return Err(Error::IncompatibleComponents(
                "complex templates pair with scalar data only".into(),
            ))
        }
    }
    Ok(out)
}

/// `A_ij(T; g)` for one group element.
pub fn evaluate_filter(
    spec: &FilterSpec,
    template: Template<'_>,
    data: &FeatureStack,
    g: &GroupElement,
) -> Result<Complex64> {
    Ok(PreparedFilter::new(spec, template, data)?.evaluate(g))
}

/// The same amplitude evaluated in data coordinates:
/// `sum over data cells |J| T_i(g^-1(x, y)) F_j(x, y) h_f^2`. Agrees with
/// [`evaluate_filter`] up to discretization on smooth inputs. Thresholded
/// combinations are not supported here.
pub fn evaluate_filter_pullback(
    spec: &FilterSpec,
    template: &FeatureStack,
    data: &FeatureStack,
    g: &GroupElement,
) -> Result<Complex64> {
    let inv = g.inverse();
    let jac = g.jacobian();
    let fr = *data.frame();
    let area = fr.cell_area();
    let mut sum = 0.0;
    match (spec.template, spec.data, spec.combine) {
        (Operand::Scalar(ct), Operand::Scalar(cd), Combine::ScalarProduct) => {
            let (t, f) = (scalar_member(template, ct)?, scalar_member(data, cd)?);
            for j in 0..fr.height {
                for i in 0..fr.width {
                    let (u, v) = inv.apply(fr.x(i), fr.y(j));
                    sum += t.sample_bilinear(u, v) * f.get(i, j);
                }
            }
        }
        (Operand::Gradient, Operand::Gradient, Combine::VectorDot) => {
            let (tx, ty) = template.gradient();
            let (fx, fy) = data.gradient();
            let (c, s) = g.rotation();
            for j in 0..fr.height {
                for i in 0..fr.width {
                    let (u, v) = inv.apply(fr.x(i), fr.y(j));
                    let (dx, dy) = (fx.get(i, j), fy.get(i, j));
                    sum += tx.sample_bilinear(u, v) * (c * dx + s * dy) + ty.sample_bilinear(u, v) * (-s * dx + c * dy);
                }
            }
        }
        _ => {
            return Err(Error::IncompatibleComponents(
                "pull-back evaluation supports plain scalar and vector filters".into(),
            ))
        }
    }
    Ok(Complex64::new(sum * area * jac, 0.0))
}

pub fn a00(t: &FeatureStack, f: &FeatureStack, g: &GroupElement) -> Result<Complex64> {
    evaluate_filter(&FilterSpec::a00(), Template::Features(t), f, g)
}

pub fn a11(t: &FeatureStack, f: &FeatureStack, g: &GroupElement) -> Result<Complex64> {
    evaluate_filter(&FilterSpec::a11(), Template::Features(t), f, g)
}

pub fn a22(t: &FeatureStack, f: &FeatureStack, g: &GroupElement) -> Result<Complex64> {
    evaluate_filter(&FilterSpec::a22(), Template::Features(t), f, g)
}

pub fn a33(t: &FeatureStack, f: &FeatureStack, g: &GroupElement) -> Result<Complex64> {
    evaluate_filter(&FilterSpec::a33(), Template::Features(t), f, g)
}

/// Step-edge template at unit scale: the integral of `f` along the image of
/// the template's v-axis. With `g = GroupElement::line(r, theta)` this is the
/// Radon sample at `(r, theta)`.
pub fn a10_radon(f: &ScalarGrid, g: &GroupElement) -> Result<Complex64> {
    if (g.s() - 1.0).abs() > 1e-12 {
        return Err(Error::ScaleNotUnity(g.s()));
    }
    let step = line_step(f);
    let half = line_half_count(f);
    let curve = make_template_curve(
        &CurveGeometry::LineSegment {
            length: 2.0 * half as f64 * step,
        },
        step,
    )?;
    Ok(Complex64::new(curve.evidence(f, g), 0.0))
}

/// Evaluates a filter at every lattice cell, in parallel. Each cell is
/// computed by the same sequential sum, so output is independent of the
/// thread count.
pub fn accumulate(
    spec: &FilterSpec,
    template: Template<'_>,
    data: &FeatureStack,
    lattice: &ParamLattice,
) -> Result<AmplitudeAccumulator> {
    let prepared = PreparedFilter::new(spec, template, data)?;
    let cells = (0..lattice.len())
        .into_par_iter()
        .map(|flat| prepared.evaluate(&lattice.element_at(flat)))
        .collect();
    AmplitudeAccumulator::new(*lattice, cells)
}

/// Complex weights `c_k`, one per filter, with an optional label each.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    entries: Vec<(String, Complex64)>,
}

impl CoefficientSet {
    pub fn new(entries: Vec<(String, Complex64)>) -> Result<Self> {
        if entries.iter().any(|(_, c)| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidParameter("coefficients must be finite".into()));
        }
        if !entries.iter().any(|(_, c)| c.norm_sqr() > 0.0) {
            return Err(Error::InvalidParameter(
                "at least one coefficient must be nonzero".into(),
            ));
        }
        Ok(Self { entries })
    }

    /// Unlabelled coefficients.
    pub fn from_values(values: &[Complex64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .enumerate()
                .map(|(i, c)| (format!("filter{i}"), *c))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[(String, Complex64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Cell-wise `sum_k c_k A_k`. Coefficients pair with accumulators by position.
pub fn superpose_accumulators(coeffs: &CoefficientSet, accs: &[AmplitudeAccumulator]) -> Result<AmplitudeAccumulator> {
    if accs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if coeffs.len() != accs.len() {
        return Err(Error::InvalidParameter(format!(
            "{} coefficients for {} accumulators",
            coeffs.len(),
            accs.len()
        )));
    }
    let lattice = *accs[0].lattice();
    if accs.iter().any(|a| *a.lattice() != lattice) {
        return Err(Error::LatticeMismatch);
    }
    let mut cells = vec![Complex64::new(0.0, 0.0); lattice.len()];
    for ((_, c), acc) in coeffs.entries().iter().zip(accs) {
        for (out, a) in cells.iter_mut().zip(acc.cells()) {
            *out += c * a;
        }
    }
    AmplitudeAccumulator::new(lattice, cells)
}

/// `|A|^2` per cell: relative likelihoods over the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap {
    lattice: ParamLattice,
    values: Vec<f64>,
}

impl ProbabilityMap {
    pub fn lattice(&self) -> &ParamLattice {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, idx: [usize; 4]) -> f64 {
        self.values[self.lattice.ravel(idx)]
    }

    /// Largest cell; the lowest index wins ties.
    pub fn argmax(&self) -> Option<[usize; 4]> {
        let mut best: Option<usize> = None;
        for (i, v) in self.values.iter().enumerate() {
            if best.is_none_or(|b| *v > self.values[b]) {
                best = Some(i);
            }
        }
        best.map(|b| self.lattice.unravel(b))
    }
}

pub fn probability_map(acc: &AmplitudeAccumulator) -> ProbabilityMap {
    ProbabilityMap {
        lattice: *acc.lattice(),
        values: acc.cells().iter().map(|c| c.norm_sqr()).collect(),
    }
}

/// A reported peak of the probability map.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub g: GroupElement,
    pub probability: f64,
    pub bins: [usize; 4],
    /// The map is flat along theta at this peak (rotation-symmetric
    /// template); `bins[3]` and `g.theta()` then name the first theta bin.
    pub theta_degenerate: bool,
}

/// Relative theta-marginal variance below which the rotation axis counts as
/// degenerate.
pub const THETA_DEGENERACY: f64 = 1e-9;

/// Local maxima of at least `min_fraction` of the global maximum, thinned by
/// greedy non-maximum suppression in descending order (lowest flat index
/// first among equal values). A candidate is suppressed when it lies within
/// `suppression_radius` bins of an accepted peak on every axis.
pub fn detect_peaks(map: &ProbabilityMap, min_fraction: f64, suppression_radius: [usize; 4]) -> Result<Vec<Detection>> {
    if map.values.is_empty() {
        return Err(Error::EmptyMap);
    }
    if !(min_fraction > 0.0 && min_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "min_fraction {min_fraction} must be in (0, 1]"
        )));
    }
    let lattice = &map.lattice;
    let global = map.values.iter().fold(0.0f64, |m, v| m.max(*v));
    if global <= 0.0 {
        return Ok(Vec::new());
    }
    let floor = min_fraction * global;

    let mut candidates: Vec<usize> = (0..map.values.len())
        .filter(|&flat| map.values[flat] >= floor && is_local_max(map, flat))
        .collect();
    candidates.sort_by(|&a, &b| map.values[b].total_cmp(&map.values[a]).then(a.cmp(&b)));

    let axes = lattice.axes();
    let mut accepted: Vec<([usize; 4], bool)> = Vec::new();
    let mut out = Vec::new();
    for flat in candidates {
        let idx = lattice.unravel(flat);
        let suppressed = accepted.iter().any(|(a, degenerate)| {
            (0..4).all(|k| {
                if k == 3 && *degenerate {
                    return true;
                }
                axes[k].distance(a[k], idx[k]) <= suppression_radius[k]
            })
        });
        if suppressed {
            continue;
        }
        let p = map.values[flat];
        let degenerate = theta_degenerate(map, idx, p);
        let bins = if degenerate { [idx[0], idx[1], idx[2], 0] } else { idx };
        accepted.push((idx, degenerate));
        out.push(Detection {
            g: lattice.element(bins),
            probability: p,
            bins,
            theta_degenerate: degenerate,
        });
    }
    Ok(out)
}

fn is_local_max(map: &ProbabilityMap, flat: usize) -> bool {
    let lattice = &map.lattice;
    let idx = lattice.unravel(flat);
    let counts = lattice.counts();
    let v = map.values[flat];
    let mut offsets = [0isize; 4];
    // Visit the 3^4 - 1 neighbours.
    for code in 0..81 {
        let mut c = code;
        for o in offsets.iter_mut() {
            *o = (c % 3) as isize - 1;
            c /= 3;
        }
        if offsets == [0; 4] {
            continue;
        }
        let mut n = [0usize; 4];
        let mut inside = true;
        for k in 0..4 {
            let m = idx[k] as isize + offsets[k];
            let len = counts[k] as isize;
            n[k] = if k == 3 {
                m.rem_euclid(len) as usize
            } else if m < 0 || m >= len {
                inside = false;
                break;
            } else {
                m as usize
            };
        }
        if inside && map.values[lattice.ravel(n)] > v {
            return false;
        }
    }
    true
}

fn theta_degenerate(map: &ProbabilityMap, idx: [usize; 4], p: f64) -> bool {
    let n = map.lattice.counts()[3];
    if n < 2 || p <= 0.0 {
        return false;
    }
    let vals: Vec<f64> = (0..n).map(|t| map.get([idx[0], idx[1], idx[2], t])).collect();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    var <= THETA_DEGENERACY * p * p
}
