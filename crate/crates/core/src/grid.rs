//! Sampled 2-D fields with a physical coordinate frame.
//!
//! Sample `(i, j)` sits at physical position
//! `(origin_x + i * spacing, origin_y + j * spacing)`; values are stored
//! row-major, `values[j * width + i]`. Grids are immutable once built.

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Geometry shared by every grid: lattice size, physical origin of sample
/// `(0, 0)` and the (square) sample spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub origin_x: f64,
    pub origin_y: f64,
    pub spacing: f64,
}

impl Frame {
    pub fn new(width: usize, height: usize, origin_x: f64, origin_y: f64, spacing: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGrid(format!(
                "dimensions {width}x{height} must be positive"
            )));
        }
        if width.checked_mul(height).is_none() {
            return Err(Error::InvalidGrid("dimensions overflow".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "spacing {spacing} must be positive and finite"
            )));
        }
        if !(origin_x.is_finite() && origin_y.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(Self {
            width,
            height,
            origin_x,
            origin_y,
            spacing,
        })
    }

    /// Pixel frame: origin `(0, 0)`, unit spacing. This is what image files load into.
    pub fn pixels(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, 0.0, 0.0, 1.0)
    }

    /// Frame whose sample lattice is centred on the physical origin.
    pub fn centered(width: usize, height: usize, spacing: f64) -> Result<Self> {
        Self::new(
            width,
            height,
            -0.5 * (width as f64 - 1.0) * spacing,
            -0.5 * (height as f64 - 1.0) * spacing,
            spacing,
        )
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.origin_x + i as f64 * self.spacing
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.origin_y + j as f64 * self.spacing
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    /// Area of one sample cell.
    pub fn cell_area(&self) -> f64 {
        self.spacing * self.spacing
    }

    /// Largest distance from the physical origin to any point where the
    /// zero-padded bilinear interpolant can be nonzero.
    pub fn support_radius(&self) -> f64 {
        let h = self.spacing;
        let xs = [self.origin_x - h, self.x(self.width - 1) + h];
        let ys = [self.origin_y - h, self.y(self.height - 1) + h];
        xs.iter()
            .flat_map(|x| ys.iter().map(move |y| x.hypot(*y)))
            .fold(0.0, f64::max)
    }
}

/// Element type a [`Grid`] can hold.
pub trait Sample: Copy + Default + Add<Output = Self> + Mul<f64, Output = Self> + Send + Sync + 'static {
    fn is_finite_sample(&self) -> bool;
}

impl Sample for f64 {
    fn is_finite_sample(&self) -> bool {
        self.is_finite()
    }
}

impl Sample for Complex64 {
    fn is_finite_sample(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// A sampled field over a [`Frame`].
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    frame: Frame,
    values: Vec<T>,
}

pub type ScalarGrid = Grid<f64>;
pub type ComplexGrid = Grid<Complex64>;

impl<T: Sample> Grid<T> {
    pub fn new(frame: Frame, values: Vec<T>) -> Result<Self> {
        if values.len() != frame.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a {}x{} frame",
                values.len(),
                frame.width,
                frame.height
            )));
        }
        if !values.iter().all(Sample::is_finite_sample) {
            return Err(Error::InvalidGrid("non-finite sample".into()));
        }
        Ok(Self { frame, values })
    }

    pub fn zeros(frame: Frame) -> Self {
        Self {
            frame,
            values: vec![T::default(); frame.len()],
        }
    }

    /// Builds a grid by evaluating `f` at each sample's physical position.
    pub fn from_fn(frame: Frame, mut f: impl FnMut(f64, f64) -> T) -> Result<Self> {
        let mut values = Vec::with_capacity(frame.len());
        for j in 0..frame.height {
            let y = frame.y(j);
            for i in 0..frame.width {
                values.push(f(frame.x(i), y));
            }
        }
        Self::new(frame, values)
    }

    pub(crate) fn from_parts_unchecked(frame: Frame, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), frame.len());
        Self { frame, values }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn width(&self) -> usize {
        self.frame.width
    }

    pub fn height(&self) -> usize {
        self.frame.height
    }

    pub fn spacing(&self) -> f64 {
        self.frame.spacing
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[self.frame.index(i, j)]
    }

    /// Sample at signed lattice indices, zero outside the grid.
    #[inline]
    fn at(&self, i: isize, j: isize) -> T {
        if i < 0 || j < 0 || i as usize >= self.frame.width || j as usize >= self.frame.height {
            T::default()
        } else {
            self.values[j as usize * self.frame.width + i as usize]
        }
    }

    /// Bilinear interpolation at physical `(x, y)`.
    ///
    /// The grid is treated as zero-padded: samples beyond the lattice are 0, so
    /// the interpolant falls to zero one cell past the border and is exactly 0
    /// further out. Queries on lattice nodes return the stored value bit-exactly.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> T {
        let fr = &self.frame;
        let fx = snap((x - fr.origin_x) / fr.spacing);
        let fy = snap((y - fr.origin_y) / fr.spacing);
        if !(fx > -1.0 && fy > -1.0 && fx < fr.width as f64 && fy < fr.height as f64) {
            return T::default();
        }
        let x0 = fx.floor();
        let y0 = fy.floor();
        let tx = fx - x0;
        let ty = fy - y0;
        let (i, j) = (x0 as isize, y0 as isize);
        let top = self.at(i, j) * (1.0 - tx) + self.at(i + 1, j) * tx;
        let bottom = self.at(i, j + 1) * (1.0 - tx) + self.at(i + 1, j + 1) * tx;
        top * (1.0 - ty) + bottom * ty
    }

    pub fn map<U: Sample>(&self, f: impl Fn(T) -> U) -> Grid<U> {
        Grid {
            frame: self.frame,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    /// Pointwise combination of two grids on the same frame.
    pub fn zip_with<U: Sample, V: Sample>(&self, other: &Grid<U>, f: impl Fn(T, U) -> V) -> Result<Grid<V>> {
        if self.frame != other.frame {
            return Err(Error::InvalidGrid("frames differ".into()));
        }
        Ok(Grid {
            frame: self.frame,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn with_frame(&self, frame: Frame) -> Result<Self> {
        if frame.width != self.frame.width || frame.height != self.frame.height {
            return Err(Error::InvalidGrid("frame dimensions differ".into()));
        }
        Ok(Self {
            frame,
            values: self.values.clone(),
        })
    }
}

impl ScalarGrid {
    pub fn to_complex(&self) -> ComplexGrid {
        self.map(|v| Complex64::new(v, 0.0))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(*v), hi.max(*v))
            })
    }
}

/// Snaps lattice coordinates within rounding distance of a node onto it.
#[inline]
fn snap(f: f64) -> f64 {
    let r = f.round();
    if (f - r).abs() <= 1e-9 {
        r
    } else {
        f
    }
}

fn require_3x3(g: &ScalarGrid) -> Result<()> {
    if g.width() < 3 || g.height() < 3 {
        return Err(Error::GridTooSmall {
            width: g.width(),
            height: g.height(),
        });
    }
    Ok(())
}

/// Partial derivatives `(df/dx, df/dy)`: central differences inside,
/// one-sided differences on the border.
pub fn gradient(g: &ScalarGrid) -> Result<(ScalarGrid, ScalarGrid)> {
    require_3x3(g)?;
    let fr = *g.frame();
    let (w, h, sp) = (fr.width, fr.height, fr.spacing);
    let mut gx = vec![0.0; fr.len()];
    let mut gy = vec![0.0; fr.len()];
    for j in 0..h {
        for i in 0..w {
            let dx = if i == 0 {
                (g.get(1, j) - g.get(0, j)) / sp
            } else if i == w - 1 {
                (g.get(w - 1, j) - g.get(w - 2, j)) / sp
            } else {
                (g.get(i + 1, j) - g.get(i - 1, j)) / (2.0 * sp)
            };
            let dy = if j == 0 {
                (g.get(i, 1) - g.get(i, 0)) / sp
            } else if j == h - 1 {
                (g.get(i, h - 1) - g.get(i, h - 2)) / sp
            } else {
                (g.get(i, j + 1) - g.get(i, j - 1)) / (2.0 * sp)
            };
            gx[fr.index(i, j)] = dx;
            gy[fr.index(i, j)] = dy;
        }
    }
    Ok((Grid::from_parts_unchecked(fr, gx), Grid::from_parts_unchecked(fr, gy)))
}

pub fn gradient_magnitude(g: &ScalarGrid) -> Result<ScalarGrid> {
    let (gx, gy) = gradient(g)?;
    gx.zip_with(&gy, f64::hypot)
}

/// Five-point Laplacian; border samples are set to zero.
pub fn laplacian(g: &ScalarGrid) -> Result<ScalarGrid> {
    require_3x3(g)?;
    let fr = *g.frame();
    let inv_h2 = 1.0 / (fr.spacing * fr.spacing);
    let mut out = vec![0.0; fr.len()];
    for j in 1..fr.height - 1 {
        for i in 1..fr.width - 1 {
            let s = g.get(i + 1, j) + g.get(i - 1, j) + g.get(i, j + 1) + g.get(i, j - 1) - 4.0 * g.get(i, j);
            out[fr.index(i, j)] = s * inv_h2;
        }
    }
    Ok(Grid::from_parts_unchecked(fr, out))
}

/// 1 where the sample is strictly greater than `level`, else 0.
pub fn threshold_binary(g: &ScalarGrid, level: f64) -> ScalarGrid {
    g.map(|v| if v > level { 1.0 } else { 0.0 })
}

/// Member of a [`FeatureStack`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Value,
    GradX,
    GradY,
    GradMag,
    Laplacian,
    /// Binary edge map: gradient magnitude above the stack's threshold level.
    Thresholded,
}

impl Component {
    pub const ALL: [Component; 6] = [
        Component::Value,
        Component::GradX,
        Component::GradY,
        Component::GradMag,
        Component::Laplacian,
        Component::Thresholded,
    ];
}

/// A field expanded into its value and low-order derivative terms.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureStack {
    base: ScalarGrid,
    grad_x: ScalarGrid,
    grad_y: ScalarGrid,
    grad_mag: ScalarGrid,
    laplacian: ScalarGrid,
    thresholded: Option<ScalarGrid>,
    threshold_level: Option<f64>,
}

impl FeatureStack {
    pub fn base(&self) -> &ScalarGrid {
        &self.base
    }

    pub fn frame(&self) -> &Frame {
        self.base.frame()
    }

    pub fn threshold_level(&self) -> Option<f64> {
        self.threshold_level
    }

    /// Returns the requested member, or `None` for an absent thresholded map.
    pub fn component(&self, c: Component) -> Option<&ScalarGrid> {
        match c {
            Component::Value => Some(&self.base),
            Component::GradX => Some(&self.grad_x),
            Component::GradY => Some(&self.grad_y),
            Component::GradMag => Some(&self.grad_mag),
            Component::Laplacian => Some(&self.laplacian),
            Component::Thresholded => self.thresholded.as_ref(),
        }
    }

    pub fn gradient(&self) -> (&ScalarGrid, &ScalarGrid) {
        (&self.grad_x, &self.grad_y)
    }

    /// Stack of the negated field; derivative members are negated exactly.
    pub fn negated(&self) -> FeatureStack {
        let neg = |g: &ScalarGrid| g.map(|v| -v);
        FeatureStack {
            base: neg(&self.base),
            grad_x: neg(&self.grad_x),
            grad_y: neg(&self.grad_y),
            grad_mag: self.grad_mag.clone(),
            laplacian: neg(&self.laplacian),
            thresholded: self.thresholded.clone(),
            threshold_level: self.threshold_level,
        }
    }
}

/// Expands `g` into value, gradient, gradient magnitude and Laplacian. When a
/// threshold level is given, the gradient magnitude is also binarized.
pub fn feature_expand(g: &ScalarGrid, threshold_level: Option<f64>) -> Result<FeatureStack> {
    let (grad_x, grad_y) = gradient(g)?;
    let grad_mag = grad_x.zip_with(&grad_y, f64::hypot)?;
    let laplacian = laplacian(g)?;
    let thresholded = threshold_level.map(|level| threshold_binary(&grad_mag, level));
    Ok(FeatureStack {
        base: g.clone(),
        grad_x,
        grad_y,
        grad_mag,
        laplacian,
        thresholded,
        threshold_level,
    })
}
