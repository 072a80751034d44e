//! Synthetic scenes with known ground truth.

use amphough_core::grid::{Frame, ScalarGrid};
use amphough_core::io::fmt_g17;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::config::{JobConfig, Section};
use crate::error::{CliError, Result};

/// Supersampling factor per axis for filled shapes.
const SUPERSAMPLE: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Point {
        x: f64,
        y: f64,
    },
    Line {
        r: f64,
        theta: f64,
        width: f64,
    },
    Circle {
        cx: f64,
        cy: f64,
        radius: f64,
        width: f64,
    },
    /// Filled image of the unit square `[-1/2, 1/2]^2` under the pose.
    Square {
        x0: f64,
        y0: f64,
        s: f64,
        theta: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub width: usize,
    pub height: usize,
    pub noise_sigma: f64,
    pub shapes: Vec<(Shape, f64)>,
}

pub const SYNTH_KEYS: &[&str] = &["width", "height", "noise_sigma", "output", "maxval", "encoding", "seed"];

impl Scene {
    pub fn from_config(cfg: &JobConfig) -> Result<Self> {
        let top = &cfg.top;
        let width: usize = top.get("width", 64)?;
        let height: usize = top.get("height", 64)?;
        if width == 0 || height == 0 || width.saturating_mul(height) > amphough_core::io::MAX_PIXELS {
            return Err(CliError::BadScene(format!(
                "image size {width}x{height} is out of range"
            )));
        }
        let noise_sigma = top.real("noise_sigma", 0.0)?;
        if noise_sigma < 0.0 {
            return Err(top.error("noise_sigma", "must be non-negative"));
        }
        let shapes = cfg.shapes.iter().map(shape_from).collect::<Result<_>>()?;
        Ok(Self {
            width,
            height,
            noise_sigma,
            shapes,
        })
    }

    /// Renders the scene, adds seeded Gaussian noise and clamps to `[0, 1]`.
    pub fn render(&self, seed: u64) -> Result<ScalarGrid> {
        let fr = Frame::pixels(self.width, self.height)?;
        let mut values = vec![0.0; fr.len()];
        for (shape, value) in &self.shapes {
            draw(&mut values, &fr, shape, *value)?;
        }
        if self.noise_sigma > 0.0 {
            let normal = Normal::new(0.0, self.noise_sigma).map_err(|e| CliError::BadScene(e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for v in values.iter_mut() {
                *v += normal.sample(&mut rng);
            }
        }
        values.iter_mut().for_each(|v| *v = v.clamp(0.0, 1.0));
        Ok(ScalarGrid::new(fr, values)?)
    }

    /// Ground-truth sidecar, one shape per line.
    pub fn truth(&self) -> String {
        let mut out = String::new();
        for (shape, _) in &self.shapes {
            let (name, params) = match shape {
                Shape::Point { x, y } => ("point", vec![*x, *y]),
                Shape::Line { r, theta, .. } => ("line", vec![*r, *theta]),
                Shape::Circle { cx, cy, radius, .. } => ("circle", vec![*cx, *cy, *radius]),
                Shape::Square { x0, y0, s, theta } => ("square", vec![*x0, *y0, *s, *theta]),
            };
            out.push_str(name);
            for p in params {
                out.push(' ');
                out.push_str(&fmt_g17(p));
            }
            out.push('\n');
        }
        out
    }
}

fn shape_from(sec: &Section) -> Result<(Shape, f64)> {
    let kind = sec.str("kind").ok_or_else(|| sec.error("kind", "missing shape kind"))?;
    let value = sec.real("value", 1.0)?;
    let width = sec.real("width", 1.0)?;
    let shape = match kind {
        "point" => {
            sec.check_keys(&["kind", "value", "x", "y"])?;
            Shape::Point {
                x: sec.require_real("x")?,
                y: sec.require_real("y")?,
            }
        }
        "line" => {
            sec.check_keys(&["kind", "value", "width", "r", "theta"])?;
            Shape::Line {
                r: sec.require_real("r")?,
                theta: sec.require_real("theta")?,
                width,
            }
        }
        "circle" => {
            sec.check_keys(&["kind", "value", "width", "cx", "cy", "radius"])?;
            let radius = sec.require_real("radius")?;
            if radius <= 0.0 {
                return Err(sec.error("radius", "must be positive"));
            }
            Shape::Circle {
                cx: sec.require_real("cx")?,
                cy: sec.require_real("cy")?,
                radius,
                width,
            }
        }
        "square" => {
            sec.check_keys(&["kind", "value", "x0", "y0", "s", "theta"])?;
            let s = sec.require_real("s")?;
            if s <= 0.0 {
                return Err(sec.error("s", "must be positive"));
            }
            Shape::Square {
                x0: sec.require_real("x0")?,
                y0: sec.require_real("y0")?,
                s,
                theta: sec.require_real("theta")?,
            }
        }
        other => return Err(sec.error("kind", &format!("unknown shape {other:?}"))),
    };
    if width <= 0.0 {
        return Err(sec.error("width", "must be positive"));
    }
    Ok((shape, value))
}

fn draw(values: &mut [f64], fr: &Frame, shape: &Shape, value: f64) -> Result<()> {
    match *shape {
        Shape::Point { x, y } => {
            let (i, j) = (x.round(), y.round());
            if i < 0.0 || j < 0.0 || i >= fr.width as f64 || j >= fr.height as f64 {
                return Err(CliError::BadScene(format!("point ({x}, {y}) lies outside the image")));
            }
            values[fr.index(i as usize, j as usize)] += value;
        }
        Shape::Line { r, theta, width } => {
            let (s, c) = theta.sin_cos();
            fill(values, fr, value, |x, y| (x * c + y * s - r).abs() < 0.5 * width);
        }
        Shape::Circle { cx, cy, radius, width } => {
            fill(values, fr, value, |x, y| {
                ((x - cx).hypot(y - cy) - radius).abs() < 0.5 * width
            });
        }
        Shape::Square { x0, y0, s, theta } => {
            let (sn, cs) = theta.sin_cos();
            let inside = |x: f64, y: f64| {
                let (dx, dy) = ((x - x0) / s, (y - y0) / s);
                let (u, v) = (cs * dx + sn * dy, -sn * dx + cs * dy);
                u.abs() <= 0.5 && v.abs() <= 0.5
            };
            let n = SUPERSAMPLE as f64;
            for j in 0..fr.height {
                for i in 0..fr.width {
                    let mut hits = 0;
                    for b in 0..SUPERSAMPLE {
                        for a in 0..SUPERSAMPLE {
                            let x = i as f64 + (a as f64 + 0.5) / n - 0.5;
                            let y = j as f64 + (b as f64 + 0.5) / n - 0.5;
                            if inside(x, y) {
                                hits += 1;
                            }
                        }
                    }
                    values[fr.index(i, j)] += value * hits as f64 / (n * n);
                }
            }
        }
    }
    Ok(())
}

fn fill(values: &mut [f64], fr: &Frame, value: f64, inside: impl Fn(f64, f64) -> bool) {
    for j in 0..fr.height {
        for i in 0..fr.width {
            if inside(fr.x(i), fr.y(j)) {
                values[fr.index(i, j)] += value;
            }
        }
    }
}
