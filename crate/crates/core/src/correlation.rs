//! Linear cross-correlation `C(s) = sum_p f(s + p) t(p) h^2` and 2-D DFTs.
//!
//! The correlation is zero-padded (never circular) and the template is not
//! flipped. A map covers every integer shift at which template and image
//! overlap: `(fw + tw - 1) x (fh + th - 1)` cells, with the zero shift at
//! lattice index `(tw - 1, th - 1)`.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{ComplexGrid, Frame, Grid, ScalarGrid};

/// A correlation surface over template shifts.
///
/// The physical shift of a cell is its frame position; the zero index shift
/// corresponds to physical shift `f.origin - t.origin`, which is zero when
/// image and template share an origin.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMap {
    pub grid: ScalarGrid,
    pub normalized: bool,
    zero_shift: (usize, usize),
}

impl CorrelationMap {
    /// Lattice index of the zero shift.
    pub fn zero_shift(&self) -> (usize, usize) {
        self.zero_shift
    }

    /// Value at integer shift `(dx, dy)`, zero where there is no overlap.
    pub fn at_shift(&self, dx: isize, dy: isize) -> f64 {
        let i = self.zero_shift.0 as isize + dx;
        let j = self.zero_shift.1 as isize + dy;
        if i < 0 || j < 0 || i as usize >= self.grid.width() || j as usize >= self.grid.height() {
            0.0
        } else {
            self.grid.get(i as usize, j as usize)
        }
    }

    /// Divides each cell by `sqrt(energy(t) * local_energy(f))`, where the
    /// local energy is taken over the template window at that shift. Cells
    /// with no image energy become zero.
    pub fn normalize(&self, f: &ScalarGrid, t: &ScalarGrid) -> Result<CorrelationMap> {
        let (fr, tw, th) = check_shapes(f, t)?;
        let area = fr.cell_area();
        let t_energy: f64 = t.values().iter().map(|v| v * v).sum::<f64>() * area;
        let sat = SummedArea::new(f, |v| v * v);
        let (zx, zy) = self.zero_shift;
        let mut out = Vec::with_capacity(self.grid.frame().len());
        for b in 0..self.grid.height() {
            for a in 0..self.grid.width() {
                let dx = a as isize - zx as isize;
                let dy = b as isize - zy as isize;
                let local = sat.window(dx, dy, tw, th) * area;
                let denom = (t_energy * local).sqrt();
                let c = self.grid.get(a, b);
                out.push(if denom > 0.0 { c / denom } else { 0.0 });
            }
        }
        Ok(CorrelationMap {
            grid: ScalarGrid::new(*self.grid.frame(), out)?,
            normalized: true,
            zero_shift: self.zero_shift,
        })
    }
}

fn check_shapes(f: &ScalarGrid, t: &ScalarGrid) -> Result<(Frame, usize, usize)> {
    let (fw, fh, tw, th) = (f.width(), f.height(), t.width(), t.height());
    if tw > fw || th > fh {
        return Err(Error::TemplateLargerThanImage { tw, th, fw, fh });
    }
    let (hf, ht) = (f.spacing(), t.spacing());
    if (hf - ht).abs() > 1e-12 * hf.max(ht) {
        return Err(Error::SpacingMismatch(hf, ht));
    }
    Ok((*f.frame(), tw, th))
}

fn map_frame(f: &ScalarGrid, t: &ScalarGrid) -> Result<Frame> {
    let h = f.spacing();
    let (tw, th) = (t.width(), t.height());
    Frame::new(
        f.width() + tw - 1,
        f.height() + th - 1,
        f.frame().origin_x - t.frame().origin_x - (tw - 1) as f64 * h,
        f.frame().origin_y - t.frame().origin_y - (th - 1) as f64 * h,
        h,
    )
}

/// Direct summation over every overlapping shift.
pub fn cross_correlate_direct(f: &ScalarGrid, t: &ScalarGrid) -> Result<CorrelationMap> {
    let (fr, tw, th) = check_shapes(f, t)?;
    let out_frame = map_frame(f, t)?;
    let (fw, fh) = (fr.width as isize, fr.height as isize);
    let area = fr.cell_area();
    let mut out = Vec::with_capacity(out_frame.len());
    for b in 0..out_frame.height {
        let dy = b as isize - (th as isize - 1);
        let q_lo = (-dy).max(0) as usize;
        let q_hi = (fh - dy).min(th as isize) as usize;
        for a in 0..out_frame.width {
            let dx = a as isize - (tw as isize - 1);
            let p_lo = (-dx).max(0) as usize;
            let p_hi = (fw - dx).min(tw as isize) as usize;
            let mut sum = 0.0;
            for q in q_lo..q_hi {
                let fj = (q as isize + dy) as usize;
                for p in p_lo..p_hi {
                    sum += f.get((p as isize + dx) as usize, fj) * t.get(p, q);
                }
            }
            out.push(sum * area);
        }
    }
    Ok(CorrelationMap {
        grid: Grid::new(out_frame, out)?,
        normalized: false,
        zero_shift: (tw - 1, th - 1),
    })
}

/// Same contract as [`cross_correlate_direct`], evaluated through padded FFTs
/// and the conjugate spectral product.
pub fn cross_correlate_fft(f: &ScalarGrid, t: &ScalarGrid) -> Result<CorrelationMap> {
    let (fr, tw, th) = check_shapes(f, t)?;
    let out_frame = map_frame(f, t)?;
    let pw = out_frame.width.next_power_of_two();
    let ph = out_frame.height.next_power_of_two();

    let pad = |g: &ScalarGrid| {
        let mut buf = vec![Complex64::new(0.0, 0.0); pw * ph];
        for j in 0..g.height() {
            for i in 0..g.width() {
                buf[j * pw + i] = Complex64::new(g.get(i, j), 0.0);
            }
        }
        buf
    };
    let mut planner = FftPlanner::new();
    let mut fs = pad(f);
    let mut ts = pad(t);
    fft2_in_place(&mut planner, &mut fs, pw, ph, FftDirection::Forward);
    fft2_in_place(&mut planner, &mut ts, pw, ph, FftDirection::Forward);
    for (a, b) in fs.iter_mut().zip(&ts) {
        *a *= b.conj();
    }
    fft2_in_place(&mut planner, &mut fs, pw, ph, FftDirection::Inverse);

    let scale = fr.cell_area() / (pw * ph) as f64;
    let mut out = Vec::with_capacity(out_frame.len());
    let mut residue = 0.0f64;
    let mut peak = 0.0f64;
    for b in 0..out_frame.height {
        let dy = b as isize - (th as isize - 1);
        let row = dy.rem_euclid(ph as isize) as usize;
        for a in 0..out_frame.width {
            let dx = a as isize - (tw as isize - 1);
            let col = dx.rem_euclid(pw as isize) as usize;
            let c = fs[row * pw + col] * scale;
            residue = residue.max(c.im.abs());
            peak = peak.max(c.re.abs());
            out.push(c.re);
        }
    }
    // The residue bound is relative to the map, with a floor at the
    // Cauchy-Schwarz scale so that all-zero maps do not trip it.
    let norm = |g: &ScalarGrid| g.values().iter().map(|v| v * v).sum::<f64>().sqrt();
    let floor = 1e-6 * norm(f) * norm(t) * fr.cell_area();
    let limit = 1e-9 * peak.max(floor);
    if residue > limit {
        return Err(Error::FourierResidueTooLarge { residue, limit });
    }
    Ok(CorrelationMap {
        grid: Grid::new(out_frame, out)?,
        normalized: false,
        zero_shift: (tw - 1, th - 1),
    })
}

/// Correlation of a template with itself: the point-spread of a match.
pub fn autocorrelate(t: &ScalarGrid) -> CorrelationMap {
    let n = t.frame().len();
    let direct = || cross_correlate_direct(t, t).expect("template always fits itself");
    if n.saturating_mul(n) <= 1 << 24 {
        direct()
    } else {
        cross_correlate_fft(t, t).unwrap_or_else(|_| direct())
    }
}

/// Unnormalized forward DFT with kernel `exp(-2 pi i (u x / W + v y / H))`.
/// The output keeps the input frame; cell `(u, v)` is frequency bin `(u, v)`.
pub fn dft2(g: &ComplexGrid) -> ComplexGrid {
    transform(g, FftDirection::Forward, 1.0)
}

/// Inverse of [`dft2`], including the `1/(W H)` factor.
pub fn idft2(g: &ComplexGrid) -> ComplexGrid {
    let n = g.frame().len() as f64;
    transform(g, FftDirection::Inverse, 1.0 / n)
}

fn transform(g: &ComplexGrid, dir: FftDirection, scale: f64) -> ComplexGrid {
    let (w, h) = (g.width(), g.height());
    let mut buf = g.values().to_vec();
    let mut planner = FftPlanner::new();
    fft2_in_place(&mut planner, &mut buf, w, h, dir);
    if scale != 1.0 {
        buf.iter_mut().for_each(|v| *v *= scale);
    }
    Grid::from_parts_unchecked(*g.frame(), buf)
}

fn fft2_in_place(planner: &mut FftPlanner<f64>, buf: &mut [Complex64], w: usize, h: usize, dir: FftDirection) {
    let row_fft = planner.plan_fft(w, dir);
    let mut scratch = vec![Complex64::new(0.0, 0.0); row_fft.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(w) {
        row_fft.process_with_scratch(row, &mut scratch);
    }
    let col_fft = planner.plan_fft(h, dir);
    let mut col = vec![Complex64::new(0.0, 0.0); h];
    let mut scratch = vec![Complex64::new(0.0, 0.0); col_fft.get_inplace_scratch_len()];
    for i in 0..w {
        for j in 0..h {
            col[j] = buf[j * w + i];
        }
        col_fft.process_with_scratch(&mut col, &mut scratch);
        for j in 0..h {
            buf[j * w + i] = col[j];
        }
    }
}

/// Summed-area table of `g(f)` for box sums with zero padding.
struct SummedArea {
    w: usize,
    h: usize,
    table: Vec<f64>,
}

impl SummedArea {
    fn new(f: &ScalarGrid, g: impl Fn(f64) -> f64) -> Self {
        let (w, h) = (f.width(), f.height());
        let mut table = vec![0.0; (w + 1) * (h + 1)];
        for j in 0..h {
            let mut row = 0.0;
            for i in 0..w {
                row += g(f.get(i, j));
                table[(j + 1) * (w + 1) + i + 1] = table[j * (w + 1) + i + 1] + row;
            }
        }
        Self { w, h, table }
    }

    /// Sum over `[dx, dx + tw) x [dy, dy + th)`, clipped to the grid.
    fn window(&self, dx: isize, dy: isize, tw: usize, th: usize) -> f64 {
        let clip = |v: isize, n: usize| v.clamp(0, n as isize) as usize;
        let (x0, x1) = (clip(dx, self.w), clip(dx + tw as isize, self.w));
        let (y0, y1) = (clip(dy, self.h), clip(dy + th as isize, self.h));
        let at = |x: usize, y: usize| self.table[y * (self.w + 1) + x];
        // Clamp tiny negatives from cancellation.
        (at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0)).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pix(w: usize, h: usize, vals: impl Fn(usize, usize) -> f64) -> ScalarGrid {
        let fr = Frame::pixels(w, h).unwrap();
        ScalarGrid::from_fn(fr, |x, y| vals(x as usize, y as usize)).unwrap()
    }

    #[test]
    fn impulse_template_reproduces_image() {
        let f = pix(7, 5, |i, j| (i * 3 + j * 7) as f64 * 0.1);
        let t = pix(1, 1, |_, _| 1.0);
        for c in [
            cross_correlate_direct(&f, &t).unwrap(),
            cross_correlate_fft(&f, &t).unwrap(),
        ] {
            assert_eq!(c.zero_shift(), (0, 0));
            for j in 0..5 {
                for i in 0..7 {
                    assert!((c.at_shift(i as isize, j as isize) - f.get(i, j)).abs() < 1e-12);
                }
            }
        }
        assert_eq!(cross_correlate_direct(&f, &t).unwrap().grid.values(), f.values());
    }

    #[test]
    fn impulse_pair_peaks_at_zero_shift() {
        let f = pix(5, 5, |i, j| if (i, j) == (0, 0) { 1.0 } else { 0.0 });
        let c = cross_correlate_direct(&f, &f).unwrap();
        assert_eq!(c.at_shift(0, 0), 1.0);
        assert_eq!(c.grid.values().iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn template_larger_than_image() {
        let f = pix(4, 4, |_, _| 1.0);
        let t = pix(5, 2, |_, _| 1.0);
        let err = Error::TemplateLargerThanImage {
            tw: 5,
            th: 2,
            fw: 4,
            fh: 4,
        };
        assert_eq!(cross_correlate_direct(&f, &t).unwrap_err(), err);
        assert_eq!(cross_correlate_fft(&f, &t).unwrap_err(), err);
    }

    #[test]
    fn spacing_mismatch() {
        let f = pix(4, 4, |_, _| 1.0);
        let t = ScalarGrid::from_fn(Frame::new(2, 2, 0.0, 0.0, 0.5).unwrap(), |_, _| 1.0).unwrap();
        assert!(matches!(
            cross_correlate_direct(&f, &t),
            Err(Error::SpacingMismatch(..))
        ));
    }

    #[test]
    fn square_autocorrelation_peaks_at_origin() {
        let f = pix(9, 9, |i, j| {
            if (3..6).contains(&i) && (3..6).contains(&j) {
                1.0
            } else {
                0.0
            }
        });
        let c = cross_correlate_fft(&f, &f).unwrap();
        let (zx, zy) = c.zero_shift();
        let peak = c.grid.get(zx, zy);
        assert!((peak - 9.0).abs() < 1e-9);
        assert!(c.grid.values().iter().all(|v| *v <= peak + 1e-12));
    }

    #[test]
    fn normalized_self_match_is_one() {
        let f = pix(12, 10, |i, j| ((i * 7 + j * 13) % 5) as f64);
        let t = pix(3, 3, |i, j| f.get(i + 4, j + 2));
        let c = cross_correlate_direct(&f, &t).unwrap().normalize(&f, &t).unwrap();
        assert!(c.normalized);
        assert!((c.at_shift(4, 2) - 1.0).abs() < 1e-12);
        assert!(c.grid.values().iter().all(|v| *v <= 1.0 + 1e-12));
    }

    #[test]
    fn dft_impulse_and_constant() {
        let fr = Frame::pixels(6, 4).unwrap();
        let imp = pix(6, 4, |i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 }).to_complex();
        assert!(dft2(&imp)
            .values()
            .iter()
            .all(|v| (*v - Complex64::new(1.0, 0.0)).norm() < 1e-12));
        let c = ComplexGrid::from_fn(fr, |_, _| Complex64::new(2.5, 0.0)).unwrap();
        let s = dft2(&c);
        assert!((s.get(0, 0) - Complex64::new(60.0, 0.0)).norm() < 1e-12);
        assert!(s.values()[1..].iter().all(|v| v.norm() < 1e-12));
    }
}
