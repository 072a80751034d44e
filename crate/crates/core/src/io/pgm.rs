use std::fs;
use std::path::{Path, PathBuf};

use super::{fmt_g17, parse_real};
use crate::error::{Error, Result};
use crate::grid::{Frame, ScalarGrid};

/// Largest image accepted by the reader, in pixels.
pub const MAX_PIXELS: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmEncoding {
    /// `P2`, decimal samples.
    Ascii,
    /// `P5`, big-endian binary samples (two bytes when maxval > 255).
    Binary,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.data.len() {
            let b = self.data[self.pos];
            if b == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' && self.data[self.pos] != b'\r' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn uint(&mut self, what: &str) -> Result<u64> {
        self.skip_space_and_comments();
        let start = self.pos;
        let mut v: u64 = 0;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(self.data[self.pos] - b'0')))
                .ok_or_else(|| Error::Format(format!("{what} is too large")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::Format(format!("expected {what}")));
        }
        if self.pos < self.data.len() && !(self.data[self.pos].is_ascii_whitespace() || self.data[self.pos] == b'#') {
            return Err(Error::Format(format!("malformed {what}")));
        }
        Ok(v)
    }
}

/// Reads a P2 or P5 image into `[0, 1]` (sample / maxval) on a pixel frame.
pub fn read_pgm(data: &[u8]) -> Result<ScalarGrid> {
    let binary = match data.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(Error::Format("not a P2/P5 PGM file".into())),
    };
    let mut c = Cursor { data, pos: 2 };
    if c.pos < data.len() && !(data[c.pos].is_ascii_whitespace() || data[c.pos] == b'#') {
        return Err(Error::Format("malformed magic number".into()));
    }
    let width = c.uint("width")?;
    let height = c.uint("height")?;
    let maxval = c.uint("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("dimensions {width}x{height} must be positive")));
    }
    if !(1..=65535).contains(&maxval) {
        return Err(Error::Format(format!("maxval {maxval} must be in 1..=65535")));
    }
    let n = width
        .checked_mul(height)
        .filter(|n| *n <= MAX_PIXELS as u64)
        .ok_or_else(|| Error::Format(format!("{width}x{height} image exceeds {MAX_PIXELS} pixels")))?
        as usize;
    let (width, height) = (width as usize, height as usize);
    let scale = 1.0 / maxval as f64;

    let mut values = Vec::with_capacity(n);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        match data.get(c.pos) {
            Some(b) if b.is_ascii_whitespace() => c.pos += 1,
            _ => return Err(Error::Format("missing raster separator".into())),
        }
        let bytes_per = if maxval > 255 { 2 } else { 1 };
        let raster = &data[c.pos..];
        if raster.len() < n * bytes_per {
            return Err(Error::Format(format!(
                "raster has {} bytes, {} expected",
                raster.len(),
                n * bytes_per
            )));
        }
        for k in 0..n {
            let s = if bytes_per == 2 {
                u64::from(u16::from_be_bytes([raster[2 * k], raster[2 * k + 1]]))
            } else {
                u64::from(raster[k])
            };
            if s > maxval {
                return Err(Error::Format(format!("sample {s} exceeds maxval {maxval}")));
            }
            values.push(s as f64 * scale);
        }
    } else {
        for _ in 0..n {
            let s = c.uint("sample")?;
            if s > maxval {
                return Err(Error::Format(format!("sample {s} exceeds maxval {maxval}")));
            }
            values.push(s as f64 * scale);
        }
    }
    ScalarGrid::new(Frame::pixels(width, height)?, values)
}

/// Writes samples in `[0, 1]` quantized to `round(v * maxval)`.
pub fn write_pgm(g: &ScalarGrid, maxval: u16, encoding: PgmEncoding) -> Result<Vec<u8>> {
    if maxval == 0 {
        return Err(Error::Format("maxval must be positive".into()));
    }
    let quantized = g
        .values()
        .iter()
        .map(|&v| {
            if (0.0..=1.0).contains(&v) {
                Ok((v * maxval as f64).round() as u16)
            } else {
                Err(Error::Format(format!("sample {v} lies outside [0, 1]")))
            }
        })
        .collect::<Result<Vec<u16>>>()?;
    let (w, h) = (g.width(), g.height());
    let mut out = Vec::new();
    match encoding {
        PgmEncoding::Binary => {
            out.extend_from_slice(format!("P5\n{w} {h}\n{maxval}\n").as_bytes());
            for q in quantized {
                if maxval > 255 {
                    out.extend_from_slice(&q.to_be_bytes());
                } else {
                    out.push(q as u8);
                }
            }
        }
        PgmEncoding::Ascii => {
            out.extend_from_slice(format!("P2\n{w} {h}\n{maxval}\n").as_bytes());
            for row in quantized.chunks(w) {
                let line: Vec<String> = row.iter().map(u16::to_string).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
    }
    Ok(out)
}

/// `(min, max)` of the finite samples, `(0, 0)` when there are none.
pub fn heatmap_range(values: &[f64]) -> (f64, f64) {
    let mut it = values.iter().copied().filter(|v| v.is_finite());
    let Some(first) = it.next() else {
        return (0.0, 0.0);
    };
    it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn rescale(values: &[f64]) -> (Vec<f64>, (f64, f64)) {
    let (lo, hi) = heatmap_range(values);
    let span = hi - lo;
    let unit = values
        .iter()
        .map(|v| {
            if span > 0.0 {
                ((v - lo) / span).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
        .collect();
    (unit, (lo, hi))
}

fn scale_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".scale");
    PathBuf::from(p)
}

fn write_scale(path: &Path, (lo, hi): (f64, f64)) -> Result<()> {
    fs::write(scale_path(path), format!("min {}\nmax {}\n", fmt_g17(lo), fmt_g17(hi)))?;
    Ok(())
}

/// Parses a `.scale` sidecar into `(min, max)`.
pub fn read_heatmap_scale(text: &str) -> Result<(f64, f64)> {
    let mut lo = None;
    let mut hi = None;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (key, value) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Format(format!("malformed scale line {line:?}")))?;
        let v = parse_real(value).ok_or_else(|| Error::Format(format!("bad number in {line:?}")))?;
        match key {
            "min" => lo = Some(v),
            "max" => hi = Some(v),
            _ => return Err(Error::Format(format!("unknown scale key {key:?}"))),
        }
    }
    match (lo, hi) {
        (Some(lo), Some(hi)) if lo <= hi => Ok((lo, hi)),
        _ => Err(Error::Format("scale needs min <= max".into())),
    }
}

/// 16-bit P5 heatmap of `g`, affinely mapped from `[min, max]` to
/// `[0, 65535]`, with the range written to `<path>.scale`.
pub fn write_heatmap_pgm(path: &Path, g: &ScalarGrid) -> Result<(f64, f64)> {
    let (unit, range) = rescale(g.values());
    let img = ScalarGrid::new(*g.frame(), unit)?;
    fs::write(path, write_pgm(&img, u16::MAX, PgmEncoding::Binary)?)?;
    write_scale(path, range)?;
    Ok(range)
}

/// 8-bit P6 heatmap on a dark-to-bright ramp (black, red, yellow, white),
/// with the same sidecar as [`write_heatmap_pgm`].
pub fn write_heatmap_ppm(path: &Path, g: &ScalarGrid) -> Result<(f64, f64)> {
    let (unit, range) = rescale(g.values());
    let mut out = format!("P6\n{} {}\n255\n", g.width(), g.height()).into_bytes();
    for t in unit {
        let (r, gr, b) = (
            (3.0 * t).min(1.0),
            (3.0 * t - 1.0).clamp(0.0, 1.0),
            (3.0 * t - 2.0).clamp(0.0, 1.0),
        );
        out.extend([r, gr, b].map(|c| (c * 255.0).round() as u8));
    }
    fs::write(path, out)?;
    write_scale(path, range)?;
    Ok(range)
}
