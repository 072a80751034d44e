//! Text tables. Numbers are written with [`fmt_g17`] so every value reads
//! back bit for bit.

use std::f64::consts::PI;

use super::{fmt_g17, parse_real};
use crate::error::{Error, Result};
use crate::filters::Detection;
use crate::grid::{Frame, ScalarGrid};
use crate::group::GroupElement;
use crate::radon::Sinogram;

const MAX_CELLS: usize = 1 << 26;

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(fmt_g17).collect::<Vec<_>>().join(",")
}

fn parse_row(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|cell| {
            parse_real(cell).ok_or_else(|| Error::Format(format!("line {lineno}: bad number {:?}", cell.trim())))
        })
        .collect()
}

/// Grid dump: a `# frame` comment carrying `origin_x origin_y spacing`, then
/// one comma-separated row per scanline.
pub fn write_grid_csv(g: &ScalarGrid) -> String {
    let fr = g.frame();
    let mut out = format!(
        "# frame {} {} {}\n",
        fmt_g17(fr.origin_x),
        fmt_g17(fr.origin_y),
        fmt_g17(fr.spacing)
    );
    for row in g.values().chunks(fr.width) {
        out.push_str(&join(row.iter().copied()));
        out.push('\n');
    }
    out
}

/// Reads [`write_grid_csv`] output. Without a `# frame` line the grid gets a
/// pixel frame.
pub fn read_grid_csv(text: &str) -> Result<ScalarGrid> {
    let mut frame_params = None;
    let mut width = None;
    let mut values = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut words = rest.split_whitespace();
            if words.next() == Some("frame") {
                let nums: Vec<f64> = words
                    .map(|w| {
                        parse_real(w).ok_or_else(|| Error::Format(format!("line {lineno}: bad frame value {w:?}")))
                    })
                    .collect::<Result<_>>()?;
                if nums.len() != 3 || !values.is_empty() {
                    return Err(Error::Format(format!("line {lineno}: malformed frame line")));
                }
                frame_params = Some((nums[0], nums[1], nums[2]));
            }
            continue;
        }
        let row = parse_row(line, lineno)?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Format(format!(
                    "line {lineno}: {} columns, {w} expected",
                    row.len()
                )))
            }
            _ => {}
        }
        if values.len() + row.len() > MAX_CELLS {
            return Err(Error::Format("table is too large".into()));
        }
        values.extend(row);
    }
    let width = width.ok_or_else(|| Error::Format("no data rows".into()))?;
    let height = values.len() / width;
    let (ox, oy, h) = frame_params.unwrap_or((0.0, 0.0, 1.0));
    ScalarGrid::new(Frame::new(width, height, ox, oy, h)?, values)
}

/// Plain matrix, one comma-separated row per line.
pub fn write_matrix_csv(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&join(row.iter().copied()));
        out.push('\n');
    }
    out
}

/// Header row `phi\r` followed by the r grid; then one row per angle,
/// led by its phi.
pub fn write_sinogram_csv(s: &Sinogram) -> String {
    let mut out = String::from("phi\\r,");
    out.push_str(&join((0..s.n_r()).map(|i| s.r(i))));
    out.push('\n');
    for j in 0..s.n_phi() {
        out.push_str(&fmt_g17(s.phi(j)));
        out.push(',');
        out.push_str(&join(s.column(j).iter().copied()));
        out.push('\n');
    }
    out
}

pub fn read_sinogram_csv(text: &str) -> Result<Sinogram> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format("empty sinogram table".into()))?;
    let (corner, r_cells) = header
        .split_once(',')
        .ok_or_else(|| Error::Format("line 1: header needs an r grid".into()))?;
    if corner.trim() != "phi\\r" {
        return Err(Error::Format("line 1: header must start with phi\\r".into()));
    }
    let r = parse_row(r_cells, 1)?;
    let n_r = r.len();
    let mut phis = Vec::new();
    let mut values = Vec::new();
    for (n, line) in lines {
        let row = parse_row(line, n + 1)?;
        if row.len() != n_r + 1 {
            return Err(Error::Format(format!(
                "line {}: {} columns, {} expected",
                n + 1,
                row.len(),
                n_r + 1
            )));
        }
        if values.len() + n_r > MAX_CELLS {
            return Err(Error::Format("table is too large".into()));
        }
        phis.push(row[0]);
        values.extend_from_slice(&row[1..]);
    }
    if n_r < 2 {
        return Err(Error::Format("r grid needs at least two points".into()));
    }
    let s = Sinogram::new(r[0], r[n_r - 1], n_r, phis.len(), values)?;
    for (i, want) in r.iter().enumerate() {
        if (s.r(i) - want).abs() > 1e-9 * (1.0 + want.abs()) {
            return Err(Error::Format(format!("r grid is not uniform at column {}", i + 2)));
        }
    }
    for (j, phi) in phis.iter().enumerate() {
        if (s.phi(j) - phi).abs() > 1e-9 * PI {
            return Err(Error::Format(format!(
                "phi {phi} in row {} does not match {j} pi / {}",
                j + 2,
                phis.len()
            )));
        }
    }
    Ok(s)
}

/// One detection per line: `x0 y0 s theta probability`.
pub fn write_detection_report(detections: &[Detection]) -> String {
    let mut out = String::new();
    for d in detections {
        let g = &d.g;
        out.push_str(&[g.x0(), g.y0(), g.s(), g.theta(), d.probability].map(fmt_g17).join(" "));
        out.push('\n');
    }
    out
}

/// Parses a report back into `(pose, probability)` pairs.
pub fn read_detection_report(text: &str) -> Result<Vec<(GroupElement, f64)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|w| parse_real(w).ok_or_else(|| Error::Format(format!("line {}: bad number {w:?}", n + 1))))
            .collect::<Result<_>>()?;
        if nums.len() != 5 {
            return Err(Error::Format(format!(
                "line {}: {} fields, 5 expected",
                n + 1,
                nums.len()
            )));
        }
        if out.len() >= MAX_CELLS {
            return Err(Error::Format("report is too large".into()));
        }
        out.push((GroupElement::new(nums[0], nums[1], nums[2], nums[3])?, nums[4]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip() {
        let fr = Frame::new(3, 2, -1.5, 0.25, 0.1).unwrap();
        let g = ScalarGrid::from_fn(fr, |x, y| x.sin() / 3.0 + y * 1e-300).unwrap();
        let text = write_grid_csv(&g);
        assert!(text.starts_with("# frame -1.5 0.25 0.10000000000000001\n"));
        assert_eq!(read_grid_csv(&text).unwrap(), g);
    }

    #[test]
    fn grid_without_frame_is_pixels() {
        let g = read_grid_csv("1,2\n3,4\n").unwrap();
        assert_eq!(*g.frame(), Frame::pixels(2, 2).unwrap());
        assert!(read_grid_csv("1,2\n3\n").is_err());
        assert!(read_grid_csv("").is_err());
        assert!(read_grid_csv("1,x\n").is_err());
        assert!(read_grid_csv("1,nan\n").is_err());
    }

    #[test]
    fn sinogram_round_trip() {
        let vals: Vec<f64> = (0..15).map(|i| (i as f64).powf(1.3) / 7.0).collect();
        let s = Sinogram::new(-2.0, 3.0, 5, 3, vals).unwrap();
        let text = write_sinogram_csv(&s);
        assert!(text.starts_with("phi\\r,-2,-0.75,0.5,1.75,3\n0,"));
        assert_eq!(read_sinogram_csv(&text).unwrap(), s);
        assert!(read_sinogram_csv("phi\\r,0,1\n0.5,1,2\n").is_err());
    }

    #[test]
    fn report_round_trip() {
        let d = Detection {
            g: GroupElement::new(31.25, 33.75, 13.0, 0.5).unwrap(),
            probability: 1.0 / 3.0,
            bins: [1, 2, 3, 4],
            theta_degenerate: false,
        };
        let text = write_detection_report(std::slice::from_ref(&d));
        assert_eq!(text, "31.25 33.75 13 0.5 0.33333333333333331\n");
        assert_eq!(read_detection_report(&text).unwrap(), vec![(d.g, d.probability)]);
        assert!(read_detection_report("1 2 3 4\n").is_err());
        assert!(read_detection_report("1 2 0 4 5\n").is_err());
    }
}
