use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use amphough_core::correlation::{cross_correlate_direct, cross_correlate_fft, CorrelationMap};
use amphough_core::filters::{
    accumulate, detect_peaks, probability_map, superpose_accumulators, CoefficientSet, Detection, FilterSpec,
    ProbabilityMap, Template,
};
use amphough_core::grid::{feature_expand, Frame, ScalarGrid};
use amphough_core::group::{
    extended_radon, make_template_curve, AmplitudeAccumulator, CurveGeometry, ParamLattice, ScaleSpacing,
};
use amphough_core::io::{
    fmt_g17, read_pgm, write_amph, write_detection_report, write_grid_csv, write_heatmap_pgm, write_matrix_csv,
    write_pgm, write_sinogram_csv, PgmEncoding,
};
use amphough_core::radon::radon_transform;
use amphough_core::wave::{intensity, two_wave_intensity, wave};
use num_complex::Complex64;

use crate::config::{JobConfig, Section};
use crate::error::{CliError, Result};
use crate::synth::{Scene, SYNTH_KEYS};

/// A parsed job: configuration plus where to read from and write to.
pub struct Job {
    pub cfg: JobConfig,
    /// Relative input paths resolve against this directory.
    pub base_dir: PathBuf,
    pub out_dir: PathBuf,
    pub seed: u64,
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub stdout: String,
}

impl Job {
    fn input(&self, key: &str) -> Result<PathBuf> {
        let name: String = self.cfg.top.require(key)?;
        Ok(self.base_dir.join(name))
    }

    fn read_image(&self, key: &str) -> Result<ScalarGrid> {
        let path = self.input(key)?;
        let bytes = fs::read(&path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        read_pgm(&bytes).map_err(|source| CliError::File { path, source })
    }

    fn write(&self, out: &mut Outcome, name: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf> {
        let path = self.out_dir.join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        out.files.push(path.clone());
        Ok(path)
    }

    fn heatmap(&self, out: &mut Outcome, name: &str, g: &ScalarGrid) -> Result<()> {
        let path = self.out_dir.join(name);
        write_heatmap_pgm(&path, g).map_err(|source| CliError::File {
            path: path.clone(),
            source,
        })?;
        let mut scale = path.clone().into_os_string();
        scale.push(".scale");
        out.files.push(path);
        out.files.push(scale.into());
        Ok(())
    }

    fn ensure_out_dir(&self) -> Result<()> {
        fs::create_dir_all(&self.out_dir).map_err(|source| CliError::Io {
            path: self.out_dir.clone(),
            source,
        })
    }
}

pub fn synth(job: &Job) -> Result<Outcome> {
    let top = &job.cfg.top;
    top.check_keys(SYNTH_KEYS)?;
    if !job.cfg.filters.is_empty() {
        return Err(CliError::Config {
            line: job.cfg.filters[0].line,
            msg: "synth takes no [filter] blocks".into(),
        });
    }
    let scene = Scene::from_config(&job.cfg)?;
    let maxval: u16 = top.get("maxval", u16::MAX)?;
    let encoding = match top.str("encoding").unwrap_or("binary") {
        "binary" => PgmEncoding::Binary,
        "ascii" => PgmEncoding::Ascii,
        other => return Err(top.error("encoding", &format!("expected binary or ascii, got {other:?}"))),
    };
    let name = top.str("output").unwrap_or("scene.pgm").to_string();
    let image = scene.render(job.seed)?;
    job.ensure_out_dir()?;
    let mut out = Outcome::default();
    job.write(&mut out, &name, write_pgm(&image, maxval, encoding)?)?;
    job.write(&mut out, &format!("{name}.truth"), scene.truth())?;
    out.stdout = format!(
        "wrote {}x{} scene with {} shapes\n",
        scene.width,
        scene.height,
        scene.shapes.len()
    );
    Ok(out)
}

pub fn radon(job: &Job) -> Result<Outcome> {
    let top = &job.cfg.top;
    top.check_keys(&["image", "r_min", "r_max", "n_r", "n_phi", "seed"])?;
    let f = job.read_image("image")?;
    let radius = f.frame().support_radius();
    let r_min = top.real("r_min", -radius)?;
    let r_max = top.real("r_max", radius)?;
    let n_r: usize = top.get("n_r", 2 * radius.ceil() as usize + 1)?;
    let n_phi: usize = top.get("n_phi", 180)?;
    let sino = radon_transform(&f, r_min, r_max, n_r, n_phi)?;
    job.ensure_out_dir()?;
    let mut out = Outcome::default();
    job.write(&mut out, "sinogram.csv", write_sinogram_csv(&sino))?;
    let heat = ScalarGrid::new(Frame::pixels(n_r, n_phi)?, sino.values().to_vec())?;
    job.heatmap(&mut out, "sinogram.pgm", &heat)?;
    out.stdout = format!("sinogram {n_phi} angles x {n_r} offsets over r in [{r_min}, {r_max}]\n");
    Ok(out)
}

pub fn correlate(job: &Job) -> Result<Outcome> {
    let top = &job.cfg.top;
    top.check_keys(&["image", "template", "method", "normalize", "seed"])?;
    let f = job.read_image("image")?;
    let t = job.read_image("template")?;
    let map: CorrelationMap = match top.str("method").unwrap_or("fft") {
        "fft" => cross_correlate_fft(&f, &t)?,
        "direct" => cross_correlate_direct(&f, &t)?,
        other => return Err(top.error("method", &format!("expected fft or direct, got {other:?}"))),
    };
    let map = if top.bool("normalize", false)? {
        map.normalize(&f, &t)?
    } else {
        map
    };
    job.ensure_out_dir()?;
    let mut out = Outcome::default();
    job.write(&mut out, "correlation.csv", write_grid_csv(&map.grid))?;
    job.heatmap(&mut out, "correlation.pgm", &map.grid)?;
    let values = map.grid.values();
    let best = (0..values.len()).fold(0, |b, k| if values[k] > values[b] { k } else { b });
    let (i, j) = (best % map.grid.width(), best / map.grid.width());
    let (z0, z1) = map.zero_shift();
    out.stdout = format!(
        "peak {} at shift ({}, {})\n",
        fmt_g17(values[best]),
        i as isize - z0 as isize,
        j as isize - z1 as isize
    );
    Ok(out)
}

pub fn interfere(job: &Job) -> Result<Outcome> {
    let top = &job.cfg.top;
    top.check_keys(&["a1", "phi1", "a2", "phi2", "seed"])?;
    let (a1, phi1) = (top.require_real("a1")?, top.require_real("phi1")?);
    let (a2, phi2) = (top.require_real("a2")?, top.require_real("phi2")?);
    let i12 = two_wave_intensity(a1, phi1, a2, phi2)?;
    let (i1, i2) = (intensity(wave(a1, phi1)), intensity(wave(a2, phi2)));
    Ok(Outcome {
        files: Vec::new(),
        stdout: format!("I1 = {}\nI2 = {}\nI12 = {}\n", fmt_g17(i1), fmt_g17(i2), fmt_g17(i12)),
    })
}

const DETECT_KEYS: &[&str] = &[
    "image",
    "template",
    "template_image",
    "template_spacing",
    "template_extent",
    "curve_step",
    "line_length",
    "threshold",
    "x0_min",
    "x0_max",
    "x0_count",
    "y0_min",
    "y0_max",
    "y0_count",
    "s_min",
    "s_max",
    "s_count",
    "s_spacing",
    "theta_min",
    "theta_max",
    "theta_count",
    "min_fraction",
    "suppress",
    "max_detections",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TemplateKind {
    Square,
    Disk,
    Circle,
    Line,
    Image,
}

enum FilterKind {
    Area(FilterSpec),
    Curve,
}

/// Everything `detect` computes before writing files.
pub struct DetectResult {
    pub accumulator: AmplitudeAccumulator,
    pub probability: ProbabilityMap,
    pub detections: Vec<Detection>,
}

pub fn lattice_from(top: &Section, f: &ScalarGrid) -> Result<ParamLattice> {
    let fr = f.frame();
    let (x_hi, y_hi) = (fr.x(fr.width - 1), fr.y(fr.height - 1));
    let axis = |name: &str, lo: f64, hi: f64, count: usize| -> Result<(f64, f64, usize)> {
        Ok((
            top.real(&format!("{name}_min"), lo)?,
            top.real(&format!("{name}_max"), hi)?,
            top.get(&format!("{name}_count"), count)?,
        ))
    };
    let spacing = match top.str("s_spacing").unwrap_or("geometric") {
        "geometric" => ScaleSpacing::Geometric,
        "linear" => ScaleSpacing::Linear,
        other => return Err(top.error("s_spacing", &format!("expected geometric or linear, got {other:?}"))),
    };
    ParamLattice::new(
        axis("x0", fr.origin_x, x_hi, 32)?,
        axis("y0", fr.origin_y, y_hi, 32)?,
        axis("s", 1.0, 1.0, 1)?,
        axis("theta", 0.0, TAU, 16)?,
        spacing,
    )
    .map_err(|e| top.error("x0_min", &e.to_string()))
}

fn render_area_template(kind: TemplateKind, spacing: f64, extent: f64) -> Result<ScalarGrid> {
    let n = (extent / spacing).round() as usize + 1;
    let fr = Frame::centered(n, n, spacing)?;
    let inside = |u: f64, v: f64| match kind {
        TemplateKind::Square => u.abs() <= 0.5 && v.abs() <= 0.5,
        _ => u.hypot(v) <= 1.0,
    };
    const SUB: usize = 4;
    Ok(ScalarGrid::from_fn(fr, |x, y| {
        let mut hits = 0;
        for b in 0..SUB {
            for a in 0..SUB {
                let u = x + ((a as f64 + 0.5) / SUB as f64 - 0.5) * spacing;
                let v = y + ((b as f64 + 0.5) / SUB as f64 - 0.5) * spacing;
                hits += usize::from(inside(u, v));
            }
        }
        hits as f64 / (SUB * SUB) as f64
    })?)
}

fn filter_kind(sec: &Section) -> Result<(FilterKind, Complex64)> {
    sec.check_keys(&["kind", "coeff_re", "coeff_im", "level"])?;
    let coeff = Complex64::new(sec.real("coeff_re", 1.0)?, sec.real("coeff_im", 0.0)?);
    let level = || sec.require_real("level");
    let kind = match sec
        .str("kind")
        .ok_or_else(|| sec.error("kind", "missing filter kind"))?
    {
        "a00" => FilterKind::Area(FilterSpec::a00()),
        "a11" => FilterKind::Area(FilterSpec::a11()),
        "a22" => FilterKind::Area(FilterSpec::a22()),
        "a33" => FilterKind::Area(FilterSpec::a33()),
        "binary_edge" => FilterKind::Area(FilterSpec::binary_edge(level()?)?),
        "gated_gradient" => FilterKind::Area(FilterSpec::gated_gradient(level()?)?),
        "curve" => FilterKind::Curve,
        other => return Err(sec.error("kind", &format!("unknown filter {other:?}"))),
    };
    Ok((kind, coeff))
}

/// Runs the detection pipeline without touching the output directory.
pub fn run_detection(job: &Job) -> Result<DetectResult> {
    let top = &job.cfg.top;
    top.check_keys(DETECT_KEYS)?;
    let image = job.read_image("image")?;
    let threshold = top.parse::<f64>("threshold")?;
    let data = feature_expand(&image, threshold)?;
    let lattice = lattice_from(top, &image)?;

    let kind = match top.str("template").unwrap_or("square") {
        "square" => TemplateKind::Square,
        "disk" => TemplateKind::Disk,
        "circle" => TemplateKind::Circle,
        "line" => TemplateKind::Line,
        "image" => TemplateKind::Image,
        other => return Err(top.error("template", &format!("unknown template {other:?}"))),
    };
    let is_curve = matches!(kind, TemplateKind::Circle | TemplateKind::Line);

    let filters: Vec<(FilterKind, Complex64, &str)> = if job.cfg.filters.is_empty() {
        let default = if is_curve {
            FilterKind::Curve
        } else {
            FilterKind::Area(FilterSpec::a22())
        };
        vec![(default, Complex64::new(1.0, 0.0), "template")]
    } else {
        job.cfg
            .filters
            .iter()
            .map(|sec| filter_kind(sec).map(|(k, c)| (k, c, sec.str("kind").unwrap_or(""))))
            .collect::<Result<_>>()?
    };

    let area_template = if filters.iter().any(|(k, _, _)| matches!(k, FilterKind::Area(_))) {
        let grid = match kind {
            TemplateKind::Square | TemplateKind::Disk => {
                let spacing = top.real("template_spacing", 1.0 / 32.0)?;
                let extent = top.real("template_extent", if kind == TemplateKind::Square { 1.5 } else { 2.5 })?;
                if spacing <= 0.0 || extent <= 0.0 || extent / spacing > 4096.0 {
                    return Err(top.error("template_spacing", "template grid is empty or too large"));
                }
                render_area_template(kind, spacing, extent)?
            }
            TemplateKind::Image => {
                let t = job.read_image("template_image")?;
                let spacing = top.real("template_spacing", 1.0)?;
                t.with_frame(Frame::centered(t.width(), t.height(), spacing)?)?
            }
            _ => return Err(top.error("template", "area filters need a square, disk or image template")),
        };
        Some(feature_expand(&grid, threshold)?)
    } else {
        None
    };

    let curve = if filters.iter().any(|(k, _, _)| matches!(k, FilterKind::Curve)) {
        let geometry = match kind {
            TemplateKind::Circle | TemplateKind::Disk => CurveGeometry::Circle { radius: 1.0 },
            TemplateKind::Square => CurveGeometry::Polyline {
                vertices: vec![(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)],
                closed: true,
            },
            TemplateKind::Line => CurveGeometry::LineSegment {
                length: top.real("line_length", 2.0)?,
            },
            TemplateKind::Image => return Err(top.error("template", "curve filters need a shape template")),
        };
        Some(make_template_curve(&geometry, top.real("curve_step", TAU / 64.0)?)?)
    } else {
        None
    };

    let mut accs = Vec::with_capacity(filters.len());
    let mut coeffs = Vec::with_capacity(filters.len());
    for (k, c, label) in &filters {
        let acc = match k {
            FilterKind::Area(spec) => {
                let t = area_template.as_ref().expect("built when an area filter is present");
                accumulate(spec, Template::Features(t), &data, &lattice)?
            }
            FilterKind::Curve => extended_radon(&image, curve.as_ref().expect("built for curve filters"), &lattice)?,
        };
        accs.push(acc);
        coeffs.push((label.to_string(), *c));
    }
    let coeffs = CoefficientSet::new(coeffs).map_err(|e| match job.cfg.filters.first() {
        Some(sec) => sec.error("coeff_re", &e.to_string()),
        None => e.into(),
    })?;
    let accumulator = superpose_accumulators(&coeffs, &accs)?;
    let probability = probability_map(&accumulator);

    let min_fraction = top.real("min_fraction", 0.5)?;
    let suppress = match top.str("suppress") {
        None => [1, 1, 1, 1],
        Some(s) => {
            let v: Vec<usize> = s
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| top.error("suppress", "expected four bin counts"))?;
            v.try_into()
                .map_err(|_| top.error("suppress", "expected four bin counts"))?
        }
    };
    let max_detections: usize = top.get("max_detections", 10)?;
    let mut detections =
        detect_peaks(&probability, min_fraction, suppress).map_err(|e| top.error("min_fraction", &e.to_string()))?;
    detections.truncate(max_detections);
    Ok(DetectResult {
        accumulator,
        probability,
        detections,
    })
}

pub fn detect(job: &Job) -> Result<Outcome> {
    let result = run_detection(job)?;
    job.ensure_out_dir()?;
    let mut out = Outcome::default();
    job.write(&mut out, "accumulator.amph", write_amph(&result.accumulator))?;
    job.write(&mut out, "detections.txt", write_detection_report(&result.detections))?;

    // (x0, y0) slices through the strongest cell.
    let at = result.probability.argmax().expect("lattice is never empty");
    let prob_slice: Vec<Vec<f64>> = result
        .accumulator
        .slice(1, 0, at)?
        .iter()
        .map(|row| row.iter().map(|c| c.norm_sqr()).collect())
        .collect();
    let re_slice: Vec<Vec<f64>> = result
        .accumulator
        .slice(1, 0, at)?
        .iter()
        .map(|row| row.iter().map(|c| c.re).collect())
        .collect();
    job.write(&mut out, "probability_xy.csv", write_matrix_csv(&prob_slice))?;
    job.write(&mut out, "amplitude_re_xy.csv", write_matrix_csv(&re_slice))?;
    let counts = result.probability.lattice().counts();
    let heat = ScalarGrid::new(Frame::pixels(counts[0], counts[1])?, prob_slice.concat())?;
    job.heatmap(&mut out, "probability_xy.pgm", &heat)?;

    let mut text = String::new();
    for (n, d) in result.detections.iter().enumerate() {
        text.push_str(&format!(
            "#{} x0 {} y0 {} s {} theta {} probability {}{}\n",
            n + 1,
            fmt_g17(d.g.x0()),
            fmt_g17(d.g.y0()),
            fmt_g17(d.g.s()),
            fmt_g17(d.g.theta()),
            fmt_g17(d.probability),
            if d.theta_degenerate { " (theta degenerate)" } else { "" }
        ));
    }
    if result.detections.is_empty() {
        text.push_str("no detections\n");
    }
    out.stdout = text;
    Ok(out)
}

/// Resolves the seed: the command-line value wins over the config key.
pub fn job_seed(cfg: &JobConfig, cli_seed: Option<u64>) -> Result<u64> {
    match cli_seed {
        Some(s) => Ok(s),
        None => cfg.top.get("seed", 0),
    }
}

pub fn base_dir(config_path: &Path) -> PathBuf {
    config_path.parent().map(Path::to_path_buf).unwrap_or_default()
}
