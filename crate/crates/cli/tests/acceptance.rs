//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.
//!
//! Run with `cargo test -p amphough-cli --test acceptance`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use amphough_cli::commands::{run_detection, Job};
use amphough_cli::JobConfig;
use amphough_core::correlation::{cross_correlate_direct, cross_correlate_fft, dft2};
use amphough_core::filters::{
    a10_radon, accumulate, detect_peaks, probability_map, superpose_accumulators, CoefficientSet, FilterSpec, Template,
};
use amphough_core::grid::{feature_expand, Frame, ScalarGrid};
use amphough_core::group::{AmplitudeAccumulator, GroupElement, ParamLattice, ScaleSpacing};
use amphough_core::radon::{fourier_slice, radon_transform};
use amphough_core::wave::{fraunhofer_ft, square_aperture_analytic, superpose, two_wave_intensity, wave};
use amphough_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances and budgets.
const INTERFERENCE_TOL: f64 = 1e-12;
const INTERFERENCE_BUDGET: Duration = Duration::from_secs(1);
const INCOHERENT_N: usize = 10_000;
const INCOHERENT_SEED: u64 = 0;
const INCOHERENT_TOL: f64 = 0.05;
const INCOHERENT_BUDGET: Duration = Duration::from_secs(1);
const SINC_TOL: f64 = 1e-3;
const SINC_BUDGET: Duration = Duration::from_secs(10);
const CORRELATION_CASES: usize = 200;
const CORRELATION_TOL: f64 = 1e-9;
const CORRELATION_BUDGET: Duration = Duration::from_secs(30);
const RADON_LINEARITY_TOL: f64 = 1e-12;
const RADON_BUDGET: Duration = Duration::from_secs(10);
const SLICE_VS_SPECTRUM_TOL: f64 = 1e-2;
const SLICE_VS_ANALYTIC_TOL: f64 = 1e-3;
const SLICE_BUDGET: Duration = Duration::from_secs(30);
const A10_TOL: f64 = 1e-9;
const A10_BUDGET: Duration = Duration::from_secs(5);
const POSE_BUDGET: Duration = Duration::from_secs(120);
const SUPERPOSITION_TOL: f64 = 1e-12;
const SUPERPOSITION_BUDGET: Duration = Duration::from_secs(1);
const SIGN_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;

fn timed(budget: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    if took > budget {
        return Err(format!("{detail}; took {took:.2?}, budget {budget:?}"));
    }
    Ok(format!("{detail}; {took:.2?}"))
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn interference() -> Outcome {
    timed(INTERFERENCE_BUDGET, || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let (a1, p1, a2, p2) = (
                rng.random::<f64>(),
                rng.random::<f64>() * TAU,
                rng.random::<f64>(),
                rng.random::<f64>() * TAU,
            );
            let closed = two_wave_intensity(a1, p1, a2, p2).map_err(|e| e.to_string())?;
            // |A1 + A2|^2 written out in components.
            let re = a1 * p1.cos() + a2 * p2.cos();
            let im = a1 * p1.sin() + a2 * p2.sin();
            worst = worst.max((closed - (re * re + im * im)).abs());
        }
        let mut cancel: f64 = 0.0;
        for _ in 0..1000 {
            let (a, p) = (rng.random::<f64>(), rng.random::<f64>() * TAU);
            cancel = cancel.max(two_wave_intensity(a, p, a, p + PI).map_err(|e| e.to_string())?.abs());
        }
        check(
            worst <= INTERFERENCE_TOL && cancel <= INTERFERENCE_TOL,
            format!("max |closed - direct| = {worst:.2e}, max opposite-phase intensity = {cancel:.2e}"),
        )
    })
}

fn random_phase_intensity(seed: u64) -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps: Vec<Complex64> = (0..INCOHERENT_N)
        .map(|_| wave(1.0, rng.random::<f64>() * TAU))
        .collect();
    Ok(superpose(&amps).map_err(|e| e.to_string())?.norm_sqr())
}

fn incoherent() -> Outcome {
    let n = INCOHERENT_N as f64;
    let verdict = timed(INCOHERENT_BUDGET, || {
        let coherent = random_phase_intensity(INCOHERENT_SEED)?;
        let rel = (coherent - n).abs() / n;
        check(
            rel < INCOHERENT_TOL,
            format!("seed {INCOHERENT_SEED}: I = {coherent:.1} for N = {INCOHERENT_N}, relative deviation {rel:.3}"),
        )
    });
    // Context only: a single realization of |sum|^2 / N is exponentially
    // distributed, while the mean over realizations converges to N.
    let seeds = 1000;
    let mut mean = 0.0;
    for seed in 1..=seeds {
        mean += random_phase_intensity(seed)? / seeds as f64;
    }
    let note = format!("(mean over {seeds} other seeds: {:.3} N)", mean / n);
    match verdict {
        Ok(d) => Ok(format!("{d} {note}")),
        Err(d) => Err(format!("{d} {note}")),
    }
}

fn sinc_oracle() -> Outcome {
    timed(SINC_BUDGET, || {
        // 256 x 256 grid over [-1, 1]^2 holding a unit square aperture.
        let a = 1.0;
        let fr = Frame::centered(256, 256, 2.0 / 256.0).map_err(|e| e.to_string())?;
        let t = ScalarGrid::from_fn(fr, |x, y| {
            if x.abs() < a / 2.0 && y.abs() < a / 2.0 {
                1.0
            } else {
                0.0
            }
        })
        .map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for i in 0..21 {
            for j in 0..21 {
                let (alpha, beta) = (-5.0 + 0.5 * i as f64, -5.0 + 0.5 * j as f64);
                let num = fraunhofer_ft(&t, alpha, beta, 1.0).map_err(|e| e.to_string())?;
                let exact = square_aperture_analytic(a, alpha, beta).map_err(|e| e.to_string())?;
                worst = worst.max((num - exact).norm());
            }
        }
        check(
            worst <= SINC_TOL * a * a,
            format!("max abs error {worst:.2e} over 21x21 directions"),
        )
    })
}

fn random_grid(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ScalarGrid {
    let values = (0..w * h).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    ScalarGrid::new(Frame::pixels(w, h).unwrap(), values).unwrap()
}

fn correlation() -> Outcome {
    timed(CORRELATION_BUDGET, || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst: f64 = 0.0;
        for _ in 0..CORRELATION_CASES {
            let (fw, fh) = (rng.random_range(1..=64), rng.random_range(1..=64));
            let (tw, th) = (rng.random_range(1..=fw), rng.random_range(1..=fh));
            let f = random_grid(&mut rng, fw, fh);
            let t = random_grid(&mut rng, tw, th);
            let d = cross_correlate_direct(&f, &t).map_err(|e| e.to_string())?;
            let q = cross_correlate_fft(&f, &t).map_err(|e| e.to_string())?;
            let peak = d.grid.max_abs();
            let diff = d
                .grid
                .values()
                .iter()
                .zip(q.grid.values())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            worst = worst.max(diff / peak);
        }
        // Impulse templates: a 1x1 delta and a centred 3x3 delta.
        let f = random_grid(&mut rng, 40, 33);
        let mut exact = true;
        let one = ScalarGrid::new(Frame::pixels(1, 1).unwrap(), vec![1.0]).unwrap();
        let three = ScalarGrid::from_fn(Frame::pixels(3, 3).unwrap(), |x, y| {
            if x == 1.0 && y == 1.0 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        for (t, offset) in [(one, 0isize), (three, 1)] {
            for (direct, method) in [
                (true, cross_correlate_direct as fn(_, _) -> _),
                (false, cross_correlate_fft),
            ] {
                let map = method(&f, &t).map_err(|e| e.to_string())?;
                for j in 0..f.height() {
                    for i in 0..f.width() {
                        let v = map.at_shift(i as isize - offset, j as isize - offset);
                        let same = if direct {
                            v == f.get(i, j)
                        } else {
                            (v - f.get(i, j)).abs() <= CORRELATION_TOL
                        };
                        exact &= same;
                    }
                }
            }
        }
        check(
            worst <= CORRELATION_TOL && exact,
            format!(
                "{CORRELATION_CASES} cases, max relative L-inf {worst:.2e}; impulse reproduction {}",
                if exact { "exact" } else { "broken" }
            ),
        )
    })
}

fn radon() -> Outcome {
    timed(RADON_BUDGET, || {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_grid(&mut rng, 48, 40);
        let g = random_grid(&mut rng, 48, 40);
        let (a, b) = (rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>() * 4.0 - 2.0);
        let mix = f.zip_with(&g, |p, q| a * p + b * q).unwrap();
        let rs = |h: &ScalarGrid| radon_transform(h, -70.0, 70.0, 141, 90).unwrap();
        let (rf, rg, rm) = (rs(&f), rs(&g), rs(&mix));
        let scale = rm.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let lin = rm
            .values()
            .iter()
            .zip(rf.values().iter().zip(rg.values()))
            .fold(0.0f64, |m, (v, (p, q))| m.max((v - (a * p + b * q)).abs()))
            / scale;

        let (x0, y0) = (40.0, 85.0);
        let fr = Frame::pixels(128, 128).unwrap();
        let point = ScalarGrid::from_fn(fr, |x, y| if x == x0 && y == y0 { 1.0 } else { 0.0 }).unwrap();
        let radius = fr.support_radius();
        let sino = radon_transform(&point, -radius, radius, 185, 180).map_err(|e| e.to_string())?;
        let mut worst_bins: f64 = 0.0;
        for j in 0..sino.n_phi() {
            let phi = sino.phi(j);
            let want = x0 * phi.cos() + y0 * phi.sin();
            let got = sino.r(sino.argmax_r(j));
            worst_bins = worst_bins.max((got - want).abs() / sino.dr());
        }
        check(
            lin <= RADON_LINEARITY_TOL && worst_bins <= 1.0,
            format!("linearity {lin:.2e}; sinusoid worst offset {worst_bins:.2} bins over 180 angles"),
        )
    })
}

fn fourier_slice_theorem() -> Outcome {
    timed(SLICE_BUDGET, || {
        let sigma: f64 = 8.0;
        let n = 256;
        let fr = Frame::centered(n, n, 1.0).unwrap();
        let f = ScalarGrid::from_fn(fr, |x, y| (-(x * x + y * y) / (2.0 * sigma * sigma)).exp()).unwrap();
        let spectrum = dft2(&f.to_complex());
        // Continuous transform at bin (u, v), with the frame origin's phase
        // removed so the sampled spectrum is smooth.
        let bin = |u: usize, v: usize| {
            let kx = signed_freq(u, n);
            let ky = signed_freq(v, n);
            spectrum.get(u, v) * Complex64::from_polar(1.0, -TAU * (kx * fr.origin_x + ky * fr.origin_y))
        };
        let interp = |kx: f64, ky: f64| {
            let (px, py) = (kx * n as f64, ky * n as f64);
            let (i0, j0) = (px.floor(), py.floor());
            let (tx, ty) = (px - i0, py - j0);
            let wrap = |i: f64| (i as i64).rem_euclid(n as i64) as usize;
            let (i0, j0, i1, j1) = (wrap(i0), wrap(j0), wrap(i0 + 1.0), wrap(j0 + 1.0));
            bin(i0, j0) * ((1.0 - tx) * (1.0 - ty))
                + bin(i1, j0) * (tx * (1.0 - ty))
                + bin(i0, j1) * ((1.0 - tx) * ty)
                + bin(i1, j1) * (tx * ty)
        };
        let ks: Vec<f64> = (0..=20).map(|i| 0.05 * i as f64 / 20.0).collect();
        let (mut e_spec, mut e_exact, mut norm) = (0.0, 0.0, 0.0);
        for m in 0..8 {
            let phi = m as f64 * PI / 8.0 + 0.1;
            let slice = fourier_slice(&f, phi, &ks);
            if let Some(w) = slice.warning {
                return Err(w.to_string());
            }
            for (k, got) in ks.iter().zip(&slice.values) {
                let exact = TAU * sigma * sigma * (-2.0 * PI * PI * sigma * sigma * k * k).exp();
                let spec = interp(k * phi.cos(), k * phi.sin());
                e_spec += (got - spec).norm_sqr();
                e_exact += (got - exact).norm_sqr();
                norm += exact * exact;
            }
        }
        let (r_spec, r_exact) = ((e_spec / norm).sqrt(), (e_exact / norm).sqrt());
        check(
            r_spec <= SLICE_VS_SPECTRUM_TOL && r_exact <= SLICE_VS_ANALYTIC_TOL,
            format!("relative L2 vs interpolated spectrum {r_spec:.2e}, vs analytic Gaussian {r_exact:.2e}"),
        )
    })
}

fn signed_freq(u: usize, n: usize) -> f64 {
    let u = if u >= n.div_ceil(2) {
        u as f64 - n as f64
    } else {
        u as f64
    };
    u / n as f64
}

fn smooth_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ScalarGrid {
    let bumps: Vec<(f64, f64, f64, f64)> = (0..6)
        .map(|_| {
            (
                rng.random::<f64>() * w as f64,
                rng.random::<f64>() * h as f64,
                3.0 + rng.random::<f64>() * 8.0,
                rng.random::<f64>() * 2.0 - 0.5,
            )
        })
        .collect();
    ScalarGrid::from_fn(Frame::pixels(w, h).unwrap(), |x, y| {
        bumps
            .iter()
            .map(|(cx, cy, s, a)| a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp())
            .sum()
    })
    .unwrap()
}

fn a10_equivalence() -> Outcome {
    timed(A10_BUDGET, || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = smooth_image(&mut rng, 64, 64);
        let radius = f.frame().support_radius();
        let (n_r, n_phi) = (129, 180);
        let sino = radon_transform(&f, -radius, radius, n_r, n_phi).map_err(|e| e.to_string())?;
        let scale = sino.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut worst: f64 = 0.0;
        for _ in 0..64 {
            let (i, j) = (rng.random_range(0..n_r), rng.random_range(0..n_phi));
            let g = GroupElement::line(sino.r(i), sino.phi(j)).map_err(|e| e.to_string())?;
            let a = a10_radon(&f, &g).map_err(|e| e.to_string())?;
            worst = worst.max(((a.re - sino.get(j, i)).abs() + a.im.abs()) / scale);
        }
        check(
            worst <= A10_TOL,
            format!("64 lines, max relative difference {worst:.2e}"),
        )
    })
}

fn job(text: &str, dir: &Path) -> Job {
    let cfg = JobConfig::parse(text).unwrap();
    Job {
        seed: cfg.top.get("seed", 0).unwrap(),
        cfg,
        base_dir: dir.to_path_buf(),
        out_dir: dir.to_path_buf(),
    }
}

const SQUARE_SCENE: &str = "width = 64\nheight = 64\nnoise_sigma = 0.05\nseed = 7\n\
    [shape]\nkind = square\nx0 = 31.3\ny0 = 33.7\ns = 13\ntheta = 0.5\n";

const SQUARE_DETECT: &str = "image = scene.pgm\ntemplate = square\n\
    x0_min = 16\nx0_max = 48\nx0_count = 32\ny0_min = 16\ny0_max = 48\ny0_count = 32\n\
    s_min = 8\ns_max = 24\ns_count = 8\ntheta_min = 0\ntheta_max = 1.5707963267948966\ntheta_count = 16\n";

const CIRCLE_SCENE: &str = "width = 64\nheight = 64\nnoise_sigma = 0.05\nseed = 11\noutput = scene.pgm\n\
    [shape]\nkind = circle\ncx = 30.4\ncy = 34.2\nradius = 11\nwidth = 3\n";

const CIRCLE_DETECT: &str = "image = scene.pgm\ntemplate = circle\n\
    x0_min = 16\nx0_max = 48\nx0_count = 32\ny0_min = 16\ny0_max = 48\ny0_count = 32\n\
    s_min = 6\ns_max = 20\ns_count = 8\ntheta_count = 16\n";

fn synth_into(dir: &Path, scene: &str) -> Result<(), String> {
    amphough_cli::commands::synth(&job(scene, dir))
        .map(|_| ())
        .map_err(|e| e.to_string())
}

fn bins_off(lattice: &ParamLattice, bins: [usize; 4], truth: [f64; 4]) -> [usize; 4] {
    let g = GroupElement::new(truth[0], truth[1], truth[2], truth[3]).unwrap();
    let want = lattice.nearest(&g);
    [0, 1, 2, 3].map(|k| lattice.axis(k).distance(bins[k], want[k]))
}

fn pose_recovery() -> Outcome {
    timed(POSE_BUDGET, || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        synth_into(dir.path(), SQUARE_SCENE)?;
        let square = run_detection(&job(SQUARE_DETECT, dir.path())).map_err(|e| e.to_string())?;
        let lattice = *square.probability.lattice();
        let best = square.probability.argmax().ok_or("empty map")?;
        let off = bins_off(&lattice, best, [31.3, 33.7, 13.0, 0.5]);
        let first = square.detections.first().ok_or("no square detection")?;
        let square_ok = off.iter().all(|d| *d <= 1) && first.bins == best;

        synth_into(dir.path(), CIRCLE_SCENE)?;
        let circle = run_detection(&job(CIRCLE_DETECT, dir.path())).map_err(|e| e.to_string())?;
        let c = circle.detections.first().ok_or("no circle detection")?;
        let coff = bins_off(circle.probability.lattice(), c.bins, [30.4, 34.2, 11.0, 0.0]);
        let circle_ok = coff[..3].iter().all(|d| *d <= 1) && c.theta_degenerate;
        check(
            square_ok && circle_ok,
            format!(
                "square bins off {off:?} at ({:.2}, {:.2}, {:.2}, {:.3}); circle bins off {:?} at ({:.2}, {:.2}, {:.2}), theta degenerate {}",
                first.g.x0(),
                first.g.y0(),
                first.g.s(),
                first.g.theta(),
                &coff[..3],
                c.g.x0(),
                c.g.y0(),
                c.g.s(),
                c.theta_degenerate
            ),
        )
    })
}

fn blob_scene() -> (
    amphough_core::grid::FeatureStack,
    amphough_core::grid::FeatureStack,
    ParamLattice,
) {
    let f = ScalarGrid::from_fn(Frame::pixels(40, 40).unwrap(), |x, y| {
        let (u, v) = ((x - 19.3) / 6.0, (y - 21.1) / 4.0);
        (-(u * u + v * v)).exp()
    })
    .unwrap();
    let t = ScalarGrid::from_fn(Frame::centered(17, 17, 0.25).unwrap(), |x, y| {
        (-(x * x + y * y / 0.44)).exp()
    })
    .unwrap();
    let lattice = ParamLattice::new(
        (14.0, 26.0, 7),
        (14.0, 26.0, 7),
        (3.0, 9.0, 4),
        (0.0, PI, 6),
        ScaleSpacing::Geometric,
    )
    .unwrap();
    (
        feature_expand(&t, None).unwrap(),
        feature_expand(&f, None).unwrap(),
        lattice,
    )
}

fn superposition() -> Outcome {
    timed(SUPERPOSITION_BUDGET, || {
        let (t, f, lattice) = blob_scene();
        let a = accumulate(&FilterSpec::a22(), Template::Features(&t), &f, &lattice).map_err(|e| e.to_string())?;
        let b = accumulate(&FilterSpec::a22(), Template::Features(&t), &f, &lattice).map_err(|e| e.to_string())?;
        let coeffs = CoefficientSet::from_values(&[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]).unwrap();
        let zero = probability_map(&superpose_accumulators(&coeffs, &[a.clone(), b]).map_err(|e| e.to_string())?);
        let cancel = zero.values().iter().fold(0.0f64, |m, v| m.max(*v));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut cell = || Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
        let l = *a.lattice();
        let x = AmplitudeAccumulator::new(l, (0..l.len()).map(|_| cell()).collect()).unwrap();
        let y = AmplitudeAccumulator::new(l, (0..l.len()).map(|_| cell()).collect()).unwrap();
        let (c1, c2) = (cell(), cell());
        let p = probability_map(
            &superpose_accumulators(
                &CoefficientSet::from_values(&[c1, c2]).unwrap(),
                &[x.clone(), y.clone()],
            )
            .unwrap(),
        );
        let mut worst: f64 = 0.0;
        for (k, v) in p.values().iter().enumerate() {
            let (u, w) = (c1 * x.cells()[k], c2 * y.cells()[k]);
            let expanded = u.norm_sqr() + w.norm_sqr() + 2.0 * (u.re * w.re + u.im * w.im);
            worst = worst.max((v - expanded).abs());
        }
        check(
            cancel <= SUPERPOSITION_TOL && worst <= SUPERPOSITION_TOL,
            format!(
                "{{1, -1}} map max {cancel:.2e}; expansion identity max error {worst:.2e} over {} cells",
                l.len()
            ),
        )
    })
}

fn sign_invariance() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    synth_into(dir.path(), SQUARE_SCENE)?;
    let scene = amphough_core::io::read_pgm(&fs::read(dir.path().join("scene.pgm")).unwrap()).unwrap();
    let negated = scene.map(|v| -v);
    let t = ScalarGrid::from_fn(Frame::centered(49, 49, 1.0 / 32.0).unwrap(), |x, y| {
        if x.abs() <= 0.5 && y.abs() <= 0.5 {
            1.0
        } else {
            0.0
        }
    })
    .unwrap();
    let t = feature_expand(&t, None).unwrap();
    let lattice = ParamLattice::new(
        (24.0, 40.0, 9),
        (26.0, 42.0, 9),
        (10.0, 16.0, 4),
        (0.0, FRAC_PI_2, 8),
        ScaleSpacing::Geometric,
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    let mut same_peak = true;
    for spec in [FilterSpec::a00(), FilterSpec::a22(), FilterSpec::a33()] {
        let p = probability_map(
            &accumulate(
                &spec,
                Template::Features(&t),
                &feature_expand(&scene, None).unwrap(),
                &lattice,
            )
            .unwrap(),
        );
        let q = probability_map(
            &accumulate(
                &spec,
                Template::Features(&t),
                &feature_expand(&negated, None).unwrap(),
                &lattice,
            )
            .unwrap(),
        );
        let peak = p.values().iter().fold(0.0f64, |m, v| m.max(*v));
        worst = worst.max(
            p.values()
                .iter()
                .zip(q.values())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
                / peak,
        );
        let dp = detect_peaks(&p, 0.5, [1; 4]).unwrap();
        let dq = detect_peaks(&q, 0.5, [1; 4]).unwrap();
        same_peak &= !dp.is_empty()
            && dp[0].bins == dq[0].bins
            && dp[0].g == dq[0].g
            && dp[0].probability.to_bits() == dq[0].probability.to_bits();
    }
    check(
        worst <= SIGN_TOL && same_peak,
        format!("max relative map difference {worst:.2e}; first detection bitwise equal: {same_peak}"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path();
    fs::write(root.join("synth.cfg"), SQUARE_SCENE).unwrap();
    fs::write(root.join("detect.cfg"), SQUARE_DETECT).unwrap();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    amphough_cli::run_from([
        "amphough",
        "synth",
        "--config",
        &s(&root.join("synth.cfg")),
        "--out",
        &s(root),
    ])?;
    let mut files = Vec::new();
    for (n, threads) in [(0, None), (1, None), (2, Some("1")), (3, Some("8"))] {
        let out = root.join(format!("run{n}"));
        let mut argv = vec![
            "amphough".to_string(),
            "detect".into(),
            "--config".into(),
            s(&root.join("detect.cfg")),
            "--out".into(),
            s(&out),
        ];
        if let Some(t) = threads {
            argv.extend(["--threads".to_string(), t.to_string()]);
        }
        amphough_cli::run_from(argv)?;
        files.push(fs::read(out.join("accumulator.amph")).map_err(|e| e.to_string())?);
    }
    let identical = files.windows(2).all(|w| w[0] == w[1]);
    check(
        identical,
        format!(
            "4 runs (default, default, 1 thread, 8 threads), {} bytes each, identical: {identical}",
            files[0].len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("interference law", interference),
        ("incoherent limit", incoherent),
        ("sinc oracle", sinc_oracle),
        ("correlation equivalence", correlation),
        ("radon properties", radon),
        ("fourier-slice theorem", fourier_slice_theorem),
        ("radon equivalence of the edge filter", a10_equivalence),
        ("pose recovery", pose_recovery),
        ("superposition semantics", superposition),
        ("sign invariance", sign_invariance),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", n + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
