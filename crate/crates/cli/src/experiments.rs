//! The experiment families. Each reads its parameters from [`Settings`],
//! rejects unknown keys before any heavy work, and returns a [`Report`].

use std::f64::consts::{PI, SQRT_2, TAU};

use herglotz::hp_core::{AtomicMeasure, HPFunction};
use herglotz::metrics::{flat_distance, gbound_check, variational_distance, wasserstein_circle};
use herglotz::point_process::{
    log_grid, number_variance, sample_poisson, sample_sine_kernel_with, Origins, SamplerSpec,
    SineKernelBasis,
};
use herglotz::rmt::{
    microscopic_rescale, sample_diagonal_rescaled, sample_gue_spectrum, semicircle_density,
    EntryDensity,
};
use herglotz::rng::{substream, Stream};
use herglotz::stats::{
    boole_verify, ensemble_distribution, estimate_gamma_height, estimate_gamma_inverse,
    fit_cauchy_charfn, fit_cauchy_quantile, ks_test_cauchy, pooled_shift_distribution,
    predicted_gamma, shift_distribution, star_modulus, uniform_edges, Generator, ShiftDistribution,
};
use herglotz::stieltjes::{centred_boundary_value, extrapolated_transform, shift_covariance_check};
use herglotz::{CauchyParams, CircleMeasure, Complex64, DiskHP, EmpiricalDistribution};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::settings::Settings;
use crate::CliError;

/// Experiment families with one-line descriptions.
pub const EXPERIMENTS: [(&str, &str); 7] = [
    ("boole", "level-set measure of a random atomic Stieltjes sum against mu(R)/t"),
    (
        "cauchy",
        "boundary-value law against the predicted Cauchy(Gamma); generators: periodic, quasiperiodic, poisson, sine-kernel, gue, diagonal",
    ),
    ("number-variance", "counting-function variance of sine-kernel or Poisson samples with a log fit"),
    ("gamma", "baricenter estimate by route: quantile, charfn, inverse or height"),
    ("metrics-sweep", "G-bound, Wasserstein triangle and flat-distance bounds on random measures"),
    ("shift-covariance", "shift covariance of the corrected transform under window doubling"),
    ("star-modulus", "Monte-Carlo *-continuity modulus (diagnostic only)"),
];

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Value,
    pub limit: Value,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value: json!(value),
            limit: json!(limit),
            pass: value <= limit,
        }
    }

    fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value: json!(value),
            limit: json!(limit),
            pass: value >= limit,
        }
    }

    fn holds(name: &str, value: bool) -> Self {
        Self {
            name: name.into(),
            value: json!(value),
            limit: json!(true),
            pass: value,
        }
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub results: Value,
    pub checks: Vec<Check>,
    /// Plot-ready CSV files by name.
    pub files: Vec<(String, String)>,
    /// Per-sample records for `samples.jsonl`.
    pub samples: Vec<Value>,
}

pub fn run(name: &str, cfg: &Settings) -> Result<Report, CliError> {
    match name {
        "boole" => boole(cfg),
        "cauchy" => cauchy(cfg),
        "number-variance" => number_variance_run(cfg),
        "gamma" => gamma(cfg),
        "metrics-sweep" => metrics_sweep(cfg),
        "shift-covariance" => shift_covariance(cfg),
        "star-modulus" => star(cfg),
        other => Err(CliError::Usage(format!("unknown experiment {other:?}"))),
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn fit_json(p: &CauchyParams) -> Value {
    json!({"re": p.re_gamma, "im": p.im_gamma})
}

fn histogram(
    cfg: &Settings,
    d: &EmpiricalDistribution,
    lo: f64,
    hi: f64,
    bins: usize,
) -> Result<String, CliError> {
    let lo = cfg.f64("hist_lo", lo)?;
    let hi = cfg.f64("hist_hi", hi)?;
    let bins = cfg.usize("hist_bins", bins)?;
    if !(hi > lo) || bins == 0 {
        return usage("histogram needs hist_hi > hist_lo and hist_bins > 0");
    }
    Ok(d.histogram_csv(&uniform_edges(lo, hi, bins)))
}

fn boole(cfg: &Settings) -> Result<Report, CliError> {
    let seed = cfg.u64("seed", 1)?;
    let atoms = cfg.usize("atoms", 50)?;
    let t = cfg.f64("t", 1.0)?;
    let trials = cfg.usize("trials", 1)?;
    let spread = cfg.f64("spread", 50.0)?;
    let weight_max = cfg.f64("weight_max", 10.0)?;
    let limit = cfg.f64("max_relative_error", 1e-9)?;
    cfg.reject_unknown()?;
    if atoms == 0 || trials == 0 || !(t > 0.0) || !(spread > 0.0) || !(weight_max > 0.0) {
        return usage("boole needs atoms, trials, t, spread and weight_max positive");
    }
    let reports = (0..trials)
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            let mu = AtomicMeasure::new((0..atoms).map(|_| {
                (
                    rng.random_range(-spread..spread),
                    weight_max * (1.0 - rng.random::<f64>()),
                )
            }))?;
            boole_verify(&mu, t)
        })
        .collect::<herglotz::Result<Vec<_>>>()?;
    let worst = reports.iter().map(|r| r.relative_error).fold(0.0, f64::max);
    Ok(Report {
        results: json!({"cases": reports.len(), "max_relative_error": worst, "reports": reports}),
        checks: vec![Check::at_most("max relative error", worst, limit)],
        samples: reports.iter().map(|r| json!(r)).collect(),
        ..Report::default()
    })
}

fn read_generator(cfg: &Settings) -> Result<Generator, CliError> {
    Ok(match cfg.string("generator", "periodic")?.as_str() {
        "periodic" => Generator::Periodic,
        "quasiperiodic" => Generator::QuasiPeriodic {
            alpha: cfg.f64_list("alpha", &[1.0, 2.0])?,
            beta: cfg.f64_list("beta", &[1.0, SQRT_2])?,
            theta: cfg.f64_list("theta", &[0.0, 0.0])?,
        },
        "poisson" => Generator::Poisson {
            rho: cfg.f64("rho", 1.0)?,
        },
        "sine-kernel" => Generator::SineKernel,
        "gue" => Generator::Gue {
            e0: cfg.f64("e0", 0.0)?,
        },
        "diagonal" => Generator::Diagonal {
            density: match cfg.string("density", "normal")?.as_str() {
                "normal" => EntryDensity::StandardNormal,
                "uniform" => EntryDensity::Uniform {
                    lo: cfg.f64("density_lo", -1.0)?,
                    hi: cfg.f64("density_hi", 1.0)?,
                },
                "semicircle" => EntryDensity::Semicircle,
                other => return usage(format!("unknown density {other:?}")),
            },
            e0: cfg.f64("e0", 0.0)?,
        },
        other => return usage(format!("unknown generator {other:?}")),
    })
}

/// Default sample size, fit tolerance and KS-distance bound per generator.
fn generator_defaults(g: &Generator) -> (usize, f64, Option<f64>) {
    match g {
        Generator::Periodic => (100_000, 0.05, None),
        Generator::QuasiPeriodic { .. } => (40_000, 0.1, None),
        Generator::Poisson { .. } => (40_000, 0.1, Some(0.02)),
        Generator::SineKernel => (10_000, 0.1, None),
        Generator::Gue { .. } => (20_000, 0.1, Some(0.03)),
        Generator::Diagonal { .. } => (40_000, 0.1, None),
    }
}

fn sine_basis(
    cfg: &Settings,
    half_width: f64,
) -> Result<std::sync::Arc<SineKernelBasis>, CliError> {
    let w = cfg.f64("half_width", half_width)?;
    let h = cfg.f64("spacing", 0.05)?;
    Ok(SineKernelBasis::cached(w, h)?)
}

/// Pools per-realization shift samples; `samples` must split evenly.
fn pooled<D>(
    cfg: &Settings,
    draw: D,
    samples: usize,
    window: f64,
    length: f64,
    seed: u64,
) -> Result<ShiftDistribution, CliError>
where
    D: Fn(&mut Stream) -> herglotz::Result<herglotz::PointSample> + Sync,
{
    let window = cfg.f64("window", window)?;
    let length = cfg.f64("length", length)?;
    let per = cfg.usize("per_window", 1000)?.min(samples);
    cfg.reject_unknown()?;
    if per == 0 || samples % per != 0 {
        return usage(format!(
            "samples = {samples} must be a multiple of per_window = {per}"
        ));
    }
    Ok(pooled_shift_distribution(
        draw,
        samples / per,
        per,
        length,
        window,
        seed,
    )?)
}

fn boundary_values(
    cfg: &Settings,
    g: &Generator,
    samples: usize,
    seed: u64,
) -> Result<ShiftDistribution, CliError> {
    let function = |f: HPFunction, length: f64| -> Result<ShiftDistribution, CliError> {
        let length = cfg.f64("length", length)?;
        let stratified = cfg.bool("stratified", false)?;
        cfg.reject_unknown()?;
        Ok(shift_distribution(
            |x| f.evaluate(Complex64::new(x, 0.0)).map(|v| v.re),
            length,
            samples,
            stratified,
            seed,
        )?)
    };
    match g {
        Generator::Periodic => function(HPFunction::Periodic, 1000.0),
        Generator::QuasiPeriodic { alpha, beta, theta } => function(
            HPFunction::quasi_periodic(alpha.clone(), beta.clone(), theta.clone())?,
            20_000.0,
        ),
        Generator::Poisson { rho } => {
            let w = cfg.f64("half_width", 1000.0)?;
            pooled(
                cfg,
                |r| sample_poisson(w, *rho, r),
                samples,
                700.0,
                500.0,
                seed,
            )
        }
        Generator::SineKernel => {
            let basis = sine_basis(cfg, 120.0)?;
            pooled(
                cfg,
                |r| sample_sine_kernel_with(&basis, r),
                samples,
                80.0,
                80.0,
                seed,
            )
        }
        Generator::Gue { e0 } => {
            let n = cfg.usize("n", 500)?;
            let jitter = cfg.f64("jitter", 0.01)?;
            cfg.reject_unknown()?;
            let rho = semicircle_density(*e0)?;
            Ok(ensemble_distribution(
                |r| microscopic_rescale(&sample_gue_spectrum(n, r)?, *e0, rho),
                jitter,
                samples,
                seed,
            )?)
        }
        Generator::Diagonal { density, e0 } => {
            let n = cfg.usize("n", 2000)?;
            let jitter = cfg.f64("jitter", 0.01)?;
            cfg.reject_unknown()?;
            Ok(ensemble_distribution(
                |r| sample_diagonal_rescaled(n, density, *e0, r),
                jitter,
                samples,
                seed,
            )?)
        }
    }
}

fn t_grid(cfg: &Settings) -> Result<Vec<f64>, CliError> {
    let default: Vec<f64> = (1..=10).map(|k| 0.1 * k as f64).collect();
    cfg.f64_list("t_grid", &default)
}

fn cauchy(cfg: &Settings) -> Result<Report, CliError> {
    let seed = cfg.u64("seed", 1)?;
    let g = read_generator(cfg)?;
    let (n_default, tol_default, ks_default) = generator_defaults(&g);
    let samples = cfg.usize("samples", n_default)?;
    let fit_tol = cfg.f64("fit_tol", tol_default)?;
    let p_min = cfg.f64("p_min", 0.01)?;
    let ks_max = cfg.opt_f64("ks_max", ks_default)?;
    let grid = t_grid(cfg)?;
    let predicted = predicted_gamma(&g)?;
    // Histogram keys are read before the sampler rejects unknown keys.
    let hist_keys = (
        cfg.f64("hist_lo", -20.0)?,
        cfg.f64("hist_hi", 20.0)?,
        cfg.usize("hist_bins", 80)?,
    );
    let sd = boundary_values(cfg, &g, samples, seed)?;
    let d = &sd.distribution;
    let fit = fit_cauchy_quantile(d)?;
    let charfn = fit_cauchy_charfn(d, &grid).ok();
    let gof = ks_test_cauchy(d, &predicted)?;
    let mut checks = vec![
        Check::at_most(
            "|Re fit - Re Gamma|",
            (fit.re_gamma - predicted.re_gamma).abs(),
            fit_tol,
        ),
        Check::at_most(
            "|Im fit - Im Gamma|",
            (fit.im_gamma - predicted.im_gamma).abs(),
            fit_tol,
        ),
        Check::at_least("KS p-value", gof.p_value, p_min),
    ];
    if let Some(k) = ks_max {
        checks.push(Check::at_most("KS distance", gof.ks_statistic, k));
    }
    Ok(Report {
        results: json!({
            "generator": g,
            "sample_size": d.len(),
            "predicted": fit_json(&predicted),
            "fit_quantile": fit_json(&fit),
            "fit_charfn": charfn.as_ref().map(fit_json),
            "ks_statistic": gof.ks_statistic,
            "p_value": gof.p_value,
            "rejections": sd.rejections,
            "attempts": sd.attempts,
        }),
        checks,
        files: vec![(
            "histogram.csv".into(),
            histogram(cfg, d, hist_keys.0, hist_keys.1, hist_keys.2)?,
        )],
        samples: d.samples().iter().map(|v| json!({ "value": v })).collect(),
    })
}

fn gamma(cfg: &Settings) -> Result<Report, CliError> {
    let seed = cfg.u64("seed", 1)?;
    let route = cfg.string("route", "quantile")?;
    let g = read_generator(cfg)?;
    let predicted = predicted_gamma(&g)?;
    let tol = cfg.f64("gamma_tol", 0.1)?;
    let mut results = json!({"generator": g, "route": route, "predicted": fit_json(&predicted)});
    let mut report = Report::default();
    let estimate = if route == "height" {
        let (estimate, detail) = height_route(cfg, &g, seed)?;
        results["height"] = detail;
        estimate
    } else {
        let (n_default, _, _) = generator_defaults(&g);
        let samples = cfg.usize("samples", n_default)?;
        let grid = if route == "charfn" {
            t_grid(cfg)?
        } else {
            Vec::new()
        };
        let hist_keys = (
            cfg.f64("hist_lo", -20.0)?,
            cfg.f64("hist_hi", 20.0)?,
            cfg.usize("hist_bins", 80)?,
        );
        if !matches!(route.as_str(), "quantile" | "charfn" | "inverse") {
            return usage(format!("unknown route {route:?}"));
        }
        let sd = boundary_values(cfg, &g, samples, seed)?;
        let d = &sd.distribution;
        report.files.push((
            "histogram.csv".into(),
            histogram(cfg, d, hist_keys.0, hist_keys.1, hist_keys.2)?,
        ));
        report.samples = d.samples().iter().map(|v| json!({ "value": v })).collect();
        results["sample_size"] = json!(d.len());
        results["rejections"] = json!(sd.rejections);
        match route.as_str() {
            "quantile" => fit_cauchy_quantile(d)?.gamma(),
            "charfn" => fit_cauchy_charfn(d, &grid)?.gamma(),
            _ => estimate_gamma_inverse(d)?,
        }
    };
    results["estimate"] = json!({"re": estimate.re, "im": estimate.im});
    report.checks = vec![
        Check::at_most(
            "|Re estimate - Re Gamma|",
            (estimate.re - predicted.re_gamma).abs(),
            tol,
        ),
        Check::at_most(
            "|Im estimate - Im Gamma|",
            (estimate.im - predicted.im_gamma).abs(),
            tol,
        ),
    ];
    report.results = results;
    Ok(report)
}

/// `F(x + i eta)` along a height grid. Processes average the extrapolated
/// transform over independent realizations.
fn height_route(cfg: &Settings, g: &Generator, seed: u64) -> Result<(Complex64, Value), CliError> {
    let x = cfg.f64("x", 0.3)?;
    let x_alt = cfg.f64("x_alt", 1.7)?;
    let function = |f: HPFunction| -> Result<(Complex64, Value), CliError> {
        let heights = cfg.f64_list("heights", &[1.0, 2.0, 5.0, 10.0, 20.0])?;
        cfg.reject_unknown()?;
        let h = estimate_gamma_height(|z| f.evaluate(z), x, x_alt, &heights)?;
        Ok((h.estimate, json!(h)))
    };
    let process = |draw: &(dyn Fn(&mut Stream) -> herglotz::Result<herglotz::PointSample>
                         + Sync),
                   w: f64|
     -> Result<(Complex64, Value), CliError> {
        let realizations = cfg.usize("realizations", 20)?;
        let heights = cfg.f64_list("heights", &[w / 16.0, w / 8.0, w / 4.0])?;
        cfg.reject_unknown()?;
        if realizations == 0 {
            return usage("realizations must be positive");
        }
        let estimates: Vec<Complex64> = (0..realizations)
            .into_par_iter()
            .map(|r| -> herglotz::Result<Complex64> {
                let mut rng = substream(seed, r as u64);
                let s = draw(&mut rng)?;
                let window = s.half_width();
                let h = estimate_gamma_height(
                    |z| extrapolated_transform(&s, z, window).map(|t| t.value),
                    x,
                    x_alt,
                    &heights,
                )?;
                Ok(h.estimate)
            })
            .collect::<herglotz::Result<_>>()?;
        let mean = estimates.iter().sum::<Complex64>() / realizations as f64;
        let spread = (estimates.iter().map(|e| (e - mean).norm_sqr()).sum::<f64>()
            / (realizations.max(2) - 1) as f64
            / realizations as f64)
            .sqrt();
        let values: Vec<Value> = estimates
            .iter()
            .map(|e| json!({"re": e.re, "im": e.im}))
            .collect();
        Ok((
            mean,
            json!({"heights": heights, "realizations": values, "standard_error": spread}),
        ))
    };
    match g {
        Generator::Periodic => function(HPFunction::Periodic),
        Generator::QuasiPeriodic { alpha, beta, theta } => function(HPFunction::quasi_periodic(
            alpha.clone(),
            beta.clone(),
            theta.clone(),
        )?),
        Generator::Poisson { rho } => {
            let w = cfg.f64("half_width", 1000.0)?;
            process(&|r: &mut Stream| sample_poisson(w, *rho, r), w)
        }
        Generator::SineKernel => {
            let w = cfg.f64("half_width", 200.0)?;
            let basis = sine_basis(cfg, w)?;
            process(&|r: &mut Stream| sample_sine_kernel_with(&basis, r), w)
        }
        Generator::Gue { .. } | Generator::Diagonal { .. } => {
            usage("the height route needs periodic, quasiperiodic, poisson or sine-kernel")
        }
    }
}

fn number_variance_run(cfg: &Settings) -> Result<Report, CliError> {
    let seed = cfg.u64("seed", 1)?;
    let process = cfg.string("process", "sine-kernel")?;
    let spec = match process.as_str() {
        "sine-kernel" => SamplerSpec::SineKernel {
            half_width: cfg.f64("half_width", 320.0)?,
            spacing: cfg.f64("spacing", 0.05)?,
        },
        "poisson" => SamplerSpec::Poisson {
            half_width: cfg.f64("half_width", 320.0)?,
            rho: cfg.f64("rho", 1.0)?,
        },
        other => return usage(format!("unknown process {other:?}")),
    };
    let samples = cfg.usize("samples", 500)?;
    let grid = log_grid(
        cfg.f64("grid_lo", 10.0)?,
        cfg.f64("grid_hi", 500.0)?,
        cfg.usize("grid_points", 24)?,
    );
    let origins = match cfg.string("origins", "sliding")?.as_str() {
        "sliding" => Origins::Sliding {
            step: cfg.f64("step", 0.5)?,
        },
        "zero" => Origins::Zero,
        other => return usage(format!("unknown origins {other:?}")),
    };
    let tol = cfg.f64("rel_tol", 0.15)?;
    cfg.reject_unknown()?;
    let est = number_variance(&spec, &grid, samples, origins, seed)?;
    let mut csv = String::from("x,variance,intervals\n");
    for ((x, v), n) in est.grid.iter().zip(&est.variances).zip(&est.intervals) {
        csv.push_str(&format!("{x},{v},{n}\n"));
    }
    let checks = match spec {
        SamplerSpec::SineKernel { .. } => {
            let target = 1.0 / (PI * PI);
            let slope = est.fit.map_or(f64::NAN, |f| f.slope);
            vec![Check::at_most(
                "relative slope deviation from 1/pi^2",
                ((slope - target) / target).abs(),
                tol,
            )]
        }
        SamplerSpec::Poisson { rho, .. } => {
            let worst = est
                .grid
                .iter()
                .zip(&est.variances)
                .map(|(x, v)| (v / (rho * x) - 1.0).abs())
                .fold(0.0, f64::max);
            vec![Check::at_most("max |variance/(rho x) - 1|", worst, tol)]
        }
    };
    Ok(Report {
        results: json!({"sampler": spec, "estimate": est}),
        checks,
        files: vec![("number_variance.csv".into(), csv)],
        samples: Vec::new(),
    })
}

fn random_circle(rng: &mut Stream, max_atoms: usize, mass: f64) -> herglotz::Result<CircleMeasure> {
    let k = rng.random_range(1..=max_atoms);
    let raw: Vec<(f64, f64)> = (0..k)
        .map(|_| (rng.random_range(0.0..TAU), rng.random_range(0.01..1.0)))
        .collect();
    let total: f64 = raw.iter().map(|a| a.1).sum();
    CircleMeasure::new(raw.into_iter().map(|(t, m)| (t, m * mass / total)))
}

fn metrics_sweep(cfg: &Settings) -> Result<Report, CliError> {
    let seed = cfg.u64("seed", 1)?;
    let pairs = cfg.usize("pairs", 1000)?;
    let max_atoms = cfg.usize("max_atoms", 8)?;
    let max_violations = cfg.f64("max_violations", 0.0)?;
    let hist_bins = cfg.usize("hist_bins", 20)?;
    cfg.reject_unknown()?;
    if pairs == 0 || max_atoms == 0 || hist_bins == 0 {
        return usage("pairs, max_atoms and hist_bins must be positive");
    }
    let rows: Vec<(f64, bool, bool, bool)> = (0..pairs)
        .into_par_iter()
        .map(|k| -> herglotz::Result<(f64, bool, bool, bool)> {
            let mut rng = substream(seed, k as u64);
            let mass = rng.random_range(0.1..3.0);
            let s1 = random_circle(&mut rng, max_atoms, mass)?;
            let s2 = random_circle(&mut rng, max_atoms, mass)?;
            let s3 = random_circle(&mut rng, max_atoms, mass)?;
            let w = Complex64::from_polar(rng.random_range(0.0..0.9), rng.random_range(0.0..TAU));
            let g1 = DiskHP::new(s1.clone(), rng.random_range(-3.0..3.0));
            let g2 = DiskHP::new(s2.clone(), rng.random_range(-3.0..3.0));
            let b = gbound_check(&g1, &g2, w)?;
            let ratio = if b.rhs > 0.0 { b.lhs / b.rhs } else { 0.0 };
            let triangle = wasserstein_circle(&s1, &s3)?
                <= wasserstein_circle(&s1, &s2)? + wasserstein_circle(&s2, &s3)? + 1e-9;
            let flat = flat_distance(&s1, &s2) <= variational_distance(&s1, &s2) + 1e-12;
            Ok((ratio, b.holds, triangle, flat))
        })
        .collect::<herglotz::Result<_>>()?;
    let count = |f: fn(&(f64, bool, bool, bool)) -> bool| rows.iter().filter(|r| !f(r)).count();
    let gbound = count(|r| r.1);
    let triangle = count(|r| r.2);
    let flat = count(|r| r.3);
    let ratios = EmpiricalDistribution::new(rows.iter().map(|r| r.0).collect())?;
    Ok(Report {
        results: json!({
            "pairs": pairs,
            "gbound_violations": gbound,
            "triangle_violations": triangle,
            "flat_violations": flat,
            "max_lhs_over_rhs": ratios.quantile(1.0),
        }),
        checks: vec![
            Check::at_most("G-bound violations", gbound as f64, max_violations),
            Check::at_most("triangle violations", triangle as f64, max_violations),
            Check::at_most("flat > TV violations", flat as f64, max_violations),
        ],
        files: vec![(
            "histogram.csv".into(),
            ratios.histogram_csv(&uniform_edges(0.0, 1.0, hist_bins)),
        )],
        samples: rows
            .iter()
            .map(|r| json!({"lhs_over_rhs": r.0, "gbound": r.1, "triangle": r.2, "flat": r.3}))
            .collect(),
    })
}

fn shift_covariance(cfg: &Settings) -> Result<Report, CliError> {
    let seed = cfg.u64("seed", 1)?;
    let samples = cfg.usize("samples", 100)?;
    let half_width = cfg.f64("half_width", 1010.0)?;
    let shift = cfg.f64("shift", 5.0)?;
    let z = Complex64::new(cfg.f64("z_re", 0.0)?, cfg.f64("z_im", 1.0)?);
    let windows = cfg.f64_list("windows", &[250.0, 500.0, 1000.0])?;
    let final_max = cfg.f64("max_final_median", 0.1)?;
    cfg.reject_unknown()?;
    if samples == 0 || windows.is_empty() {
        return usage("shift-covariance needs samples > 0 and at least one window");
    }
    let rows: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|k| -> herglotz::Result<Vec<f64>> {
            let mut rng = substream(seed, k as u64);
            let s = sample_poisson(half_width, 1.0, &mut rng)?;
            windows
                .iter()
                .map(|&n| shift_covariance_check(&s, shift, z, n))
                .collect()
        })
        .collect::<herglotz::Result<_>>()?;
    let medians: Vec<f64> = (0..windows.len())
        .map(|j| {
            EmpiricalDistribution::new(rows.iter().map(|r| r[j]).collect()).map(|d| d.median())
        })
        .collect::<herglotz::Result<_>>()?;
    let last = EmpiricalDistribution::new(rows.iter().map(|r| r[windows.len() - 1]).collect())?;
    let top = last.quantile(1.0).max(f64::MIN_POSITIVE);
    Ok(Report {
        results: json!({"windows": windows, "medians": medians}),
        checks: vec![
            Check::holds(
                "medians decrease with the window",
                medians.windows(2).all(|m| m[1] < m[0]),
            ),
            Check::at_most(
                "median at the largest window",
                medians[medians.len() - 1],
                final_max,
            ),
        ],
        files: vec![(
            "histogram.csv".into(),
            last.histogram_csv(&uniform_edges(0.0, top * (1.0 + 1e-12), 20)),
        )],
        samples: rows.iter().map(|r| json!({ "discrepancies": r })).collect(),
    })
}

fn star(cfg: &Settings) -> Result<Report, CliError> {
    let seed = cfg.u64("seed", 1)?;
    let g = cfg.string("generator", "poisson")?;
    let x = cfg.f64("x", 0.0)?;
    let deltas = cfg.f64_list("deltas", &[1.0, 0.3, 0.1, 0.03])?;
    let count = cfg.usize("samples", 1000)?;
    let m = match g.as_str() {
        "periodic" => {
            cfg.reject_unknown()?;
            star_modulus(
                |rng, xs| {
                    let phase: f64 = rng.random();
                    xs.iter()
                        .map(|&y| {
                            HPFunction::Periodic
                                .evaluate(Complex64::new(y + phase, 0.0))
                                .map(|v| v.re)
                        })
                        .collect()
                },
                x,
                &deltas,
                count,
                seed,
            )?
        }
        "poisson" => {
            let w = cfg.f64("half_width", 1000.0)?;
            let window = cfg.f64("window", 700.0)?;
            cfg.reject_unknown()?;
            star_modulus(
                |rng, xs| {
                    let s = sample_poisson(w, 1.0, rng)?;
                    xs.iter()
                        .map(|&y| centred_boundary_value(&s, y, window))
                        .collect()
                },
                x,
                &deltas,
                count,
                seed,
            )?
        }
        "sine-kernel" => {
            let basis = sine_basis(cfg, 120.0)?;
            let window = cfg.f64("window", 80.0)?;
            cfg.reject_unknown()?;
            star_modulus(
                |rng, xs| {
                    let s = sample_sine_kernel_with(&basis, rng)?;
                    xs.iter()
                        .map(|&y| centred_boundary_value(&s, y, window))
                        .collect()
                },
                x,
                &deltas,
                count,
                seed,
            )?
        }
        other => {
            return usage(format!(
                "star-modulus supports periodic, poisson and sine-kernel, not {other:?}"
            ))
        }
    };
    // Reported, not asserted: does kappa shrink as delta does?
    let mut order: Vec<usize> = (0..m.deltas.len()).collect();
    order.sort_by(|&a, &b| m.deltas[b].total_cmp(&m.deltas[a]));
    let trend = order.windows(2).all(|w| m.kappa[w[1]] <= m.kappa[w[0]]);
    let mut csv = String::from("delta,kappa\n");
    for (d, k) in m.deltas.iter().zip(&m.kappa) {
        csv.push_str(&format!("{d},{k}\n"));
    }
    Ok(Report {
        results: json!({"generator": g, "x": x, "modulus": m, "nonincreasing_as_delta_shrinks": trend}),
        checks: Vec::new(),
        files: vec![("kappa.csv".into(), csv)],
        samples: Vec::new(),
    })
}
