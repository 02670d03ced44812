//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! status 1 if any criterion fails. `ACCEPTANCE_ONLY=3,5` runs a subset.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use herglotz::hp_core::{evaluate_disk, mobius_to_halfplane, to_disk, AtomicMeasure, HPFunction};
use herglotz::metrics::gbound_check;
use herglotz::point_process::{
    log_grid, number_variance, sample_poisson, sample_sine_kernel_with, Origins, SamplerSpec,
    SineKernelBasis,
};
use herglotz::rmt::{
    microscopic_rescale, sample_diagonal_rescaled, sample_gue_spectrum, semicircle_density,
    tridiag_eigenvalues, EntryDensity,
};
use herglotz::rng::{substream, substream2, Stream};
use herglotz::stats::{
    boole_verify, fit_cauchy_quantile, ks_test_cauchy, ks_two_sample, predicted_gamma,
    shift_distribution, CauchyParams, EmpiricalDistribution, Generator,
};
use herglotz::stieltjes::{
    centred_boundary_value, corrected_transform, shift_covariance_check, truncated_transform,
};
use herglotz::{CircleMeasure, Complex64, DiskHP, Error, PointSample, Result};
use rand::Rng;
use rayon::prelude::*;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn fits_within(fit: &CauchyParams, target: &CauchyParams, tol: f64) -> bool {
    (fit.re_gamma - target.re_gamma).abs() <= tol && (fit.im_gamma - target.im_gamma).abs() <= tol
}

fn fmt_fit(p: &CauchyParams) -> String {
    format!("({:.4}, {:.4})", p.re_gamma, p.im_gamma)
}

/// Criterion 1: Boole's identity on random atomic measures.
fn boole() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for seed in 0..20u64 {
        let mut rng = substream(SEED ^ 0xB001E, seed);
        let atoms: Vec<(f64, f64)> = (0..50)
            .map(|_| {
                (
                    rng.random_range(-50.0..50.0),
                    10.0 * (1.0 - rng.random::<f64>()),
                )
            })
            .collect();
        let mu = AtomicMeasure::new(atoms)?;
        for &t in &[0.1, 1.0, 10.0] {
            worst = worst.max(boole_verify(&mu, t)?.relative_error);
            cases += 1;
        }
    }
    Ok(Outcome {
        pass: worst < 1e-9,
        detail: format!("{cases} cases, max relative error {worst:.2e} (< 1e-9)"),
    })
}

/// Criterion 2: shift distribution of -pi cot(pi x).
fn periodic() -> Result<Outcome> {
    let f = HPFunction::Periodic;
    let sd = shift_distribution(
        |x| f.evaluate(Complex64::new(x, 0.0)).map(|v| v.re),
        1000.0,
        100_000,
        false,
        SEED ^ 2,
    )?;
    let d = &sd.distribution;
    let target = CauchyParams::new(0.0, PI)?;
    let fit = fit_cauchy_quantile(d)?;
    let gof = ks_test_cauchy(d, &target)?;
    Ok(Outcome {
        pass: gof.p_value > 0.01 && fits_within(&fit, &target, 0.05),
        detail: format!(
            "N = {}, fit {} vs (0, pi) +- 0.05, KS p = {:.3} (> 0.01)",
            d.len(),
            fmt_fit(&fit),
            gof.p_value
        ),
    })
}

/// Pools shift samples of the boundary value over independent Poisson
/// windows, each value evaluated with a window centred on its abscissa.
fn poisson_shift_pool(
    realizations: usize,
    per_realization: usize,
    half_width: f64,
    length: f64,
    window: f64,
    seed: u64,
) -> Result<(Vec<f64>, usize)> {
    let parts: Vec<(Vec<f64>, usize)> = (0..realizations)
        .into_par_iter()
        .map(|r| -> Result<(Vec<f64>, usize)> {
            let mut rng = substream(seed, r as u64);
            let s = sample_poisson(half_width, 1.0, &mut rng)?;
            let sd = shift_distribution(
                |x| centred_boundary_value(&s, x, window),
                length,
                per_realization,
                true,
                seed ^ (0x5EED_0000 + r as u64),
            )?;
            Ok((sd.distribution.samples().to_vec(), sd.rejections))
        })
        .collect::<Result<_>>()?;
    let rejections = parts.iter().map(|p| p.1).sum();
    Ok((parts.into_iter().flat_map(|p| p.0).collect(), rejections))
}

/// Criterion 3: Poisson-Stieltjes boundary values are Cauchy(0, pi).
fn poisson() -> Result<Outcome> {
    let (values, rejections) = poisson_shift_pool(40, 1000, 1000.0, 500.0, 700.0, SEED ^ 3)?;
    let d = EmpiricalDistribution::new(values)?;
    let target = CauchyParams::new(0.0, PI)?;
    let fit = fit_cauchy_quantile(&d)?;
    let gof = ks_test_cauchy(&d, &target)?;
    Ok(Outcome {
        pass: fits_within(&fit, &target, 0.1) && gof.ks_statistic < 0.02,
        detail: format!(
            "N = {} (40 windows W = 1000), fit {} vs (0, pi) +- 0.1, KS {:.4} (< 0.02), {} pole redraws",
            d.len(),
            fmt_fit(&fit),
            gof.ks_statistic,
            rejections
        ),
    })
}

/// Criterion 4: sine-kernel number variance grows like ln(x)/pi^2.
fn number_variance_slope() -> Result<Outcome> {
    let spec = SamplerSpec::SineKernel {
        half_width: 320.0,
        spacing: 0.05,
    };
    let grid = log_grid(10.0, 500.0, 24);
    let est = number_variance(&spec, &grid, 500, Origins::Sliding { step: 0.5 }, SEED ^ 4)?;
    let fit = est.fit.ok_or_else(|| Error::Fit("no fit".into()))?;
    let target = 1.0 / (PI * PI);
    let rel = (fit.slope - target).abs() / target;
    Ok(Outcome {
        pass: rel < 0.15,
        detail: format!(
            "500 samples W = 320, slope {:.5} vs 1/pi^2 = {:.5}, relative deviation {:.3} (< 0.15)",
            fit.slope, target, rel
        ),
    })
}

/// Jitter width for fixed-x ensemble sampling.
const JITTER: f64 = 0.01;

/// Boundary values of a full rescaled trace at `x` jittered around zero,
/// one per independent draw.
fn ensemble_values<D>(count: usize, seed: u64, draw: D) -> Result<EmpiricalDistribution>
where
    D: Fn(&mut Stream) -> Result<PointSample> + Sync,
{
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|k| -> Result<f64> {
            let mut rng = substream(seed, k as u64);
            let s = draw(&mut rng)?;
            for _ in 0..1000 {
                let x = JITTER * (rng.random::<f64>() - 0.5);
                match truncated_transform(&s, Complex64::new(x, 0.0), s.half_width()) {
                    Ok(r) => return Ok(r.value.re),
                    Err(Error::Pole(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::SamplerQuality {
                rate: 1.0,
                limit: 1e-3,
            })
        })
        .collect::<Result<_>>()?;
    EmpiricalDistribution::new(values)
}

/// Criterion 5: GUE rescaled trace at E0 = 0 and E0 = 1.
fn gue() -> Result<Outcome> {
    let mut pass = true;
    let mut lines = Vec::new();
    for (k, &e0) in [0.0, 1.0].iter().enumerate() {
        let rho = semicircle_density(e0)?;
        let d = ensemble_values(20_000, substream2(SEED, 5, k as u64).random(), |rng| {
            microscopic_rescale(&sample_gue_spectrum(500, rng)?, e0, rho)
        })?;
        let target = predicted_gamma(&Generator::Gue { e0 })?;
        let fit = fit_cauchy_quantile(&d)?;
        let gof = ks_test_cauchy(&d, &target)?;
        let ok = fits_within(&fit, &target, 0.1) && gof.ks_statistic < 0.03;
        pass &= ok;
        lines.push(format!(
            "E0 = {e0}: N = {}, fit {} vs {} +- 0.1, KS {:.4} (< 0.03)",
            d.len(),
            fmt_fit(&fit),
            fmt_fit(&target),
            gof.ks_statistic
        ));
    }
    Ok(Outcome {
        pass,
        detail: format!("n = 500; {}", lines.join("; ")),
    })
}

/// Criterion 6: random diagonal matrices with standard normal entries.
fn diagonal() -> Result<Outcome> {
    let density = EntryDensity::StandardNormal;
    let mut pass = true;
    let mut lines = Vec::new();
    for (k, &e0) in [0.0, 0.5].iter().enumerate() {
        let target = predicted_gamma(&Generator::Diagonal { density, e0 })?;
        // Independent check of the principal-value prediction.
        let oracle = common::normal_hilbert(e0) / density.density(e0);
        let oracle_ok = (target.re_gamma - oracle).abs() < 1e-8;
        let d = ensemble_values(40_000, substream2(SEED, 6, k as u64).random(), |rng| {
            sample_diagonal_rescaled(2000, &density, e0, rng)
        })?;
        let fit = fit_cauchy_quantile(&d)?;
        let ok = oracle_ok && fits_within(&fit, &target, 0.1);
        pass &= ok;
        lines.push(format!(
            "E0 = {e0}: prediction {} (Dawson oracle Re {:.6}), fit {} +- 0.1",
            fmt_fit(&target),
            oracle,
            fmt_fit(&fit)
        ));
    }
    Ok(Outcome {
        pass,
        detail: format!("n = 2000, N = 40000 per E0; {}", lines.join("; ")),
    })
}

/// Criterion 7: nearest-neighbour gaps of the sine-kernel sampler against
/// rescaled GUE spectra.
fn gaps() -> Result<Outcome> {
    let radius = 30.0;
    let basis = SineKernelBasis::cached(40.0, 0.05)?;
    let sine: Vec<Vec<f64>> = (0..200)
        .into_par_iter()
        .map(|k| -> Result<Vec<f64>> {
            let mut rng = substream(SEED ^ 7, k);
            Ok(common::interior_gaps(
                &sample_sine_kernel_with(&basis, &mut rng)?,
                radius,
            ))
        })
        .collect::<Result<_>>()?;
    let rho = semicircle_density(0.0)?;
    let gue: Vec<Vec<f64>> = (0..200)
        .into_par_iter()
        .map(|k| -> Result<Vec<f64>> {
            let mut rng = substream(SEED ^ 77, k);
            let s = microscopic_rescale(&sample_gue_spectrum(500, &mut rng)?, 0.0, rho)?;
            Ok(common::interior_gaps(&s, radius))
        })
        .collect::<Result<_>>()?;
    let a = EmpiricalDistribution::new(sine.concat())?;
    let b = EmpiricalDistribution::new(gue.concat())?;
    let ks = ks_two_sample(&a, &b);
    Ok(Outcome {
        pass: ks < 0.05 && a.len() >= 10_000 && b.len() >= 10_000,
        detail: format!(
            "{} sine-kernel gaps vs {} GUE gaps, KS {:.4} (< 0.05)",
            a.len(),
            b.len(),
            ks
        ),
    })
}

fn random_represented(rng: &mut Stream) -> Result<HPFunction> {
    let k = rng.random_range(1..20);
    let atoms: Vec<(f64, f64)> = (0..k)
        .map(|_| (rng.random_range(-10.0..10.0), rng.random_range(0.01..5.0)))
        .collect();
    HPFunction::represented(
        AtomicMeasure::new(atoms)?,
        rng.random_range(0.0..2.0),
        rng.random_range(-5.0..5.0),
    )
}

fn random_disk(rng: &mut Stream) -> Result<DiskHP> {
    let k = rng.random_range(0..8);
    let atoms: Vec<(f64, f64)> = (0..k)
        .map(|_| (rng.random_range(0.0..2.0 * PI), rng.random_range(0.01..3.0)))
        .collect();
    Ok(DiskHP::new(
        CircleMeasure::new(atoms)?,
        rng.random_range(-3.0..3.0),
    ))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Criterion 8: exact identities and inequalities.
fn properties() -> Result<Outcome> {
    let mut checks = Vec::new();
    let mut rng = substream(SEED, 8);

    // Range invariance.
    let mut min_im = f64::INFINITY;
    for _ in 0..10_000 {
        let f = random_represented(&mut rng)?;
        let z = Complex64::new(
            rng.random_range(-20.0..20.0),
            10.0 * (1.0 - rng.random::<f64>()),
        );
        min_im = min_im.min(f.evaluate(z)?.im);
    }
    checks.push((
        "range",
        min_im >= -1e-12,
        format!("min Im F = {min_im:.3e}"),
    ));

    // Integration-by-parts identity.
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let mut r = substream(SEED ^ 81, k);
        let s = sample_poisson(500.0, 1.0, &mut r)?;
        for &z in &[
            Complex64::new(0.0, 1.0),
            Complex64::new(13.3, 0.05),
            Complex64::new(-200.0, 40.0),
        ] {
            let t = truncated_transform(&s, z, 400.0)?.value;
            let c = corrected_transform(&s, z, 400.0)?.value;
            worst = worst.max((t - c).norm());
        }
    }
    checks.push((
        "ibp identity",
        worst < 1e-10,
        format!("max diff {worst:.2e}"),
    ));

    // Pointwise bound.
    let mut violations = 0;
    for _ in 0..1000 {
        let g1 = random_disk(&mut rng)?;
        let g2 = random_disk(&mut rng)?;
        let w = Complex64::from_polar(
            0.9 * rng.random::<f64>().sqrt(),
            rng.random_range(0.0..2.0 * PI),
        );
        if !gbound_check(&g1, &g2, w)?.holds {
            violations += 1;
        }
    }
    checks.push((
        "G bound",
        violations == 0,
        format!("{violations} violations / 1000"),
    ));

    // Disk round trip.
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let f = random_represented(&mut rng)?;
        let g = to_disk(&f)?;
        let w = Complex64::from_polar(
            0.9 * rng.random::<f64>().sqrt(),
            rng.random_range(0.0..2.0 * PI),
        );
        let a = f.evaluate(mobius_to_halfplane(w)?)?;
        let b = evaluate_disk(&g, w)?;
        worst = worst.max((a - b).norm() / a.norm().max(1.0));
    }
    checks.push((
        "disk round trip",
        worst < 1e-10,
        format!("max rel diff {worst:.2e}"),
    ));

    // Tridiagonal eigensolver against Sturm bisection.
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..=50);
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let e: Vec<f64> = (1..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let norm = (d.iter().map(|x| x * x).sum::<f64>()
            + 2.0 * e.iter().map(|x| x * x).sum::<f64>())
        .sqrt();
        let ql = tridiag_eigenvalues(&d, &e)?;
        let oracle = common::sturm_eigenvalues(&d, &e, 1e-14 * norm);
        for (a, b) in ql.iter().zip(&oracle) {
            worst = worst.max((a - b).abs() / norm);
        }
    }
    checks.push((
        "QL vs Sturm",
        worst < 1e-10,
        format!("max rel diff {worst:.2e}"),
    ));

    // Shift covariance improves with the window.
    let windows = [250.0, 500.0, 1000.0];
    let per_sample: Vec<Vec<f64>> = (0..100)
        .map(|k| -> Result<Vec<f64>> {
            let mut r = substream(SEED ^ 82, k);
            let s = sample_poisson(1010.0, 1.0, &mut r)?;
            windows
                .iter()
                .map(|&n| shift_covariance_check(&s, 5.0, Complex64::new(0.0, 1.0), n))
                .collect()
        })
        .collect::<Result<_>>()?;
    let medians: Vec<f64> = (0..windows.len())
        .map(|j| median(per_sample.iter().map(|r| r[j]).collect()))
        .collect();
    let decreasing = medians.windows(2).all(|m| m[1] < m[0]);
    checks.push((
        "shift covariance",
        decreasing && medians[2] < 0.1,
        format!(
            "medians {:.4} > {:.4} > {:.4}",
            medians[0], medians[1], medians[2]
        ),
    ));

    let pass = checks.iter().all(|c| c.1);
    let detail = checks
        .iter()
        .map(|(name, ok, d)| format!("{name}: {} ({d})", if *ok { "ok" } else { "FAIL" }))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome { pass, detail })
}

type Criterion = (u32, &'static str, u64, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "Boole identity", 10, boole),
        (2, "periodic Cauchy law", 5, periodic),
        (3, "Poisson-Stieltjes Cauchy law", 300, poisson),
        (
            4,
            "sine-kernel number variance",
            1800,
            number_variance_slope,
        ),
        (5, "GUE microscopic Cauchy law", 1200, gue),
        (6, "diagonal ensemble Cauchy law", 300, diagonal),
        (7, "sine-kernel vs GUE gaps", 1800, gaps),
        (8, "property suites", 120, properties),
    ];
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id} {}: {name}: {detail} [{:.1} s, limit {limit} s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
