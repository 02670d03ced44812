//! Shift distributions, Cauchy fits and goodness of fit, estimators of the
//! baricenter `Gamma`, Boole's identity and the *-continuity modulus.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hp_core::AtomicMeasure;
use crate::point_process::PointSample;
use crate::quad::adaptive_gk15;
use crate::rmt::{semicircle_density, EntryDensity};
use crate::rng::{substream, substream2, Stream};
use crate::stieltjes::{centred_boundary_value, truncated_transform, POLE_CUTOFF};

/// Sorted real samples with CDF and quantile queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|x| !x.is_finite()) {
            return domain("samples must be finite");
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Fraction of samples `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.partition_point(|&s| s <= x) as f64 / self.samples.len() as f64
    }

    /// Linearly interpolated quantile, `p` in `[0, 1]`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.samples.len();
        assert!(n > 0, "quantile of an empty distribution");
        let pos = p.clamp(0.0, 1.0) * (n - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let frac = pos - lo as f64;
        self.samples[lo] + frac * (self.samples[hi] - self.samples[lo])
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    /// Counts per bin for increasing `edges`; samples outside are dropped.
    pub fn histogram(&self, edges: &[f64]) -> Vec<usize> {
        edges
            .windows(2)
            .map(|w| {
                let lo = self.samples.partition_point(|&s| s < w[0]);
                let hi = self.samples.partition_point(|&s| s < w[1]);
                hi - lo
            })
            .collect()
    }

    /// CSV with header `bin_left,bin_right,count`.
    pub fn histogram_csv(&self, edges: &[f64]) -> String {
        let mut out = String::from("bin_left,bin_right,count\n");
        for (w, c) in edges.windows(2).zip(self.histogram(edges)) {
            writeln!(out, "{},{},{}", w[0], w[1], c).expect("write to string");
        }
        out
    }
}

/// Evenly spaced histogram edges.
pub fn uniform_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins)
        .map(|k| lo + (hi - lo) * k as f64 / bins as f64)
        .collect()
}

/// Baricenter of a Cauchy law; `im_gamma = 0` is the point mass at `re_gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyParams {
    pub re_gamma: f64,
    pub im_gamma: f64,
}

impl CauchyParams {
    pub fn new(re_gamma: f64, im_gamma: f64) -> Result<Self> {
        if !re_gamma.is_finite() || !(im_gamma >= 0.0) || !im_gamma.is_finite() {
            return domain(format!(
                "invalid Cauchy parameters ({re_gamma}, {im_gamma})"
            ));
        }
        Ok(Self { re_gamma, im_gamma })
    }

    pub fn from_complex(g: Complex64) -> Result<Self> {
        Self::new(g.re, g.im)
    }

    pub fn gamma(&self) -> Complex64 {
        Complex64::new(self.re_gamma, self.im_gamma)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if self.im_gamma == 0.0 {
            return if x >= self.re_gamma { 1.0 } else { 0.0 };
        }
        0.5 + ((x - self.re_gamma) / self.im_gamma).atan() / PI
    }

    /// Inverse CDF, used to draw synthetic samples.
    pub fn inverse_cdf(&self, p: f64) -> f64 {
        self.re_gamma + self.im_gamma * (PI * (p - 0.5)).tan()
    }

    pub fn draw(&self, rng: &mut Stream) -> f64 {
        self.inverse_cdf(rng.random::<f64>())
    }
}

/// Shift-sampled boundary values with their rejection bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftDistribution {
    pub distribution: EmpiricalDistribution,
    pub rejections: usize,
    pub attempts: usize,
}

impl ShiftDistribution {
    pub fn rejection_rate(&self) -> f64 {
        self.rejections as f64 / self.attempts.max(1) as f64
    }
}

/// Rejection rate above which shift sampling is refused.
pub const MAX_REJECTION_RATE: f64 = 1e-3;

/// Boundary values `F(x)` at `count` points drawn uniformly from `[-L/2, L/2]`.
///
/// With `stratified` the interval is cut into `count` equal cells and one
/// point is drawn per cell. Points where `f` reports a pole or pole
/// proximity are redrawn; the number of redraws is returned. Sample `k`
/// uses its own substream of `seed`, so the result does not depend on the
/// thread count.
pub fn shift_distribution<F>(
    f: F,
    length: f64,
    count: usize,
    stratified: bool,
    seed: u64,
) -> Result<ShiftDistribution>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(length > 0.0) || count == 0 {
        return domain("shift sampling needs L > 0 and N > 0");
    }
    let draws: Vec<(f64, usize)> = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            let mut rejected = 0;
            loop {
                let u: f64 = rng.random();
                let x = if stratified {
                    length * ((k as f64 + u) / count as f64 - 0.5)
                } else {
                    length * (u - 0.5)
                };
                match f(x) {
                    Ok(v) => return Ok((v, rejected)),
                    Err(Error::Pole(_)) | Err(Error::PoleProximity { .. }) => {
                        rejected += 1;
                        if rejected > 1000 {
                            return Err(Error::SamplerQuality {
                                rate: 1.0,
                                limit: MAX_REJECTION_RATE,
                            });
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        })
        .collect::<Result<_>>()?;
    let rejections: usize = draws.iter().map(|d| d.1).sum();
    let out = ShiftDistribution {
        distribution: EmpiricalDistribution::new(draws.into_iter().map(|d| d.0).collect())?,
        rejections,
        attempts: count + rejections,
    };
    if out.rejection_rate() > MAX_REJECTION_RATE {
        return Err(Error::SamplerQuality {
            rate: out.rejection_rate(),
            limit: MAX_REJECTION_RATE,
        });
    }
    Ok(out)
}

/// Shift samples pooled over independent realizations of a stationary
/// process. Realization `r` is drawn from substream `r` of `seed`; its values
/// are `F(x + i0)` with `x` stratified in `[-L/2, L/2]`, each computed with a
/// window of half-width `window` centred on `x`.
pub fn pooled_shift_distribution<D>(
    draw: D,
    realizations: usize,
    per_realization: usize,
    length: f64,
    window: f64,
    seed: u64,
) -> Result<ShiftDistribution>
where
    D: Fn(&mut Stream) -> Result<PointSample> + Sync,
{
    if realizations == 0 {
        return domain("pooling needs at least one realization");
    }
    let parts: Vec<ShiftDistribution> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, r as u64);
            let s = draw(&mut rng)?;
            let inner: u64 = substream2(seed, 1, r as u64).random();
            shift_distribution(
                |x| centred_boundary_value(&s, x, window),
                length,
                per_realization,
                true,
                inner,
            )
        })
        .collect::<Result<_>>()?;
    let rejections: usize = parts.iter().map(|p| p.rejections).sum();
    let attempts: usize = parts.iter().map(|p| p.attempts).sum();
    let values = parts
        .into_iter()
        .flat_map(|p| p.distribution.samples().to_vec())
        .collect();
    Ok(ShiftDistribution {
        distribution: EmpiricalDistribution::new(values)?,
        rejections,
        attempts,
    })
}

/// One boundary value per independent draw of a finite configuration: the
/// full-window transform at `x` uniform in `[-jitter/2, jitter/2]`. Draws
/// landing on an atom are retried with a fresh `x` and counted.
pub fn ensemble_distribution<D>(
    draw: D,
    jitter: f64,
    count: usize,
    seed: u64,
) -> Result<ShiftDistribution>
where
    D: Fn(&mut Stream) -> Result<PointSample> + Sync,
{
    if count == 0 || !(jitter >= 0.0) {
        return domain("ensemble sampling needs N > 0 and jitter >= 0");
    }
    let draws: Vec<(f64, usize)> = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            let s = draw(&mut rng)?;
            for rejected in 0..1000 {
                let x = jitter * (rng.random::<f64>() - 0.5);
                if s.distance_to_nearest(x) < POLE_CUTOFF {
                    continue;
                }
                let v = truncated_transform(&s, Complex64::new(x, 0.0), s.half_width())?;
                return Ok((v.value.re, rejected));
            }
            Err(Error::SamplerQuality {
                rate: 1.0,
                limit: MAX_REJECTION_RATE,
            })
        })
        .collect::<Result<_>>()?;
    let rejections: usize = draws.iter().map(|d| d.1).sum();
    let out = ShiftDistribution {
        distribution: EmpiricalDistribution::new(draws.into_iter().map(|d| d.0).collect())?,
        rejections,
        attempts: count + rejections,
    };
    if out.rejection_rate() > MAX_REJECTION_RATE {
        return Err(Error::SamplerQuality {
            rate: out.rejection_rate(),
            limit: MAX_REJECTION_RATE,
        });
    }
    Ok(out)
}

/// Median and half interquartile range.
pub fn fit_cauchy_quantile(d: &EmpiricalDistribution) -> Result<CauchyParams> {
    if d.len() < 100 {
        return Err(Error::TooFewSamples {
            needed: 100,
            got: d.len(),
        });
    }
    let iqr = d.quantile(0.75) - d.quantile(0.25);
    CauchyParams::new(d.median(), 0.5 * iqr)
}

/// Empirical characteristic function `N^{-1} sum_k e^{i t F_k}`.
pub fn empirical_charfn(d: &EmpiricalDistribution, t: f64) -> Complex64 {
    let n = d.len().max(1) as f64;
    d.samples()
        .iter()
        .map(|&x| Complex64::from_polar(1.0, t * x))
        .sum::<Complex64>()
        / n
}

/// Least-squares fit of `log|phi(t)| = -t Im Gamma` and
/// `arg phi(t) = t Re Gamma` through the origin. Grid points where `|phi|`
/// is below the noise floor `3/sqrt N` are skipped; the phase is unwrapped
/// along the increasing grid.
pub fn fit_cauchy_charfn(d: &EmpiricalDistribution, t_grid: &[f64]) -> Result<CauchyParams> {
    if d.len() < 1000 {
        return Err(Error::TooFewSamples {
            needed: 1000,
            got: d.len(),
        });
    }
    let mut ts: Vec<f64> = t_grid.iter().copied().filter(|t| *t > 0.0).collect();
    ts.sort_by(f64::total_cmp);
    let floor = 3.0 / (d.len() as f64).sqrt();
    let (mut stt, mut sta, mut stp) = (0.0, 0.0, 0.0);
    let mut prev_phase = 0.0;
    let mut used = 0;
    for &t in &ts {
        let phi = empirical_charfn(d, t);
        let phase = unwrap(phi.arg(), prev_phase);
        prev_phase = phase;
        if phi.norm() < floor {
            continue;
        }
        stt += t * t;
        sta += t * phi.norm().ln();
        stp += t * phase;
        used += 1;
    }
    if used == 0 {
        return Err(Error::Fit(
            "characteristic function below the noise floor on the whole grid".into(),
        ));
    }
    CauchyParams::new(stp / stt, (-sta / stt).max(0.0))
}

fn unwrap(phase: f64, previous: f64) -> f64 {
    let k = ((previous - phase) / (2.0 * PI)).round();
    phase + 2.0 * PI * k
}

/// Kolmogorov-Smirnov comparison against a Cauchy law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub ks_statistic: f64,
    pub p_value: f64,
    pub sample_size: usize,
    pub params: CauchyParams,
    pub route: &'static str,
}

/// Asymptotic Kolmogorov tail `P(K > lambda)`, series cut at 100 terms.
pub fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// Sup distance between the empirical CDF and the CDF of `params`.
pub fn ks_statistic(d: &EmpiricalDistribution, params: &CauchyParams) -> f64 {
    let n = d.len() as f64;
    d.samples()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = params.cdf(x);
            ((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

pub fn ks_test_cauchy(d: &EmpiricalDistribution, params: &CauchyParams) -> Result<GofReport> {
    if !(params.im_gamma > 0.0) {
        return domain("KS test needs Im Gamma > 0");
    }
    if d.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let ks = ks_statistic(d, params);
    Ok(GofReport {
        ks_statistic: ks,
        p_value: kolmogorov_tail((d.len() as f64).sqrt() * ks),
        sample_size: d.len(),
        params: *params,
        route: "ks",
    })
}

/// Two-sample Kolmogorov-Smirnov distance `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (x, y) = (a.samples(), b.samples());
    if x.is_empty() || y.is_empty() {
        return 1.0;
    }
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / nx - j as f64 / ny).abs());
    }
    d
}

/// `{mean of 1/(F_k + i)}^{-1} - i`.
pub fn estimate_gamma_inverse(d: &EmpiricalDistribution) -> Result<Complex64> {
    if d.len() < 1000 {
        return Err(Error::TooFewSamples {
            needed: 1000,
            got: d.len(),
        });
    }
    let i = Complex64::i();
    let m = d
        .samples()
        .iter()
        .map(|&x| 1.0 / (x + i))
        .sum::<Complex64>()
        / d.len() as f64;
    if m.norm() < 1e-12 {
        return Err(Error::Numerical("mean of 1/(F + i) vanishes".into()));
    }
    Ok(1.0 / m - i)
}

/// `F(x + i eta)` along an increasing height grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightEstimate {
    pub heights: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Value at the largest height.
    pub estimate: Complex64,
    /// `|F(x + i eta) - F(x' + i eta)|` at the largest height.
    pub x_discrepancy: f64,
}

pub fn estimate_gamma_height<F>(f: F, x: f64, x_alt: f64, heights: &[f64]) -> Result<HeightEstimate>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if heights.is_empty() || heights.windows(2).any(|w| !(w[0] < w[1])) || !(heights[0] > 0.0) {
        return domain("heights must be positive and increasing");
    }
    let values = heights
        .iter()
        .map(|&eta| f(Complex64::new(x, eta)))
        .collect::<Result<Vec<_>>>()?;
    let top = *heights.last().expect("nonempty");
    let estimate = *values.last().expect("nonempty");
    let alt = f(Complex64::new(x_alt, top))?;
    Ok(HeightEstimate {
        heights: heights.to_vec(),
        values,
        estimate,
        x_discrepancy: (estimate - alt).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BooleReport {
    pub level_set_measure: f64,
    pub exact: f64,
    pub relative_error: f64,
}

const BISECTION_TOL: f64 = 1e-13;

/// Lebesgue measure of `{x : sum_j w_j/(u_j - x) > t}` against `mu(R)/t`.
///
/// `F` increases from `0` to `+inf` left of the first atom and from `-inf`
/// to `+inf` between neighbours, so the level set is a union of intervals
/// `(x_k, u_{k+1})` whose left ends are found by bisection.
pub fn boole_verify(mu: &AtomicMeasure, t: f64) -> Result<BooleReport> {
    if mu.is_empty() {
        return domain("Boole's identity needs a nonempty measure");
    }
    if !(t > 0.0) {
        return domain(format!("level t = {t} must be positive"));
    }
    let atoms = mu.atoms();
    let f = |x: f64| atoms.iter().map(|&(u, w)| w / (u - x)).sum::<f64>();
    let total = mu.total_mass();
    let mut measure = 0.0;
    for k in 0..atoms.len() {
        let right = atoms[k].0;
        let left = if k == 0 {
            right - total / t - 1.0
        } else {
            atoms[k - 1].0
        };
        if k == 0 && !(f(left) <= t) {
            return Err(Error::Numerical("left bracket of Boole root failed".into()));
        }
        let (mut lo, mut hi) = (left, right);
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = f(mid);
            if !v.is_finite() {
                return Err(Error::Numerical(format!("F is not finite at {mid}")));
            }
            if v > t {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        measure += right - 0.5 * (lo + hi);
    }
    let exact = total / t;
    Ok(BooleReport {
        level_set_measure: measure,
        exact,
        relative_error: (measure - exact).abs() / exact,
    })
}

/// Monte-Carlo `*`-continuity modulus
/// `kappa(x, delta) = E |1/(F(x + delta) + i) - 1/(F(x) + i)|`.
///
/// `sampler(rng, xs)` draws one realization and returns its boundary values
/// at `xs`. Realizations hitting a pole are skipped and counted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarModulus {
    pub deltas: Vec<f64>,
    pub kappa: Vec<f64>,
    pub realizations: usize,
    pub skipped: usize,
}

pub fn star_modulus<S>(
    sampler: S,
    x: f64,
    deltas: &[f64],
    count: usize,
    seed: u64,
) -> Result<StarModulus>
where
    S: Fn(&mut Stream, &[f64]) -> Result<Vec<f64>> + Sync,
{
    if count < 1000 {
        return Err(Error::TooFewSamples {
            needed: 1000,
            got: count,
        });
    }
    let mut xs = vec![x];
    xs.extend(deltas.iter().map(|d| x + d));
    let i = Complex64::i();
    let rows: Vec<Option<Vec<f64>>> = (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            match sampler(&mut rng, &xs) {
                Ok(v) => {
                    let base = 1.0 / (v[0] + i);
                    Ok(Some(
                        v[1..]
                            .iter()
                            .map(|&y| (1.0 / (y + i) - base).norm())
                            .collect(),
                    ))
                }
                Err(Error::Pole(_)) | Err(Error::PoleProximity { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut sums = vec![0.0; deltas.len()];
    let mut used = 0;
    for r in rows.iter().flatten() {
        used += 1;
        for (s, v) in sums.iter_mut().zip(r) {
            *s += v;
        }
    }
    Ok(StarModulus {
        deltas: deltas.to_vec(),
        kappa: sums.iter().map(|s| s / used.max(1) as f64).collect(),
        realizations: used,
        skipped: count - used,
    })
}

/// Generators with a predicted baricenter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum Generator {
    Periodic,
    QuasiPeriodic {
        alpha: Vec<f64>,
        beta: Vec<f64>,
        theta: Vec<f64>,
    },
    Poisson {
        rho: f64,
    },
    SineKernel,
    Gue {
        e0: f64,
    },
    Diagonal {
        density: EntryDensity,
        e0: f64,
    },
}

/// Predicted `Gamma` for each generator. Stationary processes carry no real
/// part because the Lebesgue reference contributes `i pi rho` and nothing else.
pub fn predicted_gamma(g: &Generator) -> Result<CauchyParams> {
    match g {
        Generator::Periodic | Generator::SineKernel => CauchyParams::new(0.0, PI),
        Generator::Poisson { rho } => CauchyParams::new(0.0, PI * rho),
        Generator::QuasiPeriodic { alpha, beta, theta } => {
            // -alpha cot(beta z + theta) tends to i alpha for beta > 0 and
            // stays at -alpha cot(theta) for beta = 0.
            let (mut re, mut im) = (0.0, 0.0);
            for ((&a, &b), &th) in alpha.iter().zip(beta).zip(theta) {
                if b > 0.0 {
                    im += a;
                } else if a != 0.0 {
                    let s = th.sin();
                    if s == 0.0 {
                        return Err(Error::Pole(th));
                    }
                    re -= a * th.cos() / s;
                }
            }
            CauchyParams::new(re, im)
        }
        Generator::Gue { e0 } => {
            let rho = semicircle_density(*e0)?;
            if !(rho > 0.0) {
                return domain("E0 must lie inside the bulk");
            }
            CauchyParams::new(-e0 / (2.0 * rho), PI)
        }
        Generator::Diagonal { density, e0 } => {
            let rho = density.density(*e0);
            if !(rho > 0.0) {
                return domain("density vanishes at E0");
            }
            let pv = principal_value(|v| density.density(v), density.support(), *e0)?;
            CauchyParams::new(pv / rho, PI)
        }
    }
}

/// `PV int rho(v)/(v - e0) dv` over `support`: symmetric exclusion of
/// `(e0 - h, e0 + h)` followed by Richardson extrapolation in `h`. The
/// exclusion error of a smooth density has only odd powers of `h`, so three
/// steps remove the `h`, `h^3` and `h^5` terms.
pub fn principal_value(rho: impl Fn(f64) -> f64, support: (f64, f64), e0: f64) -> Result<f64> {
    let (lo, hi) = support;
    if !(lo < e0 && e0 < hi) {
        return domain(format!("E0 = {e0} outside the support ({lo}, {hi})"));
    }
    let gap = (e0 - lo).min(hi - e0);
    let h0 = (0.25 * gap).min(0.05);
    let excluded = |h: f64| {
        let g = |v: f64| rho(v) / (v - e0);
        let (a, _) = adaptive_gk15(g, lo, e0 - h, 1e-15, 50_000);
        let (b, _) = adaptive_gk15(g, e0 + h, hi, 1e-15, 50_000);
        a + b
    };
    let mut table: Vec<f64> = (0..4).map(|k| excluded(h0 / f64::powi(2.0, k))).collect();
    for power in [1, 3, 5] {
        let f = f64::powi(2.0, power);
        table = table
            .windows(2)
            .map(|w| (f * w[1] - w[0]) / (f - 1.0))
            .collect();
    }
    let pv = table[0];
    if !pv.is_finite() {
        return Err(Error::Numerical("principal value is not finite".into()));
    }
    Ok(pv)
}
