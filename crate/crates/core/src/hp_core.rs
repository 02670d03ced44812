//! Herglotz-Pick functions in half-plane and disk coordinates.
//!
//! A function in the upper half-plane is carried either by its spectral data
//! `(mu, a, b)`,
//!
//! ```text
//! F(z) = b + a z + sum_j w_j [ 1/(u_j - z) - u_j/(u_j^2 + 1) ],
//! ```
//!
//! or by one of the closed-form families (periodic cotangent, quasi-periodic
//! cotangent sums, truncated Stieltjes transform of a point sample).  The
//! disk picture uses `w = (z - i)/(z + i)` and a finite measure on the circle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{domain, Error, Result};
use crate::point_process::PointSample;
use crate::stieltjes;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Positions closer than this are merged into one atom.
pub const MERGE_TOL: f64 = 1e-12;

/// Finite atomic measure on the real line, sorted by position.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<(f64, f64)>,
    herglotz_norm: f64,
}

impl AtomicMeasure {
    /// Builds the measure, sorting the atoms and merging positions within
    /// [`MERGE_TOL`]. Weights must be finite and strictly positive.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut raw: Vec<(f64, f64)> = atoms.into_iter().collect();
        for &(u, w) in &raw {
            if !u.is_finite() || !w.is_finite() {
                return domain(format!("non-finite atom ({u}, {w})"));
            }
            if w <= 0.0 {
                return domain(format!("atom weight {w} at {u} is not positive"));
            }
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (u, w) in raw {
            match merged.last_mut() {
                Some(last) if (u - last.0).abs() <= MERGE_TOL => last.1 += w,
                _ => merged.push((u, w)),
            }
        }
        let herglotz_norm = norm_of(&merged);
        Ok(Self {
            atoms: merged,
            herglotz_norm,
        })
    }

    pub fn empty() -> Self {
        Self {
            atoms: Vec::new(),
            herglotz_norm: 0.0,
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `sum_j w_j / (u_j^2 + 1)`.
    pub fn herglotz_norm(&self) -> f64 {
        self.herglotz_norm
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.0)
    }

    /// Distance from `x` to the nearest atom (infinite for the empty measure).
    pub fn distance_to_nearest(&self, x: f64) -> f64 {
        nearest_distance(&self.atoms, x)
    }

    /// The shifted measure `(T_u mu)(I) = mu(I + u)`: every atom moves by `-u`.
    pub fn shifted(&self, u: f64) -> Self {
        let atoms: Vec<(f64, f64)> = self.atoms.iter().map(|&(p, w)| (p - u, w)).collect();
        let herglotz_norm = norm_of(&atoms);
        Self {
            atoms,
            herglotz_norm,
        }
    }
}

fn norm_of(atoms: &[(f64, f64)]) -> f64 {
    atoms.iter().map(|&(u, w)| w / (u * u + 1.0)).sum()
}

fn nearest_distance(atoms: &[(f64, f64)], x: f64) -> f64 {
    let idx = atoms.partition_point(|a| a.0 < x);
    let mut best = f64::INFINITY;
    if idx < atoms.len() {
        best = best.min((atoms[idx].0 - x).abs());
    }
    if idx > 0 {
        best = best.min((x - atoms[idx - 1].0).abs());
    }
    best
}

/// An evaluable Herglotz-Pick function.
#[derive(Debug, Clone)]
pub enum HPFunction {
    /// Spectral data `(mu, a, b)` with `a >= 0`.
    Represented { mu: AtomicMeasure, a: f64, b: f64 },
    /// `-pi cot(pi z)`.
    Periodic,
    /// `-sum_j alpha_j cot(beta_j z + theta_j)`.
    QuasiPeriodic {
        alpha: Vec<f64>,
        beta: Vec<f64>,
        theta: Vec<f64>,
    },
    /// Stieltjes transform of a point sample truncated to `[-window, window]`,
    /// with the sample's reference intensity used for the counting correction.
    ProcessTruncated { sample: PointSample, window: f64 },
}

impl HPFunction {
    pub fn represented(mu: AtomicMeasure, a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return domain(format!("linear coefficient a = {a} must be >= 0"));
        }
        if !b.is_finite() {
            return domain("constant b must be finite");
        }
        Ok(Self::Represented { mu, a, b })
    }

    /// The constant real function `b`.
    pub fn constant(b: f64) -> Self {
        Self::Represented {
            mu: AtomicMeasure::empty(),
            a: 0.0,
            b,
        }
    }

    pub fn quasi_periodic(alpha: Vec<f64>, beta: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if alpha.len() != beta.len() || alpha.len() != theta.len() {
            return domain("quasi-periodic parameter vectors differ in length");
        }
        if alpha.iter().any(|&a| !(a >= 0.0)) {
            return domain("quasi-periodic amplitudes must be >= 0");
        }
        // -alpha cot(beta z) maps the upper half-plane into the lower one when beta < 0.
        if beta.iter().any(|&b| !(b >= 0.0)) {
            return domain("quasi-periodic frequencies must be >= 0");
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return domain("quasi-periodic phases must be finite");
        }
        Ok(Self::QuasiPeriodic { alpha, beta, theta })
    }

    pub fn process_truncated(sample: PointSample, window: f64) -> Result<Self> {
        if !(window > 0.0) || window > sample.half_width() {
            return domain(format!(
                "window {window} must lie in (0, {}]",
                sample.half_width()
            ));
        }
        Ok(Self::ProcessTruncated { sample, window })
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Self::Represented { .. } => "represented",
            Self::Periodic => "periodic",
            Self::QuasiPeriodic { .. } => "quasiperiodic",
            Self::ProcessTruncated { .. } => "process_truncated",
        }
    }

    /// Evaluates `F(z)` for `Im z >= 0`. On the real axis `z` must avoid the poles.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im >= 0.0) {
            return domain(format!("Im z = {} is negative", z.im));
        }
        match self {
            Self::Represented { mu, a, b } => {
                if z.im == 0.0 && mu.distance_to_nearest(z.re) == 0.0 {
                    return Err(Error::Pole(z.re));
                }
                let mut acc = Complex64::new(*b, 0.0) + *a * z;
                for &(u, w) in mu.atoms() {
                    acc += w * (1.0 / (u - z) - u / (u * u + 1.0));
                }
                Ok(acc)
            }
            Self::Periodic => {
                if z.im == 0.0 && z.re.fract() == 0.0 {
                    return Err(Error::Pole(z.re));
                }
                let c = cot_upper(PI * z).ok_or(Error::Pole(z.re))?;
                Ok(-PI * c)
            }
            Self::QuasiPeriodic { alpha, beta, theta } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for ((&al, &be), &th) in alpha.iter().zip(beta).zip(theta) {
                    if al == 0.0 {
                        continue;
                    }
                    let c = cot_upper(be * z + th).ok_or(Error::Pole(z.re))?;
                    acc -= al * c;
                }
                Ok(acc)
            }
            Self::ProcessTruncated { sample, window } => {
                stieltjes::corrected_transform(sample, z, *window).map(|r| r.value)
            }
        }
    }

    /// JSON object `{variant, atoms, a, b, params}`.
    pub fn to_json(&self) -> Value {
        match self {
            Self::Represented { mu, a, b } => json!({
                "variant": "represented",
                "atoms": mu.atoms().iter().map(|&(u, w)| vec![u, w]).collect::<Vec<_>>(),
                "a": a,
                "b": b,
                "params": {},
            }),
            Self::Periodic => json!({
                "variant": "periodic", "atoms": [], "a": 0.0, "b": 0.0, "params": {},
            }),
            Self::QuasiPeriodic { alpha, beta, theta } => json!({
                "variant": "quasiperiodic",
                "atoms": [],
                "a": 0.0,
                "b": 0.0,
                "params": { "alpha": alpha, "beta": beta, "theta": theta },
            }),
            Self::ProcessTruncated { sample, window } => json!({
                "variant": "process_truncated",
                "atoms": sample.points().iter().map(|&u| vec![u, 1.0]).collect::<Vec<_>>(),
                "a": 0.0,
                "b": 0.0,
                "params": {
                    "half_width": sample.half_width(),
                    "reference_intensity": sample.reference_intensity(),
                    "window": window,
                    "seed": sample.seed(),
                },
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Domain(format!("malformed HP function JSON: {what}"));
        let variant = v["variant"].as_str().ok_or_else(|| bad("variant"))?;
        let nums = |key: &Value| -> Result<Vec<f64>> {
            key.as_array()
                .ok_or_else(|| bad("array"))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| bad("number")))
                .collect()
        };
        let atoms = || -> Result<Vec<(f64, f64)>> {
            v["atoms"]
                .as_array()
                .ok_or_else(|| bad("atoms"))?
                .iter()
                .map(|pair| {
                    let p = nums(pair)?;
                    if p.len() != 2 {
                        return Err(bad("atom pair"));
                    }
                    Ok((p[0], p[1]))
                })
                .collect()
        };
        match variant {
            "represented" => {
                let a = v["a"].as_f64().ok_or_else(|| bad("a"))?;
                let b = v["b"].as_f64().ok_or_else(|| bad("b"))?;
                Self::represented(AtomicMeasure::new(atoms()?)?, a, b)
            }
            "periodic" => Ok(Self::Periodic),
            "quasiperiodic" => {
                let p = &v["params"];
                Self::quasi_periodic(nums(&p["alpha"])?, nums(&p["beta"])?, nums(&p["theta"])?)
            }
            "process_truncated" => {
                let p = &v["params"];
                let w = p["half_width"].as_f64().ok_or_else(|| bad("half_width"))?;
                let rho = p["reference_intensity"]
                    .as_f64()
                    .ok_or_else(|| bad("reference_intensity"))?;
                let window = p["window"].as_f64().ok_or_else(|| bad("window"))?;
                let seed = p["seed"].as_u64();
                let points = atoms()?.into_iter().map(|a| a.0).collect();
                let sample = PointSample::new(points, w, rho, seed)?;
                Self::process_truncated(sample, window)
            }
            other => Err(bad(other)),
        }
    }
}

/// `cot(w)` for `Im w >= 0` in the stable form `i (q + 1)/(q - 1)`,
/// `q = exp(2 i w)`; `None` at a real pole.
fn cot_upper(w: Complex64) -> Option<Complex64> {
    if w.im < 0.0 {
        return cot_upper(-w).map(|c| -c);
    }
    let q = (2.0 * I * w).exp();
    let den = q - 1.0;
    if den.norm() == 0.0 {
        return None;
    }
    if w.im == 0.0 {
        // Real argument: use the real formula for full relative accuracy.
        let (s, c) = w.re.sin_cos();
        if s == 0.0 {
            return None;
        }
        return Some(Complex64::new(c / s, 0.0));
    }
    Some(I * (q + 1.0) / den)
}

/// `w = (z - i)/(z + i)`.
pub fn mobius_to_disk(z: Complex64) -> Result<Complex64> {
    if !(z.im >= 0.0) {
        return domain(format!("Im z = {} is negative", z.im));
    }
    Ok((z - I) / (z + I))
}

/// `z = i (1 + w)/(1 - w)`.
pub fn mobius_to_halfplane(w: Complex64) -> Result<Complex64> {
    if w == Complex64::new(1.0, 0.0) {
        return Err(Error::PointAtInfinity);
    }
    if w.norm() > 1.0 + 1e-15 {
        return domain(format!("|w| = {} exceeds 1", w.norm()));
    }
    Ok(I * (1.0 + w) / (1.0 - w))
}

/// Finite atomic measure on the unit circle, angles in `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CircleMeasure {
    atoms: Vec<(f64, f64)>,
}

impl CircleMeasure {
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut raw: Vec<(f64, f64)> = Vec::new();
        for (theta, m) in atoms {
            if !theta.is_finite() || !m.is_finite() {
                return domain("non-finite circle atom");
            }
            if m <= 0.0 {
                return domain(format!("circle atom mass {m} is not positive"));
            }
            let mut t = theta.rem_euclid(2.0 * PI);
            if t >= 2.0 * PI {
                t = 0.0;
            }
            raw.push((t, m));
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (t, m) in raw {
            match merged.last_mut() {
                Some(last) if (t - last.0).abs() <= MERGE_TOL => last.1 += m,
                _ => merged.push((t, m)),
            }
        }
        // Wrap-around merge of angles near 0 and near 2 pi.
        if merged.len() > 1 {
            let last = *merged.last().unwrap();
            if 2.0 * PI - last.0 + merged[0].0 <= MERGE_TOL {
                merged[0].1 += last.1;
                merged.pop();
            }
        }
        Ok(Self { atoms: merged })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Mass carried at angle zero (the linear coefficient `a`).
    pub fn mass_at_zero(&self) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.0 <= MERGE_TOL || 2.0 * PI - a.0 <= MERGE_TOL)
            .map(|a| a.1)
            .sum()
    }

    /// `sum_j m_j f(theta_j)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(t, m)| m * f(t)).sum()
    }

    /// Probability measure with the same atoms (`None` for zero mass).
    pub fn normalized(&self) -> Option<Self> {
        let total = self.total_mass();
        if total <= 0.0 {
            return None;
        }
        Some(Self {
            atoms: self.atoms.iter().map(|&(t, m)| (t, m / total)).collect(),
        })
    }
}

/// Disk representation `G(w) = b + sum_j m_j i (e^{i theta_j} + w)/(e^{i theta_j} - w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskHP {
    pub sigma: CircleMeasure,
    pub b: f64,
}

impl DiskHP {
    pub fn new(sigma: CircleMeasure, b: f64) -> Self {
        Self { sigma, b }
    }

    /// `G(0) = b + i sigma(S)`.
    pub fn g0(&self) -> Complex64 {
        Complex64::new(self.b, self.sigma.total_mass())
    }
}

/// Converts spectral data to the disk picture: an atom at `u` moves to the
/// angle with `u = -cot(theta/2)` and mass `w/(u^2 + 1)`; `a` becomes the
/// mass at angle zero.
pub fn to_disk(f: &HPFunction) -> Result<DiskHP> {
    let HPFunction::Represented { mu, a, b } = f else {
        return Err(Error::Variant(format!(
            "disk conversion needs spectral data, got {}",
            f.variant_name()
        )));
    };
    let mut atoms: Vec<(f64, f64)> = mu
        .atoms()
        .iter()
        .map(|&(u, w)| (PI + 2.0 * u.atan(), w / (u * u + 1.0)))
        .collect();
    if *a > 0.0 {
        atoms.push((0.0, *a));
    }
    Ok(DiskHP::new(CircleMeasure::new(atoms)?, *b))
}

/// Evaluates the disk representation for `|w| < 1`.
pub fn evaluate_disk(g: &DiskHP, w: Complex64) -> Result<Complex64> {
    if !(w.norm() < 1.0) {
        return domain(format!("|w| = {} is not below 1", w.norm()));
    }
    let mut acc = Complex64::new(g.b, 0.0);
    for &(theta, m) in g.sigma.atoms() {
        let e = Complex64::from_polar(1.0, theta);
        acc += m * I * (e + w) / (e - w);
    }
    Ok(acc)
}

/// Result of [`poisson_smooth`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedValue {
    /// Quadrature value of the Poisson-smoothed `Psi(F(u + i0))`.
    pub quadrature: Complex64,
    /// `Psi(F(x + i eta))` by direct evaluation.
    pub direct: Complex64,
    /// Error estimate of the quadrature.
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// `Psi(v) = -1/(v + i)`, bounded by one on the closed upper half-plane.
pub fn psi(v: Complex64) -> Complex64 {
    -1.0 / (v + I)
}

/// Poisson-kernel average of `Psi(F(u + i0))` around `x` at height `eta`.
///
/// Substitutes `u = x + eta tan(phi)` so the kernel becomes the uniform
/// density `1/pi` on `(-pi/2, pi/2)`, then runs adaptive Gauss-Kronrod
/// (7/15) with at most `max_intervals` subintervals. At a pole the
/// integrand takes its continuous value `Psi(infinity) = 0`. Because
/// `|Psi| <= 1`, the error charged to a subinterval never exceeds
/// `2 |I| / pi`.
pub fn poisson_smooth(
    f: &HPFunction,
    x: f64,
    eta: f64,
    max_intervals: usize,
    tol: f64,
) -> Result<SmoothedValue> {
    if !(eta > 0.0) {
        return domain(format!("eta = {eta} must be positive"));
    }
    let direct = psi(f.evaluate(Complex64::new(x, eta))?);
    let integrand = |phi: f64| -> Complex64 {
        let u = x + eta * phi.tan();
        match f.evaluate(Complex64::new(u, 0.0)) {
            Ok(v) => psi(Complex64::new(v.re, 0.0)),
            Err(_) => Complex64::new(0.0, 0.0),
        }
    };
    let half = PI / 2.0;
    let q = crate::quad::adaptive_gk15_complex(
        &integrand,
        -half,
        half,
        tol * PI,
        max_intervals,
        |len| 2.0 * len,
    );
    let quadrature = q.value / PI;
    let error_estimate = q.error / PI;
    if error_estimate > tol {
        return Err(Error::Accuracy {
            what: "Poisson smoothing quadrature did not converge".into(),
            achieved: error_estimate,
        });
    }
    Ok(SmoothedValue {
        quadrature,
        direct,
        error_estimate,
        evaluations: q.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn measure_merges_and_sorts() {
        let m = AtomicMeasure::new([(1.0, 1.0), (-1.0, 2.0), (1.0 + 1e-13, 0.5)]).unwrap();
        assert_eq!(m.atoms(), &[(-1.0, 2.0), (1.0, 1.5)]);
        let direct: f64 = m.atoms().iter().map(|&(u, w)| w / (u * u + 1.0)).sum();
        assert!((m.herglotz_norm() - direct).abs() < 1e-15);
        assert!(AtomicMeasure::new([(0.0, 0.0)]).is_err());
        assert!(AtomicMeasure::new([(0.0, -1.0)]).is_err());
    }

    #[test]
    fn delta_at_origin_gives_i_at_i() {
        let f =
            HPFunction::represented(AtomicMeasure::new([(0.0, 1.0)]).unwrap(), 0.0, 0.0).unwrap();
        let v = f.evaluate(I).unwrap();
        assert!((v - I).norm() < 1e-15);
        assert_eq!(f.evaluate(c(0.0, 0.0)), Err(Error::Pole(0.0)));
    }

    #[test]
    fn constant_function() {
        let f = HPFunction::constant(2.5);
        for z in [c(0.0, 1.0), c(-3.0, 0.0), c(7.0, 100.0)] {
            assert_eq!(f.evaluate(z).unwrap(), c(2.5, 0.0));
        }
    }

    #[test]
    fn periodic_at_i_matches_coth_and_pole_sum() {
        let v = HPFunction::Periodic.evaluate(I).unwrap();
        let expected = PI / PI.tanh();
        assert!(v.re.abs() < 1e-15);
        assert!((v.im - expected).abs() < 1e-13);
        assert!((v.im - 3.1533).abs() < 1e-4);
        // symmetric pole sum truncated at n = 10^6
        let z = I;
        let mut s = -1.0 / z;
        for n in (1..=1_000_000).rev() {
            let n = n as f64;
            s -= 1.0 / (z - n) + 1.0 / (z + n);
        }
        assert!((s - v).norm() < 1e-5, "{s} vs {v}");
    }

    #[test]
    fn periodic_pole_sum_at_half_plus_i() {
        let z = c(0.5, 1.0);
        let v = HPFunction::Periodic.evaluate(z).unwrap();
        let mut s = -1.0 / z;
        for n in (1..=100_000).rev() {
            let n = n as f64;
            s -= 1.0 / (z - n) + 1.0 / (z + n);
        }
        assert!((s - v).norm() <= 1e-4);
    }

    #[test]
    fn periodic_poles_on_integers() {
        assert!(HPFunction::Periodic.evaluate(c(3.0, 0.0)).is_err());
        let v = HPFunction::Periodic.evaluate(c(0.25, 0.0)).unwrap();
        assert!((v.re + PI).abs() < 1e-14);
    }

    #[test]
    fn quasi_periodic_rejects_negative_frequency() {
        assert!(HPFunction::quasi_periodic(vec![1.0], vec![-1.0], vec![0.0]).is_err());
        assert!(HPFunction::quasi_periodic(vec![-1.0], vec![1.0], vec![0.0]).is_err());
        let f = HPFunction::quasi_periodic(vec![1.0, 2.0], vec![1.0, 2f64.sqrt()], vec![0.0, 0.0])
            .unwrap();
        let v = f.evaluate(c(0.3, 40.0)).unwrap();
        assert!((v - c(0.0, 3.0)).norm() < 1e-12);
    }

    #[test]
    fn mobius_examples() {
        assert!(mobius_to_disk(I).unwrap().norm() < 1e-15);
        assert!((mobius_to_disk(c(0.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((mobius_to_halfplane(c(0.5, 0.0)).unwrap() - c(0.0, 3.0)).norm() < 1e-15);
        assert_eq!(
            mobius_to_halfplane(c(1.0, 0.0)),
            Err(Error::PointAtInfinity)
        );
        assert!(mobius_to_disk(c(0.0, -1.0)).is_err());
    }

    #[test]
    fn disk_conversion_examples() {
        let f =
            HPFunction::represented(AtomicMeasure::new([(0.0, 1.0)]).unwrap(), 0.0, 0.0).unwrap();
        let g = to_disk(&f).unwrap();
        assert_eq!(g.sigma.atoms().len(), 1);
        assert!((g.sigma.atoms()[0].0 - PI).abs() < 1e-15);
        assert!((g.sigma.atoms()[0].1 - 1.0).abs() < 1e-15);

        let lin = HPFunction::represented(AtomicMeasure::empty(), 1.0, 0.0).unwrap();
        assert_eq!(to_disk(&lin).unwrap().sigma.mass_at_zero(), 1.0);

        let k = to_disk(&HPFunction::constant(7.0)).unwrap();
        assert!(k.sigma.is_empty());
        assert_eq!(k.b, 7.0);
        assert!(to_disk(&HPFunction::Periodic).is_err());
    }

    #[test]
    fn disk_evaluation_examples() {
        let g = DiskHP::new(CircleMeasure::default(), 1.0);
        assert_eq!(evaluate_disk(&g, c(0.3, 0.2)).unwrap(), c(1.0, 0.0));
        let g = DiskHP::new(CircleMeasure::new([(PI, 1.0)]).unwrap(), 0.0);
        assert!((evaluate_disk(&g, c(0.0, 0.0)).unwrap() - I).norm() < 1e-15);
        assert_eq!(g.g0(), c(0.0, 1.0));
        assert!(evaluate_disk(&g, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn disk_round_trip_on_grid() {
        let mu = AtomicMeasure::new([(-2.0, 0.5), (0.3, 1.2), (4.0, 3.0)]).unwrap();
        let f = HPFunction::represented(mu, 0.7, -1.1).unwrap();
        let g = to_disk(&f).unwrap();
        for r in [0.0, 0.3, 0.6, 0.9] {
            for k in 0..12 {
                let w = Complex64::from_polar(r, k as f64 * PI / 6.0);
                let z = mobius_to_halfplane(w).unwrap();
                let lhs = f.evaluate(z).unwrap();
                let rhs = evaluate_disk(&g, w).unwrap();
                assert!((lhs - rhs).norm() < 1e-10, "w={w}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn poisson_smooth_constant() {
        let s = poisson_smooth(&HPFunction::constant(0.0), 0.0, 1.0, 1000, 1e-8).unwrap();
        assert!((s.quadrature - I).norm() < 1e-10);
        assert!((s.direct - I).norm() < 1e-15);
    }

    #[test]
    fn poisson_smooth_delta() {
        let f =
            HPFunction::represented(AtomicMeasure::new([(0.0, 1.0)]).unwrap(), 0.0, 0.0).unwrap();
        let s = poisson_smooth(&f, 0.0, 1.0, 10_000, 1e-6).unwrap();
        assert!((s.quadrature - s.direct).norm() < 1e-4);
    }

    #[test]
    fn poisson_smooth_periodic() {
        let s = poisson_smooth(&HPFunction::Periodic, 0.3, 2.0, 2_000_000, 2e-5).unwrap();
        assert!(
            (s.quadrature - s.direct).norm() < 1e-4,
            "{} vs {} (err {})",
            s.quadrature,
            s.direct,
            s.error_estimate
        );
    }

    #[test]
    fn json_round_trip() {
        let mu = AtomicMeasure::new([(-0.1, 0.3), (2.0 / 3.0, 1e-7)]).unwrap();
        let f = HPFunction::represented(mu, 0.25, 1.0 / 3.0).unwrap();
        let back = HPFunction::from_json(&f.to_json()).unwrap();
        let z = c(0.1, 0.7);
        let (a, b) = (f.evaluate(z).unwrap(), back.evaluate(z).unwrap());
        assert!((a - b).norm() <= 1e-15 * a.norm());
        let q = HPFunction::quasi_periodic(vec![1.0], vec![2.0], vec![0.5]).unwrap();
        let q2 = HPFunction::from_json(&q.to_json()).unwrap();
        assert_eq!(q.evaluate(z).unwrap(), q2.evaluate(z).unwrap());
        assert!(HPFunction::from_json(&json!({"variant": "nope"})).is_err());
    }
}
