//! Stieltjes transforms of point samples: the truncated sum, its
//! counting-function form, real-axis boundary values, shifts and the cocycle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hp_core::AtomicMeasure;
use crate::point_process::PointSample;

/// Minimum distance between a real evaluation point and the sample.
pub const POLE_CUTOFF: f64 = 1e-9;
/// Largest imaginary part tolerated in a real boundary value.
pub const REAL_AXIS_TOL: f64 = 1e-8;

/// Parts of the integration-by-parts form of the transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corrections {
    /// `rho log((n - z)/(-n - z))`.
    pub reference: Complex64,
    /// `dN(n)/(n - z) - dN(-n)/(-n - z)`.
    pub boundary: Complex64,
    /// `int_{-n}^{n} dN(x)/(x - z)^2 dx`.
    pub integral: Complex64,
}

impl Corrections {
    pub fn sum(&self) -> Complex64 {
        self.reference + self.boundary + self.integral
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformResult {
    pub value: Complex64,
    pub window: f64,
    pub corrections: Option<Corrections>,
    /// `(|dN(n)| + |dN(-n)|)/n`, a heuristic for the neglected tail.
    pub truncation_error: f64,
}

impl TransformResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("transform result serializes")
    }
}

fn check_args(s: &PointSample, z: Complex64, n: f64) -> Result<()> {
    if !(n > 0.0) || n > s.half_width() {
        return domain(format!("window {n} must lie in (0, {}]", s.half_width()));
    }
    if !(z.im >= 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return domain(format!("z = {z} is not in the closed upper half-plane"));
    }
    if z.im == 0.0 && s.distance_to_nearest(z.re) == 0.0 {
        return Err(Error::Pole(z.re));
    }
    Ok(())
}

fn truncation_estimate(s: &PointSample, n: f64) -> f64 {
    let dn_plus = s.delta_n(n).unwrap_or(0.0);
    let dn_minus = s.delta_n(-n).unwrap_or(0.0);
    (dn_plus.abs() + dn_minus.abs()) / n
}

fn window_points(s: &PointSample, n: f64) -> &[f64] {
    let p = s.points();
    let lo = p.partition_point(|&u| u < -n);
    let hi = p.partition_point(|&u| u <= n);
    &p[lo..hi]
}

/// `sum_{|u_j| <= n} 1/(u_j - z)`.
pub fn truncated_transform(s: &PointSample, z: Complex64, n: f64) -> Result<TransformResult> {
    check_args(s, z, n)?;
    let value = window_points(s, n)
        .iter()
        .map(|&u| 1.0 / (u - z))
        .sum::<Complex64>();
    Ok(TransformResult {
        value,
        window: n,
        corrections: None,
        truncation_error: truncation_estimate(s, n),
    })
}

/// `log(y - z)` as the limit from `Im z > 0`, so that a real `z` is read as
/// `z + i0`.
fn log_below(y: f64, z: Complex64) -> Complex64 {
    Complex64::new(y - z.re, -z.im).ln()
}

/// The transform written as reference part, boundary terms and the integral of
/// the discrepancy `dN = N - rho x` against `(x - z)^{-2}`.
///
/// `dN` is affine between consecutive points, so the integral is summed in
/// closed form segment by segment. The result equals [`truncated_transform`]
/// up to rounding. On the real axis every logarithm is taken as the limit from
/// above.
pub fn corrected_transform(s: &PointSample, z: Complex64, n: f64) -> Result<TransformResult> {
    check_args(s, z, n)?;
    let rho = s.reference_intensity();
    let pts = window_points(s, n);
    let log_ratio = log_below(n, z) - log_below(-n, z);
    let reference = rho * log_ratio;

    // Left limit of N at -n, so an atom sitting exactly at -n is counted.
    let nonpositive = pts.partition_point(|&u| u <= 0.0);
    let mut count = -(nonpositive as f64);
    let dn_left = count + rho * n;

    let inv = |y: f64| 1.0 / (y - z);
    let mut integral = Complex64::new(0.0, 0.0);
    let mut prev = -n;
    for &u in pts {
        integral += (count - rho * z) * (inv(prev) - inv(u));
        count += 1.0;
        prev = u;
    }
    integral += (count - rho * z) * (inv(prev) - inv(n));
    integral -= rho * log_ratio;
    let dn_right = count - rho * n;
    let boundary = dn_right * inv(n) - dn_left * inv(-n);

    let corrections = Corrections {
        reference,
        boundary,
        integral,
    };
    Ok(TransformResult {
        value: corrections.sum(),
        window: n,
        corrections: Some(corrections),
        truncation_error: (dn_right.abs() + dn_left.abs()) / n,
    })
}

/// Like [`corrected_transform`] but with the reference part replaced by its
/// infinite-window limit `i pi rho`, i.e. the region outside `[-n, n]` is
/// assumed to carry exactly the reference intensity. Removes the
/// `rho log((n - x)/(n + x))` drift of off-centre real evaluation points.
pub fn extrapolated_transform(s: &PointSample, z: Complex64, n: f64) -> Result<TransformResult> {
    let mut r = corrected_transform(s, z, n)?;
    let c = r.corrections.as_mut().expect("corrected form has parts");
    c.reference = Complex64::new(0.0, std::f64::consts::PI * s.reference_intensity());
    r.value = c.sum();
    Ok(r)
}

/// Real boundary value `F(x + i0)` from the corrected transform.
pub fn boundary_value(s: &PointSample, x: f64, n: f64) -> Result<f64> {
    let d = s.distance_to_nearest(x);
    if d < POLE_CUTOFF {
        return Err(Error::PoleProximity {
            distance: d,
            cutoff: POLE_CUTOFF,
        });
    }
    if !(x.abs() <= n / 2.0) {
        return domain(format!("|x| = {} exceeds n/2 = {}", x.abs(), n / 2.0));
    }
    let r = corrected_transform(s, Complex64::new(x, 0.0), n)?;
    if r.value.im.abs() >= REAL_AXIS_TOL {
        return Err(Error::Numerical(format!(
            "boundary value has imaginary part {}",
            r.value.im
        )));
    }
    Ok(r.value.re)
}

/// Boundary value of the sample translated by `x`, evaluated at the origin
/// with the symmetric window `n`. By stationarity this samples `F(x + i0)`
/// with a window centred on `x`.
pub fn centred_boundary_value(s: &PointSample, x: f64, n: f64) -> Result<f64> {
    if x.abs() + n > s.half_width() {
        return domain(format!(
            "window {n} around {x} leaves [-{0}, {0}]",
            s.half_width()
        ));
    }
    boundary_value(&s.shifted(x)?, 0.0, n)
}

/// The sample translated by `-a`; the window shrinks to `W - |a|`.
pub fn shift_sample(s: &PointSample, a: f64) -> Result<PointSample> {
    if !(a.abs() <= s.half_width() / 2.0) {
        return domain(format!(
            "shift {a} exceeds half the window {}",
            s.half_width()
        ));
    }
    s.shifted(a)
}

/// `Q(u, mu) = sum_j w_j [1/(x_j - u - i) - 1/(x_j - i)]`.
pub fn cocycle_q(u: f64, mu: &AtomicMeasure) -> Complex64 {
    let i = Complex64::i();
    mu.atoms()
        .iter()
        .map(|&(x, w)| w * (1.0 / (x - u - i) - 1.0 / (x - i)))
        .sum()
}

/// Shift of the pair `(mu, beta = F(i))` by `u`:
/// `(T_u mu, beta + Q(u, mu) + u a)` with `a = Im beta - sum_j w_j/(x_j^2 + 1)`.
pub fn shift_hp(mu: &AtomicMeasure, beta: Complex64, u: f64) -> (AtomicMeasure, Complex64) {
    let a = beta.im - mu.herglotz_norm();
    (mu.shifted(u), beta + cocycle_q(u, mu) + u * a)
}

/// `|F_{T_a mu}^{(n)}(z) - F_mu^{(n)}(z + a)|`, both computed with a window
/// of half-width `n` centred at their own origin.
pub fn shift_covariance_check(s: &PointSample, a: f64, z: Complex64, n: f64) -> Result<f64> {
    if !(z.im > 0.0) {
        return domain("shift covariance needs Im z > 0");
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let shifted = s.shifted(a)?;
    let lhs = corrected_transform(&shifted, z, n)?.value;
    let rhs = corrected_transform(s, z + a, n)?.value;
    Ok((lhs - rhs).norm())
}
