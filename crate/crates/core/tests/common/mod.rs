//! Reference computations shared by the integration tests. None of them
//! reuse the algorithms they are compared against.
#![allow(dead_code)]

use herglotz::point_process::PointSample;

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`
/// (Sturm sequence of leading principal minors).
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues by bisection on the Sturm count, absolute accuracy `tol`.
pub fn sturm_eigenvalues(d: &[f64], e: &[f64], tol: f64) -> Vec<f64> {
    let n = d.len();
    // Gershgorin interval.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (0..n)
        .map(|k| {
            let (mut a, mut b) = (lo - 1.0, hi + 1.0);
            while b - a > tol {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if sturm_count(d, e, m) > k {
                    b = m;
                } else {
                    a = m;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Dawson function `exp(-x^2) int_0^x exp(t^2) dt` from its Maclaurin series
/// `sum_k (-1)^k 2^k x^{2k+1} / (2k+1)!!`; accurate for `|x| < 2`.
pub fn dawson(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    for k in 1..200 {
        term *= -2.0 * x * x / (2 * k + 1) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `PV int phi(v)/(v - x) dv` for the standard normal density `phi`.
pub fn normal_hilbert(x: f64) -> f64 {
    -(2f64.sqrt()) * dawson(x / 2f64.sqrt())
}

/// Consecutive gaps among points of `s` lying in `[-r, r]`.
pub fn interior_gaps(s: &PointSample, r: f64) -> Vec<f64> {
    let pts: Vec<f64> = s
        .points()
        .iter()
        .copied()
        .filter(|p| p.abs() <= r)
        .collect();
    pts.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Arc distance on the circle.
pub fn arc(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// Flat distance between two-atom measures by exhaustive search over the
/// transport plan on a grid of step `unit`; exact when every mass is a
/// multiple of `unit`, because the optimum sits at a vertex of the plan
/// polytope.
pub fn flat_two_by_two(a: [(f64, f64); 2], b: [(f64, f64); 2], unit: f64) -> f64 {
    let steps = |m: f64| (m / unit).round() as usize;
    let total = a[0].1 + a[1].1 + b[0].1 + b[1].1;
    let mut best = f64::INFINITY;
    for p00 in 0..=steps(a[0].1.min(b[0].1)) {
        for p01 in 0..=steps(a[0].1.min(b[1].1)) {
            if (p00 + p01) as f64 * unit > a[0].1 + 1e-12 {
                continue;
            }
            for p10 in 0..=steps(a[1].1.min(b[0].1)) {
                if (p00 + p10) as f64 * unit > b[0].1 + 1e-12 {
                    continue;
                }
                for p11 in 0..=steps(a[1].1.min(b[1].1)) {
                    if (p10 + p11) as f64 * unit > a[1].1 + 1e-12
                        || (p01 + p11) as f64 * unit > b[1].1 + 1e-12
                    {
                        continue;
                    }
                    let plan = [
                        (p00, arc(a[0].0, b[0].0)),
                        (p01, arc(a[0].0, b[1].0)),
                        (p10, arc(a[1].0, b[0].0)),
                        (p11, arc(a[1].0, b[1].0)),
                    ];
                    let moved: f64 = plan.iter().map(|p| p.0 as f64 * unit).sum();
                    let cost: f64 = plan.iter().map(|p| p.0 as f64 * unit * p.1).sum();
                    best = best.min(cost + (total - 2.0 * moved));
                }
            }
        }
    }
    best
}
