//! Quadrature helpers: adaptive Gauss-Kronrod and Gauss-Legendre nodes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let k = kronrod * half;
    let g = gauss * half;
    (k, (k - g).norm())
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

/// Globally adaptive Gauss-Kronrod on `[a, b]`.
///
/// `error_cap(len)` is an a-priori bound on the integral over any
/// subinterval of length `len`; the charged error of a piece is the smaller
/// of the Kronrod estimate and this cap.
pub fn adaptive_gk15_complex(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    max_intervals: usize,
    error_cap: impl Fn(f64) -> f64,
) -> QuadResult {
    let piece = |a: f64, b: f64| {
        let (value, est) = gk15(f, a, b);
        Piece {
            a,
            b,
            value,
            error: est.min(error_cap(b - a)),
        }
    };
    let mut heap = BinaryHeap::new();
    let first = piece(a, b);
    let mut total_err = first.error;
    heap.push(first);
    let mut evaluations = 15;
    while total_err > tol && heap.len() < max_intervals.max(1) {
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = piece(worst.a, mid);
        let right = piece(mid, worst.b);
        evaluations += 30;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let intervals = heap.len();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for p in heap.into_vec() {
        value += p.value;
        error += p.error;
    }
    QuadResult {
        value,
        error,
        evaluations,
        intervals,
    }
}

/// Real-valued convenience wrapper around [`adaptive_gk15_complex`].
pub fn adaptive_gk15(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_intervals: usize,
) -> (f64, f64) {
    let g = |x: f64| Complex64::new(f(x), 0.0);
    let r = adaptive_gk15_complex(&g, a, b, tol, max_intervals, |_| f64::INFINITY);
    (r.value.re, r.error)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on the three-term
/// recurrence; adequate for a few thousand nodes).
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((q - 2.0 / 19.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(801);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * (300.0 * x).cos()).sum();
        assert!((q - 2.0 * 300f64.sin() / 300.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let (v, e) = adaptive_gk15(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10, 10_000);
        let exact = 2.0 * (1.0 / 1e-2) * (1.0f64 / 1e-2).atan();
        assert!((v - exact).abs() < 1e-7, "{v} {exact} {e}");
    }
}
