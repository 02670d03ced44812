//! Random-matrix spectra: GUE through the tridiagonal Hermite model, random
//! diagonal matrices, eigensolvers, and microscopic rescaling at a bulk energy.
//!
//! Spectra are normalized so that the GUE bulk fills `[-2, 2]` with the
//! semicircle density `pi^{-1} sqrt(1 - (E/2)^2)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::point_process::PointSample;
use crate::rng::Stream;

/// Spectral normalization recorded with every spectrum.
pub const NORMALIZATION_NOTE: &str = "bulk support [-2, 2]; GUE off-diagonal E|h|^2 = 1/n";

/// Sorted eigenvalues of one matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub n: usize,
    pub ensemble: String,
    pub normalization: String,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<f64>, ensemble: &str) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self {
            n: eigenvalues.len(),
            eigenvalues,
            ensemble: ensemble.to_string(),
            normalization: NORMALIZATION_NOTE.to_string(),
        }
    }

    /// One eigenvalue per row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eigenvalue\n");
        for e in &self.eigenvalues {
            s.push_str(&format!("{e}\n"));
        }
        s
    }

    /// `{n, ensemble, seed, moments: [mean, second moment]}`.
    pub fn summary_json(&self, seed: u64) -> serde_json::Value {
        let n = self.n.max(1) as f64;
        let m1 = self.eigenvalues.iter().sum::<f64>() / n;
        let m2 = self.eigenvalues.iter().map(|e| e * e).sum::<f64>() / n;
        serde_json::json!({
            "n": self.n,
            "ensemble": self.ensemble,
            "seed": seed,
            "normalization": self.normalization,
            "moments": [m1, m2],
        })
    }
}

const QL_MAX_SWEEPS: usize = 50;
const DEFLATION_TOL: f64 = 1e-15;

/// Eigenvalues of the symmetric tridiagonal matrix with the given diagonal
/// and off-diagonal, by implicit QL with Wilkinson shifts.
pub fn tridiag_eigenvalues(diagonal: &[f64], offdiagonal: &[f64]) -> Result<Vec<f64>> {
    let n = diagonal.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if offdiagonal.len() + 1 != n {
        return domain(format!(
            "off-diagonal length {} does not match diagonal length {n}",
            offdiagonal.len()
        ));
    }
    let mut d = diagonal.to_vec();
    let mut e = offdiagonal.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= DEFLATION_TOL * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_SWEEPS {
                return Err(Error::Numerical(format!(
                    "QL iteration did not converge for eigenvalue {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// GUE spectrum of size `n` from the beta = 2 Hermite tridiagonal model:
/// diagonal `N(0, 1)`, off-diagonal `chi_{2(n-k)} / sqrt 2`, all divided by
/// `sqrt n`. The chi variables come from gamma draws,
/// `chi_{2a} / sqrt 2 = sqrt(Gamma(a, 1))`.
pub fn sample_gue_spectrum(n: usize, rng: &mut Stream) -> Result<Spectrum> {
    let (d, e) = gue_tridiagonal(n, rng)?;
    Ok(Spectrum::new(tridiag_eigenvalues(&d, &e)?, "gue"))
}

pub(crate) fn gue_tridiagonal(n: usize, rng: &mut Stream) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return domain("GUE sampling needs n >= 2");
    }
    let scale = 1.0 / (n as f64).sqrt();
    let d: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * scale)
        .collect();
    let e: Vec<f64> = (1..n)
        .map(|k| {
            let shape = (n - k) as f64;
            let g: f64 = Gamma::new(shape, 1.0)
                .expect("positive gamma shape")
                .sample(rng);
            g.sqrt() * scale
        })
        .collect();
    Ok((d, e))
}

/// Dense GUE matrix with the same normalization as [`sample_gue_spectrum`]:
/// diagonal `N(0, 1)/sqrt n`, off-diagonal `(x + i y)/sqrt(2n)`.
pub fn sample_gue_dense(n: usize, rng: &mut Stream) -> DMatrix<Complex64> {
    let scale = 1.0 / (n as f64).sqrt();
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(rng.sample::<f64, _>(StandardNormal) * scale, 0.0);
        for j in i + 1..n {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            let v = Complex64::new(x, y) * (scale / 2f64.sqrt());
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
    }
    h
}

pub const DENSE_MAX_N: usize = 256;

/// Eigenvalues of a dense Hermitian matrix by cyclic Jacobi on the real
/// symmetric embedding `[[A, -B], [B, A]]` of `H = A + iB`.
pub fn dense_hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    Ok(dense_hermitian_eigenpairs(h, false)?.0)
}

/// Eigenvalues and (optionally) eigenvectors; vectors are columns of the
/// returned matrix, paired with the sorted eigenvalues.
pub fn dense_hermitian_eigenpairs(
    h: &DMatrix<Complex64>,
    with_vectors: bool,
) -> Result<(Vec<f64>, Option<DMatrix<Complex64>>)> {
    let n = h.nrows();
    if h.ncols() != n {
        return domain("matrix is not square");
    }
    if n > DENSE_MAX_N {
        return domain(format!("dense solver limited to n <= {DENSE_MAX_N}"));
    }
    let norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for i in 0..n {
        for j in 0..=i {
            if (h[(i, j)] - h[(j, i)].conj()).norm() > 1e-12 * norm.max(1.0) {
                return domain(format!("matrix is not Hermitian at ({i}, {j})"));
            }
        }
    }
    let m = 2 * n;
    let mut a = DMatrix::<f64>::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            a[(i, j)] = z.re;
            a[(i + n, j + n)] = z.re;
            a[(i, j + n)] = -z.im;
            a[(i + n, j)] = z.im;
        }
    }
    let (vals, vecs) = jacobi_symmetric(a, with_vectors)?;
    // Each eigenvalue appears twice, with vectors (x, y) and (-y, x) for
    // the complex eigenvector x + i y.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&p, &q| vals[p].total_cmp(&vals[q]));
    let eig: Vec<f64> = order.iter().step_by(2).map(|&k| vals[k]).collect();
    let vectors = vecs.map(|v| {
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for (col, &k) in order.iter().step_by(2).enumerate() {
            let mut norm2 = 0.0;
            for i in 0..n {
                let z = Complex64::new(v[(i, k)], v[(i + n, k)]);
                out[(i, col)] = z;
                norm2 += z.norm_sqr();
            }
            let s = 1.0 / norm2.sqrt();
            for i in 0..n {
                out[(i, col)] *= s;
            }
        }
        out
    });
    Ok((eig, vectors))
}

fn jacobi_symmetric(
    mut a: DMatrix<f64>,
    with_vectors: bool,
) -> Result<(Vec<f64>, Option<DMatrix<f64>>)> {
    let m = a.nrows();
    let mut v = with_vectors.then(|| DMatrix::<f64>::identity(m, m));
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return Ok((vec![0.0; m], v));
    }
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..m {
            for q in p + 1..m {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            let vals = (0..m).map(|i| a[(i, i)]).collect();
            return Ok((vals, v));
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                if let Some(v) = v.as_mut() {
                    for k in 0..m {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    Err(Error::Numerical("Jacobi sweeps did not converge".into()))
}

/// Semicircle density `pi^{-1} sqrt(1 - (E/2)^2)` on `[-2, 2]`.
pub fn semicircle_density(e: f64) -> Result<f64> {
    if !(e.abs() <= 2.0) {
        return domain(format!("E = {e} outside [-2, 2]"));
    }
    Ok((1.0 - 0.25 * e * e).max(0.0).sqrt() / PI)
}

/// Largest `|E0|` accepted for microscopic experiments.
pub const BULK_LIMIT: f64 = 1.8;

/// Rescales a spectrum around `e0`: points `n rho (E_j - e0)` for every
/// eigenvalue, unit reference intensity. The sample window is
/// `n rho (2 - |e0|)`, widened if needed so every rescaled eigenvalue fits.
pub fn microscopic_rescale(spec: &Spectrum, e0: f64, density: f64) -> Result<PointSample> {
    if !(density > 0.0) {
        return domain("density at E0 must be positive");
    }
    if !(e0.abs() < 2.0) {
        return domain(format!("E0 = {e0} is not inside the bulk"));
    }
    let factor = spec.n as f64 * density;
    let points: Vec<f64> = spec.eigenvalues.iter().map(|e| factor * (e - e0)).collect();
    let extent = points.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let window = (factor * (2.0 - e0.abs())).max(extent);
    PointSample::new(points, window.max(f64::MIN_POSITIVE), 1.0, None)
}

/// Density from which diagonal entries are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum EntryDensity {
    StandardNormal,
    /// Uniform on `[lo, hi]`.
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Semicircle on `[-2, 2]`.
    Semicircle,
}

impl EntryDensity {
    pub fn density(&self, v: f64) -> f64 {
        match *self {
            Self::StandardNormal => (-0.5 * v * v).exp() / (2.0 * PI).sqrt(),
            Self::Uniform { lo, hi } => {
                if (lo..=hi).contains(&v) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Self::Semicircle => semicircle_density(v).unwrap_or(0.0),
        }
    }

    pub fn draw(&self, rng: &mut Stream) -> f64 {
        match *self {
            Self::StandardNormal => rng.sample(StandardNormal),
            Self::Uniform { lo, hi } => rng.random_range(lo..hi),
            Self::Semicircle => loop {
                // Rejection from the uniform box [-2, 2] x [0, 1/pi].
                let v = rng.random_range(-2.0..2.0);
                let y = rng.random::<f64>() / PI;
                if y <= semicircle_density(v).unwrap_or(0.0) {
                    break v;
                }
            },
        }
    }

    /// Interval outside which the density vanishes (or is negligible).
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::StandardNormal => (-40.0, 40.0),
            Self::Uniform { lo, hi } => (lo, hi),
            Self::Semicircle => (-2.0, 2.0),
        }
    }
}

/// Draws `V_1..V_n` i.i.d. from `density` and returns `n rho(e0) (V_j - e0)`.
pub fn sample_diagonal_rescaled(
    n: usize,
    density: &EntryDensity,
    e0: f64,
    rng: &mut Stream,
) -> Result<PointSample> {
    let rho = density.density(e0);
    if !(rho > 0.0) || n == 0 {
        return domain("need n >= 1 and rho(E0) > 0");
    }
    let factor = n as f64 * rho;
    let points: Vec<f64> = (0..n).map(|_| factor * (density.draw(rng) - e0)).collect();
    let extent = points.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    PointSample::new(points, extent.max(1.0), 1.0, None)
}
