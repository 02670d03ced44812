//! Stationary point processes on a window `[-W, W]`: Poisson and the
//! sine-kernel determinantal process, with counting-function diagnostics.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad::gauss_legendre;
use crate::rng::{substream, Stream};

/// A realized point configuration in `[-W, W]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    #[serde(rename = "points")]
    points: Vec<f64>,
    #[serde(rename = "W")]
    half_width: f64,
    #[serde(rename = "rho")]
    reference_intensity: f64,
    seed: Option<u64>,
}

impl PointSample {
    pub fn new(
        mut points: Vec<f64>,
        half_width: f64,
        reference_intensity: f64,
        seed: Option<u64>,
    ) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return domain(format!("window half-width {half_width} must be positive"));
        }
        if !(reference_intensity >= 0.0) || !reference_intensity.is_finite() {
            return domain("reference intensity must be finite and >= 0");
        }
        if let Some(p) = points.iter().find(|p| !(p.abs() <= half_width)) {
            return domain(format!(
                "point {p} lies outside [-{half_width}, {half_width}]"
            ));
        }
        points.sort_by(f64::total_cmp);
        Ok(Self {
            points,
            half_width,
            reference_intensity,
            seed,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn reference_intensity(&self) -> f64 {
        self.reference_intensity
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Distance from `x` to the closest point.
    pub fn distance_to_nearest(&self, x: f64) -> f64 {
        let idx = self.points.partition_point(|&p| p < x);
        let mut best = f64::INFINITY;
        if idx < self.points.len() {
            best = best.min(self.points[idx] - x);
        }
        if idx > 0 {
            best = best.min(x - self.points[idx - 1]);
        }
        best
    }

    /// Number of points in `(a, b]`.
    pub fn count_in(&self, a: f64, b: f64) -> usize {
        if b <= a {
            return 0;
        }
        self.points.partition_point(|&p| p <= b) - self.points.partition_point(|&p| p <= a)
    }

    /// Signed counting function: `#(0, x]` for `x >= 0`, `-#(x, 0]` for `x < 0`.
    pub fn counting(&self, x: f64) -> Result<i64> {
        if !(x.abs() <= self.half_width) {
            return domain(format!("x = {x} outside [-{0}, {0}]", self.half_width));
        }
        Ok(if x >= 0.0 {
            self.count_in(0.0, x) as i64
        } else {
            -(self.count_in(x, 0.0) as i64)
        })
    }

    /// `N(x) - rho_ref x`.
    pub fn delta_n(&self, x: f64) -> Result<f64> {
        Ok(self.counting(x)? as f64 - self.reference_intensity * x)
    }

    /// One JSON line `{seed, W, rho, points}`.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("sample serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let raw: PointSample = serde_json::from_str(line)
            .map_err(|e| Error::Domain(format!("bad sample line: {e}")))?;
        Self::new(
            raw.points,
            raw.half_width,
            raw.reference_intensity,
            raw.seed,
        )
    }

    /// CSV rows `x,N,deltaN` on the given abscissae.
    pub fn counting_csv(&self, xs: &[f64]) -> Result<String> {
        let mut out = String::from("x,N,delta_N\n");
        for &x in xs {
            let n = self.counting(x)?;
            let d = self.delta_n(x)?;
            writeln!(out, "{x},{n},{d}").expect("write to string");
        }
        Ok(out)
    }

    /// Translates every point by `-a` and shrinks the window to `W - |a|`,
    /// dropping points that leave it.
    pub fn shifted(&self, a: f64) -> Result<Self> {
        let w = self.half_width - a.abs();
        if !(w > 0.0) {
            return domain(format!("shift {a} exhausts the window {}", self.half_width));
        }
        let points = self
            .points
            .iter()
            .map(|&p| p - a)
            .filter(|p| p.abs() <= w)
            .collect();
        Self::new(points, w, self.reference_intensity, self.seed)
    }
}

/// Homogeneous Poisson process of intensity `rho` on `[-W, W]`.
pub fn sample_poisson(half_width: f64, rho: f64, rng: &mut Stream) -> Result<PointSample> {
    if !(half_width > 0.0) || !(rho > 0.0) {
        return domain("Poisson sampler needs W > 0 and rho > 0");
    }
    let mean = 2.0 * half_width * rho;
    let count = Poisson::new(mean)
        .map_err(|e| Error::Domain(format!("Poisson mean {mean}: {e}")))?
        .sample(rng) as usize;
    let points = (0..count)
        .map(|_| rng.random_range(-half_width..=half_width))
        .collect();
    PointSample::new(points, half_width, rho, None)
}

/// Largest grid spacing accepted by the sine-kernel sampler.
pub const MAX_GRID_SPACING: f64 = 0.1;
/// Memory guard on `W / h`.
pub const MAX_HALF_CELLS: f64 = 4e4;
/// Eigenvalue mass that may be lost to clipping before sampling is refused.
pub const MAX_CLIPPED_MASS: f64 = 1e-3;
const KEEP_EIGENVALUE: f64 = 1e-12;

/// Spectral data of the discretized sine kernel `h sin(pi(x_i - x_j))/(pi(x_i - x_j))`
/// on the cell centres of `[-W, W]`.
///
/// The kernel factors as `B B^T` through the band-limited representation
/// `sinc(d) = 2 int_0^{1/2} cos(2 pi xi d) d xi`, discretized by Gauss-Legendre
/// in `xi` with enough nodes to be exact to rounding. The even and odd parts of
/// `B^T B` have closed-form Dirichlet sums, so only two small symmetric
/// eigenproblems are solved.
#[derive(Debug)]
pub struct SineKernelBasis {
    pub half_width: f64,
    /// Effective spacing `2W / cells` (at most the requested spacing).
    pub spacing: f64,
    pub cells: usize,
    /// Kept eigenvalues clipped to `[0, 1]`.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalue mass removed by clipping or dropping.
    pub clipped_mass: f64,
    /// Eigenvectors on the grid, row-major `cells x eigenvalues.len()`.
    vectors: Vec<f64>,
}

impl SineKernelBasis {
    pub fn build(half_width: f64, spacing: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(spacing > 0.0) {
            return domain("sine-kernel grid needs W > 0 and h > 0");
        }
        if spacing > MAX_GRID_SPACING {
            return Err(Error::Accuracy {
                what: format!("grid spacing above {MAX_GRID_SPACING}"),
                achieved: spacing,
            });
        }
        if half_width / spacing > MAX_HALF_CELLS {
            return domain(format!(
                "W/h = {} exceeds the memory guard {MAX_HALF_CELLS}",
                half_width / spacing
            ));
        }
        let cells = (2.0 * half_width / spacing).ceil() as usize;
        let h = 2.0 * half_width / cells as f64;
        let centres: Vec<f64> = (0..cells)
            .map(|i| -half_width + (i as f64 + 0.5) * h)
            .collect();

        // Gauss-Legendre on xi in [0, 1/2]; frequencies up to pi W in the
        // reference variable.
        let omega = std::f64::consts::PI * half_width;
        let m = (0.5 * omega + 6.0 * omega.cbrt() + 10.0).ceil() as usize;
        let (t, wt) = gauss_legendre(m);
        let xi: Vec<f64> = t.iter().map(|t| 0.25 * (t + 1.0)).collect();
        let scale: Vec<f64> = wt.iter().map(|w| (2.0 * h * 0.25 * w).sqrt()).collect();

        let dirichlet = |c: f64| -> f64 {
            let s = (0.5 * c * h).sin();
            if s.abs() < 1e-12 {
                cells as f64
            } else {
                (0.5 * c * h * cells as f64).sin() / s
            }
        };
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut gram_even = DMatrix::<f64>::zeros(m, m);
        let mut gram_odd = DMatrix::<f64>::zeros(m, m);
        for p in 0..m {
            for q in 0..=p {
                let dm = dirichlet(two_pi * (xi[p] - xi[q]));
                let dp = dirichlet(two_pi * (xi[p] + xi[q]));
                let s = scale[p] * scale[q];
                let ge = 0.5 * s * (dm + dp);
                let go = 0.5 * s * (dm - dp);
                gram_even[(p, q)] = ge;
                gram_even[(q, p)] = ge;
                gram_odd[(p, q)] = go;
                gram_odd[(q, p)] = go;
            }
        }

        let mut eigenvalues = Vec::new();
        let mut clipped_mass = 0.0;
        let mut blocks: Vec<(DMatrix<f64>, bool)> = Vec::new();
        for (gram, even) in [(gram_even, true), (gram_odd, false)] {
            let eig = SymmetricEigen::new(gram);
            let keep: Vec<usize> = (0..m)
                .filter(|&k| {
                    let lam = eig.eigenvalues[k];
                    if lam > KEEP_EIGENVALUE {
                        true
                    } else {
                        clipped_mass += lam.abs();
                        false
                    }
                })
                .collect();
            // Coefficients v_k * scale / sqrt(lambda_k) for the kept modes.
            let mut coeff = DMatrix::<f64>::zeros(m, keep.len());
            for (col, &k) in keep.iter().enumerate() {
                let lam = eig.eigenvalues[k];
                let clipped = lam.min(1.0);
                clipped_mass += lam - clipped;
                eigenvalues.push(clipped);
                let norm = lam.sqrt();
                for p in 0..m {
                    coeff[(p, col)] = eig.eigenvectors[(p, k)] * scale[p] / norm;
                }
            }
            blocks.push((coeff, even));
        }

        let total = eigenvalues.len();
        let mut vectors = vec![0.0; cells * total];
        let mut offset = 0;
        for (coeff, even) in blocks {
            let kept = coeff.ncols();
            if kept == 0 {
                continue;
            }
            let basis = DMatrix::from_fn(cells, m, |i, p| {
                let arg = two_pi * xi[p] * centres[i];
                if even {
                    arg.cos()
                } else {
                    arg.sin()
                }
            });
            let u = basis * coeff;
            for i in 0..cells {
                let row = &mut vectors[i * total + offset..i * total + offset + kept];
                for (c, slot) in row.iter_mut().enumerate() {
                    *slot = u[(i, c)];
                }
            }
            offset += kept;
        }
        if clipped_mass > MAX_CLIPPED_MASS {
            return Err(Error::Accuracy {
                what: "eigenvalue clipping removed too much mass".into(),
                achieved: clipped_mass,
            });
        }
        Ok(Self {
            half_width,
            spacing: h,
            cells,
            eigenvalues,
            clipped_mass,
            vectors,
        })
    }

    /// Cached basis for `(W, h)`; concurrent first requests build it once.
    pub fn cached(half_width: f64, spacing: f64) -> Result<Arc<Self>> {
        type Cache = Mutex<HashMap<(u64, u64), Arc<OnceLock<Result<Arc<SineKernelBasis>>>>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let slot = {
            let mut map = cache.lock().expect("cache lock");
            map.entry((half_width.to_bits(), spacing.to_bits()))
                .or_default()
                .clone()
        };
        slot.get_or_init(|| Self::build(half_width, spacing).map(Arc::new))
            .clone()
    }

    pub fn centre(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing
    }

    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        let k = self.rank();
        &self.vectors[i * k..(i + 1) * k]
    }

    /// Kernel entry reconstructed from the kept spectrum.
    pub fn kernel_entry(&self, i: usize, j: usize) -> f64 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .zip(&self.eigenvalues)
            .map(|((a, b), l)| a * b * l)
            .sum()
    }

    /// Draws one configuration: keep mode `k` with probability `lambda_k`, then
    /// sample the projection process of the kept modes sequentially.
    ///
    /// The sequential step draws a cell `i` with probability
    /// `|phi_i|^2 / k` and accepts it with probability
    /// `|P phi_i|^2 / |phi_i|^2`, where `P` projects away from the span of the
    /// rows chosen so far (maintained as Householder reflectors). Accepted
    /// draws then follow the running projection diagonal exactly. When few
    /// modes remain, the remaining complement is materialized on the whole
    /// grid and finished by direct sampling.
    pub fn sample(&self, rng: &mut Stream) -> Vec<usize> {
        let selected: Vec<usize> = self
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &lam)| rng.random::<f64>() < lam)
            .map(|(k, _)| k)
            .collect();
        let k = selected.len();
        if k == 0 {
            return Vec::new();
        }
        let gather = |i: usize, out: &mut Vec<f64>| {
            let row = self.row(i);
            out.clear();
            out.extend(selected.iter().map(|&s| row[s]));
        };

        let mut cumulative = Vec::with_capacity(self.cells);
        let mut acc = 0.0;
        let mut phi = Vec::with_capacity(k);
        for i in 0..self.cells {
            gather(i, &mut phi);
            acc += phi.iter().map(|v| v * v).sum::<f64>();
            cumulative.push(acc);
        }
        let total = acc;

        let switch = ((k * k) as f64 / self.cells as f64).ceil().max(4.0) as usize;
        let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut chosen = Vec::with_capacity(k);
        let mut taken = vec![false; self.cells];
        let mut work = Vec::with_capacity(k);
        while k - reflectors.len() > switch {
            let target = rng.random::<f64>() * total;
            let i = cumulative
                .partition_point(|&c| c <= target)
                .min(self.cells - 1);
            let accept_u = rng.random::<f64>();
            if taken[i] {
                continue;
            }
            gather(i, &mut phi);
            let norm2: f64 = phi.iter().map(|v| v * v).sum();
            if norm2 <= 0.0 {
                continue;
            }
            work.clear();
            work.extend_from_slice(&phi);
            apply_reflectors(&reflectors, &mut work);
            let j = reflectors.len();
            let tail2: f64 = work[j..].iter().map(|v| v * v).sum();
            if accept_u * norm2 < tail2 {
                reflectors.push(householder(&work[j..]));
                chosen.push(i);
                taken[i] = true;
            }
        }

        // Orthonormal basis of the remaining complement, expressed on the grid.
        let j = reflectors.len();
        let r = k - j;
        let mut complement = vec![vec![0.0; k]; r];
        for (c, col) in complement.iter_mut().enumerate() {
            col[j + c] = 1.0;
            apply_reflectors_reverse(&reflectors, col);
        }
        let mut y = vec![0.0; self.cells * r];
        for i in 0..self.cells {
            if taken[i] {
                continue;
            }
            gather(i, &mut phi);
            for (c, col) in complement.iter().enumerate() {
                y[i * r + c] = phi.iter().zip(col).map(|(a, b)| a * b).sum();
            }
        }
        chosen.extend(sample_projection_rows(&mut y, self.cells, r, rng));
        chosen.sort_unstable();
        chosen
    }
}

/// Householder vector `v` (unit norm) with `(I - 2 v v^T) x = -sign(x_0) |x| e_0`.
fn householder(x: &[f64]) -> Vec<f64> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut v = x.to_vec();
    let alpha = if x[0] >= 0.0 { norm } else { -norm };
    v[0] += alpha;
    let vn = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if vn > 0.0 {
        v.iter_mut().for_each(|a| *a /= vn);
    }
    v
}

/// Applies `H_{j-1} ... H_0` to `x`; reflector `l` acts on components `l..`.
fn apply_reflectors(reflectors: &[Vec<f64>], x: &mut [f64]) {
    for (l, v) in reflectors.iter().enumerate() {
        reflect(v, &mut x[l..]);
    }
}

/// Applies `H_0 ... H_{j-1}` to `x`.
fn apply_reflectors_reverse(reflectors: &[Vec<f64>], x: &mut [f64]) {
    for (l, v) in reflectors.iter().enumerate().rev() {
        reflect(v, &mut x[l..]);
    }
}

fn reflect(v: &[f64], x: &mut [f64]) {
    let s: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let s2 = 2.0 * s;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= s2 * vi;
    }
}

/// Sequential sampler for the projection process with an orthonormal
/// `rows x r` column basis stored row-major in `y`.
fn sample_projection_rows(y: &mut [f64], rows: usize, r: usize, rng: &mut Stream) -> Vec<usize> {
    let mut out = Vec::with_capacity(r);
    let mut cols = r;
    while cols > 0 {
        let norms: Vec<f64> = (0..rows)
            .map(|i| y[i * r..i * r + cols].iter().map(|v| v * v).sum())
            .collect();
        let total: f64 = norms.iter().sum();
        if !(total > 0.0) {
            break;
        }
        let mut target = rng.random::<f64>() * total;
        let mut pick = rows - 1;
        for (i, &n) in norms.iter().enumerate() {
            if target < n {
                pick = i;
                break;
            }
            target -= n;
        }
        out.push(pick);
        // Reflect so that only column 0 is non-zero at `pick`; the other
        // columns stay orthonormal and vanish there.
        let a: Vec<f64> = y[pick * r..pick * r + cols].to_vec();
        let v = householder(&a);
        for i in 0..rows {
            reflect(&v, &mut y[i * r..i * r + cols]);
        }
        // Column 0 now carries the whole row; move it to the end and shrink.
        for i in 0..rows {
            y[i * r..i * r + cols].rotate_left(1);
        }
        cols -= 1;
    }
    out
}

/// Sine-kernel determinantal process on `[-W, W]` via the discretized kernel
/// with grid spacing `h`; each chosen cell contributes one point placed
/// uniformly inside it.
pub fn sample_sine_kernel(half_width: f64, spacing: f64, rng: &mut Stream) -> Result<PointSample> {
    let basis = SineKernelBasis::cached(half_width, spacing)?;
    sample_sine_kernel_with(&basis, rng)
}

pub fn sample_sine_kernel_with(basis: &SineKernelBasis, rng: &mut Stream) -> Result<PointSample> {
    let cells = basis.sample(rng);
    let h = basis.spacing;
    let w = basis.half_width;
    let points = cells
        .into_iter()
        .map(|i| {
            let p = basis.centre(i) + (rng.random::<f64>() - 0.5) * h;
            p.clamp(-w, w)
        })
        .collect();
    PointSample::new(points, w, 1.0, None)
}

/// Point process used by [`number_variance`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "kebab-case")]
pub enum SamplerSpec {
    Poisson { half_width: f64, rho: f64 },
    SineKernel { half_width: f64, spacing: f64 },
}

impl SamplerSpec {
    pub fn half_width(&self) -> f64 {
        match *self {
            Self::Poisson { half_width, .. } | Self::SineKernel { half_width, .. } => half_width,
        }
    }

    pub fn draw(&self, rng: &mut Stream) -> Result<PointSample> {
        match *self {
            Self::Poisson { half_width, rho } => sample_poisson(half_width, rho, rng),
            Self::SineKernel {
                half_width,
                spacing,
            } => sample_sine_kernel(half_width, spacing, rng),
        }
    }
}

/// Where count intervals start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Origins {
    /// `deltaN(x)` from the origin only.
    Zero,
    /// All intervals `(c, c + x]` inside the window with `c` on a lattice of
    /// the given step, using stationarity.
    Sliding { step: f64 },
}

/// Least-squares line `variance = slope * ln x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberVarianceEstimate {
    pub grid: Vec<f64>,
    pub variances: Vec<f64>,
    pub sample_count: usize,
    /// Count intervals pooled per grid point.
    pub intervals: Vec<usize>,
    pub fit: Option<LogFit>,
}

/// Sample variance of `deltaN(x)` over independent draws, per grid point,
/// plus the least-squares slope against `ln x`.
pub fn number_variance(
    spec: &SamplerSpec,
    grid: &[f64],
    n_samples: usize,
    origins: Origins,
    seed: u64,
) -> Result<NumberVarianceEstimate> {
    if n_samples < 100 {
        return Err(Error::TooFewSamples {
            needed: 100,
            got: n_samples,
        });
    }
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] <= 0.0 {
        return domain("grid must be positive and strictly increasing");
    }
    let w = spec.half_width();
    let max_x = *grid.last().unwrap();
    let reach = match origins {
        Origins::Zero => w,
        Origins::Sliding { step } => {
            if !(step > 0.0) {
                return domain("sliding step must be positive");
            }
            2.0 * w
        }
    };
    if max_x > reach {
        return domain(format!("grid reaches {max_x}, window allows {reach}"));
    }
    // Per-sample sums (s1, s2, count) per grid point, merged in index order.
    let per_sample: Vec<Vec<(f64, f64, usize)>> = (0..n_samples)
        .into_par_iter()
        .map(|s| -> Result<Vec<(f64, f64, usize)>> {
            let mut rng = substream(seed, s as u64);
            let sample = spec.draw(&mut rng)?;
            let rho = sample.reference_intensity();
            Ok(grid
                .iter()
                .map(|&x| match origins {
                    Origins::Zero => {
                        let d = sample.delta_n(x).expect("x inside window");
                        (d, d * d, 1)
                    }
                    Origins::Sliding { step } => {
                        let mut s1 = 0.0;
                        let mut s2 = 0.0;
                        let mut n = 0;
                        let span = 2.0 * w - x;
                        let starts = (span / step).floor() as usize;
                        for c in 0..=starts {
                            let a = -w + c as f64 * step;
                            let d = sample.count_in(a, a + x) as f64 - rho * x;
                            s1 += d;
                            s2 += d * d;
                            n += 1;
                        }
                        (s1, s2, n)
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut variances = Vec::with_capacity(grid.len());
    let mut intervals = Vec::with_capacity(grid.len());
    for g in 0..grid.len() {
        let (mut s1, mut s2, mut n) = (0.0, 0.0, 0usize);
        for row in &per_sample {
            s1 += row[g].0;
            s2 += row[g].1;
            n += row[g].2;
        }
        let nf = n as f64;
        let mean = s1 / nf;
        variances.push(((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0));
        intervals.push(n);
    }
    let fit = log_fit(grid, &variances);
    Ok(NumberVarianceEstimate {
        grid: grid.to_vec(),
        variances,
        sample_count: n_samples,
        intervals,
        fit,
    })
}

/// Ordinary least squares of `y` against `ln x`; `None` with fewer than two
/// distinct abscissae.
pub fn log_fit(x: &[f64], y: &[f64]) -> Option<LogFit> {
    if x.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some(LogFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Logarithmically spaced grid of `n` points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| (lo.ln() + (hi / lo).ln() * k as f64 / (n - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn counting_examples() {
        let empty = PointSample::new(vec![], 10.0, 0.5, None).unwrap();
        assert_eq!(empty.counting(3.0).unwrap(), 0);
        assert_eq!(empty.delta_n(3.0).unwrap(), -1.5);
        assert_eq!(empty.delta_n(-4.0).unwrap(), 2.0);
        let s = PointSample::new(vec![3.0, 1.0, 2.0], 10.0, 0.0, None).unwrap();
        assert_eq!(s.counting(2.5).unwrap(), 2);
        assert_eq!(s.counting(2.0).unwrap(), 2);
        let s = PointSample::new(vec![-1.5], 10.0, 0.0, None).unwrap();
        assert_eq!(s.counting(-2.0).unwrap(), -1);
        assert_eq!(s.counting(-1.5).unwrap(), 0);
        assert!(s.counting(11.0).is_err());
    }

    #[test]
    fn sample_validation() {
        assert!(PointSample::new(vec![2.0], 1.0, 1.0, None).is_err());
        assert!(PointSample::new(vec![], 0.0, 1.0, None).is_err());
        assert!(PointSample::new(vec![], 1.0, -1.0, None).is_err());
    }

    #[test]
    fn json_line_round_trip() {
        let s = PointSample::new(vec![0.1, -0.7, 1.0 / 3.0], 2.0, 1.0, Some(9)).unwrap();
        let line = s.to_json_line();
        assert!(line.contains("\"W\":2.0"));
        assert_eq!(PointSample::from_json_line(&line).unwrap(), s);
        let csv = s.counting_csv(&[-1.0, 0.5]).unwrap();
        assert_eq!(csv, "x,N,delta_N\n-1,-1,0\n0.5,2,1.5\n");
    }

    #[test]
    fn poisson_count_moments() {
        let counts: Vec<f64> = (0..1000)
            .map(|s| {
                let mut rng = substream(11, s);
                sample_poisson(500.0, 1.0, &mut rng).unwrap().len() as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / 1000.0;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / 999.0;
        assert!((mean - 1000.0).abs() < 5.0 * 1000f64.sqrt());
        assert!((var / 1000.0 - 1.0).abs() < 0.15, "var {var}");
    }

    #[test]
    fn seeded_determinism() {
        let a = sample_poisson(50.0, 2.0, &mut substream(3, 1)).unwrap();
        let b = sample_poisson(50.0, 2.0, &mut substream(3, 1)).unwrap();
        assert_eq!(a, b);
        let a = sample_sine_kernel(10.0, 0.1, &mut substream(3, 1)).unwrap();
        let b = sample_sine_kernel(10.0, 0.1, &mut substream(3, 1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn kernel_reconstruction_is_exact() {
        let basis = SineKernelBasis::build(6.0, 0.1).unwrap();
        let h = basis.spacing;
        let mut worst: f64 = 0.0;
        for i in (0..basis.cells).step_by(7) {
            for j in (0..basis.cells).step_by(5) {
                let d = basis.centre(i) - basis.centre(j);
                let exact = if d == 0.0 {
                    h
                } else {
                    h * (std::f64::consts::PI * d).sin() / (std::f64::consts::PI * d)
                };
                worst = worst.max((basis.kernel_entry(i, j) - exact).abs());
            }
        }
        assert!(worst < 1e-10, "worst {worst}");
        let trace: f64 = basis.eigenvalues.iter().sum();
        assert!(
            (trace + basis.clipped_mass - 12.0).abs() < 1e-8,
            "trace {trace}"
        );
    }

    #[test]
    fn grid_guards() {
        assert!(matches!(
            SineKernelBasis::build(10.0, 0.2),
            Err(Error::Accuracy { .. })
        ));
        assert!(SineKernelBasis::build(5e3, 0.1).is_err());
    }

    #[test]
    fn sine_points_distinct_cells() {
        let basis = SineKernelBasis::build(20.0, 0.05).unwrap();
        for s in 0..20 {
            let cells = basis.sample(&mut substream(5, s));
            let mut dedup = cells.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), cells.len());
            assert!(cells.iter().all(|&c| c < basis.cells));
        }
    }

    #[test]
    fn sine_kernel_unit_intensity() {
        let mut total = 0usize;
        let n = 200;
        for s in 0..n {
            total += sample_sine_kernel(15.0, 0.1, &mut substream(8, s))
                .unwrap()
                .count_in(-10.0, 10.0);
        }
        let mean = total as f64 / n as f64;
        // Var of a count over length 20 is about 0.5; 200 draws leave ~0.05 noise.
        assert!((mean - 20.0).abs() < 0.3, "mean {mean}");
    }

    #[test]
    fn projection_sampler_matches_marginals() {
        // Rank-2 projection on 4 rows: inclusion probabilities are the diagonal.
        let s = 0.5f64.sqrt();
        let basis = [[s, 0.0], [s, 0.0], [0.0, 0.6], [0.0, 0.8]];
        let mut hits = [0usize; 4];
        let trials = 20_000;
        let mut rng = stream(1);
        for _ in 0..trials {
            let mut y: Vec<f64> = basis.iter().flatten().copied().collect();
            let picks = sample_projection_rows(&mut y, 4, 2, &mut rng);
            assert_eq!(picks.len(), 2);
            for p in picks {
                hits[p] += 1;
            }
        }
        let expect = [0.5, 0.5, 0.36, 0.64];
        for k in 0..4 {
            let f = hits[k] as f64 / trials as f64;
            assert!((f - expect[k]).abs() < 0.015, "row {k}: {f}");
        }
    }

    #[test]
    fn number_variance_poisson_and_guards() {
        let spec = SamplerSpec::Poisson {
            half_width: 200.0,
            rho: 1.0,
        };
        let est = number_variance(&spec, &[100.0], 400, Origins::Zero, 4).unwrap();
        assert!(est.fit.is_none());
        assert!(
            (est.variances[0] / 100.0 - 1.0).abs() < 0.15,
            "{:?}",
            est.variances
        );
        assert!(number_variance(&spec, &[100.0], 10, Origins::Zero, 4).is_err());
        assert!(number_variance(&spec, &[300.0], 100, Origins::Zero, 4).is_err());
    }

    #[test]
    fn log_fit_recovers_line() {
        let x = log_grid(1.0, 100.0, 5);
        let y: Vec<f64> = x.iter().map(|v| 0.3 * v.ln() + 2.0).collect();
        let f = log_fit(&x, &y).unwrap();
        assert!((f.slope - 0.3).abs() < 1e-12 && (f.intercept - 2.0).abs() < 1e-12);
    }
}
