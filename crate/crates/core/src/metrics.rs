//! Distances between circle measures and checks of the pointwise bounds for
//! disk-represented HP functions. The ground metric on the circle is arc
//! length.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::hp_core::{evaluate_disk, CircleMeasure, DiskHP, MERGE_TOL};

/// Arc-length distance between two angles.
pub fn arc_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Signed differences `sigma_1 - sigma_2` on the merged support.
fn merged_difference(s1: &CircleMeasure, s2: &CircleMeasure) -> Vec<(f64, f64)> {
    let mut all: Vec<(f64, f64)> = s1
        .atoms()
        .iter()
        .copied()
        .chain(s2.atoms().iter().map(|&(t, m)| (t, -m)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(all.len());
    for (t, m) in all {
        match out.last_mut() {
            Some(last) if t - last.0 <= MERGE_TOL => last.1 += m,
            _ => out.push((t, m)),
        }
    }
    if out.len() > 1 {
        let last = *out.last().expect("nonempty");
        if 2.0 * PI - last.0 + out[0].0 <= MERGE_TOL {
            out[0].1 += last.1;
            out.pop();
        }
    }
    out
}

/// Total variation `|sigma_1 - sigma_2|(S)`.
pub fn variational_distance(s1: &CircleMeasure, s2: &CircleMeasure) -> f64 {
    merged_difference(s1, s2).iter().map(|a| a.1.abs()).sum()
}

/// Tolerance on the mass mismatch accepted by [`wasserstein_circle`].
pub const MASS_TOL: f64 = 1e-12;

/// 1-Wasserstein distance for measures of equal mass.
///
/// With `D` the difference of the cumulative distribution functions started
/// at angle zero, the distance is `min_c int |D - c| dtheta`; the minimizer
/// is a weighted median of `D`.
pub fn wasserstein_circle(s1: &CircleMeasure, s2: &CircleMeasure) -> Result<f64> {
    let (m1, m2) = (s1.total_mass(), s2.total_mass());
    if (m1 - m2).abs() > MASS_TOL * m1.max(m2).max(1.0) {
        return domain(format!("masses differ: {m1} vs {m2}"));
    }
    let diff = merged_difference(s1, s2);
    if diff.is_empty() {
        return Ok(0.0);
    }
    // D is constant on [theta_k, theta_{k+1}) and on the wrap-around piece.
    let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(diff.len() + 1);
    let mut cum = 0.0;
    let mut prev = 0.0;
    for &(t, m) in &diff {
        pieces.push((cum, t - prev));
        cum += m;
        prev = t;
    }
    pieces.push((cum, 2.0 * PI - prev));
    pieces.retain(|p| p.1 > 0.0);
    let c = weighted_median(&mut pieces.clone());
    Ok(pieces.iter().map(|&(d, len)| len * (d - c).abs()).sum())
}

fn weighted_median(values: &mut [(f64, f64)]) -> f64 {
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = values.iter().map(|v| v.1).sum();
    let mut acc = 0.0;
    for &(v, w) in values.iter() {
        acc += w;
        if acc >= 0.5 * total {
            return v;
        }
    }
    values.last().map_or(0.0, |v| v.0)
}

/// Largest support size on either side solved exactly by [`flat_distance`].
pub const FLAT_EXACT_MAX_ATOMS: usize = 256;

/// Flat distance
/// `inf |sigma_1 - s_1| + |sigma_2 - s_2| + W(s_1, s_2)` over pairs of equal mass.
///
/// For atomic measures this is a balanced transport problem in which mass
/// may also be deleted at unit cost on either side; it is solved exactly by
/// successive shortest paths. Beyond [`FLAT_EXACT_MAX_ATOMS`] atoms the
/// heavier measure is scaled down to the lighter mass, which gives the upper
/// bound `|mass gap| + W`. The result never exceeds the total variation.
pub fn flat_distance(s1: &CircleMeasure, s2: &CircleMeasure) -> f64 {
    let tv = variational_distance(s1, s2);
    let n1 = s1.atoms().len();
    let n2 = s2.atoms().len();
    if n1 == 0 || n2 == 0 {
        return tv;
    }
    let value = if n1.max(n2) <= FLAT_EXACT_MAX_ATOMS {
        flat_exact(s1, s2)
    } else {
        flat_scaled(s1, s2)
    };
    value.min(tv)
}

fn flat_scaled(s1: &CircleMeasure, s2: &CircleMeasure) -> f64 {
    let (m1, m2) = (s1.total_mass(), s2.total_mass());
    let (heavy, light, mh, ml) = if m1 >= m2 {
        (s1, s2, m1, m2)
    } else {
        (s2, s1, m2, m1)
    };
    let scaled = CircleMeasure::new(heavy.atoms().iter().map(|&(t, m)| (t, m * ml / mh)))
        .expect("scaled masses stay positive");
    (mh - ml) + wasserstein_circle(&scaled, light).unwrap_or(f64::INFINITY)
}

/// Transport from `s1` plus a deletion node to `s2` plus a deletion node.
fn flat_exact(s1: &CircleMeasure, s2: &CircleMeasure) -> f64 {
    let a = s1.atoms();
    let b = s2.atoms();
    let (n1, n2) = (a.len(), b.len());
    // Nodes: source, left 0..=n1 (n1 is deletion), right 0..=n2, sink.
    let source = 0;
    let left = |i: usize| 1 + i;
    let right = |j: usize| 2 + n1 + j;
    let sink = 3 + n1 + n2;
    let mut g = FlowGraph::new(sink + 1);
    for (i, &(_, m)) in a.iter().enumerate() {
        g.add_edge(source, left(i), m, 0.0);
        g.add_edge(left(i), right(n2), f64::INFINITY, 1.0);
    }
    g.add_edge(source, left(n1), s2.total_mass(), 0.0);
    for (j, &(_, m)) in b.iter().enumerate() {
        g.add_edge(right(j), sink, m, 0.0);
        g.add_edge(left(n1), right(j), f64::INFINITY, 1.0);
    }
    g.add_edge(right(n2), sink, s1.total_mass(), 0.0);
    g.add_edge(left(n1), right(n2), f64::INFINITY, 0.0);
    for (i, &(ta, _)) in a.iter().enumerate() {
        for (j, &(tb, _)) in b.iter().enumerate() {
            g.add_edge(left(i), right(j), f64::INFINITY, arc_distance(ta, tb));
        }
    }
    g.min_cost_max_flow(source, sink)
}

struct Edge {
    to: usize,
    cap: f64,
    cost: f64,
}

struct FlowGraph {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
}

impl FlowGraph {
    fn new(n: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: f64, cost: f64) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap, cost });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge {
            to: from,
            cap: 0.0,
            cost: -cost,
        });
    }

    /// Successive shortest paths with Bellman-Ford; returns the total cost.
    fn min_cost_max_flow(&mut self, s: usize, t: usize) -> f64 {
        const EPS: f64 = 1e-15;
        let n = self.adj.len();
        let mut total = 0.0;
        loop {
            let mut dist = vec![f64::INFINITY; n];
            let mut via = vec![usize::MAX; n];
            dist[s] = 0.0;
            for _ in 0..n {
                let mut changed = false;
                for u in 0..n {
                    if dist[u].is_infinite() {
                        continue;
                    }
                    for &e in &self.adj[u] {
                        let edge = &self.edges[e];
                        if edge.cap > EPS && dist[u] + edge.cost < dist[edge.to] - 1e-14 {
                            dist[edge.to] = dist[u] + edge.cost;
                            via[edge.to] = e;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            if dist[t].is_infinite() {
                return total;
            }
            let mut push = f64::INFINITY;
            let mut v = t;
            while v != s {
                let e = via[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                v = self.edges[e ^ 1].to;
            }
            total += push * dist[t];
        }
    }
}

/// Both sides of the pointwise bound for `|G_1(w) - G_2(w)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `|G_1(w) - G_2(w)| <= |Re dG(0)| + |Im dG(0)| 2/(1-|w|)
///   + (sigma_1(S) + sigma_2(S))/2 W(normalized) 2|w|/(1-|w|)^2`.
/// The transport term is dropped when either measure has zero mass.
pub fn gbound_check(g1: &DiskHP, g2: &DiskHP, w: Complex64) -> Result<GBound> {
    let r = w.norm();
    if !(r < 1.0) {
        return domain(format!("|w| = {r} is not below 1"));
    }
    let lhs = (evaluate_disk(g1, w)? - evaluate_disk(g2, w)?).norm();
    let d0 = g1.g0() - g2.g0();
    let mut rhs = d0.re.abs() + d0.im.abs() * 2.0 / (1.0 - r);
    if let (Some(n1), Some(n2)) = (g1.sigma.normalized(), g2.sigma.normalized()) {
        let mean_mass = 0.5 * (g1.sigma.total_mass() + g2.sigma.total_mass());
        let wd = wasserstein_circle(&n1, &n2)?;
        rhs += mean_mass * wd * 2.0 * r / ((1.0 - r) * (1.0 - r));
    }
    Ok(GBound {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    })
}

/// Number of trigonometric test functions used for weak convergence.
pub const TEST_FUNCTIONS: usize = 16;

/// `cos(k theta)` for `k = 0..8` and `sin(k theta)` for `k = 1..=8`.
pub fn test_function(index: usize, theta: f64) -> f64 {
    if index < 8 {
        (index as f64 * theta).cos()
    } else {
        ((index - 7) as f64 * theta).sin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    /// `|G_n(0) - G(0)|`.
    pub single_site: f64,
    /// Largest `|sigma_n(g) - sigma(g)|` over the test functions.
    pub weak: f64,
    /// Largest `|G_n(w) - G(w)|` over the probes.
    pub pointwise: f64,
    /// `|sigma_n({0}) - sigma({0})|`.
    pub zero_mass_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Single-site and weak gaps shrink while the pointwise gap does not.
    pub inconsistent: bool,
    /// Weak gap shrinks while the mass at angle zero does not converge.
    pub zero_mass_discontinuity: bool,
}

fn shrinks(first: f64, last: f64) -> bool {
    last <= 1e-12 || last < 0.5 * first
}

/// Tabulates the conditions of the convergence criterion along a sequence.
/// A quantity counts as shrinking when its last value is below half its
/// first value (or essentially zero).
pub fn convergence_diagnostic(
    sequence: &[DiskHP],
    target: &DiskHP,
    probes: &[Complex64],
) -> Result<ConvergenceReport> {
    if probes.iter().any(|w| w.norm() > 0.9) {
        return domain("probe points must satisfy |w| <= 0.9");
    }
    let mut probes = probes.to_vec();
    if !probes.iter().any(|w| w.norm() == 0.0) {
        probes.push(Complex64::new(0.0, 0.0));
    }
    let target_values = probes
        .iter()
        .map(|&w| evaluate_disk(target, w))
        .collect::<Result<Vec<_>>>()?;
    let target_moments: Vec<f64> = (0..TEST_FUNCTIONS)
        .map(|k| target.sigma.integrate(|t| test_function(k, t)))
        .collect();
    let mut rows = Vec::with_capacity(sequence.len());
    for g in sequence {
        let weak = (0..TEST_FUNCTIONS)
            .map(|k| (g.sigma.integrate(|t| test_function(k, t)) - target_moments[k]).abs())
            .fold(0.0, f64::max);
        let mut pointwise: f64 = 0.0;
        for (w, tv) in probes.iter().zip(&target_values) {
            pointwise = pointwise.max((evaluate_disk(g, *w)? - tv).norm());
        }
        rows.push(ConvergenceRow {
            single_site: (g.g0() - target.g0()).norm(),
            weak,
            pointwise,
            zero_mass_gap: (g.sigma.mass_at_zero() - target.sigma.mass_at_zero()).abs(),
        });
    }
    let (inconsistent, zero_mass_discontinuity) = match (rows.first(), rows.last()) {
        (Some(f), Some(l)) if rows.len() > 1 => {
            let a = shrinks(f.single_site, l.single_site) && shrinks(f.weak, l.weak);
            (
                a && !shrinks(f.pointwise, l.pointwise),
                shrinks(f.weak, l.weak) && !shrinks(f.zero_mass_gap, l.zero_mass_gap),
            )
        }
        _ => (false, false),
    };
    Ok(ConvergenceReport {
        rows,
        inconsistent,
        zero_mass_discontinuity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(atoms: &[(f64, f64)]) -> CircleMeasure {
        CircleMeasure::new(atoms.iter().copied()).unwrap()
    }

    #[test]
    fn variational_examples() {
        let s = cm(&[(0.3, 1.0), (2.0, 0.5)]);
        assert_eq!(variational_distance(&s, &s), 0.0);
        assert_eq!(
            variational_distance(&cm(&[(0.1, 1.0)]), &cm(&[(1.1, 1.0)])),
            2.0
        );
        assert_eq!(
            variational_distance(&cm(&[(1.0, 1.0)]), &cm(&[(1.0, 3.0)])),
            2.0
        );
    }

    #[test]
    fn wasserstein_examples() {
        let a = cm(&[(1.0, 1.0)]);
        assert_eq!(wasserstein_circle(&a, &a).unwrap(), 0.0);
        let b = cm(&[(1.3, 1.0)]);
        assert!((wasserstein_circle(&a, &b).unwrap() - 0.3).abs() < 1e-12);
        let c = cm(&[(1.0 + PI, 1.0)]);
        assert!((wasserstein_circle(&a, &c).unwrap() - PI).abs() < 1e-12);
        // Across angle zero the short way round is used.
        let d = cm(&[(0.1, 1.0)]);
        let e = cm(&[(2.0 * PI - 0.1, 1.0)]);
        assert!((wasserstein_circle(&d, &e).unwrap() - 0.2).abs() < 1e-12);
        assert!(wasserstein_circle(&a, &cm(&[(1.0, 2.0)])).is_err());
    }

    #[test]
    fn wasserstein_scales_with_mass() {
        let a = cm(&[(1.0, 2.0), (3.0, 1.0)]);
        let b = cm(&[(1.5, 2.0), (3.0, 1.0)]);
        assert!((wasserstein_circle(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_examples() {
        let a = cm(&[(1.0, 1.0), (2.5, 0.7)]);
        assert_eq!(flat_distance(&a, &a), 0.0);
        let b = cm(&[(1.0, 1.0), (2.5, 0.7), (4.0, 0.3)]);
        assert!(flat_distance(&a, &b) <= 0.3 + 1e-12);
        let far = cm(&[(1.0 + PI, 1.0)]);
        let near = cm(&[(1.2, 1.0)]);
        let one = cm(&[(1.0, 1.0)]);
        assert!((flat_distance(&one, &near) - 0.2).abs() < 1e-12);
        assert!((flat_distance(&one, &far) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gbound_examples() {
        let s = cm(&[(0.5, 1.0), (3.0, 2.0)]);
        let g1 = DiskHP::new(s.clone(), 0.0);
        let r = gbound_check(&g1, &g1, Complex64::new(0.3, 0.2)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (0.0, 0.0, true));
        let g2 = DiskHP::new(s, 1.0);
        let r = gbound_check(&g1, &g2, Complex64::new(0.3, 0.2)).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12 && r.holds);
    }

    #[test]
    fn convergence_constant_sequence() {
        let g = DiskHP::new(cm(&[(1.0, 1.0)]), 0.5);
        let rep = convergence_diagnostic(&[g.clone(), g.clone()], &g, &[Complex64::new(0.5, 0.0)])
            .unwrap();
        assert!(rep
            .rows
            .iter()
            .all(|r| r.single_site == 0.0 && r.weak == 0.0 && r.pointwise == 0.0));
        assert!(!rep.inconsistent && !rep.zero_mass_discontinuity);
    }
}
