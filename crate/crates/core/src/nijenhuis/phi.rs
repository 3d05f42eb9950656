//! Fixed points of `Φ₂∘Φ₁` on CP² for non-degenerate tensors in dimension 6.
//!
//! `Φ₁(L) = Im N(L, ·)` and `Φ₂(Π) = N(Λ²Π)`. Writing `N(x, y) = C (x̄ × ȳ)`
//! with `C = [c_23 | c_31 | c_12]`, the composition is the projectivization
//! of the linear map `A = C C̄^{-T}`, so fixed lines are eigenlines of `A`.
//! A Newton search on the direct definition runs alongside as a cross-check.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PointTensor;
use crate::clinalg::{cmax, complex_kernel_ref, CMat, CVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    /// `N(Λ²Π) ∩ Π = 0`.
    Transversal,
    /// `N(Λ²Π) ⊂ Π`.
    Incident,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    /// Unit representative of the line, as `[re, im]` pairs.
    pub line: Vec<[f64; 2]>,
    pub eigenvalue: [f64; 2],
    pub kind: FixedPointKind,
    /// Distance from the line's unit vector to Π.
    pub incidence_residual: f64,
    /// Whether the Newton search found this point too.
    pub newton_confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointData {
    pub isolated: Vec<FixedPoint>,
    /// Projective dimensions of positive-dimensional fixed sets.
    pub continua: Vec<usize>,
    pub transversal_count: usize,
    pub incident_count: usize,
    pub newton_points: usize,
    pub low_confidence: bool,
}

impl FixedPointData {
    /// NDG subtype implied by the fixed-point counts, if unambiguous.
    pub fn refined_type(&self) -> Option<u8> {
        if self.continua.contains(&2) {
            return Some(3);
        }
        if !self.continua.is_empty() {
            return None;
        }
        match (self.transversal_count, self.incident_count) {
            (3, 0) => Some(3),
            (1, 2) => Some(1),
            (1, 0) | (1, 1) => Some(2),
            (0, s) if s >= 1 => Some(4),
            _ => None,
        }
    }
}

fn cvec(v: &[C64]) -> CVec {
    CVec::from_column_slice(v)
}

fn normalize(v: &CVec) -> CVec {
    // unit norm, largest entry real positive
    let k = v.iter().enumerate().max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap()).map(|x| x.0).unwrap_or(0);
    let phase = v[k] / v[k].norm();
    v.map(|z| z / phase) / C64::new(v.norm(), 0.0)
}

/// Projective distance `sqrt(1 − |⟨x, y⟩|²)` of unit vectors.
fn proj_dist(x: &CVec, y: &CVec) -> f64 {
    let ip = x.dotc(y).norm() / (x.norm() * y.norm());
    (1.0 - (ip * ip).min(1.0)).max(0.0).sqrt()
}

/// Column matrix C with `N(x,y) = C (x̄ × ȳ)`.
fn cross_matrix(t: &PointTensor) -> CMat {
    let col = |i: usize, j: usize| -> Vec<C64> { (0..3).map(|k| t.get(i, j, k)).collect() };
    let (c23, c31, c12) = (col(1, 2), col(2, 0), col(0, 1));
    CMat::from_fn(3, 3, |r, c| match c {
        0 => c23[r],
        1 => c31[r],
        _ => c12[r],
    })
}

/// Eigenvalues of a 3×3 matrix: diagonal of a complex Schur form, with the characteristic
/// polynomial as fallback.
fn eigenvalues3(a: &CMat) -> Vec<C64> {
    if let Some(s) = a.clone().try_schur(1e-15, 10_000) {
        let (_, t) = s.unpack();
        let ev: Vec<C64> = (0..3).map(|k| t[(k, k)]).collect();
        if ev.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return ev;
        }
    }
    char_poly_roots(a)
}

/// Roots of the characteristic polynomial (Durand–Kerner, then Newton polish).
fn char_poly_roots(a: &CMat) -> Vec<C64> {
    let tr = a.trace();
    let m2 = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)] - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)] - a[(1, 2)] * a[(2, 1)];
    let det = a.determinant();
    let p = |x: C64| ((x - tr) * x + m2) * x - det;
    let dp = |x: C64| (x * 3.0 - tr * 2.0) * x + m2;
    let scale = cmax(a).max(1e-300);
    let mut r = [C64::new(0.4, 0.9) * scale, C64::new(0.4, 0.9).powu(2) * scale, C64::new(0.4, 0.9).powu(3) * scale];
    for _ in 0..500 {
        let old = r;
        for k in 0..3 {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..3 {
                if j != k {
                    den *= r[k] - r[j];
                }
            }
            if den.norm() > 0.0 {
                r[k] -= p(r[k]) / den;
            }
        }
        if (0..3).all(|k| (r[k] - old[k]).norm() <= 1e-15 * scale) {
            break;
        }
    }
    for x in r.iter_mut() {
        for _ in 0..3 {
            let d = dp(*x);
            if d.norm() > 1e-8 * scale * scale {
                *x -= p(*x) / d;
            }
        }
    }
    r.to_vec()
}

/// Eigen-analysis plus Newton cross-check.
pub fn phi_maps(t: &PointTensor) -> FixedPointData {
    assert_eq!(t.n, 3, "fixed-point analysis needs complex dimension 3");
    let c = cross_matrix(t);
    let cbar_inv_t = match c.map(|z| z.conj()).try_inverse() {
        Some(m) => m.transpose(),
        None => {
            return FixedPointData {
                isolated: vec![],
                continua: vec![],
                transversal_count: 0,
                incident_count: 0,
                newton_points: 0,
                low_confidence: true,
            }
        }
    };
    let a = &c * cbar_inv_t;
    let scale = cmax(&a);
    let ev = eigenvalues3(&a);

    // cluster eigenvalues; cluster means are accurate even for repeated roots
    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for l in ev {
        match clusters.iter_mut().find(|cl| cl.iter().any(|m| (m - l).norm() <= 1e-4 * scale)) {
            Some(cl) => cl.push(l),
            None => clusters.push(vec![l]),
        }
    }

    let newton = newton_fixed_points(t, &NewtonConfig::default());
    let mut isolated = Vec::new();
    let mut continua = Vec::new();
    let mut low_confidence = false;
    for cl in &clusters {
        let lambda: C64 = cl.iter().sum::<C64>() / cl.len() as f64;
        let shifted = &a - CMat::identity(3, 3) * lambda;
        let kernel = complex_kernel_ref(&shifted, 1e-6, scale);
        match kernel.len() {
            0 => low_confidence = true,
            1 => {
                let x = normalize(&kernel[0]);
                let (kind, res) = incidence(t, &x);
                let confirmed = newton.iter().any(|y| proj_dist(&x, y) < 1e-6);
                if cl.len() == 1 && !confirmed {
                    low_confidence = true;
                }
                isolated.push(FixedPoint {
                    line: x.iter().map(|z| [z.re, z.im]).collect(),
                    eigenvalue: [lambda.re, lambda.im],
                    kind,
                    incidence_residual: res,
                    newton_confirmed: confirmed,
                });
            }
            k => continua.push(k - 1),
        }
    }
    // every Newton point must be an eigenline
    for y in &newton {
        let ay = &a * y;
        if proj_dist(&ay, y) > 1e-6 {
            low_confidence = true;
        }
    }
    let transversal_count = isolated.iter().filter(|p| p.kind == FixedPointKind::Transversal).count();
    let incident_count = isolated.len() - transversal_count;
    FixedPointData { isolated, continua, transversal_count, incident_count, newton_points: newton.len(), low_confidence }
}

/// Π = Φ₁(⟨x⟩) as an orthonormal complex basis, from the SVD of `N(x, ·)`.
fn phi1(t: &PointTensor, x: &CVec) -> Option<(CVec, CVec)> {
    let m = t.left_matrix(x.as_slice());
    let svd = m.svd(true, false);
    let u = svd.u?;
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|a, b| svd.singular_values[*b].partial_cmp(&svd.singular_values[*a]).unwrap());
    if svd.singular_values[idx[1]] <= 1e-9 * svd.singular_values[idx[0]] {
        return None;
    }
    Some((u.column(idx[0]).into_owned(), u.column(idx[1]).into_owned()))
}

fn incidence(t: &PointTensor, x: &CVec) -> (FixedPointKind, f64) {
    let Some((p, q)) = phi1(t, x) else {
        return (FixedPointKind::Incident, f64::NAN);
    };
    let proj = &p * p.dotc(x) + &q * q.dotc(x);
    let res = (x - proj).norm() / x.norm();
    let kind = if res < 1e-6 { FixedPointKind::Incident } else { FixedPointKind::Transversal };
    (kind, res)
}

/// `Φ₂(Φ₁(⟨x⟩))` from the direct definition.
fn phi21(t: &PointTensor, x: &CVec) -> Option<CVec> {
    let (p, q) = phi1(t, x)?;
    Some(cvec(&t.apply_complex(p.as_slice(), q.as_slice())))
}

#[derive(Clone, Debug)]
pub struct NewtonConfig {
    pub seeds_per_chart: usize,
    pub iterations: usize,
    pub convergence: f64,
    pub dedup: f64,
    pub seed: u64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig { seeds_per_chart: 50, iterations: 40, convergence: 1e-10, dedup: 1e-6, seed: 7 }
    }
}

fn lift(chart: usize, a: C64, b: C64) -> CVec {
    let mut v = vec![C64::new(0.0, 0.0); 3];
    let others: Vec<usize> = (0..3).filter(|&k| k != chart).collect();
    v[chart] = C64::new(1.0, 0.0);
    v[others[0]] = a;
    v[others[1]] = b;
    cvec(&v)
}

fn chart_residual(t: &PointTensor, chart: usize, a: C64, b: C64) -> Option<[C64; 2]> {
    let f = phi21(t, &lift(chart, a, b))?;
    let lead = f[chart];
    if lead.norm() < 1e-12 * f.norm() {
        return None;
    }
    let others: Vec<usize> = (0..3).filter(|&k| k != chart).collect();
    Some([f[others[0]] / lead - a, f[others[1]] / lead - b])
}

/// Newton search for fixed lines of the direct composition, on the three affine charts.
pub fn newton_fixed_points(t: &PointTensor, cfg: &NewtonConfig) -> Vec<CVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut found: Vec<CVec> = Vec::new();
    let h = 1e-7;
    for chart in 0..3 {
        for _ in 0..cfg.seeds_per_chart {
            let mut a = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let mut b = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let mut converged = false;
            for _ in 0..cfg.iterations {
                let Some(g) = chart_residual(t, chart, a, b) else { break };
                if g[0].norm() + g[1].norm() < cfg.convergence {
                    converged = true;
                    break;
                }
                // holomorphic in (a, b): real-direction differences give complex derivatives
                let (Some(ga_p), Some(ga_m), Some(gb_p), Some(gb_m)) = (
                    chart_residual(t, chart, a + h, b),
                    chart_residual(t, chart, a - h, b),
                    chart_residual(t, chart, a, b + h),
                    chart_residual(t, chart, a, b - h),
                ) else {
                    break;
                };
                let j00 = (ga_p[0] - ga_m[0]) / (2.0 * h);
                let j10 = (ga_p[1] - ga_m[1]) / (2.0 * h);
                let j01 = (gb_p[0] - gb_m[0]) / (2.0 * h);
                let j11 = (gb_p[1] - gb_m[1]) / (2.0 * h);
                let det = j00 * j11 - j01 * j10;
                if det.norm() < 1e-14 {
                    break;
                }
                let da = (j11 * g[0] - j01 * g[1]) / det;
                let db = (j00 * g[1] - j10 * g[0]) / det;
                a -= da;
                b -= db;
                if !(a.norm() < 1e8 && b.norm() < 1e8) {
                    break;
                }
            }
            if !converged {
                if let Some(g) = chart_residual(t, chart, a, b) {
                    converged = g[0].norm() + g[1].norm() < cfg.convergence;
                }
            }
            if converged {
                let x = normalize(&lift(chart, a, b));
                if !found.iter().any(|y| proj_dist(&x, y) < cfg.dedup) {
                    found.push(x);
                }
            }
        }
    }
    found
}
