//! Pairs of transversal complex planes in complex dimension 4, and dimension counts
//! for the Grassmannian of planes.

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{NijError, PointTensor};
use crate::clinalg::{complex_basis, image_of_pairs, CVec, RealSubspace, DEFAULT_TOL};

/// A line `L ⊂ P_s` of the form `N(V₁, V₂)` with lines `V₁ ⊂ P₁`, `V₂ ⊂ P₂`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitLine {
    /// 1 or 2: which plane the image line lies in.
    pub plane: usize,
    /// Direction in C^4, normalized.
    pub line: Vec<[f64; 2]>,
    pub v1: Vec<[f64; 2]>,
    pub v2: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransversalReport {
    pub n_on_p1_zero: bool,
    pub n_on_p2_zero: bool,
    /// Real rank of `N|_{P₁ × P₂}`.
    pub cross_rank: usize,
    pub anti_isomorphism: bool,
    pub lines: Vec<SplitLine>,
    pub strongly_nondegenerate: bool,
    pub notes: Vec<String>,
}

fn c2(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn normalized(v: &[C64]) -> Vec<C64> {
    let (k, _) = v.iter().enumerate().fold((0, 0.0), |acc, (k, z)| if z.norm() > acc.1 { (k, z.norm()) } else { acc });
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let phase = v[k] / v[k].norm();
    v.iter().map(|z| z / (phase * n)).collect()
}

/// Distance between the projective points of two nonzero vectors.
fn proj_dist(a: &[C64], b: &[C64]) -> f64 {
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    (1.0 - (ip.norm() / (na * nb)).min(1.0).powi(2)).max(0.0).sqrt()
}

fn quad_roots(a: C64, b: C64, c: C64, scale: f64) -> Vec<Option<C64>> {
    // None stands for the root at infinity.
    if a.norm() <= 1e-10 * scale {
        if b.norm() <= 1e-10 * scale {
            return vec![None, None];
        }
        return vec![Some(-c / b), None];
    }
    let d = (b * b - a * c * 4.0).sqrt();
    vec![Some((-b + d) / (a * 2.0)), Some((-b - d) / (a * 2.0))]
}

fn det2(m: &[[C64; 2]; 2]) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Checks the hypotheses on the pair `(P₁, P₂)` and computes the four lines
/// `L_s^j ⊂ P_s` that are images of decomposable pairs, with their factors.
pub fn transversal_check(t: &PointTensor, p1: &RealSubspace, p2: &RealSubspace) -> Result<TransversalReport, NijError> {
    if t.n != 4 {
        return Err(NijError::Precondition(format!("expected complex dimension 4, got {}", t.n)));
    }
    for (name, p) in [("P1", p1), ("P2", p2)] {
        if p.ambient != 8 {
            return Err(NijError::Precondition(format!("{name} lives in R^{}, expected R^8", p.ambient)));
        }
        match p.complex_dim(DEFAULT_TOL) {
            Ok(2) => {}
            Ok(d) => return Err(NijError::Precondition(format!("{name} has complex dimension {d}, expected 2"))),
            Err(e) => return Err(NijError::Precondition(format!("{name}: {e}"))),
        }
    }
    if p1.sum(p2).dim() != 8 {
        return Err(NijError::Precondition("P1 and P2 are not transversal".into()));
    }
    let a = complex_basis(p1);
    let b = complex_basis(p2);
    let scale = t.c.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-9 * scale;
    let on = |u: &[CVec]| {
        let v = t.apply_complex(u[0].as_slice(), u[1].as_slice());
        v.iter().all(|z| z.norm() <= tol)
    };
    let mut notes = Vec::new();
    let n_on_p1_zero = on(&a);
    let n_on_p2_zero = on(&b);
    let anti = t.to_antilinear();
    let cross_rank = image_of_pairs(&anti, p1, p2, DEFAULT_TOL).dim();
    let anti_isomorphism = cross_rank == 8;
    let mut lines = Vec::new();
    let mut strongly = false;
    if anti_isomorphism {
        // columns N(a_k, b_l) in the order (11, 12, 21, 22)
        let pairs = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let cols: Vec<Vec<C64>> = pairs.iter().map(|&(k, l)| t.apply_complex(a[k].as_slice(), b[l].as_slice())).collect();
        let m = DMatrix::<Complex<f64>>::from_fn(4, 4, |r, c| cols[c][r]);
        let inv = m.clone().try_inverse().ok_or_else(|| NijError::Precondition("cross map not invertible".into()))?;
        let coeffs = |v: &CVec| -> [[C64; 2]; 2] {
            let s = &inv * v;
            [[s[0], s[1]], [s[2], s[3]]]
        };
        for (s, basis) in [(1usize, &a), (2usize, &b)] {
            let e = coeffs(&basis[0]);
            let f = coeffs(&basis[1]);
            // det(u·E + F) = u² det E + u·mixed + det F
            let mixed = e[0][0] * f[1][1] + e[1][1] * f[0][0] - e[0][1] * f[1][0] - e[1][0] * f[0][1];
            let sc = [det2(&e).norm(), mixed.norm(), det2(&f).norm()].into_iter().fold(0.0, f64::max).max(1e-300);
            let roots = quad_roots(det2(&e), mixed, det2(&f), sc);
            for r in roots {
                let dir: CVec = match r {
                    Some(u) => &basis[0] * u + &basis[1],
                    None => basis[0].clone(),
                };
                let mm = coeffs(&dir);
                // mm_kl = conj(x_k) conj(y_l)
                let col = if mm[0][0].norm() + mm[1][0].norm() >= mm[0][1].norm() + mm[1][1].norm() { 0 } else { 1 };
                let row = if mm[0][0].norm() + mm[0][1].norm() >= mm[1][0].norm() + mm[1][1].norm() { 0 } else { 1 };
                let x = [mm[0][col].conj(), mm[1][col].conj()];
                let y = [mm[row][0].conj(), mm[row][1].conj()];
                let v1: Vec<C64> = (&a[0] * x[0] + &a[1] * x[1]).iter().copied().collect();
                let v2: Vec<C64> = (&b[0] * y[0] + &b[1] * y[1]).iter().copied().collect();
                let line: Vec<C64> = dir.iter().copied().collect();
                lines.push((s, normalized(&line), normalized(&v1), normalized(&v2)));
            }
        }
        let distinct = |s: usize| {
            let ls: Vec<_> = lines.iter().filter(|l| l.0 == s).collect();
            ls.len() == 2 && proj_dist(&ls[0].1, &ls[1].1) > 1e-6
        };
        if !distinct(1) || !distinct(2) {
            notes.push("the determinant quadratic has a double root".into());
        } else {
            // for each i, some L_i^j avoids every factor V_i of the four lines
            let avoids = |i: usize| {
                lines.iter().filter(|l| l.0 == i).any(|cand| {
                    lines.iter().all(|l| {
                        let v = if i == 1 { &l.2 } else { &l.3 };
                        proj_dist(&cand.1, v) > 1e-6
                    })
                })
            };
            strongly = n_on_p1_zero && n_on_p2_zero && avoids(1) && avoids(2);
        }
    } else {
        notes.push(format!("N restricted to P1 × P2 has real rank {cross_rank} < 8"));
    }
    Ok(TransversalReport {
        n_on_p1_zero,
        n_on_p2_zero,
        cross_rank,
        anti_isomorphism,
        lines: lines.into_iter().map(|(plane, l, v1, v2)| SplitLine { plane, line: c2(&l), v1: c2(&v1), v2: c2(&v2) }).collect(),
        strongly_nondegenerate: strongly,
        notes,
    })
}

/// Tensor on `C^4 = P₁ ⊕ P₂`, `P₁ = ⟨X₁, X₂⟩`, `P₂ = ⟨X₃, X₄⟩`, vanishing on each plane and with
/// `N(X₁ + λ₁ X₂, X₃ + λ₂ X₄) = e` for the four pairs `(λ₁, λ₂)` listed against the targets
/// `X₁, X₂, X₃, X₄`.
pub fn normal_form_dim8(lambdas: [(C64, C64); 4]) -> Result<PointTensor, NijError> {
    let k = DMatrix::<Complex<f64>>::from_fn(4, 4, |r, c| {
        let (l1, l2) = lambdas[r];
        [C64::new(1.0, 0.0), l2.conj(), l1.conj(), l1.conj() * l2.conj()][c]
    });
    let inv = k.try_inverse().ok_or_else(|| NijError::Precondition("λ system is singular".into()))?;
    let mut t = PointTensor::zero(4);
    // unknowns N13, N14, N23, N24; right-hand sides e_r
    let slots = [(0, 2), (0, 3), (1, 2), (1, 3)];
    for (u, &(i, j)) in slots.iter().enumerate() {
        for kk in 0..4 {
            t.set(i, j, kk, inv[(u, kk)]);
        }
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PluckerCounts {
    pub n: u32,
    /// Complex dimension of `N⁻¹(0)` for generic N.
    pub d: u64,
    /// Codimension of the Plücker image.
    pub codim: u64,
    pub dim_sigma: u64,
    /// Catalan number `C(2n−4, n−2)/(n−1)`.
    pub deg_sigma: u128,
}

fn binom(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Counts for `n ≥ 4`; `None` below that or when the degree overflows.
pub fn plucker_counts(n: u32) -> Option<PluckerCounts> {
    if n < 4 || n > 60 {
        return None;
    }
    let nn = n as u64;
    let d = nn * (nn - 3) / 2;
    Some(PluckerCounts { n, d, codim: d + 3 - nn, dim_sigma: nn - 4, deg_sigma: binom(2 * nn - 4, nn - 2) / (nn as u128 - 1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clinalg::{realify_vec, span_complex};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn plane(n: usize, ks: &[usize]) -> RealSubspace {
        let vs: Vec<CVec> = ks.iter().map(|&k| CVec::from_fn(n, |r, _| if r == k { c(1.0, 0.0) } else { c(0.0, 0.0) })).collect();
        span_complex(n, &vs, 1e-9)
    }

    #[test]
    fn plucker_small() {
        let p = plucker_counts(4).unwrap();
        assert_eq!((p.d, p.codim, p.dim_sigma, p.deg_sigma), (2, 1, 0, 2));
        assert_eq!(plucker_counts(5).unwrap().deg_sigma, 5);
        assert_eq!(plucker_counts(10).unwrap().deg_sigma, 1430);
        assert!(plucker_counts(3).is_none());
    }

    #[test]
    fn normal_form_recovers_lines() {
        let lam = [(c(1.0, 0.0), c(0.5, 0.0)), (c(2.0, 0.0), c(-2.0, 0.0)), (c(-1.0, 0.0), c(0.0, 3.0)), (c(0.0, 1.0), c(1.0, 1.0))];
        let t = normal_form_dim8(lam).unwrap();
        let r = transversal_check(&t, &plane(4, &[0, 1]), &plane(4, &[2, 3])).unwrap();
        assert!(r.n_on_p1_zero && r.n_on_p2_zero && r.anti_isomorphism);
        assert_eq!(r.lines.len(), 4);
        let _ = realify_vec;
        for l in &r.lines {
            let v: Vec<C64> = l.line.iter().map(|p| c(p[0], p[1])).collect();
            let on_axis = (0..4).any(|k| (v[k].norm() - 1.0).abs() < 1e-8);
            assert!(on_axis, "{v:?}");
        }
        assert!(r.strongly_nondegenerate);
    }

    #[test]
    fn rejects_non_transversal() {
        let t = PointTensor::zero(4);
        assert!(transversal_check(&t, &plane(4, &[0, 1]), &plane(4, &[1, 2])).is_err());
    }
}
