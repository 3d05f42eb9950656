//! Structures in the special coordinates `(z, w)` of the dimension-4 normal form
//!
//! `J ∂z = ik ∂z + α ∂z̄ + iαβ̄/(1+k) ∂w + β ∂w̄`, `J ∂w = i ∂w`, `k = √(1+|α|²)`,
//!
//! and realization of a prescribed rank-2 distribution
//! `Π^C = ⟨∂z − A∂w − B∂w̄, conj⟩` as the image of the Nijenhuis tensor.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::nijenhuis_at;
use crate::acstruct::{frame_matrix_to_real, frame_to_real, AcsError, ChartStructure, JetSource, PointJet};
use crate::clinalg::{CMat, RealSubspace, RVec, DEFAULT_TOL};
use crate::expr::{CoeffExpr, Jet1, VarId, VarTable};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealizeError {
    #[error("precondition failed at the point: {}", .0.join("; "))]
    Precondition(Vec<String>),
    #[error("Ξ₊ vanishes at the point; the distribution is singular there")]
    SingularDistribution,
    #[error(transparent)]
    Acs(#[from] AcsError),
    #[error("{0}")]
    Other(String),
}

/// Where α and β come from.
#[derive(Clone, Debug, PartialEq)]
pub enum AlphaBetaCoeffs {
    Explicit { alpha: CoeffExpr, beta: CoeffExpr },
    /// α, β solved pointwise from the distribution coefficients A, B.
    Distribution { a: CoeffExpr, b: CoeffExpr },
}

/// A structure in the dimension-4 normal form; the radical is evaluated numerically.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaBetaStructure {
    pub vars: VarTable,
    pub coeffs: AlphaBetaCoeffs,
}

fn w() -> VarId {
    VarId::holo(1)
}
fn wbar() -> VarId {
    VarId::anti(1)
}

impl AlphaBetaStructure {
    pub fn explicit(vars: VarTable, alpha: CoeffExpr, beta: CoeffExpr) -> Result<Self, AcsError> {
        Self::check_vars(&vars)?;
        Ok(AlphaBetaStructure { vars, coeffs: AlphaBetaCoeffs::Explicit { alpha, beta } })
    }

    pub fn from_distribution(vars: VarTable, a: CoeffExpr, b: CoeffExpr) -> Result<Self, AcsError> {
        Self::check_vars(&vars)?;
        Ok(AlphaBetaStructure { vars, coeffs: AlphaBetaCoeffs::Distribution { a, b } })
    }

    /// Reads α = coefficient of ∂z̄ in J∂z and β = coefficient of ∂w̄, after checking the
    /// remaining entries have the normal-form shape at `p`.
    pub fn from_chart(s: &ChartStructure, p: &[C64]) -> Result<Self, AcsError> {
        Self::check_vars(&s.vars)?;
        let alpha = s.b[0][0].clone();
        let beta = s.b[0][1].clone();
        let l1 = AlphaBetaStructure::explicit(s.vars.clone(), alpha, beta)?;
        let mine = l1.frame_jets(p)?;
        let theirs = s.frame_matrix_at(p)?;
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((mine[r][c].val - theirs[(r, c)]).norm());
            }
        }
        if worst > 1e-9 {
            return Err(AcsError::Precondition(format!("structure is not in the dimension-4 normal form (entry mismatch {worst:.3e})")));
        }
        Ok(l1)
    }

    fn check_vars(vars: &VarTable) -> Result<(), AcsError> {
        if vars.len() != 2 {
            return Err(AcsError::Precondition("the dimension-4 normal form needs coordinates (z, w)".into()));
        }
        Ok(())
    }

    /// Jets of α and β at `p`.
    pub fn alpha_beta(&self, p: &[C64]) -> Result<(Jet1, Jet1), AcsError> {
        if p.len() != 2 {
            return Err(AcsError::PointDim { expected: 2, got: p.len() });
        }
        match &self.coeffs {
            AlphaBetaCoeffs::Explicit { alpha, beta } => Ok((Jet1::of_expr(alpha, p)?, Jet1::of_expr(beta, p)?)),
            AlphaBetaCoeffs::Distribution { a, b } => {
                let awb = Jet1::of_expr(&a.diff(wbar()), p)?;
                let bw = Jet1::of_expr(&b.diff(w()), p)?;
                let num = awb.mul(&bw).scale(C64::new(0.0, -2.0));
                let den = awb.mul(&awb.conj()).sub(&bw.mul(&bw.conj()));
                let alpha = num.div(&den);
                let k = alpha.mul(&alpha.conj()).add_const(C64::new(1.0, 0.0)).sqrt_real();
                let ja = Jet1::of_expr(a, p)?;
                let jb = Jet1::of_expr(b, p)?;
                let beta = alpha.mul(&ja.conj()).scale(C64::new(-1.0, 0.0)).sub(&k.add_const(C64::new(1.0, 0.0)).mul(&jb).scale(I));
                Ok((alpha, beta))
            }
        }
    }

    /// Frame matrix of J as jets, order `(∂z, ∂w, ∂z̄, ∂w̄)`.
    pub fn frame_jets(&self, p: &[C64]) -> Result<Vec<Vec<Jet1>>, AcsError> {
        let (alpha, beta) = self.alpha_beta(p)?;
        let nv = 4;
        let zero = Jet1::constant(C64::new(0.0, 0.0), nv);
        let k = alpha.mul(&alpha.conj()).add_const(C64::new(1.0, 0.0)).sqrt_real();
        let one_k = k.add_const(C64::new(1.0, 0.0));
        let col_z = [k.scale(I), alpha.mul(&beta.conj()).scale(I).div(&one_k), alpha.clone(), beta.clone()];
        let col_w = [zero.clone(), Jet1::constant(I, nv), zero.clone(), zero.clone()];
        let swap = |r: usize| (r + 2) % 4;
        let mut m = vec![vec![zero.clone(); 4]; 4];
        for r in 0..4 {
            m[r][0] = col_z[r].clone();
            m[r][1] = col_w[r].clone();
            m[r][2] = col_z[swap(r)].conj();
            m[r][3] = col_w[swap(r)].conj();
        }
        Ok(m)
    }
}

impl JetSource for AlphaBetaStructure {
    fn complex_dim(&self) -> usize {
        2
    }

    fn jet_at(&self, p: &[C64]) -> Result<PointJet, AcsError> {
        let m = self.frame_jets(p)?;
        let val = CMat::from_fn(4, 4, |r, c| m[r][c].val);
        let (j, _) = frame_matrix_to_real(&val);
        let mut dj = Vec::with_capacity(4);
        for coord in 0..2 {
            let (h, a) = (VarId::holo(coord), VarId::anti(coord));
            let dx = CMat::from_fn(4, 4, |r, c| m[r][c].d(h) + m[r][c].d(a));
            let dy = CMat::from_fn(4, 4, |r, c| (m[r][c].d(h) - m[r][c].d(a)) * I);
            dj.push(frame_matrix_to_real(&dx).0);
            dj.push(frame_matrix_to_real(&dy).0);
        }
        Ok(PointJet { point: p.to_vec(), j, dj })
    }
}

/// Real plane spanned by the real and imaginary parts of a complex frame vector.
pub fn plane_of(v: &[C64]) -> RealSubspace {
    let r = frame_to_real(v);
    let re = RVec::from_fn(r.len(), |k, _| r[k].re);
    let im = RVec::from_fn(r.len(), |k, _| r[k].im);
    RealSubspace::from_spanning(r.len(), &[re, im], 1e-9, 0.0)
}

/// Π at a point: span of the real and imaginary parts of `∂z − A∂w − B∂w̄`.
pub fn distribution_plane(a: C64, b: C64) -> RealSubspace {
    plane_of(&[C64::new(1.0, 0.0), -a, C64::new(0.0, 0.0), -b])
}

/// Frame components `(∂z, ∂w, ∂z̄, ∂w̄)` of the generator `v = Ξ₊ ξ` of the image.
pub fn image_generator(alpha: &Jet1, beta: &Jet1) -> Result<[C64; 4], RealizeError> {
    let a = alpha.val;
    let b = beta.val;
    let a_w = alpha.d(w());
    let b_w = beta.d(w());
    let abar = a.conj();
    // (ᾱ)_w = conj(α_w̄)
    let abar_w = alpha.d(wbar()).conj();
    let k = (1.0 + a.norm_sqr()).sqrt();
    if a.norm() < 1e-12 {
        if a_w.norm() < 1e-300 && b_w.norm() < 1e-300 {
            return Err(RealizeError::SingularDistribution);
        }
        return Ok([C64::new(0.0, 0.0), b.conj() * a_w, -I * a_w * 2.0, -I * b_w * 2.0]);
    }
    let sym = (a_w * abar + a * abar_w) / (2.0 * k);
    let anti = (a_w * abar - a * abar_w) / 2.0;
    let xi_p = sym + anti;
    let xi_m = sym - anti;
    if xi_p.norm() < 1e-12 * (a_w.norm() + abar_w.norm()).max(1e-300) {
        return Err(RealizeError::SingularDistribution);
    }
    Ok([
        xi_p,
        xi_p * b.conj() / abar,
        -I * xi_p * (1.0 + k) / abar,
        I * b * xi_m / (1.0 + k) - I * b_w * 2.0,
    ])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Realization {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub k: f64,
    /// Ξ₊ from the closed form in A and B.
    pub xi_plus: [f64; 2],
    /// Largest principal angle between Im N_J and Π.
    pub image_angle: f64,
    /// Largest principal angle between the generator plane and Π.
    pub generator_angle: f64,
    pub image_dim: usize,
}

/// Solves for α, β at `p` and verifies the resulting structure.
pub fn realize_dim4(
    vars: &VarTable,
    a: &CoeffExpr,
    b: &CoeffExpr,
    p: &[C64],
) -> Result<(Realization, AlphaBetaStructure), RealizeError> {
    let structure = AlphaBetaStructure::from_distribution(vars.clone(), a.clone(), b.clone())?;
    let ev = |e: &CoeffExpr| e.eval(p).map_err(AcsError::from);
    let awb = ev(&a.diff(wbar()))?;
    let awbwb = ev(&a.diff(wbar()).diff(wbar()))?;
    let bw = ev(&b.diff(w()))?;
    let bww = ev(&b.diff(w()).diff(w()))?;
    let abar_w = awb.conj();
    let abar_ww = awbwb.conj();
    let scale = 1.0 + awb.norm() + bw.norm();
    let mut failures = Vec::new();
    if bw.norm() <= 1e-12 * scale {
        failures.push("|B_w| > 0 fails (B_w = 0)".to_string());
    }
    if awb.norm() <= bw.norm() {
        failures.push(format!("|A_w̄| > |B_w| fails ({:.6} <= {:.6})", awb.norm(), bw.norm()));
    }
    let deg = abar_w * bww - abar_ww * bw;
    if deg.norm() <= 1e-12 * scale * scale {
        failures.push("Ā_w B_ww ≠ Ā_ww B_w fails (both sides equal)".to_string());
    }
    if !failures.is_empty() {
        return Err(RealizeError::Precondition(failures));
    }
    let den = awb.norm_sqr() - bw.norm_sqr();
    let xi_plus = awb * bw.conj() * deg * 4.0 / (den * den);

    let (alpha, beta) = structure.alpha_beta(p)?;
    let k = (1.0 + alpha.val.norm_sqr()).sqrt();
    let jet = structure.jet_at(p)?;
    let n = nijenhuis_at(&jet).map_err(|e| RealizeError::Other(e.to_string()))?;
    let image = n.image(DEFAULT_TOL);
    let pi = distribution_plane(ev(a)?, ev(b)?);
    let gen = plane_of(&image_generator(&alpha, &beta)?);
    let c2 = |z: C64| [z.re, z.im];
    Ok((
        Realization {
            alpha: c2(alpha.val),
            beta: c2(beta.val),
            k,
            xi_plus: c2(xi_plus),
            image_angle: image.max_principal_angle(&pi),
            generator_angle: gen.max_principal_angle(&pi),
            image_dim: image.dim(),
        },
        structure,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn vt() -> VarTable {
        VarTable::new(&["z", "w"]).unwrap()
    }

    #[test]
    fn worked_example() {
        let (r, _) = realize_dim4(&vt(), &parse("2*w_ + w_^2", &vt()).unwrap(), &parse("w", &vt()).unwrap(), &[C64::new(0.0, 0.0); 2]).unwrap();
        assert!((r.alpha[0]).abs() < 1e-15 && (r.alpha[1] + 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.beta, [0.0, 0.0]);
        assert_eq!(r.image_dim, 2);
        assert!(r.image_angle < 1e-6, "{}", r.image_angle);
        assert!(r.generator_angle < 1e-6, "{}", r.generator_angle);
    }

    #[test]
    fn precondition_failures_are_named() {
        let z = [C64::new(0.0, 0.0); 2];
        match realize_dim4(&vt(), &parse("2*w_", &vt()).unwrap(), &parse("z", &vt()).unwrap(), &z) {
            Err(RealizeError::Precondition(f)) => assert!(f.iter().any(|s| s.contains("|B_w| > 0"))),
            other => panic!("{other:?}"),
        }
        match realize_dim4(&vt(), &parse("2*w_", &vt()).unwrap(), &parse("w", &vt()).unwrap(), &z) {
            Err(RealizeError::Precondition(f)) => assert!(f.iter().any(|s| s.contains("Ā_w B_ww"))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn submax_generator() {
        let alpha = Jet1::of_expr(&CoeffExpr::zero(), &[C64::new(0.1, 0.0), C64::new(0.2, 0.3)]).unwrap();
        let beta = Jet1::of_expr(&parse("w", &vt()).unwrap(), &[C64::new(0.1, 0.0), C64::new(0.2, 0.3)]).unwrap();
        let v = image_generator(&alpha, &beta).unwrap();
        assert_eq!(v, [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, -2.0)]);
    }
}

#[cfg(test)]
mod limit_tests {
    use super::*;
    use crate::expr::parse;

    fn angle_for(alpha: &str, beta: &str, p: [C64; 2]) -> (f64, f64) {
        let vt = VarTable::new(&["z", "w"]).unwrap();
        let s = AlphaBetaStructure::explicit(vt.clone(), parse(alpha, &vt).unwrap(), parse(beta, &vt).unwrap()).unwrap();
        let n = nijenhuis_at(&s.jet_at(&p).unwrap()).unwrap();
        let img = n.image(DEFAULT_TOL);
        let (a, b) = s.alpha_beta(&p).unwrap();
        let v = image_generator(&a, &b).unwrap();
        let alt = [v[0], v[1], v[2] / 2.0, v[3]];
        (img.max_principal_angle(&plane_of(&v)), img.max_principal_angle(&plane_of(&alt)))
    }

    #[test]
    fn generator_at_vanishing_alpha() {
        let (ours, halved) = angle_for("w", "0.5 + w", [C64::new(0.0, 0.0); 2]);
        assert!(ours < 1e-9, "{ours}");
        assert!(halved > 1e-3, "{halved}");
        let (g, _) = angle_for("w + 0.3*w_", "0.5 - 0.2*i + w + z_", [C64::new(0.1, 0.2), C64::new(0.3, -0.1)]);
        assert!(g < 1e-8, "{g}");
    }
}
