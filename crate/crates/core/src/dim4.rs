//! Complex dimension 2: the characteristic distribution Π = Im N, its derived
//! distribution, the canonical frame, the quotient metric on T/Π, and residual checks for
//! structures in the adapted form `J∂z = i∂z + b∂w̄, J∂w = i∂w`.
//!
//! Brackets of sections are taken by central differences with Richardson extrapolation, so
//! any [`JetSource`] works, including structures that are only known pointwise.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acstruct::{AcsError, ChartStructure, JetSource};
use crate::clinalg::{AntilinearMap2, RMat, RVec, RealSubspace, DEFAULT_TOL};
use crate::expr::{CoeffExpr, VarId, VarTable};
use crate::nijenhuis::{nijenhuis_at, NijError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Dim4Error {
    #[error("structure has complex dimension {0}, expected 2")]
    NotDim4(usize),
    #[error("N = 0 at the point")]
    Integrable,
    #[error("Π integrable: the derived distribution has rank 2 at the point")]
    PiIntegrable,
    #[error("v lies in Π")]
    InPi,
    #[error("not in the adapted form J∂z = i∂z + b∂w̄, J∂w = i∂w: {0}")]
    NotAdapted(String),
    #[error("λ vanishes at sample point {0}")]
    LambdaZero(usize),
    #[error(transparent)]
    Acs(#[from] AcsError),
    #[error(transparent)]
    Nij(#[from] NijError),
}

/// Moves `p` by `h·v`, `v` in real coordinates `(x₁, y₁, x₂, y₂)`.
fn shifted(p: &[C64], v: &RVec, h: f64) -> Vec<C64> {
    p.iter().enumerate().map(|(j, z)| z + C64::new(v[2 * j], v[2 * j + 1]) * h).collect()
}

/// Derivative of `f` at `p` along `v`: central differences, one Richardson step.
fn ddir<F>(f: &F, p: &[C64], v: &RVec) -> Result<RVec, Dim4Error>
where
    F: Fn(&[C64]) -> Result<RVec, Dim4Error>,
{
    let nv = v.norm();
    if nv == 0.0 {
        return Ok(f(p)? * 0.0);
    }
    let h = 1e-3 / nv;
    let cd = |h: f64| -> Result<RVec, Dim4Error> { Ok((f(&shifted(p, v, h))? - f(&shifted(p, v, -h))?) / (2.0 * h)) };
    let d1 = cd(h)?;
    let d2 = cd(h / 2.0)?;
    Ok((d2 * 4.0 - d1) / 3.0)
}

/// `[A, B](p) = DB[A] − DA[B]` for fields given by their values.
fn bracket<A, B>(a: &A, b: &B, p: &[C64]) -> Result<RVec, Dim4Error>
where
    A: Fn(&[C64]) -> Result<RVec, Dim4Error>,
    B: Fn(&[C64]) -> Result<RVec, Dim4Error>,
{
    let av = a(p)?;
    let bv = b(p)?;
    Ok(ddir(b, p, &av)? - ddir(a, p, &bv)?)
}

struct Local<'a, S: JetSource> {
    src: &'a S,
}

impl<S: JetSource> Local<'_, S> {
    fn check(&self) -> Result<(), Dim4Error> {
        match self.src.complex_dim() {
            2 => Ok(()),
            n => Err(Dim4Error::NotDim4(n)),
        }
    }

    fn nj(&self, q: &[C64]) -> Result<(AntilinearMap2, RMat), Dim4Error> {
        let jet = self.src.jet_at(q)?;
        let n = nijenhuis_at(&jet)?;
        Ok((n.coords, jet.j))
    }

    /// Coordinate pair maximizing `|N(e_a, e_b)|` at `p`.
    fn best_pair(&self, p: &[C64]) -> Result<(usize, usize), Dim4Error> {
        let (n, _) = self.nj(p)?;
        let mut best = (0, 1, 0.0);
        for a in 0..4 {
            for b in a + 1..4 {
                let v = n.basis_value(a, b).norm();
                if v > best.2 {
                    best = (a, b, v);
                }
            }
        }
        if best.2 <= 1e-12 {
            return Err(Dim4Error::Integrable);
        }
        Ok((best.0, best.1))
    }

    fn section(&self, pair: (usize, usize), q: &[C64]) -> Result<RVec, Dim4Error> {
        Ok(self.nj(q)?.0.basis_value(pair.0, pair.1))
    }

    fn j_section(&self, pair: (usize, usize), q: &[C64]) -> Result<RVec, Dim4Error> {
        let (n, j) = self.nj(q)?;
        Ok(j * n.basis_value(pair.0, pair.1))
    }
}

/// Orthogonal distance of `v` from span(x, y).
fn off_plane(v: &RVec, x: &RVec, y: &RVec) -> f64 {
    let pl = RealSubspace::from_spanning(v.len(), &[x.clone(), y.clone()], 1e-12, 0.0);
    (v - pl.project(v)).norm()
}

/// Coefficients `(c₀, c₁)` with `v ≈ c₀ x + c₁ y` (least squares).
fn coords_in(v: &RVec, x: &RVec, y: &RVec) -> (f64, f64) {
    let m = RMat::from_columns(&[x.clone(), y.clone()]);
    let sol = m.svd(true, true).solve(v, 1e-14).expect("svd solve");
    (sol[0], sol[1])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DerivedDistribution {
    pub rank3: bool,
    /// Sections `X`, `JX` of Π and their bracket, at the point.
    pub basis: Vec<Vec<f64>>,
    /// Distance of `[X, JX]` from Π relative to `|X|²`.
    pub transversality: f64,
}

/// Π³ = Π + [Π, Π] at `p`.
pub fn derived_distribution<S: JetSource>(src: &S, p: &[C64]) -> Result<DerivedDistribution, Dim4Error> {
    let l = Local { src };
    l.check()?;
    let pair = l.best_pair(p)?;
    let x = |q: &[C64]| l.section(pair, q);
    let jx = |q: &[C64]| l.j_section(pair, q);
    let xv = x(p)?;
    let jxv = jx(p)?;
    let br = bracket(&x, &jx, p)?;
    let t = off_plane(&br, &xv, &jxv) / xv.norm_squared();
    Ok(DerivedDistribution {
        rank3: t > 1e-6,
        basis: [xv, jxv, br].iter().map(|v| v.iter().copied().collect()).collect(),
        transversality: t,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EStructure {
    pub point: Vec<[f64; 2]>,
    /// ξ₁ … ξ₄ in real coordinates.
    pub frame: Vec<Vec<f64>>,
    pub sign_ambiguity: bool,
    /// |N(ξ₁,ξ₃) − ξ₁|
    pub n13_residual: f64,
    /// |[ξ₁,ξ₂] − ξ₃|, recomputed with a different step.
    pub bracket_residual: f64,
    /// |ξ₂ − Jξ₁| + |ξ₄ − Jξ₃|
    pub j_residual: f64,
    pub determinant: f64,
}

impl EStructure {
    pub fn vectors(&self) -> Vec<RVec> {
        self.frame.iter().map(|v| RVec::from_column_slice(v)).collect()
    }
}

/// First component above the noise floor made positive.
fn lexicographic_sign(v: &RVec) -> f64 {
    let tol = 1e-9 * v.amax();
    for x in v.iter() {
        if x.abs() > tol {
            return x.signum();
        }
    }
    1.0
}

/// The canonical frame `ξ₁ ∈ Π, ξ₂ = Jξ₁, ξ₃ = [ξ₁,ξ₂], ξ₄ = Jξ₃` with `N(ξ₁,ξ₃) = ξ₁`.
/// `seed` picks the coordinate pair `(a, b)` whose value `N(e_a, e_b)` seeds the section of Π;
/// the result does not depend on it.
pub fn e_structure<S: JetSource>(src: &S, p: &[C64], seed: Option<(usize, usize)>) -> Result<EStructure, Dim4Error> {
    let l = Local { src };
    l.check()?;
    if !derived_distribution(src, p)?.rank3 {
        return Err(Dim4Error::PiIntegrable);
    }
    let pair = match seed {
        Some(pr) if l.section(pr, p)?.norm() > 1e-9 => pr,
        _ => l.best_pair(p)?,
    };
    // ξ₁ = f·X with f = a + bJ fixed by |g| r² = 1, e^{2iθ} = g/|g| where N(X, [X, JX]) = g·X
    let raw_xi1 = |q: &[C64]| -> Result<RVec, Dim4Error> {
        let x = |q: &[C64]| l.section(pair, q);
        let jx = |q: &[C64]| l.j_section(pair, q);
        let (n, _) = l.nj(q)?;
        let xv = x(q)?;
        let jxv = jx(q)?;
        let y = bracket(&x, &jx, q)?;
        let (c0, c1) = coords_in(&n.apply(&xv, &y), &xv, &jxv);
        let g = C64::new(c0, c1);
        let r = g.norm().powf(-0.5);
        let th = g.arg() / 2.0;
        Ok((xv * th.cos() + jxv * th.sin()) * r)
    };
    let base = raw_xi1(p)?;
    let sign = lexicographic_sign(&base);
    let xi1 = |q: &[C64]| -> Result<RVec, Dim4Error> {
        let v = raw_xi1(q)?;
        Ok(if v.dot(&base) * sign < 0.0 { -v } else { v })
    };
    let xi2 = |q: &[C64]| -> Result<RVec, Dim4Error> { Ok(l.nj(q)?.1 * xi1(q)?) };
    let (n, j) = l.nj(p)?;
    let x1 = xi1(p)?;
    let x2 = xi2(p)?;
    let x3 = bracket(&xi1, &xi2, p)?;
    let x4 = &j * &x3;
    // the same bracket with plain central differences at a smaller step
    let h = 2e-4;
    let cd = |f: &dyn Fn(&[C64]) -> Result<RVec, Dim4Error>, v: &RVec| -> Result<RVec, Dim4Error> {
        let s = h / v.norm();
        Ok((f(&shifted(p, v, s))? - f(&shifted(p, v, -s))?) / (2.0 * s))
    };
    let x3_check = cd(&xi2, &x1)? - cd(&xi1, &x2)?;
    let frame = RMat::from_columns(&[x1.clone(), x2.clone(), x3.clone(), x4.clone()]);
    Ok(EStructure {
        point: p.iter().map(|z| [z.re, z.im]).collect(),
        n13_residual: (n.apply(&x1, &x3) - &x1).norm(),
        bracket_residual: (&x3_check - &x3).norm(),
        j_residual: (&x2 - &j * &x1).norm() + (&x4 - &j * &x3).norm(),
        determinant: frame.determinant(),
        frame: [x1, x2, x3, x4].iter().map(|v| v.iter().copied().collect()).collect(),
        sign_ambiguity: true,
    })
}

/// `|det N(v,·)|_Π|`; equal to 1 exactly on the unit circle of `T/Π`.
pub fn quotient_circle<S: JetSource>(src: &S, p: &[C64], v: &RVec) -> Result<f64, Dim4Error> {
    let l = Local { src };
    l.check()?;
    let jet = src.jet_at(p)?;
    let nv = nijenhuis_at(&jet)?;
    let pi = nv.image(DEFAULT_TOL);
    if pi.dim() == 0 {
        return Err(Dim4Error::Integrable);
    }
    if (v - pi.project(v)).norm() <= 1e-9 * v.norm().max(1e-300) {
        return Err(Dim4Error::InPi);
    }
    let (e1, e2) = (&pi.basis[0], &pi.basis[1]);
    let (a, c) = coords_in(&nv.coords.apply(v, e1), e1, e2);
    let (b, d) = coords_in(&nv.coords.apply(v, e2), e1, e2);
    Ok((a * d - b * c).abs())
}

#[derive(Clone, Debug)]
pub struct ProjectibilityReport {
    pub b: CoeffExpr,
    /// w- and w̄-derivatives of the ∂z, ∂z̄ block of J.
    pub j_residuals: Vec<(String, CoeffExpr)>,
    /// w- and w̄-derivatives of `b_w`.
    pub n_residuals: Vec<(String, CoeffExpr)>,
}

impl ProjectibilityReport {
    pub fn j_projectible(&self) -> bool {
        self.j_residuals.iter().all(|(_, e)| e.is_zero())
    }
    pub fn n_projectible(&self) -> bool {
        self.n_residuals.iter().all(|(_, e)| e.is_zero())
    }
}

/// `b` from a structure in the adapted form, or the entry that breaks the form.
pub fn adapted_b(s: &ChartStructure) -> Result<CoeffExpr, Dim4Error> {
    if s.n() != 2 {
        return Err(Dim4Error::NotDim4(s.n()));
    }
    let i = CoeffExpr::constant(C64::new(0.0, 1.0));
    let checks = [
        ("J∂z has ∂z coefficient i", s.a[0][0].sub(&i)),
        ("J∂z has no ∂w term", s.a[0][1].clone()),
        ("J∂z has no ∂z̄ term", s.b[0][0].clone()),
        ("J∂w has ∂w coefficient i", s.a[1][1].sub(&i)),
        ("J∂w has no ∂z term", s.a[1][0].clone()),
        ("J∂w has no ∂z̄ term", s.b[1][0].clone()),
        ("J∂w has no ∂w̄ term", s.b[1][1].clone()),
    ];
    for (what, e) in checks {
        if !e.is_zero() {
            return Err(Dim4Error::NotAdapted(what.into()));
        }
    }
    Ok(s.b[0][1].clone())
}

pub fn projectibility_residual(s: &ChartStructure) -> Result<ProjectibilityReport, Dim4Error> {
    let b = adapted_b(s)?;
    let (w, wb) = (VarId::holo(1), VarId::anti(1));
    let mut j_res = Vec::new();
    for (name, e) in [("J[dz,dz]", &s.a[0][0]), ("J[dz_,dz]", &s.b[0][0])] {
        j_res.push((format!("d/dw {name}"), e.diff(w)));
        j_res.push((format!("d/dw_ {name}"), e.diff(wb)));
    }
    let bw = b.diff(w);
    let n_res = vec![("d/dw b_w".to_string(), bw.diff(w)), ("d/dw_ b_w".to_string(), bw.diff(wb))];
    Ok(ProjectibilityReport { b, j_residuals: j_res, n_residuals: n_res })
}

/// `(r0, r1)` for the vertical field `f∂w + f̄∂w̄`: `r0 = f_w̄` and
/// `r1 = f_z̄ + ψ f_w − f ψ_w − f̄ ψ_w̄` with `ψ = (i/2) b̄`.
pub fn symmetry_residual(s: &ChartStructure, f: &CoeffExpr) -> Result<(CoeffExpr, CoeffExpr), Dim4Error> {
    let b = adapted_b(s)?;
    let (zb, w, wb) = (VarId::anti(0), VarId::holo(1), VarId::anti(1));
    let psi = b.conj().scale(C64::new(0.0, 0.5));
    let r0 = f.diff(wb);
    let r1 = f.diff(zb).add(&psi.mul(&f.diff(w))).sub(&f.mul(&psi.diff(w))).sub(&f.conj().mul(&psi.diff(wb)));
    Ok((r0, r1))
}

#[derive(Clone, Debug)]
pub struct GaugeInvariants {
    /// `λ_{zz̄} λ − λ_z λ_z̄`; the coefficient of Λ is this over `λ²`.
    pub lambda_numerator: CoeffExpr,
    pub lambda_denominator: CoeffExpr,
    /// `λ² λ̄²`
    pub q: CoeffExpr,
}

impl GaugeInvariants {
    pub fn lambda_at(&self, p: &[C64]) -> Result<C64, Dim4Error> {
        Ok(self.lambda_numerator.eval(p).map_err(AcsError::from)? / self.lambda_denominator.eval(p).map_err(AcsError::from)?)
    }

    pub fn q_at(&self, p: &[C64]) -> Result<f64, Dim4Error> {
        Ok(self.q.eval(p).map_err(AcsError::from)?.re)
    }
}

/// Λ and Q for `w_z̄ = λ w̄`, λ an expression in the first coordinate; `grid` points must
/// not be zeros of λ.
pub fn gauge_invariants(lambda: &CoeffExpr, grid: &[Vec<C64>]) -> Result<GaugeInvariants, Dim4Error> {
    for (k, p) in grid.iter().enumerate() {
        if lambda.eval(p).map_err(AcsError::from)?.norm() <= 1e-300 {
            return Err(Dim4Error::LambdaZero(k));
        }
    }
    let (z, zb) = (VarId::holo(0), VarId::anti(0));
    let num = lambda.diff(z).diff(zb).mul(lambda).sub(&lambda.diff(z).mul(&lambda.diff(zb)));
    let sq = lambda.mul(lambda);
    Ok(GaugeInvariants { lambda_numerator: num, lambda_denominator: sq.clone(), q: sq.mul(&sq.conj()) })
}

/// Λ and Q coefficients from a 2-jet of λ: value, `λ_z`, `λ_z̄`, `λ_{zz̄}`.
pub fn gauge_invariants_from_jet(l: C64, lz: C64, lzb: C64, lzzb: C64) -> (C64, f64) {
    ((lzzb * l - lz * lzb) / (l * l), l.norm_sqr().powi(2))
}

/// Coordinates `(z, w)` for the adapted-form helpers.
pub fn zw() -> VarTable {
    VarTable::new(&["z", "w"]).expect("valid names")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::nijenhuis::realize_dim4;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn adapted(b: &str) -> ChartStructure {
        ChartStructure::from_rows("m", &["z", "w"], &[("z", &[("dz", "i"), ("dw_", b)]), ("w", &[("dw", "i")])]).unwrap()
    }

    fn realized() -> crate::nijenhuis::AlphaBetaStructure {
        let v = zw();
        realize_dim4(&v, &parse("2*w_ + w_^2", &v).unwrap(), &parse("w", &v).unwrap(), &[c(0.0, 0.0); 2]).unwrap().1
    }

    #[test]
    fn submax_pi_is_integrable() {
        let s = adapted("w");
        let d = derived_distribution(&s, &[c(0.2, 0.1), c(-0.3, 0.4)]).unwrap();
        assert!(!d.rank3, "{}", d.transversality);
        assert_eq!(e_structure(&s, &[c(0.2, 0.1), c(-0.3, 0.4)], None).unwrap_err(), Dim4Error::PiIntegrable);
    }

    #[test]
    fn realized_structure_has_frame() {
        let s = realized();
        let p = [c(0.05, -0.02), c(0.03, 0.04)];
        assert!(derived_distribution(&s, &p).unwrap().rank3);
        let e = e_structure(&s, &p, None).unwrap();
        assert!(e.n13_residual < 1e-6, "{}", e.n13_residual);
        assert!(e.bracket_residual < 1e-6, "{}", e.bracket_residual);
        assert!(e.j_residual < 1e-12);
        assert!(e.determinant.abs() > 1e-6);
        let other = e_structure(&s, &p, Some((1, 3))).unwrap();
        for (u, v) in e.vectors().iter().zip(other.vectors()) {
            assert!((u - &v).norm() < 1e-6, "{u} vs {v}");
        }
    }

    #[test]
    fn quotient_circle_scaling() {
        let s = adapted("w");
        let p = [c(0.1, 0.0), c(0.2, 0.0)];
        let v = RVec::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let a = quotient_circle(&s, &p, &v).unwrap();
        let b = quotient_circle(&s, &p, &(&v * 3.0)).unwrap();
        assert!((b - 9.0 * a).abs() < 1e-9 * b);
        let unit = &v / a.sqrt();
        assert!((quotient_circle(&s, &p, &unit).unwrap() - 1.0).abs() < 1e-12);
        let jv = s.jet_at(&p).unwrap().j * &v;
        assert!((quotient_circle(&s, &p, &jv).unwrap() - a).abs() < 1e-12);
        let vert = RVec::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(quotient_circle(&s, &p, &vert).unwrap_err(), Dim4Error::InPi);
    }

    #[test]
    fn projectibility() {
        let r = projectibility_residual(&adapted("w")).unwrap();
        assert!(r.j_projectible() && r.n_projectible());
        let r = projectibility_residual(&adapted("exp(pi*i*(w + w_))")).unwrap();
        assert!(r.j_projectible() && !r.n_projectible());
        let r = projectibility_residual(&adapted("2")).unwrap();
        assert!(r.j_projectible() && r.n_projectible());
        let bad = ChartStructure::from_rows("m", &["z", "w"], &[("z", &[("dz", "i"), ("dw", "1")]), ("w", &[("dw", "i")])]);
        if let Ok(bad) = bad {
            assert!(matches!(projectibility_residual(&bad), Err(Dim4Error::NotAdapted(_))));
        }
    }

    #[test]
    fn symmetry_residuals() {
        let s = adapted("w");
        let v = zw();
        let (r0, r1) = symmetry_residual(&s, &parse("w", &v).unwrap()).unwrap();
        assert!(r0.is_zero() && r1.is_zero());
        let (r0, r1) = symmetry_residual(&s, &parse("1", &v).unwrap()).unwrap();
        assert!(r0.is_zero());
        assert_eq!(r1.constant_value(), Some(c(0.0, -0.5)));
        let (r0, r1) = symmetry_residual(&s, &CoeffExpr::zero()).unwrap();
        assert!(r0.is_zero() && r1.is_zero());
    }

    #[test]
    fn gauge() {
        let v = VarTable::new(&["z"]).unwrap();
        let g = gauge_invariants(&parse("3", &v).unwrap(), &[vec![c(0.0, 0.0)]]).unwrap();
        assert!(g.lambda_numerator.is_zero());
        let g = gauge_invariants(&parse("exp(z + z_)", &v).unwrap(), &[]).unwrap();
        assert!(g.lambda_numerator.is_zero());
        // λ = (1 + ε z z̄)^{-1/2} at the origin: λ_z = λ_z̄ = 0, λ_{zz̄} = −ε/2
        let eps = 0.3;
        let (lam, q) = gauge_invariants_from_jet(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-eps / 2.0, 0.0));
        assert!((lam - c(-eps / 2.0, 0.0)).norm() < 1e-15 && q == 1.0);
        assert!(matches!(gauge_invariants(&parse("z", &v).unwrap(), &[vec![c(0.0, 0.0)]]), Err(Dim4Error::LambdaZero(0))));
    }
}
