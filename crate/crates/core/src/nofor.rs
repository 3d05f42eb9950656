//! Symmetry test for `J∂z = i∂z + ζ∂w̄, J∂ζ = i∂ζ, J∂w = i∂w`: residuals of the involutive
//! system satisfied by a change of coordinates `(z, ζ, w) ↦ (Z, Ξ, W)`.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::expr::{parse, CoeffExpr, ExprError, VarId, VarTable};

/// Coordinates in the order `(z, ζ, w)`.
pub fn vars() -> VarTable {
    VarTable::new(&["z", "zeta", "w"]).expect("valid names")
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub z: CoeffExpr,
    pub xi: CoeffExpr,
    pub w: CoeffExpr,
    pub c: C64,
}

impl Candidate {
    pub fn parse(z: &str, xi: &str, w: &str, c: C64) -> Result<Candidate, ExprError> {
        let v = vars();
        Ok(Candidate { z: parse(z, &v)?, xi: parse(xi, &v)?, w: parse(w, &v)?, c })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub name: String,
    pub expression: String,
    pub symbolic_zero: bool,
    /// Largest modulus over the sample points.
    pub max_abs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoforReport {
    pub residuals: Vec<Residual>,
    pub is_symmetry: bool,
}

pub fn nofor_residual(cand: &Candidate) -> NoforReport {
    let v = vars();
    let (z, zb, s, sb, w, wb) = (VarId::holo(0), VarId::anti(0), VarId::holo(1), VarId::anti(1), VarId::holo(2), VarId::anti(2));
    let half_i = C64::new(0.0, 0.5);
    let cc = CoeffExpr::constant(cand.c);
    let ccb = CoeffExpr::constant(cand.c.conj());
    let zeta = CoeffExpr::var(s);
    let (zz, zs) = (cand.z.diff(z), cand.z.diff(s));
    let xi_bar = cand.xi.conj();
    let mut named: Vec<(String, CoeffExpr)> = [
        ("jacobian: Z_z Xi_zeta - Z_zeta Xi_z - c", zz.mul(&cand.xi.diff(s)).sub(&zs.mul(&cand.xi.diff(z))).sub(&cc)),
        ("W_w - conj(c)", cand.w.diff(w).sub(&ccb)),
        ("W_wbar", cand.w.diff(wb)),
        (
            "W_zbar - (i/2)(conj(Z_z) conj(Xi) - conj(c) conj(zeta))",
            cand.w.diff(zb).sub(&zz.conj().mul(&xi_bar).sub(&ccb.mul(&zeta.conj())).scale(half_i)),
        ),
        ("W_zetabar - (i/2) conj(Z_zeta) conj(Xi)", cand.w.diff(sb).sub(&zs.conj().mul(&xi_bar).scale(half_i))),
        (
            "d Omega: (Z_z Xi - c zeta)_zeta - (Z_zeta Xi)_z",
            zz.mul(&cand.xi).sub(&cc.mul(&zeta)).diff(s).sub(&zs.mul(&cand.xi).diff(z)),
        ),
    ]
    .into_iter()
    .map(|(n, e)| (n.to_string(), e))
    .collect();
    for (label, f) in [("Z", &cand.z), ("Xi", &cand.xi)] {
        for (dn, d) in [("zbar", zb), ("zetabar", sb), ("w", w), ("wbar", wb)] {
            named.push((format!("{label}_{dn}"), f.diff(d)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let points: Vec<Vec<C64>> =
        (0..8).map(|_| (0..3).map(|_| C64::new(rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7))).collect()).collect();
    let residuals: Vec<Residual> = named
        .into_iter()
        .map(|(name, e)| {
            let max_abs = points.iter().map(|p| e.eval(p).map(|x| x.norm()).unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
            Residual { name, expression: e.to_text(&v), symbolic_zero: e.is_zero(), max_abs }
        })
        .collect();
    let is_symmetry = residuals.iter().all(|r| r.symbolic_zero || r.max_abs < 1e-10);
    NoforReport { residuals, is_symmetry }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn identity_is_a_symmetry() {
        let r = nofor_residual(&Candidate::parse("z", "zeta", "w", one()).unwrap());
        assert!(r.is_symmetry, "{r:?}");
        assert!(r.residuals.iter().all(|x| x.symbolic_zero));
    }

    #[test]
    fn holomorphic_shift_is_a_symmetry() {
        let r = nofor_residual(&Candidate::parse("z", "zeta", "w + z^2*zeta - 3*zeta + exp(z)", one()).unwrap());
        assert!(r.is_symmetry, "{r:?}");
    }

    #[test]
    fn squaring_z_breaks_the_jacobian() {
        let r = nofor_residual(&Candidate::parse("z^2", "zeta", "w", one()).unwrap());
        assert!(!r.is_symmetry);
        assert!(!r.residuals[0].symbolic_zero);
    }
}
