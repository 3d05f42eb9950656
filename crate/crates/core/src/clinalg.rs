//! Linear algebra on realified complex spaces.
//!
//! A complex n-space is stored as R^{2n} with coordinates (x1, y1, ..., xn, yn)
//! and the standard structure J0 ∂x = ∂y, J0 ∂y = −∂x. Complex subspaces are
//! real subspaces invariant under J0.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("tolerance {0} outside (0, 1)")]
    BadTolerance(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("subspace is not J-invariant (residual {0:.3e})")]
    NotJInvariant(f64),
    #[error("tensor invariants violated: skew residual {skew:.3e}, antilinearity residual {antilinear:.3e}")]
    InvariantViolation { skew: f64, antilinear: f64 },
}

/// The standard complex structure on R^{2n}.
pub fn j0(n: usize) -> RMat {
    let mut m = RMat::zeros(2 * n, 2 * n);
    for j in 0..n {
        m[(2 * j + 1, 2 * j)] = 1.0;
        m[(2 * j, 2 * j + 1)] = -1.0;
    }
    m
}

/// A real 2n-dimensional space with a complex structure.
#[derive(Clone, Debug, PartialEq)]
pub struct CpxStructuredSpace {
    pub real_dim: usize,
    pub j: RMat,
}

impl CpxStructuredSpace {
    pub fn standard(n: usize) -> Self {
        CpxStructuredSpace { real_dim: 2 * n, j: j0(n) }
    }
    pub fn complex_dim(&self) -> usize {
        self.real_dim / 2
    }
    /// ‖J² + I‖ (max entry).
    pub fn square_residual(&self) -> f64 {
        (&self.j * &self.j + RMat::identity(self.real_dim, self.real_dim)).amax()
    }
}

#[derive(Clone, Debug)]
pub struct RankKernel {
    pub rank: usize,
    pub kernel: RealSubspace,
    pub singular_values: Vec<f64>,
    /// Some singular value lies within a factor 10 of the threshold.
    pub ambiguous: bool,
}

/// Rank and kernel with threshold `tol · σ_max`.
pub fn rank_and_kernel(m: &RMat, tol: f64) -> Result<RankKernel, LinalgError> {
    rank_and_kernel_ref(m, tol, 0.0)
}

/// Rank and kernel with threshold `tol · max(σ_max, reference)`; the
/// reference scale keeps round-off in a numerically zero matrix from
/// registering as rank.
pub fn rank_and_kernel_ref(m: &RMat, tol: f64, reference: f64) -> Result<RankKernel, LinalgError> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(LinalgError::EmptyMatrix);
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(LinalgError::BadTolerance(tol));
    }
    let cols = m.ncols();
    let padded = if m.nrows() < cols {
        let mut p = RMat::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let thr = tol * smax.max(reference);
    let mut kernel = Vec::new();
    let mut rank = 0;
    let mut ambiguous = false;
    for (k, s) in sv.iter().enumerate() {
        if *s > thr {
            rank += 1;
        } else {
            kernel.push(vt.row(k).transpose());
        }
        if thr > 0.0 && *s > thr / 10.0 && *s < thr * 10.0 {
            ambiguous = true;
        }
    }
    let mut sorted = sv.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(RankKernel { rank, kernel: RealSubspace { ambient: cols, basis: kernel }, singular_values: sorted, ambiguous })
}

/// Subspace of R^ambient with an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct RealSubspace {
    pub ambient: usize,
    pub basis: Vec<RVec>,
}

impl RealSubspace {
    pub fn zero(ambient: usize) -> Self {
        RealSubspace { ambient, basis: vec![] }
    }

    pub fn full(ambient: usize) -> Self {
        RealSubspace { ambient, basis: (0..ambient).map(|k| RVec::from_fn(ambient, |r, _| if r == k { 1.0 } else { 0.0 })).collect() }
    }

    /// Span of `vectors`, dropping directions below `tol · max(σ_max, scale)`.
    pub fn from_spanning(ambient: usize, vectors: &[RVec], tol: f64, scale: f64) -> Self {
        if vectors.is_empty() {
            return RealSubspace::zero(ambient);
        }
        let m = RMat::from_columns(vectors);
        let svd = m.svd(true, false);
        let u = svd.u.expect("requested U");
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let thr = tol * smax.max(scale);
        let basis = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s > thr && **s > 0.0)
            .map(|(k, _)| u.column(k).into_owned())
            .collect();
        RealSubspace { ambient, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Matrix whose columns are the basis vectors (ambient × dim).
    pub fn matrix(&self) -> RMat {
        if self.basis.is_empty() {
            RMat::zeros(self.ambient, 0)
        } else {
            RMat::from_columns(&self.basis)
        }
    }

    pub fn projector(&self) -> RMat {
        let q = self.matrix();
        &q * q.transpose()
    }

    pub fn project(&self, v: &RVec) -> RVec {
        let mut out = RVec::zeros(self.ambient);
        for b in &self.basis {
            out += b * b.dot(v);
        }
        out
    }

    pub fn contains(&self, v: &RVec, tol: f64) -> bool {
        (v - self.project(v)).norm() <= tol * v.norm()
    }

    /// ‖(I − P) J P‖ for the given structure.
    pub fn j_invariance_residual(&self, j: &RMat) -> f64 {
        self.basis.iter().map(|b| {
            let jb = j * b;
            (&jb - self.project(&jb)).norm()
        }).fold(0.0, f64::max)
    }

    /// Complex dimension, after checking J0-invariance.
    pub fn complex_dim(&self, tol: f64) -> Result<usize, LinalgError> {
        let r = self.j_invariance_residual(&j0(self.ambient / 2));
        if r > tol.max(1e-12) {
            return Err(LinalgError::NotJInvariant(r));
        }
        Ok(self.dim() / 2)
    }

    pub fn complement(&self) -> RealSubspace {
        let p = RMat::identity(self.ambient, self.ambient) - self.projector();
        let cols: Vec<RVec> = (0..self.ambient).map(|k| p.column(k).into_owned()).collect();
        RealSubspace::from_spanning(self.ambient, &cols, 1e-8, 1.0)
    }

    pub fn sum(&self, o: &RealSubspace) -> RealSubspace {
        let mut v = self.basis.clone();
        v.extend(o.basis.iter().cloned());
        RealSubspace::from_spanning(self.ambient, &v, 1e-9, 1.0)
    }

    pub fn intersect(&self, o: &RealSubspace) -> RealSubspace {
        self.complement().sum(&o.complement()).complement()
    }

    pub fn is_subspace_of(&self, o: &RealSubspace, tol: f64) -> bool {
        self.basis.iter().all(|b| o.contains(b, tol))
    }

    /// Principal angles (radians, ascending). Empty if either subspace is zero.
    pub fn principal_angles(&self, o: &RealSubspace) -> Vec<f64> {
        if self.dim() == 0 || o.dim() == 0 {
            return vec![];
        }
        let m = self.matrix().transpose() * o.matrix();
        let sv = m.singular_values();
        let mut ang: Vec<f64> = sv.iter().map(|s| s.clamp(-1.0, 1.0).acos()).collect();
        ang.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ang
    }

    /// Largest principal angle; π/2 when dimensions differ.
    pub fn max_principal_angle(&self, o: &RealSubspace) -> f64 {
        if self.dim() != o.dim() {
            return std::f64::consts::FRAC_PI_2;
        }
        if self.dim() == 0 {
            return 0.0;
        }
        // sin of angles from the residual is more accurate near zero than acos
        let r = self.basis.iter().map(|b| (b - o.project(b)).norm()).fold(0.0, f64::max);
        let a = self.principal_angles(o).last().copied().unwrap_or(0.0);
        if r < 1e-4 {
            r.asin()
        } else {
            a
        }
    }
}

/// Realified skew (2,1)-tensor: `A[a][u][v] = N(e_u, e_v)_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct AntilinearMap2 {
    pub n: usize,
    values: Vec<f64>,
}

impl AntilinearMap2 {
    pub fn zeros(n: usize) -> Self {
        let d = 2 * n;
        AntilinearMap2 { n, values: vec![0.0; d * d * d] }
    }

    /// Builds from `f(u, v) = N(e_u, e_v)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> RVec) -> Self {
        let d = 2 * n;
        let mut m = AntilinearMap2::zeros(n);
        for u in 0..d {
            for v in 0..d {
                let col = f(u, v);
                for a in 0..d {
                    m.set(a, u, v, col[a]);
                }
            }
        }
        m
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    fn idx(&self, a: usize, u: usize, v: usize) -> usize {
        let d = self.real_dim();
        (a * d + u) * d + v
    }

    pub fn get(&self, a: usize, u: usize, v: usize) -> f64 {
        self.values[self.idx(a, u, v)]
    }

    pub fn set(&mut self, a: usize, u: usize, v: usize, x: f64) {
        let i = self.idx(a, u, v);
        self.values[i] = x;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn basis_value(&self, u: usize, v: usize) -> RVec {
        let d = self.real_dim();
        RVec::from_fn(d, |a, _| self.get(a, u, v))
    }

    pub fn apply(&self, x: &RVec, y: &RVec) -> RVec {
        let d = self.real_dim();
        let mut out = RVec::zeros(d);
        for u in 0..d {
            if x[u] == 0.0 {
                continue;
            }
            for v in 0..d {
                if y[v] == 0.0 {
                    continue;
                }
                let s = x[u] * y[v];
                for a in 0..d {
                    out[a] += s * self.get(a, u, v);
                }
            }
        }
        out
    }

    /// Matrix of `v ↦ N(x, v)`.
    pub fn left_matrix(&self, x: &RVec) -> RMat {
        let d = self.real_dim();
        let mut m = RMat::zeros(d, d);
        for u in 0..d {
            if x[u] == 0.0 {
                continue;
            }
            for v in 0..d {
                for a in 0..d {
                    m[(a, v)] += x[u] * self.get(a, u, v);
                }
            }
        }
        m
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    pub fn sub(&self, o: &AntilinearMap2) -> AntilinearMap2 {
        AntilinearMap2 { n: self.n, values: self.values.iter().zip(&o.values).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: f64) -> AntilinearMap2 {
        AntilinearMap2 { n: self.n, values: self.values.iter().map(|a| a * s).collect() }
    }

    /// (skew residual, antilinearity residual), both absolute.
    pub fn residuals(&self) -> (f64, f64) {
        self.residuals_wrt(&j0(self.n))
    }

    /// Residuals with antilinearity taken with respect to `j`.
    pub fn residuals_wrt(&self, j: &RMat) -> (f64, f64) {
        let d = self.real_dim();
        let mut skew: f64 = 0.0;
        let mut anti: f64 = 0.0;
        for u in 0..d {
            for v in 0..d {
                let nuv = self.basis_value(u, v);
                let nvu = self.basis_value(v, u);
                skew = skew.max((&nuv + &nvu).amax());
                let ju = j.column(u).into_owned();
                let ev = RVec::from_fn(d, |r, _| if r == v { 1.0 } else { 0.0 });
                let lhs = self.apply(&ju, &ev);
                let rhs = -(j * &nuv);
                anti = anti.max((lhs - rhs).amax());
            }
        }
        (skew, anti)
    }

    /// Checks skewness and antilinearity within `1e-9 · ‖A‖`.
    pub fn check(&self) -> Result<(), LinalgError> {
        let (skew, antilinear) = self.residuals();
        let tol = 1e-9 * self.norm().max(1e-300);
        if skew > tol || antilinear > tol {
            return Err(LinalgError::InvariantViolation { skew, antilinear });
        }
        Ok(())
    }
}

impl AntilinearMap2 {
    /// `(u, v) ↦ P⁻¹ N(Pu, Pv)`.
    pub fn pull_back(&self, p: &RMat, p_inv: &RMat) -> AntilinearMap2 {
        AntilinearMap2::from_fn(self.n, |u, v| p_inv * self.apply(&p.column(u).into_owned(), &p.column(v).into_owned()))
    }
}

/// Frame `P` with `J P = P J0`, orthonormal for the hermitian metric `(⟨x,y⟩ + ⟨Jx,Jy⟩)/2`.
/// Returns the identity when `j = J0`.
pub fn adapted_frame(j: &RMat) -> RMat {
    let d = j.nrows();
    let g = |x: &RVec, y: &RVec| (x.dot(y) + (j * x).dot(&(j * y))) / 2.0;
    let mut cols: Vec<RVec> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut best: Option<(f64, RVec)> = None;
        for m in 0..d {
            let mut r = RVec::from_fn(d, |k, _| if k == m { 1.0 } else { 0.0 });
            for c in &cols {
                let a = g(&r, c);
                r -= c * a;
            }
            let nr = g(&r, &r).sqrt();
            if best.as_ref().map_or(true, |(b, _)| nr > *b + 1e-12) {
                best = Some((nr, r / nr));
            }
        }
        let (_, v) = best.expect("nonempty");
        let jv = j * &v;
        cols.push(v);
        cols.push(jv);
    }
    RMat::from_columns(&cols)
}

/// Smallest J0-invariant subspace containing every `N(e_u, e_v)`.
pub fn complex_image(n: &AntilinearMap2, tol: f64) -> RealSubspace {
    let d = n.real_dim();
    let j = j0(n.n);
    let mut vecs = Vec::new();
    for u in 0..d {
        for v in u + 1..d {
            let x = n.basis_value(u, v);
            vecs.push(&j * &x);
            vecs.push(x);
        }
    }
    RealSubspace::from_spanning(d, &vecs, tol, n.frobenius())
}

/// `{v : N(v, s) = 0 for all s ∈ S}`.
pub fn perp_set(n: &AntilinearMap2, s: &RealSubspace, tol: f64) -> RealSubspace {
    let d = n.real_dim();
    if s.dim() == 0 {
        return RealSubspace::full(d);
    }
    let mut stack = RMat::zeros(d * s.dim(), d);
    for (k, b) in s.basis.iter().enumerate() {
        // column u: N(e_u, b)
        for u in 0..d {
            let eu = RVec::from_fn(d, |r, _| if r == u { 1.0 } else { 0.0 });
            let col = n.apply(&eu, b);
            for a in 0..d {
                stack[(k * d + a, u)] = col[a];
            }
        }
    }
    rank_and_kernel_ref(&stack, tol, n.frobenius()).expect("nonempty").kernel
}

/// Real span of `N(p, q)` for p ∈ P, q ∈ Q.
pub fn image_of_pairs(n: &AntilinearMap2, p: &RealSubspace, q: &RealSubspace, tol: f64) -> RealSubspace {
    let mut vecs = Vec::new();
    for a in &p.basis {
        for b in &q.basis {
            vecs.push(n.apply(a, b));
        }
    }
    RealSubspace::from_spanning(n.real_dim(), &vecs, tol, n.frobenius())
}

/// Complex coordinates to realified coordinates.
pub fn realify_vec(c: &CVec) -> RVec {
    RVec::from_fn(2 * c.len(), |r, _| if r % 2 == 0 { c[r / 2].re } else { c[r / 2].im })
}

pub fn complexify_vec(r: &RVec) -> CVec {
    CVec::from_fn(r.len() / 2, |j, _| C64::new(r[2 * j], r[2 * j + 1]))
}

/// Largest entry modulus of a complex matrix.
pub fn cmax(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// Realification of a complex-linear map.
pub fn realify_mat(m: &CMat) -> RMat {
    let mut r = RMat::zeros(2 * m.nrows(), 2 * m.ncols());
    for a in 0..m.nrows() {
        for b in 0..m.ncols() {
            let z = m[(a, b)];
            r[(2 * a, 2 * b)] = z.re;
            r[(2 * a, 2 * b + 1)] = -z.im;
            r[(2 * a + 1, 2 * b)] = z.im;
            r[(2 * a + 1, 2 * b + 1)] = z.re;
        }
    }
    r
}

/// Real subspace spanned by complex vectors and their multiples by i.
pub fn span_complex(n: usize, vecs: &[CVec], tol: f64) -> RealSubspace {
    let mut real = Vec::new();
    for v in vecs {
        real.push(realify_vec(v));
        real.push(realify_vec(&v.map(|z| z * C64::new(0.0, 1.0))));
    }
    let scale = vecs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    RealSubspace::from_spanning(2 * n, &real, tol, scale)
}

/// A complex orthonormal basis of a J0-invariant real subspace.
pub fn complex_basis(s: &RealSubspace) -> Vec<CVec> {
    let mut out: Vec<CVec> = Vec::new();
    for b in &s.basis {
        let mut c = complexify_vec(b);
        for q in &out {
            let proj = q.dotc(&c);
            c -= q * proj;
        }
        let nrm = c.norm();
        if nrm > 1e-6 {
            out.push(c / C64::new(nrm, 0.0));
        }
    }
    out
}

/// Complex kernel of a complex matrix, via its realification.
pub fn complex_kernel(m: &CMat, tol: f64) -> Vec<CVec> {
    complex_kernel_ref(m, tol, 0.0)
}

/// Complex kernel with threshold `tol · max(σ_max, reference)`.
pub fn complex_kernel_ref(m: &CMat, tol: f64, reference: f64) -> Vec<CVec> {
    let r = realify_mat(m);
    let rk = rank_and_kernel_ref(&r, tol, reference).expect("nonempty");
    complex_basis(&rk.kernel)
}

/// Rank and complex kernel from a complex SVD, threshold `tol · max(σ_max, reference)`.
pub fn complex_rank_kernel(m: &CMat, tol: f64, reference: f64) -> (usize, Vec<CVec>, bool) {
    let cols = m.ncols();
    let padded = if m.nrows() < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thr = tol * smax.max(reference);
    let mut rank = 0;
    let mut kernel = Vec::new();
    let mut ambiguous = false;
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s > thr {
            rank += 1;
        } else {
            kernel.push(vt.row(k).adjoint());
        }
        if thr > 0.0 && *s > thr / 10.0 && *s < thr * 10.0 {
            ambiguous = true;
        }
    }
    (rank, kernel, ambiguous)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_zero() {
        let rk = rank_and_kernel(&RMat::identity(4, 4), 1e-9).unwrap();
        assert_eq!((rk.rank, rk.kernel.dim()), (4, 0));
        let rk = rank_and_kernel(&RMat::zeros(4, 4), 1e-9).unwrap();
        assert_eq!((rk.rank, rk.kernel.dim()), (0, 4));
        assert!(rank_and_kernel(&RMat::zeros(0, 3), 1e-9).is_err());
        assert!(rank_and_kernel(&RMat::zeros(2, 2), 1.5).is_err());
    }

    #[test]
    fn wide_matrix_kernel_is_complete() {
        let m = RMat::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let rk = rank_and_kernel(&m, 1e-9).unwrap();
        assert_eq!(rk.rank, 1);
        assert_eq!(rk.kernel.dim(), 2);
        for b in &rk.kernel.basis {
            assert!((&m * b).norm() < 1e-12);
        }
    }

    #[test]
    fn intersection_and_angles() {
        let e = |k: usize| RVec::from_fn(3, |r, _| if r == k { 1.0 } else { 0.0 });
        let a = RealSubspace::from_spanning(3, &[e(0), e(1)], 1e-9, 0.0);
        let b = RealSubspace::from_spanning(3, &[e(1), e(2)], 1e-9, 0.0);
        let c = a.intersect(&b);
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&e(1), 1e-12));
        assert!(a.max_principal_angle(&a) < 1e-12);
        assert!((a.max_principal_angle(&b) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn realification_respects_j0() {
        let m = CMat::from_row_slice(2, 2, &[C64::new(1.0, 2.0), C64::new(0.0, -1.0), C64::new(3.0, 0.5), C64::new(-2.0, 1.0)]);
        let r = realify_mat(&m);
        let j = j0(2);
        assert!((&r * &j - &j * &r).amax() < 1e-15);
        let v = CVec::from_vec(vec![C64::new(0.3, -1.0), C64::new(2.0, 0.1)]);
        assert!((realify_vec(&(&m * &v)) - &r * realify_vec(&v)).amax() < 1e-14);
    }
}
