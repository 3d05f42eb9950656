//! Symbols of the symmetry equation of `(J, N_J)`: γ₁, γ₂ and the prolongation
//! tower, characteristic covectors and the kernel bundle.
//!
//! Tensors in `S^k T* ⊗_C T` are stored by complex components `h^m_I`, `I` a sorted
//! multi-index of length k, at position `monomial_index(I) * n + m`. A symbol space is a
//! real subspace of the realification of that coordinate space.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clinalg::{
    complex_basis, complex_image, complex_rank_kernel, complexify_vec, perp_set, rank_and_kernel_ref, realify_vec,
    span_complex, CMat, CVec, RMat, RVec, RealSubspace, DEFAULT_TOL,
};
use crate::nijenhuis::{PointTensor, LOW_CONFIDENCE};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("k_max must be between 1 and 6, got {0}")]
    BadLevel(usize),
    #[error("size guard: n = {n} with k_max = {k} (n > 5 allows k_max <= 4)")]
    TooLarge { n: usize, k: usize },
    #[error("need at least one sample")]
    NoSamples,
}

/// Sorted multi-indices of length `k` over `0..n`.
pub fn monomials(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct SymbolSpace {
    pub n: usize,
    pub degree: usize,
    pub monomials: Vec<Vec<usize>>,
    index: BTreeMap<Vec<usize>, usize>,
    /// Real subspace of R^{2 · complex_len}.
    pub space: RealSubspace,
}

impl SymbolSpace {
    fn new(n: usize, degree: usize, space: RealSubspace) -> Self {
        let monomials = monomials(n, degree);
        let index = monomials.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
        SymbolSpace { n, degree, monomials, index, space }
    }

    fn from_complex(n: usize, degree: usize, vecs: &[CVec]) -> Self {
        let len = monomials(n, degree).len() * n;
        SymbolSpace::new(n, degree, span_complex(len, vecs, 1e-9))
    }

    /// Real dimension.
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Number of complex components.
    pub fn complex_len(&self) -> usize {
        self.monomials.len() * self.n
    }

    /// Position of `h^m_I`; `idx` need not be sorted.
    pub fn position(&self, idx: &[usize], m: usize) -> usize {
        let mut key = idx.to_vec();
        key.sort_unstable();
        self.index[&key] * self.n + m
    }

    pub fn basis(&self) -> Vec<CVec> {
        self.space.basis.iter().map(complexify_vec).collect()
    }

    /// Distance from `h` to the space, relative to `‖h‖`.
    pub fn residual(&self, h: &CVec) -> f64 {
        let r = realify_vec(h);
        let nr = r.norm();
        if nr == 0.0 {
            return 0.0;
        }
        (&r - self.space.project(&r)).norm() / nr
    }

    /// Euclidean distance from `h` to the space.
    pub fn distance(&self, h: &CVec) -> f64 {
        let r = realify_vec(h);
        (&r - self.space.project(&r)).norm()
    }

    pub fn contains(&self, h: &CVec, tol: f64) -> bool {
        self.residual(h) <= tol
    }

    /// Is the space closed under multiplication by i?
    pub fn is_complex(&self) -> bool {
        self.basis().iter().all(|b| self.contains(&b.map(|z| z * I), 1e-8))
    }

    /// For degree ≥ 1: the tensor `h(X_a, ·)` of degree one less.
    pub fn contract(&self, h: &CVec, a: usize) -> CVec {
        let lower = monomials(self.n, self.degree - 1);
        let mut out = CVec::zeros(lower.len() * self.n);
        for (li, mono) in lower.iter().enumerate() {
            let mut full = mono.clone();
            full.push(a);
            for m in 0..self.n {
                out[li * self.n + m] = h[self.position(&full, m)];
            }
        }
        out
    }
}

/// Real linear system in complex unknowns and their conjugates.
struct RealRows {
    cols: usize,
    rows: Vec<RVec>,
}

impl RealRows {
    fn new(complex_unknowns: usize) -> Self {
        RealRows { cols: 2 * complex_unknowns, rows: Vec::new() }
    }

    /// Adds the real and imaginary parts of `Σ a·h_u + b·conj(h_u)`.
    fn push(&mut self, terms: &[(usize, C64, C64)]) {
        let mut re = RVec::zeros(self.cols);
        let mut im = RVec::zeros(self.cols);
        for &(u, a, b) in terms {
            re[2 * u] += a.re + b.re;
            re[2 * u + 1] += -a.im + b.im;
            im[2 * u] += a.im + b.im;
            im[2 * u + 1] += a.re - b.re;
        }
        if re.amax() > 0.0 {
            self.rows.push(re);
        }
        if im.amax() > 0.0 {
            self.rows.push(im);
        }
    }

    fn kernel(&self, tol: f64, scale: f64) -> (RealSubspace, bool) {
        if self.rows.is_empty() {
            return (RealSubspace::full(self.cols), false);
        }
        let m = RMat::from_rows(&self.rows.iter().map(|r| r.transpose()).collect::<Vec<_>>());
        let rk = rank_and_kernel_ref(&m, tol, scale).expect("nonempty");
        (rk.kernel, rk.ambiguous)
    }
}

fn tensor_scale(t: &PointTensor) -> f64 {
    t.max_abs().max(1.0)
}

/// Equations of γ₁, applied to `s·f` for a unit `s` (s = 1 gives γ₁ itself).
fn gamma1_rows(t: &PointTensor, rows: &mut RealRows, s: C64) {
    let n = t.n;
    let u = |i: usize, m: usize| i * n + m;
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let mut terms = Vec::new();
                for m in 0..n {
                    // N(f X_i, X_j) + N(X_i, f X_j)
                    terms.push((u(i, m), ZERO, s.conj() * t.get(m, j, k)));
                    terms.push((u(j, m), ZERO, s.conj() * t.get(i, m, k)));
                }
                for l in 0..n {
                    // − f N(X_i, X_j)
                    terms.push((u(l, k), -s * t.get(i, j, l), ZERO));
                }
                rows.push(&terms);
            }
        }
    }
}

/// `{f ∈ T*⊗_C T : N(fξ,η) + N(ξ,fη) = f N(ξ,η)}`.
pub fn gamma1(t: &PointTensor) -> SymbolSpace {
    let mut rows = RealRows::new(t.n * t.n);
    gamma1_rows(t, &mut rows, C64::new(1.0, 0.0));
    SymbolSpace::new(t.n, 1, rows.kernel(DEFAULT_TOL, tensor_scale(t)).0)
}

/// Largest complex subspace `γ₁ ∩ iγ₁`.
pub fn gamma1_complex_part(t: &PointTensor) -> SymbolSpace {
    let mut rows = RealRows::new(t.n * t.n);
    gamma1_rows(t, &mut rows, C64::new(1.0, 0.0));
    gamma1_rows(t, &mut rows, -I);
    SymbolSpace::new(t.n, 1, rows.kernel(DEFAULT_TOL, tensor_scale(t)).0)
}

/// Symmetric complex-bilinear `h` with
/// `N(h(ξ,η),ζ) + N(η,h(ξ,ζ)) = h(ξ,N(η,ζ))`, solved directly.
pub fn gamma2(t: &PointTensor) -> SymbolSpace {
    let n = t.n;
    let shell = SymbolSpace::new(n, 2, RealSubspace::zero(2));
    let mut rows = RealRows::new(shell.complex_len());
    for s in [C64::new(1.0, 0.0), I] {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for k in 0..n {
                        let mut terms = Vec::new();
                        for m in 0..n {
                            terms.push((shell.position(&[a, b], m), ZERO, s.conj() * t.get(m, c, k)));
                            terms.push((shell.position(&[a, c], m), ZERO, s.conj() * t.get(b, m, k)));
                        }
                        for l in 0..n {
                            terms.push((shell.position(&[a, l], k), -s * t.get(b, c, l), ZERO));
                        }
                        rows.push(&terms);
                    }
                }
            }
        }
    }
    SymbolSpace::new(n, 2, rows.kernel(DEFAULT_TOL, tensor_scale(t)).0)
}

/// Largest value of `|N(h(X_a,X_b),X_c) − N(h(X_a,X_c),X_b)|` over basis elements of a
/// degree-2 space, relative to the element norm.
pub fn njj_residual(t: &PointTensor, g: &SymbolSpace) -> f64 {
    let n = t.n;
    let mut worst: f64 = 0.0;
    for h in g.basis() {
        let val = |a: usize, b: usize| -> Vec<C64> { (0..n).map(|m| h[g.position(&[a, b], m)]).collect() };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut xc = vec![ZERO; n];
                    xc[c] = C64::new(1.0, 0.0);
                    let mut xb = vec![ZERO; n];
                    xb[b] = C64::new(1.0, 0.0);
                    let l = t.apply_complex(&val(a, b), &xc);
                    let r = t.apply_complex(&val(a, c), &xb);
                    let d = l.iter().zip(&r).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                    worst = worst.max(d / h.norm().max(1e-300));
                }
            }
        }
    }
    worst
}

#[derive(Clone, Debug)]
pub struct SymbolTower {
    pub n: usize,
    /// Real dimensions of γ₁ … γ_{k_max}.
    pub dims: Vec<usize>,
    pub levels: Vec<SymbolSpace>,
    pub finite_type: bool,
    /// First level from which the computed dimensions stay constant.
    pub stabilized_at: Option<usize>,
    /// Worst relative residual of `h(X_a, ·) ∈ γ_{k−1}` over all levels.
    pub prolongation_residual: f64,
    pub low_confidence: bool,
}

impl SymbolTower {
    /// Partial sums `Σ_{i ≤ k} dim γ_i`, k = 1 … k_max.
    pub fn hilbert_values(&self) -> Vec<usize> {
        self.dims.iter().scan(0, |acc, d| {
            *acc += d;
            Some(*acc)
        }).collect()
    }
}

/// γ₁ and its prolongations `γ_k = S^k T* ⊗ T ∩ S^{k−1} T* ⊗ γ₁`, k ≤ k_max.
pub fn symbol_tower(t: &PointTensor, k_max: usize) -> Result<SymbolTower, SymbolError> {
    let n = t.n;
    if k_max == 0 || k_max > 6 {
        return Err(SymbolError::BadLevel(k_max));
    }
    if n > 5 && k_max > 4 {
        return Err(SymbolError::TooLarge { n, k: k_max });
    }
    let g1 = gamma1(t);
    let g1c = gamma1_complex_part(t);
    let mut low = false;
    // complex equations cutting out γ₁ ∩ iγ₁ in C^{n²}
    let cb = complex_basis(&g1c.space);
    let eqs: Vec<CVec> = if cb.is_empty() {
        (0..n * n).map(|k| CVec::from_fn(n * n, |r, _| if r == k { C64::new(1.0, 0.0) } else { ZERO })).collect()
    } else {
        let bh = CMat::from_fn(cb.len(), n * n, |r, c| cb[r][c].conj());
        let (_, ker, amb) = complex_rank_kernel(&bh, DEFAULT_TOL, 1.0);
        low |= amb;
        ker.into_iter().map(|x| x.map(|z| z.conj())).collect()
    };
    let mut levels = vec![g1];
    for k in 2..=k_max {
        let prev_zero = levels.last().map(|l| l.dim() == 0).unwrap_or(false);
        let shell = SymbolSpace::new(n, k, RealSubspace::zero(2));
        if prev_zero {
            levels.push(SymbolSpace::new(n, k, RealSubspace::zero(2 * shell.complex_len())));
            continue;
        }
        if eqs.is_empty() {
            let len = shell.complex_len();
            levels.push(SymbolSpace::new(n, k, RealSubspace::full(2 * len)));
            continue;
        }
        let lower = monomials(n, k - 1);
        let mut m = CMat::zeros(lower.len() * eqs.len(), shell.complex_len());
        for (ji, j) in lower.iter().enumerate() {
            for (ei, e) in eqs.iter().enumerate() {
                let row = ji * eqs.len() + ei;
                for i in 0..n {
                    let mut full = j.clone();
                    full.push(i);
                    for mm in 0..n {
                        let coef = e[i * n + mm];
                        if coef != ZERO {
                            m[(row, shell.position(&full, mm))] += coef;
                        }
                    }
                }
            }
        }
        let (_, ker, amb) = complex_rank_kernel(&m, DEFAULT_TOL, 1.0);
        low |= amb;
        levels.push(SymbolSpace::from_complex(n, k, &ker));
    }
    let mut residual: f64 = 0.0;
    for k in 1..levels.len() {
        let (lo, hi) = (&levels[k - 1], &levels[k]);
        for h in hi.basis() {
            for a in 0..n {
                let c = hi.contract(&h, a);
                let ci = c.map(|z| z * I);
                residual = residual.max(lo.distance(&c).max(lo.distance(&ci)) / h.norm());
            }
        }
    }
    let dims: Vec<usize> = levels.iter().map(|l| l.dim()).collect();
    let finite_type = dims.contains(&0);
    let last = *dims.last().expect("k_max >= 1");
    let mut start = dims.len();
    while start > 0 && dims[start - 1] == last {
        start -= 1;
    }
    let stabilized_at = if dims.len() - start >= 2 { Some(start + 1) } else { None };
    Ok(SymbolTower { n, dims, levels, finite_type, stabilized_at, prolongation_residual: residual, low_confidence: low })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CharVarietyReport {
    /// Complex dimension of the characteristic variety; `None` when it is empty.
    pub p_complex: Option<usize>,
    pub components: usize,
    pub kernel_rank_complex: usize,
    pub zeta_real: usize,
    pub samples: usize,
    pub finite_type: bool,
    /// Fraction of samples agreeing with the reported kernel rank.
    pub agreement: f64,
    pub method: String,
    pub phrase: String,
    pub flags: Vec<String>,
    pub notes: Vec<String>,
}

fn phrase(k: usize, p: usize) -> String {
    let f = if k == 1 { "function" } else { "functions" };
    let a = if p == 1 { "argument" } else { "arguments" };
    format!("{k} complex {f} of {p} {a}")
}

/// Characteristic covectors by sampling `ρ ∈ Ann(W)^{1,0}`, `W = Im N`, and computing
/// `K_ρ = {v : N(v, ker ρ) = 0}`. When generic `K_ρ` vanishes the dimensions of the
/// prolongation tower decide instead.
pub fn char_variety(t: &PointTensor, samples: usize, seed: u64) -> Result<CharVarietyReport, SymbolError> {
    if samples == 0 {
        return Err(SymbolError::NoSamples);
    }
    let n = t.n;
    let anti = t.to_antilinear();
    let w = complex_basis(&complex_image(&anti, DEFAULT_TOL));
    let mut report = CharVarietyReport {
        p_complex: None,
        components: 0,
        kernel_rank_complex: 0,
        zeta_real: 0,
        samples,
        finite_type: false,
        agreement: 1.0,
        method: "sampling".into(),
        phrase: String::new(),
        flags: Vec::new(),
        notes: Vec::new(),
    };
    if w.len() == n {
        report.finite_type = true;
        report.phrase = "finite type: no characteristic covectors".into();
        report.notes.push("Im N = T, so Ann(W) = 0".into());
        return Ok(report);
    }
    let ann: Vec<CVec> = if w.is_empty() {
        (0..n).map(|k| CVec::from_fn(n, |r, _| if r == k { C64::new(1.0, 0.0) } else { ZERO })).collect()
    } else {
        // ρ(w) = Σ ρ_i w_i
        let wt = CMat::from_fn(w.len(), n, |r, c| w[r][c]);
        complex_rank_kernel(&wt, DEFAULT_TOL, 1.0).1
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for _ in 0..samples {
        let mut rho = CVec::zeros(n);
        for b in &ann {
            let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            rho += b * c;
        }
        let row = CMat::from_fn(1, n, |_, c| rho[c]);
        let hyper = complex_rank_kernel(&row, DEFAULT_TOL, 0.0).1;
        let k = perp_set(&anti, &span_complex(n, &hyper, DEFAULT_TOL), DEFAULT_TOL);
        *counts.entry(k.dim() / 2).or_default() += 1;
    }
    let (&mode, &hits) = counts.iter().max_by_key(|(d, c)| (**c, **d)).expect("samples > 0");
    report.agreement = hits as f64 / samples as f64;
    if report.agreement < 0.9 {
        report.flags.push(LOW_CONFIDENCE.into());
    }
    if mode > 0 {
        report.p_complex = Some(ann.len());
        report.components = 2;
        report.kernel_rank_complex = mode;
        report.zeta_real = 2 * mode;
        report.phrase = phrase(mode, ann.len());
        return Ok(report);
    }
    report.method = "hilbert".into();
    report.notes.push("generic K_ρ = 0 on Ann(W); dimension read off the prolongation tower".into());
    let k_max = if n > 5 { 4 } else { 6.min(if n > 3 { 5 } else { 6 }) };
    let tower = symbol_tower(t, k_max)?;
    if tower.low_confidence {
        report.flags.push(LOW_CONFIDENCE.into());
    }
    let seq: Vec<i64> = tower.dims[1..].iter().map(|&d| d as i64).collect();
    if tower.finite_type {
        report.finite_type = true;
        report.phrase = "finite type: no characteristic covectors".into();
        return Ok(report);
    }
    // smallest d whose (d+1)-st differences vanish on the computed range
    let mut diffs = seq.clone();
    for d in 0..seq.len().saturating_sub(1) {
        let next: Vec<i64> = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        if next.iter().all(|&x| x == 0) {
            let zeta = diffs[diffs.len() - 1].max(0) as usize;
            report.p_complex = Some(d + 1);
            report.components = 2;
            report.zeta_real = zeta;
            report.kernel_rank_complex = zeta / 2;
            report.phrase = phrase(zeta / 2, d + 1);
            return Ok(report);
        }
        diffs = next;
    }
    report.flags.push(LOW_CONFIDENCE.into());
    report.notes.push(format!("dimension growth {seq:?} not resolved by k = {k_max}"));
    Ok(report)
}

/// Upper bounds `(p, ζ)` (complex) for non-integrable structures in complex dimension n.
pub fn submaximal_bound(n: usize) -> Option<(usize, usize)> {
    if n < 2 {
        return None;
    }
    Some((n - 1, if n <= 3 { n - 1 } else { n - 2 }))
}
