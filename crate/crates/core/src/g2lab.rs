//! Complex dimension 3 with non-degenerate N: the invariant Hermitian data (h, ω, ς, σ, Ω),
//! and the 14-dimensional bracket algebras `h ⊕ m` with `h = su(3)` or `su(2,1)`, `m = C³`.
//!
//! Everything here is exact Gaussian-rational arithmetic.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::exact::{gaussian_solve, rat, symmetric_signature, Gaussian, Poly};
use crate::nijenhuis::PointTensor;

type G = Gaussian;
type Mat3 = Vec<Vec<G>>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum G2Error {
    #[error("hermitian data needs complex dimension 3, got {0}")]
    NotDim3(usize),
    #[error("hermitian data needs exact coefficients; give N as rationals, not floats")]
    NotExact,
    #[error("Jacobi identity fails on {0} triples; the Killing form needs a Lie algebra")]
    NotLie(usize),
}

fn ri(n: i64) -> BigRational {
    rat(n, 1)
}

// ---------------------------------------------------------------------------
// Hermitian data

#[derive(Clone, Debug)]
pub struct HermitianData {
    /// Trace-formula values on the real basis `(x₁, y₁, x₂, y₂, x₃, y₃)`.
    pub h_raw: Vec<Vec<BigRational>>,
    /// `h_raw · scale`, with the scale fixed by `h(∂x₁, ∂x₁) = 1`.
    pub h: Vec<Vec<BigRational>>,
    pub scale: Option<BigRational>,
    pub omega: Vec<Vec<BigRational>>,
    /// (plus, minus, zero)
    pub signature: (usize, usize, usize),
    /// `ς_abc = ς(X_a, X_b, X_c)` on the complex basis, index `(a·3 + b)·3 + c`.
    pub varsigma: Vec<G>,
    /// Coefficient `s` in `σ = s dz₁∧dz₂∧dz₃`.
    pub sigma: G,
    /// `ω³/3` in units of `dx₁∧dy₁∧dx₂∧dy₂∧dx₃∧dy₃`.
    pub omega_vol: BigRational,
    /// `(i/4) σ∧σ̄` in the same units.
    pub sigma_vol: BigRational,
    pub flags: Vec<String>,
}

/// Normalization of σ against the alternation `(1/6) Σ sgn(π) ς∘π`.
pub const SIGMA_NORM_SQ: i64 = 1;

impl HermitianData {
    pub fn identity_residual(&self) -> BigRational {
        &self.omega_vol - &self.sigma_vol
    }

    pub fn to_json(&self) -> serde_json::Value {
        let m = |a: &Vec<Vec<BigRational>>| -> Vec<Vec<String>> { a.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect() };
        json!({
            "h_raw": m(&self.h_raw),
            "h": m(&self.h),
            "scale": self.scale.as_ref().map(|s| s.to_string()),
            "omega": m(&self.omega),
            "signature": [self.signature.0, self.signature.1],
            "degenerate_directions": self.signature.2,
            "sigma": self.sigma.to_string(),
            "sigma_norm_sq": SIGMA_NORM_SQ.to_string(),
            "Omega_from_omega": self.omega_vol.to_string(),
            "Omega_from_sigma": self.sigma_vol.to_string(),
            "identity_residual": self.identity_residual().to_string(),
            "flags": self.flags,
        })
    }
}

fn real_vec(c: &[G]) -> Vec<BigRational> {
    c.iter().flat_map(|z| [z.re.clone(), z.im.clone()]).collect()
}

fn basis_complex(p: usize) -> Vec<G> {
    let mut v = vec![G::zero(); 3];
    v[p / 2] = if p % 2 == 0 { G::one() } else { G::i() };
    v
}

fn pfaffian(a: &[Vec<BigRational>], idx: &[usize]) -> BigRational {
    if idx.is_empty() {
        return BigRational::one();
    }
    let first = idx[0];
    let mut acc = BigRational::zero();
    for (pos, &j) in idx.iter().enumerate().skip(1) {
        if a[first][j].is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx.iter().copied().filter(|&x| x != first && x != j).collect();
        let term = &a[first][j] * pfaffian(a, &rest);
        if pos % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// `h(ξ,η) = Tr_ℝ[N(ξ,N(η,·)) + N(η,N(ξ,·))]` and the forms built from it.
pub fn hermitian_data(t: &PointTensor) -> Result<HermitianData, G2Error> {
    if t.n != 3 {
        return Err(G2Error::NotDim3(t.n));
    }
    if !t.is_exact() {
        return Err(G2Error::NotExact);
    }
    let c = |i: usize, j: usize, k: usize| t.exact(i, j, k).expect("exact").clone();
    // real trace of u ↦ N(ξ, N(η, u)) is 2 Re Σ conj(ξ_a) η_i conj(c_ij^k) c_ak^j
    let tr = |xi: &[G], eta: &[G]| -> BigRational {
        let mut s = G::zero();
        for a in 0..3 {
            for i in 0..3 {
                let coef = &xi[a].conj() * &eta[i];
                if coef.is_zero() {
                    continue;
                }
                for j in 0..3 {
                    for k in 0..3 {
                        s += &(&coef * &(&c(i, j, k).conj() * &c(a, k, j)));
                    }
                }
            }
        }
        s.re * ri(2)
    };
    let h_raw: Vec<Vec<BigRational>> = (0..6)
        .map(|p| {
            (0..6)
                .map(|q| {
                    let (x, y) = (basis_complex(p), basis_complex(q));
                    tr(&x, &y) + tr(&y, &x)
                })
                .collect()
        })
        .collect();
    let mut flags = Vec::new();
    let scale = (0..6).map(|p| h_raw[p][p].clone()).find(|d| !d.is_zero()).map(|d| d.recip());
    if scale.is_none() {
        flags.push("h has zero diagonal; left unnormalized".to_string());
    }
    let s = scale.clone().unwrap_or_else(BigRational::one);
    let h: Vec<Vec<BigRational>> = h_raw.iter().map(|r| r.iter().map(|x| x * &s).collect()).collect();
    let signature = symmetric_signature(&h);
    if signature.2 > 0 {
        flags.push("h degenerate; σ normalization skipped".to_string());
    }
    // ω(ξ,η) = h(Jξ,η), J e_{2j} = e_{2j+1}, J e_{2j+1} = −e_{2j}
    let jrow = |p: usize| -> (usize, BigRational) { if p % 2 == 0 { (p + 1, ri(1)) } else { (p - 1, ri(-1)) } };
    let omega: Vec<Vec<BigRational>> = (0..6)
        .map(|p| {
            let (r, sg) = jrow(p);
            (0..6).map(|q| &sg * &h[r][q]).collect()
        })
        .collect();
    // ς(X,Y,Z) = h(N(X,Y), Z) − i h(N(X,Y), JZ)
    let mut varsigma = vec![G::zero(); 27];
    for a in 0..3 {
        for b in 0..3 {
            let w = real_vec(&(0..3).map(|k| c(a, b, k)).collect::<Vec<_>>());
            for cc in 0..3 {
                let hw = |q: usize| -> BigRational { (0..6).map(|r| &w[r] * &h[r][q]).fold(BigRational::zero(), |x, y| x + y) };
                varsigma[(a * 3 + b) * 3 + cc] = G::new(hw(2 * cc), -hw(2 * cc + 1));
            }
        }
    }
    let perms: [([usize; 3], i64); 6] = [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([1, 0, 2], -1), ([0, 2, 1], -1), ([2, 1, 0], -1)];
    let mut sigma = G::zero();
    for (p, sg) in perms {
        let v = varsigma[(p[0] * 3 + p[1]) * 3 + p[2]].scale(&rat(sg, 6));
        sigma += &v;
    }
    // ω³ = 3!·Pf(ω) vol and dz₁₂₃∧dz̄₁₂₃ = −8i vol
    let omega_vol = pfaffian(&omega, &[0, 1, 2, 3, 4, 5]) * ri(2);
    let sigma_vol = if signature.2 > 0 { BigRational::zero() } else { sigma.norm_sqr() * ri(2 * SIGMA_NORM_SQ) };
    Ok(HermitianData { h_raw, h, scale, omega, signature, varsigma, sigma, omega_vol, sigma_vol, flags })
}

// ---------------------------------------------------------------------------
// 14-dimensional algebras

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    Su3,
    Su21,
    /// All structure constants zero.
    Abelian,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CaseTag::Su3 => "su3",
            CaseTag::Su21 => "su21",
            CaseTag::Abelian => "abelian",
        })
    }
}

impl std::str::FromStr for CaseTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace(['(', ')', ',', '-', '_'], "").as_str() {
            "su3" => Ok(CaseTag::Su3),
            "su21" => Ok(CaseTag::Su21),
            "abelian" => Ok(CaseTag::Abelian),
            other => Err(format!("unknown case {other:?}; expected su3, su21 or abelian")),
        }
    }
}

pub const DIM: usize = 14;

/// Basis: eight generators of `h` (3×3 matrices acting on `C³`), then `x₁, y₁, x₂, y₂, x₃, y₃`.
#[derive(Clone, Debug)]
pub struct Algebra14 {
    pub case: CaseTag,
    pub k: BigRational,
    pub labels: Vec<String>,
    h_gens: Vec<Mat3>,
    c: Vec<G>,
}

fn m3_zero() -> Mat3 {
    vec![vec![G::zero(); 3]; 3]
}

fn unit(a: usize, b: usize, v: G) -> Mat3 {
    let mut m = m3_zero();
    m[a][b] = v;
    m
}

fn m3_add(a: &Mat3, b: &Mat3) -> Mat3 {
    (0..3).map(|i| (0..3).map(|j| &a[i][j] + &b[i][j]).collect()).collect()
}

fn m3_scale(a: &Mat3, s: &G) -> Mat3 {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

fn m3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    (0..3)
        .map(|i| (0..3).map(|j| (0..3).fold(G::zero(), |acc, k| &acc + &(&a[i][k] * &b[k][j]))).collect())
        .collect()
}

fn m3_comm(a: &Mat3, b: &Mat3) -> Mat3 {
    let (ab, ba) = (m3_mul(a, b), m3_mul(b, a));
    (0..3).map(|i| (0..3).map(|j| &ab[i][j] - &ba[i][j]).collect()).collect()
}

fn m3_vec(a: &Mat3, v: &[G]) -> Vec<G> {
    (0..3).map(|i| (0..3).fold(G::zero(), |acc, k| &acc + &(&a[i][k] * &v[k]))).collect()
}

fn diag(d: [i64; 3], s: &G) -> Mat3 {
    let mut m = m3_zero();
    for i in 0..3 {
        m[i][i] = &G::from_int(d[i]) * s;
    }
    m
}

/// Rational generators of su(3), or of su(2,1) for the form `diag(1, 1, −1)`.
fn h_generators(case: CaseTag) -> (Vec<Mat3>, Vec<String>) {
    let i = G::i();
    let mut gens = Vec::new();
    let mut labels = Vec::new();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let indefinite = case == CaseTag::Su21 && b == 2;
        let (s1, s2) = if indefinite { (G::one(), G::one()) } else { (G::one(), -G::one()) };
        let sym = m3_add(&unit(a, b, i.clone()), &unit(b, a, &i * &s1));
        let anti = m3_add(&unit(a, b, G::one()), &unit(b, a, s2));
        let (la, lb) = (a + 1, b + 1);
        if indefinite {
            gens.push(m3_add(&unit(a, b, i.clone()), &unit(b, a, -i.clone())));
            labels.push(format!("i(E{la}{lb}-E{lb}{la})"));
            gens.push(anti);
            labels.push(format!("E{la}{lb}+E{lb}{la}"));
        } else {
            gens.push(sym);
            labels.push(format!("i(E{la}{lb}+E{lb}{la})"));
            gens.push(anti);
            labels.push(format!("E{la}{lb}-E{lb}{la}"));
        }
    }
    gens.push(diag([1, -1, 0], &i));
    labels.push("i(E11-E22)".into());
    gens.push(diag([0, 1, -1], &i));
    labels.push("i(E22-E33)".into());
    (gens, labels)
}

/// `(1,0)`-block of the `h`-part of `[∂z_a, ∂̄z_b]`.
fn mixed_bracket(case: CaseTag, k: &G, a: usize, b: usize) -> Mat3 {
    match case {
        CaseTag::Abelian => m3_zero(),
        CaseTag::Su3 => {
            let mut m = unit(a, b, G::from_int(-3));
            if a == b {
                m = m3_add(&m, &diag([1, 1, 1], &G::one()));
            }
            m
        }
        CaseTag::Su21 => {
            if a == b {
                let d = match a {
                    0 => [0, 1, -1],
                    1 => [1, 0, -1],
                    _ => [-1, -1, 2],
                };
                return diag(d, k);
            }
            // −k E_ab when both indices are ≤ 2 or a = 3, +k E_ab when b = 3
            let s = if b == 2 { k.clone() } else { -k.clone() };
            unit(a, b, s)
        }
    }
}

fn cross(c: &[G], d: &[G]) -> Vec<G> {
    vec![&(&c[1] * &d[2]) - &(&c[2] * &d[1]), &(&c[2] * &d[0]) - &(&c[0] * &d[2]), &(&c[0] * &d[1]) - &(&c[1] * &d[0])]
}

struct Elem {
    a: Mat3,
    c: Vec<G>,
}

impl Algebra14 {
    pub fn build(case: CaseTag, k: BigRational) -> Algebra14 {
        let (h_gens, mut labels) = h_generators(case);
        for j in 1..=3 {
            labels.push(format!("x{j}"));
            labels.push(format!("y{j}"));
        }
        let mut alg = Algebra14 { case, k, labels, h_gens, c: vec![G::zero(); DIM * DIM * DIM] };
        if case == CaseTag::Abelian {
            return alg;
        }
        let kk = G::from_rat(alg.k.clone());
        let mixed: Vec<Vec<Mat3>> = (0..3).map(|a| (0..3).map(|b| mixed_bracket(case, &kk, a, b)).collect()).collect();
        let elems: Vec<Elem> = (0..DIM).map(|p| alg.elem(p)).collect();
        for p in 0..DIM {
            for q in p + 1..DIM {
                let (x, y) = (&elems[p], &elems[q]);
                // [A + c, B + d] = [A,B] + Σ w_ab M_ab + A d − B c + 2 conj(c × d)
                let mut a = m3_comm(&x.a, &y.a);
                for ia in 0..3 {
                    for ib in 0..3 {
                        let w = &(&x.c[ia] * &y.c[ib].conj()) - &(&y.c[ia] * &x.c[ib].conj());
                        if !w.is_zero() {
                            a = m3_add(&a, &m3_scale(&mixed[ia][ib], &w));
                        }
                    }
                }
                let ad = m3_vec(&x.a, &y.c);
                let bc = m3_vec(&y.a, &x.c);
                let cr = cross(&x.c, &y.c);
                let mv: Vec<G> = (0..3).map(|j| &(&ad[j] - &bc[j]) + &cr[j].conj().scale(&ri(2))).collect();
                for (r, v) in alg.coords(&a, &mv).into_iter().enumerate() {
                    alg.c[(q * DIM + p) * DIM + r] = -&v;
                    alg.c[(p * DIM + q) * DIM + r] = v;
                }
            }
        }
        alg
    }

    pub fn abelian() -> Algebra14 {
        Algebra14::build(CaseTag::Abelian, BigRational::zero())
    }

    fn elem(&self, p: usize) -> Elem {
        if p < 8 {
            Elem { a: self.h_gens[p].clone(), c: vec![G::zero(); 3] }
        } else {
            Elem { a: m3_zero(), c: basis_complex(p - 8) }
        }
    }

    /// Coordinates of `A + c` in the basis; `A` must lie in `h`.
    fn coords(&self, a: &Mat3, c: &[G]) -> Vec<G> {
        let rows: Vec<Vec<G>> = (0..9).map(|e| self.h_gens.iter().map(|gm| gm[e / 3][e % 3].clone()).collect()).collect();
        let rhs: Vec<G> = (0..9).map(|e| a[e / 3][e % 3].clone()).collect();
        let mut out = if rhs.iter().all(G::is_zero) {
            vec![G::zero(); 8]
        } else {
            let sol = gaussian_solve(&rows, &rhs).expect("bracket lands in h");
            assert!(sol.iter().all(G::is_real), "bracket lands in the real form of h");
            sol
        };
        out.extend(real_vec(c).into_iter().map(G::from_rat));
        out
    }

    /// `[e_i, e_j]` as a coordinate vector.
    pub fn structure(&self, i: usize, j: usize) -> &[G] {
        &self.c[(i * DIM + j) * DIM..(i * DIM + j + 1) * DIM]
    }

    /// Bilinear extension of the bracket to Gaussian coordinate vectors.
    pub fn bracket(&self, x: &[G], y: &[G]) -> Vec<G> {
        let mut out = vec![G::zero(); DIM];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let s = xi * yj;
                for (r, cr) in self.structure(i, j).iter().enumerate() {
                    if !cr.is_zero() {
                        out[r] += &(&s * cr);
                    }
                }
            }
        }
        out
    }

    pub fn jacobiator(&self, x: &[G], y: &[G], z: &[G]) -> Vec<G> {
        let a = self.bracket(x, &self.bracket(y, z));
        let b = self.bracket(y, &self.bracket(z, x));
        let c = self.bracket(z, &self.bracket(x, y));
        (0..DIM).map(|r| &(&a[r] + &b[r]) + &c[r]).collect()
    }

    pub fn basis_vector(p: usize) -> Vec<G> {
        let mut v = vec![G::zero(); DIM];
        v[p] = G::one();
        v
    }

    /// 3×3 matrix of the `h`-generator `p`.
    pub fn h_matrix(&self, p: usize) -> &Mat3 {
        &self.h_gens[p]
    }

    /// `max_{i,j} |C_ij^k + C_ji^k|`-style check: every constant antisymmetric and real.
    pub fn is_antisymmetric(&self) -> bool {
        (0..DIM).all(|i| (0..DIM).all(|j| (0..DIM).all(|r| (&self.structure(i, j)[r] + &self.structure(j, i)[r]).is_zero() && self.structure(i, j)[r].is_real())))
    }
}

/// `∂z_j` (or `∂̄z_j` when `bar`) as a Gaussian coordinate vector, `j` zero-based.
pub fn dz(j: usize, bar: bool) -> Vec<G> {
    let mut v = vec![G::zero(); DIM];
    let half = rat(1, 2);
    v[8 + 2 * j] = G::from_rat(half.clone());
    v[9 + 2 * j] = G::new(BigRational::zero(), if bar { half } else { -half });
    v
}

/// Complex components of the `m`-part: coefficients of `(∂z₁, ∂z₂, ∂z₃, ∂̄z₁, ∂̄z₂, ∂̄z₃)`.
pub fn m_components(v: &[G]) -> Vec<G> {
    let i = G::i();
    let mut hol = Vec::new();
    let mut anti = Vec::new();
    for j in 0..3 {
        let (x, y) = (&v[8 + 2 * j], &v[9 + 2 * j]);
        hol.push(x + &(&i * y));
        anti.push(x - &(&i * y));
    }
    hol.extend(anti);
    hol
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiFailure {
    pub triple: [usize; 3],
    pub residual: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedTriple {
    pub label: String,
    /// Components on `(∂z₁, ∂z₂, ∂z₃, ∂̄z₁, ∂̄z₂, ∂̄z₃)`; the `h`-part is listed separately.
    pub m_residual: Vec<String>,
    pub h_residual: Vec<String>,
    pub vanishes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiReport {
    pub case: String,
    pub k: String,
    pub pass: bool,
    pub checked: usize,
    pub failures: Vec<JacobiFailure>,
    /// The complex triples `(∂̄z₁, ∂z₁, ∂z₂)` and `(∂̄z₁, ∂z₁, ∂z₃)`.
    pub key_triples: Vec<NamedTriple>,
}

fn triples() -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(364);
    for i in 0..DIM {
        for j in i + 1..DIM {
            for l in j + 1..DIM {
                out.push([i, j, l]);
            }
        }
    }
    out
}

fn named(alg: &Algebra14, a: usize, b: usize) -> NamedTriple {
    let r = alg.jacobiator(&dz(a, true), &dz(a, false), &dz(b, false));
    let show = |v: &[G]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    NamedTriple {
        label: format!("(zbar{0}, z{0}, z{1})", a + 1, b + 1),
        m_residual: show(&m_components(&r)),
        h_residual: show(&r[..8]),
        vanishes: r.iter().all(G::is_zero),
    }
}

/// Exact check of all `C(14,3) = 364` basis triples.
pub fn jacobi_check(alg: &Algebra14) -> JacobiReport {
    let all = triples();
    let chunks: Vec<&[[usize; 3]]> = all.chunks(all.len().div_ceil(4)).collect();
    let mut failures: Vec<JacobiFailure> = std::thread::scope(|s| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| {
                s.spawn(move || {
                    chunk
                        .iter()
                        .filter_map(|&[i, j, l]| {
                            let r = alg.jacobiator(&Algebra14::basis_vector(i), &Algebra14::basis_vector(j), &Algebra14::basis_vector(l));
                            (!r.iter().all(G::is_zero)).then(|| JacobiFailure { triple: [i, j, l], residual: r.iter().map(|x| x.to_string()).collect() })
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("jacobi worker")).collect()
    });
    failures.sort_by_key(|f| f.triple);
    JacobiReport {
        case: alg.case.to_string(),
        k: alg.k.to_string(),
        pass: failures.is_empty(),
        checked: all.len(),
        failures,
        key_triples: vec![named(alg, 0, 1), named(alg, 0, 2)],
    }
}

#[derive(Clone, Debug)]
pub struct KillingForm {
    pub matrix: Vec<Vec<BigRational>>,
    /// (plus, minus, zero)
    pub signature: (usize, usize, usize),
    pub rank: usize,
    /// Signature of the restriction to the `h`-block.
    pub h_signature: (usize, usize, usize),
}

/// `K(x, y) = tr(ad x ∘ ad y)`.
pub fn killing_form(alg: &Algebra14) -> Result<KillingForm, G2Error> {
    let rep = jacobi_check(alg);
    if !rep.pass {
        return Err(G2Error::NotLie(rep.failures.len()));
    }
    let matrix: Vec<Vec<BigRational>> = (0..DIM)
        .map(|i| {
            (0..DIM)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for a in 0..DIM {
                        for b in 0..DIM {
                            let (x, y) = (&alg.structure(i, b)[a], &alg.structure(j, a)[b]);
                            if !x.is_zero() && !y.is_zero() {
                                s += (x * y).re;
                            }
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    let signature = symmetric_signature(&matrix);
    let hblock: Vec<Vec<BigRational>> = matrix[..8].iter().map(|r| r[..8].to_vec()).collect();
    Ok(KillingForm { rank: signature.0 + signature.1, signature, h_signature: symmetric_signature(&hblock), matrix })
}

// ---------------------------------------------------------------------------
// k-solver

/// Common zero set in `k` of a family of polynomials.
#[derive(Clone, Debug, PartialEq)]
pub enum RootSet {
    All,
    Finite(Vec<G>),
    /// Roots outside Q(i) or degree above 2.
    Unresolved(String),
}

impl std::fmt::Display for RootSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RootSet::All => write!(f, "all k"),
            RootSet::Finite(v) if v.is_empty() => write!(f, "no k"),
            RootSet::Finite(v) => write!(f, "k ∈ {{{}}}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")),
            RootSet::Unresolved(p) => write!(f, "roots of {p}"),
        }
    }
}

pub fn common_roots(polys: &[Poly]) -> RootSet {
    let mut gcd: Option<Poly> = None;
    for p in polys.iter().filter(|p| !p.is_zero()) {
        gcd = Some(match gcd {
            None => p.clone(),
            Some(q) => q.gcd(p),
        });
    }
    match gcd {
        None => RootSet::All,
        Some(q) => match q.small_roots() {
            Some(r) => RootSet::Finite(r),
            None => RootSet::Unresolved(q.to_string()),
        },
    }
}

/// Residuals of the su(2,1) brackets as polynomials in `k` (degree ≤ 2, interpolated from
/// `k = 0, 1, 2`).
pub fn su21_polys<F>(f: F) -> Vec<Poly>
where
    F: Fn(&Algebra14) -> Vec<G>,
{
    let vals: Vec<Vec<G>> = (0..3).map(|k| f(&Algebra14::build(CaseTag::Su21, ri(k)))).collect();
    let half = rat(1, 2);
    (0..vals[0].len())
        .map(|r| {
            let (y0, y1, y2) = (&vals[0][r], &vals[1][r], &vals[2][r]);
            let c2 = (&(y0 - &y1.scale(&ri(2))) + y2).scale(&half);
            let c1 = &(y1 - y0) - &c2;
            Poly(vec![y0.clone(), c1, c2]).trimmed()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct KScan {
    /// `(label, residual polynomials, zero set)` for each `(∂̄z_a, ∂z_a, ∂z_b)` triple.
    pub pair_triples: Vec<(String, Vec<Poly>, RootSet)>,
    /// k forced by `(∂̄z₁, ∂z₁, ∂z₂)`.
    pub forced: RootSet,
    /// Zero set of all 364 basis triples together.
    pub clearing: RootSet,
}

pub fn k_scan() -> KScan {
    let mut pair_triples = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                continue;
            }
            let polys = su21_polys(|alg| alg.jacobiator(&dz(a, true), &dz(a, false), &dz(b, false)));
            let roots = common_roots(&polys);
            pair_triples.push((format!("(zbar{0}, z{0}, z{1})", a + 1, b + 1), polys, roots));
        }
    }
    let forced = pair_triples[0].2.clone();
    let all = su21_polys(|alg| {
        triples()
            .into_iter()
            .flat_map(|[i, j, l]| alg.jacobiator(&Algebra14::basis_vector(i), &Algebra14::basis_vector(j), &Algebra14::basis_vector(l)))
            .collect()
    });
    KScan { pair_triples, forced, clearing: common_roots(&all) }
}
