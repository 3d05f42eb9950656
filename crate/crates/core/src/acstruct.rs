//! Almost complex structures on a coordinate chart.
//!
//! Structures are entered in the complex frame `(∂z_1..∂z_n, ∂z̄_1..∂z̄_n)`:
//! `J ∂z_i = Σ_j a_ij ∂z_j + b_ij ∂z̄_j`, and `J ∂z̄_i` is the conjugate row.
//! Real computations use coordinates `(x1, y1, ..., xn, yn)`.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clinalg::{CMat, RMat};
use crate::expr::{self, CoeffExpr, ExprError, VarId, VarTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AcsError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("structure file: {0}")]
    Format(String),
    #[error("point has {got} coordinates, structure has {expected}")]
    PointDim { expected: usize, got: usize },
    #[error("J² ≠ −1 at the point (residual {0:.3e})")]
    NotAlmostComplex(f64),
    #[error("{0}")]
    Precondition(String),
}

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Frame components `(c_1..c_n, c̄-slots)` to complex components in the real basis.
pub fn frame_to_real(c: &[C64]) -> Vec<C64> {
    let n = c.len() / 2;
    let mut r = vec![ZERO; 2 * n];
    for j in 0..n {
        r[2 * j] = (c[j] + c[n + j]) * 0.5;
        r[2 * j + 1] = (c[n + j] - c[j]) * I * 0.5;
    }
    r
}

/// Real-basis components (possibly complex) to frame components.
pub fn real_to_frame(r: &[C64]) -> Vec<C64> {
    let n = r.len() / 2;
    let mut c = vec![ZERO; 2 * n];
    for j in 0..n {
        c[j] = r[2 * j] + I * r[2 * j + 1];
        c[n + j] = r[2 * j] - I * r[2 * j + 1];
    }
    c
}

/// Real vector of a frame vector that is known to be real (imaginary parts dropped).
pub fn frame_to_real_vec(c: &[C64]) -> crate::clinalg::RVec {
    let r = frame_to_real(c);
    crate::clinalg::RVec::from_fn(r.len(), |k, _| r[k].re)
}

pub fn real_vec_to_frame(r: &crate::clinalg::RVec) -> Vec<C64> {
    let rc: Vec<C64> = r.iter().map(|x| C64::new(*x, 0.0)).collect();
    real_to_frame(&rc)
}

/// Converts a complex-frame matrix to the real basis; returns (real part, max imaginary part).
pub fn frame_matrix_to_real(m: &CMat) -> (RMat, f64) {
    let d = m.nrows();
    let mut out = RMat::zeros(d, d);
    let mut imag: f64 = 0.0;
    for u in 0..d {
        let mut e = vec![ZERO; d];
        e[u] = C64::new(1.0, 0.0);
        let fc = real_to_frame(&e);
        let img: Vec<C64> = (0..d).map(|r| (0..d).map(|c| m[(r, c)] * fc[c]).sum()).collect();
        let col = frame_to_real(&img);
        for a in 0..d {
            out[(a, u)] = col[a].re;
            imag = imag.max(col[a].im.abs());
        }
    }
    (out, imag)
}

/// Complex coordinates of `p` moved by `h` along real coordinate `k`.
pub fn shift_point(p: &[C64], k: usize, h: f64) -> Vec<C64> {
    let mut q = p.to_vec();
    if k % 2 == 0 {
        q[k / 2] += C64::new(h, 0.0);
    } else {
        q[k / 2] += C64::new(0.0, h);
    }
    q
}

/// Realified J and its first partials at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointJet {
    pub point: Vec<C64>,
    pub j: RMat,
    /// `dj[k] = ∂J/∂(real coordinate k)`.
    pub dj: Vec<RMat>,
}

impl PointJet {
    pub fn complex_dim(&self) -> usize {
        self.j.nrows() / 2
    }
    /// ‖J² + I‖.
    pub fn square_residual(&self) -> f64 {
        let d = self.j.nrows();
        (&self.j * &self.j + RMat::identity(d, d)).amax()
    }
    /// `∂_V J = Σ_k V_k dJ[k]`.
    pub fn directional(&self, v: &crate::clinalg::RVec) -> RMat {
        let d = self.j.nrows();
        let mut m = RMat::zeros(d, d);
        for (k, dk) in self.dj.iter().enumerate() {
            if v[k] != 0.0 {
                m += dk * v[k];
            }
        }
        m
    }
}

/// Anything that can produce J and its first jet at a point of C^n.
pub trait JetSource {
    fn complex_dim(&self) -> usize;
    fn jet_at(&self, point: &[C64]) -> Result<PointJet, AcsError>;
    /// J alone; defaults to the jet's value.
    fn j_at(&self, point: &[C64]) -> Result<RMat, AcsError> {
        Ok(self.jet_at(point)?.j)
    }
}

/// A vector field with expression coefficients in the complex frame.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub n: usize,
    /// Components on `∂z_1..∂z_n, ∂z̄_1..∂z̄_n`.
    pub comps: Vec<CoeffExpr>,
}

impl VectorField {
    pub fn zero(n: usize) -> Self {
        VectorField { n, comps: vec![CoeffExpr::zero(); 2 * n] }
    }

    /// `coef · ∂` for frame slot `k`.
    pub fn frame(n: usize, k: usize, coef: CoeffExpr) -> Self {
        let mut f = VectorField::zero(n);
        f.comps[k] = coef;
        f
    }

    pub fn dz(n: usize, j: usize) -> Self {
        VectorField::frame(n, j, CoeffExpr::real(1.0))
    }

    pub fn dzbar(n: usize, j: usize) -> Self {
        VectorField::frame(n, n + j, CoeffExpr::real(1.0))
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        VectorField { n: self.n, comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &VectorField) -> VectorField {
        VectorField { n: self.n, comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, f: &CoeffExpr) -> VectorField {
        VectorField { n: self.n, comps: self.comps.iter().map(|a| a.mul(f)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// Complex conjugate field.
    pub fn conj(&self) -> VectorField {
        let n = self.n;
        let comps = (0..2 * n).map(|k| if k < n { self.comps[n + k].conj() } else { self.comps[k - n].conj() }).collect();
        VectorField { n, comps }
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// Derivative of a function along the field.
    pub fn apply_to(&self, f: &CoeffExpr) -> CoeffExpr {
        let mut out = CoeffExpr::zero();
        for (m, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&c.mul(&f.diff(VarId::from_frame_index(m, self.n))));
            }
        }
        out
    }

    pub fn eval(&self, point: &[C64]) -> Result<Vec<C64>, ExprError> {
        self.comps.iter().map(|c| c.eval(point)).collect()
    }

    pub fn to_text(&self, vars: &VarTable) -> String {
        let mut parts = Vec::new();
        for (k, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                let v = VarId::from_frame_index(k, self.n);
                parts.push(format!("({})*d{}", c.to_text(vars), vars.name(v)));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// `[X, Y]^k = Σ_m X^m ∂_m Y^k − Y^m ∂_m X^k` over all Wirtinger variables.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> VectorField {
    let n = x.n;
    let comps = (0..2 * n).map(|k| x.apply_to(&y.comps[k]).sub(&y.apply_to(&x.comps[k]))).collect();
    VectorField { n, comps }
}

/// A structure entry failing `J² = −1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub entry: String,
    pub residual: String,
    pub max_sampled: f64,
}

/// Almost complex structure given by expression rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartStructure {
    pub name: String,
    pub vars: VarTable,
    /// `a[i][j]`: coefficient of `∂z_j` in `J ∂z_i`.
    pub a: Vec<Vec<CoeffExpr>>,
    /// `b[i][j]`: coefficient of `∂z̄_j` in `J ∂z_i`.
    pub b: Vec<Vec<CoeffExpr>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureFile {
    pub name: String,
    pub complex_dim: usize,
    pub coords: Vec<String>,
    #[serde(rename = "J")]
    pub j: BTreeMap<String, BTreeMap<String, String>>,
}

impl ChartStructure {
    /// The flat structure `J ∂z = i ∂z` on C^n.
    pub fn flat(name: &str, coords: &[&str]) -> Result<Self, AcsError> {
        let vars = VarTable::new(coords)?;
        let n = vars.len();
        let a = (0..n).map(|i| (0..n).map(|j| if i == j { CoeffExpr::constant(I) } else { CoeffExpr::zero() }).collect()).collect();
        let b = vec![vec![CoeffExpr::zero(); n]; n];
        Ok(ChartStructure { name: name.into(), vars, a, b })
    }

    /// Builds from `(row, key, expression)` triples using the file key convention.
    pub fn from_rows(name: &str, coords: &[&str], rows: &[(&str, &[(&str, &str)])]) -> Result<Self, AcsError> {
        let mut j = BTreeMap::new();
        for (row, entries) in rows {
            let m: BTreeMap<String, String> = entries.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
            j.insert(row.to_string(), m);
        }
        let file = StructureFile {
            name: name.into(),
            complex_dim: coords.len(),
            coords: coords.iter().map(|s| s.to_string()).collect(),
            j,
        };
        ChartStructure::from_file(&file)
    }

    pub fn from_json(text: &str) -> Result<Self, AcsError> {
        let f: StructureFile = serde_json::from_str(text).map_err(|e| AcsError::Format(e.to_string()))?;
        ChartStructure::from_file(&f)
    }

    pub fn from_file(f: &StructureFile) -> Result<Self, AcsError> {
        if f.coords.len() != f.complex_dim {
            return Err(AcsError::Format(format!("complex_dim {} but {} coords", f.complex_dim, f.coords.len())));
        }
        let vars = VarTable::new(&f.coords)?;
        let n = vars.len();
        let mut a = vec![vec![CoeffExpr::zero(); n]; n];
        let mut b = vec![vec![CoeffExpr::zero(); n]; n];
        for key in f.j.keys() {
            if !f.coords.contains(key) {
                return Err(AcsError::Format(format!("row `{key}` is not a coordinate")));
            }
        }
        for (i, name) in f.coords.iter().enumerate() {
            let row = f.j.get(name).ok_or_else(|| AcsError::Format(format!("missing row for `{name}`")))?;
            for (key, text) in row {
                let target = key
                    .strip_prefix('d')
                    .and_then(|v| vars.lookup(v))
                    .ok_or_else(|| AcsError::Format(format!("row `{name}`: bad key `{key}`")))?;
                let e = expr::parse(text, &vars)?;
                if target.is_conj() {
                    b[i][target.coord()] = e;
                } else {
                    a[i][target.coord()] = e;
                }
            }
        }
        Ok(ChartStructure { name: f.name.clone(), vars, a, b })
    }

    pub fn to_file(&self) -> StructureFile {
        let n = self.n();
        let mut j = BTreeMap::new();
        for i in 0..n {
            let mut row = BTreeMap::new();
            for k in 0..n {
                if !self.a[i][k].is_zero() {
                    row.insert(format!("d{}", self.vars.name(VarId::holo(k))), self.a[i][k].to_text(&self.vars));
                }
                if !self.b[i][k].is_zero() {
                    row.insert(format!("d{}", self.vars.name(VarId::anti(k))), self.b[i][k].to_text(&self.vars));
                }
            }
            j.insert(self.vars.names()[i].clone(), row);
        }
        StructureFile { name: self.name.clone(), complex_dim: n, coords: self.vars.names().to_vec(), j }
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    /// Entry `(r, c)` of J in the complex frame: component `r` of `J(frame_c)`.
    pub fn entry(&self, r: usize, c: usize) -> CoeffExpr {
        let n = self.n();
        match (c < n, r < n) {
            (true, true) => self.a[c][r].clone(),
            (true, false) => self.b[c][r - n].clone(),
            (false, true) => self.b[c - n][r].conj(),
            (false, false) => self.a[c - n][r - n].conj(),
        }
    }

    pub fn frame_matrix(&self) -> Vec<Vec<CoeffExpr>> {
        let d = 2 * self.n();
        (0..d).map(|r| (0..d).map(|c| self.entry(r, c)).collect()).collect()
    }

    fn frame_label(&self, k: usize) -> String {
        format!("d{}", self.vars.name(VarId::from_frame_index(k, self.n())))
    }

    /// Entries of `J² + 1` that do not vanish; symbolic first, sampled as fallback.
    pub fn validate(&self) -> Vec<Violation> {
        let d = 2 * self.n();
        let m = self.frame_matrix();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let samples: Vec<Vec<C64>> = (0..100)
            .map(|_| {
                (0..self.n())
                    .map(|_| {
                        let r: f64 = rng.random::<f64>().sqrt();
                        let t: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                        C64::from_polar(r, t)
                    })
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        for r in 0..d {
            for c in 0..d {
                let mut e = if r == c { CoeffExpr::real(1.0) } else { CoeffExpr::zero() };
                for k in 0..d {
                    e = e.add(&m[r][k].mul(&m[k][c]));
                }
                if e.is_zero() {
                    continue;
                }
                let max = samples.iter().map(|p| e.eval(p).map(|v| v.norm()).unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
                if max > 1e-9 {
                    out.push(Violation {
                        entry: format!("(J^2 + 1)[{}, {}]", self.frame_label(r), self.frame_label(c)),
                        residual: e.to_text(&self.vars),
                        max_sampled: max,
                    });
                }
            }
        }
        out
    }

    /// `J X` for a vector field.
    pub fn apply(&self, x: &VectorField) -> VectorField {
        let d = 2 * self.n();
        let mut comps = vec![CoeffExpr::zero(); d];
        for (c, xc) in x.comps.iter().enumerate() {
            if xc.is_zero() {
                continue;
            }
            for (r, slot) in comps.iter_mut().enumerate() {
                let e = self.entry(r, c);
                if !e.is_zero() {
                    *slot = slot.add(&e.mul(xc));
                }
            }
        }
        VectorField { n: self.n(), comps }
    }

    /// Symbolic `N(X,Y) = [JX,JY] − J[X,JY] − J[JX,Y] − [X,Y]`.
    pub fn nijenhuis_fields(&self, x: &VectorField, y: &VectorField) -> VectorField {
        let jx = self.apply(x);
        let jy = self.apply(y);
        lie_bracket(&jx, &jy)
            .sub(&self.apply(&lie_bracket(x, &jy)))
            .sub(&self.apply(&lie_bracket(&jx, y)))
            .sub(&lie_bracket(x, y))
    }

    fn check_point(&self, p: &[C64]) -> Result<(), AcsError> {
        if p.len() != self.n() {
            return Err(AcsError::PointDim { expected: self.n(), got: p.len() });
        }
        Ok(())
    }

    pub fn frame_matrix_at(&self, p: &[C64]) -> Result<CMat, AcsError> {
        self.check_point(p)?;
        let d = 2 * self.n();
        let mut m = CMat::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] = self.entry(r, c).eval(p)?;
            }
        }
        Ok(m)
    }
}

impl JetSource for ChartStructure {
    fn complex_dim(&self) -> usize {
        self.n()
    }

    fn j_at(&self, p: &[C64]) -> Result<RMat, AcsError> {
        Ok(frame_matrix_to_real(&self.frame_matrix_at(p)?).0)
    }

    fn jet_at(&self, p: &[C64]) -> Result<PointJet, AcsError> {
        self.check_point(p)?;
        let n = self.n();
        let d = 2 * n;
        let entries = self.frame_matrix();
        let j = self.j_at(p)?;
        let mut dj = Vec::with_capacity(d);
        for coord in 0..n {
            let mut dz = CMat::zeros(d, d);
            let mut dzb = CMat::zeros(d, d);
            for r in 0..d {
                for c in 0..d {
                    let e = &entries[r][c];
                    if e.is_zero() {
                        continue;
                    }
                    dz[(r, c)] = e.diff(VarId::holo(coord)).eval(p)?;
                    dzb[(r, c)] = e.diff(VarId::anti(coord)).eval(p)?;
                }
            }
            let dx: CMat = &dz + &dzb;
            let dy: CMat = (&dz - &dzb) * I;
            dj.push(frame_matrix_to_real(&dx).0);
            dj.push(frame_matrix_to_real(&dy).0);
        }
        Ok(PointJet { point: p.to_vec(), j, dj })
    }
}

/// Complex-frame components of the real-basis vector `e_k`.
pub fn real_basis_frame(n: usize, k: usize) -> Vec<C64> {
    let mut e = vec![ZERO; 2 * n];
    e[k] = C64::new(1.0, 0.0);
    real_to_frame(&e)
}

/// Complex matrix of frame components for a real matrix (inverse of [`frame_matrix_to_real`]).
pub fn real_matrix_to_frame(m: &RMat) -> CMat {
    let d = m.nrows();
    let mut out = CMat::zeros(d, d);
    for c in 0..d {
        // frame vector c expressed in the real basis
        let mut fc = vec![ZERO; d];
        fc[c] = C64::new(1.0, 0.0);
        let r = frame_to_real(&fc);
        let img: Vec<C64> = (0..d).map(|a| (0..d).map(|b| C64::new(m[(a, b)], 0.0) * r[b]).sum()).collect();
        let back = real_to_frame(&img);
        for a in 0..d {
            out[(a, c)] = back[a];
        }
    }
    out
}
