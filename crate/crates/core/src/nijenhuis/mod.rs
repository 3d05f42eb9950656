//! Nijenhuis tensors: evaluation from jets, pointwise tensors given by
//! structure constants, and pointwise classification.

mod phi;
mod realize;
mod transversal;

pub use phi::{newton_fixed_points, phi_maps, FixedPoint, FixedPointData, FixedPointKind, NewtonConfig};
pub use realize::{
    distribution_plane, image_generator, plane_of, realize_dim4, AlphaBetaCoeffs, AlphaBetaStructure, Realization, RealizeError,
};
pub use transversal::{normal_form_dim8, plucker_counts, transversal_check, PluckerCounts, SplitLine, TransversalReport};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::acstruct::PointJet;
use crate::clinalg::{self, complex_image, perp_set, rank_and_kernel_ref, AntilinearMap2, CMat, RMat, RVec};
use crate::exact::Gaussian;
use crate::expr;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NijError {
    #[error("jet is not almost complex: ‖J² + I‖ = {0:.3e}")]
    NotAlmostComplex(f64),
    #[error(transparent)]
    Invariant(#[from] clinalg::LinalgError),
    #[error("tensor file: {0}")]
    Format(String),
    #[error(transparent)]
    Expr(#[from] expr::ExprError),
    #[error("{0}")]
    Precondition(String),
}

/// Nijenhuis tensor at a point, in coordinates and in a J-adapted frame.
#[derive(Clone, Debug)]
pub struct NijenhuisValue {
    /// Values on coordinate vectors; antilinear for `J(p)`.
    pub coords: AntilinearMap2,
    /// `P` with `J(p) P = P J0`.
    pub frame: RMat,
    pub frame_inv: RMat,
    /// `P⁻¹ N(P·, P·)`, antilinear for `J0`.
    pub standard: AntilinearMap2,
}

impl NijenhuisValue {
    /// Complex image in coordinates.
    pub fn image(&self, tol: f64) -> clinalg::RealSubspace {
        let im = complex_image(&self.standard, tol);
        let vecs: Vec<RVec> = im.basis.iter().map(|v| &self.frame * v).collect();
        clinalg::RealSubspace::from_spanning(im.ambient, &vecs, 1e-9, 0.0)
    }
}

/// `N(X,Y) = (∂_{JX}J)Y − (∂_{JY}J)X − J(∂_X J)Y + J(∂_Y J)X` on constant fields.
pub fn nijenhuis_at(jet: &PointJet) -> Result<NijenhuisValue, NijError> {
    let res = jet.square_residual();
    if res > 1e-9 {
        return Err(NijError::NotAlmostComplex(res));
    }
    let n = jet.complex_dim();
    let d = 2 * n;
    let j = &jet.j;
    // ∂_{J e_u} J and ∂_{e_u} J
    let dj_j: Vec<RMat> = (0..d).map(|u| jet.directional(&j.column(u).into_owned())).collect();
    let jdj: Vec<RMat> = jet.dj.iter().map(|m| j * m).collect();
    let out = AntilinearMap2::from_fn(n, |u, v| {
        let mut col: RVec = dj_j[u].column(v) - dj_j[v].column(u);
        col -= jdj[u].column(v);
        col += jdj[v].column(u);
        col
    });
    let (skew, anti) = out.residuals_wrt(j);
    let scale = j.amax() * j.amax() * jet.dj.iter().map(|m| m.amax()).fold(0.0, f64::max);
    let tol = 1e-9 * out.norm().max(scale).max(1e-300);
    if skew > tol || anti > tol {
        return Err(NijError::Invariant(clinalg::LinalgError::InvariantViolation { skew, antilinear: anti }));
    }
    let frame = clinalg::adapted_frame(j);
    let frame_inv = frame.clone().try_inverse().ok_or(NijError::NotAlmostComplex(res))?;
    let standard = out.pull_back(&frame, &frame_inv);
    Ok(NijenhuisValue { coords: out, frame, frame_inv, standard })
}

/// Pointwise tensor `N(X_i, X_j) = Σ_k c_ij^k X_k` on a complex basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTensor {
    pub n: usize,
    c: Vec<C64>,
    exact: Option<Vec<Gaussian>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorFile {
    #[serde(default)]
    pub name: Option<String>,
    pub complex_dim: usize,
    #[serde(rename = "N")]
    pub entries: Vec<TensorEntry>,
}

impl PointTensor {
    pub fn zero(n: usize) -> Self {
        PointTensor { n, c: vec![C64::new(0.0, 0.0); n * n * n], exact: Some(vec![Gaussian::zero(); n * n * n]) }
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.c[self.idx(i, j, k)]
    }

    pub fn exact(&self, i: usize, j: usize, k: usize) -> Option<&Gaussian> {
        self.exact.as_ref().map(|e| &e[self.idx(i, j, k)])
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Sets `c_ij^k` and `c_ji^k = −c_ij^k` (zero-based).
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: C64) {
        let (a, b) = (self.idx(i, j, k), self.idx(j, i, k));
        self.c[a] = v;
        self.c[b] = -v;
        self.exact = None;
    }

    pub fn set_exact(&mut self, i: usize, j: usize, k: usize, v: Gaussian) {
        let (a, b) = (self.idx(i, j, k), self.idx(j, i, k));
        self.c[a] = v.to_c64();
        self.c[b] = -v.to_c64();
        if let Some(e) = self.exact.as_mut() {
            e[b] = -&v;
            e[a] = v;
        }
    }

    /// Builds from zero-based relations `N(X_i, X_j) ∋ c X_k`; repeated `(i,j,k)` accumulate.
    pub fn from_relations(n: usize, rels: &[(usize, usize, usize, C64)]) -> Result<Self, NijError> {
        let mut t = PointTensor::zero(n);
        t.exact = None;
        for &(i, j, k, v) in rels {
            if i >= n || j >= n || k >= n || i == j {
                return Err(NijError::Format(format!("bad index triple ({}, {}, {})", i + 1, j + 1, k + 1)));
            }
            let cur = t.get(i, j, k);
            t.set(i, j, k, cur + v);
        }
        Ok(t)
    }

    /// Exact constructor from Gaussian-rational relations.
    pub fn from_exact_relations(n: usize, rels: &[(usize, usize, usize, Gaussian)]) -> Result<Self, NijError> {
        let mut t = PointTensor::zero(n);
        for (i, j, k, v) in rels {
            let (i, j, k) = (*i, *j, *k);
            if i >= n || j >= n || k >= n || i == j {
                return Err(NijError::Format(format!("bad index triple ({}, {}, {})", i + 1, j + 1, k + 1)));
            }
            let cur = t.exact(i, j, k).cloned().unwrap_or_default();
            t.set_exact(i, j, k, cur + v);
        }
        Ok(t)
    }

    pub fn from_file(f: &TensorFile) -> Result<Self, NijError> {
        let n = f.complex_dim;
        let mut exact_rels = Vec::new();
        let mut float_rels = Vec::new();
        let mut all_exact = true;
        for e in &f.entries {
            if e.i == 0 || e.j == 0 || e.k == 0 {
                return Err(NijError::Format("indices are 1-based".into()));
            }
            let val = expr::parse(&e.c, &expr::VarTable::empty())?
                .constant_value()
                .ok_or_else(|| NijError::Format(format!("`{}` is not a constant", e.c)))?;
            match expr::parse_exact_constant(&e.c)? {
                Some(g) => exact_rels.push((e.i - 1, e.j - 1, e.k - 1, g)),
                None => all_exact = false,
            }
            float_rels.push((e.i - 1, e.j - 1, e.k - 1, val));
        }
        if all_exact {
            PointTensor::from_exact_relations(n, &exact_rels)
        } else {
            PointTensor::from_relations(n, &float_rels)
        }
    }

    pub fn from_json(text: &str) -> Result<Self, NijError> {
        let f: TensorFile = serde_json::from_str(text).map_err(|e| NijError::Format(e.to_string()))?;
        PointTensor::from_file(&f)
    }

    pub fn to_file(&self, name: Option<String>) -> TensorFile {
        let mut entries = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                for k in 0..self.n {
                    let text = match self.exact(i, j, k) {
                        Some(g) if g.is_zero() => continue,
                        Some(g) => g.to_string(),
                        None => {
                            let v = self.get(i, j, k);
                            if v == C64::new(0.0, 0.0) {
                                continue;
                            }
                            expr::format_complex(v)
                        }
                    };
                    entries.push(TensorEntry { i: i + 1, j: j + 1, k: k + 1, c: text });
                }
            }
        }
        TensorFile { name, complex_dim: self.n, entries }
    }

    /// `N(x, y) = Σ conj(x_i) conj(y_j) c_ij^k X_k` for complex coordinate vectors.
    /// Largest structure-constant modulus.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn apply_complex(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            if x[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let s = x[i].conj() * y[j].conj();
                if s == C64::new(0.0, 0.0) {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += s * self.get(i, j, k);
                }
            }
        }
        out
    }

    /// Matrix of `ȳ ↦ N(x, y)`: entry `(k, j) = Σ_i conj(x_i) c_ij^k`.
    pub fn left_matrix(&self, x: &[C64]) -> CMat {
        let n = self.n;
        CMat::from_fn(n, n, |k, j| (0..n).map(|i| x[i].conj() * self.get(i, j, k)).sum())
    }

    pub fn to_antilinear(&self) -> AntilinearMap2 {
        let n = self.n;
        let unit = |u: usize| -> Vec<C64> {
            let mut v = vec![C64::new(0.0, 0.0); n];
            v[u / 2] = if u % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) };
            v
        };
        AntilinearMap2::from_fn(n, |u, v| {
            let r = self.apply_complex(&unit(u), &unit(v));
            RVec::from_fn(2 * n, |a, _| if a % 2 == 0 { r[a / 2].re } else { r[a / 2].im })
        })
    }

    pub fn from_antilinear(a: &AntilinearMap2) -> Self {
        let n = a.n;
        let mut t = PointTensor::zero(n);
        t.exact = None;
        for i in 0..n {
            for j in 0..n {
                let col = a.basis_value(2 * i, 2 * j);
                for k in 0..n {
                    let idx = t.idx(i, j, k);
                    t.c[idx] = C64::new(col[2 * k], col[2 * k + 1]);
                }
            }
        }
        t
    }

    /// Constants in the basis `Y_a = Σ_i g_ia X_i`.
    pub fn change_basis(&self, g: &CMat) -> Option<PointTensor> {
        let n = self.n;
        let ginv = g.clone().try_inverse()?;
        let mut t = PointTensor::zero(n);
        t.exact = None;
        for a in 0..n {
            for b in 0..n {
                let ya: Vec<C64> = (0..n).map(|i| g[(i, a)]).collect();
                let yb: Vec<C64> = (0..n).map(|i| g[(i, b)]).collect();
                let img = self.apply_complex(&ya, &yb);
                for c in 0..n {
                    let v: C64 = (0..n).map(|k| ginv[(c, k)] * img[k]).sum();
                    let idx = t.idx(a, b, c);
                    t.c[idx] = v;
                }
            }
        }
        Some(t)
    }
}

/// Pointwise orbit type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeLabel {
    Integrable,
    Dim4Nonzero,
    /// Non-degenerate in dimension 6; `None` when the fixed-point data do not single out a type.
    Ndg(Option<u8>),
    Dg1,
    Dg2(u8),
    General { m: usize, branch: String },
    GeneralRank(usize),
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeLabel::Integrable => write!(f, "INTEGRABLE"),
            TypeLabel::Dim4Nonzero => write!(f, "DIM4_NONZERO"),
            TypeLabel::Ndg(Some(k)) => write!(f, "NDG({k})-candidate"),
            TypeLabel::Ndg(None) => write!(f, "NDG-candidate"),
            TypeLabel::Dg1 => write!(f, "DG1"),
            TypeLabel::Dg2(k) => write!(f, "DG2({k})"),
            TypeLabel::General { m, branch } => write!(f, "GENERAL(m={m}, {branch})"),
            TypeLabel::GeneralRank(r) => write!(f, "GENERAL(rImage={r})"),
        }
    }
}

impl FromStr for TypeLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("unknown type label `{s}`");
        Ok(match s {
            "INTEGRABLE" => TypeLabel::Integrable,
            "DIM4_NONZERO" => TypeLabel::Dim4Nonzero,
            "NDG-candidate" => TypeLabel::Ndg(None),
            "DG1" => TypeLabel::Dg1,
            "DG2(1)" => TypeLabel::Dg2(1),
            "DG2(2)" => TypeLabel::Dg2(2),
            _ => {
                if let Some(k) = s.strip_prefix("NDG(").and_then(|r| r.strip_suffix(")-candidate")) {
                    TypeLabel::Ndg(Some(k.parse().map_err(|_| bad())?))
                } else if let Some(r) = s.strip_prefix("GENERAL(rImage=").and_then(|r| r.strip_suffix(')')) {
                    TypeLabel::GeneralRank(r.parse().map_err(|_| bad())?)
                } else if let Some(r) = s.strip_prefix("GENERAL(m=").and_then(|r| r.strip_suffix(')')) {
                    let (m, branch) = r.split_once(", ").ok_or_else(bad)?;
                    TypeLabel::General { m: m.parse().map_err(|_| bad())?, branch: branch.to_string() }
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

impl Serialize for TypeLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TypeLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub const LOW_CONFIDENCE: &str = "LOW_CONFIDENCE";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub n: usize,
    pub r_image: usize,
    pub kernel_dim: usize,
    pub image_in_kernel: bool,
    pub type_label: TypeLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point_data: Option<FixedPointData>,
    pub flags: Vec<String>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn low_confidence(&self) -> bool {
        self.flags.iter().any(|f| f == LOW_CONFIDENCE)
    }
}

/// Decision table on (n, rank of the image, image ⊂ kernel, fixed points).
pub fn classify(nt: &AntilinearMap2, tol: f64) -> ClassificationReport {
    let n = nt.n;
    let d = nt.real_dim();
    let mut flags = Vec::new();
    let mut notes = Vec::new();

    let mut rows: Vec<RVec> = Vec::new();
    for u in 0..d {
        for v in u + 1..d {
            rows.push(nt.basis_value(u, v));
        }
    }
    let m = RMat::from_fn(rows.len(), d, |r, c| rows[r][c]);
    let img_rank = rank_and_kernel_ref(&m, tol, nt.frobenius()).expect("nonempty");
    if img_rank.ambiguous {
        flags.push(LOW_CONFIDENCE.to_string());
        notes.push("image rank is close to the tolerance threshold".into());
    }
    let w = complex_image(nt, tol);
    let ker = perp_set(nt, &clinalg::RealSubspace::full(d), tol);
    let r_image = w.dim() / 2;
    let kernel_dim = ker.dim() / 2;
    let image_in_kernel = w.is_subspace_of(&ker, 1e-6);
    let mut fixed = None;

    let label = if r_image == 0 {
        TypeLabel::Integrable
    } else if n == 2 {
        TypeLabel::Dim4Nonzero
    } else if n == 3 {
        match r_image {
            3 => {
                let data = phi_maps(&PointTensor::from_antilinear(nt));
                if data.low_confidence {
                    flags.push(LOW_CONFIDENCE.to_string());
                    notes.push("fixed-point search and eigen-analysis disagree".into());
                }
                let label = TypeLabel::Ndg(data.refined_type());
                fixed = Some(data);
                label
            }
            2 => TypeLabel::Dg1,
            _ => {
                if image_in_kernel {
                    TypeLabel::Dg2(2)
                } else {
                    TypeLabel::Dg2(1)
                }
            }
        }
    } else if r_image == 1 {
        let z = ker.clone();
        let m = (n - kernel_dim) / 2;
        let branch = if image_in_kernel {
            "W⊂Z"
        } else if w.intersect(&z).dim() == 0 {
            "W∩Z=0"
        } else {
            notes.push("image meets the kernel in a proper subspace".into());
            "W∩Z≠0"
        };
        if (n - kernel_dim) % 2 == 1 {
            notes.push("kernel codimension is odd".into());
            flags.push(LOW_CONFIDENCE.to_string());
        }
        TypeLabel::General { m, branch: branch.to_string() }
    } else {
        TypeLabel::GeneralRank(r_image)
    };
    flags.dedup();
    ClassificationReport { n, r_image, kernel_dim, image_in_kernel, type_label: label, fixed_point_data: fixed, flags, notes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acstruct::{ChartStructure, JetSource};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn flat_is_exactly_zero() {
        let s = ChartStructure::flat("flat", &["z", "w", "u"]).unwrap();
        let n = nijenhuis_at(&s.jet_at(&[c(0.1, 0.2), c(0.3, 0.0), c(-0.5, 0.5)]).unwrap()).unwrap();
        assert_eq!(n.coords.norm(), 0.0);
        assert_eq!(n.frame, RMat::identity(6, 6));
    }

    #[test]
    fn submax_value() {
        let s = ChartStructure::from_rows("submax", &["z", "w"], &[("z", &[("dz", "i"), ("dw_", "w")]), ("w", &[("dw", "i")])]).unwrap();
        let n = nijenhuis_at(&s.jet_at(&[c(0.3, -0.1), c(0.2, 0.7)]).unwrap()).unwrap();
        // N(∂z, ∂w) = −2i ∂w̄ in the complex frame; N(∂x_z, ∂x_w) = 4 Re(N(∂z,∂w)) as a real vector
        let v = n.coords.basis_value(0, 2);
        let frame = crate::acstruct::real_vec_to_frame(&v);
        // N(∂x_z, ∂x_w) = N(∂z+∂z̄, ∂w+∂w̄) = N(∂z,∂w) + conj = −2i∂w̄ + 2i∂w
        assert!((frame[1] - c(0.0, 2.0)).norm() < 1e-12);
        assert!((frame[3] - c(0.0, -2.0)).norm() < 1e-12);
        assert!(frame[0].norm() < 1e-12 && frame[2].norm() < 1e-12);
    }

    #[test]
    fn tensor_round_trips_through_antilinear_map() {
        let t = PointTensor::from_relations(3, &[(0, 1, 2, c(1.0, 2.0)), (0, 2, 1, c(0.0, -1.0)), (1, 2, 0, c(3.0, 0.0))]).unwrap();
        let a = t.to_antilinear();
        a.check().unwrap();
        let back = PointTensor::from_antilinear(&a);
        for k in 0..27 {
            assert!((back.c[k] - t.c[k]).norm() < 1e-15);
        }
    }

    #[test]
    fn labels_round_trip() {
        for l in [
            TypeLabel::Integrable,
            TypeLabel::Dim4Nonzero,
            TypeLabel::Ndg(Some(3)),
            TypeLabel::Ndg(None),
            TypeLabel::Dg1,
            TypeLabel::Dg2(2),
            TypeLabel::General { m: 1, branch: "W∩Z=0".into() },
            TypeLabel::GeneralRank(2),
        ] {
            assert_eq!(l.to_string().parse::<TypeLabel>().unwrap(), l);
        }
    }

    #[test]
    fn general_branches() {
        let t = PointTensor::from_relations(4, &[(0, 1, 0, c(1.0, 0.0))]).unwrap();
        let r = classify(&t.to_antilinear(), 1e-9);
        assert_eq!(r.type_label, TypeLabel::General { m: 1, branch: "W∩Z=0".into() });
        let t = PointTensor::from_relations(4, &[(0, 1, 2, c(1.0, 0.0))]).unwrap();
        let r = classify(&t.to_antilinear(), 1e-9);
        assert_eq!(r.type_label, TypeLabel::General { m: 1, branch: "W⊂Z".into() });
    }

    #[test]
    fn dg2_types() {
        let t = PointTensor::from_relations(3, &[(0, 1, 2, c(1.0, 0.0))]).unwrap();
        let r = classify(&t.to_antilinear(), 1e-9);
        assert_eq!(r.type_label, TypeLabel::Dg2(2));
        assert!(r.image_in_kernel);
        let t = PointTensor::from_relations(3, &[(0, 1, 0, c(1.0, 0.0))]).unwrap();
        assert_eq!(classify(&t.to_antilinear(), 1e-9).type_label, TypeLabel::Dg2(1));
    }

    #[test]
    fn json_file_is_exact_when_possible() {
        let t = PointTensor::from_json(r#"{"complex_dim":3,"N":[{"i":1,"j":2,"k":3,"c":"1"},{"i":3,"j":1,"k":2,"c":"1"},{"i":2,"j":3,"k":1,"c":"1"}]}"#).unwrap();
        assert!(t.is_exact());
        assert_eq!(t.exact(0, 2, 1), Some(&Gaussian::from_int(-1)));
        let f = PointTensor::from_json(r#"{"complex_dim":2,"N":[{"i":1,"j":2,"k":2,"c":"exp(i*pi/5)"}]}"#);
        assert!(f.is_err(), "division is not in the grammar");
        let f = PointTensor::from_json(r#"{"complex_dim":2,"N":[{"i":1,"j":2,"k":2,"c":"exp(0.2*i*pi)"}]}"#).unwrap();
        assert!(!f.is_exact());
    }
}
