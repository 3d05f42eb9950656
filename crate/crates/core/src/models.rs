//! Built-in models: chart structures and pointwise tensors, each with the type label it must
//! classify to.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::acstruct::{ChartStructure, JetSource};
use crate::exact::Gaussian;
use crate::nijenhuis::{classify, nijenhuis_at, PointTensor, TypeLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelKind {
    Chart,
    PointTensor,
}

#[derive(Clone, Debug)]
pub enum ModelPayload {
    Chart(ChartStructure),
    Tensor(PointTensor),
}

#[derive(Clone, Debug)]
pub struct Model {
    pub name: &'static str,
    pub note: &'static str,
    /// Label of the tensor, or of the chart's tensor at the origin.
    pub expected: TypeLabel,
    pub payload: ModelPayload,
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self.payload {
            ModelPayload::Chart(_) => ModelKind::Chart,
            ModelPayload::Tensor(_) => ModelKind::PointTensor,
        }
    }

    pub fn chart(&self) -> Option<&ChartStructure> {
        match &self.payload {
            ModelPayload::Chart(s) => Some(s),
            ModelPayload::Tensor(_) => None,
        }
    }

    pub fn tensor(&self) -> Option<&PointTensor> {
        match &self.payload {
            ModelPayload::Tensor(t) => Some(t),
            ModelPayload::Chart(_) => None,
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn exact(n: usize, rels: &[(usize, usize, usize, i64)]) -> PointTensor {
    PointTensor::from_exact_relations(n, &rels.iter().map(|&(i, j, k, v)| (i, j, k, Gaussian::from_int(v))).collect::<Vec<_>>())
        .expect("valid relations")
}

/// `N(X₁,X₂) = X₂, N(X₁,X₃) = λX₃, N(X₂,X₃) = e^{iφ}X₁`
pub fn ndg1(lambda: f64, phi: f64) -> PointTensor {
    PointTensor::from_relations(3, &[(0, 1, 1, c(1.0, 0.0)), (0, 2, 2, c(lambda, 0.0)), (1, 2, 0, C64::from_polar(1.0, phi))]).expect("valid")
}

/// `N(X₁,X₂) = X₂, N(X₁,X₃) = X₃ + X₂, N(X₂,X₃) = e^{iφ}X₁`
pub fn ndg2(phi: f64) -> PointTensor {
    PointTensor::from_relations(3, &[(0, 1, 1, c(1.0, 0.0)), (0, 2, 2, c(1.0, 0.0)), (0, 2, 1, c(1.0, 0.0)), (1, 2, 0, C64::from_polar(1.0, phi))])
        .expect("valid")
}

/// `N(X₁,X₂) = e^{−iψ}X₃, N(X₁,X₃) = −e^{iψ}X₂, N(X₂,X₃) = e^{iφ}X₁`
pub fn ndg3(psi: f64, phi: f64) -> PointTensor {
    PointTensor::from_relations(3, &[(0, 1, 2, C64::from_polar(1.0, -psi)), (0, 2, 1, -C64::from_polar(1.0, psi)), (1, 2, 0, C64::from_polar(1.0, phi))])
        .expect("valid")
}

/// `N(X₁,X₂) = X₁, N(X₁,X₃) = X₂, N(X₂,X₃) = X₂ + X₃`
pub fn ndg4() -> PointTensor {
    exact(3, &[(0, 1, 0, 1), (0, 2, 1, 1), (1, 2, 1, 1), (1, 2, 2, 1)])
}

fn chart(name: &str, coords: &[&str], rows: &[(&str, &[(&str, &str)])]) -> ChartStructure {
    ChartStructure::from_rows(name, coords, rows).expect("catalog chart parses")
}

pub fn catalog() -> Vec<Model> {
    use ModelPayload::*;
    let m = |name, note, expected, payload| Model { name, note, expected, payload };
    vec![
        m(
            "submax",
            "dim 4, J∂z = i∂z + w∂w̄, J∂w = i∂w: the submaximal normal form",
            TypeLabel::Dim4Nonzero,
            Chart(chart("submax", &["z", "w"], &[("z", &[("dz", "i"), ("dw_", "w")]), ("w", &[("dw", "i")])])),
        ),
        m(
            "torus",
            "dim 4, J∂z = i∂z + exp(2πi Re w)∂w̄: descends to the torus C²/Z⁴ with N nowhere zero",
            TypeLabel::Dim4Nonzero,
            Chart(chart("torus", &["z", "w"], &[("z", &[("dz", "i"), ("dw_", "exp(pi*i*(w + w_))")]), ("w", &[("dw", "i")])])),
        ),
        m(
            "onfor",
            "dim 6, product of the submaximal model with C(ζ): most symmetric DG2(1)",
            TypeLabel::Dg2(1),
            Chart(chart(
                "onfor",
                &["z", "w", "zeta"],
                &[("z", &[("dz", "i"), ("dw_", "w")]), ("w", &[("dw", "i")]), ("zeta", &[("dzeta", "i")])],
            )),
        ),
        m(
            "nofor",
            "dim 6, J∂z = i∂z + ζ∂w̄: most symmetric DG2(2)",
            TypeLabel::Dg2(2),
            Chart(chart(
                "nofor",
                &["z", "zeta", "w"],
                &[("z", &[("dz", "i"), ("dw_", "zeta")]), ("zeta", &[("dzeta", "i")]), ("w", &[("dw", "i")])],
            )),
        ),
        m("flat2", "flat C²", TypeLabel::Integrable, Chart(ChartStructure::flat("flat2", &["z", "w"]).expect("flat"))),
        m("flat3", "flat C³", TypeLabel::Integrable, Chart(ChartStructure::flat("flat3", &["z1", "z2", "z3"]).expect("flat"))),
        m("flat4", "flat C⁴", TypeLabel::Integrable, Chart(ChartStructure::flat("flat4", &["z1", "z2", "z3", "z4"]).expect("flat"))),
        m("dim4", "dim 4 point tensor N(X₁,X₂) = X₂", TypeLabel::Dim4Nonzero, Tensor(exact(2, &[(0, 1, 1, 1)]))),
        m("ndg1", "NDG(1) normal form, λ = 2, φ = π/5 (non-exceptional)", TypeLabel::Ndg(Some(1)), Tensor(ndg1(2.0, PI / 5.0))),
        m("ndg2", "NDG(2) normal form, φ = π/5", TypeLabel::Ndg(Some(2)), Tensor(ndg2(PI / 5.0))),
        m("ndg3", "NDG(3) normal form, ψ = π/7, φ = π/5 (non-exceptional)", TypeLabel::Ndg(Some(3)), Tensor(ndg3(PI / 7.0, PI / 5.0))),
        m("ndg4", "NDG(4) normal form", TypeLabel::Ndg(Some(4)), Tensor(ndg4())),
        m(
            "neqs1",
            "N(X₁,X₂) = X₂, N(X₁,X₃) = −X₃, N(X₂,X₃) = X₁: NDG(1) at e^{2iφ} = −λ = 1, equivalent to neqs2; every line is fixed",
            TypeLabel::Ndg(Some(3)),
            Tensor(exact(3, &[(0, 1, 1, 1), (0, 2, 2, -1), (1, 2, 0, 1)])),
        ),
        m(
            "neqs2",
            "N(X₁,X₂) = X₃, N(X₁,X₃) = X₂, N(X₂,X₃) = X₁: stabilizer su(2,1)",
            TypeLabel::Ndg(Some(3)),
            Tensor(exact(3, &[(0, 1, 2, 1), (0, 2, 1, 1), (1, 2, 0, 1)])),
        ),
        m(
            "neqs3",
            "N(X₁,X₂) = X₃, N(X₃,X₁) = X₂, N(X₂,X₃) = X₁: conjugated vector product, the G₂-invariant structure on S⁶",
            TypeLabel::Ndg(Some(3)),
            Tensor(exact(3, &[(0, 1, 2, 1), (2, 0, 1, 1), (1, 2, 0, 1)])),
        ),
        m("dg1", "rank-2 image sample N(X₁,X₂) = X₁, N(X₂,X₃) = X₂", TypeLabel::Dg1, Tensor(exact(3, &[(0, 1, 0, 1), (1, 2, 1, 1)]))),
        m("dg2_1", "DG2(1): N(X₁,X₂) = X₁", TypeLabel::Dg2(1), Tensor(exact(3, &[(0, 1, 0, 1)]))),
        m("dg2_2", "DG2(2): N(X₁,X₂) = X₃, image inside the kernel", TypeLabel::Dg2(2), Tensor(exact(3, &[(0, 1, 2, 1)]))),
        m(
            "gen_m1_a",
            "dim 8, rank-1 image, N(X₁,X₂) = X₁ (branch W∩Z=0)",
            TypeLabel::General { m: 1, branch: "W∩Z=0".into() },
            Tensor(exact(4, &[(0, 1, 0, 1)])),
        ),
        m(
            "gen_m1_b",
            "dim 8, rank-1 image, N(X₁,X₂) = X₃ (branch W⊂Z)",
            TypeLabel::General { m: 1, branch: "W⊂Z".into() },
            Tensor(exact(4, &[(0, 1, 2, 1)])),
        ),
    ]
}

pub fn model(name: &str) -> Option<Model> {
    catalog().into_iter().find(|m| m.name == name)
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfTestLine {
    pub name: String,
    pub expected: String,
    pub got: String,
    pub ok: bool,
}

/// Classifies every entry (charts at the origin) and compares with the advertised label.
pub fn self_test(tol: f64) -> Vec<SelfTestLine> {
    catalog()
        .into_iter()
        .map(|m| {
            let got = match &m.payload {
                ModelPayload::Tensor(t) => Ok(classify(&t.to_antilinear(), tol).type_label),
                ModelPayload::Chart(s) => {
                    let violations = s.validate();
                    if !violations.is_empty() {
                        Err(format!("{} validation failure(s)", violations.len()))
                    } else {
                        s.jet_at(&vec![c(0.0, 0.0); s.n()])
                            .map_err(|e| e.to_string())
                            .and_then(|j| nijenhuis_at(&j).map_err(|e| e.to_string()))
                            .map(|nv| classify(&nv.standard, tol).type_label)
                    }
                }
            };
            let (got, ok) = match got {
                Ok(l) => (l.to_string(), l == m.expected),
                Err(e) => (e, false),
            };
            SelfTestLine { name: m.name.into(), expected: m.expected.to_string(), got, ok }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_self_test() {
        for line in self_test(1e-9) {
            assert!(line.ok, "{line:?}");
        }
    }

    #[test]
    fn names_are_unique() {
        let cat = catalog();
        for (i, a) in cat.iter().enumerate() {
            assert!(cat[i + 1..].iter().all(|b| b.name != a.name));
        }
        assert!(model("neqs3").unwrap().tensor().unwrap().is_exact());
        assert_eq!(model("nofor").unwrap().kind(), ModelKind::Chart);
    }
}
