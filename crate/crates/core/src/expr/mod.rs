//! Exponential-polynomial coefficient functions in complex coordinates and
//! their conjugates.
//!
//! A [`CoeffExpr`] is a finite sum of `c · Π v^e · exp(Σ λ_v v)` where `v`
//! ranges over coordinates and conjugate coordinates, treated as independent
//! (Wirtinger) variables.

mod jet;
mod parse;

pub use jet::Jet1;
pub use parse::{parse, parse_exact_constant, Ast, ParseError};

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

/// Variable id: `2j` is coordinate `j`, `2j + 1` its conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub u16);

impl VarId {
    pub fn holo(j: usize) -> Self {
        VarId((2 * j) as u16)
    }
    pub fn anti(j: usize) -> Self {
        VarId((2 * j + 1) as u16)
    }
    pub fn conj(self) -> Self {
        VarId(self.0 ^ 1)
    }
    pub fn coord(self) -> usize {
        (self.0 / 2) as usize
    }
    pub fn is_conj(self) -> bool {
        self.0 & 1 == 1
    }
    /// Position in the complex frame `(∂z_1..∂z_n, ∂z̄_1..∂z̄_n)`.
    pub fn frame_index(self, n: usize) -> usize {
        if self.is_conj() {
            n + self.coord()
        } else {
            self.coord()
        }
    }
    pub fn from_frame_index(k: usize, n: usize) -> Self {
        if k < n {
            VarId::holo(k)
        } else {
            VarId::anti(k - n)
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid coordinate name `{0}`")]
    BadName(String),
    #[error("duplicate coordinate name `{0}`")]
    DuplicateName(String),
    #[error("no value assigned to `{0}`")]
    MissingAssignment(String),
    #[error("conjugate-inconsistent point: value of `{0}` is not the conjugate of its partner")]
    InconsistentPoint(String),
    #[error("point assignment: {0}")]
    BadPoint(String),
}

/// Ordered coordinate names. The conjugate of `w` is spelled `w_`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarTable {
    names: Vec<String>,
}

const RESERVED: [&str; 3] = ["i", "pi", "exp"];

impl VarTable {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, ExprError> {
        let mut out: Vec<String> = Vec::new();
        for n in names {
            let n = n.as_ref();
            let mut chars = n.chars();
            let ok_head = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
            let ok_tail = chars.all(|c| c.is_ascii_alphanumeric());
            if !ok_head || !ok_tail || RESERVED.contains(&n) {
                return Err(ExprError::BadName(n.to_string()));
            }
            if out.iter().any(|m| m == n) {
                return Err(ExprError::DuplicateName(n.to_string()));
            }
            out.push(n.to_string());
        }
        Ok(VarTable { names: out })
    }

    pub fn empty() -> Self {
        VarTable { names: vec![] }
    }

    /// Number of complex coordinates.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Resolves `w` or `w_`.
    pub fn lookup(&self, ident: &str) -> Option<VarId> {
        let (base, conj) = match ident.strip_suffix('_') {
            Some(b) => (b, true),
            None => (ident, false),
        };
        let j = self.names.iter().position(|n| n == base)?;
        Some(if conj { VarId::anti(j) } else { VarId::holo(j) })
    }

    pub fn name(&self, v: VarId) -> String {
        let base = self.names.get(v.coord()).cloned().unwrap_or_else(|| format!("v{}", v.coord()));
        if v.is_conj() {
            base + "_"
        } else {
            base
        }
    }

    /// Parses `"z=0.1+0.2i, w=-1"` into a point; unnamed coordinates are 0.
    pub fn parse_point(&self, text: &str) -> Result<Vec<C64>, ExprError> {
        let mut p = vec![C64::new(0.0, 0.0); self.len()];
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, val) = item
                .split_once('=')
                .ok_or_else(|| ExprError::BadPoint(format!("expected name=value, got `{item}`")))?;
            let v = self
                .lookup(name.trim())
                .filter(|v| !v.is_conj())
                .ok_or_else(|| ExprError::BadPoint(format!("unknown coordinate `{}`", name.trim())))?;
            let value = parse_complex_literal(val.trim())
                .ok_or_else(|| ExprError::BadPoint(format!("bad complex number `{}`", val.trim())))?;
            p[v.coord()] = value;
        }
        Ok(p)
    }
}

/// Accepts `a`, `bi`, `a+bi`, `a-bi` and grammar constants such as `(1 + 2*i)`.
pub fn parse_complex_literal(s: &str) -> Option<C64> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return None;
    }
    // rewrite a trailing `i` suffix on a number (`0.2i`) as `*i` for the grammar
    let mut g = String::new();
    let chars: Vec<char> = compact.chars().collect();
    for (k, &c) in chars.iter().enumerate() {
        if c == 'i' && k > 0 && (chars[k - 1].is_ascii_digit() || chars[k - 1] == '.') {
            g.push('*');
        }
        g.push(c);
    }
    let e = parse(&g, &VarTable::empty()).ok()?;
    e.constant_value()
}

/// Key of `exp(Σ λ_v v)`: bit patterns of normalized (re, im) pairs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct ExpKey(Vec<(VarId, u64, u64)>);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct TermKey {
    powers: Vec<(VarId, u32)>,
    exp: ExpKey,
}

fn norm_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn c_norm(c: C64) -> C64 {
    C64::new(norm_zero(c.re), norm_zero(c.im))
}

impl ExpKey {
    fn from_map(m: &BTreeMap<VarId, C64>) -> Self {
        ExpKey(
            m.iter()
                .map(|(v, c)| (*v, c_norm(*c)))
                .filter(|(_, c)| *c != C64::new(0.0, 0.0))
                .map(|(v, c)| (v, c.re.to_bits(), c.im.to_bits()))
                .collect(),
        )
    }
    fn lambdas(&self) -> impl Iterator<Item = (VarId, C64)> + '_ {
        self.0.iter().map(|(v, r, i)| (*v, C64::new(f64::from_bits(*r), f64::from_bits(*i))))
    }
    fn lambda(&self, v: VarId) -> C64 {
        self.lambdas().find(|(w, _)| *w == v).map(|(_, c)| c).unwrap_or(C64::new(0.0, 0.0))
    }
    fn to_map(&self) -> BTreeMap<VarId, C64> {
        self.lambdas().collect()
    }
}

/// One term of a [`CoeffExpr`], exposed for inspection.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coefficient: C64,
    pub exponents: BTreeMap<VarId, u32>,
    pub exp_factor: BTreeMap<VarId, C64>,
}

/// Canonical exponential polynomial. Equality is equality of canonical forms.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CoeffExpr {
    terms: BTreeMap<TermKey, C64>,
}

impl CoeffExpr {
    pub fn zero() -> Self {
        CoeffExpr::default()
    }

    pub fn constant(c: C64) -> Self {
        let mut e = CoeffExpr::zero();
        e.insert(TermKey { powers: vec![], exp: ExpKey(vec![]) }, c);
        e
    }

    pub fn real(x: f64) -> Self {
        CoeffExpr::constant(C64::new(x, 0.0))
    }

    pub fn var(v: VarId) -> Self {
        let mut e = CoeffExpr::zero();
        e.insert(TermKey { powers: vec![(v, 1)], exp: ExpKey(vec![]) }, C64::new(1.0, 0.0));
        e
    }

    /// `c · exp(Σ λ_v v)`.
    pub fn exp_linear(c: C64, lambdas: &BTreeMap<VarId, C64>) -> Self {
        let mut e = CoeffExpr::zero();
        e.insert(TermKey { powers: vec![], exp: ExpKey::from_map(lambdas) }, c);
        e
    }

    fn insert(&mut self, key: TermKey, c: C64) {
        let entry = self.terms.entry(key.clone()).or_insert(C64::new(0.0, 0.0));
        *entry = c_norm(*entry + c);
        if *entry == C64::new(0.0, 0.0) {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> Vec<Term> {
        self.terms
            .iter()
            .map(|(k, c)| Term {
                coefficient: *c,
                exponents: k.powers.iter().copied().collect(),
                exp_factor: k.exp.to_map(),
            })
            .collect()
    }

    /// Value if the expression has no variables.
    pub fn constant_value(&self) -> Option<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            if !k.powers.is_empty() || !k.exp.0.is_empty() {
                return None;
            }
            acc += c;
        }
        Some(acc)
    }

    /// Variables occurring in the expression.
    pub fn variables(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self
            .terms
            .keys()
            .flat_map(|k| k.powers.iter().map(|p| p.0).chain(k.exp.0.iter().map(|e| e.0)))
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Affine pieces `(constant, {v: coefficient})` when the expression is affine.
    pub fn as_affine(&self) -> Option<(C64, BTreeMap<VarId, C64>)> {
        let mut c0 = C64::new(0.0, 0.0);
        let mut lin = BTreeMap::new();
        for (k, c) in &self.terms {
            if !k.exp.0.is_empty() {
                return None;
            }
            match k.powers.as_slice() {
                [] => c0 += c,
                [(v, 1)] => {
                    lin.insert(*v, *c);
                }
                _ => return None,
            }
        }
        Some((c0, lin))
    }

    pub fn add(&self, o: &CoeffExpr) -> CoeffExpr {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.insert(k.clone(), *c);
        }
        out
    }

    pub fn sub(&self, o: &CoeffExpr) -> CoeffExpr {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> CoeffExpr {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, s: C64) -> CoeffExpr {
        let mut out = CoeffExpr::zero();
        for (k, c) in &self.terms {
            out.insert(k.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, o: &CoeffExpr) -> CoeffExpr {
        let mut out = CoeffExpr::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                out.insert(mul_keys(ka, kb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> CoeffExpr {
        let mut acc = CoeffExpr::constant(C64::new(1.0, 0.0));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Complex conjugate: swaps each variable with its partner and conjugates constants.
    pub fn conj(&self) -> CoeffExpr {
        let mut out = CoeffExpr::zero();
        for (k, c) in &self.terms {
            let mut powers: Vec<(VarId, u32)> = k.powers.iter().map(|(v, e)| (v.conj(), *e)).collect();
            powers.sort();
            let exp: BTreeMap<VarId, C64> = k.exp.lambdas().map(|(v, l)| (v.conj(), l.conj())).collect();
            out.insert(TermKey { powers, exp: ExpKey::from_map(&exp) }, c.conj());
        }
        out
    }

    /// Exact Wirtinger partial derivative.
    pub fn diff(&self, v: VarId) -> CoeffExpr {
        let mut out = CoeffExpr::zero();
        for (k, c) in &self.terms {
            if let Some(pos) = k.powers.iter().position(|(w, _)| *w == v) {
                let e = k.powers[pos].1;
                let mut powers = k.powers.clone();
                if e == 1 {
                    powers.remove(pos);
                } else {
                    powers[pos].1 = e - 1;
                }
                out.insert(TermKey { powers, exp: k.exp.clone() }, c * e as f64);
            }
            let lam = k.exp.lambda(v);
            if lam != C64::new(0.0, 0.0) {
                out.insert(k.clone(), c * lam);
            }
        }
        out
    }

    /// Evaluates at a point given by holomorphic coordinate values; conjugate
    /// variables take the conjugate values.
    pub fn eval(&self, point: &[C64]) -> Result<C64, ExprError> {
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let value = |v: VarId| -> Result<C64, ExprError> {
                let z = point.get(v.coord()).ok_or_else(|| ExprError::MissingAssignment(format!("coordinate #{}", v.coord() + 1)))?;
                Ok(if v.is_conj() { z.conj() } else { *z })
            };
            let mut t = *c;
            for (v, e) in &k.powers {
                t *= value(*v)?.powu(*e);
            }
            let mut arg = C64::new(0.0, 0.0);
            for (v, l) in k.exp.lambdas() {
                arg += l * value(v)?;
            }
            if !k.exp.0.is_empty() {
                t *= arg.exp();
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Evaluates with an explicit assignment to variable ids, checking that
    /// each assigned pair `v`, `v̄` is conjugate-consistent.
    pub fn eval_assignment(&self, vars: &VarTable, assign: &BTreeMap<VarId, C64>) -> Result<C64, ExprError> {
        for (v, z) in assign {
            if let Some(w) = assign.get(&v.conj()) {
                if (z.conj() - w).norm() > 1e-12 * (1.0 + z.norm()) {
                    return Err(ExprError::InconsistentPoint(vars.name(*v)));
                }
            }
        }
        let needed = self.variables();
        let n = needed.iter().map(|v| v.coord() + 1).max().unwrap_or(0);
        let mut point = vec![C64::new(0.0, 0.0); n];
        for v in needed {
            let z = match (assign.get(&v), assign.get(&v.conj())) {
                (Some(z), _) => if v.is_conj() { z.conj() } else { *z },
                (None, Some(w)) => if v.is_conj() { *w } else { w.conj() },
                (None, None) => return Err(ExprError::MissingAssignment(vars.name(v))),
            };
            point[v.coord()] = z;
        }
        self.eval(&point)
    }

    /// Canonical text form, parseable back to an identical expression.
    pub fn to_text(&self, vars: &VarTable) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in &self.terms {
            let mut factors: Vec<String> = Vec::new();
            let coef = format_complex(*c);
            let trivial = k.powers.is_empty() && k.exp.0.is_empty();
            if trivial || *c != C64::new(1.0, 0.0) {
                factors.push(coef);
            }
            for (v, e) in &k.powers {
                if *e == 1 {
                    factors.push(vars.name(*v));
                } else {
                    factors.push(format!("{}^{}", vars.name(*v), e));
                }
            }
            if !k.exp.0.is_empty() {
                let inner: Vec<String> = k
                    .exp
                    .lambdas()
                    .map(|(v, l)| format!("{}*{}", format_complex(l), vars.name(v)))
                    .collect();
                factors.push(format!("exp({})", inner.join(" + ")));
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }

    /// Expression text when no variable table is available; coordinates print as `v1`, `v1_`.
    pub fn display(&self) -> String {
        self.to_text(&VarTable::empty())
    }
}

fn mul_keys(a: &TermKey, b: &TermKey) -> TermKey {
    let mut powers: BTreeMap<VarId, u32> = a.powers.iter().copied().collect();
    for (v, e) in &b.powers {
        *powers.entry(*v).or_insert(0) += e;
    }
    let mut exp = a.exp.to_map();
    for (v, l) in b.exp.lambdas() {
        *exp.entry(v).or_insert(C64::new(0.0, 0.0)) += l;
    }
    TermKey { powers: powers.into_iter().collect(), exp: ExpKey::from_map(&exp) }
}

/// Grammar form of a complex constant; round-trips bit-exactly through the parser.
pub fn format_complex(c: C64) -> String {
    let (re, im) = (norm_zero(c.re), norm_zero(c.im));
    let mut s = String::new();
    if im == 0.0 {
        let _ = write!(s, "{re}");
    } else if re == 0.0 {
        let _ = write!(s, "{im}*i");
    } else {
        let _ = write!(s, "({re} + {im}*i)");
    }
    s
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vt() -> VarTable {
        VarTable::new(&["z", "w"]).unwrap()
    }

    fn p(s: &str) -> CoeffExpr {
        parse(s, &vt()).unwrap()
    }

    #[test]
    fn diff_power_rule() {
        let w = vt().lookup("w").unwrap();
        assert_eq!(p("w^2").diff(w), p("2*w"));
    }

    #[test]
    fn diff_exp_rule() {
        let w = vt().lookup("w").unwrap();
        let e = p("exp(pi*i*(w + w_))");
        assert_eq!(e.diff(w), e.scale(C64::new(0.0, std::f64::consts::PI)));
    }

    #[test]
    fn wirtinger_independence() {
        let w = vt().lookup("w").unwrap();
        assert!(p("z*w_").diff(w).is_zero());
    }

    #[test]
    fn eval_examples() {
        let one_plus_i = C64::new(1.0, 1.0);
        assert_eq!(p("w").eval(&[C64::new(0.0, 0.0), one_plus_i]).unwrap(), one_plus_i);
        let v = p("exp(pi*i*(w + w_))").eval(&[C64::new(0.0, 0.0), C64::new(0.5, 0.0)]).unwrap();
        assert!((v - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(p("2*w_ + w_^2").eval(&[C64::new(0.0, 0.0); 2]).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn eval_assignment_checks_consistency() {
        let t = vt();
        let e = p("w + w_");
        let w = t.lookup("w").unwrap();
        let mut a = BTreeMap::new();
        a.insert(w, C64::new(1.0, 1.0));
        assert_eq!(e.eval_assignment(&t, &a).unwrap(), C64::new(2.0, 0.0));
        a.insert(w.conj(), C64::new(1.0, 1.0));
        assert!(matches!(e.eval_assignment(&t, &a), Err(ExprError::InconsistentPoint(_))));
        assert!(matches!(p("z").eval_assignment(&t, &BTreeMap::new()), Err(ExprError::MissingAssignment(_))));
    }

    #[test]
    fn conj_swaps_partners() {
        assert_eq!(p("i*w^2*z_").conj(), p("-i*w_^2*z"));
        assert_eq!(p("exp(i*w)").conj(), p("exp(-i*w_)"));
    }

    #[test]
    fn printing_round_trips() {
        for s in ["0", "w", "2*w_ + w_^2", "exp(pi*i*(w + w_))", "(1+2*i)*z*w_^3 - 0.1", "i*exp(2*z + 3*i*w_)*z"] {
            let e = p(s);
            assert_eq!(parse(&e.to_text(&vt()), &vt()).unwrap(), e, "{s}");
        }
    }

    #[test]
    fn point_parsing() {
        let t = vt();
        let pt = t.parse_point("z=0.1+0.2i, w=-1").unwrap();
        assert_eq!(pt, vec![C64::new(0.1, 0.2), C64::new(-1.0, 0.0)]);
        assert!(t.parse_point("q=1").is_err());
    }

    #[test]
    fn var_table_rejects_bad_names() {
        assert!(VarTable::new(&["z", "z"]).is_err());
        assert!(VarTable::new(&["pi"]).is_err());
        assert!(VarTable::new(&["w_"]).is_err());
        assert!(VarTable::new(&["2w"]).is_err());
    }
}
