//! Topological obstructions to non-degenerate almost complex structures, as integer checks
//! over caller-supplied characteristic numbers and class-level facts.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    /// No implemented obstruction fails.
    Admits,
    Excluded,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Undetermined,
    /// Derived context, not a condition.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expression: String,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub context: String,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ObstructionReport {
    fn new(context: impl Into<String>) -> Self {
        ObstructionReport { context: context.into(), checks: vec![], verdict: Verdict::Admits, notes: vec![] }
    }

    fn push(&mut self, name: &str, expression: String, status: CheckStatus) {
        self.checks.push(Check { name: name.into(), expression, status });
    }

    fn cond(&mut self, name: &str, expression: String, ok: bool) {
        self.push(name, expression, if ok { CheckStatus::Pass } else { CheckStatus::Fail });
    }

    fn finish(mut self) -> Self {
        let st = |s| self.checks.iter().any(|c| c.status == s);
        self.verdict = if st(CheckStatus::Fail) {
            Verdict::Excluded
        } else if st(CheckStatus::Undetermined) {
            Verdict::Undetermined
        } else {
            Verdict::Admits
        };
        self
    }

    pub fn passes(&self) -> bool {
        self.verdict != Verdict::Excluded
    }
}

/// Closed 4-manifold with Euler characteristic χ and signature τ.
pub fn dim4_check(chi: i64, tau: i64) -> ObstructionReport {
    let mut r = ObstructionReport::new(format!("dim 4: chi={chi}, tau={tau}"));
    let lin = 5 * chi + 6 * tau;
    r.cond("5chi+6tau=0", format!("5*{chi} + 6*({tau}) = {lin}"), lin == 0);
    r.cond("chi=0 mod 24", format!("{chi} mod 24 = {}", chi.rem_euclid(24)), chi.rem_euclid(24) == 0);
    let kk = if chi % 2 == 0 { format!("{}", -chi / 2) } else { format!("-{chi}/2") };
    r.push("K.K", format!("K.K = -chi/2 = {kk}"), CheckStatus::Info);
    r.push("Wu", format!("c1^2 = 2chi+3tau = {}", 2 * chi + 3 * tau), CheckStatus::Info);
    r.finish()
}

/// `#r CP² # s CP²‾`, i.e. `b₊ = r`, `b₋ = s`.
pub fn cp2_sum_check(r_: u64, s: u64) -> ObstructionReport {
    let (ri, si) = (r_ as i128, s as i128);
    let mut r = ObstructionReport::new(format!("#{r_} CP2 # {s} CP2bar"));
    r.cond("r odd", format!("{r_} mod 2 = {}", r_ % 2), r_ % 2 == 1);
    r.cond("s=11r+10", format!("11*{r_} + 10 = {} vs s = {s}", 11 * ri + 10), si == 11 * ri + 10);
    r.push("chi,tau", format!("chi = {}, tau = {}", 2 + ri + si, ri - si), CheckStatus::Info);
    r.finish()
}

/// Even intersection form `m·H ⊕ n·E₈`.
pub fn type_ii_check(m: i64, n: i64) -> ObstructionReport {
    let mut r = ObstructionReport::new(format!("type II: {m}H + {n}E8"));
    r.cond("4n=5(m+1)", format!("4*{n} = {} vs 5*({m}+1) = {}", 4 * n, 5 * (m + 1)), 4 * n == 5 * (m + 1));
    r.cond("n>0", format!("n = {n}"), n > 0);
    r.cond("m=3 mod 4", format!("{m} mod 4 = {}", m.rem_euclid(4)), m.rem_euclid(4) == 3);
    r.finish()
}

/// Class-level facts for a closed 6-manifold; `c1c2` is the Chern number.
pub fn dim6_check(three_c1_zero: bool, c1_squared_zero: bool, c1c2: i64) -> ObstructionReport {
    let mut r = ObstructionReport::new("dim 6");
    r.cond("3c1=0", format!("3c1 = 0 asserted: {three_c1_zero}"), three_c1_zero);
    r.cond("c1^2=0", format!("c1^2 = 0 asserted: {c1_squared_zero}"), c1_squared_zero);
    r.cond("c1c2=0", format!("c1c2 = {c1c2}"), c1c2 == 0);
    r.finish()
}

/// Almost complex structure on CP³ with total Chern class `1 + 2r x + 2(r²−1) x² + 4x³`.
pub fn cp3_check(r_: i64) -> ObstructionReport {
    let r2 = (r_ as i128) * (r_ as i128);
    let c1c2 = 4 * (r_ as i128) * (r2 - 1);
    let mut r = dim6_check(r_ == 0, r_ == 0, c1c2 as i64);
    r.context = format!("CP3, c = 1 + {}x + {}x^2 + 4x^3", 2 * r_, 2 * (r2 - 1));
    r.checks[0].expression = format!("3c1 = {}x", 6 * r_);
    r.checks[1].expression = format!("c1^2 = {}x^2", 4 * r2);
    r.checks[2].expression = format!("c1c2 = 4r(r^2-1) = {c1c2}");
    if r_ == 0 {
        r.notes.push("no obstruction fails; existence is open".into());
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dim8Mode {
    General,
    Transversal,
    Strong,
}

impl std::str::FromStr for Dim8Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "general" => Ok(Dim8Mode::General),
            "transversal" => Ok(Dim8Mode::Transversal),
            "strong" => Ok(Dim8Mode::Strong),
            o => Err(format!("unknown mode {o:?}; expected general, transversal or strong")),
        }
    }
}

/// Chern numbers of a closed 8-manifold with an almost complex structure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dim8Numbers {
    pub c1_4: i64,
    pub c1_2c2: i64,
    pub c1c3: i64,
    pub c2_2: i64,
    pub c4: i64,
    /// `H*(M; ℤ)` has no torsion.
    pub torsion_free: bool,
    /// Whether `3c₂ = −3q²` holds for the caller's class `q`; `None` when not known.
    pub q_relation: Option<bool>,
}

pub fn dim8_check(d: &Dim8Numbers, mode: Dim8Mode) -> ObstructionReport {
    let mut r = ObstructionReport::new(format!("dim 8 ({mode:?})").to_lowercase());
    let (a, b, c, e, f) = (d.c1_4 as i128, d.c1_2c2 as i128, d.c1c3 as i128, d.c2_2 as i128, d.c4 as i128);
    let mg = |r: &mut ObstructionReport| {
        let x = -a + 4 * b + c + 3 * e - f;
        r.cond("MG720", format!("-c1^4+4c1^2c2+c1c3+3c2^2-c4 = {x}, mod 720 = {}", x.rem_euclid(720)), x.rem_euclid(720) == 0);
        let y = 2 * a + b;
        r.cond("MG12", format!("2c1^4+c1^2c2 = {y}, mod 12 = {}", y.rem_euclid(12)), y.rem_euclid(12) == 0);
        let z = c - 2 * f;
        r.cond("MG4", format!("c1c3-2c4 = {z}, mod 4 = {}", z.rem_euclid(4)), z.rem_euclid(4) == 0);
    };
    match mode {
        Dim8Mode::General => mg(&mut r),
        Dim8Mode::Transversal => {
            mg(&mut r);
            // top cohomology of a closed oriented manifold is ℤ, so 15c4 = 0 forces c4 = 0
            r.cond("chi=0", format!("chi = c4 = {f}"), f == 0);
            if d.torsion_free {
                r.cond("3c1=0, 3c3=0", format!("c1^4 = {a}, c1^2c2 = {b}, c1c3 = {c}"), a == 0 && b == 0 && c == 0);
            } else {
                r.push("3c1=0, 3c3=0", "torsion classes; caller's responsibility".into(), CheckStatus::Info);
            }
            match d.q_relation {
                Some(ok) => r.cond("3c2=-3q^2", format!("asserted: {ok}"), ok),
                None => r.push("3c2=-3q^2", "q not supplied".into(), CheckStatus::Undetermined),
            }
        }
        Dim8Mode::Strong => {
            r.cond("c4=0 mod 720", format!("{f} mod 720 = {}", f.rem_euclid(720)), f.rem_euclid(720) == 0);
            if d.torsion_free {
                let all = a == 0 && b == 0 && c == 0 && e == 0 && f == 0;
                r.cond("torsion-free: all Chern numbers vanish", format!("(c1^4, c1^2c2, c1c3, c2^2, c4) = ({a}, {b}, {c}, {e}, {f})"), all);
            }
        }
    }
    r.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surfaces() {
        let k3 = dim4_check(24, -16);
        assert_eq!(k3.verdict, Verdict::Excluded);
        assert!(k3.checks[0].expression.ends_with("= 24"));
        assert_eq!(k3.checks[1].status, CheckStatus::Pass);
        let enr = dim4_check(12, -8);
        assert_eq!(enr.verdict, Verdict::Excluded);
        assert!(enr.checks[..2].iter().all(|c| c.status == CheckStatus::Fail));
        assert_eq!(dim4_check(0, 0).verdict, Verdict::Admits);
    }

    #[test]
    fn blowups_and_type_ii() {
        assert_eq!(cp2_sum_check(1, 21).verdict, Verdict::Admits);
        assert_eq!(cp2_sum_check(1, 20).verdict, Verdict::Excluded);
        assert_eq!(cp2_sum_check(3, 43).verdict, Verdict::Admits);
        assert_eq!(type_ii_check(3, 5).verdict, Verdict::Admits);
        assert_eq!(type_ii_check(3, 4).verdict, Verdict::Excluded);
        assert_eq!(type_ii_check(7, 10).verdict, Verdict::Admits);
        assert_eq!(type_ii_check(-1, 0).verdict, Verdict::Excluded);
    }

    #[test]
    fn dimension_six() {
        assert_eq!(cp3_check(2).verdict, Verdict::Excluded);
        assert_eq!(cp3_check(-1).verdict, Verdict::Excluded);
        let z = cp3_check(0);
        assert_eq!(z.verdict, Verdict::Admits);
        assert!(!z.notes.is_empty());
        assert_eq!(dim6_check(true, true, 0).verdict, Verdict::Admits);
        assert_eq!(dim6_check(true, true, 24).verdict, Verdict::Excluded);
    }

    #[test]
    fn dimension_eight() {
        let zero = Dim8Numbers { torsion_free: true, ..Default::default() };
        assert_eq!(dim8_check(&zero, Dim8Mode::Strong).verdict, Verdict::Admits);
        let c4 = Dim8Numbers { c4: 720, torsion_free: true, ..Default::default() };
        let rep = dim8_check(&c4, Dim8Mode::Strong);
        assert_eq!(rep.verdict, Verdict::Excluded);
        assert_eq!(rep.checks[0].status, CheckStatus::Pass);
        assert_eq!(rep.checks[1].status, CheckStatus::Fail);
        let chi2 = Dim8Numbers { c4: 2, ..Default::default() };
        assert_eq!(dim8_check(&chi2, Dim8Mode::Transversal).verdict, Verdict::Excluded);
        assert_eq!(dim8_check(&Dim8Numbers::default(), Dim8Mode::Transversal).verdict, Verdict::Undetermined);
        let q = Dim8Numbers { q_relation: Some(true), ..Default::default() };
        assert_eq!(dim8_check(&q, Dim8Mode::Transversal).verdict, Verdict::Admits);
    }
}
