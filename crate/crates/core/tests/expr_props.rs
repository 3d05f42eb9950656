use acs_core::expr::{parse, CoeffExpr, VarId, VarTable};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn vt() -> VarTable {
    VarTable::new(&["z", "w"]).unwrap()
}

/// (coefficient, powers of z, z_, w, w_, exponent coefficients of z and w_)
type TermSpec = ((i32, i32), [u32; 4], (i32, i32));

fn term_text(((re, im), p, (lz, lw)): &TermSpec) -> String {
    let mut s = format!("({re} + {im}*i)");
    for (name, e) in ["z", "z_", "w", "w_"].iter().zip(p) {
        if *e > 0 {
            s += &format!("*{name}^{e}");
        }
    }
    if *lz != 0 || *lw != 0 {
        s += &format!("*exp({lz}*z + {lw}*i*w_)");
    }
    s
}

fn expr_text() -> impl Strategy<Value = String> {
    let term = ((-4i32..=4, -4i32..=4), prop::array::uniform4(0u32..3), (-1i32..=1, -1i32..=1));
    prop::collection::vec(term, 1..5).prop_map(|ts| ts.iter().map(term_text).collect::<Vec<_>>().join(" + "))
}

fn point() -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-0.8f64..0.8, -0.8f64..0.8).prop_map(|(a, b)| C64::new(a, b)), 2)
}

fn vars4() -> [VarId; 4] {
    [VarId::holo(0), VarId::anti(0), VarId::holo(1), VarId::anti(1)]
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn text_round_trip(s in expr_text()) {
        let e = parse(&s, &vt()).unwrap();
        let again = parse(&e.to_text(&vt()), &vt()).unwrap();
        prop_assert_eq!(again, e);
    }

    #[test]
    fn mixed_partials_commute(s in expr_text()) {
        let e = parse(&s, &vt()).unwrap();
        for a in vars4() {
            for b in vars4() {
                prop_assert_eq!(e.diff(a).diff(b), e.diff(b).diff(a));
            }
        }
    }

    #[test]
    fn conjugation(s in expr_text(), p in point()) {
        let e = parse(&s, &vt()).unwrap();
        prop_assert_eq!(e.conj().conj(), e.clone());
        prop_assert!(close(e.conj().eval(&p).unwrap(), e.eval(&p).unwrap().conj(), 1e-12));
    }

    #[test]
    fn derivatives_match_finite_differences(s in expr_text(), p in point()) {
        let e = parse(&s, &vt()).unwrap();
        let h = 1e-5;
        for j in 0..2 {
            let (dz, dzb) = (e.diff(VarId::holo(j)).eval(&p).unwrap(), e.diff(VarId::anti(j)).eval(&p).unwrap());
            for (step, want) in [(C64::new(1.0, 0.0), dz + dzb), (C64::new(0.0, 1.0), (dz - dzb) * C64::i())] {
                let mut plus = p.clone();
                let mut minus = p.clone();
                plus[j] += step * h;
                minus[j] -= step * h;
                let fd = (e.eval(&plus).unwrap() - e.eval(&minus).unwrap()) / (2.0 * h);
                prop_assert!(close(fd, want, 1e-5), "{} vs {}", fd, want);
            }
        }
    }

    #[test]
    fn leibniz_rule(s in expr_text(), t in expr_text(), p in point()) {
        let (e, f) = (parse(&s, &vt()).unwrap(), parse(&t, &vt()).unwrap());
        for v in vars4() {
            let lhs = e.mul(&f).diff(v).eval(&p).unwrap();
            let rhs = e.diff(v).mul(&f).add(&e.mul(&f.diff(v))).eval(&p).unwrap();
            prop_assert!(close(lhs, rhs, 1e-10));
        }
    }

    #[test]
    fn subtraction_cancels(s in expr_text()) {
        let e = parse(&s, &vt()).unwrap();
        prop_assert!(e.sub(&e).is_zero());
        prop_assert_eq!(e.add(&CoeffExpr::zero()), e);
    }
}
