//! γ₁ as the kernel of f ↦ fN(ξ,η) − N(fξ,η) − N(ξ,fη) over gl(n,C), by brute force.

use acs_core::clinalg::{CMat, RMat};
use acs_core::models;
use acs_core::nijenhuis::PointTensor;
use acs_core::symbol::gamma1;
use num_complex::Complex64 as C64;

fn residual(t: &PointTensor, f: &CMat) -> Vec<f64> {
    let n = t.n;
    let mut out = Vec::new();
    let probes: Vec<Vec<C64>> = (0..n)
        .flat_map(|a| [C64::new(1.0, 0.0), C64::new(0.0, 1.0)].map(|s| (0..n).map(|k| if k == a { s } else { C64::new(0.0, 0.0) }).collect()))
        .collect();
    let apply = |v: &[C64]| -> Vec<C64> { (0..n).map(|r| (0..n).map(|c| f[(r, c)] * v[c]).sum()).collect() };
    for x in &probes {
        for y in &probes {
            let nxy = t.apply_complex(x, y);
            let lhs = apply(&nxy);
            let a = t.apply_complex(&apply(x), y);
            let b = t.apply_complex(x, &apply(y));
            for k in 0..n {
                let r = lhs[k] - a[k] - b[k];
                out.extend([r.re, r.im]);
            }
        }
    }
    out
}

fn kernel_dim(t: &PointTensor) -> usize {
    let n = t.n;
    let mut cols = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for s in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                let mut f = CMat::zeros(n, n);
                f[(i, j)] = s;
                cols.push(residual(t, &f));
            }
        }
    }
    let m = RMat::from_fn(cols[0].len(), cols.len(), |r, c| cols[c][r]);
    let sv = m.svd(false, false).singular_values;
    cols.len() - sv.iter().filter(|&&s| s > 1e-9).count()
}

#[test]
fn brute_force_matches_gamma1() {
    for name in ["dg2_2", "dg2_1", "dg1", "neqs3", "ndg4"] {
        let t = models::model(name).unwrap().tensor().unwrap().clone();
        assert_eq!(kernel_dim(&t), gamma1(&t).dim(), "{name}");
    }
}

#[test]
fn dg2_2_has_a_trace_direction() {
    let t = models::model("dg2_2").unwrap().tensor().unwrap().clone();
    assert_eq!(kernel_dim(&t), 12);
    let f = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)]));
    assert!(residual(&t, &f).iter().all(|x| x.abs() < 1e-12));
}
