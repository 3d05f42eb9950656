use acs_core::clinalg::CMat;
use acs_core::models;
use acs_core::nijenhuis::classify;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| CMat::from_iterator(n, n, v.into_iter().map(|(a, b)| C64::new(a, b))))
        .prop_filter("well conditioned", |g| g.determinant().norm() > 0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dim3_labels_survive_conjugation(g in matrix(3), which in 0usize..6) {
        let name = ["dg1", "dg2_1", "dg2_2", "ndg2", "ndg4", "neqs3"][which];
        let m = models::model(name).unwrap();
        let t = m.tensor().unwrap();
        let label = classify(&t.change_basis(&g).unwrap().to_antilinear(), 1e-9).type_label;
        prop_assert_eq!(label, m.expected);
    }

    #[test]
    fn dim4_labels_survive_conjugation(g in matrix(4), which in 0usize..2) {
        let m = models::model(["gen_m1_a", "gen_m1_b"][which]).unwrap();
        let label = classify(&m.tensor().unwrap().change_basis(&g).unwrap().to_antilinear(), 1e-9).type_label;
        prop_assert_eq!(label, m.expected);
    }

    #[test]
    fn change_basis_round_trips(g in matrix(3)) {
        let t = models::ndg3(0.4, 1.1);
        let back = t.change_basis(&g).unwrap().change_basis(&g.clone().try_inverse().unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    prop_assert!((back.get(i, j, k) - t.get(i, j, k)).norm() < 1e-9);
                }
            }
        }
    }
}
