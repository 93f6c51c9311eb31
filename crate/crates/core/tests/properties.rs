use proptest::prelude::*;
use snum_core::lorentz::{distribution_function, lorentz_norm, lp_norm, LorentzParams};
use snum_core::scalar::{q, Exact};
use snum_core::step::StepFunction;
use snum_core::volterra::{mean_zero_project, volterra_apply};

fn level_data() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-5.0f64..5.0, 0.001f64..0.1), 1..10)
}

fn exact_step() -> impl Strategy<Value = StepFunction<Exact>> {
    prop::collection::vec(-20i64..=20, 1..24)
        .prop_map(|v| StepFunction::uniform(v.into_iter().map(|x| q(x, 1)).collect()).unwrap())
}

proptest! {
    #[test]
    fn superadditive_over_disjoint_pieces(data in level_data(), p in 1.0f64..5.0, r in 0.0f64..1.0, split in 0usize..10) {
        let params = LorentzParams::new(p, 1.0 + r * (p - 1.0)).unwrap();
        let k = split % data.len();
        let (a, b) = data.split_at(k);
        let whole = lorentz_norm(&data, params).powf(p);
        let parts = lorentz_norm(a, params).powf(p) + lorentz_norm(b, params).powf(p);
        prop_assert!(parts <= whole * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn diagonal_lorentz_is_lebesgue(data in level_data(), p in 1.0f64..6.0) {
        let a = lorentz_norm(&data, LorentzParams::new(p, p).unwrap());
        let b = lp_norm(&data, p);
        prop_assert!((a - b).abs() <= 1e-10 * b.max(1e-300));
    }

    #[test]
    fn homogeneous_and_monotone(data in level_data(), c in 0.0f64..4.0, p in 1.0f64..4.0) {
        let params = LorentzParams::new(p, 1.0).unwrap();
        let scaled: Vec<_> = data.iter().map(|&(v, m)| (c * v, m)).collect();
        let n = lorentz_norm(&data, params);
        prop_assert!((lorentz_norm(&scaled, params) - c * n).abs() <= 1e-9 * (1.0 + c * n));
        let bigger: Vec<_> = data.iter().map(|&(v, m)| (v.abs() + 1.0, m)).collect();
        prop_assert!(lorentz_norm(&bigger, params) >= n);
    }

    #[test]
    fn distribution_non_increasing(data in level_data(), t in 0.0f64..5.0, dt in 0.0f64..2.0) {
        prop_assert!(distribution_function(&data, t).unwrap() >= distribution_function(&data, t + dt).unwrap());
    }

    #[test]
    fn volterra_oscillation_at_most_half_l1(f in exact_step()) {
        let g = mean_zero_project(&f);
        let v = volterra_apply(&g);
        prop_assert!(v.oscillation() * q(2, 1) <= g.l1_norm());
        prop_assert_eq!(v.node_values().last().unwrap().clone(), q(0, 1));
    }

    #[test]
    fn volterra_is_linear(f in exact_step(), g in exact_step(), a in -5i64..5) {
        let lhs = volterra_apply(&f.scale(&q(a, 1)).add(&g));
        let (vf, vg) = (volterra_apply(&f), volterra_apply(&g));
        for x in [q(0, 1), q(1, 7), q(1, 3), q(5, 8), q(1, 1)] {
            prop_assert_eq!(lhs.eval(&x), vf.eval(&x) * q(a, 1) + vg.eval(&x));
        }
    }

    #[test]
    fn projection_is_idempotent_and_mean_zero(f in exact_step()) {
        let g = mean_zero_project(&f);
        prop_assert_eq!(g.integral(), q(0, 1));
        prop_assert_eq!(mean_zero_project(&g).canonicalize(), g.canonicalize());
    }
}
