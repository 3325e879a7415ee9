use dunkl_core::function::{gaussian_suite, RealFunction};
use dunkl_core::lipschitz::{a_functional, lipschitz_norm_heat, HeatInput, LipschitzParams, TGrid};
use dunkl_core::specfun::DunklParams;
use proptest::prelude::*;

fn k_value() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(0.5), Just(1.5)]
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)]
}

fn heat_norm(d: &DunklParams, lp: &LipschitzParams, f: &RealFunction) -> f64 {
    lipschitz_norm_heat(d, lp, &HeatInput::function(f.clone()), &TGrid::standard(), None).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn star_functional_is_dominated(
        q in prop_oneof![Just(1.0), Just(2.0), Just(4.0), Just(f64::INFINITY)],
        a in 0.2..2.0f64,
        extra in 0.5..3.0f64,
        c in 0.1..10.0f64,
    ) {
        let g = TGrid::standard();
        let norm_at = move |t: f64| Ok(c * t.powf(a) / (1.0 + t).powf(a + extra));
        let star = a_functional(q, &g, true, norm_at).unwrap().value;
        let full = a_functional(q, &g, false, norm_at).unwrap().value;
        prop_assert!(star <= full * (1.0 + 1e-9), "A* = {star} > A = {full}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn heat_norm_is_homogeneous(k in k_value(), alpha in 0.2..2.5f64, p in exponent(), s in -4.0..4.0f64, which in 0usize..3) {
        prop_assume!(s.abs() > 1e-2);
        let d = DunklParams::new(k).unwrap();
        let lp = LipschitzParams::new(alpha, p, 2.0).unwrap();
        let f = gaussian_suite(&d).swap_remove(which);
        let n = heat_norm(&d, &lp, &f);
        let ns = heat_norm(&d, &lp, &f.scaled(s));
        prop_assert!((ns - s.abs() * n).abs() <= 1e-9 * ns, "{ns} vs {}", s.abs() * n);
    }

    #[test]
    fn heat_norm_satisfies_the_triangle_inequality(k in k_value(), alpha in 0.2..2.5f64, p in exponent(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let d = DunklParams::new(k).unwrap();
        let lp = LipschitzParams::new(alpha, p, 2.0).unwrap();
        let s = gaussian_suite(&d);
        let h = RealFunction::combine(a, &s[0], b, &s[1]);
        let lhs = heat_norm(&d, &lp, &h);
        let rhs = a.abs() * heat_norm(&d, &lp, &s[0]) + b.abs() * heat_norm(&d, &lp, &s[1]);
        prop_assert!(lhs <= rhs * (1.0 + 1e-6) + 1e-12, "{lhs} > {rhs}");
    }
}
