use dunkl_core::dunkl_ops::{default_grid_for, dunkl_derivative_fn, dunkl_transform_at, Translator};
use dunkl_core::function::{gaussian, gaussian_suite, RealFunction};
use dunkl_core::kernels::heat_kernel_fn;
use dunkl_core::measure::{lp_norm, GridBuilder, GridProfile};
use dunkl_core::specfun::DunklParams;
use num_complex::Complex64;
use proptest::prelude::*;

fn combination(d: &DunklParams, a: f64, b: f64, c: f64) -> RealFunction {
    let s = gaussian_suite(d);
    let ab = RealFunction::combine(a, &s[0], b, &s[1]);
    RealFunction::combine(1.0, &ab, c, &s[2])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn translation_preserves_positivity(k in 0.0..2.0f64, t in 0.1..2.0f64, y in -3.0..3.0f64, x in -5.0..5.0f64) {
        let d = DunklParams::new(k).unwrap();
        let tr = Translator::new(&d).unwrap();
        for f in [gaussian(&d), heat_kernel_fn(&d, t).unwrap()] {
            let v = tr.translate(y, &f, x);
            prop_assert!(v >= -1e-12, "T_y {}({x}) = {v}", f.name);
        }
    }

    #[test]
    fn translation_is_bounded_on_lp(k in 0.0..2.0f64, y in -2.0..2.0f64, which in 0usize..3, p in prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)]) {
        let d = DunklParams::new(k).unwrap();
        let tr = Translator::new(&d).unwrap();
        let f = gaussian_suite(&d).swap_remove(which);
        let grid = GridBuilder::new(k, 7.0 + y.abs(), GridProfile::Smooth).build().unwrap();
        let n = lp_norm(&grid, |x| f.eval(x), p).unwrap().value;
        let ny = lp_norm(&grid, |x| tr.translate(y, &f, x), p).unwrap().value;
        prop_assert!(ny <= 3.0 * n * (1.0 + 1e-6), "‖T_y f‖ = {ny}, ‖f‖ = {n}");
    }

    #[test]
    fn transform_matches_closed_form(k in 0.0..2.0f64, a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, xi in -6.0..6.0f64) {
        let d = DunklParams::new(k).unwrap();
        let f = combination(&d, a, b, c);
        let grid = default_grid_for(&d, &f).unwrap();
        let got = dunkl_transform_at(&d, &grid, &f, xi).unwrap();
        let want = (f.transform_hint().unwrap())(xi);
        prop_assert!((got - want).norm() <= 1e-8, "{got} vs {want}");
    }

    #[test]
    fn derivative_becomes_multiplication(k in 0.0..2.0f64, a in -2.0..2.0f64, b in -2.0..2.0f64, xi in -5.0..5.0f64) {
        let d = DunklParams::new(k).unwrap();
        let f = combination(&d, a, b, 0.5);
        let df = dunkl_derivative_fn(&d, &f).unwrap();
        let grid = default_grid_for(&d, &f).unwrap();
        let lhs = dunkl_transform_at(&d, &grid, &df, xi).unwrap();
        let rhs = Complex64::new(0.0, xi) * dunkl_transform_at(&d, &grid, &f, xi).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-8, "{lhs} vs {rhs}");
    }
}
