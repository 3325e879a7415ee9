use dunkl_core::kernels::{heat_kernel_dt, poisson_kernel_dt, BesselKernel, HeatKernel, PoissonKernel};
use dunkl_core::specfun::DunklParams;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kernels_are_positive(k in 0.0..3.0f64, t in 0.01..10.0f64, x in -30.0..30.0f64, alpha in 0.1..4.0f64) {
        let d = DunklParams::new(k).unwrap();
        prop_assert!(HeatKernel::new(&d, t).unwrap().eval(x) >= 0.0);
        prop_assert!(PoissonKernel::new(&d, t).unwrap().eval(x) > 0.0);
        prop_assume!(x.abs() > 1e-3);
        prop_assert!(BesselKernel::new(&d, alpha).unwrap().eval(x).unwrap() > 0.0);
    }

    #[test]
    fn heat_kernel_is_self_similar(k in 0.0..3.0f64, t in 0.01..10.0f64, x in -10.0..10.0f64) {
        let d = DunklParams::new(k).unwrap();
        let lhs = HeatKernel::new(&d, t).unwrap().eval(x);
        let rhs = t.powf(-(k + 0.5)) * HeatKernel::new(&d, 1.0).unwrap().eval(x / t.sqrt());
        prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.abs() + 1e-300);
    }

    #[test]
    fn poisson_kernel_is_self_similar(k in 0.0..3.0f64, t in 0.01..10.0f64, x in -10.0..10.0f64) {
        let d = DunklParams::new(k).unwrap();
        let lhs = PoissonKernel::new(&d, t).unwrap().eval(x);
        let rhs = t.powf(-(2.0 * k + 1.0)) * PoissonKernel::new(&d, 1.0).unwrap().eval(x / t);
        prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs);
    }

    #[test]
    fn heat_kernel_solves_the_heat_equation(k in 0.0..3.0f64, t in 0.05..5.0f64, x in -6.0..6.0f64) {
        let d = DunklParams::new(k).unwrap();
        let hk = HeatKernel::new(&d, t).unwrap();
        let lap = hk.dk2(x);
        let dt = heat_kernel_dt(&hk, 1, x).unwrap();
        let scale = hk.eval(0.0) / t;
        prop_assert!((lap - dt).abs() <= 1e-8 * scale, "Δ = {lap}, ∂t = {dt}");
    }

    #[test]
    fn poisson_kernel_is_harmonic(k in 0.0..3.0f64, t in 0.05..5.0f64, x in -6.0..6.0f64) {
        let d = DunklParams::new(k).unwrap();
        let pk = PoissonKernel::new(&d, t).unwrap();
        let lap = pk.dk2(x);
        let dtt = poisson_kernel_dt(&pk, 2, x).unwrap();
        let scale = pk.eval(0.0) / (t * t);
        prop_assert!((lap + dtt).abs() <= 1e-8 * scale, "Δ = {lap}, ∂tt = {dtt}");
    }

    #[test]
    fn bessel_kernel_is_even_and_decreasing(k in 0.0..2.0f64, alpha in 0.2..4.0f64, x in 0.05..15.0f64) {
        let d = DunklParams::new(k).unwrap();
        let b = BesselKernel::new(&d, alpha).unwrap();
        let v = b.eval(x).unwrap();
        prop_assert!((v - b.eval(-x).unwrap()).abs() <= 1e-14 * v);
        prop_assert!(b.eval(1.05 * x).unwrap() < v);
    }
}
