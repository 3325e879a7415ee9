//! Built-in input functions, keyed by name.

use dunkl_core::function::{gaussian, hermite2_gaussian, xgaussian, RealFunction};
use dunkl_core::kernels::{bessel_kernel_fn, heat_kernel_fn, poisson_kernel_fn};
use dunkl_core::specfun::DunklParams;
use dunkl_core::{Error, Result};

pub const INPUT_NAMES: [&str; 6] = [
    "gaussian",
    "xgaussian",
    "hermite2_gaussian",
    "heat_kernel",
    "poisson_kernel",
    "bessel_kernel",
];

/// `t` feeds the heat and Poisson kernels, `alpha` the Bessel kernel.
pub fn input(params: &DunklParams, name: &str, t: Option<f64>, alpha: Option<f64>) -> Result<RealFunction> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Error::InvalidParameter(format!("input `{name}` needs --{flag}")))
    };
    match name {
        "gaussian" => Ok(gaussian(params)),
        "xgaussian" => Ok(xgaussian(params)),
        "hermite2_gaussian" => Ok(hermite2_gaussian(params)),
        "heat_kernel" => heat_kernel_fn(params, need(t, "t")?),
        "poisson_kernel" => poisson_kernel_fn(params, need(t, "t")?),
        "bessel_kernel" => bessel_kernel_fn(params, need(alpha, "alpha")?),
        _ => Err(Error::InvalidParameter(format!(
            "unknown input `{name}`; expected one of {}",
            INPUT_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        let d = DunklParams::new(0.5).unwrap();
        for name in INPUT_NAMES {
            let f = input(&d, name, Some(1.0), Some(2.5)).unwrap();
            assert!(f.eval(0.5).is_finite(), "{name}");
        }
        assert!(input(&d, "heat_kernel", None, None).is_err());
        assert!(input(&d, "nope", None, None).is_err());
    }
}
