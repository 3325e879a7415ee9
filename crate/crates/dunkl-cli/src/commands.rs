//! `eval`, `norm` and `table`: single computations with CSV or JSON output.

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use dunkl_core::dunkl_ops::default_grid_for;
use dunkl_core::function::RealFunction;
use dunkl_core::kernels::{BesselKernel, HeatKernel, PoissonKernel};
use dunkl_core::lipschitz::{
    e_functional, lipschitz_norm_heat, lipschitz_norm_modulus, standard_y_grid, temperature_t_grid, FunctionalValue,
    HeatInput, LipschitzParams, NormValue, TGrid,
};
use dunkl_core::measure::{lp_norm, GridBuilder, GridProfile, GridSpec, NormReport, WeightedGrid};
use dunkl_core::potentials::PotentialTemperature;
use dunkl_core::specfun::{dunkl_kernel, DunklParams, SeriesPolicy};
use dunkl_core::transforms::{poisson_transform, slice_norm, HeatTemperature, Temperature, TemperatureRef};
use dunkl_core::{Error, Result};

use crate::inputs::input;
use crate::report::{csv_field, fmt17, SCHEMA_VERSION};

/// Multiplicity used by single computations when none is given.
pub const DEFAULT_K: f64 = 0.5;
/// Sampling grid of `eval` when none is given.
pub const DEFAULT_EVAL_GRID: GridSpec = GridSpec { radius: 5.0, nodes_per_panel: 8, profile: GridProfile::Smooth };

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum EvalObject {
    HeatKernel,
    PoissonKernel,
    BesselKernel,
    DunklKernel,
    HeatTransform,
    PoissonTransform,
    Potential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum NormSpace {
    #[value(name = "lp")]
    Lp,
    #[value(name = "lipschitz_modulus")]
    LipschitzModulus,
    #[value(name = "lipschitz_heat")]
    LipschitzHeat,
    #[value(name = "temperature_E")]
    TemperatureE,
}

/// Parameters shared by the single computations.
#[derive(Debug, Clone, Default)]
pub struct ObjectArgs {
    pub t: Option<f64>,
    pub alpha: Option<f64>,
    pub lambda: Option<Complex64>,
    pub input: Option<String>,
    pub input_alpha: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    /// `J_order g` instead of `g` for the heat-route norms and tables.
    pub order: Option<f64>,
    /// t-derivative order for `table`.
    pub m: Option<usize>,
}

/// `a`, `i`, `-2i`, `0.5+1i`, `1-i`.
pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let s = s.trim().replace(' ', "");
    let bad = || format!("bad complex number `{s}`");
    if !s.ends_with('i') {
        return s.parse::<f64>().map(|r| Complex64::new(r, 0.0)).map_err(|_| bad());
    }
    let body = &s[..s.len() - 1];
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !body[..i].ends_with(['e', 'E']))
        .map(|(i, _)| i)
        .last();
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn need(v: Option<f64>, flag: &str, what: &str) -> Result<f64> {
    v.ok_or_else(|| Error::InvalidParameter(format!("{what} needs --{flag}")))
}

/// `name` or `name:param`, where the parameter is `t` or `α` of the kernel inputs.
fn named_input(params: &DunklParams, args: &ObjectArgs, alpha_fallback: bool) -> Result<RealFunction> {
    let spec = args.input.as_deref().unwrap_or("gaussian");
    let (name, param) = match spec.split_once(':') {
        Some((n, v)) => {
            let v: f64 = v
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad input parameter in `{spec}`")))?;
            (n, Some(v))
        }
        None => (spec, None),
    };
    let alpha = param.or(args.input_alpha).or(if alpha_fallback { args.alpha } else { None });
    input(params, name, param.or(args.t), alpha)
}

pub fn build_grid(k: f64, spec: &GridSpec) -> Result<WeightedGrid> {
    GridBuilder::new(k, spec.radius, spec.profile)
        .nodes_per_panel(spec.nodes_per_panel)
        .build()
}

/// CSV of the object on the grid nodes.
pub fn eval_csv(params: &DunklParams, grid_spec: &GridSpec, object: EvalObject, args: &ObjectArgs) -> Result<String> {
    let grid = build_grid(params.k, grid_spec)?;
    let xs = grid.nodes();
    let k = params.k;
    let mut header = format!("# dunkl {} k={k} object={object:?} grid={grid_spec}", env!("CARGO_PKG_VERSION"));
    let mut out = String::new();
    let line = |out: &mut String, cols: &[f64]| {
        let row: Vec<String> = cols.iter().map(|&v| fmt17(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    };
    match object {
        EvalObject::HeatKernel | EvalObject::PoissonKernel => {
            let t = need(args.t, "t", "the kernel")?;
            let _ = write!(header, " t={t}");
            out.push_str("x,value\n");
            let vals: Vec<f64> = if object == EvalObject::HeatKernel {
                let hk = HeatKernel::new(params, t)?;
                xs.iter().map(|&x| hk.eval(x)).collect()
            } else {
                let pk = PoissonKernel::new(params, t)?;
                xs.iter().map(|&x| pk.eval(x)).collect()
            };
            for (&x, v) in xs.iter().zip(vals) {
                line(&mut out, &[x, v]);
            }
        }
        EvalObject::BesselKernel => {
            let alpha = need(args.alpha, "alpha", "the Bessel kernel")?;
            let _ = write!(header, " alpha={alpha}");
            let bk = BesselKernel::new(params, alpha)?;
            out.push_str("x,value\n");
            for &x in xs {
                line(&mut out, &[x, bk.eval(x)?]);
            }
        }
        EvalObject::DunklKernel => {
            let lambda = args
                .lambda
                .ok_or_else(|| Error::InvalidParameter("the Dunkl kernel needs --lambda".into()))?;
            let _ = write!(header, " lambda={}{:+}i", lambda.re, lambda.im);
            let policy = SeriesPolicy::default();
            out.push_str("x,value,im_value\n");
            for &x in xs {
                let e = dunkl_kernel(params, lambda, x, &policy)?;
                line(&mut out, &[x, e.re, e.im]);
            }
        }
        EvalObject::HeatTransform | EvalObject::PoissonTransform => {
            let t = need(args.t, "t", "the transform")?;
            let f = named_input(params, &ObjectArgs { t: None, ..args.clone() }, true)?;
            let _ = write!(header, " t={t} input={}", f.name);
            out.push_str("x,t,value\n");
            let vals = if object == EvalObject::HeatTransform {
                let u = HeatTemperature::new(params, &f);
                xs.par_iter().map(|&x| u.eval(x, t)).collect::<Result<Vec<_>>>()?
            } else {
                xs.par_iter().map(|&x| poisson_transform(params, &f, x, t)).collect::<Result<Vec<_>>>()?
            };
            for (&x, v) in xs.iter().zip(vals) {
                line(&mut out, &[x, t, v]);
            }
        }
        EvalObject::Potential => {
            let alpha = need(args.alpha, "alpha", "the potential")?;
            let f = named_input(params, args, false)?;
            let _ = write!(header, " alpha={alpha} input={}", f.name);
            let u: TemperatureRef = Arc::new(HeatTemperature::new(params, &f));
            if alpha < 0.0 && !(u.t_offset() > 0.0) {
                return Err(Error::Unsupported(format!(
                    "negative potentials of `{}` need a closed-form heat extension",
                    f.name
                )));
            }
            let j = PotentialTemperature::new_unchecked(u, alpha)?;
            out.push_str("x,value\n");
            let vals = xs.par_iter().map(|&x| j.eval(x, 0.0)).collect::<Result<Vec<_>>>()?;
            for (&x, v) in xs.iter().zip(vals) {
                line(&mut out, &[x, v]);
            }
        }
    }
    Ok(format!("{header}\n{out}"))
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum NormDiagnostics {
    Lp(NormReport),
    Lipschitz(NormValue),
    Temperature(FunctionalValue),
}

#[derive(Debug, Clone, Serialize)]
pub struct NormOutput {
    pub schema: u32,
    pub space: String,
    pub k: f64,
    pub input: String,
    pub alpha: Option<f64>,
    pub p: f64,
    pub q: Option<f64>,
    pub normalized: bool,
    pub value: f64,
    pub diagnostics: NormDiagnostics,
}

pub struct NormRequest<'a> {
    pub space: NormSpace,
    pub args: &'a ObjectArgs,
    pub grid: Option<&'a GridSpec>,
    pub tgrid: Option<&'a TGrid>,
    pub normalized: bool,
}

pub fn norm(params: &DunklParams, req: &NormRequest) -> Result<NormOutput> {
    let args = req.args;
    let p = args.p.unwrap_or(2.0);
    let k = params.k;
    match req.space {
        NormSpace::Lp => {
            let f = named_input(params, args, true)?;
            let grid = match req.grid {
                Some(spec) => build_grid(k, spec)?,
                None => default_grid_for(params, &f)?,
            };
            let mut r = lp_norm(&grid, |x| f.eval(x), p)?;
            if req.normalized && p.is_finite() {
                r.value *= params.c_k.powf(1.0 / p);
            }
            Ok(NormOutput {
                schema: SCHEMA_VERSION,
                space: "lp".into(),
                k,
                input: f.name.clone(),
                alpha: None,
                p,
                q: None,
                normalized: req.normalized,
                value: r.value,
                diagnostics: NormDiagnostics::Lp(r),
            })
        }
        NormSpace::LipschitzModulus | NormSpace::LipschitzHeat | NormSpace::TemperatureE => {
            if req.normalized {
                return Err(Error::Unsupported("--normalized applies to `norm lp` only".into()));
            }
            let alpha = need(args.alpha, "alpha", "this norm")?;
            let q = args.q.unwrap_or(2.0);
            let f = named_input(params, args, false)?;
            let (space, value, diagnostics, name) = match req.space {
                NormSpace::LipschitzModulus => {
                    let lp = LipschitzParams::new(alpha, p, q)?;
                    let v = lipschitz_norm_modulus(params, &lp, &f, &req.tgrid.cloned().unwrap_or_else(standard_y_grid))?;
                    ("lipschitz_modulus", v.value, NormDiagnostics::Lipschitz(v), f.name.clone())
                }
                NormSpace::LipschitzHeat => {
                    let lp = LipschitzParams::new(alpha, p, q)?;
                    let input = match args.order {
                        Some(order) => HeatInput::potential(f, order),
                        None => HeatInput::function(f),
                    };
                    let v = lipschitz_norm_heat(params, &lp, &input, &req.tgrid.cloned().unwrap_or_else(TGrid::standard), None)?;
                    ("lipschitz_heat", v.value, NormDiagnostics::Lipschitz(v), input.name())
                }
                _ => {
                    let u: TemperatureRef = Arc::new(HeatTemperature::new(params, &f));
                    let v = e_functional(u, alpha, p, q, &req.tgrid.cloned().unwrap_or_else(temperature_t_grid))?;
                    ("temperature_E", v.value, NormDiagnostics::Temperature(v), f.name.clone())
                }
            };
            Ok(NormOutput {
                schema: SCHEMA_VERSION,
                space: space.into(),
                k,
                input: name,
                alpha: Some(alpha),
                p,
                q: Some(q),
                normalized: false,
                value,
                diagnostics,
            })
        }
    }
}

/// `t, ‖∂_t^m J_order G_t f‖_{k,p}` on the t-grid.
pub fn table_csv(params: &DunklParams, args: &ObjectArgs, tgrid: &TGrid) -> Result<String> {
    let f = named_input(params, args, false)?;
    let p = args.p.unwrap_or(2.0);
    let m = args.m.unwrap_or(0);
    let order = args.order.unwrap_or(0.0);
    let u: TemperatureRef = Arc::new(HeatTemperature::new(params, &f));
    let v: TemperatureRef = if order == 0.0 { u } else { Arc::new(PotentialTemperature::new_unchecked(u, order)?) };
    let rows = tgrid
        .nodes()
        .par_iter()
        .map(|&t| slice_norm(v.as_ref(), m, t, p))
        .collect::<Result<Vec<_>>>()?;
    let mut out = format!(
        "# dunkl {} k={} input={} p={p} m={m} order={order} tgrid={tgrid}\nt,value\n",
        env!("CARGO_PKG_VERSION"),
        params.k,
        csv_field(&f.name)
    );
    for (&t, v) in tgrid.nodes().iter().zip(rows) {
        let _ = writeln!(out, "{},{}", fmt17(t), fmt17(v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-2i").unwrap(), Complex64::new(0.0, -2.0));
        assert_eq!(parse_complex("0.5+1i").unwrap(), Complex64::new(0.5, 1.0));
        assert_eq!(parse_complex("1-i").unwrap(), Complex64::new(1.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e-1i").unwrap(), Complex64::new(1e-3, 0.2));
        assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn heat_kernel_csv_matches_closed_form() {
        let d = DunklParams::new(0.5).unwrap();
        let args = ObjectArgs { t: Some(1.0), ..Default::default() };
        let csv = eval_csv(&d, &DEFAULT_EVAL_GRID, EvalObject::HeatKernel, &args).unwrap();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# dunkl"));
        assert_eq!(lines.next().unwrap(), "x,value");
        for l in lines {
            let (x, v) = l.split_once(',').unwrap();
            let (x, v): (f64, f64) = (x.parse().unwrap(), v.parse().unwrap());
            assert!((v - 0.5 * (-x * x / 4.0).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn norm_of_gaussian() {
        let d = DunklParams::new(0.5).unwrap();
        let args = ObjectArgs { input: Some("gaussian".into()), p: Some(2.0), ..Default::default() };
        let req = NormRequest { space: NormSpace::Lp, args: &args, grid: None, tgrid: None, normalized: false };
        let v = norm(&d, &req).unwrap().value;
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn missing_parameters_are_errors() {
        let d = DunklParams::new(0.5).unwrap();
        let none = ObjectArgs::default();
        assert!(eval_csv(&d, &DEFAULT_EVAL_GRID, EvalObject::BesselKernel, &none).is_err());
        assert!(eval_csv(&d, &DEFAULT_EVAL_GRID, EvalObject::DunklKernel, &none).is_err());
        let req = NormRequest { space: NormSpace::LipschitzHeat, args: &none, grid: None, tgrid: None, normalized: false };
        assert!(norm(&d, &req).is_err());
    }
}
