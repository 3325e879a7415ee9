//! The verification suites: identity, inequality, equivalence and embedding checks.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use dunkl_core::dunkl_ops::{
    convolve, default_grid_for, dunkl_derivative, dunkl_derivative_fn, dunkl_transform, dunkl_transform_at,
    frequency_grid, translate,
};
use dunkl_core::function::{gaussian_suite, RealFunction};
use dunkl_core::kernels::{
    bessel_kernel_fn, heat_kernel_fn, poisson_kernel_dt, poisson_kernel_fn, BesselKernel, HeatKernel, PoissonKernel,
};
use dunkl_core::lipschitz::{
    derivative_order_equivalence, embedding_report, heat_transform_isomorphism, modulus_equivalence,
    potential_isomorphism, temperature_equivalence, EquivalenceReport, SweepGrids, TGrid, EQUIVALENCE_WINDOW,
    STABILITY_LIMIT,
};
use dunkl_core::measure::lp_norm;
use dunkl_core::potentials::{
    bessel_potential, bessel_potential_direct, bessel_potential_fn_negative, PotentialTemperature,
};
use dunkl_core::specfun::DunklParams;
use dunkl_core::transforms::{
    heat_residual, semigroup_check, slice_norm, HeatTemperature, Temperature, TemperatureRef,
};
use dunkl_core::Result;

use crate::report::{CheckRecord, Expected, SuiteTiming};

pub const SUITES: [&str; 11] = [
    "kernels",
    "transforms",
    "plancherel",
    "semigroups",
    "pde",
    "potentials",
    "asymptotics",
    "decay",
    "equivalences",
    "embeddings",
    "classical",
];

/// Multiplicities swept when none is given.
pub const DEFAULT_KS: [f64; 3] = [0.0, 0.5, 1.5];

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub ks: Vec<f64>,
    /// Overrides the tolerance of identity checks.
    pub tol: Option<f64>,
    /// Overrides the `dt/t` grid of the Lipschitz functionals.
    pub tgrid: Option<TGrid>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { ks: DEFAULT_KS.to_vec(), tol: None, tgrid: None }
    }
}

type JobFn = Box<dyn Fn() -> Result<Vec<CheckRecord>> + Send + Sync>;

struct Job {
    id: String,
    reference: &'static str,
    run: JobFn,
}

fn job(id: String, reference: &'static str, run: impl Fn() -> Result<Vec<CheckRecord>> + Send + Sync + 'static) -> Job {
    Job { id, reference, run: Box::new(run) }
}

/// Expands `all` and rejects unknown names.
pub fn resolve_suites(names: &[String]) -> std::result::Result<Vec<&'static str>, String> {
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            return Ok(SUITES.to_vec());
        }
        match SUITES.iter().find(|s| **s == n.as_str()) {
            Some(s) if !out.contains(s) => out.push(*s),
            Some(_) => {}
            None => return Err(format!("unknown suite `{n}`; expected all or one of {}", SUITES.join(", "))),
        }
    }
    Ok(out)
}

/// Records of a `verify` run, sorted by id, with the wall time of each suite.
#[derive(Debug, Clone, Default)]
pub struct SuiteRun {
    pub records: Vec<CheckRecord>,
    pub timings: Vec<SuiteTiming>,
}

/// Runs the suites one after another, each on the worker pool.
pub fn run_suites(suites: &[&str], opts: &SuiteOptions) -> SuiteRun {
    let mut run = SuiteRun::default();
    for &s in suites {
        let mut jobs = Vec::new();
        for &k in &opts.ks {
            jobs.extend(suite_jobs(s, k, opts));
        }
        if s == "classical" && !opts.ks.contains(&0.0) {
            jobs.extend(suite_jobs(s, 0.0, opts));
        }
        let start = Instant::now();
        let records: Vec<CheckRecord> = jobs
            .par_iter()
            .flat_map_iter(|j| {
                let start = Instant::now();
                let mut recs = match (j.run)() {
                    Ok(r) => r,
                    Err(e) => vec![CheckRecord::error(j.id.clone(), j.reference, e)],
                };
                let ms = start.elapsed().as_millis() as u64;
                for r in &mut recs {
                    r.runtime_ms = ms;
                    if let Some(tol) = opts.tol {
                        r.expected = r.expected.with_tol(tol);
                        r.verdict = r.expected.verdict(r.computed);
                    }
                }
                recs
            })
            .collect();
        run.timings.push(SuiteTiming {
            suite: s.to_string(),
            checks: records.len(),
            runtime_ms: start.elapsed().as_millis() as u64,
        });
        run.records.extend(records);
    }
    run.records.sort_by(|a, b| a.id.cmp(&b.id));
    run
}

fn suite_jobs(suite: &str, k: f64, opts: &SuiteOptions) -> Vec<Job> {
    match suite {
        "kernels" => kernel_jobs(k),
        "transforms" => transform_jobs(k),
        "plancherel" => plancherel_jobs(k),
        "semigroups" => semigroup_jobs(k),
        "pde" => pde_jobs(k),
        "potentials" => potential_jobs(k),
        "asymptotics" => asymptotic_jobs(k),
        "decay" => decay_jobs(k),
        "equivalences" => equivalence_jobs(k, opts),
        "embeddings" => embedding_jobs(k, opts),
        "classical" if k == 0.0 => classical_jobs(),
        _ => Vec::new(),
    }
}

fn params(k: f64) -> Result<DunklParams> {
    DunklParams::new(k)
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

const XIS: [f64; 9] = [-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0];
const KERNEL_TIMES: [f64; 2] = [0.1, 1.0];
const BESSEL_ORDERS: [f64; 3] = [0.5, 1.0, 2.5];

fn kernel_jobs(k: f64) -> Vec<Job> {
    let mut jobs = Vec::new();
    for t in KERNEL_TIMES {
        jobs.push(job(format!("kernels.heat_mass.k={k}.t={t}"), "c_k ∫ F_t |x|^{2k} dx = 1", move || {
            let d = params(k)?;
            let f = heat_kernel_fn(&d, t)?;
            let raw = default_grid_for(&d, &f)?.integrate(|x| f.eval(x))?;
            Ok(vec![
                CheckRecord::new(
                    format!("kernels.heat_mass.k={k}.t={t}"),
                    "c_k ∫ F_t |x|^{2k} dx = 1",
                    d.c_k * raw,
                    Expected::Rel { value: 1.0, tol: 1e-8 },
                ),
                CheckRecord::new(
                    format!("kernels.heat_raw_mass.k={k}.t={t}"),
                    "∫ F_t |x|^{2k} dx = 1/c_k (unnormalized measure)",
                    raw,
                    Expected::Info,
                )
                .note(format!("1/c_k = {}", 1.0 / d.c_k)),
            ])
        }));
        jobs.push(job(format!("kernels.poisson_mass.k={k}.t={t}"), "c_k ∫ P_t |x|^{2k} dx = 1", move || {
            let d = params(k)?;
            let f = poisson_kernel_fn(&d, t)?;
            let v = d.c_k * default_grid_for(&d, &f)?.integrate(|x| f.eval(x))?;
            Ok(vec![CheckRecord::new(
                format!("kernels.poisson_mass.k={k}.t={t}"),
                "c_k ∫ P_t |x|^{2k} dx = 1",
                v,
                Expected::Rel { value: 1.0, tol: 1e-6 },
            )])
        }));
    }
    for alpha in BESSEL_ORDERS {
        jobs.push(job(format!("kernels.bessel_mass.k={k}.alpha={alpha}"), "c_k ∫ |B_α| |x|^{2k} dx = 1", move || {
            let d = params(k)?;
            let f = bessel_kernel_fn(&d, alpha)?;
            let v = d.c_k * default_grid_for(&d, &f)?.integrate(|x| f.eval(x).abs())?;
            Ok(vec![CheckRecord::new(
                format!("kernels.bessel_mass.k={k}.alpha={alpha}"),
                "c_k ∫ |B_α| |x|^{2k} dx = 1",
                v,
                Expected::Rel { value: 1.0, tol: 1e-4 },
            )])
        }));
    }
    jobs
}

/// Largest `|F_k f(ξ) - want(ξ)|` over the ξ lattice, by quadrature.
fn transform_error(d: &DunklParams, f: &RealFunction, want: impl Fn(f64) -> f64) -> Result<f64> {
    let grid = default_grid_for(d, f)?;
    let errs = XIS
        .iter()
        .map(|&y| Ok((dunkl_transform_at(d, &grid, f, y)? - Complex64::new(want(y), 0.0)).norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok(max_of(errs))
}

fn transform_jobs(k: f64) -> Vec<Job> {
    let mut jobs = Vec::new();
    for t in KERNEL_TIMES {
        let id = format!("transforms.heat_kernel.k={k}.t={t}");
        jobs.push(job(id.clone(), "F_k(F_t)(ξ) = e^{-tξ²}", move || {
            let d = params(k)?;
            let e = transform_error(&d, &heat_kernel_fn(&d, t)?, |y| (-t * y * y).exp())?;
            Ok(vec![CheckRecord::new(id.clone(), "F_k(F_t)(ξ) = e^{-tξ²}", e, Expected::Abs { value: 0.0, tol: 1e-8 })])
        }));
        let id = format!("transforms.poisson_kernel.k={k}.t={t}");
        jobs.push(job(id.clone(), "F_k(P_t)(ξ) = e^{-t|ξ|}", move || {
            let d = params(k)?;
            let e = transform_error(&d, &poisson_kernel_fn(&d, t)?, |y| (-t * y.abs()).exp())?;
            Ok(vec![CheckRecord::new(id.clone(), "F_k(P_t)(ξ) = e^{-t|ξ|}", e, Expected::Abs { value: 0.0, tol: 1e-6 })])
        }));
    }
    for alpha in BESSEL_ORDERS {
        let id = format!("transforms.bessel_kernel.k={k}.alpha={alpha}");
        jobs.push(job(id.clone(), "F_k(B_α)(ξ) = (1+ξ²)^{-α/2}", move || {
            let d = params(k)?;
            let e = transform_error(&d, &bessel_kernel_fn(&d, alpha)?, |y| (1.0 + y * y).powf(-0.5 * alpha))?;
            Ok(vec![CheckRecord::new(
                id.clone(),
                "F_k(B_α)(ξ) = (1+ξ²)^{-α/2}",
                e,
                Expected::Abs { value: 0.0, tol: 1e-5 },
            )])
        }));
    }
    jobs
}

fn plancherel_jobs(k: f64) -> Vec<Job> {
    let Ok(d) = params(k) else { return Vec::new() };
    let mut jobs = Vec::new();
    for f in gaussian_suite(&d) {
        let name = f.name.clone();
        let id = format!("plancherel.isometry.k={k}.{name}");
        let g = f.clone();
        jobs.push(job(id.clone(), "‖f‖_{k,2} = ‖F_k f‖_{k,2}", move || {
            let d = params(k)?;
            let f = g.clone().opaque();
            let grid = default_grid_for(&d, &f)?;
            let lhs = lp_norm(&grid, |x| f.eval(x), 2.0)?.value;
            let freq = frequency_grid(&d, 14.0)?;
            let spec = dunkl_transform(&d, &grid, &f, freq.clone())?;
            let rhs = freq
                .weights()
                .iter()
                .zip(&spec.values)
                .map(|(w, v)| w * v.norm_sqr())
                .sum::<f64>()
                .sqrt();
            Ok(vec![CheckRecord::new(id.clone(), "‖f‖_{k,2} = ‖F_k f‖_{k,2}", rhs, Expected::Rel { value: lhs, tol: 1e-6 })])
        }));
        let id = format!("plancherel.derivative_exchange.k={k}.{name}");
        let g = f.clone();
        jobs.push(job(id.clone(), "F_k(D_k f)(ξ) = iξ F_k f(ξ)", move || {
            let d = params(k)?;
            let f = g.clone().opaque();
            let df = dunkl_derivative_fn(&d, &g)?.opaque();
            let grid = default_grid_for(&d, &f)?;
            let errs = XIS
                .iter()
                .map(|&y| {
                    let lhs = dunkl_transform_at(&d, &grid, &df, y)?;
                    let rhs = Complex64::new(0.0, y) * dunkl_transform_at(&d, &grid, &f, y)?;
                    Ok((lhs - rhs).norm())
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(vec![CheckRecord::new(
                id.clone(),
                "F_k(D_k f)(ξ) = iξ F_k f(ξ)",
                max_of(errs),
                Expected::Abs { value: 0.0, tol: 1e-6 },
            )])
        }));
    }
    jobs
}

const PROBES: [f64; 4] = [-1.0, 0.0, 0.5, 2.0];

fn semigroup_jobs(k: f64) -> Vec<Job> {
    let mut jobs = Vec::new();
    let id = format!("semigroups.heat_kernel.k={k}");
    jobs.push(job(id.clone(), "F_s ∗ F_t = F_{s+t}", move || {
        let d = params(k)?;
        let r = semigroup_check(&HeatTemperature::kernel(&d), 0.5, 0.5, &PROBES)?;
        Ok(vec![CheckRecord::new(id.clone(), "F_s ∗ F_t = F_{s+t}", r.max_residual, Expected::AtMost { bound: 1e-5 })])
    }));
    let id = format!("semigroups.poisson_kernel.k={k}");
    jobs.push(job(id.clone(), "P_s ∗ P_t = P_{s+t}", move || {
        let d = params(k)?;
        let (ps, pt) = (poisson_kernel_fn(&d, 0.5)?, poisson_kernel_fn(&d, 0.5)?);
        let p1 = PoissonKernel::new(&d, 1.0)?;
        let errs = PROBES
            .iter()
            .map(|&x| Ok((convolve(&d, &ps, &pt, x)? - p1.eval(x)).abs()))
            .collect::<Result<Vec<_>>>()?;
        Ok(vec![CheckRecord::new(id.clone(), "P_s ∗ P_t = P_{s+t}", max_of(errs), Expected::AtMost { bound: 1e-5 })])
    }));
    for (a, b) in [(1.0, 1.5), (2.5, 0.5)] {
        let id = format!("semigroups.bessel_kernel.k={k}.alpha={a}.beta={b}");
        jobs.push(job(id.clone(), "B_α ∗ B_β = B_{α+β}", move || {
            let d = params(k)?;
            let (ba, bb) = (bessel_kernel_fn(&d, a)?, bessel_kernel_fn(&d, b)?);
            let bab = BesselKernel::new(&d, a + b)?;
            let errs = [0.5, 1.0, 2.0]
                .iter()
                .map(|&x| Ok((convolve(&d, &ba, &bb, x)? - bab.eval(x)?).abs()))
                .collect::<Result<Vec<_>>>()?;
            Ok(vec![CheckRecord::new(id.clone(), "B_α ∗ B_β = B_{α+β}", max_of(errs), Expected::AtMost { bound: 1e-5 })])
        }));
    }
    if let Ok(d) = params(k) {
        for f in gaussian_suite(&d) {
            let id = format!("semigroups.heat_transform.k={k}.{}", f.name);
            jobs.push(job(id.clone(), "G_{s+t} f(x) = c_k ∫ T_{-y} F_t(x) G_s f(y) |y|^{2k} dy", move || {
                let d = params(k)?;
                let r = semigroup_check(&HeatTemperature::new(&d, &f), 0.25, 0.25, &PROBES)?;
                Ok(vec![CheckRecord::new(
                    id.clone(),
                    "G_{s+t} f(x) = c_k ∫ T_{-y} F_t(x) G_s f(y) |y|^{2k} dy",
                    r.max_residual,
                    Expected::AtMost { bound: 1e-5 },
                )
                .note(format!("locally integrable: {}", r.locally_integrable))])
            }));
        }
    }
    jobs
}

const LATTICE_X: [f64; 5] = [-1.5, -0.3, 0.0, 0.8, 2.0];
const LATTICE_T: [f64; 5] = [0.05, 0.2, 0.5, 1.0, 3.0];

fn pde_jobs(k: f64) -> Vec<Job> {
    let mut jobs = Vec::new();
    let id = format!("pde.heat_kernel.k={k}");
    jobs.push(job(id.clone(), "(D_k² - ∂_t) F_t = 0", move || {
        let d = params(k)?;
        let r = heat_residual(&HeatTemperature::kernel(&d), &LATTICE_X, &LATTICE_T, 1e-300)?;
        Ok(vec![CheckRecord::new(id.clone(), "(D_k² - ∂_t) F_t = 0", r, Expected::AtMost { bound: 1e-6 })])
    }));
    if let Ok(d) = params(k) {
        for f in gaussian_suite(&d) {
            let id = format!("pde.heat_transform.k={k}.{}", f.name);
            jobs.push(job(id.clone(), "(D_k² - ∂_t) G_t f = 0", move || {
                let d = params(k)?;
                let u = HeatTemperature::numeric(&d, &f);
                let r = heat_residual(&u, &LATTICE_X, &LATTICE_T, 1e-300)?;
                Ok(vec![CheckRecord::new(id.clone(), "(D_k² - ∂_t) G_t f = 0", r, Expected::AtMost { bound: 1e-6 })])
            }));
        }
    }
    let id = format!("pde.poisson_kernel.k={k}");
    jobs.push(job(id.clone(), "(D_k² + ∂_t²) P_t = 0", move || {
        let d = params(k)?;
        let mut worst: f64 = 0.0;
        for &t in &LATTICE_T {
            let p = PoissonKernel::new(&d, t)?;
            let mut err: f64 = 0.0;
            let mut size: f64 = 0.0;
            for &x in &LATTICE_X {
                let tt = poisson_kernel_dt(&p, 2, x)?;
                err = err.max((p.dk2(x) + tt).abs());
                size = size.max(tt.abs());
            }
            worst = worst.max(err / size);
        }
        Ok(vec![CheckRecord::new(id.clone(), "(D_k² + ∂_t²) P_t = 0", worst, Expected::AtMost { bound: 1e-8 })])
    }));
    jobs
}

const POTENTIAL_LATTICE: [(f64, f64); 3] = [(0.0, 0.3), (0.8, 0.5), (-1.7, 2.0)];

fn temperature_composition(u: &TemperatureRef, a: f64, b: f64) -> Result<f64> {
    let jb: TemperatureRef = Arc::new(PotentialTemperature::new_unchecked(u.clone(), b)?);
    let jab = PotentialTemperature::new_unchecked(jb, a)?;
    let direct = PotentialTemperature::new_unchecked(u.clone(), a + b)?;
    let errs = POTENTIAL_LATTICE
        .iter()
        .map(|&(x, t)| {
            let l = jab.eval(x, t)?;
            let r = direct.eval(x, t)?;
            Ok((l - r).abs() / (1.0 + r.abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(max_of(errs))
}

fn potential_jobs(k: f64) -> Vec<Job> {
    let mut jobs = Vec::new();
    let Ok(d) = params(k) else { return jobs };
    // (α, β, tolerance)
    let pairs = [(1.0, 0.5, 1e-4), (2.5, -1.0, 1e-4), (-2.0, 0.5, 1e-4), (-2.0, 2.0, 1e-3), (-1.0, 1.0, 1e-3)];
    for f in gaussian_suite(&d) {
        for (a, b, tol) in pairs {
            let id = format!("potentials.temperature.k={k}.{}.alpha={a}.beta={b}", f.name);
            let reference = if a + b == 0.0 { "J_{-β} J_β U = U" } else { "J_α J_β U = J_{α+β} U" };
            let f = f.clone();
            jobs.push(job(id.clone(), reference, move || {
                let d = params(k)?;
                let u: TemperatureRef = Arc::new(HeatTemperature::new(&d, &f));
                let e = temperature_composition(&u, a, b)?;
                Ok(vec![CheckRecord::new(id.clone(), reference, e, Expected::AtMost { bound: tol })])
            }));
        }
    }
    let xs = [0.0, 0.7, -1.6];
    for f in gaussian_suite(&d) {
        // (+,+): B_α ∗ (J_β f) against J_{α+β} f.
        let id = format!("potentials.function.k={k}.{}.alpha=1.beta=0.5", f.name);
        let g = f.clone();
        jobs.push(job(id.clone(), "B_α ∗ J_β f = J_{α+β} f", move || {
            let d = params(k)?;
            let jb = bessel_potential(&d, 0.5, &g)?;
            let jab = bessel_potential(&d, 1.5, &g)?;
            let errs = xs
                .iter()
                .map(|&x| Ok((bessel_potential_direct(&d, 1.0, &jb, x)? - jab.eval(x)).abs()))
                .collect::<Result<Vec<_>>>()?;
            Ok(vec![CheckRecord::new(id.clone(), "B_α ∗ J_β f = J_{α+β} f", max_of(errs), Expected::AtMost { bound: 1e-4 })])
        }));
        // (+,-): J_α (J_{-β} f) against B_{α-β} ∗ f.
        let id = format!("potentials.function.k={k}.{}.alpha=1.5.beta=-1", f.name);
        let g = f.clone();
        jobs.push(job(id.clone(), "J_α J_{-β} f = B_{α-β} ∗ f", move || {
            let d = params(k)?;
            let jb = bessel_potential(&d, -1.0, &g)?;
            let jab = bessel_potential(&d, 1.5, &jb)?;
            let errs = xs
                .iter()
                .map(|&x| Ok((jab.eval(x) - bessel_potential_direct(&d, 0.5, &g, x)?).abs()))
                .collect::<Result<Vec<_>>>()?;
            Ok(vec![CheckRecord::new(id.clone(), "J_α J_{-β} f = B_{α-β} ∗ f", max_of(errs), Expected::AtMost { bound: 1e-4 })])
        }));
        // (-2 even branch): J_{-2} (J_{2.5} f) against B_{0.5} ∗ f.
        let id = format!("potentials.function.k={k}.{}.alpha=-2.beta=2.5", f.name);
        let g = f.clone();
        jobs.push(job(id.clone(), "J_{-2} J_β f = B_{β-2} ∗ f", move || {
            let d = params(k)?;
            let jb = bessel_potential(&d, 2.5, &g)?;
            let jab = bessel_potential(&d, -2.0, &jb)?;
            let errs = xs
                .iter()
                .map(|&x| Ok((jab.eval(x) - bessel_potential_direct(&d, 0.5, &g, x)?).abs()))
                .collect::<Result<Vec<_>>>()?;
            Ok(vec![CheckRecord::new(id.clone(), "J_{-2} J_β f = B_{β-2} ∗ f", max_of(errs), Expected::AtMost { bound: 1e-4 })])
        }));
        if f.name == "gaussian" {
            // The same composition through the Poisson limit.
            let id = format!("potentials.poisson_limit.k={k}.{}.alpha=-2.beta=2.5", f.name);
            let g = f.clone();
            jobs.push(job(id.clone(), "lim_t P_t(B_{-2}) ∗ J_β f = B_{β-2} ∗ f", move || {
                let d = params(k)?;
                let jb = bessel_potential(&d, 2.5, &g)?;
                let errs = xs[..2]
                    .iter()
                    .map(|&x| Ok((bessel_potential_fn_negative(&d, 2.0, &jb, x)? - bessel_potential_direct(&d, 0.5, &g, x)?).abs()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(vec![CheckRecord::new(
                    id.clone(),
                    "lim_t P_t(B_{-2}) ∗ J_β f = B_{β-2} ∗ f",
                    max_of(errs),
                    Expected::AtMost { bound: 1e-3 },
                )])
            }));
        }
        // Inverse through the Poisson limit.
        let id = format!("potentials.poisson_limit.k={k}.{}.alpha=-1.beta=1", f.name);
        let g = f.clone();
        jobs.push(job(id.clone(), "lim_t P_t(B_{-β}) ∗ J_β f = f", move || {
            let d = params(k)?;
            let jb = bessel_potential(&d, 1.0, &g)?;
            let errs = xs[..2]
                .iter()
                .map(|&x| Ok((bessel_potential_fn_negative(&d, 1.0, &jb, x)? - g.eval(x)).abs()))
                .collect::<Result<Vec<_>>>()?;
            Ok(vec![CheckRecord::new(id.clone(), "lim_t P_t(B_{-β}) ∗ J_β f = f", max_of(errs), Expected::AtMost { bound: 1e-3 })])
        }));
    }
    jobs
}

fn asymptotic_jobs(k: f64) -> Vec<Job> {
    let mut jobs = Vec::new();
    let crit = 2.0 * k + 1.0;
    let mut orders = BESSEL_ORDERS.to_vec();
    if !orders.contains(&crit) {
        orders.push(crit);
    }
    for alpha in orders {
        let id = format!("asymptotics.bessel_small_x.k={k}.alpha={alpha}");
        let reference = if alpha < crit {
            "B_α(x) ~ Γ((1-α)/2+k) / (2^{α-1/2-k} Γ(α/2)) |x|^{α-1-2k} as x → 0, α < 2k+1"
        } else if alpha == crit {
            "B_α(x) ~ ln(1/|x|) / (2^{k-1/2} Γ(k+1/2)) as x → 0, α = 2k+1"
        } else {
            "B_α(0) = Γ((α-1)/2-k) / (2^{k+1/2} Γ(α/2)), α > 2k+1"
        };
        jobs.push(job(id.clone(), reference, move || {
            let b = BesselKernel::new(&params(k)?, alpha)?;
            let x = 1e-3;
            let ratio = b.eval(x)? / b.small_x_asymptotic(x)?;
            Ok(vec![CheckRecord::new(id.clone(), reference, ratio, Expected::Window { lo: 0.95, hi: 1.05 })])
        }));
        let id = format!("asymptotics.bessel_large_x.k={k}.alpha={alpha}");
        let reference = "B_α(x) ~ √π / (2^{(α-1)/2} Γ(α/2)) |x|^{α/2-1-k} e^{-|x|} as |x| → ∞";
        jobs.push(job(id.clone(), reference, move || {
            let b = BesselKernel::new(&params(k)?, alpha)?;
            let x = 25.0;
            let ratio = b.eval(x)? / b.large_x_asymptotic(x)?;
            let c = b.large_x_correction(x);
            // The leading form cannot reach the window once the first correction alone exceeds it.
            if c.abs() < 0.05 {
                Ok(vec![CheckRecord::new(id.clone(), reference, ratio, Expected::Window { lo: 0.95, hi: 1.05 })])
            } else {
                Ok(vec![CheckRecord::new(id.clone(), reference, ratio, Expected::Info)
                    .note(format!("first correction (4ν²-1)/(8x) = {c:.4}; see bessel_large_x_two_term"))])
            }
        }));
        let id = format!("asymptotics.bessel_large_x_two_term.k={k}.alpha={alpha}");
        let reference = "B_α(x) ~ leading form · (1 + (4ν²-1)/(8|x|)), ν = α/2 - 1/2 - k";
        jobs.push(job(id.clone(), reference, move || {
            let b = BesselKernel::new(&params(k)?, alpha)?;
            let x = 25.0;
            let ratio = b.eval(x)? / b.large_x_two_term(x)?;
            Ok(vec![CheckRecord::new(id.clone(), reference, ratio, Expected::Window { lo: 0.99, hi: 1.01 })])
        }));
    }
    jobs
}

/// `t_0 2^{-j}`, `j = 0..4`.
const DYADIC: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

/// Largest successive ratio `q(t_{j+1}) / q(t_j)` along the dyadic sequence.
fn decrease_ratio(q: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let v = DYADIC.iter().map(|&t| q(t)).collect::<Result<Vec<_>>>()?;
    Ok(max_of(v.windows(2).map(|w| w[1] / w[0])))
}

fn decay_jobs(k: f64) -> Vec<Job> {
    let mut jobs = Vec::new();
    let Ok(d) = params(k) else { return jobs };
    for f in gaussian_suite(&d) {
        let name = f.name.clone();
        let id = format!("decay.heat_lp_lr.k={k}.{name}");
        let g = f.clone();
        let reference = "t^{(k+1/2)(1/p-1/r)} ‖G_t f‖_{k,r} decreasing as t → 0, p = 1, r = 2";
        jobs.push(job(id.clone(), reference, move || {
            let d = params(k)?;
            let u = HeatTemperature::new(&d, &g);
            let delta = 0.5;
            let r = decrease_ratio(|t| Ok(t.powf((k + 0.5) * delta) * slice_norm(&u, 0, t, 2.0)?))?;
            Ok(vec![CheckRecord::new(id.clone(), reference, r, Expected::Below { bound: 1.0 })])
        }));
        let id = format!("decay.negative_potential.k={k}.{name}");
        let g = f.clone();
        let reference = "t^{α/2} ‖J_{-α} G_t f‖_{k,p} decreasing as t → 0, α = 1, p = 2";
        jobs.push(job(id.clone(), reference, move || {
            let d = params(k)?;
            let u: TemperatureRef = Arc::new(HeatTemperature::new(&d, &g));
            let j = PotentialTemperature::new_unchecked(u, -1.0)?;
            let r = decrease_ratio(|t| Ok(t.sqrt() * slice_norm(&j, 0, t, 2.0)?))?;
            Ok(vec![CheckRecord::new(id.clone(), reference, r, Expected::Below { bound: 1.0 })])
        }));
        let id = format!("decay.poisson_derivative.k={k}.{name}");
        let g = f.clone();
        let reference = "t ‖∂_t P_t f‖_{k,2} = t ‖|ξ| e^{-t|ξ|} F_k f‖_{k,2} decreasing as t → 0";
        jobs.push(job(id.clone(), reference, move || {
            let d = params(k)?;
            let grid = default_grid_for(&d, &g)?;
            let freq = frequency_grid(&d, 14.0)?;
            let spec = dunkl_transform(&d, &grid, &g.clone().opaque(), freq.clone())?;
            let r = decrease_ratio(|t| {
                let s: f64 = freq
                    .nodes()
                    .iter()
                    .zip(freq.weights())
                    .zip(&spec.values)
                    .map(|((&y, w), v)| w * (y.abs() * (-t * y.abs()).exp()).powi(2) * v.norm_sqr())
                    .sum();
                Ok(t * s.sqrt())
            })?;
            Ok(vec![CheckRecord::new(id.clone(), reference, r, Expected::Below { bound: 1.0 })])
        }));
    }
    jobs
}

fn grids(opts: &SuiteOptions) -> SweepGrids {
    let mut g = SweepGrids::default();
    if let Some(t) = &opts.tgrid {
        g.a = t.clone();
    }
    g
}

fn equivalence_records(k: f64, r: EquivalenceReport) -> Vec<CheckRecord> {
    let (lo, hi) = EQUIVALENCE_WINDOW;
    let mut out: Vec<CheckRecord> = r
        .points
        .iter()
        .map(|p| {
            CheckRecord::new(
                format!("equivalences.{}.k={k}.{}", r.id, p.label),
                r.reference.clone(),
                p.ratio,
                Expected::Window { lo, hi },
            )
            .note(format!("lhs = {}, rhs = {}", p.lhs, p.rhs))
        })
        .collect();
    out.push(
        CheckRecord::new(
            format!("equivalences.{}.k={k}.stability", r.id),
            format!("{}: max ratio / min ratio over the sweep", r.reference),
            r.stability,
            Expected::AtMost { bound: STABILITY_LIMIT },
        )
        .note(format!("{} points, ratios in [{}, {}]", r.points.len(), r.min_ratio, r.max_ratio)),
    );
    out
}

fn equivalence_jobs(k: f64, opts: &SuiteOptions) -> Vec<Job> {
    type Report = fn(&DunklParams, &SweepGrids) -> Result<EquivalenceReport>;
    let reports: [(&str, &'static str, Report); 5] = [
        ("temperature", "E^α_{p,q}(U) ~ A*_{p,q}(t^{n-α/2} ∂_t^n U) + L_p(U)", temperature_equivalence),
        ("derivative_order", "norms with n = n̄ and n = n̄+1 are equivalent", derivative_order_equivalence),
        ("potential", "‖J_β f‖_{Λ_{α+β}} ~ ‖f‖_{Λ_α}", potential_isomorphism),
        ("heat_transform", "E^α_{p,q}(G f) ~ ‖f‖_{Λ_{α,p,q}}", heat_transform_isomorphism),
        ("modulus", "modulus-of-continuity norm ~ heat norm, 0 < α < 1", modulus_equivalence),
    ];
    reports
        .into_iter()
        .map(|(name, reference, f)| {
            let g = grids(opts);
            job(format!("equivalences.{name}.k={k}"), reference, move || Ok(equivalence_records(k, f(&params(k)?, &g)?)))
        })
        .collect()
}

fn embedding_jobs(k: f64, opts: &SuiteOptions) -> Vec<Job> {
    let g = grids(opts);
    vec![job(format!("embeddings.k={k}"), "embedding instances", move || {
        let checks = embedding_report(&params(k)?, &g)?;
        Ok(checks
            .into_iter()
            .map(|c| {
                CheckRecord::new(
                    format!("embeddings.{}.k={k}", c.id.replace('/', ".")),
                    format!("{}: ‖f‖_{} ≤ B ‖f‖_{}", c.reference, c.target, c.source),
                    if c.holds { c.constant } else { f64::NAN },
                    Expected::Finite,
                )
                .note(format!("source = {}, target = {}", c.source_norm, c.target_norm))
            })
            .collect())
    })]
}

fn classical_jobs() -> Vec<Job> {
    let mut jobs = Vec::new();
    jobs.push(job("classical.translation".into(), "k = 0: T_y f(x) = f(x+y)", || {
        let d = params(0.0)?;
        let mut worst: f64 = 0.0;
        for f in gaussian_suite(&d) {
            for &(x, y) in &[(0.3, 0.5), (-1.2, 0.7), (2.0, -0.4)] {
                worst = worst.max((translate(&d, y, &f, x)? - f.eval(x + y)).abs());
            }
        }
        Ok(vec![CheckRecord::new("classical.translation", "k = 0: T_y f(x) = f(x+y)", worst, Expected::AtMost { bound: 1e-12 })])
    }));
    jobs.push(job("classical.derivative".into(), "k = 0: D_k f = f'", || {
        let d = params(0.0)?;
        let mut worst: f64 = 0.0;
        for f in gaussian_suite(&d) {
            let df = f.derivative().expect("suite functions carry derivatives").clone();
            let g = f.clone().opaque();
            for &x in &[-1.3, 0.0, 0.4, 2.2] {
                worst = worst.max((dunkl_derivative(&d, &g, x)? - df(x)).abs());
            }
        }
        Ok(vec![CheckRecord::new("classical.derivative", "k = 0: D_k f = f'", worst, Expected::AtMost { bound: 1e-8 })])
    }));
    jobs.push(job("classical.heat_kernel".into(), "k = 0: F_t(x) = (2t)^{-1/2} e^{-x²/4t}", || {
        let d = params(0.0)?;
        let mut worst: f64 = 0.0;
        for &t in &KERNEL_TIMES {
            let hk = HeatKernel::new(&d, t)?;
            for &x in &LATTICE_X {
                let want = (2.0 * t).powf(-0.5) * (-x * x / (4.0 * t)).exp();
                worst = worst.max((hk.eval(x) - want).abs() / want);
            }
        }
        Ok(vec![CheckRecord::new(
            "classical.heat_kernel",
            "k = 0: F_t(x) = (2t)^{-1/2} e^{-x²/4t}",
            worst,
            Expected::AtMost { bound: 1e-14 },
        )])
    }));
    jobs.push(job("classical.poisson_kernel".into(), "k = 0: P_t(x) = √(2/π) t / (t²+x²)", || {
        let d = params(0.0)?;
        let mut worst: f64 = 0.0;
        for &t in &KERNEL_TIMES {
            let pk = PoissonKernel::new(&d, t)?;
            for &x in &LATTICE_X {
                let want = (2.0 / PI).sqrt() * t / (t * t + x * x);
                worst = worst.max((pk.eval(x) - want).abs() / want);
            }
        }
        Ok(vec![CheckRecord::new(
            "classical.poisson_kernel",
            "k = 0: P_t(x) = √(2/π) t / (t²+x²)",
            worst,
            Expected::AtMost { bound: 1e-14 },
        )])
    }));
    jobs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_resolve() {
        assert_eq!(resolve_suites(&["all".into()]).unwrap().len(), SUITES.len());
        assert_eq!(resolve_suites(&["pde".into(), "pde".into()]).unwrap(), vec!["pde"]);
        assert!(resolve_suites(&["nope".into()]).is_err());
    }

    #[test]
    fn classical_suite_passes() {
        let opts = SuiteOptions { ks: vec![0.0], ..Default::default() };
        let run = run_suites(&["classical"], &opts);
        assert_eq!(run.records.len(), 4);
        assert_eq!(run.timings[0].checks, 4);
        for r in run.records {
            assert_eq!(r.verdict, crate::report::Verdict::Pass, "{r:?}");
        }
    }
}
