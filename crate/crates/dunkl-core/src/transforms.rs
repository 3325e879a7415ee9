//! Heat and Poisson transforms, temperatures on the upper half-plane and their checks.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::dunkl_ops::{convolve, Translator};
use crate::error::{Error, Result};
use crate::function::{DecayClass, HeatForm, Parity, RealFunction};
use crate::kernels::{heat_kernel_dt_fn, poisson_kernel_fn, HeatFamily, MAX_INTERNAL_ORDER};
use crate::measure::{lp_norm_samples, GridBuilder, GridProfile, WeightedGrid};
use crate::specfun::{DunklParams, KernelEvaluator};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    HeatTransformOf(String),
    ClosedForm(String),
    PotentialOf { alpha: f64, inner: Box<Provenance> },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HeatTransformOf(name) => write!(f, "G({name})"),
            Self::ClosedForm(name) => f.write_str(name),
            Self::PotentialOf { alpha, inner } => write!(f, "J_{alpha}({inner})"),
        }
    }
}

/// A solution of `D_k² U = ∂_t U` on `ℝ × (0, ∞)`.
pub trait Temperature: Send + Sync {
    fn params(&self) -> &DunklParams;

    fn provenance(&self) -> Provenance;

    /// `∂_t^m U(x, t)`.
    fn dt(&self, m: usize, x: f64, t: f64) -> Result<f64>;

    fn eval(&self, x: f64, t: f64) -> Result<f64> {
        self.dt(0, x, t)
    }

    /// `D_k ∂_t^m U(x, t)`; finite differences in `x` unless overridden.
    fn dk_dt(&self, m: usize, x: f64, t: f64) -> Result<f64> {
        let h = 1e-3 * self.scale(t);
        dunkl_fd(self.params().k, |z| self.dt(m, z, t), x, h)
    }

    /// `U` extends analytically in `t` down to `-t_offset`.
    fn t_offset(&self) -> f64 {
        0.0
    }

    /// Beyond this radius `U(·, t)` and its t-derivatives are negligible.
    fn radius(&self, _t: f64) -> f64 {
        f64::INFINITY
    }

    /// Length scale of the finest spatial feature at time `t`.
    fn scale(&self, t: f64) -> f64 {
        (t + self.t_offset()).sqrt().min(1.0)
    }
}

pub type TemperatureRef = Arc<dyn Temperature>;

/// `g'(x) + k (g(x) - g(-x)) / x` with a fourth-order central difference.
pub(crate) fn dunkl_fd(k: f64, g: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let d = (-g(x + 2.0 * h)? + 8.0 * g(x + h)? - 8.0 * g(x - h)? + g(x - 2.0 * h)?) / (12.0 * h);
    if x == 0.0 {
        return Ok((1.0 + 2.0 * k) * d);
    }
    Ok(d + k * (g(x)? - g(-x)?) / x)
}

/// `D_k² U(x, t)` by differencing `D_k U` once more.
pub fn dunkl_laplacian(u: &dyn Temperature, x: f64, t: f64) -> Result<f64> {
    let h = 1e-3 * u.scale(t);
    dunkl_fd(u.params().k, |z| u.dk_dt(0, z, t), x, h)
}

/// `a U`.
#[derive(Clone)]
pub struct ScaledTemperature {
    pub a: f64,
    inner: TemperatureRef,
}

impl ScaledTemperature {
    pub fn new(a: f64, inner: TemperatureRef) -> Self {
        Self { a, inner }
    }
}

impl Temperature for ScaledTemperature {
    fn params(&self) -> &DunklParams {
        self.inner.params()
    }

    fn provenance(&self) -> Provenance {
        self.inner.provenance()
    }

    fn dt(&self, m: usize, x: f64, t: f64) -> Result<f64> {
        Ok(self.a * self.inner.dt(m, x, t)?)
    }

    fn dk_dt(&self, m: usize, x: f64, t: f64) -> Result<f64> {
        Ok(self.a * self.inner.dk_dt(m, x, t)?)
    }

    fn t_offset(&self) -> f64 {
        self.inner.t_offset()
    }

    fn radius(&self, t: f64) -> f64 {
        self.inner.radius(t)
    }

    fn scale(&self, t: f64) -> f64 {
        self.inner.scale(t)
    }
}

/// `U(x, t) = G_t f(x) = (F_t ∗ f)(x)`.
#[derive(Clone)]
pub struct HeatTemperature {
    params: DunklParams,
    label: String,
    f: Option<RealFunction>,
    form: Option<HeatForm>,
    extension: Option<TemperatureRef>,
    family: HeatFamily,
    ev: KernelEvaluator,
}

impl HeatTemperature {
    /// Uses the closed form of `f` when it has one.
    pub fn new(params: &DunklParams, f: &RealFunction) -> Self {
        let mut u = Self::numeric(params, f);
        u.form = f.heat_form().cloned();
        if u.form.is_none() {
            u.extension = f.heat_extension().cloned();
        }
        u
    }

    /// Always integrates against the translated kernel.
    pub fn numeric(params: &DunklParams, f: &RealFunction) -> Self {
        Self {
            params: *params,
            label: f.name.clone(),
            f: Some(f.clone()),
            form: None,
            extension: None,
            family: HeatFamily::new(params),
            ev: KernelEvaluator::new(params),
        }
    }

    /// `U(x, t) = Σ coef D^{dk} ∂^{dt} F_{shift+t}(x)`.
    pub fn from_form(params: &DunklParams, label: impl Into<String>, form: HeatForm) -> Self {
        Self {
            params: *params,
            label: label.into(),
            f: None,
            form: Some(form),
            extension: None,
            family: HeatFamily::new(params),
            ev: KernelEvaluator::new(params),
        }
    }

    /// `U(x, t) = F_t(x)`.
    pub fn kernel(params: &DunklParams) -> Self {
        Self::from_form(params, "F", HeatForm::kernel(0.0))
    }

    pub fn form(&self) -> Option<&HeatForm> {
        self.form.as_ref()
    }

    pub fn source(&self) -> Option<&RealFunction> {
        self.f.as_ref()
    }

    fn y_grid(&self, f: &RealFunction, x: f64, t: f64) -> Result<WeightedGrid> {
        let st = t.sqrt();
        let r = (f.radius.min(x.abs() + 16.0 * st)).max(16.0 * st).max(1.0);
        let width = (0.5 * st).min(0.5).min(0.5 * f.feature_width.max(1e-3));
        GridBuilder::new(self.params.k, r, GridProfile::Smooth)
            .panel_width(width)
            .origin_resolution(0.05 * st.min(f.feature_width.max(1e-6)))
            .uniform_to(r)
            .refine_at(x, 0.05 * st)
            .build()
    }

    /// `c_k ∫ T_{-y}(D^{dk} ∂^m F_t)(x) f(y) |y|^{2k} dy`.
    fn integrate(&self, f: &RealFunction, dk: bool, m: usize, x: f64, t: f64) -> Result<f64> {
        if m > MAX_INTERNAL_ORDER {
            return Err(Error::OrderTooLarge { order: m, max: MAX_INTERNAL_ORDER });
        }
        let grid = self.y_grid(f, x, t)?;
        let vals: Vec<f64> = if !dk && m == 0 {
            grid.nodes()
                .par_iter()
                .map(|&y| {
                    let fy = f.eval(y);
                    if fy == 0.0 {
                        0.0
                    } else {
                        self.family.translated(&self.ev, x, y, t) * fy
                    }
                })
                .collect()
        } else {
            let tr = Translator::new(&self.params)?;
            let mut g = heat_kernel_dt_fn(&self.params, t, m)?;
            if dk {
                g = crate::dunkl_ops::dunkl_derivative_fn(&self.params, &g)?;
            }
            grid.nodes()
                .par_iter()
                .map(|&y| {
                    let fy = f.eval(y);
                    if fy == 0.0 {
                        0.0
                    } else {
                        tr.translate(x, &g, -y) * fy
                    }
                })
                .collect()
        };
        Ok(self.params.c_k * grid.integrate_samples(&vals)?)
    }
}

impl Temperature for HeatTemperature {
    fn params(&self) -> &DunklParams {
        &self.params
    }

    fn provenance(&self) -> Provenance {
        match &self.f {
            Some(_) => Provenance::HeatTransformOf(self.label.clone()),
            None => Provenance::ClosedForm(self.label.clone()),
        }
    }

    fn dt(&self, m: usize, x: f64, t: f64) -> Result<f64> {
        if let Some(u) = &self.extension {
            return u.dt(m, x, t);
        }
        let source_at_zero = t == 0.0 && m == 0 && self.f.is_some();
        if !source_at_zero && (!(t + self.t_offset() > 0.0) || t < 0.0) {
            return Err(Error::Domain { what: "temperature time", arg: t });
        }
        match (&self.form, &self.f) {
            (Some(form), _) => {
                check_form_order(form, m)?;
                Ok(self.family.form(form, m, x, t))
            }
            (None, Some(f)) if t == 0.0 && m == 0 => Ok(f.eval(x)),
            (None, Some(f)) => self.integrate(f, false, m, x, t),
            (None, None) => unreachable!("a heat temperature has a form or a source"),
        }
    }

    fn dk_dt(&self, m: usize, x: f64, t: f64) -> Result<f64> {
        if let Some(u) = &self.extension {
            return u.dk_dt(m, x, t);
        }
        match (&self.form, &self.f) {
            (Some(form), _) => {
                check_form_order(form, m + 1)?;
                // D_k on a term with dk = 1 gives ∂_t.
                let s = form.shift + t;
                Ok(form
                    .terms
                    .iter()
                    .map(|term| {
                        let order = term.dt + m;
                        term.coef
                            * if term.dk == 0 {
                                self.family.dk_dt(order, x, s)
                            } else {
                                self.family.dt(order + 1, x, s)
                            }
                    })
                    .sum())
            }
            (None, Some(f)) => self.integrate(f, true, m, x, t),
            (None, None) => unreachable!("a heat temperature has a form or a source"),
        }
    }

    fn t_offset(&self) -> f64 {
        if let Some(u) = &self.extension {
            return u.t_offset();
        }
        self.form.as_ref().map_or(0.0, |f| f.shift)
    }

    fn radius(&self, t: f64) -> f64 {
        if let Some(u) = &self.extension {
            return u.radius(t);
        }
        match (&self.form, &self.f) {
            (Some(form), _) => 15.0 * (form.shift + t).sqrt(),
            (None, Some(f)) => f.radius + 15.0 * t.sqrt(),
            _ => f64::INFINITY,
        }
    }

    fn scale(&self, t: f64) -> f64 {
        match &self.extension {
            Some(u) => u.scale(t),
            None => (t + self.t_offset()).sqrt().min(1.0),
        }
    }
}

fn check_form_order(form: &HeatForm, m: usize) -> Result<()> {
    let top = form.terms.iter().map(|t| t.dt + t.dk as usize).max().unwrap_or(0) + m;
    if top > MAX_INTERNAL_ORDER {
        return Err(Error::OrderTooLarge { order: top, max: MAX_INTERNAL_ORDER });
    }
    Ok(())
}

/// `U(x, t) = a + b x`, a temperature for every `k`.
#[derive(Debug, Clone)]
pub struct StaticTemperature {
    params: DunklParams,
    pub a: f64,
    pub b: f64,
}

impl StaticTemperature {
    pub fn new(params: &DunklParams, a: f64, b: f64) -> Self {
        Self { params: *params, a, b }
    }
}

impl Temperature for StaticTemperature {
    fn params(&self) -> &DunklParams {
        &self.params
    }

    fn provenance(&self) -> Provenance {
        Provenance::ClosedForm(format!("{} + {} x", self.a, self.b))
    }

    fn dt(&self, m: usize, x: f64, _t: f64) -> Result<f64> {
        Ok(if m == 0 { self.a + self.b * x } else { 0.0 })
    }

    fn dk_dt(&self, m: usize, _x: f64, _t: f64) -> Result<f64> {
        Ok(if m == 0 { self.b * (1.0 + 2.0 * self.params.k) } else { 0.0 })
    }

    fn scale(&self, _t: f64) -> f64 {
        1.0
    }
}

type FieldFn = Arc<dyn Fn(usize, f64, f64) -> f64 + Send + Sync>;

/// A field given by a closure `(m, x, t) ↦ ∂_t^m U(x, t)`.
#[derive(Clone)]
pub struct FnTemperature {
    params: DunklParams,
    label: String,
    f: FieldFn,
    radius: f64,
}

impl FnTemperature {
    pub fn new(params: &DunklParams, label: impl Into<String>, f: impl Fn(usize, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            params: *params,
            label: label.into(),
            f: Arc::new(f),
            radius: f64::INFINITY,
        }
    }

    pub fn with_radius(mut self, r: f64) -> Self {
        self.radius = r;
        self
    }
}

impl Temperature for FnTemperature {
    fn params(&self) -> &DunklParams {
        &self.params
    }

    fn provenance(&self) -> Provenance {
        Provenance::ClosedForm(self.label.clone())
    }

    fn dt(&self, m: usize, x: f64, t: f64) -> Result<f64> {
        Ok((self.f)(m, x, t))
    }

    fn radius(&self, _t: f64) -> f64 {
        self.radius
    }
}

/// `(2(T-t))^{-(k+1/2)} e^{x²/4(T-t)}`: a temperature up to `t = T` that blows up there.
pub fn blow_up_witness(params: &DunklParams, blow_up: f64) -> FnTemperature {
    let fam = HeatFamily::new(params);
    let g = params.k + 0.5;
    FnTemperature::new(params, format!("blow_up(T={blow_up})"), move |m, x, t| {
        let s = blow_up - t;
        if !(s > 0.0) {
            return f64::NAN;
        }
        // U(x, t) = (-1)^{k+1/2} F_{t - T}(x); ∂_t^m follows from the heat polynomials at -s.
        let u = -x * x / (4.0 * s);
        let r = fam.polynomials().r(m, u);
        (-s).powi(-(m as i32)) * r * (2.0 * s).powf(-g) * (x * x / (4.0 * s)).exp()
    })
}

/// `G_t f(x)` by quadrature against the translated heat kernel.
pub fn heat_transform(params: &DunklParams, f: &RealFunction, x: f64, t: f64) -> Result<f64> {
    HeatTemperature::numeric(params, f).eval(x, t)
}

/// `P_t f(x) = (P_t ∗ f)(x)`.
pub fn poisson_transform(params: &DunklParams, f: &RealFunction, x: f64, t: f64) -> Result<f64> {
    let p = poisson_kernel_fn(params, t)?;
    convolve(params, &p, f, x)
}

/// `P_t f` sampled on a growing grid and wrapped as a function with a `|x|^{-2k-2}` tail.
pub fn poisson_transform_fn(params: &DunklParams, f: &RealFunction, t: f64) -> Result<RealFunction> {
    let k = params.k;
    let r = 1e4;
    let grid = GridBuilder::new(k, r, GridProfile::Smooth)
        .panel_width((0.25 * t).min(0.5))
        .uniform_to(12.0)
        .build()?;
    let nodes = grid.nodes().to_vec();
    let n = nodes.len();
    let mut values = vec![num_complex::Complex64::new(0.0, 0.0); n];
    let sign = match f.parity {
        Parity::Even => Some(1.0),
        Parity::Odd => Some(-1.0),
        Parity::None => None,
    };
    let range: Vec<usize> = if sign.is_some() { (n / 2..n).collect() } else { (0..n).collect() };
    let computed: Vec<(usize, f64)> = range
        .par_iter()
        .map(|&i| poisson_transform(params, f, nodes[i], t).map(|v| (i, v)))
        .collect::<Result<_>>()?;
    for (i, v) in computed {
        values[i].re = v;
        if let Some(s) = sign {
            values[n - 1 - i].re = s * v;
        }
    }
    let mass = match f.decay {
        DecayClass::Polynomial { coef, .. } => coef,
        _ => 1.0,
    };
    let sampled = crate::dunkl_ops::SampledFunction {
        grid: Arc::new(grid),
        values,
        interpolation: crate::dunkl_ops::Interpolation::LocalLagrange,
    };
    let template = RealFunction::new(format!("P_{t}({})", f.name), |_| 0.0)
        .parity(f.parity)
        .decay(
            DecayClass::Polynomial {
                coef: params.c_tilde_k * t * mass.max(1.0) * 4.0,
                power: 2.0 * k + 2.0,
            },
            r,
        )
        .feature_width(t.min(f.feature_width));
    Ok(sampled.to_function(&template))
}

/// Grid for `x ↦ U(x, t)`: uniform at the temperature's scale, growing outside.
/// Even integer `p` keeps the integrand smooth, so a coarser grid suffices; other
/// exponents see the kinks of `|U|^p` at sign changes.
pub fn slice_grid(k: f64, radius: f64, scale: f64, p: f64) -> Result<WeightedGrid> {
    if !radius.is_finite() {
        return Err(Error::Unsupported("the temperature does not decay in x".into()));
    }
    let smooth = p.is_finite() && p.fract() == 0.0 && (p as i64) % 2 == 0;
    let (nodes, rel) = if smooth { (8, 1.0) } else { (16, 0.5) };
    let width = (rel * scale).clamp(1e-3, rel);
    let core = radius.min(16.0 * scale.max(0.05));
    GridBuilder::new(k, radius.max(1.0), GridProfile::Smooth)
        .nodes_per_panel(nodes)
        .panel_width(width)
        .uniform_to(core)
        .build()
}

/// `‖∂_t^m U(·, t)‖_{k,p}`.
pub fn slice_norm(u: &dyn Temperature, m: usize, t: f64, p: f64) -> Result<f64> {
    let grid = slice_grid(u.params().k, u.radius(t), u.scale(t), p)?;
    let vals = grid
        .nodes()
        .par_iter()
        .map(|&x| u.dt(m, x, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(lp_norm_samples(&grid, &vals, p)?.value)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResidual {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SemigroupReport {
    pub label: String,
    pub s: f64,
    pub t: f64,
    pub probes: Vec<ProbeResidual>,
    pub max_residual: f64,
    /// `‖U(·, τ)‖_{k,1}` finite on the sampled `τ`, standing in for local integrability.
    pub locally_integrable: bool,
}

/// Compares `U(x, s+t)` with `c_k ∫ T_{-y} F_t(x) U(y, s) |y|^{2k} dy` on the probes.
pub fn semigroup_check(u: &dyn Temperature, s: f64, t: f64, probe_xs: &[f64]) -> Result<SemigroupReport> {
    let params = *u.params();
    let fam = HeatFamily::new(&params);
    let ev = KernelEvaluator::new(&params);
    let st = t.sqrt();
    let mut probes = Vec::with_capacity(probe_xs.len());
    for &x in probe_xs {
        let r = u.radius(s).min(x.abs() + 16.0 * st).max(16.0 * st);
        let width = (0.25 * st).min(0.25 * u.scale(s)).min(0.5);
        let grid = GridBuilder::new(params.k, r, GridProfile::Smooth)
            .panel_width(width)
            .origin_resolution(0.05 * st)
            .uniform_to(r)
            .refine_at(x, 0.05 * st)
            .build()?;
        let vals = grid
            .nodes()
            .par_iter()
            .map(|&y| Ok(fam.translated(&ev, x, y, t) * u.eval(y, s)?))
            .collect::<Result<Vec<_>>>()?;
        let rhs = params.c_k * grid.integrate_samples(&vals)?;
        let lhs = u.eval(x, s + t)?;
        probes.push(ProbeResidual { x, lhs, rhs });
    }
    let max_residual = probes.iter().map(|p| (p.lhs - p.rhs).abs()).fold(0.0, f64::max);
    let locally_integrable = if u.radius(s).is_finite() {
        [0.5 * s, s, s + t, 2.0 * (s + t)]
            .iter()
            .all(|&tau| slice_norm(u, 0, tau, 1.0).map_or(false, |v| v.is_finite()))
    } else {
        // Non-decaying temperatures are treated as locally bounded.
        probe_xs.iter().all(|&x| u.eval(x, s).map_or(false, f64::is_finite))
    };
    Ok(SemigroupReport {
        label: u.provenance().to_string(),
        s,
        t,
        probes,
        max_residual,
        locally_integrable,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotoneReport {
    pub ts: Vec<f64>,
    pub values: Vec<f64>,
    pub non_increasing: bool,
}

/// `t ↦ ‖U(·, t)‖_{k,p}` along increasing `ts`, non-increase checked with relative slack.
pub fn norm_monotonicity(u: &dyn Temperature, p: f64, ts: &[f64], slack: f64) -> Result<MonotoneReport> {
    let values = ts.iter().map(|&t| slice_norm(u, 0, t, p)).collect::<Result<Vec<_>>>()?;
    let non_increasing = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack));
    Ok(MonotoneReport { ts: ts.to_vec(), values, non_increasing })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthVerdict {
    TkAdmissible,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthClass {
    pub class: GrowthVerdict,
    pub b: f64,
    pub c: f64,
    /// Smallest `C` with `|D_k^n ∂_t^m U| ≤ C t^{-b} e^t` on the probes.
    pub constant: f64,
    /// First probe `(n, m, x, t)` that failed to evaluate.
    pub failure: Option<(usize, usize, f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct GrowthProbe {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub b: f64,
    pub c: f64,
    pub max_n: usize,
    pub max_m: usize,
}

impl GrowthProbe {
    /// `x ∈ [-4, 4]`, `t` on a log ray from `c` to `64`.
    pub fn standard(b: f64, c: f64) -> Self {
        let xs = (0..=8).map(|i| -4.0 + i as f64).collect();
        let mut ts = Vec::new();
        let mut t = c;
        while t <= 64.0 {
            ts.push(t);
            t *= 2.0;
        }
        Self { xs, ts, b, c, max_n: 2, max_m: 2 }
    }
}

/// `D_k^n ∂_t^m U(x, t)` for `n ≤ 2`.
pub fn dk_n_dt(u: &dyn Temperature, n: usize, m: usize, x: f64, t: f64) -> Result<f64> {
    match n {
        0 => u.dt(m, x, t),
        1 => u.dk_dt(m, x, t),
        2 => {
            let h = 1e-3 * u.scale(t);
            dunkl_fd(u.params().k, |z| u.dk_dt(m, z, t), x, h)
        }
        _ => Err(Error::OrderTooLarge { order: n, max: 2 }),
    }
}

/// Fits the growth constant on the probe set; any non-finite sample leaves the class unknown.
pub fn growth_classify(u: &dyn Temperature, probe: &GrowthProbe) -> GrowthClass {
    let mut constant: f64 = 0.0;
    for n in 0..=probe.max_n {
        for m in 0..=probe.max_m {
            for &t in &probe.ts {
                for &x in &probe.xs {
                    let v = dk_n_dt(u, n, m, x, t);
                    match v {
                        Ok(v) if v.is_finite() => {
                            constant = constant.max(v.abs() * t.powf(probe.b) * (-t).exp());
                        }
                        _ => {
                            return GrowthClass {
                                class: GrowthVerdict::Unknown,
                                b: probe.b,
                                c: probe.c,
                                constant: f64::INFINITY,
                                failure: Some((n, m, x, t)),
                            }
                        }
                    }
                }
            }
        }
    }
    GrowthClass {
        class: GrowthVerdict::TkAdmissible,
        b: probe.b,
        c: probe.c,
        constant,
        failure: None,
    }
}

/// Largest `|D_k² U - ∂_t U|` on a lattice, relative to the largest `|∂_t U|`
/// at the same time (plus `floor`), so zero crossings of `∂_t U` stay meaningful.
pub fn heat_residual(u: &dyn Temperature, xs: &[f64], ts: &[f64], floor: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &t in ts {
        let mut err: f64 = 0.0;
        let mut size: f64 = 0.0;
        for &x in xs {
            let lap = dunkl_laplacian(u, x, t)?;
            let dt = u.dt(1, x, t)?;
            err = err.max((lap - dt).abs());
            size = size.max(dt.abs());
        }
        worst = worst.max(err / (size + floor));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{gaussian, gaussian_suite, hermite2_gaussian, xgaussian};
    use crate::kernels::HeatKernel;

    fn params(k: f64) -> DunklParams {
        DunklParams::new(k).unwrap()
    }

    #[test]
    fn numeric_temperature_starts_at_its_source() {
        let d = params(0.5);
        let f = crate::function::RealFunction::combine(1.0, &gaussian(&d), 2.0, &hermite2_gaussian(&d));
        assert!(f.heat_form().is_none());
        let u = HeatTemperature::new(&d, &f);
        assert_eq!(u.dt(0, 0.7, 0.0).unwrap(), f.eval(0.7));
        assert!(u.dt(1, 0.7, 0.0).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for &k in &[0.0, 0.5, 1.5] {
            let d = params(k);
            for f in gaussian_suite(&d) {
                let fast = HeatTemperature::new(&d, &f);
                let slow = HeatTemperature::numeric(&d, &f);
                for &(x, t) in &[(0.0, 0.1), (0.7, 0.5), (-1.3, 2.0)] {
                    let a = fast.eval(x, t).unwrap();
                    let b = slow.eval(x, t).unwrap();
                    assert!((a - b).abs() < 1e-10, "k={k} {} x={x} t={t}: {a} vs {b}", f.name);
                    let a = fast.dt(1, x, t).unwrap();
                    let b = slow.dt(1, x, t).unwrap();
                    assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "dt k={k} {}: {a} vs {b}", f.name);
                    let a = fast.dk_dt(0, x, t).unwrap();
                    let b = slow.dk_dt(0, x, t).unwrap();
                    assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "dk k={k} {}: {a} vs {b}", f.name);
                }
            }
        }
    }

    #[test]
    fn heat_transform_of_kernel_is_kernel() {
        let d = params(0.5);
        let f = crate::kernels::heat_kernel_fn(&d, 0.3).unwrap().opaque();
        for &x in &[0.0, 0.4, -2.0] {
            let got = heat_transform(&d, &f, x, 0.5).unwrap();
            let want = HeatKernel::new(&d, 0.8).unwrap().eval(x);
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn heat_transform_of_zero() {
        let d = params(0.5);
        let z = RealFunction::new("zero", |_| 0.0);
        assert_eq!(heat_transform(&d, &z, 0.3, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn boundary_values_converge() {
        let d = params(0.5);
        let f = gaussian(&d).opaque();
        let mut prev = f64::INFINITY;
        for &t in &[0.1, 0.01, 0.001] {
            let e = (heat_transform(&d, &f, 0.3, t).unwrap() - (-0.09f64).exp()).abs();
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn heat_equation_holds() {
        for &k in &[0.0, 0.5] {
            let d = params(k);
            let xs = [-1.5, -0.3, 0.0, 0.8, 2.0];
            let ts = [0.05, 0.2, 0.5, 1.0, 3.0];
            for f in gaussian_suite(&d) {
                let u = HeatTemperature::new(&d, &f);
                let r = heat_residual(&u, &xs, &ts, 1e-12).unwrap();
                assert!(r < 1e-6, "k={k} {}: {r}", f.name);
            }
            let f = HeatTemperature::kernel(&d);
            assert!(heat_residual(&f, &xs, &ts, 1e-12).unwrap() < 1e-6);
        }
    }

    #[test]
    fn semigroup_formula() {
        let d = params(0.5);
        let xs = [-1.0, 0.0, 0.5, 2.0];
        let g = HeatTemperature::new(&d, &gaussian(&d));
        assert!(semigroup_check(&g, 0.25, 0.25, &xs).unwrap().max_residual < 1e-5);
        let f = HeatTemperature::kernel(&d);
        let r = semigroup_check(&f, 0.5, 0.5, &xs).unwrap();
        assert!(r.max_residual < 1e-6 && r.locally_integrable);
        let lin = StaticTemperature::new(&d, 0.0, 1.0);
        let r = semigroup_check(&lin, 0.5, 0.5, &xs).unwrap();
        assert!(r.max_residual < 1e-8, "{r:?}");
    }

    #[test]
    fn norms_decrease_in_time() {
        let d = params(0.5);
        let ts = [0.01, 0.1, 0.5, 1.0, 4.0];
        for f in [gaussian(&d), xgaussian(&d), hermite2_gaussian(&d)] {
            let u = HeatTemperature::new(&d, &f);
            for p in [1.0, 2.0, f64::INFINITY] {
                assert!(norm_monotonicity(&u, p, &ts, 1e-8).unwrap().non_increasing, "{} p={p}", f.name);
            }
        }
    }

    #[test]
    fn growth_classes() {
        let d = params(0.5);
        let probe = GrowthProbe::standard(1.0, 0.25);
        let g = growth_classify(&HeatTemperature::new(&d, &gaussian(&d)), &probe);
        assert_eq!(g.class, GrowthVerdict::TkAdmissible);
        assert!(g.constant.is_finite() && g.constant > 0.0);
        let c = growth_classify(&StaticTemperature::new(&d, 3.0, 0.0), &GrowthProbe::standard(0.0, 0.25));
        assert_eq!(c.class, GrowthVerdict::TkAdmissible);
        assert!((c.constant - 3.0 * (-0.25f64).exp()).abs() < 1e-12);
        let w = growth_classify(&blow_up_witness(&d, 2.0), &probe);
        assert_eq!(w.class, GrowthVerdict::Unknown);
    }

    #[test]
    fn blow_up_witness_solves_heat_equation_before_blow_up() {
        let d = params(0.5);
        let w = blow_up_witness(&d, 2.0);
        let r = heat_residual(&w, &[0.3, 1.0], &[0.5, 1.0], 1e-12).unwrap();
        assert!(r < 1e-6, "{r}");
        let h = 1e-4;
        let fd = (w.eval(0.7, 1.0 + h).unwrap() - w.eval(0.7, 1.0 - h).unwrap()) / (2.0 * h);
        assert!((fd - w.dt(1, 0.7, 1.0).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn poisson_of_constant() {
        let d = params(0.5);
        let one = RealFunction::new("one", |_| 1.0)
            .parity(Parity::Even)
            .decay(DecayClass::Polynomial { coef: 1.0, power: 0.0 }, f64::INFINITY);
        for &x in &[0.0, 1.0, -3.0] {
            let v = poisson_transform(&d, &one, x, 0.7).unwrap();
            assert!((v - 1.0).abs() < 1e-6, "{v}");
        }
    }
}
