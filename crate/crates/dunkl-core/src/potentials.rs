//! Bessel potentials `J_α` on functions and on temperatures.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::dunkl_ops::convolve;
use crate::error::{Error, Result};
use crate::function::{DecayClass, Parity, RealFunction};
use crate::kernels::{bessel_kernel_fn, poisson_kernel_dt_fn, MAX_INTERNAL_ORDER};
use crate::lipschitz::{weighted_time_norm, TGrid};
use crate::quadrature::{gauss_laguerre, gauss_legendre, mapped_jacobi};
use crate::specfun::{binomial, gamma, DunklParams};
use crate::transforms::{
    growth_classify, slice_norm, GrowthProbe, GrowthVerdict, HeatTemperature, Provenance, Temperature, TemperatureRef,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialCase {
    Zero,
    Positive,
    NegativeEven,
    NegativeGeneral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialOrder {
    pub alpha: f64,
    pub case: PotentialCase,
    /// `-α/2` for the even branch, `[β/2] + 1` for the general negative branch, else 0.
    pub m: usize,
}

impl PotentialOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("potential order must be finite, got {alpha}")));
        }
        let (case, m) = if alpha == 0.0 {
            (PotentialCase::Zero, 0)
        } else if alpha > 0.0 {
            (PotentialCase::Positive, 0)
        } else {
            let beta = -alpha;
            let half = 0.5 * beta;
            if half.fract() == 0.0 {
                (PotentialCase::NegativeEven, half as usize)
            } else {
                (PotentialCase::NegativeGeneral, half.floor() as usize + 1)
            }
        };
        Ok(Self { alpha, case, m })
    }
}

/// Nodes and weights for `Γ(a)^{-1} ∫_0^∞ τ^{a-1} e^{-τ} g(τ) dτ`, graded toward `τ = 0`
/// when `g` varies on the scale `width0 < 1` there.
pub(crate) fn tau_rule(a: f64, width0: f64) -> Result<Arc<Vec<(f64, f64)>>> {
    type Cache = Mutex<HashMap<(u64, u64), Arc<Vec<(f64, f64)>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (a.to_bits(), width0.clamp(1e-8, 1.0).to_bits());
    if let Some(r) = cache.lock().expect("tau rule cache").get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(build_tau_rule(a, width0)?);
    let mut c = cache.lock().expect("tau rule cache");
    if c.len() > 4096 {
        c.clear();
    }
    c.insert(key, rule.clone());
    Ok(rule)
}

fn build_tau_rule(a: f64, width0: f64) -> Result<Vec<(f64, f64)>> {
    let rg = 1.0 / gamma(a)?;
    let e = a - 1.0;
    let mut out = Vec::with_capacity(128);
    let w0 = width0.clamp(1e-8, 1.0);
    let first = w0;
    let jac = mapped_jacobi(16, 0.0, e, 0.0, first)?;
    for (t, w) in jac.nodes.iter().zip(&jac.weights) {
        out.push((*t, rg * w * (-t).exp()));
    }
    if first < 1.0 {
        let leg = gauss_legendre(10)?;
        let mut lo = first;
        while lo < 1.0 {
            let hi = (2.0 * lo).min(1.0);
            let h = 0.5 * (hi - lo);
            for (s, w) in leg.nodes.iter().zip(&leg.weights) {
                let t = lo + h * (1.0 + s);
                out.push((t, rg * h * w * t.powf(e) * (-t).exp()));
            }
            lo = hi;
        }
    }
    // [1, 4] by Legendre keeps the Laguerre tail away from the τ^{a-1} branch point.
    let leg = gauss_legendre(12)?;
    for (s, w) in leg.nodes.iter().zip(&leg.weights) {
        let t = 2.5 + 1.5 * s;
        out.push((t, rg * 1.5 * w * t.powf(e) * (-t).exp()));
    }
    let lag = gauss_laguerre(16, 0.0)?;
    let e4 = (-4.0f64).exp();
    for (u, w) in lag.nodes.iter().zip(&lag.weights) {
        let t = 4.0 + u;
        out.push((t, rg * w * e4 * t.powf(e)));
    }
    Ok(out)
}

#[derive(Clone)]
enum Branch {
    Identity,
    Positive { half: f64 },
    NegativeEven { coefs: Vec<f64> },
    Composite(Box<PotentialTemperature>),
}

/// `J_α U` for a temperature `U`.
#[derive(Clone)]
pub struct PotentialTemperature {
    pub order: PotentialOrder,
    inner: TemperatureRef,
    branch: Branch,
}

impl PotentialTemperature {
    /// Builds `J_α U` without the growth precondition.
    pub fn new_unchecked(inner: TemperatureRef, alpha: f64) -> Result<Self> {
        let order = PotentialOrder::new(alpha)?;
        let branch = match order.case {
            PotentialCase::Zero => Branch::Identity,
            PotentialCase::Positive => Branch::Positive { half: 0.5 * alpha },
            PotentialCase::NegativeEven => Branch::NegativeEven { coefs: even_coefficients(order.m)? },
            PotentialCase::NegativeGeneral => {
                let m = order.m;
                let even = PotentialTemperature::new_unchecked(inner.clone(), -2.0 * m as f64)?;
                let outer = PotentialTemperature::new_unchecked(Arc::new(even), 2.0 * m as f64 + alpha)?;
                Branch::Composite(Box::new(outer))
            }
        };
        Ok(Self { order, inner, branch })
    }

    pub fn inner(&self) -> &TemperatureRef {
        &self.inner
    }

    fn rule(&self, half: f64, t: f64) -> Result<Arc<Vec<(f64, f64)>>> {
        tau_rule(half, t + self.inner.t_offset())
    }

    fn apply(&self, m: usize, x: f64, t: f64, dk: bool) -> Result<f64> {
        let at = |n: usize, s: f64| if dk { self.inner.dk_dt(n, x, s) } else { self.inner.dt(n, x, s) };
        match &self.branch {
            Branch::Identity => at(m, t),
            Branch::Positive { half } => {
                let mut acc = 0.0;
                for &(tau, w) in self.rule(*half, t)?.iter() {
                    acc += w * at(m, t + tau)?;
                }
                Ok(acc)
            }
            Branch::NegativeEven { coefs } => {
                if m + coefs.len() - 1 > MAX_INTERNAL_ORDER {
                    return Err(Error::OrderTooLarge { order: m + coefs.len() - 1, max: MAX_INTERNAL_ORDER });
                }
                let mut acc = 0.0;
                for (i, c) in coefs.iter().enumerate() {
                    acc += c * at(m + i, t)?;
                }
                Ok(acc)
            }
            Branch::Composite(outer) => {
                if dk {
                    outer.dk_dt(m, x, t)
                } else {
                    outer.dt(m, x, t)
                }
            }
        }
    }
}

/// Coefficients of `Σ (-1)^i C(m, i) ∂_s^i`, the expansion of `(-1)^m e^s ∂_s^m e^{-s}`.
fn even_coefficients(m: usize) -> Result<Vec<f64>> {
    if m > MAX_INTERNAL_ORDER {
        return Err(Error::OrderTooLarge { order: m, max: MAX_INTERNAL_ORDER });
    }
    Ok((0..=m)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * binomial(m as u32, i as u32)
        })
        .collect())
}

impl Temperature for PotentialTemperature {
    fn params(&self) -> &DunklParams {
        self.inner.params()
    }

    fn provenance(&self) -> Provenance {
        Provenance::PotentialOf {
            alpha: self.order.alpha,
            inner: Box::new(self.inner.provenance()),
        }
    }

    fn dt(&self, m: usize, x: f64, t: f64) -> Result<f64> {
        self.apply(m, x, t, false)
    }

    fn dk_dt(&self, m: usize, x: f64, t: f64) -> Result<f64> {
        self.apply(m, x, t, true)
    }

    fn t_offset(&self) -> f64 {
        self.inner.t_offset()
    }

    fn radius(&self, t: f64) -> f64 {
        match &self.branch {
            Branch::Positive { .. } => self.inner.radius(t) + 45.0,
            Branch::Composite(outer) => outer.radius(t),
            _ => self.inner.radius(t),
        }
    }

    fn scale(&self, t: f64) -> f64 {
        self.inner.scale(t)
    }
}

/// Compact probe used for the growth precondition.
pub fn admissibility_probe() -> GrowthProbe {
    GrowthProbe {
        xs: vec![-2.0, 0.0, 1.5],
        ts: vec![0.25, 1.0, 4.0, 16.0],
        b: 1.0,
        c: 0.25,
        max_n: 2,
        max_m: 2,
    }
}

/// `J_α U`, after checking `U` against the growth class on a probe set.
pub fn potential_on_temperature(u: TemperatureRef, order: PotentialOrder) -> Result<TemperatureRef> {
    if order.case == PotentialCase::Zero {
        return Ok(u);
    }
    let g = growth_classify(u.as_ref(), &admissibility_probe());
    if g.class != GrowthVerdict::TkAdmissible {
        return Err(Error::InvalidParameter(format!(
            "`{}` failed the growth check at {:?}",
            u.provenance(),
            g.failure
        )));
    }
    Ok(Arc::new(PotentialTemperature::new_unchecked(u, order.alpha)?))
}

/// `J_α f` as a function, through the potential of its heat extension at `t = 0`.
/// Negative orders need an input whose heat extension is analytic at `t = 0`.
pub fn bessel_potential(params: &DunklParams, alpha: f64, f: &RealFunction) -> Result<RealFunction> {
    let heat: TemperatureRef = Arc::new(HeatTemperature::new(params, f));
    if alpha < 0.0 && !(heat.t_offset() > 0.0) {
        return Err(Error::Unsupported(format!(
            "negative potentials of `{}` need a closed-form heat extension",
            f.name
        )));
    }
    let u = Arc::new(PotentialTemperature::new_unchecked(heat, alpha)?);
    let k = params.k;
    let (ue, ud) = (u.clone(), u.clone());
    let parity = f.parity;
    let mut out = RealFunction::new(format!("J_{alpha}({})", f.name), move |x| ue.eval(x, 0.0).unwrap_or(f64::NAN))
        .parity(parity)
        .decay(
            if alpha > 0.0 { DecayClass::Exponential } else { f.decay },
            u.radius(0.0),
        )
        .feature_width(f.feature_width)
        .with_derivative(move |x| {
            // f' = D_k f - k (f(x) - f(-x)) / x
            let dk = ud.dk_dt(0, x, 0.0).unwrap_or(f64::NAN);
            if x == 0.0 {
                return dk / (1.0 + 2.0 * k);
            }
            let jump = match parity {
                Parity::Even => 0.0,
                Parity::Odd => 2.0 * ud.eval(x, 0.0).unwrap_or(f64::NAN),
                Parity::None => ud.eval(x, 0.0).unwrap_or(f64::NAN) - ud.eval(-x, 0.0).unwrap_or(f64::NAN),
            };
            dk - k * jump / x
        })
        .with_heat_extension(u);
    if let Some(h) = f.transform_hint().cloned() {
        out = out.with_transform(move |y| (1.0 + y * y).powf(-0.5 * alpha) * h(y));
    }
    Ok(out)
}

/// `J_α f(x) = Γ(α/2)^{-1} ∫_0^∞ τ^{α/2-1} e^{-τ} G_τ f(x) dτ`, `α > 0`.
pub fn bessel_potential_fn(params: &DunklParams, alpha: f64, f: &RealFunction, x: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "the heat-integral route needs α > 0, got {alpha}; use the temperature route"
        )));
    }
    Ok(bessel_potential(params, alpha, f)?.eval(x))
}

/// `(B_α ∗ f)(x)` by direct convolution.
pub fn bessel_potential_direct(params: &DunklParams, alpha: f64, f: &RealFunction, x: f64) -> Result<f64> {
    let b = bessel_kernel_fn(params, alpha)?;
    convolve(params, f, &b, x)
}

/// Regularization times for the Poisson limit.
pub const RICHARDSON_TIMES: [f64; 3] = [0.1, 0.05, 0.025];

#[derive(Debug, Clone, Serialize)]
pub struct RichardsonReport {
    pub ts: [f64; 3],
    pub values: [f64; 3],
    pub extrapolated: f64,
}

/// `J_{-β} f = lim_{t→0} P_t(B_{-β}) ∗ f`, with
/// `P_t(B_{-β}) ∗ f = Σ_i C(m, i) ∂_t^{2i} P_t ∗ J_{2m-β} f`, `m = [β/2] + 1`.
#[derive(Debug, Clone)]
pub struct NegativeBesselPotential {
    params: DunklParams,
    pub beta: f64,
    h: RealFunction,
    kernels: Vec<Vec<(f64, RealFunction)>>,
}

impl NegativeBesselPotential {
    pub fn new(params: &DunklParams, beta: f64, f: &RealFunction) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Domain { what: "negative potential order", arg: beta });
        }
        let m = (0.5 * beta).floor() as usize + 1;
        if 2 * m > MAX_INTERNAL_ORDER {
            return Err(Error::OrderTooLarge { order: 2 * m, max: MAX_INTERNAL_ORDER });
        }
        let h = bessel_potential(params, 2.0 * m as f64 - beta, f)?;
        let kernels = RICHARDSON_TIMES
            .iter()
            .map(|&t| {
                (0..=m)
                    .map(|i| Ok((binomial(m as u32, i as u32), poisson_kernel_dt_fn(params, t, 2 * i)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { params: *params, beta, h, kernels })
    }

    /// `P_t(B_{-β}) ∗ f(x)` for `t = RICHARDSON_TIMES[level]`.
    pub fn regularized(&self, level: usize, x: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (c, p) in &self.kernels[level] {
            acc += c * convolve(&self.params, p, &self.h, x)?;
        }
        Ok(acc)
    }

    /// Two Richardson levels with ratio 2.
    pub fn eval(&self, x: f64) -> Result<RichardsonReport> {
        let v = [self.regularized(0, x)?, self.regularized(1, x)?, self.regularized(2, x)?];
        let r1 = [2.0 * v[1] - v[0], 2.0 * v[2] - v[1]];
        let extrapolated = (4.0 * r1[1] - r1[0]) / 3.0;
        let d1 = (v[1] - v[0]).abs();
        let d2 = (v[2] - v[1]).abs();
        if !extrapolated.is_finite() || (d2 > d1 && d2 > 1e-12 * v[2].abs().max(1.0)) {
            return Err(Error::NonConvergence {
                what: "Poisson limit of the negative potential",
                terms: 3,
                partial: extrapolated,
                last: d2,
            });
        }
        Ok(RichardsonReport { ts: RICHARDSON_TIMES, values: v, extrapolated })
    }
}

/// `J_{-β} f(x)` by the extrapolated Poisson limit.
pub fn bessel_potential_fn_negative(params: &DunklParams, beta: f64, f: &RealFunction, x: f64) -> Result<f64> {
    Ok(NegativeBesselPotential::new(params, beta, f)?.eval(x)?.extrapolated)
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub id: String,
    pub reference: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub measured_constant: Option<f64>,
    pub holds: bool,
}

fn check(id: String, reference: &'static str, lhs: f64, rhs: f64, constant: Option<f64>, holds: bool) -> InequalityCheck {
    InequalityCheck { id, reference, lhs, rhs, measured_constant: constant, holds }
}

/// Both sides of the potential inequalities for `G(f)` at sampled `(t, p, α)`.
pub fn potential_inequality_suite(params: &DunklParams, f: &RealFunction) -> Result<Vec<InequalityCheck>> {
    let u: TemperatureRef = Arc::new(HeatTemperature::new(params, f));
    let name = &f.name;
    let mut out = Vec::new();
    let norm0 = |p: f64| slice_norm(u.as_ref(), 0, 0.0, p);
    for p in [1.0, 2.0] {
        let fp = norm0(p)?;
        let j = PotentialTemperature::new_unchecked(u.clone(), 1.0)?;
        let lhs = slice_norm(&j, 0, 0.5, p)?;
        let rhs = fp / params.c_k;
        out.push(check(format!("heat_potential_bound/{name}/p={p}"), "J_a G_t f bounded by c_k^-1 |f|", lhs, rhs, None, lhs <= rhs));
        for alpha in [1.0, 2.0] {
            let jn = PotentialTemperature::new_unchecked(u.clone(), -alpha)?;
            let mut worst: f64 = 0.0;
            for t in [0.1, 1.0] {
                let l = slice_norm(&jn, 0, t, p)?;
                worst = worst.max(l / ((t.powf(-0.5 * alpha) + 1.0) * fp));
            }
            out.push(check(
                format!("negative_heat_potential_bound/{name}/p={p}/alpha={alpha}"),
                "J_-a G_t f bounded by B (t^-a/2 + 1) |f|",
                worst,
                f64::INFINITY,
                Some(worst),
                worst.is_finite(),
            ));
        }
    }
    for alpha in [1.0, 2.0] {
        let jn = PotentialTemperature::new_unchecked(u.clone(), -alpha)?;
        let ts: [f64; 3] = [1e-1, 1e-2, 1e-3];
        let vals = ts
            .iter()
            .map(|&t| Ok(t.powf(0.5 * alpha) * slice_norm(&jn, 0, t, 2.0)?))
            .collect::<Result<Vec<f64>>>()?;
        let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
        out.push(check(
            format!("negative_heat_potential_little_o/{name}/alpha={alpha}"),
            "t^a/2 |J_-a G_t f| decreasing to 0",
            vals[2],
            vals[0],
            None,
            decreasing,
        ));
    }
    let (s, t) = (0.25, 0.25);
    for p in [1.0, 2.0] {
        let us = slice_norm(u.as_ref(), 0, s, p)?;
        let j = PotentialTemperature::new_unchecked(u.clone(), 1.0)?;
        let lhs = slice_norm(&j, 0, s + t, p)?;
        out.push(check(format!("semigroup_potential_bound/{name}/p={p}"), "J_a U(s+t) bounded by U(s)", lhs, us, None, lhs <= us * (1.0 + 1e-9)));
        let jn = PotentialTemperature::new_unchecked(u.clone(), -1.0)?;
        let l = slice_norm(&jn, 0, s + t, p)?;
        let b = l / ((t.powf(-0.5) + 1.0) * us);
        out.push(check(format!("semigroup_negative_potential_bound/{name}/p={p}"), "J_-a U(s+t) bounded by B (t^-a/2+1) U(s)", b, f64::INFINITY, Some(b), b.is_finite()));
    }
    // Weighted time norms: β = 1, q = 2.
    let tgrid = TGrid::log(1e-6, 60.0, 32)?;
    let beta = 1.0;
    let q = 2.0;
    let c = weighted_time_norm(u.as_ref(), 2.0, q, 0.5 * q * beta, &tgrid)?.value;
    let mut b: f64 = 0.0;
    let mut little = Vec::new();
    for t in [1e-3, 1e-2, 1e-1, 1.0, 10.0] {
        let n = slice_norm(u.as_ref(), 0, t, 2.0)?;
        b = b.max(n / ((1.0 + t.powf(-0.5 * beta)) * c));
        if t <= 1e-1 {
            little.push(t.powf(0.5 * beta) * n);
        }
    }
    out.push(check(format!("weighted_norm_pointwise_bound/{name}"), "|U(t)| bounded by B (1 + t^-b/2) C", b, f64::INFINITY, Some(b), c.is_finite() && b.is_finite()));
    out.push(check(
        format!("weighted_norm_little_o/{name}"),
        "t^b/2 |U(t)| decreasing to 0",
        little[2],
        little[0],
        None,
        little[0] > little[1] && little[1] > little[2],
    ));
    let r = 4.0;
    let cr = weighted_time_norm(u.as_ref(), 2.0, r, 0.5 * r * beta, &tgrid)?.value;
    out.push(check(format!("weighted_norm_exponent_increase/{name}"), "C_r bounded by B C_q for r > q", cr, c, Some(cr / c), cr.is_finite()));
    let alpha = 0.5;
    let j = PotentialTemperature::new_unchecked(u.clone(), alpha)?;
    let lhs = weighted_time_norm(&j, 2.0, q, 0.5 * q * (beta - alpha), &tgrid)?.value;
    out.push(check(format!("weighted_norm_potential/{name}"), "weighted norm of J_a U bounded by B C", lhs, c, Some(lhs / c), lhs.is_finite()));
    Ok(out)
}

/// Reference spectrum `(1+ξ²)^{-α/2} F_k f(ξ)`.
pub fn potential_spectrum(alpha: f64, f: &RealFunction) -> Option<impl Fn(f64) -> Complex64> {
    let h = f.transform_hint()?.clone();
    Some(move |y: f64| (1.0 + y * y).powf(-0.5 * alpha) * h(y))
}
