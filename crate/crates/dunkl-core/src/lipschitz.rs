//! Lipschitz-type norms: the `dt/t` functionals `A` and `A*`, modulus and heat
//! routes for `Λ_{α,p,q}`, the temperature functionals `E` and `L`, and the
//! equivalence and embedding reports built on them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::dunkl_ops::{dunkl_derivative_fn, Translator};
use crate::error::{Error, Result};
use crate::function::{gaussian_suite, Parity, RealFunction};
use crate::kernels::bessel_kernel_fn;
use crate::measure::{lp_norm_samples, GridBuilder, GridProfile, Neumaier, WeightedGrid};
use crate::potentials::{tau_rule, PotentialTemperature};
use crate::specfun::{gamma, DunklParams};
use crate::transforms::{slice_norm, HeatTemperature, Temperature, TemperatureRef};

/// Smallest non-negative integer strictly larger than `a`.
pub fn overline(a: f64) -> usize {
    if a < 0.0 {
        0
    } else {
        a.floor() as usize + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzParams {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    /// `overline(α/2)`, the heat-route derivative order.
    pub n_bar: usize,
    /// `overline(α)`, the Poisson-route derivative order.
    pub alpha_bar: usize,
}

impl LipschitzParams {
    pub fn new(alpha: f64, p: f64, q: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("α must be finite, got {alpha}")));
        }
        for (name, v) in [("p", p), ("q", q)] {
            if !(v >= 1.0) {
                return Err(Error::InvalidParameter(format!("{name} must be in [1, ∞], got {v}")));
            }
        }
        Ok(Self {
            alpha,
            p,
            q,
            n_bar: overline(0.5 * alpha),
            alpha_bar: overline(alpha),
        })
    }
}

/// Minimum density of a log grid.
pub const MIN_PER_DECADE: usize = 32;
pub const MIN_SUP_PER_DECADE: usize = 2;

/// Log-spaced nodes on `[t_min, t_max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub per_decade: usize,
    nodes: Vec<f64>,
}

impl TGrid {
    pub fn log(t_min: f64, t_max: f64, per_decade: usize) -> Result<Self> {
        Self::build(t_min, t_max, per_decade, MIN_PER_DECADE)
    }

    /// Sparse nodes for `q = ∞` sups, which need no quadrature density.
    pub fn sup_grid(t_min: f64, t_max: f64, per_decade: usize) -> Result<Self> {
        Self::build(t_min, t_max, per_decade, MIN_SUP_PER_DECADE)
    }

    fn build(t_min: f64, t_max: f64, per_decade: usize, min_per: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t-grid needs 0 < t_min < t_max < ∞, got [{t_min}, {t_max}]"
            )));
        }
        if per_decade < min_per {
            return Err(Error::InvalidParameter(format!(
                "t-grid needs at least {min_per} nodes per decade, got {per_decade}"
            )));
        }
        let decades = (t_max / t_min).log10();
        let n = ((decades * per_decade as f64).ceil() as usize).max(2);
        let (l0, l1) = (t_min.ln(), t_max.ln());
        let nodes = (0..=n)
            .map(|i| match i {
                0 => t_min,
                i if i == n => t_max,
                i => (l0 + (l1 - l0) * i as f64 / n as f64).exp(),
            })
            .collect();
        Ok(Self { t_min, t_max, per_decade, nodes })
    }

    /// `[1e-4, 1e2]` at 64 nodes per decade.
    pub fn standard() -> Self {
        Self::log(1e-4, 1e2, 64).expect("valid standard grid")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// The same density restricted to `(t_min, 1]`.
    pub fn star(&self) -> Result<Self> {
        Self::log(self.t_min.min(0.5), 1.0, self.per_decade)
    }

    /// Twice the density on the same range.
    pub fn refined(&self) -> Result<Self> {
        Self::log(self.t_min, self.t_max, 2 * self.per_decade)
    }
}

impl FromStr for TGrid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidParameter(format!(
                "t-grid spec must be tmin:tmax:per_decade, got `{s}`"
            )));
        }
        let bad = |what: &str, v: &str| Error::InvalidParameter(format!("bad {what} `{v}`"));
        let t_min: f64 = parts[0].parse().map_err(|_| bad("t_min", parts[0]))?;
        let t_max: f64 = parts[1].parse().map_err(|_| bad("t_max", parts[1]))?;
        let per: usize = parts[2].parse().map_err(|_| bad("nodes per decade", parts[2]))?;
        Self::log(t_min, t_max, per)
    }
}

impl fmt::Display for TGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.t_min, self.t_max, self.per_decade)
    }
}

/// `∫ g(t) dt/t` from samples on a log grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogIntegral {
    pub value: f64,
    pub body: f64,
    /// Power-law extrapolation below the first node.
    pub lower_tail: f64,
    /// Power-law extrapolation above the last node.
    pub upper_tail: f64,
    pub diverged: bool,
}

/// Exponent `a` of `g ≈ c t^a` between nodes `i` and `j`.
fn power_fit(ts: &[f64], g: &[f64], i: usize, j: usize) -> Option<f64> {
    if g[i] > 0.0 && g[j] > 0.0 {
        Some((g[j] / g[i]).ln() / (ts[j] / ts[i]).ln())
    } else {
        None
    }
}

fn log_integral(ts: &[f64], g: &[f64], upper: bool) -> LogIntegral {
    let n = ts.len();
    assert!(n >= 2 && g.len() == n, "log integral needs matching samples");
    let mut acc = Neumaier::default();
    for i in 0..n - 1 {
        acc.add(0.5 * (g[i] + g[i + 1]) * (ts[i + 1] / ts[i]).ln());
    }
    let body = acc.sum();
    let gmax = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let span = 4.min(n - 1);
    let negligible = |v: f64| v.abs() <= 1e-14 * gmax;
    let mut diverged = !body.is_finite();
    let lower_tail = match power_fit(ts, g, 0, span) {
        _ if negligible(g[0]) => 0.0,
        Some(a) if a > 1e-6 => g[0] / a,
        _ => {
            diverged = true;
            f64::INFINITY
        }
    };
    let upper_tail = if !upper {
        0.0
    } else {
        match power_fit(ts, g, n - 1 - span, n - 1) {
            _ if negligible(g[n - 1]) => 0.0,
            Some(a) if a < -1e-6 => -g[n - 1] / a,
            _ => {
                diverged = true;
                f64::INFINITY
            }
        }
    };
    let value = if diverged { f64::INFINITY } else { body + lower_tail + upper_tail };
    LogIntegral { value, body, lower_tail, upper_tail, diverged }
}

/// `∫_0^∞ g(t) dt/t` by the trapezoid rule in `ln t` with power-law tails.
pub fn log_t_integral(ts: &[f64], g: &[f64]) -> LogIntegral {
    log_integral(ts, g, true)
}

/// `∫_0^{t_n} g(t) dt/t`, extrapolating only below the grid.
pub fn log_t_integral_to_end(ts: &[f64], g: &[f64]) -> LogIntegral {
    log_integral(ts, g, false)
}

/// Value of an `A`-type functional with its quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalValue {
    pub value: f64,
    pub diverged: bool,
    pub nodes: usize,
    /// Share of the `q`-th power carried by the extrapolated tails.
    pub tail_fraction: f64,
}

/// `A_{p,q}(V)` (or `A*_{p,q}(V)` when `star`) from `t ↦ ‖V(·, t)‖_{k,p}`.
pub fn a_functional(
    q: f64,
    tgrid: &TGrid,
    star: bool,
    norm_at: impl Fn(f64) -> Result<f64> + Sync,
) -> Result<FunctionalValue> {
    let grid = if star { tgrid.star()? } else { tgrid.clone() };
    let ts = grid.nodes();
    let norms = ts.par_iter().map(|&t| norm_at(t)).collect::<Result<Vec<_>>>()?;
    timed_functional(ts, &norms, q, !star)
}

/// Whether the sup keeps growing past the lower (or upper) end of the grid.
///
/// A power law keeps its log-slope from one decade to the next; a sup that
/// settles to a constant has a slope that fades towards the end.
fn sup_grows(ts: &[f64], g: &[f64], lower: bool) -> bool {
    let n = ts.len();
    let span = 4.min(n - 1);
    let slope = |i: usize, j: usize| power_fit(ts, g, i, j).map(|a| if lower { -a } else { a });
    let (end, inner) = if lower {
        let d = ts.iter().position(|&t| t >= 10.0 * ts[0]);
        (slope(0, span), d.filter(|&d| d + span < n).and_then(|d| slope(d, d + span)))
    } else {
        let d = ts.iter().rposition(|&t| t <= 0.1 * ts[n - 1]);
        (slope(n - 1 - span, n - 1), d.filter(|&d| d >= span).and_then(|d| slope(d - span, d)))
    };
    match (end, inner) {
        (Some(a), Some(b)) if a > 1e-6 => b <= 0.0 || a >= SLOPE_PERSISTENCE * b,
        (Some(a), None) => a > 1e-6,
        _ => false,
    }
}

/// Decade-to-decade slope ratio above which a sup counts as divergent.
const SLOPE_PERSISTENCE: f64 = 0.7;

fn timed_functional(ts: &[f64], norms: &[f64], q: f64, upper: bool) -> Result<FunctionalValue> {
    if let Some(i) = norms.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(ts[i]));
    }
    let n = ts.len();
    if q.is_infinite() {
        let (imax, &m) = norms
            .iter()
            .enumerate()
            .fold((0, &0.0), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
        let at_lower = imax == 0 && sup_grows(ts, norms, true);
        let at_upper = upper && imax == n - 1 && sup_grows(ts, norms, false);
        let diverged = at_lower || at_upper;
        return Ok(FunctionalValue {
            value: if diverged { f64::INFINITY } else { m },
            diverged,
            nodes: n,
            tail_fraction: 0.0,
        });
    }
    let g: Vec<f64> = norms.iter().map(|v| v.powf(q)).collect();
    let li = log_integral(ts, &g, upper);
    let tail_fraction = if li.value > 0.0 && li.value.is_finite() {
        (li.lower_tail + li.upper_tail) / li.value
    } else {
        0.0
    };
    Ok(FunctionalValue {
        value: li.value.powf(1.0 / q),
        diverged: li.diverged,
        nodes: n,
        tail_fraction,
    })
}

/// Element of a Lipschitz space given constructively as `J_order g`.
#[derive(Debug, Clone)]
pub struct HeatInput {
    pub g: RealFunction,
    pub order: f64,
}

impl HeatInput {
    pub fn function(f: RealFunction) -> Self {
        Self { g: f, order: 0.0 }
    }

    pub fn potential(g: RealFunction, order: f64) -> Self {
        Self { g, order }
    }

    pub fn name(&self) -> String {
        if self.order == 0.0 {
            self.g.name.clone()
        } else {
            format!("J_{}({})", self.order, self.g.name)
        }
    }

    /// `a · (J_order g)`.
    pub fn scaled(&self, a: f64) -> Self {
        Self { g: self.g.scaled(a), order: self.order }
    }

    /// `(x, t) ↦ G_t(J_order g)(x)`.
    pub fn temperature(&self, params: &DunklParams) -> Result<TemperatureRef> {
        let u: TemperatureRef = Arc::new(HeatTemperature::new(params, &self.g));
        potential_of(u, self.order)
    }

    /// `‖J_{-γ}(J_order g)‖_{k,p}`.
    pub fn lifted_norm(&self, params: &DunklParams, gamma: f64, p: f64) -> Result<f64> {
        let u: TemperatureRef = Arc::new(HeatTemperature::new(params, &self.g));
        let v = potential_of(u, self.order - gamma)?;
        slice_norm(v.as_ref(), 0, 0.0, p)
    }
}

fn potential_of(u: TemperatureRef, order: f64) -> Result<TemperatureRef> {
    if order.abs() < 1e-14 {
        Ok(u)
    } else {
        Ok(Arc::new(PotentialTemperature::new_unchecked(u, order)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormValue {
    pub value: f64,
    /// `‖f‖_{k,p}` (or `‖T‖_{k,p,α-1/2}` for `α ≤ 0`).
    pub base: f64,
    pub functional: FunctionalValue,
    pub n: usize,
}

/// `‖f‖_{k,p} + A_{p,q}(t^{n-α/2} ∂_t^n G_t f)` for `α > 0`, and
/// `‖T‖_{k,p,α-1/2} + A*_{p,q}(t^{n-α/2} ∂_t^n G_t T)` for `α ≤ 0`.
pub fn lipschitz_norm_heat(
    params: &DunklParams,
    lp: &LipschitzParams,
    input: &HeatInput,
    tgrid: &TGrid,
    n_override: Option<usize>,
) -> Result<NormValue> {
    let alpha = lp.alpha;
    if alpha <= 0.0 && input.order == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "α = {alpha} ≤ 0 needs the input as a potential J_(α-1/2) g, got the plain function `{}`",
            input.g.name
        )));
    }
    let n = n_override.unwrap_or(lp.n_bar);
    if (n as f64) <= 0.5 * alpha {
        return Err(Error::InvalidParameter(format!("derivative order {n} must exceed α/2 = {}", 0.5 * alpha)));
    }
    let u = input.temperature(params)?;
    let base = if alpha > 0.0 {
        slice_norm(u.as_ref(), 0, 0.0, lp.p)?
    } else {
        input.lifted_norm(params, alpha - 0.5, lp.p)?
    };
    let w = n as f64 - 0.5 * alpha;
    let functional = a_functional(lp.q, tgrid, alpha <= 0.0, |t| {
        Ok(t.powf(w) * slice_norm(u.as_ref(), n, t, lp.p)?)
    })?;
    Ok(NormValue { value: base + functional.value, base, functional, n })
}

/// Grid in `x` for `T_y f - f`.
fn difference_grid(k: f64, f: &RealFunction, y: f64) -> Result<WeightedGrid> {
    let r = f.radius + y.abs();
    if f.is_singular() {
        GridBuilder::new(k, r, GridProfile::SingularOrigin)
            .uniform_to(r)
            .panel_width(0.25)
            .refine_at(y, 1e-10 * y.abs())
            .build()
    } else {
        GridBuilder::new(k, r, GridProfile::Smooth)
            .panel_width((0.25 * f.feature_width).clamp(0.05, 0.25))
            .uniform_to(r)
            .build()
    }
}

/// `‖T_y f - f‖_{k,p}`.
pub fn difference_norm(params: &DunklParams, f: &RealFunction, y: f64, p: f64) -> Result<f64> {
    let tr = Translator::new(params)?;
    let grid = difference_grid(params.k, f, y)?;
    let vals: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|&x| tr.translate(y, f, x) - f.eval(x))
        .collect();
    Ok(lp_norm_samples(&grid, &vals, p)?.value)
}

/// Log grid in `|y|` for the modulus route.
pub fn standard_y_grid() -> TGrid {
    TGrid::log(1e-3, 30.0, 32).expect("valid y grid")
}

/// Sparse `|y|` nodes for the `q = ∞` kernel-membership sup.
pub fn membership_y_grid() -> TGrid {
    TGrid::sup_grid(1e-3, 10.0, 4).expect("valid sup grid")
}

/// `‖f‖_{k,p} + {∫ ‖T_y f - f‖^q / |y|^{1+αq} dy}^{1/q}`, or the sup form for `q = ∞`.
pub fn lipschitz_norm_modulus(
    params: &DunklParams,
    lp: &LipschitzParams,
    f: &RealFunction,
    ygrid: &TGrid,
) -> Result<NormValue> {
    if !(lp.alpha > 0.0 && lp.alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("the modulus route needs 0 < α < 1, got {}", lp.alpha)));
    }
    let base = difference_free_norm(params, f, lp.p)?;
    let ys = ygrid.nodes();
    // Both parities give ‖Δ_{-y} f‖ = ‖Δ_y f‖.
    let symmetric = f.parity != Parity::None;
    let per_y = |y: f64| -> Result<(f64, f64)> {
        let plus = difference_norm(params, f, y, lp.p)?;
        let minus = if symmetric { plus } else { difference_norm(params, f, -y, lp.p)? };
        Ok((plus, minus))
    };
    let pairs = ys.iter().map(|&y| per_y(y)).collect::<Result<Vec<_>>>()?;
    let alpha = lp.alpha;
    let functional = if lp.q.is_infinite() {
        let norms: Vec<f64> = ys
            .iter()
            .zip(&pairs)
            .map(|(&y, &(a, b))| a.max(b) / y.powf(alpha))
            .collect();
        timed_functional(ys, &norms, f64::INFINITY, true)?
    } else {
        let q = lp.q;
        // ∫_R h(y) |y|^{-1-αq} dy = ∫_0^∞ (h(y) + h(-y)) y^{-αq} dy/y.
        let norms: Vec<f64> = ys
            .iter()
            .zip(&pairs)
            .map(|(&y, &(a, b))| ((a.powf(q) + b.powf(q)) * y.powf(-alpha * q)).powf(1.0 / q))
            .collect();
        timed_functional(ys, &norms, q, true)?
    };
    Ok(NormValue { value: base + functional.value, base, functional, n: 0 })
}

fn difference_free_norm(params: &DunklParams, f: &RealFunction, p: f64) -> Result<f64> {
    let grid = difference_grid(params.k, f, 0.0)?;
    let vals = grid.sample(|x| f.eval(x));
    Ok(lp_norm_samples(&grid, &vals, p)?.value)
}

/// Default t-grid for the temperature functionals; `e^{-t}` makes `t > 60` negligible.
pub fn temperature_t_grid() -> TGrid {
    TGrid::log(1e-4, 60.0, 32).expect("valid E grid")
}

/// `{∫_0^∞ t^{a-1} e^{-t} ‖U(·, t)‖_{k,p}^q dt}^{1/q}`, or `sup t^a e^{-t} ‖U(·, t)‖` for `q = ∞`.
///
/// For finite `q`, slice norms that settle to a constant as `t → 0` are integrated
/// with the Gauss rule for `t^{a-1} e^{-t}`; anything else goes to the log grid.
pub fn weighted_time_norm(u: &dyn Temperature, p: f64, q: f64, a: f64, tgrid: &TGrid) -> Result<FunctionalValue> {
    if q.is_finite() && a > 0.0 {
        let probe = [1e-4, 1e-3, 1e-2];
        let n0 = probe
            .par_iter()
            .map(|&t| slice_norm(u, 0, t, p))
            .collect::<Result<Vec<_>>>()?;
        if let Some(i) = n0.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(probe[i]));
        }
        let regular = n0.iter().all(|&v| v > 0.0)
            && power_fit(&probe, &n0, 0, 1).is_some_and(|c| c.abs() < REGULAR_EXPONENT)
            && power_fit(&probe, &n0, 1, 2).is_some_and(|c| c.abs() < REGULAR_EXPONENT);
        if regular {
            return gauss_time_norm(u, p, q, a);
        }
    }
    let ts = tgrid.nodes();
    let norms = ts
        .par_iter()
        .map(|&t| slice_norm(u, 0, t, p))
        .collect::<Result<Vec<_>>>()?;
    if q.is_infinite() {
        let w: Vec<f64> = ts.iter().zip(&norms).map(|(&t, &n)| t.powf(a) * (-t).exp() * n).collect();
        return timed_functional(ts, &w, q, true);
    }
    // t^{a-1} e^{-t} n^q dt = (t^{a/q} e^{-t/q} n)^q dt/t
    let w: Vec<f64> = ts
        .iter()
        .zip(&norms)
        .map(|(&t, &n)| t.powf(a / q) * (-t / q).exp() * n)
        .collect();
    timed_functional(ts, &w, q, true)
}

/// Largest `|d ln‖U‖ / d ln t|` near `t = 0` still treated as a constant limit.
const REGULAR_EXPONENT: f64 = 0.05;

fn gauss_time_norm(u: &dyn Temperature, p: f64, q: f64, a: f64) -> Result<FunctionalValue> {
    let rule = tau_rule(a, 1.0)?;
    let norms = rule
        .par_iter()
        .map(|&(t, _)| slice_norm(u, 0, t, p))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = Neumaier::default();
    for (&(t, w), n) in rule.iter().zip(&norms) {
        if !n.is_finite() {
            return Err(Error::NonFinite(t));
        }
        acc.add(w * n.powf(q));
    }
    Ok(FunctionalValue {
        value: (gamma(a)? * acc.sum()).powf(1.0 / q),
        diverged: false,
        nodes: rule.len(),
        tail_fraction: 0.0,
    })
}

/// `E^{α}_{p,q}(U) = {∫_0^∞ t^{q-1} e^{-t} ‖J_{-α-2} U(·, t)‖^q dt}^{1/q}`.
pub fn e_functional(u: TemperatureRef, alpha: f64, p: f64, q: f64, tgrid: &TGrid) -> Result<FunctionalValue> {
    let v = potential_of(u, -alpha - 2.0)?;
    weighted_time_norm(v.as_ref(), p, q, if q.is_infinite() { 1.0 } else { q }, tgrid)
}

/// `E^{α,β}_{p,q}(U)` with weight `t^{q(β-α)/2 - 1} e^{-t}` on `‖J_{-β} U‖^q`, `β > α`.
pub fn e_functional_beta(
    u: TemperatureRef,
    alpha: f64,
    beta: f64,
    p: f64,
    q: f64,
    tgrid: &TGrid,
) -> Result<FunctionalValue> {
    if !(beta > alpha) {
        return Err(Error::InvalidParameter(format!("β = {beta} must exceed α = {alpha}")));
    }
    let v = potential_of(u, -beta)?;
    let a = if q.is_infinite() { 0.5 * (beta - alpha) } else { 0.5 * q * (beta - alpha) };
    weighted_time_norm(v.as_ref(), p, q, a, tgrid)
}

#[derive(Debug, Clone, Serialize)]
pub struct SupTail {
    pub value: f64,
    /// `‖U(·, t)‖` was non-increasing on the grid, so the sup sits at `t = 1/2`.
    pub certified: bool,
}

/// `L_p(U) = sup_{t ≥ 1/2} ‖U(·, t)‖_{k,p}` on a log grid up to `t = 20`.
pub fn l_functional(u: &dyn Temperature, p: f64) -> Result<SupTail> {
    let grid = TGrid::log(0.5, 20.0, MIN_PER_DECADE)?;
    let norms = grid
        .nodes()
        .par_iter()
        .map(|&t| slice_norm(u, 0, t, p))
        .collect::<Result<Vec<_>>>()?;
    let certified = norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let value = norms.iter().fold(0.0f64, |a, &v| a.max(v));
    Ok(SupTail { value, certified })
}

/// Ratio window for norm equivalences.
pub const EQUIVALENCE_WINDOW: (f64, f64) = (1.0 / 50.0, 50.0);
/// Bound on `max ratio / min ratio` across a sweep.
pub const STABILITY_LIMIT: f64 = 20.0;

#[derive(Debug, Clone, Serialize)]
pub struct EquivalencePoint {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub id: String,
    pub reference: String,
    pub window: (f64, f64),
    pub stability_limit: f64,
    pub points: Vec<EquivalencePoint>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub stability: f64,
    pub pass: bool,
}

/// Verdict on `lhs / rhs` across a sweep of parameter points.
pub fn equivalence_report(id: &str, reference: &str, points: Vec<(String, f64, f64)>) -> EquivalenceReport {
    let points: Vec<EquivalencePoint> = points
        .into_iter()
        .map(|(label, lhs, rhs)| EquivalencePoint { label, lhs, rhs, ratio: lhs / rhs })
        .collect();
    let min_ratio = points.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = points.iter().map(|p| p.ratio).fold(0.0, f64::max);
    let stability = max_ratio / min_ratio;
    let all_finite = points.iter().all(|p| p.ratio.is_finite() && p.ratio > 0.0);
    let pass = !points.is_empty()
        && all_finite
        && min_ratio >= EQUIVALENCE_WINDOW.0
        && max_ratio <= EQUIVALENCE_WINDOW.1
        && stability <= STABILITY_LIMIT;
    EquivalenceReport {
        id: id.into(),
        reference: reference.into(),
        window: EQUIVALENCE_WINDOW,
        stability_limit: STABILITY_LIMIT,
        points,
        min_ratio,
        max_ratio,
        stability,
        pass,
    }
}

/// Grids shared by the reports.
#[derive(Debug, Clone)]
pub struct SweepGrids {
    pub a: TGrid,
    pub e: TGrid,
    pub y: TGrid,
}

impl Default for SweepGrids {
    fn default() -> Self {
        Self {
            a: TGrid::standard(),
            e: temperature_t_grid(),
            y: standard_y_grid(),
        }
    }
}

fn heat_norm(params: &DunklParams, alpha: f64, p: f64, q: f64, input: &HeatInput, grids: &SweepGrids) -> Result<f64> {
    let lp = LipschitzParams::new(alpha, p, q)?;
    Ok(lipschitz_norm_heat(params, &lp, input, &grids.a, None)?.value)
}

/// `A*_{p,q}(t^{n-α/2} ∂_t^n U) + L_p(U)`.
pub fn derivative_route(u: &dyn Temperature, alpha: f64, n: usize, p: f64, q: f64, tgrid: &TGrid) -> Result<f64> {
    let w = n as f64 - 0.5 * alpha;
    let a = a_functional(q, tgrid, true, |t| Ok(t.powf(w) * slice_norm(u, n, t, p)?))?;
    Ok(a.value + l_functional(u, p)?.value)
}

/// The `(α, p, q)` sweep points.
const SWEEP: [(f64, f64, f64); 4] = [(0.5, 2.0, 2.0), (1.5, 2.0, 2.0), (0.7, 1.0, f64::INFINITY), (1.5, 2.0, 1.0)];

fn label(f: &str, alpha: f64, p: f64, q: f64) -> String {
    format!("{f}/alpha={alpha}/p={p}/q={q}")
}

/// Temperature norm against the derivative route, `n ∈ {n̄, n̄+1}`.
pub fn temperature_equivalence(params: &DunklParams, grids: &SweepGrids) -> Result<EquivalenceReport> {
    let mut pts = Vec::new();
    for f in gaussian_suite(params) {
        let u: TemperatureRef = Arc::new(HeatTemperature::new(params, &f));
        for &(alpha, p, q) in &[(0.5, 2.0, 2.0), (1.5, 2.0, 2.0)] {
            let e = e_functional(u.clone(), alpha, p, q, &grids.e)?.value;
            for n in [1, 2] {
                let r = derivative_route(u.as_ref(), alpha, n, p, q, &grids.a)?;
                pts.push((format!("{}/n={n}", label(&f.name, alpha, p, q)), e, r));
            }
        }
    }
    Ok(equivalence_report(
        "temperature_norm_vs_derivative_route",
        "E_{p,q}^a(U) ~ A*_{p,q}(t^{n-a/2} d_t^n U) + L_p(U), n > a/2",
        pts,
    ))
}

/// Heat norm with `n̄` against the same norm with `n̄ + 1`.
pub fn derivative_order_equivalence(params: &DunklParams, grids: &SweepGrids) -> Result<EquivalenceReport> {
    let mut pts = Vec::new();
    for f in gaussian_suite(params) {
        for &(alpha, p, q) in &[(0.5, 2.0, 2.0), (1.5, 2.0, 2.0), (0.7, 1.0, f64::INFINITY), (-1.0, 2.0, 2.0)] {
            let lp = LipschitzParams::new(alpha, p, q)?;
            let input = if alpha > 0.0 {
                HeatInput::function(f.clone())
            } else {
                HeatInput::potential(f.clone(), alpha - 0.5)
            };
            let a = lipschitz_norm_heat(params, &lp, &input, &grids.a, None)?.value;
            let b = lipschitz_norm_heat(params, &lp, &input, &grids.a, Some(lp.n_bar + 1))?.value;
            pts.push((label(&input.name(), alpha, p, q), a, b));
        }
    }
    Ok(equivalence_report(
        "derivative_order_stability",
        "heat norm with n = overline(a/2) ~ heat norm with n = overline(a/2) + 1",
        pts,
    ))
}

/// `‖J_β f‖_{Λ_{α+β}}` against `‖f‖_{Λ_α}`.
pub fn potential_isomorphism(params: &DunklParams, grids: &SweepGrids) -> Result<EquivalenceReport> {
    let mut pts = Vec::new();
    for f in gaussian_suite(params) {
        for &(alpha, beta, p, q) in &[(0.5, 1.0, 2.0, 2.0), (1.5, 1.0, 2.0, 2.0), (0.7, 1.0, 1.0, f64::INFINITY), (1.5, -1.0, 2.0, 2.0)] {
            let src = heat_norm(params, alpha, p, q, &HeatInput::function(f.clone()), grids)?;
            let image = HeatInput::potential(f.clone(), beta);
            let img = heat_norm(params, alpha + beta, p, q, &image, grids)?;
            pts.push((format!("{}/beta={beta}", label(&f.name, alpha, p, q)), img, src));
        }
    }
    Ok(equivalence_report(
        "potential_isomorphism",
        "|J_b f| in Lambda_{a+b,p,q} ~ |f| in Lambda_{a,p,q}",
        pts,
    ))
}

/// `E^α_{p,q}(G f)` against `‖f‖_{Λ_α}`.
pub fn heat_transform_isomorphism(params: &DunklParams, grids: &SweepGrids) -> Result<EquivalenceReport> {
    let mut pts = Vec::new();
    for f in gaussian_suite(params) {
        let u: TemperatureRef = Arc::new(HeatTemperature::new(params, &f));
        for &(alpha, p, q) in &SWEEP {
            let e = e_functional(u.clone(), alpha, p, q, &grids.e)?.value;
            let n = heat_norm(params, alpha, p, q, &HeatInput::function(f.clone()), grids)?;
            pts.push((label(&f.name, alpha, p, q), e, n));
        }
    }
    Ok(equivalence_report(
        "heat_transform_isomorphism",
        "E_{p,q}^a(G f) ~ |f| in Lambda_{a,p,q}",
        pts,
    ))
}

/// Modulus route against the heat route for `0 < α < 1`.
pub fn modulus_equivalence(params: &DunklParams, grids: &SweepGrids) -> Result<EquivalenceReport> {
    let mut pts = Vec::new();
    for f in gaussian_suite(params) {
        for &(alpha, p, q) in &[(0.5, 2.0, 2.0), (0.7, 2.0, 2.0), (0.3, 1.0, 2.0), (0.7, 2.0, f64::INFINITY)] {
            let lp = LipschitzParams::new(alpha, p, q)?;
            let m = lipschitz_norm_modulus(params, &lp, &f, &grids.y)?.value;
            let h = lipschitz_norm_heat(params, &lp, &HeatInput::function(f.clone()), &grids.a, None)?.value;
            pts.push((label(&f.name, alpha, p, q), m, h));
        }
    }
    Ok(equivalence_report(
        "modulus_vs_heat_route",
        "|f|_p + (int |T_y f - f|_p^q |y|^{-1-aq} dy)^{1/q} ~ |f|_p + A_{p,q}(t^{1-a/2} d_t G_t f)",
        pts,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingCheck {
    pub id: String,
    pub reference: String,
    pub source: String,
    pub target: String,
    pub source_norm: f64,
    pub target_norm: f64,
    /// `target / source`.
    pub constant: f64,
    pub holds: bool,
}

fn embedding(id: String, reference: &str, source: String, target: String, s: f64, t: f64) -> EmbeddingCheck {
    let constant = t / s;
    EmbeddingCheck {
        id,
        reference: reference.into(),
        source,
        target,
        source_norm: s,
        target_norm: t,
        constant,
        holds: s.is_finite() && s > 0.0 && t.is_finite() && constant.is_finite(),
    }
}

fn space(alpha: f64, p: f64, q: f64) -> String {
    format!("Lambda_({alpha},{p},{q})")
}

/// Measured constants `‖f‖_target ≤ B ‖f‖_source` for the embedding instances.
pub fn embedding_report(params: &DunklParams, grids: &SweepGrids) -> Result<Vec<EmbeddingCheck>> {
    let k = params.k;
    let mut out = Vec::new();
    let w = 2.0 * k + 1.0;
    // (α1, p1, q1) → (α2, p2, q2)
    let function_pairs: Vec<(&str, &str, (f64, f64, f64), (f64, f64, f64))> = vec![
        ("smoothness_decrease", "a1 > a2: Lambda_{a1,p,q1} into Lambda_{a2,p,q2}", (0.8, 2.0, 2.0), (0.5, 2.0, 2.0)),
        ("smoothness_decrease_q", "a1 > a2: Lambda_{a1,p,q1} into Lambda_{a2,p,q2}", (1.5, 2.0, 1.0), (0.5, 2.0, f64::INFINITY)),
        ("fine_index_increase", "q1 < q2: Lambda_{a,p,q1} into Lambda_{a,p,q2}", (0.7, 2.0, 1.0), (0.7, 2.0, 2.0)),
        (
            "sobolev_critical",
            "a1 - (2k+1)/p1 = a2 - (2k+1)/p2, p1 <= p2",
            (0.5 + 0.5 * w, 1.0, 2.0),
            (0.5, 2.0, 2.0),
        ),
        (
            "sobolev_subcritical",
            "a1 - (2k+1)/p1 > a2 - (2k+1)/p2, p1 <= p2",
            (1.0 + w, 1.0, 2.0),
            (0.5, 2.0, f64::INFINITY),
        ),
        ("identity", "identity embedding", (0.7, 2.0, 2.0), (0.7, 2.0, 2.0)),
    ];
    for f in gaussian_suite(params) {
        let input = HeatInput::function(f.clone());
        for (id, reference, (a1, p1, q1), (a2, p2, q2)) in &function_pairs {
            let s = heat_norm(params, *a1, *p1, *q1, &input, grids)?;
            let t = heat_norm(params, *a2, *p2, *q2, &input, grids)?;
            out.push(embedding(
                format!("{id}/{}", f.name),
                reference,
                space(*a1, *p1, *q1),
                space(*a2, *p2, *q2),
                s,
                t,
            ));
        }
        // Dunkl derivative lowers the smoothness index by one.
        let (alpha, p, q) = (1.5, 2.0, 2.0);
        let full = heat_norm(params, alpha, p, q, &input, grids)?;
        let df = dunkl_derivative_fn(params, &f)?;
        let split = slice_norm(input.temperature(params)?.as_ref(), 0, 0.0, p)?
            + heat_norm(params, alpha - 1.0, p, q, &HeatInput::function(df), grids)?;
        let reference = "|f|_{Lambda_a} ~ |f|_p + |D_k f|_{Lambda_{a-1}}";
        out.push(embedding(format!("derivative_split_upper/{}", f.name), reference, space(alpha, p, q), "split".into(), full, split));
        out.push(embedding(format!("derivative_split_lower/{}", f.name), reference, "split".into(), space(alpha, p, q), split, full));
        // Log-convexity between two smoothness indices.
        let (a0, a1, theta) = (0.5, 1.5, 0.5);
        let n0 = heat_norm(params, a0, p, q, &input, grids)?;
        let n1 = heat_norm(params, a1, p, q, &input, grids)?;
        let mid = heat_norm(params, (1.0 - theta) * a0 + theta * a1, p, q, &input, grids)?;
        out.push(embedding(
            format!("log_convexity/{}", f.name),
            "|f|_{Lambda_a} <= B |f|_{Lambda_a0}^{1-theta} |f|_{Lambda_a1}^theta",
            "interpolated".into(),
            space(1.0, p, q),
            n0.powf(1.0 - theta) * n1.powf(theta),
            mid,
        ));
        // Temperature spaces: p → r loses δ(2k+1) smoothness, δ = 1/p - 1/r.
        let u: TemperatureRef = Arc::new(HeatTemperature::new(params, &f));
        let (alpha, p, r, q) = (0.5, 1.0, 2.0, 2.0);
        let delta = 1.0 / p - 1.0 / r;
        let s = e_functional(u.clone(), alpha, p, q, &grids.e)?.value;
        let t = e_functional(u, alpha - delta * w, r, q, &grids.e)?.value;
        out.push(embedding(
            format!("temperature_integrability/{}", f.name),
            "E^{a}_{p,q} controls E^{a - (1/p - 1/r)(2k+1)}_{r,q}",
            format!("T{}", space(alpha, p, q)),
            format!("T{}", space(alpha - delta * w, r, q)),
            s,
            t,
        ));
    }
    // Bessel kernels are α-smooth in L^1.
    for alpha in [0.5] {
        let b = bessel_kernel_fn(params, alpha)?;
        let lp = LipschitzParams::new(alpha, 1.0, f64::INFINITY)?;
        let v = lipschitz_norm_modulus(params, &lp, &b, &membership_y_grid())?;
        out.push(embedding(
            format!("bessel_kernel_membership/alpha={alpha}"),
            "sup_y |T_y B_a - B_a|_1 / |y|^a finite",
            "L^1".into(),
            space(alpha, 1.0, f64::INFINITY),
            v.base,
            v.value,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{gaussian, xgaussian};
    use crate::transforms::FnTemperature;

    fn params(k: f64) -> DunklParams {
        DunklParams::new(k).unwrap()
    }

    #[test]
    fn overline_is_strict() {
        assert_eq!(overline(-0.5), 0);
        assert_eq!(overline(0.0), 1);
        assert_eq!(overline(0.35), 1);
        assert_eq!(overline(1.0), 2);
        let lp = LipschitzParams::new(0.7, 2.0, 2.0).unwrap();
        assert_eq!((lp.n_bar, lp.alpha_bar), (1, 1));
        assert!(LipschitzParams::new(0.5, 0.5, 2.0).is_err());
    }

    #[test]
    fn t_grid_density() {
        let g = TGrid::standard();
        let ts = g.nodes();
        assert_eq!(ts.len(), 6 * 64 + 1);
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
        assert_eq!((ts[0], *ts.last().unwrap()), (1e-4, 1e2));
        assert!(TGrid::log(1e-2, 1.0, 16).is_err());
        let parsed: TGrid = "0.001:10:40".parse().unwrap();
        assert_eq!(parsed.per_decade, 40);
        assert_eq!(parsed.to_string(), "0.001:10:40");
        assert_eq!(*g.star().unwrap().nodes().last().unwrap(), 1.0);
    }

    #[test]
    fn log_integral_of_power_laws() {
        // ∫_0^∞ min(t, 1/t)^2 dt/t = 1
        let g = TGrid::log(1e-2, 1e2, 64).unwrap();
        let ts = g.nodes();
        let vals: Vec<f64> = ts.iter().map(|&t| t.min(1.0 / t).powi(2)).collect();
        let li = log_t_integral(ts, &vals);
        assert!((li.value - 1.0).abs() < 1e-3, "{li:?}");
        let flat = vec![1.0; ts.len()];
        assert!(log_t_integral(ts, &flat).diverged);
        let zero = vec![0.0; ts.len()];
        assert_eq!(log_t_integral(ts, &zero).value, 0.0);
    }

    #[test]
    fn zero_inputs_give_zero() {
        let d = params(0.5);
        let a = a_functional(2.0, &TGrid::standard(), false, |_| Ok(0.0)).unwrap();
        assert_eq!(a.value, 0.0);
        let a = a_functional(f64::INFINITY, &TGrid::standard(), true, |_| Ok(0.0)).unwrap();
        assert_eq!(a.value, 0.0);
        let z = RealFunction::new("zero", |_| 0.0).parity(Parity::Even);
        let lp = LipschitzParams::new(0.5, 2.0, 2.0).unwrap();
        assert_eq!(lipschitz_norm_modulus(&d, &lp, &z, &standard_y_grid()).unwrap().value, 0.0);
        let u: TemperatureRef = Arc::new(FnTemperature::new(&d, "0", |_, _, _| 0.0).with_radius(8.0));
        assert_eq!(e_functional(u, 0.5, 2.0, 2.0, &temperature_t_grid()).unwrap().value, 0.0);
    }

    #[test]
    fn star_is_dominated() {
        let d = params(0.5);
        let u = HeatTemperature::new(&d, &gaussian(&d));
        let g = TGrid::standard();
        let f = |t: f64| Ok(t.powf(0.65) * slice_norm(&u, 1, t, 2.0)?);
        let full = a_functional(2.0, &g, false, f).unwrap();
        let star = a_functional(2.0, &g, true, f).unwrap();
        assert!(star.value <= full.value && star.value > 0.0);
    }

    #[test]
    fn heat_norm_converges_under_refinement() {
        let d = params(0.5);
        let lp = LipschitzParams::new(0.7, 2.0, 2.0).unwrap();
        let input = HeatInput::function(gaussian(&d));
        let g = TGrid::standard();
        let a = lipschitz_norm_heat(&d, &lp, &input, &g, None).unwrap();
        let b = lipschitz_norm_heat(&d, &lp, &input, &g.refined().unwrap(), None).unwrap();
        assert!(a.value.is_finite() && !a.functional.diverged);
        assert!((a.functional.value - b.functional.value).abs() < 0.01 * b.functional.value);
    }

    #[test]
    fn non_positive_orders_need_representatives() {
        let d = params(0.5);
        let lp = LipschitzParams::new(-1.0, 2.0, 2.0).unwrap();
        let g = gaussian(&d);
        let tg = TGrid::standard();
        assert!(lipschitz_norm_heat(&d, &lp, &HeatInput::function(g.clone()), &tg, None).is_err());
        let v = lipschitz_norm_heat(&d, &lp, &HeatInput::potential(g.clone(), -1.5), &tg, None).unwrap();
        let u = HeatTemperature::new(&d, &g);
        let exact = slice_norm(&u, 0, 0.0, 2.0).unwrap();
        assert_eq!(v.base, exact);
        assert!(v.value.is_finite());
    }

    #[test]
    fn norms_are_homogeneous() {
        let d = params(0.5);
        let f = xgaussian(&d);
        let lp = LipschitzParams::new(0.5, 2.0, 2.0).unwrap();
        let tg = TGrid::standard();
        let a = lipschitz_norm_heat(&d, &lp, &HeatInput::function(f.clone()), &tg, None).unwrap().value;
        let b = lipschitz_norm_heat(&d, &lp, &HeatInput::function(f.scaled(-2.0)), &tg, None).unwrap().value;
        assert!((b - 2.0 * a).abs() < 1e-9 * b);
    }

    #[test]
    fn e_functional_shift_invariance() {
        let d = params(0.5);
        let f = gaussian(&d);
        let u: TemperatureRef = Arc::new(HeatTemperature::new(&d, &f));
        let tg = temperature_t_grid();
        let e = e_functional(u.clone(), 0.5, 2.0, 2.0, &tg).unwrap().value;
        let ju: TemperatureRef = Arc::new(PotentialTemperature::new_unchecked(u, 1.0).unwrap());
        let e2 = e_functional(ju, 1.5, 2.0, 2.0, &tg).unwrap().value;
        assert!((e - e2).abs() < 1e-6 * e, "{e} vs {e2}");
    }

    #[test]
    fn equivalence_verdicts() {
        let r = equivalence_report("x", "y", vec![("a".into(), 1.0, 2.0), ("b".into(), 3.0, 1.0)]);
        assert!(r.pass && (r.stability - 6.0).abs() < 1e-15);
        let r = equivalence_report("x", "y", vec![("a".into(), 100.0, 1.0)]);
        assert!(!r.pass);
        let r = equivalence_report("x", "y", vec![("a".into(), 1.0, 25.0), ("b".into(), 2.0, 1.0)]);
        assert!(!r.pass);
    }
}
