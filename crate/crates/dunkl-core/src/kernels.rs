//! Heat, Poisson and Bessel kernels with their t-derivatives.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::dunkl_ops::{convolve, Interpolation, SampledFunction};
use crate::error::{Error, Result};
use crate::function::{DecayClass, HeatForm, Parity, RealFunction};
use crate::measure::{GridBuilder, GridProfile};
use crate::quadrature::{gauss_laguerre, mapped_jacobi};
use crate::specfun::{bessel_k, gamma, DunklParams, KernelEvaluator, SeriesPolicy};

/// Largest `m` accepted by [`heat_kernel_dt`].
pub const MAX_HEAT_ORDER: usize = 6;
/// Largest `n` accepted by [`poisson_kernel_dt`].
pub const MAX_POISSON_ORDER: usize = 4;
/// Orders reached internally when potentials and norms stack t-derivatives.
pub const MAX_INTERNAL_ORDER: usize = 16;

/// Polynomials `R_m` with `∂_t^m F_t = t^{-m} R_m(x²/4t) F_t`, generated by
/// `R_{m+1}(u) = (u - γ - m) R_m(u) - u R_m'(u)`, `γ = k + 1/2`.
#[derive(Debug)]
pub struct HeatPolynomials {
    pub k: f64,
    coeffs: Vec<Vec<f64>>,
}

impl HeatPolynomials {
    fn build(k: f64) -> Self {
        let g = k + 0.5;
        let mut coeffs = vec![vec![1.0]];
        for m in 0..MAX_INTERNAL_ORDER {
            let r = &coeffs[m];
            let mut next = vec![0.0; r.len() + 1];
            for (j, &c) in r.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= (g + m as f64) * c;
                next[j] -= j as f64 * c;
            }
            coeffs.push(next);
        }
        Self { k, coeffs }
    }

    pub fn coefficients(&self, m: usize) -> &[f64] {
        &self.coeffs[m]
    }

    #[inline]
    pub fn r(&self, m: usize, u: f64) -> f64 {
        self.coeffs[m].iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    #[inline]
    pub fn r_prime(&self, m: usize, u: f64) -> f64 {
        let c = &self.coeffs[m];
        let mut acc = 0.0;
        for j in (1..c.len()).rev() {
            acc = acc * u + j as f64 * c[j];
        }
        acc
    }
}

fn heat_polys(k: f64) -> Arc<HeatPolynomials> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<HeatPolynomials>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    cache
        .lock()
        .expect("heat polynomial cache")
        .entry(k.to_bits())
        .or_insert_with(|| Arc::new(HeatPolynomials::build(k)))
        .clone()
}

/// The heat kernels `F_s` for every `s > 0` at a fixed multiplicity.
#[derive(Debug, Clone)]
pub struct HeatFamily {
    pub params: DunklParams,
    polys: Arc<HeatPolynomials>,
    gamma: f64,
}

impl HeatFamily {
    pub fn new(params: &DunklParams) -> Self {
        Self {
            params: *params,
            polys: heat_polys(params.k),
            gamma: params.k + 0.5,
        }
    }

    pub fn polynomials(&self) -> &HeatPolynomials {
        &self.polys
    }

    #[inline]
    pub fn eval(&self, x: f64, s: f64) -> f64 {
        (2.0 * s).powf(-self.gamma) * (-x * x / (4.0 * s)).exp()
    }

    /// `∂_s^m F_s(x)` for `m ≤ MAX_INTERNAL_ORDER`.
    #[inline]
    pub fn dt(&self, m: usize, x: f64, s: f64) -> f64 {
        let u = x * x / (4.0 * s);
        s.powi(-(m as i32)) * self.polys.r(m, u) * self.eval(x, s)
    }

    /// `D_k ∂_s^m F_s(x)`; the kernel is even so `D_k` is the x-derivative.
    #[inline]
    pub fn dk_dt(&self, m: usize, x: f64, s: f64) -> f64 {
        let u = x * x / (4.0 * s);
        s.powi(-(m as i32)) * (x / (2.0 * s)) * (self.polys.r_prime(m, u) - self.polys.r(m, u)) * self.eval(x, s)
    }

    /// `Σ coef D_k^{dk} ∂^{dt+m} F_{shift+t}(x)`.
    pub fn form(&self, form: &HeatForm, m: usize, x: f64, t: f64) -> f64 {
        let s = form.shift + t;
        form.terms
            .iter()
            .map(|term| {
                let order = term.dt + m;
                term.coef
                    * if term.dk == 0 {
                        self.dt(order, x, s)
                    } else {
                        self.dk_dt(order, x, s)
                    }
            })
            .sum()
    }

    /// `T_{-y} F_s(x) = (2s)^{-(k+1/2)} e^{-(x²+y²)/4s} E_k(x/2s, y)`.
    pub fn translated(&self, ev: &KernelEvaluator, x: f64, y: f64, s: f64) -> f64 {
        let d = x.abs() - y.abs();
        (2.0 * s).powf(-self.gamma) * (-d * d / (4.0 * s)).exp() * ev.scaled_real(x * y / (2.0 * s))
    }
}

/// `F_t(x) = (2t)^{-(k+1/2)} e^{-x²/4t}`.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    pub params: DunklParams,
    pub t: f64,
    family: HeatFamily,
}

impl HeatKernel {
    pub fn new(params: &DunklParams, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain { what: "heat kernel time", arg: t });
        }
        Ok(Self {
            params: *params,
            t,
            family: HeatFamily::new(params),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.family.eval(x, self.t)
    }

    pub fn family(&self) -> &HeatFamily {
        &self.family
    }

    /// `D_k² F_t` from its x-derivatives, `F'' + 2k F'/x`.
    pub fn dk2(&self, x: f64) -> f64 {
        let t = self.t;
        let f = self.eval(x);
        (x * x / (4.0 * t * t) - 1.0 / (2.0 * t) - self.params.k / t) * f
    }
}

/// `∂_t^m F_t(x) = t^{-m} R_m(x²/4t) F_t(x)`.
pub fn heat_kernel_dt(hk: &HeatKernel, m: usize, x: f64) -> Result<f64> {
    if m > MAX_HEAT_ORDER {
        return Err(Error::OrderTooLarge { order: m, max: MAX_HEAT_ORDER });
    }
    Ok(hk.family.dt(m, x, hk.t))
}

pub fn heat_kernel_fn(params: &DunklParams, t: f64) -> Result<RealFunction> {
    let hk = HeatKernel::new(params, t)?;
    let d = hk.clone();
    let e = hk.clone();
    Ok(RealFunction::new(format!("heat_kernel(t={t})"), move |x| e.eval(x))
        .parity(Parity::Even)
        .decay(DecayClass::Gaussian, 12.5 * t.sqrt())
        .feature_width(t.sqrt())
        .with_derivative(move |x| -x / (2.0 * d.t) * d.eval(x))
        .with_transform(move |y| Complex64::new((-t * y * y).exp(), 0.0))
        .with_heat_form(HeatForm::kernel(t)))
}

/// `∂_t^m F_t` as a function of `x`.
pub fn heat_kernel_dt_fn(params: &DunklParams, t: f64, m: usize) -> Result<RealFunction> {
    let hk = HeatKernel::new(params, t)?;
    let fam = hk.family.clone();
    let fam2 = fam.clone();
    let mut form = HeatForm::kernel(t);
    form.terms[0].dt = m;
    let radius = (12.5 + 2.0 * m as f64) * t.sqrt();
    Ok(RealFunction::new(format!("dt^{m} heat_kernel(t={t})"), move |x| fam.dt(m, x, t))
        .parity(Parity::Even)
        .decay(DecayClass::Gaussian, radius)
        .feature_width(t.sqrt())
        .with_derivative(move |x| fam2.dk_dt(m, x, t))
        .with_transform(move |y| Complex64::new((-y * y).powi(m as i32) * (-t * y * y).exp(), 0.0))
        .with_heat_form(form))
}

/// A term `coef · t^p (t²+x²)^{-b}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    coef: f64,
    p: i32,
    b: f64,
}

fn differentiate(terms: &[Term]) -> Vec<Term> {
    let mut out = Vec::new();
    for t in terms {
        if t.p != 0 {
            out.push(Term { coef: t.coef * t.p as f64, p: t.p - 1, b: t.b });
        }
        out.push(Term { coef: -2.0 * t.b * t.coef, p: t.p + 1, b: t.b + 1.0 });
    }
    // Merge equal monomials.
    let mut merged: Vec<Term> = Vec::new();
    for t in out {
        match merged.iter_mut().find(|m| m.p == t.p && m.b == t.b) {
            Some(m) => m.coef += t.coef,
            None => merged.push(t),
        }
    }
    merged.retain(|t| t.coef != 0.0);
    merged
}

fn poisson_terms(params: &DunklParams) -> Arc<Vec<Vec<Term>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<Vec<Term>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    cache
        .lock()
        .expect("poisson term cache")
        .entry(params.k.to_bits())
        .or_insert_with(|| {
            let mut all = vec![vec![Term {
                coef: params.c_tilde_k,
                p: 1,
                b: params.k + 1.0,
            }]];
            for n in 0..MAX_INTERNAL_ORDER {
                let next = differentiate(&all[n]);
                all.push(next);
            }
            Arc::new(all)
        })
        .clone()
}

/// `P_t(x) = c̃_k t (t²+x²)^{-(k+1)}`.
#[derive(Debug, Clone)]
pub struct PoissonKernel {
    pub params: DunklParams,
    pub t: f64,
    terms: Arc<Vec<Vec<Term>>>,
}

impl PoissonKernel {
    pub fn new(params: &DunklParams, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain { what: "Poisson kernel time", arg: t });
        }
        Ok(Self {
            params: *params,
            t,
            terms: poisson_terms(params),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.params.c_tilde_k * self.t * (self.t * self.t + x * x).powf(-(self.params.k + 1.0))
    }

    #[inline]
    pub(crate) fn dt_any(&self, n: usize, x: f64) -> f64 {
        let s = self.t * self.t + x * x;
        self.terms[n]
            .iter()
            .map(|term| term.coef * self.t.powi(term.p) * s.powf(-term.b))
            .sum()
    }

    /// Decay bound `|∂_t^n P_t(x)| ≤ coef |x|^{-power}` for large `|x|`.
    pub(crate) fn dt_decay(&self, n: usize) -> DecayClass {
        let terms = &self.terms[n];
        let bmin = terms.iter().map(|t| t.b).fold(f64::INFINITY, f64::min);
        let coef: f64 = terms
            .iter()
            .filter(|t| t.b == bmin)
            .map(|t| t.coef.abs() * self.t.powi(t.p))
            .sum();
        DecayClass::Polynomial { coef, power: 2.0 * bmin }
    }

    /// `D_k² P_t = P'' + 2k P'/x` in closed form.
    pub fn dk2(&self, x: f64) -> f64 {
        let b = self.params.k + 1.0;
        let s = self.t * self.t + x * x;
        let c = self.params.c_tilde_k * self.t;
        c * (-2.0 * b * s.powf(-b - 1.0) + 4.0 * b * (b + 1.0) * x * x * s.powf(-b - 2.0)
            - 4.0 * b * self.params.k * s.powf(-b - 1.0))
    }
}

/// Closed-form `∂_t^n P_t(x)`.
pub fn poisson_kernel_dt(pk: &PoissonKernel, n: usize, x: f64) -> Result<f64> {
    if n > MAX_POISSON_ORDER {
        return Err(Error::OrderTooLarge { order: n, max: MAX_POISSON_ORDER });
    }
    Ok(pk.dt_any(n, x))
}

pub fn poisson_kernel_fn(params: &DunklParams, t: f64) -> Result<RealFunction> {
    poisson_kernel_dt_fn(params, t, 0)
}

/// `∂_t^n P_t` as a function of `x`.
pub fn poisson_kernel_dt_fn(params: &DunklParams, t: f64, n: usize) -> Result<RealFunction> {
    if n > MAX_INTERNAL_ORDER {
        return Err(Error::OrderTooLarge { order: n, max: MAX_INTERNAL_ORDER });
    }
    let pk = PoissonKernel::new(params, t)?;
    let decay = pk.dt_decay(n);
    let name = if n == 0 { format!("poisson_kernel(t={t})") } else { format!("dt^{n} poisson_kernel(t={t})") };
    // ∂_t^n e^{-t|ξ|} = (-|ξ|)^n e^{-t|ξ|}
    let transform = move |y: f64| Complex64::new((-y.abs()).powi(n as i32) * (-t * y.abs()).exp(), 0.0);
    let radius = match decay {
        DecayClass::Polynomial { coef, power } => (coef / 1e-17).powf(1.0 / power),
        _ => unreachable!(),
    };
    Ok(RealFunction::new(name, move |x| pk.dt_any(n, x))
        .parity(Parity::Even)
        .decay(decay, radius)
        .feature_width(t)
        .with_transform(transform))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselRoute {
    LaplaceIntegral,
    KClosedForm,
}

/// Below this radius the default evaluation uses the Laplace integral.
pub const BESSEL_SWITCH: f64 = 0.05;
/// Beyond this radius the kernel is flushed to zero.
pub const BESSEL_CUTOFF: f64 = 700.0;

/// `∫_0^∞ e^{-t - x²/4t} t^{ν-1} dt = 2 (|x|/2)^ν K_ν(|x|)`, by the trapezoid rule in `ln t`.
pub fn laplace_integral(nu: f64, x: f64) -> Result<f64> {
    let q = 0.25 * x * x;
    if q == 0.0 {
        if nu <= 0.0 {
            return Err(Error::Singular { what: "Laplace integral at the origin", x });
        }
        return gamma(nu);
    }
    let phi = |s: f64| -s.exp() - q * (-s).exp() + nu * s;
    // Stationary point: e^s = (ν + √(ν² + 4q)) / 2.
    let e_star = 0.5 * (nu + (nu * nu + 4.0 * q).sqrt());
    let s_star = if e_star > 0.0 {
        e_star.ln()
    } else {
        // ν ≪ 0: e^s ≈ q/|ν|
        (q / -nu).ln()
    };
    let peak = phi(s_star);
    let h = 0.1;
    let mut sum = 1.0;
    for dir in [-1.0, 1.0] {
        let mut j = 1;
        loop {
            let v = phi(s_star + dir * h * j as f64) - peak;
            if v < -60.0 {
                break;
            }
            sum += v.exp();
            j += 1;
            if j > 100_000 {
                return Err(Error::NonConvergence {
                    what: "Laplace integral",
                    terms: j,
                    partial: sum,
                    last: v.exp(),
                });
            }
        }
    }
    Ok(h * sum * peak.exp())
}

/// `B_α(x) = (2^{k+1/2} Γ(α/2))^{-1} ∫_0^∞ e^{-t} e^{-x²/4t} t^{(α-1)/2 - k - 1} dt`.
#[derive(Debug, Clone)]
pub struct BesselKernel {
    pub params: DunklParams,
    pub alpha: f64,
    route: Option<BesselRoute>,
    nu: f64,
    norm: f64,
    policy: SeriesPolicy,
}

impl BesselKernel {
    pub fn new(params: &DunklParams, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain { what: "Bessel kernel order", arg: alpha });
        }
        let k = params.k;
        Ok(Self {
            params: *params,
            alpha,
            route: None,
            nu: 0.5 * (alpha - 1.0) - k,
            norm: 1.0 / (2f64.powf(k + 0.5) * gamma(0.5 * alpha)?),
            policy: SeriesPolicy::default(),
        })
    }

    pub fn with_route(mut self, route: BesselRoute) -> Self {
        self.route = Some(route);
        self
    }

    pub fn route_at(&self, x: f64) -> BesselRoute {
        self.route.unwrap_or(if x.abs() < BESSEL_SWITCH {
            BesselRoute::LaplaceIntegral
        } else {
            BesselRoute::KClosedForm
        })
    }

    /// Whether the kernel stays bounded at the origin (`α > 2k+1`).
    pub fn is_bounded(&self) -> bool {
        self.nu > 0.0
    }

    fn laplace(&self, nu: f64, x: f64) -> Result<f64> {
        let a = x.abs();
        match self.route_at(a) {
            BesselRoute::LaplaceIntegral => laplace_integral(nu, a),
            BesselRoute::KClosedForm => {
                if a == 0.0 {
                    return laplace_integral(nu, 0.0);
                }
                Ok(2.0 * (0.5 * a).powf(nu) * bessel_k(nu.abs(), a, &self.policy)?)
            }
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let a = x.abs();
        if a > BESSEL_CUTOFF {
            return Ok(0.0);
        }
        if a == 0.0 && !self.is_bounded() {
            return Err(Error::Singular { what: "Bessel kernel at the origin", x });
        }
        Ok(self.norm * self.laplace(self.nu, a)?)
    }

    /// `B_α'(x) = -(x/2) (2^{k+1/2} Γ(α/2))^{-1} ∫ e^{-t-x²/4t} t^{ν-2} dt`.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let a = x.abs();
        if a > BESSEL_CUTOFF || a == 0.0 {
            return Ok(0.0);
        }
        Ok(-0.5 * x * self.norm * self.laplace(self.nu - 1.0, a)?)
    }

    /// Leading behaviour as `|x| → 0`, in each of the three regimes of `α` against `2k+1`.
    pub fn small_x_asymptotic(&self, x: f64) -> Result<f64> {
        let k = self.params.k;
        let a = self.alpha;
        let r = x.abs();
        let crit = 2.0 * k + 1.0;
        if a < crit {
            Ok(gamma(0.5 * (1.0 - a) + k)? / (2f64.powf(a - 0.5 - k) * gamma(0.5 * a)?) * r.powf(a - 1.0 - 2.0 * k))
        } else if a == crit {
            Ok((1.0 / r).ln() / (2f64.powf(k - 0.5) * gamma(k + 0.5)?))
        } else {
            Ok(gamma(0.5 * (a - 1.0) - k)? / (2f64.powf(0.5 + k) * gamma(0.5 * a)?))
        }
    }

    /// Leading behaviour as `|x| → ∞`.
    pub fn large_x_asymptotic(&self, x: f64) -> Result<f64> {
        let k = self.params.k;
        let a = self.alpha;
        let r = x.abs();
        Ok(PI.sqrt() / (2f64.powf(0.5 * (a - 1.0)) * gamma(0.5 * a)?) * r.powf(0.5 * a - 1.0 - k) * (-r).exp())
    }

    /// First correction `(4ν² - 1) / (8|x|)` of `K_ν`, `ν = α/2 - 1/2 - k`.
    pub fn large_x_correction(&self, x: f64) -> f64 {
        let nu = 0.5 * self.alpha - 0.5 - self.params.k;
        (4.0 * nu * nu - 1.0) / (8.0 * x.abs())
    }

    /// Leading behaviour times `1 + (4ν² - 1) / (8|x|)`.
    pub fn large_x_two_term(&self, x: f64) -> Result<f64> {
        Ok(self.large_x_asymptotic(x)? * (1.0 + self.large_x_correction(x)))
    }
}

pub fn bessel_kernel_eval(bk: &BesselKernel, x: f64) -> Result<f64> {
    bk.eval(x)
}

pub fn bessel_kernel_fn(params: &DunklParams, alpha: f64) -> Result<RealFunction> {
    let bk = BesselKernel::new(params, alpha)?;
    let d = bk.clone();
    let a = alpha;
    Ok(RealFunction::new(format!("bessel_kernel(alpha={alpha})"), move |x| {
        bk.eval(x).unwrap_or(f64::INFINITY)
    })
    .parity(Parity::Even)
    .decay(DecayClass::Exponential, 45.0)
    .feature_width(0.0)
    .with_derivative(move |x| d.derivative(x).unwrap_or(f64::NAN))
    .with_transform(move |y| Complex64::new((1.0 + y * y).powf(-0.5 * a), 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoissonBesselRoute {
    /// `P_t(B_{2-β}) + ∂_t² P_t(B_{2-β})`, valid for `0 < β < 2`.
    TwoTerm,
    /// `P_{t/2}(B_{-β/2}) ∗ P_{t/2}(B_{-β/2})`.
    HalfSplit,
    /// Poisson subordination of the heat family, valid for `0 < β < 2`.
    Subordination,
}

/// `P_t(B_{-β})`, the Poisson regularization of the negative-order Bessel kernel.
#[derive(Debug, Clone)]
pub struct PoissonBesselNegative {
    pub params: DunklParams,
    pub beta: f64,
    pub t: f64,
    pub route: PoissonBesselRoute,
    inner: Option<RealFunction>,
    p: RealFunction,
    p2: RealFunction,
    b: Option<RealFunction>,
}

impl PoissonBesselNegative {
    pub fn new(params: &DunklParams, beta: f64, t: f64) -> Result<Self> {
        let route = if beta < 2.0 { PoissonBesselRoute::TwoTerm } else { PoissonBesselRoute::HalfSplit };
        Self::with_route(params, beta, t, route)
    }

    pub fn with_route(params: &DunklParams, beta: f64, t: f64, route: PoissonBesselRoute) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Domain { what: "negative Bessel order", arg: beta });
        }
        if route != PoissonBesselRoute::HalfSplit && beta >= 2.0 {
            return Err(Error::InvalidParameter(format!(
                "the two-term and subordination routes need 0 < β < 2, got {beta}"
            )));
        }
        let p = poisson_kernel_fn(params, t)?;
        let p2 = poisson_kernel_dt_fn(params, t, 2)?;
        let (inner, b) = match route {
            PoissonBesselRoute::HalfSplit => {
                // Subordination is the cheaper pointwise route for sampling.
                let inner_route = if beta < 4.0 { PoissonBesselRoute::Subordination } else { PoissonBesselRoute::HalfSplit };
                let half = PoissonBesselNegative::with_route(params, 0.5 * beta, 0.5 * t, inner_route)?;
                (Some(half.sampled()?), None)
            }
            _ => (None, Some(bessel_kernel_fn(params, 2.0 - beta)?)),
        };
        Ok(Self {
            params: *params,
            beta,
            t,
            route,
            inner,
            p,
            p2,
            b,
        })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self.route {
            PoissonBesselRoute::TwoTerm => {
                let b = self.b.as_ref().expect("two-term route keeps the kernel");
                Ok(convolve(&self.params, &self.p, b, x)? + convolve(&self.params, &self.p2, b, x)?)
            }
            PoissonBesselRoute::HalfSplit => {
                let g = self.inner.as_ref().expect("half-split route keeps the half kernel");
                convolve(&self.params, g, g, x)
            }
            PoissonBesselRoute::Subordination => subordinated(&self.params, self.beta, self.t, x),
        }
    }

    /// Leading tail `c̃_k t |x|^{-2k-2}`, inherited from `P_t` since the transform is 1 at the origin.
    pub fn decay(&self) -> DecayClass {
        DecayClass::Polynomial {
            coef: 2.0 * self.params.c_tilde_k * self.t,
            power: 2.0 * self.params.k + 2.0,
        }
    }

    /// Samples on a geometrically growing grid, wrapped as an interpolated function.
    pub fn sampled(&self) -> Result<RealFunction> {
        let k = self.params.k;
        let grid = GridBuilder::new(k, 4000.0, GridProfile::Smooth)
            .panel_width(0.25 * self.t.min(2.0))
            .uniform_to(12.0)
            .origin_resolution(0.05 * self.t)
            .build()?;
        let nodes = grid.nodes().to_vec();
        let n = nodes.len();
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        // Even in x: evaluate on the non-negative half and mirror.
        for i in (n / 2)..n {
            let v = self.eval(nodes[i])?;
            if !v.is_finite() {
                return Err(Error::NonFinite(nodes[i]));
            }
            values[i] = Complex64::new(v, 0.0);
            values[n - 1 - i] = values[i];
        }
        let s = SampledFunction {
            grid: Arc::new(grid),
            values,
            interpolation: Interpolation::LocalLagrange,
        };
        let beta = self.beta;
        let t = self.t;
        let template = RealFunction::new(format!("P_{t}(B_-{beta})"), |_| 0.0)
            .parity(Parity::Even)
            .decay(self.decay(), 4000.0)
            .feature_width(t);
        Ok(s.to_function(&template)
            .with_transform(move |y| Complex64::new((-t * y.abs()).exp() * (1.0 + y * y).powf(0.5 * beta), 0.0)))
    }
}

pub fn poisson_bessel_negative(params: &DunklParams, beta: f64, t: f64, x: f64) -> Result<f64> {
    PoissonBesselNegative::new(params, beta, t)?.eval(x)
}

/// `∫ (η_t + ∂_t² η_t)(s) G_s(B_{2-β})(x) ds` with the subordinator density
/// `η_t(s) = t/(2√π) s^{-3/2} e^{-t²/4s}` and
/// `G_s(B_γ) = Γ(γ/2)^{-1} ∫ τ^{γ/2-1} e^{-τ} F_{s+τ} dτ`.
fn subordinated(params: &DunklParams, beta: f64, t: f64, x: f64) -> Result<f64> {
    let gam = 2.0 - beta;
    let fam = HeatFamily::new(params);
    let a = 0.5 * gam - 1.0;
    let jac = mapped_jacobi(48, 0.0, a, 0.0, 1.0)?;
    let lag = gauss_laguerre(32, 0.0)?;
    let mut taus = Vec::with_capacity(80);
    for (n, w) in jac.nodes.iter().zip(&jac.weights) {
        taus.push((*n, w * (-n).exp()));
    }
    for (n, w) in lag.nodes.iter().zip(&lag.weights) {
        let tau = 1.0 + n;
        taus.push((tau, w * (-1.0f64).exp() * tau.powf(a)));
    }
    let rg = 1.0 / gamma(0.5 * gam)?;
    let h = 0.1;
    let u0 = (t * t / 4.0).ln() - 6.0;
    let u1 = (t * t).ln().max(0.0) + 60.0;
    let steps = ((u1 - u0) / h).ceil() as usize;
    let mut acc = crate::measure::Neumaier::default();
    for j in 0..=steps {
        let u = u0 + h * j as f64;
        let s = u.exp();
        let e = (-t * t / (4.0 * s)).exp();
        if e == 0.0 {
            continue;
        }
        let c = s.powf(-1.5) / (2.0 * PI.sqrt());
        let eta = c * t * e;
        let eta2 = c * e * (t / s) * (t * t / (4.0 * s) - 1.5);
        let g: f64 = taus.iter().map(|&(tau, w)| w * fam.eval(x, s + tau)).sum();
        acc.add(h * s * (eta + eta2) * rg * g);
    }
    Ok(acc.sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::build_grid;
    use approx::assert_relative_eq;

    fn params(k: f64) -> DunklParams {
        DunklParams::new(k).unwrap()
    }

    #[test]
    fn heat_derivatives_match_finite_differences() {
        for &k in &[0.0, 0.5, 1.5] {
            let d = params(k);
            let fam = HeatFamily::new(&d);
            for &t in &[0.3, 1.0] {
                for &x in &[0.0, 0.7, -2.0] {
                    for m in 0..4 {
                        let h = 1e-3;
                        let fd = (-fam.dt(m, x, t + 2.0 * h) + 8.0 * fam.dt(m, x, t + h) - 8.0 * fam.dt(m, x, t - h)
                            + fam.dt(m, x, t - 2.0 * h))
                            / (12.0 * h);
                        let exact = fam.dt(m + 1, x, t);
                        assert!((fd - exact).abs() < 1e-6 * (1.0 + exact.abs()), "k={k} t={t} x={x} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn heat_order_contract() {
        let hk = HeatKernel::new(&params(0.5), 1.0).unwrap();
        assert!(heat_kernel_dt(&hk, 6, 0.3).is_ok());
        assert!(matches!(heat_kernel_dt(&hk, 7, 0.3), Err(Error::OrderTooLarge { .. })));
        assert_eq!(heat_kernel_dt(&hk, 0, 0.4).unwrap(), hk.eval(0.4));
    }

    #[test]
    fn heat_equation_in_closed_form() {
        for &k in &[0.0, 0.5, 1.5] {
            let d = params(k);
            for &t in &[0.1, 1.0, 3.0] {
                let hk = HeatKernel::new(&d, t).unwrap();
                for &x in &[0.2, 1.0, 4.0] {
                    let lhs = hk.dk2(x);
                    let rhs = heat_kernel_dt(&hk, 1, x).unwrap();
                    assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs() + 1e-14);
                }
            }
        }
    }

    #[test]
    fn poisson_derivatives_and_harmonicity() {
        for &k in &[0.0, 0.5, 1.5] {
            let d = params(k);
            for &t in &[0.5, 2.0] {
                let pk = PoissonKernel::new(&d, t).unwrap();
                for &x in &[0.0, 0.3, 2.5] {
                    let h = 1e-3;
                    for n in 0..MAX_POISSON_ORDER {
                        let at = |tt: f64| PoissonKernel::new(&d, tt).unwrap().dt_any(n, x);
                        let fd = (-at(t + 2.0 * h) + 8.0 * at(t + h) - 8.0 * at(t - h) + at(t - 2.0 * h)) / (12.0 * h);
                        let exact = poisson_kernel_dt(&pk, n + 1, x).unwrap();
                        assert!((fd - exact).abs() < 1e-6 * (1.0 + exact.abs()));
                    }
                    if x != 0.0 {
                        let r = pk.dk2(x) + pk.dt_any(2, x);
                        assert!(r.abs() <= 1e-12 * pk.dk2(x).abs());
                    }
                }
            }
        }
    }

    #[test]
    fn poisson_derivative_at_origin() {
        let d = params(0.5);
        let pk = PoissonKernel::new(&d, 0.7).unwrap();
        let mut c = d.c_tilde_k;
        let mut e = -(2.0 * d.k + 1.0);
        for n in 0..=MAX_POISSON_ORDER {
            let want = c * 0.7f64.powf(e);
            assert_relative_eq!(poisson_kernel_dt(&pk, n, 0.0).unwrap(), want, max_relative = 1e-12);
            c *= e;
            e -= 1.0;
        }
    }

    #[test]
    fn kernel_scaling() {
        let d = params(0.5);
        let f1 = HeatKernel::new(&d, 1.0).unwrap();
        let p1 = PoissonKernel::new(&d, 1.0).unwrap();
        for &t in &[0.25, 4.0] {
            let ft = HeatKernel::new(&d, t).unwrap();
            let pt = PoissonKernel::new(&d, t).unwrap();
            for &x in &[0.0, 0.5, 3.0] {
                assert_relative_eq!(ft.eval(x), t.powf(-1.0) * f1.eval(x / t.sqrt()), max_relative = 1e-14);
                assert_relative_eq!(pt.eval(x), t.powf(-2.0) * p1.eval(x / t), max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn bessel_routes_agree() {
        for &(k, a) in &[(0.0, 0.5), (0.5, 1.0), (0.5, 2.5), (1.0, 0.8), (1.5, 5.0), (0.5, 2.0)] {
            let d = params(k);
            let lap = BesselKernel::new(&d, a).unwrap().with_route(BesselRoute::LaplaceIntegral);
            let kf = BesselKernel::new(&d, a).unwrap().with_route(BesselRoute::KClosedForm);
            for &x in &[1e-2, 0.1, 1.0, 5.0, 20.0] {
                let u = lap.eval(x).unwrap();
                let v = kf.eval(x).unwrap();
                assert!(u >= 0.0);
                assert_relative_eq!(u, v, max_relative = 1e-8);
                let du = lap.derivative(x).unwrap();
                let dv = kf.derivative(x).unwrap();
                assert_relative_eq!(du, dv, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn bessel_derivative_matches_difference() {
        let d = params(0.5);
        let b = BesselKernel::new(&d, 2.5).unwrap();
        for &x in &[0.3, 1.0, 4.0] {
            let h = 1e-4;
            let fd = (b.eval(x + h).unwrap() - b.eval(x - h).unwrap()) / (2.0 * h);
            assert!((fd - b.derivative(x).unwrap()).abs() < 1e-7);
        }
    }

    #[test]
    fn bessel_origin_behaviour() {
        let d = params(0.5);
        assert!(matches!(BesselKernel::new(&d, 1.0).unwrap().eval(0.0), Err(Error::Singular { .. })));
        let b = BesselKernel::new(&d, 3.0).unwrap();
        let at0 = b.eval(0.0).unwrap();
        assert_relative_eq!(at0, b.small_x_asymptotic(1e-9).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(b.eval(1e-6).unwrap(), at0, max_relative = 1e-4);
        assert_eq!(b.eval(800.0).unwrap(), 0.0);
    }

    #[test]
    fn normalized_masses() {
        for &k in &[0.0, 0.5, 1.5] {
            let d = params(k);
            let g = build_grid(k, 40.0, GridProfile::Smooth).unwrap();
            for &t in &[0.1, 1.0] {
                let f = HeatKernel::new(&d, t).unwrap();
                assert_relative_eq!(d.c_k * g.integrate(|x| f.eval(x)).unwrap(), 1.0, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn laplace_integral_at_origin_is_gamma() {
        assert_relative_eq!(laplace_integral(1.5, 0.0).unwrap(), gamma(1.5).unwrap(), max_relative = 1e-15);
        assert_relative_eq!(laplace_integral(1.5, 1e-8).unwrap(), gamma(1.5).unwrap(), max_relative = 1e-10);
    }
}

#[cfg(test)]
mod negative_order_tests {
    use super::*;

    #[test]
    fn origin_value_matches_transform_integral() {
        // c_k ∫ e^{-|ξ|} (1+ξ²)^{3/4} |ξ| dξ at k = 1/2, by mpmath
        let d = DunklParams::new(0.5).unwrap();
        let v = poisson_bessel_negative(&d, 1.5, 1.0, 0.0).unwrap();
        assert!((v - 3.900_879_024_174_754_3).abs() < 1e-11);
    }

    #[test]
    fn two_term_matches_subordination() {
        for &k in &[0.0, 0.5] {
            let d = DunklParams::new(k).unwrap();
            for &beta in &[0.5, 1.5] {
                let a = PoissonBesselNegative::with_route(&d, beta, 1.0, PoissonBesselRoute::TwoTerm).unwrap();
                let b = PoissonBesselNegative::with_route(&d, beta, 1.0, PoissonBesselRoute::Subordination).unwrap();
                for &x in &[0.0, 0.5, 2.0, 7.0] {
                    let u = a.eval(x).unwrap();
                    let v = b.eval(x).unwrap();
                    assert!((u - v).abs() < 1e-8 * u.abs(), "k={k} beta={beta} x={x}: {u} vs {v}");
                }
            }
        }
    }

    #[test]
    fn half_split_matches_two_term() {
        let d = DunklParams::new(0.5).unwrap();
        let a = PoissonBesselNegative::with_route(&d, 1.5, 1.0, PoissonBesselRoute::TwoTerm).unwrap();
        let b = PoissonBesselNegative::with_route(&d, 1.5, 1.0, PoissonBesselRoute::HalfSplit).unwrap();
        for &x in &[0.0, 0.5, 2.0, 7.0] {
            let u = a.eval(x).unwrap();
            let v = b.eval(x).unwrap();
            assert!((u - v).abs() < 1e-4 * (1.0 + u.abs()), "x={x}: {u} vs {v}");
        }
    }

    #[test]
    fn two_term_rejects_large_order() {
        let d = DunklParams::new(0.5).unwrap();
        assert!(PoissonBesselNegative::with_route(&d, 2.5, 1.0, PoissonBesselRoute::TwoTerm).is_err());
        assert_eq!(PoissonBesselNegative::new(&d, 2.5, 1.0).unwrap().route, PoissonBesselRoute::HalfSplit);
    }
}
