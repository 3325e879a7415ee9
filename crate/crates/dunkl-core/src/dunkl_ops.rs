//! Dunkl derivative, intertwining operator, transform, translation and convolution.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{DecayClass, HeatForm, HeatTerm, Parity, RealFunction};
use crate::measure::{GridBuilder, GridProfile, WeightedGrid, EXPONENTIAL_RADIUS};
use crate::quadrature::{gauss_jacobi, gauss_legendre, mapped_jacobi};
use crate::specfun::{gamma, DunklParams, KernelEvaluator};

const FD_STEP: f64 = 1e-4;

fn first_derivative(f: &RealFunction, x: f64) -> f64 {
    match f.derivative() {
        Some(d) => d(x),
        None => {
            let h = FD_STEP;
            (-f.eval(x + 2.0 * h) + 8.0 * f.eval(x + h) - 8.0 * f.eval(x - h) + f.eval(x - 2.0 * h))
                / (12.0 * h)
        }
    }
}

/// `D_k f(x) = f'(x) + k (f(x) - f(-x)) / x`, with `(1+2k) f'(0)` at the origin.
pub fn dunkl_derivative(params: &DunklParams, f: &RealFunction, x: f64) -> Result<f64> {
    if f.derivative().is_none() && f.is_singular() {
        return Err(Error::Unsupported(format!(
            "`{}` is not smooth and has no closed-form derivative",
            f.name
        )));
    }
    let k = params.k;
    if x == 0.0 {
        return Ok((1.0 + 2.0 * k) * first_derivative(f, 0.0));
    }
    let jump = match f.parity {
        Parity::Even => 0.0,
        Parity::Odd => 2.0 * f.eval(x),
        Parity::None => f.eval(x) - f.eval(-x),
    };
    Ok(first_derivative(f, x) + k * jump / x)
}

/// `D_k f` as a function; parity flips and the transform picks up `iξ`.
pub fn dunkl_derivative_fn(params: &DunklParams, f: &RealFunction) -> Result<RealFunction> {
    if f.derivative().is_none() && f.is_singular() {
        return Err(Error::Unsupported(format!(
            "`{}` is not smooth and has no closed-form derivative",
            f.name
        )));
    }
    let p = *params;
    let g = f.clone();
    let parity = match f.parity {
        Parity::Even => Parity::Odd,
        Parity::Odd => Parity::Even,
        Parity::None => Parity::None,
    };
    let mut out = RealFunction::new(format!("D({})", f.name), move |x| {
        dunkl_derivative(&p, &g, x).unwrap_or(f64::NAN)
    })
    .parity(parity)
    .decay(f.decay, f.radius)
    .feature_width(f.feature_width);
    if let Some(h) = f.transform_hint().cloned() {
        out = out.with_transform(move |y| Complex64::new(0.0, y) * h(y));
    }
    if let Some(form) = f.heat_form() {
        // D_k^2 acts on heat kernels as ∂_t.
        let terms = form
            .terms
            .iter()
            .map(|t| match t.dk {
                0 => HeatTerm { dk: 1, ..*t },
                _ => HeatTerm { dk: 0, dt: t.dt + 1, ..*t },
            })
            .collect();
        out = out.with_heat_form(HeatForm { shift: form.shift, terms });
    }
    Ok(out)
}

/// Intertwining operator `V_k f(x)`.
pub fn intertwine(params: &DunklParams, f: &RealFunction, x: f64) -> Result<f64> {
    let k = params.k;
    if k == 0.0 {
        return Ok(f.eval(x));
    }
    let rule = gauss_jacobi(64, k - 1.0, k)?;
    let c = 2f64.powf(-2.0 * k) * gamma(2.0 * k + 1.0)? / (gamma(k)? * gamma(k + 1.0)?);
    Ok(c * rule.integrate(|t| f.eval(x * t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// Six-point Lagrange on the nearest grid nodes.
    LocalLagrange,
    None,
}

/// Complex samples on grid nodes.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub grid: Arc<WeightedGrid>,
    pub values: Vec<Complex64>,
    pub interpolation: Interpolation,
}

impl SampledFunction {
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Value at an arbitrary point; zero outside the grid.
    pub fn value_at(&self, x: f64) -> Result<Complex64> {
        let nodes = self.grid.nodes();
        let n = nodes.len();
        if x < nodes[0] || x > nodes[n - 1] {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let i = nodes.partition_point(|&v| v < x);
        if i < n && nodes[i] == x {
            return Ok(self.values[i]);
        }
        match self.interpolation {
            Interpolation::None => Err(Error::Unsupported(format!(
                "no sample at {x} and interpolation is disabled"
            ))),
            Interpolation::LocalLagrange => {
                let lo = i.saturating_sub(3).min(n.saturating_sub(6));
                let hi = (lo + 6).min(n);
                let mut acc = Complex64::new(0.0, 0.0);
                for j in lo..hi {
                    let mut l = 1.0;
                    for m in lo..hi {
                        if m != j {
                            l *= (x - nodes[m]) / (nodes[j] - nodes[m]);
                        }
                    }
                    acc += l * self.values[j];
                }
                Ok(acc)
            }
        }
    }

    /// Real part as a function, for feeding back into operators.
    pub fn to_function(&self, template: &RealFunction) -> RealFunction {
        let me = self.clone();
        RealFunction::new(format!("sampled({})", template.name), move |x| {
            me.value_at(x).map(|v| v.re).unwrap_or(f64::NAN)
        })
        .parity(template.parity)
        .decay(template.decay, template.radius)
        .feature_width(template.feature_width)
    }
}

/// Grid suited to integrate `f` against the weighted measure.
pub fn default_grid_for(params: &DunklParams, f: &RealFunction) -> Result<WeightedGrid> {
    let k = params.k;
    match f.decay {
        DecayClass::Polynomial { coef, power } => {
            let excess = power - 2.0 * k - 1.0;
            if excess <= 0.0 {
                return Err(Error::Unsupported(format!(
                    "`{}` is not integrable against |x|^{{2k}}",
                    f.name
                )));
            }
            let r = (coef / (1e-8 * excess)).powf(1.0 / excess).max(1e4);
            GridBuilder::new(k, r, GridProfile::HeavyTail)
                .origin_resolution(if f.is_singular() { 1e-14 } else { 0.05 * f.feature_width })
                .build()
        }
        _ if f.is_singular() => GridBuilder::new(k, f.radius.max(EXPONENTIAL_RADIUS), GridProfile::SingularOrigin).build(),
        DecayClass::Exponential => GridBuilder::new(k, f.radius.max(EXPONENTIAL_RADIUS), GridProfile::SingularOrigin)
            .origin_resolution(0.05 * f.feature_width)
            .build(),
        DecayClass::Gaussian => GridBuilder::new(k, f.radius.max(8.0), GridProfile::Smooth)
            .origin_resolution(0.05 * f.feature_width)
            .build(),
    }
}

/// `F_k f(y) = c_k ∫ f(x) E_k(x, -iy) |x|^{2k} dx` from pre-sampled values.
pub fn transform_samples(params: &DunklParams, grid: &WeightedGrid, vals: &[f64], y: f64) -> Result<Complex64> {
    let ev = KernelEvaluator::new(params);
    let cut = if y == 0.0 { f64::INFINITY } else { grid.oscillation_radius };
    let mut re = crate::measure::Neumaier::default();
    let mut im = crate::measure::Neumaier::default();
    for ((&x, &w), &v) in grid.nodes().iter().zip(grid.weights()).zip(vals) {
        if x.abs() > cut || v == 0.0 {
            continue;
        }
        if !v.is_finite() {
            return Err(Error::NonFinite(x));
        }
        let e = ev.oscillatory(x, y);
        re.add(w * v * e.re);
        im.add(w * v * e.im);
    }
    Ok(params.c_k * Complex64::new(re.sum(), im.sum()))
}

pub fn dunkl_transform_at(params: &DunklParams, grid: &WeightedGrid, f: &RealFunction, y: f64) -> Result<Complex64> {
    let vals = grid.sample(|x| f.eval(x));
    transform_samples(params, grid, &vals, y)
}

/// Transform sampled on the nodes of `freq`.
pub fn dunkl_transform(
    params: &DunklParams,
    grid: &WeightedGrid,
    f: &RealFunction,
    freq: Arc<WeightedGrid>,
) -> Result<SampledFunction> {
    let vals = grid.sample(|x| f.eval(x));
    let values = freq
        .nodes()
        .par_iter()
        .map(|&y| transform_samples(params, grid, &vals, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampledFunction {
        grid: freq,
        values,
        interpolation: Interpolation::LocalLagrange,
    })
}

/// `c_k ∫ g(ξ) E_k(x, iξ) |ξ|^{2k} dξ`.
pub fn dunkl_transform_inverse(params: &DunklParams, spectrum: &SampledFunction, x: f64) -> Result<Complex64> {
    let ev = KernelEvaluator::new(params);
    let grid = &spectrum.grid;
    let mut re = crate::measure::Neumaier::default();
    let mut im = crate::measure::Neumaier::default();
    for ((&y, &w), v) in grid.nodes().iter().zip(grid.weights()).zip(&spectrum.values) {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(y));
        }
        let p = v * ev.oscillatory(x, y).conj();
        re.add(w * p.re);
        im.add(w * p.im);
    }
    Ok(params.c_k * Complex64::new(re.sum(), im.sum()))
}

/// Spectrum of `f` on `freq`, from its closed form when available.
pub fn spectrum_of(
    params: &DunklParams,
    f: &RealFunction,
    freq: Arc<WeightedGrid>,
) -> Result<SampledFunction> {
    match f.transform_hint() {
        Some(h) => Ok(SampledFunction {
            values: freq.nodes().iter().map(|&y| h(y)).collect(),
            grid: freq,
            interpolation: Interpolation::LocalLagrange,
        }),
        None => {
            let grid = default_grid_for(params, f)?;
            dunkl_transform(params, &grid, f, freq)
        }
    }
}

/// Quadrature over `v = 1 - cos θ ∈ [0, 2]` absorbing `(v (2-v))^{k-1}`.
#[derive(Debug, Clone)]
struct VRule {
    v: Vec<f64>,
    w: Vec<f64>,
}

const MAX_LEVELS: usize = 27;

fn v_rule(k: f64, levels: usize) -> Result<VRule> {
    let a = k - 1.0;
    if levels == 0 {
        let r = gauss_jacobi(64, a, a)?;
        return Ok(VRule {
            v: r.nodes.iter().map(|s| 1.0 + s).collect(),
            w: r.weights.clone(),
        });
    }
    let mut v = Vec::new();
    let mut w = Vec::new();
    let outer = mapped_jacobi(32, a, 0.0, 1.0, 2.0)?;
    for (x, wt) in outer.nodes.iter().zip(&outer.weights) {
        v.push(*x);
        w.push(wt * x.powf(a));
    }
    let leg = gauss_legendre(16)?;
    let mut hi = 1.0f64;
    for _ in 0..levels {
        let lo = 0.25 * hi;
        let h = 0.5 * (hi - lo);
        for (s, wt) in leg.nodes.iter().zip(&leg.weights) {
            let x = lo + h * (1.0 + s);
            v.push(x);
            w.push(h * wt * (x * (2.0 - x)).powf(a));
        }
        hi = lo;
    }
    let inner = mapped_jacobi(16, 0.0, a, 0.0, hi)?;
    for (x, wt) in inner.nodes.iter().zip(&inner.weights) {
        v.push(*x);
        w.push(wt * (2.0 - x).powf(a));
    }
    Ok(VRule { v, w })
}

/// Generalized translation with cached angular rules.
#[derive(Debug)]
pub struct Translator {
    params: DunklParams,
    d_k: f64,
    rules: Vec<VRule>,
}

fn translators() -> &'static Mutex<HashMap<u64, Arc<Translator>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Translator>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Translator {
    pub fn new(params: &DunklParams) -> Result<Arc<Self>> {
        let key = params.k.to_bits();
        if let Some(t) = translators().lock().expect("translator cache").get(&key) {
            return Ok(t.clone());
        }
        let rules = if params.k > 0.0 {
            (0..=MAX_LEVELS).map(|l| v_rule(params.k, l)).collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        let t = Arc::new(Self {
            params: *params,
            d_k: params.d_k.unwrap_or(0.0),
            rules,
        });
        translators()
            .lock()
            .expect("translator cache")
            .insert(key, t.clone());
        Ok(t)
    }

    fn levels_for(&self, d: f64, s: f64, width: f64) -> usize {
        let v_min = 0.05 * (d * d + width * width) / s;
        if v_min >= 0.3 {
            return 0;
        }
        let l = (1.0 / v_min.max(1e-300)).ln() / 4f64.ln();
        (l.ceil() as usize).clamp(1, MAX_LEVELS)
    }

    /// `T_y f(x)`.
    pub fn translate(&self, y: f64, f: &RealFunction, x: f64) -> f64 {
        if self.params.k == 0.0 {
            return f.eval(x + y);
        }
        let prod = x * y;
        if prod == 0.0 {
            let r = (x * x + y * y).sqrt();
            if r == 0.0 {
                return f.eval(0.0);
            }
            return f.even_part(r) + f.odd_part(r) * (x + y) / r;
        }
        let sigma = prod.signum();
        let s = 2.0 * prod.abs();
        let d = x.abs() - y.abs();
        let rule = &self.rules[self.levels_for(d, s, f.feature_width)];
        let d2 = d * d;
        let mut acc = 0.0;
        let has_even = f.parity != Parity::Odd;
        let has_odd = f.parity != Parity::Even;
        for (&v, &w) in rule.v.iter().zip(&rule.w) {
            let g = (d2 + s * v).sqrt();
            let he = if sigma > 0.0 { v } else { 2.0 - v };
            let mut term = 0.0;
            if has_even {
                term += f.even_part(g) * he;
            }
            if has_odd && g >= 1e-14 {
                term += f.odd_part(g) * (x + y) * he / g;
            }
            acc += w * term;
        }
        self.d_k * acc
    }
}

pub fn translate(params: &DunklParams, y: f64, f: &RealFunction, x: f64) -> Result<f64> {
    Ok(Translator::new(params)?.translate(y, f, x))
}

/// `T_y f(x) - f(x)`.
pub fn difference(params: &DunklParams, y: f64, f: &RealFunction, x: f64) -> Result<f64> {
    Ok(translate(params, y, f, x)? - f.eval(x))
}

/// Integral remainder for `(T_x f - f)(y)`:
/// `∫_{-|x|}^{|x|} (sgn(x)/(2|x|^{2k}) + sgn(z)/(2|z|^{2k})) T_z(D_k f)(y) |z|^{2k} dz`.
/// At `k = 0` this is `∫_0^x f'(y+z) dz`.
pub fn taylor_remainder(params: &DunklParams, f: &RealFunction, x: f64, y: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let df = dunkl_derivative_fn(params, f)?;
    let tr = Translator::new(params)?;
    let k = params.k;
    let a = x.abs();
    let sx = x.signum();
    let term = |z: f64| tr.translate(z, &df, y);
    // sgn(x) |z|^{2k} / (2 |x|^{2k}) against a Jacobi rule, sgn(z)/2 against Legendre.
    let jac = mapped_jacobi(48, 0.0, 2.0 * k, 0.0, a)?;
    let leg = mapped_jacobi(48, 0.0, 0.0, 0.0, a)?;
    let mut s1 = 0.0;
    for (z, w) in jac.nodes.iter().zip(&jac.weights) {
        s1 += w * (term(*z) + term(-*z));
    }
    let mut s2 = 0.0;
    for (z, w) in leg.nodes.iter().zip(&leg.weights) {
        s2 += w * (term(*z) - term(-*z));
    }
    Ok(sx * s1 / (2.0 * a.powf(2.0 * k)) + 0.5 * s2)
}

fn conv_radius(k: f64, f: &RealFunction, g: &RealFunction, x: f64) -> f64 {
    match (f.decay, g.decay) {
        (DecayClass::Polynomial { coef: c1, power: p1 }, DecayClass::Polynomial { coef: c2, power: p2 }) => {
            let excess = p1 + p2 - 2.0 * k - 1.0;
            (c1 * c2 / 1e-12).powf(1.0 / excess).max(x.abs() + 50.0)
        }
        (DecayClass::Polynomial { .. }, _) => x.abs() + g.radius,
        (_, DecayClass::Polynomial { .. }) => x.abs() + f.radius,
        _ => x.abs() + f.radius.max(g.radius),
    }
}

/// Grid in `y` for `∫ T_x f(-y) g(y) |y|^{2k} dy`, graded at `0` and `±|x|`.
pub fn convolution_grid(params: &DunklParams, f: &RealFunction, g: &RealFunction, x: f64) -> Result<WeightedGrid> {
    let r = conv_radius(params.k, f, g, x);
    let origin = if g.is_singular() || (f.is_singular() && x.abs() < 1e-12) { 1e-30 } else { 0.05 * g.feature_width };
    let at_x = if f.is_singular() { 1e-14 } else { 0.05 * f.feature_width };
    GridBuilder::new(params.k, r, GridProfile::SingularOrigin)
        .origin_resolution(origin)
        .uniform_to(x.abs() + 12.0)
        .refine_at(x, at_x)
        .build()
}

/// `(f ∗ g)(x) = c_k ∫ T_x f(-y) g(y) |y|^{2k} dy` by direct double quadrature.
pub fn convolve(params: &DunklParams, f: &RealFunction, g: &RealFunction, x: f64) -> Result<f64> {
    let tr = Translator::new(params)?;
    let grid = convolution_grid(params, f, g, x)?;
    let vals: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|&y| {
            let gy = g.eval(y);
            if gy == 0.0 {
                0.0
            } else {
                tr.translate(x, f, -y) * gy
            }
        })
        .collect();
    Ok(params.c_k * grid.integrate_samples(&vals)?)
}

/// Transform-domain product `F_k^{-1}(F_k f · F_k g)(x)`.
pub fn convolve_spectral(
    params: &DunklParams,
    f: &RealFunction,
    g: &RealFunction,
    freq: Arc<WeightedGrid>,
    x: f64,
) -> Result<f64> {
    let a = spectrum_of(params, f, freq.clone())?;
    let b = spectrum_of(params, g, freq)?;
    let prod = SampledFunction {
        grid: a.grid.clone(),
        values: a.values.iter().zip(&b.values).map(|(p, q)| p * q).collect(),
        interpolation: Interpolation::LocalLagrange,
    };
    Ok(dunkl_transform_inverse(params, &prod, x)?.re)
}

/// Frequency lattice for Gaussian-class spectra.
pub fn frequency_grid(params: &DunklParams, radius: f64) -> Result<Arc<WeightedGrid>> {
    Ok(Arc::new(
        GridBuilder::new(params.k, radius, GridProfile::Smooth)
            .uniform_to(radius)
            .build()?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{gaussian, gaussian_suite, hermite2_gaussian, xgaussian};
    use crate::specfun::{dunkl_kernel, SeriesPolicy};
    use approx::assert_relative_eq;

    fn params(k: f64) -> DunklParams {
        DunklParams::new(k).unwrap()
    }

    #[test]
    fn derivative_at_origin_and_fallback() {
        let d = params(0.5);
        let f = xgaussian(&d);
        assert_relative_eq!(dunkl_derivative(&d, &f, 0.0).unwrap(), 2.0, max_relative = 1e-14);
        let bare = RealFunction::new("bare", |x| x * (-x * x).exp()).parity(Parity::Odd);
        for &x in &[-1.1, 0.4, 2.0] {
            let a = dunkl_derivative(&d, &f, x).unwrap();
            let b = dunkl_derivative(&d, &bare, x).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
        let singular = RealFunction::new("s", |x: f64| x.abs().sqrt()).feature_width(0.0);
        assert!(matches!(dunkl_derivative(&d, &singular, 1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn intertwiner_values() {
        for &k in &[0.25, 0.5, 1.5] {
            let d = params(k);
            let one = RealFunction::new("one", |_| 1.0);
            let id = RealFunction::new("x", |x| x);
            for &x in &[-2.0, 0.7, 1.3] {
                assert!((intertwine(&d, &one, x).unwrap() - 1.0).abs() < 1e-12);
                assert!((intertwine(&d, &id, x).unwrap() - x / (2.0 * k + 1.0)).abs() < 1e-12);
                for &l in &[1.0, -0.6, 2.0] {
                    let e = RealFunction::new("exp", move |t: f64| (l * t).exp());
                    let want = dunkl_kernel(&d, Complex64::new(l, 0.0), x, &SeriesPolicy::default()).unwrap().re;
                    assert!((intertwine(&d, &e, x).unwrap() - want).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn transform_matches_closed_forms() {
        for &k in &[0.0, 0.5, 1.5] {
            let d = params(k);
            for f in gaussian_suite(&d) {
                let grid = default_grid_for(&d, &f).unwrap();
                let h = f.transform_hint().unwrap();
                for &y in &[0.0, -0.5, 1.0, 3.0, 6.0] {
                    let got = dunkl_transform_at(&d, &grid, &f, y).unwrap();
                    assert!((got - h(y)).norm() < 1e-12, "{} k={k} y={y}: {got} vs {}", f.name, h(y));
                }
            }
        }
    }

    #[test]
    fn inverse_recovers_function() {
        let d = params(0.5);
        let freq = frequency_grid(&d, 14.0).unwrap();
        for f in gaussian_suite(&d) {
            let spec = spectrum_of(&d, &f.clone().without_transform(), freq.clone()).unwrap();
            for &x in &[-1.5, 0.0, 0.8] {
                let back = dunkl_transform_inverse(&d, &spec, x).unwrap();
                assert!((back.re - f.eval(x)).abs() < 1e-10 && back.im.abs() < 1e-10, "{}", f.name);
            }
        }
    }

    #[test]
    fn translation_identity_and_symmetry() {
        for &k in &[0.25, 0.5, 1.5] {
            let d = params(k);
            for f in gaussian_suite(&d) {
                for &x in &[-1.3, 0.2, 2.1] {
                    assert!((translate(&d, 0.0, &f, x).unwrap() - f.eval(x)).abs() < 1e-14);
                    for &y in &[-0.7, 0.5, 2.1] {
                        let a = translate(&d, y, &f, x).unwrap();
                        let b = translate(&d, x, &f, y).unwrap();
                        assert!((a - b).abs() < 1e-12, "{} k={k} x={x} y={y}", f.name);
                    }
                }
            }
        }
    }

    #[test]
    fn translation_of_kernel_exponential() {
        // T_y E(λ, ·)(x) = E(λ, x) E(λ, y)
        let d = params(0.5);
        let pol = SeriesPolicy::default();
        let l = 0.8;
        let e = RealFunction::new("E", move |t: f64| {
            dunkl_kernel(&DunklParams::new(0.5).unwrap(), Complex64::new(l, 0.0), t, &SeriesPolicy::default())
                .unwrap()
                .re
        });
        for &(x, y) in &[(0.5, 1.2), (-0.9, 0.4), (1.0, -1.0)] {
            let want = dunkl_kernel(&d, Complex64::new(l, 0.0), x, &pol).unwrap().re
                * dunkl_kernel(&d, Complex64::new(l, 0.0), y, &pol).unwrap().re;
            assert_relative_eq!(translate(&d, y, &e, x).unwrap(), want, max_relative = 1e-10);
        }
    }

    #[test]
    fn difference_matches_taylor_remainder() {
        let d = params(0.5);
        let f = gaussian(&d);
        let lhs = difference(&d, 0.2, &f, 0.3).unwrap();
        let rhs = taylor_remainder(&d, &f, 0.2, 0.3).unwrap();
        assert!((lhs - rhs).abs() < 1e-6, "{lhs} vs {rhs}");
        let g = hermite2_gaussian(&d);
        let lhs = difference(&d, -0.6, &g, 1.1).unwrap();
        let rhs = taylor_remainder(&d, &g, -0.6, 1.1).unwrap();
        assert!((lhs - rhs).abs() < 1e-6, "{lhs} vs {rhs}");
    }

    #[test]
    fn convolution_routes_agree() {
        for &k in &[0.0, 0.5, 1.5] {
            let d = params(k);
            let freq = frequency_grid(&d, 14.0).unwrap();
            let f = gaussian(&d);
            let g = hermite2_gaussian(&d);
            for &x in &[-1.0, 0.0, 0.7, 2.0] {
                let a = convolve(&d, &f, &g, x).unwrap();
                let b = convolve_spectral(&d, &f, &g, freq.clone(), x).unwrap();
                let c = convolve(&d, &g, &f, x).unwrap();
                assert!((a - b).abs() < 1e-10, "k={k} x={x}: {a} vs {b}");
                assert!((a - c).abs() < 1e-10, "commutativity k={k} x={x}");
            }
        }
    }

    #[test]
    fn sampled_function_interpolates() {
        let d = params(0.5);
        let grid = Arc::new(GridBuilder::new(0.5, 8.0, GridProfile::Smooth).build().unwrap());
        let vals = grid.nodes().iter().map(|&x| Complex64::new((-x * x).exp(), 0.0)).collect();
        let s = SampledFunction { grid, values: vals, interpolation: Interpolation::LocalLagrange };
        for &x in &[-2.345, 0.0001, 0.5, 3.3] {
            assert!((s.value_at(x).unwrap().re - (-x * x).exp()).abs() < 1e-9);
        }
        let f = s.to_function(&gaussian(&d));
        assert!((f.eval(1.234) - (-1.234f64 * 1.234).exp()).abs() < 1e-9);
    }
}
