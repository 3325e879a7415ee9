//! Real functions on the line with the metadata the quadratures need.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::specfun::DunklParams;
use crate::transforms::{ScaledTemperature, TemperatureRef};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type SpectrumFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayClass {
    Gaussian,
    Exponential,
    /// `|f(x)| ≤ coef |x|^{-power}` for large `|x|`.
    Polynomial { coef: f64, power: f64 },
}

/// `Σ coef · D_k^{dk} ∂_s^{dt} F_s` evaluated at `s = shift`. Attached to inputs
/// whose heat transform is again a finite combination of heat kernels: the heat
/// transform at time `t` is the same sum at `s = shift + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatForm {
    pub shift: f64,
    pub terms: Vec<HeatTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatTerm {
    pub coef: f64,
    /// Order of `D_k` applied, 0 or 1.
    pub dk: u8,
    pub dt: usize,
}

impl HeatForm {
    pub fn kernel(shift: f64) -> Self {
        Self {
            shift,
            terms: vec![HeatTerm { coef: 1.0, dk: 0, dt: 0 }],
        }
    }

    fn scaled(&self, a: f64) -> Self {
        Self {
            shift: self.shift,
            terms: self
                .terms
                .iter()
                .map(|t| HeatTerm { coef: a * t.coef, ..*t })
                .collect(),
        }
    }
}

#[derive(Clone)]
pub struct RealFunction {
    pub name: String,
    eval: RealFn,
    pub parity: Parity,
    pub decay: DecayClass,
    /// Beyond this radius the function is negligible (or tail-bounded).
    pub radius: f64,
    /// Length scale of the finest feature at the origin; zero for a singularity.
    pub feature_width: f64,
    derivative: Option<RealFn>,
    transform_hint: Option<SpectrumFn>,
    heat_form: Option<HeatForm>,
    /// `(x, t) ↦ G_t f(x)` when known in another form, equal to `f` at `t = 0`.
    heat_extension: Option<TemperatureRef>,
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFunction")
            .field("name", &self.name)
            .field("parity", &self.parity)
            .field("decay", &self.decay)
            .field("radius", &self.radius)
            .field("feature_width", &self.feature_width)
            .field("derivative", &self.derivative.is_some())
            .field("transform_hint", &self.transform_hint.is_some())
            .field("heat_form", &self.heat_form)
            .field("heat_extension", &self.heat_extension.as_ref().map(|u| u.provenance().to_string()))
            .finish()
    }
}

impl RealFunction {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(f),
            parity: Parity::None,
            decay: DecayClass::Gaussian,
            radius: 8.0,
            feature_width: 1.0,
            derivative: None,
            transform_hint: None,
            heat_form: None,
            heat_extension: None,
        }
    }

    pub fn parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn decay(mut self, decay: DecayClass, radius: f64) -> Self {
        self.decay = decay;
        self.radius = radius;
        self
    }

    pub fn feature_width(mut self, width: f64) -> Self {
        self.feature_width = width;
        self
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(d));
        self
    }

    pub fn with_transform(mut self, h: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        self.transform_hint = Some(Arc::new(h));
        self
    }

    pub fn without_transform(mut self) -> Self {
        self.transform_hint = None;
        self
    }

    pub fn with_heat_form(mut self, form: HeatForm) -> Self {
        self.heat_form = Some(form);
        self
    }

    pub fn with_heat_extension(mut self, u: TemperatureRef) -> Self {
        self.heat_extension = Some(u);
        self
    }

    /// Drops every closed-form shortcut, leaving only pointwise evaluation.
    pub fn opaque(mut self) -> Self {
        self.derivative = None;
        self.transform_hint = None;
        self.heat_form = None;
        self.heat_extension = None;
        self
    }

    pub fn heat_form(&self) -> Option<&HeatForm> {
        self.heat_form.as_ref()
    }

    pub fn heat_extension(&self) -> Option<&TemperatureRef> {
        self.heat_extension.as_ref()
    }

    /// `a f`.
    pub fn scaled(&self, a: f64) -> RealFunction {
        let f = self.clone();
        let mut out = RealFunction::new(format!("{a}*{}", self.name), move |x| a * f.eval(x))
            .parity(self.parity)
            .decay(self.decay, self.radius)
            .feature_width(self.feature_width);
        out.decay = match self.decay {
            DecayClass::Polynomial { coef, power } => DecayClass::Polynomial { coef: a.abs() * coef, power },
            d => d,
        };
        if let Some(d) = self.derivative.clone() {
            out = out.with_derivative(move |x| a * d(x));
        }
        if let Some(h) = self.transform_hint.clone() {
            out = out.with_transform(move |y| a * h(y));
        }
        out.heat_form = self.heat_form.as_ref().map(|h| h.scaled(a));
        out.heat_extension = self
            .heat_extension
            .as_ref()
            .map(|u| std::sync::Arc::new(ScaledTemperature::new(a, u.clone())) as TemperatureRef);
        out
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn derivative(&self) -> Option<&RealFn> {
        self.derivative.as_ref()
    }

    pub fn transform_hint(&self) -> Option<&SpectrumFn> {
        self.transform_hint.as_ref()
    }

    pub fn is_singular(&self) -> bool {
        self.feature_width == 0.0
    }

    /// Even part at `r`.
    #[inline]
    pub fn even_part(&self, r: f64) -> f64 {
        match self.parity {
            Parity::Even => self.eval(r),
            Parity::Odd => 0.0,
            Parity::None => 0.5 * (self.eval(r) + self.eval(-r)),
        }
    }

    /// Odd part at `r`.
    #[inline]
    pub fn odd_part(&self, r: f64) -> f64 {
        match self.parity {
            Parity::Even => 0.0,
            Parity::Odd => self.eval(r),
            Parity::None => 0.5 * (self.eval(r) - self.eval(-r)),
        }
    }

    /// `a f + b g`, keeping the coarser metadata of the two.
    pub fn combine(a: f64, f: &RealFunction, b: f64, g: &RealFunction) -> RealFunction {
        let (f1, g1) = (f.clone(), g.clone());
        let parity = if f.parity == g.parity { f.parity } else { Parity::None };
        let decay = match (f.decay, g.decay) {
            (DecayClass::Polynomial { coef: c1, power: p1 }, DecayClass::Polynomial { coef: c2, power: p2 }) => {
                DecayClass::Polynomial {
                    coef: a.abs() * c1 + b.abs() * c2,
                    power: p1.min(p2),
                }
            }
            (p @ DecayClass::Polynomial { .. }, _) | (_, p @ DecayClass::Polynomial { .. }) => p,
            (DecayClass::Exponential, _) | (_, DecayClass::Exponential) => DecayClass::Exponential,
            _ => DecayClass::Gaussian,
        };
        let mut out = RealFunction::new(format!("{a}*{}+{b}*{}", f.name, g.name), move |x| {
            a * f1.eval(x) + b * g1.eval(x)
        })
        .parity(parity)
        .decay(decay, f.radius.max(g.radius))
        .feature_width(f.feature_width.min(g.feature_width));
        if let (Some(df), Some(dg)) = (f.derivative.clone(), g.derivative.clone()) {
            out = out.with_derivative(move |x| a * df(x) + b * dg(x));
        }
        if let (Some(hf), Some(hg)) = (f.transform_hint.clone(), g.transform_hint.clone()) {
            out = out.with_transform(move |y| a * hf(y) + b * hg(y));
        }
        if let (Some(hf), Some(hg)) = (&f.heat_form, &g.heat_form) {
            if hf.shift == hg.shift {
                let mut terms = hf.scaled(a).terms;
                terms.extend(hg.scaled(b).terms);
                out.heat_form = Some(HeatForm { shift: hf.shift, terms });
            }
        }
        out
    }
}

/// `e^{-x^2}`.
pub fn gaussian(params: &DunklParams) -> RealFunction {
    let g = params.k + 0.5;
    let scale = 2f64.powf(-g);
    RealFunction::new("gaussian", |x| (-x * x).exp())
        .parity(Parity::Even)
        .decay(DecayClass::Gaussian, 6.5)
        .feature_width(1.0)
        .with_derivative(|x| -2.0 * x * (-x * x).exp())
        .with_transform(move |y| Complex64::new(scale * (-0.25 * y * y).exp(), 0.0))
        .with_heat_form(HeatForm {
            shift: 0.25,
            terms: vec![HeatTerm { coef: scale, dk: 0, dt: 0 }],
        })
}

/// `x e^{-x^2}`.
pub fn xgaussian(params: &DunklParams) -> RealFunction {
    let g = params.k + 0.5;
    let scale = 2f64.powf(-g);
    RealFunction::new("xgaussian", |x| x * (-x * x).exp())
        .parity(Parity::Odd)
        .decay(DecayClass::Gaussian, 6.5)
        .feature_width(1.0)
        .with_derivative(|x| (1.0 - 2.0 * x * x) * (-x * x).exp())
        .with_transform(move |y| Complex64::new(0.0, -0.5 * y * scale * (-0.25 * y * y).exp()))
        .with_heat_form(HeatForm {
            shift: 0.25,
            terms: vec![HeatTerm { coef: -0.5 * scale, dk: 1, dt: 0 }],
        })
}

/// `(1 - x^2) e^{-x^2/2}`.
pub fn hermite2_gaussian(params: &DunklParams) -> RealFunction {
    let k = params.k;
    RealFunction::new("hermite2_gaussian", |x| (1.0 - x * x) * (-0.5 * x * x).exp())
        .parity(Parity::Even)
        .decay(DecayClass::Gaussian, 9.5)
        .feature_width(1.0)
        .with_derivative(|x| x * (x * x - 3.0) * (-0.5 * x * x).exp())
        .with_transform(move |y| Complex64::new((y * y - 2.0 * k) * (-0.5 * y * y).exp(), 0.0))
        .with_heat_form(HeatForm {
            shift: 0.5,
            terms: vec![
                HeatTerm { coef: -1.0, dk: 0, dt: 1 },
                HeatTerm { coef: -2.0 * k, dk: 0, dt: 0 },
            ],
        })
}

/// The three Gaussian-class test inputs.
pub fn gaussian_suite(params: &DunklParams) -> Vec<RealFunction> {
    vec![gaussian(params), xgaussian(params), hermite2_gaussian(params)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parts_recombine() {
        let d = DunklParams::new(0.5).unwrap();
        let f = RealFunction::combine(1.0, &gaussian(&d), 2.0, &xgaussian(&d));
        assert_eq!(f.parity, Parity::None);
        for &x in &[-1.2, 0.3, 2.0] {
            assert!((f.even_part(x) + f.odd_part(x) - f.eval(x)).abs() < 1e-15);
        }
        let d2 = f.derivative().unwrap();
        assert!((d2(0.0) - 2.0).abs() < 1e-15);
    }
}
