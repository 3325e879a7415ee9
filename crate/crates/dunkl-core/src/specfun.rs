//! Gamma, normalized Bessel, Macdonald and Dunkl kernel functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Controls for power series and their asymptotic replacements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPolicy {
    pub max_terms: usize,
    pub abs_tol: f64,
    /// Above this modulus the large-argument expansion is preferred.
    pub switch_radius: f64,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        Self {
            max_terms: 600,
            abs_tol: 1e-17,
            switch_radius: 12.0,
        }
    }
}

impl SeriesPolicy {
    pub fn new(max_terms: usize, abs_tol: f64, switch_radius: f64) -> Result<Self> {
        if max_terms < 16 {
            return Err(Error::InvalidParameter(format!(
                "max_terms must be at least 16, got {max_terms}"
            )));
        }
        if !(abs_tol > 0.0 && abs_tol <= 1e-6) {
            return Err(Error::InvalidParameter(format!(
                "abs_tol must lie in (0, 1e-6], got {abs_tol}"
            )));
        }
        if !(switch_radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "switch_radius must be positive, got {switch_radius}"
            )));
        }
        Ok(Self {
            max_terms,
            abs_tol,
            switch_radius,
        })
    }
}

/// Multiplicity parameter and the normalizing constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DunklParams {
    pub k: f64,
    /// Transform constant `1 / (2^{k+1/2} Γ(k+1/2))`.
    pub c_k: f64,
    /// Translation constant `Γ(k+1/2) / (Γ(k) Γ(1/2))`, absent for `k = 0`.
    pub d_k: Option<f64>,
    /// Poisson constant `2^{k+1/2} Γ(k+1) / Γ(1/2)`.
    pub c_tilde_k: f64,
}

impl DunklParams {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "multiplicity must be finite and non-negative, got {k}"
            )));
        }
        let g_half = gamma(k + 0.5)?;
        let two_pow = 2f64.powf(k + 0.5);
        let d_k = if k > 0.0 {
            Some(g_half / (gamma(k)? * SQRT_PI))
        } else {
            None
        };
        Ok(Self {
            k,
            c_k: 1.0 / (two_pow * g_half),
            d_k,
            c_tilde_k: two_pow * gamma(k + 1.0)? / SQRT_PI,
        })
    }

    pub fn is_classical(&self) -> bool {
        self.k == 0.0
    }

    /// Exponent of the weight `|x|^{2k}`.
    pub fn weight_exponent(&self) -> f64 {
        2.0 * self.k
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// `sin(πx)` with exact reduction to the nearest integer.
pub fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn gamma_pos(x: f64) -> f64 {
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    SQRT_2PI * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// Euler gamma function.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain { what: "gamma", arg: x });
    }
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if x < 0.5 {
        Ok(PI / (sin_pi(x) * gamma_pos(1.0 - x)))
    } else {
        Ok(gamma_pos(x))
    }
}

/// `1/Γ(x)`, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else if x < 0.5 {
        sin_pi(x) * gamma_pos(1.0 - x) / PI
    } else {
        1.0 / gamma_pos(x)
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            what: "ln_gamma",
            arg: x,
        });
    }
    if x < 0.5 {
        return Ok((PI / sin_pi(x)).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// Result of a series or asymptotic evaluation with its own error estimate.
struct Approx<T> {
    value: T,
    err: f64,
}

fn series_j_real(alpha: f64, r: f64, policy: &SeriesPolicy) -> Result<Approx<f64>> {
    let q = -0.25 * r * r;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut biggest = 1.0f64;
    for n in 1..=policy.max_terms {
        let nf = n as f64;
        term *= q / (nf * (nf + alpha));
        sum += term;
        biggest = biggest.max(term.abs());
        if term.abs() <= policy.abs_tol * sum.abs().max(1e-300) && nf > (-q).sqrt() {
            return Ok(Approx {
                value: sum,
                err: 2.0 * f64::EPSILON * biggest + term.abs(),
            });
        }
    }
    Err(Error::NonConvergence {
        what: "normalized Bessel series",
        terms: policy.max_terms,
        partial: sum,
        last: term,
    })
}

/// Hankel expansion of `J_ν(r)` for real `r > 0`, returned normalized.
fn hankel_j_real(alpha: f64, r: f64, gamma_ap1: f64, policy: &SeriesPolicy) -> Approx<f64> {
    let mu = 4.0 * alpha * alpha;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..policy.max_terms {
        let kf = k as f64;
        let factor = (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * r);
        let next = term * factor;
        if next.abs() >= term.abs() && k > 1 {
            last = term.abs();
            break;
        }
        term = next;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term == 0.0 || term.abs() < policy.abs_tol {
            last = term.abs();
            break;
        }
        last = term.abs();
    }
    let omega = r - 0.5 * alpha * PI - 0.25 * PI;
    let amp = (2.0 / (PI * r)).sqrt();
    let norm = gamma_ap1 * (0.5 * r).powf(-alpha);
    Approx {
        value: norm * amp * (p * omega.cos() - q * omega.sin()),
        err: norm * amp * last,
    }
}

/// Normalized Bessel function `j_α(z) = Γ(α+1) (z/2)^{-α} J_α(z)` for complex `z`.
pub fn bessel_j_normalized(alpha: f64, z: Complex64, policy: &SeriesPolicy) -> Result<Complex64> {
    if !(alpha >= -0.5) {
        return Err(Error::Domain {
            what: "bessel_j_normalized order",
            arg: alpha,
        });
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain {
            what: "bessel_j_normalized argument",
            arg: z.norm(),
        });
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if z.im == 0.0 {
        return Ok(Complex64::new(j_real(alpha, z.re.abs(), policy)?, 0.0));
    }
    let r = z.norm();
    let series = series_j_complex(alpha, z, policy);
    if r <= policy.switch_radius {
        return series.map(|a| a.value);
    }
    let asym = hankel_j_complex(alpha, z, policy)?;
    match series {
        Ok(s) if s.err < asym.err => Ok(s.value),
        _ => Ok(asym.value),
    }
}

fn series_j_complex(alpha: f64, z: Complex64, policy: &SeriesPolicy) -> Result<Approx<Complex64>> {
    let q = -0.25 * z * z;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut biggest = 1.0f64;
    let rq = q.norm();
    for n in 1..=policy.max_terms {
        let nf = n as f64;
        term *= q / (nf * (nf + alpha));
        sum += term;
        biggest = biggest.max(term.norm());
        if term.norm() <= policy.abs_tol * sum.norm().max(1e-300) && nf > rq.sqrt() {
            return Ok(Approx {
                value: sum,
                err: 2.0 * f64::EPSILON * biggest + term.norm(),
            });
        }
    }
    Err(Error::NonConvergence {
        what: "normalized Bessel series",
        terms: policy.max_terms,
        partial: sum.norm(),
        last: term.norm(),
    })
}

fn hankel_j_complex(alpha: f64, z: Complex64, policy: &SeriesPolicy) -> Result<Approx<Complex64>> {
    // j_α is even, so move to the right half plane.
    let w = if z.re < 0.0 || (z.re == 0.0 && z.im < 0.0) {
        -z
    } else {
        z
    };
    let mu = 4.0 * alpha * alpha;
    let mut p = Complex64::new(1.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..policy.max_terms {
        let kf = k as f64;
        let factor = (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * w);
        let next = term * factor;
        if next.norm() >= term.norm() && k > 1 {
            last = term.norm();
            break;
        }
        term = next;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        last = term.norm();
        if term.norm() == 0.0 || term.norm() < policy.abs_tol {
            break;
        }
    }
    let omega = w - 0.5 * alpha * PI - 0.25 * PI;
    let amp = (2.0 / (PI * w)).sqrt();
    let norm = gamma(alpha + 1.0)? * (0.5 * w).powf(-alpha);
    let cw = omega.cos();
    let sw = omega.sin();
    let scale = (norm * amp).norm() * cw.norm().max(sw.norm());
    Ok(Approx {
        value: norm * amp * (p * cw - q * sw),
        err: scale * last,
    })
}

/// `j_α(r)` for real `r ≥ 0`.
pub fn j_real(alpha: f64, r: f64, policy: &SeriesPolicy) -> Result<f64> {
    let r = r.abs();
    if r == 0.0 {
        return Ok(1.0);
    }
    if alpha == -0.5 {
        return Ok(r.cos());
    }
    if r <= policy.switch_radius {
        return Ok(series_j_real(alpha, r, policy)?.value);
    }
    let asym = hankel_j_real(alpha, r, gamma(alpha + 1.0)?, policy);
    if asym.err <= 1e-14 * asym.value.abs().max((0.5 * r).powf(-alpha - 0.5)) {
        return Ok(asym.value);
    }
    match series_j_real(alpha, r, policy) {
        Ok(s) if s.err < asym.err => Ok(s.value),
        _ => Ok(asym.value),
    }
}

/// `e^{-r} j_α(i r)` for real `r ≥ 0`; the series has positive terms only.
pub fn j_imag_scaled(alpha: f64, r: f64, policy: &SeriesPolicy) -> Result<f64> {
    let r = r.abs();
    if r == 0.0 {
        return Ok(1.0);
    }
    if r <= 40.0 {
        let q = 0.25 * r * r;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for n in 1..=policy.max_terms {
            let nf = n as f64;
            term *= q / (nf * (nf + alpha));
            sum += term;
            if term <= policy.abs_tol * sum && nf > r {
                return Ok(sum * (-r).exp());
            }
        }
        return Err(Error::NonConvergence {
            what: "modified normalized Bessel series",
            terms: policy.max_terms,
            partial: sum,
            last: term,
        });
    }
    let mu = 4.0 * alpha * alpha;
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    for k in 1..policy.max_terms {
        let kf = k as f64;
        let next = -term * (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * r);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < policy.abs_tol {
            break;
        }
    }
    Ok(gamma(alpha + 1.0)? * (0.5 * r).powf(-alpha) * sum / (2.0 * PI * r).sqrt())
}

/// Modified Bessel function of the first kind, `Σ (x/2)^{β+2n} / (n! Γ(β+n+1))`.
pub fn bessel_i(beta: f64, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain { what: "bessel_i", arg: x });
    }
    let h = 0.5 * x;
    let q = h * h;
    let mut sum = 0.0;
    let mut last = 0.0;
    for n in 0..policy.max_terms {
        let term = h.powf(beta + 2.0 * n as f64) * rgamma(beta + n as f64 + 1.0) / gamma_pos(n as f64 + 1.0);
        sum += term;
        last = term;
        if n as f64 > q && term.abs() <= policy.abs_tol * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "bessel_i series",
        terms: policy.max_terms,
        partial: sum,
        last,
    })
}

/// Step used to regularize integer orders in the difference formula.
pub const K_INTEGER_STEP: f64 = 1e-6;

/// Macdonald function `K_ν(x)` for `x > 0`.
///
/// Small arguments use `(π/2)(I_{-ν} - I_ν)/sin(νπ)`; integer orders are
/// averaged over `ν ± 1e-6`. Half-integer orders use the elementary closed
/// form. Larger arguments use Steed's continued fraction, where the
/// difference formula cancels catastrophically.
pub fn bessel_k(nu: f64, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { what: "bessel_k", arg: x });
    }
    if !nu.is_finite() {
        return Err(Error::Domain {
            what: "bessel_k order",
            arg: nu,
        });
    }
    let nu = nu.abs();
    let twice = 2.0 * nu;
    if twice == twice.round() && twice.round() as i64 % 2 == 1 {
        return Ok(k_half_integer(nu, x));
    }
    if x > 1.0 {
        return k_steed(nu, x);
    }
    let n = nu.round();
    if (nu - n).abs() < K_INTEGER_STEP {
        let a = k_difference(n + K_INTEGER_STEP, x, policy)?;
        let b = k_difference(n - K_INTEGER_STEP, x, policy)?;
        return Ok(0.5 * (a + b));
    }
    k_difference(nu, x, policy)
}

fn k_difference(nu: f64, x: f64, policy: &SeriesPolicy) -> Result<f64> {
    let im = bessel_i(-nu, x, policy)?;
    let ip = bessel_i(nu, x, policy)?;
    Ok(0.5 * PI * (im - ip) / sin_pi(nu))
}

fn k_half_integer(nu: f64, x: f64) -> f64 {
    let k_half = (PI / (2.0 * x)).sqrt() * (-x).exp();
    let mut prev = k_half;
    let mut cur = k_half;
    let mut order = 0.5;
    while order < nu - 0.25 {
        let next = prev + 2.0 * order / x * cur;
        prev = cur;
        cur = next;
        order += 1.0;
    }
    cur
}

fn k_steed(nu: f64, x: f64) -> Result<f64> {
    let nl = (nu + 0.5).floor();
    let xmu = nu - nl;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - xmu2;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "bessel_k continued fraction",
            terms: 100_000,
            partial: s,
            last: delh,
        });
    }
    h *= a1;
    let mut kmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let mut k1 = kmu * (xmu + x + 0.5 - h) * xi;
    let xi2 = 2.0 * xi;
    for i in 1..=(nl as i64) {
        let next = (xmu + i as f64) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    Ok(kmu)
}

/// Dunkl kernel `E_k(λ, x) = j_{k-1/2}(iλx) + λx/(2k+1) j_{k+1/2}(iλx)`.
pub fn dunkl_kernel(
    params: &DunklParams,
    lambda: Complex64,
    x: f64,
    policy: &SeriesPolicy,
) -> Result<Complex64> {
    let z = lambda * x;
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let k = params.k;
    let iz = Complex64::i() * z;
    let even = bessel_j_normalized(k - 0.5, iz, policy)?;
    let odd = bessel_j_normalized(k + 0.5, iz, policy)?;
    Ok(even + z / (2.0 * k + 1.0) * odd)
}

/// `∂_x E_k(λ, x)` by termwise differentiation of the series.
pub fn dunkl_kernel_dx(
    params: &DunklParams,
    lambda: Complex64,
    x: f64,
    policy: &SeriesPolicy,
) -> Result<Complex64> {
    let k = params.k;
    let z = lambda * x;
    let iz = Complex64::i() * z;
    let a = 2.0 * k + 1.0;
    let j1 = bessel_j_normalized(k + 0.5, iz, policy)?;
    let j2 = bessel_j_normalized(k + 1.5, iz, policy)?;
    Ok(lambda * ((z + 1.0) / a * j1 + z * z / (a * (2.0 * k + 3.0)) * j2))
}

/// Pre-resolved evaluator for the kernel at real and imaginary spectral parameters.
#[derive(Debug, Clone, Copy)]
pub struct KernelEvaluator {
    pub k: f64,
    policy: SeriesPolicy,
}

impl KernelEvaluator {
    pub fn new(params: &DunklParams) -> Self {
        Self {
            k: params.k,
            policy: SeriesPolicy::default(),
        }
    }

    pub fn with_policy(params: &DunklParams, policy: SeriesPolicy) -> Self {
        Self { k: params.k, policy }
    }

    /// `E_k(x, -iy)`, the kernel of the forward transform.
    pub fn oscillatory(&self, x: f64, y: f64) -> Complex64 {
        let z = x * y;
        if z == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let k = self.k;
        let r = z.abs();
        let even = j_real(k - 0.5, r, &self.policy).unwrap_or(f64::NAN);
        let odd = j_real(k + 0.5, r, &self.policy).unwrap_or(f64::NAN);
        Complex64::new(even, -z / (2.0 * k + 1.0) * odd)
    }

    /// `e^{-|z|} E_k(1, z)` for real `z`.
    pub fn scaled_real(&self, z: f64) -> f64 {
        if z == 0.0 {
            return 1.0;
        }
        let k = self.k;
        let r = z.abs();
        let even = j_imag_scaled(k - 0.5, r, &self.policy).unwrap_or(f64::NAN);
        let odd = j_imag_scaled(k + 0.5, r, &self.policy).unwrap_or(f64::NAN);
        even + z / (2.0 * k + 1.0) * odd
    }
}

/// Binomial coefficient as a float.
pub fn binomial(n: u32, i: u32) -> f64 {
    let mut c = 1.0;
    for j in 0..i {
        c *= (n - j) as f64 / (j + 1) as f64;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pol() -> SeriesPolicy {
        SeriesPolicy::default()
    }

    // ∫_0^∞ t^{a-1} e^{-t} dt by the trapezoid rule in s = ln t.
    fn gamma_oracle(a: f64) -> f64 {
        if a < 1.0 {
            return gamma_oracle(a + 1.0) / a;
        }
        let h = 0.01;
        let mut s = -60.0;
        let mut sum = 0.0;
        while s < 6.0 {
            sum += (a * s - s.exp()).exp();
            s += h;
        }
        sum * h
    }

    // ∫_0^∞ e^{-x cosh t} cosh(νt) dt.
    fn k_oracle(nu: f64, x: f64) -> f64 {
        let h: f64 = 1e-3;
        let mut sum = 0.5 * (-x).exp();
        let mut t: f64 = h;
        loop {
            let v = (-x * t.cosh()).exp() * (nu * t).cosh();
            sum += v;
            if v < 1e-300 || t > 50.0 {
                break;
            }
            t += h;
        }
        sum * h
    }

    #[test]
    fn gamma_reference_values() {
        assert_relative_eq!(gamma(0.5).unwrap(), SQRT_PI, max_relative = 1e-14);
        assert_relative_eq!(gamma(1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(2.5).unwrap(), gamma_oracle(2.5), max_relative = 1e-10);
        assert_relative_eq!(gamma(5.0).unwrap(), 24.0, max_relative = 1e-13);
        assert_relative_eq!(gamma(-0.5).unwrap(), -2.0 * SQRT_PI, max_relative = 1e-13);
    }

    #[test]
    fn gamma_matches_oracle_on_range() {
        for &a in &[1e-3, 0.1, 0.7, 3.3, 11.2, 27.5, 49.0] {
            let o = gamma_oracle(a);
            assert_relative_eq!(gamma(a).unwrap(), o, max_relative = 1e-12);
            assert_relative_eq!(ln_gamma(a).unwrap(), o.ln(), epsilon = 1e-12);
        }
    }

    #[test]
    fn gamma_pole_is_an_error() {
        assert!(matches!(gamma(0.0), Err(Error::GammaPole(_))));
        assert!(matches!(gamma(-3.0), Err(Error::GammaPole(_))));
        assert_eq!(rgamma(-2.0), 0.0);
    }

    #[test]
    fn normalized_bessel_special_cases() {
        let p = pol();
        assert_eq!(bessel_j_normalized(0.3, Complex64::new(0.0, 0.0), &p).unwrap(), Complex64::new(1.0, 0.0));
        for &x in &[0.1, 1.0, 5.0, 11.9, 12.5, 30.0, 100.0] {
            let v = bessel_j_normalized(-0.5, Complex64::new(x, 0.0), &p).unwrap();
            assert!((v.re - x.cos()).abs() < 1e-12, "x = {x}");
            // j_{1/2}(x) = sin(x)/x
            let s = j_real(0.5, x, &p).unwrap();
            assert!((s - x.sin() / x).abs() < 1e-12, "x = {x}: {s}");
        }
        let v = bessel_j_normalized(0.5, Complex64::new(0.0, 1.0), &p).unwrap();
        assert_relative_eq!(v.re, 1f64.sinh(), max_relative = 1e-13);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn normalized_bessel_imaginary_large() {
        let p = pol();
        for &y in &[13.0, 20.0, 35.0] {
            let v = bessel_j_normalized(0.5, Complex64::new(0.0, y), &p).unwrap();
            assert_relative_eq!(v.re, y.sinh() / y, max_relative = 1e-11);
            let s = j_imag_scaled(0.5, y, &p).unwrap();
            assert_relative_eq!(s, y.sinh() / y * (-y).exp(), max_relative = 1e-12);
        }
        let s = j_imag_scaled(-0.5, 60.0, &p).unwrap();
        assert_relative_eq!(s, 0.5 * (1.0 + (-120f64).exp()), max_relative = 1e-13);
    }

    #[test]
    fn real_route_switch_is_continuous() {
        let p = pol();
        for &a in &[0.0, 0.25, 1.0, 2.0] {
            let below = series_j_real(a, 12.0, &p).unwrap().value;
            let above = hankel_j_real(a, 12.0, gamma(a + 1.0).unwrap(), &p).value;
            assert!((below - above).abs() < 1e-9, "alpha {a}: {below} vs {above}");
        }
    }

    #[test]
    fn order_below_minus_half_is_rejected() {
        assert!(bessel_j_normalized(-0.7, Complex64::new(1.0, 0.0), &pol()).is_err());
    }

    #[test]
    fn nonconvergence_reports_partial_sum() {
        let tight = SeriesPolicy::new(16, 1e-12, 100.0).unwrap();
        match bessel_j_normalized(0.0, Complex64::new(40.0, 1.0), &tight) {
            Err(Error::NonConvergence { terms, .. }) => assert_eq!(terms, 16),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn macdonald_reference_values() {
        let p = pol();
        let k = bessel_k(0.5, 1.0, &p).unwrap();
        assert!((k - 0.461_068_504_4).abs() < 1e-10);
        assert_relative_eq!(k, (PI / 2.0).sqrt() * (-1f64).exp(), max_relative = 1e-14);
        assert_eq!(bessel_k(-1.3, 0.8, &p).unwrap(), bessel_k(1.3, 0.8, &p).unwrap());
        assert_relative_eq!(bessel_k(2.3, 0.7, &p).unwrap(), k_oracle(2.3, 0.7), max_relative = 1e-8);
        assert!(matches!(bessel_k(1.0, 0.0, &p), Err(Error::Domain { .. })));
    }

    #[test]
    fn macdonald_matches_integral_over_range() {
        let p = pol();
        for &nu in &[0.0, 0.3, 1.0, 1.75, 2.0, 3.6, 7.0, 10.0] {
            for &x in &[1e-3, 0.05, 0.4, 0.99, 1.01, 2.0, 5.5, 12.0, 30.0] {
                let o = k_oracle(nu, x);
                let v = bessel_k(nu, x, &p).unwrap();
                assert!(((v - o) / o).abs() < 1e-9, "nu {nu} x {x}: {v} vs {o}");
            }
        }
    }

    fn brute_kernel(k: f64, z: Complex64) -> Complex64 {
        let mut a = Complex64::new(1.0, 0.0);
        let mut sum = a;
        for n in 1..200 {
            let odd = if n % 2 == 1 { 2.0 * k } else { 0.0 };
            a = a * z / (n as f64 + odd);
            sum += a;
        }
        sum
    }

    #[test]
    fn dunkl_kernel_values() {
        let p = pol();
        let d0 = DunklParams::new(0.0).unwrap();
        let e = dunkl_kernel(&d0, Complex64::new(1.0, 0.0), 1.0, &p).unwrap();
        assert_relative_eq!(e.re, std::f64::consts::E, max_relative = 1e-14);
        let d = DunklParams::new(0.5).unwrap();
        assert_eq!(dunkl_kernel(&d, Complex64::new(2.0, 1.0), 0.0, &p).unwrap(), Complex64::new(1.0, 0.0));
        for &(l, x) in &[(Complex64::new(1.0, 0.0), 1.3), (Complex64::new(0.0, -1.0), 2.0), (Complex64::new(0.7, 0.4), -1.9)] {
            let v = dunkl_kernel(&d, l, x, &p).unwrap();
            let o = brute_kernel(0.5, l * x);
            assert!((v - o).norm() < 1e-12, "{v} vs {o}");
        }
    }

    #[test]
    fn kernel_evaluator_agrees_with_general_route() {
        let p = pol();
        for &k in &[0.25, 0.5, 1.5] {
            let d = DunklParams::new(k).unwrap();
            let ev = KernelEvaluator::new(&d);
            for &(x, y) in &[(0.3, 2.0), (-1.5, 3.0), (7.0, 4.0), (-20.0, 1.5)] {
                let a = ev.oscillatory(x, y);
                let b = dunkl_kernel(&d, Complex64::new(0.0, -y), x, &p).unwrap();
                assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()), "k {k} ({x},{y})");
            }
            for &z in &[0.5, -3.0, 11.0, -25.0] {
                let a = ev.scaled_real(z);
                let b = brute_kernel(k, Complex64::new(z, 0.0)).re * (-z.abs()).exp();
                assert!((a - b).abs() < 1e-11 * b.abs().max(1e-3), "k {k} z {z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn constants_for_half() {
        let d = DunklParams::new(0.5).unwrap();
        assert_relative_eq!(d.c_k, 0.5, max_relative = 1e-14);
        assert_relative_eq!(d.d_k.unwrap(), 1.0 / PI.sqrt() / SQRT_PI, max_relative = 1e-14);
        assert_relative_eq!(d.c_k * d.c_tilde_k * 2.0, 1.0, max_relative = 1e-13);
        let d0 = DunklParams::new(0.0).unwrap();
        assert!(d0.d_k.is_none());
    }
}
