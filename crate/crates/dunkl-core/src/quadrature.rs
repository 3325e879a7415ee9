//! Gauss rules for Jacobi and Laguerre weights.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::specfun::ln_gamma;

/// Nodes and weights of an interpolatory rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

type Key = (u8, usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<Key, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(key: Key, build: impl FnOnce() -> Result<GaussRule>) -> Result<Arc<GaussRule>> {
    if let Some(r) = cache().lock().expect("rule cache").get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(build()?);
    cache()
        .lock()
        .expect("rule cache")
        .insert(key, rule.clone());
    Ok(rule)
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Result<Arc<GaussRule>> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss–Jacobi rule on `[-1, 1]` for the weight `(1-x)^a (1+x)^b`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<Arc<GaussRule>> {
    if n == 0 || !(a > -1.0) || !(b > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "Gauss–Jacobi needs n > 0 and exponents > -1 (n = {n}, a = {a}, b = {b})"
        )));
    }
    cached((0, n, a.to_bits(), b.to_bits()), || build_jacobi(n, a, b))
}

/// Generalized Gauss–Laguerre rule on `[0, ∞)` for the weight `x^a e^{-x}`.
pub fn gauss_laguerre(n: usize, a: f64) -> Result<Arc<GaussRule>> {
    if n == 0 || !(a > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "Gauss–Laguerre needs n > 0 and a > -1 (n = {n}, a = {a})"
        )));
    }
    cached((1, n, a.to_bits(), 0), || build_laguerre(n, a))
}

fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = off[i];
            m[(i + 1, i)] = off[i];
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    ev
}

fn jacobi_p(n: usize, a: f64, b: f64, x: f64) -> (f64, f64) {
    // Returns (P_n, P_{n-1}).
    let mut p0 = 1.0;
    if n == 0 {
        return (p0, 0.0);
    }
    let mut p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for m in 2..=n {
        let m = m as f64;
        let c = 2.0 * m + a + b;
        let a1 = 2.0 * m * (m + a + b) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + a * a - b * b);
        let a3 = 2.0 * (m + a - 1.0) * (m + b - 1.0) * c;
        let p2 = (a2 * p1 - a3 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

fn jacobi_dp(n: usize, a: f64, b: f64, x: f64) -> (f64, f64) {
    let (p, pm) = jacobi_p(n, a, b, x);
    let nf = n as f64;
    let c = 2.0 * nf + a + b;
    let d = (nf * ((a - b) - c * x) * p + 2.0 * (nf + a) * (nf + b) * pm) / (c * (1.0 - x * x));
    (p, d)
}

fn build_jacobi(n: usize, a: f64, b: f64) -> Result<GaussRule> {
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let i_f = i as f64;
        let c = 2.0 * i_f + a + b;
        diag.push(if i == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (c * (c + 2.0))
        });
        if i + 1 < n {
            let m = i_f + 1.0;
            let c = 2.0 * m + a + b;
            let beta = if m == 1.0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                4.0 * m * (m + a) * (m + b) * (m + a + b) / (c * c * (c + 1.0) * (c - 1.0))
            };
            off.push(beta.sqrt());
        }
    }
    let mut nodes = tridiagonal_eigenvalues(&diag, &off);
    let nf = n as f64;
    let log_c = ln_gamma(nf + a + 1.0)? + ln_gamma(nf + b + 1.0)?
        - ln_gamma(nf + a + b + 1.0)?
        - ln_gamma(nf + 1.0)?
        + (a + b + 1.0) * std::f64::consts::LN_2;
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, d) = jacobi_dp(n, a, b, *x);
            let step = p / d;
            *x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = jacobi_dp(n, a, b, *x);
        weights.push((log_c - ((1.0 - *x * *x) * d * d).ln()).exp());
    }
    Ok(GaussRule { nodes, weights })
}

fn laguerre_l(n: usize, a: f64, x: f64) -> (f64, f64) {
    let mut l0 = 1.0;
    if n == 0 {
        return (l0, 0.0);
    }
    let mut l1 = 1.0 + a - x;
    for m in 2..=n {
        let m = m as f64;
        let l2 = ((2.0 * m - 1.0 + a - x) * l1 - (m - 1.0 + a) * l0) / m;
        l0 = l1;
        l1 = l2;
    }
    (l1, l0)
}

fn build_laguerre(n: usize, a: f64) -> Result<GaussRule> {
    let diag: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 + a + 1.0).collect();
    let off: Vec<f64> = (1..n)
        .map(|i| (i as f64 * (i as f64 + a)).sqrt())
        .collect();
    let mut nodes = tridiagonal_eigenvalues(&diag, &off);
    let nf = n as f64;
    let log_c = ln_gamma(nf + a + 1.0)? - ln_gamma(nf + 1.0)?;
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        let deriv = |x: f64| {
            let (l, lm) = laguerre_l(n, a, x);
            (l, (nf * l - (nf + a) * lm) / x)
        };
        for _ in 0..3 {
            let (l, d) = deriv(*x);
            let step = l / d;
            *x -= step;
            if step.abs() < 1e-15 * x.abs() {
                break;
            }
        }
        let (_, d) = deriv(*x);
        weights.push((log_c - (*x * d * d).ln()).exp());
    }
    Ok(GaussRule { nodes, weights })
}

/// Jacobi rule mapped to `[c, d]` for the weight `(d-x)^a (x-c)^b`.
pub fn mapped_jacobi(n: usize, a: f64, b: f64, c: f64, d: f64) -> Result<GaussRule> {
    let base = gauss_jacobi(n, a, b)?;
    let half = 0.5 * (d - c);
    let scale = half.powf(1.0 + a + b);
    Ok(GaussRule {
        nodes: base.nodes.iter().map(|s| c + half * (1.0 + s)).collect(),
        weights: base.weights.iter().map(|w| w * scale).collect(),
    })
}

/// Breakpoints `[lo, ..., hi]` refined geometrically toward `lo` with the given
/// ratio until the innermost panel is shorter than `min_width`.
pub fn graded_toward_lower(lo: f64, hi: f64, ratio: f64, min_width: f64) -> Vec<f64> {
    let mut pts = vec![hi];
    let mut w = hi - lo;
    while w > min_width {
        w *= ratio;
        pts.push(lo + w);
    }
    pts.push(lo);
    pts.reverse();
    pts
}
