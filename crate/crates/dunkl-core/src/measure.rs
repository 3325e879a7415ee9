//! Symmetric panel grids for the measure `|x|^{2k} dx` and the norms built on them.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, mapped_jacobi};
use crate::specfun::gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadRule {
    GaussLegendre,
    /// Gauss–Jacobi on the two panels touching the origin, absorbing `|x|^{2k}`.
    GaussJacobiOrigin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridProfile {
    /// Gaussian-type decay.
    Smooth,
    /// Integrable blow-up at the origin and exponential decay.
    SingularOrigin,
    /// Polynomial decay.
    HeavyTail,
}

impl FromStr for GridProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(Self::Smooth),
            "singular_origin" => Ok(Self::SingularOrigin),
            "heavy_tail" => Ok(Self::HeavyTail),
            _ => Err(Error::InvalidParameter(format!("unknown grid profile `{s}`"))),
        }
    }
}

impl fmt::Display for GridProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Smooth => "smooth",
            Self::SingularOrigin => "singular_origin",
            Self::HeavyTail => "heavy_tail",
        })
    }
}

/// `R:nodes:profile` as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub radius: f64,
    pub nodes_per_panel: usize,
    pub profile: GridProfile,
}

impl FromStr for GridSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidParameter(format!(
                "grid spec must be R:nodes:profile, got `{s}`"
            )));
        }
        let radius: f64 = parts[0]
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad grid radius `{}`", parts[0])))?;
        let nodes_per_panel: usize = parts[1]
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad node count `{}`", parts[1])))?;
        Ok(Self {
            radius,
            nodes_per_panel,
            profile: parts[2].parse()?,
        })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.radius, self.nodes_per_panel, self.profile)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
}

/// Radius for Gaussian-type functions smoothed up to heat time `t_max`.
pub fn smooth_radius(t_max: f64) -> f64 {
    8f64.max(6.0 * t_max.max(0.0).sqrt())
}

/// Radius beyond which a polynomial tail `c t / x^2` is below `1e-8`.
pub fn heavy_tail_radius(c_tilde_t: f64) -> f64 {
    (c_tilde_t * 1e8).max(1e4)
}

pub const EXPONENTIAL_RADIUS: f64 = 40.0;
pub const OSCILLATION_RADIUS: f64 = 2000.0;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Quadrature grid whose weights already contain `|x|^{2k}`.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedGrid {
    pub k: f64,
    pub nodes_per_panel: usize,
    pub radius: f64,
    /// Nodes farther out are skipped for oscillatory integrands.
    pub oscillation_radius: f64,
    pub rule: QuadRule,
    pub profile: GridProfile,
    pub panels: Vec<Panel>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    #[serde(skip)]
    id: u64,
}

/// Options for assembling the positive half-line breakpoints.
#[derive(Debug, Clone)]
pub struct GridBuilder {
    k: f64,
    n: usize,
    radius: f64,
    profile: GridProfile,
    rule: QuadRule,
    origin_min: f64,
    width: f64,
    uniform_to: f64,
    growth: f64,
    oscillation_radius: f64,
    breaks: Vec<(f64, f64)>,
}

impl GridBuilder {
    pub fn new(k: f64, radius: f64, profile: GridProfile) -> Self {
        let (origin_min, width, uniform_to, growth, osc) = match profile {
            GridProfile::Smooth => (0.5, 0.5, radius.min(12.0), 1.25, radius),
            GridProfile::SingularOrigin => (1e-14, 0.5, radius.min(12.0), 1.25, radius),
            GridProfile::HeavyTail => (1e-6, 1.0, radius.min(OSCILLATION_RADIUS), 2.0, radius.min(OSCILLATION_RADIUS)),
        };
        Self {
            k,
            n: 16,
            radius,
            profile,
            rule: if k > 0.0 {
                QuadRule::GaussJacobiOrigin
            } else {
                QuadRule::GaussLegendre
            },
            origin_min,
            width,
            uniform_to,
            growth,
            oscillation_radius: osc,
            breaks: Vec::new(),
        }
    }

    pub fn nodes_per_panel(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn rule(mut self, rule: QuadRule) -> Self {
        self.rule = rule;
        self
    }

    /// Smallest panel kept next to the origin.
    pub fn origin_resolution(mut self, min_width: f64) -> Self {
        self.origin_min = min_width.min(0.5);
        self
    }

    pub fn panel_width(mut self, width: f64) -> Self {
        self.width = width;
        self
    }

    pub fn uniform_to(mut self, r: f64) -> Self {
        self.uniform_to = r.min(self.radius);
        self
    }

    /// Grade the panels geometrically toward `±c` down to `min_width`.
    pub fn refine_at(mut self, c: f64, min_width: f64) -> Self {
        let c = c.abs();
        if c > 1e-12 && c < self.radius {
            self.breaks.push((c, min_width));
        }
        self
    }

    pub fn build(self) -> Result<WeightedGrid> {
        if self.n < 8 {
            return Err(Error::InvalidParameter(format!(
                "at least 8 nodes per panel are required, got {}",
                self.n
            )));
        }
        if !(self.radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid radius must be positive, got {}",
                self.radius
            )));
        }
        let r = self.radius;
        let first = self.width.min(r).min(1.0);
        let mut pts = vec![0.0];
        // Geometric panels toward the origin.
        let mut w = first;
        let mut inner = Vec::new();
        while w > self.origin_min {
            inner.push(w);
            w *= 0.25;
        }
        inner.push(w);
        inner.reverse();
        pts.extend(inner);
        let mut x = first;
        while x < self.uniform_to - 1e-12 {
            x = (x + self.width).min(self.uniform_to);
            pts.push(x);
        }
        let mut step = self.width;
        while x < r - 1e-12 {
            step *= self.growth;
            x = (x + step).min(r);
            pts.push(x);
        }
        for &(c, min_width) in &self.breaks {
            // Interior points resolve only down to a few hundred ulps.
            let min_width = min_width.max(c * 1e-13);
            let reach = (0.5 * c).min(self.width);
            pts.retain(|&p| (p - c).abs() >= reach || p == 0.0);
            let mut d = reach;
            while d > min_width {
                pts.push(c - d);
                pts.push(c + d);
                d *= 0.25;
            }
            pts.push(c - d);
            pts.push(c + d);
            pts.push(c);
        }
        pts.retain(|&p| p <= r);
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-300);
        let grid = WeightedGrid::assemble(self.k, &pts, self.n, self.rule, self.profile, r, self.oscillation_radius)?;
        Ok(grid)
    }
}

impl WeightedGrid {
    fn assemble(
        k: f64,
        positive: &[f64],
        n: usize,
        rule: QuadRule,
        profile: GridProfile,
        radius: f64,
        oscillation_radius: f64,
    ) -> Result<Self> {
        let legendre = gauss_legendre(n)?;
        let two_k = 2.0 * k;
        let mut half_nodes = Vec::new();
        let mut half_weights = Vec::new();
        let mut half_panels = Vec::new();
        for (i, pair) in positive.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            half_panels.push(Panel { a, b });
            if i == 0 && rule == QuadRule::GaussJacobiOrigin && k > 0.0 {
                let r = mapped_jacobi(n, 0.0, two_k, a, b)?;
                half_nodes.extend(r.nodes);
                half_weights.extend(r.weights);
            } else {
                let h = 0.5 * (b - a);
                for (s, w) in legendre.nodes.iter().zip(&legendre.weights) {
                    let x = a + h * (1.0 + s);
                    half_nodes.push(x);
                    half_weights.push(h * w * x.powf(two_k));
                }
            }
        }
        let m = half_nodes.len();
        let mut nodes = Vec::with_capacity(2 * m);
        let mut weights = Vec::with_capacity(2 * m);
        for i in (0..m).rev() {
            nodes.push(-half_nodes[i]);
            weights.push(half_weights[i]);
        }
        nodes.extend_from_slice(&half_nodes);
        weights.extend_from_slice(&half_weights);
        let mut panels: Vec<Panel> = half_panels
            .iter()
            .rev()
            .map(|p| Panel { a: -p.b, b: -p.a })
            .collect();
        panels.extend(half_panels);
        let grid = Self {
            k,
            nodes_per_panel: n,
            radius,
            oscillation_radius,
            rule,
            profile,
            panels,
            nodes,
            weights,
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
        };
        grid.calibrate()?;
        Ok(grid)
    }

    fn calibrate(&self) -> Result<()> {
        if self.radius < 6.0 {
            return Ok(());
        }
        let expected = gamma(self.k + 0.5)?;
        let got = self.integrate(|x| (-x * x).exp())?;
        if ((got - expected) / expected).abs() > 1e-9 {
            return Err(Error::Calibration { expected, got });
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Identity of this node set, shared by clones.
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Same panels, each split in half.
    pub fn refined(&self) -> Result<Self> {
        let mut pts: Vec<f64> = Vec::new();
        for p in self.panels.iter().filter(|p| p.a >= 0.0) {
            pts.push(p.a);
            pts.push(0.5 * (p.a + p.b));
        }
        pts.push(self.radius);
        Self::assemble(
            self.k,
            &pts,
            self.nodes_per_panel,
            self.rule,
            self.profile,
            self.radius,
            self.oscillation_radius,
        )
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64 + Sync) -> Vec<f64> {
        self.nodes.par_iter().map(|&x| f(x)).collect()
    }

    /// `∫ f |x|^{2k} dx` summed in node order.
    pub fn integrate(&self, f: impl Fn(f64) -> f64 + Sync) -> Result<f64> {
        let vals = self.sample(f);
        self.integrate_samples(&vals)
    }

    pub fn integrate_samples(&self, vals: &[f64]) -> Result<f64> {
        let mut acc = Neumaier::default();
        for ((&x, &w), &v) in self.nodes.iter().zip(&self.weights).zip(vals) {
            if !v.is_finite() {
                return Err(Error::NonFinite(x));
            }
            acc.add(w * v);
        }
        Ok(acc.sum())
    }

    pub fn integrate_complex(&self, f: impl Fn(f64) -> Complex64 + Sync) -> Result<Complex64> {
        let vals: Vec<Complex64> = self.nodes.par_iter().map(|&x| f(x)).collect();
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        for ((&x, &w), v) in self.nodes.iter().zip(&self.weights).zip(&vals) {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite(x));
            }
            re.add(w * v.re);
            im.add(w * v.im);
        }
        Ok(Complex64::new(re.sum(), im.sum()))
    }
}

/// Compensated summation, order-preserving.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    pub fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }

    pub fn sum(&self) -> f64 {
        self.s + self.c
    }
}

/// Convenience wrapper matching the usual calling convention.
pub fn build_grid(k: f64, radius: f64, profile: GridProfile) -> Result<WeightedGrid> {
    GridBuilder::new(k, radius, profile).build()
}

pub fn integrate_weighted(grid: &WeightedGrid, f: impl Fn(f64) -> f64 + Sync) -> Result<f64> {
    grid.integrate(f)
}

pub fn integrate_weighted_complex(
    grid: &WeightedGrid,
    f: impl Fn(f64) -> Complex64 + Sync,
) -> Result<Complex64> {
    grid.integrate_complex(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    pub value: f64,
    pub p: f64,
    pub k: f64,
    pub truncation_estimate: f64,
    pub nodes_used: usize,
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 || p == f64::INFINITY {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p must be in [1, ∞], got {p}")))
    }
}

/// `‖f‖_{k,p}` on the grid. For `p = ∞` the node maximum is refined by a
/// local search around the maximizing node.
pub fn lp_norm(grid: &WeightedGrid, f: impl Fn(f64) -> f64 + Sync, p: f64) -> Result<NormReport> {
    check_p(p)?;
    let vals = grid.sample(&f);
    let mut report = lp_norm_samples(grid, &vals, p)?;
    if p.is_infinite() {
        let (imax, _) = vals
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        let nodes = grid.nodes();
        let lo = nodes[imax.saturating_sub(1)];
        let hi = nodes[(imax + 1).min(nodes.len() - 1)];
        let mut best = report.value;
        for j in 0..=64 {
            let x = lo + (hi - lo) * j as f64 / 64.0;
            let v = f(x).abs();
            if v.is_finite() && v > best {
                best = v;
            }
        }
        report.value = best;
        report.nodes_used += 65;
    }
    Ok(report)
}

pub fn lp_norm_samples(grid: &WeightedGrid, vals: &[f64], p: f64) -> Result<NormReport> {
    check_p(p)?;
    let nodes = grid.nodes();
    for (&x, &v) in nodes.iter().zip(vals) {
        if !v.is_finite() {
            return Err(Error::NonFinite(x));
        }
    }
    let n = grid.nodes_per_panel;
    let edge = |i: usize| vals[i].abs();
    let (value, tail) = if p.is_infinite() {
        let m = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        (m, edge(0).max(edge(vals.len() - 1)))
    } else {
        let mut acc = Neumaier::default();
        for (w, v) in grid.weights().iter().zip(vals) {
            acc.add(w * v.abs().powf(p));
        }
        let tail: f64 = (0..n.min(vals.len()))
            .chain(vals.len().saturating_sub(n)..vals.len())
            .map(|i| grid.weights()[i] * edge(i).powf(p))
            .sum();
        (acc.sum().powf(1.0 / p), tail.powf(1.0 / p))
    };
    Ok(NormReport {
        value,
        p,
        k: grid.k,
        truncation_estimate: tail,
        nodes_used: vals.len(),
    })
}
