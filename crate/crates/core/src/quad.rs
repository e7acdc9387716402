//! Composite Gauss-Legendre quadrature.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{HhError, Result};

/// Panels and nodes for every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub panels: usize,
    pub nodes_per_panel: usize,
    /// Tolerance used when cross-asserting identities that only hold up to quadrature error.
    pub tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            panels: 64,
            nodes_per_panel: 16,
            tol: 1e-10,
        }
    }
}

pub const PANELS_ENV: &str = "HH_QUAD_PANELS";

impl QuadratureConfig {
    pub fn new(panels: usize, nodes_per_panel: usize, tol: f64) -> Result<Self> {
        let q = QuadratureConfig {
            panels,
            nodes_per_panel,
            tol,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 1 || self.nodes_per_panel < 2 || !(self.tol > 0.0) {
            return Err(HhError::input(format!(
                "quadrature needs panels >= 1, nodes_per_panel >= 2, tol > 0; got {self:?}"
            )));
        }
        Ok(())
    }

    /// Default configuration with the panel count taken from `HH_QUAD_PANELS` when set.
    pub fn from_env() -> Result<Self> {
        let mut q = QuadratureConfig::default();
        if let Ok(v) = std::env::var(PANELS_ENV) {
            q.panels = v
                .trim()
                .parse()
                .map_err(|_| HhError::input(format!("{PANELS_ENV}={v} is not a positive integer")))?;
            q.validate()?;
        }
        Ok(q)
    }

    /// Same rule with a different panel count.
    pub fn with_panels(self, panels: usize) -> Self {
        QuadratureConfig { panels, ..self }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    /// Push the mapped nodes of `[a, b]` onto `out`.
    pub fn push_nodes(&self, a: f64, b: f64, out: &mut Vec<(f64, f64)>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            out.push((mid + half * x, half * w));
        }
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Nodes and weights of the composite rule on `[a, b]` (`a <= b`).
pub fn composite_nodes(a: f64, b: f64, q: &QuadratureConfig) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(q.panels * q.nodes_per_panel);
    if b <= a {
        return out;
    }
    let rule = GaussLegendre::cached(q.nodes_per_panel);
    let h = (b - a) / q.panels as f64;
    for k in 0..q.panels {
        let lo = a + h * k as f64;
        let hi = if k + 1 == q.panels { b } else { lo + h };
        rule.push_nodes(lo, hi, &mut out);
    }
    out
}

/// Which end(s) of an interval carry an algebraic endpoint singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    Left,
    Right,
    Both,
}

const GRADING_RATIO: f64 = 0.15;
const GRADING_LAYERS: usize = 28;

/// Composite rule with geometrically refined panels toward the singular end(s).
///
/// Converges exponentially for integrands like `(t - a)^p` with `p > -1`,
/// where the plain composite rule is only algebraically convergent.
pub fn graded_nodes(a: f64, b: f64, grading: Grading, q: &QuadratureConfig) -> Vec<(f64, f64)> {
    if b <= a {
        return Vec::new();
    }
    match grading {
        Grading::Both => {
            let m = 0.5 * (a + b);
            let mut v = graded_nodes(a, m, Grading::Left, q);
            v.extend(graded_nodes(m, b, Grading::Right, q));
            v
        }
        Grading::Left | Grading::Right => {
            let rule = GaussLegendre::cached(q.nodes_per_panel);
            let w = b - a;
            let mut out = Vec::new();
            // Distances from the singular end: 0, r^L w, ..., r w, then the bulk.
            let mut cuts = vec![0.0];
            for k in (1..=GRADING_LAYERS).rev() {
                cuts.push(GRADING_RATIO.powi(k as i32) * w);
            }
            let bulk_start = GRADING_RATIO * w;
            for pair in cuts.windows(2) {
                push_oriented(&rule, a, b, grading, pair[0], pair[1], &mut out);
            }
            let panels = q.panels.max(1);
            let h = (w - bulk_start) / panels as f64;
            for k in 0..panels {
                let d0 = bulk_start + h * k as f64;
                let d1 = if k + 1 == panels { w } else { d0 + h };
                push_oriented(&rule, a, b, grading, d0, d1, &mut out);
            }
            out
        }
    }
}

fn push_oriented(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    grading: Grading,
    d0: f64,
    d1: f64,
    out: &mut Vec<(f64, f64)>,
) {
    match grading {
        Grading::Right => rule.push_nodes(b - d1, b - d0, out),
        _ => rule.push_nodes(a + d0, a + d1, out),
    }
}

/// `int_a^b g(t) dt` by the composite rule.
pub fn integrate<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, q: &QuadratureConfig) -> f64 {
    composite_nodes(a, b, q).iter().map(|&(t, w)| w * g(t)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_symmetric_and_weights_sum_to_two() {
        for n in [2, 3, 7, 16, 31] {
            let r = GaussLegendre::new(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n} sum={s}");
            for i in 0..n {
                assert!((r.nodes[i] + r.nodes[n - 1 - i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        let q = QuadratureConfig::new(1, 4, 1e-12).unwrap();
        // int_0^1 t^7 = 1/8
        let v = integrate(|t| t.powi(7), 0.0, 1.0, &q);
        assert!((v - 0.125).abs() < 1e-15);
    }

    #[test]
    fn graded_handles_sqrt_endpoint() {
        let q = QuadratureConfig::default();
        let v: f64 = graded_nodes(0.0, 1.0, Grading::Left, &q)
            .iter()
            .map(|&(t, w)| w * t.sqrt())
            .sum();
        assert!((v - 2.0 / 3.0).abs() < 1e-14, "{v}");
        let v: f64 = graded_nodes(0.0, 1.0, Grading::Both, &q)
            .iter()
            .map(|&(t, w)| w * (t * (1.0 - t)).powf(0.3))
            .sum();
        // B(1.3, 1.3) = Gamma(1.3)^2 / Gamma(2.6)
        let expect = 0.563_402_220_349_782_9;
        assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
    }

    #[test]
    fn env_override_rejects_garbage() {
        let q = QuadratureConfig::default().with_panels(0);
        assert!(q.validate().is_err());
    }
}
