//! Residuals of (generalized) convexity and tabulated error functions built
//! from them.

use serde::Serialize;

use crate::cheb::ChebyshevSystem;
use crate::errmodel::ErrorModel;
use crate::error::{HhError, Result};
use crate::func::{linspace, Interval, RealFunction};

/// Points per axis of a measured error table.
pub const DEFAULT_EPS_GRID: usize = 33;
/// Relative tolerance of [`is_omega_convex`].
pub const CONVEXITY_REL_TOL: f64 = 1e-10;

/// `f(u) - w1 f(x) - w2 f(y)` with the system weights of `(x, u, y)`.
///
/// Nonpositive on every triple iff `f` is convex with respect to `sys`.
pub fn convexity_residual(f: &RealFunction, sys: &ChebyshevSystem, x: f64, u: f64, y: f64) -> Result<f64> {
    if !(x < u && u < y) {
        return Err(HhError::input(format!("need x < u < y, got ({x}, {u}, {y})")));
    }
    for t in [x, y] {
        if !sys.domain.contains(t) {
            return Err(HhError::input(format!("{t} is outside {}", sys.domain)));
        }
    }
    Ok(residual_unchecked(f, sys, x, u, y))
}

#[inline]
fn residual_unchecked(f: &RealFunction, sys: &ChebyshevSystem, x: f64, u: f64, y: f64) -> f64 {
    let (w1, w2) = sys.weights(x, u, y);
    f.eval(u) - w1 * f.eval(x) - w2 * f.eval(y)
}

/// Size of the terms entering a residual, for relative comparisons.
fn residual_scale(f: &RealFunction, sys: &ChebyshevSystem, x: f64, u: f64, y: f64) -> f64 {
    let (w1, w2) = sys.weights(x, u, y);
    f.eval(u).abs() + (w1 * f.eval(x)).abs() + (w2 * f.eval(y)).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triple {
    pub x: f64,
    pub u: f64,
    pub y: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityScan {
    pub passed: bool,
    /// Triple with the largest residual.
    pub worst: Option<Triple>,
    pub triples: usize,
}

/// Scans all triples `x < u < y` of an interior grid of the system domain.
///
/// A triple counts as violating when its residual exceeds
/// `CONVEXITY_REL_TOL * (1 + scale)` where `scale` is the size of the terms.
pub fn is_omega_convex(f: &RealFunction, sys: &ChebyshevSystem, grid_n: usize) -> ConvexityScan {
    let grid = sys.domain.interior_grid(grid_n.max(3));
    let mut worst: Option<Triple> = None;
    let mut passed = true;
    let mut triples = 0;
    for (i, &x) in grid.iter().enumerate() {
        for (j, &u) in grid.iter().enumerate().skip(i + 1) {
            for &y in &grid[j + 1..] {
                triples += 1;
                let r = residual_unchecked(f, sys, x, u, y);
                if r.is_nan() || r > CONVEXITY_REL_TOL * (1.0 + residual_scale(f, sys, x, u, y)) {
                    passed = false;
                }
                if worst.is_none_or(|w| r > w.residual || r.is_nan()) {
                    worst = Some(Triple { x, u, y, residual: r });
                }
            }
        }
    }
    ConvexityScan { passed, worst, triples }
}

/// `g(t) - (1 - t) g(0) - t g(1)`.
pub fn jensen_residual(g: &RealFunction, t: f64) -> f64 {
    g.eval(t) - (1.0 - t) * g.eval(0.0) - t * g.eval(1.0)
}

/// `max(0, sup_t jensen_residual(g, t))` over `n` grid points of `[0, 1]`.
pub fn jensen_sup(g: &RealFunction, n: usize) -> f64 {
    linspace(0.0, 1.0, n.max(2))
        .into_iter()
        .map(|t| jensen_residual(g, t))
        .fold(0.0, f64::max)
}

/// Table of `max(0, residual)` on a cube grid over `range^3`.
///
/// Entries at nodes outside `v < u < w` are zero. Lookups interpolate
/// trilinearly and add the spread of the eight cell corners, so that the value
/// is at least as large as every corner of the cell.
#[derive(Debug, Clone)]
pub struct MeasuredEps {
    range: Interval,
    n: usize,
    values: Vec<f64>,
}

impl MeasuredEps {
    pub fn build(f: &RealFunction, sys: &ChebyshevSystem, range: Interval, grid_n: usize) -> Self {
        let n = grid_n.max(3);
        let pts = linspace(range.lo, range.hi, n);
        let mut values = vec![0.0; n * n * n];
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let r = residual_unchecked(f, sys, pts[i], pts[j], pts[k]);
                    values[(i * n + j) * n + k] = if r.is_nan() { f64::INFINITY } else { r.max(0.0) };
                }
            }
        }
        MeasuredEps { range, n, values }
    }

    pub fn grid_n(&self) -> usize {
        self.n
    }

    pub fn range(&self) -> Interval {
        self.range
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.sup() == 0.0
    }

    fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * self.n + j) * self.n + k]
    }

    /// Cell index and offset of a coordinate, clamped into the table.
    fn locate(&self, t: f64) -> (usize, f64) {
        let h = self.range.width() / (self.n - 1) as f64;
        let s = ((t - self.range.lo) / h).clamp(0.0, (self.n - 1) as f64);
        let i = (s.floor() as usize).min(self.n - 2);
        (i, s - i as f64)
    }

    /// Interpolated `eps_{v,w}(u)`.
    pub fn lookup(&self, v: f64, u: f64, w: f64) -> f64 {
        let (i, a) = self.locate(v);
        let (j, b) = self.locate(u);
        let (k, c) = self.locate(w);
        let mut value = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for di in 0..2 {
            let wa = if di == 0 { 1.0 - a } else { a };
            for dj in 0..2 {
                let wb = if dj == 0 { 1.0 - b } else { b };
                for dk in 0..2 {
                    let wc = if dk == 0 { 1.0 - c } else { c };
                    let e = self.at(i + di, j + dj, k + dk);
                    value += wa * wb * wc * e;
                    lo = lo.min(e);
                    hi = hi.max(e);
                }
            }
        }
        if hi.is_infinite() {
            return f64::INFINITY;
        }
        value + (hi - lo)
    }
}

/// Measured error model of `f` over the whole domain of `sys`.
pub fn measured_eps(f: &RealFunction, sys: &ChebyshevSystem, grid_n: usize) -> ErrorModel {
    ErrorModel::Measured(MeasuredEps::build(f, sys, sys.domain, grid_n))
}
