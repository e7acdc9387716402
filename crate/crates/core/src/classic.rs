//! The weighted two-sided inequality
//! `c f(xi) <= int_x^y f rho <= c1 f(x) + c2 f(y)` for functions convex with
//! respect to a Chebyshev system.

use serde::Serialize;

use crate::cheb::ChebyshevSystem;
use crate::error::{HhError, Result};
use crate::func::{Interval, RealFunction};
use crate::quad::{composite_nodes, QuadratureConfig};
use crate::report::BoundReport;

fn check_pair(sys: &ChebyshevSystem, x: f64, y: f64) -> Result<()> {
    if !(x < y) {
        return Err(HhError::input(format!("need x < y, got ({x}, {y})")));
    }
    if !sys.domain.contains(x) || !sys.domain.contains(y) {
        return Err(HhError::input(format!(
            "[{x}, {y}] is not inside the domain {} of `{}`",
            sys.domain, sys.name
        )));
    }
    Ok(())
}

/// `(int_x^y omega0 rho, int_x^y omega1 rho)`, checking `rho > 0` at the nodes.
fn weighted_moments(
    sys: &ChebyshevSystem,
    rho: &RealFunction,
    x: f64,
    y: f64,
    q: &QuadratureConfig,
) -> Result<(f64, f64)> {
    let (mut m0, mut m1) = (0.0, 0.0);
    for (t, w) in composite_nodes(x, y, q) {
        let r = rho.try_eval(t)?;
        if !(r > 0.0) {
            return Err(HhError::input(format!("weight `{}` is not positive at {t}: {r}", rho.name())));
        }
        m0 += w * r * sys.omega0.eval(t);
        m1 += w * r * sys.omega1.eval(t);
    }
    Ok((m0, m1))
}

fn xi_from_moments(sys: &ChebyshevSystem, m0: f64, m1: f64, x: f64, y: f64) -> Result<f64> {
    let tol = 1e-15 * (1.0 + x.abs().max(y.abs()));
    sys.ratio_inverse(m1 / m0, Interval::new(x, y)?, tol)
        .map_err(|e| match e {
            HhError::Range { value, lo, hi } => HhError::Degenerate(format!(
                "moment ratio {value} is outside the ratio range [{lo}, {hi}] on [{x}, {y}]"
            )),
            other => other,
        })
}

/// `(omega1/omega0)^-1 (int omega1 rho / int omega0 rho)`.
pub fn xi_point(sys: &ChebyshevSystem, rho: &RealFunction, x: f64, y: f64, q: &QuadratureConfig) -> Result<f64> {
    check_pair(sys, x, y)?;
    let (m0, m1) = weighted_moments(sys, rho, x, y, q)?;
    xi_from_moments(sys, m0, m1, x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicCoefficients {
    pub xi: f64,
    pub c: f64,
    /// Determinant form `(m0 omega1(y) - m1 omega0(y)) / Omega(x,y)`.
    pub c1: f64,
    /// Determinant form `(omega0(x) m1 - omega1(x) m0) / Omega(x,y)`.
    pub c2: f64,
    /// `Omega(xi, y) / Omega(x, y)`
    pub weight1: f64,
    /// `Omega(x, xi) / Omega(x, y)`
    pub weight2: f64,
}

impl ClassicCoefficients {
    /// `c * weight1`, which agrees with `c1`.
    pub fn c1_cross(&self) -> f64 {
        self.c * self.weight1
    }

    /// `c * weight2`, which agrees with `c2`.
    pub fn c2_cross(&self) -> f64 {
        self.c * self.weight2
    }
}

pub fn c_coeffs(
    sys: &ChebyshevSystem,
    rho: &RealFunction,
    x: f64,
    y: f64,
    q: &QuadratureConfig,
) -> Result<ClassicCoefficients> {
    check_pair(sys, x, y)?;
    let (m0, m1) = weighted_moments(sys, rho, x, y, q)?;
    let xi = xi_from_moments(sys, m0, m1, x, y)?;
    let c = m0 / sys.omega0.eval(xi);
    if !(c > 0.0) {
        return Err(HhError::Degenerate(format!("c({x}, {y}) = {c} is not positive")));
    }
    let d = sys.det(x, y);
    let (w0x, w1x) = (sys.omega0.eval(x), sys.omega1.eval(x));
    let (w0y, w1y) = (sys.omega0.eval(y), sys.omega1.eval(y));
    Ok(ClassicCoefficients {
        xi,
        c,
        c1: (m0 * w1y - m1 * w0y) / d,
        c2: (w0x * m1 - w1x * m0) / d,
        weight1: sys.det(xi, y) / d,
        weight2: sys.det(x, xi) / d,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicBounds {
    pub coefficients: ClassicCoefficients,
    /// `int_x^y f rho`
    pub integral: f64,
    /// `c f(xi) <= integral`
    pub lower: BoundReport,
    /// `integral <= c1 f(x) + c2 f(y)`
    pub upper: BoundReport,
}

pub fn classic_bounds(
    f: &RealFunction,
    sys: &ChebyshevSystem,
    rho: &RealFunction,
    x: f64,
    y: f64,
    q: &QuadratureConfig,
) -> Result<ClassicBounds> {
    let k = c_coeffs(sys, rho, x, y, q)?;
    let mut integral = 0.0;
    for (t, w) in composite_nodes(x, y, q) {
        integral += w * f.try_eval(t)? * rho.eval(t);
    }
    let inputs = format!("f={} system={} rho={} x={x} y={y}", f.name(), sys.name, rho.name());
    let lower = BoundReport::new("classic-lower", k.c * f.try_eval(k.xi)?, integral, 0.0)
        .with_inputs(inputs.clone())
        .with_tol(q.tol);
    let upper = BoundReport::new("classic-upper", integral, k.c1 * f.try_eval(x)? + k.c2 * f.try_eval(y)?, 0.0)
        .with_inputs(inputs)
        .with_tol(q.tol);
    Ok(ClassicBounds {
        coefficients: k,
        integral,
        lower,
        upper,
    })
}
