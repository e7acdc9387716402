//! Chebyshev systems `(omega0, omega1)`: the determinant `Omega`, grid
//! validation, inversion of the ratio `omega1 / omega0` and two-point
//! interpolation.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{HhError, Result};
use crate::func::{parse_floats, Interval, RealFunction};

/// Default number of grid points for [`ChebyshevSystem::check`].
pub const DEFAULT_CHECK_GRID: usize = 257;
/// Default argument tolerance for [`ChebyshevSystem::ratio_inverse`].
pub const DEFAULT_INVERSE_TOL: f64 = 1e-12;
/// Distance kept from `±pi/2` by the `trig` catalog entry.
pub const TRIG_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct ChebyshevSystem {
    pub name: String,
    pub omega0: RealFunction,
    pub omega1: RealFunction,
    pub domain: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChebyshevViolation {
    Omega0NotPositive { x: f64, value: f64 },
    DeterminantNotPositive { x: f64, y: f64, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevReport {
    pub system: String,
    pub grid_n: usize,
    pub passed: bool,
    pub first_violation: Option<ChebyshevViolation>,
}

impl ChebyshevSystem {
    pub fn new(
        name: impl Into<String>,
        omega0: RealFunction,
        omega1: RealFunction,
        domain: Interval,
    ) -> Self {
        ChebyshevSystem {
            name: name.into(),
            omega0,
            omega1,
            domain,
        }
    }

    /// `(1, t)`: ordinary convexity.
    pub fn linear(domain: Interval) -> Self {
        ChebyshevSystem::new("linear", RealFunction::constant(1.0), RealFunction::identity(), domain)
    }

    pub fn with_domain(mut self, domain: Interval) -> Self {
        self.domain = domain;
        self
    }

    fn check_in_domain(&self, t: f64) -> Result<()> {
        if self.domain.contains(t) {
            Ok(())
        } else {
            Err(HhError::input(format!(
                "{t} is outside the domain {} of system `{}`",
                self.domain, self.name
            )))
        }
    }

    /// `Omega(x, y) = omega0(x) omega1(y) - omega1(x) omega0(y)` without domain checks.
    #[inline]
    pub fn det(&self, x: f64, y: f64) -> f64 {
        self.omega0.eval(x) * self.omega1.eval(y) - self.omega1.eval(x) * self.omega0.eval(y)
    }

    pub fn omega_det(&self, x: f64, y: f64) -> Result<f64> {
        self.check_in_domain(x)?;
        self.check_in_domain(y)?;
        Ok(self.det(x, y))
    }

    #[inline]
    pub fn ratio(&self, t: f64) -> f64 {
        self.omega1.eval(t) / self.omega0.eval(t)
    }

    /// The convexity weights `(Omega(u,y)/Omega(x,y), Omega(x,u)/Omega(x,y))`.
    #[inline]
    pub fn weights(&self, x: f64, u: f64, y: f64) -> (f64, f64) {
        let d = self.det(x, y);
        (self.det(u, y) / d, self.det(x, u) / d)
    }

    /// Grid check of `omega0 > 0` and `Omega(x, y) > 0` for all grid pairs `x < y`.
    pub fn check(&self, grid_n: usize) -> ChebyshevReport {
        let grid = self.domain.interior_grid(grid_n.max(3));
        let first_violation = self.first_violation(&grid);
        ChebyshevReport {
            system: self.name.clone(),
            grid_n: grid.len(),
            passed: first_violation.is_none(),
            first_violation,
        }
    }

    fn first_violation(&self, grid: &[f64]) -> Option<ChebyshevViolation> {
        for &x in grid {
            let value = self.omega0.eval(x);
            if !(value > 0.0) {
                return Some(ChebyshevViolation::Omega0NotPositive { x, value });
            }
        }
        for (i, &x) in grid.iter().enumerate() {
            for &y in &grid[i + 1..] {
                let value = self.det(x, y);
                if !(value > 0.0) {
                    return Some(ChebyshevViolation::DeterminantNotPositive { x, y, value });
                }
            }
        }
        None
    }

    /// Solves `(omega1/omega0)(u) = v` for `u` in `bracket` by bisection.
    ///
    /// The ratio is strictly increasing on a positive system, so the root is
    /// unique; a midpoint value falling outside the current bracket values is
    /// reported as a system error.
    pub fn ratio_inverse(&self, v: f64, bracket: Interval, tol: f64) -> Result<f64> {
        self.check_in_domain(bracket.lo)?;
        self.check_in_domain(bracket.hi)?;
        if !(tol > 0.0) {
            return Err(HhError::input("ratio_inverse needs tol > 0"));
        }
        let (mut lo, mut hi) = (bracket.lo, bracket.hi);
        let (mut r_lo, mut r_hi) = (self.ratio(lo), self.ratio(hi));
        if !(r_lo < r_hi) {
            return Err(HhError::System(format!(
                "ratio of `{}` is not increasing on {bracket}: {r_lo} >= {r_hi}",
                self.name
            )));
        }
        if !(v >= r_lo && v <= r_hi) {
            return Err(HhError::Range {
                value: v,
                lo: r_lo,
                hi: r_hi,
            });
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let r = self.ratio(mid);
            if !(r >= r_lo && r <= r_hi) {
                return Err(HhError::System(format!(
                    "ratio of `{}` is not monotone near {mid}",
                    self.name
                )));
            }
            if r < v {
                lo = mid;
                r_lo = r;
            } else {
                hi = mid;
                r_hi = r;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// The unique member of `span(omega0, omega1)` through `(x, xi)` and `(y, eta)`.
    pub fn interpolant(&self, x: f64, xi: f64, y: f64, eta: f64) -> Result<RealFunction> {
        self.check_in_domain(x)?;
        self.check_in_domain(y)?;
        if x == y {
            return Err(HhError::Degenerate(format!("interpolation nodes coincide at {x}")));
        }
        let d = self.det(x, y);
        if d == 0.0 {
            return Err(HhError::Degenerate(format!("Omega({x}, {y}) = 0")));
        }
        let (w0x, w1x) = (self.omega0.eval(x), self.omega1.eval(x));
        let (w0y, w1y) = (self.omega0.eval(y), self.omega1.eval(y));
        let (w0, w1) = (self.omega0.clone(), self.omega1.clone());
        Ok(RealFunction::new(
            format!("interp[{}]({x},{xi};{y},{eta})", self.name),
            vec![x, xi, y, eta],
            move |u| {
                let (a, b) = (w0.eval(u), w1.eval(u));
                // Omega(u, y) and Omega(x, u)
                let duy = a * w1y - b * w0y;
                let dxu = w0x * b - w1x * a;
                (xi * duy + eta * dxu) / d
            },
        ))
    }
}

/// Catalog key of a Chebyshev system with an optional `@[lo,hi]` domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub kind: SystemKind,
    pub domain: Option<Interval>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemKind {
    /// `(1, t)`
    Linear,
    /// `(1, e^t)`
    Exp,
    /// `(cos, sin)`
    Trig,
    /// `(t^a, t^b)` with `0 <= a < b` on a positive interval.
    Power(f64, f64),
    /// Polynomial `omega0` and `omega1` by coefficient lists.
    Poly(Vec<f64>, Vec<f64>),
}

impl SystemKind {
    pub fn default_domain(&self) -> Interval {
        match self {
            SystemKind::Linear | SystemKind::Exp => Interval { lo: -1.0, hi: 2.0 },
            SystemKind::Trig => Interval {
                lo: -FRAC_PI_2 + TRIG_MARGIN,
                hi: FRAC_PI_2 - TRIG_MARGIN,
            },
            SystemKind::Power(..) => Interval { lo: 0.25, hi: 4.0 },
            SystemKind::Poly(..) => Interval::unit(),
        }
    }
}

impl SystemSpec {
    pub fn new(kind: SystemKind) -> Self {
        SystemSpec { kind, domain: None }
    }

    pub fn domain(&self) -> Interval {
        self.domain.unwrap_or_else(|| self.kind.default_domain())
    }

    pub fn build(&self) -> Result<ChebyshevSystem> {
        let domain = self.domain();
        let name = self.to_string();
        let sys = match &self.kind {
            SystemKind::Linear => ChebyshevSystem::linear(domain),
            SystemKind::Exp => ChebyshevSystem::new(
                "exp",
                RealFunction::constant(1.0),
                RealFunction::new("exp", vec![], f64::exp),
                domain,
            ),
            SystemKind::Trig => {
                if domain.lo <= -FRAC_PI_2 || domain.hi >= FRAC_PI_2 {
                    return Err(HhError::input("trig system needs a domain inside (-pi/2, pi/2)"));
                }
                ChebyshevSystem::new(
                    "trig",
                    RealFunction::new("cos", vec![], f64::cos),
                    RealFunction::new("sin", vec![], f64::sin),
                    domain,
                )
            }
            &SystemKind::Power(a, b) => {
                if !(a < b) || a < 0.0 {
                    return Err(HhError::input(format!("power({a},{b}) needs 0 <= a < b")));
                }
                if domain.lo <= 0.0 {
                    return Err(HhError::input("power system needs a domain inside (0, inf)"));
                }
                ChebyshevSystem::new(
                    "power",
                    RealFunction::new(format!("pow:{a}"), vec![a], move |t| t.powf(a)),
                    RealFunction::new(format!("pow:{b}"), vec![b], move |t| t.powf(b)),
                    domain,
                )
            }
            SystemKind::Poly(c0, c1) => ChebyshevSystem::new(
                "poly",
                RealFunction::poly(c0.clone()),
                RealFunction::poly(c1.clone()),
                domain,
            ),
        };
        Ok(ChebyshevSystem { name, ..sys })
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SystemKind::Linear => write!(f, "linear")?,
            SystemKind::Exp => write!(f, "exp")?,
            SystemKind::Trig => write!(f, "trig")?,
            SystemKind::Power(a, b) => write!(f, "power({a},{b})")?,
            SystemKind::Poly(c0, c1) => write!(f, "poly([{}],[{}])", fmt_list(c0), fmt_list(c1))?,
        }
        if let Some(d) = self.domain {
            write!(f, "@{d}")?;
        }
        Ok(())
    }
}

pub(crate) fn parse_interval(s: &str) -> Result<Interval> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| HhError::parse(format!("expected `[lo,hi]`, found `{s}`")))?;
    let v = parse_floats(inner)?;
    if v.len() != 2 {
        return Err(HhError::parse(format!("expected two interval ends in `{s}`")));
    }
    Interval::new(v[0], v[1]).map_err(|e| HhError::parse(e.to_string()))
}

impl FromStr for SystemSpec {
    type Err = HhError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, domain) = match s.split_once('@') {
            Some((h, d)) => (h.trim(), Some(parse_interval(d)?)),
            None => (s, None),
        };
        let kind = if let Some(rest) = head.strip_prefix("power") {
            let inner = rest
                .trim()
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| HhError::parse("expected `power(a,b)`"))?;
            let p = parse_floats(inner)?;
            if p.len() != 2 {
                return Err(HhError::parse("`power` takes exactly two exponents"));
            }
            SystemKind::Power(p[0], p[1])
        } else if let Some(rest) = head.strip_prefix("poly") {
            let inner = rest
                .trim()
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| HhError::parse("expected `poly([..],[..])`"))?;
            let (a, b) = inner
                .split_once("],")
                .ok_or_else(|| HhError::parse("expected `poly([..],[..])`"))?;
            let a = a.trim().strip_prefix('[').ok_or_else(|| HhError::parse("expected `[`"))?;
            let b = b
                .trim()
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| HhError::parse("expected `[..]`"))?;
            SystemKind::Poly(parse_floats(a)?, parse_floats(b)?)
        } else {
            match head {
                "linear" => SystemKind::Linear,
                "exp" => SystemKind::Exp,
                "trig" => SystemKind::Trig,
                other => return Err(HhError::parse(format!("unknown system `{other}`"))),
            }
        };
        let spec = SystemSpec { kind, domain };
        spec.build().map_err(|e| HhError::parse(e.to_string()))?;
        Ok(spec)
    }
}
