//! Real intervals, evaluable real functions and the function catalog.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::errmodel::dist_to_integers;
use crate::error::{HhError, Result};

/// A bounded real interval `lo < hi`.
///
/// The mathematical objects live on open intervals; callers that need the
/// open variant use [`Interval::interior_grid`], which stays a relative
/// `1e-6` away from both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Offset (relative to the width) used to stay inside open intervals.
pub const ENDPOINT_OFFSET: f64 = 1e-6;

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(HhError::input(format!("interval [{lo}, {hi}] is not finite")));
        }
        if lo >= hi {
            return Err(HhError::input(format!("interval needs lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    /// `n` equally spaced points from `lo + off` to `hi - off`, `off = 1e-6 * width`.
    pub fn interior_grid(&self, n: usize) -> Vec<f64> {
        let off = ENDPOINT_OFFSET * self.width();
        linspace(self.lo + off, self.hi - off, n)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// `n` equally spaced points on `[a, b]`; endpoints are hit exactly.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (a + b)],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
                .collect()
        }
    }
}

type EvalFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A named real function `R -> R`. Cloning is cheap.
#[derive(Clone)]
pub struct RealFunction {
    name: String,
    params: Vec<f64>,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFunction")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

impl RealFunction {
    pub fn new<F>(name: impl Into<String>, params: Vec<f64>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RealFunction {
            name: name.into(),
            params,
            eval: Arc::new(f),
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// Evaluate and reject non-finite results.
    pub fn try_eval(&self, t: f64) -> Result<f64> {
        let v = self.eval(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(HhError::Evaluation {
                name: self.name.clone(),
                at: t,
                value: v,
            })
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn constant(c: f64) -> Self {
        RealFunction::new(format!("const:{c}"), vec![c], move |_| c)
    }

    pub fn identity() -> Self {
        RealFunction::new("poly:0,1", vec![0.0, 1.0], |t| t)
    }

    /// `sum_k coeffs[k] t^k`, evaluated with Horner's rule.
    pub fn poly(coeffs: Vec<f64>) -> Self {
        let name = format!("poly:{}", join(&coeffs));
        let c = coeffs.clone();
        RealFunction::new(name, coeffs, move |t| c.iter().rev().fold(0.0, |acc, &a| acc * t + a))
    }

    pub fn rename(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn neg(&self) -> Self {
        let f = self.clone();
        RealFunction::new(format!("-({})", self.name), self.params.clone(), move |t| -f.eval(t))
    }

    pub fn add(&self, other: &RealFunction) -> Self {
        let (f, g) = (self.clone(), other.clone());
        RealFunction::new(
            format!("{}+{}", self.name, other.name),
            Vec::new(),
            move |t| f.eval(t) + g.eval(t),
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        let f = self.clone();
        RealFunction::new(format!("{k}*({})", self.name), Vec::new(), move |t| k * f.eval(t))
    }

    /// `t -> f((1 - t) x + t y)`, the trace of `self` along the segment from `x` to `y`.
    pub fn segment(&self, x: f64, y: f64) -> Self {
        let f = self.clone();
        RealFunction::new(
            format!("{}|[{x},{y}]", self.name),
            vec![x, y],
            move |t| f.eval((1.0 - t) * x + t * y),
        )
    }

    /// Checks that the function is finite on an interior grid of `domain`.
    pub fn check_finite(&self, domain: &Interval, n: usize) -> Result<()> {
        for t in domain.interior_grid(n) {
            self.try_eval(t)?;
        }
        Ok(())
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Catalog entry for a real function, as written in configs and on the
/// command line (`poly:0,0,1`, `exp:2`, `abs:0.5`, `sin:20`, `const:1`, ...).
/// The parenthesised form `poly(0,0,1)` is accepted too.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    /// `c0 + c1 t + c2 t^2 + ...`
    Poly(Vec<f64>),
    /// `exp(k t)`
    Exp(f64),
    /// `|t - center|`
    Abs(f64),
    /// `sin(freq t)`
    Sin(f64),
    /// `cos(freq t)`
    Cos(f64),
    Const(f64),
    /// `t^a`
    Pow(f64),
    /// Takagi function `sum_n 2^-n d_Z(2^n t)`, 60 terms.
    Takagi,
}

impl FunctionSpec {
    pub fn build(&self) -> RealFunction {
        let name = self.to_string();
        match *self {
            FunctionSpec::Poly(ref c) => RealFunction::poly(c.clone()).rename(name),
            FunctionSpec::Exp(k) => RealFunction::new(name, vec![k], move |t| (k * t).exp()),
            FunctionSpec::Abs(c) => RealFunction::new(name, vec![c], move |t| (t - c).abs()),
            FunctionSpec::Sin(w) => RealFunction::new(name, vec![w], move |t| (w * t).sin()),
            FunctionSpec::Cos(w) => RealFunction::new(name, vec![w], move |t| (w * t).cos()),
            FunctionSpec::Const(c) => RealFunction::new(name, vec![c], move |_| c),
            FunctionSpec::Pow(a) => RealFunction::new(name, vec![a], move |t| t.powf(a)),
            FunctionSpec::Takagi => RealFunction::new(name, Vec::new(), takagi),
        }
    }
}

pub fn takagi(t: f64) -> f64 {
    let mut scale = 1.0;
    let mut sum = 0.0;
    for _ in 0..60 {
        sum += dist_to_integers(scale * t) / scale;
        scale *= 2.0;
    }
    sum
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Poly(c) => write!(f, "poly:{}", join(c)),
            FunctionSpec::Exp(k) => write!(f, "exp:{k}"),
            FunctionSpec::Abs(c) => write!(f, "abs:{c}"),
            FunctionSpec::Sin(w) => write!(f, "sin:{w}"),
            FunctionSpec::Cos(w) => write!(f, "cos:{w}"),
            FunctionSpec::Const(c) => write!(f, "const:{c}"),
            FunctionSpec::Pow(a) => write!(f, "pow:{a}"),
            FunctionSpec::Takagi => write!(f, "takagi"),
        }
    }
}

/// Splits `name:a,b` or `name(a,b)` into the name and its parameters.
pub(crate) fn split_call(s: &str) -> Result<(&str, Vec<f64>)> {
    let s = s.trim();
    let (name, args) = if let Some(open) = s.find('(') {
        if !s.ends_with(')') {
            return Err(HhError::parse(format!("missing ')' in `{s}`")));
        }
        (&s[..open], &s[open + 1..s.len() - 1])
    } else if let Some(colon) = s.find(':') {
        (&s[..colon], &s[colon + 1..])
    } else {
        (s, "")
    };
    let params = parse_floats(args)?;
    Ok((name.trim(), params))
}

pub(crate) fn parse_floats(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| parse_f64(p.trim()))
        .collect()
}

pub(crate) fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| HhError::parse(format!("expected a number, found `{s}`")))?;
    if !v.is_finite() {
        return Err(HhError::parse(format!("number `{s}` is not finite")));
    }
    Ok(v)
}

fn arity(name: &str, params: &[f64], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(HhError::parse(format!(
            "`{name}` takes {n} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(())
}

impl FromStr for FunctionSpec {
    type Err = HhError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, p) = split_call(s)?;
        let one = |default: Option<f64>| -> Result<f64> {
            match (p.len(), default) {
                (0, Some(d)) => Ok(d),
                _ => {
                    arity(name, &p, 1)?;
                    Ok(p[0])
                }
            }
        };
        Ok(match name {
            "poly" => {
                if p.is_empty() {
                    return Err(HhError::parse("`poly` needs at least one coefficient"));
                }
                FunctionSpec::Poly(p)
            }
            "exp" => FunctionSpec::Exp(one(Some(1.0))?),
            "abs" => FunctionSpec::Abs(one(Some(0.0))?),
            "sin" => FunctionSpec::Sin(one(Some(1.0))?),
            "cos" => FunctionSpec::Cos(one(Some(1.0))?),
            "const" => FunctionSpec::Const(one(None)?),
            "pow" => FunctionSpec::Pow(one(None)?),
            "takagi" => {
                arity(name, &p, 0)?;
                FunctionSpec::Takagi
            }
            other => return Err(HhError::parse(format!("unknown function `{other}`"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_horner() {
        let f = RealFunction::poly(vec![1.0, -2.0, 3.0]);
        assert_eq!(f.eval(2.0), 1.0 - 4.0 + 12.0);
    }

    #[test]
    fn parse_both_call_forms() {
        assert_eq!("poly:0,0,1".parse::<FunctionSpec>().unwrap(), FunctionSpec::Poly(vec![0.0, 0.0, 1.0]));
        assert_eq!("poly(0,2)".parse::<FunctionSpec>().unwrap(), FunctionSpec::Poly(vec![0.0, 2.0]));
        assert_eq!("exp".parse::<FunctionSpec>().unwrap(), FunctionSpec::Exp(1.0));
        assert!("const".parse::<FunctionSpec>().is_err());
        assert!("wobble:1".parse::<FunctionSpec>().is_err());
        assert!("sin:1,2".parse::<FunctionSpec>().is_err());
    }

    #[test]
    fn interval_rejects_empty() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(0.0, 1.0, 7);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[6], 1.0);
    }

    #[test]
    fn segment_trace() {
        let f = RealFunction::poly(vec![0.0, 0.0, 1.0]).segment(1.0, 3.0);
        assert_eq!(f.eval(0.5), 4.0);
    }
}
