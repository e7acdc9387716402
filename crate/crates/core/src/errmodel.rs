//! Error terms of approximate convexity: power-measure errors, the dyadic
//! (Takagi-type) series, the `Phi` kernel and the beta function, plus the
//! [`ErrorModel`] union consumed by the bound modules.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cheb::ChebyshevSystem;
use crate::error::{HhError, Result};
use crate::func::{parse_f64, FunctionSpec, RealFunction};
use crate::measure::parse_tuples;
use crate::quad::{integrate, QuadratureConfig};
use crate::residual::MeasuredEps;

/// Default truncation of the dyadic series.
pub const DEFAULT_DYADIC_TERMS: usize = 40;

/// Distance from `s` to the nearest integer, in `[0, 1/2]`.
#[inline]
pub fn dist_to_integers(s: f64) -> f64 {
    (s - s.round()).abs()
}

// ---------------------------------------------------------------------------
// Power-measure errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerAtom2 {
    pub p: f64,
    pub q: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerAtom3 {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub c: f64,
}

/// Finite atomic measure on `[0, inf)^2`: `eta(t) = sum c t^p (1-t)^q s^(p+q-1)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PowerMeasure2 {
    pub atoms: Vec<PowerAtom2>,
}

/// Finite atomic measure on `[0, inf)^3`: `eta(t) = sum c t^p (1-t)^q s^r`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PowerMeasure3 {
    pub atoms: Vec<PowerAtom3>,
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(HhError::input(format!("exponent {name} = {v} must be finite and >= 0")))
    }
}

fn check_weight(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(HhError::input(format!("atom weight {c} must be positive")))
    }
}

impl PowerMeasure2 {
    pub fn new(atoms: Vec<PowerAtom2>) -> Result<Self> {
        for a in &atoms {
            check_exponent("p", a.p)?;
            check_exponent("q", a.q)?;
            check_weight(a.c)?;
        }
        Ok(PowerMeasure2 { atoms })
    }

    pub fn single(p: f64, q: f64, c: f64) -> Result<Self> {
        PowerMeasure2::new(vec![PowerAtom2 { p, q, c }])
    }

    pub fn from_tuples(atoms: &[(f64, f64, f64)]) -> Result<Self> {
        PowerMeasure2::new(atoms.iter().map(|&(p, q, c)| PowerAtom2 { p, q, c }).collect())
    }

    pub(crate) fn check_length(&self, s: f64) -> Result<()> {
        if s < 0.0 {
            return Err(HhError::input(format!("segment length {s} is negative")));
        }
        if s == 0.0 && self.atoms.iter().any(|a| a.p + a.q < 1.0) {
            return Err(HhError::Degenerate(
                "s = 0 with an atom of p + q < 1 makes s^(p+q-1) singular".into(),
            ));
        }
        Ok(())
    }
}

impl PowerMeasure3 {
    pub fn new(atoms: Vec<PowerAtom3>) -> Result<Self> {
        for a in &atoms {
            check_exponent("p", a.p)?;
            check_exponent("q", a.q)?;
            check_exponent("r", a.r)?;
            check_weight(a.c)?;
        }
        Ok(PowerMeasure3 { atoms })
    }

    pub fn single(p: f64, q: f64, r: f64, c: f64) -> Result<Self> {
        PowerMeasure3::new(vec![PowerAtom3 { p, q, r, c }])
    }

    pub fn from_tuples(atoms: &[(f64, f64, f64, f64)]) -> Result<Self> {
        PowerMeasure3::new(atoms.iter().map(|&(p, q, r, c)| PowerAtom3 { p, q, r, c }).collect())
    }
}

/// `sum c t^p (1-t)^q s^(p+q-1)`, with `0^0 = 1`.
pub fn power_eta2(nu: &PowerMeasure2, t: f64, s: f64) -> Result<f64> {
    nu.check_length(s)?;
    Ok(nu
        .atoms
        .iter()
        .fold(0.0, |acc, a| acc + a.c * t.powf(a.p) * (1.0 - t).powf(a.q) * s.powf(a.p + a.q - 1.0)))
}

/// `sum c t^p (1-t)^q s^r`, with `0^0 = 1`.
pub fn power_eta3(nu: &PowerMeasure3, t: f64, s: f64) -> Result<f64> {
    if s < 0.0 {
        return Err(HhError::input(format!("segment length {s} is negative")));
    }
    Ok(nu
        .atoms
        .iter()
        .fold(0.0, |acc, a| acc + a.c * t.powf(a.p) * (1.0 - t).powf(a.q) * s.powf(a.r)))
}

// ---------------------------------------------------------------------------
// Dyadic series
// ---------------------------------------------------------------------------

/// `eta(t) = sum_{n>=0} 2^-n alpha(2 d_Z(2^n t) s)` truncated after `n_terms` terms.
#[derive(Debug, Clone)]
pub struct DyadicErrorModel {
    pub alpha: RealFunction,
    pub n_terms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DyadicValue {
    pub sum: f64,
    /// `2^(1 - n_terms) * sup alpha` over the arguments `[0, s]`.
    pub tail_bound: f64,
}

impl DyadicValue {
    /// Partial sum plus the tail bound: an upper bound of the full series.
    pub fn upper(&self) -> f64 {
        self.sum + self.tail_bound
    }
}

const ALPHA_SAMPLES: usize = 65;

impl DyadicErrorModel {
    pub fn new(alpha: RealFunction, n_terms: usize) -> Result<Self> {
        if n_terms == 0 {
            return Err(HhError::input("dyadic model needs n_terms >= 1"));
        }
        let m = DyadicErrorModel { alpha, n_terms };
        for i in 0..ALPHA_SAMPLES {
            let u = i as f64 / 8.0;
            let v = m.alpha.try_eval(u)?;
            if v < 0.0 {
                return Err(HhError::input(format!("alpha({u}) = {v} is negative")));
            }
        }
        Ok(m)
    }

    /// Sampled `sup alpha` on `[0, s]`.
    fn alpha_sup(&self, s: f64) -> f64 {
        (0..ALPHA_SAMPLES)
            .map(|i| self.alpha.eval(s * i as f64 / (ALPHA_SAMPLES - 1) as f64))
            .fold(0.0, f64::max)
    }
}

pub fn dyadic_eta(model: &DyadicErrorModel, s: f64, t: f64) -> DyadicValue {
    let sum = dyadic_partial_sum(model, s, t);
    let tail_bound = 2f64.powi(1 - model.n_terms as i32) * model.alpha_sup(s);
    DyadicValue { sum, tail_bound }
}

fn dyadic_partial_sum(model: &DyadicErrorModel, s: f64, t: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = 1.0; // 2^n
    for _ in 0..model.n_terms {
        sum += model.alpha.eval(2.0 * dist_to_integers(pow * t) * s) / pow;
        pow *= 2.0;
    }
    sum
}

// ---------------------------------------------------------------------------
// Phi kernel
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiValue {
    pub value: f64,
    /// Cutoff `M`: terms `m < M` were summed.
    pub cutoff: u64,
    /// `16 / M`.
    pub tail_bound: f64,
}

const PHI_MAX_BLOCKS: u32 = 48;

/// `Phi(sigma) = (1-sigma)(3 sigma+1) + sum_{m>=1} (1 - (2m+1) sigma / 2^k)^+ (...)`,
/// `k = floor(log2 m) + 1`.
///
/// Terms are summed in dyadic blocks `m in [2^(k-1), 2^k)`, i.e. the cutoff
/// doubles per block. Block sums behave like `A / 2^k + B / 4^k`, so the
/// remaining tail is approximated by one more copy of the last block, and
/// summation stops once that extrapolated value moves by less than `tol`.
pub fn phi_kernel(sigma: f64, tol: f64) -> PhiValue {
    let base = (1.0 - sigma) * (3.0 * sigma + 1.0);
    let mut sum = 0.0;
    let mut last = 0.0;
    // blocks are empty until 2^k (1 - sigma) > sigma
    let first_active = if sigma >= 1.0 {
        0
    } else {
        (sigma / (1.0 - sigma)).log2().ceil().max(0.0) as u32 + 1
    };
    let min_blocks = (first_active + 3).clamp(3, PHI_MAX_BLOCKS);
    let mut k = 1u32;
    loop {
        let p = (1u64 << k) as f64;
        let lo = 1u64 << (k - 1);
        let mut hi = (1u64 << k) - 1;
        if sigma > 0.0 {
            // (2m + 1) sigma < 2^k  <=>  m < (2^k / sigma - 1) / 2
            let bound = ((p / sigma - 1.0) / 2.0).ceil() - 1.0;
            if bound < lo as f64 {
                hi = lo - 1;
            } else if bound < hi as f64 {
                hi = bound as u64;
            }
        }
        let mut block = 0.0;
        let mut m = lo;
        while m <= hi {
            let mf = m as f64;
            let pos = 1.0 - (2.0 * mf + 1.0) / p * sigma;
            if pos > 0.0 {
                let a = (sigma * (2.0 * mf + 3.0) + p) / (p * (mf + 1.0) * (mf + 1.0));
                let b = (sigma * (2.0 * mf - 1.0) + p) / (p * mf * mf);
                block += pos * (a + b);
            }
            m += 1;
        }
        sum += block;
        let step = 2.0 * block - last;
        last = block;
        if (k >= min_blocks && step.abs() < tol) || k >= PHI_MAX_BLOCKS {
            break;
        }
        k += 1;
    }
    let cutoff = 1u64 << k;
    PhiValue {
        value: base + sum + last,
        cutoff,
        tail_bound: 16.0 / cutoff as f64,
    }
}

/// `int_0^1 alpha(sigma s) Phi(sigma) d sigma`, the kernel form of `8 I(x, y)`
/// under the dyadic error model.
pub fn phi_integral(alpha: &RealFunction, s: f64, tol: f64, q: &QuadratureConfig) -> f64 {
    integrate(
        |sigma| alpha.eval(sigma * s) * phi_kernel(sigma, tol).value,
        0.0,
        1.0,
        q,
    )
}

// ---------------------------------------------------------------------------
// Beta function
// ---------------------------------------------------------------------------

/// `B(p1, p2) = int_0^1 t^(p1-1) (1-t)^(p2-1) dt`.
pub fn beta_fn(p1: f64, p2: f64) -> Result<f64> {
    if !(p1 > 0.0 && p2 > 0.0) || !p1.is_finite() || !p2.is_finite() {
        return Err(HhError::input(format!("beta needs positive arguments, got ({p1}, {p2})")));
    }
    Ok(statrs::function::beta::beta(p1, p2))
}

// ---------------------------------------------------------------------------
// ErrorModel
// ---------------------------------------------------------------------------

/// An error function `eps_{v,w}(u)` / `eta_{x,y}(t)` in one of the supported forms.
#[derive(Debug, Clone)]
pub enum ErrorModel {
    Constant(f64),
    Measured(MeasuredEps),
    Power2(PowerMeasure2),
    Power3(PowerMeasure3),
    Dyadic(DyadicErrorModel),
}

impl ErrorModel {
    pub fn zero() -> Self {
        ErrorModel::Constant(0.0)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ErrorModel::Constant(_) => "const",
            ErrorModel::Measured(_) => "measured",
            ErrorModel::Power2(_) => "power2",
            ErrorModel::Power3(_) => "power3",
            ErrorModel::Dyadic(_) => "dyadic",
        }
    }

    /// `eps_{v,w}(u)` for `v <= u <= w` in the coordinates of `sys`.
    ///
    /// Measured grids are looked up at `(v, u, w)`. Closed-form models see the
    /// relative position `t = Omega(v,u)/Omega(v,w)` and the length `w - v`.
    pub fn at_triple(&self, sys: &ChebyshevSystem, v: f64, u: f64, w: f64) -> Result<f64> {
        match self {
            ErrorModel::Constant(c) => Ok(*c),
            ErrorModel::Measured(m) => Ok(m.lookup(v, u, w)),
            _ => {
                let t = (sys.det(v, u) / sys.det(v, w)).clamp(0.0, 1.0);
                self.relative(t, (w - v).abs())
            }
        }
    }

    /// `eta` for the sub-segment between the parameters `a < b` of a segment
    /// of length `s`, evaluated at relative position `t`.
    ///
    /// Measured grids are tabulated in segment parameters and are looked up at
    /// `(a, a + (b - a) t, b)`; closed-form models see the length `(b - a) s`.
    pub fn on_subsegment(&self, a: f64, b: f64, t: f64, s: f64) -> Result<f64> {
        match self {
            ErrorModel::Constant(c) => Ok(*c),
            ErrorModel::Measured(m) => Ok(m.lookup(a, a + (b - a) * t, b)),
            _ => self.relative(t, (b - a) * s),
        }
    }

    fn relative(&self, t: f64, len: f64) -> Result<f64> {
        match self {
            ErrorModel::Constant(c) => Ok(*c),
            ErrorModel::Power2(nu) => power_eta2(nu, t, len),
            ErrorModel::Power3(nu) => power_eta3(nu, t, len),
            ErrorModel::Dyadic(m) => Ok(dyadic_partial_sum(m, len, t)),
            ErrorModel::Measured(m) => Ok(m.lookup(0.0, t, 1.0)),
        }
    }
}

/// Config form of an error model:
/// `const:c`, `measured[:grid]`, `power2:[(p,q,c),...]`,
/// `power3:[(p,q,r,c),...]`, `dyadic:alpha=<fn>,n=<int>`.
#[derive(Debug, Clone, PartialEq)]
pub enum ErrorSpec {
    Const(f64),
    Measured { grid: usize },
    Power2(Vec<(f64, f64, f64)>),
    Power3(Vec<(f64, f64, f64, f64)>),
    Dyadic { alpha: FunctionSpec, n: usize },
}

impl ErrorSpec {
    /// Builds every model except `measured`, which depends on the function.
    pub fn build(&self) -> Result<ErrorModel> {
        Ok(match self {
            ErrorSpec::Const(c) => ErrorModel::Constant(*c),
            ErrorSpec::Power2(a) => ErrorModel::Power2(PowerMeasure2::new(
                a.iter().map(|&(p, q, c)| PowerAtom2 { p, q, c }).collect(),
            )?),
            ErrorSpec::Power3(a) => ErrorModel::Power3(PowerMeasure3::new(
                a.iter().map(|&(p, q, r, c)| PowerAtom3 { p, q, r, c }).collect(),
            )?),
            ErrorSpec::Dyadic { alpha, n } => ErrorModel::Dyadic(DyadicErrorModel::new(alpha.build(), *n)?),
            ErrorSpec::Measured { .. } => {
                return Err(HhError::contract("a measured error model needs a function to measure"))
            }
        })
    }

    pub fn is_measured(&self) -> bool {
        matches!(self, ErrorSpec::Measured { .. })
    }
}

impl fmt::Display for ErrorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorSpec::Const(c) => write!(f, "const:{c}"),
            ErrorSpec::Measured { grid } => write!(f, "measured:{grid}"),
            ErrorSpec::Power2(a) => {
                let v: Vec<String> = a.iter().map(|(p, q, c)| format!("({p},{q},{c})")).collect();
                write!(f, "power2:[{}]", v.join(","))
            }
            ErrorSpec::Power3(a) => {
                let v: Vec<String> = a.iter().map(|(p, q, r, c)| format!("({p},{q},{r},{c})")).collect();
                write!(f, "power3:[{}]", v.join(","))
            }
            ErrorSpec::Dyadic { alpha, n } => write!(f, "dyadic:alpha={alpha},n={n}"),
        }
    }
}

impl FromStr for ErrorSpec {
    type Err = HhError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(c) = s.strip_prefix("const:") {
            return Ok(ErrorSpec::Const(parse_f64(c.trim())?));
        }
        if s == "measured" {
            return Ok(ErrorSpec::Measured {
                grid: crate::residual::DEFAULT_EPS_GRID,
            });
        }
        if let Some(g) = s.strip_prefix("measured:") {
            let grid: usize = g
                .trim()
                .parse()
                .map_err(|_| HhError::parse(format!("bad grid size `{g}`")))?;
            if grid < 3 {
                return Err(HhError::parse("measured grid needs at least 3 points"));
            }
            return Ok(ErrorSpec::Measured { grid });
        }
        if let Some(a) = s.strip_prefix("power2:") {
            let t = parse_tuples(a, 3)?;
            let spec = ErrorSpec::Power2(t.into_iter().map(|v| (v[0], v[1], v[2])).collect());
            spec.build().map_err(|e| HhError::parse(e.to_string()))?;
            return Ok(spec);
        }
        if let Some(a) = s.strip_prefix("power3:") {
            let t = parse_tuples(a, 4)?;
            let spec = ErrorSpec::Power3(t.into_iter().map(|v| (v[0], v[1], v[2], v[3])).collect());
            spec.build().map_err(|e| HhError::parse(e.to_string()))?;
            return Ok(spec);
        }
        if let Some(rest) = s.strip_prefix("dyadic:") {
            // function specs contain commas, so `n=` is split off the end
            let (alpha_part, n) = match rest.rfind(",n=") {
                Some(i) => {
                    let v = &rest[i + 3..];
                    let n: usize = v
                        .trim()
                        .parse()
                        .map_err(|_| HhError::parse(format!("bad term count `{v}`")))?;
                    (&rest[..i], n)
                }
                None => (rest, DEFAULT_DYADIC_TERMS),
            };
            let alpha = alpha_part
                .trim()
                .strip_prefix("alpha=")
                .ok_or_else(|| HhError::parse("dyadic model needs alpha=<fn>"))?
                .parse::<FunctionSpec>()?;
            if n == 0 {
                return Err(HhError::parse("dyadic model needs n >= 1"));
            }
            return Ok(ErrorSpec::Dyadic { alpha, n });
        }
        Err(HhError::parse(format!("unknown error model `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn d_z_examples() {
        assert_eq!(dist_to_integers(0.75), 0.25);
        assert_eq!(dist_to_integers(2.0), 0.0);
        assert!((dist_to_integers(-0.4) - 0.4).abs() < 1e-16);
    }

    fn linear_alpha(n: usize) -> DyadicErrorModel {
        DyadicErrorModel::new(RealFunction::identity(), n).unwrap()
    }

    #[test]
    fn dyadic_examples() {
        let m = linear_alpha(40);
        assert_eq!(dyadic_eta(&m, 1.0, 0.5).sum, 1.0);
        // d_Z(2^n / 3) = 1/3 for all n: sum 2^-n 2/3 = 4/3 in the limit.
        let v = dyadic_eta(&m, 1.0, 1.0 / 3.0);
        let partial: f64 = (0..40).map(|n| 2f64.powi(-n) * 2.0 / 3.0).sum();
        assert!((v.sum - partial).abs() < 1e-12);
        assert!((v.sum - 4.0 / 3.0).abs() < 1e-10);
        let c = DyadicErrorModel::new(RealFunction::constant(0.3), 60).unwrap();
        let v = dyadic_eta(&c, 0.7, std::f64::consts::FRAC_1_SQRT_2);
        assert!((v.sum - 0.6).abs() < 1e-15);
    }

    #[test]
    fn dyadic_partial_sums_nondecreasing() {
        let mut prev = 0.0;
        for n in 1..30 {
            let v = dyadic_eta(&linear_alpha(n), 0.8, 0.1234).sum;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn phi_examples() {
        assert!(phi_kernel(1.0, 1e-6).value.abs() <= 1e-6);
        let p0 = phi_kernel(0.0, 1e-6).value;
        assert!((p0 - PI * PI / 3.0).abs() < 1e-6, "{p0}");
        assert!(phi_kernel(0.5, 1e-6).value >= 1.0);
    }

    #[test]
    fn power_examples() {
        let nu = PowerMeasure2::single(1.0, 1.0, 1.0).unwrap();
        assert_eq!(power_eta2(&nu, 0.5, 2.0).unwrap(), 0.5);
        let nu = PowerMeasure2::single(0.0, 0.0, 3.0).unwrap();
        assert_eq!(power_eta2(&nu, 0.77, 2.0).unwrap(), 1.5);
        let nu = PowerMeasure2::new(vec![
            PowerAtom2 { p: 1.0, q: 0.0, c: 1.0 },
            PowerAtom2 { p: 0.0, q: 1.0, c: 1.0 },
        ])
        .unwrap();
        assert!((power_eta2(&nu, 0.3, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let nu = PowerMeasure2::single(0.0, 0.5, 1.0).unwrap();
        assert!(matches!(power_eta2(&nu, 0.3, 0.0), Err(HhError::Degenerate(_))));

        let nu = PowerMeasure3::single(1.0, 1.0, 2.0, 1.0).unwrap();
        assert_eq!(power_eta3(&nu, 0.5, 3.0).unwrap(), 2.25);
        let nu = PowerMeasure3::single(0.0, 0.0, 0.0, 5.0).unwrap();
        assert_eq!(power_eta3(&nu, 0.1, 0.0).unwrap(), 5.0);
        let nu = PowerMeasure3::new(vec![
            PowerAtom3 { p: 2.0, q: 0.0, r: 1.0, c: 1.0 },
            PowerAtom3 { p: 0.0, q: 2.0, r: 1.0, c: 1.0 },
        ])
        .unwrap();
        assert_eq!(power_eta3(&nu, 0.5, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn power_rejects_bad_atoms() {
        assert!(PowerMeasure2::single(-1.0, 0.0, 1.0).is_err());
        assert!(PowerMeasure3::single(0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn beta_examples() {
        assert!((beta_fn(1.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((beta_fn(2.0, 2.0).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((beta_fn(2.5, 1.5).unwrap() - PI / 16.0).abs() < 1e-14);
        assert!(beta_fn(0.0, 1.0).is_err());
        assert!(beta_fn(1.0, -2.0).is_err());
    }

    #[test]
    fn error_spec_round_trip() {
        for s in [
            "const:0.5",
            "measured:33",
            "power2:[(1,1,0.5)]",
            "power3:[(1,1,2,1),(0,0,0,5)]",
            "dyadic:alpha=poly:0,1,n=40",
        ] {
            let e: ErrorSpec = s.parse().unwrap();
            assert_eq!(e.to_string(), s);
        }
        let e: ErrorSpec = "dyadic:alpha=poly(0,1),n=12".parse().unwrap();
        assert_eq!(
            e,
            ErrorSpec::Dyadic {
                alpha: FunctionSpec::Poly(vec![0.0, 1.0]),
                n: 12
            }
        );
        assert!("power2:[(1,1)]".parse::<ErrorSpec>().is_err());
        assert!("power2:[(1,1,-1)]".parse::<ErrorSpec>().is_err());
        assert!("dyadic:n=3".parse::<ErrorSpec>().is_err());
    }
}
