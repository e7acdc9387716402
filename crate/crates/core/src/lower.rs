//! Lower bounds: the value at the target mean is at most the weighted mean
//! value plus an error functional.

use crate::cheb::ChebyshevSystem;
use crate::errmodel::{ErrorModel, PowerMeasure2};
use crate::error::{HhError, Result};
use crate::func::RealFunction;
use crate::meansys::{check_reproducing, partition_from_nodes, split_nodes, MeanNode, MeanSystem};
use crate::measure::{Ends, MomentSplit, UnitMeasure};
use crate::quad::{Grading, QuadratureConfig};
use crate::report::BoundReport;

/// Tolerance for the reproducing identity required before a mean-system bound is evaluated.
pub const REPRODUCING_TOL: f64 = 1e-8;

/// Numerator and denominator of the mean-system error functional.
fn error_ratio(
    sys: &ChebyshevSystem,
    eps: &ErrorModel,
    mean0: f64,
    below: &[MeanNode],
    above: &[MeanNode],
) -> Result<(f64, f64)> {
    let (mut num, mut den) = (0.0, 0.0);
    for a in below {
        let (a0, a1) = (sys.omega0.eval(a.mean), sys.omega1.eval(a.mean));
        for b in above {
            let det = a0 * sys.omega1.eval(b.mean) - a1 * sys.omega0.eval(b.mean);
            let w = a.weight * b.weight * det;
            den += w;
            if w != 0.0 {
                num += w * eps.at_triple(sys, a.mean, mean0, b.mean)?;
            }
        }
    }
    Ok((num, den))
}

/// `E(x, y)`: the `lambda lambda' Omega(M', M'')`-weighted average of
/// `eps_{M', M''}(M0)` over `T' x T''`.
///
/// The denominator is checked against the partition determinant.
#[allow(non_snake_case)]
pub fn lower_error_E(
    ms: &MeanSystem,
    sys: &ChebyshevSystem,
    eps: &ErrorModel,
    x: f64,
    y: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    let sec = ms.section(x, y)?;
    let (below, above) = split_nodes(&sec, ms.base_measure(), q)?;
    let sums = partition_from_nodes(sys, &sec, &below, &above, q)?;
    let (num, den) = error_ratio(sys, eps, sec.mean0, &below, &above)?;
    if (den - sums.denom).abs() > 1e-9 * sums.denom.abs().max(1e-300) + 1e-15 {
        return Err(HhError::contract(format!(
            "double-integral denominator {den} differs from the partition determinant {}",
            sums.denom
        )));
    }
    Ok(num / den)
}

/// `f(M0) <= int lambda f(M) dmu + E(x, y)`.
pub fn lower_bound_thm3(
    f: &RealFunction,
    ms: &MeanSystem,
    sys: &ChebyshevSystem,
    eps: &ErrorModel,
    x: f64,
    y: f64,
    q: &QuadratureConfig,
) -> Result<BoundReport> {
    let inputs = format!("f={} mean={} error={} x={x} y={y}", f.name(), ms.name(), eps.kind());
    if x == y {
        let v = f.try_eval(x)?;
        return Ok(BoundReport::new("thm3", v, v, 0.0).with_inputs(inputs));
    }
    let rep = check_reproducing(ms, sys, x, y, REPRODUCING_TOL, q)?;
    if !rep.passed {
        return Err(HhError::contract(format!(
            "mean system `{}` does not reproduce `{}` on [{x}, {y}]: defects {:e}, {:e}",
            ms.name(),
            sys.name,
            rep.defect0,
            rep.defect1
        )));
    }
    let sec = ms.section(x, y)?;
    let (below, above) = split_nodes(&sec, ms.base_measure(), q)?;
    let sums = partition_from_nodes(sys, &sec, &below, &above, q)?;
    let mut rhs = 0.0;
    for n in below.iter().chain(&above) {
        rhs += n.weight * f.try_eval(n.mean)?;
    }
    let error = if matches!(eps, ErrorModel::Constant(c) if *c == 0.0) {
        0.0
    } else {
        let (num, den) = error_ratio(sys, eps, sec.mean0, &below, &above)?;
        debug_assert!((den - sums.denom).abs() <= 1e-9 * sums.denom + 1e-15);
        num / den
    };
    Ok(BoundReport::new("thm3", f.try_eval(sec.mean0)?, rhs, error)
        .with_inputs(inputs)
        .with_tol(q.tol))
}

/// `I = int_{]mu1,1]} int_{[0,mu1]} (t'' - t') eta((mu1 - t') / (t'' - t')) dmu dmu`
/// where `eta` sees the sub-segment `[t', t'']` of a segment of length `s`.
pub fn i_double_integral(mu: &UnitMeasure, eta: &ErrorModel, s: f64, q: &QuadratureConfig) -> Result<f64> {
    let split = mu.split(q)?;
    i_from_split(&split, eta, s)
}

fn i_from_split(split: &MomentSplit, eta: &ErrorModel, s: f64) -> Result<f64> {
    if let ErrorModel::Constant(c) = eta {
        return Ok(c * split.s);
    }
    let mut total = 0.0;
    for &(a, wa) in &split.left {
        for &(b, wb) in &split.right {
            let len = b - a;
            let t = ((split.mu1 - a) / len).clamp(0.0, 1.0);
            total += wa * wb * len * eta.on_subsegment(a, b, t, s)?;
        }
    }
    Ok(total)
}

/// `f_seg(mu1) <= int f_seg dmu + I / S(mu)`.
pub fn lower_bound_thm4(
    f_seg: &RealFunction,
    mu: &UnitMeasure,
    eta: &ErrorModel,
    s: f64,
    q: &QuadratureConfig,
) -> Result<BoundReport> {
    let split = mu.split(q)?;
    let rhs = mu.integrate(|t| f_seg.eval(t), 0.0, 1.0, Ends::CLOSED, q)?;
    let i = i_from_split(&split, eta, s)?;
    Ok(BoundReport::new("thm4", f_seg.try_eval(split.mu1)?, rhs, i / split.s)
        .with_inputs(format!("f={} mu={} error={} s={s}", f_seg.name(), mu.label(), eta.kind()))
        .with_tol(q.tol))
}

/// Prefactor `1 / S(mu)` for Lebesgue measure.
pub const MIDPOINT_PREFACTOR: f64 = 8.0;

/// Lebesgue case of [`lower_bound_thm4`]: `f_seg(1/2) <= int_0^1 f_seg + 8 I`.
pub fn lower_bound_cor2hp1(f_seg: &RealFunction, eta: &ErrorModel, s: f64, q: &QuadratureConfig) -> Result<BoundReport> {
    let mu = UnitMeasure::lebesgue();
    let split = mu.split(q)?;
    if (1.0 / split.s - MIDPOINT_PREFACTOR).abs() > 1e-12 || (split.mu1 - 0.5).abs() > 1e-12 {
        return Err(HhError::contract(format!(
            "Lebesgue moments off: mu1 = {}, 1/S = {}",
            split.mu1,
            1.0 / split.s
        )));
    }
    let rhs = mu.integrate(|t| f_seg.eval(t), 0.0, 1.0, Ends::CLOSED, q)?;
    let i = i_from_split(&split, eta, s)?;
    Ok(BoundReport::new("cor2hp1", f_seg.try_eval(0.5)?, rhs, MIDPOINT_PREFACTOR * i)
        .with_inputs(format!("f={} error={} s={s}", f_seg.name(), eta.kind()))
        .with_tol(q.tol))
}

/// `J(s) = sum c A_p B_q s^(p+q-1)` with `A_p = int_{[0,mu1]} (mu1 - t)^p dmu` and
/// `B_q = int_{]mu1,1]} (t - mu1)^q dmu`.
pub fn j_functional(nu: &PowerMeasure2, mu: &UnitMeasure, s: f64, q: &QuadratureConfig) -> Result<f64> {
    nu.check_length(s)?;
    if nu.atoms.is_empty() {
        return Ok(0.0);
    }
    let mu1 = mu.split(q)?.mu1;
    let left = mu.graded(0.0, mu1, Ends::CLOSED, Grading::Right, q);
    let right = mu.graded(mu1, 1.0, Ends::LEFT_OPEN, Grading::Left, q);
    Ok(nu.atoms.iter().fold(0.0, |acc, a| {
        let pa: f64 = left.iter().map(|&(t, w)| w * (mu1 - t).max(0.0).powf(a.p)).sum();
        let pb: f64 = right.iter().map(|&(t, w)| w * (t - mu1).max(0.0).powf(a.q)).sum();
        acc + a.c * pa * pb * s.powf(a.p + a.q - 1.0)
    }))
}

/// `sum c s^(p+q-1) / (2^(p+q-1) (p+1) (q+1))`.
pub fn cor4c2_error(nu: &PowerMeasure2, s: f64) -> Result<f64> {
    nu.check_length(s)?;
    Ok(nu.atoms.iter().fold(0.0, |acc, a| {
        acc + a.c * s.powf(a.p + a.q - 1.0) / (2f64.powf(a.p + a.q - 1.0) * (a.p + 1.0) * (a.q + 1.0))
    }))
}

/// `f_seg(1/2) <= int_0^1 f_seg + 8 J(s)` with the closed form of `8 J(s)`.
pub fn lower_bound_cor4c2(f_seg: &RealFunction, nu: &PowerMeasure2, s: f64, q: &QuadratureConfig) -> Result<BoundReport> {
    let rhs = UnitMeasure::lebesgue().integrate(|t| f_seg.eval(t), 0.0, 1.0, Ends::CLOSED, q)?;
    Ok(BoundReport::new("cor4c2", f_seg.try_eval(0.5)?, rhs, cor4c2_error(nu, s)?)
        .with_inputs(format!("f={} s={s}", f_seg.name()))
        .with_tol(q.tol))
}

/// `f_seg(mu1) <= int f_seg dmu + J(s) / S(mu)`, the power-measure case of [`lower_bound_thm4`].
pub fn lower_bound_thm3a2(
    f_seg: &RealFunction,
    mu: &UnitMeasure,
    nu: &PowerMeasure2,
    s: f64,
    q: &QuadratureConfig,
) -> Result<BoundReport> {
    let split = mu.split(q)?;
    let rhs = mu.integrate(|t| f_seg.eval(t), 0.0, 1.0, Ends::CLOSED, q)?;
    Ok(BoundReport::new("thm3a2", f_seg.try_eval(split.mu1)?, rhs, j_functional(nu, mu, s, q)? / split.s)
        .with_inputs(format!("f={} mu={} s={s}", f_seg.name(), mu.label()))
        .with_tol(q.tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::errmodel::{DyadicErrorModel, PowerMeasure3};
    use crate::func::Interval;
    use crate::meansys::lift_weighted_system;

    fn lin() -> ChebyshevSystem {
        ChebyshevSystem::linear(Interval::new(-1.0, 2.0).unwrap())
    }

    fn sq() -> RealFunction {
        RealFunction::poly(vec![0.0, 0.0, 1.0])
    }

    #[test]
    fn error_functional_examples() {
        let q = QuadratureConfig::default();
        let ms = lift_weighted_system(&lin(), &RealFunction::constant(1.0), &q).unwrap();
        assert_eq!(lower_error_E(&ms, &lin(), &ErrorModel::zero(), 0.0, 1.0, &q).unwrap(), 0.0);
        let e = lower_error_E(&ms, &lin(), &ErrorModel::Constant(0.7), 0.0, 1.0, &q).unwrap();
        assert!((e - 0.7).abs() < 1e-13);
        // eps(v, w, u) = w - v; closed form int_0^.5 int_.5^1 (b-a)^2 / int int (b-a) = (7/48) / (1/8)
        let len = ErrorModel::Power3(PowerMeasure3::single(0.0, 0.0, 1.0, 1.0).unwrap());
        let e = lower_error_E(&ms, &lin(), &len, 0.0, 1.0, &q).unwrap();
        assert!((e - 7.0 / 6.0 * 0.5).abs() < 1e-12, "{e}");
    }

    #[test]
    fn thm3_examples() {
        let q = QuadratureConfig::default();
        let ms = lift_weighted_system(&lin(), &RealFunction::constant(1.0), &q).unwrap();
        let eps = crate::residual::measured_eps(&sq(), &lin(), 9);
        let r = lower_bound_thm3(&sq(), &ms, &lin(), &eps, 0.0, 1.0, &q).unwrap();
        assert!((r.margin - 1.0 / 12.0).abs() < 1e-13);
        let aff = RealFunction::poly(vec![0.3, -2.0]);
        let r = lower_bound_thm3(&aff, &ms, &lin(), &ErrorModel::zero(), 0.0, 1.0, &q).unwrap();
        assert!(r.margin.abs() < 1e-13);
        let bad = ms.scale_lambda(0.5);
        assert!(matches!(
            lower_bound_thm3(&sq(), &bad, &lin(), &ErrorModel::zero(), 0.0, 1.0, &q),
            Err(HhError::Contract(_))
        ));
    }

    #[test]
    fn i_examples() {
        let q = QuadratureConfig::default();
        let leb = UnitMeasure::lebesgue();
        assert!((i_double_integral(&leb, &ErrorModel::Constant(2.0), 1.0, &q).unwrap() - 0.25).abs() < 1e-14);
        assert_eq!(i_double_integral(&leb, &ErrorModel::zero(), 1.0, &q).unwrap(), 0.0);
        let p = ErrorModel::Power2(PowerMeasure2::single(1.0, 1.0, 1.0).unwrap());
        let i = i_double_integral(&leb, &p, 1.0, &q).unwrap();
        assert!((i - 1.0 / 64.0).abs() < 1e-12, "{i}");
    }

    #[test]
    fn thm4_examples() {
        let q = QuadratureConfig::default();
        let r = lower_bound_thm4(&sq(), &UnitMeasure::lebesgue(), &ErrorModel::zero(), 1.0, &q).unwrap();
        assert!((r.lhs - 0.25).abs() < 1e-14 && (r.rhs_main - 1.0 / 3.0).abs() < 1e-14);
        let two = UnitMeasure::atomic(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let r = lower_bound_thm4(&sq(), &two, &ErrorModel::zero(), 1.0, &q).unwrap();
        assert!((r.margin - 0.25).abs() < 1e-14);
        assert!(lower_bound_thm4(&sq(), &UnitMeasure::dirac(0.4).unwrap(), &ErrorModel::zero(), 1.0, &q).is_err());
    }

    #[test]
    fn cor2hp1_examples() {
        let q = QuadratureConfig::default();
        let r = lower_bound_cor2hp1(&sq(), &ErrorModel::Constant(0.3), 1.0, &q).unwrap();
        assert!((r.error_term - 0.3).abs() < 1e-14);
        let v = RealFunction::new("v", vec![], |t| (t - 0.5).abs());
        let r = lower_bound_cor2hp1(&v, &ErrorModel::zero(), 1.0, &q).unwrap();
        assert!(r.lhs.abs() < 1e-15 && (r.rhs_main - 0.25).abs() < 1e-12);
        let dy = ErrorModel::Dyadic(DyadicErrorModel::new(RealFunction::identity(), 40).unwrap());
        let r = lower_bound_cor2hp1(&sq(), &dy, 1.0, &q.with_panels(16)).unwrap();
        assert!(r.error_term > 0.0);
    }

    #[test]
    fn j_and_cor4c2_examples() {
        let q = QuadratureConfig::default();
        let leb = UnitMeasure::lebesgue();
        let nu = PowerMeasure2::single(1.0, 1.0, 1.0).unwrap();
        assert!((j_functional(&nu, &leb, 1.0, &q).unwrap() - 1.0 / 64.0).abs() < 1e-15);
        let nu0 = PowerMeasure2::single(0.0, 0.0, 1.0).unwrap();
        assert!((j_functional(&nu0, &leb, 2.0, &q).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(j_functional(&PowerMeasure2::default(), &leb, 1.0, &q).unwrap(), 0.0);
        assert!((cor4c2_error(&nu, 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((cor4c2_error(&nu, 1.0).unwrap() - 8.0 * j_functional(&nu, &leb, 1.0, &q).unwrap()).abs() < 1e-15);
        assert_eq!(cor4c2_error(&PowerMeasure2::default(), 1.0).unwrap(), 0.0);
    }
}
