//! Upper bounds: the weighted mean value is at most an endpoint combination
//! plus an error functional.

use crate::cheb::ChebyshevSystem;
use crate::errmodel::{beta_fn, ErrorModel, PowerMeasure3};
use crate::error::{HhError, Result};
use crate::func::RealFunction;
use crate::lower::REPRODUCING_TOL;
use crate::meansys::{check_reproducing, section_nodes, MeanSystem};
use crate::measure::{Ends, UnitMeasure};
use crate::quad::{Grading, QuadratureConfig};
use crate::report::BoundReport;

/// `E(x, y) = int lambda(t) eps_{x,y}(M(t)) dmu(t)`.
pub fn upper_error_thm5(
    ms: &MeanSystem,
    sys: &ChebyshevSystem,
    eps: &ErrorModel,
    x: f64,
    y: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    if matches!(eps, ErrorModel::Constant(c) if *c == 0.0) {
        return Ok(0.0);
    }
    let sec = ms.section(x, y)?;
    let mut total = 0.0;
    for n in section_nodes(&sec, ms.base_measure(), q) {
        if n.weight != 0.0 {
            total += n.weight * eps.at_triple(sys, x, n.mean.clamp(x, y), y)?;
        }
    }
    Ok(total)
}

/// `int lambda f(M) dmu <= Omega(M0,y)/Omega(x,y) f(x) + Omega(x,M0)/Omega(x,y) f(y) + E(x, y)`.
pub fn upper_bound_thm5(
    f: &RealFunction,
    ms: &MeanSystem,
    sys: &ChebyshevSystem,
    eps: &ErrorModel,
    x: f64,
    y: f64,
    q: &QuadratureConfig,
) -> Result<BoundReport> {
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
    let mut lhs = 0.0;
    for n in section_nodes(&sec, ms.base_measure(), q) {
        lhs += n.weight * f.try_eval(n.mean)?;
    }
    let (w1, w2) = sys.weights(x, sec.mean0, y);
    let rhs = w1 * f.try_eval(x)? + w2 * f.try_eval(y)?;
    Ok(BoundReport::new("thm5", lhs, rhs, upper_error_thm5(ms, sys, eps, x, y, q)?)
        .with_inputs(format!("f={} mean={} error={} x={x} y={y}", f.name(), ms.name(), eps.kind()))
        .with_tol(q.tol))
}

/// `int f_seg dmu <= (1 - mu1) f_seg(0) + mu1 f_seg(1) + int eta dmu`.
pub fn upper_bound_thm6(
    f_seg: &RealFunction,
    mu: &UnitMeasure,
    eta: &ErrorModel,
    s: f64,
    q: &QuadratureConfig,
) -> Result<BoundReport> {
    let mu1 = mu.first_moment(q)?;
    let lhs = mu.integrate(|t| f_seg.eval(t), 0.0, 1.0, Ends::CLOSED, q)?;
    let rhs = (1.0 - mu1) * f_seg.try_eval(0.0)? + mu1 * f_seg.try_eval(1.0)?;
    let error = match eta {
        ErrorModel::Constant(c) => *c * mu.total_mass(q),
        _ => {
            let mut total = 0.0;
            for (t, w) in mu.nodes(0.0, 1.0, Ends::CLOSED, q) {
                total += w * eta.on_subsegment(0.0, 1.0, t, s)?;
            }
            total
        }
    };
    Ok(BoundReport::new("thm6", lhs, rhs, error)
        .with_inputs(format!("f={} mu={} error={} s={s}", f_seg.name(), mu.label(), eta.kind()))
        .with_tol(q.tol))
}

/// [`upper_bound_thm6`] with `eta(t) = sum c t^p (1-t)^q s^r`, integrated per atom.
pub fn upper_bound_cor6a(
    f_seg: &RealFunction,
    mu: &UnitMeasure,
    nu: &PowerMeasure3,
    s: f64,
    q: &QuadratureConfig,
) -> Result<BoundReport> {
    if s < 0.0 {
        return Err(HhError::input(format!("segment length {s} is negative")));
    }
    let main = upper_bound_thm6(f_seg, mu, &ErrorModel::zero(), s, q)?;
    let nodes = mu.graded(0.0, 1.0, Ends::CLOSED, Grading::Both, q);
    let error = nu.atoms.iter().fold(0.0, |acc, a| {
        let m: f64 = nodes.iter().map(|&(t, w)| w * t.powf(a.p) * (1.0 - t).powf(a.q)).sum();
        acc + a.c * s.powf(a.r) * m
    });
    Ok(BoundReport::new("cor6a", main.lhs, main.rhs_main, error)
        .with_inputs(main.meta.inputs)
        .with_tol(q.tol))
}

/// `f_seg(1/2) <= (f_seg(0) + f_seg(1)) / 2 + sum c B(p+1, q+1) s^r`.
pub fn upper_bound_cor6b(f_seg: &RealFunction, nu: &PowerMeasure3, s: f64) -> Result<BoundReport> {
    if s < 0.0 {
        return Err(HhError::input(format!("segment length {s} is negative")));
    }
    let mut error = 0.0;
    for a in &nu.atoms {
        error += a.c * beta_fn(a.p + 1.0, a.q + 1.0)? * s.powf(a.r);
    }
    let lhs = f_seg.try_eval(0.5)?;
    let rhs = 0.5 * (f_seg.try_eval(0.0)? + f_seg.try_eval(1.0)?);
    Ok(BoundReport::new("cor6b", lhs, rhs, error).with_inputs(format!("f={} s={s}", f_seg.name())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classic::c_coeffs;
    use crate::errmodel::PowerMeasure2;
    use crate::func::Interval;
    use crate::meansys::lift_weighted_system;

    fn lin() -> ChebyshevSystem {
        ChebyshevSystem::linear(Interval::new(-1.0, 2.0).unwrap())
    }

    fn expsys() -> ChebyshevSystem {
        ChebyshevSystem::new(
            "exp",
            RealFunction::constant(1.0),
            RealFunction::new("exp", vec![], f64::exp),
            Interval::new(-1.0, 2.0).unwrap(),
        )
    }

    fn sq() -> RealFunction {
        RealFunction::poly(vec![0.0, 0.0, 1.0])
    }

    fn one() -> RealFunction {
        RealFunction::constant(1.0)
    }

    #[test]
    fn thm5_error_examples() {
        let q = QuadratureConfig::default();
        let ms = lift_weighted_system(&lin(), &one(), &q).unwrap();
        assert_eq!(upper_error_thm5(&ms, &lin(), &ErrorModel::zero(), 0.0, 1.0, &q).unwrap(), 0.0);
        let c = upper_error_thm5(&ms, &lin(), &ErrorModel::Constant(0.4), 0.0, 1.0, &q).unwrap();
        assert!((c - 0.4).abs() < 1e-14);
        let bump = ErrorModel::Power2(PowerMeasure2::single(1.0, 1.0, 1.0).unwrap());
        let v = upper_error_thm5(&ms, &lin(), &bump, 0.0, 1.0, &q).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn thm5_examples() {
        let q = QuadratureConfig::default();
        let ms = lift_weighted_system(&lin(), &one(), &q).unwrap();
        let r = upper_bound_thm5(&sq(), &ms, &lin(), &ErrorModel::zero(), 0.0, 1.0, &q).unwrap();
        assert!((r.lhs - 1.0 / 3.0).abs() < 1e-14 && (r.rhs_main - 0.5).abs() < 1e-14);
        let aff = RealFunction::poly(vec![1.0, 3.0]);
        let r = upper_bound_thm5(&aff, &ms, &lin(), &ErrorModel::zero(), -0.5, 1.5, &q).unwrap();
        assert!(r.margin.abs() < 1e-13);

        let sys = expsys();
        let ms = lift_weighted_system(&sys, &one(), &q).unwrap();
        let e2 = RealFunction::new("e2", vec![], |t| (2.0 * t).exp());
        let r = upper_bound_thm5(&e2, &ms, &sys, &ErrorModel::zero(), 0.0, 1.0, &q).unwrap();
        assert!(r.margin >= 0.0);
        let k = c_coeffs(&sys, &one(), 0.0, 1.0, &q).unwrap();
        let expect = (k.c1 * e2.eval(0.0) + k.c2 * e2.eval(1.0)) / k.c;
        assert!((r.rhs_main - expect).abs() < 1e-9);
    }

    #[test]
    fn thm6_examples() {
        let q = QuadratureConfig::default();
        let leb = UnitMeasure::lebesgue();
        let r = upper_bound_thm6(&sq(), &leb, &ErrorModel::zero(), 1.0, &q).unwrap();
        assert!((r.margin - 1.0 / 6.0).abs() < 1e-14);
        let r = upper_bound_thm6(&sq(), &leb, &ErrorModel::Constant(0.2), 1.0, &q).unwrap();
        assert!((r.error_term - 0.2).abs() < 1e-14);
        let r = upper_bound_thm6(&sq(), &UnitMeasure::dirac(0.3).unwrap(), &ErrorModel::zero(), 1.0, &q).unwrap();
        assert!((r.lhs - 0.09).abs() < 1e-15 && (r.rhs_main - 0.3).abs() < 1e-15 && (r.margin - 0.21).abs() < 1e-15);
    }

    #[test]
    fn cor6_examples() {
        let q = QuadratureConfig::default();
        let leb = UnitMeasure::lebesgue();
        let nu = PowerMeasure3::single(1.0, 1.0, 1.0, 1.0).unwrap();
        let r = upper_bound_cor6a(&sq(), &leb, &nu, 2.0, &q).unwrap();
        assert!((r.error_term - 1.0 / 3.0).abs() < 1e-14);
        let r0 = upper_bound_cor6a(&sq(), &leb, &PowerMeasure3::default(), 2.0, &q).unwrap();
        let r6 = upper_bound_thm6(&sq(), &leb, &ErrorModel::zero(), 2.0, &q).unwrap();
        assert_eq!((r0.lhs, r0.rhs_main, r0.error_term, r0.margin), (r6.lhs, r6.rhs_main, r6.error_term, r6.margin));
        let five = PowerMeasure3::single(0.0, 0.0, 0.0, 5.0).unwrap();
        let two = UnitMeasure::atomic(&[(0.2, 0.5), (0.9, 0.5)]).unwrap();
        assert!((upper_bound_cor6a(&sq(), &two, &five, 3.0, &q).unwrap().error_term - 5.0).abs() < 1e-14);

        let b = PowerMeasure3::single(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!((upper_bound_cor6b(&sq(), &b, 1.0).unwrap().error_term - 1.0 / 6.0).abs() < 1e-14);
        let r = upper_bound_cor6b(&sq(), &PowerMeasure3::default(), 1.0).unwrap();
        assert!((r.margin - 0.25).abs() < 1e-15);
        let r = upper_bound_cor6b(&sq(), &nu, 2.0).unwrap();
        assert!((r.error_term - 1.0 / 3.0).abs() < 1e-14);
    }
}
