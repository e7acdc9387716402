//! Mean systems: a weight `lambda(t)`, a family of means `M(t)` and a target
//! mean `M0` over a measure on `t in [0, 1]`, reproducing both system
//! functions: `int lambda omega_i(M) dmu = omega_i(M0)`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::cheb::{ChebyshevSystem, DEFAULT_CHECK_GRID};
use crate::classic::c_coeffs;
use crate::error::{HhError, Result};
use crate::func::RealFunction;
use crate::measure::{Ends, UnitMeasure};
use crate::quad::QuadratureConfig;

type Curve = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type SectionFn = dyn Fn(f64, f64) -> Result<Section> + Send + Sync;

/// A mean system restricted to one pair `(x, y)`.
#[derive(Clone)]
pub struct Section {
    pub x: f64,
    pub y: f64,
    pub mean0: f64,
    lambda: Curve,
    mean: Curve,
}

impl fmt::Debug for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Section")
            .field("x", &self.x)
            .field("y", &self.y)
            .field("mean0", &self.mean0)
            .finish()
    }
}

impl Section {
    pub fn new<L, M>(x: f64, y: f64, mean0: f64, lambda: L, mean: M) -> Self
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
        M: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Section {
            x,
            y,
            mean0,
            lambda: Arc::new(lambda),
            mean: Arc::new(mean),
        }
    }

    #[inline]
    pub fn lambda(&self, t: f64) -> f64 {
        (self.lambda)(t)
    }

    #[inline]
    pub fn mean(&self, t: f64) -> f64 {
        (self.mean)(t)
    }
}

#[derive(Clone)]
pub struct MeanSystem {
    name: String,
    base: UnitMeasure,
    sections: Arc<SectionFn>,
}

impl fmt::Debug for MeanSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeanSystem")
            .field("name", &self.name)
            .field("base", &self.base.label())
            .finish()
    }
}

impl MeanSystem {
    pub fn new<F>(name: impl Into<String>, base: UnitMeasure, sections: F) -> Self
    where
        F: Fn(f64, f64) -> Result<Section> + Send + Sync + 'static,
    {
        MeanSystem {
            name: name.into(),
            base,
            sections: Arc::new(sections),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base_measure(&self) -> &UnitMeasure {
        &self.base
    }

    pub fn section(&self, x: f64, y: f64) -> Result<Section> {
        if !(x < y) {
            return Err(HhError::input(format!("need x < y, got ({x}, {y})")));
        }
        (self.sections)(x, y)
    }

    /// Same system with `lambda` multiplied by `k`.
    pub fn scale_lambda(&self, k: f64) -> MeanSystem {
        let inner = self.sections.clone();
        MeanSystem::new(format!("{k}*{}", self.name), self.base.clone(), move |x, y| {
            let s = inner(x, y)?;
            let lambda = s.lambda.clone();
            Ok(Section {
                lambda: Arc::new(move |t| k * lambda(t)),
                ..s
            })
        })
    }
}

/// `M0 = xi(x, y)`, `M(t) = (1 - t) x + t y`,
/// `lambda(t) = (y - x) rho(M(t)) / c(x, y)` over Lebesgue measure.
pub fn lift_weighted_system(sys: &ChebyshevSystem, rho: &RealFunction, q: &QuadratureConfig) -> Result<MeanSystem> {
    for t in sys.domain.interior_grid(DEFAULT_CHECK_GRID) {
        let r = rho.try_eval(t)?;
        if !(r > 0.0) {
            return Err(HhError::input(format!("weight `{}` is not positive at {t}: {r}", rho.name())));
        }
    }
    let (sys, rho, q) = (sys.clone(), rho.clone(), *q);
    let name = format!("lift[{};{}]", sys.name, rho.name());
    Ok(MeanSystem::new(name, UnitMeasure::lebesgue(), move |x, y| {
        let k = c_coeffs(&sys, &rho, x, y, &q)?;
        let rho = rho.clone();
        let scale = (y - x) / k.c;
        Ok(Section::new(
            x,
            y,
            k.xi,
            move |t| scale * rho.eval((1.0 - t) * x + t * y),
            move |t| (1.0 - t) * x + t * y,
        ))
    }))
}

/// A base-measure node with `lambda` folded into the weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanNode {
    pub t: f64,
    pub mean: f64,
    /// `mu`-weight times `lambda(t)`
    pub weight: f64,
}

fn mean_node(sec: &Section, (t, w): (f64, f64)) -> MeanNode {
    MeanNode {
        t,
        mean: sec.mean(t),
        weight: w * sec.lambda(t),
    }
}

/// All nodes of the base measure on `[0, 1]`.
pub fn section_nodes(sec: &Section, base: &UnitMeasure, q: &QuadratureConfig) -> Vec<MeanNode> {
    base.nodes(0.0, 1.0, Ends::CLOSED, q)
        .into_iter()
        .map(|n| mean_node(sec, n))
        .collect()
}

const CROSSING_SCAN: usize = 4;

/// Parameters where `M(t) - M0` changes sign, located by bisection.
fn crossings(sec: &Section, q: &QuadratureConfig) -> Vec<f64> {
    let n = CROSSING_SCAN * q.panels;
    let below = |t: f64| sec.mean(t) < sec.mean0;
    let mut out = Vec::new();
    let mut prev = 0.0;
    for i in 1..=n {
        let t = i as f64 / n as f64;
        if below(prev) != below(t) {
            let (mut a, mut b) = (prev, t);
            let side = below(a);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if below(m) == side {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(b);
        }
        prev = t;
    }
    out
}

/// Nodes split into `T' = {M < M0}` and `T'' = {M >= M0}` (only `lambda > 0`).
///
/// Panels are cut where `M - M0` changes sign, so each panel lies in a single block.
pub fn split_nodes(sec: &Section, base: &UnitMeasure, q: &QuadratureConfig) -> Result<(Vec<MeanNode>, Vec<MeanNode>)> {
    let mut cuts = vec![0.0];
    cuts.extend(crossings(sec, q));
    cuts.push(1.0);
    let (mut below, mut above) = (Vec::new(), Vec::new());
    let slack = 1e-12 * (1.0 + sec.x.abs().max(sec.y.abs()));
    for (j, pair) in cuts.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let ends = if j == 0 { Ends::CLOSED } else { Ends::LEFT_OPEN };
        let panels = ((q.panels as f64 * (b - a)).ceil() as usize).max(1);
        for n in base.nodes(a, b, ends, &q.with_panels(panels)) {
            let node = mean_node(sec, n);
            if !(node.mean >= sec.x - slack && node.mean <= sec.y + slack) {
                return Err(HhError::contract(format!(
                    "mean M({}) = {} is outside [{}, {}]",
                    node.t, node.mean, sec.x, sec.y
                )));
            }
            if !(node.weight > 0.0) {
                continue;
            }
            if node.mean < sec.mean0 {
                below.push(node);
            } else {
                above.push(node);
            }
        }
    }
    Ok((below, above))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReproducingReport {
    pub mean0: f64,
    /// `int lambda omega0(M) dmu - omega0(M0)`
    pub defect0: f64,
    pub defect1: f64,
    pub passed: bool,
}

/// Checks `int lambda omega_i(M) dmu = omega_i(M0)` for `i = 0, 1`.
pub fn check_reproducing(
    ms: &MeanSystem,
    sys: &ChebyshevSystem,
    x: f64,
    y: f64,
    tol: f64,
    q: &QuadratureConfig,
) -> Result<ReproducingReport> {
    let sec = ms.section(x, y)?;
    let (mut i0, mut i1) = (0.0, 0.0);
    for n in section_nodes(&sec, ms.base_measure(), q) {
        i0 += n.weight * sys.omega0.eval(n.mean);
        i1 += n.weight * sys.omega1.eval(n.mean);
    }
    let (w0, w1) = (sys.omega0.eval(sec.mean0), sys.omega1.eval(sec.mean0));
    let (defect0, defect1) = (i0 - w0, i1 - w1);
    let passed = defect0.abs() <= tol * (1.0 + w0.abs()) && defect1.abs() <= tol * (1.0 + w1.abs());
    Ok(ReproducingReport {
        mean0: sec.mean0,
        defect0,
        defect1,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartitionSums {
    pub mean0: f64,
    pub s0p: f64,
    pub s0pp: f64,
    pub s1p: f64,
    pub s1pp: f64,
    /// `s0p * s1pp - s1p * s0pp`
    pub denom: f64,
}

/// Multiple of the quadrature tolerance allowed in `S_i' + S_i'' = omega_i(M0)`.
pub const PARTITION_TOL_FACTOR: f64 = 10.0;

pub fn partition_sums(
    ms: &MeanSystem,
    sys: &ChebyshevSystem,
    x: f64,
    y: f64,
    q: &QuadratureConfig,
) -> Result<PartitionSums> {
    let sec = ms.section(x, y)?;
    let (below, above) = split_nodes(&sec, ms.base_measure(), q)?;
    partition_from_nodes(sys, &sec, &below, &above, q)
}

pub(crate) fn partition_from_nodes(
    sys: &ChebyshevSystem,
    sec: &Section,
    below: &[MeanNode],
    above: &[MeanNode],
    q: &QuadratureConfig,
) -> Result<PartitionSums> {
    let sums = |nodes: &[MeanNode], w: &RealFunction| nodes.iter().map(|n| n.weight * w.eval(n.mean)).sum::<f64>();
    let (s0p, s0pp) = (sums(below, &sys.omega0), sums(above, &sys.omega0));
    let (s1p, s1pp) = (sums(below, &sys.omega1), sums(above, &sys.omega1));
    let (w0, w1) = (sys.omega0.eval(sec.mean0), sys.omega1.eval(sec.mean0));
    let tol = PARTITION_TOL_FACTOR * q.tol;
    let d0 = s0p + s0pp - w0;
    let d1 = s1p + s1pp - w1;
    if d0.abs() > tol * (1.0 + w0.abs()) || d1.abs() > tol * (1.0 + w1.abs()) {
        return Err(HhError::contract(format!(
            "reproducing identity fails on [{}, {}]: defects {d0:e}, {d1:e}",
            sec.x, sec.y
        )));
    }
    let denom = s0p * s1pp - s1p * s0pp;
    if !(denom > 0.0) {
        return Err(HhError::Degenerate(format!(
            "partition determinant {denom} is not positive on [{}, {}]",
            sec.x, sec.y
        )));
    }
    Ok(PartitionSums {
        mean0: sec.mean0,
        s0p,
        s0pp,
        s1p,
        s1pp,
        denom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::Interval;

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

    fn one() -> RealFunction {
        RealFunction::constant(1.0)
    }

    #[test]
    fn lift_examples() {
        let q = QuadratureConfig::default();
        let ms = lift_weighted_system(&lin(), &one(), &q).unwrap();
        let s = ms.section(0.2, 1.4).unwrap();
        assert!((s.mean0 - 0.8).abs() < 1e-14);
        assert!((s.lambda(0.3) - 1.0).abs() < 1e-14);
        let ms = lift_weighted_system(&expsys(), &one(), &q).unwrap();
        let e = std::f64::consts::E;
        assert!((ms.section(0.0, 1.0).unwrap().mean0 - (e - 1.0).ln()).abs() < 1e-10);
        let unit = lin().with_domain(Interval::new(0.0, 1.0).unwrap());
        let ms = lift_weighted_system(&unit, &RealFunction::poly(vec![0.0, 2.0]), &q).unwrap();
        assert!((ms.section(0.0, 1.0).unwrap().mean0 - 2.0 / 3.0).abs() < 1e-12);
        assert!(lift_weighted_system(&lin(), &RealFunction::poly(vec![0.0, 1.0]), &q).is_err());
    }

    #[test]
    fn reproducing_examples() {
        let q = QuadratureConfig::default();
        let ms = lift_weighted_system(&lin(), &one(), &q).unwrap();
        let r = check_reproducing(&ms, &lin(), 0.0, 1.0, 1e-12, &q).unwrap();
        assert!(r.passed && r.defect0.abs() <= 1e-12 && r.defect1.abs() <= 1e-12);
        let ms_e = lift_weighted_system(&expsys(), &one(), &q).unwrap();
        let r = check_reproducing(&ms_e, &expsys(), 0.0, 1.0, 1e-10, &q).unwrap();
        assert!(r.passed, "{r:?}");
        let half = ms.scale_lambda(0.5);
        let r = check_reproducing(&half, &lin(), 0.0, 1.0, 1e-10, &q).unwrap();
        assert!(!r.passed);
        assert!((r.defect0 + 0.5).abs() < 1e-12);
    }

    #[test]
    fn partition_examples() {
        let q = QuadratureConfig::default();
        let ms = lift_weighted_system(&lin(), &one(), &q).unwrap();
        let p = partition_sums(&ms, &lin(), 0.0, 1.0, &q).unwrap();
        assert!((p.s0p - 0.5).abs() < 1e-14 && (p.s0pp - 0.5).abs() < 1e-14);
        assert!((p.s1p - 0.125).abs() < 1e-14 && (p.s1pp - 0.375).abs() < 1e-14);
        assert!((p.denom - 0.125).abs() < 1e-14);

        let unit = lin().with_domain(Interval::new(0.0, 1.0).unwrap());
        let ms = lift_weighted_system(&unit, &RealFunction::poly(vec![0.0, 2.0]), &q).unwrap();
        let p = partition_sums(&ms, &unit, 0.0, 1.0, &q).unwrap();
        assert!((p.s0p - 4.0 / 9.0).abs() < 1e-12 && (p.s0pp - 5.0 / 9.0).abs() < 1e-12);

        let half = lift_weighted_system(&lin(), &one(), &q).unwrap().scale_lambda(0.5);
        assert!(matches!(partition_sums(&half, &lin(), 0.0, 1.0, &q), Err(HhError::Contract(_))));
    }
}
