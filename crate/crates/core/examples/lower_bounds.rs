//! Lower bounds on a convex and a perturbed specimen, with the error terms
//! coming from measured residuals and from power models.

use hhbounds::lower::{cor4c2_error, j_functional, lower_bound_cor2hp1, lower_bound_thm3, lower_bound_thm4};
use hhbounds::meansys::lift_weighted_system;
use hhbounds::verify::{pair_error_model, segment_error_model};
use hhbounds::{ErrorSpec, PowerMeasure2, QuadratureConfig, RealFunction, Result, SystemSpec, UnitMeasure};

fn main() -> Result<()> {
    let q = QuadratureConfig::from_env()?;
    let sys = "linear".parse::<SystemSpec>()?.build()?;
    let ms = lift_weighted_system(&sys, &RealFunction::constant(1.0), &q)?;
    let bumpy = RealFunction::new("t^2+0.05sin(9t)", vec![], |t| t * t + 0.05 * (9.0 * t).sin());
    let measured = ErrorSpec::Measured { grid: 33 };
    let (x, y) = (-0.3, 0.65);

    let eps = pair_error_model(&measured, &bumpy, &sys, x, y)?;
    let r = lower_bound_thm3(&bumpy, &ms, &sys, &eps, x, y, &q)?;
    println!("mean system  lhs={:.6} rhs={:.6} E={:.3e} margin={:.3e}", r.lhs, r.rhs_main, r.error_term, r.margin);

    let f_seg = bumpy.segment(x, y);
    let eta = segment_error_model(&measured, &f_seg)?;
    let beta = UnitMeasure::with_density(RealFunction::poly(vec![0.0, 6.0, -6.0]), &q)?;
    for (label, mu) in [("lebesgue", UnitMeasure::lebesgue()), ("6t(1-t)", beta)] {
        let r = lower_bound_thm4(&f_seg, &mu, &eta, y - x, &q)?;
        println!("measure {label:<9} lhs={:.6} rhs={:.6} I/S={:.3e} margin={:.3e}", r.lhs, r.rhs_main, r.error_term, r.margin);
    }
    let r = lower_bound_cor2hp1(&f_seg, &eta, y - x, &q)?;
    println!("midpoint     lhs={:.6} rhs={:.6} 8I={:.3e} margin={:.3e}", r.lhs, r.rhs_main, r.error_term, r.margin);

    let nu = PowerMeasure2::from_tuples(&[(1.0, 1.0, 0.2), (0.5, 0.5, 0.1)])?;
    let closed = cor4c2_error(&nu, 2.0)?;
    let quad = 8.0 * j_functional(&nu, &UnitMeasure::lebesgue(), 2.0, &q)?;
    println!("power error  closed form {closed:.12}  via J {quad:.12}");
    Ok(())
}
