use hhbounds::errmodel::beta_fn;
use hhbounds::meansys::lift_weighted_system;
use hhbounds::upper::{upper_bound_cor6a, upper_bound_cor6b, upper_bound_thm5, upper_bound_thm6};
use hhbounds::verify::pair_error_model;
use hhbounds::{ErrorModel, ErrorSpec, PowerMeasure3, QuadratureConfig, RealFunction, Result, SystemSpec, UnitMeasure};

fn main() -> Result<()> {
    let q = QuadratureConfig::from_env()?;
    let sys = "exp@[0,2]".parse::<SystemSpec>()?.build()?;
    let ms = lift_weighted_system(&sys, &RealFunction::constant(1.0), &q)?;
    let f = RealFunction::new("cosh", vec![], f64::cosh);
    let eps = pair_error_model(&ErrorSpec::Measured { grid: 33 }, &f, &sys, 0.2, 1.8)?;
    let r = upper_bound_thm5(&f, &ms, &sys, &eps, 0.2, 1.8, &q)?;
    println!("exp system   {:.6} <= {:.6} + {:.3e}  margin {:.3e}", r.lhs, r.rhs_main, r.error_term, r.margin);

    let sq = RealFunction::poly(vec![0.0, 0.0, 1.0]);
    let mu = UnitMeasure::atomic(&[(0.25, 0.5), (0.75, 0.5)])?;
    let r = upper_bound_thm6(&sq, &mu, &ErrorModel::Constant(0.05), 1.0, &q)?;
    println!("two atoms    {:.6} <= {:.6} + {:.3e}", r.lhs, r.rhs_main, r.error_term);

    let nu = PowerMeasure3::from_tuples(&[(1.0, 1.0, 2.0, 0.5), (2.0, 0.5, 1.0, 0.25)])?;
    let a = upper_bound_cor6a(&sq, &UnitMeasure::lebesgue(), &nu, 1.5, &q)?;
    let b = upper_bound_cor6b(&sq, &nu, 1.5)?;
    println!("power error  integrated {:.12}  beta form {:.12}", a.error_term, b.error_term);
    println!("B(2, 3) = {:.12}", beta_fn(2.0, 3.0)?);
    Ok(())
}
