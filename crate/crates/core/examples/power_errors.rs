use hhbounds::errmodel::{power_eta2, power_eta3};
use hhbounds::lower::{cor4c2_error, lower_bound_cor4c2, lower_bound_thm3a2};
use hhbounds::{PowerMeasure2, PowerMeasure3, QuadratureConfig, RealFunction, Result, UnitMeasure};

fn main() -> Result<()> {
    let q = QuadratureConfig::from_env()?;
    let nu2 = PowerMeasure2::from_tuples(&[(1.0, 1.0, 1.0), (0.5, 1.5, 0.3)])?;
    let nu3 = PowerMeasure3::from_tuples(&[(1.0, 1.0, 2.0, 1.0)])?;
    for t in [0.0, 0.25, 0.5] {
        println!("t={t}: eta2 = {:.6}  eta3 = {:.6}", power_eta2(&nu2, t, 2.0)?, power_eta3(&nu3, t, 2.0)?);
    }
    let f = RealFunction::new("|t-0.4|^1.5", vec![], |t| (t - 0.4).abs().powf(1.5));
    let mid = lower_bound_cor4c2(&f, &nu2, 1.0, &q)?;
    let gen = lower_bound_thm3a2(&f, &UnitMeasure::lebesgue(), &nu2, 1.0, &q)?;
    println!("midpoint form  error {:.12}  margin {:.6}", mid.error_term, mid.margin);
    println!("measure form   error {:.12}  margin {:.6}", gen.error_term, gen.margin);
    println!("closed form    error {:.12}", cor4c2_error(&nu2, 1.0)?);
    Ok(())
}
