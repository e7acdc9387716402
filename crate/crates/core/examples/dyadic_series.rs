use hhbounds::errmodel::{dist_to_integers, dyadic_eta, DyadicErrorModel};
use hhbounds::func::takagi;
use hhbounds::{Result, RealFunction};

fn main() -> Result<()> {
    let model = DyadicErrorModel::new(RealFunction::identity(), 40)?;
    for t in [0.0, 0.125, 0.25, 1.0 / 3.0, 0.5] {
        let v = dyadic_eta(&model, 1.0, t);
        println!(
            "t={t:.4}  partial sum {:.10}  tail <= {:.1e}  takagi(t) {:.10}  d_Z(t) {:.4}",
            v.sum,
            v.tail_bound,
            takagi(t),
            dist_to_integers(t)
        );
    }
    let sqrt_model = DyadicErrorModel::new(RealFunction::new("sqrt", vec![], f64::sqrt), 40)?;
    for s in [0.25, 1.0, 4.0] {
        let v = dyadic_eta(&sqrt_model, s, 0.5);
        println!("alpha=sqrt s={s}: eta(1/2) in [{:.8}, {:.8}]", v.sum, v.upper());
    }
    Ok(())
}
