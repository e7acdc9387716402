use hhbounds::classic::classic_bounds;
use hhbounds::{FunctionSpec, QuadratureConfig, Result, SystemSpec};

fn main() -> Result<()> {
    let q = QuadratureConfig::from_env()?;
    let cases = [
        ("linear", "const:1", "poly:0,0,1", 0.0, 1.0),
        ("linear", "poly:1,1", "exp:1", -0.5, 1.5),
        ("exp", "const:1", "exp:2", 0.0, 1.0),
        ("power(0.5,2)", "pow:1", "pow:3", 0.5, 3.0),
    ];
    for (system, rho, f, x, y) in cases {
        let sys = system.parse::<SystemSpec>()?.build()?;
        let rho = rho.parse::<FunctionSpec>()?.build();
        let f = f.parse::<FunctionSpec>()?.build();
        let b = classic_bounds(&f, &sys, &rho, x, y, &q)?;
        let k = &b.coefficients;
        println!(
            "{system:<13} f={:<10} [{x}, {y}]  {:.6} <= {:.6} <= {:.6}   xi={:.4} c={:.4}",
            f.name(),
            b.lower.lhs,
            b.integral,
            b.upper.rhs_main,
            k.xi,
            k.c
        );
    }
    Ok(())
}
