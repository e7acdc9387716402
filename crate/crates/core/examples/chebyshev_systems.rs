//! Builds the catalog systems, checks their determinants and scans a few
//! functions for (omega0, omega1)-convexity.

use hhbounds::residual::is_omega_convex;
use hhbounds::{RealFunction, Result, SystemSpec};

fn main() -> Result<()> {
    for spec in ["linear", "exp", "trig", "power(0.5,2)", "poly([1],[0,1,1])@[0,1]"] {
        let sys = spec.parse::<SystemSpec>()?.build()?;
        let report = sys.check(257);
        println!("{:<28} domain={} chebyshev={}", sys.name, sys.domain, report.passed);
    }

    let exp = "exp".parse::<SystemSpec>()?.build()?;
    let candidates = [
        RealFunction::new("e^2t", vec![], |t| (2.0 * t).exp()),
        RealFunction::poly(vec![0.0, 0.0, 1.0]),
        RealFunction::new("e^t/2", vec![], |t| (0.5 * t).exp()),
    ];
    for f in &candidates {
        let scan = is_omega_convex(f, &exp, 33);
        let worst = scan.worst.map_or(0.0, |t| t.residual);
        println!("exp-convex {:<8} {}  worst residual {worst:.3e}", f.name(), scan.passed);
    }
    Ok(())
}
