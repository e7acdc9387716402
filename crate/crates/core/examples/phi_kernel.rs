//! Tabulates the dyadic kernel and compares the kernel form of the
//! midpoint error with a direct evaluation of the dyadic series.

use hhbounds::errmodel::{phi_integral, phi_kernel};
use hhbounds::{QuadratureConfig, RealFunction};

fn main() {
    let tol = 1e-8;
    println!("sigma   phi        cutoff  tail");
    for i in 0..=12 {
        let sigma = i as f64 / 12.0;
        let v = phi_kernel(sigma, tol);
        println!("{sigma:.4}  {:.6}  {:>6}  {:.1e}", v.value, v.cutoff, v.tail_bound);
    }
    println!("phi(0) - pi^2/3 = {:.2e}", phi_kernel(0.0, 1e-12).value - std::f64::consts::PI.powi(2) / 3.0);

    let q = QuadratureConfig::default();
    let identity = RealFunction::identity();
    for s in [0.5, 1.0, 2.0] {
        println!("int alpha(sigma s) phi(sigma) d sigma, alpha(u)=u, s={s}: {:.8}", phi_integral(&identity, s, 1e-8, &q));
    }
}
