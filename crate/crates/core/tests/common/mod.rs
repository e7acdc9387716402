//! Reference computations for the integration tests, written without the
//! library's quadrature, root finding or series code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * r.random::<f64>()
}

fn simpson_step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let n = 16;
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fb, fm) = (f(lo), f(hi), f(0.5 * (lo + hi)));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson_step(&f, lo, hi, fa, fm, fb, whole, tol / n as f64, 40)
        })
        .sum()
}

/// Midpoint rule on an `n x n` grid over `[a0, a1] x [b0, b1]`.
pub fn riemann_2d<F: Fn(f64, f64) -> f64>(f: F, (a0, a1): (f64, f64), (b0, b1): (f64, f64), n: usize) -> f64 {
    let (ha, hb) = ((a1 - a0) / n as f64, (b1 - b0) / n as f64);
    let mut total = 0.0;
    for i in 0..n {
        let u = a0 + (i as f64 + 0.5) * ha;
        let mut row = 0.0;
        for j in 0..n {
            row += f(u, b0 + (j as f64 + 0.5) * hb);
        }
        total += row;
    }
    total * ha * hb
}

/// Root of an increasing function by plain bisection.
pub fn bisect<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `omega0(a) omega1(b) - omega1(a) omega0(b)`.
pub fn det2<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(w0: &F, w1: &G, a: f64, b: f64) -> f64 {
    w0(a) * w1(b) - w1(a) * w0(b)
}

pub fn dist_z(t: f64) -> f64 {
    (t - t.round()).abs()
}

/// `sum_{n < terms} alpha(2 d_Z(2^n t) s) / 2^n`.
pub fn dyadic_series<A: Fn(f64) -> f64>(alpha: A, s: f64, t: f64, terms: u32) -> f64 {
    (0..terms)
        .map(|n| {
            let p = 2f64.powi(n as i32);
            alpha(2.0 * dist_z(p * t) * s) / p
        })
        .sum()
}

/// Euler beta function by quadrature, for arguments `>= 1`.
pub fn beta_by_quadrature(p: f64, q: f64) -> f64 {
    simpson(|t| t.powf(p - 1.0) * (1.0 - t).powf(q - 1.0), 0.0, 1.0, 1e-14)
}
