//! Test-support builders: seeded RNG helpers, random polynomials/matrices,
//! and constructors for structured instances used across the test suites.
//! Hidden from the public docs; not part of the stable API.

use crate::numkernel::{CMat, Polynomial};
use crate::C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform argument, log-uniform magnitude in [rmin, rmax].
pub fn random_point(rng: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> C64 {
    let lr = rng.gen_range(rmin.ln()..rmax.ln());
    let th = rng.gen_range(0.0..std::f64::consts::TAU);
    C64::from_polar(lr.exp(), th)
}

pub fn random_poly(rng: &mut ChaCha8Rng, degree: usize, scale: f64) -> Polynomial {
    let mut v: Vec<C64> = (0..=degree)
        .map(|_| {
            C64::new(
                rng.gen_range(-scale..scale),
                rng.gen_range(-scale..scale),
            )
        })
        .collect();
    // keep the intended degree
    if v[degree].norm() < 0.1 * scale {
        v[degree] = C64::new(0.5 * scale, 0.3 * scale);
    }
    Polynomial::new(v)
}

pub fn random_cmat(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    m
}

/// Random q with |q| log-uniform in [rmin, rmax] and generic phase.
pub fn random_q(rng: &mut ChaCha8Rng, rmin: f64, rmax: f64) -> C64 {
    random_point(rng, rmin, rmax)
}

/// Random regular-singular system A(x) = (x A_inf - xi A_0)/(x - xi) with
/// well-separated eigenvalues at both ends (strongly non-resonant for generic
/// draws).
pub fn random_regular_system(rng: &mut ChaCha8Rng, n: usize) -> crate::connection::RegularSystem {
    use crate::numkernel::RationalFunction;
    loop {
        let q = random_q(rng, 0.35, 0.6);
        let xi = random_point(rng, 0.8, 1.5);
        let a0 = random_cmat(rng, n);
        let ainf = random_cmat(rng, n);
        // A entries: (ainf_ij x - xi a0_ij)/(x - xi)
        let den = Polynomial::new(vec![-xi, c(1.0, 0.0)]);
        let entries: Vec<Vec<RationalFunction>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let num = Polynomial::new(vec![-xi * a0[(i, j)], ainf[(i, j)]]);
                        RationalFunction::new(num, den.clone()).unwrap()
                    })
                    .collect()
            })
            .collect();
        let sys = match crate::connection::RegularSystem::new(q, entries) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let tol = crate::numkernel::ToleranceConfig::default();
        match crate::connection::check_regular_nonresonant(&sys, 50, &tol) {
            Ok(rep) if rep.ok() => return sys,
            _ => continue,
        }
    }
}

/// Second-order operator with a designed apparent pair (s, q^-1 s), built the
/// TQ way: pick a degree-1 solution y, force the zero pattern of a_0 and a_2,
/// tune the a_2 scalar so that a_0(x) y(q^2 x) + a_2(x) y(x) is divisible by
/// y(q x), and define a_1 as the exact quotient. Returns (L, s); the pair
/// (s, q^-1 s) then satisfies Delta_1(s) = 0 by the 2x2 linear-system
/// argument, while the zero-pattern hypotheses hold generically.
pub fn tq_apparent_second_order(rng: &mut ChaCha8Rng) -> (crate::qoper::ScalarQOper, C64) {
    loop {
        let q = random_q(rng, 0.35, 0.7);
        let s = random_point(rng, 0.6, 1.6);
        let t = random_point(rng, 0.6, 1.6);
        let g0_root = random_point(rng, 0.5, 2.0);
        let g2_root = random_point(rng, 0.5, 2.0);
        // reject roots that land on the q-orbit of s
        let off_orbit = |z: C64| {
            crate::numkernel::in_q_power_orbit(z / s, q, 60, 1e-4).is_none()
        };
        if !off_orbit(g0_root) || !off_orbit(g2_root) {
            continue;
        }
        let a0 = Polynomial::from_roots(&[s, g0_root], c(1.0, 0.0));
        let a2_unit = Polynomial::from_roots(&[s / q, g2_root], c(1.0, 0.0));
        let y = Polynomial::from_roots(&[t], c(1.0, 0.0));
        let y_q2 = y.scale_arg(q * q);
        let y_q = y.scale_arg(q);
        let y_1 = y.clone();
        // scalar on a_2 making the numerator divisible by y(q x)
        let xstar = t / q;
        let denom = a2_unit.eval(xstar) * y_1.eval(xstar);
        if denom.norm() < 1e-6 {
            continue;
        }
        let cscale = -a0.eval(xstar) * y_q2.eval(xstar) / denom;
        let a2 = a2_unit.mul_scalar(cscale);
        let numer = &(&a0 * &y_q2) + &(&a2 * &y_1);
        let (a1, rem) = numer.div_rem(&y_q).unwrap();
        if rem.norm_max() > 1e-10 * numer.norm_max() {
            continue;
        }
        if a1.eval(s).norm() < 1e-8 || a1.eval(s / q).norm() < 1e-8 {
            continue; // degenerate tuning; retry
        }
        let l = crate::qoper::ScalarQOper::new(q, vec![a0, a1, a2]).unwrap();
        return (l, s);
    }
}
