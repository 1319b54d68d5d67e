//! Complex-coefficient polynomial and rational-function arithmetic, root
//! finding, pole/zero order detection, small dense linear algebra, and
//! q-special functions (q-Pochhammer, theta, e_c).

mod linalg;
mod newton;
mod poly;
mod qspecial;
mod rational;
mod roots;

pub use linalg::{eig2, CMat, EigenDecomp};
pub use newton::{newton_solve, NewtonOptions};
pub use poly::Polynomial;
pub use qspecial::{e_scalar, qpochhammer_inf, theta_q, QSpecialContext};
pub use rational::RationalFunction;

use crate::C64;

/// Tolerances shared by zero/pole detection, root clustering and series
/// truncation.
#[derive(Debug, Clone, Copy)]
pub struct ToleranceConfig {
    /// Absolute tolerance, scaled by a coefficient norm, below which a value
    /// counts as zero.
    pub zero_tol: f64,
    /// Radius within which two roots are considered the same point.
    pub cluster_tol: f64,
    /// Target truncation error for infinite products and power series.
    pub series_tol: f64,
}

impl ToleranceConfig {
    pub fn new(zero_tol: f64, cluster_tol: f64, series_tol: f64) -> crate::Result<Self> {
        if !(zero_tol > 0.0 && cluster_tol > 0.0 && series_tol > 0.0) {
            return Err(crate::Error::InvalidInput(
                "tolerances must be strictly positive".into(),
            ));
        }
        if zero_tol > cluster_tol {
            return Err(crate::Error::InvalidInput(
                "zero_tol must not exceed cluster_tol".into(),
            ));
        }
        Ok(Self {
            zero_tol,
            cluster_tol,
            series_tol,
        })
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            zero_tol: 1e-9,
            cluster_tol: 1e-4,
            series_tol: 1e-12,
        }
    }
}

/// Deduplicate a set of complex points, merging points closer than `radius`.
/// Returns cluster representatives (centroids) with multiplicities, sorted by
/// (re, im) for determinism.
pub fn cluster_points(points: &[C64], radius: f64) -> Vec<(C64, usize)> {
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for &p in points {
        match clusters
            .iter_mut()
            .find(|(c, _)| (*c - p).norm() <= radius)
        {
            Some((c, k)) => {
                // running centroid
                *c = (*c * C64::from(*k as f64) + p) / C64::from((*k + 1) as f64);
                *k += 1;
            }
            None => clusters.push((p, 1)),
        }
    }
    clusters.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    clusters
}

/// True iff `x` lies within `tol` (relative) of `q^k` for some integer
/// `|k| <= window`. Used by non-resonance and genericity checks.
pub fn in_q_power_orbit(x: C64, q: C64, window: i64, tol: f64) -> Option<i64> {
    if x.norm() == 0.0 {
        return None;
    }
    let lq = q.norm().ln();
    if lq.abs() < 1e-15 {
        return None;
    }
    // candidate exponents from the magnitude; check a small neighbourhood
    let k0 = (x.norm().ln() / lq).round() as i64;
    for k in (k0 - 2)..=(k0 + 2) {
        if k.abs() > window {
            continue;
        }
        let qk = q.powi(k as i32);
        if (x - qk).norm() <= tol * qk.norm().max(1e-300) {
            return Some(k);
        }
    }
    None
}
