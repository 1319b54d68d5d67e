//! Scalar q-difference operators, their companion systems, the t_k^(m) minor
//! calculus, the Delta_r determinant, and the apparent-singularity criteria
//! (second order, n-th order, the sufficient special case, and the
//! definition-level brute force oracle).

mod apparent;
mod minors;

pub use apparent::{
    brute_force_apparent, is_apparent_2nd, is_apparent_nth, is_apparent_special, orbit_zero_offsets,
};
pub use minors::{a_product, delta_r, t_km};

use crate::numkernel::{Polynomial, RationalFunction, ToleranceConfig};
use crate::{C64, Error, Result};

/// Scalar q-difference operator with polynomial coefficients, in the sign
/// convention L = a_0(x) s^n - a_1(x) s^(n-1) + ... + (-1)^n a_n(x), where s
/// is the q-shift f(x) -> f(qx).
#[derive(Debug, Clone)]
pub struct ScalarQOper {
    pub q: C64,
    /// a_0 .. a_n, lowest index first.
    pub coeffs: Vec<Polynomial>,
}

impl ScalarQOper {
    pub fn new(q: C64, coeffs: Vec<Polynomial>) -> Result<Self> {
        if !(q.norm() > 0.0 && q.norm() < 1.0) {
            return Err(Error::InvalidInput(format!(
                "|q| must lie in (0,1); got {}",
                q.norm()
            )));
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput("operator order must be >= 1".into()));
        }
        if coeffs.first().unwrap().is_zero() || coeffs.last().unwrap().is_zero() {
            return Err(Error::InvalidInput(
                "a_0 and a_n must not be identically zero".into(),
            ));
        }
        Ok(Self { q, coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn a(&self, k: usize) -> &Polynomial {
        &self.coeffs[k]
    }

    /// t_k = a_k / a_0 as a rational function; zero outside 0..=n.
    pub fn t(&self, k: i64) -> RationalFunction {
        let n = self.order() as i64;
        if k < 0 || k > n {
            return RationalFunction {
                num: Polynomial::zero(),
                den: self.coeffs[0].clone(),
            };
        }
        RationalFunction {
            num: self.coeffs[k as usize].clone(),
            den: self.coeffs[0].clone(),
        }
    }

    /// First-order companion form.
    pub fn companion(&self) -> CompanionSystem {
        let n = self.order();
        let mut entries =
            vec![vec![RationalFunction::from_poly(Polynomial::zero()); n]; n];
        for k in 1..=n {
            let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
            entries[0][k - 1] = self.t(k as i64).mul_scalar(C64::new(sign, 0.0));
        }
        for i in 1..n {
            entries[i][i - 1] = RationalFunction::one();
        }
        CompanionSystem {
            q: self.q,
            dim: n,
            entries,
        }
    }

    /// Apply the operator to a polynomial: sum_k (-1)^k a_k(x) y(q^(n-k) x).
    pub fn apply(&self, y: &Polynomial) -> Polynomial {
        let n = self.order();
        let mut acc = Polynomial::zero();
        for (k, ak) in self.coeffs.iter().enumerate() {
            let shifted = y.scale_arg(self.q.powu((n - k) as u32));
            let term = ak * &shifted;
            acc = if k % 2 == 0 {
                &acc + &term
            } else {
                &acc - &term
            };
        }
        acc
    }
}

/// Companion matrix system A(x): first row (t_1, -t_2, ..., (-1)^(n-1) t_n),
/// ones on the subdiagonal, zeros elsewhere; det A(x) = t_n(x).
#[derive(Debug, Clone)]
pub struct CompanionSystem {
    pub q: C64,
    pub dim: usize,
    pub entries: Vec<Vec<RationalFunction>>,
}

impl CompanionSystem {
    /// Numeric evaluation with pole guard.
    pub fn eval(&self, x: C64, zero_tol: f64) -> Result<crate::numkernel::CMat> {
        let mut m = crate::numkernel::CMat::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let r = &self.entries[i][j];
                if r.is_zero() {
                    continue;
                }
                m[(i, j)] = r.eval(x, zero_tol)?;
            }
        }
        Ok(m)
    }
}

/// Where a point was classified on the apparent/not-apparent axis, with the
/// witness test and the shift window used.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Classification {
    Apparent,
    NotApparent,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct SingularityReport {
    pub point: C64,
    pub classification: Classification,
    pub witness: String,
    pub window: (i64, i64),
}

/// Scan settings for hypothesis checks over the q^Z orbit of a point.
#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub window: i64,
    pub tol: ToleranceConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            window: 50,
            tol: ToleranceConfig::default(),
        }
    }
}
