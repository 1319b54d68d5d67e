//! Canonical solutions at 0 and infinity for regular-singular first-order
//! q-difference systems, meromorphic continuation, Birkhoff connection
//! matrices and their central parts, and the q-hypergeometric theta-quotient
//! verification.

mod appendix_b;
mod matrix;
mod series;

pub use appendix_b::{
    build_appendix_b_system, fit_theta_constants, solve_a1_mid, HyperGeoBParams, ThetaFit,
};
pub use matrix::{e_matrix, verify_apparent_regularity, ConnectionComputer, ConnectionSample};
pub use series::{canonical_series, continue_and_eval, Base, SeriesSolution};

use crate::numkernel::{in_q_power_orbit, CMat, RationalFunction, ToleranceConfig};
use crate::qoper::ScalarQOper;
use crate::{C64, Error, Result};

/// First-order system Y(qx) = A(x) Y(x) with A rational, holomorphic and
/// invertible at 0 and infinity.
#[derive(Debug, Clone)]
pub struct RegularSystem {
    pub q: C64,
    pub dim: usize,
    pub entries: Vec<Vec<RationalFunction>>,
    pub a0: CMat,
    pub ainf: CMat,
}

impl RegularSystem {
    pub fn new(q: C64, entries: Vec<Vec<RationalFunction>>) -> Result<Self> {
        let dim = entries.len();
        if dim == 0 || entries.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput(
                "entries must form a square matrix".into(),
            ));
        }
        let mut a0 = CMat::zeros(dim, dim);
        let mut ainf = CMat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let r = &entries[i][j];
                if r.is_zero() {
                    continue;
                }
                let d0 = r.den.coeff(0);
                if d0.norm() <= 1e-14 * r.den.norm_max() {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i},{j}) has a pole at x = 0"
                    )));
                }
                a0[(i, j)] = r.num.coeff(0) / d0;
                let dn = r.num.degree().unwrap_or(0);
                let dd = r.den.degree().unwrap();
                if dn > dd {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i},{j}) has a pole at infinity"
                    )));
                }
                if dn == dd {
                    ainf[(i, j)] = r.num.leading().unwrap() / r.den.leading().unwrap();
                }
            }
        }
        Ok(Self {
            q,
            dim,
            entries,
            a0,
            ainf,
        })
    }

    /// Companion system of a scalar oper as a RegularSystem.
    pub fn from_oper(l: &ScalarQOper) -> Result<Self> {
        let comp = l.companion();
        Self::new(l.q, comp.entries)
    }

    /// Numeric evaluation with pole guard.
    pub fn eval(&self, x: C64, zero_tol: f64) -> Result<CMat> {
        let mut m = CMat::zeros(self.dim, self.dim);
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

    /// Symbolic determinant (cofactor expansion over rational functions).
    pub fn det_rational(&self) -> RationalFunction {
        fn det_rec(
            e: &[Vec<RationalFunction>],
            rows: &[usize],
            cols: &[usize],
        ) -> RationalFunction {
            if rows.len() == 1 {
                return e[rows[0]][cols[0]].clone();
            }
            let mut acc = RationalFunction::zero();
            for (k, &cj) in cols.iter().enumerate() {
                let r = &e[rows[0]][cj];
                if r.is_zero() {
                    continue;
                }
                let sub_rows: Vec<usize> = rows[1..].to_vec();
                let sub_cols: Vec<usize> = cols
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &c)| c)
                    .collect();
                let minor = det_rec(e, &sub_rows, &sub_cols);
                let term = r * &minor;
                acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
        let idx: Vec<usize> = (0..self.dim).collect();
        det_rec(&self.entries, &idx, &idx)
    }
}

/// Outcome of the Fuchs/non-resonance verification.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub a0_invertible: bool,
    pub ainf_invertible: bool,
    pub a0_eigenvalues: Vec<C64>,
    pub ainf_eigenvalues: Vec<C64>,
    pub a0_nonresonant: bool,
    pub ainf_nonresonant: bool,
    /// Intermediate singularities: poles of A and of A^-1.
    pub s_plus: Vec<C64>,
    pub s_minus: Vec<C64>,
}

impl RegularityReport {
    pub fn ok(&self) -> bool {
        self.a0_invertible && self.ainf_invertible && self.a0_nonresonant && self.ainf_nonresonant
    }
}

/// Verify invertibility and strong non-resonance of A(0), A(inf) within the
/// exponent window, and list the intermediate singularities.
pub fn check_regular_nonresonant(
    sys: &RegularSystem,
    window: i64,
    tol: &ToleranceConfig,
) -> Result<RegularityReport> {
    let nonres = |eig: &[C64]| -> bool {
        for (i, &li) in eig.iter().enumerate() {
            for (j, &lj) in eig.iter().enumerate() {
                if i != j && in_q_power_orbit(li / lj, sys.q, window, 1e-8).is_some() {
                    return false;
                }
            }
        }
        true
    };
    let a0_eig = sys.a0.eigenvalues(tol.zero_tol)?;
    let ainf_eig = sys.ainf.eigenvalues(tol.zero_tol)?;
    let a0_inv =
        sys.a0.det().norm() > tol.zero_tol * sys.a0.norm_max().powi(sys.dim as i32).max(1e-300);
    let ainf_inv =
        sys.ainf.det().norm() > tol.zero_tol * sys.ainf.norm_max().powi(sys.dim as i32).max(1e-300);

    // poles of A: zeros of entry denominators; poles of A^-1: zeros of det
    let mut s_plus: Vec<C64> = Vec::new();
    for row in &sys.entries {
        for r in row {
            if r.den.degree().unwrap_or(0) >= 1 {
                s_plus.extend(r.den.roots(tol.zero_tol)?);
            }
        }
    }
    let det = sys.det_rational();
    let mut s_minus: Vec<C64> = Vec::new();
    if det.num.degree().unwrap_or(0) >= 1 {
        s_minus.extend(det.num.roots(tol.zero_tol)?);
    }
    let dedup = |v: Vec<C64>| -> Vec<C64> {
        crate::numkernel::cluster_points(&v, tol.cluster_tol)
            .into_iter()
            .map(|(c, _)| c)
            .filter(|c| c.norm() > tol.cluster_tol)
            .collect()
    };
    Ok(RegularityReport {
        a0_invertible: a0_inv,
        ainf_invertible: ainf_inv,
        a0_nonresonant: nonres(&a0_eig),
        ainf_nonresonant: nonres(&ainf_eig),
        a0_eigenvalues: a0_eig,
        ainf_eigenvalues: ainf_eig,
        s_plus: dedup(s_plus),
        s_minus: dedup(s_minus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::Polynomial;
    use crate::testkit::{c, cr};

    #[test]
    fn nonresonance_verdicts() {
        // constant diagonal diag(2,3), q = 1/2: 2/3 not in q^Z -> passes
        let q = cr(0.5);
        let ent = |v: f64| RationalFunction::from_poly(Polynomial::constant(cr(v)));
        let entries = vec![
            vec![ent(2.0), RationalFunction::zero()],
            vec![RationalFunction::zero(), ent(3.0)],
        ];
        let sys = RegularSystem::new(q, entries).unwrap();
        let rep = check_regular_nonresonant(&sys, 50, &ToleranceConfig::default()).unwrap();
        assert!(rep.ok());

        // eigenvalues {c, cq} -> strongly resonant
        let cc = c(0.8, 0.3);
        let entries = vec![
            vec![
                RationalFunction::from_poly(Polynomial::constant(cc)),
                RationalFunction::zero(),
            ],
            vec![
                RationalFunction::zero(),
                RationalFunction::from_poly(Polynomial::constant(cc * q)),
            ],
        ];
        let sys = RegularSystem::new(q, entries).unwrap();
        let rep = check_regular_nonresonant(&sys, 50, &ToleranceConfig::default()).unwrap();
        assert!(!rep.ok());
        assert!(!rep.a0_nonresonant);
    }
}
