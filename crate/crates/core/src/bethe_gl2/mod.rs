//! Toroidal gl2 Bethe systems: residual evaluation for both Bethe equation
//! families, oper construction from Bethe roots, the relaxed-oper system with
//! solution counting, and the unfolded/lambda-oper equivalence checks.

mod oper;
mod relaxed;
mod solve;
mod unfolded;

pub use oper::{oper_from_roots, p0ss_residuals, top_oper, FourFormResiduals, VermaOper};
pub use relaxed::{
    count_relaxed_opers, relaxed_assemble, relaxed_linear_solve, relaxed_residual, CountReport,
    RelaxedAnsatz, RelaxedSolution,
};
pub use solve::{multistart_newton, MultistartOptions};
pub use unfolded::{lambda_oper_check, unfolded_residuals, LambdaVerdicts, UnfoldedData};

use crate::numkernel::{Polynomial, RationalFunction};
use crate::{C64, Error, Result};

/// Multiplicative parameter pack of the quantum toroidal gl2 setting:
/// q, d and the derived q1 = q^-1 d, q2 = q^2, q3 = q^-1 d^-1 (so that
/// q1 q2 q3 = 1), twists p0, p1, and the weights stored multiplicatively
/// as q^mu and q2^nu.
#[derive(Debug, Clone, Copy)]
pub struct ToroidalParams {
    pub q: C64,
    pub d: C64,
    pub p0: C64,
    pub p1: C64,
    pub qmu: C64,
    pub q2nu: C64,
}

impl ToroidalParams {
    pub fn q1(&self) -> C64 {
        self.d / self.q
    }

    pub fn q2(&self) -> C64 {
        self.q * self.q
    }

    pub fn q3(&self) -> C64 {
        C64::new(1.0, 0.0) / (self.q * self.d)
    }

    /// q^lambda_1 = q3 q^-mu.
    pub fn qlam(&self) -> C64 {
        self.q3() / self.qmu
    }

    /// x_1 = q3^-1 q^-mu.
    pub fn x1(&self) -> C64 {
        C64::new(1.0, 0.0) / (self.q3() * self.qmu)
    }

    /// q2^-mu = (q^mu)^-2.
    pub fn q2_neg_mu(&self) -> C64 {
        let inv = C64::new(1.0, 0.0) / self.qmu;
        inv * inv
    }

    /// Highest l-weight component Psi_0(z) = q^mu (z - q3^-1 q2^-mu)/(z - q3^-1).
    pub fn psi0(&self) -> RationalFunction {
        let q3i = C64::new(1.0, 0.0) / self.q3();
        let num = Polynomial::new(vec![-q3i * self.q2_neg_mu(), C64::new(1.0, 0.0)])
            .mul_scalar(self.qmu);
        let den = Polynomial::new(vec![-q3i, C64::new(1.0, 0.0)]);
        RationalFunction::new(num, den).unwrap()
    }

    /// Psi_1(z) = q^lambda_1 (z - q3^-2)/(z - q2^-mu).
    pub fn psi1(&self) -> RationalFunction {
        let q3 = self.q3();
        let num = Polynomial::new(vec![
            -C64::new(1.0, 0.0) / (q3 * q3),
            C64::new(1.0, 0.0),
        ])
        .mul_scalar(self.qlam());
        let den = Polynomial::new(vec![-self.q2_neg_mu(), C64::new(1.0, 0.0)]);
        RationalFunction::new(num, den).unwrap()
    }

    /// Genericity: |q| < 1 and no relation q1^a q2^b = 1 with small (a, b)
    /// other than (0, 0).
    pub fn validate(&self, window: i64) -> Result<()> {
        if !(self.q.norm() > 0.0 && self.q.norm() < 1.0) {
            return Err(Error::InvalidInput("|q| must lie in (0,1)".into()));
        }
        let (q1, q2) = (self.q1(), self.q2());
        let bound = window.min(12);
        for a in -bound..=bound {
            for b in -bound..=bound {
                if a == 0 && b == 0 {
                    continue;
                }
                let v = q1.powi(a as i32) * q2.powi(b as i32);
                if (v - C64::new(1.0, 0.0)).norm() < 1e-8 {
                    return Err(Error::Degenerate(format!(
                        "q1^{a} q2^{b} = 1 (non-generic parameters)"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Bethe root data: y_0(x) = prod (x - s_i), y_1(x) = prod (x - t_i).
#[derive(Debug, Clone)]
pub struct BetheConfig {
    pub s: Vec<C64>,
    pub t: Vec<C64>,
}

impl BetheConfig {
    pub fn l0(&self) -> usize {
        self.s.len()
    }

    pub fn l1(&self) -> usize {
        self.t.len()
    }

    pub fn y0(&self) -> Polynomial {
        Polynomial::from_roots(&self.s, C64::new(1.0, 0.0))
    }

    pub fn y1(&self) -> Polynomial {
        Polynomial::from_roots(&self.t, C64::new(1.0, 0.0))
    }

    /// Nonzero, pairwise distinct roots, no collisions across the shift
    /// orbits entering the Bethe equations.
    pub fn validate(&self, params: &ToroidalParams) -> Result<()> {
        let all: Vec<C64> = self.s.iter().chain(self.t.iter()).copied().collect();
        for &r in &all {
            if r.norm() < 1e-10 {
                return Err(Error::Degenerate("zero Bethe root".into()));
            }
        }
        let shifts = [
            params.q2(),
            params.q1(),
            params.q3(),
            C64::new(1.0, 0.0) / params.q1(),
            C64::new(1.0, 0.0) / params.q3(),
        ];
        for (i, &a) in all.iter().enumerate() {
            for (j, &b) in all.iter().enumerate() {
                if i == j {
                    continue;
                }
                if (a - b).norm() < 1e-9 * a.norm().max(b.norm()) {
                    return Err(Error::Degenerate("coinciding Bethe roots".into()));
                }
                for &c in &shifts {
                    if (a - c * b).norm() < 1e-9 * a.norm().max((c * b).norm()) {
                        return Err(Error::Degenerate(
                            "Bethe roots on a shift-collision orbit".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn guarded_div(num: C64, den: C64, what: &str) -> Result<C64> {
    if den.norm() < 1e-140 {
        return Err(Error::Degenerate(format!("vanishing factor in {what}")));
    }
    Ok(num / den)
}

/// Residuals of both Bethe equation families, normalized as
/// LHS/(-Psi) - 1 per root; the zero vector certifies a Bethe solution.
pub fn bethe_residuals(cfg: &BetheConfig, params: &ToroidalParams) -> Result<Vec<C64>> {
    let y0 = cfg.y0();
    let y1 = cfg.y1();
    let (q1, q2, q3) = (params.q1(), params.q2(), params.q3());
    let (l0, l1) = (cfg.l0() as i32, cfg.l1() as i32);
    let psi0 = params.psi0();
    let psi1 = params.psi1();
    let one = C64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(cfg.l0() + cfg.l1());
    for &si in &cfg.s {
        let lhs = params.p0
            * q2.powi(l1 - l0)
            * guarded_div(y0.eval(q2 * si), y0.eval(si / q2), "(BE0) y0 ratio")?
            * guarded_div(
                y1.eval(q1 * si) * y1.eval(q3 * si),
                y1.eval(si / q1) * y1.eval(si / q3),
                "(BE0) y1 ratio",
            )?;
        let rhs = -psi0.eval(si, 1e-12)?;
        out.push(guarded_div(lhs, rhs, "(BE0) weight")? - one);
    }
    for &ti in &cfg.t {
        let lhs = params.p1
            * q2.powi(l0 - l1)
            * guarded_div(y1.eval(q2 * ti), y1.eval(ti / q2), "(BE1) y1 ratio")?
            * guarded_div(
                y0.eval(q1 * ti) * y0.eval(q3 * ti),
                y0.eval(ti / q1) * y0.eval(ti / q3),
                "(BE1) y0 ratio",
            )?;
        let rhs = -psi1.eval(ti, 1e-12)?;
        out.push(guarded_div(lhs, rhs, "(BE1) weight")? - one);
    }
    Ok(out)
}

/// Multi-start Newton solve of the full Bethe system for given sizes
/// (l0, l1); returns certified configurations sorted canonically.
pub fn solve_bethe_system(
    params: &ToroidalParams,
    l0: usize,
    l1: usize,
    starts: usize,
    seed: u64,
) -> Result<Vec<BetheConfig>> {
    let dim = l0 + l1;
    let f = |z: &[C64]| -> Result<Vec<C64>> {
        let cfg = BetheConfig {
            s: z[..l0].to_vec(),
            t: z[l0..].to_vec(),
        };
        bethe_residuals(&cfg, params)
    };
    let opts = MultistartOptions {
        starts,
        seed,
        annulus: (0.2, 4.0),
        cluster_tol: 1e-6,
        // s-block and t-block are separately permutation-symmetric
        symmetry_blocks: vec![l0, l1],
        ..Default::default()
    };
    let sols = multistart_newton(&f, dim, &opts);
    let mut out = Vec::new();
    for z in sols {
        let cfg = BetheConfig {
            s: z[..l0].to_vec(),
            t: z[l0..].to_vec(),
        };
        if cfg.validate(params).is_ok() {
            out.push(cfg);
        }
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) fn random_params(rng: &mut rand_chacha::ChaCha8Rng) -> ToroidalParams {
    loop {
        let params = ToroidalParams {
            q: crate::testkit::random_q(rng, 0.3, 0.7),
            d: crate::testkit::random_point(rng, 0.5, 2.0),
            p0: crate::testkit::random_point(rng, 0.5, 2.0),
            p1: crate::testkit::random_point(rng, 0.5, 2.0),
            qmu: crate::testkit::random_point(rng, 0.5, 2.0),
            q2nu: crate::testkit::random_point(rng, 0.5, 2.0),
        };
        if params.validate(50).is_ok() {
            return params;
        }
    }
}
