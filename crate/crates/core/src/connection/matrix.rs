use super::series::{canonical_series, continue_and_eval, Base, SeriesSolution};
use super::RegularSystem;
use crate::numkernel::{e_scalar, CMat, QSpecialContext};
use crate::{C64, Error, Result};

/// Connection-matrix data at one sample point: M(x) and the central part
/// Mhat(x) = e_{A0}(x) M(x) e_{Ainf}(x)^-1.
#[derive(Debug, Clone)]
pub struct ConnectionSample {
    pub x: C64,
    pub m_val: CMat,
    pub mhat_val: CMat,
}

/// e_C(x) = G diag(e_{c_i(x)}) G^-1 for semi-simple C.
pub fn e_matrix(c: &CMat, x: C64, ctx: &QSpecialContext, zero_tol: f64) -> Result<CMat> {
    let eig = c.eigen_semisimple(zero_tol)?;
    let n = c.rows;
    let g = &eig.vectors;
    let ginv = g.inverse().map_err(|_| {
        Error::Defective("eigenvector matrix not invertible".into())
    })?;
    let mut d = CMat::zeros(n, n);
    for (i, &lam) in eig.values.iter().enumerate() {
        d[(i, i)] = e_scalar(x, lam, ctx)?;
    }
    Ok(g.matmul(&d).matmul(&ginv))
}

/// Precomputed canonical series at both bases, for repeated connection-matrix
/// evaluations of one system.
pub struct ConnectionComputer {
    pub sys: RegularSystem,
    pub s0: SeriesSolution,
    pub sinf: SeriesSolution,
    pub ctx: QSpecialContext,
    pub zero_tol: f64,
}

impl ConnectionComputer {
    pub fn new(sys: RegularSystem, order: usize, series_tol: f64, zero_tol: f64) -> Result<Self> {
        let s0 = canonical_series(&sys, Base::Zero, order)?;
        let sinf = canonical_series(&sys, Base::Infinity, order)?;
        let ctx = QSpecialContext::new(sys.q, series_tol)?;
        Ok(Self {
            sys,
            s0,
            sinf,
            ctx,
            zero_tol,
        })
    }

    pub fn yhat0(&self, x: C64) -> Result<CMat> {
        continue_and_eval(&self.sys, &self.s0, x, self.zero_tol)
    }

    pub fn yhat_inf(&self, x: C64) -> Result<CMat> {
        continue_and_eval(&self.sys, &self.sinf, x, self.zero_tol)
    }

    /// Central part Mhat(x) = hat-Y_0(x)^-1 hat-Y_inf(x).
    pub fn mhat(&self, x: C64) -> Result<CMat> {
        let y0 = self.yhat0(x)?;
        let yinf = self.yhat_inf(x)?;
        let y0inv = y0
            .inverse()
            .map_err(|_| Error::Pole(format!("hat-Y_0 singular at {x}")))?;
        Ok(y0inv.matmul(&yinf))
    }

    /// Full connection sample (M and Mhat). Requires semi-simple A_0, A_inf.
    pub fn sample(&self, x: C64) -> Result<ConnectionSample> {
        let mhat = self.mhat(x)?;
        let e0 = e_matrix(&self.sys.a0, x, &self.ctx, self.zero_tol)?;
        let einf = e_matrix(&self.sys.ainf, x, &self.ctx, self.zero_tol)?;
        let e0inv = e0
            .inverse()
            .map_err(|_| Error::Pole(format!("e_A0 singular at {x}")))?;
        let m = e0inv.matmul(&mhat).matmul(&einf);
        Ok(ConnectionSample {
            x,
            m_val: m,
            mhat_val: mhat,
        })
    }
}

/// Fit c/(x - s) + analytic to Mhat on a small circle around s and declare
/// the point regular iff the fitted pole-coefficient norm is below
/// 1e-6 * (sample scale). Returns (regular, |c|/scale).
pub fn verify_apparent_regularity(
    computer: &ConnectionComputer,
    s: C64,
    samples: usize,
) -> Result<(bool, f64)> {
    let radius = 0.01 * s.norm();
    let mut pole_coeff = CMat::zeros(computer.sys.dim, computer.sys.dim);
    let mut scale = 0.0f64;
    for k in 0..samples {
        let th = std::f64::consts::TAU * (k as f64) / (samples as f64);
        let offset = C64::from_polar(radius, th);
        let mh = computer.mhat(s + offset).map_err(|e| {
            Error::Geometry(format!("sampling circle hit a singular orbit: {e}"))
        })?;
        scale = scale.max(mh.norm_max());
        // (1/N) sum f(s + r e^{i t}) r e^{i t} approximates the residue
        pole_coeff = pole_coeff.add(&mh.scale(offset / (samples as f64)));
    }
    let rel = pole_coeff.norm_max() / scale.max(1e-300);
    Ok((rel < 1e-6, rel))
}
