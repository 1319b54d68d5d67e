use crate::{C64, Error, Result};

/// Evaluation context for q-special functions: the deformation parameter and
/// the product truncation order, chosen so |q|^T is below the series target.
#[derive(Debug, Clone, Copy)]
pub struct QSpecialContext {
    pub q: C64,
    pub truncation_order: usize,
}

impl QSpecialContext {
    /// Truncation order defaults to ceil(log(series_tol)/log|q|) + guard,
    /// capped at 10000.
    pub fn new(q: C64, series_tol: f64) -> Result<Self> {
        let aq = q.norm();
        if !(aq > 0.0 && aq < 1.0) {
            return Err(Error::InvalidInput(format!(
                "|q| must lie in (0,1); got |q| = {aq}"
            )));
        }
        let t = (series_tol.ln() / aq.ln()).ceil() as usize + 10;
        Ok(Self {
            q,
            truncation_order: t.min(10_000).max(1),
        })
    }
}

/// Truncated infinite q-Pochhammer (a; q)_inf = prod_{k>=0} (1 - a q^k).
pub fn qpochhammer_inf(a: C64, ctx: &QSpecialContext) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    let mut aq = a;
    for _ in 0..ctx.truncation_order {
        acc *= C64::new(1.0, 0.0) - aq;
        aq *= ctx.q;
    }
    acc
}

/// theta_q(x) = (x, q/x, q; q)_inf.
pub fn theta_q(x: C64, ctx: &QSpecialContext) -> Result<C64> {
    if x.norm() == 0.0 {
        return Err(Error::InvalidInput("theta_q at x = 0".into()));
    }
    Ok(qpochhammer_inf(x, ctx)
        * qpochhammer_inf(ctx.q / x, ctx)
        * qpochhammer_inf(ctx.q, ctx))
}

/// e_c(x) = theta_q(x) / theta_q(c x); satisfies e_c(qx) = c e_c(x).
pub fn e_scalar(x: C64, c: C64, ctx: &QSpecialContext) -> Result<C64> {
    let num = theta_q(x, ctx)?;
    let den = theta_q(c * x, ctx)?;
    // theta vanishes exactly on q^Z, so a pole of e_c shows as a tiny
    // denominator compared to the generic theta magnitude nearby
    let scale = theta_scale(c * x, ctx).max(1e-300);
    if den.norm() <= 1e-10 * scale {
        return Err(Error::Pole(format!("e_c evaluated at a pole: c*x = {}", c * x)));
    }
    Ok(num / den)
}

fn theta_scale(x: C64, ctx: &QSpecialContext) -> f64 {
    let mut acc = 1.0f64;
    let mut a = x.norm();
    let mut b = (ctx.q / x).norm();
    let qn = ctx.q.norm();
    for _ in 0..ctx.truncation_order {
        acc *= (1.0 + a) * (1.0 + b);
        a *= qn;
        b *= qn;
        if a < 1e-14 && b < 1e-14 {
            break;
        }
    }
    acc
}
