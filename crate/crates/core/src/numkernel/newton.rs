use crate::{C64, Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            max_iter: 80,
            tol: 1e-12,
            fd_step: 1e-7,
        }
    }
}

/// Damped Newton for a square holomorphic system F: C^n -> C^n, with a
/// forward-difference complex Jacobian. Returns the solution when the
/// sup-norm of F drops below tol.
pub fn newton_solve<F>(f: &F, start: &[C64], opts: &NewtonOptions) -> Result<Vec<C64>>
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let n = start.len();
    let mut z = start.to_vec();
    let mut fz = f(&z)?;
    let norm = |v: &[C64]| v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for _ in 0..opts.max_iter {
        if norm(&fz) < opts.tol {
            return Ok(z);
        }
        // Jacobian by forward differences
        let mut jac = super::CMat::zeros(n, n);
        for k in 0..n {
            let h = C64::new(opts.fd_step * (1.0 + z[k].norm()), 0.0);
            let mut zp = z.clone();
            zp[k] += h;
            let fp = f(&zp)?;
            for i in 0..n {
                jac[(i, k)] = (fp[i] - fz[i]) / h;
            }
        }
        let rhs: Vec<C64> = fz.iter().map(|&c| -c).collect();
        let step = jac
            .solve_vec(&rhs)
            .map_err(|e| Error::SolveFailed(format!("singular Jacobian: {e}")))?;
        // backtracking line search
        let mut lambda = 1.0f64;
        let base = norm(&fz);
        let mut accepted = false;
        for _ in 0..30 {
            let znew: Vec<C64> = z
                .iter()
                .zip(&step)
                .map(|(&a, &d)| a + d * lambda)
                .collect();
            match f(&znew) {
                Ok(fnew) if norm(&fnew) < base * (1.0 - 0.25 * lambda) || norm(&fnew) < opts.tol => {
                    z = znew;
                    fz = fnew;
                    accepted = true;
                    break;
                }
                _ => lambda *= 0.5,
            }
        }
        if !accepted {
            return Err(Error::SolveFailed(format!(
                "line search stalled at residual {base:.3e}"
            )));
        }
    }
    if norm(&fz) < opts.tol {
        Ok(z)
    } else {
        Err(Error::SolveFailed(format!(
            "no convergence after {} iterations (residual {:.3e})",
            opts.max_iter,
            norm(&fz)
        )))
    }
}
