use super::Polynomial;
use crate::{C64, Error, Result};

/// All complex roots with multiplicity, via Aberth simultaneous iteration
/// from a perturbed-circle initialization, polished by Newton. Residual
/// requirement: |p(root)| <= zero_tol * (evaluation scale at the root).
pub fn poly_roots(p: &Polynomial, zero_tol: f64) -> Result<Vec<C64>> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::InvalidInput("roots of the zero polynomial".into()))?;
    if deg == 0 {
        return Err(Error::InvalidInput(
            "roots of a nonzero constant polynomial".into(),
        ));
    }

    // strip exact zero roots at the origin first
    let mut coeffs = p.coeffs().to_vec();
    let mut zeros_at_origin = 0usize;
    while coeffs[0].norm() == 0.0 && coeffs.len() > 1 {
        coeffs.remove(0);
        zeros_at_origin += 1;
    }
    let reduced = Polynomial::new(coeffs);
    let mut roots = vec![C64::default(); zeros_at_origin];
    if reduced.degree() == Some(0) {
        return Ok(roots);
    }

    for (attempt, phase) in [0.38f64, 1.77, 2.93].into_iter().enumerate() {
        match aberth(&reduced, phase, 400) {
            Some(mut found) => {
                polish(&reduced, &mut found);
                let ok = found
                    .iter()
                    .all(|&z| reduced.eval(z).norm() <= zero_tol * reduced.eval_scale(z).max(1e-300));
                if ok {
                    roots.extend(found);
                    return Ok(roots);
                }
                if attempt == 2 {
                    roots.extend(found);
                    return Err(Error::RootsNonConvergence {
                        iterations: 400,
                        found: roots.len(),
                        partial: roots,
                    });
                }
            }
            None if attempt == 2 => {
                return Err(Error::RootsNonConvergence {
                    iterations: 400,
                    found: roots.len(),
                    partial: roots,
                })
            }
            None => {}
        }
    }
    unreachable!()
}

fn aberth(p: &Polynomial, phase: f64, max_iter: usize) -> Option<Vec<C64>> {
    let n = p.degree().unwrap();
    let dp = p.derivative();
    let lead = p.leading().unwrap();

    // Cauchy upper bound for the root magnitudes
    let radius = 1.0
        + p.coeffs()[..n]
            .iter()
            .map(|c| (*c / lead).norm())
            .fold(0.0, f64::max);
    let r0 = 0.8 * radius;

    let mut z: Vec<C64> = (0..n)
        .map(|j| {
            let th = 2.0 * std::f64::consts::PI * (j as f64) / (n as f64) + phase;
            C64::from_polar(r0 * (1.0 + 0.05 * ((j % 7) as f64) / 7.0), th)
        })
        .collect();

    for _ in 0..max_iter {
        let mut max_step = 0.0f64;
        let znew: Vec<C64> = (0..n)
            .map(|k| {
                let pk = p.eval(z[k]);
                let dk = dp.eval(z[k]);
                if pk.norm() == 0.0 {
                    return z[k];
                }
                let newton = if dk.norm() > 0.0 { pk / dk } else { C64::new(1e-8, 0.0) };
                let mut s = C64::default();
                for j in 0..n {
                    if j != k {
                        let d = z[k] - z[j];
                        if d.norm() > 1e-300 {
                            s += C64::new(1.0, 0.0) / d;
                        }
                    }
                }
                let denom = C64::new(1.0, 0.0) - newton * s;
                let step = if denom.norm() > 1e-300 { newton / denom } else { newton };
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
                z[k] - step
            })
            .collect();
        z = znew;
        if max_step < 1e-14 {
            return Some(z);
        }
    }
    // linear convergence on clusters can exhaust the cap while being accurate
    // enough; let the residual check decide
    Some(z)
}

fn polish(p: &Polynomial, roots: &mut [C64]) {
    let dp = p.derivative();
    for z in roots.iter_mut() {
        for _ in 0..3 {
            let d = dp.eval(*z);
            if d.norm() < 1e-300 {
                break;
            }
            let step = p.eval(*z) / d;
            if step.norm() > 0.5 * (1.0 + z.norm()) {
                break; // Newton diverging (cluster); keep the Aberth value
            }
            *z -= step;
        }
    }
}

impl Polynomial {
    /// See [`poly_roots`].
    pub fn roots(&self, zero_tol: f64) -> Result<Vec<C64>> {
        poly_roots(self, zero_tol)
    }
}
