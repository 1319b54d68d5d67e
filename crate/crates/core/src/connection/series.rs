use super::RegularSystem;
use crate::numkernel::CMat;
use crate::{C64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    Zero,
    Infinity,
}

/// Truncated canonical series: the coefficients of Yhat_0 (powers of x) or of
/// Yhat_inf (powers of 1/x), with Y_0 = identity, together with a convergence
/// radius estimate (in x for the zero base, in 1/x for the infinity base).
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    pub base: Base,
    pub order: usize,
    pub coeff_mats: Vec<CMat>,
    pub conv_radius_est: f64,
}

impl SeriesSolution {
    /// Evaluate the raw series at u (u = x for the zero base, u = 1/x for
    /// infinity).
    fn eval_raw(&self, u: C64) -> CMat {
        let n = self.coeff_mats[0].rows;
        let mut acc = CMat::zeros(n, n);
        for m in self.coeff_mats.iter().rev() {
            acc = acc.scale(u).add(m);
        }
        acc
    }
}

// truncated power-series helpers on Vec<C64>

fn ps_mul(a: &[C64], b: &[C64], m: usize) -> Vec<C64> {
    let mut out = vec![C64::default(); m + 1];
    for (i, &ai) in a.iter().enumerate().take(m + 1) {
        if ai.norm() == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(m + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn ps_inv(a: &[C64], m: usize) -> Result<Vec<C64>> {
    let a0 = a.first().copied().unwrap_or_default();
    if a0.norm() == 0.0 {
        return Err(Error::InvalidInput("series inverse of a series vanishing at 0".into()));
    }
    let mut out = vec![C64::default(); m + 1];
    out[0] = C64::new(1.0, 0.0) / a0;
    for k in 1..=m {
        let mut acc = C64::default();
        for j in 1..=k {
            let aj = a.get(j).copied().unwrap_or_default();
            acc += aj * out[k - j];
        }
        out[k] = -acc / a0;
    }
    Ok(out)
}

/// Taylor coefficients of every entry of A at the chosen base, as matrices:
/// A(x) = sum_k A_k x^k near 0, or A(x) = sum_k A_k x^-k near infinity.
fn a_taylor(sys: &RegularSystem, base: Base, m: usize) -> Result<Vec<CMat>> {
    let n = sys.dim;
    let mut coeffs = vec![CMat::zeros(n, n); m + 1];
    for i in 0..n {
        for j in 0..n {
            let r = &sys.entries[i][j];
            if r.is_zero() {
                continue;
            }
            let (num, den): (Vec<C64>, Vec<C64>) = match base {
                Base::Zero => (r.num.coeffs().to_vec(), r.den.coeffs().to_vec()),
                Base::Infinity => {
                    // substitute x = 1/w and clear w^(deg den)
                    let dd = r.den.degree().unwrap();
                    let dn = r.num.degree().unwrap_or(0);
                    let mut num_w = vec![C64::default(); dd + 1];
                    for (k, &c) in r.num.coeffs().iter().enumerate() {
                        num_w[dd - k] = c;
                    }
                    let _ = dn;
                    let mut den_w = vec![C64::default(); dd + 1];
                    for (k, &c) in r.den.coeffs().iter().enumerate() {
                        den_w[dd - k] = c;
                    }
                    (num_w, den_w)
                }
            };
            let series = ps_mul(&num, &ps_inv(&den, m)?, m);
            for (k, &c) in series.iter().enumerate() {
                coeffs[k][(i, j)] = c;
            }
        }
    }
    Ok(coeffs)
}

/// Solve the Sylvester-type equation factor * Y * ab - ab * Y = c for Y.
fn sylvester_solve(factor: C64, ab: &CMat, c: &CMat) -> Result<CMat> {
    let n = ab.rows;
    let mut s = CMat::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for d in 0..n {
                    let mut v = C64::default();
                    if a == cc {
                        v += factor * ab[(d, b)];
                    }
                    if b == d {
                        v -= ab[(a, cc)];
                    }
                    s[(a * n + b, cc * n + d)] = v;
                }
            }
        }
    }
    let rhs: Vec<C64> = (0..n * n).map(|k| c[(k / n, k % n)]).collect();
    let sol = s.solve_vec(&rhs).map_err(|e| {
        Error::Resonance(format!("order equation not solvable (near-resonance): {e}"))
    })?;
    let mut y = CMat::zeros(n, n);
    for k in 0..n * n {
        y[(k / n, k % n)] = sol[k];
    }
    Ok(y)
}

/// Canonical series solution at the chosen base. For the zero base the
/// coefficients satisfy q^j Y_j A_0 - A_0 Y_j = sum_{k=1..j} A_k Y_{j-k};
/// at infinity the same recursion runs with q^-j and A_inf.
pub fn canonical_series(sys: &RegularSystem, base: Base, order: usize) -> Result<SeriesSolution> {
    let n = sys.dim;
    let a_coeffs = a_taylor(sys, base, order)?;
    let abase = match base {
        Base::Zero => sys.a0.clone(),
        Base::Infinity => sys.ainf.clone(),
    };
    let mut y = vec![CMat::identity(n)];
    for j in 1..=order {
        let mut c = CMat::zeros(n, n);
        for k in 1..=j {
            c = c.add(&a_coeffs[k].matmul(&y[j - k]));
        }
        let factor = match base {
            Base::Zero => sys.q.powu(j as u32),
            Base::Infinity => sys.q.powi(-(j as i32)),
        };
        let yj = sylvester_solve(factor, &abase, &c)?;
        // per-order residual audit
        let lhs = yj.matmul(&abase).scale(factor).sub(&abase.matmul(&yj));
        let resid = lhs.sub(&c).norm_max();
        let scale = c.norm_max().max(1.0);
        if resid > 1e-9 * scale {
            return Err(Error::Resonance(format!(
                "coefficient recursion residual {resid:.3e} at order {j}"
            )));
        }
        y.push(yj);
    }

    // convergence radius estimate by the coefficient root test
    let norms: Vec<f64> = y.iter().map(|m| m.norm_max()).collect();
    let max_norm = norms.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let tail_start = order.saturating_sub(order / 2).max(1);
    let tail: Vec<(usize, f64)> = (tail_start..=order)
        .map(|j| (j, norms[j]))
        .filter(|&(_, v)| v > 1e-13 * max_norm)
        .collect();
    let conv_radius_est = if tail.is_empty() {
        f64::INFINITY // terminating series
    } else {
        let growth = tail
            .iter()
            .map(|&(j, v)| v.powf(1.0 / j as f64))
            .fold(0.0, f64::max);
        0.9 / growth
    };

    Ok(SeriesSolution {
        base,
        order,
        coeff_mats: y,
        conv_radius_est,
    })
}

/// Evaluate the canonical solution hat-Y at an arbitrary point by series
/// evaluation inside the safe radius plus functional-equation continuation:
/// hat-Y_0(q^-1 u) = A(q^-1 u)^-1 hat-Y_0(u) A_0 outward from 0, and
/// hat-Y_inf(q u) = A(u) hat-Y_inf(u) A_inf^-1 inward from infinity.
pub fn continue_and_eval(
    sys: &RegularSystem,
    series: &SeriesSolution,
    x: C64,
    zero_tol: f64,
) -> Result<CMat> {
    let aq = sys.q.norm();
    match series.base {
        Base::Zero => {
            let safe = 0.5 * series.conv_radius_est;
            let m = if x.norm() <= safe || !safe.is_finite() {
                0
            } else {
                ((x.norm() / safe).ln() / (1.0 / aq).ln()).ceil() as usize
            };
            let mut u = x * sys.q.powu(m as u32);
            let mut val = series.eval_raw(u);
            for _ in 0..m {
                let unext = u / sys.q;
                let a = sys.eval(unext, zero_tol).map_err(|e| {
                    Error::Pole(format!("continuation chain hit a pole at {unext}: {e}"))
                })?;
                let ainv = a.inverse().map_err(|_| {
                    Error::Pole(format!("A is singular on the continuation chain at {unext}"))
                })?;
                val = ainv.matmul(&val).matmul(&sys.a0);
                u = unext;
            }
            Ok(val)
        }
        Base::Infinity => {
            // series in w = 1/x converges for |w| < R; need |1/u| <= R/2
            let safe = 0.5 * series.conv_radius_est;
            let m = if 1.0 / x.norm() <= safe || !safe.is_finite() {
                0
            } else {
                (((1.0 / x.norm()) / safe).ln() / (1.0 / aq).ln()).ceil() as usize
            };
            let mut u = x * sys.q.powi(-(m as i32));
            let mut val = series.eval_raw(C64::new(1.0, 0.0) / u);
            let ainf_inv = sys
                .ainf
                .inverse()
                .map_err(|_| Error::SingularMatrix("A(inf) not invertible".into()))?;
            for _ in 0..m {
                let a = sys.eval(u, zero_tol).map_err(|e| {
                    Error::Pole(format!("continuation chain hit a pole at {u}: {e}"))
                })?;
                val = a.matmul(&val).matmul(&ainf_inv);
                u *= sys.q;
            }
            Ok(val)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{Polynomial, RationalFunction};
    use crate::testkit::{c, cr};

    /// 1x1 system A(x) = (q^a x - 1)/(x - 1).
    fn scalar_example(q: C64, qa: C64) -> RegularSystem {
        let num = Polynomial::new(vec![cr(-1.0), qa]);
        let den = Polynomial::new(vec![cr(-1.0), cr(1.0)]);
        RegularSystem::new(q, vec![vec![RationalFunction::new(num, den).unwrap()]]).unwrap()
    }

    #[test]
    fn constant_system_series_is_identity() {
        let q = c(0.45, 0.1);
        let cc = c(0.7, 0.2);
        let sys = RegularSystem::new(
            q,
            vec![vec![RationalFunction::constant(cc)]],
        )
        .unwrap();
        let s = canonical_series(&sys, Base::Zero, 12).unwrap();
        for j in 1..=12 {
            assert!(s.coeff_mats[j].norm_max() < 1e-14);
        }
    }

    #[test]
    fn scalar_series_matches_pochhammer_quotient() {
        // closed form (x;q)_inf / (q^a x;q)_inf
        let q = c(0.4, 0.05);
        let a = 2.7f64; // generic non-integer exponent
        let qa = q.powf(a);
        let sys = scalar_example(q, qa);
        let order = 25usize;
        let s = canonical_series(&sys, Base::Zero, order).unwrap();
        // power series of prod (1 - q^k x) / prod (1 - q^(a+k) x)
        let m = order;
        let mut num = vec![C64::default(); m + 1];
        num[0] = cr(1.0);
        let mut den = num.clone();
        let mut qs = cr(1.0);
        for _ in 0..200 {
            num = super::ps_mul(&num, &[cr(1.0), -qs], m);
            den = super::ps_mul(&den, &[cr(1.0), -(qa * qs)], m);
            qs *= q;
        }
        let closed = super::ps_mul(&num, &super::ps_inv(&den, m).unwrap(), m);
        for k in 0..=m {
            let got = s.coeff_mats[k][(0, 0)];
            assert!(
                (got - closed[k]).norm() <= 1e-10 * (1.0 + closed[k].norm()),
                "order {k}: {got} vs {}",
                closed[k]
            );
        }
    }

    #[test]
    fn integer_exponent_series_terminates_to_polynomial() {
        // a = 2: hat-Y_0 = (x-1)(qx-1) up to normalization hat-Y_0(0) = 1
        let q = c(0.5, 0.12);
        let sys = scalar_example(q, q * q);
        let s = canonical_series(&sys, Base::Zero, 20).unwrap();
        assert!(s.conv_radius_est.is_infinite());
        let poly = Polynomial::from_roots(&[cr(1.0), cr(1.0) / q], q); // value 1 at x=0
        let mut rng = crate::testkit::rng(71);
        for _ in 0..5 {
            let x = crate::testkit::random_point(&mut rng, 0.2, 4.0);
            let got = continue_and_eval(&sys, &s, x, 1e-12).unwrap()[(0, 0)];
            let want = poly.eval(x);
            assert!((got - want).norm() <= 1e-9 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn series_satisfies_equation_to_truncation_order() {
        // random 2x2 regular system, defect of equation O(|x|^(M+1))
        let mut rng = crate::testkit::rng(72);
        let sys = crate::testkit::random_regular_system(&mut rng, 2);
        let m = 18usize;
        let s = canonical_series(&sys, Base::Zero, m).unwrap();
        for radius in [0.03, 0.06, 0.12] {
            let x = C64::from_polar(radius, 0.83);
            let lhs = s.eval_raw(x * sys.q).matmul(&sys.a0);
            let rhs = sys.eval(x, 1e-13).unwrap().matmul(&s.eval_raw(x));
            let defect = lhs.sub(&rhs).norm_max();
            // O(|x|^(M+1)) truncation, floored by double-precision roundoff
            let bound = radius.powi(m as i32 + 1).max(1e-13);
            assert!(defect < bound, "radius {radius}: defect {defect:.3e}");
        }
    }

    #[test]
    fn continuation_respects_functional_equation() {
        let mut rng = crate::testkit::rng(73);
        let sys = crate::testkit::random_regular_system(&mut rng, 2);
        let s = canonical_series(&sys, Base::Zero, 40).unwrap();
        let x = c(1.4, 0.8);
        let y_qx = continue_and_eval(&sys, &s, sys.q * x, 1e-12).unwrap();
        let y_x = continue_and_eval(&sys, &s, x, 1e-12).unwrap();
        // hat-Y_0(qx) A_0 = A(x) hat-Y_0(x)
        let lhs = y_qx.matmul(&sys.a0);
        let rhs = sys.eval(x, 1e-12).unwrap().matmul(&y_x);
        assert!(lhs.sub(&rhs).norm_max() <= 1e-9 * (1.0 + rhs.norm_max()));
    }

    #[test]
    fn infinity_series_consistency() {
        let mut rng = crate::testkit::rng(74);
        let sys = crate::testkit::random_regular_system(&mut rng, 2);
        let s = canonical_series(&sys, Base::Infinity, 40).unwrap();
        let x = c(0.9, -0.6);
        let y_qx = continue_and_eval(&sys, &s, sys.q * x, 1e-12).unwrap();
        let y_x = continue_and_eval(&sys, &s, x, 1e-12).unwrap();
        let lhs = y_qx.matmul(&sys.ainf);
        let rhs = sys.eval(x, 1e-12).unwrap().matmul(&y_x);
        assert!(lhs.sub(&rhs).norm_max() <= 1e-8 * (1.0 + rhs.norm_max()));
    }
}
