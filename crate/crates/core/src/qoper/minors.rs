use super::{CompanionSystem, ScalarQOper};
use crate::numkernel::{CMat, Polynomial, RationalFunction};
use crate::{C64, Error, Result};

/// The iterated product A^(m)(x) = A(x) A(q^-1 x) ... A(q^-m x), evaluated
/// numerically. Errors with the offending shift index when an evaluation
/// point is a pole of an entry.
pub fn a_product(a: &CompanionSystem, m: usize, x: C64, zero_tol: f64) -> Result<CMat> {
    let mut acc = CMat::identity(a.dim);
    for j in 0..=m {
        let xj = x * a.q.powi(-(j as i32));
        let mj = a.eval(xj, zero_tol).map_err(|e| {
            Error::Pole(format!("A(q^-{j} x): {e}"))
        })?;
        acc = acc.matmul(&mj);
    }
    Ok(acc)
}

/// The minor t_k^(m) as a rational function with common denominator
/// prod_{j=0..m} a_0(q^-j x). Base cases: t_k^(0) = t_k, and for m < 0 the
/// constant (-1)^(k-1) delta_{k+m,0}; computed through the recurrence
/// t_k^(m) = t_1^(m-1) t_k(q^-m x) - t_{k+1}^(m-1).
pub fn t_km(l: &ScalarQOper, m: i64, k: i64) -> RationalFunction {
    let n = l.order() as i64;
    if m < 0 {
        let val = if k + m == 0 {
            let sign = if (k - 1).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            C64::new(sign, 0.0)
        } else {
            C64::default()
        };
        return RationalFunction::constant(val);
    }
    // polynomial rows T^(step)_k = t_k^(step) * prod_{j<=step} a_0(q^-j x),
    // indices 0..=n+1 (entries beyond n stay zero)
    let width = (n + 2) as usize;
    let mut row: Vec<Polynomial> = (0..width)
        .map(|kk| {
            if (kk as i64) <= n {
                l.coeffs[kk].clone()
            } else {
                Polynomial::zero()
            }
        })
        .collect();
    let mut den = l.coeffs[0].clone();
    for step in 1..=m {
        let shift = l.q.powi(-(step as i32));
        let a0s = l.coeffs[0].scale_arg(shift);
        let t1_prev = row[1].clone();
        let mut next = vec![Polynomial::zero(); width];
        for kk in 0..width {
            let ak_shifted = if (kk as i64) <= n {
                l.coeffs[kk].scale_arg(shift)
            } else {
                Polynomial::zero()
            };
            let first = &t1_prev * &ak_shifted;
            let second = if kk + 1 < width {
                &row[kk + 1] * &a0s
            } else {
                Polynomial::zero()
            };
            next[kk] = &first - &second;
        }
        row = next;
        den = &den * &a0s;
    }
    let num = if k >= 0 && (k as usize) < width {
        row[k as usize].clone()
    } else {
        Polynomial::zero()
    };
    RationalFunction { num, den }
}

/// Delta_r for a second-order oper: the (r+1)x(r+1) tridiagonal determinant
/// with diagonal a_1(q^-j x), superdiagonal a_2(q^-j x), subdiagonal
/// a_0(q^-j x), built by the three-term recurrence
/// Delta_m = a_1(q^-m x) Delta_{m-1} - a_0(q^-m x) a_2(q^-m+1 x) Delta_{m-2}.
pub fn delta_r(l: &ScalarQOper, r: usize) -> Result<Polynomial> {
    if l.order() != 2 {
        return Err(Error::InvalidInput(format!(
            "Delta_r requires a second-order oper, got order {}",
            l.order()
        )));
    }
    let mut prev2 = Polynomial::zero(); // Delta_{-2}
    let mut prev1 = Polynomial::one(); // Delta_{-1}
    let mut cur = Polynomial::zero();
    for m in 0..=r {
        let sm = l.q.powi(-(m as i32));
        let sm1 = l.q.powi(-(m as i32) + 1);
        let a1m = l.coeffs[1].scale_arg(sm);
        let a0m = l.coeffs[0].scale_arg(sm);
        let a2m1 = l.coeffs[2].scale_arg(sm1);
        cur = &(&a1m * &prev1) - &(&(&a0m * &a2m1) * &prev2);
        prev2 = prev1;
        prev1 = cur.clone();
    }
    Ok(cur)
}

/// Scalar-valued Delta_r(x0) by the same recurrence, evaluated pointwise.
/// Numerically preferable near degenerating configurations.
pub fn delta_r_at(l: &ScalarQOper, r: usize, x0: C64) -> Result<C64> {
    if l.order() != 2 {
        return Err(Error::InvalidInput("Delta_r requires order 2".into()));
    }
    let mut prev2 = C64::default();
    let mut prev1 = C64::new(1.0, 0.0);
    let mut cur = C64::default();
    for m in 0..=r {
        let xm = x0 * l.q.powi(-(m as i32));
        let xm1 = x0 * l.q.powi(-(m as i32) + 1);
        cur = l.coeffs[1].eval(xm) * prev1 - l.coeffs[0].eval(xm) * l.coeffs[2].eval(xm1) * prev2;
        prev2 = prev1;
        prev1 = cur;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ToleranceConfig;
    use crate::testkit::cr;

    fn sample_oper(n: usize, seed: u64) -> ScalarQOper {
        let mut rng = crate::testkit::rng(seed);
        let q = crate::testkit::random_q(&mut rng, 0.35, 0.65);
        let coeffs = (0..=n)
            .map(|_| crate::testkit::random_poly(&mut rng, 2, 1.0))
            .collect();
        ScalarQOper::new(q, coeffs).unwrap()
    }

    #[test]
    fn a_product_m0_is_a() {
        let l = sample_oper(3, 3);
        let a = l.companion();
        let x = crate::testkit::c(0.8, 0.1);
        let p = a_product(&a, 0, x, 1e-12).unwrap();
        let direct = a.eval(x, 1e-12).unwrap();
        assert!(p.sub(&direct).norm_max() < 1e-13 * (1.0 + direct.norm_max()));
    }

    #[test]
    fn a_product_det_multiplicative() {
        let l = sample_oper(2, 4);
        let a = l.companion();
        let mut rng = crate::testkit::rng(40);
        for m in 0..4usize {
            let x = crate::testkit::random_point(&mut rng, 0.7, 1.4);
            let p = a_product(&a, m, x, 1e-12).unwrap();
            let mut expect = C64::new(1.0, 0.0);
            for j in 0..=m {
                let xj = x * l.q.powi(-(j as i32));
                expect *= l.a(2).eval(xj) / l.a(0).eval(xj);
            }
            assert!(
                (p.det() - expect).norm() <= 1e-9 * (1.0 + expect.norm()),
                "m = {m}"
            );
        }
    }

    #[test]
    fn t_km_negative_m_constants() {
        let l = sample_oper(2, 5);
        let tol = ToleranceConfig::default();
        // m = -2, k = 2 -> (-1)^(2-1) delta_{0,0} = -1
        let r = t_km(&l, -2, 2);
        assert!((r.eval(cr(1.3), tol.zero_tol).unwrap() + cr(1.0)).norm() < 1e-14);
        for k in [0i64, 1, 3, 4] {
            let r = t_km(&l, -2, k);
            assert!(r.eval(cr(0.9), tol.zero_tol).unwrap().norm() < 1e-14);
        }
    }

    #[test]
    fn t_km_m1_determinant_oracle() {
        // t_1^(1) = t_1(x) t_1(q^-1 x) - t_2(x) for n = 2
        let l = sample_oper(2, 6);
        let r = t_km(&l, 1, 1);
        let mut rng = crate::testkit::rng(61);
        for _ in 0..5 {
            let x = crate::testkit::random_point(&mut rng, 0.6, 1.5);
            let t1 = |u: C64| l.a(1).eval(u) / l.a(0).eval(u);
            let t2 = |u: C64| l.a(2).eval(u) / l.a(0).eval(u);
            let expect = t1(x) * t1(x / l.q) - t2(x);
            let got = r.eval(x, 1e-12).unwrap();
            assert!((got - expect).norm() <= 1e-9 * (1.0 + expect.norm()));
        }
    }

    #[test]
    fn t_km_top_identity() {
        // t_n^(m) = t_1^(m-1) t_n(q^-m x)
        for n in 2..=3usize {
            let l = sample_oper(n, 8 + n as u64);
            let mut rng = crate::testkit::rng(80 + n as u64);
            for m in 1..=3i64 {
                let x = crate::testkit::random_point(&mut rng, 0.7, 1.3);
                let lhs = t_km(&l, m, n as i64).eval(x, 1e-12).unwrap();
                let t1m = t_km(&l, m - 1, 1).eval(x, 1e-12).unwrap();
                let xm = x * l.q.powi(-(m as i32));
                let tn = l.a(n).eval(xm) / l.a(0).eval(xm);
                let rhs = t1m * tn;
                assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
            }
        }
    }

    /// Dense (m+1)x(m+1) determinant from the defining display, as an
    /// independent oracle for the recurrence.
    fn t_km_dense(l: &ScalarQOper, m: usize, k: i64, x: C64) -> C64 {
        let t = |kk: i64, u: C64| -> C64 {
            let n = l.order() as i64;
            if kk == 0 {
                return C64::new(1.0, 0.0);
            }
            if kk < 0 || kk > n {
                return C64::default();
            }
            l.a(kk as usize).eval(u) / l.a(0).eval(u)
        };
        let sz = m + 1;
        let mut mat = CMat::zeros(sz, sz);
        for i in 0..sz {
            let xi = x * l.q.powi(-(i as i32));
            for j in 0..sz {
                let entry = if j < sz - 1 {
                    t(j as i64 - i as i64 + 1, xi)
                } else {
                    t(k + m as i64 - i as i64, xi)
                };
                mat[(i, j)] = entry;
            }
        }
        mat.det()
    }

    #[test]
    fn t_km_matches_dense_determinant() {
        let l = sample_oper(3, 9);
        let mut rng = crate::testkit::rng(90);
        for m in 1..=3usize {
            for k in 1..=3i64 {
                let x = crate::testkit::random_point(&mut rng, 0.8, 1.2);
                let got = t_km(&l, m as i64, k).eval(x, 1e-12).unwrap();
                let want = t_km_dense(&l, m, k, x);
                assert!(
                    (got - want).norm() <= 1e-8 * (1.0 + want.norm()),
                    "m={m} k={k}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn delta_r_base_cases() {
        let l = sample_oper(2, 10);
        // r = 0 -> a_1(x)
        let d0 = delta_r(&l, 0).unwrap();
        assert!((&d0 - l.a(1)).norm_max() < 1e-14 * l.a(1).norm_max());
        // r = 1 -> a_1(x) a_1(q^-1 x) - a_2(x) a_0(q^-1 x)
        let d1 = delta_r(&l, 1).unwrap();
        let qi = cr(1.0) / l.q;
        let expect = &(l.a(1) * &l.a(1).scale_arg(qi)) - &(l.a(2) * &l.a(0).scale_arg(qi));
        assert!((&d1 - &expect).norm_max() <= 1e-12 * expect.norm_max());
    }

    #[test]
    fn delta_r_matches_dense_determinant() {
        let l = sample_oper(2, 11);
        let r = 3usize;
        let dr = delta_r(&l, r).unwrap();
        // dense (r+1)x(r+1) tridiagonal at sample points, then compare through
        // DFT interpolation on a circle
        let deg = dr.degree().unwrap();
        let nsamp = deg + 8;
        let radius = 1.1f64;
        let mut vals = Vec::new();
        let mut pts = Vec::new();
        for i in 0..nsamp {
            let th = std::f64::consts::TAU * (i as f64) / (nsamp as f64);
            let x = C64::from_polar(radius, th);
            let mut m = CMat::zeros(r + 1, r + 1);
            for row in 0..=r {
                let xr = x * l.q.powi(-(row as i32));
                m[(row, row)] = l.a(1).eval(xr);
                if row + 1 <= r {
                    m[(row, row + 1)] = l.a(2).eval(xr);
                }
                if row >= 1 {
                    m[(row, row - 1)] = l.a(0).eval(xr);
                }
            }
            pts.push(x);
            vals.push(m.det());
        }
        for (x, v) in pts.iter().zip(vals.iter()) {
            let got = dr.eval(*x);
            assert!(
                (got - v).norm() <= 1e-9 * (1.0 + v.norm()),
                "dense determinant mismatch at {x}"
            );
        }
    }

    #[test]
    fn a_product_matches_t_km_closed_form() {
        // Lemma: (A^(m))_{j,k} = (-1)^(k-1) t_k^(-j+m+1)(q^(-j+1) x)
        for n in 2..=4usize {
            let l = sample_oper(n, 20 + n as u64);
            let a = l.companion();
            let mut rng = crate::testkit::rng(200 + n as u64);
            for m in 0..=3usize {
                let x = crate::testkit::random_point(&mut rng, 0.8, 1.25);
                let p = match a_product(&a, m, x, 1e-12) {
                    Ok(p) => p,
                    Err(_) => continue,
                };
                for j in 1..=n {
                    for k in 1..=n {
                        let sign = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
                        let rk = t_km(&l, m as i64 - j as i64 + 1, k as i64);
                        let arg = x * l.q.powi(1 - j as i32);
                        let want = rk.eval(arg, 1e-12).unwrap() * C64::new(sign, 0.0);
                        let got = p[(j - 1, k - 1)];
                        assert!(
                            (got - want).norm() <= 1e-9 * (1.0 + want.norm()),
                            "n={n} m={m} j={j} k={k}"
                        );
                    }
                }
            }
        }
    }
}
