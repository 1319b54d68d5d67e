use crate::{C64, Error, Result};
use std::ops::{Add, Mul, Neg, Sub};

/// Dense univariate polynomial over complex doubles, coefficients stored
/// lowest degree first. The zero polynomial is the empty coefficient list;
/// construction trims exact trailing zeros so the leading coefficient of a
/// nonzero polynomial is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while let Some(c) = coeffs.last() {
            if c.norm() == 0.0 {
                coeffs.pop();
            } else {
                break;
            }
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial c * x^k.
    pub fn monomial(k: usize, c: C64) -> Self {
        let mut v = vec![C64::default(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn x() -> Self {
        Self::monomial(1, C64::new(1.0, 0.0))
    }

    /// leading * prod (x - r_i)
    pub fn from_roots(roots: &[C64], leading: C64) -> Self {
        let mut p = Self::constant(leading);
        for &r in roots {
            p = &p * &Self::new(vec![-r, C64::new(1.0, 0.0)]);
        }
        p
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<C64> {
        self.coeffs.last().copied()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: C64) -> C64 {
        let mut acc = C64::default();
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sum_k |c_k| |x|^k - the natural magnitude scale of an evaluation at x,
    /// used to make zero tests scale-invariant.
    pub fn eval_scale(&self, x: C64) -> f64 {
        let ax = x.norm();
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * ax + c.norm();
        }
        acc
    }

    pub fn norm_max(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Returns q with q(x) = p(c x); coefficient k is multiplied by c^k.
    pub fn scale_arg(&self, c: C64) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut ck = C64::new(1.0, 0.0);
        for &a in &self.coeffs {
            out.push(a * ck);
            ck *= c;
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, &c)| c * C64::from((k + 1) as f64))
                .collect(),
        )
    }

    pub fn mul_scalar(&self, c: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Drop trailing coefficients of magnitude <= eps.
    pub fn trim_eps(&self, eps: f64) -> Self {
        let mut v = self.coeffs.clone();
        while let Some(c) = v.last() {
            if c.norm() <= eps {
                v.pop();
            } else {
                break;
            }
        }
        Self::new(v)
    }

    /// Long division: self = q * d + r with deg r < deg d.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d
            .degree()
            .ok_or_else(|| Error::InvalidInput("division by the zero polynomial".into()))?;
        if self.is_zero() || self.degree().unwrap() < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lead = d.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let nq = rem.len() - dd;
        let mut quot = vec![C64::default(); nq];
        for k in (0..nq).rev() {
            let c = rem[k + dd] / lead;
            quot[k] = c;
            for j in 0..=dd {
                rem[k + j] -= c * d.coeffs[j];
            }
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Synthetic division by (x - s): returns (quotient, remainder = p(s)).
    pub fn divrem_linear(&self, s: C64) -> (Self, C64) {
        if self.coeffs.is_empty() {
            return (Self::zero(), C64::default());
        }
        let n = self.coeffs.len();
        let mut q = vec![C64::default(); n - 1];
        let mut acc = *self.coeffs.last().unwrap();
        for k in (0..n - 1).rev() {
            q[k] = acc;
            acc = acc * s + self.coeffs[k];
        }
        (Self::new(q), acc)
    }

    /// Largest m such that dividing by (x - s) m times leaves remainders below
    /// zero_tol * (evaluation scale) each time. Zero polynomial is an error in
    /// callers; here it returns 0.
    pub fn vanishing_order(&self, s: C64, zero_tol: f64) -> usize {
        let mut p = self.clone();
        let mut m = 0usize;
        while !p.is_zero() {
            let scale = p.eval_scale(s).max(1e-300);
            let (q, r) = p.divrem_linear(s);
            if r.norm() <= zero_tol * scale {
                m += 1;
                p = q;
            } else {
                break;
            }
        }
        m
    }

    /// Taylor coefficients of p at the point s (p(s+u) = sum_k t_k u^k),
    /// by repeated synthetic division.
    pub fn taylor_at(&self, s: C64) -> Vec<C64> {
        let mut p = self.clone();
        let mut out = Vec::with_capacity(self.coeffs.len());
        while !p.is_zero() {
            let (q, r) = p.divrem_linear(s);
            out.push(r);
            p = q;
        }
        if out.is_empty() {
            out.push(C64::default());
        }
        out
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = vec![C64::default(); n];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = self.coeff(k) + rhs.coeff(k);
        }
        Polynomial::new(v)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut v = vec![C64::default(); n];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = self.coeff(k) - rhs.coeff(k);
        }
        Polynomial::new(v)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut v = vec![C64::default(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Polynomial::new(v)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{c, cr};

    #[test]
    fn eval_trivia() {
        // x^2 + 1 at i is a root
        let p = Polynomial::new(vec![cr(1.0), cr(0.0), cr(1.0)]);
        assert!(p.eval(c(0.0, 1.0)).norm() < 1e-15);
        // zero polynomial evaluates to 0 anywhere
        assert_eq!(Polynomial::zero().eval(cr(7.0)), C64::default());
    }

    #[test]
    fn eval_matches_power_sum() {
        let mut rng = crate::testkit::rng(7);
        for _ in 0..20 {
            let p = crate::testkit::random_poly(&mut rng, 9, 1.0);
            let x = crate::testkit::random_point(&mut rng, 0.3, 2.0);
            let direct: C64 = p
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, &ck)| ck * x.powu(k as u32))
                .sum();
            assert!((p.eval(x) - direct).norm() <= 1e-12 * p.eval_scale(x).max(1.0));
        }
    }

    #[test]
    fn scale_arg_expansion() {
        // p = x^2 + x, c = 2 -> 4x^2 + 2x
        let p = Polynomial::new(vec![cr(0.0), cr(1.0), cr(1.0)]);
        let q = p.scale_arg(cr(2.0));
        assert_eq!(q.coeff(1), cr(2.0));
        assert_eq!(q.coeff(2), cr(4.0));
        // identity shift
        assert_eq!(p.scale_arg(cr(1.0)), p);
        // round trip
        let mut rng = crate::testkit::rng(3);
        let p = crate::testkit::random_poly(&mut rng, 7, 1.0);
        let cc = c(1.3, -0.4);
        let round = p.scale_arg(cc).scale_arg(cr(1.0) / cc);
        for k in 0..8 {
            assert!((round.coeff(k) - p.coeff(k)).norm() < 1e-12 * p.norm_max());
        }
    }

    #[test]
    fn from_roots_trivia() {
        let p = Polynomial::from_roots(&[cr(1.0), cr(-1.0)], cr(1.0));
        assert_eq!(p.coeffs(), &[cr(-1.0), cr(0.0), cr(1.0)]);
        let k = Polynomial::from_roots(&[], cr(3.0));
        assert_eq!(k.coeffs(), &[cr(3.0)]);
    }

    #[test]
    fn vanishing_orders() {
        let s = c(0.7, 0.4);
        let p = Polynomial::from_roots(&[s, s, s * 2.0], cr(1.0));
        assert_eq!(p.vanishing_order(s, 1e-9), 2);
        assert_eq!(p.vanishing_order(s * 2.0, 1e-9), 1);
        assert_eq!(p.vanishing_order(s * 3.0, 1e-9), 0);
    }

    #[test]
    fn vanishing_order_additivity() {
        let mut rng = crate::testkit::rng(11);
        for _ in 0..20 {
            let s = crate::testkit::random_point(&mut rng, 0.5, 1.5);
            let a = &crate::testkit::random_poly(&mut rng, 3, 1.0)
                * &Polynomial::from_roots(&[s], cr(1.0));
            let b = &crate::testkit::random_poly(&mut rng, 2, 1.0)
                * &Polynomial::from_roots(&[s, s], cr(1.0));
            let prod = &a * &b;
            assert_eq!(
                prod.vanishing_order(s, 1e-9),
                a.vanishing_order(s, 1e-9) + b.vanishing_order(s, 1e-9)
            );
        }
    }

    #[test]
    fn division_round_trip() {
        let mut rng = crate::testkit::rng(5);
        let a = crate::testkit::random_poly(&mut rng, 9, 1.0);
        let d = crate::testkit::random_poly(&mut rng, 4, 1.0);
        let (q, r) = a.div_rem(&d).unwrap();
        let back = &(&q * &d) + &r;
        for k in 0..10 {
            assert!((back.coeff(k) - a.coeff(k)).norm() < 1e-11);
        }
        assert!(r.degree().map_or(true, |dr| dr < 4));
    }
}
