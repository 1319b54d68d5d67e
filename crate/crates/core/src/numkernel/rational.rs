use super::Polynomial;
use crate::{C64, Error, Result};
use std::ops::{Add, Mul, Neg, Sub};

/// Quotient of two polynomials. Never reduced to lowest terms; common factors
/// are handled through vanishing-order comparison, which is what the
/// holomorphy criteria need.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput(
                "rational function with zero denominator".into(),
            ));
        }
        Ok(Self { num, den })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Self {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Guarded evaluation; errors when the denominator vanishes at x relative
    /// to its evaluation scale.
    pub fn eval(&self, x: C64, zero_tol: f64) -> Result<C64> {
        let d = self.den.eval(x);
        if d.norm() <= zero_tol * self.den.eval_scale(x).max(1e-300) {
            return Err(Error::Pole(format!("denominator vanishes at {x}")));
        }
        Ok(self.num.eval(x) / d)
    }

    /// r(cx)
    pub fn scale_arg(&self, c: C64) -> Self {
        Self {
            num: self.num.scale_arg(c),
            den: self.den.scale_arg(c),
        }
    }

    pub fn mul_poly(&self, p: &Polynomial) -> Self {
        Self {
            num: &self.num * p,
            den: self.den.clone(),
        }
    }

    pub fn mul_scalar(&self, c: C64) -> Self {
        Self {
            num: self.num.mul_scalar(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// Vanishing order at s: ord(num) - ord(den). Positive means a zero,
    /// negative a pole, after numerical cancellation of common factors.
    pub fn order_at(&self, s: C64, zero_tol: f64) -> i64 {
        self.num.vanishing_order(s, zero_tol) as i64 - self.den.vanishing_order(s, zero_tol) as i64
    }

    /// True iff the function is holomorphic at s (zero order of the numerator
    /// at least that of the denominator).
    pub fn holomorphic_at(&self, s: C64, zero_tol: f64) -> Result<bool> {
        if self.den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        if self.num.is_zero() {
            return Ok(true);
        }
        Ok(self.order_at(s, zero_tol) >= 0)
    }

    /// Polynomial division of num by den. Returns the quotient and the
    /// relative remainder norm; a remainder near zero certifies that the
    /// rational function was in fact a polynomial.
    pub fn clear_to_poly(&self) -> Result<(Polynomial, f64)> {
        let (q, r) = self.num.div_rem(&self.den)?;
        let scale = self.num.norm_max().max(1e-300);
        Ok((q, r.norm_max() / scale))
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        }
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}
