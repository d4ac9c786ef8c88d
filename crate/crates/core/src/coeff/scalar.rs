//! Rational functions in the chart coordinates, kept in canonical form.

use super::poly::Poly;
use crate::Error;
use num::{BigRational, One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An element of the coefficient field: a reduced fraction of
/// multivariate polynomials with rational coefficients.
///
/// Invariants: gcd(num, den) is constant, den is monic under graded-lex
/// and nonzero. Equal values therefore have identical representations and
/// `PartialEq` decides field equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    /// Builds a scalar from a fraction, reducing to canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<Scalar, Error> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Poly, den: Poly) -> Scalar {
        if num.is_zero() {
            return Scalar {
                num,
                den: Poly::one(den.nvars()),
            };
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = Poly::gcd(&num, &den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
            }
        };
        // monic denominator
        let lc = den.leading().unwrap().1.clone();
        let inv = BigRational::one() / lc;
        Scalar {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn from_poly(p: Poly) -> Scalar {
        let n = p.nvars();
        Scalar {
            num: p,
            den: Poly::one(n),
        }
    }

    pub fn zero(nvars: usize) -> Scalar {
        Scalar::from_poly(Poly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Scalar {
        Scalar::from_poly(Poly::one(nvars))
    }

    pub fn from_int(nvars: usize, k: i64) -> Scalar {
        Scalar::from_poly(Poly::from_int(nvars, k))
    }

    pub fn from_rational(nvars: usize, r: BigRational) -> Scalar {
        Scalar::from_poly(Poly::constant(nvars, r))
    }

    /// The chart coordinate x_i.
    pub fn var(nvars: usize, i: usize) -> Scalar {
        Scalar::from_poly(Poly::var(nvars, i))
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num == self.den
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, Error> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn inverse(&self) -> Result<Scalar, Error> {
        Scalar::one(self.nvars()).div(self)
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut out = Scalar::one(self.nvars());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Quotient-rule partial derivative with respect to coordinate `i`.
    pub fn partial(&self, i: usize) -> Scalar {
        let n = self.num.partial(i).mul(&self.den);
        let d = self.num.mul(&self.den.partial(i));
        Self::reduced(n.sub(&d), self.den.mul(&self.den))
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational, Error> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        Ok(self.num.eval(point) / d)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.den == rhs.den {
            return Scalar::reduced(self.num.add(&rhs.num), self.den.clone());
        }
        Scalar::reduced(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero(self.nvars());
        }
        Scalar::reduced(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.as_constant().map(|c| c.is_one()) == Some(true) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Scalar {
        Scalar::var(1, 0)
    }

    #[test]
    fn field_arithmetic() {
        // x + (1 - x) = 1
        let one = Scalar::one(1);
        assert_eq!(&x() + &(&one - &x()), one);
        // (x^2 - 1)/(x - 1) = x + 1
        let q = (&(&x() * &x()) - &Scalar::one(1))
            .div(&(&x() - &Scalar::one(1)))
            .unwrap();
        assert_eq!(q, &x() + &Scalar::one(1));
        // (1/x) * x = 1
        let inv = x().inverse().unwrap();
        assert_eq!(&inv * &x(), Scalar::one(1));
    }

    #[test]
    fn partial_derivatives() {
        // d/dx x^2 = 2x
        assert_eq!((&x() * &x()).partial(0), &Scalar::from_int(1, 2) * &x());
        // d/dx 1/x = -1/x^2
        let inv = x().inverse().unwrap();
        let expect = Scalar::from_int(1, -1).div(&(&x() * &x())).unwrap();
        assert_eq!(inv.partial(0), expect);
        // d/dx y = 0 in two variables
        let y = Scalar::var(2, 1);
        assert!(y.partial(0).is_zero());
    }

    #[test]
    fn evaluation() {
        let p = &(&x() * &x()) + &Scalar::one(1);
        let two = BigRational::from_integer(2.into());
        assert_eq!(
            p.evaluate(&[two]).unwrap(),
            BigRational::from_integer(5.into())
        );
        let inv = x().inverse().unwrap();
        assert!(matches!(
            inv.evaluate(&[BigRational::zero()]),
            Err(Error::PoleAtPoint)
        ));
        // canonical form forces cancellation of (x^2-1)/(x-1) at x=1
        let q = (&(&x() * &x()) - &Scalar::one(1))
            .div(&(&x() - &Scalar::one(1)))
            .unwrap();
        assert_eq!(
            q.evaluate(&[BigRational::one()]).unwrap(),
            BigRational::from_integer(2.into())
        );
    }

    #[test]
    fn denominator_is_monic() {
        // 1 / (2x + 2) has monic denominator x + 1
        let two = Scalar::from_int(1, 2);
        let den = &(&two * &x()) + &two;
        let s = Scalar::one(1).div(&den).unwrap();
        assert_eq!(s.denominator().leading().unwrap().1, &BigRational::one());
    }
}
