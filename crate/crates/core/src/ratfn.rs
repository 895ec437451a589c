//! Exact rationals and rational functions of one variable `e`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::ModelError;

pub type Rational = BigRational;

/// Always `p/q`, including integers (`1/1`, `0/1`).
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => text.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Polynomial in `e`, coefficients from the constant term up, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rational> {
        self.0.last()
    }

    /// Index of the lowest nonzero coefficient.
    pub fn order_at_zero(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let z = Rational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&z) + other.0.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.0.iter().map(|a| a * c).collect())
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.lead().unwrap().clone();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.0.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Poly {
        match self.lead() {
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x.monic()
    }

    pub fn eval(&self, e: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * e + c;
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", fmt_rational(c))?,
                1 => write!(f, "{}*e", fmt_rational(c))?,
                _ => write!(f, "{}*e^{i}", fmt_rational(c))?,
            }
        }
        Ok(())
    }
}

/// `num / den`, reduced by the polynomial gcd, with a monic denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ModelError> {
        if den.is_zero() {
            return Err(ModelError::ZeroMass);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RationalFn { num, den: Poly::constant(Rational::one()) };
        }
        let (num, den) = if den.degree() == Some(0) || num.degree() == Some(0) {
            (num, den)
        } else {
            let g = Poly::gcd(&num, &den);
            if g.degree() == Some(0) {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let l = den.lead().expect("nonzero").recip();
        RationalFn { num: num.scale(&l), den: den.scale(&l) }
    }

    pub fn constant(c: Rational) -> Self {
        RationalFn { num: Poly::constant(c), den: Poly::constant(Rational::one()) }
    }

    pub fn poly(p: Poly) -> Self {
        RationalFn { num: p, den: Poly::constant(Rational::one()) }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        if self.den == o.den {
            return Self::reduced(self.num.add(&o.num), self.den.clone());
        }
        Self::reduced(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn sub(&self, o: &RationalFn) -> RationalFn {
        self.add(&RationalFn { num: o.num.neg(), den: o.den.clone() })
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        Self::reduced(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &RationalFn) -> Result<RationalFn, ModelError> {
        if o.is_zero() {
            return Err(ModelError::ZeroMass);
        }
        Ok(Self::reduced(self.num.mul(&o.den), self.den.mul(&o.num)))
    }

    /// Value at `e`; `None` at a pole.
    pub fn eval(&self, e: &Rational) -> Option<Rational> {
        let d = self.den.eval(e);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(e) / d)
        }
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// Limit as `e → 0+`: ratio of the lowest-order coefficients.
pub fn limit_at_zero(r: &RationalFn) -> Result<Rational, ModelError> {
    let Some(vn) = r.num.order_at_zero() else {
        return Ok(Rational::zero());
    };
    let vd = r.den.order_at_zero().expect("nonzero denominator");
    if vn > vd {
        Ok(Rational::zero())
    } else if vn == vd {
        Ok(&r.num.coeffs()[vn] / &r.den.coeffs()[vd])
    } else {
        Err(ModelError::Unbounded)
    }
}

pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[(i64, i64)]) -> Poly {
        Poly::new(c.iter().map(|&(n, d)| rational(n, d)).collect())
    }

    #[test]
    fn rational_text() {
        assert_eq!(fmt_rational(&rational(2, 10)), "1/5");
        assert_eq!(fmt_rational(&Rational::one()), "1/1");
        assert_eq!(fmt_rational(&Rational::zero()), "0/1");
        assert_eq!(parse_rational("3/10"), Some(rational(3, 10)));
        assert_eq!(parse_rational(" 1 "), Some(Rational::one()));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn poly_division_and_gcd() {
        // (e+1)(e+2) / (e+1) = e+2
        let a = p(&[(2, 1), (3, 1), (1, 1)]);
        let b = p(&[(1, 1), (1, 1)]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, p(&[(2, 1), (1, 1)]));
        assert!(r.is_zero());
        assert_eq!(Poly::gcd(&a, &p(&[(3, 1), (3, 1)])), b);
        assert_eq!(a.eval(&rational(1, 1)), rational(6, 1));
    }

    #[test]
    fn reduction_is_canonical() {
        let r = RationalFn::new(p(&[(0, 1), (1, 4)]), p(&[(0, 1), (1, 2)])).unwrap();
        assert_eq!(r, RationalFn::constant(rational(1, 2)));
        assert!(RationalFn::new(p(&[(1, 1)]), Poly::zero()).is_err());
        let x = RationalFn::new(p(&[(1, 1), (1, 1)]), p(&[(2, 1)])).unwrap();
        let y = x.mul(&RationalFn::new(p(&[(2, 1)]), p(&[(1, 1), (1, 1)])).unwrap());
        assert_eq!(y, RationalFn::constant(Rational::one()));
        assert_eq!(x.sub(&x), RationalFn::constant(Rational::zero()));
    }

    #[test]
    fn limits() {
        let quarter_over_half = RationalFn::new(p(&[(0, 1), (1, 4)]), p(&[(0, 1), (1, 2)])).unwrap();
        assert_eq!(limit_at_zero(&quarter_over_half).unwrap(), rational(1, 2));
        let e_over = RationalFn::new(p(&[(0, 1), (1, 1)]), p(&[(1, 1), (1, 1)])).unwrap();
        assert_eq!(limit_at_zero(&e_over).unwrap(), Rational::zero());
        let third = RationalFn::new(p(&[(0, 1), (1, 1), (2, 1)]), p(&[(0, 1), (3, 1)])).unwrap();
        assert_eq!(limit_at_zero(&third).unwrap(), rational(1, 3));
        let bad = RationalFn::new(p(&[(1, 1)]), p(&[(0, 1), (1, 1)])).unwrap();
        assert_eq!(limit_at_zero(&bad), Err(ModelError::Unbounded));
    }
}
