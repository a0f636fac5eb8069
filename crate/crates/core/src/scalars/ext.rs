use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// An element `a + b·√ε` of Q(√ε) with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtScalar {
    a: BigRational,
    b: BigRational,
}

impl ExtScalar {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The element √ε.
    pub fn sqrt_eps() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::new(BigRational::from_integer(n), BigRational::zero())
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::new(q, BigRational::zero())
    }

    /// `an/ad + (bn/bd)√ε`.
    pub fn from_parts(an: i64, ad: i64, bn: i64, bd: i64) -> Self {
        Self::new(BigRational::new(an.into(), ad.into()), BigRational::new(bn.into(), bd.into()))
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugation √ε ↦ −√ε.
    pub fn conj(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone())
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::new(&self.a * q, &self.b * q)
    }

    /// `[a_num, a_den, b_num, b_den]` as decimal strings, reduced, positive denominators.
    pub fn to_tuple(&self) -> [String; 4] {
        [self.a.numer().to_string(), self.a.denom().to_string(), self.b.numer().to_string(), self.b.denom().to_string()]
    }

    pub fn from_tuple<S: AsRef<str>>(t: &[S]) -> Result<Self> {
        if t.len() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, found: t.len() });
        }
        let parse = |s: &S| -> Result<BigInt> {
            s.as_ref()
                .trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(alloc::format!("bad integer {:?}", s.as_ref())))
        };
        let (an, ad, bn, bd) = (parse(&t[0])?, parse(&t[1])?, parse(&t[2])?, parse(&t[3])?);
        if ad.is_zero() || bd.is_zero() {
            return Err(Error::Parse("zero denominator".to_string()));
        }
        Ok(Self::new(BigRational::new(an, ad), BigRational::new(bn, bd)))
    }
}

impl fmt::Debug for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}√ε", self.b)
        } else {
            write!(f, "{}+{}√ε", self.a, self.b)
        }
    }
}

impl Add for &ExtScalar {
    type Output = ExtScalar;
    fn add(self, o: &ExtScalar) -> ExtScalar {
        ExtScalar::new(&self.a + &o.a, &self.b + &o.b)
    }
}

impl Sub for &ExtScalar {
    type Output = ExtScalar;
    fn sub(self, o: &ExtScalar) -> ExtScalar {
        ExtScalar::new(&self.a - &o.a, &self.b - &o.b)
    }
}

impl Add for ExtScalar {
    type Output = ExtScalar;
    fn add(self, o: ExtScalar) -> ExtScalar {
        &self + &o
    }
}

impl Sub for ExtScalar {
    type Output = ExtScalar;
    fn sub(self, o: ExtScalar) -> ExtScalar {
        &self - &o
    }
}

impl AddAssign<&ExtScalar> for ExtScalar {
    fn add_assign(&mut self, o: &ExtScalar) {
        self.a += &o.a;
        self.b += &o.b;
    }
}

impl SubAssign<&ExtScalar> for ExtScalar {
    fn sub_assign(&mut self, o: &ExtScalar) {
        self.a -= &o.a;
        self.b -= &o.b;
    }
}

impl Neg for ExtScalar {
    type Output = ExtScalar;
    fn neg(self) -> ExtScalar {
        ExtScalar::new(-self.a, -self.b)
    }
}

impl Neg for &ExtScalar {
    type Output = ExtScalar;
    fn neg(self) -> ExtScalar {
        ExtScalar::new(-self.a.clone(), -self.b.clone())
    }
}
