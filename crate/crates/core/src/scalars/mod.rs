//! Exact arithmetic in Q(√ε) ⊂ Q_{p²} and the residue field F_{p²}.

mod ext;
mod fq;
pub mod rational;

pub use ext::ExtScalar;
pub use fq::{Fq2, FqScalar};

use core::cmp::Ordering;
use core::fmt;

use num_rational::BigRational;

use crate::error::{Error, Result};

/// A p-adic valuation, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// `self ≥ n`, with +∞ ≥ everything.
    pub fn at_least(self, n: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= n,
            Valuation::Infinity => true,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinity) => Ordering::Less,
            (Valuation::Infinity, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("∞"),
        }
    }
}

/// The prime p and the non-residue ε defining Q(√ε).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicContext {
    p: u64,
    eps: i64,
}

impl PadicContext {
    pub fn new(p: u64, eps: i64) -> Result<Self> {
        if p == 2 || !rational::is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if p > u32::MAX as u64 || rational::is_square_mod(eps, p) {
            return Err(Error::EpsilonNotNonResidue { p, eps });
        }
        Ok(Self { p, eps })
    }

    /// Uses the smallest positive non-residue modulo p.
    pub fn with_default_eps(p: u64) -> Result<Self> {
        if p == 2 || !rational::is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let eps = (2..p as i64).find(|&e| !rational::is_square_mod(e, p)).ok_or(Error::NotOddPrime(p))?;
        Self::new(p, eps)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn eps(&self) -> i64 {
        self.eps
    }

    pub fn residue_field(&self) -> Fq2 {
        Fq2::new(self.p as u32, self.eps.rem_euclid(self.p as i64) as u32)
    }

    pub fn mul(&self, x: &ExtScalar, y: &ExtScalar) -> ExtScalar {
        let eps = BigRational::from_integer(self.eps.into());
        let a = x.a() * y.a() + &eps * x.b() * y.b();
        let b = x.a() * y.b() + x.b() * y.a();
        ExtScalar::new(a, b)
    }

    /// `a² − ε b²`.
    pub fn norm(&self, x: &ExtScalar) -> BigRational {
        let eps = BigRational::from_integer(self.eps.into());
        x.a() * x.a() - eps * x.b() * x.b()
    }

    pub fn inv(&self, x: &ExtScalar) -> Option<ExtScalar> {
        if x.is_zero() {
            return None;
        }
        let n = self.norm(x);
        Some(ExtScalar::new(x.a() / &n, -(x.b() / &n)))
    }

    pub fn div(&self, x: &ExtScalar, y: &ExtScalar) -> Option<ExtScalar> {
        self.inv(y).map(|yi| self.mul(x, &yi))
    }

    pub fn valuation(&self, x: &ExtScalar) -> Valuation {
        let va = rational::vp(x.a(), self.p);
        let vb = rational::vp(x.b(), self.p);
        match (va, vb) {
            (None, None) => Valuation::Infinity,
            (Some(a), None) => Valuation::Finite(a),
            (None, Some(b)) => Valuation::Finite(b),
            (Some(a), Some(b)) => Valuation::Finite(a.min(b)),
        }
    }

    /// Residue map Z_{p²} → F_{p²}.
    pub fn reduce(&self, x: &ExtScalar) -> Result<FqScalar> {
        if !self.valuation(x).at_least(0) {
            return Err(Error::NegativeValuation);
        }
        let p = self.p;
        Ok(FqScalar::new(rational::residue(x.a(), p) as u32, rational::residue(x.b(), p) as u32))
    }

    /// The scalar p^e.
    pub fn p_pow(&self, e: i64) -> ExtScalar {
        ExtScalar::from_rational(rational::p_power(self.p, e))
    }

    pub fn is_integral(&self, x: &ExtScalar) -> bool {
        self.valuation(x).at_least(0)
    }

    pub fn is_unit(&self, x: &ExtScalar) -> bool {
        self.valuation(x) == Valuation::Finite(0)
    }
}
