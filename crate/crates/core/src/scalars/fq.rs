use core::fmt;

/// An element `a + b·δ̄` of F_{p²}, where δ̄² = ε̄.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FqScalar {
    pub a: u32,
    pub b: u32,
}

impl FqScalar {
    pub const ZERO: FqScalar = FqScalar { a: 0, b: 0 };
    pub const ONE: FqScalar = FqScalar { a: 1, b: 0 };

    pub fn new(a: u32, b: u32) -> Self {
        Self { a, b }
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }
}

impl fmt::Debug for FqScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// The residue field F_{p²} = F_p(δ̄).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fq2 {
    p: u32,
    eps: u32,
}

impl Fq2 {
    pub(crate) fn new(p: u32, eps: u32) -> Self {
        Self { p, eps }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn eps(&self) -> u32 {
        self.eps
    }

    pub fn order(&self) -> usize {
        (self.p as usize) * (self.p as usize)
    }

    pub fn elem(&self, a: i64, b: i64) -> FqScalar {
        let p = self.p as i64;
        FqScalar::new(a.rem_euclid(p) as u32, b.rem_euclid(p) as u32)
    }

    /// Enumeration order used everywhere: index `a + p·b`.
    pub fn from_index(&self, i: usize) -> FqScalar {
        let p = self.p as usize;
        FqScalar::new((i % p) as u32, (i / p) as u32)
    }

    pub fn index(&self, x: FqScalar) -> usize {
        x.a as usize + self.p as usize * x.b as usize
    }

    pub fn elements(&self) -> impl Iterator<Item = FqScalar> + '_ {
        (0..self.order()).map(move |i| self.from_index(i))
    }

    #[inline]
    pub fn add(&self, x: FqScalar, y: FqScalar) -> FqScalar {
        let p = self.p;
        FqScalar::new((x.a + y.a) % p, (x.b + y.b) % p)
    }

    #[inline]
    pub fn sub(&self, x: FqScalar, y: FqScalar) -> FqScalar {
        let p = self.p;
        FqScalar::new((x.a + p - y.a) % p, (x.b + p - y.b) % p)
    }

    #[inline]
    pub fn neg(&self, x: FqScalar) -> FqScalar {
        let p = self.p;
        FqScalar::new((p - x.a) % p, (p - x.b) % p)
    }

    #[inline]
    pub fn mul(&self, x: FqScalar, y: FqScalar) -> FqScalar {
        let p = self.p as u64;
        let (a, b, c, d) = (x.a as u64, x.b as u64, y.a as u64, y.b as u64);
        let re = (a * c + (self.eps as u64) * (b * d % p)) % p;
        let im = (a * d + b * c) % p;
        FqScalar::new(re as u32, im as u32)
    }

    #[inline]
    pub fn conj(&self, x: FqScalar) -> FqScalar {
        FqScalar::new(x.a, (self.p - x.b) % self.p)
    }

    /// `x·conj(x)`, an element of F_p.
    pub fn norm(&self, x: FqScalar) -> u32 {
        self.mul(x, self.conj(x)).a
    }

    pub fn inv(&self, x: FqScalar) -> Option<FqScalar> {
        if x.is_zero() {
            return None;
        }
        let n = self.norm(x) as u64;
        let ni = crate::scalars::rational::mod_pow(n, self.p as u64 - 2, self.p as u64) as u32;
        Some(self.mul(self.conj(x), FqScalar::new(ni, 0)))
    }

    pub fn pow(&self, x: FqScalar, mut e: u64) -> FqScalar {
        let mut r = FqScalar::ONE;
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn frobenius(&self, x: FqScalar) -> FqScalar {
        self.pow(x, self.p as u64)
    }

    /// Some λ with λ·conj(λ) = c for c ∈ F_p^×.
    pub fn norm_preimage(&self, c: u32) -> FqScalar {
        self.elements().find(|&l| !l.is_zero() && self.norm(l) == c % self.p).expect("norm map is surjective")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        for (p, e) in [(3u32, 2u32), (5, 2), (7, 3)] {
            let f = Fq2::new(p, e);
            for x in f.elements() {
                assert_eq!(f.frobenius(x), f.conj(x));
                if let Some(xi) = f.inv(x) {
                    assert_eq!(f.mul(x, xi), FqScalar::ONE);
                } else {
                    assert!(x.is_zero());
                }
                for y in f.elements() {
                    assert_eq!(f.mul(x, y), f.mul(y, x));
                    assert_eq!(f.conj(f.mul(x, y)), f.mul(f.conj(x), f.conj(y)));
                }
            }
        }
    }
}
