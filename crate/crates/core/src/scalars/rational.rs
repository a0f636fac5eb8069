//! p-adic helpers for exact rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a rational, `None` for zero.
pub fn vp(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    Some(vp_int(q.numer(), p) as i64 - vp_int(q.denom(), p) as i64)
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub(crate) fn bigint_mod(n: &BigInt, m: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits")
}

/// Residue of a p-integral rational modulo `m = p^k`.
pub(crate) fn residue(q: &BigRational, m: u64) -> u64 {
    if m == 1 || q.is_zero() {
        return 0;
    }
    let n = bigint_mod(q.numer(), m);
    let d = bigint_mod(q.denom(), m);
    let di = mod_inverse(d, m).expect("denominator is a p-adic unit");
    ((n as u128 * di as u128) % m as u128) as u64
}

/// Residue in [0, m) of a rational whose denominator is prime to m.
pub fn residue_big(q: &BigRational, m: &BigInt) -> BigInt {
    let n = q.numer().mod_floor(m);
    let d = q.denom().mod_floor(m);
    let g = d.extended_gcd(m);
    debug_assert!(g.gcd.is_one());
    (n * g.x).mod_floor(m)
}

pub(crate) fn p_power(p: u64, e: i64) -> BigRational {
    let pb = BigInt::from(p);
    if e >= 0 {
        BigRational::from_integer(num_traits::pow(pb, e as usize))
    } else {
        BigRational::new(BigInt::one(), num_traits::pow(pb, (-e) as usize))
    }
}

pub(crate) fn is_square_mod(a: i64, p: u64) -> bool {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return true;
    }
    mod_pow(a, (p - 1) / 2, p) == 1
}

pub(crate) fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
