//! Arithmetic in Z_{p²}/p^K and echelon/Smith reduction of submodules of (Z_{p²}/p^K)ⁿ.
//!
//! A full-rank lattice M ⊆ Z_{p²}ⁿ with p^K·Z_{p²}ⁿ ⊆ M is determined by its image modulo p^K,
//! so every routine here is exact as long as the caller supplies such a K.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalars::{rational, ExtScalar};

/// `a + b√ε` with integer coordinates, usually reduced modulo p^K.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Z2 {
    pub a: u64,
    pub b: u64,
}

impl Z2 {
    pub const ZERO: Z2 = Z2 { a: 0, b: 0 };

    pub fn new(a: u64, b: u64) -> Self {
        Self { a, b }
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }
}

/// Largest K with p^K ≤ 2^62.
pub fn max_precision(p: u64) -> u32 {
    let mut k = 0;
    let mut x: u128 = 1;
    while x * p as u128 <= 1u128 << 62 {
        x *= p as u128;
        k += 1;
    }
    k
}

#[derive(Clone, Debug)]
pub struct Ring {
    p: u64,
    eps: u64,
    k: u32,
    q: u64,
    pows: [u64; 64],
}

impl Ring {
    pub fn new(p: u64, eps: i64, k: u32) -> Result<Self> {
        let max = max_precision(p);
        if k > max {
            return Err(Error::PrecisionExceeded { needed: k, max });
        }
        let mut pows = [0u64; 64];
        let mut x = 1u64;
        for i in 0..=k {
            pows[i as usize] = x;
            if i < k {
                x *= p;
            }
        }
        let q = pows[k as usize];
        Ok(Self { p, eps: eps.rem_euclid(q as i64) as u64, k, q, pows })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// p^e for e ≤ K.
    pub fn pow(&self, e: u32) -> u64 {
        self.pows[e as usize]
    }

    #[inline]
    pub fn reduce(&self, x: Z2) -> Z2 {
        Z2::new(x.a % self.q, x.b % self.q)
    }

    #[inline]
    pub fn add(&self, x: Z2, y: Z2) -> Z2 {
        let q = self.q;
        Z2::new((x.a + y.a) % q, (x.b + y.b) % q)
    }

    #[inline]
    pub fn sub(&self, x: Z2, y: Z2) -> Z2 {
        let q = self.q;
        Z2::new((x.a % q + q - y.a % q) % q, (x.b % q + q - y.b % q) % q)
    }

    #[inline]
    pub fn neg(&self, x: Z2) -> Z2 {
        self.sub(Z2::ZERO, x)
    }

    #[inline]
    pub fn mul(&self, x: Z2, y: Z2) -> Z2 {
        if self.q < 1 << 31 {
            let q = self.q;
            let (a, b, c, d) = (x.a % q, x.b % q, y.a % q, y.b % q);
            let re = (a * c % q + self.eps * (b * d % q)) % q;
            let im = (a * d + b * c) % q;
            return Z2::new(re, im);
        }
        let q = self.q as u128;
        let (a, b, c, d) = (x.a as u128, x.b as u128, y.a as u128, y.b as u128);
        let bd = b * d % q;
        let re = (a * c % q + self.eps as u128 * bd) % q;
        let im = (a * d % q + b * c % q) % q;
        Z2::new(re as u64, im as u64)
    }

    #[inline]
    pub fn conj(&self, x: Z2) -> Z2 {
        Z2::new(x.a % self.q, (self.q - x.b % self.q) % self.q)
    }

    /// `x - z·y`.
    #[inline]
    pub fn sub_mul(&self, x: Z2, z: Z2, y: Z2) -> Z2 {
        self.sub(x, self.mul(z, y))
    }

    fn vp(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.k;
        }
        let mut v = 0;
        while a.is_multiple_of(self.p) && v < self.k {
            a /= self.p;
            v += 1;
        }
        v
    }

    /// Valuation of the integer representative, capped at K.
    pub fn val(&self, x: Z2) -> u32 {
        self.vp(x.a).min(self.vp(x.b))
    }

    /// Exact quotient of the representative by p^e (requires val ≥ e).
    pub fn div_pow(&self, x: Z2, e: u32) -> Z2 {
        let d = self.pows[e as usize];
        Z2::new(x.a / d, x.b / d)
    }

    /// Representative modulo p^e with coordinates in [0, p^e).
    pub fn rep(&self, x: Z2, e: u32) -> Z2 {
        let d = self.pows[e as usize];
        Z2::new(x.a % d, x.b % d)
    }

    /// Inverse of a p-adic unit modulo p^K.
    pub fn unit_inv(&self, x: Z2) -> Z2 {
        if self.q == 1 {
            return Z2::ZERO;
        }
        let q = self.q as u128;
        let (a, b) = (x.a as u128 % q, x.b as u128 % q);
        let n = (a * a % q + q - self.eps as u128 * (b * b % q) % q) % q;
        let ni = rational::mod_inverse(n as u64, self.q).expect("unit") as u128;
        Z2::new((a * ni % q) as u64, ((q - b) % q * ni % q) as u64)
    }

    /// Image of a p-integral exact scalar.
    pub fn from_ext(&self, x: &ExtScalar) -> Z2 {
        Z2::new(rational::residue(x.a(), self.q), rational::residue(x.b(), self.q))
    }

    pub fn from_int(&self, n: i64) -> Z2 {
        Z2::new(n.rem_euclid(self.q as i64) as u64, 0)
    }
}

/// Canonical column echelon form of the module spanned by `gens` plus p^K·Z_{p²}ⁿ.
/// Returns lower-triangular columns (column t has its pivot p^{e_t} in row t) and exponents.
pub fn hnf(ring: &Ring, n: usize, gens: &[Vec<Z2>]) -> (Vec<Vec<Z2>>, Vec<u32>) {
    let k = ring.precision();
    let mut active: Vec<Vec<Z2>> = gens
        .iter()
        .map(|g| g.iter().map(|&x| ring.reduce(x)).collect::<Vec<_>>())
        .filter(|g: &Vec<Z2>| g.iter().any(|x| !x.is_zero()))
        .collect();
    let mut out: Vec<Vec<Z2>> = Vec::with_capacity(n);
    let mut exps = Vec::with_capacity(n);
    for row in 0..n {
        let mut best: Option<(u32, usize)> = None;
        for (j, c) in active.iter().enumerate() {
            let v = ring.val(c[row]);
            if v < k && best.is_none_or(|(bv, _)| v < bv) {
                best = Some((v, j));
                if v == 0 {
                    break;
                }
            }
        }
        let Some((e, j)) = best else {
            let mut col = vec![Z2::ZERO; n];
            col[row] = Z2::new(ring.pow(k), 0);
            out.push(col);
            exps.push(k);
            continue;
        };
        let mut piv = active.swap_remove(j);
        let w = ring.unit_inv(ring.div_pow(piv[row], e));
        for x in piv[row..].iter_mut() {
            *x = ring.mul(*x, w);
        }
        piv[row] = Z2::new(ring.pow(e), 0);
        for c in active.iter_mut() {
            if c[row].is_zero() {
                continue;
            }
            let z = ring.div_pow(c[row], e);
            c[row] = Z2::ZERO;
            for i in row + 1..n {
                if !piv[i].is_zero() {
                    c[i] = ring.sub_mul(c[i], z, piv[i]);
                }
            }
        }
        if e > 0 {
            let s = Z2::new(ring.pow(k - e), 0);
            let mut sat = vec![Z2::ZERO; n];
            for i in row + 1..n {
                sat[i] = ring.mul(piv[i], s);
            }
            active.push(sat);
        }
        active.retain(|c| c.iter().any(|x| !x.is_zero()));
        out.push(piv);
        exps.push(e);
    }
    for t in 0..n {
        let e = exps[t];
        if e == k {
            continue;
        }
        let (head, tail) = out.split_at_mut(t);
        let pc = &tail[0];
        for col in head.iter_mut() {
            let y = col[t];
            let r = ring.rep(y, e);
            if r == y {
                continue;
            }
            let d = ring.pow(e);
            let z = Z2::new((y.a - r.a) / d, (y.b - r.b) / d);
            col[t] = r;
            for i in t + 1..n {
                if !pc[i].is_zero() {
                    col[i] = ring.sub_mul(col[i], z, pc[i]);
                }
            }
        }
    }
    (out, exps)
}

/// Smith reduction modulo p^K of a square row-major matrix. Returns the exponent at each
/// diagonal position (K for vanishing ones) and, if requested, the accumulated row transform R
/// with R·M·C diagonal.
pub fn smith(ring: &Ring, m: &[Vec<Z2>], track: bool) -> (Vec<u32>, Option<Vec<Vec<Z2>>>) {
    let n = m.len();
    let k = ring.precision();
    let mut a: Vec<Vec<Z2>> = m.iter().map(|r| r.iter().map(|&x| ring.reduce(x)).collect()).collect();
    let mut rt: Option<Vec<Vec<Z2>>> = track
        .then(|| (0..n).map(|i| (0..n).map(|j| if i == j { ring.from_int(1) } else { Z2::ZERO }).collect()).collect());
    let mut exps = Vec::with_capacity(n);
    for r in 0..n {
        let mut best: Option<(u32, usize, usize)> = None;
        'search: for i in r..n {
            for j in r..n {
                let v = ring.val(a[i][j]);
                if v < k && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                    if v == 0 {
                        break 'search;
                    }
                }
            }
        }
        let Some((d, pi, pj)) = best else {
            exps.extend(std::iter::repeat_n(k, n - r));
            break;
        };
        a.swap(r, pi);
        if let Some(rt) = rt.as_mut() {
            rt.swap(r, pi);
        }
        if pj != r {
            for row in a.iter_mut() {
                row.swap(r, pj);
            }
        }
        let u = ring.unit_inv(ring.div_pow(a[r][r], d));
        for x in a[r].iter_mut() {
            *x = ring.mul(*x, u);
        }
        if let Some(rt) = rt.as_mut() {
            for x in rt[r].iter_mut() {
                *x = ring.mul(*x, u);
            }
        }
        for i in r + 1..n {
            if a[i][r].is_zero() {
                continue;
            }
            let f = ring.div_pow(a[i][r], d);
            let (top, bot) = a.split_at_mut(i);
            for j in r..n {
                bot[0][j] = ring.sub_mul(bot[0][j], f, top[r][j]);
            }
            if let Some(rt) = rt.as_mut() {
                let (top, bot) = rt.split_at_mut(i);
                for j in 0..n {
                    bot[0][j] = ring.sub_mul(bot[0][j], f, top[r][j]);
                }
            }
        }
        for j in r + 1..n {
            a[r][j] = Z2::ZERO;
        }
        exps.push(d);
    }
    (exps, rt)
}

/// Rank over F_{p²} of a matrix given modulo p (or any higher precision).
pub fn rank_mod_p(ring: &Ring, m: &[Vec<Z2>]) -> usize {
    let (exps, _) = smith(&reduce_ring_to(ring, 1), m, false);
    exps.iter().filter(|&&e| e == 0).count()
}

/// The same ring structure at lower precision.
pub fn reduce_ring_to(ring: &Ring, k: u32) -> Ring {
    assert!(k <= ring.k, "lower precision fits");
    let q = ring.pows[k as usize];
    Ring { p: ring.p, eps: ring.eps % q, k, q, pows: ring.pows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_arith() {
        let r = Ring::new(3, 2, 3).unwrap();
        let x = Z2::new(1, 1);
        let xi = r.unit_inv(x);
        assert_eq!(r.mul(x, xi), Z2::new(1, 0));
        assert_eq!(r.val(Z2::new(9, 18)), 2);
        assert_eq!(r.val(Z2::ZERO), 3);
        assert_eq!(max_precision(3), 39);
        assert!(Ring::new(3, 2, 40).is_err());
    }

    #[test]
    fn hnf_small() {
        let r = Ring::new(3, 2, 4).unwrap();
        // columns (3, 1) and (1, 0) span Z².
        let (cols, exps) = hnf(&r, 2, &[vec![Z2::new(3, 0), Z2::new(1, 0)], vec![Z2::new(1, 0), Z2::ZERO]]);
        assert_eq!(exps, vec![0, 0]);
        assert_eq!(cols[0], vec![Z2::new(1, 0), Z2::ZERO]);
        // columns (1, 1) and (0, 3).
        let (cols, exps) = hnf(&r, 2, &[vec![Z2::new(1, 0), Z2::new(4, 0)], vec![Z2::ZERO, Z2::new(3, 0)]]);
        assert_eq!(exps, vec![0, 1]);
        assert_eq!(cols[0][1], Z2::new(1, 0));
        // nothing in row 1 except p^K.
        let (_, exps) = hnf(&r, 2, &[vec![Z2::new(9, 0), Z2::ZERO]]);
        assert_eq!(exps, vec![2, 4]);
        // 3·(0, 3δ, 1) reaches row 2 only after the row-1 entry vanishes mod 9.
        let r = Ring::new(3, 2, 2).unwrap();
        let g = [vec![Z2::ZERO, Z2::new(0, 3), Z2::new(1, 0)], vec![Z2::new(1, 0), Z2::new(1, 4), Z2::ZERO]];
        let (_, exps) = hnf(&r, 3, &g);
        assert_eq!(exps, vec![0, 1, 1]);
    }

    #[test]
    fn smith_small() {
        let r = Ring::new(3, 2, 5).unwrap();
        let m = vec![vec![Z2::new(3, 0), Z2::new(1, 0)], vec![Z2::ZERO, Z2::new(3, 0)]];
        let (e, rt) = smith(&r, &m, true);
        let mut s = e.clone();
        s.sort();
        assert_eq!(s, vec![0, 2]);
        assert!(rt.is_some());
    }
}
