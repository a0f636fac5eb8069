use alloc::vec::Vec;

use super::linalg::{self, Mat};
use crate::error::{Error, Result};
use crate::scalars::{ExtScalar, PadicContext};

/// A nondegenerate hermitian space (Q_{p²}ⁿ, h) with h(v,w) = vᵀ·G·conj(w).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermSpace {
    ctx: PadicContext,
    gram: Mat,
    gram_inv: Mat,
    det_val: i64,
}

impl HermSpace {
    pub fn new(ctx: PadicContext, gram: Mat) -> Result<Self> {
        let n = gram.len();
        for row in &gram {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i].conj() {
                    return Err(Error::NotHermitian);
                }
            }
        }
        let gram_inv = linalg::inverse(&ctx, &gram).ok_or(Error::Singular)?;
        let det = linalg::det(&ctx, &gram);
        let det_val = ctx.valuation(&det).finite().ok_or(Error::Singular)?;
        Ok(Self { ctx, gram, gram_inv, det_val })
    }

    pub fn diagonal(ctx: PadicContext, entries: &[ExtScalar]) -> Result<Self> {
        let n = entries.len();
        let mut g = linalg::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            g[i][i] = e.clone();
        }
        Self::new(ctx, g)
    }

    pub fn ctx(&self) -> &PadicContext {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &Mat {
        &self.gram_inv
    }

    /// v(det G).
    pub fn det_valuation(&self) -> i64 {
        self.det_val
    }

    /// Largest vertex type: the largest integer ≤ n with the parity of v(det G).
    pub fn max_type(&self) -> usize {
        let n = self.dim();
        if (n as i64 - self.det_val).rem_euclid(2) == 0 {
            n
        } else {
            n - 1
        }
    }

    pub fn type_parity(&self) -> usize {
        self.det_val.rem_euclid(2) as usize
    }

    pub fn h(&self, v: &[ExtScalar], w: &[ExtScalar]) -> ExtScalar {
        let c = &self.ctx;
        let wc: Vec<ExtScalar> = w.iter().map(ExtScalar::conj).collect();
        let gw = linalg::mat_vec(c, &self.gram, &wc);
        let mut s = ExtScalar::zero();
        for (x, y) in v.iter().zip(&gw) {
            if !x.is_zero() && !y.is_zero() {
                s += &c.mul(x, y);
            }
        }
        s
    }

    /// The row vector vᵀ·G, so that h(v, w) = (vᵀG)·conj(w).
    pub fn left_form(&self, v: &[ExtScalar]) -> Vec<ExtScalar> {
        let c = &self.ctx;
        (0..self.dim())
            .map(|j| {
                let mut s = ExtScalar::zero();
                for (i, x) in v.iter().enumerate() {
                    if !x.is_zero() && !self.gram[i][j].is_zero() {
                        s += &c.mul(x, &self.gram[i][j]);
                    }
                }
                s
            })
            .collect()
    }

    /// Gram matrix of the given vectors.
    pub fn gram_of(&self, vecs: &[Vec<ExtScalar>]) -> Mat {
        vecs.iter().map(|v| vecs.iter().map(|w| self.h(v, w)).collect()).collect()
    }

    /// The space spanned by `basis` with the restricted form.
    pub fn restricted(&self, basis: &[Vec<ExtScalar>]) -> Result<HermSpace> {
        HermSpace::new(self.ctx, self.gram_of(basis))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn validation() {
        let c = PadicContext::new(3, 2).unwrap();
        let s = ExtScalar::sqrt_eps();
        let ok = vec![vec![ExtScalar::one(), s.clone()], vec![s.conj(), ExtScalar::from_int(3)]];
        let sp = HermSpace::new(c, ok).unwrap();
        assert_eq!(sp.det_valuation(), 0);
        let bad = vec![vec![ExtScalar::one(), s.clone()], vec![s.clone(), ExtScalar::from_int(3)]];
        assert_eq!(HermSpace::new(c, bad), Err(Error::NotHermitian));
        let sing = vec![vec![ExtScalar::one(), ExtScalar::one()], vec![ExtScalar::one(), ExtScalar::one()]];
        assert_eq!(HermSpace::new(c, sing), Err(Error::Singular));
        let d = HermSpace::diagonal(c, &[ExtScalar::one(), ExtScalar::one(), ExtScalar::from_int(3)]).unwrap();
        assert_eq!(d.max_type(), 3);
        let e = HermSpace::diagonal(c, &[ExtScalar::one(), ExtScalar::from_int(3)]).unwrap();
        assert_eq!(e.max_type(), 1);
    }
}
