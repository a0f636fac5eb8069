//! Hermitian geometry over the residue field F_{p²}.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalars::{Fq2, FqScalar};

pub type Vector = Vec<FqScalar>;

/// Row reduction in place; returns the pivot column of each leading row. Zero rows are moved to
/// the bottom.
pub fn rref(fq: &Fq2, m: &mut [Vector]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut piv = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(i) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, i);
        let inv = fq.inv(m[r][c]).expect("nonzero");
        for x in m[r].iter_mut() {
            *x = fq.mul(*x, inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..cols {
                    let t = fq.mul(f, m[r][j]);
                    m[i][j] = fq.sub(m[i][j], t);
                }
            }
        }
        piv.push(c);
        r += 1;
    }
    piv
}

pub fn rank(fq: &Fq2, m: &[Vector]) -> usize {
    let mut a = m.to_vec();
    rref(fq, &mut a).len()
}

/// Basis of {x : m·x = 0}.
pub fn kernel(fq: &Fq2, m: &[Vector], cols: usize) -> Vec<Vector> {
    let mut a = m.to_vec();
    let piv = rref(fq, &mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![FqScalar::ZERO; cols];
            v[f] = FqScalar::ONE;
            for (r, &c) in piv.iter().enumerate() {
                v[c] = fq.neg(a[r][f]);
            }
            v
        })
        .collect()
}

/// Reduced row-echelon basis of the span of `rows`.
pub fn echelon_basis(fq: &Fq2, rows: &[Vector]) -> Vec<Vector> {
    let mut a = rows.to_vec();
    let k = rref(fq, &mut a).len();
    a.truncate(k);
    a
}

pub(crate) fn combine(fq: &Fq2, coeffs: &[FqScalar], basis: &[Vector], dim: usize) -> Vector {
    let mut v = vec![FqScalar::ZERO; dim];
    for (c, b) in coeffs.iter().zip(basis) {
        if c.is_zero() {
            continue;
        }
        for (x, y) in v.iter_mut().zip(b) {
            *x = fq.add(*x, fq.mul(*c, *y));
        }
    }
    v
}

/// A hermitian form (u, v) ↦ uᵀ·G·conj(v) on F_{p²}^d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteHermSpace {
    fq: Fq2,
    gram: Vec<Vector>,
}

impl FiniteHermSpace {
    /// Possibly degenerate form; used internally for radicals.
    pub(crate) fn new_unchecked(fq: Fq2, gram: Vec<Vector>) -> Self {
        Self { fq, gram }
    }

    pub fn new(fq: Fq2, gram: Vec<Vector>) -> Result<Self> {
        let d = gram.len();
        if gram.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: gram.iter().map(|r| r.len()).max().unwrap_or(0),
            });
        }
        for i in 0..d {
            for j in 0..d {
                if gram[i][j] != fq.conj(gram[j][i]) {
                    return Err(Error::NotHermitian);
                }
            }
        }
        if rank(&fq, &gram) != d {
            return Err(Error::Singular);
        }
        Ok(Self { fq, gram })
    }

    /// The identity form on F_{p²}^d.
    pub fn standard(fq: Fq2, d: usize) -> Self {
        let gram =
            (0..d).map(|i| (0..d).map(|j| if i == j { FqScalar::ONE } else { FqScalar::ZERO }).collect()).collect();
        Self { fq, gram }
    }

    pub fn field(&self) -> &Fq2 {
        &self.fq
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vector] {
        &self.gram
    }

    /// The row vector uᵀ·G.
    fn left(&self, u: &[FqScalar]) -> Vector {
        let fq = &self.fq;
        let d = self.dim();
        let mut out = vec![FqScalar::ZERO; d];
        for (i, &ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for j in 0..d {
                out[j] = fq.add(out[j], fq.mul(ui, self.gram[i][j]));
            }
        }
        out
    }

    pub fn h(&self, u: &[FqScalar], v: &[FqScalar]) -> FqScalar {
        let fq = &self.fq;
        self.left(u).iter().zip(v).fold(FqScalar::ZERO, |acc, (&x, &y)| fq.add(acc, fq.mul(x, fq.conj(y))))
    }

    pub fn is_totally_isotropic(&self, basis: &[Vector]) -> bool {
        basis.iter().all(|u| basis.iter().all(|v| self.h(u, v).is_zero()))
    }

    /// {w : h(u, w) = 0 for all u in `basis`}.
    pub fn orthogonal(&self, basis: &[Vector]) -> Vec<Vector> {
        let fq = &self.fq;
        let rows: Vec<Vector> = basis.iter().map(|u| self.left(u).into_iter().map(|x| fq.conj(x)).collect()).collect();
        if rows.is_empty() {
            return (0..self.dim())
                .map(|i| (0..self.dim()).map(|j| if i == j { FqScalar::ONE } else { FqScalar::ZERO }).collect())
                .collect();
        }
        kernel(fq, &rows, self.dim())
    }

    /// Basis of the radical.
    pub fn radical(&self) -> Vec<Vector> {
        let fq = &self.fq;
        let rows: Vec<Vector> = self.gram.iter().map(|r| r.iter().map(|&x| fq.conj(x)).collect()).collect();
        kernel(fq, &rows, self.dim())
    }

    /// Basis e_1..e_d with h(e_i, e_j) = δ_ij (requires a nondegenerate form).
    pub fn orthonormal_basis(&self) -> Vec<Vector> {
        let fq = &self.fq;
        let d = self.dim();
        let mut rest: Vec<Vector> =
            (0..d).map(|i| (0..d).map(|j| if i == j { FqScalar::ONE } else { FqScalar::ZERO }).collect()).collect();
        let mut out = Vec::with_capacity(d);
        while !rest.is_empty() {
            let (v, drop) = self.anisotropic_in(&rest);
            rest.remove(drop);
            let c = self.h(&v, &v).a;
            let cinv = fq.inv(FqScalar::new(c, 0)).expect("anisotropic").a;
            let lam = fq.norm_preimage(cinv);
            let v: Vector = v.iter().map(|&x| fq.mul(lam, x)).collect();
            for b in rest.iter_mut() {
                let f = self.h(b, &v);
                if !f.is_zero() {
                    for (x, &y) in b.iter_mut().zip(&v) {
                        *x = fq.sub(*x, fq.mul(f, y));
                    }
                }
            }
            out.push(v);
        }
        out
    }

    /// An anisotropic vector in span(rest) and an index of `rest` it may replace.
    fn anisotropic_in(&self, rest: &[Vector]) -> (Vector, usize) {
        let fq = &self.fq;
        if let Some(i) = rest.iter().position(|b| !self.h(b, b).is_zero()) {
            return (rest[i].clone(), i);
        }
        let b0 = &rest[0];
        for bj in &rest[1..] {
            for lam in fq.elements().filter(|x| !x.is_zero()) {
                let v: Vector = b0.iter().zip(bj).map(|(&x, &y)| fq.add(x, fq.mul(lam, y))).collect();
                if !self.h(&v, &v).is_zero() {
                    return (v, 0);
                }
            }
        }
        panic!("degenerate form in orthonormal_basis")
    }

    /// All k-dimensional totally isotropic subspaces, each as a reduced row-echelon basis.
    pub fn isotropic_subspaces(&self, k: usize) -> Vec<Vec<Vector>> {
        let d = self.dim();
        let mut out = Vec::new();
        if k > d {
            return out;
        }
        let mut pivots = Vec::with_capacity(k);
        self.choose_pivots(k, 0, &mut pivots, &mut out);
        out
    }

    fn choose_pivots(&self, k: usize, from: usize, piv: &mut Vec<usize>, out: &mut Vec<Vec<Vector>>) {
        if piv.len() == k {
            let mut rows = Vec::with_capacity(k);
            self.fill_rows(piv, &mut rows, out);
            return;
        }
        let d = self.dim();
        for c in from..=d - (k - piv.len()) {
            piv.push(c);
            self.choose_pivots(k, c + 1, piv, out);
            piv.pop();
        }
    }

    fn fill_rows(&self, piv: &[usize], rows: &mut Vec<Vector>, out: &mut Vec<Vec<Vector>>) {
        let fq = &self.fq;
        let d = self.dim();
        let i = rows.len();
        if i == piv.len() {
            out.push(rows.clone());
            return;
        }
        let c = piv[i];
        let free: Vec<usize> = (c + 1..d).filter(|x| !piv.contains(x)).collect();
        // constraints Σ_f x_f·a_f = -a_c, one for each earlier row.
        let mut sys: Vec<Vector> = Vec::with_capacity(i);
        for r in rows.iter() {
            let col: Vector = (0..d)
                .map(|j| (0..d).fold(FqScalar::ZERO, |acc, t| fq.add(acc, fq.mul(self.gram[j][t], fq.conj(r[t])))))
                .collect();
            let mut row: Vector = free.iter().map(|&f| col[f]).collect();
            row.push(fq.neg(col[c]));
            sys.push(row);
        }
        let nf = free.len();
        let (part, ker) = if sys.is_empty() {
            (vec![FqScalar::ZERO; nf], unit_basis(nf))
        } else {
            let mut a = sys.clone();
            let p = rref(fq, &mut a);
            if p.last() == Some(&nf) {
                return;
            }
            let mut part = vec![FqScalar::ZERO; nf];
            for (r, &pc) in p.iter().enumerate() {
                part[pc] = a[r][nf];
            }
            let lhs: Vec<Vector> = sys.iter().map(|r| r[..nf].to_vec()).collect();
            (part, kernel(fq, &lhs, nf))
        };
        let q = fq.order();
        let m = ker.len();
        let mut idx = vec![0usize; m];
        loop {
            let coeffs: Vec<FqScalar> = idx.iter().map(|&t| fq.from_index(t)).collect();
            let mut x = part.clone();
            let delta = combine(fq, &coeffs, &ker, nf);
            for (a, b) in x.iter_mut().zip(&delta) {
                *a = fq.add(*a, *b);
            }
            let mut v = vec![FqScalar::ZERO; d];
            v[c] = FqScalar::ONE;
            for (t, &f) in free.iter().enumerate() {
                v[f] = x[t];
            }
            if self.h(&v, &v).is_zero() {
                rows.push(v);
                self.fill_rows(piv, rows, out);
                rows.pop();
            }
            let mut t = 0;
            loop {
                if t == m {
                    return;
                }
                idx[t] += 1;
                if idx[t] < q {
                    break;
                }
                idx[t] = 0;
                t += 1;
            }
        }
    }
}

fn unit_basis(n: usize) -> Vec<Vector> {
    (0..n).map(|i| (0..n).map(|j| if i == j { FqScalar::ONE } else { FqScalar::ZERO }).collect()).collect()
}
