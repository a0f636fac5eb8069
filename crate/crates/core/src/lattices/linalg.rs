//! Dense exact linear algebra over Q(√ε) and Smith reduction over Z_(p)[√ε].

use alloc::vec;
use alloc::vec::Vec;

use crate::scalars::{ExtScalar, PadicContext, Valuation};

/// Row-major matrix of exact scalars.
pub type Mat = Vec<Vec<ExtScalar>>;

pub fn zeros(rows: usize, cols: usize) -> Mat {
    vec![vec![ExtScalar::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ExtScalar::one();
    }
    m
}

pub fn cols_of(m: &Mat) -> usize {
    m.first().map_or(0, |r| r.len())
}

pub fn transpose(m: &Mat) -> Mat {
    let (r, c) = (m.len(), cols_of(m));
    (0..c).map(|j| (0..r).map(|i| m[i][j].clone()).collect()).collect()
}

pub fn conj(m: &Mat) -> Mat {
    m.iter().map(|r| r.iter().map(ExtScalar::conj).collect()).collect()
}

pub fn mat_mul(ctx: &PadicContext, a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), cols_of(b));
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    let t = ctx.mul(&a[i][l], &b[l][j]);
                    out[i][j] += &t;
                }
            }
        }
    }
    out
}

pub fn mat_vec(ctx: &PadicContext, a: &Mat, v: &[ExtScalar]) -> Vec<ExtScalar> {
    a.iter()
        .map(|row| {
            let mut s = ExtScalar::zero();
            for (x, y) in row.iter().zip(v) {
                if !x.is_zero() && !y.is_zero() {
                    s += &ctx.mul(x, y);
                }
            }
            s
        })
        .collect()
}

/// Columns given as vectors, assembled into a row-major matrix with `rows` rows.
pub fn from_columns(rows: usize, cols: &[Vec<ExtScalar>]) -> Mat {
    (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

pub fn columns(m: &Mat) -> Vec<Vec<ExtScalar>> {
    transpose(m)
}

/// Reduced row echelon form; returns pivot columns.
pub fn rref(ctx: &PadicContext, m: &mut Mat) -> Vec<usize> {
    let (rows, cols) = (m.len(), cols_of(m));
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = ctx.inv(&m[r][c]).expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = ctx.mul(x, &inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    if !m[r][j].is_zero() {
                        let t = ctx.mul(&f, &m[r][j]);
                        m[i][j] -= &t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(ctx: &PadicContext, m: &Mat) -> usize {
    let mut w = m.clone();
    rref(ctx, &mut w).len()
}

pub fn inverse(ctx: &PadicContext, m: &Mat) -> Option<Mat> {
    let n = m.len();
    let mut aug: Mat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { ExtScalar::one() } else { ExtScalar::zero() }));
            r
        })
        .collect();
    let piv = rref(ctx, &mut aug);
    if piv.len() < n || piv.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det(ctx: &PadicContext, m: &Mat) -> ExtScalar {
    let n = m.len();
    let mut a = m.clone();
    let mut d = ExtScalar::one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return ExtScalar::zero();
        };
        if pr != c {
            a.swap(pr, c);
            d = -d;
        }
        d = ctx.mul(&d, &a[c][c]);
        let inv = ctx.inv(&a[c][c]).expect("nonzero pivot");
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = ctx.mul(&a[i][c], &inv);
            for j in c..n {
                let t = ctx.mul(&f, &a[c][j]);
                a[i][j] -= &t;
            }
        }
    }
    d
}

/// Basis of the right kernel {c : m·c = 0} over Q(√ε).
pub fn kernel(ctx: &PadicContext, m: &Mat, cols: usize) -> Vec<Vec<ExtScalar>> {
    let mut w = m.clone();
    let piv = rref(ctx, &mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![ExtScalar::zero(); cols];
            v[f] = ExtScalar::one();
            for (r, &pc) in piv.iter().enumerate() {
                v[pc] = -&w[r][f];
            }
            v
        })
        .collect()
}

/// Some solution of m·c = b, if one exists.
pub fn solve(ctx: &PadicContext, m: &Mat, b: &[ExtScalar]) -> Option<Vec<ExtScalar>> {
    let cols = cols_of(m);
    let mut aug: Mat = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(ctx, &mut aug);
    if piv.last() == Some(&cols) {
        return None;
    }
    let mut c = vec![ExtScalar::zero(); cols];
    for (r, &pc) in piv.iter().enumerate() {
        c[pc] = aug[r][cols].clone();
    }
    Some(c)
}

/// Smith reduction over the local ring Z_(p)[√ε] of an integral matrix.
pub struct LocalSmith {
    /// Exponents of the nonzero invariant factors, ascending.
    pub exponents: Vec<i64>,
    /// Column transform Q (invertible over the local ring) with P·A·Q diagonal.
    pub q: Mat,
}

pub fn local_smith(ctx: &PadicContext, a: &Mat, cols: usize) -> LocalSmith {
    let rows = a.len();
    let mut m = a.clone();
    let mut q = identity(cols);
    let mut exps = Vec::new();
    for r in 0..rows.min(cols) {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in r..rows {
            for j in r..cols {
                if let Valuation::Finite(v) = ctx.valuation(&m[i][j]) {
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        m.swap(r, pi);
        if pj != r {
            for row in m.iter_mut() {
                row.swap(r, pj);
            }
            for row in q.iter_mut() {
                row.swap(r, pj);
            }
        }
        let inv = ctx.inv(&m[r][r]).expect("nonzero pivot");
        for i in r + 1..rows {
            if m[i][r].is_zero() {
                continue;
            }
            let f = ctx.mul(&m[i][r], &inv);
            for j in r..cols {
                let t = ctx.mul(&f, &m[r][j]);
                m[i][j] -= &t;
            }
        }
        for j in r + 1..cols {
            if m[r][j].is_zero() {
                continue;
            }
            let f = ctx.mul(&m[r][j], &inv);
            for i in 0..rows {
                let t = ctx.mul(&f, &m[i][r]);
                m[i][j] -= &t;
            }
            for row in q.iter_mut() {
                let t = ctx.mul(&f, &row[r]);
                row[j] -= &t;
            }
        }
        exps.push(v);
    }
    exps.sort_unstable();
    LocalSmith { exponents: exps, q }
}

/// Right kernel over the local ring of an integral matrix, as a basis of integral columns.
pub fn local_kernel(ctx: &PadicContext, a: &Mat, cols: usize) -> Vec<Vec<ExtScalar>> {
    let s = local_smith(ctx, a, cols);
    let rk = s.exponents.len();
    (rk..cols).map(|j| s.q.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Smallest valuation among the entries, `None` if all vanish.
pub fn min_valuation<'a, I: IntoIterator<Item = &'a ExtScalar>>(ctx: &PadicContext, it: I) -> Option<i64> {
    it.into_iter().filter_map(|x| ctx.valuation(x).finite()).min()
}
