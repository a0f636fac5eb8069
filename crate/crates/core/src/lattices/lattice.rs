use alloc::sync::Arc;
use alloc::vec::Vec;
use core::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_rational::BigRational;

use super::linalg::{self, Mat};
use super::space::HermSpace;
use crate::error::{Error, Result};
use crate::scalars::{rational, ExtScalar, PadicContext};

/// A Z_{p²}-lattice, stored as p^{−shift}·M with M the canonical integral echelon basis.
#[derive(Clone, Debug)]
pub struct Lattice {
    space: Arc<HermSpace>,
    shift: i64,
    cols: Vec<Vec<ExtScalar>>,
    pivots: Vec<(usize, u32)>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.shift == other.shift && self.cols == other.cols
    }
}

impl Eq for Lattice {}

impl Hash for Lattice {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.shift.hash(state);
        self.cols.hash(state);
    }
}

pub(crate) fn same_space(a: &Arc<HermSpace>, b: &Arc<HermSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Canonical echelon data of a generating set: (shift, integral columns, pivots).
pub(crate) type Canonical = (i64, Vec<Vec<ExtScalar>>, Vec<(usize, u32)>);

/// Column echelon form over Z_(p)[√ε]: rows are processed top to bottom, each pivot is a pure
/// power p^e, entries right of a pivot vanish and entries left of it are reduced modulo p^e
/// into {a + b√ε : 0 ≤ a, b < p^e}.
pub fn canonicalize(ctx: &PadicContext, n: usize, gens: &[Vec<ExtScalar>], allow_dependent: bool) -> Result<Canonical> {
    for g in gens {
        if g.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.len() });
        }
    }
    let Some(minv) = linalg::min_valuation(ctx, gens.iter().flatten()) else {
        if !allow_dependent && !gens.is_empty() {
            return Err(Error::RankDeficient);
        }
        return Ok((0, Vec::new(), Vec::new()));
    };
    let shift = -minv;
    let scale = rational::p_power(ctx.p(), shift);
    let mut active: Vec<Vec<ExtScalar>> = gens
        .iter()
        .filter(|g| g.iter().any(|x| !x.is_zero()))
        .map(|g| g.iter().map(|x| x.scale(&scale)).collect())
        .collect();
    let nonzero = active.len();
    if !allow_dependent && nonzero < gens.len() {
        return Err(Error::RankDeficient);
    }
    let mut out: Vec<Vec<ExtScalar>> = Vec::new();
    let mut pivots = Vec::new();
    for row in 0..n {
        let mut best: Option<(i64, usize)> = None;
        for (j, c) in active.iter().enumerate() {
            if let Some(v) = ctx.valuation(&c[row]).finite() {
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, j));
                }
            }
        }
        let Some((e, j)) = best else { continue };
        let mut piv = active.swap_remove(j);
        let f = ctx.div(&ctx.p_pow(e), &piv[row]).expect("nonzero pivot");
        for x in piv.iter_mut() {
            *x = ctx.mul(x, &f);
        }
        let inv_pe = ctx.p_pow(-e);
        for c in active.iter_mut() {
            if c[row].is_zero() {
                continue;
            }
            let q = ctx.mul(&c[row], &inv_pe);
            for (x, y) in c.iter_mut().zip(&piv) {
                if !y.is_zero() {
                    *x -= &ctx.mul(&q, y);
                }
            }
        }
        out.push(piv);
        pivots.push((row, e as u32));
    }
    if !allow_dependent && out.len() < nonzero {
        return Err(Error::RankDeficient);
    }
    reduce_echelon(ctx, &mut out, &pivots);
    Ok((shift, out, pivots))
}

fn reduce_echelon(ctx: &PadicContext, cols: &mut [Vec<ExtScalar>], pivots: &[(usize, u32)]) {
    let p = BigInt::from(ctx.p());
    for t in 0..cols.len() {
        let (row, e) = pivots[t];
        let m = num_traits::pow(p.clone(), e as usize);
        let mq = BigRational::from_integer(m.clone());
        for d in 0..t {
            let y = cols[d][row].clone();
            let ra = rational::residue_big(y.a(), &m);
            let rb = rational::residue_big(y.b(), &m);
            let rep = ExtScalar::new(BigRational::from_integer(ra), BigRational::from_integer(rb));
            if rep == y {
                continue;
            }
            let q = (&y - &rep).scale(&(BigRational::from_integer(1.into()) / &mq));
            let (head, tail) = cols.split_at_mut(t);
            for (x, z) in head[d].iter_mut().zip(&tail[0]) {
                if !z.is_zero() {
                    *x -= &ctx.mul(&q, z);
                }
            }
        }
    }
}

impl Lattice {
    /// Lattice spanned by independent columns.
    pub fn new(space: Arc<HermSpace>, basis: &[Vec<ExtScalar>]) -> Result<Self> {
        let (shift, cols, pivots) = canonicalize(space.ctx(), space.dim(), basis, false)?;
        Ok(Self { space, shift, cols, pivots })
    }

    /// Lattice spanned by arbitrary generators.
    pub fn from_generators(space: Arc<HermSpace>, gens: &[Vec<ExtScalar>]) -> Result<Self> {
        let (shift, cols, pivots) = canonicalize(space.ctx(), space.dim(), gens, true)?;
        Ok(Self { space, shift, cols, pivots })
    }

    /// The standard lattice Z_{p²}ⁿ.
    pub fn standard(space: Arc<HermSpace>) -> Self {
        let n = space.dim();
        let basis = linalg::columns(&linalg::identity(n));
        Self::new(space, &basis).expect("identity is independent")
    }

    pub fn space(&self) -> &Arc<HermSpace> {
        &self.space
    }

    pub fn ctx(&self) -> &PadicContext {
        self.space.ctx()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn rank(&self) -> usize {
        self.cols.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim()
    }

    /// k in Λ = p^{−k}·M.
    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Canonical integral columns M.
    pub fn integral_columns(&self) -> &[Vec<ExtScalar>] {
        &self.cols
    }

    /// (row, exponent) of each pivot of M.
    pub fn pivots(&self) -> &[(usize, u32)] {
        &self.pivots
    }

    /// The canonical basis p^{−k}·M.
    pub fn basis(&self) -> Vec<Vec<ExtScalar>> {
        let s = rational::p_power(self.ctx().p(), -self.shift);
        self.cols.iter().map(|c| c.iter().map(|x| x.scale(&s)).collect()).collect()
    }

    fn basis_matrix(&self) -> Mat {
        linalg::from_columns(self.dim(), &self.basis())
    }

    /// p^j·Λ.
    pub fn scaled(&self, j: i64) -> Self {
        Self { shift: self.shift - j, ..self.clone() }
    }

    fn check_space(&self, other: &Lattice) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// Coordinates of v in the canonical basis.
    pub fn coordinates(&self, v: &[ExtScalar]) -> Result<Vec<ExtScalar>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        linalg::solve(self.ctx(), &self.basis_matrix(), v).ok_or(Error::NotInSpan)
    }

    pub fn member(&self, v: &[ExtScalar]) -> Result<bool> {
        let c = self.coordinates(v)?;
        Ok(c.iter().all(|x| self.ctx().is_integral(x)))
    }

    /// Λ^♯ = {v : h(v, Λ) ⊆ Z_{p²}}, with basis (G·conj(B))^{−T}.
    pub fn dual(&self) -> Result<Self> {
        if !self.is_full_rank() {
            return Err(Error::RankDeficient);
        }
        let ctx = self.ctx();
        let w = linalg::mat_mul(ctx, self.space.gram(), &linalg::conj(&self.basis_matrix()));
        let wi = linalg::inverse(ctx, &w).ok_or(Error::Singular)?;
        let cols = linalg::columns(&linalg::transpose(&wi));
        Self::new(self.space.clone(), &cols)
    }

    pub fn sum(&self, other: &Lattice) -> Result<Self> {
        self.check_space(other)?;
        let mut g = self.basis();
        g.extend(other.basis());
        Self::from_generators(self.space.clone(), &g)
    }

    /// {v : v ∈ Λ₁ and v ∈ Λ₂}, via the local-ring kernel of [B₁ | −B₂].
    pub fn intersect(&self, other: &Lattice) -> Result<Self> {
        self.check_space(other)?;
        let ctx = self.ctx();
        let n = self.dim();
        let (k1, k2) = (self.rank(), other.rank());
        if k1 == 0 || k2 == 0 {
            return Self::from_generators(self.space.clone(), &[]);
        }
        let k = self.shift.max(other.shift);
        let s1 = rational::p_power(ctx.p(), k - self.shift);
        let s2 = rational::p_power(ctx.p(), k - other.shift);
        let mut a = linalg::zeros(n, k1 + k2);
        for i in 0..n {
            for j in 0..k1 {
                a[i][j] = self.cols[j][i].scale(&s1);
            }
            for j in 0..k2 {
                a[i][k1 + j] = -other.cols[j][i].scale(&s2);
            }
        }
        let ker = linalg::local_kernel(ctx, &a, k1 + k2);
        let b1 = self.basis_matrix();
        let gens: Vec<Vec<ExtScalar>> = ker.iter().map(|c| linalg::mat_vec(ctx, &b1, &c[..k1])).collect();
        Self::from_generators(self.space.clone(), &gens)
    }

    /// Λ ∩ W where W = {v : a·v = 0 for every row a of `annihilator`}.
    pub fn intersect_annihilator(&self, annihilator: &Mat) -> Result<Self> {
        let ctx = self.ctx();
        let b = self.basis_matrix();
        let mut ab = linalg::mat_mul(ctx, annihilator, &b);
        if let Some(m) = linalg::min_valuation(ctx, ab.iter().flatten()) {
            let s = rational::p_power(ctx.p(), -m);
            for x in ab.iter_mut().flatten() {
                *x = x.scale(&s);
            }
        }
        let ker = if ab.is_empty() {
            linalg::columns(&linalg::identity(self.rank()))
        } else {
            linalg::local_kernel(ctx, &ab, self.rank())
        };
        let gens: Vec<Vec<ExtScalar>> = ker.iter().map(|c| linalg::mat_vec(ctx, &b, c)).collect();
        Self::from_generators(self.space.clone(), &gens)
    }

    /// Λ ∩ span(vectors).
    pub fn intersect_span(&self, vectors: &[Vec<ExtScalar>]) -> Result<Self> {
        let ctx = self.ctx();
        let n = self.dim();
        let vt: Mat = vectors.to_vec();
        let ann = linalg::kernel(ctx, &vt, n);
        self.intersect_annihilator(&ann)
    }

    /// Λ ⊆ other.
    pub fn is_sublattice_of(&self, other: &Lattice) -> Result<bool> {
        Ok(&self.sum(other)? == other)
    }

    /// Exponents of the invariant factors of `sub` relative to `self`.
    pub fn elementary_divisors(&self, sub: &Lattice) -> Result<Vec<i64>> {
        self.check_space(sub)?;
        let ctx = self.ctx();
        let mut coords = Vec::new();
        for v in sub.basis() {
            let c = self.coordinates(&v).map_err(|_| Error::NotContained)?;
            if !c.iter().all(|x| ctx.is_integral(x)) {
                return Err(Error::NotContained);
            }
            coords.push(c);
        }
        let m = linalg::from_columns(self.rank(), &coords);
        Ok(linalg::local_smith(ctx, &m, sub.rank()).exponents)
    }

    /// Type t = length(Λ/Λ^♯) if pΛ ⊆ Λ^♯ ⊆ Λ, otherwise `None`.
    pub fn vertex_type(&self) -> Option<usize> {
        if !self.is_full_rank() {
            return None;
        }
        let d = self.dual().ok()?;
        let ex = self.elementary_divisors(&d).ok()?;
        if ex.iter().all(|&e| e == 0 || e == 1) {
            Some(ex.iter().sum::<i64>() as usize)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn s(n: i64) -> ExtScalar {
        ExtScalar::from_int(n)
    }
    fn q(a: i64, b: i64) -> ExtScalar {
        ExtScalar::from_parts(a, b, 0, 1)
    }
    fn ctx() -> PadicContext {
        PadicContext::new(3, 2).unwrap()
    }
    fn diag(e: &[i64]) -> Arc<HermSpace> {
        Arc::new(HermSpace::diagonal(ctx(), &e.iter().map(|&x| s(x)).collect::<Vec<_>>()).unwrap())
    }
    fn lat(sp: &Arc<HermSpace>, cols: Vec<Vec<ExtScalar>>) -> Lattice {
        Lattice::new(sp.clone(), &cols).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let sp = diag(&[1, 1]);
        let id = Lattice::standard(sp.clone());
        assert_eq!(id.integral_columns(), &[vec![s(1), s(0)], vec![s(0), s(1)]]);
        let l = lat(&sp, vec![vec![s(1), s(0)], vec![s(1), s(3)]]);
        assert_eq!(l.integral_columns(), &[vec![s(1), s(0)], vec![s(0), s(3)]]);
        let l = lat(&sp, vec![vec![s(3), s(1)], vec![s(1), s(0)]]);
        assert_eq!(l, id);
        assert_eq!(Lattice::new(sp.clone(), &[vec![s(1), s(2)], vec![s(2), s(4)]]), Err(Error::RankDeficient));
    }

    #[test]
    fn reduction_representatives() {
        let sp = diag(&[1, 1]);
        // columns (1, 7 + 5√ε) and (0, 9): the entry left of p² reduces to 7 + 5√ε mod 9.
        let l = lat(&sp, vec![vec![s(1), ExtScalar::from_parts(-2, 1, -4, 1)], vec![s(0), s(9)]]);
        assert_eq!(l.integral_columns()[0][1], ExtScalar::from_parts(7, 1, 5, 1));
        // a p-adic unit denominator is absorbed: 1/2 ≡ 5 mod 9.
        let l = lat(&sp, vec![vec![s(1), q(1, 2)], vec![s(0), s(9)]]);
        assert_eq!(l.integral_columns()[0][1], s(5));
        assert_eq!(l.shift(), 0);
        let l = lat(&sp, vec![vec![q(1, 3), s(0)], vec![s(0), s(1)]]);
        assert_eq!(l.shift(), 1);
        assert_eq!(l.integral_columns(), &[vec![s(1), s(0)], vec![s(0), s(3)]]);
    }

    #[test]
    fn dual_examples() {
        let sp = diag(&[1, 3]);
        let d = Lattice::standard(sp.clone()).dual().unwrap();
        assert_eq!(d, lat(&sp, vec![vec![s(1), s(0)], vec![s(0), q(1, 3)]]));
        let sp1 = diag(&[27]);
        let l = lat(&sp1, vec![vec![q(1, 9)]]);
        assert_eq!(l.dual().unwrap(), lat(&sp1, vec![vec![q(1, 3)]]));
        let sp2 = diag(&[1, 1]);
        let z = Lattice::standard(sp2);
        assert_eq!(z.dual().unwrap(), z);
    }

    #[test]
    fn member_examples() {
        let sp = diag(&[1, 1]);
        let z = Lattice::standard(sp.clone());
        assert!(z.member(&[s(1), s(0)]).unwrap());
        assert!(!z.member(&[q(1, 3), s(0)]).unwrap());
        let l = lat(&sp, vec![vec![s(1), s(0)], vec![q(1, 3), q(1, 3)]]);
        assert!(l.member(&[q(1, 3), q(1, 3)]).unwrap());
        let line = Lattice::new(sp.clone(), &[vec![s(1), s(1)]]).unwrap();
        assert_eq!(line.member(&[s(1), s(0)]), Err(Error::NotInSpan));
        assert!(line.member(&[q(1, 2), q(1, 2)]).unwrap());
    }

    #[test]
    fn sum_and_intersection() {
        let sp = diag(&[1, 1]);
        let e1 = Lattice::new(sp.clone(), &[vec![s(1), s(0)]]).unwrap();
        let e2 = Lattice::new(sp.clone(), &[vec![s(0), s(1)]]).unwrap();
        assert_eq!(e1.sum(&e2).unwrap(), Lattice::standard(sp.clone()));
        let l = lat(&sp, vec![vec![s(1), s(1)], vec![s(0), s(3)]]);
        assert_eq!(l.intersect(&l).unwrap(), l);
        let z = Lattice::standard(sp.clone());
        let i = l.intersect(&z.scaled(-1)).unwrap();
        assert_eq!(i, l);
        let a = lat(&sp, vec![vec![s(1), s(0)], vec![s(0), s(3)]]);
        let b = lat(&sp, vec![vec![s(3), s(0)], vec![s(0), s(1)]]);
        assert_eq!(a.intersect(&b).unwrap(), z.scaled(1));
        assert_eq!(e1.intersect(&z).unwrap(), e1);
    }

    #[test]
    fn elementary_divisor_examples() {
        let sp = diag(&[1, 1]);
        let z = Lattice::standard(sp.clone());
        assert_eq!(z.elementary_divisors(&z.scaled(1)).unwrap(), vec![1, 1]);
        let l = lat(&sp, vec![vec![s(1), s(0)], vec![s(0), s(9)]]);
        assert_eq!(z.elementary_divisors(&l).unwrap(), vec![0, 2]);
        assert_eq!(l.elementary_divisors(&z), Err(Error::NotContained));
        let sp = diag(&[1, 3]);
        let l = lat(&sp, vec![vec![s(1), s(0)], vec![s(0), q(1, 3)]]);
        let d = l.dual().unwrap();
        assert_eq!(d, Lattice::standard(sp.clone()));
        assert_eq!(l.elementary_divisors(&d).unwrap(), vec![0, 1]);
        assert_eq!(l.vertex_type(), Some(1));
    }

    #[test]
    fn vertex_type_examples() {
        let sp = diag(&[1, 1, 3]);
        let l = lat(&sp, vec![vec![s(1), s(0), s(0)], vec![s(0), s(1), s(0)], vec![s(0), s(0), q(1, 3)]]);
        assert_eq!(l.vertex_type(), Some(1));
        assert_eq!(Lattice::standard(sp.clone()).vertex_type(), None);
        let sp = diag(&[3, 3, 3]);
        let z = Lattice::standard(sp.clone());
        let top = z.dual().unwrap().scaled(1);
        assert_eq!(top, z);
        let v = z.scaled(-1);
        assert_eq!(v.vertex_type(), Some(3));
        assert_eq!(z.vertex_type(), None);
        let w = lat(&sp, vec![vec![q(1, 3), s(0), s(0)], vec![s(0), q(1, 3), s(0)], vec![s(0), s(0), s(1)]]);
        assert_eq!(w.vertex_type(), None);
        // G = 3·I: Z³ has dual p⁻¹Z³ ⊋ Z³; the type-3 vertex is p⁻¹Z³ with dual Z³ = p·(p⁻¹Z³).
        assert_eq!(z.scaled(-1).dual().unwrap(), z);
    }
}
