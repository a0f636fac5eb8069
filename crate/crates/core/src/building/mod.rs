//! The vertex complex: finite hermitian geometry, neighbours, balls and distances.

mod complex;
pub mod finite;

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

use once_cell::race::OnceBox;

pub use complex::{
    ball, ball_capped, connected_components, distance, explore, explore_with, ComplexSubset, Distance, VertexMeta,
};
pub use finite::FiniteHermSpace;

use crate::error::{Error, Result};
use crate::lattices::modular::{Ring, Z2};
use crate::lattices::{Anchor, FastSpace, HermSpace, Lattice, LatticeKey};
use crate::scalars::{Fq2, FqScalar};
use finite::Vector;

/// A vertex lattice: pΛ ⊆ Λ^♯ ⊆ Λ, with its type t = dim Λ/Λ^♯ cached.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    key: LatticeKey,
    typ: usize,
}

impl Vertex {
    pub fn key(&self) -> &LatticeKey {
        &self.key
    }

    pub fn vertex_type(&self) -> usize {
        self.typ
    }
}

/// The vertex complex of one hermitian space.
pub struct Building {
    fast: Arc<FastSpace>,
    fq: Fq2,
    iso: Vec<OnceBox<Vec<Vec<Vector>>>>,
}

impl core::fmt::Debug for Building {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Building").field("space", self.fast.space()).finish()
    }
}

fn to_fq(z: Z2, p: u64) -> FqScalar {
    FqScalar::new((z.a % p) as u32, (z.b % p) as u32)
}

fn lift(ring: &Ring, x: FqScalar) -> Z2 {
    ring.reduce(Z2::new(x.a as u64, x.b as u64))
}

impl Building {
    pub fn new(space: Arc<HermSpace>) -> Result<Self> {
        let fast = Arc::new(FastSpace::new(space)?);
        Ok(Self::from_fast(fast))
    }

    pub fn from_fast(fast: Arc<FastSpace>) -> Self {
        let n = fast.dim();
        let fq = fast.ctx().residue_field();
        let iso = (0..(n + 1) * (n + 1)).map(|_| OnceBox::new()).collect();
        Self { fast, fq, iso }
    }

    pub fn fast(&self) -> &Arc<FastSpace> {
        &self.fast
    }

    pub fn space(&self) -> &Arc<HermSpace> {
        self.fast.space()
    }

    pub fn dim(&self) -> usize {
        self.fast.dim()
    }

    pub fn max_type(&self) -> usize {
        self.space().max_type()
    }

    pub fn residue_field(&self) -> &Fq2 {
        &self.fq
    }

    /// Certified vertex from a canonical key.
    pub fn vertex_from_key(&self, key: LatticeKey) -> Result<Vertex> {
        match self.fast.vertex_type(&key)? {
            Some(typ) => Ok(Vertex { key, typ }),
            None => Err(Error::NotAVertex),
        }
    }

    pub fn vertex(&self, l: &Lattice) -> Result<Vertex> {
        self.vertex_from_key(self.fast.key_of(l)?)
    }

    pub fn lattice(&self, v: &Vertex) -> Lattice {
        self.fast.lattice_of(&v.key)
    }

    /// Standard totally isotropic k-subspaces of the identity form on F_{p²}^d.
    fn standard_iso(&self, d: usize, k: usize) -> &[Vec<Vector>] {
        let n = self.dim();
        self.iso[d * (n + 1) + k].get_or_init(|| Box::new(FiniteHermSpace::standard(self.fq, d).isotropic_subspaces(k)))
    }

    fn q_matrix(&self, v: &Vertex) -> Result<(Vec<Vec<Z2>>, Vec<Vector>)> {
        let hp = self.fast.hp_mod_p2(&v.key)?.ok_or(Error::NotAVertex)?;
        let p = self.fast.p();
        let q = hp.iter().map(|r| r.iter().map(|&z| to_fq(z, p)).collect()).collect();
        Ok((hp, q))
    }

    /// (Λ/Λ^♯, ph̄) in the coordinates of a complement of the radical, with that complement.
    fn below_geometry(&self, q: &[Vector]) -> (FiniteHermSpace, Vec<usize>) {
        let fq = self.fq;
        let full = FiniteHermSpace::new_unchecked(fq, q.to_vec());
        let mut rad = full.radical();
        let piv = finite::rref(&fq, &mut rad);
        let comp: Vec<usize> = (0..q.len()).filter(|c| !piv.contains(c)).collect();
        let g = comp.iter().map(|&i| comp.iter().map(|&j| q[i][j]).collect()).collect();
        (FiniteHermSpace::new_unchecked(fq, g), comp)
    }

    /// (Λ^♯/pΛ, h̄) on a basis of the radical of ph̄, with that basis.
    fn above_geometry(&self, hp: &[Vec<Z2>], q: &[Vector]) -> Result<(FiniteHermSpace, Vec<Vector>)> {
        let fq = self.fq;
        let p = self.fast.p();
        let full = FiniteHermSpace::new_unchecked(fq, q.to_vec());
        let rad = finite::echelon_basis(&fq, &full.radical());
        let r2 = self.fast.ring(2)?;
        let lifted: Vec<Vec<Z2>> = rad.iter().map(|r| r.iter().map(|&x| lift(&r2, x)).collect()).collect();
        let n = q.len();
        let g = lifted
            .iter()
            .map(|ra| {
                lifted
                    .iter()
                    .map(|rb| {
                        let mut acc = Z2::ZERO;
                        for i in 0..n {
                            for j in 0..n {
                                acc = r2.add(acc, r2.mul(r2.mul(ra[i], hp[i][j]), r2.conj(rb[j])));
                            }
                        }
                        debug_assert!(r2.val(acc) >= 1);
                        to_fq(Z2::new(acc.a / p, acc.b / p), p)
                    })
                    .collect()
            })
            .collect();
        Ok((FiniteHermSpace::new_unchecked(fq, g), rad))
    }

    /// The form ph̄ on Λ/Λ^♯.
    pub fn finite_below(&self, v: &Vertex) -> Result<FiniteHermSpace> {
        let (_, q) = self.q_matrix(v)?;
        let (g, _) = self.below_geometry(&q);
        FiniteHermSpace::new(self.fq, g.gram().to_vec())
    }

    /// The form h̄ on Λ^♯/pΛ.
    pub fn finite_above(&self, v: &Vertex) -> Result<FiniteHermSpace> {
        let (hp, q) = self.q_matrix(v)?;
        let (g, _) = self.above_geometry(&hp, &q)?;
        FiniteHermSpace::new(self.fq, g.gram().to_vec())
    }

    fn lift_lattice(&self, v: &Vertex, shift: i64, vecs: &[Vector]) -> Result<Vertex> {
        let n = self.dim();
        let prec = v.key.exponent() + 1;
        let ring = self.fast.ring(prec)?;
        let cols: Vec<Vec<Z2>> =
            v.key.columns().into_iter().map(|c| c.into_iter().map(|z| ring.reduce(z)).collect()).collect();
        let pz = ring.from_int(self.fast.p() as i64);
        let mut gens: Vec<Vec<Z2>> = cols.iter().map(|c| c.iter().map(|&z| ring.mul(z, pz)).collect()).collect();
        for w in vecs {
            let mut g = alloc::vec![Z2::ZERO; n];
            for (j, &x) in w.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let lx = lift(&ring, x);
                for i in j..n {
                    g[i] = ring.add(g[i], ring.mul(cols[j][i], lx));
                }
            }
            gens.push(g);
        }
        self.vertex_from_key(self.fast.key_from_gens(&ring, shift, &gens))
    }

    /// All vertices Λ̃ ⊆ Λ of type `target`.
    pub fn neighbors_below(&self, v: &Vertex, target: usize) -> Result<Vec<Vertex>> {
        self.below_containing(v, target, &[])
    }

    /// Vertices Λ̃ ⊆ Λ of type `target` whose image in Λ/pΛ contains every vector of `ys`.
    fn below_containing(&self, v: &Vertex, target: usize, ys: &[Vector]) -> Result<Vec<Vertex>> {
        let t = v.typ;
        if target > t || !(t - target).is_multiple_of(2) {
            return Ok(Vec::new());
        }
        if target == t {
            return Ok(alloc::vec![v.clone()]);
        }
        let j = (t - target) / 2;
        let fq = self.fq;
        let n = self.dim();
        let (_, q) = self.q_matrix(v)?;
        let (geom, comp) = self.below_geometry(&q);
        let e = geom.orthonormal_basis();
        let full = FiniteHermSpace::new_unchecked(fq, q);
        let std = self.standard_iso(t, j);
        let out = crate::par::map(std, |u| -> Result<Option<Vertex>> {
            let us: Vec<Vector> = u
                .iter()
                .map(|row| {
                    let c = finite::combine(&fq, row, &e, t);
                    let mut w = alloc::vec![FqScalar::ZERO; n];
                    for (a, &i) in comp.iter().enumerate() {
                        w[i] = c[a];
                    }
                    w
                })
                .collect();
            if ys.iter().any(|y| us.iter().any(|u| !full.h(y, u).is_zero())) {
                return Ok(None);
            }
            let w = full.orthogonal(&us);
            self.lift_lattice(v, v.key.shift(), &w).map(Some)
        });
        let mut res = Vec::new();
        for r in out {
            res.extend(r?);
        }
        Ok(res)
    }

    /// Vertices strictly below Λ, all types, skipping those that cannot satisfy α ≤ a, β ≤ b,
    /// α + β ≤ c relative to Γ. The result may still contain vertices outside the window.
    pub fn below_within(&self, v: &Vertex, gamma: &Anchor, a: u32, b: u32, c: u32) -> Result<Vec<Vertex>> {
        let (al, be) = self.fast.window_exponents(gamma, &v.key)?;
        let be_min = be.saturating_sub(1);
        if be_min > b || be_min > c || al > a {
            return Ok(Vec::new());
        }
        let astar = a.min(c - be_min);
        if astar < al {
            return Ok(Vec::new());
        }
        let ys: Vec<Vector> = if astar == al {
            let big = self.fast.anchor(&v.key)?;
            let cols = self.fast.coords_mod_p(&big, gamma.key(), al)?.ok_or(Error::NotAVertex)?;
            let p = self.fast.p();
            cols.into_iter()
                .map(|c| c.into_iter().map(|z| to_fq(z, p)).collect::<Vector>())
                .filter(|y| y.iter().any(|x| !x.is_zero()))
                .collect()
        } else {
            Vec::new()
        };
        let mut out = Vec::new();
        let mut t = v.typ;
        while t >= 2 {
            t -= 2;
            out.extend(self.below_containing(v, t, &ys)?);
        }
        Ok(out)
    }

    /// All vertices Λ̃ ⊇ Λ of type `target`.
    pub fn neighbors_above(&self, v: &Vertex, target: usize) -> Result<Vec<Vertex>> {
        let t = v.typ;
        let n = self.dim();
        if target < t || target > n || !(target - t).is_multiple_of(2) {
            return Ok(Vec::new());
        }
        if target == t {
            return Ok(alloc::vec![v.clone()]);
        }
        let j = (target - t) / 2;
        let fq = self.fq;
        let (hp, q) = self.q_matrix(v)?;
        let (geom, rad) = self.above_geometry(&hp, &q)?;
        let d = rad.len();
        let e = geom.orthonormal_basis();
        let std = self.standard_iso(d, j);
        let out = crate::par::map(std, |u| {
            let us: Vec<Vector> = u
                .iter()
                .map(|row| {
                    let c = finite::combine(&fq, row, &e, d);
                    finite::combine(&fq, &c, &rad, n)
                })
                .collect();
            self.lift_lattice(v, v.key.shift() + 1, &us)
        });
        out.into_iter().collect()
    }

    /// Vertices strictly below Λ, all types.
    pub fn all_below(&self, v: &Vertex) -> Result<Vec<Vertex>> {
        let mut out = Vec::new();
        let mut t = v.typ;
        while t >= 2 {
            t -= 2;
            out.extend(self.neighbors_below(v, t)?);
        }
        Ok(out)
    }

    /// Vertices strictly above Λ, all types.
    pub fn all_above(&self, v: &Vertex) -> Result<Vec<Vertex>> {
        let mut out = Vec::new();
        let mut t = v.typ + 2;
        while t <= self.dim() {
            out.extend(self.neighbors_above(v, t)?);
            t += 2;
        }
        Ok(out)
    }

    pub fn neighbors(&self, v: &Vertex) -> Result<Vec<Vertex>> {
        let mut out = self.all_below(v)?;
        out.extend(self.all_above(v)?);
        Ok(out)
    }

    /// Containment test between vertices.
    pub fn contains(&self, big: &Vertex, small: &Vertex) -> Result<bool> {
        self.fast.contains(&big.key, &small.key)
    }

    /// Λ₁ ∩ Λ₂ if it is a vertex.
    pub fn intersection_vertex(&self, a: &Vertex, b: &Vertex) -> Result<Option<Vertex>> {
        let k = self.fast.intersect(&a.key, &b.key)?;
        Ok(self.fast.vertex_type(&k)?.map(|typ| Vertex { key: k, typ }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{ExtScalar as E, PadicContext};

    pub(crate) fn building(p: u64, d: &[i64]) -> Building {
        let ctx = PadicContext::with_default_eps(p).unwrap();
        let e: Vec<E> = d.iter().map(|&x| E::from_int(x)).collect();
        Building::new(Arc::new(HermSpace::diagonal(ctx, &e).unwrap())).unwrap()
    }

    /// span(e_1, ..., e_{n-1}, p^{-1} e_n) for G = diag(1, ..., 1, p).
    pub(crate) fn type_one(b: &Building) -> Vertex {
        let n = b.dim();
        let ctx = *b.space().ctx();
        let basis: Vec<Vec<E>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i != j {
                            E::zero()
                        } else if i == n - 1 {
                            ctx.p_pow(-1)
                        } else {
                            E::one()
                        }
                    })
                    .collect()
            })
            .collect();
        b.vertex(&Lattice::new(b.space().clone(), &basis).unwrap()).unwrap()
    }

    #[test]
    fn counts_n3() {
        let b = building(3, &[1, 1, 3]);
        let v = type_one(&b);
        assert_eq!(v.vertex_type(), 1);
        let up = b.neighbors_above(&v, 3).unwrap();
        assert_eq!(up.len(), 4);
        for w in &up {
            assert_eq!(w.vertex_type(), 3);
            assert!(b.contains(w, &v).unwrap());
            let down = b.neighbors_below(w, 1).unwrap();
            assert_eq!(down.len(), 28);
            assert!(down.contains(&v));
            for x in &down {
                assert!(b.contains(w, x).unwrap());
                assert_eq!(b.lattice(x).vertex_type(), Some(1));
            }
        }
        assert_eq!(b.neighbors_below(&v, 1).unwrap(), alloc::vec![v.clone()]);
        assert_eq!(b.neighbors_above(&v, 1).unwrap(), alloc::vec![v.clone()]);
    }

    #[test]
    fn counts_n4_and_p5() {
        let b = building(3, &[1, 1, 1, 3]);
        let v = type_one(&b);
        assert_eq!(b.neighbors_above(&v, 3).unwrap().len(), 28);
        let b5 = building(5, &[1, 1, 5]);
        let v5 = type_one(&b5);
        let up = b5.neighbors_above(&v5, 3).unwrap();
        assert_eq!(up.len(), 6);
        assert_eq!(b5.neighbors_below(&up[0], 1).unwrap().len(), 126);
    }

    #[test]
    fn counts_match_finite_geometry() {
        let b = building(3, &[1, 1, 1, 1, 3]);
        let v = type_one(&b);
        let up = b.neighbors_above(&v, 3).unwrap();
        let w = &up[0];
        let fa = b.finite_above(w).unwrap();
        let fb = b.finite_below(w).unwrap();
        assert_eq!(fa.dim(), 2);
        assert_eq!(fb.dim(), 3);
        assert_eq!(b.neighbors_above(w, 5).unwrap().len(), fa.isotropic_subspaces(1).len());
        assert_eq!(b.neighbors_below(w, 1).unwrap().len(), fb.isotropic_subspaces(1).len());
    }

    #[test]
    fn pruned_below_keeps_every_window_vertex() {
        let b = building(3, &[1, 1, 1, 3]);
        let seed = type_one(&b);
        let gamma = b.fast().anchor(seed.key()).unwrap();
        let ball = super::ball(&b, &seed, 2).unwrap();
        let tops: Vec<&Vertex> = ball.vertices().iter().filter(|v| v.vertex_type() == 3).take(12).collect();
        assert!(!tops.is_empty());
        let (mut kept, mut pruned) = (0, 0);
        for v in tops {
            for &(a, bb, c) in &[(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1), (1, 1, 2), (2, 1, 2)] {
                let inside = |w: &Vertex| {
                    let (x, y) = b.fast().window_exponents(&gamma, w.key()).unwrap();
                    x <= a && y <= bb && x + y <= c
                };
                let mut want: Vec<Vertex> = b.all_below(v).unwrap().into_iter().filter(|w| inside(w)).collect();
                let mut got: Vec<Vertex> =
                    b.below_within(v, &gamma, a, bb, c).unwrap().into_iter().filter(|w| inside(w)).collect();
                let raw = b.below_within(v, &gamma, a, bb, c).unwrap().len();
                kept += want.len();
                pruned += b.all_below(v).unwrap().len() - raw;
                want.sort();
                got.sort();
                assert_eq!(got, want);
            }
        }
        assert!(kept > 0 && pruned > 0);
    }
}
