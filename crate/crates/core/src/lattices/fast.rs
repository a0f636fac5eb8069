//! Full-rank lattices as exact canonical keys, with the hot operations done modulo p^K.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::linalg::{self, Mat};
use super::modular::{self, hnf, smith, Ring, Z2};
use super::{HermSpace, Lattice};
use crate::error::{Error, Result};
use crate::scalars::{ExtScalar, PadicContext};

/// Canonical form of a full-rank lattice `p^{-shift}·M`, M lower triangular with pivots
/// `p^{e_i}` and entries left of a pivot reduced into [0, p^{e_i}).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeKey {
    shift: i64,
    ent: Box<[Z2]>,
    exps: Box<[u8]>,
    expo: u32,
}

impl LatticeKey {
    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Pivot exponents, one per row.
    pub fn pivot_exponents(&self) -> impl Iterator<Item = u32> + '_ {
        self.exps.iter().map(|&e| e as u32)
    }

    pub fn exponent_sum(&self) -> i64 {
        self.exps.iter().map(|&e| e as i64).sum()
    }

    /// Least a with p^a·Z_{p²}ⁿ ⊆ M.
    pub fn exponent(&self) -> u32 {
        self.expo
    }

    /// Entry of M at (row, col); zero above the diagonal.
    pub fn entry(&self, row: usize, col: usize) -> Z2 {
        if row < col {
            Z2::ZERO
        } else {
            self.ent[offset(self.dim(), col) + row - col]
        }
    }

    /// Columns of M as exact non-negative integers.
    pub fn columns(&self) -> Vec<Vec<Z2>> {
        let n = self.dim();
        (0..n).map(|j| (0..n).map(|i| self.entry(i, j)).collect()).collect()
    }

    /// The unique lattice of the zero space.
    pub fn empty() -> Self {
        Self { shift: 0, ent: Box::new([]), exps: Box::new([]), expo: 0 }
    }

    /// p^j·Λ.
    pub fn scaled(&self, j: i64) -> Self {
        let mut k = self.clone();
        k.shift -= j;
        k
    }
}

#[inline]
fn offset(n: usize, j: usize) -> usize {
    j * n - j * j.saturating_sub(1) / 2
}

/// Element of the frame change x ↦ P·x between two hermitian spaces, `P = p^{-pi}·P0`.
#[derive(Clone, Debug)]
pub struct Transform {
    pi: i64,
    p0: Vec<Vec<Z2>>,
    c: u32,
    rows: usize,
}

/// Reference lattice Γ for the containment exponents α, β.
#[derive(Clone, Debug)]
pub struct Anchor {
    key: LatticeKey,
    x: Vec<Vec<Z2>>,
    prec: u32,
}

impl Anchor {
    pub fn key(&self) -> &LatticeKey {
        &self.key
    }
}

/// Linear functional used for pairing valuations: y = p^{-zeta}·y0 with y0 integral.
#[derive(Clone, Debug)]
pub struct Probe {
    zeta: i64,
    y0: Vec<Z2>,
    conj: bool,
}

/// A hermitian space together with the modular machinery for its full-rank lattices.
#[derive(Debug)]
pub struct FastSpace {
    space: Arc<HermSpace>,
    top: Ring,
    gamma0: i64,
    g0: Vec<Vec<Z2>>,
    gamma1: i64,
    g1: Vec<Vec<Z2>>,
    c1: u32,
}

fn scaled_integral(ctx: &PadicContext, m: &Mat) -> (i64, Mat) {
    let v = linalg::min_valuation(ctx, m.iter().flatten()).unwrap_or(0);
    let s = ctx.p_pow(-v);
    (-v, m.iter().map(|r| r.iter().map(|x| ctx.mul(x, &s)).collect()).collect())
}

fn exponent_of(ctx: &PadicContext, m: &Mat) -> u32 {
    let n = m.len();
    let s = linalg::local_smith(ctx, m, n);
    s.exponents.iter().copied().max().unwrap_or(0) as u32
}

impl FastSpace {
    pub fn new(space: Arc<HermSpace>) -> Result<Self> {
        let ctx = *space.ctx();
        let top = Ring::new(ctx.p(), ctx.eps(), modular::max_precision(ctx.p()))?;
        let (gamma0, g0e) = scaled_integral(&ctx, space.gram());
        let (gamma1, g1e) = scaled_integral(&ctx, space.gram_inverse());
        let c1 = exponent_of(&ctx, &g1e);
        let red = |m: &Mat| m.iter().map(|r| r.iter().map(|x| top.from_ext(x)).collect()).collect();
        Ok(Self { g0: red(&g0e), g1: red(&g1e), space, top, gamma0, gamma1, c1 })
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

    pub fn p(&self) -> u64 {
        self.top.p()
    }

    pub fn ring(&self, k: u32) -> Result<Ring> {
        if k > self.top.precision() {
            return Err(Error::PrecisionExceeded { needed: k, max: self.top.precision() });
        }
        Ok(modular::reduce_ring_to(&self.top, k))
    }

    fn ring_i(&self, k: i64) -> Result<Ring> {
        if k > u32::MAX as i64 {
            return Err(Error::PrecisionExceeded { needed: u32::MAX, max: self.top.precision() });
        }
        self.ring(k.max(0) as u32)
    }

    /// Key of `p^{-shift}·span(gens)` where the integral module spanned by `gens` contains
    /// p^K·Z_{p²}ⁿ.
    pub fn key_from_gens(&self, ring: &Ring, shift: i64, gens: &[Vec<Z2>]) -> LatticeKey {
        let n = self.dim();
        let (mut cols, mut exps) = hnf(ring, n, gens);
        let big = ring.precision();
        let mut v0 = big;
        for (t, c) in cols.iter().enumerate() {
            v0 = v0.min(exps[t]);
            for x in &c[t + 1..] {
                if !x.is_zero() {
                    v0 = v0.min(ring.val(*x));
                }
            }
        }
        if n == 0 {
            v0 = 0;
        }
        if v0 > 0 {
            for c in cols.iter_mut() {
                for x in c.iter_mut() {
                    *x = ring.div_pow(*x, v0);
                }
            }
            for e in exps.iter_mut() {
                *e -= v0;
            }
        }
        let k2 = big - v0;
        let r2 = modular::reduce_ring_to(ring, k2);
        let rows: Vec<Vec<Z2>> = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
        let (sm, _) = smith(&r2, &rows, false);
        let expo = sm.iter().copied().max().unwrap_or(0);
        let mut ent = Vec::with_capacity(n * (n + 1) / 2);
        for (j, c) in cols.iter().enumerate() {
            ent.extend_from_slice(&c[j..]);
        }
        LatticeKey {
            shift: shift - v0 as i64,
            ent: ent.into_boxed_slice(),
            exps: exps.iter().map(|&e| e as u8).collect(),
            expo,
        }
    }

    /// The standard lattice Z_{p²}ⁿ.
    pub fn standard(&self) -> LatticeKey {
        let r = self.ring(0).expect("K = 0");
        self.key_from_gens(&r, 0, &[])
    }

    pub fn key_of(&self, l: &Lattice) -> Result<LatticeKey> {
        if !l.is_full_rank() {
            return Err(Error::RankDeficient);
        }
        let total: i64 = l.pivots().iter().map(|&(_, e)| e as i64).sum();
        let ring = self.ring_i(total)?;
        let gens: Vec<Vec<Z2>> =
            l.integral_columns().iter().map(|c| c.iter().map(|x| ring.from_ext(x)).collect()).collect();
        Ok(self.key_from_gens(&ring, l.shift(), &gens))
    }

    /// Key of the lattice spanned by exact generators.
    pub fn key_from_exact(&self, gens: &[Vec<ExtScalar>]) -> Result<LatticeKey> {
        let l = Lattice::from_generators(self.space.clone(), gens)?;
        self.key_of(&l)
    }

    pub fn lattice_of(&self, key: &LatticeKey) -> Lattice {
        let n = self.dim();
        let s = self.ctx().p_pow(-key.shift);
        let gens: Vec<Vec<ExtScalar>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| {
                        let z = key.entry(i, j);
                        let x = ExtScalar::from_parts(z.a as i64, 1, z.b as i64, 1);
                        self.ctx().mul(&x, &s)
                    })
                    .collect()
            })
            .collect();
        Lattice::new(self.space.clone(), &gens).expect("canonical basis is independent")
    }

    fn cols_mod(&self, key: &LatticeKey, ring: &Ring) -> Vec<Vec<Z2>> {
        let n = self.dim();
        (0..n).map(|j| (0..n).map(|i| ring.reduce(key.entry(i, j))).collect()).collect()
    }

    /// p·H with H the Gram matrix in lattice coordinates, modulo p², or None if not integral.
    pub fn hp_mod_p2(&self, key: &LatticeKey) -> Result<Option<Vec<Vec<Z2>>>> {
        let n = self.dim();
        let s = 1 - 2 * key.shift - self.gamma0;
        let prec = if s >= 0 { (2 - s).max(0) } else { 2 - s };
        let ring = self.ring_i(prec)?;
        let m = self.cols_mod(key, &ring);
        let g0: Vec<Vec<Z2>> = self.g0.iter().map(|r| r.iter().map(|&x| ring.reduce(x)).collect()).collect();
        let mut t = vec![vec![Z2::ZERO; n]; n];
        for a in 0..n {
            for j in 0..n {
                let mut acc = Z2::ZERO;
                for b in j..n {
                    let mb = m[j][b];
                    if !mb.is_zero() && !g0[a][b].is_zero() {
                        acc = ring.add(acc, ring.mul(g0[a][b], ring.conj(mb)));
                    }
                }
                t[a][j] = acc;
            }
        }
        let r2 = self.ring(2)?;
        let mut y = vec![vec![Z2::ZERO; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Z2::ZERO;
                for a in i..n {
                    let ma = m[i][a];
                    if !ma.is_zero() {
                        acc = ring.add(acc, ring.mul(ma, t[a][j]));
                    }
                }
                y[i][j] = if s >= 0 {
                    if s >= 2 {
                        Z2::ZERO
                    } else {
                        r2.mul(r2.reduce(acc), r2.from_int(self.p().pow(s as u32) as i64))
                    }
                } else {
                    let d = (-s) as u32;
                    if !acc.is_zero() && ring.val(acc) < d {
                        return Ok(None);
                    }
                    r2.reduce(ring.div_pow(acc, d))
                };
            }
        }
        Ok(Some(y))
    }

    /// Type of the lattice if it is a vertex.
    pub fn vertex_type(&self, key: &LatticeKey) -> Result<Option<usize>> {
        let n = self.dim() as i64;
        let Some(hp) = self.hp_mod_p2(key)? else { return Ok(None) };
        let vdet = n + self.space.det_valuation() + 2 * (key.exponent_sum() - n * key.shift);
        let r1 = self.ring(1)?;
        let rk = modular::rank_mod_p(&r1, &hp) as i64;
        Ok((vdet == n - rk).then_some(rk as usize))
    }

    pub fn sum(&self, x: &LatticeKey, y: &LatticeKey) -> Result<LatticeKey> {
        let k = x.shift.max(y.shift);
        let (dx, dy) = ((k - x.shift) as u32, (k - y.shift) as u32);
        let prec = (dx + x.expo).min(dy + y.expo);
        let ring = self.ring(prec)?;
        let mut gens = Vec::with_capacity(2 * self.dim());
        for (key, d) in [(x, dx), (y, dy)] {
            if d >= prec {
                continue;
            }
            let f = ring.from_int(ring.pow(d) as i64);
            for c in self.cols_mod(key, &ring) {
                gens.push(c.into_iter().map(|z| ring.mul(z, f)).collect());
            }
        }
        Ok(self.key_from_gens(&ring, k, &gens))
    }

    /// Bilinear dual {x : xᵀy ∈ Z_{p²} for all y ∈ Λ}.
    pub fn std_dual(&self, key: &LatticeKey) -> Result<LatticeKey> {
        let n = self.dim();
        let a = key.expo;
        let ring = self.ring(a + 1)?;
        let rows: Vec<Vec<Z2>> = (0..n).map(|i| (0..n).map(|j| ring.reduce(key.entry(i, j))).collect()).collect();
        let (d, r) = smith(&ring, &rows, true);
        let r = r.expect("tracked");
        let gens: Vec<Vec<Z2>> = (0..n)
            .map(|i| {
                let f = ring.from_int(ring.pow(a - d[i]) as i64);
                r[i].iter().map(|&z| ring.mul(z, f)).collect()
            })
            .collect();
        Ok(self.key_from_gens(&ring, a as i64 - key.shift, &gens))
    }

    /// Hermitian dual Λ^♯.
    pub fn dual(&self, key: &LatticeKey) -> Result<LatticeKey> {
        let n = self.dim();
        let st = self.std_dual(key)?;
        let prec = st.expo + self.c1;
        let ring = self.ring(prec)?;
        let x = self.cols_mod(&st, &ring);
        let g1: Vec<Vec<Z2>> = self.g1.iter().map(|r| r.iter().map(|&z| ring.reduce(z)).collect()).collect();
        let gens: Vec<Vec<Z2>> = x
            .iter()
            .map(|c| {
                (0..n)
                    .map(|i| {
                        let mut acc = Z2::ZERO;
                        for (j, &z) in c.iter().enumerate() {
                            acc = ring.add(acc, ring.mul(ring.conj(g1[i][j]), ring.conj(z)));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(self.key_from_gens(&ring, st.shift + self.gamma1, &gens))
    }

    pub fn intersect(&self, x: &LatticeKey, y: &LatticeKey) -> Result<LatticeKey> {
        let s = self.sum(&self.std_dual(x)?, &self.std_dual(y)?)?;
        self.std_dual(&s)
    }

    /// `small ⊆ big`.
    pub fn contains(&self, big: &LatticeKey, small: &LatticeKey) -> Result<bool> {
        if small.shift <= big.shift && big.expo == 0 {
            return Ok(true);
        }
        Ok(&self.sum(big, small)? == big)
    }

    /// Lattice spanned by `p^{-a_i}·e_i` on the first coordinates and `sub` on the remaining ones.
    pub fn block(&self, pre: &[i64], sub: &LatticeKey) -> Result<LatticeKey> {
        let n = self.dim();
        let m = pre.len();
        if m + sub.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: m + sub.dim() });
        }
        let (k0, p0) = if sub.dim() == 0 { (i64::MIN, 0) } else { (sub.shift, sub.expo as i64) };
        let k = pre.iter().copied().fold(k0, i64::max).max(if m + sub.dim() == 0 { 0 } else { i64::MIN });
        let prec = pre.iter().map(|&a| k - a).fold(if sub.dim() == 0 { 0 } else { k - sub.shift + p0 }, i64::max);
        let ring = self.ring_i(prec)?;
        let mut gens = Vec::with_capacity(n);
        for (i, &a) in pre.iter().enumerate() {
            let mut c = vec![Z2::ZERO; n];
            if ((k - a) as u32) < ring.precision() {
                c[i] = ring.from_int(ring.pow((k - a) as u32) as i64);
            }
            gens.push(c);
        }
        let d = (k - sub.shift) as u32;
        if d < ring.precision() {
            let f = ring.from_int(ring.pow(d) as i64);
            for j in 0..sub.dim() {
                let mut c = vec![Z2::ZERO; n];
                for i in j..sub.dim() {
                    c[m + i] = ring.mul(ring.reduce(sub.entry(i, j)), f);
                }
                gens.push(c);
            }
        }
        Ok(self.key_from_gens(&ring, k, &gens))
    }

    /// ⊕ p^{-a_i}·Z_{p²}e_i.
    pub fn diagonal(&self, a: &[i64]) -> Result<LatticeKey> {
        self.block(a, &LatticeKey::empty())
    }

    /// Frame change into this space given the exact matrix of the map (columns = images of the
    /// source basis vectors, expressed in this space's coordinates).
    pub fn transform(&self, p: &Mat) -> Result<Transform> {
        let ctx = self.ctx();
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: p.len() });
        }
        let (pi, p0) = scaled_integral(ctx, p);
        let c = exponent_of(ctx, &p0);
        let p0 = p0.iter().map(|r| r.iter().map(|x| self.top.from_ext(x)).collect()).collect();
        Ok(Transform { pi, p0, c, rows: p.len() })
    }

    /// Image of a source lattice under a frame change.
    pub fn map(&self, tr: &Transform, src: &LatticeKey) -> Result<LatticeKey> {
        let n = tr.rows;
        let prec = src.expo + tr.c;
        let ring = self.ring(prec)?;
        let m = src.dim();
        let gens: Vec<Vec<Z2>> = (0..m)
            .map(|j| {
                (0..n)
                    .map(|i| {
                        let mut acc = Z2::ZERO;
                        for a in j..m {
                            let z = src.entry(a, j);
                            if !z.is_zero() {
                                acc = ring.add(acc, ring.mul(ring.reduce(tr.p0[i][a]), ring.reduce(z)));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(self.key_from_gens(&ring, src.shift + tr.pi, &gens))
    }

    /// Γ with p^{expo}·M⁻¹, known modulo p^{prec}.
    pub fn anchor(&self, key: &LatticeKey) -> Result<Anchor> {
        let n = self.dim();
        let ring = &self.top;
        let k = ring.precision();
        let loss: u32 = key.pivot_exponents().sum();
        let prec = k.saturating_sub(loss);
        let rhs = if key.expo < k { ring.from_int(ring.pow(key.expo) as i64) } else { Z2::ZERO };
        let mut x = vec![vec![Z2::ZERO; n]; n];
        for c in 0..n {
            for i in c..n {
                let mut acc = if i == c { rhs } else { Z2::ZERO };
                for j in c..i {
                    let m = key.entry(i, j);
                    if !m.is_zero() {
                        acc = ring.sub(acc, ring.mul(ring.reduce(m), x[j][c]));
                    }
                }
                let e = key.exps[i] as u32;
                if ring.val(acc) < e {
                    return Err(Error::Singular);
                }
                x[i][c] = ring.div_pow(acc, e);
            }
        }
        Ok(Anchor { key: key.clone(), x, prec })
    }

    /// Coordinates mod p of the generators of p^j·`small` in the basis of `big`, or `None` if
    /// p^j·`small` ⊄ `big`.
    pub fn coords_mod_p(&self, big: &Anchor, small: &LatticeKey, j: u32) -> Result<Option<Vec<Vec<Z2>>>> {
        let n = self.dim();
        let t = big.key.shift - small.shift + j as i64 - big.key.expo as i64;
        if t >= 1 {
            return Ok(Some(vec![vec![Z2::ZERO; n]; n]));
        }
        let e = (-t) as u32;
        if e + 1 > big.prec {
            return Err(Error::PrecisionExceeded { needed: e + 1, max: big.prec });
        }
        let ring = self.ring_i(e as i64 + 1)?;
        let mut out = Vec::with_capacity(n);
        for c in 0..n {
            let mut col = vec![Z2::ZERO; n];
            for (i, slot) in col.iter_mut().enumerate() {
                let mut acc = Z2::ZERO;
                for a in c..n {
                    let z = small.entry(a, c);
                    if !z.is_zero() {
                        acc = ring.add(acc, ring.mul(ring.reduce(big.x[i][a]), ring.reduce(z)));
                    }
                }
                if ring.val(acc) < e {
                    return Ok(None);
                }
                *slot = ring.div_pow(acc, e);
            }
            out.push(col);
        }
        Ok(Some(out))
    }

    /// (α, β): least α, β ≥ 0 with p^α·Γ ⊆ Λ ⊆ p^{-β}·Γ.
    pub fn window_exponents(&self, anchor: &Anchor, key: &LatticeKey) -> Result<(u32, u32)> {
        let n = self.dim();
        let prec = anchor.key.expo + key.expo;
        if prec > anchor.prec {
            return Err(Error::PrecisionExceeded { needed: prec, max: anchor.prec });
        }
        let ring = self.ring(prec)?;
        let mut y = vec![vec![Z2::ZERO; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Z2::ZERO;
                for a in j..n {
                    let z = key.entry(a, j);
                    if !z.is_zero() {
                        acc = ring.add(acc, ring.mul(ring.reduce(anchor.x[i][a]), ring.reduce(z)));
                    }
                }
                y[i][j] = acc;
            }
        }
        let (e, _) = smith(&ring, &y, false);
        let base = anchor.key.shift - key.shift - anchor.key.expo as i64;
        let hi = e.iter().map(|&x| base + x as i64).max().unwrap_or(0);
        let lo = e.iter().map(|&x| base + x as i64).min().unwrap_or(0);
        Ok((hi.max(0) as u32, (-lo).max(0) as u32))
    }

    /// Probe for v(h(x, ·)).
    pub fn hermitian_probe(&self, x: &[ExtScalar]) -> Result<Probe> {
        let y = self.space.left_form(x);
        self.probe(&y, true)
    }

    /// Probe for the coordinate functional pairing x with the bilinear dual.
    pub fn coordinate_probe(&self, x: &[ExtScalar]) -> Result<Probe> {
        self.probe(x, false)
    }

    fn probe(&self, y: &[ExtScalar], conj: bool) -> Result<Probe> {
        let ctx = self.ctx();
        let v = linalg::min_valuation(ctx, y.iter()).ok_or(Error::ZeroVector)?;
        let s = ctx.p_pow(-v);
        let y0 = y.iter().map(|z| self.top.from_ext(&ctx.mul(z, &s))).collect();
        Ok(Probe { zeta: -v, y0, conj })
    }

    /// min_j v(y(b_j)) over a basis of Λ, capped at `upto`; y(b) = yᵀ·conj(b) for hermitian
    /// probes and yᵀ·b otherwise.
    pub fn pairing_valuation(&self, key: &LatticeKey, probe: &Probe, upto: i64) -> Result<i64> {
        let base = -probe.zeta - key.shift;
        let prec = upto - base;
        if prec <= 0 {
            return Ok(upto);
        }
        let ring = self.ring_i(prec)?;
        let n = self.dim();
        let mut best = prec as u32;
        for j in 0..n {
            let mut acc = Z2::ZERO;
            for i in j..n {
                let z = ring.reduce(key.entry(i, j));
                if z.is_zero() {
                    continue;
                }
                let z = if probe.conj { ring.conj(z) } else { z };
                acc = ring.add(acc, ring.mul(ring.reduce(probe.y0[i]), z));
            }
            if !acc.is_zero() {
                best = best.min(ring.val(acc));
            }
        }
        Ok(base + best as i64)
    }
}
