//! Special vectors: fundamental matrices, diagonalization, cycle membership and
//! Kudla-Rapoport strata.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec::Vec;

use once_cell::race::OnceBox;

use crate::building::{Building, Vertex};
use crate::error::{Error, Result};
use crate::lattices::linalg::{self, Mat};
use crate::lattices::{FastSpace, HermSpace, Lattice, LatticeKey, Probe};
use crate::scalars::ExtScalar;

/// T(x̲) = (h(x_i, x_j))_{i,j}.
pub fn fundamental_matrix(space: &HermSpace, x: &[Vec<ExtScalar>]) -> Mat {
    space.gram_of(x)
}

/// Result of diagonalizing a family of vectors: y̲ = x̲·g with h(y_i, y_j) = 0 for i ≠ j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonalization {
    /// Unimodular change of basis, y_j = Σ_i x_i·g_ij.
    pub g: Mat,
    pub y: Vec<Vec<ExtScalar>>,
    /// h(y_i, y_i).
    pub norms: Vec<ExtScalar>,
    /// v(h(y_i, y_i)), ascending.
    pub valuations: Vec<i64>,
}

fn add_scaled(ctx: &crate::scalars::PadicContext, v: &mut [ExtScalar], c: &ExtScalar, w: &[ExtScalar]) {
    for (a, b) in v.iter_mut().zip(w) {
        if !b.is_zero() {
            *a += &ctx.mul(c, b);
        }
    }
}

/// Orthogonalize `x` by unimodular operations, sorting by valuation.
pub fn diagonalize(space: &HermSpace, x: &[Vec<ExtScalar>]) -> Result<Diagonalization> {
    let ctx = space.ctx();
    let m = x.len();
    let mut y: Vec<Vec<ExtScalar>> = x.to_vec();
    // columns of g
    let mut gc: Vec<Vec<ExtScalar>> = linalg::columns(&linalg::identity(m));
    let val = |z: &ExtScalar| ctx.valuation(z).finite();
    for s in 0..m {
        let t = space.gram_of(&y[s..]);
        let mut best: Option<(i64, usize, usize)> = None;
        for i in 0..m - s {
            for j in 0..m - s {
                if let Some(v) = val(&t[i][j]) {
                    let better = match best {
                        None => true,
                        Some((bv, bi, bj)) => v < bv || (v == bv && i == j && bi != bj),
                    };
                    if better {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, i, j)) = best else { return Err(Error::SingularT) };
        let piv = if i == j {
            s + i
        } else {
            let (i, j) = (s + i, s + j);
            let mut done = false;
            for lam in [ExtScalar::one(), ExtScalar::sqrt_eps()] {
                let mut cand = y[i].clone();
                add_scaled(ctx, &mut cand, &lam, &y[j]);
                if val(&space.h(&cand, &cand)) == Some(v) {
                    y[i] = cand;
                    let gj = gc[j].clone();
                    add_scaled(ctx, &mut gc[i], &lam, &gj);
                    done = true;
                    break;
                }
            }
            debug_assert!(done);
            i
        };
        y.swap(s, piv);
        gc.swap(s, piv);
        let hs = space.h(&y[s], &y[s]);
        let inv = ctx.inv(&hs).ok_or(Error::SingularT)?;
        for k in s + 1..m {
            let c = ctx.mul(&space.h(&y[k], &y[s]), &inv);
            if c.is_zero() {
                continue;
            }
            let neg = -c;
            let ys = y[s].clone();
            add_scaled(ctx, &mut y[k], &neg, &ys);
            let gs = gc[s].clone();
            add_scaled(ctx, &mut gc[k], &neg, &gs);
        }
    }
    let mut idx: Vec<usize> = (0..m).collect();
    let norms: Vec<ExtScalar> = y.iter().map(|v| space.h(v, v)).collect();
    let vals: Vec<i64> = norms.iter().map(|z| val(z).expect("nonsingular")).collect();
    idx.sort_by_key(|&i| vals[i]);
    let y: Vec<Vec<ExtScalar>> = idx.iter().map(|&i| y[i].clone()).collect();
    let gc: Vec<Vec<ExtScalar>> = idx.iter().map(|&i| gc[i].clone()).collect();
    Ok(Diagonalization {
        g: linalg::from_columns(m, &gc),
        y,
        norms: idx.iter().map(|&i| norms[i].clone()).collect(),
        valuations: idx.iter().map(|&i| vals[i]).collect(),
    })
}

/// Kudla-Rapoport stratum (a, b) of a vertex with respect to one vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KrStratum {
    pub a: i64,
    pub b: i64,
}

/// Precomputed functionals for one special vector on a given space.
#[derive(Clone, Debug)]
pub struct VectorProbe {
    herm: Probe,
    coord: Probe,
    r: i64,
}

impl VectorProbe {
    pub fn new(fast: &FastSpace, x: &[ExtScalar]) -> Result<Self> {
        let ctx = fast.ctx();
        let r = ctx.valuation(&fast.space().h(x, x)).finite().ok_or(Error::ZeroVector)?;
        Ok(Self { herm: fast.hermitian_probe(x)?, coord: fast.coordinate_probe(x)?, r })
    }

    pub fn valuation(&self) -> i64 {
        self.r
    }

    /// max{k : p^{-k}x ∈ Λ^♯}, capped at `cap`.
    pub fn dual_depth(&self, fast: &FastSpace, key: &LatticeKey, cap: i64) -> Result<i64> {
        fast.pairing_valuation(key, &self.herm, cap)
    }

    /// Whether p^{-k}x ∈ Λ^♯.
    pub fn in_dual(&self, fast: &FastSpace, key: &LatticeKey, k: i64) -> Result<bool> {
        Ok(self.dual_depth(fast, key, k)? >= k)
    }

    pub fn stratum(&self, fast: &FastSpace, key: &LatticeKey) -> Result<KrStratum> {
        let cap = self.r.max(0) + 2;
        let b = fast.pairing_valuation(key, &self.herm, cap)?;
        let a = fast.pairing_valuation(&fast.std_dual(key)?, &self.coord, cap)?;
        Ok(KrStratum { a, b })
    }
}

/// The data of x̲ used throughout: fundamental matrix, diagonalization and complement.
#[derive(Debug)]
pub struct SpecialTuple {
    space: Arc<HermSpace>,
    x: Vec<Vec<ExtScalar>>,
    t: Mat,
    diag: Diagonalization,
    complement: Vec<Vec<ExtScalar>>,
    probes: OnceBox<Vec<VectorProbe>>,
}

impl Clone for SpecialTuple {
    fn clone(&self) -> Self {
        Self {
            space: self.space.clone(),
            x: self.x.clone(),
            t: self.t.clone(),
            diag: self.diag.clone(),
            complement: self.complement.clone(),
            probes: OnceBox::new(),
        }
    }
}

impl SpecialTuple {
    pub fn new(space: Arc<HermSpace>, x: Vec<Vec<ExtScalar>>) -> Result<Self> {
        let n = space.dim();
        if x.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for v in &x {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
            if v.iter().all(ExtScalar::is_zero) {
                return Err(Error::ZeroVector);
            }
        }
        let ctx = space.ctx();
        let t = fundamental_matrix(&space, &x);
        if !t.iter().flatten().all(|z| ctx.is_integral(z)) {
            return Err(Error::NonIntegralT);
        }
        let diag = diagonalize(&space, &x)?;
        let rows: Mat = x
            .iter()
            .map(|xi| {
                let c: Vec<ExtScalar> = xi.iter().map(ExtScalar::conj).collect();
                linalg::mat_vec(ctx, space.gram(), &c)
            })
            .collect();
        let complement = linalg::kernel(ctx, &rows, n);
        Ok(Self { space, x, t, diag, complement, probes: OnceBox::new() })
    }

    pub fn space(&self) -> &Arc<HermSpace> {
        &self.space
    }

    pub fn vectors(&self) -> &[Vec<ExtScalar>] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn fundamental_matrix(&self) -> &Mat {
        &self.t
    }

    pub fn diagonalization(&self) -> &Diagonalization {
        &self.diag
    }

    /// r_1 ≤ … ≤ r_m.
    pub fn valuations(&self) -> &[i64] {
        &self.diag.valuations
    }

    /// #{i : r_i = 0}.
    pub fn m1(&self) -> usize {
        self.valuations().iter().filter(|&&r| r == 0).count()
    }

    /// Basis of the orthogonal complement of span(x̲).
    pub fn complement_basis(&self) -> &[Vec<ExtScalar>] {
        &self.complement
    }

    /// Probes for the diagonalized vectors on the tuple's own space.
    pub fn probes(&self, fast: &FastSpace) -> Result<&[VectorProbe]> {
        if fast.space().as_ref() != self.space.as_ref() {
            return Err(Error::SpaceMismatch);
        }
        if let Some(p) = self.probes.get() {
            return Ok(p);
        }
        let p = self.diag.y.iter().map(|y| VectorProbe::new(fast, y)).collect::<Result<Vec<_>>>()?;
        Ok(self.probes.get_or_init(|| Box::new(p)))
    }
}

/// Λ ∈ S(x̲): every x_i lies in Λ^♯.
pub fn in_cycle(b: &Building, v: &Vertex, s: &SpecialTuple) -> Result<bool> {
    let fast = b.fast();
    for pr in s.probes(fast)? {
        if !pr.in_dual(fast, v.key(), 0)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact membership of all vectors in Λ^♯.
pub fn in_cycle_exact(l: &Lattice, x: &[Vec<ExtScalar>]) -> Result<bool> {
    let d = l.dual()?;
    for v in x {
        if !d.member(v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// (a, b) for a vertex of `b` and a single vector.
pub fn kr_stratum(b: &Building, v: &Vertex, x: &[ExtScalar]) -> Result<KrStratum> {
    VectorProbe::new(b.fast(), x)?.stratum(b.fast(), v.key())
}

/// Exact (a, b): minimal valuation of the Λ-coordinates of x, and of h(x, b_j) over a basis.
pub fn kr_stratum_exact(l: &Lattice, x: &[ExtScalar]) -> Result<KrStratum> {
    let ctx = l.ctx();
    let c = l.coordinates(x)?;
    let a = linalg::min_valuation(ctx, c.iter()).ok_or(Error::ZeroVector)?;
    let hs: Vec<ExtScalar> = l.basis().iter().map(|bj| l.space().h(x, bj)).collect();
    let b = linalg::min_valuation(ctx, hs.iter()).ok_or(Error::ZeroVector)?;
    Ok(KrStratum { a, b })
}

/// Λ = (Λ ∩ Q_{p²}x) ⊕ (Λ ∩ x^⊥).
pub fn splits_off(l: &Lattice, x: &[ExtScalar]) -> Result<bool> {
    let space = l.space();
    let line = l.intersect_span(&[x.to_vec()])?;
    let c: Vec<ExtScalar> = x.iter().map(ExtScalar::conj).collect();
    let row = linalg::mat_vec(space.ctx(), space.gram(), &c);
    let perp = l.intersect_annihilator(&alloc::vec![row])?;
    Ok(&line.sum(&perp)? == l)
}

/// Every max-type vertex above Λ lies in S(x̲).
pub fn all_components_above_in_cycle(b: &Building, v: &Vertex, s: &SpecialTuple) -> Result<bool> {
    for w in b.neighbors_above(v, b.max_type())? {
        if !in_cycle(b, &w, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// t₀: the largest odd integer ≤ n − m₁, or None when n − m₁ ≤ 0.
pub fn cycle_dimension_type(s: &SpecialTuple) -> Option<usize> {
    let k = s.space.dim() as i64 - s.m1() as i64;
    if k <= 0 {
        return None;
    }
    Some(if k % 2 == 1 { k as usize } else { k as usize - 1 })
}

/// max(n⁺_even, n⁺_odd) ≤ 1 for a valuation profile.
pub fn irreducible_profile(r: &[i64]) -> bool {
    let even = r.iter().filter(|&&x| x >= 2 && x % 2 == 0).count();
    let odd = r.iter().filter(|&&x| x >= 3 && x % 2 == 1).count();
    even.max(odd) <= 1
}

/// Irreducibility criterion for m = n.
pub fn irreducibility_criterion(s: &SpecialTuple) -> Result<bool> {
    if s.len() != s.space.dim() {
        return Err(Error::DimensionMismatch { expected: s.space.dim(), found: s.len() });
    }
    Ok(irreducible_profile(s.valuations()))
}
