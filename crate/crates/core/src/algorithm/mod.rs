//! The recursive construction of the support S(x̲): sub-space chain, the maps Φ, and the
//! staged closure computation.

mod window;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

pub use window::Bounds;

use crate::building::{Building, Vertex};
use crate::cycles::{diagonalize, SpecialTuple, VectorProbe};
use crate::error::{Error, Result};
use crate::lattices::{Anchor, FastSpace, HermSpace, LatticeKey, Transform};
use crate::scalars::ExtScalar;

fn ceil_half(r: i64) -> i64 {
    r.div_euclid(2) + r.rem_euclid(2)
}

/// One complex L_{2s} of the chain, in the coordinates f_{m_{2s}+1}, …, f_n of the diagonal frame.
#[derive(Debug)]
pub struct Level {
    s: usize,
    offset: usize,
    building: Arc<Building>,
    seed: Vertex,
    anchor: Anchor,
    probes: Vec<VectorProbe>,
}

impl Level {
    pub fn stage(&self) -> usize {
        self.s
    }

    /// m_{2s}.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn building(&self) -> &Arc<Building> {
        &self.building
    }

    /// Γ_{2s}.
    pub fn seed(&self) -> &Vertex {
        &self.seed
    }

    pub fn anchor(&self) -> &Anchor {
        &self.anchor
    }

    /// Probes for x_i, i > m_{2s}, in this level's coordinates.
    pub fn probes(&self) -> &[VectorProbe] {
        &self.probes
    }

    pub fn in_bounds(&self, v: &Vertex, b: Option<Bounds>) -> Result<bool> {
        match b {
            None => Ok(true),
            Some(b) => {
                let (a, c) = self.building.fast().window_exponents(&self.anchor, v.key())?;
                Ok(b.admits(a, c))
            }
        }
    }
}

/// The diagonal frame f = (y_1..y_m, z_{m+1}..z_n) and the complexes L_0, L_2, …
#[derive(Debug)]
pub struct SubSpaceChain {
    tuple: Arc<SpecialTuple>,
    frame: Vec<Vec<ExtScalar>>,
    norms: Vec<ExtScalar>,
    r: Vec<i64>,
    g: Vec<i64>,
    levels: Vec<Level>,
    ambient: Arc<Building>,
    to_ambient: Transform,
    from_ambient: Transform,
    ambient_seed: Vertex,
    ambient_anchor: Anchor,
}

impl SubSpaceChain {
    pub fn new(tuple: Arc<SpecialTuple>) -> Result<Self> {
        let ambient = Arc::new(Building::new(tuple.space().clone())?);
        Self::with_ambient(tuple, ambient)
    }

    pub fn with_ambient(tuple: Arc<SpecialTuple>, ambient: Arc<Building>) -> Result<Self> {
        let space = tuple.space().clone();
        let ctx = *space.ctx();
        let n = space.dim();
        let diag = tuple.diagonalization();
        let m = diag.y.len();
        let mut frame = diag.y.clone();
        let mut norms = diag.norms.clone();
        let r = diag.valuations.clone();
        let mut g = Vec::new();
        if m < n {
            let dz = diagonalize(&space, tuple.complement_basis())?;
            frame.extend(dz.y);
            norms.extend(dz.norms);
            g = dz.valuations;
        }
        let smax = r.last().copied().unwrap_or(0).max(0) as usize / 2;
        let mut levels = Vec::with_capacity(smax + 2);
        for s in 0..=smax + 1 {
            let offset = r.iter().filter(|&&ri| ri < 2 * s as i64).count();
            let hs = HermSpace::diagonal(ctx, &norms[offset..])?;
            let building = Arc::new(Building::new(Arc::new(hs))?);
            let fast = building.fast().clone();
            let exps: Vec<i64> =
                r[offset..].iter().map(|&ri| ceil_half(ri)).chain(g.iter().map(|&gj| ceil_half(gj))).collect();
            let seed = building
                .vertex_from_key(fast.diagonal(&exps)?)
                .map_err(|e| Error::SeedFailure(format!("level {}: {}", 2 * s, e)))?;
            let anchor = fast.anchor(seed.key())?;
            let dim = n - offset;
            let probes = (offset..m)
                .map(|i| {
                    let e: Vec<ExtScalar> =
                        (0..dim).map(|j| if j == i - offset { ExtScalar::one() } else { ExtScalar::zero() }).collect();
                    VectorProbe::new(&fast, &e)
                })
                .collect::<Result<Vec<_>>>()?;
            levels.push(Level { s, offset, building, seed, anchor, probes });
        }
        let pm: Vec<Vec<ExtScalar>> = (0..n).map(|i| (0..n).map(|j| frame[j][i].clone()).collect()).collect();
        let to_ambient = ambient.fast().transform(&pm)?;
        let inv = crate::lattices::linalg::inverse(&ctx, &pm).ok_or(Error::SingularT)?;
        let from_ambient = levels[0].building.fast().transform(&inv)?;
        let key = ambient.fast().map(&to_ambient, levels[0].seed.key())?;
        let ambient_seed = ambient.vertex_from_key(key).map_err(|e| Error::SeedFailure(format!("{}", e)))?;
        if !crate::cycles::in_cycle(&ambient, &ambient_seed, &tuple)? {
            return Err(Error::SeedFailure(String::from("seed is not in the support")));
        }
        let ambient_anchor = ambient.fast().anchor(ambient_seed.key())?;
        Ok(Self { tuple, frame, norms, r, g, levels, ambient, to_ambient, from_ambient, ambient_seed, ambient_anchor })
    }

    pub fn tuple(&self) -> &Arc<SpecialTuple> {
        &self.tuple
    }

    /// Frame vectors in ambient coordinates.
    pub fn frame(&self) -> &[Vec<ExtScalar>] {
        &self.frame
    }

    /// h(f_i, f_i).
    pub fn frame_norms(&self) -> &[ExtScalar] {
        &self.norms
    }

    /// r_1 ≤ … ≤ r_m.
    pub fn valuations(&self) -> &[i64] {
        &self.r
    }

    /// Valuations of the complement frame vectors.
    pub fn complement_valuations(&self) -> &[i64] {
        &self.g
    }

    /// Levels L_0, L_2, …, L_{2s_max+2}.
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, s: usize) -> &Level {
        &self.levels[s]
    }

    /// ⌊r_m/2⌋.
    pub fn top_stage(&self) -> usize {
        self.levels.len() - 2
    }

    /// m_r = #{i : r_i < r}.
    pub fn m_r(&self, r: i64) -> usize {
        self.r.iter().filter(|&&ri| ri < r).count()
    }

    pub fn ambient(&self) -> &Arc<Building> {
        &self.ambient
    }

    /// Γ_0 in ambient coordinates.
    pub fn seed_vertex(&self) -> &Vertex {
        &self.ambient_seed
    }

    pub fn ambient_anchor(&self) -> &Anchor {
        &self.ambient_anchor
    }

    /// Image of a vertex of L_0 in the ambient building.
    pub fn to_ambient(&self, v: &Vertex) -> Result<Vertex> {
        let key = self.ambient.fast().map(&self.to_ambient, v.key())?;
        self.ambient.vertex_from_key(key)
    }

    /// Image of an ambient vertex in L_0.
    pub fn from_ambient(&self, v: &Vertex) -> Result<Vertex> {
        let l0 = &self.levels[0].building;
        l0.vertex_from_key(l0.fast().map(&self.from_ambient, v.key())?)
    }

    /// Smallest bounds on L_0 holding the frame images of the given ambient vertices.
    pub fn bounds_for(&self, vs: &[Vertex]) -> Result<Bounds> {
        let l0 = &self.levels[0];
        let ex = crate::par::map(vs, |v| -> Result<(u32, u32)> {
            let w = self.from_ambient(v)?;
            l0.building.fast().window_exponents(&l0.anchor, w.key())
        });
        Ok(Bounds::hull(ex.into_iter().collect::<Result<Vec<_>>>()?))
    }

    /// Exponents a_i (⌈r_i/2⌉) of the summands prepended by Φ_s.
    pub fn phi_exponents(&self, s: usize) -> Vec<i64> {
        let lo = self.levels[s].offset;
        let hi = self.levels[s + 1].offset;
        self.r[lo..hi].iter().map(|&ri| ceil_half(ri)).collect()
    }

    /// Φ_s: L_{2s+2} → L_{2s}.
    pub fn phi_s(&self, s: usize, v: &Vertex) -> Result<Vertex> {
        self.phi_with(s, &self.phi_exponents(s), v)
    }

    fn phi_with(&self, s: usize, a: &[i64], v: &Vertex) -> Result<Vertex> {
        let lv = &self.levels[s];
        let key = lv.building.fast().block(a, v.key())?;
        lv.building.vertex_from_key(key)
    }

    /// The complex L_⊥ of span(x̲)^⊥ (the last level).
    pub fn complement_level(&self) -> &Level {
        self.levels.last().expect("nonempty chain")
    }

    fn single_vector(&self) -> Result<i64> {
        if self.r.len() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.r.len() });
        }
        Ok(self.r[0])
    }

    /// Φ for r(x) = 0: Λ_⊥ ↦ Z_{p²}x ⊕ Λ_⊥.
    pub fn phi_r0(&self, v: &Vertex) -> Result<Vertex> {
        match self.single_vector()? {
            0 => self.base_map(0, v),
            r => Err(Error::WrongValuation { expected: 0, found: r }),
        }
    }

    /// Φ for r(x) = 1: Λ_⊥ ↦ p^{-1}Z_{p²}x ⊕ Λ_⊥.
    pub fn phi_r1(&self, v: &Vertex) -> Result<Vertex> {
        match self.single_vector()? {
            1 => self.base_map(1, v),
            r => Err(Error::WrongValuation { expected: 1, found: r }),
        }
    }

    fn base_map(&self, a: i64, v: &Vertex) -> Result<Vertex> {
        let l0 = &self.levels[0];
        l0.building.vertex_from_key(l0.building.fast().block(&[a], v.key())?)
    }
}

/// Which description of S_s' to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step2 {
    /// Down-closure of max-type vertices at distance ≤ 1 from S_s.
    Distance,
    /// Vertices sharing an over-vertex with S_s.
    CommonOver,
    /// Compute both and require equality.
    Both,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub step2: Step2,
    /// Hard limit on stage set sizes.
    pub cap: usize,
    /// Add one to the Φ_s exponents at this stage (test hook).
    pub fault_phi_stage: Option<usize>,
}

impl Default for Options {
    fn default() -> Self {
        Self { step2: Step2::Both, cap: 200_000, fault_phi_stage: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StageKind {
    S,
    SPrime,
}

impl StageKind {
    pub fn name(self) -> &'static str {
        match self {
            StageKind::S => "S",
            StageKind::SPrime => "S'",
        }
    }
}

/// A computed stage set V_s or V_s' inside its window.
#[derive(Clone, Debug)]
pub struct StageSet {
    pub s: usize,
    pub kind: StageKind,
    pub bounds: Option<Bounds>,
    pub vertices: Vec<Vertex>,
}

impl StageSet {
    /// Number of vertices of each type.
    pub fn histogram(&self, n: usize) -> Vec<usize> {
        let mut h = alloc::vec![0; n + 1];
        for v in &self.vertices {
            h[v.vertex_type()] += 1;
        }
        h
    }

    pub fn label(&self) -> String {
        format!("{}_{}", self.kind.name(), self.s)
    }
}

/// Output of the staged computation: S_0 in L_0 coordinates plus every stage.
#[derive(Clone, Debug)]
pub struct MultiOutput {
    pub support: Vec<Vertex>,
    pub stages: Vec<StageSet>,
}

fn cap_check(len: usize, cap: usize, what: &str) -> Result<()> {
    if len > cap {
        return Err(Error::CapExceeded { what: String::from(what), limit: cap });
    }
    Ok(())
}

/// {Λ ⊆ Λ̃ : Λ̃ ∈ seeds} within the bounds.
pub fn down_closure(lv: &Level, seeds: &[Vertex], b: Option<Bounds>, cap: usize, what: &str) -> Result<Vec<Vertex>> {
    let res = crate::par::map(seeds, |v| -> Result<Vec<Vertex>> {
        let mut out = Vec::new();
        let below = match b {
            Some(b) => lv.building.below_within(v, &lv.anchor, b.a, b.b, b.c)?,
            None => lv.building.all_below(v)?,
        };
        for w in core::iter::once(v.clone()).chain(below) {
            if lv.in_bounds(&w, b)? {
                out.push(w);
            }
        }
        Ok(out)
    });
    let mut set = BTreeSet::new();
    for r in res {
        set.extend(r?);
        cap_check(set.len(), cap, what)?;
    }
    Ok(set.into_iter().collect())
}

/// {Λ̃ ⊇ Λ : Λ ∈ seeds} within the bounds, optionally of one type only.
pub fn up_closure(
    lv: &Level,
    seeds: &[Vertex],
    b: Option<Bounds>,
    only_type: Option<usize>,
    cap: usize,
    what: &str,
) -> Result<Vec<Vertex>> {
    let bl = &lv.building;
    let res = crate::par::map(seeds, |v| -> Result<Vec<Vertex>> {
        let above = match only_type {
            Some(t) => bl.neighbors_above(v, t)?,
            None => {
                let mut a = bl.all_above(v)?;
                a.push(v.clone());
                a
            }
        };
        let mut out = Vec::new();
        for w in above {
            if lv.in_bounds(&w, b)? {
                out.push(w);
            }
        }
        Ok(out)
    });
    let mut set = BTreeSet::new();
    for r in res {
        set.extend(r?);
        cap_check(set.len(), cap, what)?;
    }
    Ok(set.into_iter().collect())
}

/// All vertices of a level inside the bounds, by search from Γ_{2s}.
pub fn enumerate_level(lv: &Level, b: Option<Bounds>, cap: usize, what: &str) -> Result<Vec<Vertex>> {
    if lv.building.dim() == 0 {
        return Ok(alloc::vec![lv.seed.clone()]);
    }
    let bl = &lv.building;
    let next_to = |v: &Vertex| -> Result<Vec<Vertex>> {
        let mut out = match b {
            Some(b) => bl.below_within(v, &lv.anchor, b.a, b.b, b.c)?,
            None => bl.all_below(v)?,
        };
        out.extend(bl.all_above(v)?);
        Ok(out)
    };
    crate::building::explore_with(std::slice::from_ref(&lv.seed), next_to, |v| lv.in_bounds(v, b), cap).map_err(|e| {
        match e {
            Error::CapExceeded { limit, .. } => Error::CapExceeded { what: String::from(what), limit },
            e => e,
        }
    })
}

fn step2(
    chain: &SubSpaceChain,
    s: usize,
    vs: &[Vertex],
    target: Option<Bounds>,
    opts: &Options,
) -> Result<Vec<Vertex>> {
    let lv = chain.level(s);
    let label = format!("stage S'_{}", s);
    let over = target.map(|b| b.container());
    let tmax = lv.building.max_type();
    let distance = || -> Result<Vec<Vertex>> {
        let low: Vec<Vertex> = vs.iter().filter(|v| v.vertex_type() < tmax).cloned().collect();
        let mut cands = up_closure(lv, &low, over, Some(tmax), opts.cap, &label)?;
        cands.extend(vs.iter().filter(|v| v.vertex_type() == tmax && lv.in_bounds(v, over).unwrap_or(false)).cloned());
        cands.sort();
        cands.dedup();
        down_closure(lv, &cands, target, opts.cap, &label)
    };
    let common = || -> Result<Vec<Vertex>> {
        let up = up_closure(lv, vs, over, None, opts.cap, &label)?;
        down_closure(lv, &up, target, opts.cap, &label)
    };
    match opts.step2 {
        Step2::Distance => distance(),
        Step2::CommonOver => common(),
        Step2::Both => {
            let a = distance()?;
            let b = common()?;
            if a != b {
                return Err(Error::Inconsistent(format!(
                    "two descriptions of S'_{} differ ({} vs {})",
                    s,
                    a.len(),
                    b.len()
                )));
            }
            Ok(a)
        }
    }
}

/// Run the staged algorithm for S(x̲) ∩ window, the window given by bounds on L_0 relative to
/// Γ_0 (None for the full, necessarily finite, support when m = n).
pub fn run_multi(chain: &SubSpaceChain, target: Option<Bounds>, opts: &Options) -> Result<MultiOutput> {
    if target.is_none() && chain.tuple.len() < chain.tuple.space().dim() {
        return Err(Error::CapExceeded { what: String::from("unbounded window with m < n"), limit: opts.cap });
    }
    let top = chain.top_stage();
    let grow = |b: Option<Bounds>, da: u32, db: u32, dc: u32| b.map(|b| b.grow(da, db, dc));
    let mut stages = Vec::new();
    let sp_bounds = grow(target, top as u32, 2 * top as u32 + 1, 3 * top as u32 + 1);
    let mut vprime = enumerate_level(chain.level(top + 1), sp_bounds, opts.cap, &format!("stage S'_{}", top + 1))?;
    stages.push(StageSet { s: top + 1, kind: StageKind::SPrime, bounds: sp_bounds, vertices: vprime.clone() });
    let mut s = top;
    loop {
        let vb = grow(target, s as u32, 2 * s as u32, 3 * s as u32);
        let mut a = chain.phi_exponents(s);
        if opts.fault_phi_stage == Some(s) {
            for x in a.iter_mut() {
                *x += 1;
            }
        }
        let imgs = crate::par::map(&vprime, |v| chain.phi_with(s, &a, v));
        let imgs = imgs.into_iter().collect::<Result<Vec<_>>>().map_err(|e| match e {
            Error::NotAVertex => {
                Error::Inconsistent(format!("stage S_{}: image of S'_{} under the embedding is not a vertex", s, s + 1))
            }
            e => e,
        })?;
        let vs = down_closure(chain.level(s), &imgs, vb, opts.cap, &format!("stage S_{}", s))?;
        stages.push(StageSet { s, kind: StageKind::S, bounds: vb, vertices: vs.clone() });
        if s == 0 {
            return Ok(MultiOutput { support: vs, stages });
        }
        let tb = grow(target, s as u32 - 1, 2 * s as u32 - 1, 3 * s as u32 - 2);
        vprime = step2(chain, s, &vs, tb, opts)?;
        stages.push(StageSet { s, kind: StageKind::SPrime, bounds: tb, vertices: vprime.clone() });
        s -= 1;
    }
}

/// S(x) ∩ window for a single vector, by the base cases r ∈ {0, 1} and the recursion
/// S(x)^max = {Λ max : d(Λ, S(p^{-1}x)) ≤ 1}.
pub fn recurse_single(chain: &SubSpaceChain, target: Option<Bounds>, opts: &Options) -> Result<Vec<Vertex>> {
    let r = chain.single_vector()?;
    single(chain, target, 0, r, opts)
}

/// S(p^{-j}x) within the bounds.
fn single(chain: &SubSpaceChain, target: Option<Bounds>, j: i64, r: i64, opts: &Options) -> Result<Vec<Vertex>> {
    let l0 = chain.level(0);
    let perp = chain.complement_level();
    let label = format!("S(p^-{}x)", j);
    let rest = r - 2 * j;
    if rest == 0 {
        let base = enumerate_level(perp, target, opts.cap, &label)?;
        let mut out = base.iter().map(|v| chain.base_map(j, v)).collect::<Result<Vec<_>>>()?;
        out.retain(|v| l0.in_bounds(v, target).unwrap_or(false));
        out.sort();
        return Ok(out);
    }
    let over = target.map(|b| b.container());
    if rest == 1 {
        let tmax = perp.building.max_type();
        let base: Vec<Vertex> =
            enumerate_level(perp, over, opts.cap, &label)?.into_iter().filter(|v| v.vertex_type() == tmax).collect();
        let maxes = base.iter().map(|v| chain.base_map(j + 1, v)).collect::<Result<Vec<_>>>()?;
        return down_closure(l0, &maxes, target, opts.cap, &label);
    }
    let inner = single(chain, target.map(|b| b.sub_witness()), j + 1, r, opts)?;
    let tmax = l0.building.max_type();
    let low: Vec<Vertex> = inner.iter().filter(|v| v.vertex_type() < tmax).cloned().collect();
    let mut cands = up_closure(l0, &low, over, Some(tmax), opts.cap, &label)?;
    cands.extend(inner.iter().filter(|v| v.vertex_type() == tmax && l0.in_bounds(v, over).unwrap_or(false)).cloned());
    cands.sort();
    cands.dedup();
    down_closure(l0, &cands, target, opts.cap, &label)
}

/// Support inside an ambient window, with the stage sets in level coordinates.
#[derive(Clone, Debug)]
pub struct WindowedOutput {
    pub support: Vec<Vertex>,
    pub bounds: Option<Bounds>,
    pub stages: Vec<StageSet>,
}

/// S(x̲) ∩ window for a window of ambient vertices, or the whole (finite) support when
/// `window` is None and m = n.
pub fn support_in(chain: &SubSpaceChain, window: Option<&[Vertex]>, opts: &Options) -> Result<WindowedOutput> {
    let bounds = match window {
        Some(w) => Some(chain.bounds_for(w)?),
        None => None,
    };
    let out = run_multi(chain, bounds, opts)?;
    let mapped = crate::par::map(&out.support, |v| chain.to_ambient(v));
    let mut support = mapped.into_iter().collect::<Result<Vec<_>>>().map_err(|e| match e {
        Error::NotAVertex => Error::Inconsistent(String::from("support vertex does not map to an ambient vertex")),
        e => e,
    })?;
    if let Some(w) = window {
        let keep: BTreeSet<&Vertex> = w.iter().collect();
        support.retain(|v| keep.contains(v));
    }
    support.sort();
    Ok(WindowedOutput { support, bounds, stages: out.stages })
}

/// Key-level helper used by checks: the canonical key of Φ_s(Λ) with explicit exponents.
pub fn phi_key(fast: &FastSpace, a: &[i64], sub: &LatticeKey) -> Result<LatticeKey> {
    fast.block(a, sub)
}

#[cfg(test)]
mod tests;
