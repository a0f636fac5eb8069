//! Brute-force ground truth: predicate filtering over enumerated windows, and naive counts.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algorithm::{enumerate_level, support_in, Options, StageKind, StageSet, SubSpaceChain};
use crate::building::{connected_components, Building, ComplexSubset, FiniteHermSpace, Vertex, VertexMeta};
use crate::cycles::{in_cycle, KrStratum, SpecialTuple, VectorProbe};
use crate::error::{Error, Result};
use crate::scalars::FqScalar;

/// {Λ ∈ window : x_i ∈ Λ^♯ for all i}, with induced edges.
pub fn oracle_support(b: &Building, s: &SpecialTuple, window: &ComplexSubset) -> Result<ComplexSubset> {
    let flags = crate::par::map(window.vertices(), |v| in_cycle(b, v, s));
    let flags = flags.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(window.restrict(|i| flags[i]))
}

/// Number of k-dimensional totally isotropic subspaces, by enumerating ordered bases of
/// pairwise orthogonal isotropic vectors. Fails when q^d exceeds `limit`.
pub fn naive_isotropic_count(v: &FiniteHermSpace, k: usize, limit: u64) -> Result<u64> {
    let fq = v.field();
    let d = v.dim();
    let q = fq.order() as u64;
    let total = (0..d).try_fold(1u64, |acc, _| acc.checked_mul(q).filter(|&x| x <= limit));
    let total = total.ok_or_else(|| Error::TooLarge(format!("{}^{} vectors", q, d)))?;
    if k == 0 {
        return Ok(1);
    }
    if k > d {
        return Ok(0);
    }
    let vectors: Vec<Vec<FqScalar>> = (0..total)
        .map(|mut i| {
            (0..d)
                .map(|_| {
                    let x = fq.from_index((i % q) as usize);
                    i /= q;
                    x
                })
                .collect()
        })
        .filter(|x: &Vec<FqScalar>| x.iter().any(|c| !c.is_zero()) && v.h(x, x).is_zero())
        .collect();
    let mut chosen = Vec::new();
    let ordered = extend(v, &vectors, &mut chosen, k);
    let mut gl = 1u64;
    let qk = q.pow(k as u32);
    for i in 0..k {
        gl *= qk - q.pow(i as u32);
    }
    Ok(ordered / gl)
}

fn in_span(v: &FiniteHermSpace, basis: &[&Vec<FqScalar>], x: &[FqScalar]) -> bool {
    let fq = v.field();
    let q = fq.order();
    let m = basis.len();
    let combos = q.pow(m as u32);
    (0..combos).any(|mut c| {
        let mut acc = alloc::vec![FqScalar::ZERO; x.len()];
        for b in basis {
            let s = fq.from_index(c % q);
            c /= q;
            for (a, bi) in acc.iter_mut().zip(b.iter()) {
                *a = fq.add(*a, fq.mul(s, *bi));
            }
        }
        acc == x
    })
}

fn extend<'a>(v: &FiniteHermSpace, vectors: &'a [Vec<FqScalar>], chosen: &mut Vec<&'a Vec<FqScalar>>, k: usize) -> u64 {
    if chosen.len() == k {
        return 1;
    }
    let mut n = 0;
    for x in vectors {
        if chosen.iter().all(|c| v.h(c, x).is_zero()) && !in_span(v, chosen, x) {
            chosen.push(x);
            n += extend(v, vectors, chosen, k);
            chosen.pop();
        }
    }
    n
}

/// One failed check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub check: String,
    pub detail: String,
}

impl Discrepancy {
    fn new(check: &str, detail: String) -> Self {
        Self { check: String::from(check), detail }
    }
}

/// Subvertex classification below one max-type support vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusEntry {
    pub vertex: usize,
    pub subvertex_type: usize,
    pub subvertices: usize,
    pub all_above_in_support: usize,
    pub exactly_one_above: usize,
    /// Per subvertex: (max-type vertices above it, how many of them lie in the support).
    pub above: Vec<(usize, usize)>,
}

/// Result of comparing the staged computation with predicate filtering on one window.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub seed: Vertex,
    pub radius: usize,
    pub window_size: usize,
    pub support: ComplexSubset,
    pub algorithm_size: Option<usize>,
    pub stages: Vec<StageSet>,
    pub strata: Vec<Vec<KrStratum>>,
    pub components: usize,
    pub interior_components: usize,
    pub census: Vec<CensusEntry>,
    /// Stages whose level window exceeded the cap: only soundness was checked.
    pub partial_stages: Vec<String>,
    pub discrepancies: Vec<Discrepancy>,
}

/// Which checks to run beyond set equality.
#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// Run the staged algorithm; when false only the filtered support is checked.
    pub algorithm: bool,
    pub stages: bool,
    pub lemmas: bool,
    pub census: bool,
    /// Largest level window enumerated to confirm that a stage set is complete.
    pub stage_window_cap: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { algorithm: true, stages: true, lemmas: true, census: true, stage_window_cap: 200_000 }
    }
}

/// Run the staged algorithm and the predicate filter on the same ball and compare.
pub fn cross_validate(
    chain: &SubSpaceChain,
    window: &ComplexSubset,
    seed: &Vertex,
    radius: usize,
    opts: &Options,
    checks: &CheckOptions,
) -> Result<OracleReport> {
    let b = chain.ambient().clone();
    let s = chain.tuple().clone();
    let mut disc = Vec::new();
    let mut support = oracle_support(&b, &s, window)?;

    let run = if checks.algorithm { Some(support_in(chain, Some(window.vertices()), opts)) } else { None };
    let (algorithm_size, stages) = match run.transpose() {
        Ok(None) => (None, Vec::new()),
        Ok(Some(out)) => {
            let want: BTreeSet<&Vertex> = support.vertices().iter().collect();
            let got: BTreeSet<&Vertex> = out.support.iter().collect();
            let missing = want.difference(&got).count();
            let extra = got.difference(&want).count();
            if missing + extra > 0 {
                disc.push(Discrepancy::new(
                    "support",
                    format!("algorithm misses {} and adds {} of {} filtered vertices", missing, extra, want.len()),
                ));
            }
            (Some(out.support.len()), out.stages)
        }
        Err(Error::Inconsistent(m)) => {
            disc.push(Discrepancy::new("algorithm", m));
            (None, Vec::new())
        }
        Err(e) => return Err(e),
    };

    let mut partial_stages = Vec::new();
    if checks.stages {
        for st in &stages {
            let (d, complete) = stage_check(chain, st, checks.stage_window_cap)?;
            disc.extend(d);
            if !complete {
                partial_stages.push(st.label());
            }
        }
    }

    let probes = s.vectors().iter().map(|x| VectorProbe::new(b.fast(), x)).collect::<Result<Vec<_>>>()?;
    let strata = crate::par::map(window.vertices(), |v| -> Result<Vec<KrStratum>> {
        probes.iter().map(|p| p.stratum(b.fast(), v.key())).collect()
    });
    let strata = strata.into_iter().collect::<Result<Vec<_>>>()?;
    let member: BTreeSet<&Vertex> = support.vertices().iter().collect();
    let mut kr_bad = 0;
    for (v, st) in window.vertices().iter().zip(&strata) {
        let inside = member.contains(v);
        let all_b = st.iter().all(|k| k.b >= 0);
        if inside != all_b {
            kr_bad += 1;
        }
        for (k, p) in st.iter().zip(&probes) {
            let r = p.valuation();
            if !(k.a - 1 <= k.b && k.b <= k.a && k.a + k.b <= r) {
                kr_bad += 1;
            }
        }
    }
    if kr_bad > 0 {
        disc.push(Discrepancy::new("kr", format!("{} violations of the (a, b) constraints", kr_bad)));
    }
    let strata: Vec<Vec<KrStratum>> =
        window.vertices().iter().zip(strata).filter(|(v, _)| member.contains(v)).map(|(_, s)| s).collect();
    for (i, st) in strata.iter().enumerate() {
        support.set_meta(i, VertexMeta { kr: st.iter().map(|k| (k.a, k.b)).collect() });
    }

    if checks.lemmas {
        disc.extend(lemma_checks(&b, &support, &strata, &probes)?);
    }

    let comps = connected_components(&support);
    let seed_comp = support.index_of(seed).and_then(|i| comps.iter().position(|c| c.contains(&i)));
    let interior = |i: usize| support.depth(i).is_some_and(|d| (d as usize) + 2 <= radius);
    let mut loose = 0;
    let mut touched = BTreeSet::new();
    for (ci, c) in comps.iter().enumerate() {
        if c.iter().any(|&i| interior(i)) {
            touched.insert(ci);
            if seed_comp.is_some_and(|sc| sc != ci) {
                loose += c.iter().filter(|&&i| interior(i)).count();
            }
        }
    }
    if seed_comp.is_none() && touched.len() > 1 {
        loose = touched.len() - 1;
    }
    if loose > 0 {
        disc.push(Discrepancy::new("connected", format!("{} interior support vertices not joined to the seed", loose)));
    }
    let interior_components = connected_components(&support.restrict(interior)).len();

    let census = if checks.census { census(&b, &s, &support)? } else { Vec::new() };

    Ok(OracleReport {
        seed: seed.clone(),
        radius,
        window_size: window.len(),
        support,
        algorithm_size,
        stages,
        strata,
        components: comps.len(),
        interior_components,
        census,
        partial_stages,
        discrepancies: disc,
    })
}

/// Compare a stage set with its defining predicate on the same level window. Every member
/// must satisfy the predicate; when the window has at most `cap` vertices it is enumerated and
/// the stage must also be complete. Returns whether completeness was checked.
fn stage_check(chain: &SubSpaceChain, st: &StageSet, cap: usize) -> Result<(Option<Discrepancy>, bool)> {
    let lv = chain.level(st.s);
    let fast = lv.building().fast().clone();
    let depth = match st.kind {
        StageKind::S => st.s as i64,
        StageKind::SPrime => st.s as i64 - 1,
    };
    let pred = |v: &Vertex| -> Result<bool> {
        for p in lv.probes() {
            if !p.in_dual(&fast, v.key(), depth)? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let sound = crate::par::map(&st.vertices, |v| -> Result<bool> { Ok(lv.in_bounds(v, st.bounds)? && pred(v)?) });
    let mut bad = 0;
    for f in sound {
        if !f? {
            bad += 1;
        }
    }
    if bad > 0 {
        let d = Discrepancy::new("stage", format!("stage {} has {} members failing its predicate", st.label(), bad));
        return Ok((Some(d), true));
    }
    let all = match enumerate_level(lv, st.bounds, cap, &st.label()) {
        Ok(all) => all,
        Err(Error::CapExceeded { .. }) => return Ok((None, false)),
        Err(e) => return Err(e),
    };
    let flags = crate::par::map(&all, |v| pred(v));
    let mut missing = 0;
    let got: BTreeSet<&Vertex> = st.vertices.iter().collect();
    for (v, f) in all.iter().zip(flags) {
        if f? && !got.contains(v) {
            missing += 1;
        }
    }
    if missing == 0 {
        return Ok((None, true));
    }
    let d = Discrepancy::new("stage", format!("stage {} differs from its predicate: {} missing", st.label(), missing));
    Ok((Some(d), true))
}

/// Lemma checks on max-type support vertices: (a, b) = (1, 0) when r = 1; p^{-1}x ∈ Λ when
/// r ≥ 2; and outside S(p^{-1}x), the subvertices in S(p^{-1}x) have a unique maximal element, of
/// type t_max − 2.
fn lemma_checks(
    b: &Building,
    support: &ComplexSubset,
    strata: &[Vec<KrStratum>],
    probes: &[VectorProbe],
) -> Result<Vec<Discrepancy>> {
    let tmax = b.max_type();
    let fast = b.fast();
    let idx: Vec<usize> = (0..support.len()).filter(|&i| support.vertices()[i].vertex_type() == tmax).collect();
    let res = crate::par::map(&idx, |&i| -> Result<[usize; 3]> {
        let v = &support.vertices()[i];
        let mut bad = [0; 3];
        let below = if probes.iter().zip(&strata[i]).any(|(p, k)| p.valuation() >= 2 && k.b < 1) {
            b.all_below(v)?
        } else {
            Vec::new()
        };
        for (p, k) in probes.iter().zip(&strata[i]) {
            let r = p.valuation();
            if r == 1 && (k.a, k.b) != (1, 0) {
                bad[0] += 1;
            }
            if r >= 2 {
                if k.a < 1 {
                    bad[1] += 1;
                }
                if k.b < 1 {
                    let mut meet = Vec::new();
                    for w in &below {
                        if p.in_dual(fast, w.key(), 1)? {
                            meet.push(w);
                        }
                    }
                    let top: Vec<&Vertex> =
                        meet.iter().copied().filter(|w| tmax >= 2 && w.vertex_type() == tmax - 2).collect();
                    let mut unique_max = top.len() == 1;
                    if let [u] = top.as_slice() {
                        for w in &meet {
                            if *w != *u && !b.contains(u, w)? {
                                unique_max = false;
                            }
                        }
                    }
                    if !unique_max {
                        bad[2] += 1;
                    }
                }
            }
        }
        Ok(bad)
    });
    let mut tot = [0; 3];
    for r in res {
        let r = r?;
        for k in 0..3 {
            tot[k] += r[k];
        }
    }
    let names = ["r = 1 stratum", "r >= 2 containment", "r >= 2 meeting vertex"];
    Ok((0..3)
        .filter(|&k| tot[k] > 0)
        .map(|k| Discrepancy::new("lemma", format!("{}: {} violations", names[k], tot[k])))
        .collect())
}

/// For each max-type support vertex, classify its subvertices of the smallest type by how
/// many max-type vertices above them lie in the support.
pub fn census(b: &Building, s: &SpecialTuple, support: &ComplexSubset) -> Result<Vec<CensusEntry>> {
    let tmax = b.max_type();
    let tmin = b.space().type_parity();
    let idx: Vec<usize> = (0..support.len()).filter(|&i| support.vertices()[i].vertex_type() == tmax).collect();
    let res = crate::par::map(&idx, |&i| -> Result<CensusEntry> {
        let v = &support.vertices()[i];
        let subs = if tmin == tmax { alloc::vec![v.clone()] } else { b.neighbors_below(v, tmin)? };
        let (mut all, mut one) = (0, 0);
        let mut counts = Vec::with_capacity(subs.len());
        for w in &subs {
            let above = if tmin == tmax { alloc::vec![w.clone()] } else { b.neighbors_above(w, tmax)? };
            let mut k = 0;
            for a in &above {
                if in_cycle(b, a, s)? {
                    k += 1;
                }
            }
            if k == above.len() {
                all += 1;
            }
            if k == 1 {
                one += 1;
            }
            counts.push((above.len(), k));
        }
        Ok(CensusEntry {
            vertex: i,
            subvertex_type: tmin,
            subvertices: subs.len(),
            all_above_in_support: all,
            exactly_one_above: one,
            above: counts,
        })
    });
    res.into_iter().collect()
}
