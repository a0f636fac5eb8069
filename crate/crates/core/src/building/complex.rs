//! Finite subcomplexes of the vertex complex.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use super::{Building, Vertex};
use crate::error::{Error, Result};
use crate::lattices::LatticeKey;

/// Per-vertex annotations: KR strata (a, b), one pair per special vector.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexMeta {
    pub kr: Vec<(i64, i64)>,
}

/// A finite set of vertices with all induced containment edges.
#[derive(Clone, Debug)]
pub struct ComplexSubset {
    vertices: Vec<Vertex>,
    index: HashMap<LatticeKey, usize>,
    edges: Vec<(usize, usize)>,
    down_closed: bool,
    meta: Vec<VertexMeta>,
    depth: Vec<u32>,
}

impl PartialEq for ComplexSubset {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for ComplexSubset {}

impl ComplexSubset {
    pub fn empty() -> Self {
        Self::assemble(Vec::new(), Vec::new())
    }

    /// The subcomplex on the given vertices.
    pub fn from_vertices<I: IntoIterator<Item = Vertex>>(b: &Building, vs: I) -> Result<Self> {
        let set: BTreeSet<Vertex> = vs.into_iter().collect();
        let vertices: Vec<Vertex> = set.into_iter().collect();
        let below = crate::par::map(&vertices, |v| b.all_below(v));
        let below = below.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(Self::assemble(vertices, below))
    }

    fn assemble(vertices: Vec<Vertex>, below: Vec<Vec<Vertex>>) -> Self {
        let index: HashMap<LatticeKey, usize> = vertices.iter().enumerate().map(|(i, v)| (v.key.clone(), i)).collect();
        let mut edges = Vec::new();
        let mut down_closed = true;
        for (i, bl) in below.iter().enumerate() {
            for w in bl {
                match index.get(&w.key) {
                    Some(&j) => edges.push((i.min(j), i.max(j))),
                    None => down_closed = false,
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let meta = alloc::vec![VertexMeta::default(); vertices.len()];
        Self { vertices, index, edges, down_closed, meta, depth: Vec::new() }
    }

    /// The induced subcomplex on the members satisfying `keep`, reusing the edges of `self`.
    pub fn restrict<F: Fn(usize) -> bool>(&self, keep: F) -> Self {
        let kept: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        let mut new_index = alloc::vec![usize::MAX; self.len()];
        for (k, &i) in kept.iter().enumerate() {
            new_index[i] = k;
        }
        let mut edges = Vec::new();
        let mut down_closed = self.down_closed;
        for &(i, j) in &self.edges {
            match (new_index[i], new_index[j]) {
                (usize::MAX, usize::MAX) => {}
                (a, b) if a != usize::MAX && b != usize::MAX => edges.push((a, b)),
                (a, _) => {
                    let (inside, outside) = if a != usize::MAX { (i, j) } else { (j, i) };
                    if self.vertices[inside].typ > self.vertices[outside].typ {
                        down_closed = false;
                    }
                }
            }
        }
        let vertices: Vec<Vertex> = kept.iter().map(|&i| self.vertices[i].clone()).collect();
        let index = vertices.iter().enumerate().map(|(k, v)| (v.key.clone(), k)).collect();
        let meta = kept.iter().map(|&i| self.meta[i].clone()).collect();
        let depth = if self.depth.is_empty() { Vec::new() } else { kept.iter().map(|&i| self.depth[i]).collect() };
        Self { vertices, index, edges, down_closed, meta, depth }
    }

    /// Graph distance from the seed, for subsets built by [`ball`].
    pub fn depth(&self, i: usize) -> Option<u32> {
        self.depth.get(i).copied()
    }

    /// Vertices in canonical order.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.index.contains_key(&v.key)
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(&v.key).copied()
    }

    /// Edges (i, j), i < j, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Whether every vertex below a member is a member.
    pub fn is_down_closed(&self) -> bool {
        self.down_closed
    }

    pub fn meta(&self, i: usize) -> &VertexMeta {
        &self.meta[i]
    }

    pub fn set_meta(&mut self, i: usize, m: VertexMeta) {
        self.meta[i] = m;
    }

    /// Vertices of the given type.
    pub fn of_type(&self, t: usize) -> impl Iterator<Item = &Vertex> + '_ {
        self.vertices.iter().filter(move |v| v.typ == t)
    }

    pub fn max_vertex_type(&self) -> Option<usize> {
        self.vertices.iter().map(|v| v.typ).max()
    }

    /// Number of vertices of each type 0..=n.
    pub fn type_counts(&self, n: usize) -> Vec<usize> {
        let mut c = alloc::vec![0; n + 1];
        for v in &self.vertices {
            c[v.typ] += 1;
        }
        c
    }

    /// Vertices of `self` not below any vertex of larger type in `self`.
    pub fn maximal_vertices(&self) -> Vec<usize> {
        let mut has_above = alloc::vec![false; self.len()];
        for &(i, j) in &self.edges {
            let lo = if self.vertices[i].typ < self.vertices[j].typ { i } else { j };
            has_above[lo] = true;
        }
        (0..self.len()).filter(|&i| !has_above[i]).collect()
    }

    /// Short human-readable summary.
    pub fn summary(&self, n: usize) -> String {
        let c = self.type_counts(n);
        let mut s = alloc::format!("{} vertices, {} edges;", self.len(), self.edges.len());
        for (t, k) in c.iter().enumerate() {
            if *k > 0 {
                s.push_str(&alloc::format!(" t{}:{}", t, k));
            }
        }
        s
    }
}

/// All vertices within `radius` steps of `seed`, with induced edges.
pub fn ball(b: &Building, seed: &Vertex, radius: usize) -> Result<ComplexSubset> {
    ball_capped(b, seed, radius, usize::MAX)
}

/// [`ball`], failing once more than `cap` vertices are found.
pub fn ball_capped(b: &Building, seed: &Vertex, radius: usize, cap: usize) -> Result<ComplexSubset> {
    let mut seen: HashMap<LatticeKey, u32> = HashMap::new();
    seen.insert(seed.key.clone(), 0);
    let mut all: Vec<Vertex> = alloc::vec![seed.clone()];
    let mut below: HashMap<LatticeKey, Vec<Vertex>> = HashMap::new();
    let mut frontier = alloc::vec![seed.clone()];
    let mut last: HashMap<LatticeKey, Vec<Vertex>> = HashMap::new();
    for d in 0..radius {
        let res = crate::par::map(&frontier, |v| -> Result<(Vec<Vertex>, Vec<Vertex>)> {
            Ok((b.all_below(v)?, b.all_above(v)?))
        });
        let mut next = Vec::new();
        for (v, r) in frontier.iter().zip(res) {
            let (bl, ab) = r?;
            for w in bl.iter().chain(ab.iter()) {
                if !seen.contains_key(&w.key) {
                    seen.insert(w.key.clone(), d as u32 + 1);
                    next.push(w.clone());
                    all.push(w.clone());
                    if all.len() > cap {
                        return Err(Error::CapExceeded { what: "ball".into(), limit: cap });
                    }
                }
            }
            if d + 1 == radius {
                for w in &ab {
                    if seen[&w.key] == radius as u32 {
                        last.entry(w.key.clone()).or_default().push(v.clone());
                    }
                }
            }
            below.insert(v.key.clone(), bl);
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    let down_closed = frontier.iter().all(|v| v.typ < 2);
    if !frontier.is_empty() {
        // edges among the outermost shell
        let gamma = b.fast().anchor(&seed.key)?;
        let ex = crate::par::map(&frontier, |v| b.fast().window_exponents(&gamma, &v.key));
        let ex = ex.into_iter().collect::<Result<Vec<_>>>()?;
        let pairs: Vec<(usize, usize)> = (0..frontier.len())
            .flat_map(|i| (0..frontier.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let (w, u) = (&frontier[i], &frontier[j]);
                let ((aw, bw), (au, bu)) = (ex[i], ex[j]);
                u.typ < w.typ && au >= aw && au <= aw + 1 && bu <= bw && bu + 1 >= bw
            })
            .collect();
        let hits = crate::par::map(&pairs, |&(i, j)| b.contains(&frontier[i], &frontier[j]));
        for (&(i, j), h) in pairs.iter().zip(hits) {
            if h? {
                last.entry(frontier[i].key.clone()).or_default().push(frontier[j].clone());
            }
        }
        for v in &frontier {
            below.insert(v.key.clone(), last.remove(&v.key).unwrap_or_default());
        }
    }
    all.sort();
    let lists = all.iter().map(|v| below.remove(&v.key).unwrap_or_default()).collect();
    let depth = all.iter().map(|v| seen[&v.key]).collect();
    let mut c = ComplexSubset::assemble(all, lists);
    c.depth = depth;
    c.down_closed = down_closed;
    Ok(c)
}

/// Connected component through `seeds` of the vertices satisfying `keep`, in canonical order.
/// Fails once more than `cap` vertices are found.
pub fn explore<F>(b: &Building, seeds: &[Vertex], keep: F, cap: usize) -> Result<Vec<Vertex>>
where
    F: Fn(&Vertex) -> Result<bool> + Sync + Send,
{
    explore_with(seeds, |v| b.neighbors(v), keep, cap)
}

/// [`explore`] with a custom neighbour generator, which may omit vertices failing `keep`.
pub fn explore_with<N, F>(seeds: &[Vertex], next_to: N, keep: F, cap: usize) -> Result<Vec<Vertex>>
where
    N: Fn(&Vertex) -> Result<Vec<Vertex>> + Sync + Send,
    F: Fn(&Vertex) -> Result<bool> + Sync + Send,
{
    let mut seen: HashSet<LatticeKey> = HashSet::new();
    let mut out = Vec::new();
    let mut frontier = Vec::new();
    for s in seeds {
        if seen.insert(s.key.clone()) && keep(s)? {
            out.push(s.clone());
            frontier.push(s.clone());
        }
    }
    while !frontier.is_empty() {
        let res = crate::par::map(&frontier, |v| -> Result<Vec<(Vertex, bool)>> {
            let nb = next_to(v)?;
            nb.into_iter().map(|w| keep(&w).map(|k| (w, k))).collect()
        });
        let mut next = Vec::new();
        for r in res {
            for (w, k) in r? {
                if seen.insert(w.key.clone()) && k {
                    out.push(w.clone());
                    next.push(w);
                    if out.len() > cap {
                        return Err(Error::CapExceeded { what: "window".into(), limit: cap });
                    }
                }
            }
        }
        frontier = next;
    }
    out.sort();
    Ok(out)
}

/// Partition of vertex indices by connectivity through edges of `s`.
pub fn connected_components(s: &ComplexSubset) -> Vec<Vec<usize>> {
    let n = s.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(i, j) in s.edges() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

impl Building {
    /// Whether some Λ̂ ∈ S has Λ ∩ Λ̂ a vertex, by scanning S.
    pub fn meets_as_vertex(&self, v: &Vertex, s: &ComplexSubset) -> Result<bool> {
        if s.contains(v) {
            return Ok(true);
        }
        for w in s.vertices() {
            if self.intersection_vertex(v, w)?.is_some() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Same predicate for a down-closed S: Λ or one of its subvertices lies in S.
    pub fn meets_as_vertex_indexed(&self, v: &Vertex, s: &ComplexSubset) -> Result<bool> {
        if !s.is_down_closed() {
            return self.meets_as_vertex(v, s);
        }
        if s.contains(v) {
            return Ok(true);
        }
        Ok(self.all_below(v)?.iter().any(|w| s.contains(w)))
    }

    /// Max-type vertices Λ' ≠ Λ with Λ ∩ Λ' a vertex.
    pub fn max_neighbors(&self, v: &Vertex) -> Result<Vec<Vertex>> {
        let tmax = self.max_type();
        let mut cands: BTreeSet<Vertex> = BTreeSet::new();
        for w in self.all_below(v)? {
            cands.extend(self.neighbors_above(&w, tmax)?);
        }
        cands.remove(v);
        let mut out = Vec::new();
        for c in cands {
            if self.intersection_vertex(v, &c)?.is_some() {
                out.push(c);
            }
        }
        Ok(out)
    }
}

/// Result of a bounded distance search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distance {
    Finite(usize),
    Unreachable(usize),
}

/// d(Λ, S) for Λ of maximal type, searching chains of length at most `bound`.
pub fn distance(b: &Building, v: &Vertex, s: &ComplexSubset, bound: usize) -> Result<Distance> {
    if v.typ != b.max_type() {
        return Err(Error::NotMaximalType);
    }
    if s.contains(v) {
        return Ok(Distance::Finite(0));
    }
    let mut seen: HashSet<LatticeKey> = HashSet::new();
    seen.insert(v.key.clone());
    let mut level = alloc::vec![v.clone()];
    for d in 1..=bound {
        for u in &level {
            if b.meets_as_vertex_indexed(u, s)? {
                return Ok(Distance::Finite(d));
            }
        }
        if d == bound {
            break;
        }
        let mut next = Vec::new();
        for u in &level {
            for w in b.max_neighbors(u)? {
                if seen.insert(w.key.clone()) {
                    next.push(w);
                }
            }
        }
        level = next;
    }
    Ok(Distance::Unreachable(bound))
}

#[cfg(test)]
#[path = "complex_tests.rs"]
mod tests;
