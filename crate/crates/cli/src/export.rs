//! Canonical JSON and DOT renderings of support complexes, summaries and stage traces.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use krsupport_core::algorithm::StageSet;
use krsupport_core::building::{connected_components, Building, ComplexSubset};
use serde::Serialize;

#[derive(Serialize)]
pub struct VertexOut {
    pub id: usize,
    #[serde(rename = "type")]
    pub typ: usize,
    pub basis: Vec<Vec<[String; 4]>>,
    pub meta: MetaOut,
}

#[derive(Serialize)]
pub struct MetaOut {
    pub kr: Vec<[i64; 2]>,
}

#[derive(Serialize)]
pub struct ComplexOut {
    pub vertices: Vec<VertexOut>,
    pub edges: Vec<[usize; 2]>,
}

pub fn complex(b: &Building, s: &ComplexSubset) -> ComplexOut {
    let vertices = s
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| VertexOut {
            id: i,
            typ: v.vertex_type(),
            basis: b.lattice(v).basis().iter().map(|c| c.iter().map(|z| z.to_tuple()).collect()).collect(),
            meta: MetaOut { kr: s.meta(i).kr.iter().map(|&(a, b)| [a, b]).collect() },
        })
        .collect();
    ComplexOut { vertices, edges: s.edges().iter().map(|&(i, j)| [i, j]).collect() }
}

const COLORS: [&str; 6] = ["gray", "lightblue", "palegreen", "gold", "salmon", "plum"];
const SHAPES: [&str; 5] = ["ellipse", "box", "diamond", "hexagon", "triangle"];

/// Graphviz rendering: fill colour by type, shape by the first vector's (a, b).
pub fn dot(s: &ComplexSubset) -> String {
    let mut out = String::from("graph support {\n  node [style=filled];\n");
    for (i, v) in s.vertices().iter().enumerate() {
        let t = v.vertex_type();
        let kr = s.meta(i).kr.first().copied();
        let shape = kr.map_or(0, |(a, b)| (a + b).rem_euclid(SHAPES.len() as i64) as usize);
        let label = match kr {
            Some((a, b)) => format!("{i}\\nt={t} ({a},{b})"),
            None => format!("{i}\\nt={t}"),
        };
        let _ = writeln!(
            out,
            "  v{i} [label=\"{label}\", fillcolor={}, shape={}];",
            COLORS[t % COLORS.len()],
            SHAPES[shape]
        );
    }
    for &(i, j) in s.edges() {
        let _ = writeln!(out, "  v{i} -- v{j};");
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
pub struct StageOut {
    pub s: usize,
    pub kind: &'static str,
    pub count: usize,
    pub types: Vec<usize>,
    pub bounds: Option<[u32; 3]>,
}

pub fn stages(n: usize, st: &[StageSet]) -> Vec<StageOut> {
    st.iter()
        .map(|x| StageOut {
            s: x.s,
            kind: x.kind.name(),
            count: x.vertices.len(),
            types: x.histogram(n),
            bounds: x.bounds.map(|b| [b.a, b.b, b.c]),
        })
        .collect()
}

/// One JSON object per line.
pub fn jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for it in items {
        out.push_str(&serde_json::to_string(it).expect("serializable"));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
pub struct KrCount {
    pub vector: usize,
    pub a: i64,
    pub b: i64,
    pub count: usize,
}

#[derive(Serialize)]
pub struct Summary {
    pub vertices: usize,
    pub edges: usize,
    pub types: BTreeMap<usize, usize>,
    pub kr_histogram: Vec<KrCount>,
    pub components: usize,
    pub maximal_vertices: usize,
    pub t0: Option<usize>,
    pub valuations: Vec<i64>,
    pub irreducible: Option<bool>,
    pub finite: Option<bool>,
    pub window: Option<WindowOut>,
    pub stages: Vec<StageOut>,
}

#[derive(Serialize)]
pub struct WindowOut {
    pub radius: usize,
    pub size: usize,
    pub seed: Option<usize>,
}

pub fn kr_histogram(s: &ComplexSubset) -> Vec<KrCount> {
    let mut h: BTreeMap<(usize, i64, i64), usize> = BTreeMap::new();
    for i in 0..s.len() {
        for (k, &(a, b)) in s.meta(i).kr.iter().enumerate() {
            *h.entry((k, a, b)).or_default() += 1;
        }
    }
    h.into_iter().map(|((vector, a, b), count)| KrCount { vector, a, b, count }).collect()
}

pub fn types(n: usize, s: &ComplexSubset) -> BTreeMap<usize, usize> {
    s.type_counts(n).into_iter().enumerate().filter(|&(_, c)| c > 0).collect()
}

pub fn components(s: &ComplexSubset) -> usize {
    connected_components(s).len()
}
