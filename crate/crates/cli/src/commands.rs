//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::Context;
use krsupport_core::algorithm::{support_in, Options, SubSpaceChain};
use krsupport_core::building::{ball_capped, Building, ComplexSubset, Vertex, VertexMeta};
use krsupport_core::cycles::{cycle_dimension_type, irreducibility_criterion, VectorProbe};
use krsupport_core::oracle::{self, CheckOptions, OracleReport};
use serde::Serialize;

use crate::export::{self, Summary, WindowOut};
use crate::problem::Problem;
use crate::{CliError, Emit, RunArgs};

struct Run {
    problem: Problem,
    chain: SubSpaceChain,
    seed: Vertex,
    radius: Option<usize>,
    window: Option<ComplexSubset>,
    opts: Options,
}

fn prepare(args: &RunArgs) -> Result<Run, CliError> {
    let problem = Problem::load(&args.problem)?;
    let ambient = Arc::new(Building::new(problem.space.clone())?);
    let chain = SubSpaceChain::with_ambient(problem.tuple.clone(), ambient.clone())?;
    let seed = problem.explicit_seed(&ambient)?.unwrap_or_else(|| chain.seed_vertex().clone());
    let radius = args.radius.or(problem.radius);
    let full = problem.tuple.len() == problem.space.dim();
    let window = match radius {
        Some(r) => Some(ball_capped(&ambient, &seed, r, problem.caps.max_vertices)?),
        None if full => None,
        None => return Err(CliError::Ingest("window.radius: required when there are fewer than n vectors".into())),
    };
    let opts =
        Options { cap: problem.caps.max_distance_search, fault_phi_stage: args.fault_phi_stage, ..Options::default() };
    Ok(Run { problem, chain, seed, radius, window, opts })
}

fn annotate(b: &Building, run: &Run, s: &mut ComplexSubset) -> Result<(), CliError> {
    let probes =
        run.problem.tuple.vectors().iter().map(|x| VectorProbe::new(b.fast(), x)).collect::<Result<Vec<_>, _>>()?;
    for i in 0..s.len() {
        let v = &s.vertices()[i];
        let kr =
            probes.iter().map(|p| p.stratum(b.fast(), v.key()).map(|k| (k.a, k.b))).collect::<Result<Vec<_>, _>>()?;
        s.set_meta(i, VertexMeta { kr });
    }
    Ok(())
}

fn support(run: &Run) -> Result<(ComplexSubset, Vec<export::StageOut>), CliError> {
    let b = run.chain.ambient();
    let out = support_in(&run.chain, run.window.as_ref().map(|w| w.vertices()), &run.opts)?;
    let mut s = match &run.window {
        Some(w) => {
            let keep: std::collections::BTreeSet<&Vertex> = out.support.iter().collect();
            w.restrict(|i| keep.contains(&w.vertices()[i]))
        }
        None => ComplexSubset::from_vertices(b, out.support.iter().cloned())?,
    };
    annotate(b, run, &mut s)?;
    Ok((s, export::stages(run.problem.space.dim(), &out.stages)))
}

fn write(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let p = dir.join(name);
    fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
    Ok(())
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn summary(run: &Run, s: &ComplexSubset, stages: Vec<export::StageOut>) -> Result<Summary, CliError> {
    let n = run.problem.space.dim();
    let full = run.problem.tuple.len() == n;
    Ok(Summary {
        vertices: s.len(),
        edges: s.edges().len(),
        types: export::types(n, s),
        kr_histogram: export::kr_histogram(s),
        components: export::components(s),
        maximal_vertices: s.maximal_vertices().len(),
        t0: cycle_dimension_type(&run.problem.tuple),
        valuations: run.problem.tuple.valuations().to_vec(),
        irreducible: if full { Some(irreducibility_criterion(&run.problem.tuple)?) } else { None },
        finite: if full && run.window.is_none() { Some(true) } else { None },
        window: run.window.as_ref().map(|w| WindowOut {
            radius: run.radius.unwrap_or(0),
            size: w.len(),
            seed: s.index_of(&run.seed),
        }),
        stages,
    })
}

fn emit_complex(args: &RunArgs, b: &Building, s: &ComplexSubset) -> Result<(), CliError> {
    if args.emit.contains(&Emit::Json) {
        write(&args.out, "support.json", &json(&export::complex(b, s)))?;
    }
    if args.emit.contains(&Emit::Dot) {
        write(&args.out, "support.dot", &export::dot(s))?;
    }
    Ok(())
}

pub fn compute(args: &RunArgs) -> Result<(), CliError> {
    let run = prepare(args)?;
    let (s, stages) = support(&run)?;
    let b = run.chain.ambient().clone();
    emit_complex(args, &b, &s)?;
    write(&args.out, "stages.jsonl", &export::jsonl(&stages))?;
    let sum = summary(&run, &s, stages)?;
    write(&args.out, "summary.json", &json(&sum))?;
    println!("{}", s.summary(run.problem.space.dim()));
    println!("components: {}, maximal vertices: {}", sum.components, sum.maximal_vertices);
    Ok(())
}

#[derive(Serialize)]
struct DiscrepancyOut {
    check: String,
    detail: String,
}

#[derive(Serialize)]
struct CensusTally {
    subvertices: usize,
    all_above_in_support: usize,
    exactly_one_above: usize,
    max_vertices: usize,
}

#[derive(Serialize)]
struct ReportOut {
    radius: usize,
    window_size: usize,
    seed_in_support: bool,
    support_size: usize,
    algorithm_size: Option<usize>,
    components: usize,
    interior_components: usize,
    census: Option<Vec<CensusTally>>,
    stages: Vec<export::StageOut>,
    partial_stages: Vec<String>,
    discrepancies: Vec<DiscrepancyOut>,
}

fn tally(entries: &[oracle::CensusEntry]) -> Vec<CensusTally> {
    let mut m: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for e in entries {
        *m.entry((e.subvertices, e.all_above_in_support, e.exactly_one_above)).or_default() += 1;
    }
    m.into_iter()
        .map(|((subvertices, all_above_in_support, exactly_one_above), max_vertices)| CensusTally {
            subvertices,
            all_above_in_support,
            exactly_one_above,
            max_vertices,
        })
        .collect()
}

/// oracle-check skips the max-type census above this dimension; `census` always runs it.
const CENSUS_MAX_DIM: usize = 4;

/// Eccentricity of `seed` inside a finite subcomplex, by breadth-first search along its edges.
fn eccentricity(s: &ComplexSubset, seed: &Vertex) -> Option<usize> {
    let start = s.index_of(seed)?;
    let mut adj = vec![Vec::new(); s.len()];
    for &(i, j) in s.edges() {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut dist = vec![usize::MAX; s.len()];
    dist[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for &j in &adj[i] {
            if dist[j] == usize::MAX {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    dist.into_iter().max()
}

pub fn oracle_check(args: &RunArgs) -> Result<(), CliError> {
    let mut run = prepare(args)?;
    if run.window.is_none() && args.predicate_only {
        return Err(CliError::Ingest("--predicate-only needs window.radius".into()));
    }
    if run.window.is_none() {
        // full closure: check it against the ball that just covers it
        let out = support_in(&run.chain, None, &run.opts)?;
        let s = ComplexSubset::from_vertices(run.chain.ambient(), out.support)?;
        let r = eccentricity(&s, &run.seed)
            .filter(|&d| d != usize::MAX)
            .ok_or_else(|| CliError::Discrepancy("full support is not connected to the seed".into()))?;
        run.radius = Some(r + 1);
        run.window = Some(ball_capped(run.chain.ambient(), &run.seed, r + 1, run.problem.caps.max_vertices)?);
    }
    let (Some(w), Some(r)) = (&run.window, run.radius) else {
        unreachable!("window set above");
    };
    let n = run.problem.space.dim();
    let checks =
        CheckOptions { algorithm: !args.predicate_only, census: n <= CENSUS_MAX_DIM, ..CheckOptions::default() };
    let rep: OracleReport = oracle::cross_validate(&run.chain, w, &run.seed, r, &run.opts, &checks)?;
    let out = ReportOut {
        radius: r,
        window_size: rep.window_size,
        seed_in_support: rep.support.contains(&rep.seed),
        support_size: rep.support.len(),
        algorithm_size: rep.algorithm_size,
        components: rep.components,
        interior_components: rep.interior_components,
        census: checks.census.then(|| tally(&rep.census)),
        stages: export::stages(n, &rep.stages),
        partial_stages: rep.partial_stages.clone(),
        discrepancies: rep
            .discrepancies
            .iter()
            .map(|d| DiscrepancyOut { check: d.check.clone(), detail: d.detail.clone() })
            .collect(),
    };
    write(&args.out, "report.json", &json(&out))?;
    emit_complex(args, run.chain.ambient(), &rep.support)?;
    println!("window {} vertices, support {} vertices", rep.window_size, rep.support.len());
    if rep.discrepancies.is_empty() {
        println!("consistent");
        Ok(())
    } else {
        for d in &rep.discrepancies {
            println!("DISCREPANCY [{}] {}", d.check, d.detail);
        }
        Err(CliError::Discrepancy(format!("{} checks failed", rep.discrepancies.len())))
    }
}

#[derive(Serialize)]
struct CensusVertex {
    vertex: usize,
    subvertex_type: usize,
    subvertices: usize,
    all_above_in_support: usize,
    exactly_one_above: usize,
    above: Vec<[usize; 2]>,
}

#[derive(Serialize)]
struct CensusOut {
    tally: Vec<CensusTally>,
    vertices: Vec<CensusVertex>,
}

pub fn census(args: &RunArgs) -> Result<(), CliError> {
    let run = prepare(args)?;
    let (s, _) = support(&run)?;
    let b = run.chain.ambient();
    let entries = oracle::census(b, &run.problem.tuple, &s)?;
    let out = CensusOut {
        tally: tally(&entries),
        vertices: entries
            .iter()
            .map(|e| CensusVertex {
                vertex: e.vertex,
                subvertex_type: e.subvertex_type,
                subvertices: e.subvertices,
                all_above_in_support: e.all_above_in_support,
                exactly_one_above: e.exactly_one_above,
                above: e.above.iter().map(|&(a, k)| [a, k]).collect(),
            })
            .collect(),
    };
    write(&args.out, "census.json", &json(&out))?;
    emit_complex(args, b, &s)?;
    for t in &out.tally {
        println!(
            "{} max vertices: {} subvertices, {} with all components above in the support, {} with exactly one",
            t.max_vertices, t.subvertices, t.all_above_in_support, t.exactly_one_above
        );
    }
    Ok(())
}
