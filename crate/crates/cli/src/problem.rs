//! Problem files: a single JSON document describing the space, the vectors and the window.

use std::path::Path;
use std::sync::Arc;

use krsupport_core::building::{Building, Vertex};
use krsupport_core::cycles::SpecialTuple;
use krsupport_core::lattices::{HermSpace, Lattice};
use krsupport_core::scalars::{ExtScalar, PadicContext};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    p: u64,
    #[serde(default)]
    epsilon: Option<i64>,
    n: usize,
    gram: Vec<Vec<Value>>,
    vectors: Vec<Vec<Value>>,
    #[serde(default)]
    window: Option<RawWindow>,
    #[serde(default)]
    caps: RawCaps,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWindow {
    #[serde(default)]
    radius: Option<usize>,
    #[serde(default = "auto")]
    seed: Value,
}

fn auto() -> Value {
    Value::String("auto".into())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCaps {
    #[serde(default = "default_max_vertices")]
    max_vertices: usize,
    #[serde(default = "default_max_search")]
    max_distance_search: usize,
}

impl Default for RawCaps {
    fn default() -> Self {
        Self { max_vertices: default_max_vertices(), max_distance_search: default_max_search() }
    }
}

fn default_max_vertices() -> usize {
    500_000
}

fn default_max_search() -> usize {
    500_000
}

/// Where the window is centred.
#[derive(Clone, Debug)]
pub enum Seed {
    Auto,
    Basis(Vec<Vec<ExtScalar>>),
}

#[derive(Clone, Copy, Debug)]
pub struct Caps {
    /// Largest window (ball) the run may enumerate.
    pub max_vertices: usize,
    /// Largest stage set the staged closure may build.
    pub max_distance_search: usize,
}

/// A validated problem.
#[derive(Debug)]
pub struct Problem {
    pub space: Arc<HermSpace>,
    pub tuple: Arc<SpecialTuple>,
    pub radius: Option<usize>,
    pub seed: Seed,
    pub caps: Caps,
}

fn ingest(msg: impl Into<String>) -> CliError {
    CliError::Ingest(msg.into())
}

/// A scalar is `[a_num, a_den, b_num, b_den]` for a + b·√ε, entries as integers or strings.
fn scalar(v: &Value, field: &str) -> Result<ExtScalar, CliError> {
    let arr = v.as_array().ok_or_else(|| ingest(format!("{field}: expected a 4-element array")))?;
    if arr.len() != 4 {
        return Err(ingest(format!("{field}: expected 4 entries, found {}", arr.len())));
    }
    let mut parts = Vec::with_capacity(4);
    for (k, e) in arr.iter().enumerate() {
        let s = match e {
            Value::Number(n) if n.is_i64() => n.to_string(),
            Value::String(s) => s.clone(),
            _ => return Err(ingest(format!("{field}[{k}]: expected an integer"))),
        };
        parts.push(s);
    }
    ExtScalar::from_tuple(&parts).map_err(|e| ingest(format!("{field}: {e}")))
}

fn matrix(rows: &[Vec<Value>], cols: usize, field: &str) -> Result<Vec<Vec<ExtScalar>>, CliError> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            if r.len() != cols {
                return Err(ingest(format!("{field}[{i}]: expected {cols} entries, found {}", r.len())));
            }
            r.iter().enumerate().map(|(j, v)| scalar(v, &format!("{field}[{i}][{j}]"))).collect()
        })
        .collect()
}

impl Problem {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| ingest(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawProblem =
            serde_json::from_str(text).map_err(|e| ingest(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        let ctx = match raw.epsilon {
            Some(eps) => PadicContext::new(raw.p, eps),
            None => PadicContext::with_default_eps(raw.p),
        }
        .map_err(|e| ingest(format!("p/epsilon: {e}")))?;
        if raw.n == 0 {
            return Err(ingest("n: must be positive"));
        }
        if raw.gram.len() != raw.n {
            return Err(ingest(format!("gram: expected {} rows, found {}", raw.n, raw.gram.len())));
        }
        let gram = matrix(&raw.gram, raw.n, "gram")?;
        let space = HermSpace::new(ctx, gram).map_err(|e| ingest(format!("gram: {e}")))?;
        if space.det_valuation().rem_euclid(2) != 1 {
            return Err(ingest(format!(
                "gram: the valuation of the determinant must be odd, found {}",
                space.det_valuation()
            )));
        }
        let space = Arc::new(space);
        if raw.vectors.is_empty() || raw.vectors.len() > raw.n {
            return Err(ingest(format!(
                "vectors: expected between 1 and {} vectors, found {}",
                raw.n,
                raw.vectors.len()
            )));
        }
        let x = matrix(&raw.vectors, raw.n, "vectors")?;
        let tuple = SpecialTuple::new(space.clone(), x).map_err(|e| ingest(format!("vectors: {e}")))?;
        let (radius, seed) = match raw.window {
            None => (None, Seed::Auto),
            Some(w) => {
                let seed = match &w.seed {
                    Value::String(s) if s == "auto" => Seed::Auto,
                    Value::Object(o) => {
                        let basis = o
                            .get("basis")
                            .and_then(Value::as_array)
                            .ok_or_else(|| ingest("window.seed: expected \"auto\" or {\"basis\": [...]}"))?;
                        let rows: Vec<Vec<Value>> = basis
                            .iter()
                            .map(|r| r.as_array().cloned().ok_or_else(|| ingest("window.seed.basis: expected arrays")))
                            .collect::<Result<_, _>>()?;
                        if rows.len() != raw.n {
                            return Err(ingest(format!("window.seed.basis: expected {} vectors", raw.n)));
                        }
                        Seed::Basis(matrix(&rows, raw.n, "window.seed.basis")?)
                    }
                    _ => return Err(ingest("window.seed: expected \"auto\" or {\"basis\": [...]}")),
                };
                (w.radius, seed)
            }
        };
        let caps = Caps { max_vertices: raw.caps.max_vertices, max_distance_search: raw.caps.max_distance_search };
        Ok(Self { space, tuple: Arc::new(tuple), radius, seed, caps })
    }

    /// The explicit seed as a certified vertex, if one was given.
    pub fn explicit_seed(&self, b: &Building) -> Result<Option<Vertex>, CliError> {
        match &self.seed {
            Seed::Auto => Ok(None),
            Seed::Basis(basis) => {
                let l = Lattice::new(self.space.clone(), basis).map_err(|e| ingest(format!("window.seed: {e}")))?;
                b.vertex(&l).map(Some).map_err(|e| ingest(format!("window.seed: {e}")))
            }
        }
    }
}
