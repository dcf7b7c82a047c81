//! Problem files.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "epsilon": -1,
//!   "dimension": 2,
//!   "form": [[0, 1], [-1, 0]],
//!   "lagrangians": { "L1": [[1], [0]], "L2": [[0], [1]] },
//!   "loops": { "half": [ { "theta": 0, "basis": [[1], [0]] }, ... ] },
//!   "tolerance": { "rel": 1e-10, "abs": 1e-12 }
//! }
//! ```
//!
//! Matrices are row-major nested arrays. The columns of a lagrangian matrix
//! are its spanning vectors. `schema_version`, `form`, `loops` and
//! `tolerance` are optional; `form` defaults to the standard hyperbolic form.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use lagtrans_core::forms::{BilinearFormMatrix, Sign, Tolerance};
use lagtrans_core::phase_space::{EpsSpace, Lagrangian};
use nalgebra::DMatrix;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u64 = 1;

const KNOWN_KEYS: [&str; 7] = [
    "schema_version",
    "epsilon",
    "dimension",
    "form",
    "lagrangians",
    "loops",
    "tolerance",
];

/// Samples of a named loop, validated one by one. Closure and sampling
/// density are checked by the commands that use the loop.
#[derive(Debug, Clone)]
pub struct LoopSpec {
    pub thetas: Vec<f64>,
    pub samples: Vec<Lagrangian>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub tolerance: Tolerance,
    pub space: Arc<EpsSpace>,
    pub lagrangians: BTreeMap<String, Lagrangian>,
    pub loops: BTreeMap<String, LoopSpec>,
}

impl Problem {
    pub fn epsilon(&self) -> Sign {
        self.space.epsilon()
    }

    pub fn lagrangian(&self, name: &str) -> Result<&Lagrangian, CliError> {
        self.lagrangians
            .get(name)
            .ok_or_else(|| CliError::UnknownName {
                kind: "lagrangian",
                name: name.to_string(),
            })
    }

    pub fn loop_spec(&self, name: &str) -> Result<&LoopSpec, CliError> {
        self.loops.get(name).ok_or_else(|| CliError::UnknownName {
            kind: "loop",
            name: name.to_string(),
        })
    }
}

/// Reads and validates a problem file. `tol_override` replaces the file's
/// tolerance block.
pub fn parse_problem(path: &Path, tol_override: Option<Tolerance>) -> Result<Problem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_problem_str(&text, tol_override)
}

pub fn parse_problem_str(text: &str, tol_override: Option<Tolerance>) -> Result<Problem, CliError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| CliError::schema("$", format!("invalid JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| CliError::schema("$", "expected an object"))?;
    if let Some(key) = obj.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(CliError::schema(key.as_str(), "unknown field"));
    }

    if let Some(v) = obj.get("schema_version") {
        if v.as_u64() != Some(SCHEMA_VERSION) {
            return Err(CliError::schema(
                "schema_version",
                format!("unsupported version {v}, expected {SCHEMA_VERSION}"),
            ));
        }
    }

    let epsilon = match require(obj, "epsilon")?.as_i64() {
        Some(1) => Sign::Plus,
        Some(-1) => Sign::Minus,
        _ => return Err(CliError::schema("epsilon", "expected 1 or -1")),
    };
    let dimension = require(obj, "dimension")?
        .as_u64()
        .filter(|&d| d > 0)
        .ok_or_else(|| CliError::schema("dimension", "expected a positive integer"))?
        as usize;
    if !dimension.is_multiple_of(2) {
        return Err(CliError::validation(
            "dimension",
            lagtrans_core::Error::OddDimension(dimension),
        ));
    }

    let tolerance = match tol_override {
        Some(t) => t,
        None => parse_tolerance(obj.get("tolerance"))?,
    };

    let space = match obj.get("form") {
        None | Some(Value::Null) => EpsSpace::standard(dimension / 2, epsilon),
        Some(v) => {
            let m = parse_matrix(v, "form")?;
            if m.shape() != (dimension, dimension) {
                return Err(CliError::validation(
                    "form",
                    lagtrans_core::Error::DimensionMismatch {
                        expected: dimension,
                        found: if m.nrows() == dimension {
                            m.ncols()
                        } else {
                            m.nrows()
                        },
                    },
                ));
            }
            let form = BilinearFormMatrix::new(m, epsilon, &tolerance)
                .map_err(|e| CliError::validation("form", e))?;
            EpsSpace::new(form, &tolerance).map_err(|e| CliError::validation("form", e))?
        }
    };
    let space = Arc::new(space);

    let lag_obj = require(obj, "lagrangians")?
        .as_object()
        .ok_or_else(|| CliError::schema("lagrangians", "expected an object of matrices"))?;
    let mut lagrangians = BTreeMap::new();
    for (name, v) in lag_obj {
        let field = format!("lagrangians.{name}");
        let frame = parse_matrix(v, &field)?;
        let l = Lagrangian::from_frame(&space, frame, &tolerance)
            .map_err(|e| CliError::validation(field, e))?;
        lagrangians.insert(name.clone(), l);
    }

    let mut loops = BTreeMap::new();
    if let Some(v) = obj.get("loops") {
        let loop_obj = v
            .as_object()
            .ok_or_else(|| CliError::schema("loops", "expected an object of sample lists"))?;
        for (name, v) in loop_obj {
            loops.insert(name.clone(), parse_loop(v, name, &space, &tolerance)?);
        }
    }

    Ok(Problem {
        tolerance,
        space,
        lagrangians,
        loops,
    })
}

fn require<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, CliError> {
    obj.get(key)
        .ok_or_else(|| CliError::schema(key, "missing required field"))
}

fn parse_tolerance(v: Option<&Value>) -> Result<Tolerance, CliError> {
    let Some(v) = v else {
        return Ok(Tolerance::default());
    };
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::schema("tolerance", "expected an object"))?;
    let get = |key: &str, default: f64| -> Result<f64, CliError> {
        match obj.get(key) {
            None => Ok(default),
            Some(x) => x
                .as_f64()
                .ok_or_else(|| CliError::schema(format!("tolerance.{key}"), "expected a number")),
        }
    };
    let rel = get("rel", Tolerance::DEFAULT_REL)?;
    let abs = get("abs", Tolerance::DEFAULT_ABS)?;
    Tolerance::new(rel, abs).map_err(|e| CliError::validation("tolerance", e))
}

fn parse_matrix(v: &Value, field: &str) -> Result<DMatrix<f64>, CliError> {
    let rows = v
        .as_array()
        .ok_or_else(|| CliError::schema(field, "expected an array of rows"))?;
    if rows.is_empty() {
        return Err(CliError::schema(field, "matrix has no rows"));
    }
    let mut data = Vec::new();
    let mut width = None;
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| CliError::schema(format!("{field}[{i}]"), "expected an array"))?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(CliError::schema(
                    format!("{field}[{i}]"),
                    format!("row has {} entries, expected {w}", row.len()),
                ))
            }
            _ => {}
        }
        for (j, x) in row.iter().enumerate() {
            let x = x.as_f64().filter(|x| x.is_finite()).ok_or_else(|| {
                CliError::schema(format!("{field}[{i}][{j}]"), "expected a finite number")
            })?;
            data.push(x);
        }
    }
    let width = width.unwrap_or(0);
    if width == 0 {
        return Err(CliError::schema(field, "matrix has no columns"));
    }
    Ok(DMatrix::from_row_slice(rows.len(), width, &data))
}

fn parse_loop(
    v: &Value,
    name: &str,
    space: &Arc<EpsSpace>,
    tol: &Tolerance,
) -> Result<LoopSpec, CliError> {
    let field = format!("loops.{name}");
    let items = v
        .as_array()
        .ok_or_else(|| CliError::schema(field.as_str(), "expected an array of samples"))?;
    let mut thetas = Vec::with_capacity(items.len());
    let mut samples = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let item_field = format!("{field}[{i}]");
        let obj = item.as_object().ok_or_else(|| {
            CliError::schema(item_field.as_str(), "expected {\"theta\", \"basis\"}")
        })?;
        let theta = obj
            .get("theta")
            .and_then(Value::as_f64)
            .ok_or_else(|| CliError::schema(format!("{item_field}.theta"), "expected a number"))?;
        let basis_field = format!("{item_field}.basis");
        let basis = obj
            .get("basis")
            .ok_or_else(|| CliError::schema(basis_field.as_str(), "missing required field"))?;
        let frame = parse_matrix(basis, &basis_field)?;
        let l = Lagrangian::from_frame(space, frame, tol)
            .map_err(|e| CliError::validation(basis_field, e))?;
        thetas.push(theta);
        samples.push(l);
    }
    Ok(LoopSpec { thetas, samples })
}
