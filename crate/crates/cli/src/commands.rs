//! Command dispatch and report assembly.

use std::sync::Arc;

use clap::ValueEnum;
use lagtrans_core::deformation::{
    deform_family_symmetric, deform_family_to_mutually_transversal, deform_third_to_transversal,
    make_transversal_pair, LagrangianPath,
};
use lagtrans_core::forms::{Sign, Signature, Tolerance};
use lagtrans_core::kashiwara::{
    all_pairwise_transversal, kashiwara_bilinear, lk_invariant, transversality_criterion,
};
use lagtrans_core::loops::{loop_maslov_index, phase_increments, LagrangianLoop};
use lagtrans_core::phase_space::{
    darboux_pair_normalization, extract_graph_map, standard_space, EpsSpace, Lagrangian,
};
use lagtrans_core::subspace;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::problem::{Problem, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Transversal,
    Kashiwara,
    Deform,
    LoopIndex,
    Lk,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Transversal => "transversal",
            Command::Kashiwara => "kashiwara",
            Command::Deform => "deform",
            Command::LoopIndex => "loop-index",
            Command::Lk => "lk",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub steps: usize,
    pub pairs: Vec<[String; 2]>,
    pub triples: Vec<[String; 3]>,
    pub family: Option<Vec<String>>,
    pub loops: Vec<String>,
    pub jobs: Option<usize>,
}

/// A finished report. `contract_violation` is set when the two
/// transversality criteria disagreed on some triple.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: String,
    pub contract_violation: bool,
}

type Matrix = Vec<Vec<f64>>;

fn rows(m: &DMatrix<f64>) -> Matrix {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn column(m: &DMatrix<f64>) -> Vec<f64> {
    m.iter().copied().collect()
}

#[derive(Serialize)]
struct Header<'a, T: Serialize> {
    schema_version: u64,
    command: &'a str,
    epsilon: i8,
    dimension: usize,
    tolerance: ToleranceReport,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct ToleranceReport {
    rel: f64,
    abs: f64,
}

#[derive(Serialize)]
struct Inertia {
    positives: usize,
    negatives: usize,
    zeros: usize,
}

impl From<Signature> for Inertia {
    fn from(s: Signature) -> Self {
        Inertia {
            positives: s.positives,
            negatives: s.negatives,
            zeros: s.zeros,
        }
    }
}

pub fn run(command: Command, problem: &Problem, options: &Options) -> Result<Outcome, CliError> {
    let mut contract_violation = false;
    let report = match command {
        Command::Validate => render(command, problem, validate(problem)?),
        Command::Transversal => render(command, problem, transversal(problem, options)?),
        Command::Kashiwara => {
            let body = kashiwara(problem, options)?;
            contract_violation = body
                .triples
                .iter()
                .any(|t| t.transversal != t.form_nondegenerate);
            render(command, problem, body)
        }
        Command::Deform => render(command, problem, deform(problem, options)?),
        Command::LoopIndex => render(command, problem, loop_index(problem, options)?),
        Command::Lk => render(command, problem, lk(problem, options)?),
    };
    Ok(Outcome {
        report,
        contract_violation,
    })
}

fn render<T: Serialize>(command: Command, problem: &Problem, body: T) -> String {
    crate::json::to_report_string(&Header {
        schema_version: SCHEMA_VERSION,
        command: command.name(),
        epsilon: problem.epsilon().as_i8(),
        dimension: problem.space.dim(),
        tolerance: ToleranceReport {
            rel: problem.tolerance.rel_eps,
            abs: problem.tolerance.abs_eps,
        },
        body,
    })
}

/// Applies `f` to every item, on a pool of `jobs` threads when requested.
/// Output order follows input order.
fn map_entries<T, R, F>(items: &[T], jobs: Option<usize>, f: F) -> Result<Vec<R>, CliError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R, CliError> + Sync + Send,
{
    match jobs {
        Some(n) if n > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))?;
            pool.install(|| items.par_iter().map(&f).collect())
        }
        _ => items.iter().map(f).collect(),
    }
}

// validate

#[derive(Serialize)]
struct ValidateBody {
    standard_form: bool,
    lagrangians: Vec<LagrangianCheck>,
    loops: Vec<LoopCheck>,
}

#[derive(Serialize)]
struct LagrangianCheck {
    name: String,
    isotropy_residual: f64,
}

#[derive(Serialize)]
struct LoopCheck {
    name: String,
    samples: usize,
    closed: bool,
}

fn build_loop(problem: &Problem, name: &str) -> Result<LagrangianLoop, CliError> {
    let spec = problem.loop_spec(name)?;
    LagrangianLoop::new(
        &problem.space,
        spec.thetas.clone(),
        spec.samples.clone(),
        &problem.tolerance,
    )
    .map_err(|e| CliError::validation(format!("loops.{name}"), e))
}

fn validate(problem: &Problem) -> Result<ValidateBody, CliError> {
    let lagrangians = problem
        .lagrangians
        .iter()
        .map(|(name, l)| LagrangianCheck {
            name: name.clone(),
            isotropy_residual: l.residual(),
        })
        .collect();
    let mut loops = Vec::new();
    if !problem.loops.is_empty() && problem.epsilon() != Sign::Minus {
        return Err(CliError::validation(
            "loops",
            lagtrans_core::Error::EpsilonMismatch,
        ));
    }
    for name in problem.loops.keys() {
        let lp = build_loop(problem, name)?;
        loops.push(LoopCheck {
            name: name.clone(),
            samples: lp.len(),
            closed: true,
        });
    }
    Ok(ValidateBody {
        standard_form: problem.space.is_standard(),
        lagrangians,
        loops,
    })
}

// transversal

#[derive(Serialize)]
struct TransversalBody {
    pairs: Vec<PairEntry>,
}

#[derive(Serialize)]
struct PairEntry {
    pair: [String; 2],
    transversal: bool,
    intersection_dim: usize,
    principal_angles: Vec<f64>,
}

fn default_pairs(problem: &Problem) -> Vec<[String; 2]> {
    let names: Vec<_> = problem.lagrangians.keys().cloned().collect();
    let mut out = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            out.push([names[i].clone(), names[j].clone()]);
        }
    }
    out
}

fn transversal(problem: &Problem, options: &Options) -> Result<TransversalBody, CliError> {
    let pairs = if options.pairs.is_empty() {
        default_pairs(problem)
    } else {
        options.pairs.clone()
    };
    let tol = &problem.tolerance;
    let pairs = map_entries(&pairs, options.jobs, |[a, b]| {
        let (la, lb) = (problem.lagrangian(a)?, problem.lagrangian(b)?);
        let common = subspace::intersect(la.subspace(), lb.subspace(), tol)?;
        Ok(PairEntry {
            pair: [a.clone(), b.clone()],
            transversal: common.dim() == 0,
            intersection_dim: common.dim(),
            principal_angles: subspace::principal_angles(la.subspace(), lb.subspace())?,
        })
    })?;
    Ok(TransversalBody { pairs })
}

// kashiwara

#[derive(Serialize)]
struct KashiwaraBody {
    triples: Vec<TripleEntry>,
}

#[derive(Serialize)]
struct TripleEntry {
    triple: [String; 3],
    matrix: Matrix,
    rank: usize,
    signature: i64,
    inertia: Inertia,
    triple_index: i64,
    /// Pairs (1,2), (1,3), (2,3).
    pairwise_transversal: [bool; 3],
    transversal: bool,
    form_nondegenerate: bool,
    radical_witness: Option<WitnessEntry>,
}

#[derive(Serialize)]
struct WitnessEntry {
    pair: [usize; 2],
    vector: Vec<f64>,
    carrier: Vec<f64>,
    residual: f64,
}

fn default_triples(problem: &Problem) -> Vec<[String; 3]> {
    let names: Vec<_> = problem.lagrangians.keys().cloned().collect();
    let mut out = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            for k in j + 1..names.len() {
                out.push([names[i].clone(), names[j].clone(), names[k].clone()]);
            }
        }
    }
    out
}

fn selected_triples(problem: &Problem, options: &Options) -> Vec<[String; 3]> {
    if options.triples.is_empty() {
        default_triples(problem)
    } else {
        options.triples.clone()
    }
}

fn resolve<'a>(problem: &'a Problem, names: &[String; 3]) -> Result<[&'a Lagrangian; 3], CliError> {
    Ok([
        problem.lagrangian(&names[0])?,
        problem.lagrangian(&names[1])?,
        problem.lagrangian(&names[2])?,
    ])
}

fn kashiwara(problem: &Problem, options: &Options) -> Result<KashiwaraBody, CliError> {
    let tol = &problem.tolerance;
    let triples = map_entries(&selected_triples(problem, options), options.jobs, |names| {
        let [a, b, c] = resolve(problem, names)?;
        let psi = kashiwara_bilinear(&problem.space, a, b, c)?;
        let criterion = transversality_criterion(&problem.space, a, b, c, tol)?;
        let sig = psi.signature(tol);
        Ok(TripleEntry {
            triple: names.clone(),
            matrix: rows(psi.entries()),
            rank: sig.rank(),
            signature: sig.index(),
            inertia: sig.into(),
            triple_index: sig.index(),
            pairwise_transversal: criterion.pairs,
            transversal: criterion.pairwise_transversal,
            form_nondegenerate: criterion.form_nondegenerate,
            radical_witness: criterion.witness.map(|w| WitnessEntry {
                pair: [w.pair.0, w.pair.1],
                vector: column(&w.vector),
                carrier: column(&w.carrier),
                residual: w.residual,
            }),
        })
    })?;
    Ok(KashiwaraBody { triples })
}

// lk

#[derive(Serialize)]
struct LkBody {
    triples: Vec<LkEntry>,
}

#[derive(Serialize)]
struct LkEntry {
    triple: [String; 3],
    rank_delta: i64,
    signature: i64,
}

fn lk(problem: &Problem, options: &Options) -> Result<LkBody, CliError> {
    let tol = &problem.tolerance;
    let triples = map_entries(&selected_triples(problem, options), options.jobs, |names| {
        let [a, b, c] = resolve(problem, names)?;
        let class = lk_invariant(&problem.space, a, b, c, tol)?;
        Ok(LkEntry {
            triple: names.clone(),
            rank_delta: class.rank_delta,
            signature: class.signature,
        })
    })?;
    Ok(LkBody { triples })
}

// loop-index

#[derive(Serialize)]
struct LoopBody {
    loops: Vec<LoopEntry>,
}

#[derive(Serialize)]
struct LoopEntry {
    name: String,
    samples: usize,
    index: i64,
    max_phase_step: f64,
}

fn loop_index(problem: &Problem, options: &Options) -> Result<LoopBody, CliError> {
    let names: Vec<String> = if options.loops.is_empty() {
        problem.loops.keys().cloned().collect()
    } else {
        options.loops.clone()
    };
    let tol = &problem.tolerance;
    let loops = map_entries(&names, options.jobs, |name| {
        let lp = build_loop(problem, name)?;
        let index = loop_maslov_index(&lp, tol)?;
        let max_phase_step = phase_increments(&lp, tol)?
            .into_iter()
            .fold(0.0, |m: f64, x| m.max(x.abs()));
        Ok(LoopEntry {
            name: name.clone(),
            samples: lp.len(),
            index,
            max_phase_step,
        })
    })?;
    Ok(LoopBody { loops })
}

// deform

#[derive(Serialize)]
struct DeformBody {
    mode: &'static str,
    /// `original` for the input space, `normalized` for the standard
    /// (possibly stabilized) space of the Darboux frame.
    coordinates: &'static str,
    lagrangians: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    frame: Option<Matrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stabilization: Option<StabilizationEntry>,
    paths: Vec<PathEntry>,
    endpoints_transversal: bool,
}

#[derive(Serialize)]
struct StabilizationEntry {
    stabilized: bool,
    original_nprime: usize,
    effective_nprime: usize,
}

#[derive(Serialize)]
struct PathEntry {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph_map: Option<Matrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<Matrix>,
    max_residual: f64,
    samples: Vec<SampleEntry>,
}

#[derive(Serialize)]
struct SampleEntry {
    t: f64,
    basis: Matrix,
    residual: f64,
}

fn samples_of(path: &[(f64, Lagrangian)]) -> Vec<SampleEntry> {
    path.iter()
        .map(|(t, l)| SampleEntry {
            t: *t,
            basis: rows(l.basis()),
            residual: l.residual(),
        })
        .collect()
}

fn path_samples(path: &LagrangianPath) -> Vec<(f64, Lagrangian)> {
    path.samples()
        .iter()
        .map(|s| (s.t, s.lagrangian.clone()))
        .collect()
}

fn deform(problem: &Problem, options: &Options) -> Result<DeformBody, CliError> {
    if let Some([a, b]) = options.pairs.first() {
        if options.pairs.len() > 1 || !options.triples.is_empty() || options.family.is_some() {
            return Err(CliError::Usage(
                "deform takes exactly one of --pair, --triple or --family".into(),
            ));
        }
        return deform_pair(problem, options, a, b);
    }
    let names: Vec<String> = match (&options.family, options.triples.as_slice()) {
        (Some(f), []) => f.clone(),
        (None, [t]) => t.to_vec(),
        (None, []) if problem.lagrangians.len() == 3 => {
            problem.lagrangians.keys().cloned().collect()
        }
        _ => {
            return Err(CliError::Usage(
                "deform takes exactly one of --pair, --triple or --family".into(),
            ))
        }
    };
    if names.len() < 3 {
        return Err(CliError::Usage(
            "a deformation family needs at least three lagrangians".into(),
        ));
    }
    deform_graphs(problem, options, names)
}

fn deform_pair(
    problem: &Problem,
    options: &Options,
    a: &str,
    b: &str,
) -> Result<DeformBody, CliError> {
    let tol = &problem.tolerance;
    let (la, lb) = (problem.lagrangian(a)?, problem.lagrangian(b)?);
    let path = make_transversal_pair(&problem.space, la, lb, options.steps, tol)?;
    let endpoints_transversal = all_pairwise_transversal(&[la, path.end()], tol)?;
    Ok(DeformBody {
        mode: "pair",
        coordinates: "original",
        lagrangians: vec![a.to_string(), b.to_string()],
        frame: None,
        stabilization: None,
        paths: vec![PathEntry {
            name: b.to_string(),
            graph_map: None,
            target: None,
            max_residual: path.max_residual(),
            samples: samples_of(&path_samples(&path)),
        }],
        endpoints_transversal,
    })
}

/// Normalizes the first two lagrangians to `(L, L*)`, writes the others as
/// graphs over `L` and deforms those graphs to mutually transversal ones.
fn deform_graphs(
    problem: &Problem,
    options: &Options,
    names: Vec<String>,
) -> Result<DeformBody, CliError> {
    let tol = &problem.tolerance;
    let ls = names
        .iter()
        .map(|n| problem.lagrangian(n))
        .collect::<Result<Vec<_>, _>>()?;
    let frame = darboux_pair_normalization(&problem.space, ls[0], ls[1], tol)?;
    let nprime = problem.space.nprime();
    let gs = names[2..]
        .iter()
        .zip(&ls[2..])
        .map(|(name, l)| {
            let pulled = frame.pull_back(l, tol)?;
            extract_graph_map(&frame.standard, &pulled, tol)
                .map_err(|e| CliError::validation(format!("lagrangians.{name}"), e))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let (paths, space, stabilization): (Vec<LagrangianPath>, Arc<EpsSpace>, _) =
        match problem.epsilon() {
            Sign::Minus if gs.len() == 1 => {
                let path = deform_third_to_transversal(nprime, &gs[0], options.steps, tol)?;
                let space = Arc::clone(path.space());
                (vec![path], space, None)
            }
            Sign::Minus => {
                let paths = deform_family_to_mutually_transversal(nprime, &gs, options.steps, tol)?;
                (paths, Arc::clone(&frame.standard), None)
            }
            Sign::Plus => {
                let def = deform_family_symmetric(nprime, &gs, options.steps, tol)?;
                let report = StabilizationEntry {
                    stabilized: def.report.stabilized,
                    original_nprime: def.report.original_nprime,
                    effective_nprime: def.report.effective_nprime,
                };
                (def.paths, def.space, Some(report))
            }
        };

    let std = standard_space(space.nprime(), space.epsilon())?;
    let mut ends: Vec<&Lagrangian> = vec![&std.l_factor, &std.lstar_factor];
    ends.extend(paths.iter().map(|p| p.end()));
    let endpoints_transversal = all_pairwise_transversal(&ends, tol)?;

    // Paths on the unstabilized space are reported in input coordinates.
    let original = space.dim() == problem.space.dim();
    let mut entries = Vec::with_capacity(paths.len());
    for ((name, g), path) in names[2..].iter().zip(&gs).zip(&paths) {
        let target = extract_graph_map(&space, path.end(), tol)?;
        let mut samples = path_samples(path);
        if original {
            for (_, l) in samples.iter_mut() {
                *l = frame.push_forward(l, tol)?;
            }
        }
        let max_residual = samples
            .iter()
            .fold(0.0, |m: f64, (_, l)| m.max(l.residual()));
        entries.push(PathEntry {
            name: name.clone(),
            graph_map: Some(rows(g.entries())),
            target: Some(rows(target.entries())),
            max_residual,
            samples: samples_of(&samples),
        });
    }

    Ok(DeformBody {
        mode: "graph",
        coordinates: if original { "original" } else { "normalized" },
        lagrangians: names,
        frame: Some(rows(&frame.matrix)),
        stabilization,
        paths: entries,
        endpoints_transversal,
    })
}

/// Parses `REL[,ABS]`.
pub fn parse_tolerance_flag(s: &str) -> Result<Tolerance, String> {
    let mut parts = s.split(',');
    let rel = parts
        .next()
        .and_then(|x| x.trim().parse::<f64>().ok())
        .ok_or_else(|| format!("expected REL[,ABS], got `{s}`"))?;
    let abs = match parts.next() {
        None => Tolerance::DEFAULT_ABS,
        Some(x) => x
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("expected REL[,ABS], got `{s}`"))?,
    };
    if parts.next().is_some() {
        return Err(format!("expected REL[,ABS], got `{s}`"));
    }
    Tolerance::new(rel, abs).map_err(|e| e.to_string())
}
