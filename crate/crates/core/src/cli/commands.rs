//! Parameter records and dispatch for every command.
//!
//! Each command deserializes its parameter record (defaults filled in,
//! unknown keys rejected), runs, and returns an [`ExperimentReport`] whose
//! `params` field is the fully resolved record.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::concentration::{
    correlation_size_bound, cq_ratio_experiment, haar_gme_experiment, haar_tail_experiment,
    theorem2_threshold, CorrelationModel, CqOptions, HaarGmeOptions,
};
use crate::config::Budget;
use crate::gme::{als_estimate, e_g_interval, net_overlap_bound_with, AlsOptions, IntervalOptions, NetOptions};
use crate::graph::{
    adjacency_rank_log2, best_cut, bipartition_rank_bound, connected_graph_corpus, egeom_lower_bound,
    graph_state_vector_with_budget, greedy_persistency, pauli_persistency, Graph, DEFAULT_SEARCH_NODES,
    MAX_PERSISTENCY_VERTICES,
};
use crate::mbqc::{
    coinflip_failure_rate, coinflip_solve, parse_strategy, parse_verifier, run_strategy_exact, theorem1_record,
};
use crate::mera::{isometry_sup_overlap, normalized_gme, TreeNetworkSpec};
use crate::report::{canonical_json, ExperimentReport};
use crate::seed::derive_seed;
use crate::state::{haar_random_state_with_budget, StateVector};
use crate::{Error, Result};

/// Every command accepted by [`run`].
pub const COMMANDS: &[&str] = &[
    "gme",
    "net-bound",
    "haar-tail",
    "haar-gme",
    "theorem2-threshold",
    "cq",
    "corr-bound",
    "mbqc-enumerate",
    "mbqc-coinflip",
    "graph-bounds",
    "graph-corpus",
    "mera",
];

/// Runs `command` on a parameter record. Keys missing from `params` take
/// their defaults; unknown keys are rejected with the key named.
pub fn run(command: &str, params: &Value, budget: Budget) -> Result<ExperimentReport> {
    match command {
        "gme" => gme(parse(params)?, budget),
        "net-bound" => net_bound(parse(params)?, budget),
        "haar-tail" => haar_tail(parse(params)?),
        "haar-gme" => haar_gme(parse(params)?, budget),
        "theorem2-threshold" => threshold(parse(params)?),
        "cq" => cq(parse(params)?, budget),
        "corr-bound" => corr_bound(parse(params)?),
        "mbqc-enumerate" => mbqc_enumerate(parse(params)?, budget),
        "mbqc-coinflip" => mbqc_coinflip(parse(params)?),
        "graph-bounds" => graph_bounds(parse(params)?, budget),
        "graph-corpus" => graph_corpus(parse(params)?, budget),
        "mera" => mera(parse(params)?, budget),
        other => Err(Error::UnknownCommand(other.to_string())),
    }
}

fn parse<T: DeserializeOwned>(params: &Value) -> Result<T> {
    let value = if params.is_null() { Value::Object(Map::new()) } else { params.clone() };
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        // Unknown keys are reported by serde at the parent path.
        let field = match inner.strip_prefix("unknown field `") {
            Some(rest) => rest.split('`').next().unwrap_or(&path).to_string(),
            None => path,
        };
        Error::InvalidArgument { field, reason: inner }
    })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize to JSON")
}

fn to_rows<T: Serialize>(items: &[T]) -> Vec<Map<String, Value>> {
    items
        .iter()
        .map(|item| match to_value(item) {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        })
        .collect()
}

fn report<P: Serialize>(command: &str, params: &P, seed: u64, payload: Value, rows: Option<Vec<Map<String, Value>>>) -> ExperimentReport {
    ExperimentReport::new(command, to_value(params), seed, payload, rows)
}

/// Built-in state names: `bell`, `ghz:N`, `w:N`, `zero:N[:D]`, `plus:N`,
/// `haar:N[:D]:SEED`. Anything else is read as a state file.
fn builtin_state(name: &str, budget: Budget) -> Option<Result<StateVector>> {
    let parts: Vec<&str> = name.split(':').collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::invalid("state", format!("bad number in {name:?}")));
    let build = || -> Result<StateVector> {
        match parts.as_slice() {
            ["bell"] => Ok(StateVector::bell()),
            ["ghz", n] => {
                budget.check_dims(num(n)?, 2)?;
                StateVector::ghz(num(n)?)
            }
            ["w", n] => {
                budget.check_dims(num(n)?, 2)?;
                StateVector::w(num(n)?)
            }
            ["plus", n] => {
                budget.check_dims(num(n)?, 2)?;
                StateVector::plus(num(n)?)
            }
            ["zero", n] => {
                budget.check_dims(num(n)?, 2)?;
                StateVector::zero(num(n)?, 2)
            }
            ["zero", n, d] => {
                budget.check_dims(num(n)?, num(d)?)?;
                StateVector::zero(num(n)?, num(d)?)
            }
            ["haar", n, seed] => haar_random_state_with_budget(num(n)?, 2, num(seed)? as u64, budget),
            ["haar", n, d, seed] => haar_random_state_with_budget(num(n)?, num(d)?, num(seed)? as u64, budget),
            _ => unreachable!("checked by the caller"),
        }
    };
    matches!(parts.first(), Some(&("bell" | "ghz" | "w" | "plus" | "zero" | "haar"))).then(build)
}

/// Resolves a state parameter into a vector and its canonical record: the
/// built-in name as given, or the inline state object for files.
fn resolve_state(param: &Option<Value>, budget: Budget) -> Result<(StateVector, Value)> {
    match param {
        None => Err(Error::invalid("state", "a state is required")),
        Some(Value::String(name)) => {
            if let Some(state) = builtin_state(name, budget) {
                return Ok((state?, Value::String(name.clone())));
            }
            let text = std::fs::read_to_string(name)
                .map_err(|e| Error::invalid("state", format!("cannot read {name:?}: {e}")))?;
            let psi = StateVector::from_json(&text)?;
            budget.check_dims(psi.num_sites(), psi.local_dim())?;
            let record = serde_json::from_str(&psi.to_json())?;
            Ok((psi, record))
        }
        Some(obj @ Value::Object(_)) => {
            let psi = StateVector::from_json(&canonical_json(obj))?;
            budget.check_dims(psi.num_sites(), psi.local_dim())?;
            let record = serde_json::from_str(&psi.to_json())?;
            Ok((psi, record))
        }
        Some(_) => Err(Error::invalid("state", "expected a name, a file path or a state object")),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GmeParams {
    seed: u64,
    state: Option<Value>,
    restarts: Option<usize>,
    max_iters: usize,
    tol: f64,
    epsilon: f64,
    net_max_nodes: u64,
}

impl Default for GmeParams {
    fn default() -> Self {
        GmeParams {
            seed: 0,
            state: None,
            restarts: None,
            max_iters: AlsOptions::default().max_iters,
            tol: AlsOptions::default().tol,
            epsilon: 0.1,
            net_max_nodes: NetOptions::default().max_nodes,
        }
    }
}

fn gme(mut p: GmeParams, budget: Budget) -> Result<ExperimentReport> {
    let (psi, record) = resolve_state(&p.state, budget)?;
    p.state = Some(record);
    let opts = IntervalOptions {
        als: AlsOptions {
            restarts: p.restarts,
            max_iters: p.max_iters,
            tol: p.tol,
            seed: p.seed,
        },
        epsilon: p.epsilon,
        net: NetOptions { max_nodes: p.net_max_nodes },
    };
    let interval = e_g_interval(&psi, &opts)?;
    let mut payload = to_value(&interval);
    payload["certified_lower"] = json!(interval.certified_lower());
    payload["n"] = json!(psi.num_sites());
    payload["d"] = json!(psi.local_dim());
    Ok(report("gme", &p, p.seed, payload, None))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct NetBoundParams {
    seed: u64,
    state: Option<Value>,
    epsilon: f64,
    max_nodes: u64,
}

impl Default for NetBoundParams {
    fn default() -> Self {
        NetBoundParams {
            seed: 0,
            state: None,
            epsilon: 0.1,
            max_nodes: NetOptions::default().max_nodes,
        }
    }
}

fn net_bound(mut p: NetBoundParams, budget: Budget) -> Result<ExperimentReport> {
    let (psi, record) = resolve_state(&p.state, budget)?;
    p.state = Some(record);
    let witness = als_estimate(&psi, &AlsOptions { restarts: Some(8), ..AlsOptions::with_seed(p.seed) })?;
    let bound = net_overlap_bound_with(&psi, p.epsilon, &NetOptions { max_nodes: p.max_nodes }, Some(witness.best_overlap_sqr))?;
    Ok(report("net-bound", &p, p.seed, to_value(&bound), None))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct HaarTailParams {
    seed: u64,
    d: usize,
    eps: f64,
    samples: u64,
}

impl Default for HaarTailParams {
    fn default() -> Self {
        HaarTailParams {
            seed: 0,
            d: 2,
            eps: 0.5,
            samples: 100_000,
        }
    }
}

fn haar_tail(p: HaarTailParams) -> Result<ExperimentReport> {
    let r = haar_tail_experiment(p.d, p.eps, p.samples, p.seed)?;
    Ok(report("haar-tail", &p, p.seed, to_value(&r), None))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct HaarGmeParams {
    seed: u64,
    n: usize,
    samples: u64,
    restarts: Option<usize>,
    max_iters: usize,
    tol: f64,
    /// Net slack for certified lower bounds; only used for `n <= 6`.
    epsilon: Option<f64>,
    net_max_nodes: u64,
}

impl Default for HaarGmeParams {
    fn default() -> Self {
        HaarGmeParams {
            seed: 0,
            n: 4,
            samples: 20,
            restarts: None,
            max_iters: AlsOptions::default().max_iters,
            tol: AlsOptions::default().tol,
            epsilon: None,
            net_max_nodes: NetOptions::default().max_nodes,
        }
    }
}

fn haar_gme(p: HaarGmeParams, budget: Budget) -> Result<ExperimentReport> {
    let opts = HaarGmeOptions {
        als: AlsOptions {
            restarts: p.restarts,
            max_iters: p.max_iters,
            tol: p.tol,
            seed: 0,
        },
        epsilon: p.epsilon,
        net: NetOptions { max_nodes: p.net_max_nodes },
    };
    let mut r = haar_gme_experiment(p.n, p.samples, &opts, p.seed, budget)?;
    let rows = to_rows(&r.rows);
    r.rows.clear();
    let mut payload = to_value(&r);
    payload.as_object_mut().expect("struct").remove("rows");
    Ok(report("haar-gme", &p, p.seed, payload, Some(rows)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ThresholdParams {
    seed: u64,
    n: usize,
    /// Also tabulate every size from `n` to this one.
    n_max: Option<usize>,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        ThresholdParams { seed: 0, n: 11, n_max: None }
    }
}

fn threshold(p: ThresholdParams) -> Result<ExperimentReport> {
    let head = theorem2_threshold(p.n)?;
    let last = p.n_max.unwrap_or(p.n);
    if last < p.n {
        return Err(Error::invalid("n_max", "must be at least n"));
    }
    let table = (p.n..=last).map(theorem2_threshold).collect::<Result<Vec<_>>>()?;
    Ok(report("theorem2-threshold", &p, p.seed, to_value(&head), Some(to_rows(&table))))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CqParams {
    seed: u64,
    n: usize,
    k: usize,
    samples: u64,
    eps: f64,
    max_subsets: usize,
    outer_restarts: usize,
    restarts: usize,
    max_rounds: usize,
}

impl Default for CqParams {
    fn default() -> Self {
        let o = CqOptions::default();
        CqParams {
            seed: 0,
            n: 8,
            k: 2,
            samples: 10,
            eps: 0.5,
            max_subsets: o.max_subsets,
            outer_restarts: o.outer_restarts,
            restarts: o.als.restarts.unwrap_or(8),
            max_rounds: o.max_rounds,
        }
    }
}

fn cq(p: CqParams, budget: Budget) -> Result<ExperimentReport> {
    let opts = CqOptions {
        als: AlsOptions {
            restarts: Some(p.restarts),
            ..AlsOptions::default()
        },
        max_subsets: p.max_subsets,
        outer_restarts: p.outer_restarts,
        max_rounds: p.max_rounds,
        ..CqOptions::default()
    };
    let mut r = cq_ratio_experiment(p.n, p.k, p.samples, p.eps, &opts, p.seed, budget)?;
    let rows: Vec<Map<String, Value>> = to_rows(&r.rows)
        .into_iter()
        .map(|mut m| {
            // Registers as "0 3 5" so the CSV cell stays flat.
            if let Some(Value::Array(reg)) = m.get("register") {
                let s: Vec<String> = reg.iter().map(|v| v.to_string()).collect();
                m.insert("register".into(), Value::String(s.join(" ")));
            }
            m
        })
        .collect();
    r.rows.clear();
    let mut payload = to_value(&r);
    payload.as_object_mut().expect("struct").remove("rows");
    Ok(report("cq", &p, p.seed, payload, Some(rows)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CorrBoundParams {
    seed: u64,
    c: f64,
    p: f64,
    eps: f64,
}

impl Default for CorrBoundParams {
    fn default() -> Self {
        CorrBoundParams {
            seed: 0,
            c: 1.0,
            p: 1.0,
            eps: 0.01,
        }
    }
}

fn corr_bound(p: CorrBoundParams) -> Result<ExperimentReport> {
    let model = CorrelationModel::new(p.c, p.p)?;
    let bound = correlation_size_bound(&model, p.eps)?;
    let payload = json!({
        "size_bound": bound,
        "inverse": model.inverse(p.eps),
        "correlation_at_bound": model.eval(bound as f64),
    });
    Ok(report("corr-bound", &p, p.seed, payload, None))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MbqcEnumerateParams {
    seed: u64,
    state: Option<Value>,
    strategy: String,
    verifier: String,
    /// Also certify a lower bound on the resource and check the counting inequalities.
    check: bool,
    epsilon: f64,
    restarts: Option<usize>,
}

impl Default for MbqcEnumerateParams {
    fn default() -> Self {
        MbqcEnumerateParams {
            seed: 0,
            state: None,
            strategy: "z-readout".into(),
            verifier: "accept-all".into(),
            check: true,
            epsilon: 0.1,
            restarts: None,
        }
    }
}

fn mbqc_enumerate(mut p: MbqcEnumerateParams, budget: Budget) -> Result<ExperimentReport> {
    let (psi, record) = resolve_state(&p.state, budget)?;
    p.state = Some(record);
    let strategy = parse_strategy(&p.strategy)?;
    let verifier = parse_verifier(&p.verifier)?;
    let r = run_strategy_exact(&psi, strategy.as_ref(), verifier.as_ref())?;
    let mut payload = json!({
        "n": r.n,
        "good_count": r.good_count,
        "prob_quantum_g": r.prob_quantum_g,
        "prob_coin_g": r.prob_coin_g,
        "total_probability": r.total_probability,
        "leaves": r.records.len(),
    });
    if p.check {
        let interval = e_g_interval(
            &psi,
            &IntervalOptions {
                als: AlsOptions {
                    restarts: p.restarts,
                    ..AlsOptions::with_seed(p.seed)
                },
                epsilon: p.epsilon,
                ..IntervalOptions::default()
            },
        )?;
        payload["theorem1"] = to_value(&theorem1_record(&r, interval.certified_lower()));
    }
    Ok(report("mbqc-enumerate", &p, p.seed, payload, Some(to_rows(&r.records))))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MbqcCoinflipParams {
    seed: u64,
    /// Sites the strategy is played on.
    n: usize,
    strategy: String,
    /// Defaults to `planted:floor(delta)`.
    verifier: Option<String>,
    delta: f64,
    pf: f64,
    /// More than one run reports the empirical failure rate.
    runs: u64,
}

impl Default for MbqcCoinflipParams {
    fn default() -> Self {
        MbqcCoinflipParams {
            seed: 0,
            n: 8,
            strategy: "z-readout".into(),
            verifier: None,
            delta: 2.0,
            pf: 0.01,
            runs: 1,
        }
    }
}

fn mbqc_coinflip(mut p: MbqcCoinflipParams) -> Result<ExperimentReport> {
    if !(p.delta >= 0.0) {
        return Err(Error::invalid("delta", "must be non-negative"));
    }
    let verifier_name = p.verifier.clone().unwrap_or_else(|| format!("planted:{}", p.delta.floor() as u64));
    p.verifier = Some(verifier_name.clone());
    let strategy = parse_strategy(&p.strategy)?;
    let verifier = parse_verifier(&verifier_name)?;
    let payload = if p.runs <= 1 {
        to_value(&coinflip_solve(p.n, strategy.as_ref(), verifier.as_ref(), p.delta, p.pf, p.seed)?)
    } else {
        to_value(&coinflip_failure_rate(p.n, strategy.as_ref(), verifier.as_ref(), p.delta, p.pf, p.runs, p.seed)?)
    };
    Ok(report("mbqc-coinflip", &p, p.seed, payload, None))
}

/// Built-in families `empty:N`, `star:N`, `path:N`, `cycle:N`, `complete:N`;
/// anything else is read as an edge-list file.
fn resolve_graph(param: &Option<Value>) -> Result<(Graph, Value)> {
    let graph = match param {
        None => return Err(Error::invalid("graph", "a graph is required")),
        Some(Value::String(name)) => {
            let family = name.split_once(':').and_then(|(f, n)| Some((f, n.parse::<usize>().ok()?)));
            match family {
                Some(("empty", n)) => Graph::new(n)?,
                Some(("star", n)) => Graph::star(n)?,
                Some(("path", n)) => Graph::path(n)?,
                Some(("cycle", n)) => Graph::cycle(n)?,
                Some(("complete", n)) => Graph::complete(n)?,
                _ => {
                    let text = std::fs::read_to_string(name)
                        .map_err(|e| Error::invalid("graph", format!("cannot read {name:?}: {e}")))?;
                    Graph::parse_edge_list(&text, 0)?
                }
            }
        }
        Some(Value::Object(obj)) => {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct Inline {
                vertices: usize,
                edges: Vec<(usize, usize)>,
            }
            let g: Inline = parse(&Value::Object(obj.clone()))?;
            Graph::from_edges(g.vertices, &g.edges)?
        }
        Some(_) => return Err(Error::invalid("graph", "expected a family name, a file path or an object")),
    };
    let record = json!({ "vertices": graph.label_count(), "edges": graph.edges() });
    Ok((graph, record))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GraphBoundsParams {
    seed: u64,
    graph: Option<Value>,
    partition: Option<Vec<usize>>,
    restarts: Option<usize>,
    max_nodes: u64,
}

impl Default for GraphBoundsParams {
    fn default() -> Self {
        GraphBoundsParams {
            seed: 0,
            graph: None,
            partition: None,
            restarts: None,
            max_nodes: DEFAULT_SEARCH_NODES,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct GraphBounds {
    vertices: usize,
    edges: usize,
    lower_rank: f64,
    best_cut: Vec<usize>,
    adjacency_rank_log2: f64,
    lower_bipartition: Option<usize>,
    als_upper: f64,
    persistency: usize,
    persistency_optimal: bool,
    witness: String,
}

fn bounds_for(g: &Graph, partition: Option<&[usize]>, restarts: Option<usize>, max_nodes: u64, seed: u64, budget: Budget) -> Result<GraphBounds> {
    let psi = graph_state_vector_with_budget(g, budget)?;
    let als = als_estimate(&psi, &AlsOptions { restarts, ..AlsOptions::with_seed(seed) })?;
    let persistency = if g.num_vertices() > MAX_PERSISTENCY_VERTICES {
        greedy_persistency(g)
    } else {
        match pauli_persistency(g, max_nodes) {
            Ok(r) => r,
            Err(Error::SearchBudget { .. }) => greedy_persistency(g),
            Err(e) => return Err(e),
        }
    };
    let witness: Vec<String> = persistency.witness.iter().map(|(v, p)| format!("{p}{v}")).collect();
    Ok(GraphBounds {
        vertices: g.num_vertices(),
        edges: g.edge_count(),
        lower_rank: egeom_lower_bound(g),
        best_cut: best_cut(g).1,
        adjacency_rank_log2: adjacency_rank_log2(g),
        lower_bipartition: partition.map(|part| bipartition_rank_bound(g, part)).transpose()?,
        als_upper: als.upper,
        persistency: persistency.value,
        persistency_optimal: persistency.optimal,
        witness: witness.join(" "),
    })
}

fn graph_bounds(mut p: GraphBoundsParams, budget: Budget) -> Result<ExperimentReport> {
    let (g, record) = resolve_graph(&p.graph)?;
    p.graph = Some(record);
    let b = bounds_for(&g, p.partition.as_deref(), p.restarts, p.max_nodes, p.seed, budget)?;
    Ok(report("graph-bounds", &p, p.seed, to_value(&b), None))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GraphCorpusParams {
    seed: u64,
    max_vertices: usize,
    restarts: Option<usize>,
    max_nodes: u64,
}

impl Default for GraphCorpusParams {
    fn default() -> Self {
        GraphCorpusParams {
            seed: 0,
            max_vertices: 5,
            restarts: None,
            max_nodes: DEFAULT_SEARCH_NODES,
        }
    }
}

fn graph_corpus(p: GraphCorpusParams, budget: Budget) -> Result<ExperimentReport> {
    use rayon::prelude::*;
    let corpus = connected_graph_corpus(p.max_vertices)?;
    let rows = corpus
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let b = bounds_for(g, None, p.restarts, p.max_nodes, derive_seed(p.seed, i as u64), budget)?;
            let edges: Vec<String> = g.edges().iter().map(|(u, v)| format!("{u}-{v}")).collect();
            let mut row = to_rows(std::slice::from_ref(&b)).remove(0);
            row.insert("graph".into(), Value::String(edges.join(" ")));
            row.insert(
                "sandwich_ok".into(),
                Value::Bool(b.lower_rank <= b.als_upper + 1e-6 && b.als_upper <= b.persistency as f64 + 1e-6),
            );
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = rows.iter().filter(|r| r["sandwich_ok"] == Value::Bool(false)).count();
    let tight = rows
        .iter()
        .filter(|r| r["lower_rank"].as_f64() == r["persistency"].as_f64())
        .count();
    let payload = json!({
        "graphs": rows.len(),
        "violations": violations,
        "lower_equals_persistency": tight,
    });
    Ok(report("graph-corpus", &p, p.seed, payload, Some(rows)))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MeraParams {
    seed: u64,
    k: usize,
    d: usize,
    /// Restarts for the isometry overlap.
    restarts: usize,
    per_layer: bool,
    /// Restarts for the product-state search on the full tree state.
    als_restarts: Option<usize>,
}

impl Default for MeraParams {
    fn default() -> Self {
        MeraParams {
            seed: 0,
            k: 2,
            d: 4,
            restarts: 20,
            per_layer: false,
            als_restarts: None,
        }
    }
}

fn mera(p: MeraParams, budget: Budget) -> Result<ExperimentReport> {
    budget.check_dims(1usize.checked_shl(p.k as u32).unwrap_or(usize::MAX), p.d)?;
    let spec = TreeNetworkSpec::haar(p.k, p.d, p.seed, p.per_layer)?;
    let per_unitary = spec
        .unitaries()
        .iter()
        .enumerate()
        .map(|(i, u)| isometry_sup_overlap(u, p.restarts, derive_seed(p.seed, 1000 + i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let per_layer: Vec<f64> = (0..p.k).map(|l| per_unitary[l.min(per_unitary.len() - 1)]).collect();
    let g = normalized_gme(
        &spec,
        &AlsOptions {
            restarts: p.als_restarts,
            ..AlsOptions::with_seed(derive_seed(p.seed, 2000))
        },
    )?;
    let rows: Vec<Map<String, Value>> = per_layer
        .iter()
        .enumerate()
        .map(|(l, &v)| {
            let mut m = Map::new();
            m.insert("layer".into(), json!(l));
            m.insert("sup_overlap".into(), json!(v));
            m.insert("scaled_sup_overlap".into(), json!(v * p.d as f64));
            m
        })
        .collect();
    let payload = json!({
        "sup_overlap_per_layer": per_layer,
        "normalized_gme": g.value,
        "prediction": g.prediction,
        "best_overlap_sqr": g.best_overlap_sqr,
        "num_sites": g.num_sites,
    });
    Ok(report("mera", &p, p.seed, payload, Some(rows)))
}
