//! Benchmark sweeps over operators, fragment sizes, false-positive rates,
//! predicates and recursion depths.
//!
//! A run draws `repetitions` start sets once and replays them in every cell,
//! so cells differ only in the swept parameters. Counters are reported as
//! median and mean over the repetitions. Wall-time columns end in
//! `_us_median` or `_us_mean`; every other CSV column is a pure function of
//! the benchmark description and its seeds.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use colgraph::{
    cluster_by_type, compute_stats, parse, CostParams, Depth, Direction, EngineError, FragmentPolicy, GraphStats,
    Operator, PropertyGraph, StorageError, TgiReport, TraversalConfig, TraversalOutcome, Traverser,
};
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generate::{generate, GenerateError, GraphKind};
use crate::loader::{load, LoadError};

/// Graphs up to this many vertices have every cell checked against the oracle.
pub const ORACLE_CHECK_LIMIT: usize = 10_000;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark spec: {0}")]
    InvalidSpec(String),
    #[error("cannot read spec {path}: {message}")]
    SpecFile { path: PathBuf, message: String },
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("result mismatch against the oracle; reproduce with: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum GraphSource {
    File {
        edges: PathBuf,
        #[serde(default)]
        vertices: Option<PathBuf>,
    },
    Generator {
        generator: GraphKind,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        weights: bool,
    },
}

impl fmt::Display for GraphSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSource::File { edges, .. } => write!(f, "{}", edges.display()),
            GraphSource::Generator { generator, seed, .. } => write!(f, "{generator}@{seed}"),
        }
    }
}

impl GraphSource {
    pub fn materialize(&self) -> Result<PropertyGraph, BenchError> {
        Ok(match self {
            GraphSource::File { edges, vertices } => load(edges, vertices.as_deref())?,
            GraphSource::Generator {
                generator,
                seed,
                weights,
            } => generate(generator, *seed, *weights)?,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Clustering {
    #[default]
    None,
    Type,
    Edge,
}

impl fmt::Display for Clustering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clustering::None => "none",
            Clustering::Type => "type",
            Clustering::Edge => "edge",
        })
    }
}

impl std::str::FromStr for Clustering {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Clustering::None),
            "type" => Ok(Clustering::Type),
            "edge" => Ok(Clustering::Edge),
            other => Err(format!("unknown clustering {other:?}; expected none, type or edge")),
        }
    }
}

pub fn apply_clustering(g: PropertyGraph, clustering: Clustering) -> Result<PropertyGraph, StorageError> {
    match clustering {
        Clustering::None => Ok(g),
        Clustering::Type => Ok(g.with_edges(cluster_by_type(&g.edges)?)),
        Clustering::Edge => g.edge_clustered(),
    }
}

/// How each repetition picks its start vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StartPolicy {
    /// This many distinct vertices with an edge in the query direction,
    /// drawn uniformly per repetition.
    Sample(usize),
    /// The same ids in every repetition.
    Fixed(Vec<String>),
}

impl Default for StartPolicy {
    fn default() -> Self {
        StartPolicy::Sample(1)
    }
}

/// A predicate text, or a `attribute >= t` threshold chosen so the share of
/// matching edges is as close as possible to `selectivity`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PredicateSpec {
    Text(String),
    Selectivity { attribute: String, selectivity: f64 },
}

impl Default for PredicateSpec {
    fn default() -> Self {
        PredicateSpec::Text("*".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryTemplate {
    #[serde(default)]
    pub starts: StartPolicy,
    #[serde(default = "default_predicates")]
    pub predicates: Vec<PredicateSpec>,
    /// Collection boundary; absent means `c = r`.
    #[serde(default)]
    pub collect: Option<u32>,
    #[serde(default)]
    pub direction: Direction,
}

fn default_predicates() -> Vec<PredicateSpec> {
    vec![PredicateSpec::default()]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    #[default]
    Fixed,
    Adaptive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub recurse: Vec<Depth>,
    #[serde(default = "default_xi")]
    pub xi: Vec<usize>,
    #[serde(default = "default_p")]
    pub p: Vec<f64>,
    #[serde(default = "default_operators")]
    pub operators: Vec<Operator>,
    #[serde(default)]
    pub fragment_policy: PolicyKind,
}

fn default_xi() -> Vec<usize> {
    vec![1024]
}

fn default_p() -> Vec<f64> {
    vec![0.01]
}

fn default_operators() -> Vec<Operator> {
    vec![Operator::Ls, Operator::Fi]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub name: String,
    pub graph: GraphSource,
    #[serde(default)]
    pub clustering: Clustering,
    pub query: QueryTemplate,
    pub repetitions: usize,
    /// Seeds start sampling and the diameter estimate.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_stats_sample")]
    pub stats_sample: usize,
    pub sweep: Sweep,
}

fn default_stats_sample() -> usize {
    colgraph::DEFAULT_STATS_SAMPLE
}

impl BenchmarkSpec {
    /// Reads a JSON spec; relative graph paths resolve against its directory.
    pub fn from_path(path: &Path) -> Result<Self, BenchError> {
        let spec_error = |message: String| BenchError::SpecFile {
            path: path.to_path_buf(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| spec_error(e.to_string()))?;
        let mut spec: BenchmarkSpec = serde_json::from_str(&text).map_err(|e| spec_error(e.to_string()))?;
        if let GraphSource::File { edges, vertices } = &mut spec.graph {
            let base = path.parent().unwrap_or(Path::new("."));
            *edges = base.join(&*edges);
            if let Some(v) = vertices {
                *v = base.join(&*v);
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let invalid = |m: String| Err(BenchError::InvalidSpec(m));
        if self.repetitions == 0 {
            return invalid("repetitions must be at least 1".into());
        }
        let q = &self.query;
        let s = &self.sweep;
        for (axis, empty) in [
            ("sweep.recurse", s.recurse.is_empty()),
            ("sweep.xi", s.xi.is_empty()),
            ("sweep.p", s.p.is_empty()),
            ("sweep.operators", s.operators.is_empty()),
            ("query.predicates", q.predicates.is_empty()),
        ] {
            if empty {
                return invalid(format!("{axis} must not be empty"));
            }
        }
        if s.xi.contains(&0) {
            return invalid("fragment sizes must be positive".into());
        }
        if let Some(&p) = s.p.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return invalid(format!("false-positive rate {p} outside (0, 1)"));
        }
        if matches!(&q.starts, StartPolicy::Sample(0)) {
            return invalid("at least one start vertex must be sampled".into());
        }
        for &r in &s.recurse {
            match (q.collect, r) {
                (None, Depth::Unbounded) => return invalid("query.collect is required when recurse includes inf".into()),
                (Some(c), r) if !r.admits(c) => return invalid(format!("collect {c} exceeds recurse {r}")),
                _ => {}
            }
        }
        Ok(())
    }

    fn collect_for(&self, r: Depth) -> u32 {
        self.query.collect.unwrap_or(r.limit())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// Scan partitions used by LS cells.
    pub partitions: usize,
    /// Cross-check every cell against the oracle on graphs up to
    /// [`ORACLE_CHECK_LIMIT`] vertices.
    pub oracle_check: bool,
    pub parallel_cells: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            partitions: 1,
            oracle_check: true,
            parallel_cells: false,
        }
    }
}

/// One row of the sweep table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub predicate: String,
    pub direction: Direction,
    pub collect: u32,
    pub recurse: Depth,
    pub operator: Operator,
    pub xi: Option<usize>,
    pub p: Option<f64>,
    pub repetitions: usize,
    pub edges_read_median: f64,
    pub edges_read_mean: f64,
    pub fragments_read_median: f64,
    pub fragments_read_mean: f64,
    pub iterations_median: f64,
    pub result_size_median: f64,
    pub result_size_mean: f64,
    pub tgi_bytes: Option<usize>,
    pub tgi_transitions: Option<usize>,
    pub predicted_cost: Option<f64>,
    pub prepare_us_median: f64,
    pub traverse_us_median: f64,
    pub decode_us_median: f64,
    pub total_us_median: f64,
    pub total_us_mean: f64,
}

/// Goodness of fit of the cost model over the recursion axis of one sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostFit {
    pub predicate: String,
    pub operator: Operator,
    pub xi: Option<usize>,
    pub p: Option<f64>,
    pub points: usize,
    /// Squared correlation between predicted cost and median edges_read;
    /// absent with fewer than two points or a constant series.
    pub r_squared: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexSummary {
    pub xi: usize,
    pub report: TgiReport,
    pub build_us: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub source: String,
    pub clustering: Clustering,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub stats: GraphStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub name: String,
    pub graph: GraphSummary,
    pub partitions: usize,
    pub oracle_checked: bool,
    pub cells: Vec<CellRecord>,
    pub fits: Vec<CostFit>,
    pub indexes: Vec<IndexSummary>,
}

impl BenchmarkReport {
    pub fn write_json<W: Write>(&self, out: W) -> Result<(), BenchError> {
        serde_json::to_writer_pretty(out, self).map_err(io::Error::from)?;
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_writer(out);
        for cell in &self.cells {
            w.serialize(cell)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn cell(&self, operator: Operator, recurse: Depth, xi: Option<usize>) -> Option<&CellRecord> {
        self.cells
            .iter()
            .find(|c| c.operator == operator && c.recurse == recurse && (xi.is_none() || c.xi == xi))
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Squared Pearson correlation of `x` and `y`.
pub fn r_squared(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy * sxy / (sxx * syy))
}

/// `attribute >= t` with the share of matching edges closest to `target`.
pub fn selectivity_predicate(g: &PropertyGraph, attribute: &str, target: f64) -> Result<String, BenchError> {
    let column = g
        .edges
        .attribute(attribute)
        .ok_or_else(|| BenchError::InvalidSpec(format!("graph has no edge attribute {attribute:?}")))?;
    let mut values: Vec<f64> = (0..column.len())
        .filter_map(|i| column.value(i).and_then(|v| v.trim().parse().ok()))
        .collect();
    if values.is_empty() {
        return Err(BenchError::InvalidSpec(format!("attribute {attribute:?} has no numeric values")));
    }
    values.sort_by(f64::total_cmp);
    let total = column.len() as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut i = 0;
    while i < values.len() {
        let t = values[i];
        let share = (values.len() - i) as f64 / total;
        if best.is_none_or(|(_, s)| (share - target).abs() < (s - target).abs()) {
            best = Some((t, share));
        }
        while i < values.len() && values[i] == t {
            i += 1;
        }
    }
    Ok(format!("{attribute}>={}", best.expect("non-empty").0))
}

fn start_candidates(g: &PropertyGraph, direction: Direction) -> Vec<&str> {
    let scan: BTreeSet<u32> = g.edges.handles(direction).scan.iter().copied().collect();
    let dict = g.vertex_dictionary();
    scan.into_iter().filter_map(|c| dict.decode(c)).collect()
}

fn draw_starts(spec: &BenchmarkSpec, g: &PropertyGraph) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let candidates = start_candidates(g, spec.query.direction);
    (0..spec.repetitions)
        .map(|_| match &spec.query.starts {
            StartPolicy::Fixed(ids) => ids.clone(),
            StartPolicy::Sample(k) => candidates
                .choose_multiple(&mut rng, *k)
                .map(|s| s.to_string())
                .collect(),
        })
        .collect()
}

struct CellPlan {
    predicate: usize,
    recurse: Depth,
    operator: Operator,
    /// Index into the `(ξ, p)` grid for FI cells.
    variant: Option<usize>,
}

struct Setup<'g> {
    spec: &'g BenchmarkSpec,
    graph: &'g PropertyGraph,
    predicates: Vec<String>,
    starts: Vec<Vec<String>>,
    baseline: Traverser<'g>,
    variants: Vec<(usize, f64, Traverser<'g>)>,
    check: bool,
}

impl Setup<'_> {
    fn config(&self, predicate: usize, recurse: Depth, starts: &[String]) -> TraversalConfig {
        let predicate = parse(&self.predicates[predicate]).expect("validated before the run");
        TraversalConfig::new(
            starts.iter().cloned(),
            predicate,
            self.spec.collect_for(recurse),
            recurse,
            self.spec.query.direction,
        )
    }

    fn traverser(&self, plan: &CellPlan) -> &Traverser<'_> {
        match plan.variant {
            Some(i) => &self.variants[i].2,
            None => &self.baseline,
        }
    }

    fn reproduction(&self, plan: &CellPlan, cfg: &TraversalConfig) -> String {
        let t = self.traverser(plan);
        let (mut cfg, operator) = (cfg.clone(), plan.operator);
        let mismatch = |cfg: &TraversalConfig| -> bool {
            match (t.traverse(cfg, Some(operator)), t.traverse(cfg, Some(Operator::Oracle))) {
                (Ok(a), Ok(b)) => a.vertices != b.vertices,
                _ => true,
            }
        };
        for s in cfg.start_vertices.clone() {
            let mut smaller = cfg.clone();
            smaller.start_vertices.remove(&s);
            if mismatch(&smaller) {
                cfg = smaller;
            }
        }
        while let Depth::Finite(r) = cfg.recurse {
            if r == 0 || r == cfg.collect {
                break;
            }
            let smaller = TraversalConfig {
                recurse: Depth::Finite(r - 1),
                ..cfg.clone()
            };
            if !mismatch(&smaller) {
                break;
            }
            cfg = smaller;
        }
        let mut line = format!("colgraph query {} --cluster {}", graph_argument(&self.spec.graph), self.spec.clustering);
        for s in &cfg.start_vertices {
            line += &format!(" --start {s}");
        }
        line += &format!(
            " --predicate '{}' --collect {} --recurse {} --direction {} --operator {}",
            cfg.predicate,
            cfg.collect,
            cfg.recurse,
            if cfg.direction == Direction::Forward { "fwd" } else { "bwd" },
            operator
        );
        if let Some(i) = plan.variant {
            let (xi, p, _) = &self.variants[i];
            line += &format!(" --xi {xi} --fpr {p}");
            if self.spec.sweep.fragment_policy == PolicyKind::Adaptive {
                line += " --adaptive";
            }
        }
        line
    }

    fn run_cell(&self, plan: &CellPlan) -> Result<CellRecord, BenchError> {
        let t = self.traverser(plan);
        let mut outcomes: Vec<TraversalOutcome> = Vec::with_capacity(self.starts.len());
        for starts in &self.starts {
            let cfg = self.config(plan.predicate, plan.recurse, starts);
            let out = t.traverse(&cfg, Some(plan.operator))?;
            if self.check && plan.operator != Operator::Oracle {
                let expected = t.traverse(&cfg, Some(Operator::Oracle))?;
                if expected.vertices != out.vertices {
                    return Err(BenchError::Mismatch(self.reproduction(plan, &cfg)));
                }
            }
            outcomes.push(out);
        }
        let series = |f: &dyn Fn(&TraversalOutcome) -> f64| outcomes.iter().map(f).collect::<Vec<f64>>();
        let edges = series(&|o| o.report.edges_read as f64);
        let fragments = series(&|o| o.report.fragments_read as f64);
        let sizes = series(&|o| o.report.result_size as f64);
        let times = &|o: &TraversalOutcome| {
            let p = o.report.phase_times_us;
            (p.prepare + p.traverse + p.decode) as f64
        };
        let total = series(times);
        let (xi, p, tgi) = match plan.variant {
            Some(i) => {
                let (xi, p, t) = &self.variants[i];
                let tgi = t.index(self.spec.query.direction)?;
                (Some(*xi), Some(*p), Some(tgi))
            }
            None => (None, None, None),
        };
        Ok(CellRecord {
            predicate: self.predicates[plan.predicate].clone(),
            direction: self.spec.query.direction,
            collect: self.spec.collect_for(plan.recurse),
            recurse: plan.recurse,
            operator: plan.operator,
            xi,
            p,
            repetitions: outcomes.len(),
            edges_read_median: median(&edges),
            edges_read_mean: mean(&edges),
            fragments_read_median: median(&fragments),
            fragments_read_mean: mean(&fragments),
            iterations_median: median(&series(&|o| o.report.iterations as f64)),
            result_size_median: median(&sizes),
            result_size_mean: mean(&sizes),
            tgi_bytes: tgi.as_ref().map(|t| t.byte_size()),
            tgi_transitions: tgi.as_ref().map(|t| t.transition_count()),
            predicted_cost: t.predicted_cost(plan.operator, plan.recurse),
            prepare_us_median: median(&series(&|o| o.report.phase_times_us.prepare as f64)),
            traverse_us_median: median(&series(&|o| o.report.phase_times_us.traverse as f64)),
            decode_us_median: median(&series(&|o| o.report.phase_times_us.decode as f64)),
            total_us_median: median(&total),
            total_us_mean: mean(&total),
        })
    }
}

/// The `--generate`/`--edges` arguments that rebuild `source`.
pub fn graph_argument(source: &GraphSource) -> String {
    match source {
        GraphSource::File { edges, vertices } => {
            let mut s = format!("--edges {}", edges.display());
            if let Some(v) = vertices {
                s += &format!(" --vertices {}", v.display());
            }
            s
        }
        GraphSource::Generator {
            generator,
            seed,
            weights,
        } => format!("--generate {generator} --seed {seed}{}", if *weights { " --weights" } else { "" }),
    }
}

fn fits(cells: &[CellRecord]) -> Vec<CostFit> {
    let mut groups: Vec<CostFit> = Vec::new();
    let mut points: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for c in cells {
        let (Some(predicted), Depth::Finite(_)) = (c.predicted_cost, c.recurse) else {
            continue;
        };
        let key = |f: &CostFit| f.predicate == c.predicate && f.operator == c.operator && f.xi == c.xi && f.p == c.p;
        let i = match groups.iter().position(key) {
            Some(i) => i,
            None => {
                groups.push(CostFit {
                    predicate: c.predicate.clone(),
                    operator: c.operator,
                    xi: c.xi,
                    p: c.p,
                    points: 0,
                    r_squared: None,
                });
                points.push((Vec::new(), Vec::new()));
                groups.len() - 1
            }
        };
        points[i].0.push(predicted);
        points[i].1.push(c.edges_read_median);
    }
    for (fit, (x, y)) in groups.iter_mut().zip(&points) {
        fit.points = x.len();
        fit.r_squared = r_squared(x, y);
    }
    groups
}

/// Runs every cell of `spec` on a graph that is already loaded and clustered.
pub fn run_on(spec: &BenchmarkSpec, graph: &PropertyGraph, options: RunOptions) -> Result<BenchmarkReport, BenchError> {
    spec.validate()?;
    let stats = compute_stats(&graph.edges, &graph.vertices, spec.stats_sample, spec.seed);
    let predicates = spec
        .query
        .predicates
        .iter()
        .map(|p| {
            let text = match p {
                PredicateSpec::Text(t) => t.clone(),
                PredicateSpec::Selectivity { attribute, selectivity } => selectivity_predicate(graph, attribute, *selectivity)?,
            };
            parse(&text).map_err(|e| BenchError::InvalidSpec(format!("predicate {text:?}: {e}")))?;
            Ok(text)
        })
        .collect::<Result<Vec<_>, BenchError>>()?;
    let unit_cost = CostParams::default();
    let baseline = Traverser::from_stats(graph, stats.clone())
        .with_cost_params(unit_cost)?
        .with_partitions(options.partitions);
    let wants_index = spec.sweep.operators.contains(&Operator::Fi);
    let mut variants = Vec::new();
    let mut indexes = Vec::new();
    if wants_index {
        for &xi in &spec.sweep.xi {
            for &p in &spec.sweep.p {
                let policy = match spec.sweep.fragment_policy {
                    PolicyKind::Fixed => FragmentPolicy::Fixed(xi),
                    PolicyKind::Adaptive => FragmentPolicy::DegreeAdaptive { min_size: xi },
                };
                let t = Traverser::from_stats(graph, stats.clone())
                    .with_fragments(policy, p)?
                    .with_partitions(options.partitions);
                let clock = std::time::Instant::now();
                let tgi = t.index(spec.query.direction)?;
                indexes.push(IndexSummary {
                    xi,
                    report: tgi.report(),
                    build_us: clock.elapsed().as_micros() as u64,
                });
                variants.push((xi, p, t));
            }
        }
    }

    let mut plans = Vec::new();
    for predicate in 0..predicates.len() {
        for &recurse in &spec.sweep.recurse {
            for &operator in &spec.sweep.operators {
                if operator == Operator::Fi {
                    plans.extend((0..variants.len()).map(|v| CellPlan {
                        predicate,
                        recurse,
                        operator,
                        variant: Some(v),
                    }));
                } else {
                    plans.push(CellPlan {
                        predicate,
                        recurse,
                        operator,
                        variant: None,
                    });
                }
            }
        }
    }

    let setup = Setup {
        spec,
        graph,
        predicates,
        starts: draw_starts(spec, graph),
        baseline,
        variants,
        check: options.oracle_check && graph.vertex_count() <= ORACLE_CHECK_LIMIT,
    };
    let cells: Vec<CellRecord> = if options.parallel_cells {
        plans.par_iter().map(|p| setup.run_cell(p)).collect::<Result<_, _>>()?
    } else {
        plans.iter().map(|p| setup.run_cell(p)).collect::<Result<_, _>>()?
    };
    Ok(BenchmarkReport {
        name: spec.name.clone(),
        graph: GraphSummary {
            source: spec.graph.to_string(),
            clustering: spec.clustering,
            vertex_count: setup.graph.vertex_count(),
            edge_count: setup.graph.edge_count(),
            stats,
        },
        partitions: options.partitions,
        oracle_checked: setup.check,
        fits: fits(&cells),
        cells,
        indexes,
    })
}

/// Loads or generates the graph, applies the clustering and runs the sweep.
pub fn run(spec: &BenchmarkSpec, options: RunOptions) -> Result<BenchmarkReport, BenchError> {
    spec.validate()?;
    let graph = apply_clustering(spec.graph.materialize()?, spec.clustering)?;
    run_on(spec, &graph, options)
}
