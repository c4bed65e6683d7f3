use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{
    cost_fi, cost_ls, decode, generate_result, oracle_traverse, prepare, CostParams, Depth, EngineError, LevelMap,
    TraversalConfig, TraversalCounters,
};
use crate::fi::{fi_traverse, FragmentPolicy, IndexError, TransitionGraphIndex};
use crate::ls::{ls_traverse, ScanPartitioning};
use crate::storage::{compute_stats, Direction, GraphStats, PropertyGraph, VertexCode, DEFAULT_STATS_SAMPLE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Ls,
    Fi,
    Oracle,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::Ls => "ls",
            Operator::Fi => "fi",
            Operator::Oracle => "oracle",
        })
    }
}

impl FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ls" => Ok(Operator::Ls),
            "fi" => Ok(Operator::Fi),
            "oracle" => Ok(Operator::Oracle),
            other => Err(format!("unknown operator {other:?}; expected ls, fi or oracle")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub prepare: u64,
    pub traverse: u64,
    pub decode: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub operator: Operator,
    pub phase_times_us: PhaseTimes,
    pub edges_read: u64,
    pub fragments_read: u64,
    pub iterations: u64,
    pub result_size: usize,
    /// Model cost of the operator that ran; absent for the oracle.
    pub cost_predicted: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TraversalOutcome {
    pub vertices: BTreeSet<String>,
    pub codes: Vec<VertexCode>,
    pub report: ExecutionReport,
}

/// Cheaper of the two operators under the cost models; LS on ties.
pub fn choose_operator(r: Depth, stats: &GraphStats, cp: &CostParams) -> Operator {
    if cost_fi(r, stats, cp) < cost_ls(r, stats, cp) {
        Operator::Fi
    } else {
        Operator::Ls
    }
}

fn micros(since: Instant) -> u64 {
    since.elapsed().as_micros() as u64
}

/// Query front end over one graph: holds its statistics, operator settings
/// and the lazily built transition indexes for both directions.
#[derive(Debug)]
pub struct Traverser<'g> {
    graph: &'g PropertyGraph,
    stats: GraphStats,
    cost: CostParams,
    partitions: usize,
    policy: FragmentPolicy,
    false_positive_rate: f64,
    indexes: [OnceLock<Result<Arc<TransitionGraphIndex>, IndexError>>; 2],
}

impl<'g> Traverser<'g> {
    pub fn new(graph: &'g PropertyGraph) -> Self {
        Self::from_stats(graph, compute_stats(&graph.edges, &graph.vertices, DEFAULT_STATS_SAMPLE, 0))
    }

    /// Like [`Traverser::new`] with statistics computed by the caller.
    pub fn from_stats(graph: &'g PropertyGraph, stats: GraphStats) -> Self {
        let cost = CostParams::default();
        Self {
            graph,
            stats,
            partitions: 1,
            policy: FragmentPolicy::Fixed(cost.fragment_size as usize),
            false_positive_rate: cost.false_positive_rate,
            cost,
            indexes: Default::default(),
        }
    }

    pub fn with_stats(mut self, stats: GraphStats) -> Self {
        self.stats = stats;
        self
    }

    /// Overrides the cost parameters without touching the index settings.
    pub fn with_cost_params(mut self, cost: CostParams) -> Result<Self, EngineError> {
        cost.validate()?;
        self.cost = cost;
        Ok(self)
    }

    pub fn with_partitions(mut self, n: usize) -> Self {
        self.partitions = n.max(1);
        self
    }

    /// Sets the fragmenting of the FI index and aligns the cost model's `ξ`
    /// and `p` with it.
    pub fn with_fragments(mut self, policy: FragmentPolicy, false_positive_rate: f64) -> Result<Self, EngineError> {
        let cost = CostParams {
            fragment_size: policy.nominal_size() as f64,
            false_positive_rate,
            ..self.cost
        };
        cost.validate()?;
        if policy.nominal_size() == 0 {
            return Err(IndexError::InvalidFragmentSize.into());
        }
        self.cost = cost;
        self.policy = policy;
        self.false_positive_rate = false_positive_rate;
        self.indexes = Default::default();
        Ok(self)
    }

    pub fn graph(&self) -> &PropertyGraph {
        self.graph
    }

    pub fn stats(&self) -> &GraphStats {
        &self.stats
    }

    pub fn cost_params(&self) -> &CostParams {
        &self.cost
    }

    pub fn partitions(&self) -> usize {
        self.partitions
    }

    pub fn index(&self, direction: Direction) -> Result<Arc<TransitionGraphIndex>, EngineError> {
        self.indexes[direction.index()]
            .get_or_init(|| {
                TransitionGraphIndex::build(&self.graph.edges, direction, self.policy, self.false_positive_rate)
                    .map(Arc::new)
            })
            .clone()
            .map_err(EngineError::from)
    }

    pub fn choose(&self, r: Depth) -> Operator {
        choose_operator(r, &self.stats, &self.cost)
    }

    pub fn predicted_cost(&self, operator: Operator, r: Depth) -> Option<f64> {
        match operator {
            Operator::Ls => Some(cost_ls(r, &self.stats, &self.cost)),
            Operator::Fi => Some(cost_fi(r, &self.stats, &self.cost)),
            Operator::Oracle => None,
        }
    }

    /// Runs prepare, traverse and decode. Without an override the
    /// controller picks the operator.
    pub fn traverse(&self, cfg: &TraversalConfig, operator: Option<Operator>) -> Result<TraversalOutcome, EngineError> {
        let edges = &self.graph.edges;
        let operator = operator.unwrap_or_else(|| self.choose(cfg.recurse));
        let index = match operator {
            Operator::Fi => Some(self.index(cfg.direction)?),
            _ => None,
        };

        let t = Instant::now();
        let pc = prepare(cfg, edges)?;
        let prepare_us = micros(t);

        let t = Instant::now();
        let (codes, counters) = match operator {
            Operator::Ls => {
                let part = ScanPartitioning::over(self.partitions, &pc.scan_ranges);
                let (levels, counters) = ls_traverse(&pc, edges, &part);
                (generate_result(&levels, pc.collect, pc.recurse), counters)
            }
            Operator::Fi => {
                let tgi = index.as_deref().expect("index resolved above");
                let run = fi_traverse(&pc, edges, tgi)?;
                (generate_result(&run.levels, pc.collect, pc.recurse), run.counters)
            }
            Operator::Oracle => (oracle_traverse(&pc, edges), TraversalCounters::default()),
        };
        let traverse_us = micros(t);

        let t = Instant::now();
        let vertices = decode(&codes, edges.vertex_dictionary())?;
        let decode_us = micros(t);

        let report = ExecutionReport {
            operator,
            phase_times_us: PhaseTimes {
                prepare: prepare_us,
                traverse: traverse_us,
                decode: decode_us,
            },
            edges_read: counters.edges_read,
            fragments_read: counters.fragments_read,
            iterations: counters.iterations,
            result_size: vertices.len(),
            cost_predicted: self.predicted_cost(operator, cfg.recurse),
        };
        Ok(TraversalOutcome {
            vertices,
            codes,
            report,
        })
    }

    /// Level map produced by `operator` (not the oracle) for `cfg`.
    pub fn levels(&self, cfg: &TraversalConfig, operator: Operator) -> Result<LevelMap, EngineError> {
        let pc = prepare(cfg, &self.graph.edges)?;
        match operator {
            Operator::Ls => {
                let part = ScanPartitioning::over(self.partitions, &pc.scan_ranges);
                Ok(ls_traverse(&pc, &self.graph.edges, &part).0)
            }
            Operator::Fi => Ok(fi_traverse(&pc, &self.graph.edges, self.index(cfg.direction)?.as_ref())?.levels),
            Operator::Oracle => Err(EngineError::Internal("the oracle does not produce a level map".into())),
        }
    }
}

/// One-shot traversal with explicit statistics and cost parameters. The FI
/// index is built with fixed fragments of the cost model's `ξ`.
pub fn traverse(
    cfg: &TraversalConfig,
    g: &PropertyGraph,
    stats: &GraphStats,
    cp: &CostParams,
    operator: Option<Operator>,
) -> Result<TraversalOutcome, EngineError> {
    Traverser::new(g)
        .with_stats(stats.clone())
        .with_fragments(FragmentPolicy::Fixed(cp.fragment_size as usize), cp.false_positive_rate)?
        .with_cost_params(*cp)?
        .traverse(cfg, operator)
}
