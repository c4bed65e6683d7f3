use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use colgraph::{parse, Depth, Direction, FragmentPolicy, Operator, PropertyGraph, TraversalConfig, Traverser};
use colgraph_cli::bench::{apply_clustering, BenchmarkSpec, Clustering, RunOptions};
use colgraph_cli::{generate, load, run, write_edges, GraphKind};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "colgraph", version, about = "Columnar graph traversal: load, generate, query and benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a TSV graph and print its size.
    Load {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Write a synthetic graph as TSV.
    Generate {
        /// powerlaw:ALPHA:DEGREE:N, grid:W:H, path:N, star:N or uniform:N:DEGREE[:TYPES]
        kind: GraphKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Add a zipf-distributed integer `weight` edge attribute.
        #[arg(long)]
        weights: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reorder the edge records and write them as TSV.
    Cluster {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum)]
        by: ClusterBy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one traversal and print the result vertices.
    Query(QueryArgs),
    /// Run a benchmark sweep described by a JSON spec.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        /// Write the full report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write one CSV row per cell.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        partitions: usize,
        /// Run cells on the thread pool.
        #[arg(long)]
        parallel: bool,
        /// Skip the oracle cross-check.
        #[arg(long)]
        no_oracle: bool,
    },
    /// Build transition indexes and print their memory accounting as JSON.
    TgiReport {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, num_args = 1.., default_values_t = [1024usize])]
        xi: Vec<usize>,
        #[arg(long, num_args = 1.., default_values_t = [0.01f64])]
        fpr: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Dir::Fwd)]
        direction: Dir,
        /// Degree-adaptive fragments with `xi` as the minimum size.
        #[arg(long)]
        adaptive: bool,
        #[arg(long, value_enum, default_value_t = ClusterArg::None)]
        cluster: ClusterArg,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Edge file.
    #[arg(long, required_unless_present = "generate", conflicts_with = "generate")]
    edges: Option<PathBuf>,
    /// Optional vertex file.
    #[arg(long, requires = "edges")]
    vertices: Option<PathBuf>,
    /// Generate the graph instead of loading it.
    #[arg(long)]
    generate: Option<GraphKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    weights: bool,
}

impl GraphArgs {
    fn graph(&self) -> Result<PropertyGraph> {
        match (&self.edges, &self.generate) {
            (Some(edges), _) => Ok(load(edges, self.vertices.as_deref())?),
            (None, Some(kind)) => Ok(generate(kind, self.seed, self.weights)?),
            (None, None) => bail!("either --edges or --generate is required"),
        }
    }
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long = "start", required = true)]
    starts: Vec<String>,
    #[arg(long, default_value = "*")]
    predicate: String,
    #[arg(long, default_value_t = 0)]
    collect: u32,
    /// Number of levels or `inf`.
    #[arg(long, default_value = "inf")]
    recurse: Depth,
    #[arg(long, value_enum, default_value_t = Dir::Fwd)]
    direction: Dir,
    #[arg(long, value_enum, default_value_t = OperatorArg::Auto)]
    operator: OperatorArg,
    #[arg(long, default_value_t = 1024)]
    xi: usize,
    #[arg(long, default_value_t = 0.01)]
    fpr: f64,
    #[arg(long)]
    adaptive: bool,
    #[arg(long, default_value_t = 1)]
    partitions: usize,
    #[arg(long, value_enum, default_value_t = ClusterArg::None)]
    cluster: ClusterArg,
    /// Print the result and execution report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Fwd,
    Bwd,
}

impl From<Dir> for Direction {
    fn from(d: Dir) -> Self {
        match d {
            Dir::Fwd => Direction::Forward,
            Dir::Bwd => Direction::Backward,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorArg {
    Auto,
    Ls,
    Fi,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClusterBy {
    Type,
    Edge,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClusterArg {
    None,
    Type,
    Edge,
}

impl From<ClusterArg> for Clustering {
    fn from(c: ClusterArg) -> Self {
        match c {
            ClusterArg::None => Clustering::None,
            ClusterArg::Type => Clustering::Type,
            ClusterArg::Edge => Clustering::Edge,
        }
    }
}

fn policy(xi: usize, adaptive: bool) -> FragmentPolicy {
    if adaptive {
        FragmentPolicy::DegreeAdaptive { min_size: xi }
    } else {
        FragmentPolicy::Fixed(xi)
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn query(args: QueryArgs) -> Result<()> {
    let g = apply_clustering(args.graph.graph()?, args.cluster.into())?;
    let cfg = TraversalConfig::new(
        args.starts,
        parse(&args.predicate)?,
        args.collect,
        args.recurse,
        args.direction.into(),
    );
    let t = Traverser::new(&g)
        .with_fragments(policy(args.xi, args.adaptive), args.fpr)?
        .with_partitions(args.partitions);
    let operator = match args.operator {
        OperatorArg::Auto => None,
        OperatorArg::Ls => Some(Operator::Ls),
        OperatorArg::Fi => Some(Operator::Fi),
        OperatorArg::Oracle => Some(Operator::Oracle),
    };
    let out = t.traverse(&cfg, operator)?;
    let mut w = output(&None)?;
    if args.json {
        #[derive(Serialize)]
        struct QueryOutput<'a> {
            vertices: &'a std::collections::BTreeSet<String>,
            report: &'a colgraph::ExecutionReport,
        }
        serde_json::to_writer_pretty(
            &mut w,
            &QueryOutput {
                vertices: &out.vertices,
                report: &out.report,
            },
        )?;
        writeln!(w)?;
    } else {
        for v in &out.vertices {
            writeln!(w, "{v}")?;
        }
        let r = &out.report;
        eprintln!(
            "{} vertices; operator {}; edges_read {}; fragments_read {}; iterations {}",
            r.result_size, r.operator, r.edges_read, r.fragments_read, r.iterations
        );
    }
    w.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Load { graph } => {
            let g = graph.graph()?;
            println!("|V|={} |E|={}", g.vertex_count(), g.edge_count());
        }
        Command::Generate {
            kind,
            seed,
            weights,
            out,
        } => {
            let g = generate(&kind, seed, weights)?;
            let mut w = output(&out)?;
            write_edges(&g.edges, &mut w)?;
            w.flush()?;
            eprintln!("|V|={} |E|={}", g.vertex_count(), g.edge_count());
        }
        Command::Cluster { graph, by, out } => {
            let clustering = match by {
                ClusterBy::Type => Clustering::Type,
                ClusterBy::Edge => Clustering::Edge,
            };
            let g = apply_clustering(graph.graph()?, clustering)?;
            let mut w = output(&out)?;
            write_edges(&g.edges, &mut w)?;
            w.flush()?;
        }
        Command::Query(args) => query(args)?,
        Command::Bench {
            spec,
            json,
            csv,
            partitions,
            parallel,
            no_oracle,
        } => {
            let spec = BenchmarkSpec::from_path(&spec)?;
            let report = run(
                &spec,
                RunOptions {
                    partitions,
                    oracle_check: !no_oracle,
                    parallel_cells: parallel,
                },
            )?;
            if let Some(path) = &csv {
                report.write_csv(output(&Some(path.clone()))?)?;
            }
            if json.is_some() || csv.is_none() {
                let mut w = output(&json)?;
                report.write_json(&mut w)?;
                writeln!(w)?;
                w.flush()?;
            }
            for fit in &report.fits {
                let r2 = fit.r_squared.map_or("n/a".to_string(), |v| format!("{v:.4}"));
                eprintln!("R² {} {} xi={:?}: {r2}", fit.operator, fit.predicate, fit.xi);
            }
        }
        Command::TgiReport {
            graph,
            xi,
            fpr,
            direction,
            adaptive,
            cluster,
        } => {
            let g = apply_clustering(graph.graph()?, cluster.into())?;
            let mut reports = Vec::new();
            for &size in &xi {
                for &p in &fpr {
                    let tgi = colgraph::TransitionGraphIndex::build(&g.edges, direction.into(), policy(size, adaptive), p)?;
                    reports.push(tgi.report());
                }
            }
            let mut w = output(&None)?;
            serde_json::to_writer_pretty(&mut w, &reports)?;
            writeln!(w)?;
            w.flush()?;
        }
    }
    Ok(())
}
