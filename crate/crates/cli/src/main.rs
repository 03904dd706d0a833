use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use bisectlab::graph_model::io::{load_graph, load_labelling, save_graph, save_labelling};
use bisectlab::harness::{
    calibrate_perturbation, default_grid, run_sweep, write_calibration_csv, write_rows_csv,
    write_summary_csv, ExperimentSpec,
};
use bisectlab::oracles::{log_likelihood, map_bruteforce, min_bisection_bruteforce, minority_swap_check};
use bisectlab::refine::{recover, ReplicaConfig};
use bisectlab::thresholds::report;
use bisectlab::{generate, overlap_error, ModelParams, Sense};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bisectlab", version, about = "Planted bisection recovery and consistency thresholds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a planted bisection instance.
    Gen {
        /// Nodes per class.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_graph: PathBuf,
        #[arg(long)]
        out_labels: PathBuf,
    },
    /// Run spectral start, replica boost and majority relabel on a graph.
    Recover {
        #[arg(long)]
        graph: PathBuf,
        /// Hidden labelling, used only to report errors.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 10)]
        m: usize,
        /// Use the smallest m allowed by the epsilon condition instead of --m.
        #[arg(long)]
        paper_m: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the full trace as JSON.
        #[arg(long)]
        json: bool,
        /// Write the final labelling here.
        #[arg(long)]
        out_labels: Option<PathBuf>,
    },
    /// Consistency statistics for one parameter point, as JSON.
    Threshold {
        #[arg(long)]
        n: u64,
        #[arg(long, requires = "q", conflicts_with_all = ["a", "b"])]
        p: Option<f64>,
        #[arg(long, requires = "p")]
        q: Option<f64>,
        /// Log-scaled rate: p = a ln n / n.
        #[arg(long, requires = "b")]
        a: Option<f64>,
        #[arg(long, requires = "a")]
        b: Option<f64>,
    },
    /// Exact small-instance computations.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
    },
    /// Run a Monte Carlo sweep described by a JSON spec.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: one per processor).
        #[arg(long)]
        workers: Option<usize>,
        /// Also write the per-point summary as CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Tabulate the perturbation constant over the default grid.
    Calibrate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Map,
    Minbisect,
    Likelihood,
    Swapcheck,
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn need<T>(x: Option<T>, flag: &str) -> Result<T> {
    x.with_context(|| format!("--{flag} is required here"))
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen { n, p, q, seed, out_graph, out_labels } => {
            let inst = generate(ModelParams::new(n, p, q)?, seed)?;
            save_graph(&inst.graph, &out_graph)?;
            save_labelling(&inst.hidden, &out_labels)?;
            eprintln!(
                "wrote {} nodes, {} edges to {}",
                inst.graph.num_nodes(),
                inst.graph.num_edges(),
                out_graph.display()
            );
        }
        Command::Recover { graph, labels, epsilon, m, paper_m, seed, json, out_labels } => {
            let g = load_graph(&graph)?;
            let hidden = labels.map(load_labelling).transpose()?;
            let cfg = if paper_m {
                ReplicaConfig::paper(epsilon, seed)?
            } else {
                ReplicaConfig::new(m, epsilon, seed)?
            };
            let trace = recover(&g, &cfg, hidden.as_ref())?;
            if let (Some(path), Some(lab)) = (&out_labels, trace.output()) {
                save_labelling(lab, path)?;
            }
            if json {
                print_json(&trace)?;
            } else {
                if let Some(s) = &trace.sense {
                    println!(
                        "sense: {:?}{} (lambda1 {:.6}, lambda2 {:.6})",
                        s.sense,
                        if s.low_confidence { ", low confidence" } else { "" },
                        s.lambda1,
                        s.lambda2
                    );
                }
                println!("blocks: {}, epsilon: {}, seed: {}", trace.m, trace.epsilon, trace.seed);
                if let Some(e) = trace.stage_errors {
                    let show = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
                    println!(
                        "errors: spectral {}, replica {}, final {}",
                        show(e.spectral),
                        show(e.replica),
                        show(e.final_stage)
                    );
                }
                if let (Some(h), Some(lab)) = (&hidden, &trace.final_labelling) {
                    println!("overlap error: {}", overlap_error(lab, h)?);
                }
                let t = trace.timings;
                println!(
                    "time: spectral {:.3}s, replica {:.3}s, final {:.3}s",
                    t.spectral, t.replica, t.final_stage
                );
                if let Some(f) = &trace.failure {
                    println!("failed at {:?}: {}", f.stage, f.message);
                }
            }
            if let Some(f) = &trace.failure {
                bail!("recovery failed at {:?}: {}", f.stage, f.message);
            }
        }
        Command::Threshold { n, p, q, a, b } => {
            let (p, q) = match (p, q, a, b) {
                (Some(p), Some(q), None, None) => (p, q),
                (None, None, Some(a), Some(b)) => {
                    let scale = (n as f64).ln() / n as f64;
                    (a * scale, b * scale)
                }
                _ => bail!("give either --p and --q or --a and --b"),
            };
            print_json(&report(n, p, q)?)?;
        }
        Command::Oracle { kind, graph, labels, p, q } => {
            let g = load_graph(&graph)?;
            let labels = labels.map(load_labelling).transpose()?;
            match kind {
                OracleKind::Map => print_json(&map_bruteforce(&g, need(p, "p")?, need(q, "q")?)?)?,
                OracleKind::Minbisect => print_json(&min_bisection_bruteforce(&g)?)?,
                OracleKind::Likelihood => {
                    let tau = need(labels, "labels")?;
                    print_json(&log_likelihood(&g, &tau, need(p, "p")?, need(q, "q")?)?)?
                }
                OracleKind::Swapcheck => {
                    let tau = need(labels, "labels")?;
                    let (p, q) = (need(p, "p")?, need(q, "q")?);
                    print_json(&minority_swap_check(&g, &tau, p, q, Sense::of_model(p, q))?)?
                }
            }
        }
        Command::Sweep { spec, out, workers, summary } => {
            let text = std::fs::read_to_string(&spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            let mut spec = ExperimentSpec::from_json(&text)?;
            if spec.apply_seed_override()? {
                eprintln!("master_seed overridden from environment: {}", spec.master_seed);
            }
            let result = run_sweep(&spec, workers)?;
            write_rows_csv(&spec, &result.rows, create(&out)?)?;
            if let Some(path) = summary {
                write_summary_csv(&result.summary, create(&path)?)?;
            }
            print_json(&result.summary)?;
        }
        Command::Calibrate { out } => {
            let table = calibrate_perturbation(&default_grid())?;
            match out {
                Some(path) => {
                    write_calibration_csv(&table, create(&path)?)?;
                    print_json(&serde_json::json!({
                        "max_ratio": table.max_ratio,
                        "max_ratio_hypothesis_met": table.max_ratio_hypothesis_met,
                    }))?;
                }
                None => print_json(&table)?,
            }
        }
    }
    Ok(())
}
