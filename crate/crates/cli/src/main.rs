//! Command-line front end: graph generation, clustering, spectral cluster
//! counts, SSBM sweeps and parameter scans.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use lcp_core::baselines::{lcp_c_count, louvain, nbt_cluster_count, newman_spectral};
use lcp_core::bench::{
    beta2_scan_configs, run_sweep, scan_beta2_modularity, scan_gap_surface, summarize, write_beta2_csv,
    write_csv, write_gap_csv, write_summary_csv, SweepConfig,
};
use lcp_core::graph::{generate_ssbm, read_edge_list, write_edge_list, write_partition, SsbmConfig};
use lcp_core::lcp::{GammaSchedule, LcpParams};
use lcp_core::numerics::PowerOptions;
use lcp_core::partition::{lcp_pipeline, Mode};
use lcp_core::{modularity, Partition};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lcp", version, about = "Linear clustering process for community detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a symmetric stochastic block model graph.
    GenSsbm(GenSsbmArgs),
    /// Cluster with the linear clustering process.
    Lcp(LcpArgs),
    /// Cluster with Louvain.
    Louvain(PartitionArgs),
    /// Cluster with Newman's spectral bisection.
    Newman(PartitionArgs),
    /// Cluster count from the non-backtracking spectrum.
    NbtCount(InputArgs),
    /// Cluster count from the W* spectrum.
    LcpcCount(LcpcArgs),
    /// Run an SSBM sweep described by a config file.
    Sweep(SweepArgs),
    /// Spectral gap of the operator over an (alpha, delta) grid.
    ScanGap(ScanGapArgs),
    /// Second eigenvalue against planted modularity across SSBM draws.
    ScanBeta2(ScanBeta2Args),
}

#[derive(Args)]
struct InputArgs {
    /// Edge-list file.
    graph: PathBuf,
}

#[derive(Args)]
struct PartitionArgs {
    graph: PathBuf,
    /// Partition file to write; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenSsbmArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    c: usize,
    #[arg(long)]
    b_in: f64,
    #[arg(long)]
    b_out: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-list file to write; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also write the planted partition here.
    #[arg(long)]
    planted: Option<PathBuf>,
}

#[derive(Args)]
struct LcpArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    /// Return exactly this many clusters instead of choosing the count.
    #[arg(long)]
    fixed_c: Option<usize>,
    /// Fraction of links scaled over all rounds.
    #[arg(long, default_value_t = 0.6)]
    scale_total: f64,
    /// Number of scaling rounds.
    #[arg(long, default_value_t = 30)]
    scale_iters: usize,
    /// Largest scale factor of the linear schedule.
    #[arg(long, default_value_t = 0.05)]
    gamma_max: f64,
    /// Clamp alpha and delta to the non-negativity bounds of the graph.
    #[arg(long)]
    enforce_bounds: bool,
    /// Seed of the power iteration's starting vector.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LcpcArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Per-(method, gap) means, written next to the row CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct ScanGapArgs {
    graph: PathBuf,
    /// Comma-separated alpha grid.
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
    /// Comma-separated delta grid.
    #[arg(long, value_delimiter = ',', required = true)]
    deltas: Vec<f64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanBeta2Args {
    #[arg(long, default_value_t = 300)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    c: usize,
    #[arg(long, default_value_t = 7.0)]
    d_av: f64,
    #[arg(long, default_value_t = 30)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &Path) -> Result<lcp_core::Graph> {
    read_edge_list(path).with_context(|| format!("reading {}", path.display()))
}

fn emit_partition(p: &Partition, out: Option<&Path>) -> Result<()> {
    let mut w = output(out)?;
    write_partition(p, &mut w)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenSsbm(a) => {
            let (g, planted) = generate_ssbm(&SsbmConfig {
                n: a.n,
                c: a.c,
                b_in: a.b_in,
                b_out: a.b_out,
                seed: a.seed,
            })?;
            let mut w = output(a.out.as_deref())?;
            write_edge_list(&g, &mut w)?;
            w.flush()?;
            if let Some(path) = a.planted {
                emit_partition(&planted, Some(&path))?;
            }
        }
        Command::Lcp(a) => {
            let g = load(&a.graph)?;
            let params = LcpParams {
                alpha: a.alpha,
                delta: a.delta,
                enforce_bounds: a.enforce_bounds,
                scale_fraction_total: a.scale_total,
                scale_iterations: a.scale_iters,
                gamma_schedule: GammaSchedule::Linear { max: a.gamma_max },
                power: PowerOptions {
                    seed: a.seed,
                    ..PowerOptions::default()
                },
            };
            let mode = a.fixed_c.map_or(Mode::Auto, Mode::FixedC);
            let (p, d) = lcp_pipeline(&g, &params, mode)?;
            eprintln!(
                "clusters {} (communities {}, isolated {}), modularity {:.6}, beta2 {:.6e}, beta3 {:.6e}, converged {}",
                d.num_clusters, d.communities, d.isolated, d.modularity, d.beta2, d.beta3, d.converged
            );
            emit_partition(&p, a.out.as_deref())?;
        }
        Command::Louvain(a) => {
            let g = load(&a.graph)?;
            let p = louvain(&g)?;
            eprintln!("clusters {}, modularity {:.6}", p.num_clusters(), modularity(&g, &p)?);
            emit_partition(&p, a.out.as_deref())?;
        }
        Command::Newman(a) => {
            let g = load(&a.graph)?;
            let p = newman_spectral(&g)?;
            eprintln!("clusters {}, modularity {:.6}", p.num_clusters(), modularity(&g, &p)?);
            emit_partition(&p, a.out.as_deref())?;
        }
        Command::NbtCount(a) => println!("{}", nbt_cluster_count(&load(&a.graph)?)?),
        Command::LcpcCount(a) => println!("{}", lcp_c_count(&load(&a.graph)?, a.alpha)?),
        Command::Sweep(a) => {
            let text = std::fs::read_to_string(&a.config)
                .with_context(|| format!("reading {}", a.config.display()))?;
            let cfg = SweepConfig::parse(&text).with_context(|| format!("in {}", a.config.display()))?;
            let rows = run_sweep(&cfg)?;
            let mut w = output(cfg.output.as_deref())?;
            write_csv(&rows, &mut w)?;
            w.flush()?;
            if let Some(path) = a.summary {
                let mut w = output(Some(&path))?;
                write_summary_csv(&summarize(&rows, cfg.c), &mut w)?;
                w.flush()?;
            }
        }
        Command::ScanGap(a) => {
            let g = load(&a.graph)?;
            let rows = scan_gap_surface(&g, &a.alphas, &a.deltas, &PowerOptions::default())?;
            let mut w = output(a.out.as_deref())?;
            write_gap_csv(&rows, &mut w)?;
            w.flush()?;
        }
        Command::ScanBeta2(a) => {
            let configs = beta2_scan_configs(a.n, a.c, a.d_av, a.points, a.seed)?;
            let rows = scan_beta2_modularity(&configs, &LcpParams::unscaled(a.alpha, a.delta))?;
            let mut w = output(a.out.as_deref())?;
            write_beta2_csv(&rows, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
