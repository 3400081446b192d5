//! SSBM sweeps over the community gap `b_in − b_out`.

use super::config::{solve_bin_bout, Method, SweepConfig};
use super::metrics::ari;
use crate::baselines::{lcp_c_count, louvain, nbt_cluster_count, newman_spectral};
use crate::error::Result;
use crate::graph::{community_count, generate_ssbm, modularity, write_edge_list, write_partition, Graph, Partition, SsbmConfig};
use crate::partition::{lcp_pipeline, Mode};
use log::warn;
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

pub const CSV_VERSION_LINE: &str = "# lcp-sweep-csv v1";
pub const CSV_HEADER: &str =
    "method,gap,rep,seed,estimated_c,modularity_est,modularity_planted,ari,runtime_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub method: Method,
    pub gap: f64,
    pub rep: usize,
    pub seed: u64,
    /// Clusters containing a linked node; `None` when the method failed on
    /// this graph.
    pub estimated_c: Option<usize>,
    /// Only for methods that return a partition.
    pub modularity_est: Option<f64>,
    pub modularity_planted: f64,
    pub ari: Option<f64>,
    pub runtime_ms: f64,
}

/// Graph seed for one grid point and repetition, independent of the method
/// list.
pub fn row_seed(base: u64, gap_index: usize, rep: usize) -> u64 {
    // splitmix64 finalizer applied twice over the folded inputs.
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(base ^ mix(gap_index as u64)) ^ rep as u64)
}

struct MethodOutcome {
    estimated_c: usize,
    partition: Option<Partition>,
}

fn run_method(method: Method, g: &Graph, cfg: &SweepConfig) -> Result<MethodOutcome> {
    let with_partition = |p: Partition| -> Result<MethodOutcome> {
        Ok(MethodOutcome {
            estimated_c: community_count(g, &p)?,
            partition: Some(p),
        })
    };
    let count = |c| MethodOutcome {
        estimated_c: c,
        partition: None,
    };
    Ok(match method {
        Method::Lcp => with_partition(lcp_pipeline(g, &cfg.lcp, Mode::Auto)?.0)?,
        Method::LcpN => with_partition(lcp_pipeline(g, &cfg.lcp, Mode::FixedC(cfg.c))?.0)?,
        Method::Louvain => with_partition(louvain(g)?)?,
        Method::Newman => with_partition(newman_spectral(g)?)?,
        Method::Nbt => count(nbt_cluster_count(g)?),
        Method::LcpC => count(lcp_c_count(g, cfg.lcp.alpha)?),
    })
}

fn artifact_stem(gap_index: usize, rep: usize) -> String {
    format!("gap{gap_index:03}_rep{rep:03}")
}

fn save<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut std::io::BufWriter<std::fs::File>) -> Result<()>,
{
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    write(&mut out)?;
    out.flush()?;
    Ok(())
}

/// Path of a persisted partition for one sweep cell.
pub fn artifact_partition_path(dir: &Path, gap_index: usize, rep: usize, method: Method) -> std::path::PathBuf {
    dir.join(format!("{}_{}.part", artifact_stem(gap_index, rep), method.name()))
}

/// Path of a persisted graph for one sweep cell.
pub fn artifact_graph_path(dir: &Path, gap_index: usize, rep: usize) -> std::path::PathBuf {
    dir.join(format!("{}.edges", artifact_stem(gap_index, rep)))
}

fn run_cell(cfg: &SweepConfig, gap_index: usize, rep: usize) -> Result<Vec<SweepRow>> {
    let gap = cfg.gaps[gap_index];
    let (b_in, b_out) = solve_bin_bout(cfg.c, cfg.d_av, gap)?;
    let seed = row_seed(cfg.seed, gap_index, rep);
    let (g, planted) = generate_ssbm(&SsbmConfig {
        n: cfg.n,
        c: cfg.c,
        b_in,
        b_out,
        seed,
    })?;
    let modularity_planted = modularity(&g, &planted)?;
    if let Some(dir) = &cfg.artifacts {
        save(&artifact_graph_path(dir, gap_index, rep), |w| write_edge_list(&g, w))?;
        save(&dir.join(format!("{}_planted.part", artifact_stem(gap_index, rep))), |w| {
            write_partition(&planted, w)
        })?;
    }
    let mut rows = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let start = Instant::now();
        let outcome = run_method(method, &g, cfg);
        let runtime_ms = if cfg.timing {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        let mut row = SweepRow {
            method,
            gap,
            rep,
            seed,
            estimated_c: None,
            modularity_est: None,
            modularity_planted,
            ari: None,
            runtime_ms,
        };
        match outcome {
            Ok(out) => {
                row.estimated_c = Some(out.estimated_c);
                if let Some(p) = out.partition {
                    row.modularity_est = Some(modularity(&g, &p)?);
                    row.ari = Some(ari(&p, &planted)?);
                    if let Some(dir) = &cfg.artifacts {
                        save(&artifact_partition_path(dir, gap_index, rep, method), |w| {
                            write_partition(&p, w)
                        })?;
                    }
                }
            }
            Err(e) => warn!("{method} failed at gap {gap}, rep {rep}: {e}"),
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Runs every method on every `(gap, repetition)` graph. Rows are ordered by
/// method (config order), then gap, then repetition, whatever the thread
/// count. A method failing on one graph leaves that row's result fields
/// empty; I/O and configuration errors abort the sweep.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    if let Some(dir) = &cfg.artifacts {
        std::fs::create_dir_all(dir)?;
    }
    let cells: Vec<(usize, usize)> = (0..cfg.gaps.len())
        .flat_map(|gi| (0..cfg.repetitions).map(move |rep| (gi, rep)))
        .collect();
    let per_cell: Vec<Vec<SweepRow>> = cells
        .par_iter()
        .map(|&(gi, rep)| run_cell(cfg, gi, rep))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(per_cell.len() * cfg.methods.len());
    for m in 0..cfg.methods.len() {
        rows.extend(per_cell.iter().map(|cell| cell[m].clone()));
    }
    Ok(rows)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.3}",
            r.method,
            r.gap,
            r.rep,
            r.seed,
            opt(r.estimated_c),
            opt(r.modularity_est),
            r.modularity_planted,
            opt(r.ari),
            r.runtime_ms
        )?;
    }
    Ok(())
}

/// Means over repetitions for one method at one gap.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub gap: f64,
    pub runs: usize,
    pub failures: usize,
    pub mean_estimated_c: f64,
    /// Fraction of runs whose estimated count equals the planted `c`.
    pub frac_correct_c: f64,
    pub mean_modularity_est: Option<f64>,
    pub mean_modularity_planted: f64,
    pub mean_ari: Option<f64>,
    pub mean_runtime_ms: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, k) = xs.fold((0.0, 0usize), |(s, k), x| (s + x, k + 1));
    (k > 0).then(|| sum / k as f64)
}

pub fn summarize(rows: &[SweepRow], c: usize) -> Vec<SummaryRow> {
    let mut keys: Vec<(Method, f64)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(m, g)| m == r.method && g == r.gap) {
            keys.push((r.method, r.gap));
        }
    }
    keys.into_iter()
        .map(|(method, gap)| {
            let group: Vec<&SweepRow> =
                rows.iter().filter(|r| r.method == method && r.gap == gap).collect();
            let ok: Vec<&&SweepRow> = group.iter().filter(|r| r.estimated_c.is_some()).collect();
            SummaryRow {
                method,
                gap,
                runs: group.len(),
                failures: group.len() - ok.len(),
                mean_estimated_c: mean(ok.iter().map(|r| r.estimated_c.unwrap() as f64))
                    .unwrap_or(f64::NAN),
                frac_correct_c: ok.iter().filter(|r| r.estimated_c == Some(c)).count() as f64
                    / group.len() as f64,
                mean_modularity_est: mean(ok.iter().filter_map(|r| r.modularity_est)),
                mean_modularity_planted: mean(group.iter().map(|r| r.modularity_planted))
                    .unwrap_or(f64::NAN),
                mean_ari: mean(ok.iter().filter_map(|r| r.ari)),
                mean_runtime_ms: mean(group.iter().map(|r| r.runtime_ms)).unwrap_or(0.0),
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], mut out: W) -> Result<()> {
    writeln!(out, "# lcp-sweep-summary v1")?;
    writeln!(
        out,
        "method,gap,runs,failures,mean_estimated_c,frac_correct_c,mean_modularity_est,mean_modularity_planted,mean_ari,mean_runtime_ms"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{:.3}",
            r.method,
            r.gap,
            r.runs,
            r.failures,
            r.mean_estimated_c,
            r.frac_correct_c,
            opt(r.mean_modularity_est),
            r.mean_modularity_planted,
            opt(r.mean_ari),
            r.mean_runtime_ms
        )?;
    }
    Ok(())
}
