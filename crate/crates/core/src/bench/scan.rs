//! Parameter scans: the `β2 − β3` surface over `(α, δ)` and `β2` against
//! planted modularity across SSBM draws.

use super::config::solve_bin_bout;
use crate::error::Result;
use crate::graph::{generate_ssbm, modularity, Graph, SsbmConfig};
use crate::lcp::{build_w, spectral_y2, LcpParams};
use crate::numerics::PowerOptions;
use rayon::prelude::*;
use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub alpha: f64,
    pub delta: f64,
    pub beta2: f64,
    pub beta3: f64,
}

impl GapRow {
    pub fn gap(&self) -> f64 {
        self.beta2 - self.beta3
    }
}

fn without_isolated(g: &Graph) -> Graph {
    let keep: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) > 0).collect();
    g.induced_subgraph(&keep)
}

/// Spectral gap of the unscaled operator at every `(α, δ)` grid point,
/// alpha-major. Isolated nodes are dropped first.
pub fn scan_gap_surface(
    g: &Graph,
    alphas: &[f64],
    deltas: &[f64],
    power: &PowerOptions,
) -> Result<Vec<GapRow>> {
    let core = without_isolated(g);
    let grid: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| deltas.iter().map(move |&d| (a, d)))
        .collect();
    grid.par_iter()
        .map(|&(alpha, delta)| {
            let params = LcpParams {
                power: power.clone(),
                ..LcpParams::unscaled(alpha, delta)
            };
            let s = spectral_y2(&build_w(&core, &params)?, power)?;
            Ok(GapRow {
                alpha,
                delta,
                beta2: s.beta2,
                beta3: s.beta3,
            })
        })
        .collect()
}

pub fn write_gap_csv<W: Write>(rows: &[GapRow], mut out: W) -> Result<()> {
    writeln!(out, "alpha,delta,beta2,beta3,gap")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.alpha, r.delta, r.beta2, r.beta3, r.gap())?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Beta2Row {
    pub b_in: f64,
    pub b_out: f64,
    pub seed: u64,
    pub modularity_planted: f64,
    pub beta2: f64,
}

/// `points` SSBM configurations at fixed expected degree, with the gap
/// spread evenly from 0 to its largest feasible value.
pub fn beta2_scan_configs(n: usize, c: usize, d_av: f64, points: usize, seed: u64) -> Result<Vec<SsbmConfig>> {
    let max_gap = c as f64 * d_av;
    (0..points)
        .map(|k| {
            let gap = if points > 1 {
                max_gap * k as f64 / (points - 1) as f64
            } else {
                0.0
            };
            // The last point may round to a tiny negative b_out.
            let (b_in, b_out) = match solve_bin_bout(c, d_av, gap) {
                Ok(pair) => pair,
                Err(_) => (c as f64 * d_av, 0.0),
            };
            Ok(SsbmConfig {
                n,
                c,
                b_in,
                b_out,
                seed: seed.wrapping_add(k as u64),
            })
        })
        .collect()
}

/// Planted-partition modularity and `β2` of the unscaled operator for each
/// SSBM draw.
pub fn scan_beta2_modularity(configs: &[SsbmConfig], params: &LcpParams) -> Result<Vec<Beta2Row>> {
    configs
        .par_iter()
        .map(|cfg| {
            let (g, planted) = generate_ssbm(cfg)?;
            let modularity_planted = modularity(&g, &planted)?;
            let core = without_isolated(&g);
            let s = spectral_y2(&build_w(&core, params)?, &params.power)?;
            Ok(Beta2Row {
                b_in: cfg.b_in,
                b_out: cfg.b_out,
                seed: cfg.seed,
                modularity_planted,
                beta2: s.beta2,
            })
        })
        .collect()
}

pub fn write_beta2_csv<W: Write>(rows: &[Beta2Row], mut out: W) -> Result<()> {
    writeln!(out, "b_in,b_out,seed,modularity_planted,beta2")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.b_in, r.b_out, r.seed, r.modularity_planted, r.beta2)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::metrics::spearman;

    fn fig2_graph() -> Graph {
        // b_in = 25, b_out = 2.5 at n = 300 keeps the mean degree near 7.
        generate_ssbm(&SsbmConfig {
            n: 300,
            c: 5,
            b_in: 25.0,
            b_out: 2.5,
            seed: 5,
        })
        .unwrap()
        .0
    }

    #[test]
    fn single_point_gives_single_row() {
        let rows = scan_gap_surface(&fig2_graph(), &[0.5], &[1e-3], &PowerOptions::default()).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].beta2 >= rows[0].beta3);
    }

    #[test]
    fn gap_depends_more_on_alpha_than_delta() {
        let g = fig2_graph();
        let alphas = [0.2, 0.5, 0.8];
        let deltas = [0.0, 0.01, 0.02];
        let rows = scan_gap_surface(&g, &alphas, &deltas, &PowerOptions::default()).unwrap();
        assert!(rows.iter().all(|r| r.beta2 >= r.beta3));
        let at = |a: f64, d: f64| rows.iter().find(|r| r.alpha == a && r.delta == d).unwrap().gap();
        let range = |xs: Vec<f64>| {
            xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                - xs.iter().copied().fold(f64::INFINITY, f64::min)
        };
        let over_delta = range(deltas.iter().map(|&d| at(0.5, d)).collect());
        let over_alpha = range(alphas.iter().map(|&a| at(a, 0.01)).collect());
        assert!(over_delta < over_alpha, "{over_delta} vs {over_alpha}");
    }

    #[test]
    fn beta2_tracks_modularity() {
        let configs = beta2_scan_configs(150, 3, 7.0, 8, 3).unwrap();
        assert_eq!(configs.len(), 8);
        assert_eq!(configs[0].b_in, configs[0].b_out);
        assert_eq!(configs[7].b_out, 0.0);
        let rows = scan_beta2_modularity(&configs, &LcpParams::unscaled(0.95, 1e-3)).unwrap();
        assert!(rows.iter().all(|r| r.beta2.is_finite() && r.modularity_planted.is_finite()));
        let m: Vec<f64> = rows.iter().map(|r| r.modularity_planted).collect();
        let b: Vec<f64> = rows.iter().map(|r| r.beta2).collect();
        assert!(spearman(&m, &b).unwrap() > 0.5);
        // With no inter-block links the blocks decouple and β2 reaches 0.
        assert!(rows[7].beta2.abs() < 1e-8);
    }

    #[test]
    fn uniform_graphs_have_lower_beta2() {
        let params = LcpParams::unscaled(0.95, 1e-3);
        let mut lower = 0;
        for seed in 0..10 {
            let mk = |b_in, b_out| SsbmConfig {
                n: 150,
                c: 3,
                b_in,
                b_out,
                seed,
            };
            let rows = scan_beta2_modularity(&[mk(7.0, 7.0), mk(19.0, 1.0)], &params).unwrap();
            if rows[0].beta2 < rows[1].beta2 {
                lower += 1;
            }
        }
        assert!(lower >= 9, "{lower}");
    }
}
