//! Symmetric stochastic block model: `c` equal-size blocks, intra-block
//! link probability `b_in / n`, inter-block probability `b_out / n`.

use super::{Graph, Partition};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsbmConfig {
    pub n: usize,
    pub c: usize,
    pub b_in: f64,
    pub b_out: f64,
    pub seed: u64,
}

impl SsbmConfig {
    pub fn p_in(&self) -> f64 {
        self.b_in / self.n as f64
    }

    pub fn p_out(&self) -> f64 {
        self.b_out / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.c == 0 || self.n == 0 || self.n % self.c != 0 {
            return Err(Error::InvalidParameter(format!(
                "cluster count {} must divide node count {}",
                self.c, self.n
            )));
        }
        for (name, p) in [("b_in/n", self.p_in()), ("b_out/n", self.p_out())] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {p} is not a probability"
                )));
            }
        }
        Ok(())
    }

    /// Planted block of node `v`; blocks are contiguous id ranges.
    pub fn block_of(&self, v: usize) -> usize {
        v / (self.n / self.c)
    }
}

/// Samples one SSBM graph with one Bernoulli draw per unordered pair, in
/// lexicographic pair order. The ChaCha stream makes the result a pure
/// function of the config.
pub fn generate_ssbm(cfg: &SsbmConfig) -> Result<(Graph, Partition)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (p_in, p_out) = (cfg.p_in(), cfg.p_out());
    let mut edges = Vec::new();
    for i in 0..cfg.n {
        let bi = cfg.block_of(i);
        for j in i + 1..cfg.n {
            let p = if cfg.block_of(j) == bi { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    let labels: Vec<usize> = (0..cfg.n).map(|v| cfg.block_of(v)).collect();
    // Pairs are generated in sorted order, so from_edges cannot fail here.
    Ok((Graph::from_edges(cfg.n, edges)?, Partition::from_labels(&labels)))
}

/// Expected degree `(b_in + (c − 1)·b_out) / c` of every SSBM node.
pub fn expected_degree(c: usize, b_in: f64, b_out: f64) -> f64 {
    (b_in + (c as f64 - 1.0) * b_out) / c as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detectability {
    /// `(b_in − b_out) − c·sqrt(E[D])`.
    pub margin: f64,
    pub detectable: bool,
}

pub fn detectability_margin(c: usize, b_in: f64, b_out: f64) -> Detectability {
    let margin = (b_in - b_out) - c as f64 * expected_degree(c, b_in, b_out).sqrt();
    Detectability {
        margin,
        detectable: margin > 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, c: usize, b_in: f64, b_out: f64, seed: u64) -> SsbmConfig {
        SsbmConfig {
            n,
            c,
            b_in,
            b_out,
            seed,
        }
    }

    #[test]
    fn planted_sizes_are_equal() {
        let (_, p) = generate_ssbm(&cfg(1000, 4, 26.0, 0.67, 1)).unwrap();
        assert_eq!(p.sizes(), &[250, 250, 250, 250]);
        let (_, p) = generate_ssbm(&cfg(999, 3, 7.0, 7.0, 1)).unwrap();
        assert_eq!(p.sizes(), &[333, 333, 333]);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = generate_ssbm(&cfg(300, 3, 10.0, 2.0, 42)).unwrap();
        let b = generate_ssbm(&cfg(300, 3, 10.0, 2.0, 42)).unwrap();
        let c = generate_ssbm(&cfg(300, 3, 10.0, 2.0, 43)).unwrap();
        assert_eq!(a.0.edges(), b.0.edges());
        assert_ne!(a.0.edges(), c.0.edges());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(generate_ssbm(&cfg(10, 3, 1.0, 1.0, 0)).is_err());
        assert!(generate_ssbm(&cfg(10, 2, 11.0, 1.0, 0)).is_err());
        assert!(generate_ssbm(&cfg(10, 2, 1.0, -1.0, 0)).is_err());
    }

    #[test]
    fn intra_only_graph_has_no_cross_links() {
        let (g, p) = generate_ssbm(&cfg(200, 4, 20.0, 0.0, 5)).unwrap();
        assert!(g.edges().iter().all(|&(i, j)| p.cluster_of(i) == p.cluster_of(j)));
    }

    #[test]
    fn expected_degree_examples() {
        assert!((expected_degree(4, 26.0, 0.67) - 7.0025).abs() < 1e-12);
        assert_eq!(expected_degree(1, 3.5, 100.0), 3.5);
        assert!((expected_degree(2, 12.25, 1.75) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn detectability_examples() {
        let d = detectability_margin(2, 12.25, 1.75);
        assert!((d.margin - (10.5 - 2.0 * 7f64.sqrt())).abs() < 1e-12);
        assert!((d.margin - 5.2085).abs() < 1e-4);
        assert!(d.detectable);
        assert!(!detectability_margin(3, 7.0, 7.0).detectable);
        // c = 8 at d_av = 7: the threshold gap is 8·sqrt(7).
        let gap = 8.0 * 7f64.sqrt();
        let b_in = 7.0 + 7.0 * gap / 8.0;
        let at = detectability_margin(8, b_in, b_in - gap);
        assert!(at.margin.abs() < 1e-12);
        assert!((gap - 21.166).abs() < 1e-3);
    }

    #[test]
    fn empirical_mean_degree_close_to_expected() {
        let (b_in, b_out) = (12.25, 1.75);
        let mut total = 0.0;
        for seed in 0..20 {
            let (g, _) = generate_ssbm(&cfg(1000, 2, b_in, b_out, seed)).unwrap();
            total += 2.0 * g.num_edges() as f64 / g.n() as f64;
        }
        let mean = total / 20.0;
        let expect = expected_degree(2, b_in, b_out);
        // Self-pairs are excluded, so the sample mean sits slightly below E[D].
        assert!((mean - expect).abs() / expect < 0.05, "{mean} vs {expect}");
    }
}
