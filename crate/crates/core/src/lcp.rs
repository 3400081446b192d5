//! The linear clustering process.
//!
//! Every link `(i, j)` carries a weight
//!
//! ```text
//! w_ij = [α(|N_i ∩ N_j| + 1) − δ((|N_i \ N_j| + |N_j \ N_i|)/2 − 1)] / (d_i d_j)
//! ```
//!
//! combining attraction through shared neighbours with repulsion through
//! distinct ones. Positions evolve as `x[k+1] = (I + W − diag(Wu)) x[k]`,
//! and the second eigenvector `y2` of `W − diag(Wu)` is what the shifted,
//! rescaled positions converge to.
//!
//! [`run_scaled_lcp`] additionally attenuates, over several rounds, the links
//! whose endpoints sit furthest apart in the `y2` ranking. Scale factors live
//! beside the base weights, so rescaling is `O(L)` and the graph itself is
//! never modified.

use crate::error::{Error, Result};
use crate::graph::{sorted_intersection_len, Graph};
use crate::numerics::{dot, power_leading, PowerOptions, SpectralSummary};
use crate::partition::rank_nodes;
use log::warn;

/// Rule `i ↦ γ_i` giving the weight scale applied to links selected in
/// scaling round `i` of `rounds`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaSchedule {
    /// `γ_i = max · i / rounds`.
    Linear { max: f64 },
    Constant(f64),
}

impl GammaSchedule {
    pub fn gamma(&self, round: usize, rounds: usize) -> f64 {
        match *self {
            GammaSchedule::Linear { max } => max * round as f64 / rounds.max(1) as f64,
            GammaSchedule::Constant(g) => g,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LcpParams {
    /// Attraction strength.
    pub alpha: f64,
    /// Repulsion strength.
    pub delta: f64,
    /// Clamp `(alpha, delta)` into [`param_bounds`] (with a warning).
    pub enforce_bounds: bool,
    /// Fraction of all links scaled over the whole schedule.
    pub scale_fraction_total: f64,
    /// Number of scaling rounds.
    pub scale_iterations: usize,
    pub gamma_schedule: GammaSchedule,
    /// Tolerance, budget and seed for the spectral solves.
    pub power: PowerOptions,
}

impl Default for LcpParams {
    fn default() -> Self {
        LcpParams {
            alpha: 0.95,
            delta: 1e-3,
            enforce_bounds: false,
            scale_fraction_total: 0.6,
            scale_iterations: 30,
            gamma_schedule: GammaSchedule::Linear { max: 0.05 },
            power: PowerOptions::default(),
        }
    }
}

impl LcpParams {
    /// Parameters without link scaling.
    pub fn unscaled(alpha: f64, delta: f64) -> Self {
        LcpParams {
            alpha,
            delta,
            scale_fraction_total: 0.0,
            scale_iterations: 0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha and delta must be non-negative, got ({}, {})",
                self.alpha, self.delta
            )));
        }
        if !(0.0..=1.0).contains(&self.scale_fraction_total) {
            return Err(Error::InvalidParameter(format!(
                "scale fraction {} outside [0, 1]",
                self.scale_fraction_total
            )));
        }
        Ok(())
    }

    /// Links scaled per round: `round(fraction · L / rounds)`.
    pub fn links_per_round(&self, num_links: usize) -> usize {
        if self.scale_iterations == 0 {
            return 0;
        }
        (self.scale_fraction_total * num_links as f64 / self.scale_iterations as f64).round()
            as usize
    }

    /// `(alpha, delta)` actually used on `g`.
    pub fn effective_strengths(&self, g: &Graph) -> (f64, f64) {
        if !self.enforce_bounds {
            return (self.alpha, self.delta);
        }
        let Ok(b) = param_bounds(g) else {
            return (self.alpha, self.delta);
        };
        let alpha = self.alpha.min(b.alpha_max);
        let delta = self.delta.min(b.delta_max);
        if alpha < self.alpha || delta < self.delta {
            warn!(
                "clamping (alpha, delta) = ({}, {}) to ({alpha}, {delta}) for d_max = {}",
                self.alpha,
                self.delta,
                g.max_degree()
            );
        }
        (alpha, delta)
    }
}

/// Entries of `A ∘ A²`, one per CSR slot: the number of 2-hop walks between
/// adjacent nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardA2 {
    pub per_slot: Vec<usize>,
    /// Increments performed before symmetrization.
    pub increments: usize,
}

impl HadamardA2 {
    /// Sum of all matrix entries; six times the triangle count.
    pub fn total(&self) -> usize {
        self.per_slot.iter().sum()
    }

    pub fn entry(&self, g: &Graph, i: usize, j: usize) -> usize {
        g.find_slot(i, j).map_or(0, |s| self.per_slot[s])
    }
}

/// Computes `A ∘ A²` by counting, for each node `i`, the walks `i → j → m`
/// with `m > i` adjacent to `i`, then mirroring the upper triangle.
pub fn hadamard_a_a2(g: &Graph) -> HadamardA2 {
    let n = g.n();
    let mut per_slot = vec![0usize; g.num_slots()];
    let mut slot_in_row = vec![usize::MAX; n];
    let mut increments = 0;
    for i in 0..n {
        for s in g.slots(i) {
            slot_in_row[g.slot_target(s)] = s;
        }
        for &j in g.neighbors(i) {
            let nj = g.neighbors(j);
            for &m in &nj[nj.partition_point(|&m| m <= i)..] {
                let s = slot_in_row[m];
                if s != usize::MAX {
                    per_slot[s] += 1;
                    increments += 1;
                }
            }
        }
        for &m in g.neighbors(i) {
            slot_in_row[m] = usize::MAX;
        }
    }
    for &(i, m) in g.edges() {
        let upper = g.find_slot(i, m).expect("edge slot");
        let lower = g.find_slot(m, i).expect("edge slot");
        per_slot[lower] = per_slot[upper];
    }
    HadamardA2 {
        per_slot,
        increments,
    }
}

/// Upper limits on `alpha` and `delta` that keep the operator non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamBounds {
    pub alpha_max: f64,
    pub delta_max: f64,
}

/// `alpha_max = (d_max − 1)/D`, `delta_max = 1/D` with
/// `D = d_max − (1 + d_min/d_max)/2`. Isolated nodes do not count towards
/// `d_min`. When `D = 0` (every component a single link) `delta` is
/// unconstrained.
pub fn param_bounds(g: &Graph) -> Result<ParamBounds> {
    let d_max = g.max_degree();
    if d_max == 0 {
        return Err(Error::EmptyGraph);
    }
    let d_min = g.degrees().iter().copied().filter(|&d| d > 0).min().unwrap_or(1);
    let (d_max, d_min) = (d_max as f64, d_min as f64);
    let denom = d_max - 0.5 * (1.0 + d_min / d_max);
    if denom <= 0.0 {
        return Ok(ParamBounds {
            alpha_max: 1.0,
            delta_max: f64::INFINITY,
        });
    }
    Ok(ParamBounds {
        alpha_max: (d_max - 1.0) / denom,
        delta_max: 1.0 / denom,
    })
}

/// Symmetric link weights on the sparsity pattern of a graph, with per-link
/// scale factors for `W̃ = S ∘ W`.
#[derive(Debug, Clone)]
pub struct WeightMatrix<'g> {
    graph: &'g Graph,
    base: Vec<f64>,
    scale: Vec<f64>,
    scaled_in: Vec<Option<usize>>,
    row_sums: Vec<f64>,
}

impl<'g> WeightMatrix<'g> {
    /// Wraps raw per-slot weights; the caller guarantees symmetry.
    pub fn from_slot_weights(graph: &'g Graph, base: Vec<f64>) -> Result<Self> {
        if base.len() != graph.num_slots() {
            return Err(Error::DimensionMismatch {
                expected: graph.num_slots(),
                found: base.len(),
            });
        }
        let mut w = WeightMatrix {
            graph,
            base,
            scale: vec![1.0; graph.num_edges()],
            scaled_in: vec![None; graph.num_edges()],
            row_sums: Vec::new(),
        };
        w.refresh_row_sums();
        Ok(w)
    }

    fn refresh_row_sums(&mut self) {
        self.row_sums = (0..self.graph.n())
            .map(|i| self.graph.slots(i).map(|s| self.slot_weight(s)).sum())
            .collect();
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Current (scaled) weight at a CSR slot.
    pub fn slot_weight(&self, slot: usize) -> f64 {
        self.base[slot] * self.scale[self.graph.slot_edge(slot)]
    }

    /// Current weight `w̃_ij`; zero for non-adjacent pairs.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.graph.find_slot(i, j).map_or(0.0, |s| self.slot_weight(s))
    }

    /// Unscaled weight `w_ij`.
    pub fn base(&self, i: usize, j: usize) -> f64 {
        self.graph.find_slot(i, j).map_or(0.0, |s| self.base[s])
    }

    /// `W̃u`.
    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    pub fn link_scale(&self, edge: usize) -> f64 {
        self.scale[edge]
    }

    /// Round in which a link was scaled, if it has been.
    pub fn scaled_in(&self, edge: usize) -> Option<usize> {
        self.scaled_in[edge]
    }

    pub fn is_scaled(&self, edge: usize) -> bool {
        self.scaled_in[edge].is_some()
    }

    /// Sets the scale of each listed link and marks it scaled in `round`.
    pub fn scale_links(&mut self, edges: &[usize], gamma: f64, round: usize) {
        for &e in edges {
            self.scale[e] = gamma;
            self.scaled_in[e] = Some(round);
        }
        self.refresh_row_sums();
    }

    /// `y = (W̃ − diag(W̃u)) x`.
    pub fn apply_generator(&self, x: &[f64], y: &mut [f64]) {
        let g = self.graph;
        for i in 0..g.n() {
            let xi = x[i];
            y[i] = g
                .slots(i)
                .map(|s| self.slot_weight(s) * (x[g.slot_target(s)] - xi))
                .sum();
        }
    }

    /// `y = (I + W̃ − diag(W̃u)) x`.
    pub fn apply_operator(&self, x: &[f64], y: &mut [f64]) {
        self.apply_generator(x, y);
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += xi);
    }

    /// Gershgorin bound on `−λ_min(W̃ − diag(W̃u))`.
    fn generator_shift(&self) -> f64 {
        (0..self.n())
            .map(|i| {
                let abs: f64 = self.graph.slots(i).map(|s| self.slot_weight(s).abs()).sum();
                self.row_sums[i].abs() + abs
            })
            .fold(0.0, f64::max)
    }

    /// Dense `W̃`, row-major, for oracles and small-graph inspection.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for s in self.graph.slots(i) {
                m[i][self.graph.slot_target(s)] = self.slot_weight(s);
            }
        }
        m
    }

    /// Dense operator `I + W̃ − diag(W̃u)`.
    pub fn dense_operator(&self) -> Vec<Vec<f64>> {
        let mut m = self.to_dense();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += 1.0 - self.row_sums[i];
        }
        m
    }
}

/// Builds `W` for `g` from the per-link formula, using `A ∘ A²` for the
/// common-neighbour counts.
pub fn build_w<'g>(g: &'g Graph, p: &LcpParams) -> Result<WeightMatrix<'g>> {
    p.validate()?;
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) == 0) {
        return Err(Error::ZeroDegree(v));
    }
    let (alpha, delta) = p.effective_strengths(g);
    let counts = hadamard_a_a2(g);
    let mut base = vec![0.0; g.num_slots()];
    for i in 0..g.n() {
        let di = g.degree(i) as f64;
        for s in g.slots(i) {
            let dj = g.degree(g.slot_target(s)) as f64;
            let common = counts.per_slot[s] as f64;
            let attraction = alpha * (common + 1.0);
            let repulsion = delta * ((di + dj) / 2.0 - common - 1.0);
            base[s] = (attraction - repulsion) / (di * dj);
        }
    }
    WeightMatrix::from_slot_weights(g, base)
}

/// Node positions at discrete time `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionState {
    pub x: Vec<f64>,
    pub k: usize,
}

impl PositionState {
    /// Equidistant start `x[0] = (1, 2, …, n)`.
    pub fn initial(n: usize) -> Self {
        PositionState {
            x: (1..=n).map(|v| v as f64).collect(),
            k: 0,
        }
    }
}

/// One step of the operator.
pub fn operator_apply(w: &WeightMatrix<'_>, state: &PositionState) -> Result<PositionState> {
    if state.x.len() != w.n() {
        return Err(Error::DimensionMismatch {
            expected: w.n(),
            found: state.x.len(),
        });
    }
    let mut x = vec![0.0; w.n()];
    w.apply_operator(&state.x, &mut x);
    Ok(PositionState { x, k: state.k + 1 })
}

/// Positions after `k` operator steps from the equidistant start.
pub fn simulate(g: &Graph, p: &LcpParams, k: usize) -> Result<PositionState> {
    let w = build_w(g, p)?;
    simulate_with(&w, k)
}

pub fn simulate_with(w: &WeightMatrix<'_>, k: usize) -> Result<PositionState> {
    let mut state = PositionState::initial(w.n());
    let mut next = vec![0.0; w.n()];
    for _ in 0..k {
        w.apply_operator(&state.x, &mut next);
        std::mem::swap(&mut state.x, &mut next);
        state.k += 1;
    }
    Ok(state)
}

/// One step of the per-node law, evaluated straight from neighbour sets:
/// `x_i += Σ_j [α(|N_i∩N_j|+1) − δ/2(|N_j\N_i| + |N_i\N_j| − 2)]/(d_i d_j)·(x_j − x_i)`.
pub fn per_node_step(g: &Graph, alpha: f64, delta: f64, x: &[f64]) -> Vec<f64> {
    let difference_len = |a: &[usize], b: &[usize]| a.len() - sorted_intersection_len(a, b);
    (0..g.n())
        .map(|i| {
            let ni = g.neighbors(i);
            let di = ni.len() as f64;
            let force: f64 = ni
                .iter()
                .map(|&j| {
                    let nj = g.neighbors(j);
                    let common = sorted_intersection_len(ni, nj) as f64;
                    let only_j = difference_len(nj, ni) as f64;
                    let only_i = difference_len(ni, nj) as f64;
                    let coeff = (alpha * (common + 1.0) - 0.5 * delta * (only_j + only_i - 2.0))
                        / (di * nj.len() as f64);
                    coeff * (x[j] - x[i])
                })
                .sum();
            x[i] + force
        })
        .collect()
}

fn orient(y: &mut [f64]) {
    // Sign fixed by correlation with the initial positions 1..n.
    let s: f64 = y.iter().enumerate().map(|(k, v)| (k + 1) as f64 * v).sum();
    let flip = if s != 0.0 {
        s < 0.0
    } else {
        y.iter().find(|v| **v != 0.0).is_some_and(|v| *v < 0.0)
    };
    if flip {
        y.iter_mut().for_each(|v| *v = -*v);
    }
}

fn second_eigenpair(
    w: &WeightMatrix<'_>,
    opts: &PowerOptions,
) -> Result<crate::numerics::PowerResult> {
    let n = w.n();
    let u = vec![1.0 / (n as f64).sqrt(); n];
    let opts = PowerOptions {
        shift: w.generator_shift(),
        ..opts.clone()
    };
    let mut r = power_leading(|x, y| w.apply_generator(x, y), n, &[u], &opts)?;
    orient(&mut r.vector);
    Ok(r)
}

/// `y2`, `β2` and `β3` of `W̃ − diag(W̃u)`, by power iteration on the
/// shifted operator with the all-one vector (and then `y2`) deflated.
pub fn spectral_y2(w: &WeightMatrix<'_>, opts: &PowerOptions) -> Result<SpectralSummary> {
    let n = w.n();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "spectral extraction needs at least two nodes, got {n}"
        )));
    }
    let second = second_eigenpair(w, opts)?;
    let (beta3, third_ok, third_iters) = if n > 2 {
        let u = vec![1.0 / (n as f64).sqrt(); n];
        let third_opts = PowerOptions {
            shift: w.generator_shift(),
            start: None,
            ..opts.clone()
        };
        let r = power_leading(
            |x, y| w.apply_generator(x, y),
            n,
            &[u, second.vector.clone()],
            &third_opts,
        )?;
        (r.value, r.converged, r.iterations)
    } else {
        (f64::NEG_INFINITY, true, 0)
    };
    // β3 ≤ β2 holds exactly; enforce it against solver round-off.
    let beta2 = second.value.max(beta3);
    Ok(SpectralSummary {
        beta2,
        beta3,
        y2: second.vector,
        converged: second.converged && third_ok,
        iterations: second.iterations + third_iters,
    })
}

/// One round of the link-scaling schedule.
#[derive(Debug, Clone)]
pub struct ScalingStep {
    pub round: usize,
    pub gamma: f64,
    /// `β2` of the weights this round's ranking came from.
    pub beta2: f64,
    /// Rank of every node in the `y2` ordering used for selection.
    pub rank: Vec<usize>,
    /// Link ids scaled this round.
    pub selected: Vec<usize>,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct ScaledRun {
    /// Spectrum of the final scaled weights.
    pub summary: SpectralSummary,
    pub history: Vec<ScalingStep>,
}

/// Picks up to `quota` unscaled links with the largest rank distance
/// `|r_i − r_j|`, ties going to the smaller link id.
pub fn select_links(
    g: &Graph,
    rank: &[usize],
    already_scaled: impl Fn(usize) -> bool,
    quota: usize,
) -> Vec<usize> {
    let mut candidates: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(e, _)| !already_scaled(*e))
        .map(|(e, &(i, j))| (rank[i].abs_diff(rank[j]), e))
        .collect();
    candidates.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    candidates.truncate(quota);
    candidates.into_iter().map(|(_, e)| e).collect()
}

/// Runs the iterated scaling schedule and returns the spectrum of the final
/// `W̃`. Each round ranks nodes by the current `y2`, scales the quota of
/// most distant unscaled links by that round's `γ`, and each link is scaled
/// at most once, keeping its `γ` afterwards.
pub fn run_scaled_lcp(g: &Graph, p: &LcpParams) -> Result<ScaledRun> {
    let mut w = build_w(g, p)?;
    let rounds = p.scale_iterations;
    let quota = p.links_per_round(g.num_edges());
    let mut history = Vec::with_capacity(rounds);
    let mut opts = p.power.clone();
    for round in 1..=rounds {
        let second = second_eigenpair(&w, &opts)?;
        let ranking = rank_nodes(&second.vector);
        let selected = select_links(g, &ranking.rank, |e| w.is_scaled(e), quota);
        let gamma = p.gamma_schedule.gamma(round, rounds);
        w.scale_links(&selected, gamma, round);
        history.push(ScalingStep {
            round,
            gamma,
            beta2: second.value,
            rank: ranking.rank,
            selected,
            converged: second.converged,
        });
        // Warm start: consecutive rounds change few weights.
        opts.start = Some(second.vector);
    }
    let summary = spectral_y2(&w, &opts)?;
    Ok(ScaledRun { summary, history })
}

/// Orientation-independent agreement `|cos|` between two vectors.
pub fn abs_cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    (dot(a, b) / (na * nb)).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::{generate_ssbm, SsbmConfig};
    use crate::numerics::dense_sym_eigs;
    use nalgebra::DMatrix;

    fn dense_a(g: &Graph) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; g.n()]; g.n()];
        for &(i, j) in g.edges() {
            a[i][j] = 1.0;
            a[j][i] = 1.0;
        }
        a
    }

    /// `A ∘ A²` by dense matrix product.
    fn dense_hadamard(g: &Graph) -> Vec<Vec<f64>> {
        let a = dense_a(g);
        let n = g.n();
        let mut h = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if a[i][j] > 0.0 {
                    h[i][j] = (0..n).map(|k| a[i][k] * a[k][j]).sum();
                }
            }
        }
        h
    }

    #[test]
    fn hadamard_examples() {
        let k3 = complete(3);
        let h = hadamard_a_a2(&k3);
        assert!(h.per_slot.iter().all(|&c| c == 1));
        assert_eq!(h.total(), 6);
        assert_eq!(hadamard_a_a2(&path(3)).total(), 0);
        let k4 = complete(4);
        let h = hadamard_a_a2(&k4);
        assert!(h.per_slot.iter().all(|&c| c == 2));
        assert_eq!(h.total(), 24);
        assert_eq!(h.increments, 3 * 4);
    }

    #[test]
    fn hadamard_matches_dense_product_on_ssbm() {
        let (g, _) = generate_ssbm(&SsbmConfig {
            n: 48,
            c: 2,
            b_in: 20.0,
            b_out: 4.0,
            seed: 3,
        })
        .unwrap();
        let h = hadamard_a_a2(&g);
        let dense = dense_hadamard(&g);
        for i in 0..g.n() {
            for j in 0..g.n() {
                assert_eq!(h.entry(&g, i, j) as f64, dense[i][j]);
            }
        }
        assert_eq!(h.total(), 6 * g.triangle_count());
        assert_eq!(h.increments, 3 * g.triangle_count());
    }

    #[test]
    fn weight_examples() {
        let p = LcpParams::unscaled(0.5, 0.1);
        let k3 = complete(3);
        let w = build_w(&k3, &p).unwrap();
        for &(i, j) in k3.edges() {
            assert!((w.get(i, j) - 0.25).abs() < 1e-15);
        }
        let p3 = path(3);
        let w = build_w(&p3, &p).unwrap();
        assert!((w.get(0, 1) - 0.225).abs() < 1e-15);
        let bb = barbell();
        let zero = build_w(&bb, &LcpParams::unscaled(0.0, 0.0)).unwrap();
        assert!(zero.to_dense().iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn weight_matches_matrix_form() {
        // (α+δ)Δ⁻¹(A∘A² + A)Δ⁻¹ − (δ/2)(Δ⁻¹A + AΔ⁻¹), entrywise.
        let (g, _) = generate_ssbm(&SsbmConfig {
            n: 60,
            c: 3,
            b_in: 18.0,
            b_out: 3.0,
            seed: 11,
        })
        .unwrap();
        let keep: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) > 0).collect();
        let g = g.induced_subgraph(&keep);
        let (alpha, delta) = (0.7, 0.02);
        let w = build_w(&g, &LcpParams::unscaled(alpha, delta)).unwrap();
        let a = dense_a(&g);
        let h = dense_hadamard(&g);
        let d: Vec<f64> = g.degrees().iter().map(|&x| x as f64).collect();
        for i in 0..g.n() {
            for j in 0..g.n() {
                let want = (alpha + delta) * (h[i][j] + a[i][j]) / (d[i] * d[j])
                    - 0.5 * delta * (a[i][j] / d[i] + a[i][j] / d[j]);
                assert!((w.get(i, j) - want).abs() < 1e-12);
                assert_eq!(w.get(i, j), w.get(j, i));
            }
        }
    }

    #[test]
    fn zero_degree_is_rejected() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert!(matches!(
            build_w(&g, &LcpParams::default()),
            Err(Error::ZeroDegree(2))
        ));
    }

    #[test]
    fn bounds_examples() {
        let b = param_bounds(&complete(3)).unwrap();
        assert!((b.alpha_max - 1.0).abs() < 1e-15 && (b.delta_max - 1.0).abs() < 1e-15);
        let b = param_bounds(&complete(5)).unwrap();
        assert!((b.alpha_max - 1.0).abs() < 1e-15 && (b.delta_max - 1.0 / 3.0).abs() < 1e-15);
        let b = param_bounds(&barbell()).unwrap();
        assert!((b.alpha_max - 12.0 / 13.0).abs() < 1e-15);
        assert!((b.delta_max - 6.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn bounds_are_tight_on_cliques_only() {
        let min_entry = |g: &Graph, a: f64, d: f64| {
            let op = build_w(g, &LcpParams::unscaled(a, d)).unwrap().dense_operator();
            op.iter().flatten().copied().fold(f64::INFINITY, f64::min)
        };
        let k5 = complete(5);
        let b = param_bounds(&k5).unwrap();
        assert!(min_entry(&k5, b.alpha_max, b.delta_max) >= -1e-15);
        assert!(min_entry(&k5, 1.001 * b.alpha_max, b.delta_max) < 0.0);
        // Off cliques the bounds are sufficient but not sharp.
        let bb = barbell();
        let b = param_bounds(&bb).unwrap();
        assert!(min_entry(&bb, 1.001 * b.alpha_max, b.delta_max) >= -1e-15);
    }

    #[test]
    fn enforce_bounds_clamps() {
        let p = LcpParams {
            alpha: 0.99,
            delta: 0.9,
            enforce_bounds: true,
            ..LcpParams::unscaled(0.0, 0.0)
        };
        let (a, d) = p.effective_strengths(&barbell());
        assert!((a - 12.0 / 13.0).abs() < 1e-15 && (d - 6.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn operator_examples() {
        let k3 = complete(3);
        let w = build_w(&k3, &LcpParams::unscaled(0.5, 0.0)).unwrap();
        let next = operator_apply(&w, &PositionState::initial(3)).unwrap();
        assert_eq!(next.k, 1);
        for (got, want) in next.x.iter().zip([1.75, 2.0, 2.25]) {
            assert!((got - want).abs() < 1e-15);
        }
        let ones = PositionState { x: vec![1.0; 3], k: 0 };
        assert_eq!(operator_apply(&w, &ones).unwrap().x, vec![1.0; 3]);
        let shifted = PositionState {
            x: vec![4.5, 5.5, 6.5],
            k: 0,
        };
        let out = operator_apply(&w, &shifted).unwrap();
        for (a, b) in out.x.iter().zip(&next.x) {
            assert!((a - b - 3.5).abs() < 1e-14);
        }
        assert!(operator_apply(&w, &PositionState::initial(4)).is_err());
    }

    #[test]
    fn simulation_converges_to_mean() {
        let k3 = complete(3);
        let p = LcpParams::unscaled(0.5, 0.0);
        assert_eq!(simulate(&k3, &p, 0).unwrap().x, vec![1.0, 2.0, 3.0]);
        let x = simulate(&k3, &p, 200).unwrap().x;
        assert!(x.iter().all(|v| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn per_node_law_matches_operator() {
        let (g, _) = generate_ssbm(&SsbmConfig {
            n: 30,
            c: 2,
            b_in: 12.0,
            b_out: 3.0,
            seed: 8,
        })
        .unwrap();
        let keep: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) > 0).collect();
        let g = g.induced_subgraph(&keep);
        let w = build_w(&g, &LcpParams::unscaled(0.4, 0.05)).unwrap();
        let mut state = PositionState::initial(g.n());
        for _ in 0..20 {
            let law = per_node_step(&g, 0.4, 0.05, &state.x);
            state = operator_apply(&w, &state).unwrap();
            for (a, b) in law.iter().zip(&state.x) {
                assert!((a - b).abs() < 1e-12);
            }
            state.x = law;
        }
    }

    #[test]
    fn disjoint_triangles_have_second_unit_eigenvalue() {
        let g = disjoint_cliques(2, 3);
        let w = build_w(&g, &LcpParams::unscaled(0.5, 0.1)).unwrap();
        let s = spectral_y2(&w, &PowerOptions::default()).unwrap();
        assert!(s.converged);
        assert!(s.beta2.abs() < 1e-10);
        assert!((s.y2[0] - s.y2[1]).abs() < 1e-8 && (s.y2[1] - s.y2[2]).abs() < 1e-8);
        assert!((s.y2[3] - s.y2[4]).abs() < 1e-8 && (s.y2[4] - s.y2[5]).abs() < 1e-8);
        assert!(s.y2[0] * s.y2[3] < 0.0);
        assert!(s.beta3 < s.beta2);
    }

    #[test]
    fn barbell_y2_separates_triangles_and_matches_dense() {
        let g = barbell();
        let w = build_w(&g, &LcpParams::unscaled(0.5, 0.1)).unwrap();
        let s = spectral_y2(&w, &PowerOptions::default()).unwrap();
        let side: Vec<bool> = s.y2.iter().map(|&v| v > 0.0).collect();
        assert!(side[0] == side[1] && side[1] == side[2]);
        assert!(side[3] == side[4] && side[4] == side[5] && side[0] != side[3]);

        let mut gen = DMatrix::from_fn(6, 6, |i, j| w.get(i, j));
        for i in 0..6 {
            gen[(i, i)] -= w.row_sums()[i];
        }
        let dense = dense_sym_eigs(&gen).unwrap();
        assert!(dense.values[0].abs() < 1e-12);
        assert!((s.beta2 - dense.values[1]).abs() < 1e-9);
        assert!((s.beta3 - dense.values[2]).abs() < 1e-8);
        let col: Vec<f64> = dense.vectors.column(1).iter().copied().collect();
        assert!(abs_cosine(&s.y2, &col) > 1.0 - 1e-9);
        let usum: f64 = s.y2.iter().sum();
        assert!(usum.abs() < 1e-8);
        assert!((crate::numerics::norm(&s.y2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn y2_staircase_on_small_ssbm() {
        // Four planted blocks show up as four modularity segments of the
        // sorted eigenvector on most draws.
        let mut four = 0;
        for seed in 0..10 {
            let (g, _) = generate_ssbm(&SsbmConfig {
                n: 100,
                c: 4,
                b_in: 25.0,
                b_out: 1.0,
                seed,
            })
            .unwrap();
            let keep: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) > 0).collect();
            let g = g.induced_subgraph(&keep);
            let w = build_w(&g, &LcpParams::unscaled(0.5, 1e-3)).unwrap();
            let s = spectral_y2(&w, &PowerOptions::default()).unwrap();
            let rk = rank_nodes(&s.y2);
            if crate::partition::estimate_clusters(&rk, &g, 0.0).num_segments() == 4 {
                four += 1;
            }
        }
        assert!(four >= 8, "{four} of 10");
    }

    #[test]
    fn selection_prefers_large_rank_distance() {
        let g = Graph::from_edges(13, [(0, 5), (1, 2), (3, 12), (4, 6)]).unwrap();
        let rank: Vec<usize> = (0..13).collect();
        let diffs: Vec<usize> = g.edges().iter().map(|&(i, j)| rank[i].abs_diff(rank[j])).collect();
        assert_eq!(diffs, vec![5, 1, 9, 2]);
        assert_eq!(select_links(&g, &rank, |_| false, 1), vec![2]);
        assert_eq!(select_links(&g, &rank, |e| e == 2, 2), vec![0, 3]);
    }

    #[test]
    fn schedule_values() {
        let s = GammaSchedule::Linear { max: 0.05 };
        assert!((s.gamma(30, 30) - 0.05).abs() < 1e-15);
        assert!((s.gamma(1, 30) - 0.05 / 30.0).abs() < 1e-15);
        let p = LcpParams::default();
        assert_eq!(p.links_per_round(1000), 20);
    }

    #[test]
    fn scaled_run_scales_each_link_once() {
        let (g, _) = generate_ssbm(&SsbmConfig {
            n: 120,
            c: 2,
            b_in: 14.0,
            b_out: 2.0,
            seed: 4,
        })
        .unwrap();
        let keep: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) > 0).collect();
        let g = g.induced_subgraph(&keep);
        let p = LcpParams {
            scale_iterations: 10,
            ..Default::default()
        };
        let run = run_scaled_lcp(&g, &p).unwrap();
        assert_eq!(run.history.len(), 10);
        let quota = p.links_per_round(g.num_edges());
        let mut seen = std::collections::HashSet::new();
        for step in &run.history {
            assert_eq!(step.selected.len(), quota);
            for &e in &step.selected {
                assert!(seen.insert(e), "link {e} scaled twice");
            }
        }
        assert!(run.summary.beta2 >= run.summary.beta3);
    }
}
