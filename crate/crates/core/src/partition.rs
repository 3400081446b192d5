//! From `y2` to clusters.
//!
//! Nodes are ranked by their `y2` component, after which every cluster is a
//! contiguous run of ranks. Runs are cut either at large consecutive gaps in
//! the sorted eigenvector ([`threshold_clusters`]) or by recursive bisection
//! on modularity ([`estimate_clusters`]). In the known-`c` mode the
//! bisection runs to a fixed depth and adjacent segments are then merged
//! ([`merge_to_c`]).

use crate::error::{Error, Result};
use crate::graph::{modularity, Graph, Partition};
use crate::lcp::{run_scaled_lcp, LcpParams};

/// Nodes sorted by ascending `y2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    /// `order[k]` is the node holding rank `k`.
    pub order: Vec<usize>,
    /// `rank[v]` is the rank of node `v`; the inverse of `order`.
    pub rank: Vec<usize>,
    pub sorted_y2: Vec<f64>,
}

impl Ranking {
    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Ranking that keeps nodes in id order.
    pub fn identity(n: usize) -> Ranking {
        Ranking {
            order: (0..n).collect(),
            rank: (0..n).collect(),
            sorted_y2: (0..n).map(|v| v as f64).collect(),
        }
    }

    /// Ranking from an explicit node order; `sorted_y2` becomes `0, 1, …`.
    pub fn from_order(order: Vec<usize>) -> Result<Ranking> {
        let n = order.len();
        let mut rank = vec![usize::MAX; n];
        for (k, &v) in order.iter().enumerate() {
            if v >= n || rank[v] != usize::MAX {
                return Err(Error::InvalidParameter(format!(
                    "order is not a permutation of 0..{n}"
                )));
            }
            rank[v] = k;
        }
        Ok(Ranking {
            order,
            rank,
            sorted_y2: (0..n).map(|v| v as f64).collect(),
        })
    }
}

/// Stable ascending sort of `y2`; equal values keep node-id order.
pub fn rank_nodes(y2: &[f64]) -> Ranking {
    let mut order: Vec<usize> = (0..y2.len()).collect();
    order.sort_by(|&a, &b| y2[a].total_cmp(&y2[b]));
    let mut rank = vec![0; y2.len()];
    for (k, &v) in order.iter().enumerate() {
        rank[v] = k;
    }
    let sorted_y2 = order.iter().map(|&v| y2[v]).collect();
    Ranking {
        order,
        rank,
        sorted_y2,
    }
}

/// Mean consecutive gap of the sorted eigenvector plus two standard
/// deviations.
pub fn default_theta(rk: &Ranking) -> f64 {
    let gaps: Vec<f64> = rk.sorted_y2.windows(2).map(|w| w[1] - w[0]).collect();
    if gaps.is_empty() {
        return f64::INFINITY;
    }
    let k = gaps.len() as f64;
    let mean = gaps.iter().sum::<f64>() / k;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / k;
    mean + 2.0 * var.sqrt()
}

/// Consecutive ranks share a cluster iff their `y2` gap is below `theta`.
pub fn threshold_clusters(rk: &Ranking, theta: f64) -> Partition {
    let mut borders = Vec::new();
    for (k, w) in rk.sorted_y2.windows(2).enumerate() {
        if !(w[1] - w[0] < theta) {
            borders.push(k + 1);
        }
    }
    BorderSet { borders, n: rk.n() }.to_partition(rk)
}

/// Split positions in rank order; border `b` separates ranks `b − 1` and
/// `b`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BorderSet {
    pub borders: Vec<usize>,
    /// Number of ranked nodes.
    pub n: usize,
}

impl BorderSet {
    pub fn num_segments(&self) -> usize {
        self.borders.len() + 1
    }

    /// Half-open rank ranges of the segments.
    pub fn segments(&self) -> Vec<(usize, usize)> {
        let mut cuts = Vec::with_capacity(self.borders.len() + 2);
        cuts.push(0);
        cuts.extend(&self.borders);
        cuts.push(self.n);
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// Cluster `s` holds the nodes ranked inside segment `s`.
    pub fn to_partition(&self, rk: &Ranking) -> Partition {
        let mut assignment = vec![0; rk.n()];
        for (s, (lo, hi)) in self.segments().into_iter().enumerate() {
            for &v in &rk.order[lo..hi] {
                assignment[v] = s;
            }
        }
        Partition::from_assignment(assignment).expect("segments are non-empty")
    }
}

/// Per-split modularity accounting of one rank segment `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitProfile {
    pub lo: usize,
    /// `p[k]`: modularity contribution of ranks `lo..=lo+k` as one cluster.
    pub p: Vec<f64>,
    /// `q[k]`: contribution of ranks `lo+k..hi` as one cluster.
    pub q: Vec<f64>,
}

impl SplitProfile {
    /// `p_r + q_r` for the split placing ranks `lo..=lo+k` on the left,
    /// for `k` in `0..len−1`.
    pub fn scores(&self) -> Vec<f64> {
        (0..self.p.len().saturating_sub(1))
            .map(|k| self.p[k] + self.q[k + 1])
            .collect()
    }

    /// Contribution of the whole segment as one cluster.
    pub fn whole(&self) -> f64 {
        self.p.last().copied().unwrap_or(0.0)
    }

    /// Best split as `(border, score)`, the smallest border on ties.
    pub fn best(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (k, s) in self.scores().into_iter().enumerate() {
            if best.map_or(true, |(_, b)| s > b) {
                best = Some((self.lo + k + 1, s));
            }
        }
        best
    }
}

/// Forward and backward accumulators over ranks `[lo, hi)`, using the global
/// link count and degrees: each step adds a node's links into the growing
/// block over `L` and the increase of the block's squared degree sum over
/// `(2L)²`.
pub fn split_profile(rk: &Ranking, g: &Graph, lo: usize, hi: usize) -> SplitProfile {
    let len = hi - lo;
    let two_l = 2.0 * g.num_edges() as f64;
    let l = g.num_edges() as f64;
    let mut p = vec![0.0; len];
    let mut q = vec![0.0; len];
    if len == 0 || two_l == 0.0 {
        return SplitProfile { lo, p, q };
    }
    let mut d_f = 0.0;
    let mut acc = 0.0;
    for k in 0..len {
        let pos = lo + k;
        let v = rk.order[pos];
        let d = g.degree(v) as f64;
        let back = g
            .neighbors(v)
            .iter()
            .filter(|&&u| (lo..pos).contains(&rk.rank[u]))
            .count() as f64;
        acc += back / l - (2.0 * d * d_f + d * d) / (two_l * two_l);
        d_f += d;
        p[k] = acc;
    }
    let mut d_b = 0.0;
    let mut acc = 0.0;
    for k in (0..len).rev() {
        let pos = lo + k;
        let v = rk.order[pos];
        let d = g.degree(v) as f64;
        let ahead = g
            .neighbors(v)
            .iter()
            .filter(|&&u| (pos + 1..hi).contains(&rk.rank[u]))
            .count() as f64;
        acc += ahead / l - (2.0 * d * d_b + d * d) / (two_l * two_l);
        d_b += d;
        q[k] = acc;
    }
    SplitProfile { lo, p, q }
}

fn estimate_segment(rk: &Ranking, g: &Graph, lo: usize, hi: usize, theta: f64) -> Vec<usize> {
    if hi - lo < 2 {
        return Vec::new();
    }
    let profile = split_profile(rk, g, lo, hi);
    let Some((r, score)) = profile.best() else {
        return Vec::new();
    };
    if !(score > theta) {
        return Vec::new();
    }
    let k = r - lo;
    let (left_theta, right_theta) = (profile.p[k - 1], profile.q[k]);
    let (mut left, right) = rayon::join(
        || estimate_segment(rk, g, lo, r, left_theta),
        || estimate_segment(rk, g, r, hi, right_theta),
    );
    left.push(r);
    left.extend(right);
    left
}

/// Recursive modularity bisection of the ranking. A segment is split at its
/// best border only when the two halves together score strictly more than
/// the threshold, which for sub-segments is their own score as one cluster.
pub fn estimate_clusters(rk: &Ranking, g: &Graph, theta_m: f64) -> BorderSet {
    BorderSet {
        borders: estimate_segment(rk, g, 0, rk.n(), theta_m),
        n: rk.n(),
    }
}

fn split_to_depth(rk: &Ranking, g: &Graph, lo: usize, hi: usize, depth: usize) -> Vec<usize> {
    if depth == 0 || hi - lo < 2 {
        return Vec::new();
    }
    let Some((r, _)) = split_profile(rk, g, lo, hi).best() else {
        return Vec::new();
    };
    let (mut left, right) = rayon::join(
        || split_to_depth(rk, g, lo, r, depth - 1),
        || split_to_depth(rk, g, r, hi, depth - 1),
    );
    left.push(r);
    left.extend(right);
    left
}

/// Recursion levels used for a known cluster count: `ceil(log2 c) + 1`.
pub fn fixed_depth(c: usize) -> usize {
    c.max(1).next_power_of_two().trailing_zeros() as usize + 1
}

/// Bisects every segment at its best border, negative or not, for
/// [`fixed_depth`]`(c)` levels.
pub fn estimate_clusters_fixed(rk: &Ranking, g: &Graph, c: usize) -> BorderSet {
    BorderSet {
        borders: split_to_depth(rk, g, 0, rk.n(), fixed_depth(c)),
        n: rk.n(),
    }
}

/// Aggregated modularity matrix over contiguous segments.
#[derive(Debug, Clone, PartialEq)]
pub struct MergeState {
    /// `m[g][h] = Σ_{i∈g, j∈h} (Â − d̂d̂ᵀ/2L)_ij`.
    pub m: Vec<Vec<f64>>,
    /// Rank ranges, in order.
    pub segments: Vec<(usize, usize)>,
}

impl MergeState {
    pub fn new(bs: &BorderSet, rk: &Ranking, g: &Graph) -> MergeState {
        let segments = bs.segments();
        let k = segments.len();
        let mut seg_of_rank = vec![0; rk.n()];
        for (s, &(lo, hi)) in segments.iter().enumerate() {
            seg_of_rank[lo..hi].iter_mut().for_each(|x| *x = s);
        }
        let mut m = vec![vec![0.0; k]; k];
        let mut vol = vec![0.0; k];
        for v in 0..g.n() {
            let sv = seg_of_rank[rk.rank[v]];
            vol[sv] += g.degree(v) as f64;
            for &u in g.neighbors(v) {
                m[sv][seg_of_rank[rk.rank[u]]] += 1.0;
            }
        }
        let two_l = 2.0 * g.num_edges() as f64;
        if two_l > 0.0 {
            for a in 0..k {
                for b in 0..k {
                    m[a][b] -= vol[a] * vol[b] / two_l;
                }
            }
        }
        MergeState { m, segments }
    }

    /// `μ_g = m[g][g+1]`.
    pub fn mu(&self) -> Vec<f64> {
        (0..self.m.len().saturating_sub(1))
            .map(|g| self.m[g][g + 1])
            .collect()
    }

    /// Merges the adjacent pair with the largest `μ` (first on ties) and
    /// returns the index of its left segment.
    pub fn merge_once(&mut self) -> Option<usize> {
        let mu = self.mu();
        let (g, _) = mu
            .iter()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (g, &v)| match best {
                Some((_, b)) if v <= b => best,
                _ => Some((g, v)),
            })?;
        for row in self.m.iter_mut() {
            row[g] += row[g + 1];
            row.remove(g + 1);
        }
        let absorbed = self.m.remove(g + 1);
        self.m[g].iter_mut().zip(&absorbed).for_each(|(a, b)| *a += b);
        let (_, hi) = self.segments.remove(g + 1);
        self.segments[g].1 = hi;
        Some(g)
    }

    pub fn borders(&self) -> Vec<usize> {
        self.segments.iter().skip(1).map(|&(lo, _)| lo).collect()
    }
}

/// Merges adjacent segments until `c` remain.
pub fn merge_to_c(bs: &BorderSet, rk: &Ranking, g: &Graph, c: usize) -> Result<Partition> {
    if c == 0 || bs.num_segments() < c {
        return Err(Error::InsufficientSegments {
            segments: bs.num_segments(),
            c,
        });
    }
    let mut state = MergeState::new(bs, rk, g);
    while state.segments.len() > c {
        state.merge_once();
    }
    Ok(BorderSet {
        borders: state.borders(),
        n: bs.n,
    }
    .to_partition(rk))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Recurse while modularity improves.
    Auto,
    /// Return exactly this many clusters.
    FixedC(usize),
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub beta2: f64,
    pub beta3: f64,
    pub modularity: f64,
    pub num_clusters: usize,
    /// Clusters containing a node with links.
    pub communities: usize,
    /// Nodes without links, handled outside the spectral step.
    pub isolated: usize,
    /// Every power iteration hit its tolerance.
    pub converged: bool,
    /// Ranking of the non-isolated nodes, in original node ids.
    pub order: Vec<usize>,
}

/// End-to-end clustering: link scaling, ranking by `y2`, then recursive
/// bisection (auto) or depth-limited bisection plus merging (fixed `c`).
///
/// Nodes without links are clustered separately: each becomes its own
/// cluster in auto mode and joins the largest cluster in fixed-`c` mode.
pub fn lcp_pipeline(g: &Graph, p: &LcpParams, mode: Mode) -> Result<(Partition, Diagnostics)> {
    if g.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    if let Mode::FixedC(0) = mode {
        return Err(Error::InvalidParameter("cluster count must be positive".into()));
    }
    let core: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) > 0).collect();
    let isolated = g.n() - core.len();
    let sub = g.induced_subgraph(&core);
    let run = run_scaled_lcp(&sub, p)?;
    let rk = rank_nodes(&run.summary.y2);
    let sub_partition = match mode {
        Mode::Auto => estimate_clusters(&rk, &sub, 0.0).to_partition(&rk),
        Mode::FixedC(c) => merge_to_c(&estimate_clusters_fixed(&rk, &sub, c), &rk, &sub, c)?,
    };

    let mut labels = vec![usize::MAX; g.n()];
    for (k, &v) in core.iter().enumerate() {
        labels[v] = sub_partition.cluster_of(k);
    }
    let mut next = sub_partition.num_clusters();
    let largest = (0..sub_partition.num_clusters())
        .max_by_key(|&c| (sub_partition.sizes()[c], std::cmp::Reverse(c)))
        .unwrap_or(0);
    for l in labels.iter_mut().filter(|l| **l == usize::MAX) {
        *l = match mode {
            Mode::Auto => {
                next += 1;
                next - 1
            }
            Mode::FixedC(_) => largest,
        };
    }
    let partition = Partition::from_assignment(labels)?;
    let diagnostics = Diagnostics {
        beta2: run.summary.beta2,
        beta3: run.summary.beta3,
        modularity: modularity(g, &partition)?,
        num_clusters: partition.num_clusters(),
        communities: sub_partition.num_clusters(),
        isolated,
        converged: run.summary.converged && run.history.iter().all(|s| s.converged),
        order: rk.order.iter().map(|&k| core[k]).collect(),
    };
    Ok((partition, diagnostics))
}
