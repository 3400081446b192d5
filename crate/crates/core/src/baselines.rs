//! Reference community detectors and cluster-count estimators.

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::lcp::hadamard_a_a2;
use crate::numerics::{dense_nonsym_eigs, dense_sym_eigs, DENSE_CAP};
use nalgebra::{Complex, DMatrix};

const GAIN_EPS: f64 = 1e-12;

/// Weighted graph with self-loops, as produced by Louvain aggregation.
/// `loops[i]` is the diagonal entry `A_ii`, counted once in the degree.
#[derive(Debug, Clone)]
struct WeightedGraph {
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
}

impl WeightedGraph {
    fn from_graph(g: &Graph) -> Self {
        WeightedGraph {
            adj: (0..g.n())
                .map(|i| g.neighbors(i).iter().map(|&j| (j, 1.0)).collect())
                .collect(),
            loops: vec![0.0; g.n()],
        }
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    fn strength(&self, i: usize) -> f64 {
        self.loops[i] + self.adj[i].iter().map(|&(_, w)| w).sum::<f64>()
    }

    fn modularity(&self, comm: &[usize]) -> f64 {
        let k: Vec<f64> = (0..self.n()).map(|i| self.strength(i)).collect();
        let m2: f64 = k.iter().sum();
        let c = comm.iter().max().map_or(0, |&x| x + 1);
        let mut inner = vec![0.0; c];
        let mut tot = vec![0.0; c];
        for i in 0..self.n() {
            tot[comm[i]] += k[i];
            inner[comm[i]] += self.loops[i];
            for &(j, w) in &self.adj[i] {
                if comm[j] == comm[i] {
                    inner[comm[i]] += w;
                }
            }
        }
        (0..c).map(|a| inner[a] / m2 - (tot[a] / m2).powi(2)).sum()
    }

    /// Collapses each community into one node.
    fn aggregate(&self, comm: &[usize], c: usize) -> WeightedGraph {
        let mut loops = vec![0.0; c];
        let mut rows: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); c];
        for i in 0..self.n() {
            let a = comm[i];
            loops[a] += self.loops[i];
            for &(j, w) in &self.adj[i] {
                let b = comm[j];
                if a == b {
                    loops[a] += w;
                } else {
                    *rows[a].entry(b).or_insert(0.0) += w;
                }
            }
        }
        WeightedGraph {
            adj: rows.into_iter().map(|r| r.into_iter().collect()).collect(),
            loops,
        }
    }
}

/// Relabels community ids to `0..c` by first appearance.
fn compact(comm: &mut [usize]) -> usize {
    let mut map = vec![usize::MAX; comm.len()];
    let mut next = 0;
    for x in comm.iter_mut() {
        if map[*x] == usize::MAX {
            map[*x] = next;
            next += 1;
        }
        *x = map[*x];
    }
    next
}

/// Local moving phase. Returns whether any node changed community.
fn move_nodes(wg: &WeightedGraph, comm: &mut [usize]) -> bool {
    let n = wg.n();
    let k: Vec<f64> = (0..n).map(|i| wg.strength(i)).collect();
    let m2: f64 = k.iter().sum();
    let mut tot = vec![0.0; n];
    for i in 0..n {
        tot[comm[i]] += k[i];
    }
    let mut link_to = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut any_move = false;
    loop {
        let mut moved = false;
        for i in 0..n {
            let own = comm[i];
            for &(j, w) in &wg.adj[i] {
                let c = comm[j];
                if link_to[c] == 0.0 && !touched.contains(&c) {
                    touched.push(c);
                }
                link_to[c] += w;
            }
            tot[own] -= k[i];
            // Gain of inserting the detached node into community c, in units
            // of 2/m2 times modularity.
            let gain = |c: usize, link: f64| link - tot[c] * k[i] / m2;
            let own_gain = gain(own, link_to[own]);
            let mut best = (own, own_gain);
            for &c in &touched {
                let gc = gain(c, link_to[c]);
                if 2.0 * (gc - best.1) / m2 > GAIN_EPS {
                    best = (c, gc);
                }
            }
            tot[best.0] += k[i];
            if best.0 != own {
                comm[i] = best.0;
                moved = true;
            }
            for &c in &touched {
                link_to[c] = 0.0;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
        any_move = true;
    }
    any_move
}

#[derive(Debug, Clone)]
pub struct LouvainResult {
    pub partition: Partition,
    /// Modularity after each aggregation level.
    pub trace: Vec<f64>,
}

/// Louvain modularity maximization with deterministic node order
/// (ascending id, full passes until stable).
pub fn louvain_with_trace(g: &Graph) -> Result<LouvainResult> {
    if g.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut wg = WeightedGraph::from_graph(g);
    let mut node_comm: Vec<usize> = (0..g.n()).collect();
    let mut trace = vec![wg.modularity(&(0..g.n()).collect::<Vec<_>>())];
    loop {
        let mut comm: Vec<usize> = (0..wg.n()).collect();
        if !move_nodes(&wg, &mut comm) {
            break;
        }
        let c = compact(&mut comm);
        for x in node_comm.iter_mut() {
            *x = comm[*x];
        }
        let m = wg.modularity(&comm);
        let previous = *trace.last().expect("trace is non-empty");
        trace.push(m);
        wg = wg.aggregate(&comm, c);
        if m - previous < GAIN_EPS {
            break;
        }
    }
    Ok(LouvainResult {
        partition: Partition::from_labels(&node_comm),
        trace,
    })
}

pub fn louvain(g: &Graph) -> Result<Partition> {
    Ok(louvain_with_trace(g)?.partition)
}

/// Generalized modularity matrix of a group: `B_ij − δ_ij Σ_{k∈group} B_ik`.
fn group_modularity_matrix(g: &Graph, group: &[usize]) -> DMatrix<f64> {
    let two_l = 2.0 * g.num_edges() as f64;
    let s = group.len();
    let mut b = DMatrix::from_fn(s, s, |a, c| {
        let (i, j) = (group[a], group[c]);
        let aij = if g.has_edge(i, j) { 1.0 } else { 0.0 };
        aij - g.degree(i) as f64 * g.degree(j) as f64 / two_l
    });
    for a in 0..s {
        let row: f64 = b.row(a).sum();
        b[(a, a)] -= row;
    }
    b
}

/// Recursive spectral bisection: each group is split by the sign pattern of
/// the leading eigenvector of its generalized modularity matrix, and the
/// split is kept only if it raises modularity.
pub fn newman_spectral(g: &Graph) -> Result<Partition> {
    if g.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.n() > DENSE_CAP {
        return Err(Error::TooLarge {
            n: g.n(),
            cap: DENSE_CAP,
        });
    }
    let two_l = 2.0 * g.num_edges() as f64;
    let mut done: Vec<Vec<usize>> = Vec::new();
    let mut pending = vec![(0..g.n()).collect::<Vec<_>>()];
    while let Some(group) = pending.pop() {
        if group.len() < 2 {
            done.push(group);
            continue;
        }
        let b = group_modularity_matrix(g, &group);
        let eig = dense_sym_eigs(&b)?;
        if eig.values[0] <= GAIN_EPS {
            done.push(group);
            continue;
        }
        let lead = eig.vectors.column(0);
        let s: Vec<f64> = lead.iter().map(|&v| if v > 0.0 { 1.0 } else { -1.0 }).collect();
        let sv = nalgebra::DVector::from_vec(s.clone());
        let gain = (sv.transpose() * &b * &sv)[(0, 0)] / (2.0 * two_l);
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for (&v, &si) in group.iter().zip(&s) {
            if si > 0.0 {
                left.push(v);
            } else {
                right.push(v);
            }
        }
        if gain > GAIN_EPS && !left.is_empty() && !right.is_empty() {
            pending.push(right);
            pending.push(left);
        } else {
            done.push(group);
        }
    }
    let mut labels = vec![0; g.n()];
    done.sort();
    for (c, group) in done.iter().enumerate() {
        for &v in group {
            labels[v] = c;
        }
    }
    Ok(Partition::from_labels(&labels))
}

/// Spectrum of a `2n × 2n` companion matrix and the count of eigenvalues
/// beyond `sqrt(λ1)`.
#[derive(Debug, Clone)]
pub struct NbtSpectrum {
    pub values: Vec<Complex<f64>>,
    /// Largest real eigenvalue.
    pub lambda1: f64,
    pub radius: f64,
    pub count: usize,
}

fn is_real(z: &Complex<f64>) -> bool {
    z.im.abs() <= 1e-6 * z.re.abs().max(1.0)
}

fn largest_real(values: &[Complex<f64>]) -> f64 {
    values
        .iter()
        .filter(|z| is_real(z))
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `[[top_left, −(Δ − I)], [I, O]]`.
fn companion(g: &Graph, top_left: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.n();
    if 2 * n > DENSE_CAP {
        return Err(Error::TooLarge {
            n: 2 * n,
            cap: DENSE_CAP,
        });
    }
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&top_left);
    for i in 0..n {
        m[(i, n + i)] = 1.0 - g.degree(i) as f64;
        m[(n + i, i)] = 1.0;
    }
    Ok(m)
}

fn adjacency(g: &Graph) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(g.n(), g.n());
    for &(i, j) in g.edges() {
        a[(i, j)] = 1.0;
        a[(j, i)] = 1.0;
    }
    a
}

/// Spectrum of `B* = [[A, I − Δ], [I, O]]`; `count` takes the real
/// eigenvalues above `sqrt(λ1)`.
pub fn nbt_spectrum(g: &Graph) -> Result<NbtSpectrum> {
    let values = dense_nonsym_eigs(&companion(g, adjacency(g))?)?;
    let lambda1 = largest_real(&values);
    let radius = lambda1.max(0.0).sqrt();
    let count = values
        .iter()
        .filter(|z| is_real(z) && z.re > radius + 1e-9)
        .count();
    Ok(NbtSpectrum {
        values,
        lambda1,
        radius,
        count,
    })
}

pub fn nbt_cluster_count(g: &Graph) -> Result<usize> {
    Ok(nbt_spectrum(g)?.count)
}

/// Spectrum of `W* = [[I + α(H − diag(Hu)) + (Δ − I), −(Δ − I)], [I, O]]`
/// with `H = A ∘ A² + A`; `count` takes every eigenvalue, real or not,
/// whose real part exceeds `sqrt(λ1)`.
pub fn lcp_c_spectrum(g: &Graph, alpha: f64) -> Result<NbtSpectrum> {
    let n = g.n();
    let walks = hadamard_a_a2(g);
    let mut top = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut row = 0.0;
        for s in g.slots(i) {
            let h = walks.per_slot[s] as f64 + 1.0;
            top[(i, g.slot_target(s))] = alpha * h;
            row += h;
        }
        top[(i, i)] = 1.0 - alpha * row + (g.degree(i) as f64 - 1.0);
    }
    let values = dense_nonsym_eigs(&companion(g, top)?)?;
    let lambda1 = largest_real(&values);
    let radius = lambda1.max(0.0).sqrt();
    let count = values.iter().filter(|z| z.re > radius + 1e-9).count();
    Ok(NbtSpectrum {
        values,
        lambda1,
        radius,
        count,
    })
}

pub fn lcp_c_count(g: &Graph, alpha: f64) -> Result<usize> {
    Ok(lcp_c_spectrum(g, alpha)?.count)
}
