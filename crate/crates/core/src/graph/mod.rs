//! Undirected simple graphs in compressed sparse row form, node partitions,
//! and the modularity quality function.
//!
//! Node ids are 0-based. Every undirected link `(i, j)` with `i < j` has a
//! stable link id (its index in [`Graph::edges`]) and occupies two slots in
//! the CSR arrays, one in each endpoint's row. Per-link and per-slot data
//! elsewhere in the crate is indexed by these ids.

mod io;
mod ssbm;

pub use io::{
    parse_edge_list, parse_partition, read_edge_list, read_partition, write_edge_list,
    write_partition,
};
pub use ssbm::{detectability_margin, expected_degree, generate_ssbm, Detectability, SsbmConfig};

use crate::error::{Error, Result};
use std::ops::Range;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    slot_edge: Vec<usize>,
    edges: Vec<(usize, usize)>,
    degree: Vec<usize>,
}

impl Graph {
    /// Builds a graph on `n` nodes. Pairs may be given in either orientation.
    pub fn from_edges<I>(n: usize, pairs: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if j >= n {
                return Err(Error::InvalidNode { node: j, n });
            }
            edges.push((i, j));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_edges(n, edges))
    }

    fn from_sorted_edges(n: usize, edges: Vec<(usize, usize)>) -> Graph {
        let mut degree = vec![0usize; n];
        for &(i, j) in &edges {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0usize; 2 * edges.len()];
        let mut slot_edge = vec![0usize; 2 * edges.len()];
        // Fill every row's smaller neighbours first (ascending), then its
        // larger neighbours (ascending), so rows come out sorted.
        let mut by_second: Vec<usize> = (0..edges.len()).collect();
        by_second.sort_by_key(|&e| (edges[e].1, edges[e].0));
        for &e in &by_second {
            let (i, j) = edges[e];
            neighbors[cursor[j]] = i;
            slot_edge[cursor[j]] = e;
            cursor[j] += 1;
        }
        for (e, &(i, j)) in edges.iter().enumerate() {
            neighbors[cursor[i]] = j;
            slot_edge[cursor[i]] = e;
            cursor[i] += 1;
        }
        debug_assert!((0..n).all(|v| neighbors[offsets[v]..offsets[v + 1]]
            .windows(2)
            .all(|w| w[0] < w[1])));
        Graph {
            n,
            offsets,
            neighbors,
            slot_edge,
            edges,
            degree,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected links `L`.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Links as `(i, j)` with `i < j`, sorted; the index is the link id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degree[i]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    /// Sorted neighbour list of `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    /// CSR slot range of row `i`.
    pub fn slots(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Total number of CSR slots (`2L`).
    pub fn num_slots(&self) -> usize {
        self.neighbors.len()
    }

    pub fn slot_target(&self, slot: usize) -> usize {
        self.neighbors[slot]
    }

    /// Link id stored at a CSR slot.
    pub fn slot_edge(&self, slot: usize) -> usize {
        self.slot_edge[slot]
    }

    /// Slot of `j` in row `i`, if the nodes are adjacent.
    pub fn find_slot(&self, i: usize, j: usize) -> Option<usize> {
        self.neighbors(i)
            .binary_search(&j)
            .ok()
            .map(|k| self.offsets[i] + k)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.find_slot(i, j).is_some()
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.degree.iter().copied().min().unwrap_or(0)
    }

    pub fn isolated_nodes(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.degree[i] == 0).collect()
    }

    /// Connected components, numbered in order of their smallest node.
    pub fn connected_components(&self) -> Partition {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &u in self.neighbors(v) {
                    if label[u] == usize::MAX {
                        label[u] = next;
                        stack.push(u);
                    }
                }
            }
            next += 1;
        }
        Partition::from_labels(&label)
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::InvalidNode { node: i, n: self.n });
        }
        Ok(())
    }

    /// `|N_i ∩ N_j|`, the number of common neighbours, by merging the two
    /// sorted neighbour lists.
    pub fn common_neighbors(&self, i: usize, j: usize) -> Result<usize> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(Error::InvalidParameter(format!(
                "common_neighbors needs distinct nodes, got ({i}, {i})"
            )));
        }
        Ok(sorted_intersection_len(self.neighbors(i), self.neighbors(j)))
    }

    /// Number of triangles, counting each unordered triple once.
    pub fn triangle_count(&self) -> usize {
        let mut count = 0;
        for &(i, j) in &self.edges {
            // Only neighbours above j, so each triangle i < j < k is seen once.
            let ni = self.neighbors(i);
            let nj = self.neighbors(j);
            let ni = &ni[ni.partition_point(|&k| k <= j)..];
            let nj = &nj[nj.partition_point(|&k| k <= j)..];
            count += sorted_intersection_len(ni, nj);
        }
        count
    }

    /// Subgraph induced by `nodes` (given in ascending order); node `k` of
    /// the result is `nodes[k]`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n];
        for (k, &v) in nodes.iter().enumerate() {
            local[v] = k;
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter_map(|&(i, j)| {
                let (a, b) = (local[i], local[j]);
                (a != usize::MAX && b != usize::MAX).then(|| if a < b { (a, b) } else { (b, a) })
            })
            .collect();
        edges.sort_unstable();
        Self::from_sorted_edges(nodes.len(), edges)
    }
}

pub(crate) fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut x, mut y, mut count) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                x += 1;
                y += 1;
            }
        }
    }
    count
}

/// Node-to-cluster assignment with dense cluster ids `0..c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    sizes: Vec<usize>,
}

impl Partition {
    /// Relabels arbitrary labels densely, in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Partition {
        let mut map = std::collections::HashMap::new();
        let mut sizes = Vec::new();
        let assignment = labels
            .iter()
            .map(|&l| {
                let next = map.len();
                let id = *map.entry(l).or_insert(next);
                if id == sizes.len() {
                    sizes.push(0);
                }
                sizes[id] += 1;
                id
            })
            .collect();
        Partition { assignment, sizes }
    }

    /// Takes ids as given; they must already be dense.
    pub fn from_assignment(assignment: Vec<usize>) -> Result<Partition> {
        let c = assignment.iter().max().map_or(0, |&m| m + 1);
        let mut sizes = vec![0usize; c];
        for &a in &assignment {
            sizes[a] += 1;
        }
        if let Some(missing) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidParameter(format!(
                "cluster id {missing} is unused; ids must be dense"
            )));
        }
        Ok(Partition { assignment, sizes })
    }

    pub fn single(n: usize) -> Partition {
        Partition {
            assignment: vec![0; n],
            sizes: if n > 0 { vec![n] } else { vec![] },
        }
    }

    pub fn singletons(n: usize) -> Partition {
        Partition {
            assignment: (0..n).collect(),
            sizes: vec![1; n],
        }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Cluster count `c`.
    pub fn num_clusters(&self) -> usize {
        self.sizes.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Member lists per cluster, ascending node ids.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.sizes.len()];
        for (v, &a) in self.assignment.iter().enumerate() {
            out[a].push(v);
        }
        out
    }
}

/// Clusters of `p` holding at least one node with links; isolated
/// singletons do not count.
pub fn community_count(g: &Graph, p: &Partition) -> Result<usize> {
    if p.n() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: p.n(),
        });
    }
    let mut seen = vec![false; p.num_clusters()];
    for v in (0..g.n()).filter(|&v| g.degree(v) > 0) {
        seen[p.cluster_of(v)] = true;
    }
    Ok(seen.iter().filter(|&&s| s).count())
}

/// Newman–Girvan modularity of `p` on `g`.
///
/// Evaluated per cluster as `(2·intra_links − D_c²/2L) / 2L`, where `D_c` is
/// the degree sum of cluster `c`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    if p.n() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: p.n(),
        });
    }
    if g.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let two_l = 2.0 * g.num_edges() as f64;
    let c = p.num_clusters();
    let mut intra = vec![0usize; c];
    let mut dsum = vec![0usize; c];
    for &(i, j) in g.edges() {
        if p.cluster_of(i) == p.cluster_of(j) {
            intra[p.cluster_of(i)] += 1;
        }
    }
    for v in 0..g.n() {
        dsum[p.cluster_of(v)] += g.degree(v);
    }
    let m = (0..c)
        .map(|k| 2.0 * intra[k] as f64 - (dsum[k] as f64).powi(2) / two_l)
        .sum::<f64>()
        / two_l;
    Ok(m)
}
