//! Graph data model: attributed undirected graphs, datasets, ego subgraphs
//! and stratified splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::DataError;

/// Feature layout shared by every graph in a dataset.
///
/// `discrete_arities[c]` is the number of categories of discrete column `c`;
/// `edge_arity` is present when the dataset carries edge labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub discrete_arities: Vec<u32>,
    pub continuous_count: usize,
    pub edge_arity: Option<u32>,
}

impl FeatureSchema {
    pub fn constant() -> Self {
        FeatureSchema {
            discrete_arities: vec![1],
            continuous_count: 0,
            edge_arity: None,
        }
    }
}

/// Undirected attributed graph. Edges are stored once with `u < v`; no
/// self-loops or duplicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub node_count: usize,
    pub edges: Vec<(usize, usize)>,
    /// Per-node categorical features, one row per node.
    pub node_discrete: Vec<Vec<u32>>,
    /// Per-node real-valued features, one row per node.
    pub node_continuous: Vec<Vec<f64>>,
    /// Per-edge categorical label, aligned with `edges`.
    pub edge_labels: Option<Vec<u32>>,
}

impl Graph {
    /// Builds a featureless graph (one constant discrete column).
    pub fn plain(node_count: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph {
            node_count,
            edges: Vec::new(),
            node_discrete: vec![vec![0]; node_count],
            node_continuous: vec![Vec::new(); node_count],
            edge_labels: None,
        };
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Adds an undirected edge if it is not already present. Self-loops are
    /// ignored. Returns true when the edge was inserted.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u < self.node_count && v < self.node_count, "edge endpoint out of range");
        if u == v {
            return false;
        }
        let e = (u.min(v), u.max(v));
        if self.edges.contains(&e) {
            return false;
        }
        self.edges.push(e);
        true
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbor lists with the label of the connecting edge.
    pub fn adjacency(&self) -> Vec<Vec<(usize, Option<u32>)>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            let lab = self.edge_labels.as_ref().map(|l| l[i]);
            adj[u].push((v, lab));
            adj[v].push((u, lab));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.node_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Applies a node permutation: node `i` of the result is node `perm[i]`
    /// of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.node_count);
        let mut inv = vec![0usize; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut pairs: Vec<(usize, usize, Option<u32>)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| {
                let (a, b) = (inv[u].min(inv[v]), inv[u].max(inv[v]));
                (a, b, self.edge_labels.as_ref().map(|l| l[i]))
            })
            .collect();
        pairs.sort_unstable();
        Graph {
            node_count: self.node_count,
            edges: pairs.iter().map(|&(a, b, _)| (a, b)).collect(),
            node_discrete: perm.iter().map(|&o| self.node_discrete[o].clone()).collect(),
            node_continuous: perm.iter().map(|&o| self.node_continuous[o].clone()).collect(),
            edge_labels: self
                .edge_labels
                .as_ref()
                .map(|_| pairs.iter().map(|&(_, _, l)| l.unwrap()).collect()),
        }
    }

    /// Ego subgraph: induced subgraph on all nodes within `hops` of `root`.
    pub fn ego_subgraph(&self, root: usize, hops: usize) -> Subgraph {
        self.ego_subgraph_from_adj(root, hops, &self.adjacency())
    }

    /// Same as [`ego_subgraph`](Self::ego_subgraph) with a precomputed
    /// adjacency, for callers extracting many egos from one graph.
    pub fn ego_subgraph_from_adj(
        &self,
        root: usize,
        hops: usize,
        adj: &[Vec<(usize, Option<u32>)>],
    ) -> Subgraph {
        assert!(hops >= 1, "hops must be >= 1");
        assert!(root < self.node_count, "root out of range");
        let mut dist = vec![usize::MAX; self.node_count];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        let mut members = vec![root];
        while let Some(u) = queue.pop_front() {
            if dist[u] == hops {
                continue;
            }
            for &(w, _) in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        // Root first, the rest in ascending parent order.
        let mut rest: Vec<usize> = members.iter().copied().filter(|&u| u != root).collect();
        rest.sort_unstable();
        let mut parent_nodes = vec![root];
        parent_nodes.extend(rest);
        let mut local = vec![usize::MAX; self.node_count];
        for (i, &p) in parent_nodes.iter().enumerate() {
            local[p] = i;
        }
        let mut pairs: Vec<(usize, usize, Option<u32>)> = Vec::new();
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if local[u] != usize::MAX && local[v] != usize::MAX {
                let (a, b) = (local[u].min(local[v]), local[u].max(local[v]));
                pairs.push((a, b, self.edge_labels.as_ref().map(|l| l[i])));
            }
        }
        pairs.sort_unstable();
        let graph = Graph {
            node_count: parent_nodes.len(),
            edges: pairs.iter().map(|&(a, b, _)| (a, b)).collect(),
            node_discrete: parent_nodes.iter().map(|&p| self.node_discrete[p].clone()).collect(),
            node_continuous: parent_nodes
                .iter()
                .map(|&p| self.node_continuous[p].clone())
                .collect(),
            edge_labels: self
                .edge_labels
                .as_ref()
                .map(|_| pairs.iter().map(|&(_, _, l)| l.unwrap()).collect()),
        };
        Subgraph {
            parent_nodes,
            graph,
            root: 0,
        }
    }
}

/// Induced rooted subgraph, re-indexed so the root is local index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subgraph {
    pub parent_nodes: Vec<usize>,
    pub graph: Graph,
    pub root: usize,
}

/// A labeled collection of graphs sharing one feature schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDataset {
    pub graphs: Vec<Graph>,
    pub labels: Vec<usize>,
    pub schema: FeatureSchema,
    pub name: String,
}

impl GraphDataset {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Dataset restricted to the given graph indices, preserving order.
    pub fn subset(&self, indices: &[usize], name: &str) -> GraphDataset {
        GraphDataset {
            graphs: indices.iter().map(|&i| self.graphs[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            schema: self.schema.clone(),
            name: name.to_string(),
        }
    }
}

/// Single-graph node classification task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTask {
    pub graph: Graph,
    pub node_labels: Vec<usize>,
    pub train_mask: Vec<usize>,
    pub test_mask: Vec<usize>,
    pub schema: FeatureSchema,
    pub name: String,
}

/// Stratified index partition; deterministic given the seed.
pub fn stratified_split_indices(
    labels: &[usize],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), DataError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DataError::Invalid(format!(
            "train_fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let class_count = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); class_count];
    for (i, &y) in labels.iter().enumerate() {
        per_class[y].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for members in &mut per_class {
        if members.len() < 2 {
            return Err(DataError::Invalid(format!(
                "a class with {} member(s) cannot be stratified",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        let mut n_train = (train_fraction * members.len() as f64).round() as usize;
        n_train = n_train.clamp(1, members.len() - 1);
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Stratified train/test split of a dataset.
pub fn split_dataset(
    data: &GraphDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(GraphDataset, GraphDataset), DataError> {
    let (train_idx, test_idx) = stratified_split_indices(&data.labels, train_fraction, seed)?;
    Ok((
        data.subset(&train_idx, &format!("{}-train", data.name)),
        data.subset(&test_idx, &format!("{}-test", data.name)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ego_of_path_middle() {
        let g = Graph::plain(3, &[(0, 1), (1, 2)]);
        let s = g.ego_subgraph(1, 1);
        assert_eq!(s.graph.node_count, 3);
        assert_eq!(s.graph.edge_count(), 2);
        assert_eq!(s.parent_nodes, vec![1, 0, 2]);
        assert_eq!(s.root, 0);
    }

    #[test]
    fn ego_of_isolated_node() {
        let g = Graph::plain(2, &[]);
        let s = g.ego_subgraph(0, 2);
        assert_eq!(s.graph.node_count, 1);
        assert_eq!(s.graph.edge_count(), 0);
    }

    #[test]
    fn ego_on_six_cycle_is_rooted_path() {
        let g = Graph::plain(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        for v in 0..6 {
            let s = g.ego_subgraph(v, 1);
            assert_eq!(s.graph.node_count, 3);
            assert_eq!(s.graph.edge_count(), 2);
            // The root is the middle of the path: degree 2.
            let deg = s.graph.degrees();
            assert_eq!(deg[0], 2);
        }
    }

    #[test]
    fn split_is_deterministic_and_exact() {
        let labels: Vec<usize> = (0..1000).map(|i| i % 2).collect();
        let (a1, b1) = stratified_split_indices(&labels, 0.8, 0).unwrap();
        let (a2, b2) = stratified_split_indices(&labels, 0.8, 0).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
        assert_eq!(a1.len(), 800);
        assert_eq!(b1.len(), 200);
        let mut all: Vec<usize> = a1.iter().chain(b1.iter()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());
        let c0 = a1.iter().filter(|&&i| labels[i] == 0).count();
        assert!((c0 as i64 - 400).abs() <= 1);
    }

    #[test]
    fn split_small_balanced() {
        let labels = vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let (tr, te) = stratified_split_indices(&labels, 0.8, 7).unwrap();
        assert_eq!(tr.len(), 8);
        assert_eq!(te.len(), 2);
        assert_eq!(tr.iter().filter(|&&i| labels[i] == 0).count(), 4);
        assert_eq!(te.iter().filter(|&&i| labels[i] == 0).count(), 1);
    }

    #[test]
    fn split_rejects_singleton_class() {
        let labels = vec![0, 0, 1];
        assert!(stratified_split_indices(&labels, 0.8, 0).is_err());
    }

    #[test]
    fn permuted_preserves_structure() {
        let g = Graph::plain(4, &[(0, 1), (1, 2), (2, 3)]);
        let p = g.permuted(&[3, 1, 0, 2]);
        assert_eq!(p.node_count, 4);
        assert_eq!(p.edge_count(), 3);
        let mut degs = p.degrees();
        degs.sort_unstable();
        assert_eq!(degs, vec![1, 1, 2, 2]);
    }
}
