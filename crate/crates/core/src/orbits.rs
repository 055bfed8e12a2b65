//! Orbit decomposition of rooted subgraphs and orbit-aware feature
//! encoding.
//!
//! Nodes of a rooted subgraph are grouped into orbits of interchangeable
//! nodes (per the configured hashing back end), orbits are put into a
//! deterministic order, and per-orbit feature summaries are concatenated
//! into a fixed-layout vector. Two subgraphs with the same structural
//! digest always produce the same layout, so vectors of equal-hash
//! subgraphs are comparable position by position.

use serde::{Deserialize, Serialize};

use crate::graph::{FeatureSchema, Graph};
use crate::hashing::{node_signatures, HashConfig};

/// Node orbits of a rooted subgraph, in a deterministic order, plus the
/// edge orbits connecting them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDecomposition {
    /// Node orbits; each orbit lists local node indices in ascending order.
    pub node_orbits: Vec<Vec<usize>>,
    /// Edge orbits keyed by the ordered pair of node-orbit ranks of their
    /// endpoints, ascending; each entry is `(rank_a, rank_b, edge_count)`.
    pub edge_orbits: Vec<(usize, usize, usize)>,
    /// Indices into `node_orbits` that survive the redundancy filter and
    /// carry feature summaries of their own.
    pub kept_node_orbits: Vec<usize>,
}

/// Groups nodes by signature, orders the groups by signature bytes, and
/// drops node orbits whose nodes are all covered by edge-orbit endpoints.
pub fn orbit_decomposition(g: &Graph, root: usize, config: &HashConfig) -> OrbitDecomposition {
    let sigs = node_signatures(g, root, config);
    // Group nodes by signature; order groups lexicographically.
    let mut order: Vec<usize> = (0..g.node_count).collect();
    order.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]).then(a.cmp(&b)));
    let mut node_orbits: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match node_orbits.last_mut() {
            Some(last) if sigs[*last.first().unwrap()] == sigs[v] => last.push(v),
            _ => node_orbits.push(vec![v]),
        }
    }
    for orbit in &mut node_orbits {
        orbit.sort_unstable();
    }
    let rank_of: Vec<usize> = {
        let mut r = vec![0usize; g.node_count];
        for (rank, orbit) in node_orbits.iter().enumerate() {
            for &v in orbit {
                r[v] = rank;
            }
        }
        r
    };
    // Edge orbits: edges grouped by the rank pair of their endpoints.
    let mut pairs: Vec<(usize, usize)> = g
        .edges
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (rank_of[u].min(rank_of[v]), rank_of[u].max(rank_of[v]));
            (a, b)
        })
        .collect();
    pairs.sort_unstable();
    let mut edge_orbits: Vec<(usize, usize, usize)> = Vec::new();
    for (a, b) in pairs {
        match edge_orbits.last_mut() {
            Some(&mut (la, lb, ref mut c)) if la == a && lb == b => *c += 1,
            _ => edge_orbits.push((a, b, 1)),
        }
    }
    // A node orbit is redundant when every one of its nodes is an endpoint
    // of some edge orbit; its membership is then implied by the edge side.
    let mut covered = vec![false; node_orbits.len()];
    for &(a, b, _) in &edge_orbits {
        covered[a] = true;
        covered[b] = true;
    }
    let kept_node_orbits: Vec<usize> = (0..node_orbits.len()).filter(|&i| !covered[i]).collect();
    OrbitDecomposition {
        node_orbits,
        edge_orbits,
        kept_node_orbits,
    }
}

/// Per-orbit feature summary width under a schema: one histogram slot per
/// category of each discrete column plus one mean per continuous column.
fn orbit_summary_width(schema: &FeatureSchema) -> usize {
    schema.discrete_arities.iter().map(|&a| a as usize).sum::<usize>()
        + schema.continuous_count
}

fn push_orbit_summary(out: &mut Vec<f64>, g: &Graph, members: &[usize], schema: &FeatureSchema) {
    for (c, &arity) in schema.discrete_arities.iter().enumerate() {
        let mut hist = vec![0.0f64; arity as usize];
        for &v in members {
            let val = g.node_discrete[v][c] as usize;
            if val < hist.len() {
                hist[val] += 1.0;
            }
        }
        out.extend_from_slice(&hist);
    }
    for c in 0..schema.continuous_count {
        let sum: f64 = members.iter().map(|&v| g.node_continuous[v][c]).sum();
        out.push(sum / members.len() as f64);
    }
}

/// Orbit-aware feature vector of a rooted subgraph.
///
/// Layout, fully determined by the decomposition (hence by the structural
/// digest): for every node orbit in order, its size; then, for kept node
/// orbits only, the feature summary; then for every edge orbit in order,
/// its multiplicity and the feature summaries of both endpoint orbits.
pub fn orbit_feature_vector(
    g: &Graph,
    decomposition: &OrbitDecomposition,
    schema: &FeatureSchema,
) -> Vec<f64> {
    let mut out = Vec::new();
    for orbit in &decomposition.node_orbits {
        out.push(orbit.len() as f64);
    }
    for &i in &decomposition.kept_node_orbits {
        push_orbit_summary(&mut out, g, &decomposition.node_orbits[i], schema);
    }
    for &(a, b, count) in &decomposition.edge_orbits {
        out.push(count as f64);
        push_orbit_summary(&mut out, g, &decomposition.node_orbits[a], schema);
        push_orbit_summary(&mut out, g, &decomposition.node_orbits[b], schema);
    }
    out
}

/// Expected length of [`orbit_feature_vector`] for a decomposition, used
/// to assert the layout-is-a-function-of-the-hash invariant.
pub fn orbit_vector_len(decomposition: &OrbitDecomposition, schema: &FeatureSchema) -> usize {
    let w = orbit_summary_width(schema);
    decomposition.node_orbits.len()
        + decomposition.kept_node_orbits.len() * w
        + decomposition.edge_orbits.len() * (1 + 2 * w)
}

/// Hop-distance (shell) feature vector: nodes grouped by distance from
/// the root instead of by orbit. The coarser baseline encoding.
pub fn hop_distance_feature_vector(g: &Graph, root: usize, schema: &FeatureSchema) -> Vec<f64> {
    let adj = g.adjacency();
    let mut dist = vec![usize::MAX; g.node_count];
    dist[root] = 0;
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &(w, _) in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    let max_d = dist.iter().copied().filter(|&d| d != usize::MAX).max().unwrap_or(0);
    let mut out = Vec::new();
    for d in 0..=max_d {
        let shell: Vec<usize> = (0..g.node_count).filter(|&v| dist[v] == d).collect();
        out.push(shell.len() as f64);
        push_orbit_summary(&mut out, g, &shell, schema);
    }
    out
}
