//! Structural hashing of rooted subgraphs.
//!
//! Two interchangeable back ends produce a 128-bit digest for a rooted,
//! attributed subgraph:
//!
//! * `Wl` — color refinement run to stability. Fast and permutation
//!   invariant, but pairs of non-isomorphic inputs can collide.
//! * `Canonical` — exact canonical labeling by individualization and
//!   refinement, so two subgraphs share a digest iff they are isomorphic
//!   (as rooted attributed graphs). Falls back to the refinement digest
//!   when the subgraph exceeds `canonical_size_limit` nodes.
//!
//! All byte strings fed to the digest are assembled from explicit
//! little-endian encodings, so digests are stable across platforms.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph::Graph;

/// Hashing back end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HashMode {
    Wl,
    Canonical,
}

/// Hashing configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashConfig {
    pub mode: HashMode,
    /// Nodes above which `Canonical` falls back to the refinement digest.
    pub canonical_size_limit: usize,
}

impl Default for HashConfig {
    fn default() -> Self {
        HashConfig {
            mode: HashMode::Canonical,
            canonical_size_limit: 16,
        }
    }
}

/// 128-bit structural digest of a rooted subgraph.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct StructHash(pub u128);

impl std::fmt::Display for StructHash {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

fn digest128(bytes: &[u8]) -> u128 {
    let out = Sha256::digest(bytes);
    u128::from_le_bytes(out[..16].try_into().unwrap())
}

fn push_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn push_u128(buf: &mut Vec<u8>, v: u128) {
    buf.extend_from_slice(&v.to_le_bytes());
}

/// Isomorphism-invariant starting colors. `marks[v]` lets callers
/// individualize nodes (the root, or a probe node) before refinement.
fn initial_colors(g: &Graph, marks: &[u32]) -> Vec<u128> {
    (0..g.node_count)
        .map(|v| {
            let mut buf = Vec::new();
            push_u32(&mut buf, marks[v]);
            push_u32(&mut buf, g.node_discrete[v].len() as u32);
            for &d in &g.node_discrete[v] {
                push_u32(&mut buf, d);
            }
            push_u32(&mut buf, g.node_continuous[v].len() as u32);
            for &x in &g.node_continuous[v] {
                buf.extend_from_slice(&x.to_bits().to_le_bytes());
            }
            digest128(&buf)
        })
        .collect()
}

fn refine_step(adj: &[Vec<(usize, Option<u32>)>], colors: &[u128]) -> Vec<u128> {
    (0..colors.len())
        .map(|v| {
            let mut neigh: Vec<(u32, u128)> = adj[v]
                .iter()
                .map(|&(w, lab)| (lab.map_or(0, |l| l + 1), colors[w]))
                .collect();
            neigh.sort_unstable();
            let mut buf = Vec::new();
            push_u128(&mut buf, colors[v]);
            push_u32(&mut buf, neigh.len() as u32);
            for (lab, c) in neigh {
                push_u32(&mut buf, lab);
                push_u128(&mut buf, c);
            }
            digest128(&buf)
        })
        .collect()
}

/// Normalized partition id: node -> index of the first node sharing its color.
fn partition_of(colors: &[u128]) -> Vec<usize> {
    colors
        .iter()
        .map(|c| colors.iter().position(|d| d == c).unwrap())
        .collect()
}

/// Color refinement run until the induced partition stops changing.
/// Returned colors are equal on two nodes iff refinement cannot tell
/// them apart, and are isomorphism-invariant digests.
pub fn stable_colors(g: &Graph, marks: &[u32]) -> Vec<u128> {
    let adj = g.adjacency();
    stable_colors_from_adj(g, marks, &adj)
}

fn stable_colors_from_adj(
    g: &Graph,
    marks: &[u32],
    adj: &[Vec<(usize, Option<u32>)>],
) -> Vec<u128> {
    let mut colors = initial_colors(g, marks);
    let mut part = partition_of(&colors);
    for _ in 0..=g.node_count {
        let next = refine_step(adj, &colors);
        let next_part = partition_of(&next);
        if next_part == part {
            return colors;
        }
        colors = next;
        part = next_part;
    }
    colors
}

/// Refinement digest of a marked graph: stable colors plus the quotient
/// structure (class sizes and labeled edge counts between classes), so
/// equal digests force equal quotient layouts.
fn wl_encoding(g: &Graph, marks: &[u32]) -> Vec<u8> {
    let colors = stable_colors(g, marks);
    let mut sorted = colors.clone();
    sorted.sort_unstable();
    let mut buf = b"wl".to_vec();
    push_u32(&mut buf, g.node_count as u32);
    push_u32(&mut buf, g.edge_count() as u32);
    for c in &sorted {
        push_u128(&mut buf, *c);
    }
    let mut quotient: Vec<(u128, u128, u32)> = g
        .edges
        .iter()
        .enumerate()
        .map(|(i, &(u, v))| {
            let (a, b) = (colors[u].min(colors[v]), colors[u].max(colors[v]));
            (a, b, g.edge_labels.as_ref().map_or(0, |l| l[i] + 1))
        })
        .collect();
    quotient.sort_unstable();
    for (a, b, lab) in quotient {
        push_u128(&mut buf, a);
        push_u128(&mut buf, b);
        push_u32(&mut buf, lab);
    }
    buf
}

/// Full adjacency matrix with labels: `None` = no edge, `Some(l+1)` where
/// `l` is the edge label (or `Some(0)` for unlabeled datasets).
fn labeled_matrix(g: &Graph) -> Vec<Vec<Option<u32>>> {
    let mut m = vec![vec![None; g.node_count]; g.node_count];
    for (i, &(u, v)) in g.edges.iter().enumerate() {
        let lab = g.edge_labels.as_ref().map_or(0, |l| l[i] + 1);
        m[u][v] = Some(lab);
        m[v][u] = Some(lab);
    }
    m
}

struct CanonSearch<'a> {
    g: &'a Graph,
    adj: Vec<Vec<(usize, Option<u32>)>>,
    matrix: Vec<Vec<Option<u32>>>,
    marks: &'a [u32],
    best: Option<Vec<u8>>,
}

impl<'a> CanonSearch<'a> {
    /// Whether the transposition of `u` and `w` is an automorphism of the
    /// marked attributed graph. Used to prune branch candidates that are
    /// provably interchangeable (e.g. the leaves of a star).
    fn swap_is_automorphism(&self, u: usize, w: usize) -> bool {
        if self.marks[u] != self.marks[w]
            || self.g.node_discrete[u] != self.g.node_discrete[w]
            || self.g.node_continuous[u] != self.g.node_continuous[w]
        {
            return false;
        }
        let tau = |x: usize| {
            if x == u {
                w
            } else if x == w {
                u
            } else {
                x
            }
        };
        for x in 0..self.g.node_count {
            if self.matrix[u][x] != self.matrix[w][tau(x)] {
                return false;
            }
        }
        true
    }

    /// Positional encoding of the labeling that sorts nodes by `colors`
    /// (all colors distinct at this point).
    fn leaf_encoding(&self, colors: &[u128]) -> Vec<u8> {
        let n = self.g.node_count;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_unstable_by_key(|&v| colors[v]);
        let mut buf = Vec::new();
        push_u32(&mut buf, n as u32);
        for &v in &order {
            push_u32(&mut buf, self.marks[v]);
            push_u32(&mut buf, self.g.node_discrete[v].len() as u32);
            for &d in &self.g.node_discrete[v] {
                push_u32(&mut buf, d);
            }
            push_u32(&mut buf, self.g.node_continuous[v].len() as u32);
            for &x in &self.g.node_continuous[v] {
                buf.extend_from_slice(&x.to_bits().to_le_bytes());
            }
        }
        // Fixed-position upper triangle so byte order defines a total
        // order on labelings.
        for i in 0..n {
            for j in (i + 1)..n {
                push_u32(&mut buf, self.matrix[order[i]][order[j]].map_or(0, |l| l + 1));
            }
        }
        buf
    }

    fn recurse(&mut self, colors: Vec<u128>, depth: u32) {
        // First non-singleton cell in color order.
        let mut target: Option<(u128, Vec<usize>)> = None;
        let mut sorted: Vec<(u128, usize)> =
            colors.iter().enumerate().map(|(v, &c)| (c, v)).collect();
        sorted.sort_unstable();
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i + 1;
            while j < sorted.len() && sorted[j].0 == sorted[i].0 {
                j += 1;
            }
            if j - i > 1 {
                target = Some((sorted[i].0, sorted[i..j].iter().map(|&(_, v)| v).collect()));
                break;
            }
            i = j;
        }
        let Some((_, cell)) = target else {
            let enc = self.leaf_encoding(&colors);
            if self.best.as_ref().map_or(true, |b| enc < *b) {
                self.best = Some(enc);
            }
            return;
        };
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if tried.iter().any(|&u| self.swap_is_automorphism(u, v)) {
                continue;
            }
            tried.push(v);
            let mut next = colors.clone();
            let mut buf = Vec::new();
            push_u128(&mut buf, next[v]);
            push_u32(&mut buf, depth);
            buf.extend_from_slice(b"individualize");
            next[v] = digest128(&buf);
            // Re-refine around the individualized node.
            let mut part = partition_of(&next);
            for _ in 0..=self.g.node_count {
                let refined = refine_step(&self.adj, &next);
                let refined_part = partition_of(&refined);
                if refined_part == part {
                    break;
                }
                next = refined;
                part = refined_part;
            }
            self.recurse(next, depth + 1);
        }
    }
}

/// Canonical byte form of a marked attributed graph: identical for two
/// graphs iff they are isomorphic respecting marks, features and edge
/// labels. Exponential in the worst case; intended for small subgraphs.
pub fn canonical_form(g: &Graph, marks: &[u32]) -> Vec<u8> {
    assert_eq!(marks.len(), g.node_count);
    let colors = stable_colors(g, marks);
    let mut search = CanonSearch {
        g,
        adj: g.adjacency(),
        matrix: labeled_matrix(g),
        marks,
        best: None,
    };
    search.recurse(colors, 0);
    let mut out = b"canon".to_vec();
    out.extend_from_slice(&search.best.unwrap());
    out
}

fn root_marks(node_count: usize, root: usize) -> Vec<u32> {
    let mut marks = vec![0u32; node_count];
    marks[root] = 1;
    marks
}

/// Digest of the subgraph rooted at `root` under the configured back end.
pub fn subgraph_hash(g: &Graph, root: usize, config: &HashConfig) -> StructHash {
    let marks = root_marks(g.node_count, root);
    let bytes = match config.mode {
        HashMode::Canonical if g.node_count <= config.canonical_size_limit => {
            canonical_form(g, &marks)
        }
        _ => wl_encoding(g, &marks),
    };
    StructHash(digest128(&bytes))
}

/// Per-node signature bytes inside the subgraph rooted at `root`: two
/// nodes receive equal signatures iff the back end considers them
/// interchangeable under root-preserving symmetry.
pub fn node_signatures(g: &Graph, root: usize, config: &HashConfig) -> Vec<Vec<u8>> {
    let marks = root_marks(g.node_count, root);
    match config.mode {
        HashMode::Canonical if g.node_count <= config.canonical_size_limit => (0..g.node_count)
            .map(|v| {
                let mut m = marks.clone();
                m[v] += 2;
                canonical_form(g, &m)
            })
            .collect(),
        _ => {
            let colors = stable_colors(g, &marks);
            colors.iter().map(|c| c.to_le_bytes().to_vec()).collect()
        }
    }
}
