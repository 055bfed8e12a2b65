//! Deterministic synthetic benchmark generators: Barabási–Albert bases
//! with planted motifs, for graph- and node-level tasks.
//!
//! Construction constants not fixed by the target statistics (base sizes,
//! attachment parameter, perturbation count) are documented on each
//! generator. Motifs keep a fixed anchor node for their single bridge
//! edge, so the neighborhoods of the non-anchor motif nodes are identical
//! across instances.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{stratified_split_indices, FeatureSchema, Graph, GraphDataset, NodeTask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MotifKind {
    House,
    FiveCycle,
    Grid3x3,
    Wheel,
}

pub const ALL_MOTIFS: [MotifKind; 4] = [
    MotifKind::House,
    MotifKind::FiveCycle,
    MotifKind::Grid3x3,
    MotifKind::Wheel,
];

/// The isolated motif graph. Node 0 is the bridge anchor.
pub fn motif(kind: MotifKind) -> Graph {
    match kind {
        // 0,1 bottom; 2,3 middle; 4 top.
        MotifKind::House => Graph::plain(
            5,
            &[(0, 1), (0, 2), (1, 3), (2, 3), (2, 4), (3, 4)],
        ),
        MotifKind::FiveCycle => Graph::plain(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
        // Row-major 3x3 lattice; node 0 is a corner, node 4 the center.
        MotifKind::Grid3x3 => {
            let mut edges = Vec::new();
            for r in 0..3 {
                for c in 0..3 {
                    let i = r * 3 + c;
                    if c < 2 {
                        edges.push((i, i + 1));
                    }
                    if r < 2 {
                        edges.push((i, i + 3));
                    }
                }
            }
            Graph::plain(9, &edges)
        }
        // Rim cycle 0..4 plus hub 5.
        MotifKind::Wheel => Graph::plain(
            6,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (1, 5), (2, 5), (3, 5), (4, 5)],
        ),
    }
}

/// Barabási–Albert preferential attachment. `m = 1` grows a tree from a
/// single node; `m >= 2` starts from a complete graph on `m` nodes and
/// attaches each new node to `m` distinct degree-proportional targets.
pub fn ba_edges(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    assert!(m >= 1 && n > m);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // Node appears once per incident edge; uniform draws are then
    // degree-proportional.
    let mut endpoints: Vec<usize> = Vec::new();
    let start = if m == 1 {
        1
    } else {
        for i in 0..m {
            for j in (i + 1)..m {
                edges.push((i, j));
                endpoints.push(i);
                endpoints.push(j);
            }
        }
        m
    };
    for v in start..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = if endpoints.is_empty() {
                0
            } else {
                endpoints[rng.gen_range(0..endpoints.len())]
            };
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            edges.push((t.min(v), t.max(v)));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    edges
}

/// Appends each motif as a node block bridged from its anchor (local
/// node 0) to the given base node. Returns the local-0 offsets.
pub fn plant_motifs(g: &mut Graph, motifs: &[(MotifKind, usize)]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(motifs.len());
    for &(kind, base_target) in motifs {
        let block = motif(kind);
        let offset = g.node_count;
        offsets.push(offset);
        g.node_count += block.node_count;
        g.node_discrete.extend(vec![vec![0]; block.node_count]);
        g.node_continuous.extend(vec![Vec::new(); block.node_count]);
        for &(u, v) in &block.edges {
            g.add_edge(offset + u, offset + v);
        }
        g.add_edge(base_target, offset);
    }
    offsets
}

/// Replaces node features by the degree capped at 5 (arity-6 schema).
pub fn apply_capped_degree_features(g: &mut Graph) {
    let deg = g.degrees();
    for (v, d) in deg.into_iter().enumerate() {
        g.node_discrete[v] = vec![(d.min(5)) as u32];
    }
}

pub fn capped_degree_schema() -> FeatureSchema {
    FeatureSchema {
        discrete_arities: vec![6],
        continuous_count: 0,
        edge_arity: None,
    }
}

/// 1000 graphs: 20-node BA tree base plus one bridged motif — a house
/// (class 0) or a five-cycle (class 1), alternating for an exact 500/500
/// balance. Constant node features.
pub fn gen_ba2motifs(seed: u64) -> GraphDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs = Vec::with_capacity(1000);
    let mut labels = Vec::with_capacity(1000);
    for i in 0..1000 {
        let base_n = 20;
        let mut g = Graph::plain(base_n, &ba_edges(base_n, 1, &mut rng));
        let kind = if i % 2 == 0 {
            MotifKind::House
        } else {
            MotifKind::FiveCycle
        };
        let target = rng.gen_range(0..base_n);
        plant_motifs(&mut g, &[(kind, target)]);
        graphs.push(g);
        labels.push(i % 2);
    }
    GraphDataset {
        graphs,
        labels,
        schema: FeatureSchema::constant(),
        name: "ba2motifs".into(),
    }
}

/// 1000 40-node graphs: BA tree base sized so the total is always 40,
/// plus bridged motifs. Class 1 plants exactly two distinct motifs from
/// {house, grid, wheel}; class 0 plants zero or one. Node features are
/// capped degrees. Also returns each graph's planted motif set.
pub fn gen_bamultishapes_with_motifs(seed: u64) -> (GraphDataset, Vec<Vec<MotifKind>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let singles = [MotifKind::House, MotifKind::Grid3x3, MotifKind::Wheel];
    let pairs = [
        [MotifKind::House, MotifKind::Grid3x3],
        [MotifKind::House, MotifKind::Wheel],
        [MotifKind::Grid3x3, MotifKind::Wheel],
    ];
    let mut graphs = Vec::with_capacity(1000);
    let mut labels = Vec::with_capacity(1000);
    let mut planted: Vec<Vec<MotifKind>> = Vec::with_capacity(1000);
    for i in 0..1000 {
        let kinds: Vec<MotifKind> = if i % 2 == 0 {
            // Class 0: empty or a single motif, uniformly.
            match rng.gen_range(0..4) {
                0 => Vec::new(),
                k => vec![singles[k - 1]],
            }
        } else {
            pairs[rng.gen_range(0..3)].to_vec()
        };
        let motif_nodes: usize = kinds.iter().map(|&k| motif(k).node_count).sum();
        let base_n = 40 - motif_nodes;
        let mut g = Graph::plain(base_n, &ba_edges(base_n, 1, &mut rng));
        let placements: Vec<(MotifKind, usize)> = kinds
            .iter()
            .map(|&k| (k, rng.gen_range(0..base_n)))
            .collect();
        plant_motifs(&mut g, &placements);
        apply_capped_degree_features(&mut g);
        graphs.push(g);
        labels.push(i % 2);
        planted.push(kinds);
    }
    (
        GraphDataset {
            graphs,
            labels,
            schema: capped_degree_schema(),
            name: "bamultishapes".into(),
        },
        planted,
    )
}

pub fn gen_bamultishapes(seed: u64) -> GraphDataset {
    gen_bamultishapes_with_motifs(seed).0
}

/// Node task: 300-node BA base (m = 5) with 80 bridged houses and 70
/// random base–base perturbation edges. Labels: 0 base, 1 house top,
/// 2 house middle, 3 house bottom. Perturbation edges stay inside the
/// base so house neighborhoods are never distorted.
pub fn gen_bashapes(seed: u64) -> NodeTask {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base_n = 300;
    let mut g = Graph::plain(base_n, &ba_edges(base_n, 5, &mut rng));
    let placements: Vec<(MotifKind, usize)> = (0..80)
        .map(|_| (MotifKind::House, rng.gen_range(0..base_n)))
        .collect();
    let offsets = plant_motifs(&mut g, &placements);
    let mut added = 0;
    while added < 70 {
        let u = rng.gen_range(0..base_n);
        let v = rng.gen_range(0..base_n);
        if u != v && g.add_edge(u, v) {
            added += 1;
        }
    }
    let mut node_labels = vec![0usize; g.node_count];
    for &o in &offsets {
        // House layout: 0,1 bottom; 2,3 middle; 4 top.
        node_labels[o] = 3;
        node_labels[o + 1] = 3;
        node_labels[o + 2] = 2;
        node_labels[o + 3] = 2;
        node_labels[o + 4] = 1;
    }
    let (train_mask, test_mask) = stratified_split_indices(&node_labels, 0.8, seed).unwrap();
    NodeTask {
        graph: g,
        node_labels,
        train_mask,
        test_mask,
        schema: FeatureSchema::constant(),
        name: "bashapes".into(),
    }
}

/// Node task: balanced binary tree of height 8 (511 nodes) with 80
/// bridged 3x3 grids. Labels: 0 tree, 1 grid corner, 2 grid edge,
/// 3 grid center. Bridges attach only to distinct tree leaves, keeping
/// every grid node's 2-hop neighborhood identical across instances.
pub fn gen_treegrid(seed: u64) -> NodeTask {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree_n = 511;
    let edges: Vec<(usize, usize)> = (1..tree_n).map(|v| ((v - 1) / 2, v)).collect();
    let mut g = Graph::plain(tree_n, &edges);
    // Leaves of the complete tree are the last 256 nodes.
    let mut leaves: Vec<usize> = (255..511).collect();
    for i in (1..leaves.len()).rev() {
        let j = rng.gen_range(0..=i);
        leaves.swap(i, j);
    }
    let placements: Vec<(MotifKind, usize)> = leaves[..80]
        .iter()
        .map(|&leaf| (MotifKind::Grid3x3, leaf))
        .collect();
    let offsets = plant_motifs(&mut g, &placements);
    let mut node_labels = vec![0usize; g.node_count];
    for &o in &offsets {
        for i in 0..9 {
            // Row-major 3x3: corners at 0,2,6,8; center at 4.
            node_labels[o + i] = match i {
                0 | 2 | 6 | 8 => 1,
                4 => 3,
                _ => 2,
            };
        }
    }
    let (train_mask, test_mask) = stratified_split_indices(&node_labels, 0.8, seed).unwrap();
    NodeTask {
        graph: g,
        node_labels,
        train_mask,
        test_mask,
        schema: FeatureSchema::constant(),
        name: "treegrid".into(),
    }
}
