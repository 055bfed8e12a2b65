//! Structure-aware predicates and count vectors.
//!
//! Training subgraph instances are grouped by structural digest. Each
//! group fits one "master" tree over the orbit-aware feature vectors of
//! its instances, grown once to the leaf cap. A predicate is a pair
//! `(digest, state)` where the state is a leaf of the group's master
//! pruned to a per-group leaf budget; a graph's feature vector counts how
//! many of its subgraph instances land on each predicate.
//!
//! Masters are fitted exactly once at build time. Changing the leaf
//! budgets only re-reads the precomputed lookup tables, so a search over
//! budgets never refits anything — the space is immutable after
//! construction.

use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::collections::BTreeMap;

use crate::hashing::StructHash;
use crate::tree::{build_lookup_table, fit_tree, DecisionTree, LookupTable};

thread_local! {
    /// Per-thread count of master-tree fits. Budget evaluation must never
    /// move it: any refit after construction is a bug.
    static MASTER_FITS: Cell<usize> = const { Cell::new(0) };
}

pub fn master_fit_count() -> usize {
    MASTER_FITS.with(Cell::get)
}

/// A predicate identity: structural digest plus master-leaf state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PredicateKey {
    pub hash: StructHash,
    pub state: u32,
}

/// One digest's instances: the master tree over their feature vectors and
/// the precomputed per-budget leaf states of every training instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashGroup {
    pub hash: StructHash,
    pub master: DecisionTree,
    pub lookup: LookupTable,
    /// Graph index owning each instance row, aligned with `lookup`.
    pub instance_graph: Vec<usize>,
    /// Leaf count of the fully grown master; budgets clamp to this.
    pub max_lambda: usize,
}

/// Immutable predicate space over a set of training graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateSpace {
    /// Groups in ascending digest order.
    pub groups: Vec<HashGroup>,
    pub n_graphs: usize,
}

/// Per-group leaf budgets; values clamp to `[1, group.max_lambda]`.
pub type Genome = Vec<usize>;

impl PredicateSpace {
    /// Fits one master per digest. `instances` maps each digest to its
    /// training instances as `(graph index, feature vector)`; labels are
    /// the owning graphs' class labels. A positive `master_ccp_alpha`
    /// cost-complexity-prunes each master once after growth.
    pub fn build(
        instances: &BTreeMap<StructHash, Vec<(usize, Vec<f64>)>>,
        labels: &[usize],
        n_classes: usize,
        master_max_leaves: usize,
        master_ccp_alpha: f64,
    ) -> PredicateSpace {
        let groups = instances
            .iter()
            .map(|(&hash, rows)| {
                let x: Vec<Vec<f64>> = rows.iter().map(|(_, z)| z.clone()).collect();
                let y: Vec<usize> = rows.iter().map(|&(g, _)| labels[g]).collect();
                MASTER_FITS.with(|c| c.set(c.get() + 1));
                let mut master = fit_tree(&x, &y, n_classes, master_max_leaves, None);
                if master_ccp_alpha > 0.0 {
                    master = master.ccp_pruned(master_ccp_alpha);
                }
                let lookup = build_lookup_table(&master, &x);
                HashGroup {
                    hash,
                    max_lambda: master.n_leaves(),
                    master,
                    lookup,
                    instance_graph: rows.iter().map(|&(g, _)| g).collect(),
                }
            })
            .collect();
        PredicateSpace {
            groups,
            n_graphs: labels.len(),
        }
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Effective budgets: genome values clamped per group.
    pub fn effective_lambdas(&self, genome: &Genome) -> Vec<usize> {
        assert_eq!(genome.len(), self.groups.len());
        genome
            .iter()
            .zip(&self.groups)
            .map(|(&l, g)| l.clamp(1, g.max_lambda))
            .collect()
    }

    /// Predicate identities under a genome, in vocabulary order
    /// (ascending digest, then ascending state).
    pub fn vocabulary(&self, genome: &Genome) -> Vec<PredicateKey> {
        self.effective_lambdas(genome)
            .iter()
            .zip(&self.groups)
            .flat_map(|(&lambda, g)| {
                (0..lambda as u32).map(move |state| PredicateKey { hash: g.hash, state })
            })
            .collect()
    }

    /// Count matrix of the training graphs under a genome: one row per
    /// graph, one column per vocabulary predicate. Pure table reads.
    pub fn count_matrix(&self, genome: &Genome) -> Vec<Vec<f64>> {
        let lambdas = self.effective_lambdas(genome);
        let width: usize = lambdas.iter().sum();
        let mut rows = vec![vec![0.0f64; width]; self.n_graphs];
        let mut offset = 0;
        for (group, &lambda) in self.groups.iter().zip(&lambdas) {
            let states = &group.lookup.states[lambda - 1];
            for (i, &graph) in group.instance_graph.iter().enumerate() {
                rows[graph][offset + states[i] as usize] += 1.0;
            }
            offset += lambda;
        }
        rows
    }

    /// Group index for a digest, if the digest was seen in training.
    pub fn group_of(&self, hash: StructHash) -> Option<usize> {
        self.groups.binary_search_by_key(&hash, |g| g.hash).ok()
    }

    /// Count vector for an unseen graph given its instances as
    /// `(digest, feature vector)`. Instances with unknown digests are
    /// dropped (no predicate can describe them).
    pub fn count_vector(&self, instances: &[(StructHash, Vec<f64>)], genome: &Genome) -> Vec<f64> {
        let lambdas = self.effective_lambdas(genome);
        let offsets: Vec<usize> = lambdas
            .iter()
            .scan(0, |acc, &l| {
                let o = *acc;
                *acc += l;
                Some(o)
            })
            .collect();
        let mut row = vec![0.0f64; lambdas.iter().sum()];
        for (hash, z) in instances {
            if let Some(gi) = self.group_of(*hash) {
                let state = self.groups[gi].master.leaf_state(z, lambdas[gi]);
                row[offsets[gi] + state as usize] += 1.0;
            }
        }
        row
    }
}

/// Presence ablation: clip every count to 0/1.
pub fn binarize(matrix: &mut [Vec<f64>]) {
    for row in matrix {
        for v in row {
            *v = if *v > 0.0 { 1.0 } else { 0.0 };
        }
    }
}
