//! CART-style decision trees grown leaf-wise (best split first), with
//! nested pruning, minimal cost-complexity pruning, per-leaf state lookup
//! tables and a bagged forest.
//!
//! Leaf-wise growth records the order in which nodes were split
//! (`trace_rank`), so the tree restricted to its first `lambda - 1` splits
//! is itself a valid tree with `lambda` leaves. All candidate-state
//! machinery is built on that prefix property: no refitting is needed to
//! evaluate a smaller leaf budget.
//!
//! Every tie is broken deterministically (higher gain, then lower feature
//! index, then lower threshold, then lower node id), so fitting is a pure
//! function of its inputs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;

const NO_CHILD: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// Split feature; `None` for a leaf.
    pub feature: Option<usize>,
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
    /// Class histogram of the training samples reaching this node.
    pub class_counts: Vec<f64>,
    /// Position of this node's split in the growth order, if it was split.
    pub trace_rank: Option<usize>,
}

impl Node {
    fn leaf(class_counts: Vec<f64>) -> Node {
        Node {
            feature: None,
            threshold: 0.0,
            left: NO_CHILD,
            right: NO_CHILD,
            class_counts,
            trace_rank: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.feature.is_none()
    }

    pub fn prediction(&self) -> usize {
        argmax(&self.class_counts)
    }
}

/// Majority class; ties resolve to the lowest class index.
pub fn argmax(counts: &[f64]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_classes: usize,
    pub n_features: usize,
    /// Node ids in the order they were split.
    pub growth_trace: Vec<usize>,
}

fn gini_cost(counts: &[f64]) -> f64 {
    // Unnormalized weighted impurity: n * gini = n - sum c_i^2 / n.
    let n: f64 = counts.iter().sum();
    if n == 0.0 {
        return 0.0;
    }
    n - counts.iter().map(|&c| c * c).sum::<f64>() / n
}

#[derive(Debug, Clone)]
struct CandidateSplit {
    node: usize,
    feature: usize,
    threshold: f64,
    gain: f64,
    left_samples: Vec<usize>,
    right_samples: Vec<usize>,
}

/// Best split of `samples`, or `None` when no split improves impurity.
/// `features` restricts the scan (forest feature subsampling).
fn best_split(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    samples: &[usize],
    features: &[usize],
    node: usize,
) -> Option<CandidateSplit> {
    let mut parent = vec![0.0f64; n_classes];
    for &s in samples {
        parent[y[s]] += 1.0;
    }
    let parent_cost = gini_cost(&parent);
    if parent_cost <= 0.0 {
        return None;
    }
    let mut best: Option<CandidateSplit> = None;
    for &f in features {
        let mut order: Vec<usize> = samples.to_vec();
        order.sort_by(|&a, &b| {
            x[a][f]
                .partial_cmp(&x[b][f])
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut left = vec![0.0f64; n_classes];
        let mut right = parent.clone();
        for i in 0..order.len() - 1 {
            let s = order[i];
            left[y[s]] += 1.0;
            right[y[s]] -= 1.0;
            let (a, b) = (x[order[i]][f], x[order[i + 1]][f]);
            if a == b {
                continue;
            }
            let threshold = a + (b - a) / 2.0;
            // Guard against midpoints collapsing onto a bound.
            if !(threshold > a && threshold <= b) {
                continue;
            }
            let gain = parent_cost - gini_cost(&left) - gini_cost(&right);
            let better = match &best {
                None => gain > 1e-12,
                Some(c) => {
                    gain > c.gain + 1e-12
                        || (gain > c.gain - 1e-12
                            && (f, threshold) < (c.feature, c.threshold)
                            && gain > 1e-12)
                }
            };
            if better {
                best = Some(CandidateSplit {
                    node,
                    feature: f,
                    threshold,
                    gain,
                    left_samples: Vec::new(),
                    right_samples: Vec::new(),
                });
            }
        }
    }
    best.map(|mut c| {
        for &s in samples {
            if x[s][c.feature] <= c.threshold {
                c.left_samples.push(s);
            } else {
                c.right_samples.push(s);
            }
        }
        c
    })
}

fn class_histogram(y: &[usize], n_classes: usize, samples: &[usize]) -> Vec<f64> {
    let mut h = vec![0.0f64; n_classes];
    for &s in samples {
        h[y[s]] += 1.0;
    }
    h
}

/// Grows a tree leaf-wise: at each step the open leaf whose best split has
/// the largest impurity decrease is split, until `max_leaves` is reached
/// or no leaf can be improved.
pub fn fit_tree(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    max_leaves: usize,
    mut feature_picker: Option<(&mut ChaCha8Rng, usize)>,
) -> DecisionTree {
    assert!(max_leaves >= 1);
    assert_eq!(x.len(), y.len());
    let n_features = x.first().map_or(0, Vec::len);
    let all: Vec<usize> = (0..x.len()).collect();
    let mut tree = DecisionTree {
        nodes: vec![Node::leaf(class_histogram(y, n_classes, &all))],
        n_classes,
        n_features,
        growth_trace: Vec::new(),
    };
    if x.is_empty() || n_features == 0 {
        return tree;
    }
    let pick_features = |picker: &mut Option<(&mut ChaCha8Rng, usize)>| -> Vec<usize> {
        match picker {
            Some((rng, mtry)) => {
                let m = (*mtry).min(n_features).max(1);
                let mut chosen: Vec<usize> = Vec::with_capacity(m);
                // Floyd's sampling, then sorted for deterministic scans.
                for j in (n_features - m)..n_features {
                    let t = rng.gen_range(0..=j);
                    if chosen.contains(&t) {
                        chosen.push(j);
                    } else {
                        chosen.push(t);
                    }
                }
                chosen.sort_unstable();
                chosen
            }
            None => (0..n_features).collect(),
        }
    };
    let mut open: Vec<CandidateSplit> = Vec::new();
    let feats = pick_features(&mut feature_picker);
    if let Some(c) = best_split(x, y, n_classes, &all, &feats, 0) {
        open.push(c);
    }
    let mut leaves = 1;
    while leaves < max_leaves && !open.is_empty() {
        // Highest gain; ties to the lowest node id (oldest leaf).
        let mut best_i = 0;
        for i in 1..open.len() {
            let better = open[i].gain > open[best_i].gain + 1e-12
                || (open[i].gain > open[best_i].gain - 1e-12
                    && open[i].node < open[best_i].node);
            if better {
                best_i = i;
            }
        }
        let c = open.swap_remove(best_i);
        let li = tree.nodes.len();
        let ri = li + 1;
        tree.nodes
            .push(Node::leaf(class_histogram(y, n_classes, &c.left_samples)));
        tree.nodes
            .push(Node::leaf(class_histogram(y, n_classes, &c.right_samples)));
        let node = &mut tree.nodes[c.node];
        node.feature = Some(c.feature);
        node.threshold = c.threshold;
        node.left = li;
        node.right = ri;
        node.trace_rank = Some(tree.growth_trace.len());
        tree.growth_trace.push(c.node);
        leaves += 1;
        for (child, samples) in [(li, &c.left_samples), (ri, &c.right_samples)] {
            let feats = pick_features(&mut feature_picker);
            if let Some(cand) = best_split(x, y, n_classes, samples, &feats, child) {
                open.push(cand);
            }
        }
    }
    tree
}

impl DecisionTree {
    pub fn n_leaves(&self) -> usize {
        self.growth_trace.len() + 1
    }

    fn walk(&self, row: &[f64], split_limit: usize) -> usize {
        let mut cur = 0;
        loop {
            let node = &self.nodes[cur];
            match (node.feature, node.trace_rank) {
                (Some(f), Some(rank)) if rank < split_limit => {
                    cur = if row[f] <= node.threshold {
                        node.left
                    } else {
                        node.right
                    };
                }
                _ => return cur,
            }
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> usize {
        self.nodes[self.walk(row, usize::MAX)].prediction()
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<usize> {
        x.iter().map(|r| self.predict_row(r)).collect()
    }

    /// Node ids that act as leaves when only the first `lambda - 1` splits
    /// are applied, ascending. Their positions define the state numbering.
    pub fn leaf_nodes_at(&self, lambda: usize) -> Vec<usize> {
        assert!(lambda >= 1);
        let split_limit = lambda - 1;
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(cur) = stack.pop() {
            let node = &self.nodes[cur];
            match (node.feature, node.trace_rank) {
                (Some(_), Some(rank)) if rank < split_limit => {
                    stack.push(node.right);
                    stack.push(node.left);
                }
                _ => out.push(cur),
            }
        }
        out.sort_unstable();
        out
    }

    /// State (leaf index under the `lambda`-leaf pruned tree) of one row.
    pub fn leaf_state(&self, row: &[f64], lambda: usize) -> u32 {
        let node = self.walk(row, lambda - 1);
        self.leaf_nodes_at(lambda)
            .iter()
            .position(|&n| n == node)
            .expect("walk always lands on an effective leaf") as u32
    }

    /// The tree truncated to its first `lambda - 1` splits.
    pub fn pruned_to_leaves(&self, lambda: usize) -> DecisionTree {
        let split_limit = lambda.max(1) - 1;
        let mut t = self.clone();
        for node in &mut t.nodes {
            if matches!(node.trace_rank, Some(r) if r >= split_limit) {
                node.feature = None;
                node.threshold = 0.0;
                node.left = NO_CHILD;
                node.right = NO_CHILD;
                node.trace_rank = None;
            }
        }
        t.growth_trace.truncate(split_limit);
        t
    }

    /// Minimal cost-complexity pruning: repeatedly collapses the weakest
    /// internal node while its effective alpha is at most `alpha`.
    pub fn ccp_pruned(&self, alpha: f64) -> DecisionTree {
        let mut t = self.clone();
        let total: f64 = t.nodes[0].class_counts.iter().sum();
        if total == 0.0 {
            return t;
        }
        loop {
            // R(node as leaf) and (R(subtree), leaf count) per node.
            let n = t.nodes.len();
            let mut sub_cost = vec![0.0f64; n];
            let mut sub_leaves = vec![0usize; n];
            // Children have larger ids than parents, so reverse order works.
            for i in (0..n).rev() {
                if t.nodes[i].left == NO_CHILD || t.nodes[i].feature.is_none() {
                    let counts = &t.nodes[i].class_counts;
                    let misses = counts.iter().sum::<f64>() - counts[argmax(counts)];
                    sub_cost[i] = misses / total;
                    sub_leaves[i] = 1;
                } else {
                    sub_cost[i] = sub_cost[t.nodes[i].left] + sub_cost[t.nodes[i].right];
                    sub_leaves[i] = sub_leaves[t.nodes[i].left] + sub_leaves[t.nodes[i].right];
                }
            }
            let mut weakest: Option<(f64, usize)> = None;
            let mut stack = vec![0usize];
            let mut reachable = Vec::new();
            while let Some(cur) = stack.pop() {
                reachable.push(cur);
                if t.nodes[cur].feature.is_some() {
                    stack.push(t.nodes[cur].left);
                    stack.push(t.nodes[cur].right);
                }
            }
            for &i in &reachable {
                if t.nodes[i].feature.is_none() {
                    continue;
                }
                let counts = &t.nodes[i].class_counts;
                let leaf_cost = (counts.iter().sum::<f64>() - counts[argmax(counts)]) / total;
                let g = (leaf_cost - sub_cost[i]) / (sub_leaves[i] - 1) as f64;
                let better = match weakest {
                    None => true,
                    Some((wg, wi)) => g < wg - 1e-12 || (g < wg + 1e-12 && i < wi),
                };
                if better {
                    weakest = Some((g, i));
                }
            }
            match weakest {
                Some((g, i)) if g <= alpha + 1e-12 => {
                    t.nodes[i].feature = None;
                    t.nodes[i].threshold = 0.0;
                    t.nodes[i].left = NO_CHILD;
                    t.nodes[i].right = NO_CHILD;
                    t.nodes[i].trace_rank = None;
                }
                _ => break,
            }
        }
        // Rebuild the trace from surviving splits in their original order.
        let mut reachable_splits: Vec<usize> = Vec::new();
        let mut stack = vec![0usize];
        while let Some(cur) = stack.pop() {
            if t.nodes[cur].feature.is_some() {
                reachable_splits.push(cur);
                stack.push(t.nodes[cur].left);
                stack.push(t.nodes[cur].right);
            }
        }
        let mut trace: Vec<(usize, usize)> = reachable_splits
            .iter()
            .map(|&i| (t.nodes[i].trace_rank.unwrap(), i))
            .collect();
        trace.sort_unstable();
        t.growth_trace = trace.iter().map(|&(_, i)| i).collect();
        for (new_rank, &(_, i)) in trace.iter().enumerate() {
            t.nodes[i].trace_rank = Some(new_rank);
        }
        for node in &mut t.nodes {
            if node.feature.is_none() {
                node.trace_rank = None;
            }
        }
        t
    }

    /// Per-feature sum of impurity decreases, normalized to sum to one.
    pub fn feature_importance(&self) -> Vec<f64> {
        let mut imp = vec![0.0f64; self.n_features];
        for node in &self.nodes {
            if let Some(f) = node.feature {
                let gain = gini_cost(&node.class_counts)
                    - gini_cost(&self.nodes[node.left].class_counts)
                    - gini_cost(&self.nodes[node.right].class_counts);
                imp[f] += gain.max(0.0);
            }
        }
        let s: f64 = imp.iter().sum();
        if s > 0.0 {
            for v in &mut imp {
                *v /= s;
            }
        }
        imp
    }

    /// Conditions `(feature, threshold, goes_left)` along the root path to
    /// the leaf numbered `state` under the `lambda`-leaf pruned tree.
    pub fn path_to_state(&self, state: u32, lambda: usize) -> Vec<(usize, f64, bool)> {
        let target = self.leaf_nodes_at(lambda)[state as usize];
        let split_limit = lambda - 1;
        let mut stack: Vec<(usize, Vec<(usize, f64, bool)>)> = vec![(0, Vec::new())];
        while let Some((cur, conds)) = stack.pop() {
            if cur == target {
                return conds;
            }
            let node = &self.nodes[cur];
            if let (Some(f), Some(rank)) = (node.feature, node.trace_rank) {
                if rank < split_limit {
                    let mut l = conds.clone();
                    l.push((f, node.threshold, true));
                    let mut r = conds;
                    r.push((f, node.threshold, false));
                    stack.push((node.right, r));
                    stack.push((node.left, l));
                }
            }
        }
        unreachable!("state {state} not reachable at lambda {lambda}");
    }

    /// Root-to-leaf paths: each entry is the list of conditions
    /// `(feature, threshold, goes_left)` with the leaf's class histogram.
    pub fn extract_paths(&self) -> Vec<(Vec<(usize, f64, bool)>, Vec<f64>)> {
        let mut out = Vec::new();
        let mut stack: Vec<(usize, Vec<(usize, f64, bool)>)> = vec![(0, Vec::new())];
        while let Some((cur, conds)) = stack.pop() {
            let node = &self.nodes[cur];
            match node.feature {
                Some(f) => {
                    let mut l = conds.clone();
                    l.push((f, node.threshold, true));
                    let mut r = conds;
                    r.push((f, node.threshold, false));
                    stack.push((node.right, r));
                    stack.push((node.left, l));
                }
                None => out.push((conds, node.class_counts.clone())),
            }
        }
        out
    }
}

/// Precomputed leaf states: `states[lambda - 1][sample]` is the sample's
/// state under the `lambda`-leaf pruned tree. Lets a search over leaf
/// budgets avoid every refit and every re-walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LookupTable {
    pub states: Vec<Vec<u32>>,
    pub max_lambda: usize,
}

pub fn build_lookup_table(tree: &DecisionTree, x: &[Vec<f64>]) -> LookupTable {
    let max_lambda = tree.n_leaves();
    // Final-tree leaf node of every sample; prefixes are derived from it.
    let finals: Vec<usize> = x.iter().map(|r| tree.walk(r, usize::MAX)).collect();
    // ancestor_at[node][lambda - 1]: effective leaf containing `node`.
    let mut states = Vec::with_capacity(max_lambda);
    for lambda in 1..=max_lambda {
        let leaf_nodes = tree.leaf_nodes_at(lambda);
        // Map every node to its effective-leaf ancestor by walking up is
        // awkward without parent links; instead map each final leaf by
        // replaying the trace cutoff on membership.
        let mut owner = vec![u32::MAX; tree.nodes.len()];
        for (state, &leaf) in leaf_nodes.iter().enumerate() {
            // All descendants of `leaf` belong to this state.
            let mut stack = vec![leaf];
            while let Some(cur) = stack.pop() {
                owner[cur] = state as u32;
                let node = &tree.nodes[cur];
                if node.feature.is_some() {
                    stack.push(node.left);
                    stack.push(node.right);
                }
            }
        }
        states.push(finals.iter().map(|&n| owner[n]).collect());
    }
    LookupTable { states, max_lambda }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
    pub n_classes: usize,
}

/// Bagged forest: bootstrap resampling per tree plus per-split feature
/// subsampling of sqrt(d) features.
pub fn fit_forest(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    n_trees: usize,
    max_leaves: usize,
    seed: u64,
) -> Result<Forest, ModelError> {
    if x.is_empty() {
        return Err(ModelError::Invalid("cannot fit a forest on no samples".into()));
    }
    let n_features = x[0].len();
    let mtry = (n_features as f64).sqrt().ceil() as usize;
    let trees = (0..n_trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (t as u64).wrapping_mul(0x9e3779b97f4a7c15));
            let idx: Vec<usize> = (0..x.len()).map(|_| rng.gen_range(0..x.len())).collect();
            let bx: Vec<Vec<f64>> = idx.iter().map(|&i| x[i].clone()).collect();
            let by: Vec<usize> = idx.iter().map(|&i| y[i]).collect();
            fit_tree(&bx, &by, n_classes, max_leaves, Some((&mut rng, mtry)))
        })
        .collect();
    Ok(Forest { trees, n_classes })
}

impl Forest {
    pub fn predict_row(&self, row: &[f64]) -> usize {
        let mut votes = vec![0.0f64; self.n_classes];
        for t in &self.trees {
            votes[t.predict_row(row)] += 1.0;
        }
        argmax(&votes)
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<usize> {
        x.iter().map(|r| self.predict_row(r)).collect()
    }

    pub fn feature_importance(&self) -> Vec<f64> {
        if self.trees.is_empty() {
            return Vec::new();
        }
        let d = self.trees[0].n_features;
        let mut imp = vec![0.0f64; d];
        for t in &self.trees {
            for (i, v) in t.feature_importance().into_iter().enumerate() {
                imp[i] += v;
            }
        }
        let s: f64 = imp.iter().sum();
        if s > 0.0 {
            for v in &mut imp {
                *v /= s;
            }
        }
        imp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy() -> (Vec<Vec<f64>>, Vec<usize>) {
        // Two features; class = (x0 > 0.5) XOR-free separable corners.
        let x = vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![0.2, 0.4],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.9, 0.6],
        ];
        let y = vec![0, 0, 0, 1, 1, 1];
        (x, y)
    }

    #[test]
    fn fits_separable_data_exactly() {
        let (x, y) = toy();
        let t = fit_tree(&x, &y, 2, 16, None);
        assert_eq!(t.predict(&x), y);
        assert_eq!(t.n_leaves(), 2);
        assert_eq!(t.nodes[0].feature, Some(0));
    }

    #[test]
    fn first_split_matches_brute_force_oracle() {
        let x = vec![
            vec![0.1, 3.0],
            vec![0.4, 1.0],
            vec![0.6, 2.0],
            vec![0.9, 5.0],
            vec![0.3, 4.0],
            vec![0.8, 0.5],
        ];
        let y = vec![0, 0, 1, 1, 0, 1];
        let t = fit_tree(&x, &y, 2, 16, None);
        // Oracle: enumerate all (feature, midpoint) pairs.
        let mut best_gain = f64::NEG_INFINITY;
        for f in 0..2 {
            let mut vals: Vec<f64> = x.iter().map(|r| r[f]).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for w in vals.windows(2) {
                if w[0] == w[1] {
                    continue;
                }
                let thr = (w[0] + w[1]) / 2.0;
                let mut l = vec![0.0; 2];
                let mut r = vec![0.0; 2];
                for (row, &cls) in x.iter().zip(&y) {
                    if row[f] <= thr {
                        l[cls] += 1.0;
                    } else {
                        r[cls] += 1.0;
                    }
                }
                let mut p = vec![0.0; 2];
                for (i, v) in l.iter().enumerate() {
                    p[i] = v + r[i];
                }
                let gain = gini_cost(&p) - gini_cost(&l) - gini_cost(&r);
                if gain > best_gain {
                    best_gain = gain;
                }
            }
        }
        let root = &t.nodes[0];
        let got = gini_cost(&root.class_counts)
            - gini_cost(&t.nodes[root.left].class_counts)
            - gini_cost(&t.nodes[root.right].class_counts);
        assert!((got - best_gain).abs() < 1e-9);
    }

    #[test]
    fn growth_is_deterministic() {
        let (x, y) = toy();
        let a = fit_tree(&x, &y, 2, 16, None);
        let b = fit_tree(&x, &y, 2, 16, None);
        assert_eq!(a, b);
    }

    #[test]
    fn pruned_prefix_equals_refit() {
        // Leaf-wise growth guarantees the lambda-leaf truncation equals
        // the tree grown directly with max_leaves = lambda.
        let x: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 7) as f64, (i % 5) as f64, (i / 8) as f64])
            .collect();
        let y: Vec<usize> = (0..40).map(|i| (i % 7 > 3) as usize + (i % 5 == 2) as usize).collect();
        let full = fit_tree(&x, &y, 3, 12, None);
        for lambda in 1..=full.n_leaves() {
            let direct = fit_tree(&x, &y, 3, lambda, None);
            let pruned = full.pruned_to_leaves(lambda);
            assert_eq!(direct.predict(&x), pruned.predict(&x), "lambda={lambda}");
            assert_eq!(direct.n_leaves(), pruned.n_leaves());
        }
    }

    #[test]
    fn lookup_table_matches_walks() {
        let x: Vec<Vec<f64>> = (0..60)
            .map(|i| vec![(i % 11) as f64, ((i * 3) % 7) as f64])
            .collect();
        let y: Vec<usize> = (0..60).map(|i| ((i % 11) > 5) as usize).collect();
        let t = fit_tree(&x, &y, 2, 10, None);
        let table = build_lookup_table(&t, &x);
        assert_eq!(table.max_lambda, t.n_leaves());
        for lambda in 1..=table.max_lambda {
            for (s, row) in x.iter().enumerate() {
                assert_eq!(table.states[lambda - 1][s], t.leaf_state(row, lambda));
            }
            let n_states = t.leaf_nodes_at(lambda).len();
            assert_eq!(n_states, lambda);
            assert!(table.states[lambda - 1].iter().all(|&s| (s as usize) < n_states));
        }
    }

    #[test]
    fn states_nest_across_lambdas() {
        // Each state at lambda+1 must map inside exactly one state at
        // lambda: the partitions are nested refinements.
        let x: Vec<Vec<f64>> = (0..80)
            .map(|i| vec![(i % 13) as f64, ((i * 5) % 9) as f64])
            .collect();
        let y: Vec<usize> = (0..80).map(|i| ((i * 5) % 9 > 4) as usize).collect();
        let t = fit_tree(&x, &y, 2, 12, None);
        let table = build_lookup_table(&t, &x);
        for lambda in 1..table.max_lambda {
            let coarse = &table.states[lambda - 1];
            let fine = &table.states[lambda];
            let mut map: std::collections::BTreeMap<u32, u32> = Default::default();
            for (s, &f) in fine.iter().enumerate() {
                let c = coarse[s];
                assert_eq!(*map.entry(f).or_insert(c), c);
            }
        }
    }

    #[test]
    fn ccp_extremes() {
        let (x, y) = toy();
        let t = fit_tree(&x, &y, 2, 16, None);
        assert_eq!(t.ccp_pruned(0.0).n_leaves(), t.n_leaves());
        let collapsed = t.ccp_pruned(1.0);
        assert_eq!(collapsed.n_leaves(), 1);
        assert!(collapsed.nodes[0].is_leaf());
    }

    #[test]
    fn ccp_removes_noise_split() {
        // One real split plus one split isolating a single noisy point:
        // a small alpha must keep the former and drop the latter.
        let mut x: Vec<Vec<f64>> = Vec::new();
        let mut y = Vec::new();
        for i in 0..50 {
            x.push(vec![i as f64]);
            y.push((i >= 25) as usize);
        }
        x.push(vec![10.5]);
        y.push(1);
        let t = fit_tree(&x, &y, 2, 8, None);
        assert!(t.n_leaves() > 2);
        let pruned = t.ccp_pruned(0.015);
        assert_eq!(pruned.n_leaves(), 2);
        assert_eq!(pruned.nodes[0].feature, Some(0));
    }

    #[test]
    fn forest_is_deterministic_and_votes() {
        let (x, y) = toy();
        let a = fit_forest(&x, &y, 2, 7, 8, 42).unwrap();
        let b = fit_forest(&x, &y, 2, 7, 8, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.predict(&x), y);
        let imp = a.feature_importance();
        assert_eq!(imp.len(), 2);
        assert!((imp.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn paths_cover_all_leaves() {
        let (x, y) = toy();
        let t = fit_tree(&x, &y, 2, 16, None);
        let paths = t.extract_paths();
        assert_eq!(paths.len(), t.n_leaves());
        // Every sample satisfies exactly one path.
        for row in &x {
            let matching = paths
                .iter()
                .filter(|(conds, _)| {
                    conds.iter().all(|&(f, thr, le)| {
                        if le {
                            row[f] <= thr
                        } else {
                            row[f] > thr
                        }
                    })
                })
                .count();
            assert_eq!(matching, 1);
        }
    }

    proptest! {
        #[test]
        fn prediction_agrees_with_training_majority(
            rows in proptest::collection::vec(
                proptest::collection::vec(0.0f64..10.0, 3), 5..40),
            labels in proptest::collection::vec(0usize..3, 40)
        ) {
            let y = &labels[..rows.len()];
            let t = fit_tree(&rows, y, 3, 32, None);
            // A fully grown tree with pure-at-exhaustion leaves: each
            // sample's predicted class must be a majority class of the
            // training samples in its leaf.
            let table = build_lookup_table(&t, &rows);
            let final_states = &table.states[table.max_lambda - 1];
            for (i, row) in rows.iter().enumerate() {
                let mine = final_states[i];
                let mut counts = vec![0usize; 3];
                for (j, &s) in final_states.iter().enumerate() {
                    if s == mine {
                        counts[y[j]] += 1;
                    }
                }
                let pred = t.predict_row(row);
                prop_assert_eq!(counts[pred], *counts.iter().max().unwrap());
            }
        }
    }
}
