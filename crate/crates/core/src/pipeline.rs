//! End-to-end training and inference.
//!
//! Pipeline: hash every node's K-hop ego subgraph (structure and edge
//! labels only), group nodes by digest, summarize each ego's node
//! features into an orbit-aware vector, fit one master tree per digest,
//! optionally search per-digest leaf budgets, build predicate count
//! vectors, and fit a global classifier on them. The same machinery
//! serves node classification by treating each node as a sample with a
//! single subgraph instance.
//!
//! Models serialize to a versioned JSON container and predict
//! deterministically; equal seeds give byte-identical model files.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::ModelError;
use crate::ga::{evolve, FitnessParams, GaParams};
use crate::graph::{FeatureSchema, Graph, GraphDataset, NodeTask};
use crate::hashing::{subgraph_hash, HashConfig, StructHash};
use crate::orbits::{
    hop_distance_feature_vector, orbit_decomposition, orbit_feature_vector, OrbitDecomposition,
};
use crate::predicates::{binarize, Genome, PredicateKey, PredicateSpace};
use crate::tree::{argmax, fit_forest, fit_tree, DecisionTree, Forest};

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassifierKind {
    Dt,
    Rf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EncodingKind {
    /// Orbit-aware feature vectors (the full method).
    Orbit,
    /// Hop-distance shells (coarser ablation encoding).
    HopDistance,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub k_hops: usize,
    pub hash: HashConfig,
    /// Master-tree leaf cap (the upper bound of every leaf budget).
    pub max_leaves_cap: usize,
    /// Cost-complexity pruning applied to masters at build time.
    pub master_ccp_alpha: f64,
    pub classifier: ClassifierKind,
    pub n_trees: usize,
    pub ga_enabled: bool,
    pub ga: GaParams,
    pub fitness: FitnessParams,
    pub encoding: EncodingKind,
    pub binarize_counts: bool,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k_hops: 1,
            hash: HashConfig::default(),
            max_leaves_cap: 16,
            master_ccp_alpha: 0.0,
            classifier: ClassifierKind::Dt,
            n_trees: 100,
            ga_enabled: false,
            ga: GaParams::default(),
            fitness: FitnessParams::default(),
            encoding: EncodingKind::Orbit,
            binarize_counts: false,
            seed: 0,
        }
    }
}

/// One node's subgraph instance: its digest and feature summary.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeInstance {
    pub node: usize,
    pub hash: StructHash,
    pub z: Vec<f64>,
}

/// Representative ego per digest, kept for grounding and explanation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exemplar {
    pub hash: StructHash,
    /// The ego graph with its original node features, root at index 0.
    pub ego: Graph,
    /// Orbit layout of the stripped ego (valid for every instance of
    /// this digest).
    pub decomposition: OrbitDecomposition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClassifierModel {
    Tree(DecisionTree),
    Forest(Forest),
}

impl ClassifierModel {
    pub fn predict_row(&self, row: &[f64]) -> usize {
        match self {
            ClassifierModel::Tree(t) => t.predict_row(row),
            ClassifierModel::Forest(f) => f.predict_row(row),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskKind {
    Graph,
    Node,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub version: u32,
    pub task: TaskKind,
    pub name: String,
    pub k_hops: usize,
    pub hash: HashConfig,
    pub encoding: EncodingKind,
    pub binarize_counts: bool,
    pub schema: FeatureSchema,
    pub space: PredicateSpace,
    pub genome: Genome,
    /// Exemplars aligned with `space.groups`.
    pub exemplars: Vec<Exemplar>,
    pub classifier: ClassifierModel,
    pub majority_class: usize,
    pub n_classes: usize,
    /// Fraction of training instances whose digest was singular — always
    /// zero by construction; kept for symmetry with evaluation reports.
    pub train_unseen_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    pub class: usize,
    pub counts: Vec<f64>,
    /// Fired predicates per node: `(node, predicate key)`; nodes with
    /// unseen digests are absent.
    pub fired: Vec<(usize, PredicateKey)>,
    pub unseen_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub unseen_rate: f64,
    pub n_samples: usize,
}

/// Copy of `g` with node features removed, so digests depend on
/// structure and edge labels only.
fn stripped(g: &Graph) -> Graph {
    let mut s = g.clone();
    s.node_discrete = vec![vec![0]; s.node_count];
    s.node_continuous = vec![Vec::new(); s.node_count];
    s
}

fn summary_width(schema: &FeatureSchema) -> usize {
    schema.discrete_arities.iter().map(|&a| a as usize).sum::<usize>() + schema.continuous_count
}

/// Digest and feature summary of every requested node's ego subgraph.
pub fn extract_instances(
    g: &Graph,
    nodes: &[usize],
    k_hops: usize,
    hash_cfg: &HashConfig,
    encoding: EncodingKind,
    schema: &FeatureSchema,
) -> Vec<NodeInstance> {
    let adj = g.adjacency();
    nodes
        .iter()
        .map(|&v| {
            let ego = g.ego_subgraph_from_adj(v, k_hops, &adj);
            let bare = stripped(&ego.graph);
            let hash = subgraph_hash(&bare, 0, hash_cfg);
            let z = match encoding {
                EncodingKind::Orbit => {
                    let d = orbit_decomposition(&bare, 0, hash_cfg);
                    orbit_feature_vector(&ego.graph, &d, schema)
                }
                EncodingKind::HopDistance => {
                    let mut z = hop_distance_feature_vector(&ego.graph, 0, schema);
                    // Fixed global layout: one block per possible shell.
                    z.resize((k_hops + 1) * (1 + summary_width(schema)), 0.0);
                    z
                }
            };
            NodeInstance { node: v, hash, z }
        })
        .collect()
}

/// Exemplar per digest from a stream of (instance, ego) pairs; first
/// occurrence wins.
fn collect_exemplars(
    pairs: &[(StructHash, Graph)],
    hash_cfg: &HashConfig,
) -> BTreeMap<StructHash, Exemplar> {
    let mut out: BTreeMap<StructHash, Exemplar> = BTreeMap::new();
    for (hash, ego) in pairs {
        out.entry(*hash).or_insert_with(|| Exemplar {
            hash: *hash,
            ego: ego.clone(),
            decomposition: orbit_decomposition(&stripped(ego), 0, hash_cfg),
        });
    }
    out
}

fn majority(labels: &[usize], n_classes: usize) -> usize {
    let mut counts = vec![0.0f64; n_classes];
    for &y in labels {
        counts[y] += 1.0;
    }
    argmax(&counts)
}

fn fit_global_classifier(
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    config: &PipelineConfig,
) -> Result<ClassifierModel, ModelError> {
    Ok(match config.classifier {
        ClassifierKind::Dt => ClassifierModel::Tree(
            fit_tree(x, y, n_classes, config.fitness.judge_max_leaves, None)
                .ccp_pruned(config.fitness.judge_ccp_alpha),
        ),
        ClassifierKind::Rf => ClassifierModel::Forest(fit_forest(
            x,
            y,
            n_classes,
            config.n_trees,
            config.fitness.judge_max_leaves,
            config.seed,
        )?),
    })
}

fn validate_labels(labels: &[usize]) -> Result<usize, ModelError> {
    if labels.is_empty() {
        return Err(ModelError::Invalid("empty training set".into()));
    }
    let n_classes = labels.iter().max().unwrap() + 1;
    let mut seen = vec![false; n_classes];
    for &y in labels {
        seen[y] = true;
    }
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(ModelError::Invalid(
            "training set has a single class; nothing to learn".into(),
        ));
    }
    Ok(n_classes)
}

/// Shared tail of both trainers: fit the space, search budgets, fit the
/// global classifier.
#[allow(clippy::too_many_arguments)]
fn assemble_model(
    instances_by_hash: BTreeMap<StructHash, Vec<(usize, Vec<f64>)>>,
    exemplars_by_hash: BTreeMap<StructHash, Exemplar>,
    labels: &[usize],
    n_classes: usize,
    task: TaskKind,
    name: &str,
    schema: &FeatureSchema,
    config: &PipelineConfig,
) -> Result<TrainedModel, ModelError> {
    let space = PredicateSpace::build(
        &instances_by_hash,
        labels,
        n_classes,
        config.max_leaves_cap,
        config.master_ccp_alpha,
    );
    let genome: Genome = if config.ga_enabled {
        let mut ga = config.ga.clone();
        ga.lambda_max = config.max_leaves_cap;
        ga.seed = config.seed;
        evolve(&space, labels, n_classes, &ga, &config.fitness)?.best_genome
    } else {
        vec![config.max_leaves_cap; space.group_count()]
    };
    let mut matrix = space.count_matrix(&genome);
    if config.binarize_counts {
        binarize(&mut matrix);
    }
    let classifier = fit_global_classifier(&matrix, labels, n_classes, config)?;
    let exemplars: Vec<Exemplar> = space
        .groups
        .iter()
        .map(|g| exemplars_by_hash[&g.hash].clone())
        .collect();
    Ok(TrainedModel {
        version: MODEL_VERSION,
        task,
        name: name.to_string(),
        k_hops: config.k_hops,
        hash: config.hash.clone(),
        encoding: config.encoding,
        binarize_counts: config.binarize_counts,
        schema: schema.clone(),
        space,
        genome,
        exemplars,
        classifier,
        majority_class: majority(labels, n_classes),
        n_classes,
        train_unseen_rate: 0.0,
    })
}

/// Trains the graph classifier on an already-split training set.
pub fn train_graph_classifier(
    train: &GraphDataset,
    config: &PipelineConfig,
) -> Result<TrainedModel, ModelError> {
    let n_classes = validate_labels(&train.labels)?;
    let per_graph: Vec<(Vec<NodeInstance>, Vec<(StructHash, Graph)>)> = train
        .graphs
        .par_iter()
        .map(|g| {
            let nodes: Vec<usize> = (0..g.node_count).collect();
            let inst = extract_instances(
                g,
                &nodes,
                config.k_hops,
                &config.hash,
                config.encoding,
                &train.schema,
            );
            let egos: Vec<(StructHash, Graph)> = inst
                .iter()
                .map(|i| (i.hash, g.ego_subgraph(i.node, config.k_hops).graph))
                .collect();
            (inst, egos)
        })
        .collect();
    let mut by_hash: BTreeMap<StructHash, Vec<(usize, Vec<f64>)>> = BTreeMap::new();
    let mut ego_pairs: Vec<(StructHash, Graph)> = Vec::new();
    for (graph_idx, (insts, egos)) in per_graph.into_iter().enumerate() {
        for i in insts {
            by_hash.entry(i.hash).or_default().push((graph_idx, i.z));
        }
        ego_pairs.extend(egos);
    }
    let exemplars = collect_exemplars(&ego_pairs, &config.hash);
    assemble_model(
        by_hash,
        exemplars,
        &train.labels,
        n_classes,
        TaskKind::Graph,
        &train.name,
        &train.schema,
        config,
    )
}

/// Trains the node classifier on the task's train mask. Each node is a
/// sample carrying exactly one subgraph instance — its own ego.
pub fn train_node_classifier(
    task: &NodeTask,
    config: &PipelineConfig,
) -> Result<TrainedModel, ModelError> {
    let labels: Vec<usize> = task.train_mask.iter().map(|&v| task.node_labels[v]).collect();
    let n_classes = validate_labels(&task.node_labels)?;
    let instances = extract_instances(
        &task.graph,
        &task.train_mask,
        config.k_hops,
        &config.hash,
        config.encoding,
        &task.schema,
    );
    let mut by_hash: BTreeMap<StructHash, Vec<(usize, Vec<f64>)>> = BTreeMap::new();
    let mut ego_pairs: Vec<(StructHash, Graph)> = Vec::new();
    for (sample_idx, inst) in instances.iter().enumerate() {
        by_hash
            .entry(inst.hash)
            .or_default()
            .push((sample_idx, inst.z.clone()));
        ego_pairs.push((
            inst.hash,
            task.graph.ego_subgraph(inst.node, config.k_hops).graph,
        ));
    }
    let exemplars = collect_exemplars(&ego_pairs, &config.hash);
    assemble_model(
        by_hash,
        exemplars,
        &labels,
        n_classes,
        TaskKind::Node,
        &task.name,
        &task.schema,
        config,
    )
}

impl TrainedModel {
    fn report_from_instances(&self, instances: &[NodeInstance]) -> PredictionReport {
        let pairs: Vec<(StructHash, Vec<f64>)> =
            instances.iter().map(|i| (i.hash, i.z.clone())).collect();
        let mut counts = self.space.count_vector(&pairs, &self.genome);
        if self.binarize_counts {
            let mut m = vec![std::mem::take(&mut counts)];
            binarize(&mut m);
            counts = m.pop().unwrap();
        }
        let lambdas = self.space.effective_lambdas(&self.genome);
        let mut fired = Vec::new();
        let mut unseen = 0usize;
        for i in instances {
            match self.space.group_of(i.hash) {
                Some(gi) => {
                    let state = self.space.groups[gi].master.leaf_state(&i.z, lambdas[gi]);
                    fired.push((i.node, PredicateKey { hash: i.hash, state }));
                }
                None => unseen += 1,
            }
        }
        let class = self.classifier.predict_row(&counts);
        PredictionReport {
            class,
            counts,
            fired,
            unseen_rate: if instances.is_empty() {
                0.0
            } else {
                unseen as f64 / instances.len() as f64
            },
        }
    }

    /// Classifies one graph, returning the evidence vector and the fired
    /// predicates for explanation.
    pub fn predict_graph(&self, g: &Graph) -> PredictionReport {
        assert_eq!(self.task, TaskKind::Graph);
        let nodes: Vec<usize> = (0..g.node_count).collect();
        let instances =
            extract_instances(g, &nodes, self.k_hops, &self.hash, self.encoding, &self.schema);
        self.report_from_instances(&instances)
    }

    /// Classifies single nodes of one graph.
    pub fn predict_nodes(&self, g: &Graph, nodes: &[usize]) -> Vec<PredictionReport> {
        assert_eq!(self.task, TaskKind::Node);
        let instances =
            extract_instances(g, nodes, self.k_hops, &self.hash, self.encoding, &self.schema);
        instances
            .iter()
            .map(|i| self.report_from_instances(std::slice::from_ref(i)))
            .collect()
    }

    pub fn evaluate_graphs(&self, data: &GraphDataset) -> EvalReport {
        let reports: Vec<PredictionReport> = data
            .graphs
            .par_iter()
            .map(|g| self.predict_graph(g))
            .collect();
        let correct = reports
            .iter()
            .zip(&data.labels)
            .filter(|(r, &y)| r.class == y)
            .count();
        EvalReport {
            accuracy: correct as f64 / data.len() as f64,
            unseen_rate: reports.iter().map(|r| r.unseen_rate).sum::<f64>() / data.len() as f64,
            n_samples: data.len(),
        }
    }

    pub fn evaluate_nodes(&self, task: &NodeTask, nodes: &[usize]) -> EvalReport {
        let reports = self.predict_nodes(&task.graph, nodes);
        let correct = reports
            .iter()
            .zip(nodes)
            .filter(|(r, &v)| r.class == task.node_labels[v])
            .count();
        EvalReport {
            accuracy: correct as f64 / nodes.len() as f64,
            unseen_rate: reports.iter().map(|r| r.unseen_rate).sum::<f64>() / nodes.len() as f64,
            n_samples: nodes.len(),
        }
    }

    /// Predicate identities in vocabulary order (the classifier's feature
    /// columns, one-to-one).
    pub fn vocabulary(&self) -> Vec<PredicateKey> {
        self.space.vocabulary(&self.genome)
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<TrainedModel, ModelError> {
        let m: TrainedModel = serde_json::from_str(s)?;
        if m.version != MODEL_VERSION {
            return Err(ModelError::Invalid(format!(
                "unsupported model version {} (expected {MODEL_VERSION})",
                m.version
            )));
        }
        let width = m.vocabulary().len();
        let classifier_width = match &m.classifier {
            ClassifierModel::Tree(t) => t.n_features,
            ClassifierModel::Forest(f) => f.trees.first().map_or(width, |t| t.n_features),
        };
        if width != classifier_width {
            return Err(ModelError::Invariant(format!(
                "vocabulary width {width} does not match classifier width {classifier_width}"
            )));
        }
        Ok(m)
    }
}

/// Ablation variants of the full pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AblationVariant {
    /// Hop-distance shells instead of orbit encoding.
    NoOrbits,
    /// Presence bits instead of counts.
    NoCounts,
    /// Fixed maximal budgets instead of the evolutionary search.
    NoGa,
}

/// Applies one ablation to a config, trains on `train`, scores on `test`.
pub fn run_ablation(
    variant: AblationVariant,
    train: &GraphDataset,
    test: &GraphDataset,
    config: &PipelineConfig,
) -> Result<EvalReport, ModelError> {
    let mut cfg = config.clone();
    match variant {
        AblationVariant::NoOrbits => cfg.encoding = EncodingKind::HopDistance,
        AblationVariant::NoCounts => cfg.binarize_counts = true,
        AblationVariant::NoGa => cfg.ga_enabled = false,
    }
    let model = train_graph_classifier(train, &cfg)?;
    Ok(model.evaluate_graphs(test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::split_dataset;
    use crate::synth::gen_ba2motifs;

    fn quick_config() -> PipelineConfig {
        PipelineConfig::default()
    }

    /// Small two-class task: one planted triangle vs none on a path base.
    fn tiny_dataset() -> GraphDataset {
        let mut graphs = Vec::new();
        let mut labels = Vec::new();
        for i in 0..24 {
            // Path of 6 plus, for class 0, a bridged triangle.
            let mut g = Graph::plain(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]);
            if i % 2 == 0 {
                let o = g.node_count;
                g.node_count += 3;
                g.node_discrete.extend(vec![vec![0]; 3]);
                g.node_continuous.extend(vec![Vec::new(); 3]);
                g.add_edge(o, o + 1);
                g.add_edge(o, o + 2);
                g.add_edge(o + 1, o + 2);
                g.add_edge(i % 6, o);
            }
            graphs.push(g);
            labels.push(i % 2);
        }
        GraphDataset {
            graphs,
            labels,
            schema: FeatureSchema::constant(),
            name: "tiny".into(),
        }
    }

    #[test]
    fn learns_tiny_task_perfectly() {
        let data = tiny_dataset();
        let model = train_graph_classifier(&data, &quick_config()).unwrap();
        let report = model.evaluate_graphs(&data);
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.unseen_rate, 0.0);
    }

    #[test]
    fn prediction_is_permutation_invariant() {
        let data = tiny_dataset();
        let model = train_graph_classifier(&data, &quick_config()).unwrap();
        let g = &data.graphs[0];
        let perm: Vec<usize> = (0..g.node_count).rev().collect();
        let a = model.predict_graph(g);
        let b = model.predict_graph(&g.permuted(&perm));
        assert_eq!(a.class, b.class);
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.unseen_rate, b.unseen_rate);
    }

    #[test]
    fn unseen_hash_graph_falls_back() {
        let data = tiny_dataset();
        let model = train_graph_classifier(&data, &quick_config()).unwrap();
        // A clique of 5 shares no ego digest with the training set.
        let alien = Graph::plain(
            5,
            &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
        );
        let r = model.predict_graph(&alien);
        assert_eq!(r.unseen_rate, 1.0);
        assert!(r.counts.iter().all(|&c| c == 0.0));
        assert!(r.fired.is_empty());
    }

    #[test]
    fn model_round_trips_through_json() {
        let data = tiny_dataset();
        let model = train_graph_classifier(&data, &quick_config()).unwrap();
        let json = model.to_json().unwrap();
        let loaded = TrainedModel::from_json(&json).unwrap();
        assert_eq!(model, loaded);
        for g in &data.graphs {
            assert_eq!(model.predict_graph(g), loaded.predict_graph(g));
        }
        // Serialization itself is deterministic.
        assert_eq!(json, loaded.to_json().unwrap());
    }

    #[test]
    fn training_is_deterministic() {
        let data = gen_ba2motifs(1);
        let (train, _) = split_dataset(&data, 0.8, 0).unwrap();
        let small = train.subset(&(0..120).collect::<Vec<_>>(), "small");
        let a = train_graph_classifier(&small, &quick_config()).unwrap();
        let b = train_graph_classifier(&small, &quick_config()).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn rejects_degenerate_training_sets() {
        let empty = GraphDataset {
            graphs: Vec::new(),
            labels: Vec::new(),
            schema: FeatureSchema::constant(),
            name: "empty".into(),
        };
        assert!(train_graph_classifier(&empty, &quick_config()).is_err());
        let mut single = tiny_dataset();
        single.labels = vec![0; single.len()];
        assert!(train_graph_classifier(&single, &quick_config()).is_err());
    }

    /// Classes differ only in component multiplicity. Every graph is a
    /// disjoint union of triangles and hexagons, so both classes expose
    /// exactly two ego digests (triangle, path-of-3) and presence bits
    /// are identical; only the counts separate them.
    fn multiplicity_dataset() -> GraphDataset {
        let mut graphs = Vec::new();
        let mut labels = Vec::new();
        for i in 0..24 {
            let (triangles, hexagons) = if i % 2 == 0 { (1, 2) } else { (2, 1) };
            let mut g = Graph::plain(0, &[]);
            for _ in 0..triangles {
                let o = g.node_count;
                g.node_count += 3;
                g.node_discrete.extend(vec![vec![0]; 3]);
                g.node_continuous.extend(vec![Vec::new(); 3]);
                g.add_edge(o, o + 1);
                g.add_edge(o, o + 2);
                g.add_edge(o + 1, o + 2);
            }
            for _ in 0..hexagons {
                let o = g.node_count;
                g.node_count += 6;
                g.node_discrete.extend(vec![vec![0]; 6]);
                g.node_continuous.extend(vec![Vec::new(); 6]);
                for j in 0..6 {
                    g.add_edge(o + j, o + (j + 1) % 6);
                }
            }
            graphs.push(g);
            labels.push(i % 2);
        }
        GraphDataset {
            graphs,
            labels,
            schema: FeatureSchema::constant(),
            name: "multiplicity".into(),
        }
    }

    #[test]
    fn counts_beat_presence_bits_on_multiplicity() {
        let data = multiplicity_dataset();
        let cfg = quick_config();
        let full = train_graph_classifier(&data, &cfg).unwrap();
        assert_eq!(full.evaluate_graphs(&data).accuracy, 1.0);
        let ablated = run_ablation(AblationVariant::NoCounts, &data, &data, &cfg).unwrap();
        // Every binarized row is [1, 1]; accuracy collapses to chance.
        assert!(ablated.accuracy <= 0.5, "got {}", ablated.accuracy);
    }

    #[test]
    fn node_task_end_to_end() {
        // Ring of 12 with two bridged pendant triangles; classify
        // triangle nodes vs ring nodes.
        let mut g = Graph::plain(
            12,
            &[
                (0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 9),
                (9, 10), (10, 11), (11, 0),
            ],
        );
        let mut labels = vec![0usize; 12];
        for &anchor in &[0usize, 6] {
            let o = g.node_count;
            g.node_count += 3;
            g.node_discrete.extend(vec![vec![0]; 3]);
            g.node_continuous.extend(vec![Vec::new(); 3]);
            g.add_edge(o, o + 1);
            g.add_edge(o, o + 2);
            g.add_edge(o + 1, o + 2);
            g.add_edge(anchor, o);
            labels.extend([1, 1, 1]);
        }
        let (train_mask, test_mask) =
            crate::graph::stratified_split_indices(&labels, 0.7, 3).unwrap();
        let task = NodeTask {
            graph: g,
            node_labels: labels,
            train_mask,
            test_mask: test_mask.clone(),
            schema: FeatureSchema::constant(),
            name: "ringtri".into(),
        };
        let model = train_node_classifier(&task, &quick_config()).unwrap();
        let report = model.evaluate_nodes(&task, &test_mask);
        assert_eq!(report.accuracy, 1.0);
    }

    #[test]
    fn exemplars_align_with_groups() {
        let data = tiny_dataset();
        let model = train_graph_classifier(&data, &quick_config()).unwrap();
        assert_eq!(model.exemplars.len(), model.space.group_count());
        for (ex, group) in model.exemplars.iter().zip(&model.space.groups) {
            assert_eq!(ex.hash, group.hash);
            // The exemplar's stripped ego re-hashes to its digest.
            let bare = stripped(&ex.ego);
            assert_eq!(subgraph_hash(&bare, 0, &model.hash), ex.hash);
        }
    }
}
