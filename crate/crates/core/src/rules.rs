//! Global rule extraction and predicate grounding.
//!
//! The single-tree classifier over predicate counts converts exactly into
//! a set of disjoint conjunctive rules — one per leaf — whose literals are
//! integer threshold tests on predicate counts. Grouped by predicted
//! class, the rules read as a quantified DNF: a class holds iff some
//! conjunction of "predicate occurs at least n times / fewer than n times"
//! holds. Each predicate in turn grounds to a concrete rooted subgraph
//! shape plus a feature condition over its orbits, read off the master
//! tree's split path.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::ModelError;
use crate::graph::FeatureSchema;
use crate::orbits::OrbitDecomposition;
use crate::pipeline::{ClassifierModel, TrainedModel};
use crate::predicates::PredicateKey;
use crate::tree::argmax;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    Ge,
    Lt,
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Ge => ">=",
            CmpOp::Lt => "<",
        })
    }
}

/// Integer threshold test on one predicate count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Literal {
    /// Column in the model's vocabulary.
    pub predicate: usize,
    pub op: CmpOp,
    pub threshold: i64,
}

impl Literal {
    pub fn holds(&self, counts: &[f64]) -> bool {
        let c = counts[self.predicate];
        match self.op {
            CmpOp::Ge => c >= self.threshold as f64,
            CmpOp::Lt => c < self.threshold as f64,
        }
    }
}

/// One conjunctive rule: all literals hold implies the class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub class: usize,
    pub literals: Vec<Literal>,
    /// Training class histogram of the originating leaf.
    pub support: Vec<f64>,
}

impl Rule {
    pub fn holds(&self, counts: &[f64]) -> bool {
        self.literals.iter().all(|l| l.holds(counts))
    }
}

/// Disjoint, exhaustive rule set equivalent to the tree classifier on
/// integer count vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdnfRuleSet {
    pub rules: Vec<Rule>,
    pub n_classes: usize,
}

impl QdnfRuleSet {
    /// Class of a count vector. Exactly one rule fires on any vector the
    /// tree could see; the check is total regardless.
    pub fn evaluate(&self, counts: &[f64]) -> usize {
        for rule in &self.rules {
            if rule.holds(counts) {
                return rule.class;
            }
        }
        unreachable!("rule set is exhaustive by construction");
    }

    pub fn rules_for_class(&self, class: usize) -> Vec<&Rule> {
        self.rules.iter().filter(|r| r.class == class).collect()
    }

    /// Human-readable listing, one disjunction block per class.
    pub fn to_text(&self, vocab: &[PredicateKey]) -> String {
        let mut out = String::new();
        for class in 0..self.n_classes {
            let rules = self.rules_for_class(class);
            out.push_str(&format!("class {class}:\n"));
            if rules.is_empty() {
                out.push_str("  (never predicted)\n");
                continue;
            }
            for rule in rules {
                let body = if rule.literals.is_empty() {
                    "always".to_string()
                } else {
                    rule.literals
                        .iter()
                        .map(|l| {
                            let k = vocab[l.predicate];
                            format!("#({},q{}) {} {}", k.hash, k.state, l.op, l.threshold)
                        })
                        .collect::<Vec<_>>()
                        .join(" AND ")
                };
                let n: f64 = rule.support.iter().sum();
                out.push_str(&format!("  IF {body}  [{n:.0} train samples]\n"));
            }
        }
        out
    }
}

/// Rewrites a real split on an integer-valued count into an equivalent
/// integer literal: `C <= t` becomes `C < floor(t)+1`, `C > t` becomes
/// `C >= floor(t)+1`.
fn integer_literal(feature: usize, threshold: f64, goes_left: bool) -> Literal {
    let t = threshold.floor() as i64 + 1;
    Literal {
        predicate: feature,
        op: if goes_left { CmpOp::Lt } else { CmpOp::Ge },
        threshold: t,
    }
}

/// Merges a path's literals per predicate, keeping the tightest lower and
/// upper bound.
fn merge_literals(raw: Vec<Literal>) -> Vec<Literal> {
    let mut merged: Vec<Literal> = Vec::new();
    for lit in raw {
        match merged
            .iter_mut()
            .find(|m| m.predicate == lit.predicate && m.op == lit.op)
        {
            Some(m) => {
                m.threshold = match lit.op {
                    CmpOp::Ge => m.threshold.max(lit.threshold),
                    CmpOp::Lt => m.threshold.min(lit.threshold),
                };
            }
            None => merged.push(lit),
        }
    }
    merged.sort_by_key(|l| (l.predicate, l.op == CmpOp::Lt));
    merged
}

/// Converts the model's tree classifier into the equivalent rule set.
/// Forest models carry no single faithful rule set and are rejected;
/// their explanation surface is feature importance.
pub fn extract_global_rules(model: &TrainedModel) -> Result<QdnfRuleSet, ModelError> {
    let tree = match &model.classifier {
        ClassifierModel::Tree(t) => t,
        ClassifierModel::Forest(_) => {
            return Err(ModelError::Invalid(
                "global rules require the tree classifier; a forest only supports \
                 feature-importance explanations"
                    .into(),
            ))
        }
    };
    let mut rules: Vec<Rule> = tree
        .extract_paths()
        .into_iter()
        .map(|(conds, support)| Rule {
            class: argmax(&support),
            literals: merge_literals(
                conds
                    .into_iter()
                    .map(|(f, t, left)| integer_literal(f, t, left))
                    .collect(),
            ),
            support,
        })
        .collect();
    rules.sort_by(|a, b| {
        a.class
            .cmp(&b.class)
            .then_with(|| b.support.iter().sum::<f64>().total_cmp(&a.support.iter().sum()))
            .then_with(|| a.literals.len().cmp(&b.literals.len()))
    });
    Ok(QdnfRuleSet {
        rules,
        n_classes: model.n_classes,
    })
}

/// Name and value type of one slot of the orbit feature vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotInfo {
    pub name: String,
    /// Integer-valued slots (sizes, counts, histograms) take integer
    /// thresholds; means stay real.
    pub integer: bool,
}

fn summary_slots(out: &mut Vec<SlotInfo>, owner: &str, schema: &FeatureSchema) {
    for (c, &arity) in schema.discrete_arities.iter().enumerate() {
        for v in 0..arity {
            out.push(SlotInfo {
                name: format!("{owner}: #(f{c}={v})"),
                integer: true,
            });
        }
    }
    for c in 0..schema.continuous_count {
        out.push(SlotInfo {
            name: format!("{owner}: mean(x{c})"),
            integer: false,
        });
    }
}

/// Slot names of the orbit feature vector, mirroring its layout exactly.
pub fn slot_names(d: &OrbitDecomposition, schema: &FeatureSchema) -> Vec<SlotInfo> {
    let mut out = Vec::new();
    for i in 0..d.node_orbits.len() {
        out.push(SlotInfo {
            name: format!("Orbit {i}: size"),
            integer: true,
        });
    }
    for &i in &d.kept_node_orbits {
        summary_slots(&mut out, &format!("Orbit {i}"), schema);
    }
    for &(a, b, _) in &d.edge_orbits {
        out.push(SlotInfo {
            name: format!("EdgeOrbit {a}-{b}: count"),
            integer: true,
        });
        summary_slots(&mut out, &format!("EdgeOrbit {a}-{b}, side {a}"), schema);
        summary_slots(&mut out, &format!("EdgeOrbit {a}-{b}, side {b}"), schema);
    }
    out
}

/// One rendered condition of a grounded predicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundedCondition {
    pub slot: usize,
    pub slot_name: String,
    pub op: String,
    pub threshold: f64,
}

/// A predicate made concrete: the rooted shape it matches plus the
/// feature conditions selecting its master-tree state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundedPredicate {
    pub index: usize,
    pub key: PredicateKey,
    /// Node count and edges of the exemplar ego (root at index 0).
    pub shape_nodes: usize,
    pub shape_edges: Vec<(usize, usize)>,
    /// Orbit membership per exemplar node.
    pub node_orbit: Vec<usize>,
    pub conditions: Vec<GroundedCondition>,
    pub text: String,
}

/// Grounds vocabulary predicate `index` against its exemplar subgraph.
pub fn ground_predicate(
    model: &TrainedModel,
    index: usize,
) -> Result<GroundedPredicate, ModelError> {
    let vocab = model.vocabulary();
    let key = *vocab.get(index).ok_or_else(|| {
        ModelError::Invalid(format!(
            "predicate index {index} out of range (vocabulary size {})",
            vocab.len()
        ))
    })?;
    let gi = model
        .space
        .group_of(key.hash)
        .expect("vocabulary digests always have a group");
    let group = &model.space.groups[gi];
    let ex = &model.exemplars[gi];
    let lambda = model.space.effective_lambdas(&model.genome)[gi];
    let slots = slot_names(&ex.decomposition, &model.schema);
    let conditions: Vec<GroundedCondition> = group
        .master
        .path_to_state(key.state, lambda)
        .into_iter()
        .map(|(f, t, left)| {
            let info = &slots[f];
            if info.integer {
                let lit = integer_literal(f, t, left);
                GroundedCondition {
                    slot: f,
                    slot_name: info.name.clone(),
                    op: lit.op.to_string(),
                    threshold: lit.threshold as f64,
                }
            } else {
                GroundedCondition {
                    slot: f,
                    slot_name: info.name.clone(),
                    op: if left { "<=" } else { ">" }.to_string(),
                    threshold: t,
                }
            }
        })
        .collect();
    let mut node_orbit = vec![0usize; ex.ego.node_count];
    for (i, orbit) in ex.decomposition.node_orbits.iter().enumerate() {
        for &v in orbit {
            node_orbit[v] = i;
        }
    }
    let cond_text = if conditions.is_empty() {
        "any occurrence".to_string()
    } else {
        conditions
            .iter()
            .map(|c| format!("{} {} {}", c.slot_name, c.op, c.threshold))
            .collect::<Vec<_>>()
            .join(" AND ")
    };
    let text = format!(
        "P{index} = rooted shape {} ({} nodes, {} edges, state q{}): {}",
        key.hash,
        ex.ego.node_count,
        ex.ego.edge_count(),
        key.state,
        cond_text
    );
    Ok(GroundedPredicate {
        index,
        key,
        shape_nodes: ex.ego.node_count,
        shape_edges: ex.ego.edges.clone(),
        node_orbit,
        conditions,
        text,
    })
}

/// Graphviz rendering of a grounded predicate's exemplar shape. Nodes are
/// colored by orbit; the root is drawn double-circled.
pub fn predicate_dot(p: &GroundedPredicate) -> String {
    const PALETTE: [&str; 8] = [
        "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
    ];
    let mut out = String::new();
    out.push_str(&format!("graph predicate_{} {{\n", p.index));
    out.push_str("  node [style=filled];\n");
    out.push_str(&format!("  label=\"{}\";\n", p.text.replace('"', "'")));
    for v in 0..p.shape_nodes {
        let color = PALETTE[p.node_orbit[v] % PALETTE.len()];
        let shape = if v == 0 { "doublecircle" } else { "circle" };
        out.push_str(&format!(
            "  n{v} [label=\"orbit {}\", fillcolor=\"{color}\", shape={shape}];\n",
            p.node_orbit[v]
        ));
    }
    for &(u, v) in &p.shape_edges {
        out.push_str(&format!("  n{u} -- n{v};\n"));
    }
    out.push_str("}\n");
    out
}
