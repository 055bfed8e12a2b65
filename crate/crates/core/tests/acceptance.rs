//! End-to-end acceptance checks, one test per headline claim. Each test
//! prints a single PASS line when its assertions hold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::Instant;

use symgraph::graph::{split_dataset, FeatureSchema, Graph, GraphDataset};
use symgraph::hashing::{stable_colors, subgraph_hash, HashConfig, HashMode};
use symgraph::orbits::{hop_distance_feature_vector, orbit_decomposition, orbit_feature_vector};
use symgraph::pipeline::{
    extract_instances, run_ablation, train_graph_classifier, train_node_classifier,
    AblationVariant, EncodingKind, PipelineConfig, TrainedModel,
};
use symgraph::predicates::PredicateKey;
use symgraph::rules::extract_global_rules;
use symgraph::synth::{
    apply_capped_degree_features, ba_edges, capped_degree_schema, gen_ba2motifs,
    gen_bamultishapes_with_motifs, gen_bashapes, gen_treegrid, motif, plant_motifs, MotifKind,
};
use symgraph::tu::load_tu_dataset;

fn cfg(k_hops: usize, seed: u64) -> PipelineConfig {
    PipelineConfig {
        k_hops,
        seed,
        ..PipelineConfig::default()
    }
}

/// Digest-and-state keys produced by the given nodes of a graph under a
/// trained model, as a multiset.
fn replay_keys(model: &TrainedModel, g: &Graph, nodes: &[usize]) -> BTreeMap<PredicateKey, usize> {
    let lambdas = model.space.effective_lambdas(&model.genome);
    let mut out: BTreeMap<PredicateKey, usize> = BTreeMap::new();
    for inst in extract_instances(g, nodes, model.k_hops, &model.hash, model.encoding, &model.schema)
    {
        if let Some(gi) = model.space.group_of(inst.hash) {
            let state = model.space.groups[gi].master.leaf_state(&inst.z, lambdas[gi]);
            *out.entry(PredicateKey { hash: inst.hash, state }).or_insert(0) += 1;
        }
    }
    out
}

#[test]
fn criterion_1_ba2motifs_is_solved_exactly() {
    let started = Instant::now();
    for seed in 0..5u64 {
        let data = gen_ba2motifs(seed);
        let (train, test) = split_dataset(&data, 0.8, seed).unwrap();
        let model = train_graph_classifier(&train, &cfg(1, seed)).unwrap();
        let report = model.evaluate_graphs(&test);
        assert_eq!(report.accuracy, 1.0, "seed {seed}");
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed:.1}s");
    println!("ACCEPTANCE 1: PASS (5 seeds at 100%, {elapsed:.1}s total)");
}

#[test]
fn criterion_2_bamultishapes_rules_ground_to_motifs() {
    let (data, _) = gen_bamultishapes_with_motifs(0);
    let (train, test) = split_dataset(&data, 0.8, 0).unwrap();
    let mut config = cfg(1, 0);
    config.ga_enabled = true;
    let model = train_graph_classifier(&train, &config).unwrap();
    let report = model.evaluate_graphs(&test);
    assert!(report.accuracy >= 0.95, "accuracy {}", report.accuracy);

    // Ground each motif to its predicate multiset by planting it alone on
    // probe bases and replaying the motif's own nodes through the model.
    // Keys that fluctuate across probes (anchor-adjacent states) keep
    // their common minimum.
    let kinds = [MotifKind::House, MotifKind::Grid3x3, MotifKind::Wheel];
    let mut multisets: Vec<BTreeMap<PredicateKey, usize>> = Vec::new();
    for &kind in &kinds {
        let size = motif(kind).node_count;
        let mut combined: Option<BTreeMap<PredicateKey, usize>> = None;
        for probe in 0..3u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(10_000 + probe);
            let base_n = 40 - size;
            let mut g = Graph::plain(base_n, &ba_edges(base_n, 1, &mut rng));
            let target = rng.gen_range(0..base_n);
            let offset = plant_motifs(&mut g, &[(kind, target)])[0];
            apply_capped_degree_features(&mut g);
            let nodes: Vec<usize> = (offset..offset + size).collect();
            let keys = replay_keys(&model, &g, &nodes);
            combined = Some(match combined {
                None => keys,
                Some(prev) => prev
                    .into_iter()
                    .filter_map(|(k, c)| keys.get(&k).map(|&c2| (k, c.min(c2))))
                    .collect(),
            });
        }
        multisets.push(combined.unwrap());
    }

    // Motif-level reading of the learned rules: synthesize each fresh
    // graph's count vector purely from which motifs it contains, then ask
    // the rules for a class. No model inference touches the fresh graphs.
    let rules = extract_global_rules(&model).unwrap();
    let vocab = model.vocabulary();
    let position: BTreeMap<PredicateKey, usize> =
        vocab.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let (fresh, planted) = gen_bamultishapes_with_motifs(4242);
    let mut agree = 0usize;
    for (i, kinds_here) in planted.iter().enumerate() {
        let mut counts = vec![0.0f64; vocab.len()];
        for kind in kinds_here {
            let mi = kinds.iter().position(|k| k == kind).unwrap();
            for (key, c) in &multisets[mi] {
                if let Some(&p) = position.get(key) {
                    counts[p] += *c as f64;
                }
            }
        }
        if rules.evaluate(&counts) == fresh.labels[i] {
            agree += 1;
        }
    }
    let rate = agree as f64 / fresh.len() as f64;
    assert!(rate >= 0.99, "motif-level rule agreement {rate}");
    println!(
        "ACCEPTANCE 2: PASS (test accuracy {:.3}, motif-level rule agreement {rate:.3})",
        report.accuracy
    );
}

#[test]
fn criterion_3_ba2motifs_rule_is_one_house_test() {
    let data = gen_ba2motifs(0);
    let (train, _) = split_dataset(&data, 0.8, 0).unwrap();
    let model = train_graph_classifier(&train, &cfg(1, 0)).unwrap();
    let rules = extract_global_rules(&model).unwrap();
    // Exactly one threshold test on one predicate, negated for the other
    // class.
    assert_eq!(rules.rules.len(), 2);
    for rule in &rules.rules {
        assert_eq!(rule.literals.len(), 1);
    }
    let predicate = rules.rules[0].literals[0].predicate;
    assert_eq!(rules.rules[1].literals[0].predicate, predicate);
    // That predicate is produced by the house itself: plant one house on
    // a probe base and replay its five nodes.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut g = Graph::plain(20, &ba_edges(20, 1, &mut rng));
    let target = rng.gen_range(0..20);
    let offset = plant_motifs(&mut g, &[(MotifKind::House, target)])[0];
    let house_nodes: Vec<usize> = (offset..offset + 5).collect();
    let keys = replay_keys(&model, &g, &house_nodes);
    assert!(
        keys.contains_key(&model.vocabulary()[predicate]),
        "rule predicate is not produced by house nodes"
    );
    // The single test decides every graph of the benchmark correctly.
    for (g, &label) in data.graphs.iter().zip(&data.labels) {
        let r = model.predict_graph(g);
        assert_eq!(rules.evaluate(&r.counts), label);
    }
    println!("ACCEPTANCE 3: PASS (single house-predicate threshold, exact on all 1000 graphs)");
}

#[test]
fn criterion_4_node_tasks_are_solved_exactly() {
    let started = Instant::now();
    let task = gen_bashapes(0);
    let model = train_node_classifier(&task, &cfg(1, 0)).unwrap();
    let report = model.evaluate_nodes(&task, &task.test_mask);
    assert_eq!(report.accuracy, 1.0, "bashapes");
    let t1 = started.elapsed().as_secs_f64();
    assert!(t1 < 60.0, "bashapes took {t1:.1}s");

    let started = Instant::now();
    let task = gen_treegrid(0);
    let model = train_node_classifier(&task, &cfg(2, 0)).unwrap();
    let report = model.evaluate_nodes(&task, &task.test_mask);
    assert_eq!(report.accuracy, 1.0, "treegrid");
    let t2 = started.elapsed().as_secs_f64();
    assert!(t2 < 60.0, "treegrid took {t2:.1}s");
    println!("ACCEPTANCE 4: PASS (both node tasks at 100%, {t1:.1}s / {t2:.1}s)");
}

fn six_cycle() -> Graph {
    Graph::plain(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])
}

fn two_triangles() -> Graph {
    Graph::plain(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
}

fn random_graph(rng: &mut ChaCha8Rng) -> Graph {
    let n = rng.gen_range(2..=8);
    let mut g = Graph::plain(n, &[]);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(0.4) {
                g.add_edge(u, v);
            }
        }
    }
    for v in 0..n {
        g.node_discrete[v] = vec![rng.gen_range(0..2)];
    }
    g
}

#[test]
fn criterion_5_expressiveness_suite() {
    // (a) Refinement alone cannot tell a six-cycle from two triangles;
    // the canonical digest can, and so can rooting.
    let c6 = six_cycle();
    let tt = two_triangles();
    let mut a = stable_colors(&c6, &[0; 6]);
    let mut b = stable_colors(&tt, &[0; 6]);
    a.sort_unstable();
    b.sort_unstable();
    assert_eq!(a, b, "refinement separates them; construction broken");
    let canonical = HashConfig::default();
    assert_ne!(subgraph_hash(&c6, 0, &canonical), subgraph_hash(&tt, 0, &canonical));
    let wl = HashConfig { mode: HashMode::Wl, ..HashConfig::default() };
    assert_ne!(subgraph_hash(&c6, 0, &wl), subgraph_hash(&tt, 0, &wl));

    // (b) Identical structure, identical hop shells, different orbits: a
    // spider with legs of length one and two whose leg features swap.
    let spider = |f: [u32; 4]| {
        let mut g = Graph::plain(4, &[(0, 1), (0, 2), (2, 3)]);
        for (v, &x) in f.iter().enumerate() {
            g.node_discrete[v] = vec![x];
        }
        g
    };
    let schema = FeatureSchema {
        discrete_arities: vec![3],
        continuous_count: 0,
        edge_arity: None,
    };
    let ga = spider([0, 1, 2, 0]);
    let gb = spider([0, 2, 1, 0]);
    assert_eq!(
        subgraph_hash(&Graph::plain(4, &ga.edges), 0, &canonical),
        subgraph_hash(&Graph::plain(4, &gb.edges), 0, &canonical)
    );
    assert_eq!(
        hop_distance_feature_vector(&ga, 0, &schema),
        hop_distance_feature_vector(&gb, 0, &schema)
    );
    let d = orbit_decomposition(&Graph::plain(4, &ga.edges), 0, &canonical);
    assert_ne!(
        orbit_feature_vector(&ga, &d, &schema),
        orbit_feature_vector(&gb, &d, &schema)
    );

    // (c) Multiplicity: disjoint unions of triangles and hexagons expose
    // the same digest set, so presence bits fail where counts succeed.
    let mut graphs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..24 {
        let (tri, hex) = if i % 2 == 0 { (1, 2) } else { (2, 1) };
        let mut g = Graph::plain(0, &[]);
        for _ in 0..tri {
            let o = g.node_count;
            g.node_count += 3;
            g.node_discrete.extend(vec![vec![0]; 3]);
            g.node_continuous.extend(vec![Vec::new(); 3]);
            g.add_edge(o, o + 1);
            g.add_edge(o, o + 2);
            g.add_edge(o + 1, o + 2);
        }
        for _ in 0..hex {
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
    let union_data = GraphDataset {
        graphs,
        labels,
        schema: FeatureSchema::constant(),
        name: "unions".into(),
    };
    let full = train_graph_classifier(&union_data, &cfg(1, 0)).unwrap();
    assert_eq!(full.evaluate_graphs(&union_data).accuracy, 1.0);
    let ablated = run_ablation(AblationVariant::NoCounts, &union_data, &union_data, &cfg(1, 0)).unwrap();
    assert!(ablated.accuracy <= 0.5, "presence bits scored {}", ablated.accuracy);

    // (d) Digests are permutation-invariant: 1000 random (graph,
    // permutation) pairs in both hash modes.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let g = random_graph(&mut rng);
        let mut perm: Vec<usize> = (0..g.node_count).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let root_new = perm.iter().position(|&p| p == 0).unwrap();
        let p = g.permuted(&perm);
        assert_eq!(subgraph_hash(&g, 0, &canonical), subgraph_hash(&p, root_new, &canonical));
        assert_eq!(subgraph_hash(&g, 0, &wl), subgraph_hash(&p, root_new, &wl));
    }

    // (e) The precomputed state tables agree with live tree walks for
    // arbitrary budgets.
    let data = gen_ba2motifs(0);
    let sub = data.subset(&(0..200).collect::<Vec<_>>(), "sub");
    let model = train_graph_classifier(&sub, &cfg(1, 0)).unwrap();
    let mut genomes = vec![vec![1; model.space.group_count()], model.genome.clone()];
    for s in 0..5u64 {
        let mut r = ChaCha8Rng::seed_from_u64(s);
        genomes.push((0..model.space.group_count()).map(|_| r.gen_range(1..=16)).collect());
    }
    for genome in &genomes {
        let matrix = model.space.count_matrix(genome);
        for (gi, g) in sub.graphs.iter().enumerate() {
            let nodes: Vec<usize> = (0..g.node_count).collect();
            let inst = extract_instances(g, &nodes, 1, &model.hash, EncodingKind::Orbit, &sub.schema);
            let pairs: Vec<_> = inst.into_iter().map(|i| (i.hash, i.z)).collect();
            assert_eq!(model.space.count_vector(&pairs, genome), matrix[gi]);
        }
    }
    println!("ACCEPTANCE 5: PASS (separation, orbit encoding, multiplicity, invariance, tables)");
}

#[test]
fn criterion_6_real_dataset_if_available() {
    // Needs the Mutagenicity download in TU layout; skipped when absent.
    let candidates = [
        std::env::var("SYMGRAPH_TU_DIR").unwrap_or_default(),
        "data/Mutagenicity".to_string(),
        "../data/Mutagenicity".to_string(),
    ];
    let found = candidates
        .iter()
        .filter(|p| !p.is_empty())
        .find(|p| std::path::Path::new(p).join("Mutagenicity_A.txt").exists());
    let Some(dir) = found else {
        println!("ACCEPTANCE 6: SKIP (Mutagenicity data not present)");
        return;
    };
    let data = load_tu_dataset(std::path::Path::new(dir), "Mutagenicity").unwrap();
    let (train, test) = split_dataset(&data, 0.8, 0).unwrap();
    let mut config = cfg(1, 0);
    config.ga_enabled = true;
    let model = train_graph_classifier(&train, &config).unwrap();
    let report = model.evaluate_graphs(&test);
    assert!(report.accuracy >= 0.75, "accuracy {}", report.accuracy);
    println!("ACCEPTANCE 6: PASS (test accuracy {:.3})", report.accuracy);
}

#[test]
fn criterion_7_equal_seeds_give_identical_bytes() {
    let d1 = gen_ba2motifs(7);
    let d2 = gen_ba2motifs(7);
    assert_eq!(d1, d2);
    let sub = d1.subset(&(0..200).collect::<Vec<_>>(), "sub");
    let mut config = cfg(1, 7);
    config.ga_enabled = true;
    config.ga.population_size = 20;
    config.ga.generations = 2;
    let m1 = train_graph_classifier(&sub, &config).unwrap();
    let m2 = train_graph_classifier(&sub, &config).unwrap();
    let j1 = m1.to_json().unwrap();
    let j2 = m2.to_json().unwrap();
    assert_eq!(j1, j2, "model bytes differ between identical runs");
    let e1 = m1.evaluate_graphs(&d1);
    let e2 = TrainedModel::from_json(&j2).unwrap().evaluate_graphs(&d1);
    assert_eq!(e1, e2);
    println!("ACCEPTANCE 7: PASS (byte-identical models and metrics)");
}

#[test]
fn schemas_round_trip_via_generator_helpers() {
    // Keeps the public helpers exercised from outside the crate.
    assert_eq!(capped_degree_schema().discrete_arities, vec![6]);
}
