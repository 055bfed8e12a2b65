//! Command-line interface: dataset generation, training, evaluation and
//! explanation.
//!
//! Exit codes: 0 on success, 2 on bad input (arguments, files, formats),
//! 3 when an internal invariant is violated.

use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use symgraph::error::{DataError, ModelError};
use symgraph::ga::GaParams;
use symgraph::graph::{split_dataset, GraphDataset, NodeTask};
use symgraph::hashing::{HashConfig, HashMode};
use symgraph::pipeline::{
    run_ablation, train_graph_classifier, train_node_classifier, AblationVariant, ClassifierKind,
    ClassifierModel, EncodingKind, PipelineConfig, TrainedModel,
};
use symgraph::rules::{extract_global_rules, ground_predicate, predicate_dot};
use symgraph::synth::{gen_ba2motifs, gen_bamultishapes, gen_bashapes, gen_treegrid};
use symgraph::tu::{load_tu_dataset, write_tu_dataset};

#[derive(Parser)]
#[command(
    name = "symgraph",
    about = "Symbolic graph classification from subgraph census predicates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DatasetName {
    Ba2motifs,
    Bamultishapes,
    Bashapes,
    Treegrid,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassifierArg {
    Dt,
    Rf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    NoOrbits,
    NoCounts,
    NoGa,
}

#[derive(clap::Args)]
struct TrainOpts {
    /// Directory holding either a TU-format dataset or a node_task.json.
    #[arg(long)]
    dataset_dir: PathBuf,
    /// Dataset name inside the directory; defaults to the directory name.
    #[arg(long)]
    dataset_name: Option<String>,
    #[arg(long, default_value_t = 1)]
    k_hops: usize,
    /// Upper bound on every master tree's leaf count.
    #[arg(long, default_value_t = 16)]
    max_leaves_cap: usize,
    /// Cost-complexity pruning strength applied to master trees.
    #[arg(long, default_value_t = 0.0)]
    master_ccp_alpha: f64,
    #[arg(long, value_enum, default_value_t = ClassifierArg::Dt)]
    classifier: ClassifierArg,
    #[arg(long, default_value_t = 100)]
    n_trees: usize,
    /// Search per-digest leaf budgets with the genetic algorithm.
    #[arg(long, default_value_t = false)]
    ga: bool,
    #[arg(long, default_value_t = 100)]
    pop: usize,
    #[arg(long, default_value_t = 5)]
    gens: usize,
    /// Budget penalty coefficient of the fitness function.
    #[arg(long, default_value_t = 1e-4)]
    gamma: f64,
    /// Per-gene mutation probability.
    #[arg(long, default_value_t = 0.1)]
    mu: f64,
    #[arg(long, default_value_t = 48)]
    judge_max_leaves: usize,
    #[arg(long, default_value_t = 0.001)]
    judge_ccp_alpha: f64,
    /// Use plain color refinement instead of canonical hashing.
    #[arg(long, default_value_t = false)]
    wl: bool,
    /// Hop-distance shell encoding instead of orbits.
    #[arg(long, default_value_t = false)]
    hop_encoding: bool,
    /// Presence bits instead of counts.
    #[arg(long, default_value_t = false)]
    binarize: bool,
    /// Train fraction of a graph dataset (node tasks carry their masks).
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Generates a synthetic benchmark into a directory.
    GenData {
        #[arg(value_enum)]
        name: DatasetName,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Trains a model and writes it as JSON.
    Train {
        #[command(flatten)]
        opts: TrainOpts,
        #[arg(long)]
        model_out: PathBuf,
    },
    /// Evaluates a saved model on a dataset.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dataset_dir: PathBuf,
        #[arg(long)]
        dataset_name: Option<String>,
        /// Score only the test side of this split instead of everything.
        #[arg(long)]
        train_fraction: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Prints the model's global rules and grounded predicates.
    Explain {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Explain one graph of a dataset instead of the global rules.
        #[arg(long)]
        dataset_dir: Option<PathBuf>,
        #[arg(long)]
        dataset_name: Option<String>,
        #[arg(long)]
        graph_index: Option<usize>,
    },
    /// Trains an ablated variant and reports both scores.
    Ablate {
        #[command(flatten)]
        opts: TrainOpts,
        #[arg(long, value_enum)]
        variant: VariantArg,
    },
}

enum CliError {
    BadInput(String),
    Invariant(String),
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::BadInput(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Invariant(m) => CliError::Invariant(m),
            other => CliError::BadInput(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::BadInput(e.to_string())
    }
}

enum LoadedData {
    Graphs(GraphDataset),
    Node(Box<NodeTask>),
}

fn dataset_name_of(dir: &Path, explicit: &Option<String>) -> String {
    explicit.clone().unwrap_or_else(|| {
        dir.file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    })
}

fn load_data(dir: &Path, name: &Option<String>) -> Result<LoadedData, CliError> {
    let node_path = dir.join("node_task.json");
    if node_path.exists() {
        let text = std::fs::read_to_string(&node_path)?;
        let task: NodeTask = serde_json::from_str(&text)
            .map_err(|e| CliError::BadInput(format!("{}: {e}", node_path.display())))?;
        return Ok(LoadedData::Node(Box::new(task)));
    }
    let name = dataset_name_of(dir, name);
    Ok(LoadedData::Graphs(load_tu_dataset(dir, &name)?))
}

fn config_from_opts(opts: &TrainOpts) -> PipelineConfig {
    let mut cfg = PipelineConfig {
        k_hops: opts.k_hops,
        max_leaves_cap: opts.max_leaves_cap,
        master_ccp_alpha: opts.master_ccp_alpha,
        classifier: match opts.classifier {
            ClassifierArg::Dt => ClassifierKind::Dt,
            ClassifierArg::Rf => ClassifierKind::Rf,
        },
        n_trees: opts.n_trees,
        ga_enabled: opts.ga,
        ga: GaParams {
            population_size: opts.pop,
            generations: opts.gens,
            lambda_max: opts.max_leaves_cap,
            mutation_rate: opts.mu,
            seed: opts.seed,
            ..GaParams::default()
        },
        encoding: if opts.hop_encoding {
            EncodingKind::HopDistance
        } else {
            EncodingKind::Orbit
        },
        binarize_counts: opts.binarize,
        seed: opts.seed,
        ..PipelineConfig::default()
    };
    cfg.fitness.gamma = opts.gamma;
    cfg.fitness.judge_max_leaves = opts.judge_max_leaves;
    cfg.fitness.judge_ccp_alpha = opts.judge_ccp_alpha;
    if opts.wl {
        cfg.hash = HashConfig {
            mode: HashMode::Wl,
            ..HashConfig::default()
        };
    }
    cfg
}

fn cmd_gen_data(name: DatasetName, seed: u64, out: &Path) -> Result<(), CliError> {
    match name {
        DatasetName::Ba2motifs => {
            let data = gen_ba2motifs(seed);
            write_tu_dataset(&data, out, &data.name)?;
        }
        DatasetName::Bamultishapes => {
            let data = gen_bamultishapes(seed);
            write_tu_dataset(&data, out, &data.name)?;
        }
        DatasetName::Bashapes | DatasetName::Treegrid => {
            let task = if name == DatasetName::Bashapes {
                gen_bashapes(seed)
            } else {
                gen_treegrid(seed)
            };
            std::fs::create_dir_all(out)?;
            std::fs::write(
                out.join("node_task.json"),
                serde_json::to_string(&task).map_err(|e| CliError::Invariant(e.to_string()))?,
            )?;
        }
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_train(opts: &TrainOpts, model_out: &Path) -> Result<(), CliError> {
    let cfg = config_from_opts(opts);
    let started = Instant::now();
    let (model, train_report, test_report) =
        match load_data(&opts.dataset_dir, &opts.dataset_name)? {
            LoadedData::Graphs(data) => {
                let (train, test) = split_dataset(&data, opts.train_fraction, opts.seed)?;
                let model = train_graph_classifier(&train, &cfg)?;
                let tr = model.evaluate_graphs(&train);
                let te = model.evaluate_graphs(&test);
                (model, tr, te)
            }
            LoadedData::Node(task) => {
                let model = train_node_classifier(&task, &cfg)?;
                let tr = model.evaluate_nodes(&task, &task.train_mask);
                let te = model.evaluate_nodes(&task, &task.test_mask);
                (model, tr, te)
            }
        };
    let elapsed = started.elapsed().as_secs_f64();
    std::fs::write(model_out, model.to_json()?)?;
    println!(
        "{}",
        serde_json::json!({
            "dataset": model.name,
            "predicates": model.vocabulary().len(),
            "train": train_report,
            "test": test_report,
            "seconds": elapsed,
            "model": model_out.display().to_string(),
        })
    );
    Ok(())
}

fn cmd_eval(
    model_path: &Path,
    dir: &Path,
    name: &Option<String>,
    train_fraction: Option<f64>,
    seed: u64,
) -> Result<(), CliError> {
    let model = TrainedModel::from_json(&std::fs::read_to_string(model_path)?)?;
    let started = Instant::now();
    let report = match load_data(dir, name)? {
        LoadedData::Graphs(data) => match train_fraction {
            Some(f) => {
                let (_, test) = split_dataset(&data, f, seed)?;
                model.evaluate_graphs(&test)
            }
            None => model.evaluate_graphs(&data),
        },
        LoadedData::Node(task) => model.evaluate_nodes(&task, &task.test_mask),
    };
    println!(
        "{}",
        serde_json::json!({
            "model": model_path.display().to_string(),
            "report": report,
            "seconds": started.elapsed().as_secs_f64(),
        })
    );
    Ok(())
}

fn cmd_explain(
    model_path: &Path,
    format: FormatArg,
    dataset_dir: &Option<PathBuf>,
    dataset_name: &Option<String>,
    graph_index: Option<usize>,
) -> Result<(), CliError> {
    let model = TrainedModel::from_json(&std::fs::read_to_string(model_path)?)?;
    if let Some(idx) = graph_index {
        let dir = dataset_dir
            .as_ref()
            .ok_or_else(|| CliError::BadInput("--graph-index needs --dataset-dir".into()))?;
        let data = match load_data(dir, dataset_name)? {
            LoadedData::Graphs(d) => d,
            LoadedData::Node(_) => {
                return Err(CliError::BadInput(
                    "--graph-index applies to graph datasets".into(),
                ))
            }
        };
        let g = data
            .graphs
            .get(idx)
            .ok_or_else(|| CliError::BadInput(format!("graph index {idx} out of range")))?;
        let r = model.predict_graph(g);
        println!(
            "{}",
            serde_json::json!({
                "graph": idx,
                "predicted": r.class,
                "label": data.labels[idx],
                "counts": r.counts,
                "fired": r.fired.iter().map(|(v, k)| {
                    serde_json::json!({"node": v, "hash": k.hash.to_string(), "state": k.state})
                }).collect::<Vec<_>>(),
                "unseen_rate": r.unseen_rate,
            })
        );
        return Ok(());
    }
    if let ClassifierModel::Forest(f) = &model.classifier {
        // No faithful global rules exist for a vote; report importances.
        let imp = f.feature_importance();
        let vocab = model.vocabulary();
        match format {
            FormatArg::Json => println!(
                "{}",
                serde_json::json!({
                    "importances": imp.iter().enumerate().map(|(i, w)| {
                        serde_json::json!({
                            "predicate": i,
                            "hash": vocab[i].hash.to_string(),
                            "state": vocab[i].state,
                            "importance": w,
                        })
                    }).collect::<Vec<_>>()
                })
            ),
            _ => {
                for (i, w) in imp.iter().enumerate() {
                    println!("P{i} ({},q{}) importance {w:.6}", vocab[i].hash, vocab[i].state);
                }
            }
        }
        return Ok(());
    }
    let rules = extract_global_rules(&model)?;
    let vocab = model.vocabulary();
    let grounded: Result<Vec<_>, _> =
        (0..vocab.len()).map(|i| ground_predicate(&model, i)).collect();
    let grounded = grounded?;
    match format {
        FormatArg::Text => {
            print!("{}", rules.to_text(&vocab));
            println!();
            for g in &grounded {
                println!("{}", g.text);
            }
        }
        FormatArg::Json => println!(
            "{}",
            serde_json::json!({ "rules": rules, "predicates": grounded })
        ),
        FormatArg::Dot => {
            for g in &grounded {
                print!("{}", predicate_dot(g));
            }
        }
    }
    Ok(())
}

fn cmd_ablate(opts: &TrainOpts, variant: VariantArg) -> Result<(), CliError> {
    let cfg = config_from_opts(opts);
    let variant = match variant {
        VariantArg::NoOrbits => AblationVariant::NoOrbits,
        VariantArg::NoCounts => AblationVariant::NoCounts,
        VariantArg::NoGa => AblationVariant::NoGa,
    };
    let data = match load_data(&opts.dataset_dir, &opts.dataset_name)? {
        LoadedData::Graphs(d) => d,
        LoadedData::Node(_) => {
            return Err(CliError::BadInput(
                "ablations are defined for graph datasets".into(),
            ))
        }
    };
    let (train, test) = split_dataset(&data, opts.train_fraction, opts.seed)?;
    let full = train_graph_classifier(&train, &cfg)?.evaluate_graphs(&test);
    let ablated = run_ablation(variant, &train, &test, &cfg)?;
    println!(
        "{}",
        serde_json::json!({ "full": full, "ablated": ablated })
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenData { name, seed, out } => cmd_gen_data(name, seed, &out),
        Command::Train { opts, model_out } => cmd_train(&opts, &model_out),
        Command::Eval {
            model,
            dataset_dir,
            dataset_name,
            train_fraction,
            seed,
        } => cmd_eval(&model, &dataset_dir, &dataset_name, train_fraction, seed),
        Command::Explain {
            model,
            format,
            dataset_dir,
            dataset_name,
            graph_index,
        } => cmd_explain(&model, format, &dataset_dir, &dataset_name, graph_index),
        Command::Ablate { opts, variant } => cmd_ablate(&opts, variant),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::BadInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Invariant(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
