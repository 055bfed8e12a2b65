//! TUDataset text-format reader and writer.
//!
//! Layout per dataset `NAME` inside one directory:
//! `NAME_A.txt` (comma-separated 1-based node pairs, one edge per line),
//! `NAME_graph_indicator.txt` (1-based graph id per node line),
//! `NAME_graph_labels.txt` (one integer per graph), and optionally
//! `NAME_node_labels.txt`, `NAME_edge_labels.txt` (one integer per line)
//! and `NAME_node_attributes.txt` (comma-separated reals per node).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::DataError;
use crate::graph::{FeatureSchema, Graph, GraphDataset};

fn read_lines(path: &Path) -> Result<Vec<String>, DataError> {
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(text
        .lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect())
}

fn parse_int(path: &Path, line_no: usize, token: &str) -> Result<i64, DataError> {
    token.trim().parse::<i64>().map_err(|_| DataError::Parse {
        path: path.display().to_string(),
        line: line_no + 1,
        message: format!("expected integer, got {token:?}"),
    })
}

fn parse_real(path: &Path, line_no: usize, token: &str) -> Result<f64, DataError> {
    token.trim().parse::<f64>().map_err(|_| DataError::Parse {
        path: path.display().to_string(),
        line: line_no + 1,
        message: format!("expected real, got {token:?}"),
    })
}

/// Loads a TU-format dataset from `directory_path`.
///
/// Directed duplicate edges are merged to one undirected edge; a lone
/// directed edge is treated as undirected. Graph labels are remapped to
/// contiguous `0..C-1` preserving ascending original order.
pub fn load_tu_dataset(directory_path: &Path, name: &str) -> Result<GraphDataset, DataError> {
    let file = |suffix: &str| directory_path.join(format!("{name}_{suffix}.txt"));
    for mandatory in ["A", "graph_indicator", "graph_labels"] {
        if !file(mandatory).exists() {
            return Err(DataError::MissingFile(file(mandatory).display().to_string()));
        }
    }

    let indicator_path = file("graph_indicator");
    let indicator_lines = read_lines(&indicator_path)?;
    let node_total = indicator_lines.len();
    let mut graph_of_node = Vec::with_capacity(node_total);
    for (i, l) in indicator_lines.iter().enumerate() {
        let gid = parse_int(&indicator_path, i, l)?;
        if gid < 1 {
            return Err(DataError::Parse {
                path: indicator_path.display().to_string(),
                line: i + 1,
                message: format!("graph indicator must be >= 1, got {gid}"),
            });
        }
        graph_of_node.push(gid as usize - 1);
    }
    let graph_total = graph_of_node.iter().copied().max().map_or(0, |m| m + 1);
    if graph_total == 0 {
        return Err(DataError::Invalid("dataset contains no nodes".into()));
    }

    let labels_path = file("graph_labels");
    let label_lines = read_lines(&labels_path)?;
    if label_lines.len() != graph_total {
        return Err(DataError::Invalid(format!(
            "{} graph labels for {} graphs",
            label_lines.len(),
            graph_total
        )));
    }
    let raw_labels: Vec<i64> = label_lines
        .iter()
        .enumerate()
        .map(|(i, l)| parse_int(&labels_path, i, l))
        .collect::<Result<_, _>>()?;
    let mut distinct: Vec<i64> = raw_labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(DataError::Invalid(format!(
            "dataset must have at least 2 classes, found {}",
            distinct.len()
        )));
    }
    let remap: BTreeMap<i64, usize> =
        distinct.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let labels: Vec<usize> = raw_labels.iter().map(|v| remap[v]).collect();

    // Local node index within its graph.
    let mut node_counts = vec![0usize; graph_total];
    let mut local_of_node = Vec::with_capacity(node_total);
    for &g in &graph_of_node {
        local_of_node.push(node_counts[g]);
        node_counts[g] += 1;
    }
    if node_counts.iter().any(|&c| c == 0) {
        return Err(DataError::Invalid("graph with zero nodes".into()));
    }

    // Node labels: one discrete column when present.
    let node_labels_path = file("node_labels");
    let node_labels: Option<Vec<u32>> = if node_labels_path.exists() {
        let lines = read_lines(&node_labels_path)?;
        if lines.len() != node_total {
            return Err(DataError::Invalid(format!(
                "{} node labels for {} nodes",
                lines.len(),
                node_total
            )));
        }
        let mut vals = Vec::with_capacity(node_total);
        for (i, l) in lines.iter().enumerate() {
            let v = parse_int(&node_labels_path, i, l)?;
            if v < 0 {
                return Err(DataError::Parse {
                    path: node_labels_path.display().to_string(),
                    line: i + 1,
                    message: format!("node label must be >= 0, got {v}"),
                });
            }
            vals.push(v as u32);
        }
        Some(vals)
    } else {
        None
    };

    let attrs_path = file("node_attributes");
    let node_attrs: Option<Vec<Vec<f64>>> = if attrs_path.exists() {
        let lines = read_lines(&attrs_path)?;
        if lines.len() != node_total {
            return Err(DataError::Invalid(format!(
                "{} node attribute rows for {} nodes",
                lines.len(),
                node_total
            )));
        }
        let mut rows = Vec::with_capacity(node_total);
        for (i, l) in lines.iter().enumerate() {
            let row: Vec<f64> = l
                .split(',')
                .map(|t| parse_real(&attrs_path, i, t))
                .collect::<Result<_, _>>()?;
            rows.push(row);
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(DataError::Invalid("inconsistent node attribute width".into()));
        }
        Some(rows)
    } else {
        None
    };

    let a_path = file("A");
    let edge_lines = read_lines(&a_path)?;
    let edge_labels_path = file("edge_labels");
    let edge_label_lines: Option<Vec<String>> = if edge_labels_path.exists() {
        let lines = read_lines(&edge_labels_path)?;
        if lines.len() != edge_lines.len() {
            return Err(DataError::Invalid(format!(
                "{} edge labels for {} edge lines",
                lines.len(),
                edge_lines.len()
            )));
        }
        Some(lines)
    } else {
        None
    };

    // Per-graph undirected edge set, label of first occurrence kept.
    let mut per_graph_edges: Vec<BTreeMap<(usize, usize), Option<u32>>> =
        vec![BTreeMap::new(); graph_total];
    for (i, l) in edge_lines.iter().enumerate() {
        let mut it = l.split(',');
        let (a, b) = match (it.next(), it.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(DataError::Parse {
                    path: a_path.display().to_string(),
                    line: i + 1,
                    message: "expected two comma-separated node ids".into(),
                })
            }
        };
        let u = parse_int(&a_path, i, a)?;
        let v = parse_int(&a_path, i, b)?;
        if u < 1 || v < 1 || u as usize > node_total || v as usize > node_total {
            return Err(DataError::Parse {
                path: a_path.display().to_string(),
                line: i + 1,
                message: format!("node id out of range: {u},{v}"),
            });
        }
        let (u, v) = (u as usize - 1, v as usize - 1);
        if u == v {
            continue;
        }
        let g = graph_of_node[u];
        if g != graph_of_node[v] {
            return Err(DataError::Parse {
                path: a_path.display().to_string(),
                line: i + 1,
                message: "edge crosses graph boundary".into(),
            });
        }
        let (lu, lv) = (local_of_node[u], local_of_node[v]);
        let key = (lu.min(lv), lu.max(lv));
        let lab = match &edge_label_lines {
            Some(lines) => {
                let v = parse_int(&edge_labels_path, i, &lines[i])?;
                if v < 0 {
                    return Err(DataError::Parse {
                        path: edge_labels_path.display().to_string(),
                        line: i + 1,
                        message: format!("edge label must be >= 0, got {v}"),
                    });
                }
                Some(v as u32)
            }
            None => None,
        };
        per_graph_edges[g].entry(key).or_insert(lab);
    }

    let discrete_arity = node_labels
        .as_ref()
        .map(|ls| ls.iter().copied().max().unwrap_or(0) + 1);
    let continuous_count = node_attrs.as_ref().map_or(0, |r| r[0].len());
    let edge_arity = edge_label_lines.as_ref().map(|_| {
        per_graph_edges
            .iter()
            .flat_map(|m| m.values())
            .filter_map(|l| *l)
            .max()
            .unwrap_or(0)
            + 1
    });

    let mut graphs = Vec::with_capacity(graph_total);
    let mut nodes_of_graph: Vec<Vec<usize>> = vec![Vec::new(); graph_total];
    for (n, &g) in graph_of_node.iter().enumerate() {
        nodes_of_graph[g].push(n);
    }
    for g in 0..graph_total {
        let edges: Vec<(usize, usize)> = per_graph_edges[g].keys().copied().collect();
        let labels_vec: Option<Vec<u32>> = if edge_label_lines.is_some() {
            Some(per_graph_edges[g].values().map(|l| l.unwrap()).collect())
        } else {
            None
        };
        graphs.push(Graph {
            node_count: node_counts[g],
            edges,
            node_discrete: nodes_of_graph[g]
                .iter()
                .map(|&n| match &node_labels {
                    Some(ls) => vec![ls[n]],
                    None => Vec::new(),
                })
                .collect(),
            node_continuous: nodes_of_graph[g]
                .iter()
                .map(|&n| match &node_attrs {
                    Some(rows) => rows[n].clone(),
                    None => Vec::new(),
                })
                .collect(),
            edge_labels: labels_vec,
        });
    }

    Ok(GraphDataset {
        graphs,
        labels,
        schema: FeatureSchema {
            discrete_arities: discrete_arity.map_or_else(Vec::new, |a| vec![a]),
            continuous_count,
            edge_arity,
        },
        name: name.to_string(),
    })
}

/// Writes a dataset in TU format. Each undirected edge is emitted in both
/// directions, as the TU collection does.
pub fn write_tu_dataset(
    data: &GraphDataset,
    directory_path: &Path,
    name: &str,
) -> Result<(), DataError> {
    if data.schema.discrete_arities.len() > 1 {
        return Err(DataError::Invalid(
            "TU format carries at most one discrete node column".into(),
        ));
    }
    fs::create_dir_all(directory_path).map_err(|source| DataError::Io {
        path: directory_path.display().to_string(),
        source,
    })?;
    let write = |suffix: &str, body: String| -> Result<(), DataError> {
        let path = directory_path.join(format!("{name}_{suffix}.txt"));
        let mut f = fs::File::create(&path).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        f.write_all(body.as_bytes()).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })
    };

    let mut a = String::new();
    let mut indicator = String::new();
    let mut glabels = String::new();
    let mut nlabels = String::new();
    let mut nattrs = String::new();
    let mut elabels = String::new();
    let has_nlabels = !data.schema.discrete_arities.is_empty();
    let has_attrs = data.schema.continuous_count > 0;
    let has_elabels = data.schema.edge_arity.is_some();

    let mut offset = 1usize; // 1-based global node ids
    for (gi, g) in data.graphs.iter().enumerate() {
        glabels.push_str(&format!("{}\n", data.labels[gi]));
        for n in 0..g.node_count {
            indicator.push_str(&format!("{}\n", gi + 1));
            if has_nlabels {
                nlabels.push_str(&format!("{}\n", g.node_discrete[n][0]));
            }
            if has_attrs {
                let row: Vec<String> =
                    g.node_continuous[n].iter().map(|v| format!("{v}")).collect();
                nattrs.push_str(&format!("{}\n", row.join(",")));
            }
        }
        // Both directions, ascending by (source, target).
        let mut directed: Vec<(usize, usize, usize)> = Vec::with_capacity(g.edges.len() * 2);
        for (ei, &(u, v)) in g.edges.iter().enumerate() {
            directed.push((u, v, ei));
            directed.push((v, u, ei));
        }
        directed.sort_unstable();
        for (u, v, ei) in directed {
            a.push_str(&format!("{},{}\n", offset + u, offset + v));
            if has_elabels {
                elabels.push_str(&format!("{}\n", g.edge_labels.as_ref().unwrap()[ei]));
            }
        }
        offset += g.node_count;
    }

    write("A", a)?;
    write("graph_indicator", indicator)?;
    write("graph_labels", glabels)?;
    if has_nlabels {
        write("node_labels", nlabels)?;
    }
    if has_attrs {
        write("node_attributes", nattrs)?;
    }
    if has_elabels {
        write("edge_labels", elabels)?;
    }
    Ok(())
}
