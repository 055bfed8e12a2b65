//! Brute-force isomorphism oracles.
//!
//! Exhaustive permutation search, intentionally independent of the hashing
//! and orbit machinery it is used to cross-check. Only suitable for small
//! graphs (exact isomorphism) or small patterns (induced subgraph search).

use crate::graph::Graph;

fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; g.node_count]; g.node_count];
    for &(u, v) in &g.edges {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

fn edge_label_matrix(g: &Graph) -> Option<Vec<Vec<Option<u32>>>> {
    g.edge_labels.as_ref().map(|labels| {
        let mut m = vec![vec![None; g.node_count]; g.node_count];
        for (i, &(u, v)) in g.edges.iter().enumerate() {
            m[u][v] = Some(labels[i]);
            m[v][u] = Some(labels[i]);
        }
        m
    })
}

fn features_match(a: &Graph, b: &Graph, i: usize, j: usize) -> bool {
    a.node_discrete[i] == b.node_discrete[j] && a.node_continuous[i] == b.node_continuous[j]
}

/// Checks whether `mapping` (a-node -> b-node) is a full isomorphism.
fn is_isomorphism(a: &Graph, b: &Graph, mapping: &[usize]) -> bool {
    let am = adjacency_matrix(a);
    let bm = adjacency_matrix(b);
    let al = edge_label_matrix(a);
    let bl = edge_label_matrix(b);
    for i in 0..a.node_count {
        if !features_match(a, b, i, mapping[i]) {
            return false;
        }
        for j in (i + 1)..a.node_count {
            if am[i][j] != bm[mapping[i]][mapping[j]] {
                return false;
            }
            if let (Some(al), Some(bl)) = (&al, &bl) {
                if am[i][j] && al[i][j] != bl[mapping[i]][mapping[j]] {
                    return false;
                }
            }
        }
    }
    true
}

fn search_isomorphism(a: &Graph, b: &Graph, fixed_root: bool) -> bool {
    if a.node_count != b.node_count || a.edge_count() != b.edge_count() {
        return false;
    }
    let mut da = a.degrees();
    let mut db = b.degrees();
    if fixed_root {
        if da.first() != db.first() {
            return false;
        }
    }
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return false;
    }
    let n = a.node_count;
    let am = adjacency_matrix(a);
    let bm = adjacency_matrix(b);
    let al = edge_label_matrix(a);
    let bl = edge_label_matrix(b);
    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if fixed_root {
        if !features_match(a, b, 0, 0) {
            return false;
        }
        mapping[0] = 0;
        used[0] = true;
    }

    fn extend(
        pos: usize,
        n: usize,
        a: &Graph,
        b: &Graph,
        am: &[Vec<bool>],
        bm: &[Vec<bool>],
        al: &Option<Vec<Vec<Option<u32>>>>,
        bl: &Option<Vec<Vec<Option<u32>>>>,
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if pos == n {
            return true;
        }
        if mapping[pos] != usize::MAX {
            return extend(pos + 1, n, a, b, am, bm, al, bl, mapping, used);
        }
        for cand in 0..n {
            if used[cand] || !features_match(a, b, pos, cand) {
                continue;
            }
            let mut ok = true;
            for prev in 0..pos {
                let pm = mapping[prev];
                if pm == usize::MAX {
                    continue;
                }
                if am[pos][prev] != bm[cand][pm] {
                    ok = false;
                    break;
                }
                if let (Some(al), Some(bl)) = (al, bl) {
                    if am[pos][prev] && al[pos][prev] != bl[cand][pm] {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            mapping[pos] = cand;
            used[cand] = true;
            if extend(pos + 1, n, a, b, am, bm, al, bl, mapping, used) {
                return true;
            }
            mapping[pos] = usize::MAX;
            used[cand] = false;
        }
        false
    }

    let found = extend(0, n, a, b, &am, &bm, &al, &bl, &mut mapping, &mut used);
    found && is_isomorphism(a, b, &mapping)
}

/// Exact isomorphism test by backtracking search.
pub fn are_isomorphic(a: &Graph, b: &Graph) -> bool {
    search_isomorphism(a, b, false)
}

/// Isomorphism test with both roots pinned at local index 0.
pub fn are_isomorphic_rooted(a: &Graph, b: &Graph) -> bool {
    search_isomorphism(a, b, true)
}

/// Exact automorphism node orbits by enumerating all permutations.
/// Only usable for very small graphs.
pub fn automorphism_orbits(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.node_count;
    assert!(n <= 8, "automorphism_orbits is exponential; n <= 8 required");
    let am = adjacency_matrix(g);
    let al = edge_label_matrix(g);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut auto = true;
        'outer: for i in 0..n {
            if !features_match(g, g, i, perm[i]) {
                auto = false;
                break;
            }
            for j in (i + 1)..n {
                if am[i][j] != am[perm[i]][perm[j]] {
                    auto = false;
                    break 'outer;
                }
                if let Some(al) = &al {
                    if am[i][j] && al[i][j] != al[perm[i]][perm[j]] {
                        auto = false;
                        break 'outer;
                    }
                }
            }
        }
        if auto {
            for i in 0..n {
                let (a, b) = (find(&mut parent, i), find(&mut parent, perm[i]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut orbits: Vec<Vec<usize>> = groups.into_values().collect();
    orbits.sort_by_key(|o| o[0]);
    orbits
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Searches for the structure-only pattern as an induced subgraph of the
/// host (node and edge features ignored). Returns one host-node assignment.
pub fn find_induced_subgraph(pattern: &Graph, host: &Graph) -> Option<Vec<usize>> {
    let pn = pattern.node_count;
    if pn > host.node_count || pattern.edge_count() > host.edge_count() {
        return None;
    }
    let pm = adjacency_matrix(pattern);
    let hm = adjacency_matrix(host);
    let pdeg = pattern.degrees();
    let hdeg = host.degrees();
    let host_adj = host.adjacency();

    // Visit pattern nodes in a connectivity-first order, highest degree first.
    let mut order: Vec<usize> = Vec::with_capacity(pn);
    let mut placed = vec![false; pn];
    while order.len() < pn {
        let next = (0..pn)
            .filter(|&i| !placed[i])
            .max_by_key(|&i| {
                let anchored = order.iter().filter(|&&o| pm[i][o]).count();
                (anchored, pdeg[i])
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }

    let mut mapping = vec![usize::MAX; pn];
    let mut used = vec![false; host.node_count];

    fn extend(
        step: usize,
        order: &[usize],
        pm: &[Vec<bool>],
        hm: &[Vec<bool>],
        pdeg: &[usize],
        hdeg: &[usize],
        host_adj: &[Vec<(usize, Option<u32>)>],
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if step == order.len() {
            return true;
        }
        let p = order[step];
        // Candidates: neighbors of an already-mapped pattern neighbor when
        // one exists, otherwise all host nodes.
        let anchor = order[..step].iter().find(|&&o| pm[p][o]).copied();
        let candidates: Vec<usize> = match anchor {
            Some(o) => host_adj[mapping[o]].iter().map(|&(w, _)| w).collect(),
            None => (0..hdeg.len()).collect(),
        };
        for cand in candidates {
            if used[cand] || hdeg[cand] < pdeg[p] {
                continue;
            }
            let ok = order[..step].iter().all(|&o| {
                // Induced: adjacency must match exactly.
                pm[p][o] == hm[cand][mapping[o]]
            });
            if !ok {
                continue;
            }
            mapping[p] = cand;
            used[cand] = true;
            if extend(step + 1, order, pm, hm, pdeg, hdeg, host_adj, mapping, used) {
                return true;
            }
            mapping[p] = usize::MAX;
            used[cand] = false;
        }
        false
    }

    if extend(
        0, &order, &pm, &hm, &pdeg, &hdeg, &host_adj, &mut mapping, &mut used,
    ) {
        Some(mapping)
    } else {
        None
    }
}

/// Whether the host contains the pattern as an induced subgraph
/// (structure only).
pub fn contains_induced(pattern: &Graph, host: &Graph) -> bool {
    find_induced_subgraph(pattern, host).is_some()
}
