//! Shared fixtures for the acceptance suite: seeded instance generators, the
//! exhaustive eulerization oracle, and pass/fail reporting.

use std::collections::{BTreeSet, VecDeque};

use neugn_graph_core::LabeledGraph;
use neugn_neural_nav::{Hyperparams, ModelParams};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;

pub fn report(criterion: usize, what: &str, pass: bool) {
    println!(
        "criterion {criterion:>2}: {} - {what}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// Connected random graph: spanning tree plus extra random edges, labels
/// uniform over `labels`.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, labels: usize) -> LabeledGraph {
    let mut edges = BTreeSet::new();
    for v in 1..n {
        edges.insert((rng.random_range(0..v), v));
    }
    for _ in 0..n * 3 / 2 {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let labels = (0..n).map(|_| rng.random_range(0..labels)).collect();
    let edges: Vec<_> = edges.into_iter().collect();
    LabeledGraph::new(labels, &edges).unwrap()
}

/// Synthetic data graph for the training criteria: label-themed communities
/// of 9..=16 vertices (two dominant labels each, mirroring homophily in real
/// networks), ring-bridged, topped up with random edges to the target
/// average degree, then vertex ids shuffled. Retries seeds until connected.
pub fn synthetic_graph(seed: u64, n: usize, label_count: usize, avg_degree: usize) -> LabeledGraph {
    let mut attempt = seed;
    loop {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(attempt);
        let mut labels_raw = vec![0usize; n];
        let mut edges_raw: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut communities: Vec<Vec<usize>> = Vec::new();
        let mut start = 0usize;
        while start < n {
            let size = rng.random_range(9..=16).min(n - start);
            let community: Vec<usize> = (start..start + size).collect();
            let theme = (rng.random_range(0..label_count), rng.random_range(0..label_count));
            for &v in &community {
                let r: f64 = rng.random();
                labels_raw[v] = if r < 0.45 {
                    theme.0
                } else if r < 0.8 {
                    theme.1
                } else {
                    rng.random_range(0..label_count)
                };
            }
            let p = 5.0 / (size.max(2) - 1) as f64;
            for i in 0..size {
                for j in (i + 1)..size {
                    if rng.random::<f64>() < p {
                        edges_raw.insert((community[i], community[j]));
                    }
                }
            }
            communities.push(community);
            start += size;
        }
        for idx in 0..communities.len() {
            let a = communities[idx][rng.random_range(0..communities[idx].len())];
            let next = &communities[(idx + 1) % communities.len()];
            let b = next[rng.random_range(0..next.len())];
            if a != b {
                edges_raw.insert((a.min(b), a.max(b)));
            }
        }
        while edges_raw.len() < n * avg_degree / 2 {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v {
                edges_raw.insert((u.min(v), u.max(v)));
            }
        }

        // shuffle vertex ids so the baseline's ascending-id order carries no
        // accidental community locality
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut labels = vec![0usize; n];
        for (old, &new) in perm.iter().enumerate() {
            labels[new] = labels_raw[old];
        }
        let edges: Vec<(usize, usize)> = edges_raw
            .iter()
            .map(|&(u, v)| (perm[u].min(perm[v]), perm[u].max(perm[v])))
            .collect();
        let graph = LabeledGraph::new(labels, &edges).unwrap();
        if graph.is_connected() {
            return graph;
        }
        attempt = attempt.wrapping_add(0x9E37_79B9);
    }
}

/// Samples connected size-`size` queries and keeps the dense ones (average
/// degree at least 3) until `count` have been collected.
pub fn dense_query_set(
    graph: &LabeledGraph,
    count: usize,
    size: usize,
    seed: u64,
) -> Vec<LabeledGraph> {
    let mut queries = Vec::with_capacity(count);
    let mut batch_seed = seed;
    while queries.len() < count {
        let set = neugn_graph_core::generate_query_set(graph, 50, size, batch_seed, "dense")
            .expect("graph large enough to sample");
        for q in set.queries {
            if 2 * q.edge_count() >= 3 * q.vertex_count() {
                queries.push(q);
                if queries.len() == count {
                    break;
                }
            }
        }
        batch_seed = batch_seed.wrapping_add(1);
    }
    queries
}

/// Small randomly initialized navigator sized to the data graph; ranking
/// quality is irrelevant where only completeness is under test.
pub fn random_model(data: &LabeledGraph, seed: u64) -> ModelParams {
    let hp = Hyperparams {
        dim: 16,
        layers: 1,
        heads: 2,
        ffn_dim: 32,
        window: 16,
        vocab: data.vertex_count(),
        label_vocab: data.label_count().max(1),
        max_len: 96,
        gcn_layers: 2,
    };
    ModelParams::init(hp, seed).unwrap()
}

/// Exhaustive oracle for eulerization minimality: the cheapest way to pair
/// up all but two odd-degree vertices by BFS shortest-path length.
pub fn exhaustive_min_duplication(g: &LabeledGraph) -> usize {
    let odd: Vec<usize> = (0..g.vertex_count()).filter(|&v| g.degree(v) % 2 == 1).collect();
    if odd.len() <= 2 {
        return 0;
    }
    let dist = |a: usize, b: usize| -> usize {
        let mut d = vec![usize::MAX; g.vertex_count()];
        let mut queue = VecDeque::from([a]);
        d[a] = 0;
        while let Some(v) = queue.pop_front() {
            if v == b {
                return d[v];
            }
            for &w in g.neighbors(v) {
                if d[w] == usize::MAX {
                    d[w] = d[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        unreachable!("connected graph")
    };

    fn pairings(rest: &[usize], dist: &dyn Fn(usize, usize) -> usize) -> usize {
        if rest.is_empty() {
            return 0;
        }
        let first = rest[0];
        let mut best = usize::MAX;
        for i in 1..rest.len() {
            let mut remaining: Vec<usize> = rest[1..].to_vec();
            let partner = remaining.remove(i - 1);
            best = best.min(dist(first, partner) + pairings(&remaining, dist));
        }
        best
    }

    let mut best = usize::MAX;
    for i in 0..odd.len() {
        for j in (i + 1)..odd.len() {
            let rest: Vec<usize> = odd
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i && k != j)
                .map(|(_, &v)| v)
                .collect();
            best = best.min(pairings(&rest, &dist));
        }
    }
    best
}

/// Drops the trailing wall-clock column from every CSV line, leaving the
/// deterministic payload.
pub fn mask_wall_clock(csv: &[u8]) -> String {
    String::from_utf8_lossy(csv)
        .lines()
        .map(|line| line.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap_or_default())
        .collect::<Vec<_>>()
        .join("\n")
}
