use std::collections::VecDeque;

use crate::error::GraphError;

/// An undirected vertex-labeled simple graph with dense 0-based vertex ids.
///
/// Immutable after construction; adjacency lists are kept sorted so that
/// neighbor scans and edge lookups are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    labels: Vec<usize>,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl LabeledGraph {
    /// Builds a graph from per-vertex labels and an undirected edge list.
    /// Rejects self-loops, duplicate edges, and out-of-range endpoints.
    pub fn new(labels: Vec<usize>, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::InvalidGraph(format!(
                    "edge ({u}, {v}) has an endpoint out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(GraphError::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(GraphError::InvalidGraph(format!(
                    "duplicate edge at vertex {v}"
                )));
            }
        }
        Ok(LabeledGraph {
            labels,
            adj,
            edge_count: edges.len(),
        })
    }

    /// Single vertex, no edges.
    pub fn single(label: usize) -> Self {
        LabeledGraph {
            labels: vec![label],
            adj: vec![Vec::new()],
            edge_count: 0,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Iterates undirected edges as (u, v) with u < v, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&v| u < v)
                .map(move |&v| (u, v))
        })
    }

    /// Number of distinct labels assuming the 0-based dense convention:
    /// max label + 1, or 0 for the empty graph.
    pub fn label_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m + 1)
    }

    /// Vertices reachable from `start`, in BFS discovery order.
    pub fn component_of(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::new();
        let mut out = Vec::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            out.push(v);
            for &w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        match self.vertex_count() {
            0 => true,
            _ => self.component_of(0).len() == self.vertex_count(),
        }
    }

    /// Induced subgraph over `vertices` (deduplicated, renumbered by ascending
    /// original id). Returns the subgraph and the mapping new id -> original id.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> (LabeledGraph, Vec<usize>) {
        let mut picked: Vec<usize> = vertices.to_vec();
        picked.sort_unstable();
        picked.dedup();
        let mut index_of = vec![usize::MAX; self.vertex_count()];
        for (new, &old) in picked.iter().enumerate() {
            index_of[old] = new;
        }
        let labels = picked.iter().map(|&v| self.labels[v]).collect();
        let mut edges = Vec::new();
        for &u in &picked {
            for &v in self.neighbors(u) {
                if u < v && index_of[v] != usize::MAX {
                    edges.push((index_of[u], index_of[v]));
                }
            }
        }
        let sub = LabeledGraph::new(labels, &edges).expect("induced subgraph is valid");
        (sub, picked)
    }

    /// Checks the structural invariants (symmetry, no self-loops, edge count).
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let mut half_degree_sum = 0usize;
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if v == u {
                    return Err(GraphError::InvalidGraph(format!("self-loop at {u}")));
                }
                if !self.has_edge(v, u) {
                    return Err(GraphError::InvalidGraph(format!(
                        "asymmetric adjacency: {u} -> {v} has no reverse entry"
                    )));
                }
            }
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(GraphError::InvalidGraph(format!("duplicate edge at {u}")));
            }
            half_degree_sum += list.len();
        }
        if half_degree_sum != 2 * self.edge_count {
            return Err(GraphError::InvalidGraph(format!(
                "edge count {} does not match adjacency size {}",
                self.edge_count,
                half_degree_sum / 2
            )));
        }
        Ok(())
    }
}

/// A complete assignment of query vertices to data vertices, stored in the
/// order the pairs were produced (enumeration order for engine output).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pairs: Vec<(usize, usize)>,
}

impl Match {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Match { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn image_of(&self, query_vertex: usize) -> Option<usize> {
        self.pairs
            .iter()
            .find(|&&(u, _)| u == query_vertex)
            .map(|&(_, v)| v)
    }

    /// Pairs sorted by query vertex; the order-independent identity of a match.
    pub fn canonical(&self) -> Vec<(usize, usize)> {
        let mut pairs = self.pairs.clone();
        pairs.sort_unstable();
        pairs
    }
}
