use std::collections::BTreeSet;

use crate::eulerize::EulerizedGraph;
use crate::EulerError;

/// A (semi-)Eulerian node walk: consecutive nodes are adjacent in the
/// eulerized multigraph and every multigraph edge is traversed exactly once.
/// Positions are unassigned until `cyclic_reindex` runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerPath {
    pub nodes: Vec<usize>,
}

/// An Euler path with cyclically re-indexed node position ids: equal vertices
/// carry equal ids, distinct vertices distinct ids, all within [0, window).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedEulerPath {
    pub nodes: Vec<usize>,
    pub position_ids: Vec<usize>,
    pub offset: usize,
    pub window: usize,
}

impl IndexedEulerPath {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Position id of one query vertex, if it appears on the path.
    pub fn position_of(&self, vertex: usize) -> Option<usize> {
        self.nodes
            .iter()
            .position(|&v| v == vertex)
            .map(|i| self.position_ids[i])
    }

    /// Debug dump used by golden-file tests:
    /// `path: v0 v1 ... / pos: p0 p1 ...`
    pub fn dump(&self) -> String {
        let nodes: Vec<String> = self.nodes.iter().map(|v| v.to_string()).collect();
        let pos: Vec<String> = self.position_ids.iter().map(|p| p.to_string()).collect();
        format!("path: {} / pos: {}", nodes.join(" "), pos.join(" "))
    }
}

/// Hierholzer traversal of the eulerized multigraph. Starts at the smaller-id
/// odd vertex when the graph is semi-Eulerian, at vertex 0 otherwise; always
/// takes the smallest-id unused neighbor, so the walk is deterministic.
pub fn euler_path(eg: &EulerizedGraph) -> EulerPath {
    let base = eg.base();
    let n = base.vertex_count();

    // incidence lists over base + duplicated edges, each edge with its own id
    let mut incidence: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut edge_id = 0usize;
    let push = |incidence: &mut Vec<Vec<(usize, usize)>>, u: usize, v: usize, id: usize| {
        incidence[u].push((v, id));
        incidence[v].push((u, id));
    };
    for (u, v) in base.edges() {
        push(&mut incidence, u, v, edge_id);
        edge_id += 1;
    }
    for &(u, v) in eg.duplicated_edges() {
        push(&mut incidence, u, v, edge_id);
        edge_id += 1;
    }
    let total_edges = edge_id;
    for list in &mut incidence {
        list.sort_unstable();
    }

    let odd = eg.odd_vertices();
    let start = if odd.len() == 2 { odd[0] } else { 0 };

    let mut used = vec![false; total_edges];
    let mut cursor = vec![0usize; n];
    let mut stack = vec![start];
    let mut out = Vec::with_capacity(total_edges + 1);
    while let Some(&v) = stack.last() {
        let mut advanced = false;
        while cursor[v] < incidence[v].len() {
            let (w, id) = incidence[v][cursor[v]];
            if used[id] {
                cursor[v] += 1;
                continue;
            }
            used[id] = true;
            cursor[v] += 1;
            stack.push(w);
            advanced = true;
            break;
        }
        if !advanced {
            out.push(stack.pop().unwrap());
        }
    }
    out.reverse();
    debug_assert_eq!(out.len(), total_edges + 1);
    EulerPath { nodes: out }
}

/// Assigns node position ids: distinct vertices are ranked by first
/// occurrence 0, 1, 2, ... and each rank i maps to (i + offset) mod window.
pub fn cyclic_reindex(
    path: &EulerPath,
    offset: usize,
    window: usize,
) -> Result<IndexedEulerPath, EulerError> {
    if window == 0 || offset >= window {
        return Err(EulerError::OffsetOutOfRange { offset, window });
    }
    let max_vertex = path.nodes.iter().copied().max().unwrap_or(0);
    let mut rank = vec![usize::MAX; max_vertex + 1];
    let mut distinct = 0usize;
    for &v in &path.nodes {
        if rank[v] == usize::MAX {
            rank[v] = distinct;
            distinct += 1;
        }
    }
    if distinct > window {
        return Err(EulerError::WindowExceeded { distinct, window });
    }
    let position_ids = path
        .nodes
        .iter()
        .map(|&v| (rank[v] + offset) % window)
        .collect();
    Ok(IndexedEulerPath {
        nodes: path.nodes.clone(),
        position_ids,
        offset,
        window,
    })
}

/// Deduplicated simple-graph edge set of the path's consecutive pairs; for a
/// path produced by `euler_path(eulerize(g))` this is exactly g's edge set.
pub fn reconstruct_graph(nodes: &[usize]) -> BTreeSet<(usize, usize)> {
    nodes
        .windows(2)
        .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
        .collect()
}
