use std::collections::VecDeque;

use neugn_graph_core::LabeledGraph;

use crate::EulerError;

/// A connected graph together with the multiset of duplicated edges that make
/// it (semi-)Eulerian: at most two vertices of the combined multigraph have
/// odd degree, and only existing edges are ever duplicated.
#[derive(Debug, Clone)]
pub struct EulerizedGraph {
    base: LabeledGraph,
    duplicated: Vec<(usize, usize)>,
}

impl EulerizedGraph {
    pub fn base(&self) -> &LabeledGraph {
        &self.base
    }

    /// Duplicated edges as (u, v) pairs with u < v; an edge may appear more
    /// than once.
    pub fn duplicated_edges(&self) -> &[(usize, usize)] {
        &self.duplicated
    }

    /// Degree of `v` in the eulerized multigraph.
    pub fn multigraph_degree(&self, v: usize) -> usize {
        let dup: usize = self
            .duplicated
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum();
        self.base.degree(v) + dup
    }

    /// Vertices of odd multigraph degree, ascending.
    pub fn odd_vertices(&self) -> Vec<usize> {
        (0..self.base.vertex_count())
            .filter(|&v| self.multigraph_degree(v) % 2 == 1)
            .collect()
    }

    /// Total multigraph edge count (base plus duplicates).
    pub fn total_edges(&self) -> usize {
        self.base.edge_count() + self.duplicated.len()
    }
}

/// Makes a connected graph (semi-)Eulerian by duplicating existing edges
/// along shortest paths between odd-degree vertices.
///
/// With two or fewer odd vertices nothing is duplicated. Otherwise all but
/// one pair of odd vertices are matched up so that the total number of
/// duplicated edges (the sum of pairwise shortest-path lengths) is minimal;
/// the two left unmatched become the endpoints of the semi-Eulerian path.
pub fn eulerize(graph: &LabeledGraph) -> Result<EulerizedGraph, EulerError> {
    if graph.vertex_count() == 0 || !graph.is_connected() {
        return Err(EulerError::Disconnected);
    }
    let odd: Vec<usize> = (0..graph.vertex_count())
        .filter(|&v| graph.degree(v) % 2 == 1)
        .collect();
    if odd.len() <= 2 {
        return Ok(EulerizedGraph {
            base: graph.clone(),
            duplicated: Vec::new(),
        });
    }

    // BFS from every odd vertex: distances to all vertices plus parent trees
    // for path reconstruction. Smallest-id-first expansion keeps the chosen
    // paths deterministic.
    let trees: Vec<BfsTree> = odd.iter().map(|&s| bfs_tree(graph, s)).collect();
    let k = odd.len();
    let mut dist = vec![vec![0usize; k]; k];
    for i in 0..k {
        for j in 0..k {
            dist[i][j] = trees[i].dist[odd[j]];
        }
    }

    let pairs = if k <= 16 {
        match_all_but_two_exact(&dist)
    } else {
        match_all_but_two_greedy(&dist)
    };

    let mut duplicated = Vec::new();
    for (i, j) in pairs {
        // walk the BFS parent chain from odd[j] back to odd[i]
        let mut v = odd[j];
        while v != odd[i] {
            let p = trees[i].parent[v];
            duplicated.push((p.min(v), p.max(v)));
            v = p;
        }
    }
    duplicated.sort_unstable();

    let eulerized = EulerizedGraph {
        base: graph.clone(),
        duplicated,
    };
    debug_assert!(eulerized.odd_vertices().len() <= 2);
    Ok(eulerized)
}

struct BfsTree {
    dist: Vec<usize>,
    parent: Vec<usize>,
}

fn bfs_tree(graph: &LabeledGraph, start: usize) -> BfsTree {
    let n = graph.vertex_count();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    dist[start] = 0;
    queue.push_back(start);
    while let Some(v) = queue.pop_front() {
        for &w in graph.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    BfsTree { dist, parent }
}

/// Exact minimum-cost matching of all odd vertices except one excluded pair,
/// by bitmask dynamic programming over subsets. Returns the matched pairs as
/// indices into the odd-vertex list.
fn match_all_but_two_exact(dist: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let k = dist.len();
    let full = (1usize << k) - 1;
    // cost[s] = minimal total distance perfectly matching the vertices in s
    let mut cost = vec![usize::MAX; 1 << k];
    let mut choice = vec![(0usize, 0usize); 1 << k];
    cost[0] = 0;
    for s in 1..=full {
        if (s.count_ones() % 2) != 0 {
            continue;
        }
        let i = s.trailing_zeros() as usize;
        let rest = s & !(1 << i);
        let mut bits = rest;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let sub = rest & !(1 << j);
            if cost[sub] != usize::MAX {
                let c = cost[sub] + dist[i][j];
                if c < cost[s] {
                    cost[s] = c;
                    choice[s] = (i, j);
                }
            }
        }
    }

    // pick the excluded pair: minimal matching cost over the rest; ties go to
    // the pair with the larger mutual distance (the farthest endpoints stay
    // as the semi-Eulerian endpoints), then lexicographically
    let mut best: Option<((usize, std::cmp::Reverse<usize>, usize, usize), (usize, usize))> = None;
    for i in 0..k {
        for j in (i + 1)..k {
            let s = full & !(1 << i) & !(1 << j);
            let key = (cost[s], std::cmp::Reverse(dist[i][j]), i, j);
            if best.as_ref().is_none_or(|(bk, _)| key < *bk) {
                best = Some((key, (i, j)));
            }
        }
    }
    let (_, (ei, ej)) = best.expect("at least four odd vertices");

    let mut pairs = Vec::new();
    let mut s = full & !(1 << ei) & !(1 << ej);
    while s != 0 {
        let (i, j) = choice[s];
        pairs.push((i, j));
        s &= !(1 << i) & !(1 << j);
    }
    pairs
}

/// Greedy fallback for many odd vertices: exclude the farthest pair, then
/// repeatedly match the smallest unmatched vertex with its nearest partner.
fn match_all_but_two_greedy(dist: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let k = dist.len();
    let mut excluded = (0usize, 1usize);
    for i in 0..k {
        for j in (i + 1)..k {
            if dist[i][j] > dist[excluded.0][excluded.1] {
                excluded = (i, j);
            }
        }
    }
    let mut matched = vec![false; k];
    matched[excluded.0] = true;
    matched[excluded.1] = true;
    let mut pairs = Vec::new();
    loop {
        let Some(i) = (0..k).find(|&i| !matched[i]) else {
            break;
        };
        matched[i] = true;
        let j = (0..k)
            .filter(|&j| !matched[j])
            .min_by_key(|&j| (dist[i][j], j))
            .expect("odd vertex count is even");
        matched[j] = true;
        pairs.push((i, j));
    }
    pairs
}
