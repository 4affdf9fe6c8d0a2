use neugn_graph_core::LabeledGraph;

/// Per query vertex, the sorted list of data vertices surviving the filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSets {
    sets: Vec<Vec<usize>>,
}

impl CandidateSets {
    pub fn candidates(&self, query_vertex: usize) -> &[usize] {
        &self.sets[query_vertex]
    }

    pub fn len(&self, query_vertex: usize) -> usize {
        self.sets[query_vertex].len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.iter().any(Vec::is_empty)
    }

    pub fn query_vertex_count(&self) -> usize {
        self.sets.len()
    }
}

/// Label-and-degree filter refined by neighbor-label frequencies: a data
/// vertex survives for query vertex u when the labels match, its degree
/// covers u's, and for every label it has at least as many neighbors of that
/// label as u does. Safe: every data vertex participating in a true match of
/// u satisfies all three conditions.
pub fn filter_nodes(query: &LabeledGraph, data: &LabeledGraph) -> CandidateSets {
    let label_count = query.label_count().max(data.label_count());
    let query_nlf: Vec<Vec<usize>> = (0..query.vertex_count())
        .map(|u| label_histogram(query, u, label_count))
        .collect();

    let mut sets = Vec::with_capacity(query.vertex_count());
    for u in 0..query.vertex_count() {
        let mut survivors = Vec::new();
        'candidates: for v in 0..data.vertex_count() {
            if data.label(v) != query.label(u) || data.degree(v) < query.degree(u) {
                continue;
            }
            let data_nlf = label_histogram(data, v, label_count);
            for label in 0..label_count {
                if data_nlf[label] < query_nlf[u][label] {
                    continue 'candidates;
                }
            }
            survivors.push(v);
        }
        sets.push(survivors);
    }
    CandidateSets { sets }
}

fn label_histogram(graph: &LabeledGraph, vertex: usize, label_count: usize) -> Vec<usize> {
    let mut hist = vec![0usize; label_count];
    for &w in graph.neighbors(vertex) {
        hist[graph.label(w)] += 1;
    }
    hist
}

#[cfg(test)]
mod tests {
    use super::*;
    use neugn_graph_core::brute_force_enumerate;

    fn graph(labels: &[usize], edges: &[(usize, usize)]) -> LabeledGraph {
        LabeledGraph::new(labels.to_vec(), edges).unwrap()
    }

    #[test]
    fn single_vertex_query_collects_all_matching_labels() {
        let q = graph(&[3], &[]);
        let g = graph(&[3, 1, 3, 3], &[(0, 1), (1, 2), (2, 3)]);
        let c = filter_nodes(&q, &g);
        assert_eq!(c.candidates(0), &[0, 2, 3]);
    }

    #[test]
    fn degree_rule_prunes_low_degree_vertices() {
        // query center has degree 4
        let q = graph(&[0, 1, 1, 1, 1], &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let g = graph(
            &[0, 1, 1, 1, 0, 1, 1, 1, 1],
            &[(0, 1), (0, 2), (0, 3), (4, 5), (4, 6), (4, 7), (4, 8)],
        );
        let c = filter_nodes(&q, &g);
        // data vertex 0 has degree 3 < 4, only vertex 4 qualifies
        assert_eq!(c.candidates(0), &[4]);
    }

    #[test]
    fn neighbor_label_frequency_rule() {
        // query vertex 0 needs two label-1 neighbors
        let q = graph(&[0, 1, 1], &[(0, 1), (0, 2)]);
        let g = graph(&[0, 1, 2, 0, 1, 1], &[(0, 1), (0, 2), (3, 4), (3, 5)]);
        let c = filter_nodes(&q, &g);
        // data vertex 0 has neighbors labeled {1, 2}; vertex 3 has {1, 1}
        assert_eq!(c.candidates(0), &[3]);
    }

    #[test]
    fn true_match_images_always_survive() {
        let q = graph(&[0, 1, 0], &[(0, 1), (1, 2)]);
        let g = graph(
            &[0, 1, 0, 1, 0, 1],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)],
        );
        let c = filter_nodes(&q, &g);
        for pairs in brute_force_enumerate(&q, &g).unwrap() {
            for (u, v) in pairs {
                assert!(c.candidates(u).contains(&v), "match image {v} missing from C({u})");
            }
        }
    }

    #[test]
    fn empty_candidate_set_is_a_valid_zero_match_result() {
        let q = graph(&[7], &[]);
        let g = graph(&[0, 1], &[(0, 1)]);
        let c = filter_nodes(&q, &g);
        assert!(c.is_empty());
        assert_eq!(c.candidates(0), &[] as &[usize]);
    }
}
