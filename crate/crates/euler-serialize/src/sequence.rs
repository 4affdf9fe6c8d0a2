use crate::path::IndexedEulerPath;
use crate::EulerError;

/// One slot of a masked node sequence: a matched data vertex, the class
/// marker for the vertex being predicted next, or padding for the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Token {
    Pad,
    Cls,
    Vertex(usize),
}

/// The navigator's input state: one token per Euler-path slot, with position
/// ids copied from the path. Every occurrence of the same query vertex holds
/// the same token, and at most one query vertex is marked with class tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedNodeSequence {
    pub tokens: Vec<Token>,
    pub position_ids: Vec<usize>,
    pub target_query_vertex: Option<usize>,
}

impl MaskedNodeSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// A sequence is complete when nothing is padded or marked.
    pub fn is_complete(&self) -> bool {
        self.tokens.iter().all(|t| matches!(t, Token::Vertex(_)))
    }
}

/// Builds the masked sequence for a partial match: matched query vertices
/// carry their data-vertex token at every occurrence, `next` (the vertex
/// about to be predicted) carries class tokens, everything else is padding.
///
/// `assignment[u]` is the data vertex matched to query vertex `u`, if any.
pub fn build_masked_sequence(
    path: &IndexedEulerPath,
    assignment: &[Option<usize>],
    next: Option<usize>,
) -> Result<MaskedNodeSequence, EulerError> {
    if let Some(next) = next {
        if assignment.get(next).copied().flatten().is_some() {
            return Err(EulerError::AlreadyMatched(next));
        }
    }
    let tokens = path
        .nodes
        .iter()
        .map(|&qv| match assignment.get(qv).copied().flatten() {
            Some(data_vertex) => Token::Vertex(data_vertex),
            None if Some(qv) == next => Token::Cls,
            None => Token::Pad,
        })
        .collect();
    Ok(MaskedNodeSequence {
        tokens,
        position_ids: path.position_ids.clone(),
        target_query_vertex: next,
    })
}

/// Advances a sequence in place after the marked vertex was matched: every
/// class token is replaced by the chosen data vertex, and the class marker
/// moves to all occurrences of `next` (which must currently be padding).
pub fn advance_masked_sequence(
    seq: &mut MaskedNodeSequence,
    path: &IndexedEulerPath,
    chosen_data_vertex: usize,
    next: Option<usize>,
) -> Result<(), EulerError> {
    for token in &mut seq.tokens {
        if *token == Token::Cls {
            *token = Token::Vertex(chosen_data_vertex);
        }
    }
    if let Some(next) = next {
        for (slot, &qv) in path.nodes.iter().enumerate() {
            if qv == next {
                if seq.tokens[slot] != Token::Pad {
                    return Err(EulerError::AlreadyMatched(next));
                }
                seq.tokens[slot] = Token::Cls;
            }
        }
    }
    seq.target_query_vertex = next;
    Ok(())
}
