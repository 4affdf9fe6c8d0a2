use std::cmp::Reverse;
use std::time::Duration;

/// How sibling candidates are ordered during enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankingMode {
    /// Ascending vertex id (the deterministic baseline order).
    Baseline,
    /// Confidence order from the generative navigator.
    Neural,
    /// Brute-force extendability scoring; the test-side upper bound on
    /// achievable navigation quality.
    Oracle,
}

impl RankingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            RankingMode::Baseline => "baseline",
            RankingMode::Neural => "neugn",
            RankingMode::Oracle => "oracle",
        }
    }
}

/// When the enumeration stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    All,
    FirstMatch,
    TimeBudget(Duration),
    MatchBudget(u64),
}

#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    pub mode: RankingMode,
    /// Maximum depth at which ranked navigation applies; deeper levels use
    /// the baseline order.
    pub navigation_depth: usize,
    pub termination: Termination,
    /// Precompute child-state distributions for a whole sibling frontier in
    /// one grouped navigator pass.
    pub batch_navigation: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            mode: RankingMode::Baseline,
            navigation_depth: 10,
            termination: Termination::All,
            batch_navigation: true,
        }
    }
}

/// Candidates in enumeration order with their confidence scores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedCandidates {
    pub vertices: Vec<usize>,
    pub conf: Vec<usize>,
    pub mode: RankingMode,
}

/// Confidence ranking: a candidate's score is the number of competing
/// candidates with strictly smaller predicted probability; the list is then
/// sorted by descending confidence, ties by ascending vertex id. The output
/// is always a permutation of the input.
pub fn conf_and_sort(candidates: &[usize], probs: &[f64], mode: RankingMode) -> RankedCandidates {
    let k = candidates.len();
    let mut by_prob: Vec<usize> = (0..k).collect();
    by_prob.sort_unstable_by(|&a, &b| {
        probs[candidates[a]]
            .partial_cmp(&probs[candidates[b]])
            .expect("finite probabilities")
            .then_with(|| candidates[a].cmp(&candidates[b]))
    });
    let mut conf = vec![0usize; k];
    let mut i = 0;
    while i < k {
        let mut j = i;
        while j < k && probs[candidates[by_prob[j]]] == probs[candidates[by_prob[i]]] {
            j += 1;
        }
        // everything in by_prob[..i] has strictly smaller probability
        for &slot in &by_prob[i..j] {
            conf[slot] = i;
        }
        i = j;
    }

    let mut slots: Vec<usize> = (0..k).collect();
    slots.sort_unstable_by_key(|&s| (Reverse(conf[s]), candidates[s]));
    RankedCandidates {
        vertices: slots.iter().map(|&s| candidates[s]).collect(),
        conf: slots.iter().map(|&s| conf[s]).collect(),
        mode,
    }
}
