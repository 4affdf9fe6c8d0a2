use std::collections::HashMap;
use std::time::{Duration, Instant};

use neugn_euler_serialize::{build_masked_sequence, cyclic_reindex, euler_path, eulerize};
use neugn_euler_serialize::IndexedEulerPath;
use neugn_graph_core::{LabeledGraph, Match};
use neugn_neural_nav::{
    assemble_input, navigator_forward_batch, navigator_probs, qs_extract, ModelParams,
};

use crate::filter::{filter_nodes, CandidateSets};
use crate::order::{generate_order, MatchingOrder};
use crate::ranking::{conf_and_sort, EngineConfig, RankedCandidates, RankingMode, Termination};
use crate::EngineError;

/// Counters for one enumeration run. `fms` is the number of candidate
/// extensions performed up to and including the one that completed the first
/// match; `None` when no match was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationStats {
    pub fms: Option<u64>,
    pub total_extensions: u64,
    pub matches_found: u64,
    pub elapsed: Duration,
    pub nav_calls: u64,
    pub nav_time: Duration,
}

impl EnumerationStats {
    fn new() -> Self {
        EnumerationStats {
            fms: None,
            total_extensions: 0,
            matches_found: 0,
            elapsed: Duration::ZERO,
            nav_calls: 0,
            nav_time: Duration::ZERO,
        }
    }

    /// Value reported in the `fms` metrics column: total extensions stand in
    /// when the query has no match (`matches_found` signals which case).
    pub fn fms_or_total(&self) -> u64 {
        self.fms.unwrap_or(self.total_extensions)
    }
}

/// Sink verdict after receiving a match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepControl {
    Continue,
    Stop,
}

/// Runs the full pipeline and collects all emitted matches.
pub fn enumerate(
    query: &LabeledGraph,
    data: &LabeledGraph,
    cfg: &EngineConfig,
    model: Option<&ModelParams>,
) -> Result<(Vec<Match>, EnumerationStats), EngineError> {
    let mut matches = Vec::new();
    let stats = enumerate_with(query, data, cfg, model, |m| {
        matches.push(m.clone());
        StepControl::Continue
    })?;
    Ok((matches, stats))
}

/// Depth-first enumeration with streaming match emission: filter, order,
/// then recursive candidate extension where sibling order at each depth
/// below the navigation cap comes from the configured ranking mode.
pub fn enumerate_with(
    query: &LabeledGraph,
    data: &LabeledGraph,
    cfg: &EngineConfig,
    model: Option<&ModelParams>,
    sink: impl FnMut(&Match) -> StepControl,
) -> Result<EnumerationStats, EngineError> {
    let started = Instant::now();
    if !query.is_connected() || query.vertex_count() == 0 {
        return Err(EngineError::DisconnectedQuery);
    }

    let neural = match cfg.mode {
        RankingMode::Neural if cfg.navigation_depth > 0 => {
            let model = model.ok_or(EngineError::MissingModel)?;
            if model.hp.vocab != data.vertex_count() {
                return Err(EngineError::VocabularyMismatch {
                    model: model.hp.vocab,
                    graph: data.vertex_count(),
                });
            }
            let (signal, _) = qs_extract(query, model)?;
            let path = euler_path(&eulerize(query)?);
            // inference uses the deterministic zero offset
            let indexed = cyclic_reindex(&path, 0, model.hp.window)?;
            Some(NeuralState {
                model,
                signal,
                path: indexed,
                cache: HashMap::new(),
            })
        }
        _ => None,
    };

    let candidates = filter_nodes(query, data);
    let mut stats = EnumerationStats::new();
    if candidates.is_empty() {
        stats.elapsed = started.elapsed();
        return Ok(stats);
    }
    let order = generate_order(query, &candidates)?;

    let mut driver = Driver {
        query,
        data,
        cfg,
        candidates,
        order,
        assignment: vec![None; query.vertex_count()],
        used: vec![false; data.vertex_count()],
        match_buf: Vec::with_capacity(query.vertex_count()),
        stats,
        started,
        sink,
        stop: false,
        neural,
    };
    driver.dfs(0)?;
    let mut stats = driver.stats;
    stats.elapsed = started.elapsed();
    Ok(stats)
}

/// Matches-per-second under the configured termination policy (normally a
/// time budget); navigator inference time counts against the clock.
pub fn measure_mps(
    query: &LabeledGraph,
    data: &LabeledGraph,
    cfg: &EngineConfig,
    model: Option<&ModelParams>,
) -> Result<(f64, EnumerationStats), EngineError> {
    let stats = enumerate_with(query, data, cfg, model, |_| StepControl::Continue)?;
    let secs = stats.elapsed.as_secs_f64();
    let mps = if secs > 0.0 {
        stats.matches_found as f64 / secs
    } else {
        0.0
    };
    Ok((mps, stats))
}

struct NeuralState<'m> {
    model: &'m ModelParams,
    signal: Vec<f64>,
    path: IndexedEulerPath,
    /// Distributions precomputed by the frontier batching step, keyed by
    /// (child depth, data vertex assigned at the parent). Entries are
    /// consumed on first use.
    cache: HashMap<(usize, usize), Vec<f64>>,
}

struct Driver<'a, F> {
    query: &'a LabeledGraph,
    data: &'a LabeledGraph,
    cfg: &'a EngineConfig,
    candidates: CandidateSets,
    order: MatchingOrder,
    assignment: Vec<Option<usize>>,
    used: Vec<bool>,
    match_buf: Vec<(usize, usize)>,
    stats: EnumerationStats,
    started: Instant,
    sink: F,
    stop: bool,
    neural: Option<NeuralState<'a>>,
}

impl<F: FnMut(&Match) -> StepControl> Driver<'_, F> {
    fn dfs(&mut self, depth: usize) -> Result<(), EngineError> {
        if depth == self.order.len() {
            self.stats.matches_found += 1;
            if self.stats.fms.is_none() {
                self.stats.fms = Some(self.stats.total_extensions);
            }
            let m = Match::new(self.match_buf.clone());
            if (self.sink)(&m) == StepControl::Stop {
                self.stop = true;
            }
            self.check_termination();
            return Ok(());
        }

        let u = self.order.at(depth);
        let local = self.local_candidates(u);
        if local.is_empty() {
            return Ok(());
        }
        let ranked = self.rank(depth, u, &local)?;
        if self.should_batch(depth) {
            self.precompute_children(depth, u, &ranked)?;
        }
        for v in ranked.vertices {
            self.assignment[u] = Some(v);
            self.used[v] = true;
            self.match_buf.push((u, v));
            self.stats.total_extensions += 1;
            self.check_termination();
            if !self.stop {
                self.dfs(depth + 1)?;
            }
            self.match_buf.pop();
            self.used[v] = false;
            self.assignment[u] = None;
            if self.stop {
                break;
            }
        }
        Ok(())
    }

    /// Local candidate nodes for `u`: filtered candidates that are unused
    /// and adjacent to the image of every already-matched query neighbor.
    /// Ascending vertex id; this is the baseline order.
    fn local_candidates(&self, u: usize) -> Vec<usize> {
        let matched_images: Vec<usize> = self
            .query
            .neighbors(u)
            .iter()
            .filter_map(|&w| self.assignment[w])
            .collect();
        self.candidates
            .candidates(u)
            .iter()
            .copied()
            .filter(|&v| {
                !self.used[v] && matched_images.iter().all(|&img| self.data.has_edge(img, v))
            })
            .collect()
    }

    fn rank(
        &mut self,
        depth: usize,
        u: usize,
        local: &[usize],
    ) -> Result<RankedCandidates, EngineError> {
        let navigated = depth < self.cfg.navigation_depth;
        match self.cfg.mode {
            RankingMode::Neural if navigated => {
                let probs = self.neural_probs(depth, u)?;
                Ok(conf_and_sort(local, &probs, RankingMode::Neural))
            }
            RankingMode::Oracle if navigated => Ok(self.oracle_rank(u, local)),
            _ => Ok(RankedCandidates {
                vertices: local.to_vec(),
                conf: vec![0; local.len()],
                mode: RankingMode::Baseline,
            }),
        }
    }

    /// Distribution for the current state (class tokens at `u`), either from
    /// the batch cache or from a single on-demand forward pass.
    fn neural_probs(&mut self, depth: usize, u: usize) -> Result<Vec<f64>, EngineError> {
        let state = self.neural.as_mut().expect("neural mode has a state");
        if depth > 0 {
            let parent = self.order.at(depth - 1);
            let placed = self.assignment[parent].expect("parent is matched");
            if let Some(probs) = state.cache.remove(&(depth, placed)) {
                return Ok(probs);
            }
        }
        let clock = Instant::now();
        let seq = build_masked_sequence(&state.path, &self.assignment, Some(u))?;
        let input = assemble_input(&seq, &state.signal, state.model)?;
        let probs = navigator_probs(&input, state.model)?;
        self.stats.nav_calls += 1;
        self.stats.nav_time += clock.elapsed();
        Ok(probs)
    }

    fn should_batch(&self, depth: usize) -> bool {
        self.cfg.batch_navigation
            && self.neural.is_some()
            && matches!(self.cfg.mode, RankingMode::Neural)
            && depth + 1 < self.order.len()
            && depth + 1 < self.cfg.navigation_depth
    }

    /// Frontier batching: one grouped navigator pass over every child state
    /// `M + (u, c)` with class tokens advanced to the next query vertex,
    /// cached for consumption when the search descends into each child.
    fn precompute_children(
        &mut self,
        depth: usize,
        u: usize,
        ranked: &RankedCandidates,
    ) -> Result<(), EngineError> {
        let next = self.order.at(depth + 1);
        let clock = Instant::now();
        let mut inputs = Vec::with_capacity(ranked.vertices.len());
        {
            let state = self.neural.as_ref().expect("neural mode has a state");
            for &c in &ranked.vertices {
                self.assignment[u] = Some(c);
                let seq = build_masked_sequence(&state.path, &self.assignment, Some(next))?;
                inputs.push(assemble_input(&seq, &state.signal, state.model)?);
            }
            self.assignment[u] = None;
        }
        let state = self.neural.as_mut().expect("neural mode has a state");
        let batch = navigator_forward_batch(&inputs, state.model)?;
        for (&c, probs) in ranked.vertices.iter().zip(batch) {
            state.cache.insert((depth + 1, c), probs);
        }
        self.stats.nav_calls += ranked.vertices.len() as u64;
        self.stats.nav_time += clock.elapsed();
        Ok(())
    }

    /// Oracle scoring: a candidate ranks first when the child state can
    /// still reach a full match (checked by brute-force completion).
    fn oracle_rank(&mut self, u: usize, local: &[usize]) -> RankedCandidates {
        let depth = self.order.index_of(u);
        let mut scored: Vec<(usize, usize)> = Vec::with_capacity(local.len());
        for &v in local {
            self.assignment[u] = Some(v);
            self.used[v] = true;
            let score = usize::from(self.completable(depth + 1));
            self.used[v] = false;
            self.assignment[u] = None;
            scored.push((v, score));
        }
        scored.sort_by_key(|&(v, score)| (std::cmp::Reverse(score), v));
        RankedCandidates {
            vertices: scored.iter().map(|&(v, _)| v).collect(),
            conf: scored.iter().map(|&(_, s)| s).collect(),
            mode: RankingMode::Oracle,
        }
    }

    fn completable(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let u = self.order.at(depth);
        for v in self.local_candidates(u) {
            self.assignment[u] = Some(v);
            self.used[v] = true;
            let ok = self.completable(depth + 1);
            self.used[v] = false;
            self.assignment[u] = None;
            if ok {
                return true;
            }
        }
        false
    }

    fn check_termination(&mut self) {
        match self.cfg.termination {
            Termination::All => {}
            Termination::FirstMatch => {
                if self.stats.matches_found >= 1 {
                    self.stop = true;
                }
            }
            Termination::MatchBudget(n) => {
                if self.stats.matches_found >= n {
                    self.stop = true;
                }
            }
            Termination::TimeBudget(budget) => {
                if self.started.elapsed() >= budget {
                    self.stop = true;
                }
            }
        }
    }
}
