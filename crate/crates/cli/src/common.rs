use std::path::Path;
use std::time::Duration;

use neugn_graph_core::LabeledGraph;
use neugn_match_engine::{RankingMode, Termination};
use neugn_neural_nav::Hyperparams;

pub enum CliError {
    /// Bad flags or invalid argument combinations; exit code 2.
    Usage(String),
    /// Failures while doing the work; exit code 1.
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.into())
    }
}

pub type CliResult = Result<(), CliError>;

/// Hyperparameter bundles: `paper` is the full-scale configuration, `desk`
/// the CPU-friendly test profile. The default comes from NEUGN_PROFILE when
/// set, otherwise `desk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Profile {
    Paper,
    Desk,
}

impl Profile {
    pub fn resolve(flag: Option<Profile>) -> Result<Profile, CliError> {
        if let Some(profile) = flag {
            return Ok(profile);
        }
        match std::env::var("NEUGN_PROFILE") {
            Ok(value) => match value.as_str() {
                "paper" => Ok(Profile::Paper),
                "desk" => Ok(Profile::Desk),
                other => Err(CliError::usage(format!(
                    "NEUGN_PROFILE must be `paper` or `desk`, got `{other}`"
                ))),
            },
            Err(_) => Ok(Profile::Desk),
        }
    }

    pub fn hyperparams(self, vocab: usize, label_vocab: usize) -> Hyperparams {
        match self {
            Profile::Paper => Hyperparams::paper(vocab, label_vocab),
            Profile::Desk => Hyperparams::desk(vocab, label_vocab),
        }
    }

    pub fn default_batch_size(self) -> usize {
        match self {
            Profile::Paper => 128,
            Profile::Desk => 16,
        }
    }

    pub fn default_epochs(self) -> usize {
        match self {
            Profile::Paper => 1000,
            Profile::Desk => 200,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Paper => "paper",
            Profile::Desk => "desk",
        }
    }
}

pub fn parse_mode(value: &str) -> Result<RankingMode, CliError> {
    match value {
        "baseline" => Ok(RankingMode::Baseline),
        "neugn" => Ok(RankingMode::Neural),
        "oracle" => Ok(RankingMode::Oracle),
        other => Err(CliError::usage(format!(
            "unknown mode `{other}`; expected baseline, neugn, or oracle"
        ))),
    }
}

/// `all`, `first`, `time:<seconds>`, or `count:<n>`.
pub fn parse_termination(value: &str) -> Result<Termination, CliError> {
    match value {
        "all" => Ok(Termination::All),
        "first" => Ok(Termination::FirstMatch),
        other => {
            if let Some(secs) = other.strip_prefix("time:") {
                let secs: f64 = secs
                    .parse()
                    .map_err(|_| CliError::usage(format!("invalid time budget `{other}`")))?;
                if secs <= 0.0 {
                    return Err(CliError::usage("time budget must be positive"));
                }
                return Ok(Termination::TimeBudget(Duration::from_secs_f64(secs)));
            }
            if let Some(count) = other.strip_prefix("count:") {
                let count: u64 = count
                    .parse()
                    .map_err(|_| CliError::usage(format!("invalid match budget `{other}`")))?;
                if count == 0 {
                    return Err(CliError::usage("match budget must be positive"));
                }
                return Ok(Termination::MatchBudget(count));
            }
            Err(CliError::usage(format!(
                "unknown termination policy `{other}`; expected all, first, time:<s>, or count:<n>"
            )))
        }
    }
}

pub fn load_graph_arg(path: &Path) -> Result<LabeledGraph, CliError> {
    neugn_graph_core::load_graph(path)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("reading graph {}: {e}", path.display())))
}

/// Median as a float (mean of the middle pair for even counts).
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
