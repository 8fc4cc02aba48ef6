//! Run configuration: flags, optional JSON config file, flag-over-file
//! merging, and validation.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use olmr_core::losses::LossKind;
use serde::Deserialize;

use crate::error::CliError;

/// The two edge grids used for potential-based runs: one for small label
/// counts, one for large.
pub const GAMMA_GRID_SMALL_K: [f64; 4] = [0.2, 0.1, 0.01, 0.001];
pub const GAMMA_GRID_LARGE_K: [f64; 4] = [0.05, 0.01, 0.005, 0.001];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Bmr,
    Olmr,
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Algo::Bmr => write!(f, "bmr"),
            Algo::Olmr => write!(f, "olmr"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainableLearnerKind {
    Stump,
    Linear,
}

impl std::fmt::Display for TrainableLearnerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrainableLearnerKind::Stump => write!(f, "stump"),
            TrainableLearnerKind::Linear => write!(f, "linear"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticLearnerKind {
    /// Single-label sampler with a true edge.
    Oracle,
    /// Exact edge-over-random distribution.
    Baseline,
    /// Phase-switched lower-bound construction.
    Adversarial,
}

impl std::fmt::Display for SyntheticLearnerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SyntheticLearnerKind::Oracle => write!(f, "oracle"),
            SyntheticLearnerKind::Baseline => write!(f, "baseline"),
            SyntheticLearnerKind::Adversarial => write!(f, "adversarial"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaGrid {
    Small,
    Large,
}

impl GammaGrid {
    pub fn values(self) -> &'static [f64] {
        match self {
            GammaGrid::Small => &GAMMA_GRID_SMALL_K,
            GammaGrid::Large => &GAMMA_GRID_LARGE_K,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordFormat {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    Arff,
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedModeArg {
    Argmin,
    Relevant,
}

/// Loss argument that clap can parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(try_from = "String")]
pub struct LossArg(pub LossKind);

impl TryFrom<String> for LossArg {
    type Error = String;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        LossKind::from_str(&value).map(LossArg)
    }
}

impl FromStr for LossArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LossKind::from_str(s).map(LossArg)
    }
}

macro_rules! merge {
    ($flags:expr, $file:expr, $($field:ident),+ $(,)?) => {
        $( $flags.$field = $flags.$field.take().or_else(|| $file.$field.take()); )+
    };
}

fn load_file<T: for<'de> Deserialize<'de> + Default>(path: &Option<PathBuf>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read config file {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("bad config file {}: {e}", path.display())))
        }
    }
}

/// Flags for `olmr run`. Every option can also come from a JSON config
/// file (`--config`); flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunArgs {
    /// JSON config file with these same fields.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Booster: bmr or olmr.
    #[arg(long, value_enum)]
    pub algo: Option<Algo>,
    /// Number of weak learners.
    #[arg(long)]
    pub n_learners: Option<usize>,
    /// Assumed weak-learner edge (bmr only).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Sweep the preset edge grid instead of a single gamma (bmr only).
    #[arg(long, value_enum, conflicts_with = "gamma")]
    pub gamma_grid: Option<GammaGrid>,
    /// Potential loss (bmr only): rank or hinge.
    #[arg(long)]
    pub loss: Option<LossArg>,
    /// Weak learner family.
    #[arg(long, value_enum)]
    pub learner: Option<TrainableLearnerKind>,
    /// Random feature pool size per stump.
    #[arg(long)]
    pub feature_pool: Option<usize>,
    /// Base learning rate for linear learners.
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// How learners turn costs into training labels.
    #[arg(long, value_enum)]
    pub feed_mode: Option<FeedModeArg>,
    /// Feed raw (unnormalized) cost magnitudes to the learners.
    #[arg(long)]
    pub raw_cost_feed: Option<bool>,
    /// Training split path.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Test split path (progressively evaluated, then trained on).
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub data_format: Option<DataFormat>,
    /// Comma-separated label attribute names (ARFF).
    #[arg(long, value_delimiter = ',')]
    pub labels: Option<Vec<String>>,
    /// Treat the trailing N attributes as labels (ARFF).
    #[arg(long, conflicts_with = "labels")]
    pub trailing_labels: Option<usize>,
    /// Subsample the training split to this many examples.
    #[arg(long)]
    pub subsample_train: Option<usize>,
    /// Subsample the test split to this many examples.
    #[arg(long)]
    pub subsample_test: Option<usize>,
    /// Base seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of seeds (seed, seed+1, ...) to aggregate over.
    #[arg(long)]
    pub seeds: Option<u64>,
    /// Window length for the windowed rank loss.
    #[arg(long)]
    pub window: Option<usize>,
    /// Metrics output path; per-seed files get a .seedN suffix.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-round record format.
    #[arg(long, value_enum)]
    pub format: Option<RecordFormat>,
    /// Include wall-clock fields in metrics and summary files (breaks
    /// byte-for-byte reproducibility of the files).
    #[arg(long)]
    pub emit_timing: Option<bool>,
}

/// Resolved `run` configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub algo: Algo,
    pub n_learners: usize,
    pub gamma: Option<f64>,
    pub gamma_grid: Option<GammaGrid>,
    pub loss: LossKind,
    pub learner: TrainableLearnerKind,
    pub feature_pool: usize,
    pub learning_rate: f64,
    pub feed_mode: FeedModeArg,
    pub raw_cost_feed: bool,
    pub train: PathBuf,
    pub test: PathBuf,
    pub data_format: Option<DataFormat>,
    pub labels: Option<Vec<String>>,
    pub trailing_labels: Option<usize>,
    pub subsample_train: Option<usize>,
    pub subsample_test: Option<usize>,
    pub seed: u64,
    pub seeds: u64,
    pub window: usize,
    pub out: Option<PathBuf>,
    pub format: RecordFormat,
    pub emit_timing: bool,
}

impl RunArgs {
    pub fn resolve(mut self) -> Result<RunConfig, CliError> {
        let mut file: RunArgs = load_file(&self.config)?;
        merge!(
            self, file, algo, n_learners, gamma, gamma_grid, loss, learner, feature_pool,
            learning_rate, feed_mode, raw_cost_feed, train, test, data_format, labels,
            trailing_labels, subsample_train, subsample_test, seed, seeds, window, out, format,
            emit_timing,
        );
        let algo = self.algo.ok_or_else(|| CliError::config("--algo is required (bmr|olmr)"))?;
        let n_learners = self.n_learners.unwrap_or(100);
        if n_learners == 0 {
            return Err(CliError::config("--n-learners must be at least 1"));
        }
        match algo {
            Algo::Bmr => {
                if self.gamma.is_none() && self.gamma_grid.is_none() {
                    return Err(CliError::config("bmr requires --gamma or --gamma-grid"));
                }
            }
            Algo::Olmr => {
                if self.gamma.is_some() || self.gamma_grid.is_some() {
                    return Err(CliError::config("olmr forbids --gamma / --gamma-grid"));
                }
            }
        }
        if let Some(gamma) = self.gamma {
            if !(0.0..1.0).contains(&gamma) || gamma == 0.0 {
                return Err(CliError::config(format!("gamma must lie in (0, 1), got {gamma}")));
            }
        }
        let seeds = self.seeds.unwrap_or(1);
        if seeds == 0 {
            return Err(CliError::config("--seeds must be at least 1"));
        }
        Ok(RunConfig {
            algo,
            n_learners,
            gamma: self.gamma,
            gamma_grid: self.gamma_grid,
            loss: self.loss.map_or(LossKind::Hinge, |l| l.0),
            learner: self.learner.unwrap_or(TrainableLearnerKind::Stump),
            feature_pool: self.feature_pool.unwrap_or(20),
            learning_rate: self.learning_rate.unwrap_or(0.5),
            feed_mode: self.feed_mode.unwrap_or(FeedModeArg::Argmin),
            raw_cost_feed: self.raw_cost_feed.unwrap_or(false),
            train: self.train.ok_or_else(|| CliError::config("--train is required"))?,
            test: self.test.ok_or_else(|| CliError::config("--test is required"))?,
            data_format: self.data_format,
            labels: self.labels,
            trailing_labels: self.trailing_labels,
            subsample_train: self.subsample_train,
            subsample_test: self.subsample_test,
            seed: self.seed.unwrap_or(0),
            seeds,
            window: self.window.unwrap_or(100),
            out: self.out,
            format: self.format.unwrap_or(RecordFormat::Jsonl),
            emit_timing: self.emit_timing.unwrap_or(false),
        })
    }
}

/// Flags for `olmr simulate`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Booster under test.
    #[arg(long, value_enum)]
    pub algo: Option<Algo>,
    /// Label count for the synthetic adversary.
    #[arg(long)]
    pub k: Option<usize>,
    /// Synthetic edge of the learners (and assumed edge for bmr).
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Number of weak learners.
    #[arg(long)]
    pub n_learners: Option<usize>,
    /// Stream length.
    #[arg(long)]
    pub rounds: Option<u64>,
    /// Clairvoyant learner family.
    #[arg(long, value_enum)]
    pub learner: Option<SyntheticLearnerKind>,
    /// Potential loss for bmr.
    #[arg(long)]
    pub loss: Option<LossArg>,
    /// Excess-loss budget for the adversarial learner (defaults to
    /// k*ln(20)/gamma).
    #[arg(long)]
    pub excess: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub seeds: Option<u64>,
    #[arg(long)]
    pub window: Option<usize>,
    /// Record every n-th round.
    #[arg(long)]
    pub record_every: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<RecordFormat>,
    #[arg(long)]
    pub emit_timing: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub algo: Algo,
    pub k: usize,
    pub gamma: f64,
    pub n_learners: usize,
    pub rounds: u64,
    pub learner: SyntheticLearnerKind,
    pub loss: LossKind,
    pub excess: f64,
    pub seed: u64,
    pub seeds: u64,
    pub window: usize,
    pub record_every: u64,
    pub out: Option<PathBuf>,
    pub format: RecordFormat,
    pub emit_timing: bool,
}

impl SimulateArgs {
    pub fn resolve(mut self) -> Result<SimulateConfig, CliError> {
        let mut file: SimulateArgs = load_file(&self.config)?;
        merge!(
            self, file, algo, k, gamma, n_learners, rounds, learner, loss, excess, seed, seeds,
            window, record_every, out, format, emit_timing,
        );
        let k = self.k.unwrap_or(5);
        if !(2..=30).contains(&k) {
            return Err(CliError::config(format!("k must lie in 2..=30, got {k}")));
        }
        let gamma = self.gamma.unwrap_or(0.2);
        if !(0.0..1.0).contains(&gamma) {
            return Err(CliError::config(format!("gamma must lie in [0, 1), got {gamma}")));
        }
        let n_learners = self.n_learners.unwrap_or(20);
        if n_learners == 0 {
            return Err(CliError::config("--n-learners must be at least 1"));
        }
        let rounds = self.rounds.unwrap_or(5000);
        if rounds == 0 {
            return Err(CliError::config("--rounds must be at least 1"));
        }
        let seeds = self.seeds.unwrap_or(1);
        if seeds == 0 {
            return Err(CliError::config("--seeds must be at least 1"));
        }
        let excess = match self.excess {
            Some(excess) if excess > 0.0 => excess,
            Some(excess) => return Err(CliError::config(format!("--excess must be positive, got {excess}"))),
            None => {
                if gamma > 0.0 {
                    k as f64 * (1.0f64 / 0.05).ln() / gamma
                } else {
                    1.0
                }
            }
        };
        Ok(SimulateConfig {
            algo: self.algo.unwrap_or(Algo::Bmr),
            k,
            gamma,
            n_learners,
            rounds,
            learner: self.learner.unwrap_or(SyntheticLearnerKind::Oracle),
            loss: self.loss.map_or(LossKind::Rank, |l| l.0),
            excess,
            seed: self.seed.unwrap_or(0),
            seeds,
            window: self.window.unwrap_or(100),
            record_every: self.record_every.unwrap_or(1).max(1),
            out: self.out,
            format: self.format.unwrap_or(RecordFormat::Jsonl),
            emit_timing: self.emit_timing.unwrap_or(false),
        })
    }
}

/// Flags for `olmr certify-wlc`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Certification level.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Edge of the oracle/baseline learner under test (defaults to twice
    /// the certification level).
    #[arg(long)]
    pub learner_gamma: Option<f64>,
    #[arg(long, value_enum)]
    pub learner: Option<SyntheticLearnerKind>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Excess loss S (defaults to k*ln(1/delta)/gamma).
    #[arg(long)]
    pub excess: Option<f64>,
    /// Rounds per certification stream.
    #[arg(long)]
    pub rounds: Option<u64>,
    /// Number of independent seeded streams.
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct CertifyConfig {
    pub k: usize,
    pub gamma: f64,
    pub learner_gamma: f64,
    pub learner: SyntheticLearnerKind,
    pub delta: f64,
    pub excess: f64,
    pub rounds: u64,
    pub reps: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl CertifyArgs {
    pub fn resolve(mut self) -> Result<CertifyConfig, CliError> {
        let mut file: CertifyArgs = load_file(&self.config)?;
        merge!(self, file, k, gamma, learner_gamma, learner, delta, excess, rounds, reps, seed, out);
        let k = self.k.unwrap_or(5);
        if !(2..=30).contains(&k) {
            return Err(CliError::config(format!("k must lie in 2..=30, got {k}")));
        }
        let gamma = self.gamma.unwrap_or(0.08);
        if gamma <= 0.0 || gamma >= 1.0 {
            return Err(CliError::config(format!("gamma must lie in (0, 1), got {gamma}")));
        }
        let delta = self.delta.unwrap_or(0.05);
        if delta <= 0.0 || delta >= 1.0 {
            return Err(CliError::config(format!("delta must lie in (0, 1), got {delta}")));
        }
        let reps = self.reps.unwrap_or(200);
        if reps == 0 {
            return Err(CliError::config("--reps must be at least 1"));
        }
        let rounds = self.rounds.unwrap_or(1000);
        if rounds == 0 {
            return Err(CliError::config("--rounds must be at least 1"));
        }
        let excess = self.excess.unwrap_or(k as f64 * (1.0 / delta).ln() / gamma);
        if excess <= 0.0 {
            return Err(CliError::config(format!("--excess must be positive, got {excess}")));
        }
        Ok(CertifyConfig {
            k,
            gamma,
            learner_gamma: self.learner_gamma.unwrap_or(2.0 * gamma),
            learner: self.learner.unwrap_or(SyntheticLearnerKind::Oracle),
            delta,
            excess,
            rounds,
            reps,
            seed: self.seed.unwrap_or(0),
            out: self.out,
        })
    }
}

/// Flags for `olmr dump-potentials`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DumpArgs {
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Relevant-set size the table is built for.
    #[arg(long)]
    pub size_y: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub loss: Option<LossArg>,
    /// Largest horizon to tabulate.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct DumpConfig {
    pub k: usize,
    pub size_y: usize,
    pub gamma: f64,
    pub loss: LossKind,
    pub n_max: usize,
    pub out: Option<PathBuf>,
}

impl DumpArgs {
    pub fn resolve(mut self) -> Result<DumpConfig, CliError> {
        let mut file: DumpArgs = load_file(&self.config)?;
        merge!(self, file, k, size_y, gamma, loss, n_max, out);
        let k = self.k.unwrap_or(2);
        if k < 2 {
            return Err(CliError::config(format!("k must be at least 2, got {k}")));
        }
        let size_y = self.size_y.unwrap_or(1);
        if size_y == 0 || size_y >= k {
            return Err(CliError::config(format!("size-y must lie in 1..k, got {size_y}")));
        }
        let gamma = self.gamma.unwrap_or(0.2);
        if !(0.0..1.0).contains(&gamma) {
            return Err(CliError::config(format!("gamma must lie in [0, 1), got {gamma}")));
        }
        Ok(DumpConfig {
            k,
            size_y,
            gamma,
            loss: self.loss.map_or(LossKind::Rank, |l| l.0),
            n_max: self.n_max.unwrap_or(100),
            out: self.out,
        })
    }
}

/// Path for the per-seed metrics file: `out.jsonl` becomes
/// `out.seed7.jsonl`.
pub fn seed_path(out: &Path, seed: u64) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("metrics");
    let ext = out.extension().and_then(|s| s.to_str());
    let name = match ext {
        Some(ext) => format!("{stem}.seed{seed}.{ext}"),
        None => format!("{stem}.seed{seed}"),
    };
    out.with_file_name(name)
}

/// Path for the run summary next to the metrics path.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("metrics");
    out.with_file_name(format!("{stem}.summary.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bmr_requires_gamma_and_olmr_forbids_it() {
        let mut args = RunArgs {
            algo: Some(Algo::Bmr),
            train: Some("a".into()),
            test: Some("b".into()),
            ..Default::default()
        };
        assert!(args.clone().resolve().is_err());
        args.gamma = Some(0.1);
        assert!(args.clone().resolve().is_ok());
        args.algo = Some(Algo::Olmr);
        assert!(args.resolve().is_err());
    }

    #[test]
    fn zero_learners_rejected() {
        let args = RunArgs {
            algo: Some(Algo::Olmr),
            n_learners: Some(0),
            train: Some("a".into()),
            test: Some("b".into()),
            ..Default::default()
        };
        assert!(args.resolve().is_err());
    }

    #[test]
    fn gamma_grids_match_presets() {
        assert_eq!(GammaGrid::Small.values(), &[0.2, 0.1, 0.01, 0.001]);
        assert_eq!(GammaGrid::Large.values(), &[0.05, 0.01, 0.005, 0.001]);
    }

    #[test]
    fn certify_defaults_follow_parameters() {
        let cfg = CertifyArgs { k: Some(5), gamma: Some(0.1), delta: Some(0.05), ..Default::default() }
            .resolve()
            .unwrap();
        assert!((cfg.excess - 5.0 * 20.0f64.ln() / 0.1).abs() < 1e-9);
        assert!((cfg.learner_gamma - 0.2).abs() < 1e-12);
        assert!(CertifyArgs { reps: Some(0), ..Default::default() }.resolve().is_err());
    }

    #[test]
    fn seed_paths_are_stable() {
        assert_eq!(seed_path(Path::new("out/m.jsonl"), 3), Path::new("out/m.seed3.jsonl"));
        assert_eq!(summary_path(Path::new("out/m.jsonl")), Path::new("out/m.summary.csv"));
    }
}
