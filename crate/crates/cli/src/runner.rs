//! Experiment drivers: progressive dataset runs, synthetic simulations,
//! weak-learning-condition certification, and potential-table dumps.
//!
//! Everything is a pure function of its config. Metrics files are
//! rendered per seed; multi-seed runs fan out across threads and are
//! aggregated in seed order, so outputs do not depend on scheduling.

use std::path::PathBuf;
use std::thread;

use olmr_core::boosters::{AdaOlmr, BmrConfig, Booster, OnlineBmr};
use olmr_core::dataio::{self, DatasetHeader, ExampleStream, LabelSelector, SplitRole};
use olmr_core::losses::{rank_loss, LossKind};
use olmr_core::potentials::PotentialTable;
use olmr_core::rng::sub_seed;
use olmr_core::types::{CostVector, LabelSet, ScoreVector, SparseFeatures};
use olmr_core::weak_learners::sim::LabelFeed;
use olmr_core::weak_learners::{SubsetAdversary, WeakLearner, WlcLedger, WlcParams};
use serde::Serialize;

use crate::config::{
    seed_path, Algo, CertifyConfig, DataFormat, DumpConfig, RunConfig, SimulateConfig,
    SyntheticLearnerKind,
};
use crate::error::CliError;
use crate::learners::{build_synthetic, build_trainable};
use crate::metrics::{render_summary, Recorder, SummaryRow};

const BOOSTER_SEED_TAG: u64 = 0x6273_7464;
const ADVERSARY_SEED_TAG: u64 = 0x6164_7631;
const REP_SEED_TAG: u64 = 0x7265_7073;

/// Outcome of one seed of a run or simulation.
pub struct SeedOutcome {
    pub seed: u64,
    pub metrics: Vec<u8>,
    pub mean_rank_loss: f64,
    pub rounds_recorded: u64,
    pub runtime_secs: f64,
    /// Loss-bound overlay where one applies.
    pub bound: Option<f64>,
}

/// Everything a command produced: files to write, summary rows, and a
/// human-readable digest.
pub struct RunOutput {
    pub files: Vec<(PathBuf, Vec<u8>)>,
    pub rows: Vec<SummaryRow>,
    pub summary_csv: String,
    pub human: Vec<String>,
    pub best_mean_loss: Option<f64>,
}

pub struct PreparedData {
    pub header: DatasetHeader,
    pub train: ExampleStream,
    pub test: ExampleStream,
}

fn label_selector(cfg: &RunConfig) -> Result<LabelSelector, CliError> {
    match (&cfg.labels, cfg.trailing_labels) {
        (Some(names), None) => Ok(LabelSelector::Names(names.clone())),
        (None, Some(count)) => Ok(LabelSelector::TrailingCount(count)),
        (None, None) => Err(CliError::config(
            "ARFF input needs --labels <names> or --trailing-labels <count>",
        )),
        (Some(_), Some(_)) => Err(CliError::config("--labels conflicts with --trailing-labels")),
    }
}

fn detect_format(cfg: &RunConfig, path: &std::path::Path) -> DataFormat {
    cfg.data_format.unwrap_or_else(|| {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("arff") => DataFormat::Arff,
            _ => DataFormat::Sparse,
        }
    })
}

fn load_split(cfg: &RunConfig, path: &std::path::Path, role: SplitRole) -> Result<(DatasetHeader, ExampleStream), CliError> {
    let (mut header, stream) = match detect_format(cfg, path) {
        DataFormat::Arff => dataio::parse_arff(path, &label_selector(cfg)?)?,
        DataFormat::Sparse => dataio::parse_sparse_multilabel(path)?,
    };
    header.role = role;
    Ok((header, stream))
}

/// Load and reconcile the train/test splits of a run config.
pub fn load_dataset(cfg: &RunConfig) -> Result<PreparedData, CliError> {
    let (header, mut train) = load_split(cfg, &cfg.train, SplitRole::Train)?;
    let (test_header, mut test) = load_split(cfg, &cfg.test, SplitRole::Test)?;
    if test_header.num_labels != header.num_labels || test_header.num_features != header.num_features {
        return Err(CliError::config(format!(
            "train/test shape mismatch: {}x{} labels/features vs {}x{}",
            header.num_labels, header.num_features, test_header.num_labels, test_header.num_features
        )));
    }
    if let Some(n) = cfg.subsample_train {
        train = dataio::subsample(&train, n, sub_seed(cfg.seed, 0x7472))?;
    }
    if let Some(n) = cfg.subsample_test {
        test = dataio::subsample(&test, n, sub_seed(cfg.seed, 0x7465))?;
    }
    Ok(PreparedData { header, train, test })
}

fn make_booster(
    algo: Algo,
    k: usize,
    gamma: Option<f64>,
    loss: LossKind,
    learners: Vec<Box<dyn WeakLearner>>,
    seed: u64,
) -> Result<Box<dyn Booster>, CliError> {
    Ok(match algo {
        Algo::Bmr => {
            let gamma = gamma.ok_or_else(|| CliError::config("bmr needs a gamma"))?;
            Box::new(OnlineBmr::new(k, BmrConfig { gamma, loss }, learners)?)
        }
        Algo::Olmr => Box::new(AdaOlmr::new(k, learners, sub_seed(seed, BOOSTER_SEED_TAG))?),
    })
}

/// One seed of a progressive dataset run: train split updates only, test
/// split is evaluated before each update.
pub fn drive_dataset_seed(
    cfg: &RunConfig,
    gamma: Option<f64>,
    data: &PreparedData,
    seed: u64,
) -> Result<SeedOutcome, CliError> {
    let k = data.header.num_labels;
    let learners = build_trainable(cfg, k, data.header.num_features, seed)?;
    let mut booster = make_booster(cfg.algo, k, gamma, cfg.loss, learners, seed)?;
    let mut recorder = Recorder::new(cfg.window, cfg.emit_timing);
    let mut t = 0u64;
    for example in data.train.iter() {
        t += 1;
        booster.predict(&example.features)?;
        booster.feedback(&example.labels)?;
    }
    for example in data.test.iter() {
        t += 1;
        let prediction = booster.predict(&example.features)?;
        let loss = rank_loss(&example.labels, &prediction);
        recorder.observe(t, loss, booster.expert_cumulative_losses(), booster.empirical_edges());
        booster.feedback(&example.labels)?;
    }
    Ok(SeedOutcome {
        seed,
        metrics: recorder.render(cfg.format),
        mean_rank_loss: recorder.mean_rank_loss(),
        rounds_recorded: recorder.recorded_rounds(),
        runtime_secs: recorder.elapsed_secs(),
        bound: None,
    })
}

fn fan_out_seeds<F>(base_seed: u64, seeds: u64, drive: F) -> Result<Vec<SeedOutcome>, CliError>
where
    F: Fn(u64) -> Result<SeedOutcome, CliError> + Sync,
{
    if seeds == 1 {
        return Ok(vec![drive(base_seed)?]);
    }
    thread::scope(|scope| {
        let handles: Vec<_> = (0..seeds)
            .map(|offset| {
                let drive = &drive;
                scope.spawn(move || drive(base_seed + offset))
            })
            .collect();
        handles
            .into_iter()
            .map(|handle| handle.join().expect("seed worker panicked"))
            .collect()
    })
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let values: Vec<f64> = values.into_iter().collect();
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

struct RowContext {
    algo: String,
    learner: String,
    loss: String,
    n_learners: usize,
    emit_timing: bool,
}

fn seed_rows(ctx: &RowContext, gamma: Option<f64>, outcomes: &[SeedOutcome], note: &str) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = outcomes
        .iter()
        .map(|outcome| SummaryRow {
            scope: "seed".into(),
            algo: ctx.algo.clone(),
            learner: ctx.learner.clone(),
            loss: ctx.loss.clone(),
            n_learners: ctx.n_learners,
            gamma,
            seed: Some(outcome.seed),
            rounds_recorded: outcome.rounds_recorded,
            mean_rank_loss: Some(outcome.mean_rank_loss),
            bound: outcome.bound,
            runtime_secs: ctx.emit_timing.then_some(outcome.runtime_secs),
            note: note.to_string(),
        })
        .collect();
    rows.push(SummaryRow {
        scope: "mean".into(),
        algo: ctx.algo.clone(),
        learner: ctx.learner.clone(),
        loss: ctx.loss.clone(),
        n_learners: ctx.n_learners,
        gamma,
        seed: None,
        rounds_recorded: outcomes.iter().map(|o| o.rounds_recorded).max().unwrap_or(0),
        mean_rank_loss: mean(outcomes.iter().map(|o| o.mean_rank_loss)),
        bound: mean(outcomes.iter().filter_map(|o| o.bound)),
        runtime_secs: ctx.emit_timing.then(|| outcomes.iter().map(|o| o.runtime_secs).sum()),
        note: note.to_string(),
    });
    rows
}

fn metrics_files(out: &Option<PathBuf>, gamma_tag: Option<f64>, outcomes: &[SeedOutcome]) -> Vec<(PathBuf, Vec<u8>)> {
    let Some(out) = out else {
        return Vec::new();
    };
    outcomes
        .iter()
        .map(|outcome| {
            let mut path = seed_path(out, outcome.seed);
            if let Some(gamma) = gamma_tag {
                let name = format!(
                    "gamma{}.{}",
                    gamma,
                    path.file_name().and_then(|n| n.to_str()).unwrap_or("metrics")
                );
                path = path.with_file_name(name);
            }
            (path, outcome.metrics.clone())
        })
        .collect()
}

/// `olmr run`: progressive training over the train split, recorded
/// evaluation over the test split, optionally swept over the edge grid.
pub fn run_dataset(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let data = load_dataset(cfg)?;
    let ctx = RowContext {
        algo: cfg.algo.to_string(),
        learner: cfg.learner.to_string(),
        loss: match cfg.algo {
            Algo::Bmr => cfg.loss.to_string(),
            Algo::Olmr => "logistic".into(),
        },
        n_learners: cfg.n_learners,
        emit_timing: cfg.emit_timing,
    };
    let gammas: Vec<Option<f64>> = match (cfg.algo, cfg.gamma_grid) {
        (Algo::Bmr, Some(grid)) => grid.values().iter().map(|&g| Some(g)).collect(),
        (Algo::Bmr, None) => vec![cfg.gamma],
        (Algo::Olmr, _) => vec![None],
    };

    let mut rows = Vec::new();
    let mut files = Vec::new();
    let mut human = Vec::new();
    let mut best: Option<(f64, Option<f64>)> = None;
    let mut first_error: Option<CliError> = None;
    let grid_mode = gammas.len() > 1;

    for gamma in gammas {
        let outcome = fan_out_seeds(cfg.seed, cfg.seeds, |seed| drive_dataset_seed(cfg, gamma, &data, seed));
        match outcome {
            Ok(outcomes) => {
                files.extend(metrics_files(&cfg.out, grid_mode.then_some(gamma).flatten(), &outcomes));
                rows.extend(seed_rows(&ctx, gamma, &outcomes, ""));
                let mean_loss = mean(outcomes.iter().map(|o| o.mean_rank_loss)).unwrap_or(f64::NAN);
                human.push(match gamma {
                    Some(gamma) => format!(
                        "{} gamma={gamma}: mean rank loss {mean_loss:.4} over {} seed(s)",
                        ctx.algo, cfg.seeds
                    ),
                    None => format!("{}: mean rank loss {mean_loss:.4} over {} seed(s)", ctx.algo, cfg.seeds),
                });
                if best.map_or(true, |(loss, _)| mean_loss < loss) {
                    best = Some((mean_loss, gamma));
                }
            }
            Err(error) => {
                if !grid_mode {
                    return Err(error);
                }
                rows.push(SummaryRow {
                    scope: "seed".into(),
                    algo: ctx.algo.clone(),
                    learner: ctx.learner.clone(),
                    loss: ctx.loss.clone(),
                    n_learners: ctx.n_learners,
                    gamma,
                    seed: None,
                    rounds_recorded: 0,
                    mean_rank_loss: None,
                    bound: None,
                    runtime_secs: None,
                    note: format!("failed: {error}"),
                });
                let gamma_desc = gamma.map(|g| g.to_string()).unwrap_or_default();
                human.push(format!("{} gamma={gamma_desc}: failed ({error})", ctx.algo));
                if first_error.is_none() {
                    first_error = Some(error);
                }
            }
        }
    }
    let Some((best_loss, best_gamma)) = best else {
        return Err(first_error.unwrap_or_else(|| CliError::config("no run succeeded")));
    };
    if grid_mode {
        rows.push(SummaryRow {
            scope: "best".into(),
            algo: ctx.algo.clone(),
            learner: ctx.learner.clone(),
            loss: ctx.loss.clone(),
            n_learners: ctx.n_learners,
            gamma: best_gamma,
            seed: None,
            rounds_recorded: 0,
            mean_rank_loss: Some(best_loss),
            bound: None,
            runtime_secs: None,
            note: "best over gamma grid".into(),
        });
        let gamma_desc = best_gamma.map(|g| g.to_string()).unwrap_or_default();
        human.push(format!("best {}: gamma={gamma_desc} mean rank loss {best_loss:.4}", ctx.algo));
    }
    let summary_csv = render_summary(&rows);
    Ok(RunOutput { files, rows, summary_csv, human, best_mean_loss: Some(best_loss) })
}

/// Bound overlay for the potential-based booster at horizon `n`.
pub fn bmr_bound(loss: LossKind, gamma: f64, n_learners: usize) -> f64 {
    let base = (-gamma * gamma * n_learners as f64 / 2.0).exp();
    match loss {
        LossKind::Hinge => (n_learners as f64 + 1.0) * base,
        _ => base,
    }
}

/// One seed of a synthetic stream against clairvoyant learners.
pub fn drive_simulation_seed(cfg: &SimulateConfig, seed: u64) -> Result<SeedOutcome, CliError> {
    let feed = LabelFeed::new();
    let learners = build_synthetic(cfg.learner, cfg.n_learners, cfg.gamma, cfg.excess, seed, &feed)?;
    let mut booster = make_booster(cfg.algo, cfg.k, Some(cfg.gamma), cfg.loss, learners, seed)?;
    let mut adversary = SubsetAdversary::new(cfg.k, sub_seed(seed, ADVERSARY_SEED_TAG))?;
    let empty = SparseFeatures::new();
    let mut recorder = Recorder::new(cfg.window, cfg.emit_timing);
    let mut loss_sum = 0.0;
    for t in 1..=cfg.rounds {
        let labels = adversary.next().expect("adversary is endless");
        feed.announce(labels.clone());
        let prediction = booster.predict(&empty)?;
        let loss = rank_loss(&labels, &prediction);
        loss_sum += loss;
        if t % cfg.record_every == 0 {
            recorder.observe(t, loss, booster.expert_cumulative_losses(), booster.empirical_edges());
        }
        booster.feedback(&labels)?;
    }
    let bound = match cfg.algo {
        Algo::Bmr => Some(bmr_bound(cfg.loss, cfg.gamma, cfg.n_learners)),
        Algo::Olmr => booster.empirical_edges().map(|edges| {
            let total: f64 = edges.iter().map(|e| e.unwrap_or(0.0).abs()).sum();
            if total > 0.0 {
                8.0 / total
            } else {
                f64::INFINITY
            }
        }),
    };
    Ok(SeedOutcome {
        seed,
        metrics: recorder.render(cfg.format),
        mean_rank_loss: loss_sum / cfg.rounds as f64,
        rounds_recorded: recorder.recorded_rounds(),
        runtime_secs: recorder.elapsed_secs(),
        bound,
    })
}

/// `olmr simulate`: the uniform nondegenerate-subset adversary against a
/// clairvoyant ensemble, with the applicable loss bound overlaid.
pub fn run_simulation(cfg: &SimulateConfig) -> Result<RunOutput, CliError> {
    let outcomes = fan_out_seeds(cfg.seed, cfg.seeds, |seed| drive_simulation_seed(cfg, seed))?;
    let ctx = RowContext {
        algo: cfg.algo.to_string(),
        learner: cfg.learner.to_string(),
        loss: match cfg.algo {
            Algo::Bmr => cfg.loss.to_string(),
            Algo::Olmr => "logistic".into(),
        },
        n_learners: cfg.n_learners,
        emit_timing: cfg.emit_timing,
    };
    let note = format!("simulate k={} gamma={} rounds={}", cfg.k, cfg.gamma, cfg.rounds);
    let rows = seed_rows(&ctx, Some(cfg.gamma), &outcomes, &note);
    let files = metrics_files(&cfg.out, None, &outcomes);
    let mean_loss = mean(outcomes.iter().map(|o| o.mean_rank_loss)).unwrap_or(f64::NAN);
    let mean_bound = mean(outcomes.iter().filter_map(|o| o.bound));
    let mut human = vec![format!(
        "{} vs {} learners: mean rank loss {mean_loss:.4} over {} seed(s), {} rounds",
        ctx.algo, ctx.learner, cfg.seeds, cfg.rounds
    )];
    if let Some(bound) = mean_bound {
        human.push(format!("loss bound overlay: {bound:.4}"));
    }
    let summary_csv = render_summary(&rows);
    Ok(RunOutput { files, rows, summary_csv, human, best_mean_loss: Some(mean_loss) })
}

/// Canonical feasible cost for a nondegenerate label set: 0 on relevant
/// labels, 1 on irrelevant ones.
pub fn canonical_eor_cost(labels: &LabelSet) -> CostVector {
    let costs = (0..labels.k()).map(|l| if labels.contains(l) { 0.0 } else { 1.0 }).collect();
    CostVector::new(costs).expect("zeros and ones are finite")
}

/// Result of a certification batch.
#[derive(Debug, Clone, Serialize)]
pub struct CertifyOutput {
    pub reps: u64,
    pub satisfied: u64,
    pub fraction: f64,
    /// Pass threshold `1 - delta - 2 * sqrt(delta * (1 - delta) / reps)`.
    pub threshold: f64,
    pub pass: bool,
    pub mean_margin: f64,
    pub rounds_per_rep: u64,
}

/// `olmr certify-wlc`: repeatedly stream the subset adversary against one
/// learner and check the weak-learning inequality per seeded run.
pub fn run_certification(cfg: &CertifyConfig) -> Result<CertifyOutput, CliError> {
    let mut satisfied = 0u64;
    let mut margin_sum = 0.0;
    for rep in 0..cfg.reps {
        let rep_seed = sub_seed(cfg.seed.wrapping_add(rep), REP_SEED_TAG);
        let feed = LabelFeed::new();
        let learner_gamma = match cfg.learner {
            SyntheticLearnerKind::Adversarial => cfg.gamma,
            _ => cfg.learner_gamma,
        };
        let mut learners =
            build_synthetic(cfg.learner, 1, learner_gamma, cfg.excess, rep_seed, &feed)?;
        let learner = learners.pop().expect("one learner");
        let mut learner = learner;
        let mut adversary = SubsetAdversary::new(cfg.k, sub_seed(rep_seed, ADVERSARY_SEED_TAG))?;
        let mut ledger = WlcLedger::new(WlcParams::new(cfg.gamma, cfg.delta, cfg.excess)?);
        let empty = SparseFeatures::new();
        for _ in 0..cfg.rounds {
            let labels = adversary.next().expect("adversary is endless");
            feed.announce(labels.clone());
            let prediction = learner.predict(&empty);
            ledger.record(1.0, &canonical_eor_cost(&labels), &prediction, &labels)?;
        }
        let report = ledger.report();
        if report.satisfied {
            satisfied += 1;
        }
        margin_sum += report.rhs - report.lhs;
    }
    let fraction = satisfied as f64 / cfg.reps as f64;
    let threshold =
        1.0 - cfg.delta - 2.0 * (cfg.delta * (1.0 - cfg.delta) / cfg.reps as f64).sqrt();
    Ok(CertifyOutput {
        reps: cfg.reps,
        satisfied,
        fraction,
        threshold,
        pass: fraction >= threshold,
        mean_margin: margin_sum / cfg.reps as f64,
        rounds_per_rep: cfg.rounds,
    })
}

/// `olmr dump-potentials`: CSV of the zero-state potential and its bound
/// per horizon.
pub fn dump_potentials_csv(cfg: &DumpConfig) -> Result<String, CliError> {
    let mut table = PotentialTable::new(cfg.k, cfg.gamma, cfg.loss)?;
    let labels = LabelSet::from_zero_based(cfg.k, 0..cfg.size_y)?;
    let zero = ScoreVector::zeros(cfg.k);
    let mut csv = String::from("horizon,potential,bound\n");
    for horizon in 0..=cfg.n_max {
        let value = table.potential(&labels, &zero, horizon)?;
        let bound = bmr_bound(cfg.loss, cfg.gamma, horizon);
        csv.push_str(&format!("{horizon},{value},{bound}\n"));
    }
    Ok(csv)
}
