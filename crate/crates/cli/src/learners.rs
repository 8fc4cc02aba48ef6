//! Ensemble factories.
//!
//! Each learner in an ensemble gets its own derived seed, so stump pools
//! (and jittered linear learning rates) differ across the ensemble the way
//! independently configured learners would.

use olmr_core::rng::{seeded_rng, sub_seed};
use olmr_core::weak_learners::sim::{AdversarialLearner, BaselineLearner, LabelFeed, OracleEdgeLearner};
use olmr_core::weak_learners::{DecisionStump, FeedMode, FeedRule, PerLabelLinear, WeakLearner};
use rand::Rng;

use crate::config::{FeedModeArg, RunConfig, SyntheticLearnerKind, TrainableLearnerKind};
use crate::error::CliError;

const LEARNER_SEED_TAG: u64 = 0x6c72_6e72;

pub fn feed_rule(mode: FeedModeArg, raw_cost_feed: bool) -> FeedRule {
    FeedRule {
        mode: match mode {
            FeedModeArg::Argmin => FeedMode::ArgminSingle,
            FeedModeArg::Relevant => FeedMode::RelevantMulti,
        },
        normalize: !raw_cost_feed,
    }
}

/// Build the trainable ensemble for a dataset run.
pub fn build_trainable(
    cfg: &RunConfig,
    k: usize,
    dim: usize,
    seed: u64,
) -> Result<Vec<Box<dyn WeakLearner>>, CliError> {
    let rule = feed_rule(cfg.feed_mode, cfg.raw_cost_feed);
    let mut learners: Vec<Box<dyn WeakLearner>> = Vec::with_capacity(cfg.n_learners);
    for index in 0..cfg.n_learners {
        let learner_seed = sub_seed(seed, LEARNER_SEED_TAG ^ index as u64);
        match cfg.learner {
            TrainableLearnerKind::Stump => {
                learners.push(Box::new(DecisionStump::new(k, cfg.feature_pool, rule, learner_seed)?));
            }
            TrainableLearnerKind::Linear => {
                // spread rates over [lr/2, lr*2] so the ensemble is not N
                // copies of one scorer
                let mut rng = seeded_rng(learner_seed, 1);
                let rate = cfg.learning_rate * 2f64.powf(rng.gen_range(-1.0..1.0));
                learners.push(Box::new(PerLabelLinear::new(k, dim, rate, rule)?));
            }
        }
    }
    Ok(learners)
}

/// Build a clairvoyant ensemble wired to `feed` for a simulation.
pub fn build_synthetic(
    kind: SyntheticLearnerKind,
    n_learners: usize,
    gamma: f64,
    excess: f64,
    seed: u64,
    feed: &LabelFeed,
) -> Result<Vec<Box<dyn WeakLearner>>, CliError> {
    let mut learners: Vec<Box<dyn WeakLearner>> = Vec::with_capacity(n_learners);
    for index in 0..n_learners {
        let learner_seed = sub_seed(seed, LEARNER_SEED_TAG ^ index as u64);
        match kind {
            SyntheticLearnerKind::Oracle => {
                learners.push(Box::new(OracleEdgeLearner::new(gamma, learner_seed, feed.clone())?));
            }
            SyntheticLearnerKind::Baseline => {
                learners.push(Box::new(BaselineLearner::new(gamma, feed.clone())?));
            }
            SyntheticLearnerKind::Adversarial => {
                learners.push(Box::new(AdversarialLearner::new(gamma, excess, learner_seed, feed.clone())?));
            }
        }
    }
    Ok(learners)
}

/// Phase boundary of the adversarial construction for a given budget.
pub fn adversarial_phase_boundary(gamma: f64, excess: f64) -> u64 {
    (excess / (4.0 * gamma)).floor() as u64
}
