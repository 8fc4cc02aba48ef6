//! The online boosting protocol and its two instantiations.
//!
//! Each round a booster gathers one prediction per weak learner, records
//! the partial weighted votes `s^j = sum_{i<=j} alpha_i * yhat_i` (expert
//! `j`), commits a final score vector, and only then receives the true
//! label set, from which it derives per-learner cost vectors and
//! importance weights. Prediction and feedback must strictly alternate.

mod bmr;
mod olmr;

pub use bmr::{BmrConfig, OnlineBmr};
pub use olmr::{projected_ogd_step, AdaOlmr};

use thiserror::Error;

use crate::losses::{logistic_gradient, logistic_loss};
use crate::potentials::PotentialError;
use crate::types::{DomainError, LabelSet, ScoreVector, SparseFeatures, WeakPrediction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoostError {
    #[error("feedback arrived without a pending prediction")]
    FeedbackWithoutPrediction,
    #[error("a prediction is already pending feedback")]
    PredictionPending,
    #[error("a booster needs at least one weak learner")]
    NoLearners,
    #[error("label count mismatch: booster built for k = {expected}, got {got}")]
    LabelCountMismatch { expected: usize, got: usize },
    #[error("gradient sequence is empty")]
    EmptySequence,
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// One full prediction/feedback cycle driver.
pub trait Booster {
    fn k(&self) -> usize;

    fn n_learners(&self) -> usize;

    /// Commit the round's score vector. Errors if a prediction is already
    /// awaiting feedback.
    fn predict(&mut self, features: &SparseFeatures) -> Result<ScoreVector, BoostError>;

    /// Reveal the round's label set; must follow its prediction exactly
    /// once.
    fn feedback(&mut self, labels: &LabelSet) -> Result<(), BoostError>;

    /// Measured per-learner edges, when the booster tracks them.
    fn empirical_edges(&self) -> Option<Vec<Option<f64>>> {
        None
    }

    /// Cumulative rank loss per expert, when tracked.
    fn expert_cumulative_losses(&self) -> Option<Vec<f64>> {
        None
    }
}

/// Running-maximum normalizer turning raw cost ranges into importance
/// weights in `[0, 1]`.
///
/// The true normalizer `max_t w[t]` is only known in hindsight; dividing
/// by the running maximum is the online-feasible stand-in.
#[derive(Debug, Clone, Default)]
pub(crate) struct ImportanceTracker {
    max_seen: f64,
}

impl ImportanceTracker {
    pub(crate) fn observe(&mut self, weight: f64) -> f64 {
        if weight > self.max_seen {
            self.max_seen = weight;
        }
        if self.max_seen <= 0.0 {
            0.0
        } else {
            (weight / self.max_seen).clamp(0.0, 1.0)
        }
    }
}

/// One recorded round of the per-learner weight optimization: the loss in
/// the single weight `alpha` is
/// `f(alpha) = logistic_loss(labels, base + alpha * prediction)`.
#[derive(Debug, Clone)]
pub struct OgdRound {
    pub labels: LabelSet,
    pub base: ScoreVector,
    pub prediction: WeakPrediction,
}

impl OgdRound {
    /// `f(alpha)` for this round.
    pub fn loss_at(&self, alpha: f64) -> f64 {
        logistic_loss(&self.labels, &self.base.add_scaled(&self.prediction, alpha))
    }

    /// Analytic `f'(alpha)`: the next state's gradient dotted with the
    /// prediction.
    pub fn derivative_at(&self, alpha: f64) -> f64 {
        logistic_gradient(&self.labels, &self.base.add_scaled(&self.prediction, alpha)).dot(&self.prediction)
    }
}

/// Replay of the projected-gradient weight updates against the best fixed
/// weight in hindsight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretAudit {
    pub cumulative_loss: f64,
    pub best_fixed_loss: f64,
    pub best_alpha: f64,
    pub regret: f64,
}

/// Replays the online iterates over a recorded loss sequence and
/// grid-searches the best fixed weight in `[-2, 2]` at resolution 1e-3.
pub fn ogd_regret_audit(rounds: &[OgdRound]) -> Result<RegretAudit, BoostError> {
    if rounds.is_empty() {
        return Err(BoostError::EmptySequence);
    }
    let mut alpha = 0.0;
    let mut cumulative_loss = 0.0;
    for (t, round) in rounds.iter().enumerate() {
        cumulative_loss += round.loss_at(alpha);
        alpha = projected_ogd_step(alpha, round.derivative_at(alpha), t as u64 + 1);
    }

    // flatten to per-pair (weight, base margin, margin slope) so the grid
    // sweep is a pure softplus pass
    let mut pairs: Vec<(f64, f64, f64)> = Vec::new();
    for round in rounds {
        let w = crate::losses::pair_weight(&round.labels);
        if w == 0.0 {
            continue;
        }
        for &l in round.labels.members() {
            for &r in round.labels.complement() {
                let z0 = round.base.get(r) - round.base.get(l);
                let dz = round.prediction.prob(r) - round.prediction.prob(l);
                pairs.push((w, z0, dz));
            }
        }
    }
    let mut best_fixed_loss = f64::INFINITY;
    let mut best_alpha = -2.0;
    for step in 0..=4000u32 {
        let a = -2.0 + f64::from(step) * 1e-3;
        let total: f64 = pairs.iter().map(|&(w, z0, dz)| w * crate::losses::softplus(z0 + a * dz)).sum();
        if total < best_fixed_loss {
            best_fixed_loss = total;
            best_alpha = a;
        }
    }
    Ok(RegretAudit {
        cumulative_loss,
        best_fixed_loss,
        best_alpha,
        regret: cumulative_loss - best_fixed_loss,
    })
}
