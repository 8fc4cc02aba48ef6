//! Potential-based boost-by-majority for multi-label ranking.
//!
//! Assumes every weak learner has edge at least `gamma` over the baseline.
//! Weights are all 1 (simple cumulative votes), the final expert makes the
//! prediction, and the cost charged to learner `i` for label `l` is the
//! potential of the state after expert `i-1`'s votes plus one vote for
//! `l`, with the remaining learners still to come.

use crate::eor::normalize_cost;
use crate::losses::LossKind;
use crate::potentials::PotentialTable;
use crate::types::{LabelSet, ScoreVector, SparseFeatures, WeakPrediction};
use crate::weak_learners::WeakLearner;

use super::{BoostError, Booster, ImportanceTracker};

/// Configuration of the potential-based booster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmrConfig {
    /// Assumed edge of every weak learner; a tuning parameter.
    pub gamma: f64,
    /// Loss the potentials are built on (rank or hinge).
    pub loss: LossKind,
}

struct PendingRound {
    features: SparseFeatures,
    experts: Vec<ScoreVector>,
}

pub struct OnlineBmr {
    k: usize,
    config: BmrConfig,
    learners: Vec<Box<dyn WeakLearner>>,
    table: PotentialTable,
    trackers: Vec<ImportanceTracker>,
    pending: Option<PendingRound>,
    rounds: u64,
}

impl OnlineBmr {
    pub fn new(k: usize, config: BmrConfig, learners: Vec<Box<dyn WeakLearner>>) -> Result<Self, BoostError> {
        if learners.is_empty() {
            return Err(BoostError::NoLearners);
        }
        if config.gamma <= 0.0 {
            return Err(crate::types::DomainError::InvalidEdge { gamma: config.gamma }.into());
        }
        let table = PotentialTable::new(k, config.gamma, config.loss)?;
        let trackers = vec![ImportanceTracker::default(); learners.len()];
        Ok(Self { k, config, learners, table, trackers, pending: None, rounds: 0 })
    }

    pub fn config(&self) -> BmrConfig {
        self.config
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }
}

impl Booster for OnlineBmr {
    fn k(&self) -> usize {
        self.k
    }

    fn n_learners(&self) -> usize {
        self.learners.len()
    }

    fn predict(&mut self, features: &SparseFeatures) -> Result<ScoreVector, BoostError> {
        if self.pending.is_some() {
            return Err(BoostError::PredictionPending);
        }
        let mut experts = Vec::with_capacity(self.learners.len() + 1);
        experts.push(ScoreVector::zeros(self.k));
        let mut predictions: Vec<WeakPrediction> = Vec::with_capacity(self.learners.len());
        for learner in &mut self.learners {
            let prediction = learner.predict(features);
            if prediction.k() != self.k {
                return Err(BoostError::LabelCountMismatch { expected: self.k, got: prediction.k() });
            }
            let next = experts.last().expect("seeded with expert 0").add_scaled(&prediction, 1.0);
            experts.push(next);
            predictions.push(prediction);
        }
        let final_prediction = experts.last().expect("at least one learner").clone();
        self.pending = Some(PendingRound { features: features.clone(), experts });
        Ok(final_prediction)
    }

    fn feedback(&mut self, labels: &LabelSet) -> Result<(), BoostError> {
        let round = self.pending.take().ok_or(BoostError::FeedbackWithoutPrediction)?;
        if labels.k() != self.k {
            self.pending = Some(round);
            return Err(BoostError::LabelCountMismatch { expected: self.k, got: labels.k() });
        }
        let n = self.learners.len();
        for (index, learner) in self.learners.iter_mut().enumerate() {
            let remaining = n - index - 1;
            let raw = self.table.cost_vector(labels, &round.experts[index], remaining)?;
            let (cost, weight) = normalize_cost(&raw);
            let importance = self.trackers[index].observe(weight);
            learner.learn(&round.features, labels, &cost, importance);
        }
        self.rounds += 1;
        Ok(())
    }
}
