//! Adaptive booster: per-learner weights by projected online gradient
//! descent on the logistic surrogate, expert selection by Hedge.
//!
//! No edge assumption: each learner's weight `alpha_i` tracks how useful
//! it actually is (negative weights turn bad learners around), and the
//! booster follows expert `i_t` drawn with probability proportional to
//! `v_i`, which decays multiplicatively in each expert's rank loss.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::losses::{adaptive_weight, logistic_gradient, rank_loss};
use crate::rng::seeded_rng;
use crate::types::{CostVector, LabelSet, ScoreVector, SparseFeatures, WeakPrediction};
use crate::weak_learners::WeakLearner;

use super::{BoostError, Booster, ImportanceTracker};

/// One projected OGD update: `clamp(alpha - grad / sqrt(t), [-2, 2])`.
pub fn projected_ogd_step(alpha: f64, grad: f64, t: u64) -> f64 {
    let eta = 1.0 / (t as f64).sqrt();
    (alpha - eta * grad).clamp(-2.0, 2.0)
}

struct PendingRound {
    features: SparseFeatures,
    predictions: Vec<WeakPrediction>,
    experts: Vec<ScoreVector>,
}

pub struct AdaOlmr {
    k: usize,
    learners: Vec<Box<dyn WeakLearner>>,
    /// Learner weights, kept in `[-2, 2]` by the projection.
    alpha: Vec<f64>,
    /// Hedge state in log space: `log_v[i]` is minus expert `i+1`'s
    /// cumulative rank loss, so selection probabilities never underflow.
    log_v: Vec<f64>,
    t: u64,
    cum_cost_dot: Vec<f64>,
    cum_weight: Vec<f64>,
    trackers: Vec<ImportanceTracker>,
    pending: Option<PendingRound>,
    rng: ChaCha8Rng,
}

impl AdaOlmr {
    pub fn new(k: usize, learners: Vec<Box<dyn WeakLearner>>, seed: u64) -> Result<Self, BoostError> {
        if learners.is_empty() {
            return Err(BoostError::NoLearners);
        }
        let n = learners.len();
        Ok(Self {
            k,
            learners,
            alpha: vec![0.0; n],
            log_v: vec![0.0; n],
            t: 1,
            cum_cost_dot: vec![0.0; n],
            cum_weight: vec![0.0; n],
            trackers: vec![ImportanceTracker::default(); n],
            pending: None,
            rng: seeded_rng(seed, 0x6f6c_6d72),
        })
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn weights(&self) -> &[f64] {
        &self.alpha
    }

    /// Expert selection probabilities `v / sum(v)`, computed stably from
    /// the log-space state.
    pub fn expert_selection_probs(&self) -> Vec<f64> {
        let max = self.log_v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = self.log_v.iter().map(|lv| (lv - max).exp()).collect();
        let total: f64 = weights.iter().sum();
        weights.into_iter().map(|w| w / total).collect()
    }

    /// Measured edge of learner `index`: minus its average cost per unit
    /// of accumulated adaptive weight. Absent until the learner has seen
    /// any informative round.
    pub fn empirical_edge(&self, index: usize) -> Option<f64> {
        (self.cum_weight[index] > 0.0).then(|| -self.cum_cost_dot[index] / self.cum_weight[index])
    }

    fn draw_expert(&mut self) -> usize {
        let probs = self.expert_selection_probs();
        let r: f64 = self.rng.gen();
        let mut acc = 0.0;
        for (index, p) in probs.iter().enumerate() {
            acc += p;
            if r < acc {
                return index;
            }
        }
        probs.len() - 1
    }
}

impl Booster for AdaOlmr {
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
        let mut predictions = Vec::with_capacity(self.learners.len());
        for (index, learner) in self.learners.iter_mut().enumerate() {
            let prediction = learner.predict(features);
            if prediction.k() != self.k {
                return Err(BoostError::LabelCountMismatch { expected: self.k, got: prediction.k() });
            }
            let next = experts.last().expect("seeded with expert 0").add_scaled(&prediction, self.alpha[index]);
            experts.push(next);
            predictions.push(prediction);
        }
        let chosen = self.draw_expert() + 1; // experts 1..=N are selectable
        let final_prediction = experts[chosen].clone();
        self.pending = Some(PendingRound { features: features.clone(), predictions, experts });
        Ok(final_prediction)
    }

    fn feedback(&mut self, labels: &LabelSet) -> Result<(), BoostError> {
        let round = self.pending.take().ok_or(BoostError::FeedbackWithoutPrediction)?;
        if labels.k() != self.k {
            self.pending = Some(round);
            return Err(BoostError::LabelCountMismatch { expected: self.k, got: labels.k() });
        }
        let n = self.learners.len();
        // gradients[j] is the surrogate gradient at expert j's state; the
        // cost for learner index j is gradients[j], and gradients[j + 1]
        // feeds its weight update.
        let gradients: Vec<CostVector> =
            (0..=n).map(|j| logistic_gradient(labels, &round.experts[j])).collect();

        for index in 0..n {
            let slope = gradients[index + 1].dot(&round.predictions[index]);
            self.alpha[index] = projected_ogd_step(self.alpha[index], slope, self.t);
        }
        for index in 0..n {
            self.log_v[index] -= rank_loss(labels, &round.experts[index + 1]);
        }
        for (index, learner) in self.learners.iter_mut().enumerate() {
            let cost = &gradients[index];
            self.cum_cost_dot[index] += cost.dot(&round.predictions[index]);
            let weight = adaptive_weight(cost);
            self.cum_weight[index] += weight;
            let importance = self.trackers[index].observe(weight);
            learner.learn(&round.features, labels, cost, importance);
        }
        self.t += 1;
        Ok(())
    }

    fn empirical_edges(&self) -> Option<Vec<Option<f64>>> {
        Some((0..self.learners.len()).map(|i| self.empirical_edge(i)).collect())
    }

    fn expert_cumulative_losses(&self) -> Option<Vec<f64>> {
        Some(self.log_v.iter().map(|lv| -lv).collect())
    }
}
