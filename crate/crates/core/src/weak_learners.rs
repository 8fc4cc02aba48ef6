//! Weak learners and the online weak-learning condition.
//!
//! A weak learner must commit a distribution over the labels before the
//! round's label or cost is revealed, then gets the cost vector and an
//! importance weight back. Two trainable families are built in
//! ([`DecisionStump`], [`PerLabelLinear`]); the [`sim`] submodule holds
//! clairvoyant learners with a synthetic edge, usable only through a
//! simulation harness. [`WlcLedger`] certifies the weak-learning condition
//! empirically.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::eor::{is_eor_cost, make_baseline, normalize_cost};
use crate::rng::seeded_rng;
use crate::types::{
    BaselineParams, CostVector, DomainError, LabelSet, SparseFeatures, WeakPrediction,
};

/// The booster-facing contract every weak learner implements.
///
/// `predict` must not depend on the current round's label or cost; the
/// booster only calls `learn` after the prediction is committed.
pub trait WeakLearner {
    fn predict(&mut self, features: &SparseFeatures) -> WeakPrediction;

    /// Receive the round's feedback: the revealed label set, the cost
    /// vector charged to this learner, and an importance weight in
    /// `[0, 1]`. Zero importance must leave the learner unchanged.
    fn learn(&mut self, features: &SparseFeatures, labels: &LabelSet, cost: &CostVector, importance: f64);
}

/// How a trainable learner converts a cost vector into training targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedMode {
    /// Train toward the single cheapest label, ties broken by lowest
    /// index, with weight `(max - min) * importance`.
    ArgminSingle,
    /// Feed every relevant label `l` with weight
    /// `(max - cost[l]) * importance`.
    RelevantMulti,
}

/// Target-derivation rule shared by the trainable learners.
///
/// With `normalize` set the cost vector is first rescaled onto `[0, 1]`
/// (so the derived weights reduce to the booster's importance); without it
/// the raw cost magnitudes pass through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedRule {
    pub mode: FeedMode,
    pub normalize: bool,
}

impl Default for FeedRule {
    fn default() -> Self {
        Self { mode: FeedMode::ArgminSingle, normalize: true }
    }
}

impl FeedRule {
    /// Weighted training labels for one feedback round. Empty when the
    /// round carries no information (zero importance or constant cost).
    pub fn derive(&self, labels: &LabelSet, cost: &CostVector, importance: f64) -> Vec<(usize, f64)> {
        if importance <= 0.0 || cost.k() == 0 {
            return Vec::new();
        }
        let effective;
        let cost = if self.normalize {
            let (normalized, weight) = normalize_cost(cost);
            if weight <= 0.0 {
                return Vec::new();
            }
            effective = normalized;
            &effective
        } else {
            if cost.range() <= 0.0 {
                return Vec::new();
            }
            cost
        };
        match self.mode {
            FeedMode::ArgminSingle => {
                let mut best = 0;
                for i in 1..cost.k() {
                    if cost.get(i) < cost.get(best) {
                        best = i;
                    }
                }
                let weight = (cost.range() * importance).clamp(0.0, 1.0);
                if weight > 0.0 {
                    vec![(best, weight)]
                } else {
                    Vec::new()
                }
            }
            FeedMode::RelevantMulti => {
                let max = cost.max();
                labels
                    .members()
                    .iter()
                    .filter_map(|&l| {
                        let weight = ((max - cost.get(l)) * importance).clamp(0.0, 1.0);
                        (weight > 0.0).then_some((l, weight))
                    })
                    .collect()
            }
        }
    }
}

struct FeatureSlot {
    feature: u32,
    weight_sum: f64,
    value_sum: f64,
    side_weight: [f64; 2],
    side_counts: [Vec<f64>; 2],
}

impl FeatureSlot {
    fn new(feature: u32, k: usize) -> Self {
        Self {
            feature,
            weight_sum: 0.0,
            value_sum: 0.0,
            side_weight: [0.0; 2],
            side_counts: [vec![0.0; k], vec![0.0; k]],
        }
    }

    fn threshold(&self) -> f64 {
        if self.weight_sum > 0.0 {
            self.value_sum / self.weight_sum
        } else {
            0.0
        }
    }

    fn side(&self, value: f64) -> usize {
        usize::from(value > self.threshold())
    }

    /// Weighted squared distance between the two side label distributions
    /// and the pooled one; 0 until both sides carry weight.
    fn separation(&self) -> f64 {
        let total = self.side_weight[0] + self.side_weight[1];
        if self.side_weight[0] <= 0.0 || self.side_weight[1] <= 0.0 {
            return 0.0;
        }
        let k = self.side_counts[0].len();
        let mut score = 0.0;
        for side in 0..2 {
            let frac = self.side_weight[side] / total;
            for l in 0..k {
                let p_side = self.side_counts[side][l] / self.side_weight[side];
                let p_all = (self.side_counts[0][l] + self.side_counts[1][l]) / total;
                score += frac * (p_side - p_all) * (p_side - p_all);
            }
        }
        score
    }
}

/// Online decision stump over a reservoir-sampled feature pool.
///
/// Each pooled feature keeps a running weighted-mean threshold and
/// importance-weighted label counts on both sides. Prediction picks the
/// feature whose sides separate the labels best and emits the add-one
/// smoothed label distribution of the matching side; before any feedback
/// the prediction is uniform.
pub struct DecisionStump {
    k: usize,
    pool_size: usize,
    feed: FeedRule,
    rng: ChaCha8Rng,
    slots: Vec<FeatureSlot>,
    seen: HashSet<u32>,
    candidates_seen: u64,
}

impl DecisionStump {
    pub fn new(k: usize, pool_size: usize, feed: FeedRule, seed: u64) -> Result<Self, DomainError> {
        if k < 2 {
            return Err(DomainError::LabelCountTooSmall { k, min: 2 });
        }
        Ok(Self {
            k,
            pool_size: pool_size.max(1),
            feed,
            rng: seeded_rng(seed, 0x7374_756d),
            slots: Vec::new(),
            seen: HashSet::new(),
            candidates_seen: 0,
        })
    }

    fn admit_features(&mut self, features: &SparseFeatures) {
        for (index, _) in features.iter() {
            if !self.seen.insert(index) {
                continue;
            }
            self.candidates_seen += 1;
            if self.slots.len() < self.pool_size {
                self.slots.push(FeatureSlot::new(index, self.k));
            } else {
                let j = self.rng.gen_range(0..self.candidates_seen);
                if (j as usize) < self.pool_size {
                    self.slots[j as usize] = FeatureSlot::new(index, self.k);
                }
            }
        }
    }

    fn best_slot(&self) -> Option<&FeatureSlot> {
        self.slots
            .iter()
            .filter(|slot| slot.weight_sum > 0.0)
            .max_by(|a, b| a.separation().partial_cmp(&b.separation()).expect("finite scores"))
    }

    fn uniform(&self) -> WeakPrediction {
        WeakPrediction::new(vec![1.0 / self.k as f64; self.k]).expect("uniform is a distribution")
    }
}

impl WeakLearner for DecisionStump {
    fn predict(&mut self, features: &SparseFeatures) -> WeakPrediction {
        let Some(slot) = self.best_slot() else {
            return self.uniform();
        };
        let side = slot.side(features.get(slot.feature));
        let total = slot.side_weight[side];
        let probs: Vec<f64> = slot.side_counts[side]
            .iter()
            .map(|&c| (c + 1.0) / (total + self.k as f64))
            .collect();
        WeakPrediction::new(probs).expect("smoothed counts form a distribution")
    }

    fn learn(&mut self, features: &SparseFeatures, labels: &LabelSet, cost: &CostVector, importance: f64) {
        let feeds = self.feed.derive(labels, cost, importance);
        if feeds.is_empty() {
            return;
        }
        self.admit_features(features);
        let total_weight: f64 = feeds.iter().map(|(_, w)| w).sum();
        for slot in &mut self.slots {
            let value = features.get(slot.feature);
            let side = slot.side(value);
            for &(label, weight) in &feeds {
                slot.side_counts[side][label] += weight;
                slot.side_weight[side] += weight;
            }
            slot.value_sum += total_weight * value;
            slot.weight_sum += total_weight;
        }
    }
}

/// One online logistic scorer per label (one-vs-rest), combined by softmax.
///
/// Trained on the single-label feed with importance weighting; with zero
/// weights the softmax is uniform.
pub struct PerLabelLinear {
    k: usize,
    dim: usize,
    learning_rate: f64,
    feed: FeedRule,
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

impl PerLabelLinear {
    pub fn new(k: usize, dim: usize, learning_rate: f64, feed: FeedRule) -> Result<Self, DomainError> {
        if k < 2 {
            return Err(DomainError::LabelCountTooSmall { k, min: 2 });
        }
        Ok(Self {
            k,
            dim: dim.max(1),
            learning_rate,
            feed,
            weights: vec![Vec::new(); k],
            bias: vec![0.0; k],
        })
    }

    fn raw_scores(&self, features: &SparseFeatures) -> Vec<f64> {
        (0..self.k)
            .map(|label| {
                let row = &self.weights[label];
                let mut z = self.bias[label];
                for (index, value) in features.iter() {
                    let index = index as usize;
                    if index < row.len() {
                        z += row[index] * value;
                    }
                }
                z
            })
            .collect()
    }
}

impl WeakLearner for PerLabelLinear {
    fn predict(&mut self, features: &SparseFeatures) -> WeakPrediction {
        let scores = self.raw_scores(features);
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|z| (z - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        WeakPrediction::new(exps.into_iter().map(|e| e / sum).collect())
            .expect("softmax is a distribution")
    }

    fn learn(&mut self, features: &SparseFeatures, labels: &LabelSet, cost: &CostVector, importance: f64) {
        let feeds = self.feed.derive(labels, cost, importance);
        if feeds.is_empty() {
            return;
        }
        let scores = self.raw_scores(features);
        for (target, weight) in feeds {
            for label in 0..self.k {
                let wanted = f64::from(label == target);
                let error = crate::losses::sigmoid(scores[label]) - wanted;
                let step = self.learning_rate * weight * error;
                let row = &mut self.weights[label];
                for (index, value) in features.iter() {
                    let index = index as usize;
                    if index >= self.dim {
                        continue;
                    }
                    if index >= row.len() {
                        row.resize(index + 1, 0.0);
                    }
                    row[index] -= step * value;
                }
                self.bias[label] -= step;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WlcError {
    #[error("importance weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),
    #[error("cost vector is not in the feasible edge-over-random set")]
    CostNotFeasible,
    #[error("certification level gamma = {0} must lie in (0, 1)")]
    BadGamma(f64),
    #[error("confidence delta = {0} must lie in (0, 1)")]
    BadDelta(f64),
    #[error("excess loss {0} must be positive")]
    BadExcess(f64),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Parameters of the weak-learning condition: a learner has edge `gamma`
/// with confidence `1 - delta` after an excess-loss warm-up of `excess`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WlcParams {
    pub gamma: f64,
    pub delta: f64,
    pub excess: f64,
}

impl WlcParams {
    pub fn new(gamma: f64, delta: f64, excess: f64) -> Result<Self, WlcError> {
        if !(0.0..1.0).contains(&gamma) || gamma == 0.0 {
            return Err(WlcError::BadGamma(gamma));
        }
        if !(0.0..1.0).contains(&delta) || delta == 0.0 {
            return Err(WlcError::BadDelta(delta));
        }
        if !excess.is_finite() || excess <= 0.0 {
            return Err(WlcError::BadExcess(excess));
        }
        Ok(Self { gamma, delta, excess })
    }
}

/// Report of one certification stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WlcReport {
    /// Accumulated weighted cost of the learner's predictions.
    pub lhs: f64,
    /// Accumulated weighted cost of the edge-`gamma` baseline plus the
    /// excess allowance.
    pub rhs: f64,
    pub satisfied: bool,
    pub trials: u64,
}

/// Running sums for certifying the weak-learning condition on a stream.
#[derive(Debug, Clone)]
pub struct WlcLedger {
    params: WlcParams,
    lhs: f64,
    baseline: f64,
    trials: u64,
}

impl WlcLedger {
    pub fn new(params: WlcParams) -> Self {
        Self { params, lhs: 0.0, baseline: 0.0, trials: 0 }
    }

    pub fn params(&self) -> WlcParams {
        self.params
    }

    /// Record one round. The cost must be feasible and the weight in
    /// `[0, 1]`; order of rounds does not matter.
    pub fn record(
        &mut self,
        weight: f64,
        cost: &CostVector,
        prediction: &WeakPrediction,
        labels: &LabelSet,
    ) -> Result<(), WlcError> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(WlcError::WeightOutOfRange(weight));
        }
        if !is_eor_cost(cost, labels) {
            return Err(WlcError::CostNotFeasible);
        }
        let baseline = make_baseline(labels, &BaselineParams::new(labels.k(), self.params.gamma)?)?;
        self.lhs += weight * cost.dot(prediction);
        self.baseline += weight * cost.dot(&baseline);
        self.trials += 1;
        Ok(())
    }

    pub fn report(&self) -> WlcReport {
        let rhs = self.baseline + self.params.excess;
        WlcReport { lhs: self.lhs, rhs, satisfied: self.lhs <= rhs, trials: self.trials }
    }
}

/// Label source drawing uniformly from the nondegenerate subsets of the
/// label set (never the empty set, never all labels).
pub struct SubsetAdversary {
    k: usize,
    rng: ChaCha8Rng,
}

impl SubsetAdversary {
    pub fn new(k: usize, seed: u64) -> Result<Self, DomainError> {
        if k < 2 {
            return Err(DomainError::LabelCountTooSmall { k, min: 2 });
        }
        if k > 30 {
            // exact enumeration of 2^k - 2 masks
            return Err(DomainError::LabelOutOfRange { label: k, k: 30 });
        }
        Ok(Self { k, rng: seeded_rng(seed, 0x6164_7673) })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Iterator for SubsetAdversary {
    type Item = LabelSet;

    fn next(&mut self) -> Option<LabelSet> {
        let mask: u64 = self.rng.gen_range(1..=(1u64 << self.k) - 2);
        let members = (0..self.k).filter(|&l| (mask >> l) & 1 == 1);
        Some(LabelSet::from_zero_based(self.k, members).expect("mask is in range"))
    }
}

pub mod sim {
    //! Clairvoyant learners for simulation and certification.
    //!
    //! These learners see the round's label set before predicting, which
    //! no real learner can. They are constructible only with a
    //! [`LabelFeed`], the handle a simulation driver pumps each round, so
    //! the dataset path cannot instantiate them.

    use std::cell::RefCell;
    use std::rc::Rc;

    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    use crate::eor::{encode_single_label, make_baseline};
    use crate::rng::seeded_rng;
    use crate::types::{BaselineParams, CostVector, DomainError, LabelSet, SparseFeatures, WeakPrediction};

    use super::WeakLearner;

    /// Out-of-band channel carrying the upcoming round's label set from a
    /// simulation driver to its clairvoyant learners.
    #[derive(Clone, Default)]
    pub struct LabelFeed {
        slot: Rc<RefCell<Option<LabelSet>>>,
    }

    impl LabelFeed {
        pub fn new() -> Self {
            Self::default()
        }

        /// Driver side: publish the label set for the round about to run.
        pub fn announce(&self, labels: LabelSet) {
            *self.slot.borrow_mut() = Some(labels);
        }

        fn current(&self) -> LabelSet {
            self.slot
                .borrow()
                .clone()
                .expect("clairvoyant learner used without an announced label; drive it through a simulation harness")
        }
    }

    fn sample_label(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        for (label, &p) in probs.iter().enumerate() {
            acc += p;
            if r < acc {
                return label;
            }
        }
        probs.len() - 1
    }

    fn baseline_for(labels: &LabelSet, gamma: f64) -> WeakPrediction {
        let params = BaselineParams::new(labels.k(), gamma).expect("validated at construction");
        make_baseline(labels, &params).expect("edge fits every nondegenerate label set it is used with")
    }

    /// Single-label learner with a true synthetic edge: samples one label
    /// from the edge-`gamma` baseline each round.
    pub struct OracleEdgeLearner {
        gamma: f64,
        feed: LabelFeed,
        rng: ChaCha8Rng,
    }

    impl OracleEdgeLearner {
        pub fn new(gamma: f64, seed: u64, feed: LabelFeed) -> Result<Self, DomainError> {
            if !gamma.is_finite() || !(0.0..1.0).contains(&gamma) {
                return Err(DomainError::InvalidEdge { gamma });
            }
            Ok(Self { gamma, feed, rng: seeded_rng(seed, 0x6f72_6163) })
        }

        pub fn gamma(&self) -> f64 {
            self.gamma
        }
    }

    impl WeakLearner for OracleEdgeLearner {
        fn predict(&mut self, _features: &SparseFeatures) -> WeakPrediction {
            let labels = self.feed.current();
            let baseline = baseline_for(&labels, self.gamma);
            let label = sample_label(baseline.probs(), &mut self.rng);
            encode_single_label(label, labels.k()).expect("sampled label is in range")
        }

        fn learn(&mut self, _: &SparseFeatures, _: &LabelSet, _: &CostVector, _: f64) {}
    }

    /// Emits the edge-`gamma` baseline distribution itself, exactly.
    ///
    /// Its empirical edge under the adaptive booster is `gamma` by
    /// construction, which makes it the reference point for edge
    /// measurements.
    pub struct BaselineLearner {
        gamma: f64,
        feed: LabelFeed,
    }

    impl BaselineLearner {
        pub fn new(gamma: f64, feed: LabelFeed) -> Result<Self, DomainError> {
            if !gamma.is_finite() || !(0.0..1.0).contains(&gamma) {
                return Err(DomainError::InvalidEdge { gamma });
            }
            Ok(Self { gamma, feed })
        }
    }

    impl WeakLearner for BaselineLearner {
        fn predict(&mut self, _features: &SparseFeatures) -> WeakPrediction {
            baseline_for(&self.feed.current(), self.gamma)
        }

        fn learn(&mut self, _: &SparseFeatures, _: &LabelSet, _: &CostVector, _: f64) {}
    }

    /// Phase-switched lower-bound learner: uninformative (edge 0) for the
    /// first `excess / (4 * gamma)` rounds, edge `2 * gamma` afterwards.
    pub struct AdversarialLearner {
        gamma: f64,
        phase_boundary: u64,
        rounds_seen: u64,
        feed: LabelFeed,
        rng: ChaCha8Rng,
    }

    impl AdversarialLearner {
        pub fn new(gamma: f64, excess: f64, seed: u64, feed: LabelFeed) -> Result<Self, DomainError> {
            if !gamma.is_finite() || gamma <= 0.0 || gamma >= 0.5 {
                return Err(DomainError::InvalidEdge { gamma });
            }
            if !excess.is_finite() || excess <= 0.0 {
                return Err(DomainError::InvalidEdge { gamma: excess });
            }
            let phase_boundary = (excess / (4.0 * gamma)).floor() as u64;
            Ok(Self {
                gamma,
                phase_boundary,
                rounds_seen: 0,
                feed,
                rng: seeded_rng(seed, 0x6164_7672),
            })
        }

        /// Last round of the uninformative phase.
        pub fn phase_boundary(&self) -> u64 {
            self.phase_boundary
        }

        pub fn in_first_phase(&self) -> bool {
            self.rounds_seen <= self.phase_boundary
        }
    }

    impl WeakLearner for AdversarialLearner {
        fn predict(&mut self, _features: &SparseFeatures) -> WeakPrediction {
            self.rounds_seen += 1;
            let edge = if self.rounds_seen <= self.phase_boundary { 0.0 } else { 2.0 * self.gamma };
            let labels = self.feed.current();
            let baseline = baseline_for(&labels, edge);
            let label = sample_label(baseline.probs(), &mut self.rng);
            encode_single_label(label, labels.k()).expect("sampled label is in range")
        }

        fn learn(&mut self, _: &SparseFeatures, _: &LabelSet, _: &CostVector, _: f64) {}
    }
}
