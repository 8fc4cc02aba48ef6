//! The edge-over-random baseline and the feasible cost-vector set.
//!
//! A learner with edge `gamma` beats the baseline distribution
//! `u^Y_gamma`, which spreads mass `a = (1 - |Y|*gamma)/k` on every label
//! and adds `gamma` on each relevant one. Cost vectors the booster may
//! charge live in the set checked by [`is_eor_cost`]: entries in `[0,1]`,
//! relevant costs no larger than irrelevant ones, minimum 0, maximum 1.

use crate::types::{BaselineParams, CostVector, DomainError, LabelSet, WeakPrediction, EQ_TOL};

/// The baseline distribution `u^Y_gamma`.
///
/// For degenerate `Y` (empty or full) there is no pair to favor and the
/// uniform distribution is returned; otherwise `gamma` must leave the
/// common floor nonnegative, i.e. `gamma <= 1/|Y|`.
pub fn make_baseline(y: &LabelSet, params: &BaselineParams) -> Result<WeakPrediction, DomainError> {
    let k = params.k();
    debug_assert_eq!(k, y.k());
    let gamma = params.gamma();
    if y.is_degenerate() || gamma == 0.0 {
        return WeakPrediction::new(vec![1.0 / k as f64; k]);
    }
    let size_y = y.len();
    let floor = (1.0 - size_y as f64 * gamma) / k as f64;
    if floor < -EQ_TOL {
        return Err(DomainError::EdgeTooLarge { gamma, size_y, k });
    }
    let floor = floor.max(0.0);
    let mut probs = vec![floor; k];
    for &l in y.members() {
        probs[l] = floor + gamma;
    }
    WeakPrediction::new(probs)
}

/// A single-label prediction as a basis distribution `e_label`.
///
/// `label` is 0-based; `k = 1` is allowed here even though full label sets
/// require `k >= 2`.
pub fn encode_single_label(label: usize, k: usize) -> Result<WeakPrediction, DomainError> {
    if k == 0 {
        return Err(DomainError::LabelCountTooSmall { k, min: 1 });
    }
    if label >= k {
        return Err(DomainError::LabelOutOfRange { label, k });
    }
    let mut probs = vec![0.0; k];
    probs[label] = 1.0;
    WeakPrediction::new(probs)
}

/// A multi-label prediction as the uniform average of basis vectors.
pub fn encode_label_subset(subset: &LabelSet) -> Result<WeakPrediction, DomainError> {
    if subset.is_empty() {
        return Err(DomainError::EmptySubset);
    }
    let share = 1.0 / subset.len() as f64;
    let mut probs = vec![0.0; subset.k()];
    for &l in subset.members() {
        probs[l] = share;
    }
    WeakPrediction::new(probs)
}

/// Membership test for the feasible cost set.
///
/// Entries must lie in `[0, 1]`, every relevant cost must be at most every
/// irrelevant cost, the minimum must be 0 and the maximum 1, all within
/// [`EQ_TOL`]. For degenerate `Y` the ordering constraint is vacuous.
pub fn is_eor_cost(cost: &CostVector, y: &LabelSet) -> bool {
    let c = cost.as_slice();
    if c.is_empty() {
        return false;
    }
    if c.iter().any(|&v| v < -EQ_TOL || v > 1.0 + EQ_TOL) {
        return false;
    }
    if cost.min() > EQ_TOL || (cost.max() - 1.0).abs() > EQ_TOL {
        return false;
    }
    if !y.is_degenerate() {
        let max_relevant = y.members().iter().map(|&l| c[l]).fold(f64::NEG_INFINITY, f64::max);
        let min_irrelevant = y.complement().iter().map(|&r| c[r]).fold(f64::INFINITY, f64::min);
        if max_relevant > min_irrelevant + EQ_TOL {
            return false;
        }
    }
    true
}

/// Affine rescaling of a cost vector onto `[0, 1]` with min 0 and max 1.
///
/// Returns the normalized vector and the weight `max - min`. A degenerate
/// (constant) vector normalizes to all zeros with weight 0.
pub fn normalize_cost(cost: &CostVector) -> (CostVector, f64) {
    let weight = cost.range();
    if weight <= 0.0 {
        return (CostVector::zeros(cost.k()), 0.0);
    }
    let min = cost.min();
    let normalized: Vec<f64> = cost.as_slice().iter().map(|&v| (v - min) / weight).collect();
    (CostVector::new(normalized).expect("finite inputs stay finite"), weight)
}
