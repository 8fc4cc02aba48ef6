//! Exact potential functions for rank and hinge losses.
//!
//! The potential `phi^i(s)` is the expected final loss when `i` more
//! baseline votes are added to the current score state `s`. Both supported
//! losses decompose over relevant/irrelevant pairs, and for a pair `(l, r)`
//! only the difference `D = X_r - X_l` of vote counts matters. `D` is a
//! lazy random walk: each of the `i` draws moves it +1 with the probability
//! of the irrelevant label, -1 with the probability of the relevant label,
//! else 0. Its exact law depends on `Y` only through `|Y|`, so one dynamic
//! program per `(horizon, |Y|)` serves every pair and every state, turning
//! an expectation over `k^i` draw sequences into `O(i^2)` table work plus
//! `O(1)` per pair via cached tail sums.
//!
//! [`mc_potential`] and [`enumerate_potential`] are independent sampling
//! and exhaustive reference implementations used by the test suites.

use std::collections::HashMap;

use rand::Rng;
use thiserror::Error;

use crate::eor::make_baseline;
use crate::losses::{hinge_loss, pair_weight, rank_loss, LossKind};
use crate::rng::seeded_rng;
use crate::types::{BaselineParams, CostVector, DomainError, LabelSet, ScoreVector, EQ_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("potentials are defined for rank and hinge losses only, got {0}")]
    UnsupportedLoss(LossKind),
    #[error("pair step probabilities need 0 < |Y| < k, got |Y| = {size_y}, k = {k}")]
    DegenerateSize { size_y: usize, k: usize },
    #[error("state enumeration over {k}^{horizon} sequences is too large")]
    EnumerationTooLarge { k: usize, horizon: usize },
    #[error("need at least one sample")]
    NoSamples,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// One-step move law of the pairwise difference walk `D = X_r - X_l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStepProbs {
    /// Probability the irrelevant label is drawn (increments `D`).
    pub p_plus: f64,
    /// Probability the relevant label is drawn (decrements `D`).
    pub p_minus: f64,
    /// Probability any other label is drawn.
    pub p_zero: f64,
}

/// Step law for a baseline pair: the relevant label carries `gamma` more
/// mass than the irrelevant one.
pub fn pair_step_probs(size_y: usize, gamma: f64, k: usize) -> Result<PairStepProbs, PotentialError> {
    if size_y == 0 || size_y >= k {
        return Err(PotentialError::DegenerateSize { size_y, k });
    }
    if !gamma.is_finite() || gamma < 0.0 || gamma >= 1.0 {
        return Err(DomainError::InvalidEdge { gamma }.into());
    }
    let floor = (1.0 - size_y as f64 * gamma) / k as f64;
    if floor < -EQ_TOL {
        return Err(DomainError::EdgeTooLarge { gamma, size_y, k }.into());
    }
    let p_plus = floor.max(0.0);
    let p_minus = p_plus + gamma;
    let p_zero = (1.0 - p_plus - p_minus).max(0.0);
    Ok(PairStepProbs { p_plus, p_minus, p_zero })
}

/// Exact law of the difference walk after `horizon` i.i.d. steps.
///
/// Support is `{-horizon ..= horizon}`. Tail sums are cached so the
/// expected rank or hinge kernel at any real offset costs `O(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffDistribution {
    horizon: usize,
    /// `pmf[j]` is `P(D = j - horizon)`.
    pmf: Vec<f64>,
    /// `tail_prob[j] = P(D >= j - horizon)`; one extra trailing 0.
    tail_prob: Vec<f64>,
    /// `tail_moment[j] = sum_{d >= j - horizon} d * P(D = d)`.
    tail_moment: Vec<f64>,
}

impl DiffDistribution {
    /// Horizon 0: point mass at 0.
    pub fn point_mass() -> Self {
        Self::from_pmf(0, vec![1.0])
    }

    fn from_pmf(horizon: usize, pmf: Vec<f64>) -> Self {
        debug_assert_eq!(pmf.len(), 2 * horizon + 1);
        let mut tail_prob = vec![0.0; pmf.len() + 1];
        let mut tail_moment = vec![0.0; pmf.len() + 1];
        for j in (0..pmf.len()).rev() {
            let d = j as f64 - horizon as f64;
            tail_prob[j] = tail_prob[j + 1] + pmf[j];
            tail_moment[j] = tail_moment[j + 1] + d * pmf[j];
        }
        Self { horizon, pmf, tail_prob, tail_moment }
    }

    /// One more step of the walk.
    pub fn step(&self, p: &PairStepProbs) -> Self {
        let h = self.horizon;
        let old = &self.pmf;
        let get = |j: isize| -> f64 {
            if j < 0 || j as usize >= old.len() {
                0.0
            } else {
                old[j as usize]
            }
        };
        let mut pmf = vec![0.0; 2 * (h + 1) + 1];
        for (j, slot) in pmf.iter_mut().enumerate() {
            let j = j as isize;
            *slot = p.p_plus * get(j - 2) + p.p_zero * get(j - 1) + p.p_minus * get(j);
        }
        Self::from_pmf(h + 1, pmf)
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn pmf(&self, d: i64) -> f64 {
        let h = self.horizon as i64;
        if d < -h || d > h {
            0.0
        } else {
            self.pmf[(d + h) as usize]
        }
    }

    /// `P(D >= d)`.
    pub fn prob_ge(&self, d: i64) -> f64 {
        let h = self.horizon as i64;
        if d > h {
            0.0
        } else if d <= -h {
            self.tail_prob[0]
        } else {
            self.tail_prob[(d + h) as usize]
        }
    }

    /// `E[D ; D >= d]`.
    fn moment_ge(&self, d: i64) -> f64 {
        let h = self.horizon as i64;
        if d > h {
            0.0
        } else if d <= -h {
            self.tail_moment[0]
        } else {
            self.tail_moment[(d + h) as usize]
        }
    }

    /// `E[ rank_kernel(z + D) ]`: mass strictly above the tie window plus
    /// half the mass on a tie, with the same [`EQ_TOL`] tie semantics as
    /// the plain rank loss.
    pub fn expected_rank_kernel(&self, z: f64) -> f64 {
        let tau = -z;
        let d_win = (tau + EQ_TOL).floor() as i64 + 1;
        let mut value = self.prob_ge(d_win);
        let d_tie = tau.round();
        if (d_tie - tau).abs() <= EQ_TOL {
            value += 0.5 * self.pmf(d_tie as i64);
        }
        value
    }

    /// `E[ (1 + z + D)_+ ]` via the cached tail sums.
    pub fn expected_hinge_kernel(&self, z: f64) -> f64 {
        let d_low = (-1.0 - z).floor() as i64 + 1;
        (1.0 + z) * self.prob_ge(d_low) + self.moment_ge(d_low)
    }

    pub fn expected_kernel(&self, loss: LossKind, z: f64) -> f64 {
        match loss {
            LossKind::Rank => self.expected_rank_kernel(z),
            LossKind::Hinge => self.expected_hinge_kernel(z),
            LossKind::Logistic => unreachable!("rejected at table construction"),
        }
    }
}

/// The law of the difference walk after `horizon` steps, built by dynamic
/// programming in `O(horizon^2)`.
pub fn diff_distribution(horizon: usize, p: &PairStepProbs) -> DiffDistribution {
    let mut dist = DiffDistribution::point_mass();
    for _ in 0..horizon {
        dist = dist.step(p);
    }
    dist
}

/// Cached potential evaluator at a fixed `(k, gamma, loss)`.
///
/// Difference-walk tables are built once per `(|Y|, horizon)` and reused
/// across rounds, labels, and states.
#[derive(Debug)]
pub struct PotentialTable {
    k: usize,
    gamma: f64,
    loss: LossKind,
    ladders: HashMap<usize, Vec<DiffDistribution>>,
}

impl PotentialTable {
    pub fn new(k: usize, gamma: f64, loss: LossKind) -> Result<Self, PotentialError> {
        if loss == LossKind::Logistic {
            return Err(PotentialError::UnsupportedLoss(loss));
        }
        if k < 2 {
            return Err(DomainError::LabelCountTooSmall { k, min: 2 }.into());
        }
        if !gamma.is_finite() || gamma < 0.0 || gamma >= 1.0 {
            return Err(DomainError::InvalidEdge { gamma }.into());
        }
        Ok(Self { k, gamma, loss, ladders: HashMap::new() })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn loss(&self) -> LossKind {
        self.loss
    }

    fn ladder(&mut self, size_y: usize, horizon: usize) -> Result<&DiffDistribution, PotentialError> {
        let probs = pair_step_probs(size_y, self.gamma, self.k)?;
        let ladder = self.ladders.entry(size_y).or_insert_with(|| vec![DiffDistribution::point_mass()]);
        while ladder.len() <= horizon {
            let next = ladder.last().expect("ladder never empty").step(&probs);
            ladder.push(next);
        }
        Ok(&ladder[horizon])
    }

    /// `phi^horizon(s)`: expected loss after `horizon` baseline votes land
    /// on state `s`. Returns the plain loss at horizon 0 and 0 for
    /// degenerate `Y`.
    pub fn potential(&mut self, y: &LabelSet, s: &ScoreVector, horizon: usize) -> Result<f64, PotentialError> {
        let w = pair_weight(y);
        if w == 0.0 {
            return Ok(0.0);
        }
        let loss = self.loss;
        let dist = self.ladder(y.len(), horizon)?;
        let mut total = 0.0;
        for &l in y.members() {
            for &r in y.complement() {
                total += dist.expected_kernel(loss, s.get(r) - s.get(l));
            }
        }
        Ok(w * total)
    }

    /// The potential-based cost vector: entry `l` is the potential of the
    /// state after one more vote for label `l`, with `remaining` votes
    /// still to come. Relevant entries never exceed irrelevant ones.
    pub fn cost_vector(
        &mut self,
        y: &LabelSet,
        s_prev: &ScoreVector,
        remaining: usize,
    ) -> Result<CostVector, PotentialError> {
        let k = s_prev.k();
        if y.is_degenerate() {
            return Ok(CostVector::zeros(k));
        }
        let mut costs = Vec::with_capacity(k);
        for label in 0..k {
            costs.push(self.potential(y, &s_prev.add_basis(label), remaining)?);
        }
        Ok(CostVector::new(costs)?)
    }
}

/// One-shot potential evaluation; builds a throwaway table.
pub fn potential(
    y: &LabelSet,
    s: &ScoreVector,
    horizon: usize,
    gamma: f64,
    loss: LossKind,
) -> Result<f64, PotentialError> {
    PotentialTable::new(s.k(), gamma, loss)?.potential(y, s, horizon)
}

fn loss_value(loss: LossKind, y: &LabelSet, s: &ScoreVector) -> f64 {
    match loss {
        LossKind::Rank => rank_loss(y, s),
        LossKind::Hinge => hinge_loss(y, s),
        LossKind::Logistic => unreachable!("rejected before evaluation"),
    }
}

/// Monte-Carlo estimate of the potential: sample `horizon` baseline votes,
/// average the loss. Deterministic for a fixed seed. Returns the estimate
/// and its standard error.
pub fn mc_potential(
    y: &LabelSet,
    s: &ScoreVector,
    horizon: usize,
    gamma: f64,
    loss: LossKind,
    n_samples: u64,
    seed: u64,
) -> Result<(f64, f64), PotentialError> {
    if loss == LossKind::Logistic {
        return Err(PotentialError::UnsupportedLoss(loss));
    }
    if n_samples == 0 {
        return Err(PotentialError::NoSamples);
    }
    let k = s.k();
    let u = make_baseline(y, &BaselineParams::new(k, gamma)?)?;
    let mut cumulative = Vec::with_capacity(k);
    let mut acc = 0.0;
    for &p in u.probs() {
        acc += p;
        cumulative.push(acc);
    }
    let mut rng = seeded_rng(seed, 0x6d63_706f);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut state = vec![0.0; k];
    for _ in 0..n_samples {
        state.copy_from_slice(s.as_slice());
        for _ in 0..horizon {
            let r: f64 = rng.gen();
            let label = cumulative.partition_point(|&c| c < r).min(k - 1);
            state[label] += 1.0;
        }
        let value = loss_value(loss, y, &ScoreVector::new(state.clone()).expect("finite state"));
        sum += value;
        sum_sq += value * value;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let std_error = if n_samples > 1 {
        let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok((mean, std_error))
}

/// Exhaustive reference: enumerate all `k^horizon` draw sequences and sum
/// probability-weighted losses. Independent of the difference-walk path;
/// only usable for small instances.
pub fn enumerate_potential(
    y: &LabelSet,
    s: &ScoreVector,
    horizon: usize,
    gamma: f64,
    loss: LossKind,
) -> Result<f64, PotentialError> {
    if loss == LossKind::Logistic {
        return Err(PotentialError::UnsupportedLoss(loss));
    }
    let k = s.k();
    if (k as f64).powi(horizon as i32) > (1u64 << 24) as f64 {
        return Err(PotentialError::EnumerationTooLarge { k, horizon });
    }
    let u = make_baseline(y, &BaselineParams::new(k, gamma)?)?;
    let mut state = s.as_slice().to_vec();
    let mut total = 0.0;
    fn recurse(
        depth: usize,
        prob: f64,
        state: &mut Vec<f64>,
        u: &[f64],
        y: &LabelSet,
        loss: LossKind,
        total: &mut f64,
    ) {
        if depth == 0 {
            let s = ScoreVector::new(state.clone()).expect("finite state");
            *total += prob * loss_value(loss, y, &s);
            return;
        }
        for (label, &p) in u.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            state[label] += 1.0;
            recurse(depth - 1, prob * p, state, u, y, loss, total);
            state[label] -= 1.0;
        }
    }
    recurse(horizon, 1.0, &mut state, u.probs(), y, loss, &mut total);
    Ok(total)
}
