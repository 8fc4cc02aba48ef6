//! Core domain values shared by every module.
//!
//! Labels are 1-based in files and on the command line, 0-based everywhere
//! inside the crate; [`LabelSet::from_one_based`] is the boundary.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Absolute tolerance for simplex sums, score ties, and equality checks.
pub const EQ_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("label count k must be at least {min}, got {k}")]
    LabelCountTooSmall { k: usize, min: usize },
    #[error("label index {label} out of range for k = {k}")]
    LabelOutOfRange { label: usize, k: usize },
    #[error("label subset must be nonempty")]
    EmptySubset,
    #[error("distribution entry {index} is negative: {value}")]
    NegativeMass { index: usize, value: f64 },
    #[error("distribution sums to {sum}, expected 1 within {tol}")]
    NotNormalized { sum: f64, tol: f64 },
    #[error("non-finite entry {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("edge gamma = {gamma} outside [0, 1)")]
    InvalidEdge { gamma: f64 },
    #[error("edge gamma = {gamma} leaves negative off-label mass for |Y| = {size_y}, k = {k}")]
    EdgeTooLarge { gamma: f64, size_y: usize, k: usize },
    #[error("feature value for index {index} is not finite: {value}")]
    BadFeature { index: u32, value: f64 },
}

/// The set of relevant labels for one example: a subset of `{0..k-1}`.
///
/// May be empty or the full label set; both are degenerate (no
/// relevant/irrelevant pair exists) and downstream losses treat such
/// rounds as no-ops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    k: usize,
    members: Vec<usize>,
    complement: Vec<usize>,
}

impl LabelSet {
    /// Build from 0-based label indices. Duplicates collapse; order is free.
    pub fn from_zero_based(k: usize, labels: impl IntoIterator<Item = usize>) -> Result<Self, DomainError> {
        if k < 2 {
            return Err(DomainError::LabelCountTooSmall { k, min: 2 });
        }
        let mut mask = vec![false; k];
        for l in labels {
            if l >= k {
                return Err(DomainError::LabelOutOfRange { label: l, k });
            }
            mask[l] = true;
        }
        let members: Vec<usize> = (0..k).filter(|&l| mask[l]).collect();
        let complement: Vec<usize> = (0..k).filter(|&l| !mask[l]).collect();
        Ok(Self { k, members, complement })
    }

    /// Build from 1-based label indices as they appear in data files.
    pub fn from_one_based(k: usize, labels: impl IntoIterator<Item = usize>) -> Result<Self, DomainError> {
        let mut zero = Vec::new();
        for l in labels {
            if l == 0 || l > k {
                return Err(DomainError::LabelOutOfRange { label: l, k });
            }
            zero.push(l - 1);
        }
        Self::from_zero_based(k, zero)
    }

    pub fn empty(k: usize) -> Result<Self, DomainError> {
        Self::from_zero_based(k, std::iter::empty())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// True when no relevant/irrelevant pair exists (`Y` empty or full).
    pub fn is_degenerate(&self) -> bool {
        self.members.is_empty() || self.complement.is_empty()
    }

    pub fn contains(&self, label: usize) -> bool {
        self.members.binary_search(&label).is_ok()
    }

    /// Relevant labels, 0-based, ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Irrelevant labels, 0-based, ascending.
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    /// Members as 1-based indices, for I/O.
    pub fn members_one_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|&l| l + 1)
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.members_one_based().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// A weak learner's output: a probability distribution over the `k` labels.
///
/// Single-label predictions are basis vectors, multi-label predictions the
/// uniform average of basis vectors; anything on the simplex is accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakPrediction {
    probs: Vec<f64>,
}

impl WeakPrediction {
    pub fn new(probs: Vec<f64>) -> Result<Self, DomainError> {
        let mut sum = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() {
                return Err(DomainError::NonFinite { index: i, value: p });
            }
            if p < 0.0 {
                return Err(DomainError::NegativeMass { index: i, value: p });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > EQ_TOL {
            return Err(DomainError::NotNormalized { sum, tol: EQ_TOL });
        }
        Ok(Self { probs })
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, label: usize) -> f64 {
        self.probs[label]
    }
}

/// Cumulative weighted votes over the labels; higher score ranks higher.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    scores: Vec<f64>,
}

impl ScoreVector {
    pub fn new(scores: Vec<f64>) -> Result<Self, DomainError> {
        for (i, &s) in scores.iter().enumerate() {
            if !s.is_finite() {
                return Err(DomainError::NonFinite { index: i, value: s });
            }
        }
        Ok(Self { scores })
    }

    pub fn zeros(k: usize) -> Self {
        Self { scores: vec![0.0; k] }
    }

    pub fn k(&self) -> usize {
        self.scores.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.scores
    }

    pub fn get(&self, label: usize) -> f64 {
        self.scores[label]
    }

    /// `self + alpha * prediction`, the expert-state recurrence.
    pub fn add_scaled(&self, prediction: &WeakPrediction, alpha: f64) -> ScoreVector {
        let scores = self
            .scores
            .iter()
            .zip(prediction.probs())
            .map(|(s, p)| s + alpha * p)
            .collect();
        ScoreVector { scores }
    }

    /// `self + e_label`, the one-vote shift used by potential cost vectors.
    pub fn add_basis(&self, label: usize) -> ScoreVector {
        let mut scores = self.scores.clone();
        scores[label] += 1.0;
        ScoreVector { scores }
    }
}

/// Per-label costs the booster charges a weak learner for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector {
    costs: Vec<f64>,
}

impl CostVector {
    pub fn new(costs: Vec<f64>) -> Result<Self, DomainError> {
        for (i, &c) in costs.iter().enumerate() {
            if !c.is_finite() {
                return Err(DomainError::NonFinite { index: i, value: c });
            }
        }
        Ok(Self { costs })
    }

    pub fn zeros(k: usize) -> Self {
        Self { costs: vec![0.0; k] }
    }

    pub fn k(&self) -> usize {
        self.costs.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.costs
    }

    pub fn get(&self, label: usize) -> f64 {
        self.costs[label]
    }

    pub fn min(&self) -> f64 {
        self.costs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.costs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max - min`, the normalization weight.
    pub fn range(&self) -> f64 {
        if self.costs.is_empty() {
            0.0
        } else {
            self.max() - self.min()
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.costs.iter().map(|c| c.abs()).sum()
    }

    /// Expected cost of a weak prediction, `c . p`.
    pub fn dot(&self, prediction: &WeakPrediction) -> f64 {
        self.costs.iter().zip(prediction.probs()).map(|(c, p)| c * p).sum()
    }
}

/// Sparse feature map: index -> value, absent means 0.0.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseFeatures {
    entries: BTreeMap<u32, f64>,
}

impl SparseFeatures {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, f64)>) -> Result<Self, DomainError> {
        let mut entries = BTreeMap::new();
        for (i, v) in pairs {
            if !v.is_finite() {
                return Err(DomainError::BadFeature { index: i, value: v });
            }
            if v != 0.0 {
                entries.insert(i, v);
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, index: u32) -> f64 {
        self.entries.get(&index).copied().unwrap_or(0.0)
    }

    /// Nonzero entries in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries.iter().map(|(&i, &v)| (i, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One labeled example from a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub features: SparseFeatures,
    pub labels: LabelSet,
}

/// Parameters of the edge-over-random baseline `u^Y_gamma`.
///
/// The baseline puts `gamma` extra probability on each relevant label on
/// top of a common floor `a = (1 - |Y| * gamma) / k`, so `gamma` must not
/// exceed `1 / |Y|` for the label sets it is used with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineParams {
    gamma: f64,
    k: usize,
}

impl BaselineParams {
    /// `gamma` must lie in `[0, 1)`; zero edge is the uniform learner and
    /// is explicitly allowed.
    pub fn new(k: usize, gamma: f64) -> Result<Self, DomainError> {
        if k < 2 {
            return Err(DomainError::LabelCountTooSmall { k, min: 2 });
        }
        if !gamma.is_finite() || gamma < 0.0 || gamma >= 1.0 {
            return Err(DomainError::InvalidEdge { gamma });
        }
        Ok(Self { gamma, k })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k(&self) -> usize {
        self.k
    }
}
