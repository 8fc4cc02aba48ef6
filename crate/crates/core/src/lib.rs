//! Online boosting for multi-label ranking.
//!
//! A booster aggregates the votes of `N` online weak learners into a score
//! vector over `k` labels, so that relevant labels are ranked above
//! irrelevant ones. Two boosters are provided:
//!
//! - [`boosters::OnlineBmr`] — potential-based boost-by-majority. Assumes
//!   every learner beats the edge-over-random baseline by a known margin
//!   `gamma` and computes cost vectors from exact random-walk potentials.
//! - [`boosters::AdaOlmr`] — adaptive. Learns a weight per learner by
//!   projected online gradient descent on the logistic surrogate and picks
//!   which expert prefix to follow with a Hedge rule. No edge knowledge
//!   needed; learners with arbitrary (even negative) edges contribute.
//!
//! Weak learners only have to emit a probability distribution over the `k`
//! labels each round ([`types::WeakPrediction`]), so single-label,
//! multi-label, and soft predictions all plug in. Feedback flows back
//! through per-label cost vectors and importance weights.
//!
//! The crate also ships the supporting machinery: the loss zoo
//! ([`losses`]), exact potential computation with sampling and enumeration
//! oracles ([`potentials`]), built-in trainable and synthetic learners plus
//! a weak-learning-condition certifier ([`weak_learners`]), and dataset
//! ingestion ([`dataio`]).

pub mod boosters;
pub mod dataio;
pub mod eor;
pub mod losses;
pub mod potentials;
pub mod rng;
pub mod types;
pub mod weak_learners;

pub use eor::{encode_label_subset, encode_single_label, is_eor_cost, make_baseline, normalize_cost};
pub use losses::{adaptive_weight, hinge_loss, logistic_gradient, logistic_loss, rank_loss, LossKind};
pub use types::{BaselineParams, CostVector, Example, LabelSet, ScoreVector, SparseFeatures, WeakPrediction, EQ_TOL};
