//! Multi-label ranking losses and the logistic gradient cost.
//!
//! All three losses decompose over relevant/irrelevant label pairs and are
//! scaled by `w_Y = 1 / (|Y| * |Y^c|)` so the rank loss lies in `[0, 1]`.
//! Degenerate label sets (empty or full) have no pairs: every loss is 0,
//! the gradient is the zero vector, and such rounds carry no information.

use std::fmt;
use std::str::FromStr;

use crate::types::{CostVector, LabelSet, ScoreVector, EQ_TOL};

/// Which loss a potential or a report is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossKind {
    Rank,
    Hinge,
    Logistic,
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossKind::Rank => write!(f, "rank"),
            LossKind::Hinge => write!(f, "hinge"),
            LossKind::Logistic => write!(f, "logistic"),
        }
    }
}

impl FromStr for LossKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rank" => Ok(LossKind::Rank),
            "hinge" => Ok(LossKind::Hinge),
            "logistic" => Ok(LossKind::Logistic),
            other => Err(format!("unknown loss '{other}', expected rank|hinge|logistic")),
        }
    }
}

/// Pair normalization `w_Y`; 0 for degenerate label sets.
pub fn pair_weight(y: &LabelSet) -> f64 {
    if y.is_degenerate() {
        0.0
    } else {
        1.0 / (y.len() as f64 * y.complement().len() as f64)
    }
}

/// Per-pair rank kernel at margin `z = s[r] - s[l]`: 1 for a misordered
/// pair, 1/2 for a tie within [`EQ_TOL`].
pub(crate) fn rank_pair_kernel(z: f64) -> f64 {
    if z.abs() <= EQ_TOL {
        0.5
    } else if z > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Per-pair hinge kernel at margin `z = s[r] - s[l]`.
pub(crate) fn hinge_pair_kernel(z: f64) -> f64 {
    (1.0 + z).max(0.0)
}

/// Numerically stable `log(1 + e^z)`.
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 30.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Numerically stable logistic sigmoid.
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn pair_sum(y: &LabelSet, s: &ScoreVector, kernel: impl Fn(f64) -> f64) -> f64 {
    let w = pair_weight(y);
    if w == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    for &l in y.members() {
        for &r in y.complement() {
            total += kernel(s.get(r) - s.get(l));
        }
    }
    w * total
}

/// Fraction of misordered relevant/irrelevant pairs, ties counted half.
///
/// Always in `[0, 1]`; 0 for degenerate `Y`.
pub fn rank_loss(y: &LabelSet, s: &ScoreVector) -> f64 {
    pair_sum(y, s, rank_pair_kernel)
}

/// Pairwise hinge surrogate; convex and an upper bound on the rank loss.
pub fn hinge_loss(y: &LabelSet, s: &ScoreVector) -> f64 {
    pair_sum(y, s, hinge_pair_kernel)
}

/// Pairwise logistic surrogate; convex with uniformly bounded gradient.
pub fn logistic_loss(y: &LabelSet, s: &ScoreVector) -> f64 {
    pair_sum(y, s, softplus)
}

/// Gradient of [`logistic_loss`] in the score vector.
///
/// Relevant entries are nonpositive, irrelevant entries nonnegative, and
/// the entries sum to zero. Zero vector for degenerate `Y`.
pub fn logistic_gradient(y: &LabelSet, s: &ScoreVector) -> CostVector {
    let k = s.k();
    let w = pair_weight(y);
    if w == 0.0 {
        return CostVector::zeros(k);
    }
    let mut grad = vec![0.0; k];
    for &l in y.members() {
        for &r in y.complement() {
            let sig = sigmoid(s.get(r) - s.get(l));
            grad[r] += w * sig;
            grad[l] -= w * sig;
        }
    }
    CostVector::new(grad).expect("sigmoid sums are finite")
}

/// Adaptive round weight `||c||_1 / 2` of a logistic-gradient cost.
///
/// Equals both the negated relevant mass and the irrelevant mass of the
/// gradient, and is at least half the rank loss at the same state.
pub fn adaptive_weight(cost: &CostVector) -> f64 {
    cost.l1_norm() / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(k: usize, members: &[usize]) -> LabelSet {
        LabelSet::from_zero_based(k, members.iter().copied()).unwrap()
    }

    fn scores(v: &[f64]) -> ScoreVector {
        ScoreVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rank_loss_examples() {
        assert_eq!(rank_loss(&labels(3, &[0]), &scores(&[2.0, 1.0, 0.0])), 0.0);
        assert_eq!(rank_loss(&labels(2, &[0]), &scores(&[0.0, 0.0])), 0.5);
        assert_eq!(rank_loss(&labels(3, &[0, 1]), &scores(&[0.0, 1.0, 2.0])), 1.0);
    }

    #[test]
    fn rank_loss_degenerate_is_zero() {
        assert_eq!(rank_loss(&LabelSet::empty(3).unwrap(), &scores(&[1.0, 2.0, 3.0])), 0.0);
        assert_eq!(rank_loss(&labels(2, &[0, 1]), &scores(&[5.0, -5.0])), 0.0);
    }

    #[test]
    fn rank_loss_tie_tolerance() {
        let y = labels(2, &[0]);
        assert_eq!(rank_loss(&y, &scores(&[0.0, 5e-10])), 0.5);
        assert_eq!(rank_loss(&y, &scores(&[0.0, 2e-9])), 1.0);
    }

    #[test]
    fn hinge_loss_examples() {
        assert_eq!(hinge_loss(&labels(2, &[0]), &scores(&[0.0, 0.0])), 1.0);
        assert_eq!(hinge_loss(&labels(2, &[0]), &scores(&[2.0, 0.0])), 0.0);
        assert_eq!(hinge_loss(&labels(3, &[0, 1]), &scores(&[1.0, 0.0, 1.0])), 1.5);
    }

    #[test]
    fn logistic_loss_examples() {
        let log2 = std::f64::consts::LN_2;
        assert!((logistic_loss(&labels(2, &[0]), &scores(&[0.0, 0.0])) - log2).abs() < 1e-12);
        assert!(logistic_loss(&labels(2, &[0]), &scores(&[100.0, 0.0])) < 1e-40);
        assert!((logistic_loss(&labels(3, &[0, 1]), &scores(&[0.0, 0.0, 0.0])) - log2).abs() < 1e-12);
    }

    #[test]
    fn logistic_loss_is_stable_at_huge_margins() {
        let y = labels(2, &[0]);
        let v = logistic_loss(&y, &scores(&[-500.0, 500.0]));
        assert!(v.is_finite());
        assert!((v - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn logistic_gradient_example() {
        let g = logistic_gradient(&labels(3, &[0]), &scores(&[0.0, 0.0, 0.0]));
        let expected = [-0.5, 0.25, 0.25];
        for (a, e) in g.as_slice().iter().zip(&expected) {
            assert!((a - e).abs() < 1e-12);
        }
        let saturated = logistic_gradient(&labels(2, &[0]), &scores(&[100.0, 0.0]));
        assert!(saturated.l1_norm() < 1e-40);
    }

    #[test]
    fn adaptive_weight_examples() {
        let c = CostVector::new(vec![-0.5, 0.25, 0.25]).unwrap();
        assert!((adaptive_weight(&c) - 0.5).abs() < 1e-12);
        assert_eq!(adaptive_weight(&CostVector::zeros(3)), 0.0);
    }

    #[test]
    fn gradient_matches_central_differences() {
        // deterministic pseudo-random states, oracle = central differences
        let mut x = 0.37f64;
        let mut next = move || {
            x = (x * 997.0 + 0.123).fract();
            4.0 * x - 2.0
        };
        let h = 1e-5;
        for case in 0..200 {
            let k = 2 + case % 3;
            let members: Vec<usize> = (0..k).filter(|i| (case >> i) & 1 == 1).collect();
            let y = LabelSet::from_zero_based(k, members).unwrap();
            let s: Vec<f64> = (0..k).map(|_| next()).collect();
            let s = scores(&s);
            let g = logistic_gradient(&y, &s);
            for coord in 0..k {
                let mut up = s.as_slice().to_vec();
                let mut down = up.clone();
                up[coord] += h;
                down[coord] -= h;
                let fd = (logistic_loss(&y, &scores(&up)) - logistic_loss(&y, &scores(&down))) / (2.0 * h);
                assert!(
                    (fd - g.get(coord)).abs() < 1e-6,
                    "coord {coord}: fd {fd} vs grad {}",
                    g.get(coord)
                );
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_case(max_k: usize) -> impl Strategy<Value = (LabelSet, ScoreVector)> {
            (2..=max_k)
                .prop_flat_map(|k| {
                    (
                        proptest::collection::vec(proptest::bool::ANY, k),
                        proptest::collection::vec(-5.0f64..5.0, k),
                    )
                })
                .prop_map(|(mask, s)| {
                    let k = mask.len();
                    let members = mask.iter().enumerate().filter_map(|(i, &m)| m.then_some(i));
                    (
                        LabelSet::from_zero_based(k, members).unwrap(),
                        ScoreVector::new(s).unwrap(),
                    )
                })
        }

        proptest! {
            #[test]
            fn hinge_dominates_rank((y, s) in arb_case(6)) {
                prop_assert!(hinge_loss(&y, &s) >= rank_loss(&y, &s) - 1e-12);
            }

            #[test]
            fn rank_loss_in_unit_interval((y, s) in arb_case(6)) {
                let v = rank_loss(&y, &s);
                prop_assert!((0.0..=1.0).contains(&v));
            }

            #[test]
            fn rank_loss_shift_and_monotone_invariant((y, s) in arb_case(6), shift in -3.0f64..3.0) {
                let base = rank_loss(&y, &s);
                let shifted: Vec<f64> = s.as_slice().iter().map(|v| v + shift).collect();
                prop_assert_eq!(base, rank_loss(&y, &ScoreVector::new(shifted).unwrap()));
                // strictly increasing transform preserves order and ties
                let mapped: Vec<f64> = s.as_slice().iter().map(|v| 2.0 * v + v.powi(3)).collect();
                let mapped = rank_loss(&y, &ScoreVector::new(mapped).unwrap());
                prop_assert!((base - mapped).abs() < 1e-12);
            }

            #[test]
            fn logistic_loss_is_convex((y, s1) in arb_case(5), lambda in 0.0f64..1.0) {
                let k = s1.k();
                let s2: Vec<f64> = s1.as_slice().iter().map(|v| -v + 0.7).collect();
                let s2 = ScoreVector::new(s2).unwrap();
                let mix: Vec<f64> = (0..k)
                    .map(|i| lambda * s1.get(i) + (1.0 - lambda) * s2.get(i))
                    .collect();
                let mix = ScoreVector::new(mix).unwrap();
                let lhs = logistic_loss(&y, &mix);
                let rhs = lambda * logistic_loss(&y, &s1) + (1.0 - lambda) * logistic_loss(&y, &s2);
                prop_assert!(lhs <= rhs + 1e-9);
            }

            #[test]
            fn gradient_sums_to_zero_with_sign_pattern((y, s) in arb_case(6)) {
                let g = logistic_gradient(&y, &s);
                let sum: f64 = g.as_slice().iter().sum();
                prop_assert!(sum.abs() < 1e-12);
                for &l in y.members() {
                    prop_assert!(g.get(l) <= 0.0);
                }
                for &r in y.complement() {
                    prop_assert!(g.get(r) >= 0.0);
                }
            }

            #[test]
            fn adaptive_weight_identity_and_rank_bound((y, s) in arb_case(6)) {
                let g = logistic_gradient(&y, &s);
                let w = adaptive_weight(&g);
                let neg_relevant: f64 = -y.members().iter().map(|&l| g.get(l)).sum::<f64>();
                let irrelevant: f64 = y.complement().iter().map(|&r| g.get(r)).sum::<f64>();
                prop_assert!((w - neg_relevant).abs() < 1e-9);
                prop_assert!((w - irrelevant).abs() < 1e-9);
                prop_assert!(w >= 0.5 * rank_loss(&y, &s) - 1e-12);
            }
        }
    }
}
