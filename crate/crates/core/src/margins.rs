//! Per-example margin random variables of a majority vote.
//!
//! Every function here maps a list of vote profiles plus the dataset they were
//! computed on to one real value per example.

use crate::ensemble::{Dataset, Label, LabelKind, VoteProfile};
use crate::error::{Error, Result};

/// Largest number of labels for which the multi-label margin is computed by
/// enumerating all competing label vectors.
pub const MAX_ENUMERATED_LABELS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarginKind {
    Binary,
    Multiclass,
    /// Strength against a fixed zero-based class.
    Strength(usize),
    /// Vote mass on the true class minus `1/omega`.
    Omega(f64),
    Multilabel,
    TwoMargin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarginVector {
    pub kind: MarginKind,
    pub values: Vec<f64>,
}

impl MarginVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_inputs(profiles: &[VoteProfile], dataset: &Dataset, kind: LabelKind) -> Result<()> {
    dataset.check_len(profiles.len())?;
    if dataset.label_space().kind() != kind {
        return Err(Error::config(format!(
            "margin requires a {} dataset, got {}",
            kind.as_str(),
            dataset.label_space().kind().as_str()
        )));
    }
    if let Some(p) = profiles.iter().find(|p| p.kind() != kind) {
        return Err(Error::config(format!(
            "expected {} vote profiles, got {}",
            kind.as_str(),
            p.kind().as_str()
        )));
    }
    Ok(())
}

/// Walks (profile, target) pairs of a multiclass dataset.
fn multiclass_pairs<'a>(
    profiles: &'a [VoteProfile],
    dataset: &'a Dataset,
) -> impl Iterator<Item = (&'a [f64], usize)> + 'a {
    profiles
        .iter()
        .zip(dataset.examples())
        .map(|(p, e)| match (p, &e.target) {
            (VoteProfile::Multiclass(g), Label::Class(y)) => (g.as_slice(), *y),
            _ => unreachable!("checked by check_inputs"),
        })
}

fn multilabel_pairs<'a>(
    profiles: &'a [VoteProfile],
    dataset: &'a Dataset,
) -> impl Iterator<Item = (&'a [f64], &'a [bool])> + 'a {
    profiles
        .iter()
        .zip(dataset.examples())
        .map(|(p, e)| match (p, &e.target) {
            (VoteProfile::Multilabel(c), Label::Bits(y)) => (c.as_slice(), y.as_slice()),
            _ => unreachable!("checked by check_inputs"),
        })
}

/// `y * E h(x)`.
pub fn binary_margin(profiles: &[VoteProfile], dataset: &Dataset) -> Result<MarginVector> {
    check_inputs(profiles, dataset, LabelKind::Binary)?;
    let values = profiles
        .iter()
        .zip(dataset.examples())
        .map(|(p, e)| match (p, &e.target) {
            (VoteProfile::Binary(s), Label::Binary(y)) => f64::from(*y) * s,
            _ => unreachable!("checked by check_inputs"),
        })
        .collect();
    Ok(MarginVector {
        kind: MarginKind::Binary,
        values,
    })
}

/// Mass on the true class minus the largest mass on any other class.
pub fn multiclass_margin_value(mass: &[f64], target: usize) -> f64 {
    let best_other = mass
        .iter()
        .enumerate()
        .filter(|(c, _)| *c != target)
        .map(|(_, g)| *g)
        .fold(f64::NEG_INFINITY, f64::max);
    mass[target] - best_other
}

pub fn multiclass_margin(profiles: &[VoteProfile], dataset: &Dataset) -> Result<MarginVector> {
    check_inputs(profiles, dataset, LabelKind::Multiclass)?;
    let values = multiclass_pairs(profiles, dataset)
        .map(|(g, y)| multiclass_margin_value(g, y))
        .collect();
    Ok(MarginVector {
        kind: MarginKind::Multiclass,
        values,
    })
}

/// `g(x, y) - g(x, class)` for a fixed zero-based `class`.
pub fn strength_margin(
    profiles: &[VoteProfile],
    dataset: &Dataset,
    class: usize,
) -> Result<MarginVector> {
    check_inputs(profiles, dataset, LabelKind::Multiclass)?;
    let q = dataset.label_space().q();
    if class >= q {
        return Err(Error::config(format!(
            "strength class {} out of range 1..={q}",
            class + 1
        )));
    }
    let values = multiclass_pairs(profiles, dataset)
        .map(|(g, y)| g[y] - g[class])
        .collect();
    Ok(MarginVector {
        kind: MarginKind::Strength(class),
        values,
    })
}

/// `g(x, y) - 1/omega`, defined for `omega >= 1`.
pub fn omega_margin(
    profiles: &[VoteProfile],
    dataset: &Dataset,
    omega: f64,
) -> Result<MarginVector> {
    check_omega(omega)?;
    check_inputs(profiles, dataset, LabelKind::Multiclass)?;
    let threshold = 1.0 / omega;
    let values = multiclass_pairs(profiles, dataset)
        .map(|(g, y)| g[y] - threshold)
        .collect();
    Ok(MarginVector {
        kind: MarginKind::Omega(omega),
        values,
    })
}

pub(crate) fn check_omega(omega: f64) -> Result<()> {
    if !(omega >= 1.0) || !omega.is_finite() {
        return Err(Error::config(format!(
            "omega must be a finite value >= 1 so that 1/omega is a vote-mass threshold, got {omega}"
        )));
    }
    Ok(())
}

/// Dot product of `confidence - 1/2` with `bits - 1/2`.
fn centered_score(confidence: &[f64], bits: impl Iterator<Item = bool>) -> f64 {
    confidence
        .iter()
        .zip(bits)
        .map(|(c, b)| (c - 0.5) * if b { 0.5 } else { -0.5 })
        .sum()
}

/// Multi-label margin by enumerating all `2^Q - 1` competing label vectors.
pub fn multilabel_margin_enumerated(confidence: &[f64], target: &[bool]) -> f64 {
    let q = confidence.len();
    assert!(q <= 30, "enumeration over 2^{q} label vectors");
    let own = centered_score(confidence, target.iter().copied());
    let target_mask = target
        .iter()
        .enumerate()
        .fold(0u32, |m, (j, b)| if *b { m | (1 << j) } else { m });
    let best_other = (0u32..(1u32 << q))
        .filter(|&mask| mask != target_mask)
        .map(|mask| centered_score(confidence, (0..q).map(|j| mask & (1 << j) != 0)))
        .fold(f64::NEG_INFINITY, f64::max);
    own - best_other
}

/// Multi-label margin in closed form.
///
/// The score of a label vector is a sum of independent per-label terms
/// `±(confidence_j - 1/2)/2`, so the best label vector takes every term with
/// its positive sign. If the target is itself a best vector, the runner-up
/// flips the label with the smallest `|confidence_j - 1/2|`.
pub fn multilabel_margin_closed_form(confidence: &[f64], target: &[bool]) -> f64 {
    let own = centered_score(confidence, target.iter().copied());
    let best: f64 = confidence.iter().map(|c| 0.5 * (c - 0.5).abs()).sum();
    let target_is_best = confidence
        .iter()
        .zip(target)
        .all(|(c, &b)| if b { *c >= 0.5 } else { *c <= 0.5 });
    let runner_up = if target_is_best {
        let smallest = confidence
            .iter()
            .map(|c| (c - 0.5).abs())
            .fold(f64::INFINITY, f64::min);
        best - smallest
    } else {
        best
    };
    own - runner_up
}

pub fn multilabel_margin_value(confidence: &[f64], target: &[bool]) -> f64 {
    if confidence.len() <= MAX_ENUMERATED_LABELS {
        multilabel_margin_enumerated(confidence, target)
    } else {
        multilabel_margin_closed_form(confidence, target)
    }
}

pub fn multilabel_margin(profiles: &[VoteProfile], dataset: &Dataset) -> Result<MarginVector> {
    check_inputs(profiles, dataset, LabelKind::Multilabel)?;
    let values = multilabel_pairs(profiles, dataset)
        .map(|(c, y)| multilabel_margin_value(c, y))
        .collect();
    Ok(MarginVector {
        kind: MarginKind::Multilabel,
        values,
    })
}

/// Signed test of the confidence vector against the hyperplane through the
/// half-flipped label vectors, with the `coordinate`-th entry of the target
/// replaced by one half: `(confidence - y_{i->1/2}) . (y - 1/2)`.
///
/// The value does not depend on `coordinate`.
pub fn two_margin_value(confidence: &[f64], target: &[bool], coordinate: usize) -> f64 {
    confidence
        .iter()
        .zip(target)
        .enumerate()
        .map(|(j, (c, &b))| {
            let half_flipped = if j == coordinate {
                0.5
            } else if b {
                1.0
            } else {
                0.0
            };
            let normal = if b { 0.5 } else { -0.5 };
            (c - half_flipped) * normal
        })
        .sum()
}

pub fn two_margin(profiles: &[VoteProfile], dataset: &Dataset) -> Result<MarginVector> {
    check_inputs(profiles, dataset, LabelKind::Multilabel)?;
    let values = multilabel_pairs(profiles, dataset)
        .map(|(c, y)| two_margin_value(c, y, 0))
        .collect();
    Ok(MarginVector {
        kind: MarginKind::TwoMargin,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::LabelSpace;
    use proptest::prelude::*;

    fn mc(q: usize, g: Vec<f64>, y: usize) -> (Vec<VoteProfile>, Dataset) {
        let ds = Dataset::uniform(
            LabelSpace::multiclass(q).unwrap(),
            vec![vec![0.0]],
            vec![Label::Class(y)],
        )
        .unwrap();
        (vec![VoteProfile::Multiclass(g)], ds)
    }

    fn ml(conf: Vec<f64>, y: Vec<bool>) -> (Vec<VoteProfile>, Dataset) {
        let ds = Dataset::uniform(
            LabelSpace::multilabel(conf.len()).unwrap(),
            vec![vec![0.0]],
            vec![Label::Bits(y)],
        )
        .unwrap();
        (vec![VoteProfile::Multilabel(conf)], ds)
    }

    #[test]
    fn binary_margin_cases() {
        let ds = Dataset::uniform(
            LabelSpace::binary(),
            vec![vec![0.0], vec![0.0]],
            vec![Label::Binary(1), Label::Binary(-1)],
        )
        .unwrap();
        let p = vec![VoteProfile::Binary(1.0), VoteProfile::Binary(0.4)];
        assert_eq!(binary_margin(&p, &ds).unwrap().values, vec![1.0, -0.4]);
        assert!(multiclass_margin(&p, &ds).is_err());
    }

    #[test]
    fn multiclass_margin_cases() {
        let (p, ds) = mc(3, vec![0.5, 0.3, 0.2], 0);
        assert!((multiclass_margin(&p, &ds).unwrap().values[0] - 0.2).abs() < 1e-15);
        let (p, ds) = mc(3, vec![1.0, 0.0, 0.0], 0);
        assert_eq!(multiclass_margin(&p, &ds).unwrap().values[0], 1.0);
        let third = 1.0 / 3.0;
        let (p, ds) = mc(3, vec![third; 3], 1);
        assert_eq!(multiclass_margin(&p, &ds).unwrap().values[0], 0.0);
    }

    #[test]
    fn strength_margin_cases() {
        let (p, ds) = mc(3, vec![0.5, 0.3, 0.2], 0);
        assert!((strength_margin(&p, &ds, 2).unwrap().values[0] - 0.3).abs() < 1e-15);
        assert_eq!(strength_margin(&p, &ds, 0).unwrap().values[0], 0.0);
        assert!(matches!(strength_margin(&p, &ds, 3), Err(Error::Config(_))));
        let (p, ds) = mc(3, vec![0.2, 0.8, 0.0], 0);
        assert!((strength_margin(&p, &ds, 1).unwrap().values[0] + 0.6).abs() < 1e-15);
    }

    #[test]
    fn omega_margin_cases() {
        let (p, ds) = mc(3, vec![0.5, 0.5, 0.0], 0);
        assert_eq!(omega_margin(&p, &ds, 2.0).unwrap().values[0], 0.0);
        let (p, ds) = mc(3, vec![1.0, 0.0, 0.0], 0);
        assert_eq!(omega_margin(&p, &ds, 2.0).unwrap().values[0], 0.5);
        let third = 1.0 / 3.0;
        let (p, ds) = mc(3, vec![third; 3], 0);
        assert_eq!(omega_margin(&p, &ds, 3.0).unwrap().values[0], 0.0);
        assert!(matches!(omega_margin(&p, &ds, 0.5), Err(Error::Config(_))));
        assert!(omega_margin(&p, &ds, f64::NAN).is_err());
    }

    #[test]
    fn multilabel_margin_cases() {
        let (p, ds) = ml(vec![0.9, 0.2], vec![true, false]);
        assert!((multilabel_margin(&p, &ds).unwrap().values[0] - 0.3).abs() < 1e-15);
        let (p, ds) = ml(vec![1.0, 0.0, 1.0], vec![true, false, true]);
        assert!(multilabel_margin(&p, &ds).unwrap().values[0] > 0.0);
        let (p, ds) = ml(vec![0.5; 4], vec![true, false, true, true]);
        assert_eq!(multilabel_margin(&p, &ds).unwrap().values[0], 0.0);
    }

    #[test]
    fn multilabel_large_q_uses_closed_form() {
        let q = MAX_ENUMERATED_LABELS + 2;
        let conf: Vec<f64> = (0..q).map(|j| if j % 2 == 0 { 0.9 } else { 0.3 }).collect();
        let y: Vec<bool> = (0..q).map(|j| j % 2 == 0).collect();
        // runner-up flips one of the 0.3 labels: margin = min |c - 1/2| = 0.2
        assert!((multilabel_margin_value(&conf, &y) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn two_margin_cases() {
        let (p, ds) = ml(vec![0.9, 0.2], vec![true, false]);
        assert!((two_margin(&p, &ds).unwrap().values[0] - 0.1).abs() < 1e-15);
        assert!((two_margin_value(&[0.9, 0.2], &[true, false], 1) - 0.1).abs() < 1e-15);
        assert!(two_margin(&[VoteProfile::Binary(0.0)], &ds).is_err());
    }

    #[test]
    fn two_margin_at_half_confidence() {
        // confidence 1/2 everywhere: every coordinate but the replaced one
        // contributes -(1/2)^2, giving -(Q-1)/4.
        for q in 2..=6 {
            for mask in 0..(1u32 << q) {
                let y: Vec<bool> = (0..q).map(|j| mask & (1 << j) != 0).collect();
                let v = two_margin_value(&vec![0.5; q], &y, 0);
                assert!((v + (q as f64 - 1.0) / 4.0).abs() < 1e-15, "q={q} v={v}");
            }
        }
    }

    #[test]
    fn two_margin_at_perfect_confidence_is_quarter() {
        for q in 2..=6 {
            for mask in 0..(1u32 << q) {
                let y: Vec<bool> = (0..q).map(|j| mask & (1 << j) != 0).collect();
                let conf: Vec<f64> = y.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
                assert_eq!(two_margin_value(&conf, &y, 0), 0.25);
            }
        }
    }

    fn conf_and_target() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
        (2usize..=6).prop_flat_map(|q| {
            (
                proptest::collection::vec(0.0f64..=1.0, q),
                proptest::collection::vec(any::<bool>(), q),
            )
        })
    }

    proptest! {
        #[test]
        fn closed_form_matches_enumeration((conf, y) in conf_and_target()) {
            let a = multilabel_margin_enumerated(&conf, &y);
            let b = multilabel_margin_closed_form(&conf, &y);
            prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }

        #[test]
        fn two_margin_invariant_in_coordinate((conf, y) in conf_and_target()) {
            let first = two_margin_value(&conf, &y, 0);
            for i in 1..conf.len() {
                prop_assert!((two_margin_value(&conf, &y, i) - first).abs() < 1e-12);
            }
        }

        #[test]
        fn printed_expansion_is_offset_by_half((conf, y) in conf_and_target()) {
            // y.(c - 1/2) - c.(1/2)1 - 1/4
            let expanded: f64 = conf.iter().zip(&y)
                .map(|(c, &b)| if b { c - 0.5 } else { 0.0 })
                .sum::<f64>()
                - 0.5 * conf.iter().sum::<f64>()
                - 0.25;
            let geometric = two_margin_value(&conf, &y, 0);
            prop_assert!((geometric - expanded - 0.5).abs() < 1e-12);
        }

        #[test]
        fn omega_margin_monotone_in_omega(g0 in 0.0f64..=1.0, w1 in 1.0f64..10.0, dw in 0.0f64..10.0) {
            let (p, ds) = mc(2, vec![g0, 1.0 - g0], 0);
            let a = omega_margin(&p, &ds, w1).unwrap().values[0];
            let b = omega_margin(&p, &ds, w1 + dw).unwrap().values[0];
            prop_assert!(b >= a);
        }
    }
}
