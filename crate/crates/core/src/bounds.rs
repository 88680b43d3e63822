//! Margin moments and the C-bound family.
//!
//! Every bound here has the shape `1 - mu1^2 / mu2` (or a sum of such terms)
//! and requires a strictly positive first moment. Hypotheses are checked with
//! a strict `> 0` and no slack; a failed hypothesis is reported as
//! [`Error::BoundUndefined`], never clipped to a value.

use std::collections::BTreeMap;

use crate::ensemble::{Dataset, Ensemble, LabelKind, VoteProfile, SIMPLEX_TOL};
use crate::error::{Error, Result};
use crate::margins::{self, check_omega};

/// Slack allowed when re-checking a theorem's conclusion on computed values.
pub const INEQUALITY_TOL: f64 = 1e-9;

/// Rounding slack for `mu1^2 <= mu2` and for C-bound values just below zero.
const JENSEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentPair {
    pub mu1: f64,
    pub mu2: f64,
}

impl MomentPair {
    pub fn variance(&self) -> f64 {
        self.mu2 - self.mu1 * self.mu1
    }
}

/// First and second moments of a margin under the dataset weights.
pub fn moments(margins: &[f64], dataset: &Dataset) -> Result<MomentPair> {
    dataset.check_len(margins.len())?;
    let (mu1, mu2) = dataset
        .weights()
        .zip(margins)
        .fold((0.0, 0.0), |(a, b), (w, m)| (a + w * m, b + w * m * m));
    if mu1 * mu1 > mu2 + JENSEN_TOL {
        return Err(Error::InvariantViolation(format!(
            "moments violate Jensen: mu1^2 = {} > mu2 = {mu2}",
            mu1 * mu1
        )));
    }
    Ok(MomentPair { mu1, mu2 })
}

/// `1 - mu1^2 / mu2`, defined when `mu1 > 0`.
pub fn cbound(m: MomentPair) -> Result<f64> {
    cbound_named("C-bound", m)
}

fn cbound_named(name: &str, m: MomentPair) -> Result<f64> {
    if !(m.mu1 > 0.0) {
        return Err(Error::undefined(
            name,
            format!("first margin moment is {} (must be > 0)", m.mu1),
        ));
    }
    if !(m.mu2 > 0.0) {
        return Err(Error::InvariantViolation(format!(
            "{name}: second moment {} with positive first moment {}",
            m.mu2, m.mu1
        )));
    }
    let value = 1.0 - m.mu1 * m.mu1 / m.mu2;
    if value < -JENSEN_TOL {
        return Err(Error::InvariantViolation(format!(
            "{name}: value {value} below zero"
        )));
    }
    Ok(value.max(0.0))
}

/// Binary C-bound on `y E h(x)`.
pub fn binary_cbound(dataset: &Dataset, profiles: &[VoteProfile]) -> Result<f64> {
    let m = margins::binary_margin(profiles, dataset)?;
    cbound_named("theorem1", moments(&m.values, dataset)?)
}

/// Multiclass C-bound on the multiclass margin.
pub fn multiclass_cbound(dataset: &Dataset, profiles: &[VoteProfile]) -> Result<f64> {
    let m = margins::multiclass_margin(profiles, dataset)?;
    cbound_named("theorem4", moments(&m.values, dataset)?)
}

/// Moments of the strength against every class, in class order.
pub fn strength_moments(dataset: &Dataset, profiles: &[VoteProfile]) -> Result<Vec<MomentPair>> {
    (0..dataset.label_space().q())
        .map(|c| {
            let s = margins::strength_margin(profiles, dataset, c)?;
            moments(&s.values, dataset)
        })
        .collect()
}

/// `(Q - 1) - sum_c mu1(S_c)^2 / mu2(S_c)`. Needs every class's first
/// strength moment to be positive; the raw value can exceed one.
pub fn strength_bound(dataset: &Dataset, profiles: &[VoteProfile]) -> Result<f64> {
    let per_class = strength_moments(dataset, profiles)?;
    let q = per_class.len();
    let mut ratio_sum = 0.0;
    for (c, m) in per_class.iter().enumerate() {
        if !(m.mu1 > 0.0) {
            return Err(Error::undefined(
                "theorem5",
                format!(
                    "first strength moment for class {} is {} (must be > 0)",
                    c + 1,
                    m.mu1
                ),
            ));
        }
        ratio_sum += m.mu1 * m.mu1 / m.mu2;
    }
    Ok((q as f64 - 1.0) - ratio_sum)
}

/// `sum_c P(S_c <= 0) - 1`.
///
/// The strength against the true class is zero on every example, so the
/// value is accumulated per example as the weighted count of competing
/// classes with `S_c <= 0`. For two classes this sums the same terms in the
/// same order as the risk and the two agree exactly.
pub fn union_bound(dataset: &Dataset, profiles: &[VoteProfile]) -> Result<f64> {
    let q = dataset.label_space().q();
    let strengths = (0..q)
        .map(|c| margins::strength_margin(profiles, dataset, c).map(|s| s.values))
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for (i, (ex, w)) in dataset.examples().iter().zip(dataset.weights()).enumerate() {
        let y = ex
            .target
            .class()
            .ok_or_else(|| Error::InvariantViolation(format!("example {i} has no class target")))?;
        let count = (0..q).filter(|&c| c != y && strengths[c][i] <= 0.0).count();
        if count > 0 {
            total += w * count as f64;
        }
    }
    Ok(total)
}

/// The three probabilities of the risk sandwich.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    /// `P(M_{rho,Q} <= 0)`.
    pub lower: f64,
    pub risk: f64,
    /// `P(M_{rho,2} <= 0)`.
    pub upper: f64,
}

/// Computes the sandwich probabilities without checking their order.
pub fn sandwich_probabilities(dataset: &Dataset, profiles: &[VoteProfile]) -> Result<Sandwich> {
    let q = dataset.label_space().q() as f64;
    let lower = margins::omega_margin(profiles, dataset, q)?;
    let margin = margins::multiclass_margin(profiles, dataset)?;
    let upper = margins::omega_margin(profiles, dataset, 2.0)?;
    Ok(Sandwich {
        lower: dataset.mass_nonpositive(&lower.values)?,
        risk: dataset.mass_nonpositive(&margin.values)?,
        upper: dataset.mass_nonpositive(&upper.values)?,
    })
}

/// Sandwich probabilities, checked to be ordered. The left inequality relies on
/// each vote profile summing to one.
pub fn sandwich(dataset: &Dataset, profiles: &[VoteProfile]) -> Result<Sandwich> {
    for (i, p) in profiles.iter().enumerate() {
        if let VoteProfile::Multiclass(g) = p {
            let total: f64 = g.iter().sum();
            if (total - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::InvariantViolation(format!(
                    "vote profile of example {i} sums to {total:.17}, expected 1"
                )));
            }
        }
    }
    let s = sandwich_probabilities(dataset, profiles)?;
    if !(s.lower <= s.risk && s.risk <= s.upper) {
        return Err(Error::InvariantViolation(format!(
            "sandwich out of order: {} <= {} <= {}",
            s.lower, s.risk, s.upper
        )));
    }
    Ok(s)
}

/// C-bound on the omega-margin. For `omega = 2` it also bounds the risk.
pub fn omega_cbound(dataset: &Dataset, profiles: &[VoteProfile], omega: f64) -> Result<f64> {
    check_omega(omega)?;
    let m = margins::omega_margin(profiles, dataset, omega)?;
    cbound_named("theorem6", moments(&m.values, dataset)?)
}

/// Multi-label C-bound on the 2-margin. Also checks that the exact-match
/// risk is below `P(2-margin <= 0)`, which is in turn below the bound.
pub fn multilabel_cbound(dataset: &Dataset, profiles: &[VoteProfile]) -> Result<f64> {
    let two = margins::two_margin(profiles, dataset)?;
    let bound = cbound_named("theorem7", moments(&two.values, dataset)?)?;
    let risk = dataset.mass_nonpositive(&margins::multilabel_margin(profiles, dataset)?.values)?;
    let p_two = dataset.mass_nonpositive(&two.values)?;
    if !(risk <= p_two && p_two <= bound + INEQUALITY_TOL) {
        return Err(Error::InvariantViolation(format!(
            "multi-label chain out of order: risk {risk}, P(2-margin <= 0) {p_two}, bound {bound}"
        )));
    }
    Ok(bound)
}

/// Evaluation settings of a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportSettings {
    pub omega: f64,
    pub seed: Option<u64>,
}

impl Default for ReportSettings {
    fn default() -> Self {
        Self {
            omega: 2.0,
            seed: None,
        }
    }
}

/// Value of one bound variant in a report.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundValue {
    Defined(f64),
    /// The label kind does not support this variant.
    NotApplicable,
    /// The variant applies but its hypotheses fail.
    Undefined(String),
}

impl BoundValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            BoundValue::Defined(v) => Some(*v),
            _ => None,
        }
    }

    pub fn precondition_met(&self) -> bool {
        matches!(self, BoundValue::Defined(_))
    }
}

/// Keys of every bound variant, in report order.
pub const BOUND_KEYS: [&str; 8] = [
    "theorem1",
    "theorem3-lower",
    "theorem3-upper",
    "theorem4",
    "theorem5",
    "theorem6",
    "theorem7",
    "eq2-union",
];

/// Risk, margin moments, margin probabilities and every bound for one
/// dataset, ensemble and setting.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub label_kind: LabelKind,
    pub q: usize,
    pub settings: ReportSettings,
    pub risk: f64,
    /// Moments per margin family; absent families are inapplicable.
    pub moments: BTreeMap<String, MomentPair>,
    pub margin_probabilities: BTreeMap<String, f64>,
    /// One entry per key of [`BOUND_KEYS`].
    pub bounds: BTreeMap<String, BoundValue>,
}

impl BoundReport {
    /// True when an applicable bound failed its hypotheses.
    pub fn is_degraded(&self) -> bool {
        self.bounds
            .values()
            .any(|b| matches!(b, BoundValue::Undefined(_)))
    }

    pub fn bound(&self, key: &str) -> &BoundValue {
        &self.bounds[key]
    }
}

fn capture(result: Result<f64>) -> Result<BoundValue> {
    match result {
        Ok(v) => Ok(BoundValue::Defined(v)),
        Err(Error::BoundUndefined { reason, .. }) => Ok(BoundValue::Undefined(reason)),
        Err(e) => Err(e),
    }
}

/// Evaluates everything that applies to the ensemble's label kind.
pub fn full_report(
    dataset: &Dataset,
    ensemble: &Ensemble,
    settings: ReportSettings,
) -> Result<BoundReport> {
    check_omega(settings.omega)?;
    let profiles = ensemble.profiles(dataset)?;
    let space = dataset.label_space();
    let mut bounds: BTreeMap<String, BoundValue> = BOUND_KEYS
        .iter()
        .map(|k| (k.to_string(), BoundValue::NotApplicable))
        .collect();
    let mut moment_map = BTreeMap::new();
    let mut probs = BTreeMap::new();
    let mut set = |key: &str, v: BoundValue| {
        bounds.insert(key.to_string(), v);
    };

    let risk = match space.kind() {
        LabelKind::Binary => {
            let m = margins::binary_margin(&profiles, dataset)?;
            moment_map.insert("binary".to_string(), moments(&m.values, dataset)?);
            set("theorem1", capture(binary_cbound(dataset, &profiles))?);
            dataset.mass_nonpositive(&m.values)?
        }
        LabelKind::Multiclass => {
            let q = space.q();
            let sw = sandwich(dataset, &profiles)?;
            set("theorem3-lower", BoundValue::Defined(sw.lower));
            set("theorem3-upper", BoundValue::Defined(sw.upper));
            probs.insert("omegaQ".to_string(), sw.lower);
            probs.insert("omega2".to_string(), sw.upper);

            let m = margins::multiclass_margin(&profiles, dataset)?;
            moment_map.insert("multiclass".to_string(), moments(&m.values, dataset)?);
            set("theorem4", capture(multiclass_cbound(dataset, &profiles))?);

            for (c, mp) in strength_moments(dataset, &profiles)?
                .into_iter()
                .enumerate()
            {
                moment_map.insert(format!("strength-{}", c + 1), mp);
            }
            set("theorem5", capture(strength_bound(dataset, &profiles))?);

            let om = margins::omega_margin(&profiles, dataset, settings.omega)?;
            moment_map.insert("omega".to_string(), moments(&om.values, dataset)?);
            probs.insert("omega".to_string(), dataset.mass_nonpositive(&om.values)?);
            for (key, w) in [("omega2", 2.0), ("omegaQ", q as f64)] {
                let mw = margins::omega_margin(&profiles, dataset, w)?;
                moment_map.insert(key.to_string(), moments(&mw.values, dataset)?);
            }
            set(
                "theorem6",
                capture(omega_cbound(dataset, &profiles, settings.omega))?,
            );
            set(
                "eq2-union",
                BoundValue::Defined(union_bound(dataset, &profiles)?),
            );
            sw.risk
        }
        LabelKind::Multilabel => {
            let two = margins::two_margin(&profiles, dataset)?;
            moment_map.insert("twoMargin".to_string(), moments(&two.values, dataset)?);
            probs.insert(
                "twoMargin".to_string(),
                dataset.mass_nonpositive(&two.values)?,
            );
            set("theorem7", capture(multilabel_cbound(dataset, &profiles))?);
            let m = margins::multilabel_margin(&profiles, dataset)?;
            moment_map.insert("multilabel".to_string(), moments(&m.values, dataset)?);
            dataset.mass_nonpositive(&m.values)?
        }
    };

    Ok(BoundReport {
        label_kind: space.kind(),
        q: space.q(),
        settings,
        risk,
        moments: moment_map,
        margin_probabilities: probs,
        bounds,
    })
}
