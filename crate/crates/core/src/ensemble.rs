//! Datasets as finite weighted distributions, voters, posteriors and the
//! aggregated vote profiles of a weighted majority vote.
//!
//! Class indices are zero-based in memory (`0..q`). File formats use the
//! one-based convention and convert at the boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on "sums to one" checks for weights, posteriors and profiles.
pub const SIMPLEX_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Binary,
    Multiclass,
    Multilabel,
}

impl LabelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LabelKind::Binary => "binary",
            LabelKind::Multiclass => "multiclass",
            LabelKind::Multilabel => "multilabel",
        }
    }
}

impl std::str::FromStr for LabelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(LabelKind::Binary),
            "multiclass" => Ok(LabelKind::Multiclass),
            "multilabel" => Ok(LabelKind::Multilabel),
            other => Err(Error::config(format!("unknown label kind `{other}`"))),
        }
    }
}

/// Output space of a learning problem. Binary problems always have two
/// labels, `-1` and `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabelSpace {
    kind: LabelKind,
    q: usize,
}

impl LabelSpace {
    pub fn binary() -> Self {
        Self {
            kind: LabelKind::Binary,
            q: 2,
        }
    }

    pub fn multiclass(q: usize) -> Result<Self> {
        Self::new(LabelKind::Multiclass, q)
    }

    pub fn multilabel(q: usize) -> Result<Self> {
        Self::new(LabelKind::Multilabel, q)
    }

    pub fn new(kind: LabelKind, q: usize) -> Result<Self> {
        match kind {
            LabelKind::Binary if q != 2 => Err(Error::config(format!(
                "binary label space has exactly 2 labels, got Q={q}"
            ))),
            _ if q < 2 => Err(Error::config(format!(
                "{} label space needs Q >= 2, got Q={q}",
                kind.as_str()
            ))),
            _ => Ok(Self { kind, q }),
        }
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    /// Number of classes (or labels, for multi-label problems).
    pub fn q(&self) -> usize {
        self.q
    }
}

/// Ground-truth target of an example.
#[derive(Debug, Clone, PartialEq)]
pub enum Label {
    /// `-1` or `+1`.
    Binary(i8),
    /// Zero-based class index.
    Class(usize),
    /// Relevance bit per label.
    Bits(Vec<bool>),
}

impl Label {
    /// Class index of a multiclass target.
    pub fn class(&self) -> Option<usize> {
        match self {
            Label::Class(c) => Some(*c),
            _ => None,
        }
    }

    fn check(&self, space: &LabelSpace) -> Result<()> {
        match (self, space.kind()) {
            (Label::Binary(s), LabelKind::Binary) if *s == 1 || *s == -1 => Ok(()),
            (Label::Class(c), LabelKind::Multiclass) if *c < space.q() => Ok(()),
            (Label::Bits(b), LabelKind::Multilabel) if b.len() == space.q() => Ok(()),
            _ => Err(Error::config(format!(
                "label {self:?} is not valid in a {} space with Q={}",
                space.kind().as_str(),
                space.q()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub features: Vec<f64>,
    pub target: Label,
    /// Probability mass of this example under the empirical distribution.
    pub weight: f64,
}

/// A finite weighted sample. It is the distribution every probability and
/// moment in this crate is taken under.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    label_space: LabelSpace,
    examples: Vec<Example>,
    feature_dim: usize,
}

impl Dataset {
    /// Builds a dataset whose weights already sum to one.
    pub fn new(label_space: LabelSpace, examples: Vec<Example>) -> Result<Self> {
        let first = examples
            .first()
            .ok_or_else(|| Error::config("dataset must contain at least one example"))?;
        let feature_dim = first.features.len();
        if feature_dim == 0 {
            return Err(Error::config("feature dimension must be positive"));
        }
        let mut total = 0.0;
        for (i, ex) in examples.iter().enumerate() {
            if ex.features.len() != feature_dim {
                return Err(Error::config(format!(
                    "example {i} has {} features, expected {feature_dim}",
                    ex.features.len()
                )));
            }
            if !(ex.weight >= 0.0) || !ex.weight.is_finite() {
                return Err(Error::config(format!(
                    "example {i} has invalid weight {}",
                    ex.weight
                )));
            }
            ex.target
                .check(&label_space)
                .map_err(|e| Error::config(format!("example {i}: {e}")))?;
            total += ex.weight;
        }
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::config(format!(
                "example weights sum to {total:.17}, expected 1"
            )));
        }
        Ok(Self {
            label_space,
            examples,
            feature_dim,
        })
    }

    /// Builds a dataset with equal mass on every example.
    pub fn uniform(
        label_space: LabelSpace,
        features: Vec<Vec<f64>>,
        targets: Vec<Label>,
    ) -> Result<Self> {
        if features.len() != targets.len() {
            return Err(Error::config(format!(
                "{} feature rows but {} targets",
                features.len(),
                targets.len()
            )));
        }
        let weights = vec![1.0; targets.len()];
        Self::normalized(label_space, features, targets, weights)
    }

    /// Builds a dataset from arbitrary nonnegative weights, rescaled to sum to one.
    pub fn normalized(
        label_space: LabelSpace,
        features: Vec<Vec<f64>>,
        targets: Vec<Label>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if features.len() != targets.len() || weights.len() != targets.len() {
            return Err(Error::config(
                "features, targets and weights differ in length",
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::config(format!("invalid example weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::config("example weights sum to zero"));
        }
        let examples = features
            .into_iter()
            .zip(targets)
            .zip(weights)
            .map(|((features, target), w)| Example {
                features,
                target,
                weight: w / total,
            })
            .collect();
        Self::new(label_space, examples)
    }

    pub fn label_space(&self) -> LabelSpace {
        self.label_space
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.examples.iter().map(|e| e.weight)
    }

    /// Weighted mass of the examples whose value is `<= 0`, summed left to right.
    pub fn mass_nonpositive(&self, values: &[f64]) -> Result<f64> {
        self.check_len(values.len())?;
        Ok(self
            .examples
            .iter()
            .zip(values)
            .filter(|(_, v)| **v <= 0.0)
            .fold(0.0, |acc, (e, _)| acc + e.weight))
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if n != self.examples.len() {
            return Err(Error::config(format!(
                "got {n} per-example values for a dataset of {} examples",
                self.examples.len()
            )));
        }
        Ok(())
    }
}

/// A single voter output.
#[derive(Debug, Clone, PartialEq)]
pub enum Vote {
    /// Binary vote in `[-1, 1]`.
    Real(f64),
    /// Zero-based class index.
    Class(usize),
    Bits(Vec<bool>),
}

impl Vote {
    fn check(&self, space: &LabelSpace) -> Result<()> {
        match (self, space.kind()) {
            (Vote::Real(v), LabelKind::Binary) if *v == 1.0 || *v == -1.0 => Ok(()),
            (Vote::Class(c), LabelKind::Multiclass) if *c < space.q() => Ok(()),
            (Vote::Bits(b), LabelKind::Multilabel) if b.len() == space.q() => Ok(()),
            _ => Err(Error::config(format!(
                "vote {self:?} is not valid in a {} space with Q={}",
                space.kind().as_str(),
                space.q()
            ))),
        }
    }
}

/// Borrowed view of what a voter outputs on one example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VoteView<'a> {
    Real(f64),
    Class(usize),
    Bits(&'a [bool]),
}

impl<'a> From<&'a Vote> for VoteView<'a> {
    fn from(v: &'a Vote) -> Self {
        match v {
            Vote::Real(x) => VoteView::Real(*x),
            Vote::Class(c) => VoteView::Class(*c),
            Vote::Bits(b) => VoteView::Bits(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Voter {
    /// Thresholds one feature: `left` when `x[feature] <= threshold`, else `right`.
    Stump {
        feature: usize,
        threshold: f64,
        left: Vote,
        right: Vote,
    },
    /// One stored vote per dataset example.
    Table(Vec<Vote>),
    /// Binary confidence-rated voter, one value in `[-1, 1]` per example.
    RealTable(Vec<f64>),
}

impl Voter {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Voter::Stump { .. } => "stump",
            Voter::Table(_) => "table",
            Voter::RealTable(_) => "realvalued-table",
        }
    }

    /// Checks the voter against a label space and, for table voters, the
    /// number of examples and the feature dimension it will be applied to.
    pub fn validate(&self, space: &LabelSpace, examples: usize, feature_dim: usize) -> Result<()> {
        match self {
            Voter::Stump {
                feature,
                threshold,
                left,
                right,
            } => {
                if *feature >= feature_dim {
                    return Err(Error::config(format!(
                        "stump feature index {feature} out of range for dimension {feature_dim}"
                    )));
                }
                if threshold.is_nan() {
                    return Err(Error::config("stump threshold is NaN"));
                }
                left.check(space)?;
                right.check(space)
            }
            Voter::Table(votes) => {
                if votes.len() != examples {
                    return Err(Error::config(format!(
                        "table voter has {} predictions for {examples} examples",
                        votes.len()
                    )));
                }
                votes.iter().try_for_each(|v| v.check(space))
            }
            Voter::RealTable(values) => {
                if space.kind() != LabelKind::Binary {
                    return Err(Error::config(format!(
                        "realvalued-table voters require a binary label space, got {}",
                        space.kind().as_str()
                    )));
                }
                if values.len() != examples {
                    return Err(Error::config(format!(
                        "realvalued-table voter has {} predictions for {examples} examples",
                        values.len()
                    )));
                }
                match values.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
                    Some(v) => Err(Error::config(format!(
                        "real-valued prediction {v} outside [-1, 1]"
                    ))),
                    None => Ok(()),
                }
            }
        }
    }

    /// Output on the `index`-th example of a dataset.
    pub fn vote<'a>(&'a self, index: usize, example: &Example) -> VoteView<'a> {
        match self {
            Voter::Stump {
                feature,
                threshold,
                left,
                right,
            } => {
                if example.features[*feature] <= *threshold {
                    left.into()
                } else {
                    right.into()
                }
            }
            Voter::Table(votes) => (&votes[index]).into(),
            Voter::RealTable(values) => VoteView::Real(values[index]),
        }
    }
}

/// Weights of a distribution over voters.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior(Vec<f64>);

impl Posterior {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::config("posterior must have at least one weight"));
        }
        if let Some((j, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(**w >= 0.0) || !w.is_finite())
        {
            return Err(Error::config(format!(
                "posterior weight {j} is invalid: {w}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::config(format!(
                "posterior weights sum to {total:.17}, expected 1"
            )));
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("posterior over zero voters"));
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Voters, their posterior, and the label space they vote in.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub label_space: LabelSpace,
    pub voters: Vec<Voter>,
    pub posterior: Posterior,
}

impl Ensemble {
    pub fn new(label_space: LabelSpace, voters: Vec<Voter>, posterior: Posterior) -> Result<Self> {
        if voters.len() != posterior.len() {
            return Err(Error::config(format!(
                "{} voters but {} posterior weights",
                voters.len(),
                posterior.len()
            )));
        }
        Ok(Self {
            label_space,
            voters,
            posterior,
        })
    }

    /// Same voters under another posterior.
    pub fn with_posterior(&self, posterior: Posterior) -> Result<Self> {
        Self::new(self.label_space, self.voters.clone(), posterior)
    }

    pub fn validate_against(&self, dataset: &Dataset) -> Result<()> {
        if self.label_space != dataset.label_space() {
            return Err(Error::config(format!(
                "ensemble label space ({}, Q={}) differs from dataset label space ({}, Q={})",
                self.label_space.kind().as_str(),
                self.label_space.q(),
                dataset.label_space().kind().as_str(),
                dataset.label_space().q()
            )));
        }
        for (j, v) in self.voters.iter().enumerate() {
            v.validate(&self.label_space, dataset.len(), dataset.feature_dim())
                .map_err(|e| Error::config(format!("voter {j}: {e}")))?;
        }
        Ok(())
    }

    pub fn profiles(&self, dataset: &Dataset) -> Result<Vec<VoteProfile>> {
        self.validate_against(dataset)?;
        aggregate(dataset, &self.voters, &self.posterior)
    }
}

/// Posterior-weighted vote on one example.
#[derive(Debug, Clone, PartialEq)]
pub enum VoteProfile {
    /// `E h(x)` in `[-1, 1]`.
    Binary(f64),
    /// Vote mass `g(x, c)` per class; sums to one.
    Multiclass(Vec<f64>),
    /// Per-label confidence `E h(x)` in `[0, 1]^Q`.
    Multilabel(Vec<f64>),
}

impl VoteProfile {
    pub fn kind(&self) -> LabelKind {
        match self {
            VoteProfile::Binary(_) => LabelKind::Binary,
            VoteProfile::Multiclass(_) => LabelKind::Multiclass,
            VoteProfile::Multilabel(_) => LabelKind::Multilabel,
        }
    }
}

/// Computes one vote profile per example, in dataset order.
///
/// Each profile accumulates voters in index order, so results are
/// bit-reproducible.
pub fn aggregate(
    dataset: &Dataset,
    voters: &[Voter],
    posterior: &Posterior,
) -> Result<Vec<VoteProfile>> {
    if voters.len() != posterior.len() {
        return Err(Error::config(format!(
            "{} voters but {} posterior weights",
            voters.len(),
            posterior.len()
        )));
    }
    let space = dataset.label_space();
    for (j, v) in voters.iter().enumerate() {
        v.validate(&space, dataset.len(), dataset.feature_dim())
            .map_err(|e| Error::config(format!("voter {j}: {e}")))?;
    }
    let rho = posterior.weights();
    let profiles = dataset
        .examples()
        .iter()
        .enumerate()
        .map(|(i, ex)| match space.kind() {
            LabelKind::Binary => {
                let mut s = 0.0;
                for (v, w) in voters.iter().zip(rho) {
                    if let VoteView::Real(x) = v.vote(i, ex) {
                        s += w * x;
                    }
                }
                VoteProfile::Binary(s)
            }
            LabelKind::Multiclass => {
                let mut g = vec![0.0; space.q()];
                for (v, w) in voters.iter().zip(rho) {
                    if let VoteView::Class(c) = v.vote(i, ex) {
                        g[c] += w;
                    }
                }
                VoteProfile::Multiclass(g)
            }
            LabelKind::Multilabel => {
                let mut conf = vec![0.0; space.q()];
                for (v, w) in voters.iter().zip(rho) {
                    if let VoteView::Bits(bits) = v.vote(i, ex) {
                        for (c, b) in conf.iter_mut().zip(bits) {
                            if *b {
                                *c += w;
                            }
                        }
                    }
                }
                VoteProfile::Multilabel(conf)
            }
        })
        .collect();
    Ok(profiles)
}

/// Class with the largest vote mass; the lowest index wins ties.
pub fn predict_multiclass(mass: &[f64]) -> usize {
    let mut best = 0;
    for (c, &g) in mass.iter().enumerate().skip(1) {
        if g > mass[best] {
            best = c;
        }
    }
    best
}

/// Label vector closest to the confidence vector. A label is switched on
/// only when its confidence is strictly above one half.
pub fn predict_multilabel(confidence: &[f64]) -> Vec<bool> {
    confidence.iter().map(|&c| c > 0.5).collect()
}

/// `P(margin <= 0)` under the dataset weights. Ties count as errors.
pub fn risk(dataset: &Dataset, margins: &[f64]) -> Result<f64> {
    dataset.mass_nonpositive(margins)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mc_dataset(q: usize, targets: &[usize]) -> Dataset {
        Dataset::uniform(
            LabelSpace::multiclass(q).unwrap(),
            targets.iter().map(|_| vec![0.0]).collect(),
            targets.iter().map(|&c| Label::Class(c)).collect(),
        )
        .unwrap()
    }

    fn table(classes: &[usize]) -> Voter {
        Voter::Table(classes.iter().map(|&c| Vote::Class(c)).collect())
    }

    #[test]
    fn label_space_rejects_small_q() {
        assert!(LabelSpace::multiclass(1).is_err());
        assert!(LabelSpace::multilabel(0).is_err());
        assert!(LabelSpace::new(LabelKind::Binary, 3).is_err());
        assert_eq!(LabelSpace::binary().q(), 2);
    }

    #[test]
    fn aggregate_uniform_three_voters() {
        let ds = mc_dataset(3, &[0]);
        let voters = vec![table(&[0]), table(&[0]), table(&[1])];
        let p = aggregate(&ds, &voters, &Posterior::uniform(3).unwrap()).unwrap();
        let VoteProfile::Multiclass(g) = &p[0] else {
            panic!()
        };
        assert!((g[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((g[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(g[2], 0.0);
    }

    #[test]
    fn aggregate_single_voter_is_indicator() {
        let ds = mc_dataset(3, &[2]);
        let p = aggregate(&ds, &[table(&[1])], &Posterior::new(vec![1.0]).unwrap()).unwrap();
        assert_eq!(p[0], VoteProfile::Multiclass(vec![0.0, 1.0, 0.0]));
    }

    #[test]
    fn aggregate_multilabel_averages_componentwise() {
        let ds = Dataset::uniform(
            LabelSpace::multilabel(2).unwrap(),
            vec![vec![0.0]],
            vec![Label::Bits(vec![true, false])],
        )
        .unwrap();
        let voters = vec![
            Voter::Table(vec![Vote::Bits(vec![true, false])]),
            Voter::Table(vec![Vote::Bits(vec![true, true])]),
        ];
        let p = aggregate(&ds, &voters, &Posterior::new(vec![0.5, 0.5]).unwrap()).unwrap();
        assert_eq!(p[0], VoteProfile::Multilabel(vec![1.0, 0.5]));
    }

    #[test]
    fn aggregate_binary_real_valued() {
        let ds = Dataset::uniform(
            LabelSpace::binary(),
            vec![vec![0.0], vec![1.0]],
            vec![Label::Binary(1), Label::Binary(-1)],
        )
        .unwrap();
        let voters = vec![
            Voter::RealTable(vec![0.5, -0.2]),
            Voter::Stump {
                feature: 0,
                threshold: 0.5,
                left: Vote::Real(1.0),
                right: Vote::Real(-1.0),
            },
        ];
        let p = aggregate(&ds, &voters, &Posterior::new(vec![0.5, 0.5]).unwrap()).unwrap();
        assert_eq!(p[0], VoteProfile::Binary(0.75));
        assert_eq!(p[1], VoteProfile::Binary(-0.6));
    }

    #[test]
    fn aggregate_rejects_mismatches() {
        let ds = mc_dataset(3, &[0, 1]);
        let uniform2 = Posterior::uniform(2).unwrap();
        assert!(matches!(
            aggregate(&ds, &[table(&[0, 1])], &uniform2),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            aggregate(&ds, &[table(&[0]), table(&[0])], &uniform2),
            Err(Error::Config(_))
        ));
        let wrong_kind = Voter::Table(vec![Vote::Bits(vec![true; 3]); 2]);
        assert!(matches!(
            aggregate(&ds, &[wrong_kind, table(&[0, 1])], &uniform2),
            Err(Error::Config(_))
        ));
        let real = Voter::RealTable(vec![0.0, 0.0]);
        assert!(aggregate(&ds, &[real, table(&[0, 1])], &uniform2).is_err());
    }

    #[test]
    fn posterior_validation() {
        assert!(Posterior::new(vec![0.5, 0.6]).is_err());
        assert!(Posterior::new(vec![1.5, -0.5]).is_err());
        assert!(Posterior::new(vec![]).is_err());
        assert!(Posterior::new(vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn dataset_validation() {
        let ls = LabelSpace::multiclass(3).unwrap();
        assert!(Dataset::uniform(ls, vec![], vec![]).is_err());
        assert!(Dataset::uniform(ls, vec![vec![0.0]], vec![Label::Class(3)]).is_err());
        assert!(Dataset::uniform(ls, vec![vec![0.0], vec![]], vec![Label::Class(0); 2]).is_err());
        let bad_weight = Example {
            features: vec![0.0],
            target: Label::Class(0),
            weight: 0.9,
        };
        assert!(Dataset::new(ls, vec![bad_weight]).is_err());
        let ds = Dataset::normalized(
            ls,
            vec![vec![0.0], vec![1.0]],
            vec![Label::Class(0), Label::Class(1)],
            vec![1.0, 3.0],
        )
        .unwrap();
        assert_eq!(ds.weights().collect::<Vec<_>>(), vec![0.25, 0.75]);
    }

    #[test]
    fn predict_multiclass_cases() {
        assert_eq!(predict_multiclass(&[0.5, 0.3, 0.2]), 0);
        assert_eq!(predict_multiclass(&[0.5, 0.5, 0.0]), 0);
        assert_eq!(predict_multiclass(&[0.0, 0.0, 1.0]), 2);
    }

    #[test]
    fn predict_multilabel_cases() {
        assert_eq!(predict_multilabel(&[0.9, 0.2]), vec![true, false]);
        assert_eq!(predict_multilabel(&[0.5, 0.5]), vec![false, false]);
    }

    #[test]
    fn risk_cases() {
        let ds = mc_dataset(2, &[0, 0, 0, 0]);
        assert_eq!(risk(&ds, &[0.1, 0.2, 0.3, 0.4]).unwrap(), 0.0);
        assert_eq!(risk(&ds, &[0.0, -0.2, -0.3, 0.0]).unwrap(), 1.0);
        assert_eq!(risk(&ds, &[0.1, 0.0, -0.2, 0.3]).unwrap(), 0.5);
        assert!(matches!(risk(&ds, &[0.1]), Err(Error::Config(_))));
    }
}
