//! Brute-force verification harness.
//!
//! Instances are small and finite, so every probability here is an exact sum
//! of dataset weights. Risks are recomputed from the raw voter outputs by
//! enumeration and compared against the bounds from [`crate::bounds`].

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, MomentPair, INEQUALITY_TOL};
use crate::ensemble::{
    Dataset, Ensemble, Label, LabelKind, LabelSpace, Posterior, Vote, VoteView, Voter,
};
use crate::error::{Error, Result};
use crate::margins;

/// Tolerance for properties that are exact identities.
pub const EQUALITY_TOL: f64 = 1e-12;

/// Largest label count the multi-label enumeration oracle accepts.
pub const MAX_ORACLE_LABELS: usize = 6;

/// Parameters of one random instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstanceSpec {
    pub label_kind: LabelKind,
    pub q: usize,
    pub voters: usize,
    pub examples: usize,
    pub seed: u64,
    /// Probability that a table voter outputs the true label on an example.
    pub voter_accuracy: f64,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        LabelSpace::new(self.label_kind, self.q)?;
        if self.label_kind == LabelKind::Multilabel && self.q > MAX_ORACLE_LABELS {
            return Err(Error::config(format!(
                "multi-label instances are limited to Q <= {MAX_ORACLE_LABELS}, got {}",
                self.q
            )));
        }
        if self.voters == 0 || self.examples == 0 {
            return Err(Error::config(
                "instances need at least one voter and one example",
            ));
        }
        if !(0.0..=1.0).contains(&self.voter_accuracy) {
            return Err(Error::config(format!(
                "voter accuracy {} outside [0, 1]",
                self.voter_accuracy
            )));
        }
        Ok(())
    }
}

/// Uniform draw from the probability simplex of dimension `n` using the
/// spacings of sorted uniforms.
pub fn flat_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.random::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(n);
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(1.0 - prev);
    out
}

fn bits_of(mask: u32, q: usize) -> Vec<bool> {
    (0..q).map(|j| mask & (1 << j) != 0).collect()
}

fn mask_of(bits: &[bool]) -> u32 {
    bits.iter()
        .enumerate()
        .fold(0, |m, (j, b)| if *b { m | (1 << j) } else { m })
}

/// Deterministic random dataset and table-voter ensemble.
pub fn generate(spec: &InstanceSpec) -> Result<(Dataset, Ensemble)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let q = spec.q;
    let space = LabelSpace::new(spec.label_kind, q)?;
    let m = spec.examples;

    let features: Vec<Vec<f64>> = (0..m)
        .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
        .collect();
    let targets: Vec<Label> = (0..m)
        .map(|_| match spec.label_kind {
            LabelKind::Binary => Label::Binary(if rng.random::<bool>() { 1 } else { -1 }),
            LabelKind::Multiclass => Label::Class(rng.random_range(0..q)),
            LabelKind::Multilabel => Label::Bits(bits_of(rng.random_range(0..1u32 << q), q)),
        })
        .collect();

    let voters = (0..spec.voters)
        .map(|_| {
            let votes = targets
                .iter()
                .map(|y| {
                    let correct = rng.random::<f64>() < spec.voter_accuracy;
                    match y {
                        Label::Binary(s) => Vote::Real(if correct { *s } else { -*s } as f64),
                        Label::Class(c) => {
                            if correct {
                                Vote::Class(*c)
                            } else {
                                let r = rng.random_range(0..q - 1);
                                Vote::Class(if r >= *c { r + 1 } else { r })
                            }
                        }
                        Label::Bits(b) => {
                            if correct {
                                Vote::Bits(b.clone())
                            } else {
                                let own = mask_of(b);
                                let r = rng.random_range(0..(1u32 << q) - 1);
                                Vote::Bits(bits_of(if r >= own { r + 1 } else { r }, q))
                            }
                        }
                    }
                })
                .collect();
            Voter::Table(votes)
        })
        .collect();

    let posterior = Posterior::new(flat_simplex(&mut rng, spec.voters))?;
    let dataset = Dataset::uniform(space, features, targets)?;
    let ensemble = Ensemble::new(space, voters, posterior)?;
    ensemble.validate_against(&dataset)?;
    Ok((dataset, ensemble))
}

/// Vote mass per class, recomputed from the raw voter outputs.
fn tally_classes(dataset: &Dataset, ensemble: &Ensemble) -> Vec<Vec<f64>> {
    let q = dataset.label_space().q();
    let rho = ensemble.posterior.weights();
    dataset
        .examples()
        .iter()
        .enumerate()
        .map(|(i, ex)| {
            let mut mass = vec![0.0; q];
            for (v, w) in ensemble.voters.iter().zip(rho) {
                if let VoteView::Class(c) = v.vote(i, ex) {
                    mass[c] += w;
                }
            }
            mass
        })
        .collect()
}

fn class_of(target: &Label) -> usize {
    match target {
        Label::Class(c) => *c,
        other => panic!("expected a class target, got {other:?}"),
    }
}

/// Exact multiclass risk: an example is an error when some other class gets
/// at least as much vote mass as the true one.
pub fn exact_risk_multiclass(dataset: &Dataset, ensemble: &Ensemble) -> f64 {
    let tallies = tally_classes(dataset, ensemble);
    let mut risk = 0.0;
    for (ex, mass) in dataset.examples().iter().zip(&tallies) {
        let y = class_of(&ex.target);
        if (0..mass.len()).any(|c| c != y && mass[c] >= mass[y]) {
            risk += ex.weight;
        }
    }
    risk
}

/// Exact `P(g(x, y) <= threshold)`.
fn exact_mass_at_most(dataset: &Dataset, ensemble: &Ensemble, threshold: f64) -> f64 {
    let tallies = tally_classes(dataset, ensemble);
    let mut p = 0.0;
    for (ex, mass) in dataset.examples().iter().zip(&tallies) {
        if mass[class_of(&ex.target)] <= threshold {
            p += ex.weight;
        }
    }
    p
}

/// Exact binary risk: the weighted vote does not have the sign of the label.
pub fn exact_risk_binary(dataset: &Dataset, ensemble: &Ensemble) -> f64 {
    let rho = ensemble.posterior.weights();
    let mut risk = 0.0;
    for (i, ex) in dataset.examples().iter().enumerate() {
        let Label::Binary(y) = ex.target else {
            panic!("expected a binary target")
        };
        let mut s = 0.0;
        for (v, w) in ensemble.voters.iter().zip(rho) {
            if let VoteView::Real(x) = v.vote(i, ex) {
                s += w * x;
            }
        }
        if f64::from(y) * s <= 0.0 {
            risk += ex.weight;
        }
    }
    risk
}

/// True when `target` is the unique label vector at minimal squared distance
/// from `confidence`, found by trying all `2^Q` vectors.
pub fn is_unique_nearest(confidence: &[f64], target: &[bool]) -> bool {
    let q = confidence.len();
    let dist = |bits: &[bool]| -> f64 {
        confidence
            .iter()
            .zip(bits)
            .map(|(c, &b)| {
                let d = c - if b { 1.0 } else { 0.0 };
                d * d
            })
            .sum()
    };
    let own = dist(target);
    let own_mask = mask_of(target);
    (0..1u32 << q)
        .filter(|&m| m != own_mask)
        .all(|m| dist(&bits_of(m, q)) > own)
}

/// Exact-match multi-label risk by nearest-vector enumeration.
pub fn exact_risk_multilabel(dataset: &Dataset, ensemble: &Ensemble) -> f64 {
    let q = dataset.label_space().q();
    let rho = ensemble.posterior.weights();
    let mut risk = 0.0;
    for (i, ex) in dataset.examples().iter().enumerate() {
        let Label::Bits(y) = &ex.target else {
            panic!("expected a multi-label target")
        };
        let mut conf = vec![0.0; q];
        for (v, w) in ensemble.voters.iter().zip(rho) {
            if let VoteView::Bits(bits) = v.vote(i, ex) {
                for (c, b) in conf.iter_mut().zip(bits) {
                    if *b {
                        *c += w;
                    }
                }
            }
        }
        if !is_unique_nearest(&conf, y) {
            risk += ex.weight;
        }
    }
    risk
}

/// Properties the harness knows how to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    CboundDominatesRisk,
    Sandwich,
    UnionBound,
    StrengthBound,
    OmegaCbound,
    MultilabelCbound,
    TwoMarginImpliesCorrect,
    TwoMarginIInvariance,
    BinaryCollapse,
    CantelliBase,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::CboundDominatesRisk,
        Property::Sandwich,
        Property::UnionBound,
        Property::StrengthBound,
        Property::OmegaCbound,
        Property::MultilabelCbound,
        Property::TwoMarginImpliesCorrect,
        Property::TwoMarginIInvariance,
        Property::BinaryCollapse,
        Property::CantelliBase,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Property::CboundDominatesRisk => "cbound-dominates-risk",
            Property::Sandwich => "sandwich",
            Property::UnionBound => "union-bound",
            Property::StrengthBound => "strength-bound",
            Property::OmegaCbound => "omega-cbound",
            Property::MultilabelCbound => "multilabel-cbound",
            Property::TwoMarginImpliesCorrect => "two-margin-implies-correct",
            Property::TwoMarginIInvariance => "two-margin-i-invariance",
            Property::BinaryCollapse => "binary-collapse",
            Property::CantelliBase => "cantelli-base",
        }
    }

    /// Label kind of the instances a campaign for this property draws.
    pub fn instance_kind(&self) -> LabelKind {
        match self {
            Property::MultilabelCbound
            | Property::TwoMarginImpliesCorrect
            | Property::TwoMarginIInvariance => LabelKind::Multilabel,
            _ => LabelKind::Multiclass,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Property::ALL.iter().map(|p| p.name()).collect();
                Error::config(format!(
                    "unknown property `{s}` (known: {})",
                    known.join(", ")
                ))
            })
    }
}

/// A failed check, reproducible from its seed and property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub seed: u64,
    pub property: String,
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationResult {
    pub property: String,
    pub trials: usize,
    /// Trials whose instance met the property's hypotheses.
    pub evaluated: usize,
    pub violations: Vec<Violation>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    /// Reverses every inequality check; the harness must then report violations.
    pub inject_bug: bool,
}

struct Checker {
    seed: u64,
    property: Property,
    inject_bug: bool,
    evaluated: bool,
    violations: Vec<Violation>,
}

impl Checker {
    fn new(seed: u64, property: Property, opts: VerifyOptions) -> Self {
        Self {
            seed,
            property,
            inject_bug: opts.inject_bug,
            evaluated: false,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, check: &str, lhs: f64, rhs: f64) {
        self.violations.push(Violation {
            seed: self.seed,
            property: self.property.name().to_string(),
            check: check.to_string(),
            lhs,
            rhs,
        });
    }

    /// Records a violation unless `lhs <= rhs + tol`.
    fn leq(&mut self, check: &str, lhs: f64, rhs: f64, tol: f64) {
        self.evaluated = true;
        let ok = if self.inject_bug {
            rhs <= lhs + tol
        } else {
            lhs <= rhs + tol
        };
        if !ok {
            self.record(check, lhs, rhs);
        }
    }

    fn eq(&mut self, check: &str, lhs: f64, rhs: f64, tol: f64) {
        self.evaluated = true;
        if !((lhs - rhs).abs() <= tol) {
            self.record(check, lhs, rhs);
        }
    }
}

fn moments_positive(m: &MomentPair) -> bool {
    m.mu1 > 0.0
}

fn check_instance(property: Property, spec: &InstanceSpec, c: &mut Checker) -> Result<()> {
    match property {
        Property::TwoMarginImpliesCorrect | Property::TwoMarginIInvariance => {
            return check_confidence_vectors(property, spec, c)
        }
        Property::CantelliBase => return check_cantelli(spec, c),
        _ => {}
    }
    let (ds, ens) = generate(spec)?;
    let profiles = ens.profiles(&ds)?;
    match property {
        Property::CboundDominatesRisk => match spec.label_kind {
            LabelKind::Binary => {
                let m = margins::binary_margin(&profiles, &ds)?;
                let mp = bounds::moments(&m.values, &ds)?;
                if moments_positive(&mp) {
                    let bound = bounds::cbound(mp)?;
                    c.leq(
                        "risk <= theorem1",
                        exact_risk_binary(&ds, &ens),
                        bound,
                        INEQUALITY_TOL,
                    );
                }
            }
            LabelKind::Multiclass => {
                let m = margins::multiclass_margin(&profiles, &ds)?;
                let mp = bounds::moments(&m.values, &ds)?;
                if moments_positive(&mp) {
                    let bound = bounds::cbound(mp)?;
                    let risk = exact_risk_multiclass(&ds, &ens);
                    c.leq("risk <= theorem4", risk, bound, INEQUALITY_TOL);
                }
            }
            LabelKind::Multilabel => {
                return Err(Error::config(
                    "cbound-dominates-risk takes binary or multiclass instances",
                ))
            }
        },
        Property::Sandwich => {
            let q = ds.label_space().q() as f64;
            let lower = exact_mass_at_most(&ds, &ens, 1.0 / q);
            let risk = exact_risk_multiclass(&ds, &ens);
            let upper = exact_mass_at_most(&ds, &ens, 0.5);
            c.leq("P(M_Q <= 0) <= risk", lower, risk, 0.0);
            c.leq("risk <= P(M_2 <= 0)", risk, upper, 0.0);
        }
        Property::UnionBound => {
            let risk = exact_risk_multiclass(&ds, &ens);
            let union = bounds::union_bound(&ds, &profiles)?;
            c.leq("risk <= eq2-union", risk, union, INEQUALITY_TOL);
            if ds.label_space().q() == 2 {
                c.eq("risk == eq2-union (Q=2)", risk, union, 0.0);
            }
        }
        Property::StrengthBound => {
            let per_class = bounds::strength_moments(&ds, &profiles)?;
            if per_class.iter().all(moments_positive) {
                let bound = bounds::strength_bound(&ds, &profiles)?;
                c.leq(
                    "risk <= theorem5",
                    exact_risk_multiclass(&ds, &ens),
                    bound,
                    INEQUALITY_TOL,
                );
            }
        }
        Property::OmegaCbound => {
            let q = ds.label_space().q() as f64;
            let mut omegas = vec![2.0, 3.0, q];
            omegas.dedup();
            for omega in omegas {
                let m = margins::omega_margin(&profiles, &ds, omega)?;
                let mp = bounds::moments(&m.values, &ds)?;
                if !moments_positive(&mp) {
                    continue;
                }
                let bound = bounds::cbound(mp)?;
                let p = exact_mass_at_most(&ds, &ens, 1.0 / omega);
                c.leq(
                    &format!("P(M_{omega} <= 0) <= theorem6"),
                    p,
                    bound,
                    INEQUALITY_TOL,
                );
                if omega == 2.0 {
                    let risk = exact_risk_multiclass(&ds, &ens);
                    c.leq("risk <= theorem6(omega=2)", risk, bound, INEQUALITY_TOL);
                }
            }
        }
        Property::MultilabelCbound => {
            let two = margins::two_margin(&profiles, &ds)?;
            let mp = bounds::moments(&two.values, &ds)?;
            let risk = exact_risk_multilabel(&ds, &ens);
            let p_two = ds.mass_nonpositive(&two.values)?;
            c.leq("risk <= P(2-margin <= 0)", risk, p_two, 0.0);
            if moments_positive(&mp) {
                let bound = bounds::cbound(mp)?;
                c.leq("P(2-margin <= 0) <= theorem7", p_two, bound, INEQUALITY_TOL);
                c.leq("risk <= theorem7", risk, bound, INEQUALITY_TOL);
            }
        }
        Property::BinaryCollapse => check_binary_collapse(&ds, &ens, c)?,
        Property::TwoMarginImpliesCorrect
        | Property::TwoMarginIInvariance
        | Property::CantelliBase => unreachable!(),
    }
    Ok(())
}

/// Maps a two-class ensemble onto the binary label space: class 1 is `+1`,
/// class 2 is `-1`.
pub fn to_binary(dataset: &Dataset, ensemble: &Ensemble) -> Result<(Dataset, Ensemble)> {
    if dataset.label_space() != LabelSpace::multiclass(2)? {
        return Err(Error::config("binary mapping needs a two-class dataset"));
    }
    let sign = |c: usize| if c == 0 { 1 } else { -1 };
    let examples = dataset
        .examples()
        .iter()
        .map(|e| crate::ensemble::Example {
            features: e.features.clone(),
            target: Label::Binary(sign(class_of(&e.target))),
            weight: e.weight,
        })
        .collect();
    let map_vote = |v: &Vote| match v {
        Vote::Class(c) => Ok(Vote::Real(sign(*c) as f64)),
        other => Err(Error::config(format!(
            "cannot map vote {other:?} to binary"
        ))),
    };
    let voters = ensemble
        .voters
        .iter()
        .map(|v| match v {
            Voter::Table(votes) => Ok(Voter::Table(
                votes.iter().map(map_vote).collect::<Result<_>>()?,
            )),
            Voter::Stump {
                feature,
                threshold,
                left,
                right,
            } => Ok(Voter::Stump {
                feature: *feature,
                threshold: *threshold,
                left: map_vote(left)?,
                right: map_vote(right)?,
            }),
            Voter::RealTable(_) => Err(Error::config("real-valued voter in a two-class ensemble")),
        })
        .collect::<Result<Vec<_>>>()?;
    let ds = Dataset::new(LabelSpace::binary(), examples)?;
    let ens = Ensemble::new(LabelSpace::binary(), voters, ensemble.posterior.clone())?;
    Ok((ds, ens))
}

fn check_binary_collapse(ds: &Dataset, ens: &Ensemble, c: &mut Checker) -> Result<()> {
    if ds.label_space().q() != 2 {
        return Err(Error::config("binary-collapse takes two-class instances"));
    }
    let profiles = ens.profiles(ds)?;
    let mc = margins::multiclass_margin(&profiles, ds)?;
    let om = margins::omega_margin(&profiles, ds, 2.0)?;
    let worst = mc
        .values
        .iter()
        .zip(&om.values)
        .map(|(a, b)| (a - 2.0 * b).abs())
        .fold(0.0, f64::max);
    c.eq("max |M - 2 M_2|", worst, 0.0, EQUALITY_TOL);

    let s = bounds::sandwich_probabilities(ds, &profiles)?;
    c.eq("P(M_Q <= 0) == risk", s.lower, s.risk, 0.0);
    c.eq("risk == P(M_2 <= 0)", s.risk, s.upper, 0.0);

    let (bds, bens) = to_binary(ds, ens)?;
    let bprof = bens.profiles(&bds)?;
    let bm = margins::binary_margin(&bprof, &bds)?;
    let worst = bm
        .values
        .iter()
        .zip(&mc.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    c.eq(
        "max |binary margin - multiclass margin|",
        worst,
        0.0,
        EQUALITY_TOL,
    );
    let mm = bounds::moments(&mc.values, ds)?;
    if moments_positive(&mm) {
        let t4 = bounds::multiclass_cbound(ds, &profiles)?;
        match bounds::binary_cbound(&bds, &bprof) {
            Ok(t1) => c.eq("theorem4 == theorem1", t4, t1, EQUALITY_TOL),
            Err(_) => c.eq("theorem1 defined when theorem4 is", 0.0, 1.0, 0.0),
        }
    }
    Ok(())
}

/// Draws `spec.examples` (confidence, target) pairs. Half the targets are
/// uniform; the other half sit near the confidence vector so that positive
/// 2-margins are common.
fn random_confidences(spec: &InstanceSpec) -> Vec<(Vec<f64>, Vec<bool>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let q = spec.q;
    (0..spec.examples)
        .map(|_| {
            let target = bits_of(rng.random_range(0..1u32 << q), q);
            let conf: Vec<f64> = if rng.random::<bool>() {
                (0..q).map(|_| rng.random::<f64>()).collect()
            } else {
                let spread = rng.random::<f64>() * 0.5;
                target
                    .iter()
                    .map(|&b| {
                        let d = rng.random::<f64>() * spread;
                        if b {
                            1.0 - d
                        } else {
                            d
                        }
                    })
                    .collect()
            };
            (conf, target)
        })
        .collect()
}

fn check_confidence_vectors(
    property: Property,
    spec: &InstanceSpec,
    c: &mut Checker,
) -> Result<()> {
    if !(2..=MAX_ORACLE_LABELS).contains(&spec.q) {
        return Err(Error::config(format!(
            "confidence-vector checks need 2 <= Q <= {MAX_ORACLE_LABELS}"
        )));
    }
    for (conf, target) in random_confidences(spec) {
        match property {
            Property::TwoMarginImpliesCorrect => {
                let two = margins::two_margin_value(&conf, &target, 0);
                if two > 0.0 {
                    let correct = is_unique_nearest(&conf, &target)
                        && crate::ensemble::predict_multilabel(&conf) == target;
                    c.leq(
                        "2-margin > 0 implies nearest vector is the target",
                        1.0,
                        if correct { 1.0 } else { 0.0 },
                        0.0,
                    );
                }
            }
            Property::TwoMarginIInvariance => {
                let first = margins::two_margin_value(&conf, &target, 0);
                let worst = (1..spec.q)
                    .map(|i| (margins::two_margin_value(&conf, &target, i) - first).abs())
                    .fold(0.0, f64::max);
                c.eq(
                    "max_i |2-margin(i) - 2-margin(1)|",
                    worst,
                    0.0,
                    EQUALITY_TOL,
                );
            }
            _ => unreachable!(),
        }
    }
    Ok(())
}

/// Random finite-support variable with positive mean; checks the one-sided
/// Chebyshev inequality at zero.
fn check_cantelli(spec: &InstanceSpec, c: &mut Checker) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k = spec.examples;
    let weights = flat_simplex(&mut rng, k);
    let mut values: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut mean: f64 = weights.iter().zip(&values).map(|(w, v)| w * v).sum();
    if mean < 0.0 {
        values.iter_mut().for_each(|v| *v = -*v);
        mean = -mean;
    }
    if !(mean > 0.0) {
        return Ok(());
    }
    let var: f64 = weights
        .iter()
        .zip(&values)
        .map(|(w, v)| w * (v - mean) * (v - mean))
        .sum();
    let p: f64 = weights
        .iter()
        .zip(&values)
        .filter(|(_, v)| **v <= 0.0)
        .map(|(w, _)| w)
        .sum();
    c.leq(
        "P(Z <= 0) <= Var/(Var + mu^2)",
        p,
        var / (var + mean * mean),
        INEQUALITY_TOL,
    );
    Ok(())
}

/// Runs one property over every instance spec. Specs are evaluated in
/// parallel; results are gathered in spec order.
pub fn verify(
    property: Property,
    specs: &[InstanceSpec],
    opts: VerifyOptions,
) -> Result<VerificationResult> {
    let outcomes: Vec<Result<Checker>> = specs
        .par_iter()
        .map(|spec| {
            spec.validate()?;
            let mut checker = Checker::new(spec.seed, property, opts);
            check_instance(property, spec, &mut checker)?;
            Ok(checker)
        })
        .collect();
    let mut evaluated = 0;
    let mut violations = Vec::new();
    for outcome in outcomes {
        let checker = outcome?;
        evaluated += usize::from(checker.evaluated);
        violations.extend(checker.violations);
    }
    Ok(VerificationResult {
        property: property.name().to_string(),
        trials: specs.len(),
        evaluated,
        passed: violations.is_empty(),
        violations,
    })
}

/// Convenience wrapper taking the property by name.
pub fn verify_named(
    property: &str,
    specs: &[InstanceSpec],
    opts: VerifyOptions,
) -> Result<VerificationResult> {
    verify(property.parse()?, specs, opts)
}

/// Seeded campaign of instance specs for a property.
///
/// Class counts are drawn from `q_range` (clamped to what the property's
/// instance kind supports), voter counts from 1..=10, example counts from
/// 1..=50 and voter accuracies from [0.35, 1].
pub fn campaign(
    property: Property,
    trials: usize,
    seed: u64,
    q_range: Option<(usize, usize)>,
) -> Result<Vec<InstanceSpec>> {
    let kind = property.instance_kind();
    let (mut lo, mut hi) = q_range.unwrap_or(match kind {
        LabelKind::Multilabel => (2, MAX_ORACLE_LABELS),
        _ => (2, 5),
    });
    if property == Property::BinaryCollapse {
        lo = 2;
        hi = 2;
    }
    if kind == LabelKind::Multilabel {
        hi = hi.min(MAX_ORACLE_LABELS);
    }
    if lo < 2 || lo > hi {
        return Err(Error::config(format!("invalid class range {lo}..{hi}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..trials)
        .map(|_| InstanceSpec {
            label_kind: kind,
            seed: rng.next_u64(),
            q: rng.random_range(lo..=hi),
            voters: rng.random_range(1..=10),
            examples: rng.random_range(1..=50),
            voter_accuracy: rng.random_range(0.35..=1.0),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{full_report, BoundValue, ReportSettings};

    fn spec(kind: LabelKind, q: usize, n: usize, m: usize, seed: u64, acc: f64) -> InstanceSpec {
        InstanceSpec {
            label_kind: kind,
            q,
            voters: n,
            examples: m,
            seed,
            voter_accuracy: acc,
        }
    }

    #[test]
    fn perfect_voters_give_zero_bounds() {
        for (kind, q) in [
            (LabelKind::Binary, 2),
            (LabelKind::Multiclass, 3),
            (LabelKind::Multilabel, 4),
        ] {
            let (ds, ens) = generate(&spec(kind, q, 4, 30, 11, 1.0)).unwrap();
            let r = full_report(&ds, &ens, ReportSettings::default()).unwrap();
            assert_eq!(r.risk, 0.0);
            for (k, b) in &r.bounds {
                if let BoundValue::Defined(v) = b {
                    assert!(v.abs() < 1e-12, "{kind:?} {k} = {v}");
                }
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let s = spec(LabelKind::Multiclass, 4, 5, 20, 99, 0.6);
        assert_eq!(generate(&s).unwrap(), generate(&s).unwrap());
        let other = InstanceSpec { seed: 100, ..s };
        assert_ne!(generate(&s).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn single_voter_posterior() {
        let (_, ens) = generate(&spec(LabelKind::Multiclass, 3, 1, 5, 1, 0.5)).unwrap();
        assert_eq!(ens.posterior.weights(), &[1.0]);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(generate(&spec(LabelKind::Multiclass, 1, 1, 5, 1, 0.5)).is_err());
        assert!(generate(&spec(LabelKind::Multilabel, 7, 1, 5, 1, 0.5)).is_err());
        assert!(generate(&spec(LabelKind::Multiclass, 3, 0, 5, 1, 0.5)).is_err());
        assert!(generate(&spec(LabelKind::Multiclass, 3, 2, 0, 1, 0.5)).is_err());
        assert!(generate(&spec(LabelKind::Multiclass, 3, 2, 5, 1, 1.5)).is_err());
    }

    #[test]
    fn flat_simplex_sums_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..12 {
            let w = flat_simplex(&mut rng, n);
            assert_eq!(w.len(), n);
            assert!(w.iter().all(|x| *x >= 0.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_property_is_config_error() {
        assert!(matches!(
            verify_named("nope", &[], VerifyOptions::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn exact_risk_agrees_with_margin_risk() {
        for seed in 0..50 {
            let s = spec(LabelKind::Multiclass, 4, 6, 25, seed, 0.5);
            let (ds, ens) = generate(&s).unwrap();
            let m = margins::multiclass_margin(&ens.profiles(&ds).unwrap(), &ds).unwrap();
            assert_eq!(
                exact_risk_multiclass(&ds, &ens),
                ds.mass_nonpositive(&m.values).unwrap()
            );
        }
    }

    #[test]
    fn predict_multilabel_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in 1..=6usize {
            for _ in 0..2000 {
                let conf: Vec<f64> = (0..q).map(|_| rng.random::<f64>()).collect();
                let pred = crate::ensemble::predict_multilabel(&conf);
                let dist = |m: u32| -> f64 {
                    (0..q)
                        .map(|j| {
                            let b = if m & (1 << j) != 0 { 1.0 } else { 0.0 };
                            (conf[j] - b).powi(2)
                        })
                        .sum()
                };
                let best = (0..1u32 << q)
                    .min_by(|a, b| dist(*a).total_cmp(&dist(*b)))
                    .unwrap();
                assert_eq!(mask_of(&pred), best);
            }
        }
        // exact ties at 1/2 resolve to bit 0, which is the lowest-mask minimiser
        assert_eq!(
            crate::ensemble::predict_multilabel(&[0.5, 0.9, 0.5]),
            vec![false, true, false]
        );
    }

    #[test]
    fn injected_bug_is_detected() {
        let specs = campaign(Property::Sandwich, 20, 7, None).unwrap();
        let r = verify(
            Property::Sandwich,
            &specs,
            VerifyOptions { inject_bug: true },
        )
        .unwrap();
        assert!(!r.passed);
        assert!(r.violations.iter().all(|v| v.property == "sandwich"));
    }

    #[test]
    fn cantelli_two_point_example() {
        // Z in {0.5, 1.5} with equal mass: P(Z <= 0) = 0 <= 1 - 1/1.25 = 0.2
        let m = MomentPair {
            mu1: 1.0,
            mu2: 0.5 * 0.25 + 0.5 * 2.25,
        };
        assert!((bounds::cbound(m).unwrap() - 0.2).abs() < 1e-15);
    }
}
