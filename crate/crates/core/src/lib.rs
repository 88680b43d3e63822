//! Margins, margin moments and C-bounds for binary, multiclass and
//! multi-label weighted majority votes, with a brute-force verification
//! harness and a posterior minimizer for the omega-margin C-bound.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod margins;
pub mod minimizer;
pub mod oracle;
pub mod report;

pub use bounds::{full_report, BoundReport, BoundValue, MomentPair, ReportSettings};
pub use ensemble::{
    aggregate, predict_multiclass, predict_multilabel, risk, Dataset, Ensemble, Example, Label,
    LabelKind, LabelSpace, Posterior, Vote, VoteProfile, Voter,
};
pub use error::{Error, Result};
pub use margins::{MarginKind, MarginVector};
pub use minimizer::{minimize, MinimizeConfig, MinimizeResult};
pub use oracle::{generate, verify, InstanceSpec, Property, VerificationResult};
