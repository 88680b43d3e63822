//! Dataset CSV and ensemble JSON formats.
//!
//! Datasets: a header row, feature columns `f0..f{d-1}`, a `label` column and
//! an optional `weight` column. Labels are `1..Q` for multiclass, `+1`/`-1`
//! for binary and a fixed-width bitstring (label 1 leftmost) for multi-label.
//!
//! Ensembles: JSON with `labelSpace`, `voters` and an optional `posterior`.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensemble::{Dataset, Ensemble, Label, LabelKind, LabelSpace, Posterior, Vote, Voter};
use crate::error::{Error, Result};

fn parse_err(source: &str, line: u64, column: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source.to_string(),
        line,
        column,
        message: message.into(),
    }
}

fn parse_bits(s: &str, q: usize) -> std::result::Result<Vec<bool>, String> {
    if s.len() != q {
        return Err(format!("bitstring `{s}` must have exactly {q} characters"));
    }
    s.chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(format!("invalid character `{other}` in bitstring `{s}`")),
        })
        .collect()
}

fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
}

fn parse_label(s: &str, space: &LabelSpace) -> std::result::Result<Label, String> {
    let s = s.trim();
    match space.kind() {
        LabelKind::Binary => match s {
            "1" | "+1" => Ok(Label::Binary(1)),
            "-1" => Ok(Label::Binary(-1)),
            _ => Err(format!("binary label must be +1 or -1, got `{s}`")),
        },
        LabelKind::Multiclass => match s.parse::<usize>() {
            Ok(c) if (1..=space.q()).contains(&c) => Ok(Label::Class(c - 1)),
            _ => Err(format!(
                "class label must be an integer in 1..={}, got `{s}`",
                space.q()
            )),
        },
        LabelKind::Multilabel => parse_bits(s, space.q()).map(Label::Bits),
    }
}

fn format_label(label: &Label) -> String {
    match label {
        Label::Binary(1) => "+1".to_string(),
        Label::Binary(_) => "-1".to_string(),
        Label::Class(c) => (c + 1).to_string(),
        Label::Bits(b) => format_bits(b),
    }
}

/// Reads a dataset CSV for a known label space. Weights, when present, are
/// rescaled to sum to one; otherwise every example gets equal mass.
pub fn read_dataset(reader: impl Read, source: &str, space: LabelSpace) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(source, &e))?.clone();
    let mut label_col = None;
    let mut weight_col = None;
    let mut feature_cols: Vec<(usize, usize)> = Vec::new();
    for (col, name) in headers.iter().enumerate() {
        match name {
            "label" => label_col = Some(col),
            "weight" => weight_col = Some(col),
            _ => {
                let index = name
                    .strip_prefix('f')
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| {
                        parse_err(
                            source,
                            1,
                            col as u64 + 1,
                            format!("unexpected column `{name}`"),
                        )
                    })?;
                feature_cols.push((index, col));
            }
        }
    }
    let label_col = label_col.ok_or_else(|| parse_err(source, 1, 1, "missing `label` column"))?;
    feature_cols.sort();
    if feature_cols.is_empty() || feature_cols.iter().enumerate().any(|(k, (i, _))| k != *i) {
        return Err(parse_err(
            source,
            1,
            1,
            "feature columns must be named f0, f1, ... without gaps",
        ));
    }

    let mut features = Vec::new();
    let mut targets = Vec::new();
    let mut weights = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(source, &e))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |col: usize| record.get(col).unwrap_or("");
        let number = |col: usize| -> Result<f64> {
            field(col).parse::<f64>().map_err(|_| {
                parse_err(
                    source,
                    line,
                    col as u64 + 1,
                    format!("`{}` is not a number", field(col)),
                )
            })
        };
        let row = feature_cols
            .iter()
            .map(|(_, col)| number(*col))
            .collect::<Result<Vec<_>>>()?;
        let target = parse_label(field(label_col), &space)
            .map_err(|m| parse_err(source, line, label_col as u64 + 1, m))?;
        let weight = match weight_col {
            Some(col) => {
                let w = number(col)?;
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(parse_err(
                        source,
                        line,
                        col as u64 + 1,
                        format!("weight {w} must be a finite nonnegative number"),
                    ));
                }
                w
            }
            None => 1.0,
        };
        features.push(row);
        targets.push(target);
        weights.push(weight);
    }
    Dataset::normalized(space, features, targets, weights)
}

fn csv_error(source: &str, e: &csv::Error) -> Error {
    let (line, column) = match e.kind() {
        csv::ErrorKind::UnequalLengths { pos, len, .. } => {
            (pos.as_ref().map_or(0, |p| p.line()), *len + 1)
        }
        _ => (e.position().map_or(0, |p| p.line()), 0),
    };
    parse_err(source, line, column, e.to_string())
}

/// Serializes a dataset to CSV. The weight column is written only when
/// weights are not all equal.
pub fn write_dataset(dataset: &Dataset) -> String {
    let d = dataset.feature_dim();
    let first = dataset.examples()[0].weight;
    let with_weights = dataset.weights().any(|w| w != first);
    let mut out = String::new();
    for k in 0..d {
        let _ = write!(out, "f{k},");
    }
    if with_weights {
        out.push_str("weight,");
    }
    out.push_str("label\n");
    for ex in dataset.examples() {
        for x in &ex.features {
            let _ = write!(out, "{x:?},");
        }
        if with_weights {
            let _ = write!(out, "{:?},", ex.weight);
        }
        out.push_str(&format_label(&ex.target));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelSpaceDoc {
    kind: LabelKind,
    #[serde(rename = "Q", default)]
    q: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Token {
    Int(i64),
    Bits(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
enum VoterDoc {
    #[serde(rename = "stump", rename_all = "camelCase")]
    Stump {
        feature_index: usize,
        threshold: f64,
        left_class: Token,
        right_class: Token,
    },
    #[serde(rename = "table")]
    Table { predictions: Vec<Token> },
    #[serde(rename = "realvalued-table")]
    RealTable { predictions: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EnsembleDoc {
    #[serde(rename = "labelSpace")]
    label_space: LabelSpaceDoc,
    voters: Vec<VoterDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    posterior: Option<Vec<f64>>,
}

fn token_to_vote(t: &Token, space: &LabelSpace) -> std::result::Result<Vote, String> {
    match (t, space.kind()) {
        (Token::Int(v @ (1 | -1)), LabelKind::Binary) => Ok(Vote::Real(*v as f64)),
        (Token::Int(c), LabelKind::Multiclass) if *c >= 1 && (*c as usize) <= space.q() => {
            Ok(Vote::Class(*c as usize - 1))
        }
        (Token::Bits(s), LabelKind::Multilabel) => parse_bits(s, space.q()).map(Vote::Bits),
        (t, kind) => Err(format!(
            "prediction {t:?} is not valid for a {} space with Q={}",
            kind.as_str(),
            space.q()
        )),
    }
}

fn vote_to_token(v: &Vote) -> Token {
    match v {
        Vote::Real(x) => Token::Int(if *x > 0.0 { 1 } else { -1 }),
        Vote::Class(c) => Token::Int(*c as i64 + 1),
        Vote::Bits(b) => Token::Bits(format_bits(b)),
    }
}

/// Parses an ensemble document. Table voters are checked against the
/// dataset later, in [`Ensemble::validate_against`].
pub fn parse_ensemble(text: &str, source: &str) -> Result<Ensemble> {
    let doc: EnsembleDoc = serde_json::from_str(text)
        .map_err(|e| parse_err(source, e.line() as u64, e.column() as u64, e.to_string()))?;
    let q = match doc.label_space.kind {
        LabelKind::Binary => doc.label_space.q.unwrap_or(2),
        _ => doc
            .label_space
            .q
            .ok_or_else(|| Error::config(format!("{source}: labelSpace.Q is required")))?,
    };
    let space = LabelSpace::new(doc.label_space.kind, q)?;
    let voter_err = |j: usize, m: String| Error::config(format!("{source}: voter {j}: {m}"));
    let voters = doc
        .voters
        .iter()
        .enumerate()
        .map(|(j, v)| {
            Ok(match v {
                VoterDoc::Stump {
                    feature_index,
                    threshold,
                    left_class,
                    right_class,
                } => Voter::Stump {
                    feature: *feature_index,
                    threshold: *threshold,
                    left: token_to_vote(left_class, &space).map_err(|m| voter_err(j, m))?,
                    right: token_to_vote(right_class, &space).map_err(|m| voter_err(j, m))?,
                },
                VoterDoc::Table { predictions } => Voter::Table(
                    predictions
                        .iter()
                        .map(|t| token_to_vote(t, &space))
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|m| voter_err(j, m))?,
                ),
                VoterDoc::RealTable { predictions } => Voter::RealTable(predictions.clone()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if voters.is_empty() {
        return Err(Error::config(format!("{source}: ensemble has no voters")));
    }
    let posterior = match doc.posterior {
        Some(w) => Posterior::new(w).map_err(|e| Error::config(format!("{source}: {e}")))?,
        None => Posterior::uniform(voters.len())?,
    };
    Ensemble::new(space, voters, posterior)
}

pub fn write_ensemble(ensemble: &Ensemble) -> String {
    let voters = ensemble
        .voters
        .iter()
        .map(|v| match v {
            Voter::Stump {
                feature,
                threshold,
                left,
                right,
            } => VoterDoc::Stump {
                feature_index: *feature,
                threshold: *threshold,
                left_class: vote_to_token(left),
                right_class: vote_to_token(right),
            },
            Voter::Table(votes) => VoterDoc::Table {
                predictions: votes.iter().map(vote_to_token).collect(),
            },
            Voter::RealTable(values) => VoterDoc::RealTable {
                predictions: values.clone(),
            },
        })
        .collect();
    let doc = EnsembleDoc {
        label_space: LabelSpaceDoc {
            kind: ensemble.label_space.kind(),
            q: Some(ensemble.label_space.q()),
        },
        voters,
        posterior: Some(ensemble.posterior.weights().to_vec()),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("ensemble serializes");
    s.push('\n');
    s
}

/// Loads an ensemble and the dataset it votes on, and checks they match.
pub fn load_pair(dataset_path: &Path, ensemble_path: &Path) -> Result<(Dataset, Ensemble)> {
    let text = std::fs::read_to_string(ensemble_path)?;
    let ensemble = parse_ensemble(&text, &ensemble_path.display().to_string())?;
    let file = std::fs::File::open(dataset_path)?;
    let dataset = read_dataset(
        file,
        &dataset_path.display().to_string(),
        ensemble.label_space,
    )?;
    ensemble.validate_against(&dataset)?;
    Ok((dataset, ensemble))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
