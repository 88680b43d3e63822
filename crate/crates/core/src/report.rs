//! Machine-readable reports.
//!
//! Floats are written in their shortest round-trip decimal form, so parsing a
//! report recovers every value bit for bit. Variants that do not apply, or
//! whose hypotheses fail, carry the string `"undefined"` instead of a number.

use serde_json::{json, Map, Value};

use crate::bounds::{BoundReport, BoundValue, BOUND_KEYS};
use crate::minimizer::{MinimizeConfig, MinimizeResult};
use crate::oracle::VerificationResult;

pub const UNDEFINED: &str = "undefined";
pub const TOOL_NAME: &str = "votebound";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn tool() -> Value {
    json!({ "name": TOOL_NAME, "version": TOOL_VERSION })
}

/// Margin families that always appear under `moments`.
const MOMENT_FAMILIES: [&str; 7] = [
    "binary",
    "multiclass",
    "omega",
    "omega2",
    "omegaQ",
    "multilabel",
    "twoMargin",
];

pub fn report_json(report: &BoundReport) -> Value {
    let mut moments = Map::new();
    for family in MOMENT_FAMILIES {
        moments.insert(family.to_string(), json!(UNDEFINED));
    }
    for (k, m) in &report.moments {
        moments.insert(k.clone(), json!({ "mu1": m.mu1, "mu2": m.mu2 }));
    }

    let mut probs = Map::new();
    for key in ["omega", "omega2", "omegaQ", "twoMargin"] {
        let v = report
            .margin_probabilities
            .get(key)
            .map_or(json!(UNDEFINED), |p| json!(p));
        probs.insert(key.to_string(), v);
    }

    let mut bounds = Map::new();
    let mut preconditions = Map::new();
    for key in BOUND_KEYS {
        let entry = match report.bound(key) {
            BoundValue::Defined(v) => json!({
                "value": v,
                "clipped": v.min(1.0),
                "preconditionMet": true,
            }),
            BoundValue::NotApplicable => json!({
                "value": UNDEFINED,
                "preconditionMet": false,
                "reason": format!("not applicable to {} label spaces", report.label_kind.as_str()),
            }),
            BoundValue::Undefined(reason) => json!({
                "value": UNDEFINED,
                "preconditionMet": false,
                "reason": reason,
            }),
        };
        bounds.insert(key.to_string(), entry);
        preconditions.insert(key.to_string(), json!(report.bound(key).precondition_met()));
    }

    json!({
        "tool": tool(),
        "settings": {
            "labelKind": report.label_kind.as_str(),
            "Q": report.q,
            "omega": report.settings.omega,
            "seed": report.settings.seed,
        },
        "risk": report.risk,
        "moments": Value::Object(moments),
        "marginProbabilities": Value::Object(probs),
        "bounds": Value::Object(bounds),
        "preconditions": Value::Object(preconditions),
    })
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Two-column `key,value` CSV of a JSON document, keys in document order.
pub fn to_key_value_csv(value: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", value, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        let quoted = if v.contains([',', '"', '\n']) {
            format!("\"{}\"", v.replace('"', "\"\""))
        } else {
            v
        };
        out.push_str(&k);
        out.push(',');
        out.push_str(&quoted);
        out.push('\n');
    }
    out
}

pub fn minimize_json(result: &MinimizeResult, config: &MinimizeConfig) -> Value {
    json!({
        "tool": tool(),
        "settings": {
            "omega": config.omega,
            "gridPoints": config.grid_points,
            "muGrid": config.mu_grid,
            "maxIterations": config.max_iterations,
            "tolerance": config.tolerance,
            "seed": config.seed,
        },
        "posterior": result.posterior.weights(),
        "mu": result.mu,
        "mu1": result.mu1,
        "mu2": result.mu2,
        "bound": result.bound,
        "iterations": result.iterations,
        "converged": result.converged,
        "grid": result.grid,
    })
}

pub fn verification_json(seed: u64, results: &[VerificationResult]) -> Value {
    json!({
        "tool": tool(),
        "seed": seed,
        "passed": results.iter().all(|r| r.passed),
        "results": results,
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{full_report, ReportSettings};
    use crate::ensemble::{Dataset, Ensemble, Label, LabelSpace, Posterior, Vote, Voter};

    fn sample_report() -> BoundReport {
        let ds = Dataset::uniform(
            LabelSpace::multiclass(3).unwrap(),
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![Label::Class(0), Label::Class(1), Label::Class(2)],
        )
        .unwrap();
        let voters = vec![
            Voter::Table(vec![Vote::Class(0), Vote::Class(1), Vote::Class(0)]),
            Voter::Table(vec![Vote::Class(0), Vote::Class(2), Vote::Class(2)]),
        ];
        let ens = Ensemble::new(
            ds.label_space(),
            voters,
            Posterior::new(vec![0.6, 0.4]).unwrap(),
        )
        .unwrap();
        full_report(
            &ds,
            &ens,
            ReportSettings {
                omega: 3.0,
                seed: Some(5),
            },
        )
        .unwrap()
    }

    #[test]
    fn every_bound_key_present() {
        let v = report_json(&sample_report());
        for key in BOUND_KEYS {
            assert!(v["bounds"][key].is_object(), "{key}");
        }
        assert_eq!(v["bounds"]["theorem1"]["value"], UNDEFINED);
        assert_eq!(v["bounds"]["theorem7"]["value"], UNDEFINED);
        assert_eq!(v["moments"]["twoMargin"], UNDEFINED);
        assert_eq!(v["settings"]["omega"], 3.0);
        assert_eq!(v["settings"]["seed"], 5);
    }

    #[test]
    fn floats_round_trip_exactly() {
        let r = sample_report();
        let text = to_pretty(&report_json(&r));
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["risk"].as_f64().unwrap().to_bits(), r.risk.to_bits());
        let mu1 = r.moments["multiclass"].mu1;
        assert_eq!(
            back["moments"]["multiclass"]["mu1"]
                .as_f64()
                .unwrap()
                .to_bits(),
            mu1.to_bits()
        );
    }

    #[test]
    fn csv_flattening() {
        let csv = to_key_value_csv(&report_json(&sample_report()));
        assert!(csv.starts_with("key,value\n"));
        assert!(csv.contains("bounds.theorem1.value,undefined\n"));
        assert!(csv.contains("settings.Q,3\n"));
    }
}
