//! Commands behind the `skewtor` binary. Each produces a JSON report; the text
//! format is rendered from that JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value as Json};

use crate::catalog;
use crate::checks::{self, verify_model, verify_nomizu};
use crate::clifford::bianchi_clifford_check;
use crate::curvature::CurvatureOperator;
use crate::error::{Error, Result};
use crate::exterior::Multivector;
use crate::homogeneous::{HomogeneousModel, ModelJson};
use crate::linalg;
use crate::nomizu::{bianchi1_check, NomizuData, NomizuJson};
use crate::suite;
use crate::tolerance::ToleranceConfig;
use crate::torsion::{classify, contact_structure_dim5, hermitian_from_sigma};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub tolerance: ToleranceConfig,
    pub seed: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerance: ToleranceConfig::default(),
            seed: 0,
            format: Format::Json,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Json,
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn envelope(command: &str, cfg: &RunConfig, result: Json, passed: bool) -> Outcome {
    Outcome {
        report: json!({
            "tool": "skewtor",
            "version": VERSION,
            "command": command,
            "tolerances": {"eps_coeff": cfg.tolerance.eps_coeff, "eps_rank": cfg.tolerance.eps_rank},
            "seed": cfg.seed,
            "passed": passed,
            "result": result,
        }),
        passed,
    }
}

/// Report for a command that ended in an error.
pub fn error_report(command: &str, cfg: &RunConfig, err: &Error) -> Json {
    json!({
        "tool": "skewtor",
        "version": VERSION,
        "command": command,
        "tolerances": {"eps_coeff": cfg.tolerance.eps_coeff, "eps_rank": cfg.tolerance.eps_rank},
        "seed": cfg.seed,
        "passed": false,
        "error": {"message": err.to_string(), "exit_code": err.exit_code()},
    })
}

pub fn cmd_classify(input: &str, cfg: &RunConfig) -> Result<Outcome> {
    let tol = &cfg.tolerance;
    let t: Multivector = serde_json::from_str(input)?;
    t.check_grade(3)?;
    let rep = classify(&t, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let q = linalg::random_rotation(t.dim(), &mut rng);
    let rotated = classify(&t.rotate(&q), tol)?;
    let agrees = rotated.case_label == rep.case_label;
    let mut result = json!({
        "classification": rep,
        "frame_check": {"rotated_label": rotated.case_label.as_str(), "agrees": agrees},
    });
    if t.dim() == 5 {
        result["contact"] = contact_structure_dim5(&t, tol).map(|c| serde_json::to_value(c).unwrap_or(Json::Null)).unwrap_or(Json::Null);
    }
    if t.dim() == 6 {
        result["hermitian"] = hermitian_from_sigma(&t, tol).map(|h| serde_json::to_value(h).unwrap_or(Json::Null)).unwrap_or(Json::Null);
    }
    Ok(envelope("classify", cfg, result, agrees))
}

/// Accepts a model file, a Nomizu file, or the output of `catalog build`.
pub fn cmd_verify(input: &str, cfg: &RunConfig) -> Result<Outcome> {
    let tol = &cfg.tolerance;
    let v: Json = serde_json::from_str(input)?;
    let v = match v.get("result") {
        Some(r) if r.get("model").is_some() || r.get("nomizu").is_some() => r.clone(),
        _ => v,
    };
    let mut sections = serde_json::Map::new();
    let mut all = Vec::new();
    let (model, nomizu) = if v.get("algebra").is_some() {
        (Some(v.clone()), None)
    } else if v.get("dim_V").is_some() {
        (None, Some(v.clone()))
    } else if v.get("model").is_some() || v.get("nomizu").is_some() {
        (v.get("model").filter(|m| !m.is_null()).cloned(), v.get("nomizu").filter(|m| !m.is_null()).cloned())
    } else {
        return Err(Error::Parse("expected a model (\"algebra\"), Nomizu data (\"dim_V\") or a catalog entry".into()));
    };
    if model.is_none() && nomizu.is_none() {
        return Err(Error::Parse("catalog entry carries neither a model nor Nomizu data".into()));
    }
    if let Some(m) = model {
        let mj = ModelJson::deserialize(m)?;
        let model = HomogeneousModel::from_json(&mj, tol)?;
        let c = verify_model(&model, tol)?;
        sections.insert("model".into(), serde_json::to_value(&c)?);
        all.extend(c);
    }
    if let Some(n) = nomizu {
        let nj = NomizuJson::deserialize(n)?;
        let d = NomizuData::from_json(&nj)?;
        let c = verify_nomizu(&d, tol)?;
        sections.insert("nomizu".into(), serde_json::to_value(&c)?);
        all.extend(c);
    }
    let passed = checks::all_pass(&all);
    Ok(envelope("verify", cfg, Json::Object(sections), passed))
}

#[derive(Deserialize)]
struct BianchiInput {
    #[serde(rename = "T")]
    t: Multivector,
    #[serde(rename = "R")]
    r: CurvatureOperator,
}

/// First Bianchi identity for a pair (T, R), classically and in the Clifford algebra.
pub fn cmd_bianchi(input: &str, cfg: &RunConfig) -> Result<Outcome> {
    let tol = &cfg.tolerance;
    let v: Json = serde_json::from_str(input)?;
    let b = BianchiInput::deserialize(v)?;
    b.t.check_grade(3)?;
    if b.t.dim() != b.r.dim() {
        return Err(Error::DimensionMismatch(b.t.dim(), b.r.dim()));
    }
    let classical = bianchi1_check(&b.t, &b.r, tol)?;
    let clifford = bianchi_clifford_check(&b.t, &b.r, tol)?;
    let agree = classical.passes == clifford.is_scalar;
    let result = json!({
        "classical": classical,
        "clifford": clifford,
        "criteria_agree": agree,
    });
    Ok(envelope("bianchi", cfg, result, classical.passes && clifford.is_scalar))
}

pub fn cmd_catalog_list(cfg: &RunConfig) -> Result<Outcome> {
    let result = json!({
        "families": catalog::FAMILIES,
        "perturbations": catalog::PERTURBATIONS,
    });
    Ok(envelope("catalog list", cfg, result, true))
}

/// Parses `k=v` pairs.
pub fn parse_params(items: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in items {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("parameter '{item}' is not of the form key=value")))?;
        let x: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("parameter '{k}' has non-numeric value '{v}'")))?;
        if out.insert(k.trim().to_string(), x).is_some() {
            return Err(Error::Parse(format!("parameter '{k}' given twice")));
        }
    }
    Ok(out)
}

pub fn cmd_catalog_build(name: &str, params: &[String], cfg: &RunConfig) -> Result<Outcome> {
    let p = parse_params(params)?;
    let entry = catalog::build(name, &p, &cfg.tolerance)?;
    let passed = entry.all_pass();
    Ok(envelope("catalog build", cfg, entry.to_json(), passed))
}

pub fn cmd_suite(samples: usize, cfg: &RunConfig) -> Result<Outcome> {
    let items = suite::run_suite(&cfg.tolerance, cfg.seed, samples)?;
    let passed = items.iter().all(|i| i.passed);
    Ok(envelope("suite", cfg, json!({ "samples": samples, "items": items }), passed))
}

/// Pretty JSON or an indented key/value rendering of the same data.
pub fn render(report: &Json, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            text(report, 0, &mut s);
            s
        }
    }
}

fn scalar(v: &Json) -> Option<String> {
    match v {
        Json::Null => Some("-".into()),
        Json::Bool(b) => Some(b.to_string()),
        Json::Number(n) => Some(n.to_string()),
        Json::String(s) => Some(s.clone()),
        Json::Array(a) if a.iter().all(|x| matches!(x, Json::Number(_) | Json::Bool(_) | Json::Null)) => {
            Some(format!("[{}]", a.iter().map(|x| scalar(x).unwrap_or_default()).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn text(v: &Json, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Json::Object(map) => {
            for (k, x) in map {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        text(x, depth + 1, out);
                    }
                }
            }
        }
        Json::Array(items) => {
            for x in items {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        text(x, depth + 1, out);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}
