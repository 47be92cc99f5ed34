//! The `nth` subcommand: a job from flags or a JSON file, one term out.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use linrec::seqterm::{self, AlgoTag};
use linrec::{BigIndex, Error, FieldCtx, Fp, Recurrence};

use crate::error::CliError;

/// Algorithm choice as accepted on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgoChoice {
    Auto,
    Forced(AlgoTag),
}

impl FromStr for AlgoChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(AlgoChoice::Auto),
            other => other.parse().map(AlgoChoice::Forced),
        }
    }
}

/// A job with every number still in decimal form.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub modulus: String,
    pub coeffs: Vec<String>,
    pub init: Vec<String>,
    pub index: String,
    #[serde(default = "default_algo")]
    pub algo: String,
    #[serde(default)]
    pub seed: Option<Seed>,
}

fn default_algo() -> String {
    "auto".to_owned()
}

/// JSON seeds may be numbers or decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum Seed {
    Number(u64),
    Text(String),
}

impl JobSpec {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::validation("input", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::validation("input", e))
    }

    fn seed(&self) -> Result<u64, CliError> {
        match &self.seed {
            None => Ok(0),
            Some(Seed::Number(n)) => Ok(*n),
            Some(Seed::Text(s)) => s
                .trim()
                .parse()
                .map_err(|_| CliError::validation("seed", format!("`{s}` is not a 64-bit unsigned integer"))),
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub value: Fp,
    pub algo: AlgoTag,
    pub counts: linrec::OpCounts,
}

fn parse_element(ctx: &FieldCtx, field: &'static str, s: &str) -> Result<Fp, CliError> {
    let t = s.trim();
    let (negative, digits) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let big: BigIndex = digits
        .parse()
        .map_err(|_| CliError::validation(field, format!("`{s}` is not a decimal integer")))?;
    let v = ctx.from_big(&big);
    Ok(if negative { ctx.neg(v) } else { v })
}

pub fn run(spec: &JobSpec) -> Result<Outcome, CliError> {
    let ctx = FieldCtx::from_decimal(&spec.modulus)
        .map_err(|e| CliError::validation("modulus", e))?;
    let ctx = FieldCtx::with_counters(ctx.modulus()).expect("modulus already validated");
    if spec.coeffs.is_empty() {
        return Err(CliError::validation("coeffs", "at least one coefficient is required"));
    }
    if spec.coeffs.len() != spec.init.len() {
        return Err(CliError::validation(
            "init",
            format!("expected {} values, got {}", spec.coeffs.len(), spec.init.len()),
        ));
    }
    let coeffs = spec
        .coeffs
        .iter()
        .map(|s| parse_element(&ctx, "coeffs", s))
        .collect::<Result<Vec<_>, _>>()?;
    let init = spec
        .init
        .iter()
        .map(|s| parse_element(&ctx, "init", s))
        .collect::<Result<Vec<_>, _>>()?;
    let index: BigIndex = spec.index.parse().map_err(|_| {
        CliError::validation("index", format!("`{}` is not a nonnegative decimal integer", spec.index))
    })?;
    let choice: AlgoChoice = spec
        .algo
        .parse()
        .map_err(|e: String| CliError::validation("algo", e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed()?);
    let rec = Recurrence::new(&ctx, coeffs, init).map_err(|e| CliError::validation("coeffs", e))?;

    ctx.reset_counters();
    let (value, algo) = match choice {
        AlgoChoice::Auto => seqterm::nth_term_auto(&rec, &index, &mut rng),
        AlgoChoice::Forced(tag) => seqterm::nth_term_with(&rec, &index, tag, &mut rng).map(|v| (v, tag)),
    }
    .map_err(|e| match e {
        Error::FastPathUnavailable(_) => CliError::FastPathUnavailable(e.to_string()),
        Error::IndexTooLarge { .. } => CliError::validation("index", e),
        other => CliError::Internal(other.to_string()),
    })?;
    Ok(Outcome {
        value,
        algo,
        counts: ctx.counts(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(modulus: &str, coeffs: &[&str], init: &[&str], index: &str, algo: &str) -> JobSpec {
        JobSpec {
            modulus: modulus.into(),
            coeffs: coeffs.iter().map(|s| s.to_string()).collect(),
            init: init.iter().map(|s| s.to_string()).collect(),
            index: index.into(),
            algo: algo.into(),
            seed: None,
        }
    }

    #[test]
    fn fibonacci_and_initial_value() {
        assert_eq!(run(&spec("101", &["1", "1"], &["0", "1"], "10", "auto")).unwrap().value.value(), 55);
        assert_eq!(run(&spec("101", &["2"], &["1"], "0", "auto")).unwrap().value.value(), 1);
    }

    #[test]
    fn values_reduce_and_negate() {
        let a = run(&spec("101", &["102", "-100"], &["0", "1"], "10", "naive")).unwrap();
        assert_eq!(a.value.value(), 55);
    }

    #[test]
    fn validation_names_the_field() {
        let e = run(&spec("100", &["1"], &["1"], "3", "auto")).unwrap_err();
        assert!(matches!(e, CliError::Validation { field: "modulus", .. }));
        let e = run(&spec("101", &["1", "1"], &["1"], "3", "auto")).unwrap_err();
        assert!(matches!(e, CliError::Validation { field: "init", .. }));
        let e = run(&spec("101", &["x"], &["1"], "3", "auto")).unwrap_err();
        assert!(matches!(e, CliError::Validation { field: "coeffs", .. }));
        let e = run(&spec("101", &["1"], &["1"], "-3", "auto")).unwrap_err();
        assert!(matches!(e, CliError::Validation { field: "index", .. }));
        let e = run(&spec("101", &["1"], &["1"], "3", "fast")).unwrap_err();
        assert!(matches!(e, CliError::Validation { field: "algo", .. }));
    }

    #[test]
    fn forced_factored_reports_unavailability() {
        let e = run(&spec("101", &["0", "1"], &["1", "1"], "100", "factored")).unwrap_err();
        assert!(matches!(e, CliError::FastPathUnavailable(_)));
    }

    #[test]
    fn json_seed_accepts_numbers_and_strings() {
        let a: JobSpec = serde_json::from_str(
            r#"{"modulus":"101","coeffs":["1"],"init":["1"],"index":"5","algo":"auto","seed":42}"#,
        )
        .unwrap();
        let b: JobSpec = serde_json::from_str(
            r#"{"modulus":"101","coeffs":["1"],"init":["1"],"index":"5","seed":"42"}"#,
        )
        .unwrap();
        assert_eq!(a.seed().unwrap(), 42);
        assert_eq!(b.seed().unwrap(), 42);
        assert_eq!(b.algo, "auto");
    }
}
