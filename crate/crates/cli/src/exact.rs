//! Exact threshold arithmetic for the `lambda0` subcommand.

use anyhow::{anyhow, bail, Context, Result};
use berezin::rootdata::{lambda0, projective_range_bounds, symmetric_root_data, RootSystemData, SymmetricDomainParams};
use berezin::Rational64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::SCHEMA_VERSION;

fn to_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

const MAX_DENOMINATOR: i64 = 10_000;

/// The rational with a small denominator that rounds to `x`, if any.
fn rational(x: f64) -> Option<Rational64> {
    let r = Rational64::approximate_float(x)?;
    (to_f64(&r) == x && *r.denom() <= MAX_DENOMINATOR).then_some(r)
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    if let Ok(r) = s.parse::<Rational64>() {
        return Ok(r);
    }
    let x: f64 = s.parse().with_context(|| format!("{s:?} is not a number"))?;
    rational(x).ok_or_else(|| anyhow!("{s:?} has no exact rational form"))
}

fn to_exact(rd: &RootSystemData<f64>) -> Option<RootSystemData<Rational64>> {
    let conv = |v: &[f64]| v.iter().map(|&x| rational(x)).collect::<Option<Vec<_>>>();
    Some(RootSystemData {
        r: rd.r,
        p: rd.p.clone(),
        q: rd.q.clone(),
        b: conv(&rd.b)?,
        gamma: conv(&rd.gamma)?,
    })
}

/// `λ₀` as an exact fraction when every input is a small rational.
pub fn exact_lambda0(rd: &RootSystemData<f64>) -> Option<String> {
    to_exact(rd).and_then(|e| lambda0(&e).ok()).map(|l| l.to_string())
}

/// Parses `r=2,a=1,b=0`; `a` defaults to 0.
pub fn parse_symmetric(text: &str) -> Result<SymmetricDomainParams<Rational64>> {
    let (mut r, mut a, mut b) = (None, None, None);
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected key=value, got {part:?}"))?;
        match key.trim() {
            "r" => {
                r = Some(
                    value
                        .trim()
                        .parse::<usize>()
                        .with_context(|| format!("rank {value:?}"))?,
                )
            }
            "a" => a = Some(parse_rational(value)?),
            "b" => b = Some(parse_rational(value)?),
            other => bail!("unknown parameter {other:?}"),
        }
    }
    Ok(SymmetricDomainParams {
        r: r.ok_or_else(|| anyhow!("missing r"))?,
        a: a.unwrap_or_else(|| Rational64::from_integer(0)),
        b: b.ok_or_else(|| anyhow!("missing b"))?,
    })
}

#[derive(Serialize)]
struct RangeOut {
    c0: f64,
    c0_exact: Option<String>,
    discrete_candidates: Vec<f64>,
}

fn report_exact(source: &str, rd: &RootSystemData<Rational64>) -> Result<Value> {
    let l0 = lambda0(rd)?;
    let range = projective_range_bounds(rd)?;
    let as_f64 = RootSystemData {
        r: rd.r,
        p: rd.p.clone(),
        q: rd.q.clone(),
        b: rd.b.iter().map(to_f64).collect(),
        gamma: rd.gamma.iter().map(to_f64).collect(),
    };
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "source": source,
        "root_data": as_f64,
        "lambda0": to_f64(&l0),
        "lambda0_exact": l0.to_string(),
        "projective_range": RangeOut {
            c0: to_f64(&range.c0),
            c0_exact: Some(range.c0.to_string()),
            discrete_candidates: range.discrete_candidates.iter().map(to_f64).collect(),
        },
    }))
}

pub fn lambda0_from_symmetric(text: &str) -> Result<Value> {
    let params = parse_symmetric(text)?;
    let rd = symmetric_root_data(&params)?;
    report_exact("symmetric", &rd)
}

pub fn lambda0_from_root_data(text: &str) -> Result<Value> {
    let rd: RootSystemData<f64> = serde_json::from_str(text).context("parsing root data")?;
    rd.validate()?;
    if let Some(exact) = to_exact(&rd) {
        return report_exact("root-data", &exact);
    }
    let l0 = lambda0(&rd)?;
    let range = projective_range_bounds(&rd)?;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "source": "root-data",
        "root_data": rd,
        "lambda0": l0,
        "lambda0_exact": Value::Null,
        "projective_range": RangeOut {
            c0: range.c0,
            c0_exact: None,
            discrete_candidates: range.discrete_candidates,
        },
    }))
}
