//! One function per subcommand, each a pure map from resolved input to an
//! output document and a verdict.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use zariski_core::bdiv::{
    global_sections, max_nef, max_nef_verified, mobile_part, positive_part_exact, separate_all,
    verify_decomposition, BDiv, BDivError, MaxNefStrategy, VerifyOptions,
};
use zariski_core::fan::{is_nef, Fan};
use zariski_core::surface::{
    maximality_oracle, verify_certificate, zariski_decompose, SurfaceDivisor, SurfaceError, SurfaceModel,
};
use zariski_core::QMat;

use crate::input::{qs, rats, DivisorSpec, ExprSpec, FanSpec, SurfaceSpec, Q};
use crate::CliError;

pub struct Outcome {
    pub doc: Value,
    /// Whether every check in `doc` passed.
    pub ok: bool,
}

fn surface_error(e: SurfaceError) -> CliError {
    match e {
        SurfaceError::InvalidGeometry(_) => CliError::geometry(e),
        _ => CliError::input(e),
    }
}

fn bdiv_error(e: BDivError) -> CliError {
    match e {
        BDivError::NotNef | BDivError::Fan(_) => CliError::geometry(e),
        BDivError::NotBig | BDivError::UnsupportedDimension(_) => CliError::unsupported(e),
        _ => CliError::input(e),
    }
}

pub fn surface(input: &SurfaceSpec) -> Result<Outcome, CliError> {
    let m = QMat::from_rows(input.matrix.iter().map(|r| rats(r)).collect()).map_err(CliError::input)?;
    let model = SurfaceModel::new(input.curves.clone(), m).map_err(surface_error)?;
    for w in model.warnings() {
        eprintln!("warning: {w}");
    }
    let d = SurfaceDivisor::new(rats(&input.divisor));
    let dec = zariski_decompose(&model, &d).map_err(surface_error)?;
    let oracle = maximality_oracle(&model, &d).map_err(surface_error)?;
    let certificate = verify_certificate(&model, &d, &dec);
    let oracle_agrees = oracle == dec.positive;
    let c = &dec.certificate;
    let doc = json!({
        "kind": "surface",
        "input": input,
        "P": qs(&dec.positive.coeffs),
        "N": qs(&dec.negative.coeffs),
        "support": dec.support,
        "checks": {
            "certificate": certificate,
            "oracle_agrees": oracle_agrees,
            "nef_values": qs(&c.nef_values),
            "orthogonality": c.orthogonality.iter().map(|(i, x)| json!([i, Q(x.clone())])).collect::<Vec<_>>(),
            "support_negative_definite": c.support_negative_definite,
        },
        "warnings": model.warnings().iter().map(ToString::to_string).collect::<Vec<_>>(),
    });
    Ok(Outcome { doc, ok: certificate && oracle_agrees })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparateInput {
    pub fan: FanSpec,
    pub d1: DivisorSpec,
    pub d2: DivisorSpec,
}

pub fn separate(input: &SeparateInput) -> Result<Outcome, CliError> {
    let fan = input.fan.build()?;
    let (d1, d2) = (input.d1.on(&fan)?, input.d2.on(&fan)?);
    let report = separate_all(&fan, &d1, &d2).map_err(bdiv_error)?;
    let max = report.max_divisor();
    let invariants = report.invariants_hold();
    let max_nef = is_nef(&report.final_fan, &max).map_err(CliError::geometry)?;
    let doc = json!({
        "kind": "separate",
        "input": input,
        "report": report,
        "max": qs(&max.coeffs),
        "checks": { "invariants": invariants, "max_nef": max_nef },
    });
    Ok(Outcome { doc, ok: invariants && max_nef })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Hull,
    Separation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxNefInput {
    pub fan: FanSpec,
    pub d1: DivisorSpec,
    pub d2: DivisorSpec,
    pub strategy: Strategy,
    pub probe_box: i64,
    pub verify: bool,
}

pub fn max_nef_cmd(input: &MaxNefInput) -> Result<Outcome, CliError> {
    let fan = Arc::new(input.fan.build()?);
    let b1 = BDiv::closure(fan.clone(), input.d1.on(&fan)?).map_err(bdiv_error)?;
    let b2 = BDiv::closure(fan.clone(), input.d2.on(&fan)?).map_err(bdiv_error)?;
    let strategy = match input.strategy {
        Strategy::Hull => MaxNefStrategy::Hull,
        Strategy::Separation => MaxNefStrategy::Separation,
    };
    let (result, verified) = if input.verify {
        match max_nef_verified(&b1, &b2, strategy, input.probe_box) {
            Ok(b) => (b, Some(true)),
            Err(BDivError::StrategyDisagreement(v)) => {
                eprintln!("strategies disagree at {v}");
                (max_nef(&b1, &b2, strategy).map_err(bdiv_error)?, Some(false))
            }
            Err(e) => return Err(bdiv_error(e)),
        }
    } else {
        (max_nef(&b1, &b2, strategy).map_err(bdiv_error)?, None)
    };
    let vertices = polytope_vertices(&result)?;
    let values = ray_values(&result, &fan)?;
    let doc = json!({
        "kind": "max-nef",
        "input": input,
        "vertices": vertices,
        "ray_values": values,
        "checks": { "strategies_agree": verified },
    });
    Ok(Outcome { doc, ok: verified != Some(false) })
}

fn polytope_vertices(b: &BDiv) -> Result<Vec<Vec<Q>>, CliError> {
    let BDiv::PolytopeNef { polytope, .. } = b else {
        unreachable!("polytope leaf expected");
    };
    let mut vs = polytope.vertices().map_err(CliError::input)?.into_owned();
    vs.sort();
    Ok(vs.iter().map(|v| qs(v)).collect())
}

fn ray_values(b: &BDiv, fan: &Fan) -> Result<Vec<Q>, CliError> {
    fan.rays().iter().map(|r| b.value_at(r).map(Q).map_err(bdiv_error)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivePartInput {
    pub fan: FanSpec,
    pub divisor: DivisorSpec,
    pub kmax: i64,
    pub exact: bool,
}

pub fn positive_part(input: &PositivePartInput) -> Result<Outcome, CliError> {
    if input.kmax < 1 {
        return Err(CliError::input("--k must be at least 1"));
    }
    let fan = Arc::new(input.fan.build()?);
    let d = input.divisor.on(&fan)?;
    if !d.is_effective() {
        return Err(CliError::input(BDivError::NotEffective));
    }
    let dbar = BDiv::closure(fan.clone(), d.clone()).map_err(bdiv_error)?;

    let mut ok = true;
    let mut mobile = Vec::new();
    for k in 1..=input.kmax {
        match mobile_part(&fan, &d, k) {
            Ok(m) => {
                let own = global_sections(&m, k).map_err(bdiv_error)?;
                let of_d = global_sections(&dbar, k).map_err(bdiv_error)?;
                ok &= own == of_d;
                mobile.push(json!({
                    "k": k,
                    "sections": of_d.len(),
                    "traces": ray_values(&m, &fan)?,
                    "sections_equal": own == of_d,
                }));
            }
            Err(BDivError::NoSections(_)) => {
                mobile.push(json!({ "k": k, "sections": 0, "traces": Value::Null, "sections_equal": Value::Null }));
            }
            Err(e) => return Err(bdiv_error(e)),
        }
    }

    let mut doc = json!({ "kind": "positive-part", "input": input, "mobile": mobile });
    if input.exact {
        let p = positive_part_exact(&fan, &d).map_err(bdiv_error)?;
        let opts = VerifyOptions { kmax: input.kmax, ..VerifyOptions::default() };
        let report = verify_decomposition(&fan, &d, &p, &[], &opts).map_err(bdiv_error)?;
        let negative = dbar.clone().minus(p.clone()).map_err(bdiv_error)?;
        ok &= report.passed();
        doc["vertices"] = json!(polytope_vertices(&p)?);
        doc["P"] = json!(ray_values(&p, &fan)?);
        doc["N"] = json!(ray_values(&negative, &fan)?);
        doc["verification"] = json!(report);
        doc["checks"] = json!({ "passed": report.passed() });
    }
    Ok(Outcome { doc, ok })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionsInput {
    pub expression: ExprSpec,
    pub k: i64,
}

pub fn sections(input: &SectionsInput) -> Result<Outcome, CliError> {
    if input.k < 1 {
        return Err(CliError::input("--k must be at least 1"));
    }
    let b = input.expression.build()?;
    let points = global_sections(&b, input.k).map_err(bdiv_error)?;
    let doc = json!({ "kind": "sections", "input": input, "count": points.len(), "points": points });
    Ok(Outcome { doc, ok: true })
}

/// Recomputes a stored output from its embedded input.
pub fn verify(doc: &Value) -> Result<Outcome, CliError> {
    let kind = doc["kind"].as_str().ok_or_else(|| CliError::input("output has no \"kind\""))?;
    let input = doc.get("input").cloned().ok_or_else(|| CliError::input("output has no \"input\""))?;
    fn parse<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T, CliError> {
        serde_json::from_value(v).map_err(CliError::input)
    }
    let again = match kind {
        "surface" => surface(&parse(input)?)?,
        "separate" => separate(&parse(input)?)?,
        "max-nef" => max_nef_cmd(&parse(input)?)?,
        "positive-part" => positive_part(&parse(input)?)?,
        "sections" => sections(&parse(input)?)?,
        other => return Err(CliError::input(format!("unknown kind {other:?}"))),
    };
    let reproduced = again.doc == *doc;
    if !reproduced {
        eprintln!("recomputed output differs from the stored one");
    }
    Ok(Outcome {
        doc: json!({ "kind": "verify", "verified_kind": kind, "reproduced": reproduced, "checks_pass": again.ok }),
        ok: reproduced && again.ok,
    })
}
