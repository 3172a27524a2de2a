//! JSON encodings for vectors, operators and assemblages.

use serde_json::{json, Map, Value};

use crate::compose::SeparableDecomposition;
use crate::error::{Error, Result};
use crate::hermitian::{operator_to_vector, vector_to_operator, HermitianMatrix};
use crate::steering::{AsmIndex, Assemblage, Scenario};
use crate::system::SystemType;
use crate::vector::GptVector;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn rows(v: &Value, what: &str) -> Result<Vec<Vec<f64>>> {
    serde_json::from_value(v.clone()).map_err(|e| parse_err(format!("{what}: {e}")))
}

/// `{"re": [[..]], "im": [[..]]}`; `im` defaults to zero.
pub fn matrix_to_json(m: &HermitianMatrix) -> Value {
    let d = m.dim();
    let re: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| m.matrix()[(i, j)].re).collect()).collect();
    let im: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| m.matrix()[(i, j)].im).collect()).collect();
    json!({ "re": re, "im": im })
}

pub fn matrix_from_json(v: &Value) -> Result<HermitianMatrix> {
    let re = rows(v.get("re").ok_or_else(|| parse_err("matrix needs \"re\""))?, "re")?;
    let im = match v.get("im") {
        Some(x) => rows(x, "im")?,
        None => vec![vec![0.0; re.len()]; re.len()],
    };
    HermitianMatrix::from_parts(&re, &im)
}

/// Accepts `{"system", "coeffs"}` or, for all-quantum systems,
/// `{"system", "matrix": {"re", "im"}}`.
pub fn vector_from_json(v: &Value) -> Result<GptVector> {
    let system: SystemType = serde_json::from_value(
        v.get("system").cloned().ok_or_else(|| parse_err("vector needs \"system\""))?,
    )
    .map_err(|e| parse_err(format!("system: {e}")))?;
    match (v.get("coeffs"), v.get("matrix")) {
        (Some(c), None) => {
            let coeffs: Vec<f64> = serde_json::from_value(c.clone()).map_err(|e| parse_err(format!("coeffs: {e}")))?;
            GptVector::new(system, coeffs)
        }
        (None, Some(m)) => operator_to_vector(&system, &matrix_from_json(m)?),
        _ => Err(parse_err("vector needs exactly one of \"coeffs\" and \"matrix\"")),
    }
}

pub fn vector_to_json(v: &GptVector) -> Value {
    serde_json::to_value(v).expect("vectors serialize")
}

/// An effect, optionally `{"effect": .., "certificate": [{"weight", "factors"}]}`.
pub fn effect_input_from_json(v: &Value) -> Result<(GptVector, Option<SeparableDecomposition>)> {
    match v.get("effect") {
        Some(e) => {
            let effect = vector_from_json(e)?;
            let cert = match v.get("certificate") {
                None | Some(Value::Null) => None,
                Some(c) => {
                    let terms = c.as_array().ok_or_else(|| parse_err("certificate must be a list"))?;
                    let mut out = Vec::with_capacity(terms.len());
                    for t in terms {
                        let weight = t
                            .get("weight")
                            .and_then(Value::as_f64)
                            .ok_or_else(|| parse_err("certificate term needs a numeric \"weight\""))?;
                        let factors = t
                            .get("factors")
                            .and_then(Value::as_array)
                            .ok_or_else(|| parse_err("certificate term needs \"factors\""))?
                            .iter()
                            .map(vector_from_json)
                            .collect::<Result<Vec<_>>>()?;
                        out.push(crate::compose::SeparableTerm { weight, factors });
                    }
                    Some(out)
                }
            };
            Ok((effect, cert))
        }
        None => Ok((vector_from_json(v)?, None)),
    }
}

fn scenario_name(s: Scenario) -> &'static str {
    match s {
        Scenario::Bipartite => "bipartite",
        Scenario::Multipartite(_) => "multipartite",
        Scenario::BobWithInput => "bob-with-input",
        Scenario::Instrumental => "instrumental",
    }
}

pub fn assemblage_to_json(asm: &Assemblage) -> Value {
    let mut elements = Map::new();
    for (idx, e) in asm.iter() {
        let m = vector_to_operator(e).expect("quantum element");
        elements.insert(idx.to_string(), matrix_to_json(&m));
    }
    json!({
        "scenario": scenario_name(asm.scenario()),
        "outcomes": asm.outcomes(),
        "settings": asm.settings(),
        "elements": Value::Object(elements),
    })
}

pub fn assemblage_from_json(v: &Value, tol: f64) -> Result<Assemblage> {
    let list = |key: &str| -> Result<Vec<usize>> {
        serde_json::from_value(v.get(key).cloned().ok_or_else(|| parse_err(format!("assemblage needs {key:?}")))?)
            .map_err(|e| parse_err(format!("{key}: {e}")))
    };
    let outcomes = list("outcomes")?;
    let settings = list("settings")?;
    let scenario = match v.get("scenario").and_then(Value::as_str) {
        Some("bipartite") => Scenario::Bipartite,
        Some("multipartite") => Scenario::Multipartite(outcomes.len()),
        Some("bob-with-input") => Scenario::BobWithInput,
        Some("instrumental") => Scenario::Instrumental,
        other => return Err(parse_err(format!("unknown scenario {other:?}"))),
    };
    let elements = v
        .get("elements")
        .and_then(Value::as_object)
        .ok_or_else(|| parse_err("assemblage needs an \"elements\" object"))?;
    let mut parsed = std::collections::HashMap::new();
    for (k, m) in elements {
        let idx: AsmIndex = k.parse()?;
        let h = matrix_from_json(m)?;
        parsed.insert(idx, crate::hermitian::hermitian_to_vector(&h));
    }
    let expected: usize = outcomes.iter().product::<usize>() * settings.iter().product::<usize>();
    if parsed.len() != expected {
        return Err(parse_err(format!("expected {expected} elements, found {}", parsed.len())));
    }
    Assemblage::from_fn(scenario, outcomes, settings, tol, |idx| {
        parsed
            .get(idx)
            .cloned()
            .ok_or_else(|| parse_err(format!("missing element {idx}")))
    })
}
