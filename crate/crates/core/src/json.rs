//! JSON encodings. Rationals are always the string "p/q"; cyclotomic values
//! are `{"order": n, "coeffs": [...]}` in the power basis of ζ_n and numeric
//! values `{"re": "...", "im": "..."}` as decimal strings.

use rug::{Float, Rational};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::classify::{Check, RankReport};
use crate::construct::SamplePoint;
use crate::poly::{parse_poly, CurvePath, HomogPoly};
use crate::scalar::complex::BigComplex;
use crate::scalar::cyclotomic::{Cyclotomic, CyclotomicField};
use crate::scalar::{parse_rational, rational_to_string, Exactness, Scalar};
use crate::schemes::{CurveWitness, JetComponent, JetScheme, SchemeType};
use crate::sylvester::BinaryDecomposition;
use crate::witness::{Decomposition, PlaneBound, Term, VerifyReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("bad JSON: {0}")]
pub struct JsonError(pub String);

fn bad(what: impl Into<String>) -> JsonError {
    JsonError(what.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, JsonError> {
    v.get(key).ok_or_else(|| bad(format!("missing {key:?}")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, JsonError> {
    v.as_array().ok_or_else(|| bad(format!("{what} is not an array")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize, JsonError> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| bad(format!("{what} is not a natural number")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str, JsonError> {
    v.as_str().ok_or_else(|| bad(format!("{what} is not a string")))
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(rational_to_string(r))
}

pub fn rational_from_json(v: &Value) -> Result<Rational, JsonError> {
    parse_rational(as_str(v, "rational")?).map_err(|e| bad(e.to_string()))
}

fn rationals_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

fn rationals_from_json(v: &Value) -> Result<Vec<Rational>, JsonError> {
    as_array(v, "rational vector")?.iter().map(rational_from_json).collect()
}

fn float_to_string(x: &Float) -> String {
    x.to_string_radix(10, None)
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Rational(r) => rational_to_json(r),
        Scalar::Cyclotomic(c) => json!({
            "order": c.order(),
            "coeffs": rationals_to_json(&c.coeffs()),
        }),
        Scalar::Complex(z) => json!({
            "re": float_to_string(&z.re),
            "im": float_to_string(&z.im),
            "precision": z.prec(),
        }),
    }
}

pub fn scalar_from_json(v: &Value) -> Result<Scalar, JsonError> {
    if v.is_string() {
        return rational_from_json(v).map(Scalar::Rational);
    }
    if let Some(order) = v.get("order") {
        let order = as_usize(order, "order")? as u32;
        if order == 0 {
            return Err(bad("order 0"));
        }
        let coeffs = rationals_from_json(field(v, "coeffs")?)?;
        let k = CyclotomicField::new(order);
        let c = Cyclotomic::from_coeffs(&k, &coeffs)
            .ok_or_else(|| bad("coefficient count does not match the field degree"))?;
        return Ok(Scalar::from(c));
    }
    let prec = v.get("precision").and_then(Value::as_u64).unwrap_or(256) as u32;
    let parse = |key: &str| -> Result<Float, JsonError> {
        let s = as_str(field(v, key)?, key)?;
        Float::parse(s)
            .map(|p| Float::with_val(prec, p))
            .map_err(|e| bad(e.to_string()))
    };
    Ok(Scalar::Complex(BigComplex::new(parse("re")?, parse("im")?)))
}

fn scalars_to_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar_to_json).collect())
}

fn scalars_from_json(v: &Value) -> Result<Vec<Scalar>, JsonError> {
    as_array(v, "scalar vector")?.iter().map(scalar_from_json).collect()
}

pub fn scheme_to_json(a: &JetScheme) -> Value {
    let comps: Vec<Value> = a
        .components
        .iter()
        .map(|c| {
            json!({
                "length": c.length,
                "path": c.path.points.iter().map(|p| rationals_to_json(p)).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "m": a.m, "components": comps })
}

pub fn scheme_from_json(v: &Value) -> Result<JetScheme, JsonError> {
    let m = as_usize(field(v, "m")?, "m")?;
    let comps = as_array(field(v, "components")?, "components")?
        .iter()
        .map(|c| {
            let length = as_usize(field(c, "length")?, "length")?;
            let points = as_array(field(c, "path")?, "path")?
                .iter()
                .map(rationals_from_json)
                .collect::<Result<Vec<_>, _>>()?;
            let path = CurvePath::new(points).map_err(|e| bad(e.to_string()))?;
            JetComponent::new(path, length).map_err(|e| bad(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    JetScheme::new(m, comps).map_err(|e| bad(e.to_string()))
}

pub fn poly_from_json(v: &Value, nvars: Option<usize>) -> Result<HomogPoly, JsonError> {
    parse_poly(as_str(v, "f")?, nvars).map_err(|e| bad(e.to_string()))
}

pub fn sample_to_json(sp: &SamplePoint) -> Value {
    let mut v = scheme_to_json(&sp.scheme);
    let obj = v.as_object_mut().expect("scheme object");
    obj.insert("type".into(), Value::String(sp.scheme.scheme_type().to_string()));
    obj.insert("d".into(), json!(sp.d));
    obj.insert(
        "coefficients".into(),
        Value::Array(sp.coefficients.iter().map(|c| rationals_to_json(c)).collect()),
    );
    obj.insert("f".into(), Value::String(sp.f.to_string()));
    obj.insert("seed".into(), json!(sp.seed));
    v
}

pub fn sample_from_json(v: &Value) -> Result<SamplePoint, JsonError> {
    let scheme = scheme_from_json(v)?;
    let d = as_usize(field(v, "d")?, "d")? as u32;
    let coefficients = as_array(field(v, "coefficients")?, "coefficients")?
        .iter()
        .map(rationals_from_json)
        .collect::<Result<Vec<_>, _>>()?;
    let f = poly_from_json(field(v, "f")?, Some(scheme.m + 1))?;
    let seed = field(v, "seed")?.as_u64().ok_or_else(|| bad("seed"))?;
    Ok(SamplePoint { f, scheme, coefficients, seed, d })
}

fn residual_to_json(r: Option<f64>) -> Value {
    match r {
        Some(x) => Value::String(format!("{x:e}")),
        None => Value::Null,
    }
}

fn residual_from_json(v: Option<&Value>) -> Result<Option<f64>, JsonError> {
    match v {
        None | Some(Value::Null) => Ok(None),
        Some(x) => as_str(x, "residual")?
            .parse()
            .map(Some)
            .map_err(|_| bad("residual is not a number")),
    }
}

fn exactness_from_json(v: &Value) -> Result<Exactness, JsonError> {
    match as_str(v, "exactness")? {
        "rational" => Ok(Exactness::Rational),
        "cyclotomic" => Ok(Exactness::Cyclotomic),
        "numeric" => Ok(Exactness::Numeric),
        s => Err(bad(format!("unknown exactness {s:?}"))),
    }
}

pub fn decomposition_to_json(dec: &Decomposition) -> Value {
    let terms: Vec<Value> = dec
        .terms
        .iter()
        .map(|t| {
            json!({
                "lambda": scalar_to_json(&t.lambda),
                "linear_form": scalars_to_json(&t.form),
                "structure": t.label.to_string(),
            })
        })
        .collect();
    json!({
        "terms": terms,
        "exactness": dec.exactness.as_str(),
        "residual": residual_to_json(dec.residual),
    })
}

pub fn decomposition_from_json(v: &Value) -> Result<Decomposition, JsonError> {
    let terms = as_array(field(v, "terms")?, "terms")?
        .iter()
        .map(|t| {
            Ok(Term {
                lambda: scalar_from_json(field(t, "lambda")?)?,
                form: scalars_from_json(field(t, "linear_form")?)?,
                label: as_str(field(t, "structure")?, "structure")?.parse().map_err(bad)?,
            })
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    Ok(Decomposition {
        terms,
        exactness: exactness_from_json(field(v, "exactness")?)?,
        residual: residual_from_json(v.get("residual"))?,
    })
}

pub fn binary_decomposition_to_json(dec: &BinaryDecomposition) -> Value {
    let terms: Vec<Value> = dec
        .pairs
        .iter()
        .map(|(l, f)| json!({ "lambda": scalar_to_json(l), "linear_form": scalars_to_json(f) }))
        .collect();
    json!({
        "terms": terms,
        "exactness": dec.exactness.as_str(),
        "residual": residual_to_json(dec.residual),
    })
}

pub fn binary_decomposition_from_json(v: &Value) -> Result<BinaryDecomposition, JsonError> {
    let pairs = as_array(field(v, "terms")?, "terms")?
        .iter()
        .map(|t| {
            let form = scalars_from_json(field(t, "linear_form")?)?;
            let [a, b]: [Scalar; 2] = form.try_into().map_err(|_| bad("binary form needs 2 entries"))?;
            Ok((scalar_from_json(field(t, "lambda")?)?, [a, b]))
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    Ok(BinaryDecomposition {
        pairs,
        exactness: exactness_from_json(field(v, "exactness")?)?,
        residual: residual_from_json(v.get("residual"))?,
    })
}

const CHECK_NAMES: [&str; 4] = ["independence", "membership", "minimality", "border_rank_5"];

pub fn rank_report_to_json(r: &RankReport) -> Value {
    let mut checks = Map::new();
    for c in &r.checks {
        checks.insert(c.name.to_string(), Value::Bool(c.passed));
    }
    json!({
        "type": r.scheme_type.to_string(),
        "rank": r.rank,
        "d": r.d,
        "essential_vars": r.essential,
        "scheme": scheme_to_json(&r.scheme),
        "checks": checks,
    })
}

pub fn rank_report_from_json(v: &Value) -> Result<RankReport, JsonError> {
    let scheme_type: SchemeType = as_str(field(v, "type")?, "type")?
        .parse()
        .map_err(|e: crate::schemes::SchemeError| bad(e.to_string()))?;
    let rank = match field(v, "rank")? {
        Value::Null => None,
        x => Some(as_usize(x, "rank")?),
    };
    let checks_v = field(v, "checks")?;
    let checks = CHECK_NAMES
        .iter()
        .map(|&name| {
            Ok(Check {
                name,
                passed: field(checks_v, name)?.as_bool().ok_or_else(|| bad(name))?,
            })
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    Ok(RankReport {
        scheme_type,
        rank,
        scheme: scheme_from_json(field(v, "scheme")?)?,
        essential: as_usize(field(v, "essential_vars")?, "essential_vars")?,
        d: as_usize(field(v, "d")?, "d")? as u32,
        checks,
    })
}

pub fn verify_report_to_json(r: &VerifyReport) -> Value {
    json!({
        "ok": r.ok,
        "residual": format!("{:e}", r.residual),
        "reason": r.reason,
    })
}

pub fn curve_witness_to_json(w: &CurveWitness) -> Value {
    json!({
        "kind": w.kind.as_str(),
        "count": w.count,
        "degree": w.kind.degree(),
        "frame": w.frame.iter().map(|p| rationals_to_json(p)).collect::<Vec<_>>(),
        "equation": w.equation.as_ref().map(|e| e.to_string()),
        "incident": w.incident,
    })
}

pub fn plane_bound_to_json(b: &PlaneBound) -> Value {
    json!({
        "bound": b.bound,
        "curve_kind": b.kind.as_str(),
        "curve": b.curve.to_string(),
        "lines": b.lines.iter().map(|l| rationals_to_json(l)).collect::<Vec<_>>(),
        "line_intersection": b.line_intersection,
        "decomposition": b.decomposition.as_ref().map(decomposition_to_json),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_rank;
    use crate::construct::{canonical_scheme, sample_point};
    use crate::sylvester::{binary_decomposition, SylvesterConfig};
    use crate::witness::decompose;

    fn roundtrip<T>(v: Value, from: impl Fn(&Value) -> Result<T, JsonError>, to: impl Fn(&T) -> Value) {
        let back = to(&from(&v).unwrap());
        assert_eq!(back, v);
        let text = serde_json::to_string(&back).unwrap();
        let again: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(again, v);
    }

    #[test]
    fn rationals_are_p_over_q() {
        assert_eq!(rational_to_json(&Rational::from(5)), json!("5/1"));
        assert_eq!(rational_to_json(&Rational::from((-3, 6))), json!("-1/2"));
        assert_eq!(rational_from_json(&json!("4/8")).unwrap(), Rational::from((1, 2)));
    }

    #[test]
    fn scalars_round_trip() {
        let k = CyclotomicField::new(5);
        let z = Scalar::from(Cyclotomic::root_of_unity(&k, 2));
        let v = scalar_to_json(&z);
        assert_eq!(scalar_from_json(&v).unwrap(), z);
        let c = Scalar::Complex(BigComplex::from_f64(0.5, -2.25, 128));
        assert_eq!(scalar_from_json(&scalar_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn sample_and_report_round_trip() {
        let a = canonical_scheme(&"2:3,2".parse().unwrap(), 4).unwrap();
        let sp = sample_point(&a, 9, 4, 100).unwrap();
        roundtrip(sample_to_json(&sp), sample_from_json, sample_to_json);
        let rep = classify_rank(&sp.f, 9, 1).unwrap();
        let v = rank_report_to_json(&rep);
        assert_eq!(v["rank"], json!(26));
        assert_eq!(v["type"], json!("2:3,2"));
        roundtrip(v, rank_report_from_json, rank_report_to_json);
    }

    #[test]
    fn decompositions_round_trip() {
        let a = canonical_scheme(&"3:2,2,1".parse().unwrap(), 4).unwrap();
        let sp = sample_point(&a, 9, 4, 100).unwrap();
        let dec = decompose(&sp, &SylvesterConfig::default()).unwrap();
        let v = decomposition_to_json(&dec);
        assert_eq!(v["terms"].as_array().unwrap().len(), 19);
        roundtrip(v, decomposition_from_json, decomposition_to_json);
        let g = parse_poly("x0^6*x1^3", None).unwrap();
        let b = binary_decomposition(&g, &SylvesterConfig::default()).unwrap().unwrap();
        roundtrip(
            binary_decomposition_to_json(&b),
            binary_decomposition_from_json,
            binary_decomposition_to_json,
        );
    }
}
