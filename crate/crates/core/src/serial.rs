//! JSON encoding of jets, maps and forms. Coefficients are written as
//! `["numerator", "denominator"]` string pairs so nothing is rounded.

use crate::error::{Error, Result};
use crate::forms::FormJet;
use crate::jet::{Jet, Scalar};
use crate::map::MapJet;
use crate::space::VariableSpace;
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

pub fn scalar_to_json(c: &Scalar) -> Value {
    json!([c.numer().to_string(), c.denom().to_string()])
}

/// Accepts `["n", "d"]` or a string such as `"-3/4"`.
pub fn scalar_from_json(v: &Value, path: &str) -> Result<Scalar> {
    let bad = || Error::Parse(format!("{path}: expected [\"num\", \"den\"] or \"num/den\""));
    let (num, den) = match v {
        Value::Array(a) if a.len() == 2 => (
            a[0].as_str().ok_or_else(bad)?.to_string(),
            a[1].as_str().ok_or_else(bad)?.to_string(),
        ),
        Value::String(s) => match s.split_once('/') {
            Some((a, b)) => (a.trim().to_string(), b.trim().to_string()),
            None => (s.trim().to_string(), "1".to_string()),
        },
        _ => return Err(bad()),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("{path}: zero denominator")));
    }
    Ok(Scalar::new(num, den))
}

/// `{"order", "text", "terms": [[num, den, [exponents]], ...]}` in graded-lex
/// order; `text` is for reading only.
pub fn jet_to_json(j: &Jet) -> Value {
    let terms: Vec<Value> = j
        .terms()
        .into_iter()
        .map(|(e, c)| json!([c.numer().to_string(), c.denom().to_string(), e]))
        .collect();
    json!({ "order": j.order(), "text": j.to_string(), "terms": terms })
}

/// Reads a jet given either as polynomial text or in the encoded form.
/// `order` is used for text and when the object has no `order` field.
pub fn jet_from_json(v: &Value, space: VariableSpace, order: usize, path: &str) -> Result<Jet> {
    match v {
        Value::String(s) => {
            Jet::parse(space, order, s).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{path}: {m}")),
                other => other,
            })
        }
        Value::Object(o) => {
            let order = match o.get("order") {
                Some(x) => x
                    .as_u64()
                    .ok_or_else(|| Error::Parse(format!("{path}.order: expected an integer")))?
                    as usize,
                None => order,
            };
            let terms = o
                .get("terms")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("{path}.terms: expected a list")))?;
            let mut j = Jet::zero(space, order);
            for (i, t) in terms.iter().enumerate() {
                let tp = format!("{path}.terms[{i}]");
                let t = t
                    .as_array()
                    .filter(|a| a.len() == 3)
                    .ok_or_else(|| Error::Parse(format!("{tp}: expected [num, den, exponents]")))?;
                let c = scalar_from_json(&json!([t[0], t[1]]), &tp)?;
                let exps: Vec<u8> = t[2]
                    .as_array()
                    .ok_or_else(|| Error::Parse(format!("{tp}: exponents must be a list")))?
                    .iter()
                    .map(|e| e.as_u64().and_then(|e| u8::try_from(e).ok()))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::Parse(format!("{tp}: bad exponent")))?;
                if exps.len() != space.dim() {
                    return Err(Error::Parse(format!(
                        "{tp}: {} exponents for {} variables",
                        exps.len(),
                        space.dim()
                    )));
                }
                if exps.iter().map(|&e| e as usize).sum::<usize>() > order {
                    return Err(Error::Parse(format!("{tp}: degree exceeds order {order}")));
                }
                let c = c + j.coeff(&exps);
                j.set_coeff(&exps, c);
            }
            Ok(j)
        }
        _ => Err(Error::Parse(format!("{path}: expected a jet"))),
    }
}

pub fn map_to_json(m: &MapJet) -> Value {
    let comps: Vec<Value> = m.components().iter().map(jet_to_json).collect();
    json!({ "order": m.order(), "components": comps })
}

/// A list of component jets, or an object with a `components` list.
pub fn map_from_json(v: &Value, space: VariableSpace, order: usize, path: &str) -> Result<MapJet> {
    let list = match v {
        Value::Array(a) => a,
        Value::Object(o) => o
            .get("components")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse(format!("{path}.components: expected a list")))?,
        _ => return Err(Error::Parse(format!("{path}: expected a map"))),
    };
    if list.len() != space.dim() {
        return Err(Error::Parse(format!(
            "{path}: {} components for {} variables",
            list.len(),
            space.dim()
        )));
    }
    let comps = list
        .iter()
        .enumerate()
        .map(|(i, c)| jet_from_json(c, space, order, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    MapJet::endo(space, comps).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

/// `{"degree", "order", "terms": [[[indices], jet], ...]}`.
pub fn form_to_json(f: &FormJet) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .map(|(k, c)| json!([k, jet_to_json(c)]))
        .collect();
    json!({ "degree": f.degree(), "order": f.order(), "text": f.to_string(), "terms": terms })
}

pub fn form_from_json(v: &Value, space: VariableSpace, order: usize, path: &str) -> Result<FormJet> {
    let o = v
        .as_object()
        .ok_or_else(|| Error::Parse(format!("{path}: expected a form object")))?;
    let degree = o
        .get("degree")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse(format!("{path}.degree: expected an integer")))?
        as usize;
    let order = o.get("order").and_then(Value::as_u64).map_or(order, |x| x as usize);
    let terms = o
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse(format!("{path}.terms: expected a list")))?;
    let mut parsed = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        let tp = format!("{path}.terms[{i}]");
        let t = t
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Parse(format!("{tp}: expected [indices, jet]")))?;
        let idx: Vec<usize> = t[0]
            .as_array()
            .ok_or_else(|| Error::Parse(format!("{tp}: indices must be a list")))?
            .iter()
            .map(|x| x.as_u64().map(|x| x as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Parse(format!("{tp}: bad index")))?;
        parsed.push((idx, jet_from_json(&t[1], space, order, &tp)?));
    }
    FormJet::from_terms(space, degree, order, parsed).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

/// Largest absolute coefficient of a form.
pub fn form_max_abs(f: &FormJet) -> Scalar {
    f.terms().map(|(_, c)| c.max_abs()).max().unwrap_or_else(Scalar::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_roundtrip() {
        let s = VariableSpace::symplectic(1);
        let j = Jet::parse(s, 4, "1/2 p1 - 3 q1^2 + 7/3 p1 q1^3").unwrap();
        let v = jet_to_json(&j);
        assert_eq!(jet_from_json(&v, s, 0, "j").unwrap(), j);
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("[\"1\",\"2\",[1,0]]"));
        assert_eq!(jet_from_json(&json!("p1 + q1"), s, 3, "j").unwrap(), Jet::parse(s, 3, "p1 + q1").unwrap());
    }

    #[test]
    fn form_and_map_roundtrip() {
        let s = VariableSpace::symplectic(1);
        let m = MapJet::parse(s, 3, &["p1 + q1^2", "q1"]).unwrap();
        assert_eq!(map_from_json(&map_to_json(&m), s, 0, "m").unwrap(), m);
        let f = FormJet::from_terms(s, 2, 3, [(vec![0, 1], Jet::parse(s, 3, "1 + p1").unwrap())]).unwrap();
        assert_eq!(form_from_json(&form_to_json(&f), s, 0, "w").unwrap(), f);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let s = VariableSpace::symplectic(1);
        let err = jet_from_json(&json!({"terms": [["1", "0", [1, 0]]]}), s, 2, "inputs.f").unwrap_err();
        assert!(err.to_string().contains("inputs.f.terms[0]"));
        let err = jet_from_json(&json!({"terms": [["1", "1", [1]]]}), s, 2, "f").unwrap_err();
        assert!(err.to_string().contains("exponents"));
    }
}
