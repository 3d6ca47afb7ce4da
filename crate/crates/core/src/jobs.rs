//! Batch jobs: a JSON job description in, a certified JSON report out.

use crate::acceptance;
use crate::error::{Error, Result};
use crate::forms::FormJet;
use crate::jet::{Jet, Scalar};
use crate::map::{self, MapJet};
use crate::moduli::poincare_series;
use crate::normal_forms::{
    check_glancing, corollary1_parametrize, derive_km_form, theorem1_normalize,
    theorem2_normalize, Certificate, NormalFormT2,
};
use crate::serial::{
    form_from_json, form_max_abs, form_to_json, jet_from_json, jet_to_json, map_from_json,
    map_to_json, scalar_to_json,
};
use crate::space::VariableSpace;
use crate::symplectic::{is_symplectomorphism, standard_form};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    NormalizeDiffeo,
    NormalizePair,
    GlancingCheck,
    ParametrizeForm,
    KmForm,
    Poincare,
    Selftest,
}

fn default_order() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub command: Command,
    #[serde(default)]
    pub n: usize,
    /// Truncation order `N`.
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub inputs: Value,
}

/// Largest `n` accepted from job files.
pub const MAX_N: usize = 4;

pub fn parse_job(text: &str) -> Result<Job> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Exit status for an error: 1 for malformed jobs, 2 for domain failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::SpaceMismatch(_) => 1,
        _ => 2,
    }
}

/// Report plus process exit status.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

struct Body {
    outputs: Value,
    residuals: Map<String, Value>,
    certificate: Option<Certificate>,
    warnings: Vec<String>,
    failed: bool,
}

impl Body {
    fn new(outputs: Value) -> Self {
        Body {
            outputs,
            residuals: Map::new(),
            certificate: None,
            warnings: Vec::new(),
            failed: false,
        }
    }

    fn residual(&mut self, name: &str, value: Scalar) {
        self.residuals.insert(name.to_string(), scalar_to_json(&value));
    }
}

pub fn run_job(job: &Job) -> Outcome {
    let echo = serde_json::to_value(job).expect("jobs serialize");
    match dispatch(job) {
        Ok(body) => {
            let residuals_zero = body
                .residuals
                .values()
                .all(|v| v == &scalar_to_json(&Scalar::zero()));
            let ok = !body.failed && residuals_zero;
            let mut report = json!({
                "job": echo,
                "status": if ok { "success" } else { "failure" },
                "outputs": body.outputs,
                "residuals": body.residuals,
                "warnings": body.warnings,
            });
            if let Some(c) = body.certificate {
                report["certified_order"] = json!(c.certified_order);
                report["checks"] = serde_json::to_value(&c.checks).expect("checks serialize");
            }
            let code = if ok { 0 } else { 2 };
            report["exit_code"] = json!(code);
            Outcome {
                report,
                exit_code: code,
            }
        }
        Err(e) => {
            let code = exit_code(&e);
            Outcome {
                report: json!({
                    "job": echo,
                    "status": "error",
                    "error": { "kind": e.kind(), "message": e.to_string() },
                    "exit_code": code,
                }),
                exit_code: code,
            }
        }
    }
}

fn input<'a>(job: &'a Job, key: &str) -> Result<&'a Value> {
    job.inputs
        .get(key)
        .ok_or_else(|| Error::Parse(format!("inputs.{key}: missing")))
}

fn check_n(job: &Job, min: usize) -> Result<()> {
    if job.n < min || job.n > MAX_N {
        return Err(Error::Parse(format!("n: expected {min}..={MAX_N}, got {}", job.n)));
    }
    if job.order == 0 {
        return Err(Error::Parse("order: must be positive".into()));
    }
    Ok(())
}

fn jets(list: &[Jet]) -> Value {
    Value::Array(list.iter().map(jet_to_json).collect())
}

fn dispatch(job: &Job) -> Result<Body> {
    match job.command {
        Command::NormalizeDiffeo => normalize_diffeo(job),
        Command::NormalizePair => normalize_pair(job),
        Command::GlancingCheck => glancing(job),
        Command::ParametrizeForm => parametrize(job),
        Command::KmForm => km_form(job),
        Command::Poincare => poincare(job),
        Command::Selftest => Ok(selftest()),
    }
}

fn normalize_diffeo(job: &Job) -> Result<Body> {
    check_n(job, 1)?;
    let space = VariableSpace::symplectic(job.n);
    let phi = map_from_json(input(job, "map")?, space, job.order, "inputs.map")?;
    let nf = theorem1_normalize(&phi)?;
    let mut body = Body::new(json!({
        "renumeration": { "perm": nf.renumeration.perm, "twisted": nf.renumeration.twisted },
        "normalized": map_to_json(&nf.normalized),
        "q_tilde": jets(&nf.q_tilde),
        "p_tilde": jets(&nf.p_tilde),
        "q_split": nf.q_split.iter().map(|s| jets(s)).collect::<Vec<_>>(),
        "p_split": nf.p_split.iter().map(|s| jets(s)).collect::<Vec<_>>(),
        "normalizer": map_to_json(&nf.normalizer),
    }));
    let rep = is_symplectomorphism(&nf.normalizer, &standard_form(space, phi.order() + 1))?;
    body.residual("symplecticity", form_max_abs(&rep.residual));
    let composed = phi.compose(&nf.normalizer)?;
    body.residual("composition", map_difference(&composed, &nf.normalized));
    body.certificate = Some(nf.certificate);
    Ok(body)
}

/// Largest coefficient of `a - b` at their common order.
fn map_difference(a: &MapJet, b: &MapJet) -> Scalar {
    a.components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| {
            let o = x.order().min(y.order());
            x.truncate(o).sub_jet(&y.truncate(o)).max_abs()
        })
        .max()
        .unwrap_or_else(Scalar::zero)
}

fn pair_inputs(job: &Job) -> Result<(Jet, Jet)> {
    check_n(job, 0)?;
    if job.order < 2 * job.n + 2 {
        return Err(Error::Parse(format!(
            "order: glancing pairs need N >= 2n + 2 = {}",
            2 * job.n + 2
        )));
    }
    let space = VariableSpace::constrained(job.n);
    let f = jet_from_json(input(job, "f")?, space, job.order, "inputs.f")?;
    let h = jet_from_json(input(job, "h")?, space, job.order, "inputs.h")?;
    Ok((f, h))
}

fn pair_outputs(nf: &NormalFormT2) -> Value {
    json!({
        "r": jet_to_json(&nf.r),
        "phi": jet_to_json(&nf.phi),
        "q_tilde": jets(nf.q_tilde()),
        "p_tilde": jets(nf.p_tilde()),
        "g": jet_to_json(&nf.g),
        "h_normal": nf.h_normal.as_ref().map(jet_to_json),
        "critical": nf.critical.as_ref().map(jet_to_json),
        "normalizer": map_to_json(&nf.normalizer),
    })
}

fn normalize_pair(job: &Job) -> Result<Body> {
    let (f, h) = pair_inputs(job)?;
    let nf = theorem2_normalize(&f, &h)?;
    let mut body = Body::new(pair_outputs(&nf));
    pair_residuals(&mut body, &f, &nf)?;
    body.warnings = nf.notes.clone();
    body.certificate = Some(nf.certificate);
    Ok(body)
}

fn pair_residuals(body: &mut Body, f: &Jet, nf: &NormalFormT2) -> Result<()> {
    let space = f.space();
    let om = standard_form(space, nf.normalizer.order() + 1);
    let rep = is_symplectomorphism(&nf.normalizer, &om)?;
    body.residual("symplecticity", form_max_abs(&rep.residual));
    let fy = map::compose(f, &nf.normalizer)?;
    body.residual("f_minus_y", fy.sub_jet(&Jet::var(space, fy.order(), 1)).max_abs());
    Ok(())
}

fn glancing(job: &Job) -> Result<Body> {
    check_n(job, 0)?;
    let space = VariableSpace::constrained(job.n);
    let f = jet_from_json(input(job, "f")?, space, job.order, "inputs.f")?;
    let h = jet_from_json(input(job, "h")?, space, job.order, "inputs.h")?;
    let rep = check_glancing(&f, &h)?;
    let wedge: Vec<Value> = rep
        .df_dh
        .iter()
        .map(|(idx, c)| json!([idx, scalar_to_json(c)]))
        .collect();
    let mut body = Body::new(json!({
        "f_h": scalar_to_json(&rep.f_h),
        "f_fh": scalar_to_json(&rep.f_fh),
        "h_fh": scalar_to_json(&rep.h_fh),
        "df_dh": wedge,
        "in_s1": rep.in_s1,
        "failed_conditions": rep.failed,
    }));
    if job.n == 0 {
        body.warnings
            .push("in the plane df∧dh(0) is not required to be nonzero".into());
    }
    Ok(body)
}

fn parametrize(job: &Job) -> Result<Body> {
    check_n(job, 1)?;
    let space = VariableSpace::symplectic(job.n);
    let om = form_from_json(input(job, "form")?, space, job.order, "inputs.form")?;
    let p = corollary1_parametrize(&om)?;
    let mut body = Body::new(json!({
        "q_bar": jets(&p.q_bar),
        "p_bar": jets(&p.p_bar),
        "chart": map_to_json(&p.chart),
        "reconstruction": form_to_json(&p.reconstruct()),
    }));
    body.residual("reconstruction", form_max_abs(&p.residual));
    body.certificate = Some(p.certificate);
    Ok(body)
}

fn km_form(job: &Job) -> Result<Body> {
    let (f, h) = pair_inputs(job)?;
    let nf = theorem2_normalize(&f, &h)?;
    let km = derive_km_form(&nf)?;
    let mut body = Body::new(json!({
        "normal_form": pair_outputs(&nf),
        "f_hat": jet_to_json(&km.f_hat),
        "r_hat": jet_to_json(&km.r_hat),
        "psi": jet_to_json(&km.psi),
        "omega_tilde": form_to_json(&km.omega_tilde),
        "chart": map_to_json(&km.chart),
    }));
    pair_residuals(&mut body, &f, &nf)?;
    if km.n > 0 && km.omega_tilde != standard_form(km.omega_tilde.space(), km.omega_tilde.order()) {
        body.warnings
            .push("omega_tilde differs from dp∧dq; the (P̃, Q̃) invariants moved into it".into());
    }
    let mut cert = km.certificate;
    for c in nf.certificate.checks {
        cert.push(format!("normal form: {}", c.name), c.passed);
    }
    cert.certified_order = cert.certified_order.min(nf.certificate.certified_order);
    body.certificate = Some(cert);
    Ok(body)
}

fn poincare(job: &Job) -> Result<Body> {
    check_n(job, 1)?;
    let s = poincare_series(job.n, job.order, job.seed);
    let mut body = Body::new(serde_json::to_value(&s).expect("series serialize"));
    for k in 0..=s.max_order {
        if !s.agree[k] {
            body.warnings.push(format!(
                "k = {k}: computed dim {} differs from the rational-function prediction {}",
                s.dims[k], s.predicted_dims[k]
            ));
        }
    }
    if !s.rank_agree {
        body.failed = true;
        body.warnings.push("rank and count methods disagree".into());
    }
    Ok(body)
}

fn selftest() -> Body {
    let results = acceptance::run_all();
    let failed = results.iter().any(|r| !r.passed);
    let mut body = Body::new(json!({
        "criteria": serde_json::to_value(&results).expect("results serialize"),
        "table": results.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
    }));
    body.failed = failed;
    body
}

/// Human-readable rendering of a report.
pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    render(report, 0, &mut out);
    out
}

fn as_rational(v: &Value) -> Option<String> {
    let a = v.as_array()?;
    if a.len() != 2 {
        return None;
    }
    let num = a[0].as_str()?;
    let den = a[1].as_str()?;
    if num.parse::<num_bigint::BigInt>().is_err() || den.parse::<num_bigint::BigInt>().is_err() {
        return None;
    }
    Some(if den == "1" { num.to_string() } else { format!("{num}/{den}") })
}

fn inline(v: &Value) -> Option<String> {
    if let Some(r) = as_rational(v) {
        return Some(r);
    }
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(x) => Some(x.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Object(o) if o.contains_key("text") && o.contains_key("order") => Some(format!(
            "{}  [order {}]",
            o["text"].as_str().unwrap_or(""),
            o["order"]
        )),
        Value::Array(a) if a.is_empty() => Some("[]".into()),
        Value::Array(a) if a.iter().all(|x| x.is_number() || x.is_boolean()) => Some(format!(
            "[{}]",
            a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        )),
        _ => None,
    }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render(x, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", inline(other).unwrap_or_default())),
    }
}

/// Re-checks a reported normalizer after reading it back from JSON.
pub fn recertify_normalizer(report: &Value) -> Result<bool> {
    let job: Job = serde_json::from_value(report["job"].clone())
        .map_err(|e| Error::Parse(format!("job: {e}")))?;
    let space = match job.command {
        Command::NormalizeDiffeo => VariableSpace::symplectic(job.n),
        Command::NormalizePair => VariableSpace::constrained(job.n),
        _ => return Err(Error::Parse("report carries no normalizer".into())),
    };
    let m = map_from_json(&report["outputs"]["normalizer"], space, job.order, "normalizer")?;
    let om: FormJet = standard_form(space, m.order() + 1);
    Ok(is_symplectomorphism(&m, &om)?.ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> Outcome {
        run_job(&parse_job(text).unwrap())
    }

    #[test]
    fn glancing_job() {
        let out = run(r#"{"command": "glancing-check", "n": 1, "order": 4,
                          "inputs": {"f": "y", "h": "x^2 + y + p1"}}"#);
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report["outputs"]["in_s1"], json!(true));
    }

    #[test]
    fn identity_diffeo_job() {
        let out = run(r#"{"command": "normalize-diffeo", "n": 1, "order": 4,
                          "inputs": {"map": ["p1", "q1"]}}"#);
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report["outputs"]["q_tilde"][0]["text"], json!("q1 + O(5)"));
        assert_eq!(out.report["residuals"]["symplecticity"], json!(["0", "1"]));
        assert!(recertify_normalizer(&out.report).unwrap());
    }

    #[test]
    fn melrose_pair_is_domain_error() {
        let out = run(r#"{"command": "normalize-pair", "n": 1, "order": 6,
                          "inputs": {"f": "y", "h": "x^2 + y + p1"}}"#);
        assert_eq!(out.exit_code, 2);
        assert_eq!(out.report["error"]["kind"], json!("GenericityViolation"));
    }

    #[test]
    fn malformed_jobs() {
        assert!(parse_job(r#"{"command": "frobnicate"}"#).is_err());
        let out = run(r#"{"command": "normalize-pair", "n": 1, "order": 3,
                          "inputs": {"f": "y", "h": "x^2 + y + p1"}}"#);
        assert_eq!(out.exit_code, 1);
        let out = run(r#"{"command": "glancing-check", "n": 1, "inputs": {"f": "y"}}"#);
        assert_eq!(out.exit_code, 1);
        assert!(out.report["error"]["message"].as_str().unwrap().contains("inputs.h"));
    }

    #[test]
    fn poincare_job_warns() {
        let out = run(r#"{"command": "poincare", "n": 2, "order": 2}"#);
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report["warnings"].as_array().unwrap().len(), 1);
        let text = render_text(&out.report);
        assert!(text.contains("dims:"));
    }
}
