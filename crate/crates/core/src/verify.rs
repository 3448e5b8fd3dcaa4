//! Scenario execution.

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::engine::{
    classify_pair, controlled_frame_check, dual_relation_check, g_dual_check, reconstruct, swap_check,
    biframe_coefficients, BiframeReport, Side, Tolerances,
};
use crate::error::{Error, Result};
use crate::linalg::{fractional_power, neumann_invertibility_check, polar_decompose, positivity_report, LinearOperator};
use crate::report::{to_value, CheckReport, RunReport, Verdict};
use crate::riesz::{
    b_riesz_check, biorthogonality_check, construct_dual_family, cross_gram_defect, factorize_pair,
    onb_class_check, parseval_factor_check, product_pair_check, riesz_transfer_check, transform_biframe,
    transform_identity_residual,
};
use crate::scenario::{CheckOp, CheckSpec, Scenario, ScenarioError, Workspace};

/// Absolute tolerance for `expect` comparisons of numbers.
pub const EXPECT_TOL: f64 = 1e-9;
/// Absolute tolerance for comparisons against printed claims.
pub const CLAIM_TOL: f64 = 1e-6;
/// Limit on identity residuals that hold as theorems (e.g. `S₂ = U S₁ V*`).
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    pub parseval: Option<f64>,
    pub positivity: Option<f64>,
    pub strict_paper: bool,
    pub parallel: bool,
}

impl RunOptions {
    /// Applies flag overrides on top of `base`.
    pub fn tolerances(&self, base: Tolerances) -> Tolerances {
        Tolerances {
            parseval: self.parseval.unwrap_or(base.parseval),
            positivity: self.positivity.unwrap_or(base.positivity),
            ..base
        }
    }
}

pub fn run_scenario(path: &Path, options: &RunOptions) -> std::result::Result<RunReport, ScenarioError> {
    let scenario = Scenario::from_path(path)?;
    run_parsed(&scenario, options)
}

pub fn run_scenario_str(text: &str, options: &RunOptions) -> std::result::Result<RunReport, ScenarioError> {
    let scenario = Scenario::from_json(text)?;
    run_parsed(&scenario, options)
}

pub fn run_parsed(scenario: &Scenario, options: &RunOptions) -> std::result::Result<RunReport, ScenarioError> {
    let tol = options.tolerances(scenario.tolerances.unwrap_or_default());
    tol.validate().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    let mut ws = Workspace::new(scenario).map_err(|e| ScenarioError::Invalid(e.to_string()))?;
    let mut run = RunReport::new("scenario", scenario.display_name(), tol, options.strict_paper);
    for check in &scenario.checks {
        let start = Instant::now();
        let mut report = CheckReport::new(&check.name, check.op.name());
        let outcome = execute(&mut ws, check, &tol, &mut report);
        settle(check, outcome, &mut report);
        if let Some(claim) = scenario.expected.get(&check.name) {
            if report.verdict != Verdict::Error {
                for (key, claimed) in &claim.values {
                    let computed = lookup(&report.computed, key).cloned().unwrap_or(Value::Null);
                    let matches = values_match(claimed, &computed, CLAIM_TOL);
                    report.claim(key, claimed.clone(), computed, matches);
                }
            }
            if let Some(note) = &claim.note {
                report.messages.push(format!("claim note: {note}"));
            }
        }
        report.elapsed = start.elapsed();
        run.push(report);
    }
    Ok(run)
}

/// Applies `expect_error` and `expect` to the outcome of a check.
fn settle(check: &CheckSpec, outcome: Result<()>, report: &mut CheckReport) {
    match (outcome, &check.expect_error) {
        (Err(e), Some(kind)) if e.kind() == kind => {
            report.computed = json!({ "error": e.kind(), "message": e.to_string() });
        }
        (Err(e), _) => {
            report.computed = json!({ "error": e.kind(), "message": e.to_string() });
            let verdict = if e.is_numerical_failure() { Verdict::Error } else { Verdict::Fail };
            report.escalate(verdict, e.to_string());
        }
        (Ok(()), Some(kind)) => report.escalate(Verdict::Fail, format!("expected error `{kind}` did not occur")),
        (Ok(()), None) => {
            for (key, expected) in &check.expect {
                let computed = lookup(&report.computed, key).cloned().unwrap_or(Value::Null);
                if !values_match(expected, &computed, EXPECT_TOL) {
                    report.escalate(Verdict::Fail, format!("expected {key} = {expected}, computed {computed}"));
                }
            }
        }
    }
}

/// Dotted-path lookup, e.g. `report.is_biframe` or `bounds.0`.
pub fn lookup<'v>(value: &'v Value, path: &str) -> Option<&'v Value> {
    path.split('.').try_fold(value, |v, part| match v {
        Value::Object(m) => m.get(part),
        Value::Array(a) => part.parse::<usize>().ok().and_then(|i| a.get(i)),
        _ => None,
    })
}

/// Structural equality with numeric tolerance `tol`.
pub fn values_match(expected: &Value, computed: &Value, tol: f64) -> bool {
    match (expected, computed) {
        (Value::Number(a), Value::Number(b)) => match (a.as_f64(), b.as_f64()) {
            (Some(a), Some(b)) => (a - b).abs() <= tol,
            _ => false,
        },
        (Value::Array(a), Value::Array(b)) => {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| values_match(x, y, tol))
        }
        (Value::Object(a), Value::Object(b)) => a
            .iter()
            .all(|(k, x)| b.get(k).is_some_and(|y| values_match(x, y, tol))),
        _ => expected == computed,
    }
}

/// Report JSON with an added `bounds: [C, D]` entry.
pub fn report_value(report: &BiframeReport) -> Value {
    let mut v = to_value(report);
    if let Value::Object(m) = &mut v {
        m.insert("bounds".into(), json!([report.lower_bound_c, report.upper_bound_d]));
    }
    v
}

fn name<'c>(check: &'c CheckSpec, key: &str) -> &'c str {
    check.param(key).expect("validated scenario")
}

fn execute(ws: &mut Workspace<'_>, check: &CheckSpec, tol: &Tolerances, r: &mut CheckReport) -> Result<()> {
    match check.op {
        CheckOp::ClassifyPair => {
            let report = classify_pair(&ws.family(name(check, "xi"))?, &ws.family(name(check, "phi"))?, tol)?;
            r.computed = report_value(&report);
        }
        CheckOp::Swap => {
            let s = swap_check(&ws.family(name(check, "xi"))?, &ws.family(name(check, "phi"))?)?;
            r.bound("adjoint_residual", s.adjoint_residual, 1e-12);
            r.residual("bound_gap", s.bound_gap);
            if !s.holds {
                r.escalate(Verdict::Fail, "bound symmetry violated");
            }
            r.computed = to_value(&s);
        }
        CheckOp::Reconstruct => {
            let xi = ws.family(name(check, "xi"))?;
            let phi = ws.family(name(check, "phi"))?;
            let v = ws.vector(check.vector.as_deref().expect("validated"))?;
            let sides = match check.side {
                Some(side) => vec![side],
                None => vec![Side::Left, Side::Right],
            };
            let mut out = Map::new();
            for side in sides {
                let back = reconstruct(&xi, &phi, &v, side, tol)?;
                let residual = back.sub(&v)?.norm() / v.norm().max(f64::MIN_POSITIVE);
                let key = match side {
                    Side::Left => "left",
                    Side::Right => "right",
                };
                r.bound(&format!("{key}_relative_residual"), residual, tol.reconstruction);
                out.insert(key.into(), to_value(&back));
            }
            r.computed = Value::Object(out);
        }
        CheckOp::Coefficients => {
            let xi = ws.family(name(check, "xi"))?;
            let phi = ws.family(name(check, "phi"))?;
            let v = ws.vector(check.vector.as_deref().expect("validated"))?;
            let c = biframe_coefficients(&xi, &phi, &v, tol)?;
            r.computed = json!({ "coefficients": to_value(&c) });
        }
        CheckOp::ControlledFrame => {
            let xi = ws.family(name(check, "xi"))?;
            let p = ws.operator(name(check, "p"))?;
            let q = match check.q.as_deref() {
                Some(n) => Some(ws.operator(n)?),
                None => None,
            };
            r.computed = report_value(&controlled_frame_check(&xi, &p, q.as_ref(), tol)?);
        }
        CheckOp::Dual => {
            let d = dual_relation_check(&ws.family(name(check, "xi"))?, &ws.family(name(check, "phi"))?, tol)?;
            r.residual("condition_i", d.condition_i_residual);
            r.residual("condition_ii", d.condition_ii_residual);
            r.residual("condition_iii", d.condition_iii_residual);
            if !d.conditions_agree {
                r.escalate(Verdict::Fail, "the three duality conditions disagree");
            }
            r.computed = to_value(&d);
        }
        CheckOp::GDual => {
            let g = g_dual_check(
                &ws.family(name(check, "xi"))?,
                &ws.family(name(check, "phi"))?,
                &ws.operator(name(check, "a"))?,
                tol,
            )?;
            r.residual("g_dual_residual", g.residual);
            r.computed = to_value(&g);
        }
        CheckOp::Positivity => {
            let t = ws.operator(name(check, "operator"))?;
            let p = positivity_report(&t, tol.positivity_threshold(t.operator_norm()?))?;
            let mut v = to_value(&p);
            if let Value::Object(m) = &mut v {
                m.insert("hermitian_part".into(), to_value(&t.hermitian_part()));
            }
            r.computed = v;
        }
        CheckOp::Neumann => {
            let t = ws.operator(name(check, "operator"))?;
            let id = LinearOperator::identity(t.dim(), t.field());
            let distance = id.sub(&t)?.operator_norm()?;
            r.computed = json!({
                "invertible_by_neumann": neumann_invertibility_check(&t)?,
                "distance_to_identity": distance,
            });
        }
        CheckOp::Polar => {
            let f = ws.operator(name(check, "operator"))?;
            let polar = polar_decompose(&f)?;
            let rebuilt = polar.positive.compose(&polar.unitary)?;
            let residual = rebuilt.distance(&f)? / f.operator_norm()?.max(f64::MIN_POSITIVE);
            let qq = polar.unitary.adjoint().compose(&polar.unitary)?;
            let unitarity = qq.distance(&LinearOperator::identity(f.dim(), f.field()))?;
            r.bound("polar_residual", residual, IDENTITY_TOL);
            r.bound("unitarity_defect", unitarity, IDENTITY_TOL);
            let p_pos = positivity_report(&polar.positive, tol.positivity_threshold(polar.positive.operator_norm()?))?;
            r.computed = json!({
                "positive": to_value(&polar.positive),
                "unitary": to_value(&polar.unitary),
                "positive_is_definite": p_pos.is_positive,
            });
        }
        CheckOp::FractionalPower => {
            let t = ws.operator(name(check, "operator"))?;
            let a = check.exponent.expect("validated");
            let ta = fractional_power(&t, a, tol.self_adjoint)?;
            let tb = fractional_power(&t, 1.0 - a, tol.self_adjoint)?;
            let semigroup = ta.compose(&tb)?.distance(&t)? / t.operator_norm()?.max(1.0);
            r.bound("semigroup_residual", semigroup, IDENTITY_TOL);
            r.computed = json!({ "power": to_value(&ta) });
        }
        CheckOp::Factorize => {
            let s1 = ws.operator(name(check, "s1"))?;
            let s2 = ws.operator(name(check, "s2"))?;
            let spec = ws.factorization_spec(check.spec.as_ref().expect("validated"))?;
            let f = factorize_pair(&s1, &s2, &spec, tol)?;
            r.bound("factorization_residual", f.residual, IDENTITY_TOL);
            r.computed = to_value(&f);
        }
        CheckOp::Transform => {
            let xi = ws.family(name(check, "xi"))?;
            let phi = ws.family(name(check, "phi"))?;
            let q = ws.operator(name(check, "q"))?;
            let spec = ws.factorization_spec(check.spec.as_ref().expect("validated"))?;
            let t = transform_biframe(&xi, &phi, &q, &spec, tol)?;
            r.bound("target_residual", t.target_residual, tol.duality);
            r.bound("identity_residual", t.identity_residual, IDENTITY_TOL);
            let mut v = to_value(&t);
            if let Value::Object(m) = &mut v {
                m.insert("report".into(), report_value(&t.report));
            }
            r.computed = v;
        }
        CheckOp::TransformIdentity => {
            let residual = transform_identity_residual(
                &ws.family(name(check, "xi"))?,
                &ws.family(name(check, "phi"))?,
                &ws.operator(name(check, "s"))?,
                &ws.operator(name(check, "u"))?,
            )?;
            r.bound("identity_residual", residual, IDENTITY_TOL);
            r.computed = json!({ "identity_residual": residual });
        }
        CheckOp::ParsevalFactors => {
            let p = parseval_factor_check(
                &ws.operator(name(check, "s"))?,
                &ws.operator(name(check, "u"))?,
                &ws.family(name(check, "basis"))?,
                tol,
            )?;
            r.residual("product_distance", p.product_distance);
            if !p.verdicts_agree {
                r.escalate(Verdict::Fail, "U·S* = I and the Parseval classification disagree");
            }
            let mut v = to_value(&p);
            if let Value::Object(m) = &mut v {
                m.insert("report".into(), report_value(&p.report));
                m.insert("holds".into(), Value::Bool(p.holds()));
            }
            r.computed = v;
        }
        CheckOp::Biorthogonality => {
            let xi = ws.family(name(check, "xi"))?;
            let phi = ws.family(name(check, "phi"))?;
            let defect = cross_gram_defect(&xi, &phi)?;
            r.residual("cross_gram_defect", defect);
            r.computed = json!({
                "biorthogonal": biorthogonality_check(&xi, &phi)?,
                "cross_gram_defect": defect,
            });
        }
        CheckOp::BRiesz => {
            let c = b_riesz_check(&ws.family(name(check, "xi"))?, tol)?;
            if c.is_b_riesz {
                r.bound("certificate_residual", c.residual, IDENTITY_TOL);
                r.bound("basis_defect", c.basis_defect, IDENTITY_TOL);
                r.bound("operator_residual", c.operator_residual, tol.duality);
            }
            let mut v = to_value(&c);
            if let (Value::Object(m), Some(report)) = (&mut v, &c.report) {
                m.insert("report".into(), report_value(report));
            }
            r.computed = v;
        }
        CheckOp::OnbClass => {
            let m = onb_class_check(&ws.family(name(check, "basis"))?, &ws.family(name(check, "xi"))?, tol)?;
            r.residual("operator_residual", m.operator_residual);
            r.computed = to_value(&m);
        }
        CheckOp::ProductPair => {
            let p = product_pair_check(
                &ws.family(name(check, "basis"))?,
                &ws.operator(name(check, "u"))?,
                &ws.operator(name(check, "v"))?,
                tol,
            )?;
            r.bound("identity_residual", p.identity_residual, IDENTITY_TOL);
            if p.vu_positivity.is_positive && !p.report.is_biframe {
                r.messages.push("V·U is positive but the pair, whose operator is V·U*, is not a biframe".into());
            }
            let mut v = to_value(&p);
            if let Value::Object(m) = &mut v {
                m.insert("report".into(), report_value(&p.report));
            }
            r.computed = v;
        }
        CheckOp::ConstructDual => {
            let d = construct_dual_family(
                &ws.family(name(check, "xi"))?,
                &ws.operator(name(check, "q"))?,
                &ws.family(name(check, "eta"))?,
                tol,
            )?;
            r.bound("dual_residual", d.residual, tol.duality);
            r.computed = json!({
                "phi": to_value(&d.phi.vectors()),
                "report": report_value(&d.report),
            });
        }
        CheckOp::RieszTransfer => {
            let t = riesz_transfer_check(&ws.family(name(check, "xi"))?, &ws.family(name(check, "phi"))?, tol)?;
            if let Some(res) = t.relation_residual {
                r.bound("relation_residual", res, tol.duality);
            }
            r.computed = to_value(&t);
        }
    }
    Ok(())
}

/// Report for a check that could not run.
pub fn error_check(name: &str, op: &str, e: &Error) -> CheckReport {
    let mut r = CheckReport::new(name, op);
    r.computed = json!({ "error": e.kind(), "message": e.to_string() });
    let verdict = if e.is_numerical_failure() { Verdict::Error } else { Verdict::Fail };
    r.escalate(verdict, e.to_string());
    r
}
