//! Built-in regression fixtures: four worked examples, each reporting computed values
//! beside the printed claims.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::engine::{assemble_biframe_operator, classify_pair, Tolerances};
use crate::error::Result;
use crate::family::VectorFamily;
use crate::linalg::{inner, positivity_report, Field, HVector, LinearOperator, Matrix, Scalar};
use crate::measure::{MeasureSpace, DEFAULT_QUADRATURE_NODES};
use crate::report::{to_value, CheckReport, RunReport, Verdict};
use crate::riesz::b_riesz_check;
use crate::verify::{error_check, report_value, values_match, RunOptions, CLAIM_TOL};

/// Tolerance on closed-form values that the fixtures reproduce exactly.
const EXACT_TOL: f64 = 1e-12;

/// Coefficients of the real binary form `⟨Tξ, ξ⟩ = xx·x² + xy·xy + yy·y²`.
pub fn binary_form(t: &LinearOperator) -> Value {
    let e = |i, j| t.entry(i, j).re;
    json!({ "xx": e(0, 0), "xy": e(0, 1) + e(1, 0), "yy": e(1, 1) })
}

fn claim(r: &mut CheckReport, key: &str, claimed: Value, computed: Value) {
    let matches = values_match(&claimed, &computed, CLAIM_TOL);
    r.claim(key, claimed, computed, matches);
}

type Fixture = fn(&Tolerances) -> Result<Vec<CheckReport>>;

const FIXTURES: [(&str, Fixture); 4] = [
    ("positive_matrix", positive_matrix),
    ("example1", example1),
    ("example2", example2),
    ("b_riesz", b_riesz),
];

pub fn run_paper_examples(options: &RunOptions) -> RunReport {
    let tol = options.tolerances(Tolerances::default());
    let run_one = |(name, fixture): &(&str, Fixture)| -> Vec<CheckReport> {
        let start = Instant::now();
        let mut checks = fixture(&tol).unwrap_or_else(|e| vec![error_check(name, "fixture", &e)]);
        let elapsed = start.elapsed() / checks.len() as u32;
        for c in &mut checks {
            c.elapsed = elapsed;
        }
        checks
    };
    let results: Vec<Vec<CheckReport>> = if options.parallel {
        FIXTURES.par_iter().map(run_one).collect()
    } else {
        FIXTURES.iter().map(run_one).collect()
    };
    let mut run = RunReport::new("paper-examples", "worked examples", tol, options.strict_paper);
    for check in results.into_iter().flatten() {
        run.push(check);
    }
    run
}

/// `N = [[2, 1], [3, 4]]`: positive but not self-adjoint.
pub fn positive_matrix(tol: &Tolerances) -> Result<Vec<CheckReport>> {
    let n = LinearOperator::from_real_rows(&[[2.0, 1.0], [3.0, 4.0]])?;
    let p = positivity_report(&n, tol.positivity_threshold(n.operator_norm()?))?;

    let mut conclusion = CheckReport::new("positive_matrix.conclusion", "positivity");
    // Hermitian part [[2, 2], [2, 4]] has eigenvalues 3 ± √5.
    let root5 = 5f64.sqrt();
    conclusion.bound("min_eig_error", (p.hermitian_min_eig - (3.0 - root5)).abs(), 1e-10);
    conclusion.bound("max_eig_error", (p.hermitian_max_eig - (3.0 + root5)).abs(), 1e-10);
    conclusion.computed = to_value(&p);
    claim(&mut conclusion, "is_positive", json!(true), json!(p.is_positive));
    claim(&mut conclusion, "is_self_adjoint", json!(false), json!(p.is_self_adjoint));

    let mut form = CheckReport::new("positive_matrix.quadratic_form", "positivity");
    let computed = binary_form(&n);
    form.computed = json!({ "form": computed.clone() });
    claim(&mut form, "form", json!({ "xx": 5.0, "xy": 1.0, "yy": 4.0 }), computed);
    Ok(vec![conclusion, form])
}

fn quadrature_pair(
    field: Field,
    xi: impl Fn(f64) -> [f64; 2],
    phi: impl Fn(f64) -> [f64; 2],
) -> Result<(VectorFamily, VectorFamily)> {
    let space = Arc::new(MeasureSpace::gauss_legendre(0.0, 1.0, DEFAULT_QUADRATURE_NODES)?);
    let vector = |v: [f64; 2]| {
        HVector::new(
            nalgebra::DVector::from_iterator(2, v.iter().map(|&x| Scalar::new(x, 0.0))),
            field,
        )
    };
    let a = VectorFamily::sample(space.clone(), "xi", |_, w| vector(xi(w)))?;
    let b = VectorFamily::sample(space, "phi", |_, w| vector(phi(w)))?;
    Ok((a, b))
}

/// `Ξ(ω) = (0, ω)`, `Φ(ω) = (ω, 1)` on `[0, 1]`.
pub fn example1(tol: &Tolerances) -> Result<Vec<CheckReport>> {
    let (xi, phi) = quadrature_pair(Field::Real, |w| [0.0, w], |w| [w, 1.0])?;
    let report = classify_pair(&xi, &phi, tol)?;
    let mut r = CheckReport::new("example1", "classify_pair");
    let exact = LinearOperator::from_real_rows(&[[0.0, 1.0 / 3.0], [0.0, 0.5]])?;
    r.bound("operator_error", report.operator.max_abs_diff(&exact)?, EXACT_TOL);
    // Hermitian part [[0, 1/6], [1/6, 1/2]]: eigenvalues 1/4 ± √13/12.
    let half_gap = 13f64.sqrt() / 12.0;
    let bound_error = (report.lower_bound_c - (0.25 - half_gap))
        .abs()
        .max((report.upper_bound_d - (0.25 + half_gap)).abs());
    r.bound("bound_error", bound_error, EXACT_TOL);
    r.computed = report_value(&report);
    claim(&mut r, "bounds", json!([1.0 / 3.0, 0.5]), json!([report.lower_bound_c, report.upper_bound_d]));
    claim(&mut r, "is_biframe", json!(true), json!(report.is_biframe));
    Ok(vec![r])
}

/// Diagonal 2×2 complex matrices with the Hilbert–Schmidt inner product, embedded
/// isometrically in ℂ² by `diag(a, b) ↦ (a, b)`.
pub fn example2(tol: &Tolerances) -> Result<Vec<CheckReport>> {
    let mut r = CheckReport::new("example2", "classify_pair");

    // Isometry of the embedding on sample matrices: tr(M N*) = ⟨(a, b), (c, d)⟩.
    let samples = [
        (Scalar::new(1.0, 2.0), Scalar::new(-0.5, 0.25)),
        (Scalar::new(0.0, -1.0), Scalar::new(3.0, 1.0)),
    ];
    let mut embed_error: f64 = 0.0;
    for &(a, b) in &samples {
        for &(c, d) in &samples {
            let m = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b]));
            let n = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c, d]));
            let hs = (m * n.adjoint()).trace();
            let e = inner(&HVector::from_complex(&[a, b])?, &HVector::from_complex(&[c, d])?)?;
            embed_error = embed_error.max((hs - e).norm());
        }
    }
    r.bound("embedding_error", embed_error, EXACT_TOL);

    let (xi, phi) = quadrature_pair(Field::Complex, |w| [w, w / 2.0], |w| [2.0 * w, w])?;
    let report = classify_pair(&xi, &phi, tol)?;
    let form = report.operator.hermitian_part();
    let exact = LinearOperator::new(
        Matrix::from_row_slice(
            2,
            2,
            &[2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0].map(|x| Scalar::new(x, 0.0)),
        ),
        Field::Complex,
    )?;
    r.bound("form_error", form.max_abs_diff(&exact)?, EXACT_TOL);
    // Eigenvalues of the form are 0 and 5/6.
    r.bound("lower_bound_error", report.lower_bound_c.abs(), 1e-10);
    r.bound("upper_bound_error", (report.upper_bound_d - 5.0 / 6.0).abs(), 1e-10);
    let mut v = report_value(&report);
    if let Value::Object(m) = &mut v {
        m.insert("hermitian_form".into(), to_value(&form));
    }
    r.computed = v;
    let printed_form = json!([[2.0 / 3.0, 0.0], [0.0, 1.0 / 6.0]]);
    claim(&mut r, "hermitian_form", printed_form, to_value(&real_rows(&form)));
    claim(&mut r, "bounds", json!([0.5, 2.0]), json!([report.lower_bound_c, report.upper_bound_d]));
    claim(&mut r, "is_biframe", json!(true), json!(report.is_biframe));
    Ok(vec![r])
}

fn real_rows(t: &LinearOperator) -> Vec<Vec<f64>> {
    (0..t.dim()).map(|i| (0..t.dim()).map(|j| t.entry(i, j).re).collect()).collect()
}

/// `Ξ = {(1, −2), (−1, 0)}` against the basis `{(1/2, √3/2), (−√3/2, 1/2)}`.
pub fn b_riesz(tol: &Tolerances) -> Result<Vec<CheckReport>> {
    let space = Arc::new(MeasureSpace::counting(2)?);
    let s3 = 3f64.sqrt();
    let e1 = HVector::from_real(&[0.5, s3 / 2.0])?;
    let e2 = HVector::from_real(&[-s3 / 2.0, 0.5])?;
    let xi = VectorFamily::new(
        space.clone(),
        vec![HVector::from_real(&[1.0, -2.0])?, HVector::from_real(&[-1.0, 0.0])?],
        "xi",
    )?;

    // As printed: both terms pair with the first basis vector.
    let literal = VectorFamily::new(space.clone(), vec![e1.clone(), e1.clone()], "e1 twice")?;
    let t_lit = assemble_biframe_operator(&literal, &xi)?;
    let lit_report = classify_pair(&literal, &xi, tol)?;
    let mut lit = CheckReport::new("b_riesz.literal", "classify_pair");
    let lit_form = binary_form(&t_lit);
    let mut v = report_value(&lit_report);
    if let Value::Object(m) = &mut v {
        m.insert("form".into(), lit_form.clone());
    }
    lit.computed = v;
    claim(&mut lit, "form", json!({ "xx": 0.0, "xy": -1.0, "yy": -s3 }), lit_form);
    claim(&mut lit, "is_biframe", json!(true), json!(lit_report.is_biframe));

    // Second term against the second basis vector.
    let basis = VectorFamily::new(space, vec![e1, e2], "e")?;
    let cor_report = classify_pair(&basis, &xi, tol)?;
    let mut cor = CheckReport::new("b_riesz.corrected", "classify_pair");
    let cor_form = binary_form(&cor_report.operator);
    let mut v = report_value(&cor_report);
    if let Value::Object(m) = &mut v {
        m.insert("form".into(), cor_form);
    }
    cor.computed = v;
    claim(&mut cor, "is_biframe", json!(true), json!(cor_report.is_biframe));

    // Polar certificate: some orthonormal basis does make Ξ b-Riesz.
    let cert = b_riesz_check(&xi, tol)?;
    let mut c = CheckReport::new("b_riesz.certificate", "b_riesz");
    if cert.is_b_riesz {
        c.bound("certificate_residual", cert.residual, 1e-10);
        c.bound("basis_defect", cert.basis_defect, 1e-10);
        c.bound("operator_residual", cert.operator_residual, tol.duality);
        // U² = F F* = [[2, −2], [−2, 4]].
        let u = cert.u.as_ref().expect("certificate operator");
        let ff = LinearOperator::from_real_rows(&[[2.0, -2.0], [-2.0, 4.0]])?;
        c.bound("square_error", u.compose(u)?.max_abs_diff(&ff)?, 1e-10);
    } else {
        c.escalate(Verdict::Fail, "invertible family without a certificate");
    }
    let mut v = to_value(&cert);
    if let (Value::Object(m), Some(report)) = (&mut v, &cert.report) {
        m.insert("report".into(), report_value(report));
    }
    c.computed = v;
    claim(&mut c, "is_b_riesz", json!(true), json!(cert.is_b_riesz));
    Ok(vec![lit, cor, c])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_name<'r>(run: &'r RunReport, name: &str) -> &'r CheckReport {
        run.checks.iter().find(|c| c.name == name).unwrap()
    }

    #[test]
    fn fixture_verdicts() {
        let run = run_paper_examples(&RunOptions::default());
        assert_eq!(run.exit_code, 0, "{}", run.to_text());
        assert_eq!(by_name(&run, "positive_matrix.conclusion").verdict, Verdict::Pass);
        assert_eq!(by_name(&run, "positive_matrix.quadratic_form").verdict, Verdict::Mismatch);
        assert_eq!(by_name(&run, "example1").verdict, Verdict::Mismatch);
        assert_eq!(by_name(&run, "example2").verdict, Verdict::Mismatch);
        assert_eq!(by_name(&run, "b_riesz.literal").verdict, Verdict::Mismatch);
        assert_eq!(by_name(&run, "b_riesz.corrected").verdict, Verdict::Mismatch);
        assert_eq!(by_name(&run, "b_riesz.certificate").verdict, Verdict::Pass);
    }

    #[test]
    fn literal_form_matches_printed_expression() {
        let run = run_paper_examples(&RunOptions::default());
        let lit = by_name(&run, "b_riesz.literal");
        let form = lit.claims.iter().find(|c| c.key == "form").unwrap();
        assert!(form.matches);
        let biframe = lit.claims.iter().find(|c| c.key == "is_biframe").unwrap();
        assert!(!biframe.matches);
    }

    #[test]
    fn corrected_form_is_indefinite() {
        let tol = Tolerances::default();
        let checks = b_riesz(&tol).unwrap();
        let spectrum = checks[1].computed["hermitian_spectrum"].as_array().unwrap();
        assert!(spectrum[0].as_f64().unwrap() < 0.0);
        assert!(spectrum[1].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn parallel_matches_sequential() {
        let seq = run_paper_examples(&RunOptions::default());
        let par = run_paper_examples(&RunOptions { parallel: true, ..RunOptions::default() });
        assert_eq!(seq.to_json(), par.to_json());
    }

    #[test]
    fn strict_mode_fails_on_mismatch() {
        let run = run_paper_examples(&RunOptions { strict_paper: true, ..RunOptions::default() });
        assert_eq!(run.exit_code, 1);
    }
}
