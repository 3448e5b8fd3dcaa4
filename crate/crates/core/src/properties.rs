//! Seeded property suite: every invariant is evaluated on `trials` random instances and
//! reported with its worst residual. Each instance has its own seed, printed on failure
//! so that it can be replayed with [`replay`].

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::engine::{
    assemble_biframe_operator, biframe_bounds, classify_pair, dual_relation_check, frame_operator, g_dual_check,
    reconstruct, relative_residual, Side, Tolerances,
};
use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::linalg::{fractional_power, inner, polar_decompose, positivity_report, Field, HVector, LinearOperator, Scalar};
use crate::measure::MeasureSpace;
use crate::random::{self, InstanceRng};
use crate::report::{CheckReport, RunReport, Verdict};
use crate::riesz::{
    b_riesz_check, biorthogonality_check, construct_dual_family, factorize_pair, onb_class_check,
    parseval_factor_check, riesz_transfer_check, transform_biframe, transform_identity_residual, FactorizationSpec,
};
use crate::verify::RunOptions;

pub const MAX_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteParams {
    pub seed: u64,
    pub trials: usize,
    pub max_dim: usize,
}

impl SuiteParams {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::BadSpec("trials must be at least 1".into()));
        }
        if self.max_dim < 2 {
            return Err(Error::BadSpec("max dimension must be at least 2".into()));
        }
        Ok(())
    }
}

/// Outcome on one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub residual: f64,
    pub holds: bool,
}

impl Sample {
    fn within(residual: f64, limit: f64) -> Self {
        Self {
            residual,
            holds: residual <= limit,
        }
    }
}

type Property = fn(&mut InstanceRng, usize, &Tolerances) -> Result<Sample>;

pub struct Invariant {
    pub name: &'static str,
    pub limit: f64,
    run: Property,
}

macro_rules! invariant {
    ($name:ident, $limit:expr) => {
        Invariant {
            name: stringify!($name),
            limit: $limit,
            run: $name,
        }
    };
}

pub fn invariants() -> Vec<Invariant> {
    vec![
        invariant!(quadrature_linearity, 1e-12),
        invariant!(quadrature_exactness, 1e-12),
        invariant!(quadrature_positivity, 0.0),
        invariant!(adjoint_identity, 1e-10),
        invariant!(hermitian_part_form, 1e-10),
        invariant!(complex_positive_is_self_adjoint, 1e-8),
        invariant!(fractional_power_semigroup, 1e-10),
        invariant!(polar_decomposition, 1e-10),
        invariant!(synthesis_of_analysis, 1e-10),
        invariant!(analysis_sesquilinearity, 1e-12),
        invariant!(adjoint_symmetry, 1e-12),
        invariant!(bound_symmetry, 1e-10),
        invariant!(assembly_sesquilinearity, 1e-12),
        invariant!(quadratic_form_agreement, 1e-12),
        invariant!(bound_enclosure, 1e-9),
        invariant!(reconstruction, 1e-9),
        invariant!(parseval_reconstruction, 1e-9),
        invariant!(duality_conditions, 1e-9),
        invariant!(g_dual_construction, 1e-9),
        invariant!(factorization_roundtrip, 1e-10),
        invariant!(transform_identity, 1e-10),
        invariant!(transform_target, 1e-9),
        invariant!(parseval_factors, 1e-9),
        invariant!(dual_biorthogonal_parseval, 1e-8),
        invariant!(b_riesz_completeness, 1e-10),
        invariant!(b_riesz_uniqueness, 1e-9),
        invariant!(dual_construction, 1e-9),
        invariant!(riesz_transfer, 1e-9),
    ]
}

/// Seed of instance `trial` of invariant number `index`.
pub fn instance_seed(seed: u64, index: usize, trial: usize) -> u64 {
    random::trial_seed(random::trial_seed(seed, index as u64), trial as u64)
}

/// Re-runs one invariant on one instance seed.
pub fn replay(name: &str, instance_seed: u64, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let inv = invariants()
        .into_iter()
        .find(|i| i.name == name)
        .ok_or_else(|| Error::BadSpec(format!("unknown invariant `{name}`")))?;
    (inv.run)(&mut random::rng(instance_seed), max_dim, tol)
}

pub fn run_property_suite(params: SuiteParams, options: &RunOptions) -> Result<RunReport> {
    params.validate()?;
    let tol = options.tolerances(Tolerances::default());
    let mut run = RunReport::new("properties", "invariant suite", tol, options.strict_paper);
    run.parameters.insert("seed".into(), json!(params.seed));
    run.parameters.insert("trials".into(), json!(params.trials));
    run.parameters.insert("max_dim".into(), json!(params.max_dim));
    for (index, inv) in invariants().iter().enumerate() {
        let start = std::time::Instant::now();
        let eval = |trial: usize| {
            let s = instance_seed(params.seed, index, trial);
            (trial, s, (inv.run)(&mut random::rng(s), params.max_dim, &tol))
        };
        let samples: Vec<_> = if options.parallel {
            (0..params.trials).into_par_iter().map(eval).collect()
        } else {
            (0..params.trials).map(eval).collect()
        };
        let mut check = CheckReport::new(inv.name, "property");
        let mut worst: Option<(f64, usize, u64)> = None;
        let mut violations = 0usize;
        for (trial, s, outcome) in samples {
            match outcome {
                Ok(sample) => {
                    if worst.is_none_or(|(w, _, _)| sample.residual > w) {
                        worst = Some((sample.residual, trial, s));
                    }
                    if !sample.holds {
                        violations += 1;
                        if violations == 1 {
                            check.escalate(
                                Verdict::Fail,
                                format!(
                                    "violated at trial {trial} (instance seed {s}): residual {:e}",
                                    sample.residual
                                ),
                            );
                        }
                    }
                }
                Err(e) => {
                    violations += 1;
                    let verdict = if e.is_numerical_failure() { Verdict::Error } else { Verdict::Fail };
                    check.escalate(verdict, format!("trial {trial} (instance seed {s}): {e}"));
                }
            }
        }
        let (worst_residual, worst_trial, worst_seed) = worst.unwrap_or((f64::NAN, 0, 0));
        check.residual("worst_residual", worst_residual);
        check.computed = json!({
            "trials": params.trials,
            "limit": inv.limit,
            "worst_residual": worst_residual,
            "worst_trial": worst_trial,
            "worst_instance_seed": worst_seed,
            "violations": violations,
        });
        check.elapsed = start.elapsed();
        run.push(check);
    }
    Ok(run)
}

fn dim(rng: &mut InstanceRng, max_dim: usize) -> usize {
    rng.random_range(2..=max_dim.max(2))
}

fn field(rng: &mut InstanceRng) -> Field {
    if rng.random_bool(0.5) {
        Field::Complex
    } else {
        Field::Real
    }
}

/// Gauss–Legendre space with between `2n` and 64 nodes on a random interval.
fn quadrature(rng: &mut InstanceRng, n: usize) -> Result<Arc<MeasureSpace>> {
    let low = (2 * n).min(MAX_NODES);
    let nodes = rng.random_range(low..=MAX_NODES);
    let a = rng.random_range(-1.0..1.0);
    let len = rng.random_range(0.5..2.0);
    Ok(Arc::new(MeasureSpace::gauss_legendre(a, a + len, nodes)?))
}

fn unit(rng: &mut InstanceRng, n: usize, f: Field) -> HVector {
    let v = random::gaussian_vector(rng, n, f);
    v.scale(Scalar::new(1.0 / v.norm(), 0.0))
}

fn scalar(rng: &mut InstanceRng, f: Field) -> Scalar {
    random::gaussian_scalar(rng, f)
}

fn counting_columns(op: &LinearOperator, label: &str) -> VectorFamily {
    VectorFamily::from_columns(op, label)
}

/// A frame `Ξ` on a quadrature space and `Φ = M Ξ + ε R` with an invertible operator.
fn invertible_pair(rng: &mut InstanceRng, max_dim: usize) -> Result<(VectorFamily, VectorFamily)> {
    let n = dim(rng, max_dim);
    let f = field(rng);
    loop {
        let space = quadrature(rng, n)?;
        let xi = random::gaussian_family(rng, &space, n, f, "xi");
        let m = random::invertible(rng, n, f);
        let noise = random::gaussian_family(rng, &space, n, f, "r");
        let mapped = xi.mapped(&m, "m xi")?;
        let vectors = mapped
            .vectors()
            .iter()
            .zip(noise.vectors())
            .map(|(a, b)| a.add(&b.scale(Scalar::new(0.1, 0.0))))
            .collect::<Result<Vec<_>>>()?;
        let phi = VectorFamily::new(space, vectors, "phi")?;
        if assemble_biframe_operator(&xi, &phi)?.condition_number()? < 1e6 {
            return Ok((xi, phi));
        }
    }
}

fn quadrature_linearity(rng: &mut InstanceRng, _: usize, _: &Tolerances) -> Result<Sample> {
    let f = field(rng);
    let space = quadrature(rng, 1)?;
    let a: Vec<Scalar> = (0..space.len()).map(|_| scalar(rng, f)).collect();
    let b: Vec<Scalar> = (0..space.len()).map(|_| scalar(rng, f)).collect();
    let alpha = scalar(rng, f);
    let combined: Vec<Scalar> = a.iter().zip(&b).map(|(x, y)| alpha * x + y).collect();
    let lhs = space.integrate(&combined)?;
    let (ia, ib) = (space.integrate(&a)?, space.integrate(&b)?);
    let rhs = alpha * ia + ib;
    let scale = (alpha * ia).norm() + ib.norm();
    Ok(Sample::within((lhs - rhs).norm() / scale.max(1.0), 1e-12))
}

fn quadrature_exactness(rng: &mut InstanceRng, _: usize, _: &Tolerances) -> Result<Sample> {
    let k = rng.random_range(1..=20usize);
    let degree = rng.random_range(0..2 * k) as i32;
    let a: f64 = rng.random_range(-1.0..0.0);
    let b = a + rng.random_range(0.5..1.5);
    let space = MeasureSpace::gauss_legendre(a, b, k)?;
    let values: Vec<f64> = space.nodes().iter().map(|x| x.powi(degree)).collect();
    let p = degree + 1;
    let exact = (b.powi(p) - a.powi(p)) / f64::from(p);
    // ∫|x|^d over [a, b], which bounds the size of every summand.
    let magnitude = if a < 0.0 && b > 0.0 {
        (a.abs().powi(p) + b.powi(p)) / f64::from(p)
    } else {
        exact.abs()
    };
    let err = (space.integrate(&values)? - exact).abs();
    Ok(Sample::within(err / magnitude.max(1.0), 1e-12))
}

fn quadrature_positivity(rng: &mut InstanceRng, _: usize, _: &Tolerances) -> Result<Sample> {
    let space = quadrature(rng, 1)?;
    let values: Vec<f64> = (0..space.len())
        .map(|_| {
            let x: f64 = rng.random_range(0.0..1.0);
            if rng.random_bool(0.3) {
                0.0
            } else {
                x
            }
        })
        .collect();
    let shortfall = (-space.integrate(&values)?).max(0.0);
    Ok(Sample::within(shortfall, 0.0))
}

fn adjoint_identity(rng: &mut InstanceRng, max_dim: usize, _: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let t = random::gaussian_operator(rng, n, f);
    let u = random::gaussian_vector(rng, n, f);
    let v = random::gaussian_vector(rng, n, f);
    let lhs = inner(&t.apply(&u)?, &v)?;
    let rhs = inner(&u, &t.adjoint().apply(&v)?)?;
    let scale = t.operator_norm()? * u.norm() * v.norm();
    Ok(Sample::within((lhs - rhs).norm() / scale.max(f64::MIN_POSITIVE), 1e-10))
}

fn hermitian_part_form(rng: &mut InstanceRng, max_dim: usize, _: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let t = random::gaussian_operator(rng, n, f);
    let x = random::gaussian_vector(rng, n, f);
    let lhs = t.quadratic_form(&x)?.re;
    let rhs = t.hermitian_part().quadratic_form(&x)?;
    let err = (lhs - rhs.re).abs().max(rhs.im.abs());
    Ok(Sample::within(err / (t.operator_norm()? * x.norm().powi(2)), 1e-10))
}

/// Positive definite Hermitian operators satisfy the premise; adding a skew-Hermitian
/// part breaks the realness of the form, making the implication vacuous.
fn complex_positive_is_self_adjoint(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let n = dim(rng, max_dim);
    let mut t = random::positive_definite(rng, n, Field::Complex);
    if rng.random_bool(0.5) {
        let g = random::gaussian_operator(rng, n, Field::Complex);
        t = t.add(&g.sub(&g.adjoint())?.scale(Scalar::new(0.5, 0.0)))?;
    }
    let norm = t.operator_norm()?;
    let mut max_imag: f64 = 0.0;
    for _ in 0..64 {
        let x = unit(rng, n, Field::Complex);
        max_imag = max_imag.max(t.quadratic_form(&x)?.im.abs());
    }
    let report = positivity_report(&t, tol.positivity_threshold(norm))?;
    let premise = max_imag <= 1e-12 * norm && report.is_positive;
    if premise {
        Ok(Sample::within(report.self_adjoint_defect, 1e-8))
    } else {
        Ok(Sample::within(0.0, 1e-8))
    }
}

fn fractional_power_semigroup(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let t = random::positive_definite(rng, n, f);
    let a = rng.random_range(-1.0..1.0);
    let b = rng.random_range(-1.0..1.0);
    let ta = fractional_power(&t, a, tol.self_adjoint)?;
    let tb = fractional_power(&t, b, tol.self_adjoint)?;
    let tab = fractional_power(&t, a + b, tol.self_adjoint)?;
    Ok(Sample::within(relative_residual(&ta.compose(&tb)?, &tab)?, 1e-10))
}

fn polar_decomposition(rng: &mut InstanceRng, max_dim: usize, _: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let m = random::gaussian_operator(rng, n, f);
    let polar = polar_decompose(&m)?;
    let residual = polar.positive.compose(&polar.unitary)?.distance(&m)? / m.operator_norm()?;
    let unitarity = polar
        .unitary
        .adjoint()
        .compose(&polar.unitary)?
        .distance(&LinearOperator::identity(n, f))?;
    let p = &polar.positive;
    let psd = (-p.hermitian_spectrum()?[0]).max(0.0) / m.operator_norm()?;
    let worst = residual.max(unitarity).max(p.self_adjoint_defect()?).max(psd);
    Ok(Sample::within(worst, 1e-10))
}

fn synthesis_of_analysis(rng: &mut InstanceRng, max_dim: usize, _: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let space = quadrature(rng, n)?;
    let xi = random::gaussian_family(rng, &space, n, f, "xi");
    let x = random::gaussian_vector(rng, n, f);
    let lhs = xi.synthesis(&xi.analysis(&x)?)?;
    let t = frame_operator(&xi)?;
    let rhs = t.apply(&x)?;
    let scale = (t.operator_norm()? * x.norm()).max(1.0);
    Ok(Sample::within(lhs.sub(&rhs)?.norm() / scale, 1e-10))
}

fn analysis_sesquilinearity(rng: &mut InstanceRng, max_dim: usize, _: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let space = quadrature(rng, n)?;
    let xi = random::gaussian_family(rng, &space, n, f, "xi");
    let (x, y) = (random::gaussian_vector(rng, n, f), random::gaussian_vector(rng, n, f));
    let alpha = scalar(rng, f);
    let ax = xi.analysis(&x)?;
    let ay = xi.analysis(&y)?;
    let combo = xi.analysis(&x.scale(alpha).add(&y)?)?;
    let scaled = xi.scaled(alpha).analysis(&x)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for i in 0..xi.len() {
        let (cx, cy) = (ax.values()[i], ay.values()[i]);
        worst = worst.max((combo.values()[i] - (alpha * cx + cy)).norm());
        worst = worst.max((scaled.values()[i] - alpha.conj() * cx).norm());
        scale = scale.max((alpha * cx).norm() + cy.norm());
    }
    Ok(Sample::within(worst / scale, 1e-12))
}

fn random_pair(rng: &mut InstanceRng, max_dim: usize) -> Result<(VectorFamily, VectorFamily, Field)> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let space = quadrature(rng, 1)?;
    let xi = random::gaussian_family(rng, &space, n, f, "xi");
    let phi = random::gaussian_family(rng, &space, n, f, "phi");
    Ok((xi, phi, f))
}

fn entry_scale(t: &LinearOperator) -> f64 {
    t.matrix().iter().map(|z| z.norm()).fold(1.0, f64::max)
}

fn adjoint_symmetry(rng: &mut InstanceRng, max_dim: usize, _: &Tolerances) -> Result<Sample> {
    let (xi, phi, _) = random_pair(rng, max_dim)?;
    let t = assemble_biframe_operator(&xi, &phi)?;
    let r = assemble_biframe_operator(&phi, &xi)?;
    Ok(Sample::within(r.max_abs_diff(&t.adjoint())? / entry_scale(&t), 1e-12))
}

fn bound_symmetry(rng: &mut InstanceRng, max_dim: usize, _: &Tolerances) -> Result<Sample> {
    let (xi, phi, _) = random_pair(rng, max_dim)?;
    let t = assemble_biframe_operator(&xi, &phi)?;
    let (c1, d1) = biframe_bounds(&t)?;
    let (c2, d2) = biframe_bounds(&assemble_biframe_operator(&phi, &xi)?)?;
    let gap = (c1 - c2).abs().max((d1 - d2).abs());
    Ok(Sample::within(gap / entry_scale(&t), 1e-10))
}

fn assembly_sesquilinearity(rng: &mut InstanceRng, max_dim: usize, _: &Tolerances) -> Result<Sample> {
    let (xi, phi, f) = random_pair(rng, max_dim)?;
    let alpha = scalar(rng, f);
    let t = assemble_biframe_operator(&xi, &phi)?;
    let left = assemble_biframe_operator(&xi.scaled(alpha), &phi)?;
    let right = assemble_biframe_operator(&xi, &phi.scaled(alpha))?;
    let scale = entry_scale(&t) * alpha.norm().max(1.0);
    let err = left
        .max_abs_diff(&t.scale(alpha.conj()))?
        .max(right.max_abs_diff(&t.scale(alpha))?);
    Ok(Sample::within(err / scale, 1e-12))
}

fn quadratic_form_agreement(rng: &mut InstanceRng, max_dim: usize, _: &Tolerances) -> Result<Sample> {
    let (xi, phi, f) = random_pair(rng, max_dim)?;
    let x = random::gaussian_vector(rng, xi.dimension(), f);
    let t = assemble_biframe_operator(&xi, &phi)?;
    let mut direct = Scalar::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for ((a, b), &w) in xi.vectors().iter().zip(phi.vectors()).zip(xi.space().weights()) {
        let term = inner(&x, a)? * inner(b, &x)? * w;
        direct += term;
        magnitude += term.norm();
    }
    let err = (t.quadratic_form(&x)? - direct).norm();
    Ok(Sample::within(err / f64::max(magnitude, 1.0), 1e-12))
}

fn bound_enclosure(rng: &mut InstanceRng, max_dim: usize, _: &Tolerances) -> Result<Sample> {
    let (xi, phi, f) = random_pair(rng, max_dim)?;
    let t = assemble_biframe_operator(&xi, &phi)?;
    let (c, d) = biframe_bounds(&t)?;
    let mut worst: f64 = 0.0;
    for _ in 0..16 {
        let q = t.quadratic_form(&unit(rng, xi.dimension(), f))?.re;
        worst = worst.max(c - q).max(q - d);
    }
    Ok(Sample::within(worst.max(0.0), 1e-9))
}

fn reconstruction(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (xi, phi) = invertible_pair(rng, max_dim)?;
    let x = random::gaussian_vector(rng, xi.dimension(), xi.field());
    let mut worst: f64 = 0.0;
    for side in [Side::Left, Side::Right] {
        let back = reconstruct(&xi, &phi, &x, side, tol)?;
        worst = worst.max(back.sub(&x)?.norm() / x.norm());
    }
    Ok(Sample::within(worst, 1e-9))
}

/// `(Ξ, T⁻¹Φ)` is Parseval, so synthesis after analysis is the identity.
fn parseval_reconstruction(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (xi, phi) = invertible_pair(rng, max_dim)?;
    let t_inv = assemble_biframe_operator(&xi, &phi)?.inverse(tol.max_condition)?;
    let dual = phi.mapped(&t_inv, "parseval partner")?;
    let report = classify_pair(&xi, &dual, tol)?;
    let x = random::gaussian_vector(rng, xi.dimension(), xi.field());
    let back = dual.synthesis(&xi.analysis(&x)?)?;
    let residual = back.sub(&x)?.norm() / x.norm();
    Ok(Sample {
        residual,
        holds: residual <= 1e-9 && report.is_parseval,
    })
}

/// With the canonical dual all three duality conditions hold; for an unrelated pair
/// none does. Either way they must agree.
fn duality_conditions(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (xi, phi) = invertible_pair(rng, max_dim)?;
    let canonical = xi.mapped(&frame_operator(&xi)?.inverse(tol.max_condition)?, "canonical")?;
    let dual = dual_relation_check(&xi, &canonical, tol)?;
    let other = dual_relation_check(&xi, &phi, tol)?;
    let residual = dual
        .condition_i_residual
        .max(dual.condition_ii_residual)
        .max(dual.condition_iii_residual);
    Ok(Sample {
        residual,
        holds: residual <= 1e-9 && dual.is_dual && dual.conditions_agree && other.conditions_agree,
    })
}

/// `Φ = (A⁻¹)* T_Ξ⁻¹ Ξ` gives `T_{Φ,Ξ} = A⁻¹`.
fn g_dual_construction(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (xi, _) = invertible_pair(rng, max_dim)?;
    let (n, f) = (xi.dimension(), xi.field());
    let a = random::invertible(rng, n, f);
    let map = a
        .inverse(tol.max_condition)?
        .adjoint()
        .compose(&frame_operator(&xi)?.inverse(tol.max_condition)?)?;
    let phi = xi.mapped(&map, "g-dual")?;
    let g = g_dual_check(&xi, &phi, &a, tol)?;
    Ok(Sample {
        residual: g.residual,
        holds: g.holds && g.residual <= 1e-9,
    })
}

fn random_spec(rng: &mut InstanceRng, n: usize, f: Field, tol: &Tolerances) -> Result<FactorizationSpec> {
    let a = rng.random_range(-1.0..1.0);
    let c = rng.random_range(-1.0..1.0);
    let w = random::invertible(rng, n, f);
    let top = w.adjoint().inverse(tol.max_condition)?;
    FactorizationSpec::new(a, 1.0 - a, c, 1.0 - c, w, top)
}

fn factorization_roundtrip(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let s1 = random::positive_definite(rng, n, f);
    let s2 = random::positive_definite(rng, n, f);
    let spec = random_spec(rng, n, f, tol)?;
    Ok(Sample::within(factorize_pair(&s1, &s2, &spec, tol)?.residual, 1e-10))
}

fn transform_identity(rng: &mut InstanceRng, max_dim: usize, _: &Tolerances) -> Result<Sample> {
    let (xi, phi, f) = random_pair(rng, max_dim)?;
    let n = xi.dimension();
    let s = random::gaussian_operator(rng, n, f);
    let u = random::gaussian_operator(rng, n, f);
    Ok(Sample::within(transform_identity_residual(&xi, &phi, &s, &u)?, 1e-10))
}

/// Pair with `T_{Ξ,Φ} = P` positive definite: `Φ = P T_Ξ⁻¹ Ξ`.
fn positive_pair(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<(VectorFamily, VectorFamily)> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let space = quadrature(rng, n)?;
    let xi = random::gaussian_family(rng, &space, n, f, "xi");
    let p = random::positive_definite(rng, n, f);
    let map = p.compose(&frame_operator(&xi)?.inverse(tol.max_condition)?)?;
    let phi = xi.mapped(&map, "phi")?;
    Ok((xi, phi))
}

fn transform_target(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (xi, phi) = positive_pair(rng, max_dim, tol)?;
    let (n, f) = (xi.dimension(), xi.field());
    let q = random::positive_definite(rng, n, f);
    let spec = random_spec(rng, n, f, tol)?;
    let t = transform_biframe(&xi, &phi, &q, &spec, tol)?;
    let residual = t.target_residual.max(t.identity_residual);
    Ok(Sample::within(residual, 1e-9))
}

/// `U = (S*)⁻¹` satisfies the criterion; a perturbation of size 1e-3 must not.
fn parseval_factors(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let basis = VectorFamily::standard_basis(n, f)?;
    let s = random::invertible(rng, n, f);
    let u = s.adjoint().inverse(tol.max_condition)?;
    let exact = parseval_factor_check(&s, &u, &basis, tol)?;
    let e = random::gaussian_operator(rng, n, f);
    let e = e.scale(Scalar::new(1e-3 / e.operator_norm()?, 0.0));
    let perturbed = parseval_factor_check(&s, &u.add(&e)?, &basis, tol)?;
    let residual = exact.report.parseval_distance;
    Ok(Sample {
        residual,
        holds: residual <= 1e-9
            && exact.holds()
            && exact.verdicts_agree
            && !perturbed.holds()
            && !perturbed.pair_is_parseval
            && perturbed.verdicts_agree,
    })
}

/// Biorthogonal dual counting-measure frames are Parseval: columns of `F` and `(F*)⁻¹`.
fn dual_biorthogonal_parseval(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let m = random::invertible(rng, n, f);
    let xi = counting_columns(&m, "xi");
    let phi = counting_columns(&m.adjoint().inverse(tol.max_condition)?, "phi");
    let dual = dual_relation_check(&xi, &phi, tol)?;
    let biorthogonal = biorthogonality_check(&xi, &phi)?;
    let report = classify_pair(&xi, &phi, tol)?;
    let premise = dual.is_dual && biorthogonal;
    Ok(Sample {
        residual: report.parseval_distance,
        holds: premise && report.is_parseval,
    })
}

fn b_riesz_completeness(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let m = random::invertible(rng, n, f);
    let good = b_riesz_check(&counting_columns(&m, "xi"), tol)?;
    // Rank n − 1: the last column repeats a combination of the others.
    let g = random::gaussian_operator(rng, n, f);
    let mut cols = g.matrix().clone();
    let mut combo = cols.column(0) * scalar(rng, f);
    if n > 2 {
        combo += cols.column(1);
    }
    cols.set_column(n - 1, &combo);
    let deficient = LinearOperator::new(cols, f)?;
    let bad = b_riesz_check(&counting_columns(&deficient, "deficient"), tol)?;
    let residual = good.residual.max(good.basis_defect);
    Ok(Sample {
        residual,
        holds: good.is_b_riesz && residual <= 1e-10 && good.operator_residual <= 1e-9 && !bad.is_b_riesz,
    })
}

/// `Ξ = U E` with `U` positive definite and `E` orthonormal: the membership test recovers
/// `U`, the polar certificate recovers `(U, E)`, `T_Ξ = U²`, and another basis fails
/// unless it coincides with `E`.
fn b_riesz_uniqueness(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let u = random::positive_definite(rng, n, f);
    let e_op = random::unitary(rng, n, f);
    let basis = counting_columns(&e_op, "e");
    let xi = basis.mapped(&u, "xi")?;
    let member = onb_class_check(&basis, &xi, tol)?;
    let cert = b_riesz_check(&xi, tol)?;
    let (cu, cb) = match (&cert.u, &cert.basis) {
        (Some(cu), Some(cb)) => (cu, cb),
        _ => return Ok(Sample { residual: f64::INFINITY, holds: false }),
    };
    let mut residual = member.u.max_abs_diff(&u)?.max(cu.max_abs_diff(&u)?);
    for (a, b) in cb.vectors().iter().zip(basis.vectors()) {
        residual = residual.max(a.sub(b)?.entries().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let square = relative_residual(&frame_operator(&xi)?, &u.compose(&u)?)?;
    let other_op = random::unitary(rng, n, f);
    let other = counting_columns(&other_op, "delta");
    let other_member = onb_class_check(&other, &xi, tol)?;
    let other_ok = !other_member.member || other_op.max_abs_diff(&e_op)? <= 1e-9;
    Ok(Sample {
        residual: residual.max(square),
        holds: member.member && residual <= 1e-9 && square <= 1e-10 && other_ok,
    })
}

fn dual_construction(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let space = quadrature(rng, n)?;
    let xi = random::gaussian_family(rng, &space, n, f, "xi");
    let eta = random::gaussian_family(rng, &space, n, f, "eta");
    let q = random::positive_definite(rng, n, f);
    Ok(Sample::within(construct_dual_family(&xi, &q, &eta, tol)?.residual, 1e-9))
}

fn riesz_transfer(rng: &mut InstanceRng, max_dim: usize, tol: &Tolerances) -> Result<Sample> {
    let (n, f) = (dim(rng, max_dim), field(rng));
    let xi = counting_columns(&random::invertible(rng, n, f), "xi");
    let p = random::positive_definite(rng, n, f);
    let map = p.compose(&frame_operator(&xi)?.inverse(tol.max_condition)?)?;
    let phi = xi.mapped(&map, "phi")?;
    let t = riesz_transfer_check(&xi, &phi, tol)?;
    let residual = t.relation_residual.unwrap_or(f64::INFINITY);
    Ok(Sample {
        residual,
        holds: t.holds && t.xi_invertible && t.phi_invertible && residual <= 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_small() {
        let params = SuiteParams { seed: 7, trials: 5, max_dim: 4 };
        let run = run_property_suite(params, &RunOptions::default()).unwrap();
        assert_eq!(run.exit_code, 0, "{}", run.to_text());
        assert_eq!(run.checks.len(), invariants().len());
    }

    #[test]
    fn rejects_bad_parameters() {
        let opts = RunOptions::default();
        let zero = SuiteParams { seed: 1, trials: 0, max_dim: 4 };
        assert!(matches!(run_property_suite(zero, &opts), Err(Error::BadSpec(_))));
        let small = SuiteParams { seed: 1, trials: 1, max_dim: 1 };
        assert!(matches!(run_property_suite(small, &opts), Err(Error::BadSpec(_))));
    }

    #[test]
    fn deterministic_and_parallel_stable() {
        let params = SuiteParams { seed: 42, trials: 3, max_dim: 3 };
        let a = run_property_suite(params, &RunOptions::default()).unwrap().to_json();
        let b = run_property_suite(params, &RunOptions::default()).unwrap().to_json();
        let par = RunOptions { parallel: true, ..RunOptions::default() };
        let c = run_property_suite(params, &par).unwrap().to_json();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn replay_reproduces_worst_instance() {
        let params = SuiteParams { seed: 3, trials: 4, max_dim: 5 };
        let tol = Tolerances::default();
        let run = run_property_suite(params, &RunOptions::default()).unwrap();
        let check = run.checks.iter().find(|c| c.name == "reconstruction").unwrap();
        let seed = check.computed["worst_instance_seed"].as_u64().unwrap();
        let sample = replay("reconstruction", seed, 5, &tol).unwrap();
        assert_eq!(Some(sample.residual), check.computed["worst_residual"].as_f64());
    }
}
