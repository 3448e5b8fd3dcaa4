//! Operator factorizations, biframe transforms, and Riesz / b-Riesz machinery.
//!
//! Riesz-type checks are restricted to counting measures whose size equals the
//! dimension; a family is then identified with its square column matrix `F`.

use serde::Serialize;

use crate::engine::{
    assemble_biframe_operator, classify_operator, classify_pair, frame_operator, relative_residual,
    BiframeReport, Tolerances,
};
use crate::error::{Error, Result};
use crate::family::VectorFamily;
use crate::linalg::{fractional_power, polar_decompose, positivity_report, HVector, LinearOperator, PositivityReport};

const EXPONENT_TOL: f64 = 1e-12;
const SPEC_PRODUCT_TOL: f64 = 1e-10;

/// Exponents and the operator pair `(W, Top)` with `Top·W* = I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizationSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub w: LinearOperator,
    pub top: LinearOperator,
}

impl FactorizationSpec {
    pub fn new(a: f64, b: f64, c: f64, d: f64, w: LinearOperator, top: LinearOperator) -> Result<Self> {
        let spec = Self { a, b, c, d, w, top };
        spec.validate()?;
        Ok(spec)
    }

    /// Exponents `(a, c)` with `b = 1 − a`, `d = 1 − c`, and `W = Top = I`.
    pub fn with_identity(a: f64, c: f64, dim: usize, field: crate::linalg::Field) -> Self {
        let id = LinearOperator::identity(dim, field);
        Self {
            a,
            b: 1.0 - a,
            c,
            d: 1.0 - c,
            w: id.clone(),
            top: id,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ((self.a + self.b) - 1.0).abs() > EXPONENT_TOL {
            return Err(Error::BadSpec(format!("a + b = {} (expected 1)", self.a + self.b)));
        }
        if ((self.c + self.d) - 1.0).abs() > EXPONENT_TOL {
            return Err(Error::BadSpec(format!("c + d = {} (expected 1)", self.c + self.d)));
        }
        let product = self.top.compose(&self.w.adjoint())?;
        let defect = product.distance(&LinearOperator::identity(product.dim(), product.field()))?;
        if defect > SPEC_PRODUCT_TOL {
            return Err(Error::BadSpec(format!("‖Top·W* − I‖ = {defect:e}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factorization {
    pub u: LinearOperator,
    pub v: LinearOperator,
    /// `‖S₂ − U·S₁·V*‖ / ‖S₂‖`.
    pub residual: f64,
}

/// `V = S₂^c W S₁^{-a}`, `U = S₂^d Top S₁^{-b}`, so that `S₂ = U S₁ V*`.
pub fn factorize_pair(
    s1: &LinearOperator,
    s2: &LinearOperator,
    spec: &FactorizationSpec,
    tol: &Tolerances,
) -> Result<Factorization> {
    spec.validate()?;
    let v = fractional_power(s2, spec.c, tol.self_adjoint)?
        .compose(&spec.w)?
        .compose(&fractional_power(s1, -spec.a, tol.self_adjoint)?)?;
    let u = fractional_power(s2, spec.d, tol.self_adjoint)?
        .compose(&spec.top)?
        .compose(&fractional_power(s1, -spec.b, tol.self_adjoint)?)?;
    let rebuilt = u.compose(s1)?.compose(&v.adjoint())?;
    let residual = rebuilt.distance(s2)? / s2.operator_norm()?;
    Ok(Factorization { u, v, residual })
}

/// Relative residual of `T_{SΞ, UΦ} = U·T_{Ξ,Φ}·S*`; holds for arbitrary bounded `S`, `U`.
pub fn transform_identity_residual(
    xi: &VectorFamily,
    phi: &VectorFamily,
    s: &LinearOperator,
    u: &LinearOperator,
) -> Result<f64> {
    let direct = assemble_biframe_operator(&xi.mapped(s, "S xi")?, &phi.mapped(u, "U phi")?)?;
    let t = assemble_biframe_operator(xi, phi)?;
    let composed = u.compose(&t)?.compose(&s.adjoint())?;
    relative_residual(&direct, &composed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transformed {
    pub s: LinearOperator,
    pub u: LinearOperator,
    #[serde(skip)]
    pub s_xi: VectorFamily,
    #[serde(skip)]
    pub u_phi: VectorFamily,
    pub report: BiframeReport,
    /// `‖T_{SΞ,UΦ} − Q‖ / max(1, ‖Q‖)`.
    pub target_residual: f64,
    /// `‖T_{SΞ,UΦ} − U·T·S*‖ / max(1, ‖U·T·S*‖)`.
    pub identity_residual: f64,
}

/// Builds `S = Q^c W T^{-a}` and `U = Q^d V T^{-b}` (with `V = spec.top`), applies
/// them to `Ξ` and `Φ`, and classifies the new pair, whose operator is `Q`.
pub fn transform_biframe(
    xi: &VectorFamily,
    phi: &VectorFamily,
    q: &LinearOperator,
    spec: &FactorizationSpec,
    tol: &Tolerances,
) -> Result<Transformed> {
    let t = assemble_biframe_operator(xi, phi)?;
    let f = factorize_pair(&t, q, spec, tol)?;
    let (s, u) = (f.v, f.u);
    let s_xi = xi.mapped(&s, "S xi")?;
    let u_phi = phi.mapped(&u, "U phi")?;
    let new_t = assemble_biframe_operator(&s_xi, &u_phi)?;
    let target_residual = relative_residual(&new_t, q)?;
    let identity_residual = relative_residual(&new_t, &u.compose(&t)?.compose(&s.adjoint())?)?;
    let report = classify_operator(&new_t, tol)?;
    Ok(Transformed {
        s,
        u,
        s_xi,
        u_phi,
        report,
        target_residual,
        identity_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParsevalFactorCheck {
    /// `‖U·S* − I‖`.
    pub product_distance: f64,
    pub product_is_identity: bool,
    pub pair_is_parseval: bool,
    pub verdicts_agree: bool,
    pub report: BiframeReport,
}

impl ParsevalFactorCheck {
    pub fn holds(&self) -> bool {
        self.product_is_identity
    }
}

/// `(S·E, U·E)` is Parseval iff `U·S* = I`; both sides are evaluated independently.
pub fn parseval_factor_check(
    s: &LinearOperator,
    u: &LinearOperator,
    basis: &VectorFamily,
    tol: &Tolerances,
) -> Result<ParsevalFactorCheck> {
    basis.ensure_orthonormal_basis()?;
    let product = u.compose(&s.adjoint())?;
    let product_distance = product.distance(&LinearOperator::identity(product.dim(), product.field()))?;
    let product_is_identity = product_distance <= tol.parseval;
    let report = classify_pair(&basis.mapped(s, "S e")?, &basis.mapped(u, "U e")?, tol)?;
    Ok(ParsevalFactorCheck {
        product_distance,
        product_is_identity,
        pair_is_parseval: report.is_parseval,
        verdicts_agree: product_is_identity == report.is_parseval,
        report,
    })
}

fn ensure_square_counting(f: &VectorFamily) -> Result<()> {
    if !f.space().is_counting() {
        return Err(Error::NotCounting);
    }
    if f.len() != f.dimension() {
        return Err(Error::SizeMismatch {
            nodes: f.len(),
            dimension: f.dimension(),
        });
    }
    Ok(())
}

/// Largest entrywise deviation of the cross-Gram `⟨Ξ_i, Φ_j⟩` from `δ_ij`.
pub fn cross_gram_defect(xi: &VectorFamily, phi: &VectorFamily) -> Result<f64> {
    if !xi.space().is_counting() || !phi.space().is_counting() {
        return Err(Error::NotCounting);
    }
    xi.check_compatible(phi)?;
    let mut worst: f64 = 0.0;
    for (i, a) in xi.vectors().iter().enumerate() {
        for (j, b) in phi.vectors().iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            let g = crate::linalg::inner(a, b)?;
            worst = worst.max((g - crate::linalg::Scalar::new(target, 0.0)).norm());
        }
    }
    Ok(worst)
}

/// `⟨Ξ_i, Φ_j⟩ = δ_ij` within 1e-10.
pub fn biorthogonality_check(xi: &VectorFamily, phi: &VectorFamily) -> Result<bool> {
    Ok(cross_gram_defect(xi, phi)? <= 1e-10)
}

/// Certificate that `Ξ = U·e` for an orthonormal basis `e` and positive `U`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BRieszCertificate {
    pub is_b_riesz: bool,
    pub u: Option<LinearOperator>,
    #[serde(serialize_with = "serialize_basis")]
    pub basis: Option<VectorFamily>,
    /// `max_ω ‖Ξ_ω − U e_ω‖ / max(1, ‖F‖)`.
    pub residual: f64,
    /// Gram defect of the certified basis.
    pub basis_defect: f64,
    /// `‖T_{e,Ξ} − U‖ / max(1, ‖U‖)`.
    pub operator_residual: f64,
    pub condition_number: f64,
    pub report: Option<BiframeReport>,
}

fn serialize_basis<S: serde::Serializer>(
    basis: &Option<VectorFamily>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match basis {
        Some(b) => s.collect_seq(b.vectors()),
        None => s.serialize_none(),
    }
}

/// Left polar decomposition of the column matrix `F = P·Q₀`: the columns of `Q₀` form
/// the basis and `U = P`.
pub fn b_riesz_check(xi: &VectorFamily, tol: &Tolerances) -> Result<BRieszCertificate> {
    ensure_square_counting(xi)?;
    let f = xi.column_operator()?;
    let condition = f.condition_number()?;
    if !(condition <= tol.max_condition) {
        return Ok(BRieszCertificate {
            is_b_riesz: false,
            u: None,
            basis: None,
            residual: f64::INFINITY,
            basis_defect: f64::INFINITY,
            operator_residual: f64::INFINITY,
            condition_number: condition,
            report: None,
        });
    }
    let polar = polar_decompose(&f)?;
    let basis = VectorFamily::from_columns(&polar.unitary, "polar basis");
    let u = polar.positive;
    let scale = f.operator_norm()?.max(1.0);
    let residual = xi
        .vectors()
        .iter()
        .zip(basis.vectors())
        .map(|(x, e)| u.apply(e).and_then(|ue| x.sub(&ue)).map(|d| d.norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max)
        / scale;
    // Same index set as Ξ so the pair can be assembled.
    let basis = VectorFamily::new(xi.space().clone(), basis.vectors().to_vec(), "polar basis")?;
    let basis_defect = basis.gram_defect();
    let report = classify_pair(&basis, xi, tol)?;
    let operator_residual = relative_residual(&report.operator, &u)?;
    let positivity = positivity_report(&u, tol.positivity_threshold(u.operator_norm()?))?;
    let is_b_riesz = positivity.is_positive && report.is_biframe;
    Ok(BRieszCertificate {
        is_b_riesz,
        u: Some(u),
        basis: Some(basis),
        residual,
        basis_defect,
        operator_residual,
        condition_number: condition,
        report: Some(report),
    })
}

/// Membership of `Ξ` in the class of families forming a biframe with the basis `E`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OnbMembership {
    pub member: bool,
    /// `U` with `U e_k = Ξ_k`.
    pub u: LinearOperator,
    pub positivity: PositivityReport,
    /// `‖T_{E,Ξ} − U‖ / max(1, ‖U‖)`.
    pub operator_residual: f64,
}

/// Solves `U e_k = Ξ_k` and tests `U` for self-adjoint positive definiteness
/// (defect ≤ 1e-10 and `min eig > 1e-10·‖U‖`).
pub fn onb_class_check(basis: &VectorFamily, xi: &VectorFamily, tol: &Tolerances) -> Result<OnbMembership> {
    basis.ensure_orthonormal_basis()?;
    xi.check_compatible(basis)?;
    // U = F_Ξ · F_E*, since F_E is unitary.
    let u = LinearOperator::new(xi.column_matrix() * basis.column_matrix().adjoint(), xi.field())?;
    let norm = u.operator_norm()?;
    let positivity = positivity_report(&u, tol.positivity * norm)?;
    let member = positivity.is_positive && positivity.self_adjoint_defect <= tol.self_adjoint;
    let operator_residual = relative_residual(&assemble_biframe_operator(basis, xi)?, &u)?;
    Ok(OnbMembership {
        member,
        u,
        positivity,
        operator_residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductPairReport {
    pub report: BiframeReport,
    /// `‖T_{UE,VE} − V·U*‖ / max(1, ‖V·U*‖)`.
    pub identity_residual: f64,
    /// Positivity of the composition `V·U` named in the hypothesis.
    pub vu_positivity: PositivityReport,
    /// Positivity of the assembled operator `V·U*`.
    pub operator_positivity: PositivityReport,
}

/// Classifies `(U·E, V·E)`; its operator is `Σ ⟨ξ, U e_ω⟩ V e_ω = V·U*·ξ`.
pub fn product_pair_check(
    basis: &VectorFamily,
    u: &LinearOperator,
    v: &LinearOperator,
    tol: &Tolerances,
) -> Result<ProductPairReport> {
    basis.ensure_orthonormal_basis()?;
    let report = classify_pair(&basis.mapped(u, "U e")?, &basis.mapped(v, "V e")?, tol)?;
    let vu_star = v.compose(&u.adjoint())?;
    let identity_residual = relative_residual(&report.operator, &vu_star)?;
    let vu = v.compose(u)?;
    let vu_positivity = positivity_report(&vu, tol.positivity_threshold(vu.operator_norm()?))?;
    let operator_positivity = positivity_report(
        &report.operator,
        tol.positivity_threshold(report.operator.operator_norm()?),
    )?;
    Ok(ProductPairReport {
        report,
        identity_residual,
        vu_positivity,
        operator_positivity,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualConstruction {
    #[serde(skip)]
    pub phi: VectorFamily,
    pub report: BiframeReport,
    /// `‖T_{Ξ,Φ} − Q^{-1}‖ / max(1, ‖Q^{-1}‖)`.
    pub residual: f64,
}

/// `Φ_ω = (T_Ξ Q)^{-1} Ξ_ω + η_ω − Σ_k μ_k ⟨T_Ξ^{-1} Ξ_ω, Ξ_k⟩ η_k`, for which
/// `T_{Ξ,Φ} = Q^{-1}` whatever the Bessel family `η`.
pub fn construct_dual_family(
    xi: &VectorFamily,
    q: &LinearOperator,
    eta: &VectorFamily,
    tol: &Tolerances,
) -> Result<DualConstruction> {
    xi.check_compatible(eta)?;
    let defect = q.self_adjoint_defect()?;
    if defect > tol.self_adjoint {
        return Err(Error::NotSelfAdjoint { defect });
    }
    let q_pos = positivity_report(q, tol.positivity_threshold(q.operator_norm()?))?;
    if !q_pos.is_positive {
        return Err(Error::NotPositiveDefinite {
            min_eig: q_pos.hermitian_min_eig,
        });
    }
    let t_xi = frame_operator(xi)?;
    let t_xi_inv = t_xi.inverse(tol.max_condition)?;
    let lead = t_xi.compose(q)?.inverse(tol.max_condition)?;
    let canonical = xi.mapped(&t_xi_inv, "canonical dual")?;
    let weights = xi.space().weights();

    let mut vectors = Vec::with_capacity(xi.len());
    for (x, (dual_x, e)) in xi.vectors().iter().zip(canonical.vectors().iter().zip(eta.vectors())) {
        let mut v = lead.apply(x)?.add(e)?;
        for ((xk, ek), &wk) in xi.vectors().iter().zip(eta.vectors()).zip(weights) {
            let coef = crate::linalg::inner(dual_x, xk)? * wk;
            v = v.sub(&ek.scale(coef))?;
        }
        vectors.push(v);
    }
    let phi = VectorFamily::new(xi.space().clone(), vectors, "constructed dual")?;
    let report = classify_pair(xi, &phi, tol)?;
    let q_inv = q.inverse(tol.max_condition)?;
    let residual = relative_residual(&report.operator, &q_inv)?;
    Ok(DualConstruction { phi, report, residual })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszTransfer {
    pub is_biframe: bool,
    pub xi_invertible: bool,
    pub phi_invertible: bool,
    /// `max_ω ‖Φ_ω − T_{Ξ,Φ} T_Ξ^{-1} Ξ_ω‖ / max(1, max ‖Φ_ω‖)` when both are invertible.
    pub relation_residual: Option<f64>,
    pub holds: bool,
}

/// For a biframe `(Ξ, Φ)` on a square counting measure: `Ξ` is a Riesz basis iff `Φ`
/// is, and then `Φ_ω = T_{Ξ,Φ} T_Ξ^{-1} Ξ_ω`. A pair that is not a biframe yields
/// `holds = false`.
pub fn riesz_transfer_check(xi: &VectorFamily, phi: &VectorFamily, tol: &Tolerances) -> Result<RieszTransfer> {
    ensure_square_counting(xi)?;
    xi.check_compatible(phi)?;
    let report = classify_pair(xi, phi, tol)?;
    let xi_invertible = xi.column_operator()?.condition_number()? <= tol.max_condition;
    let phi_invertible = phi.column_operator()?.condition_number()? <= tol.max_condition;
    let mut relation_residual = None;
    if report.is_biframe && xi_invertible && phi_invertible {
        let t_xi_inv = frame_operator(xi)?.inverse(tol.max_condition)?;
        let map = report.operator.compose(&t_xi_inv)?;
        let scale = phi.vectors().iter().map(HVector::norm).fold(1.0, f64::max);
        let mut worst: f64 = 0.0;
        for (x, p) in xi.vectors().iter().zip(phi.vectors()) {
            worst = worst.max(map.apply(x)?.sub(p)?.norm());
        }
        relation_residual = Some(worst / scale);
    }
    let holds = report.is_biframe
        && xi_invertible == phi_invertible
        && relation_residual.is_none_or(|r| r <= tol.duality);
    Ok(RieszTransfer {
        is_biframe: report.is_biframe,
        xi_invertible,
        phi_invertible,
        relation_residual,
        holds,
    })
}
