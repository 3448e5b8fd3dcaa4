//! Biframe operators, optimal bounds and classification.
//!
//! For families `Ξ, Φ` on a common measure space the biframe operator is
//! `T_{Ξ,Φ} ξ = ∫ ⟨ξ, Ξ_ω⟩ Φ_ω dμ(ω)`, assembled as the weighted sum of rank-one
//! terms `Φ_ω ⊗ conj(Ξ_ω)`. Its quadratic form is the middle term of the biframe
//! inequality, so the optimal bounds are the extreme eigenvalues of its Hermitian part.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{CoefficientVector, VectorFamily};
use crate::linalg::{inner, HVector, LinearOperator, Matrix, Scalar, DEFAULT_SELF_ADJOINT_TOL};
use crate::random;

/// Number of random `(ξ, η)` pairs used to spot-check the inner-product form of duality.
pub const DUALITY_SAMPLES: usize = 32;
const DUALITY_SEED: u64 = 0x0D0A_1F00;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative positivity tolerance: `C > positivity · max(1, ‖T‖)`.
    pub positivity: f64,
    /// `‖T − I‖ ≤ parseval` (operator norm).
    pub parseval: f64,
    /// Operators with a larger condition number count as singular.
    pub max_condition: f64,
    /// Relative self-adjointness tolerance `‖T − T*‖/‖T‖`.
    pub self_adjoint: f64,
    /// Operator identities such as `T_{Φ,Ξ} = I`, scaled by `max(1, ‖reference‖)`.
    pub duality: f64,
    /// Relative residual allowed in reconstruction.
    pub reconstruction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            positivity: 1e-10,
            parseval: 1e-8,
            max_condition: 1e12,
            self_adjoint: DEFAULT_SELF_ADJOINT_TOL,
            duality: 1e-9,
            reconstruction: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn positivity_threshold(&self, norm: f64) -> f64 {
        self.positivity * norm.max(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.positivity,
            self.parseval,
            self.max_condition,
            self.self_adjoint,
            self.duality,
            self.reconstruction,
        ];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::BadSpec("tolerances must be finite and positive".into()))
        }
    }
}

/// `‖a − b‖ / max(1, ‖b‖)`.
pub fn relative_residual(a: &LinearOperator, b: &LinearOperator) -> Result<f64> {
    Ok(a.distance(b)? / b.operator_norm()?.max(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiframeReport {
    pub lower_bound_c: f64,
    pub upper_bound_d: f64,
    pub operator: LinearOperator,
    pub hermitian_spectrum: Vec<f64>,
    pub is_bessel_pair: bool,
    pub is_biframe: bool,
    pub is_parseval: bool,
    pub is_pair_frame: bool,
    pub self_adjoint_defect: f64,
    pub condition_number: f64,
    pub parseval_distance: f64,
    pub tolerances: Tolerances,
}

/// `Σ_ω μ_ω · Φ_ω ⊗ conj(Ξ_ω)`.
pub fn assemble_biframe_operator(xi: &VectorFamily, phi: &VectorFamily) -> Result<LinearOperator> {
    xi.check_compatible(phi)?;
    let n = xi.dimension();
    let mut acc = Matrix::zeros(n, n);
    for ((a, b), &w) in xi.vectors().iter().zip(phi.vectors()).zip(xi.space().weights()) {
        let a = a.entries();
        let b = b.entries();
        for c in 0..n {
            let coef = a[c].conj() * w;
            for r in 0..n {
                acc[(r, c)] += b[r] * coef;
            }
        }
    }
    LinearOperator::new(acc, xi.field())
}

/// Frame operator `T_Ξ = T_{Ξ,Ξ}`.
pub fn frame_operator(xi: &VectorFamily) -> Result<LinearOperator> {
    assemble_biframe_operator(xi, xi)
}

/// Optimal `(C, D)`: extreme eigenvalues of the Hermitian part.
pub fn biframe_bounds(t: &LinearOperator) -> Result<(f64, f64)> {
    let s = t.hermitian_spectrum()?;
    Ok((s[0], s[s.len() - 1]))
}

/// Classifies an already assembled biframe operator.
pub fn classify_operator(t: &LinearOperator, tol: &Tolerances) -> Result<BiframeReport> {
    let spectrum = t.hermitian_spectrum()?;
    let norm = t.operator_norm()?;
    let condition = t.condition_number()?;
    let defect = t.self_adjoint_defect()?;
    let lower = spectrum[0];
    let upper = spectrum[spectrum.len() - 1];
    let parseval_distance = t.distance(&LinearOperator::identity(t.dim(), t.field()))?;
    let is_bessel_pair = t.matrix().iter().all(|z| z.re.is_finite() && z.im.is_finite());
    let is_biframe = is_bessel_pair && lower > tol.positivity_threshold(norm);
    Ok(BiframeReport {
        lower_bound_c: lower,
        upper_bound_d: upper,
        operator: t.clone(),
        hermitian_spectrum: spectrum,
        is_bessel_pair,
        is_biframe,
        is_parseval: is_biframe && parseval_distance <= tol.parseval,
        is_pair_frame: condition <= tol.max_condition,
        self_adjoint_defect: defect,
        condition_number: condition,
        parseval_distance,
        tolerances: *tol,
    })
}

pub fn classify_pair(xi: &VectorFamily, phi: &VectorFamily, tol: &Tolerances) -> Result<BiframeReport> {
    classify_operator(&assemble_biframe_operator(xi, phi)?, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapCheck {
    /// Entrywise `|T_{Φ,Ξ} − T_{Ξ,Φ}*|`, scaled by `max(1, max |T|)`.
    pub adjoint_residual: f64,
    pub forward_bounds: (f64, f64),
    pub reverse_bounds: (f64, f64),
    pub bound_gap: f64,
    pub holds: bool,
}

/// `(Ξ, Φ)` and `(Φ, Ξ)` have mutually adjoint operators and identical bounds.
pub fn swap_check(xi: &VectorFamily, phi: &VectorFamily) -> Result<SwapCheck> {
    let forward = assemble_biframe_operator(xi, phi)?;
    let reverse = assemble_biframe_operator(phi, xi)?;
    let scale = forward.matrix().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let adjoint_residual = reverse.max_abs_diff(&forward.adjoint())? / scale;
    let forward_bounds = biframe_bounds(&forward)?;
    let reverse_bounds = biframe_bounds(&reverse)?;
    let bound_gap = (forward_bounds.0 - reverse_bounds.0)
        .abs()
        .max((forward_bounds.1 - reverse_bounds.1).abs());
    Ok(SwapCheck {
        adjoint_residual,
        forward_bounds,
        reverse_bounds,
        bound_gap,
        holds: adjoint_residual <= 1e-12 && bound_gap <= 1e-10 * scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `ξ = ∫ ⟨ξ, T_{Φ,Ξ}^{-1} Ξ_ω⟩ Φ_ω dμ`.
    Left,
    /// `ξ = ∫ ⟨ξ, Ξ_ω⟩ T_{Ξ,Φ}^{-1} Φ_ω dμ`.
    Right,
}

/// Evaluates one side of the reconstruction formula at `ξ`.
pub fn reconstruct(
    xi: &VectorFamily,
    phi: &VectorFamily,
    vector: &HVector,
    side: Side,
    tol: &Tolerances,
) -> Result<HVector> {
    let t = assemble_biframe_operator(xi, phi)?;
    match side {
        Side::Left => {
            // T_{Φ,Ξ} = T_{Ξ,Φ}*
            let t_rev_inv = t.adjoint().inverse(tol.max_condition)?;
            let dual = xi.mapped(&t_rev_inv, "left dual")?;
            phi.synthesis(&dual.analysis(vector)?)
        }
        Side::Right => {
            let t_inv = t.inverse(tol.max_condition)?;
            let dual = phi.mapped(&t_inv, "right dual")?;
            dual.synthesis(&xi.analysis(vector)?)
        }
    }
}

/// `ω ↦ ⟨ξ, T^{-1} Ξ_ω⟩` with `T = T_{Ξ,Φ}`.
pub fn biframe_coefficients(
    xi: &VectorFamily,
    phi: &VectorFamily,
    vector: &HVector,
    tol: &Tolerances,
) -> Result<CoefficientVector> {
    let t_inv = assemble_biframe_operator(xi, phi)?.inverse(tol.max_condition)?;
    xi.mapped(&t_inv, "coefficient family")?.analysis(vector)
}

/// Without `q`: the pair `(Ξ, PΞ)`; with `q`: the pair `(PΞ, QΞ)`.
pub fn controlled_frame_check(
    xi: &VectorFamily,
    p: &LinearOperator,
    q: Option<&LinearOperator>,
    tol: &Tolerances,
) -> Result<BiframeReport> {
    let p_xi = xi.mapped(p, "P xi")?;
    match q {
        None => classify_pair(xi, &p_xi, tol),
        Some(q) => classify_pair(&p_xi, &xi.mapped(q, "Q xi")?, tol),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityCheck {
    /// `‖T_{Φ,Ξ} − I‖`: `ξ = ∫ ⟨ξ, Φ_ω⟩ Ξ_ω dμ`.
    pub condition_i_residual: f64,
    /// `‖T_{Ξ,Φ} − I‖`: `ξ = ∫ ⟨ξ, Ξ_ω⟩ Φ_ω dμ`.
    pub condition_ii_residual: f64,
    /// Worst sampled `|⟨ξ,η⟩ − ∫ ⟨ξ,Ξ_ω⟩⟨Φ_ω,η⟩ dμ|` over unit `ξ, η`.
    pub condition_iii_residual: f64,
    pub conditions_agree: bool,
    pub is_dual: bool,
}

/// Checks the three equivalent forms of duality; `is_dual` is `T_{Φ,Ξ} = I`.
pub fn dual_relation_check(xi: &VectorFamily, phi: &VectorFamily, tol: &Tolerances) -> Result<DualityCheck> {
    let n = xi.dimension();
    let id = LinearOperator::identity(n, xi.field());
    let t_phi_xi = assemble_biframe_operator(phi, xi)?;
    let t_xi_phi = assemble_biframe_operator(xi, phi)?;
    let r1 = t_phi_xi.distance(&id)?;
    let r2 = t_xi_phi.distance(&id)?;

    let mut rng = random::rng(DUALITY_SEED);
    let mut r3: f64 = 0.0;
    for _ in 0..DUALITY_SAMPLES {
        let a = random::gaussian_vector(&mut rng, n, xi.field());
        let b = random::gaussian_vector(&mut rng, n, xi.field());
        let a = a.scale(Scalar::new(1.0 / a.norm(), 0.0));
        let b = b.scale(Scalar::new(1.0 / b.norm(), 0.0));
        let lhs = inner(&a, &b)?;
        let ca = xi.analysis(&a)?;
        let cb = phi.analysis(&b)?;
        let rhs: Scalar = ca
            .values()
            .iter()
            .zip(cb.values())
            .zip(xi.space().weights())
            .map(|((x, y), &w)| x * y.conj() * w)
            .sum();
        r3 = r3.max((lhs - rhs).norm());
    }
    let v1 = r1 <= tol.duality;
    let v2 = r2 <= tol.duality;
    let v3 = r3 <= tol.duality;
    Ok(DualityCheck {
        condition_i_residual: r1,
        condition_ii_residual: r2,
        condition_iii_residual: r3,
        conditions_agree: v1 == v2 && v2 == v3,
        is_dual: v1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GDualCheck {
    /// `‖T_{Φ,Ξ}·A − I‖`.
    pub residual: f64,
    pub holds: bool,
}

/// `Φ` is a g-dual of `Ξ` through `A` iff `ξ = ∫ ⟨Aξ, Φ_ω⟩ Ξ_ω dμ`, i.e. `T_{Φ,Ξ}·A = I`.
pub fn g_dual_check(
    xi: &VectorFamily,
    phi: &VectorFamily,
    a: &LinearOperator,
    tol: &Tolerances,
) -> Result<GDualCheck> {
    let condition = a.condition_number()?;
    if !(condition <= tol.max_condition) {
        return Err(Error::SingularOperator { condition });
    }
    let product = assemble_biframe_operator(phi, xi)?.compose(a)?;
    let residual = product.distance(&LinearOperator::identity(product.dim(), product.field()))?;
    Ok(GDualCheck {
        residual,
        holds: residual <= tol.duality,
    })
}
