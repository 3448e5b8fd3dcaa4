use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

use biframe_core::engine::{
    assemble_biframe_operator, biframe_bounds, classify_pair, frame_operator, g_dual_check, reconstruct, Side,
};
use biframe_core::linalg::{fractional_power, inner, polar_decompose, positivity_report, Matrix};
use biframe_core::random::{gaussian_family, gaussian_vector, invertible, positive_definite, rng, unitary};
use biframe_core::report::{CheckReport, RunReport};
use biframe_core::riesz::{
    b_riesz_check, biorthogonality_check, onb_class_check, product_pair_check, riesz_transfer_check,
};
use biframe_core::{Error, Field, LinearOperator, MeasureSpace, Scalar, Tolerances, VectorFamily};

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Real), Just(Field::Complex)]
}

fn spectral_norm(m: &Matrix) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

fn c(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly(
        nodes in 1usize..=40,
        a in -3.0f64..0.0,
        len in 0.1f64..4.0,
        coeffs in prop::collection::vec(-2.0f64..2.0, 1..=8),
    ) {
        let b = a + len;
        let space = MeasureSpace::gauss_legendre(a, b, nodes).unwrap();
        // Keep the degree within 2n − 1.
        let deg = (coeffs.len() - 1).min(2 * nodes - 1);
        let p = |x: f64| coeffs[..=deg].iter().rev().fold(0.0, |acc, &k| acc * x + k);
        let quad: f64 = space.nodes().iter().zip(space.weights()).map(|(&x, &w)| w * p(x)).sum();
        let exact: f64 = coeffs[..=deg]
            .iter()
            .enumerate()
            .map(|(k, &ck)| ck * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k as f64 + 1.0))
            .sum();
        prop_assert!((quad - exact).abs() <= 1e-11 * (1.0 + exact.abs()), "{quad} vs {exact}");
        prop_assert!(space.weights().iter().all(|&w| w > 0.0));
        prop_assert!((space.total_mass() - len).abs() <= 1e-12 * len.max(1.0));
    }

    #[test]
    fn operator_matches_pointwise_form(seed in any::<u64>(), n in 2usize..=6, nodes in 1usize..=20, field in field_strategy()) {
        let mut r = rng(seed);
        let space = Arc::new(MeasureSpace::gauss_legendre(0.0, 1.0, nodes).unwrap());
        let xi = gaussian_family(&mut r, &space, n, field, "xi");
        let phi = gaussian_family(&mut r, &space, n, field, "phi");
        let t = assemble_biframe_operator(&xi, &phi).unwrap();
        let v = gaussian_vector(&mut r, n, field);
        // ⟨Tξ, ξ⟩ = ∫ ⟨ξ, Ξ_ω⟩⟨Φ_ω, ξ⟩ dμ.
        let mut integral = Scalar::new(0.0, 0.0);
        for ((x, p), &w) in xi.vectors().iter().zip(phi.vectors()).zip(space.weights()) {
            integral += inner(&v, x).unwrap() * inner(p, &v).unwrap() * w;
        }
        let form = t.quadratic_form(&v).unwrap();
        let scale = 1.0 + integral.norm();
        prop_assert!((form - integral).norm() <= 1e-12 * scale * (nodes as f64));
    }

    #[test]
    fn bounds_enclose_the_form(seed in any::<u64>(), n in 2usize..=6, field in field_strategy()) {
        let mut r = rng(seed);
        let space = Arc::new(MeasureSpace::counting(n + 3).unwrap());
        let xi = gaussian_family(&mut r, &space, n, field, "xi");
        let phi = gaussian_family(&mut r, &space, n, field, "phi");
        let t = assemble_biframe_operator(&xi, &phi).unwrap();
        let (lo, hi) = biframe_bounds(&t).unwrap();
        for _ in 0..10 {
            let v = gaussian_vector(&mut r, n, field);
            let nrm2 = v.norm().powi(2);
            let re = t.quadratic_form(&v).unwrap().re;
            prop_assert!(re >= lo * nrm2 - 1e-10 * nrm2 * (1.0 + lo.abs()));
            prop_assert!(re <= hi * nrm2 + 1e-10 * nrm2 * (1.0 + hi.abs()));
        }
    }

    #[test]
    fn frame_operator_is_self_adjoint_and_positive(seed in any::<u64>(), n in 2usize..=6, field in field_strategy()) {
        let mut r = rng(seed);
        let space = Arc::new(MeasureSpace::gauss_legendre(-1.0, 1.0, 2 * n).unwrap());
        let xi = gaussian_family(&mut r, &space, n, field, "xi");
        let t = frame_operator(&xi).unwrap();
        prop_assert!(t.self_adjoint_defect().unwrap() <= 1e-13);
        prop_assert!(t.hermitian_spectrum().unwrap()[0] > 0.0);
        let rep = classify_pair(&xi, &xi, &Tolerances::default()).unwrap();
        prop_assert!(rep.is_biframe);
    }

    #[test]
    fn scaling_families_scales_operator(seed in any::<u64>(), n in 2usize..=5, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut r = rng(seed);
        let space = Arc::new(MeasureSpace::counting(n + 1).unwrap());
        let xi = gaussian_family(&mut r, &space, n, Field::Complex, "xi");
        let phi = gaussian_family(&mut r, &space, n, Field::Complex, "phi");
        let a = Scalar::new(alpha, 0.5);
        let b = Scalar::new(beta, -0.25);
        let t = assemble_biframe_operator(&xi, &phi).unwrap();
        let ts = assemble_biframe_operator(&xi.scaled(a), &phi.scaled(b)).unwrap();
        // Conjugate-linear in Ξ, linear in Φ.
        let expect = t.matrix() * (b * a.conj());
        prop_assert!(spectral_norm(&(ts.matrix() - expect)) <= 1e-12 * (1.0 + spectral_norm(ts.matrix())));
    }

    #[test]
    fn reconstruction_recovers_vectors(seed in any::<u64>(), n in 2usize..=6, field in field_strategy()) {
        let mut r = rng(seed);
        let space = Arc::new(MeasureSpace::counting(n + 2).unwrap());
        let xi = gaussian_family(&mut r, &space, n, field, "xi");
        let m = invertible(&mut r, n, field);
        let phi = xi.mapped(&m, "phi").unwrap();
        let v = gaussian_vector(&mut r, n, field);
        let tol = Tolerances::default();
        for side in [Side::Left, Side::Right] {
            let back = reconstruct(&xi, &phi, &v, side, &tol).unwrap();
            prop_assert!((back.entries() - v.entries()).norm() <= 1e-9 * v.norm());
        }
    }

    #[test]
    fn fractional_powers_compose(seed in any::<u64>(), n in 1usize..=6, field in field_strategy(), a in -2.0f64..2.0) {
        let mut r = rng(seed);
        let p = positive_definite(&mut r, n, field);
        let tol = 1e-10;
        let pa = fractional_power(&p, a, tol).unwrap();
        let pb = fractional_power(&p, 1.0 - a, tol).unwrap();
        let prod = pa.matrix() * pb.matrix();
        prop_assert!(spectral_norm(&(prod - p.matrix())) <= 1e-9 * spectral_norm(p.matrix()).max(1.0));
        let root = fractional_power(&p, 0.5, tol).unwrap();
        prop_assert!(root.self_adjoint_defect().unwrap() <= 1e-12);
        prop_assert!(root.hermitian_spectrum().unwrap()[0] > 0.0);
    }

    #[test]
    fn polar_factors_are_positive_and_unitary(seed in any::<u64>(), n in 1usize..=6, field in field_strategy()) {
        let mut r = rng(seed);
        let f = invertible(&mut r, n, field);
        let polar = polar_decompose(&f).unwrap();
        let q = polar.unitary.matrix();
        let p = polar.positive.matrix();
        prop_assert!(spectral_norm(&(q.adjoint() * q - Matrix::identity(n, n))) <= 1e-12);
        let fit = spectral_norm(&(p * q - f.matrix())) / spectral_norm(f.matrix());
        prop_assert!(fit <= 1e-12, "fit {fit:e}");
        prop_assert!(spectral_norm(&(p - p.adjoint())) <= 1e-14);
        let pos = positivity_report(&polar.positive, 0.0).unwrap();
        prop_assert!(pos.is_positive && pos.is_self_adjoint);
    }

    #[test]
    fn unitary_image_of_basis_is_b_riesz_with_identity(seed in any::<u64>(), n in 2usize..=6, field in field_strategy()) {
        let mut r = rng(seed);
        let w = unitary(&mut r, n, field);
        let xi = VectorFamily::from_columns(&w, "w");
        let cert = b_riesz_check(&xi, &Tolerances::default()).unwrap();
        prop_assert!(cert.is_b_riesz);
        let u = cert.u.unwrap();
        prop_assert!(spectral_norm(&(u.matrix() - Matrix::identity(n, n))) <= 1e-10);
    }

    #[test]
    fn onb_class_holds_exactly_for_positive_operators(seed in any::<u64>(), n in 2usize..=5, field in field_strategy()) {
        let mut r = rng(seed);
        let tol = Tolerances::default();
        let basis = VectorFamily::standard_basis(n, field).unwrap();
        let p = positive_definite(&mut r, n, field);
        let member = onb_class_check(&basis, &basis.mapped(&p, "P e").unwrap(), &tol).unwrap();
        prop_assert!(member.member);
        prop_assert!(member.operator_residual <= 1e-10);
        let neg = LinearOperator::new(p.matrix() * c(-1.0), field).unwrap();
        let outsider = onb_class_check(&basis, &basis.mapped(&neg, "-P e").unwrap(), &tol).unwrap();
        prop_assert!(!outsider.member);
    }

    #[test]
    fn product_pair_operator_is_v_u_adjoint(seed in any::<u64>(), n in 2usize..=5, field in field_strategy()) {
        let mut r = rng(seed);
        let basis = VectorFamily::standard_basis(n, field).unwrap();
        let u = invertible(&mut r, n, field);
        let v = invertible(&mut r, n, field);
        let out = product_pair_check(&basis, &u, &v, &Tolerances::default()).unwrap();
        let expect = v.matrix() * u.matrix().adjoint();
        prop_assert!(spectral_norm(&(out.report.operator.matrix() - expect)) <= 1e-12 * 4.0);
    }

    #[test]
    fn canonical_dual_is_biorthogonal_for_bases(seed in any::<u64>(), n in 2usize..=6, field in field_strategy()) {
        let mut r = rng(seed);
        let f = invertible(&mut r, n, field);
        let xi = VectorFamily::from_columns(&f, "xi");
        // Columns of (F*)^{-1} are the biorthogonal system of the columns of F.
        let dual_m = f.matrix().adjoint().try_inverse().unwrap();
        let dual = VectorFamily::from_columns(&LinearOperator::new(dual_m, field).unwrap(), "dual");
        prop_assert!(biorthogonality_check(&xi, &dual).unwrap());
        let tol = Tolerances::default();
        let transfer = riesz_transfer_check(&xi, &dual, &tol).unwrap();
        prop_assert!(transfer.holds);
        let rep = classify_pair(&xi, &dual, &tol).unwrap();
        prop_assert!(rep.is_parseval);
    }

    #[test]
    fn g_dual_with_inverse_frame_operator(seed in any::<u64>(), n in 2usize..=5, field in field_strategy()) {
        let mut r = rng(seed);
        let space = Arc::new(MeasureSpace::counting(n + 2).unwrap());
        let xi = gaussian_family(&mut r, &space, n, field, "xi");
        let a = invertible(&mut r, n, field);
        let tol = Tolerances::default();
        // Φ = MΞ gives T_{Φ,Ξ} = T_Ξ M*, so M = (T_Ξ A*)^{-1} makes T_{Φ,Ξ}·A = I.
        let t = frame_operator(&xi).unwrap().matrix().clone();
        let m = (t * a.matrix().adjoint()).try_inverse().unwrap();
        let phi = xi.mapped(&LinearOperator::new(m, field).unwrap(), "phi").unwrap();
        let g = g_dual_check(&xi, &phi, &a, &tol).unwrap();
        prop_assert!(g.holds, "residual {}", g.residual);
    }

    #[test]
    fn report_floats_round_trip(values in prop::collection::vec(any::<f64>(), 1..10)) {
        let mut run = RunReport::new("t", "floats", Tolerances::default(), false);
        let mut chk = CheckReport::new("c", "noop");
        chk.computed = serde_json::json!(values.iter().map(|&v| serde_json::json!(v)).collect::<Vec<_>>());
        run.push(chk);
        let back: serde_json::Value = serde_json::from_str(&run.to_json()).unwrap();
        let arr = back["checks"][0]["computed"].as_array().unwrap();
        for (v, got) in values.iter().zip(arr) {
            if v.is_finite() {
                prop_assert_eq!(got.as_f64(), Some(*v));
            } else {
                prop_assert!(got.is_null());
            }
        }
    }
}

#[test]
fn b_riesz_requires_a_square_counting_family() {
    let tol = Tolerances::default();
    let space = Arc::new(MeasureSpace::gauss_legendre(0.0, 1.0, 2).unwrap());
    let xi = gaussian_family(&mut rng(1), &space, 2, Field::Real, "xi");
    assert_eq!(b_riesz_check(&xi, &tol).unwrap_err(), Error::NotCounting);
    let space = Arc::new(MeasureSpace::counting(3).unwrap());
    let xi = gaussian_family(&mut rng(1), &space, 2, Field::Real, "xi");
    assert!(matches!(b_riesz_check(&xi, &tol).unwrap_err(), Error::SizeMismatch { .. }));
}

#[test]
fn fractional_power_rejects_non_self_adjoint() {
    let n = LinearOperator::from_real_rows(&[[2.0, 1.0], [3.0, 4.0]]).unwrap();
    assert!(matches!(fractional_power(&n, 0.5, 1e-10), Err(Error::NotSelfAdjoint { .. })));
    let neg = LinearOperator::diagonal(&[1.0, -1.0]);
    assert!(matches!(fractional_power(&neg, 0.5, 1e-10), Err(Error::NotPositiveDefinite { .. })));
}

#[test]
fn families_on_different_spaces_do_not_pair() {
    let a = Arc::new(MeasureSpace::counting(3).unwrap());
    let b = Arc::new(MeasureSpace::gauss_legendre(0.0, 1.0, 3).unwrap());
    let mut r = rng(5);
    let xi = gaussian_family(&mut r, &a, 2, Field::Real, "xi");
    let phi = gaussian_family(&mut r, &b, 2, Field::Real, "phi");
    assert!(assemble_biframe_operator(&xi, &phi).is_err());
}

#[test]
fn seeded_generators_are_reproducible() {
    let m1 = positive_definite(&mut rng(99), 5, Field::Complex);
    let m2 = positive_definite(&mut rng(99), 5, Field::Complex);
    assert_eq!(m1, m2);
    let mut r = rng(3);
    let x: f64 = r.random();
    let mut r = rng(3);
    assert_eq!(x, r.random::<f64>());
    let _: DMatrix<Scalar> = m1.matrix().clone();
}
