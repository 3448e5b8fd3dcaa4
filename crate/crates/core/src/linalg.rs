//! Dense vectors and operators over ℝⁿ or ℂⁿ.
//!
//! Every value is stored with complex entries plus a [`Field`] tag; real-field data
//! keeps zero imaginary parts. The inner product is linear in the first slot and
//! conjugate-linear in the second.

use faer::Mat;
use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Scalar = Complex<f64>;
pub type Matrix = DMatrix<Scalar>;

/// Relative self-adjointness tolerance used when no other is supplied.
pub const DEFAULT_SELF_ADJOINT_TOL: f64 = 1e-10;

const EIGEN_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }

    /// Smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Complex || other == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        }
    }

    fn of_scalar(z: Scalar) -> Field {
        if z.im == 0.0 {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

fn check_entries<'a>(entries: impl IntoIterator<Item = &'a Scalar>, field: Field) -> Result<()> {
    for z in entries {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if field == Field::Real && z.im != 0.0 {
            return Err(Error::FieldMismatch {
                left: "real",
                right: "complex",
            });
        }
    }
    Ok(())
}

fn field_mismatch(a: Field, b: Field) -> Error {
    Error::FieldMismatch {
        left: a.name(),
        right: b.name(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HVector {
    entries: DVector<Scalar>,
    field: Field,
}

impl HVector {
    pub fn new(entries: DVector<Scalar>, field: Field) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        check_entries(entries.iter(), field)?;
        Ok(Self { entries, field })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(
            DVector::from_iterator(values.len(), values.iter().map(|&x| Scalar::new(x, 0.0))),
            Field::Real,
        )
    }

    pub fn from_complex(values: &[Scalar]) -> Result<Self> {
        Self::new(DVector::from_column_slice(values), Field::Complex)
    }

    pub fn zeros(dim: usize, field: Field) -> Self {
        Self {
            entries: DVector::zeros(dim.max(1)),
            field,
        }
    }

    /// Standard basis vector `e_k` (0-based `k`).
    pub fn basis(dim: usize, k: usize, field: Field) -> Self {
        let mut v = Self::zeros(dim, field);
        v.entries[k] = Scalar::new(1.0, 0.0);
        v
    }

    pub(crate) fn from_parts(entries: DVector<Scalar>, field: Field) -> Self {
        Self { entries, field }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn entries(&self) -> &DVector<Scalar> {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn scale(&self, alpha: Scalar) -> Self {
        Self {
            entries: &self.entries * alpha,
            field: self.field.join(Field::of_scalar(alpha)),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            entries: &self.entries + &other.entries,
            field: self.field,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            entries: &self.entries - &other.entries,
            field: self.field,
        })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if self.field != other.field {
            return Err(field_mismatch(self.field, other.field));
        }
        Ok(())
    }
}

/// `⟨u, v⟩ = Σ u_i · conj(v_i)`.
pub fn inner(u: &HVector, v: &HVector) -> Result<Scalar> {
    u.check_compatible(v)?;
    Ok(u.entries
        .iter()
        .zip(v.entries.iter())
        .map(|(a, b)| a * b.conj())
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    entries: Matrix,
    field: Field,
}

impl LinearOperator {
    pub fn new(entries: Matrix, field: Field) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        if entries.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        check_entries(entries.iter(), field)?;
        Ok(Self { entries, field })
    }

    /// Real operator from row-major data.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.as_ref().len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.as_ref().len(),
                });
            }
        }
        Self::new(
            Matrix::from_fn(n, n, |i, j| Scalar::new(rows[i].as_ref()[j], 0.0)),
            Field::Real,
        )
    }

    pub fn from_complex_rows<R: AsRef<[Scalar]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.as_ref().len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.as_ref().len(),
                });
            }
        }
        Self::new(Matrix::from_fn(n, n, |i, j| rows[i].as_ref()[j]), Field::Complex)
    }

    pub fn identity(n: usize, field: Field) -> Self {
        Self {
            entries: Matrix::identity(n, n),
            field,
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            entries: Matrix::from_fn(n, n, |i, j| {
                if i == j {
                    Scalar::new(values[i], 0.0)
                } else {
                    Scalar::new(0.0, 0.0)
                }
            }),
            field: Field::Real,
        }
    }

    /// Counter-clockwise rotation of ℝ² by `degrees`.
    pub fn rotation(degrees: f64) -> Self {
        let (s, c) = degrees.to_radians().sin_cos();
        Self::from_real_rows(&[[c, -s], [s, c]]).expect("2x2 rotation")
    }

    pub(crate) fn from_parts(entries: Matrix, field: Field) -> Self {
        Self { entries, field }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        self.entries[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            field: self.field,
        }
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self {
            entries: &self.entries * &other.entries,
            field: self.field.join(other.field),
        })
    }

    pub fn apply(&self, v: &HVector) -> Result<HVector> {
        self.check_dim(v.dim())?;
        Ok(HVector::from_parts(
            &self.entries * v.entries(),
            self.field.join(v.field()),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self {
            entries: &self.entries + &other.entries,
            field: self.field.join(other.field),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self {
            entries: &self.entries - &other.entries,
            field: self.field.join(other.field),
        })
    }

    pub fn scale(&self, alpha: Scalar) -> Self {
        Self {
            entries: &self.entries * alpha,
            field: self.field.join(Field::of_scalar(alpha)),
        }
    }

    /// `(T + T*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let h = (&self.entries + self.entries.adjoint()) * Scalar::new(0.5, 0.0);
        Self {
            entries: h,
            field: self.field,
        }
    }

    /// `⟨Tξ, ξ⟩`.
    pub fn quadratic_form(&self, xi: &HVector) -> Result<Scalar> {
        inner(&self.apply(xi)?, xi)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        to_faer(&self.entries).singular_values().map_err(|_| Error::SvdFailure)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }

    /// `σ_max / σ_min`, infinite for exactly singular operators.
    pub fn condition_number(&self) -> Result<f64> {
        let s = self.singular_values()?;
        let max = s.first().copied().unwrap_or(0.0);
        let min = s.last().copied().unwrap_or(0.0);
        Ok(if min == 0.0 { f64::INFINITY } else { max / min })
    }

    /// Inverse, refused when the condition number exceeds `max_condition`.
    pub fn inverse(&self, max_condition: f64) -> Result<Self> {
        let condition = self.condition_number()?;
        if !(condition <= max_condition) {
            return Err(Error::SingularOperator { condition });
        }
        let inv = self
            .entries
            .clone()
            .try_inverse()
            .ok_or(Error::SingularOperator { condition })?;
        Ok(Self {
            entries: inv,
            field: self.field,
        })
    }

    /// `‖T − T*‖ / ‖T‖`, zero for the zero operator.
    pub fn self_adjoint_defect(&self) -> Result<f64> {
        let norm = self.operator_norm()?;
        if norm == 0.0 {
            return Ok(0.0);
        }
        let diff = self.sub(&self.adjoint())?;
        Ok(diff.operator_norm()? / norm)
    }

    /// Ascending eigenvalues and matching orthonormal eigenvectors of the Hermitian part.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, Matrix)> {
        let h = self.hermitian_part();
        let eig = SymmetricEigen::try_new(h.entries, f64::EPSILON, EIGEN_MAX_ITER)
            .ok_or(Error::EigenFailure)?;
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let n = self.dim();
        let vectors = Matrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok((values, vectors))
    }

    /// Ascending spectrum of the Hermitian part.
    pub fn hermitian_spectrum(&self) -> Result<Vec<f64>> {
        Ok(self.hermitian_eigen()?.0)
    }

    /// Operator norm of `self − other`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.sub(other)?.operator_norm()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Positivity of an operator's quadratic form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub hermitian_min_eig: f64,
    pub hermitian_max_eig: f64,
    pub hermitian_spectrum: Vec<f64>,
    pub is_positive: bool,
    pub is_self_adjoint: bool,
    pub self_adjoint_defect: f64,
    pub positivity_tolerance: f64,
}

/// Positive means the Hermitian part is positive definite (`min eig > tol`), which
/// need not imply self-adjointness over ℝ.
pub fn positivity_report(t: &LinearOperator, tol: f64) -> Result<PositivityReport> {
    let spectrum = t.hermitian_spectrum()?;
    let defect = t.self_adjoint_defect()?;
    let min = spectrum[0];
    let max = spectrum[spectrum.len() - 1];
    Ok(PositivityReport {
        hermitian_min_eig: min,
        hermitian_max_eig: max,
        hermitian_spectrum: spectrum,
        is_positive: min > tol,
        is_self_adjoint: defect <= DEFAULT_SELF_ADJOINT_TOL,
        self_adjoint_defect: defect,
        positivity_tolerance: tol,
    })
}

/// `T^a = E Λ^a E*` for self-adjoint positive definite `T`.
pub fn fractional_power(t: &LinearOperator, a: f64, tol: f64) -> Result<LinearOperator> {
    let defect = t.self_adjoint_defect()?;
    if defect > tol {
        return Err(Error::NotSelfAdjoint { defect });
    }
    let (values, vectors) = t.hermitian_eigen()?;
    if values[0] <= tol {
        return Err(Error::NotPositiveDefinite { min_eig: values[0] });
    }
    let n = t.dim();
    let scaled = Matrix::from_fn(n, n, |r, c| vectors[(r, c)] * values[c].powf(a));
    Ok(LinearOperator::from_parts(scaled * vectors.adjoint(), t.field()))
}

/// `F = P·Q` with `P` positive semidefinite and `Q` unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Polar {
    pub positive: LinearOperator,
    pub unitary: LinearOperator,
}

/// Left polar decomposition from the SVD `F = U Σ V*`: `P = U Σ U*`, `Q = U V*`.
pub fn polar_decompose(f: &LinearOperator) -> Result<Polar> {
    let svd = to_faer(f.matrix()).svd().map_err(|_| Error::SvdFailure)?;
    let u = from_faer(&svd.U().to_owned());
    let v = from_faer(&svd.V().to_owned());
    let sigma = svd.S().column_vector();
    let n = f.dim();
    let u_sigma = Matrix::from_fn(n, n, |r, c| u[(r, c)] * sigma[c]);
    let positive = u_sigma * u.adjoint();
    // Exact symmetrization removes rounding asymmetry.
    let positive = (&positive + positive.adjoint()) * Scalar::new(0.5, 0.0);
    let unitary = &u * v.adjoint();
    Ok(Polar {
        positive: LinearOperator::from_parts(positive, f.field()),
        unitary: LinearOperator::from_parts(unitary, f.field()),
    })
}

fn to_faer(m: &Matrix) -> Mat<Scalar> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: &Mat<Scalar>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Sufficient test `‖I − T‖ < 1`; `false` is inconclusive.
pub fn neumann_invertibility_check(t: &LinearOperator) -> Result<bool> {
    let id = LinearOperator::identity(t.dim(), t.field());
    Ok(id.sub(t)?.operator_norm()? < 1.0)
}

/// Serializes an operator as nested rows: reals for the real field, `[re, im]` pairs otherwise.
impl Serialize for LinearOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Scalar>> = (0..self.dim())
            .map(|i| self.entries.row(i).iter().copied().collect())
            .collect();
        let mut seq = serializer.serialize_seq(Some(rows.len()))?;
        for row in &rows {
            seq.serialize_element(&ScalarRow(row, self.field))?;
        }
        seq.end()
    }
}

impl Serialize for HVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let row: Vec<Scalar> = self.entries.iter().copied().collect();
        ScalarRow(&row, self.field).serialize(serializer)
    }
}

struct ScalarRow<'a>(&'a [Scalar], Field);

impl Serialize for ScalarRow<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for z in self.0 {
            match self.1 {
                Field::Real => seq.serialize_element(&z.re)?,
                Field::Complex => seq.serialize_element(&[z.re, z.im])?,
            }
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Scalar {
        Scalar::new(re, im)
    }

    fn real(rows: &[[f64; 2]]) -> LinearOperator {
        LinearOperator::from_real_rows(rows).unwrap()
    }

    #[test]
    fn inner_product_conventions() {
        let e1 = HVector::from_real(&[1.0, 0.0]).unwrap();
        let e2 = HVector::from_real(&[0.0, 1.0]).unwrap();
        assert_eq!(inner(&e1, &e2).unwrap(), c(0.0, 0.0));

        let u = HVector::from_complex(&[c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let v = HVector::from_complex(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(inner(&u, &v).unwrap(), c(0.0, 1.0));
        // conjugate-linear in the second slot
        assert_eq!(inner(&v, &u).unwrap(), c(0.0, -1.0));

        let w = HVector::from_real(&[3.0, 4.0]).unwrap();
        assert_eq!(inner(&w, &w).unwrap(), c(25.0, 0.0));
    }

    #[test]
    fn inner_rejects_mismatches() {
        let a = HVector::from_real(&[1.0, 0.0]).unwrap();
        let b = HVector::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(inner(&a, &b), Err(Error::DimensionMismatch { .. })));
        let z = HVector::from_complex(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(inner(&a, &z), Err(Error::FieldMismatch { .. })));
    }

    #[test]
    fn constructors_validate() {
        assert_eq!(HVector::from_real(&[]), Err(Error::DimensionMismatch { expected: 1, found: 0 }));
        assert_eq!(HVector::from_real(&[f64::NAN]), Err(Error::NonFinite));
        assert!(LinearOperator::from_real_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        let m = Matrix::from_element(1, 1, c(0.0, 1.0));
        assert!(matches!(
            LinearOperator::new(m, Field::Real),
            Err(Error::FieldMismatch { .. })
        ));
    }

    #[test]
    fn hermitian_part_examples() {
        assert_eq!(real(&[[2.0, 1.0], [3.0, 4.0]]).hermitian_part(), real(&[[2.0, 2.0], [2.0, 4.0]]));
        let id = LinearOperator::identity(3, Field::Real);
        assert_eq!(id.hermitian_part(), id);
        let h = real(&[[0.0, 1.0 / 3.0], [0.0, 0.5]]).hermitian_part();
        // hand arithmetic: off-diagonals (1/3 + 0)/2 = 1/6
        let expected = real(&[[0.0, 1.0 / 6.0], [1.0 / 6.0, 0.5]]);
        assert!(h.max_abs_diff(&expected).unwrap() < 1e-16);
    }

    #[test]
    fn positivity_of_non_symmetric_matrix() {
        let n = real(&[[2.0, 1.0], [3.0, 4.0]]);
        let r = positivity_report(&n, 1e-10).unwrap();
        assert!(r.is_positive);
        assert!(!r.is_self_adjoint);
        // characteristic polynomial of [[2,2],[2,4]]: λ² − 6λ + 4 = 0
        let root = 5f64.sqrt();
        assert_relative_eq!(r.hermitian_min_eig, 3.0 - root, epsilon = 1e-12);
        assert_relative_eq!(r.hermitian_max_eig, 3.0 + root, epsilon = 1e-12);
        // direct expansion: ⟨N(x,y),(x,y)⟩ = 2x² + 4xy + 4y²
        for (x, y) in [(1.0, 0.0), (0.0, 1.0), (1.0, -1.0), (0.3, 2.0)] {
            let v = HVector::from_real(&[x, y]).unwrap();
            let q = n.quadratic_form(&v).unwrap().re;
            assert_relative_eq!(q, 2.0 * x * x + 4.0 * x * y + 4.0 * y * y, epsilon = 1e-12);
        }
    }

    #[test]
    fn positivity_boundaries() {
        let id = LinearOperator::identity(2, Field::Real);
        let r = positivity_report(&id, 1e-10).unwrap();
        assert!(r.is_positive && r.is_self_adjoint);
        assert_eq!(r.hermitian_min_eig, 1.0);
        let zero = real(&[[0.0, 0.0], [0.0, 0.0]]);
        let r = positivity_report(&zero, 1e-10).unwrap();
        assert!(!r.is_positive);
        assert_eq!(r.self_adjoint_defect, 0.0);
    }

    #[test]
    fn fractional_power_examples() {
        let d = LinearOperator::diagonal(&[4.0, 9.0]);
        let half = fractional_power(&d, 0.5, 1e-10).unwrap();
        assert!(half.max_abs_diff(&LinearOperator::diagonal(&[2.0, 3.0])).unwrap() < 1e-14);
        let inv_half = fractional_power(&d, -0.5, 1e-10).unwrap();
        assert!(inv_half
            .max_abs_diff(&LinearOperator::diagonal(&[0.5, 1.0 / 3.0]))
            .unwrap()
            < 1e-14);
        let t = real(&[[2.0, 1.0], [1.0, 3.0]]);
        let one = fractional_power(&t, 1.0, 1e-10).unwrap();
        assert!(one.max_abs_diff(&t).unwrap() < 1e-13);
    }

    #[test]
    fn fractional_power_refusals() {
        let n = real(&[[2.0, 1.0], [3.0, 4.0]]);
        assert!(matches!(
            fractional_power(&n, 0.5, 1e-10),
            Err(Error::NotSelfAdjoint { .. })
        ));
        let indefinite = LinearOperator::diagonal(&[1.0, -1.0]);
        assert!(matches!(
            fractional_power(&indefinite, 0.5, 1e-10),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn polar_examples() {
        let d = LinearOperator::diagonal(&[2.0, 3.0]);
        let p = polar_decompose(&d).unwrap();
        assert!(p.positive.max_abs_diff(&d).unwrap() < 1e-14);
        assert!(p.unitary.max_abs_diff(&LinearOperator::identity(2, Field::Real)).unwrap() < 1e-14);

        let rot = LinearOperator::rotation(30.0);
        let p = polar_decompose(&rot).unwrap();
        assert!(p.positive.max_abs_diff(&LinearOperator::identity(2, Field::Real)).unwrap() < 1e-14);
        assert!(p.unitary.max_abs_diff(&rot).unwrap() < 1e-14);

        let f = real(&[[1.0, -1.0], [-2.0, 0.0]]);
        let p = polar_decompose(&f).unwrap();
        // oracle: P² must reproduce FF* = [[2,-2],[-2,4]]
        let p2 = p.positive.compose(&p.positive).unwrap();
        assert!(p2.max_abs_diff(&real(&[[2.0, -2.0], [-2.0, 4.0]])).unwrap() < 1e-12);
        let spec = p.positive.hermitian_spectrum().unwrap();
        assert_relative_eq!(spec[0], (3.0 - 5f64.sqrt()).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(spec[1], (3.0 + 5f64.sqrt()).sqrt(), epsilon = 1e-12);
        let back = p.positive.compose(&p.unitary).unwrap();
        assert!(back.distance(&f).unwrap() / f.operator_norm().unwrap() <= 1e-10);
    }

    #[test]
    fn neumann_examples() {
        let half = LinearOperator::identity(2, Field::Real).scale(c(0.5, 0.0));
        assert!(neumann_invertibility_check(&half).unwrap());
        assert!(neumann_invertibility_check(&LinearOperator::identity(2, Field::Real)).unwrap());
        let three = LinearOperator::identity(2, Field::Real).scale(c(3.0, 0.0));
        assert!(!neumann_invertibility_check(&three).unwrap());
        assert!(three.inverse(1e12).is_ok());
    }

    #[test]
    fn inverse_refuses_singular() {
        let s = real(&[[0.0, 1.0 / 3.0], [0.0, 0.5]]);
        assert!(matches!(s.inverse(1e12), Err(Error::SingularOperator { .. })));
    }

    #[test]
    fn serialization_follows_field() {
        let t = real(&[[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(serde_json::to_string(&t).unwrap(), "[[1.0,2.0],[3.0,4.0]]");
        let z = LinearOperator::from_complex_rows(&[[c(0.0, 1.0)]]).unwrap();
        assert_eq!(serde_json::to_string(&z).unwrap(), "[[[0.0,1.0]]]");
    }
}
