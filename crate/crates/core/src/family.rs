//! Vector families `Ξ: Ω → 𝕏` sampled at the nodes of a measure space, with their
//! analysis and synthesis maps.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inner, Field, HVector, LinearOperator, Matrix, Scalar};
use crate::measure::MeasureSpace;

/// Gram-defect tolerance for orthonormality checks.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// One scalar per node, e.g. `ω ↦ ⟨ξ, Ξ_ω⟩`. Serialized as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector(Vec<Scalar>);

impl Serialize for CoefficientVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|z| [z.re, z.im]))
    }
}

impl CoefficientVector {
    pub fn new(values: Vec<Scalar>) -> Self {
        Self(values)
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&v| Scalar::new(v, 0.0)).collect())
    }

    pub fn values(&self) -> &[Scalar] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    space: Arc<MeasureSpace>,
    vectors: Vec<HVector>,
    dimension: usize,
    field: Field,
    label: String,
}

impl VectorFamily {
    pub fn new(
        space: Arc<MeasureSpace>,
        vectors: Vec<HVector>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if vectors.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                found: vectors.len(),
            });
        }
        let dimension = vectors[0].dim();
        let field = vectors[0].field();
        for v in &vectors[1..] {
            if v.dim() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: v.dim(),
                });
            }
            if v.field() != field {
                return Err(Error::FieldMismatch {
                    left: field.name(),
                    right: v.field().name(),
                });
            }
        }
        Ok(Self {
            space,
            vectors,
            dimension,
            field,
            label: label.into(),
        })
    }

    /// Evaluates `evaluator(index, node)` at every node of `space`.
    pub fn sample<F>(space: Arc<MeasureSpace>, label: impl Into<String>, mut evaluator: F) -> Result<Self>
    where
        F: FnMut(usize, f64) -> Result<HVector>,
    {
        let vectors = space
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, &w)| evaluator(i, w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, vectors, label)
    }

    /// Standard orthonormal basis `{e_1, …, e_n}` on the counting measure.
    pub fn standard_basis(n: usize, field: Field) -> Result<Self> {
        let space = Arc::new(MeasureSpace::counting(n)?);
        let vectors = (0..n).map(|k| HVector::basis(n, k, field)).collect();
        Self::new(space, vectors, "onb")
    }

    /// Columns of `op`, indexed by the counting measure.
    pub fn from_columns(op: &LinearOperator, label: impl Into<String>) -> Self {
        let n = op.dim();
        let space = Arc::new(MeasureSpace::counting(n).expect("dimension >= 1"));
        let vectors = (0..n)
            .map(|k| HVector::from_parts(op.matrix().column(k).into_owned(), op.field()))
            .collect();
        Self::new(space, vectors, label).expect("uniform columns")
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn vectors(&self) -> &[HVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn same_space(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space
    }

    /// Errors unless both families share measure space, dimension and field.
    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.same_space(other) {
            return Err(Error::MeasureMismatch);
        }
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: other.dimension,
            });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.name(),
                right: other.field.name(),
            });
        }
        Ok(())
    }

    /// `ω ↦ ⟨ξ, Ξ_ω⟩`.
    pub fn analysis(&self, xi: &HVector) -> Result<CoefficientVector> {
        self.vectors
            .iter()
            .map(|v| inner(xi, v))
            .collect::<Result<Vec<_>>>()
            .map(CoefficientVector)
    }

    /// `Σ_ω μ_ω · c_ω · Ξ_ω`.
    pub fn synthesis(&self, c: &CoefficientVector) -> Result<HVector> {
        if c.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: c.len(),
            });
        }
        let mut acc = nalgebra::DVector::<Scalar>::zeros(self.dimension);
        for ((v, &coef), &w) in self.vectors.iter().zip(c.values()).zip(self.space.weights()) {
            acc += v.entries() * (coef * w);
        }
        let coeff_field = if c.values().iter().any(|z| z.im != 0.0) {
            Field::Complex
        } else {
            Field::Real
        };
        Ok(HVector::from_parts(acc, self.field.join(coeff_field)))
    }

    /// `{op·Ξ_ω}`.
    pub fn mapped(&self, op: &LinearOperator, label: impl Into<String>) -> Result<Self> {
        let vectors = self
            .vectors
            .iter()
            .map(|v| op.apply(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.space.clone(), vectors, label)
    }

    /// `{α·Ξ_ω}`.
    pub fn scaled(&self, alpha: Scalar) -> Self {
        let vectors: Vec<HVector> = self.vectors.iter().map(|v| v.scale(alpha)).collect();
        let field = vectors[0].field();
        Self {
            space: self.space.clone(),
            vectors,
            dimension: self.dimension,
            field,
            label: self.label.clone(),
        }
    }

    /// `dimension × len` matrix whose columns are the family members.
    pub fn column_matrix(&self) -> Matrix {
        Matrix::from_fn(self.dimension, self.len(), |r, c| self.vectors[c].entries()[r])
    }

    /// Square column matrix as an operator; requires `len == dimension`.
    pub fn column_operator(&self) -> Result<LinearOperator> {
        if self.len() != self.dimension {
            return Err(Error::SizeMismatch {
                nodes: self.len(),
                dimension: self.dimension,
            });
        }
        LinearOperator::new(self.column_matrix(), self.field)
    }

    /// Largest entrywise deviation of the Gram matrix `⟨e_j, e_i⟩` from the identity.
    pub fn gram_defect(&self) -> f64 {
        let f = self.column_matrix();
        let gram = f.adjoint() * f;
        let n = gram.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - Scalar::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Errors unless this is an orthonormal basis indexed by a counting measure.
    pub fn ensure_orthonormal_basis(&self) -> Result<()> {
        if !self.space.is_counting() {
            return Err(Error::NotCounting);
        }
        if self.len() != self.dimension {
            return Err(Error::SizeMismatch {
                nodes: self.len(),
                dimension: self.dimension,
            });
        }
        let defect = self.gram_defect();
        if defect > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(())
    }
}
