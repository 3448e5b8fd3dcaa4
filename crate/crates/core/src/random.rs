//! Seeded random instances. Every generator takes an explicit RNG; there is no
//! global generator state.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::family::VectorFamily;
use crate::linalg::{Field, HVector, LinearOperator, Matrix, Scalar};
use crate::measure::MeasureSpace;

/// Shift added to `G*G` when drawing positive definite operators.
pub const POSITIVE_SHIFT: f64 = 0.1;

pub type InstanceRng = ChaCha8Rng;

pub fn rng(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent per-trial seed derived from a run seed.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_scalar<R: Rng>(rng: &mut R, field: Field) -> Scalar {
    let re: f64 = rng.sample(StandardNormal);
    match field {
        Field::Real => Scalar::new(re, 0.0),
        Field::Complex => {
            let im: f64 = rng.sample(StandardNormal);
            Scalar::new(re, im)
        }
    }
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, n: usize, field: Field) -> Matrix {
    Matrix::from_fn(n, n, |_, _| gaussian_scalar(rng, field))
}

pub fn gaussian_vector<R: Rng>(rng: &mut R, n: usize, field: Field) -> HVector {
    let entries = nalgebra::DVector::from_fn(n, |_, _| gaussian_scalar(rng, field));
    HVector::new(entries, field).expect("finite gaussian entries")
}

pub fn gaussian_operator<R: Rng>(rng: &mut R, n: usize, field: Field) -> LinearOperator {
    LinearOperator::new(gaussian_matrix(rng, n, field), field).expect("finite gaussian entries")
}

/// `G*G + 0.1·I` with Gaussian `G`.
pub fn positive_definite<R: Rng>(rng: &mut R, n: usize, field: Field) -> LinearOperator {
    let g = gaussian_matrix(rng, n, field);
    let m = g.adjoint() * &g + Matrix::identity(n, n) * Scalar::new(POSITIVE_SHIFT, 0.0);
    let m = (&m + m.adjoint()) * Scalar::new(0.5, 0.0);
    LinearOperator::new(m, field).expect("finite entries")
}

/// Unitary from the QR factorization of a Gaussian matrix, with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn unitary<R: Rng>(rng: &mut R, n: usize, field: Field) -> LinearOperator {
    let qr = gaussian_matrix(rng, n, field).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 {
            Scalar::new(1.0, 0.0)
        } else {
            d / d.norm()
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    LinearOperator::new(q, field).expect("finite entries")
}

/// `W₁ · diag(s) · W₂` with unitary `W₁, W₂` and singular values in `[0.5, 2]`.
pub fn invertible<R: Rng>(rng: &mut R, n: usize, field: Field) -> LinearOperator {
    let left = unitary(rng, n, field);
    let right = unitary(rng, n, field);
    let s: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    left.compose(&LinearOperator::diagonal(&s))
        .and_then(|m| m.compose(&right))
        .expect("matching dimensions")
}

/// Gaussian vectors, one per node.
pub fn gaussian_family<R: Rng>(
    rng: &mut R,
    space: &Arc<MeasureSpace>,
    n: usize,
    field: Field,
    label: &str,
) -> VectorFamily {
    let vectors = (0..space.len()).map(|_| gaussian_vector(rng, n, field)).collect();
    VectorFamily::new(space.clone(), vectors, label).expect("consistent family")
}

/// Columns of `op` as a counting-measure family of size `n`.
pub fn columns_family(op: &LinearOperator, label: &str) -> VectorFamily {
    VectorFamily::from_columns(op, label)
}
