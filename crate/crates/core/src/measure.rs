//! Finite surrogates for a measure space `(Ω, μ)`.
//!
//! A [`MeasureSpace`] is a list of nodes with strictly positive weights. Continuous
//! index sets are replaced by a Gauss–Legendre rule on an interval; discrete index
//! sets use the counting measure. Integration is the weighted sum over nodes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{HVector, Scalar};

/// Node count used when a scenario does not specify one.
pub const DEFAULT_QUADRATURE_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    GaussLegendre,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureKind {
    Counting,
    Quadrature {
        interval: [f64; 2],
        rule: QuadratureRule,
        node_count: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureSpace {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: MeasureKind,
}

impl MeasureSpace {
    /// Gauss–Legendre rule with `node_count` nodes on `[a, b]` (Lebesgue measure).
    pub fn gauss_legendre(a: f64, b: f64, node_count: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        if node_count == 0 {
            return Err(Error::ZeroNodes);
        }
        let (x, w) = gauss_legendre_reference(node_count);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let nodes = x.iter().map(|&t| mid + half * t).collect();
        let weights = w.iter().map(|&v| half * v).collect();
        Ok(Self {
            nodes,
            weights,
            kind: MeasureKind::Quadrature {
                interval: [a, b],
                rule: QuadratureRule::GaussLegendre,
                node_count,
            },
        })
    }

    /// Counting measure on `{1, …, size}`.
    pub fn counting(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::ZeroNodes);
        }
        Ok(Self {
            nodes: (1..=size).map(|i| i as f64).collect(),
            weights: vec![1.0; size],
            kind: MeasureKind::Counting,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_counting(&self) -> bool {
        matches!(self.kind, MeasureKind::Counting)
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ_i weight_i · value_i`.
    pub fn integrate<T: Integrand>(&self, values: &[T]) -> Result<T> {
        if values.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: values.len(),
            });
        }
        let mut acc = values[0].scaled(self.weights[0]);
        for (value, &w) in values.iter().zip(&self.weights).skip(1) {
            acc.accumulate(&value.scaled(w))?;
        }
        Ok(acc)
    }
}

/// Values that can be summed against measure weights.
pub trait Integrand: Sized {
    fn scaled(&self, weight: f64) -> Self;
    fn accumulate(&mut self, other: &Self) -> Result<()>;
}

impl Integrand for f64 {
    fn scaled(&self, weight: f64) -> Self {
        self * weight
    }

    fn accumulate(&mut self, other: &Self) -> Result<()> {
        *self += other;
        Ok(())
    }
}

impl Integrand for Scalar {
    fn scaled(&self, weight: f64) -> Self {
        self * weight
    }

    fn accumulate(&mut self, other: &Self) -> Result<()> {
        *self += other;
        Ok(())
    }
}

impl Integrand for HVector {
    fn scaled(&self, weight: f64) -> Self {
        self.scale(Scalar::new(weight, 0.0))
    }

    fn accumulate(&mut self, other: &Self) -> Result<()> {
        *self = self.add(other)?;
        Ok(())
    }
}

/// Nodes (ascending) and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Newton iteration on the three-term Legendre recurrence, started from the
/// Tricomi-style estimate `cos(π(i + 3/4)/(n + 1/2))`.
pub(crate) fn gauss_legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, p_prev) = legendre_pair(n, x);
            dp = nf * (x * p - p_prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (p, p_prev) = legendre_pair(n, x);
        dp = if (x * x - 1.0).abs() > 0.0 {
            nf * (x * p - p_prev) / (x * x - 1.0)
        } else {
            dp
        };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_{n-1}(x))`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}
