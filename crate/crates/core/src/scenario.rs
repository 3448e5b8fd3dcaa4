//! Scenario files (JSON, schema version 1) and resolution of their named families
//! and operators.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use nalgebra::DVector;
use serde::Deserialize;
use serde_json::Value;

use crate::engine::{Side, Tolerances};
use crate::error::Error;
use crate::family::VectorFamily;
use crate::linalg::{Field, HVector, LinearOperator, Matrix, Scalar};
use crate::measure::{MeasureSpace, DEFAULT_QUADRATURE_NODES};
use crate::random;
use crate::riesz::FactorizationSpec;

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

/// Errors raised before any check runs; the CLI maps them to exit code 2.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: cannot read file: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub space: SpaceSpec,
    pub measure: MeasureSpec,
    #[serde(default)]
    pub families: BTreeMap<String, FamilySpec>,
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorSpec>,
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    /// Printed claims keyed by check name.
    #[serde(default)]
    pub expected: BTreeMap<String, Claim>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub dimension: usize,
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Quadrature {
        interval: [f64; 2],
        #[serde(default = "default_nodes")]
        nodes: usize,
    },
    Counting {
        size: usize,
    },
}

fn default_nodes() -> usize {
    DEFAULT_QUADRATURE_NODES
}

impl MeasureSpec {
    pub fn build(&self) -> crate::Result<MeasureSpace> {
        match *self {
            MeasureSpec::Quadrature { interval, nodes } => MeasureSpace::gauss_legendre(interval[0], interval[1], nodes),
            MeasureSpec::Counting { size } => MeasureSpace::counting(size),
        }
    }
}

/// A real number or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ScalarLit {
    Real(f64),
    Complex([f64; 2]),
}

impl ScalarLit {
    fn value(self) -> Scalar {
        match self {
            ScalarLit::Real(x) => Scalar::new(x, 0.0),
            ScalarLit::Complex([re, im]) => Scalar::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyGenerator {
    /// `ω ↦ (0, ω)`.
    Example1Xi,
    /// `ω ↦ (ω, 1)`.
    Example1Phi,
    /// `ω ↦ (ω, ω/2)`.
    Example2Xi,
    /// `ω ↦ (2ω, ω)`.
    Example2Phi,
    /// `{(1, −2), (−1, 0)}`.
    RieszExample,
    /// Standard basis on a counting measure of size `dimension`.
    Onb,
    /// Gaussian vectors at every node.
    Random,
    /// Columns of a random invertible matrix (counting measure of size `dimension`).
    RandomInvertible,
}

/// Exactly one of `generator`, `inline`, or `map` must be given.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    #[serde(default)]
    pub generator: Option<FamilyGenerator>,
    #[serde(default)]
    pub inline: Option<Vec<Vec<ScalarLit>>>,
    /// `{"family": name, "operator": name}`: the family with the operator applied to every vector.
    #[serde(default)]
    pub map: Option<MapSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub scale: Option<f64>,
    /// Overrides the scenario measure.
    #[serde(default)]
    pub measure: Option<MeasureSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub family: String,
    pub operator: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorGenerator {
    Identity,
    RandomPositive,
    RandomUnitary,
    RandomInvertible,
    RandomGaussian,
    Rotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivation {
    Adjoint,
    Inverse,
    InverseAdjoint,
}

/// Exactly one of `literal`, `diagonal`, `generator`, `derive`, or `compose` must be given.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    #[serde(default)]
    pub literal: Option<Vec<Vec<ScalarLit>>>,
    #[serde(default)]
    pub diagonal: Option<Vec<f64>>,
    #[serde(default)]
    pub generator: Option<OperatorGenerator>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Angle for `rotation`.
    #[serde(default)]
    pub degrees: Option<f64>,
    #[serde(default)]
    pub derive: Option<Derivation>,
    /// Operand of `derive`.
    #[serde(default)]
    pub of: Option<String>,
    /// Product of the named operators, left to right.
    #[serde(default)]
    pub compose: Option<Vec<String>>,
    #[serde(default)]
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFields {
    pub a: f64,
    #[serde(default)]
    pub b: Option<f64>,
    pub c: f64,
    #[serde(default)]
    pub d: Option<f64>,
    #[serde(default)]
    pub w: Option<String>,
    #[serde(default)]
    pub top: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckOp {
    ClassifyPair,
    Swap,
    Reconstruct,
    Coefficients,
    ControlledFrame,
    Dual,
    GDual,
    Positivity,
    Neumann,
    Polar,
    FractionalPower,
    Factorize,
    Transform,
    TransformIdentity,
    ParsevalFactors,
    Biorthogonality,
    BRiesz,
    OnbClass,
    ProductPair,
    ConstructDual,
    RieszTransfer,
}

impl CheckOp {
    pub fn name(self) -> &'static str {
        match self {
            CheckOp::ClassifyPair => "classify_pair",
            CheckOp::Swap => "swap",
            CheckOp::Reconstruct => "reconstruct",
            CheckOp::Coefficients => "coefficients",
            CheckOp::ControlledFrame => "controlled_frame",
            CheckOp::Dual => "dual",
            CheckOp::GDual => "g_dual",
            CheckOp::Positivity => "positivity",
            CheckOp::Neumann => "neumann",
            CheckOp::Polar => "polar",
            CheckOp::FractionalPower => "fractional_power",
            CheckOp::Factorize => "factorize",
            CheckOp::Transform => "transform",
            CheckOp::TransformIdentity => "transform_identity",
            CheckOp::ParsevalFactors => "parseval_factors",
            CheckOp::Biorthogonality => "biorthogonality",
            CheckOp::BRiesz => "b_riesz",
            CheckOp::OnbClass => "onb_class",
            CheckOp::ProductPair => "product_pair",
            CheckOp::ConstructDual => "construct_dual",
            CheckOp::RieszTransfer => "riesz_transfer",
        }
    }

    fn family_params(self) -> &'static [&'static str] {
        use CheckOp::*;
        match self {
            ClassifyPair | Swap | Reconstruct | Coefficients | Dual | GDual | Transform | TransformIdentity
            | Biorthogonality | RieszTransfer => &["xi", "phi"],
            ControlledFrame | BRiesz => &["xi"],
            ParsevalFactors | ProductPair => &["basis"],
            OnbClass => &["basis", "xi"],
            ConstructDual => &["xi", "eta"],
            Positivity | Neumann | Polar | FractionalPower | Factorize => &[],
        }
    }

    fn operator_params(self) -> &'static [&'static str] {
        use CheckOp::*;
        match self {
            ControlledFrame => &["p"],
            GDual => &["a"],
            Positivity | Neumann | Polar | FractionalPower => &["operator"],
            Factorize => &["s1", "s2"],
            Transform | ConstructDual => &["q"],
            TransformIdentity | ParsevalFactors => &["s", "u"],
            ProductPair => &["u", "v"],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub name: String,
    pub op: CheckOp,
    #[serde(default)]
    pub xi: Option<String>,
    #[serde(default)]
    pub phi: Option<String>,
    #[serde(default)]
    pub eta: Option<String>,
    #[serde(default)]
    pub basis: Option<String>,
    #[serde(default)]
    pub operator: Option<String>,
    #[serde(default)]
    pub p: Option<String>,
    #[serde(default)]
    pub q: Option<String>,
    #[serde(default)]
    pub a: Option<String>,
    #[serde(default)]
    pub s: Option<String>,
    #[serde(default)]
    pub u: Option<String>,
    #[serde(default)]
    pub v: Option<String>,
    #[serde(default)]
    pub s1: Option<String>,
    #[serde(default)]
    pub s2: Option<String>,
    #[serde(default)]
    pub vector: Option<Vec<ScalarLit>>,
    #[serde(default)]
    pub side: Option<Side>,
    #[serde(default)]
    pub exponent: Option<f64>,
    #[serde(default)]
    pub spec: Option<SpecFields>,
    /// Tool-level expectations on computed values; a disagreement fails the check.
    #[serde(default)]
    pub expect: BTreeMap<String, Value>,
    /// Expected error kind (see `Error::kind`); the check passes iff that error occurs.
    #[serde(default)]
    pub expect_error: Option<String>,
}

impl CheckSpec {
    pub fn param(&self, key: &str) -> Option<&str> {
        match key {
            "xi" => self.xi.as_deref(),
            "phi" => self.phi.as_deref(),
            "eta" => self.eta.as_deref(),
            "basis" => self.basis.as_deref(),
            "operator" => self.operator.as_deref(),
            "p" => self.p.as_deref(),
            "q" => self.q.as_deref(),
            "a" => self.a.as_deref(),
            "s" => self.s.as_deref(),
            "u" => self.u.as_deref(),
            "v" => self.v.as_deref(),
            "s1" => self.s1.as_deref(),
            "s2" => self.s2.as_deref(),
            _ => None,
        }
    }
}

/// Printed claims attached to a check; every key other than `note` is compared
/// against the computed value of the same name.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Claim {
    #[serde(default)]
    pub note: Option<String>,
    #[serde(flatten)]
    pub values: BTreeMap<String, Value>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or("scenario")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |m: String| Err(ScenarioError::Invalid(m));
        if self.schema_version != SCENARIO_SCHEMA_VERSION {
            return invalid(format!(
                "schema_version {} is not supported (expected {SCENARIO_SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.space.dimension == 0 {
            return invalid("space.dimension must be at least 1".into());
        }
        if let Some(t) = &self.tolerances {
            t.validate().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        }
        for (name, f) in &self.families {
            let given = [f.generator.is_some(), f.inline.is_some(), f.map.is_some()];
            if given.iter().filter(|&&g| g).count() != 1 {
                return invalid(format!("family `{name}` needs exactly one of generator, inline, map"));
            }
            if let Some(m) = &f.map {
                if !self.families.contains_key(&m.family) {
                    return invalid(format!("family `{name}` maps undefined family `{}`", m.family));
                }
                if !self.operators.contains_key(&m.operator) {
                    return invalid(format!("family `{name}` uses undefined operator `{}`", m.operator));
                }
            }
        }
        for (name, o) in &self.operators {
            let given = [
                o.literal.is_some(),
                o.diagonal.is_some(),
                o.generator.is_some(),
                o.derive.is_some(),
                o.compose.is_some(),
            ];
            if given.iter().filter(|&&g| g).count() != 1 {
                return invalid(format!(
                    "operator `{name}` needs exactly one of literal, diagonal, generator, derive, compose"
                ));
            }
            if o.derive.is_some() && o.of.is_none() {
                return invalid(format!("operator `{name}` uses derive without `of`"));
            }
            let refs = o.of.iter().chain(o.compose.iter().flatten());
            for r in refs {
                if !self.operators.contains_key(r) {
                    return invalid(format!("operator `{name}` references undefined operator `{r}`"));
                }
            }
        }
        let mut seen = BTreeSet::new();
        for check in &self.checks {
            if !seen.insert(check.name.as_str()) {
                return invalid(format!("duplicate check name `{}`", check.name));
            }
            for key in check.op.family_params() {
                match check.param(key) {
                    None => return invalid(format!("check `{}` is missing `{key}`", check.name)),
                    Some(n) if !self.families.contains_key(n) => {
                        return invalid(format!("check `{}` references undefined family `{n}`", check.name))
                    }
                    _ => {}
                }
            }
            for key in check.op.operator_params() {
                match check.param(key) {
                    None => return invalid(format!("check `{}` is missing `{key}`", check.name)),
                    Some(n) if !self.operators.contains_key(n) => {
                        return invalid(format!("check `{}` references undefined operator `{n}`", check.name))
                    }
                    _ => {}
                }
            }
            // Optional references.
            if let Some(n) = check.q.as_deref().filter(|_| check.op == CheckOp::ControlledFrame) {
                if !self.operators.contains_key(n) {
                    return invalid(format!("check `{}` references undefined operator `{n}`", check.name));
                }
            }
            if let Some(spec) = &check.spec {
                for n in spec.w.iter().chain(spec.top.iter()) {
                    if !self.operators.contains_key(n) {
                        return invalid(format!("check `{}` references undefined operator `{n}`", check.name));
                    }
                }
            }
            let needs_vector = matches!(check.op, CheckOp::Reconstruct | CheckOp::Coefficients);
            if needs_vector && check.vector.is_none() {
                return invalid(format!("check `{}` is missing `vector`", check.name));
            }
            let needs_spec = matches!(check.op, CheckOp::Factorize | CheckOp::Transform);
            if needs_spec && check.spec.is_none() {
                return invalid(format!("check `{}` is missing `spec`", check.name));
            }
            if check.op == CheckOp::FractionalPower && check.exponent.is_none() {
                return invalid(format!("check `{}` is missing `exponent`", check.name));
            }
        }
        for name in self.expected.keys() {
            if !seen.contains(name.as_str()) {
                return invalid(format!("expected claims reference unknown check `{name}`"));
            }
        }
        Ok(())
    }
}

/// Resolved objects of a scenario. Families and operators are built lazily and cached,
/// so a failure is attributed to the first check that needs the object.
pub struct Workspace<'a> {
    scenario: &'a Scenario,
    measure: Arc<MeasureSpace>,
    families: BTreeMap<String, VectorFamily>,
    operators: BTreeMap<String, LinearOperator>,
}

fn lit_vector(entries: &[ScalarLit], field: Field) -> crate::Result<HVector> {
    let values: Vec<Scalar> = entries.iter().map(|e| e.value()).collect();
    HVector::new(DVector::from_vec(values), field)
}

fn lit_operator(rows: &[Vec<ScalarLit>], field: Field) -> crate::Result<LinearOperator> {
    let n = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: r.len() });
    }
    let m = Matrix::from_fn(n, n, |i, j| rows[i][j].value());
    LinearOperator::new(m, field)
}


impl<'a> Workspace<'a> {
    pub fn new(scenario: &'a Scenario) -> crate::Result<Self> {
        Ok(Self {
            scenario,
            measure: Arc::new(scenario.measure.build()?),
            families: BTreeMap::new(),
            operators: BTreeMap::new(),
        })
    }

    pub fn field(&self) -> Field {
        self.scenario.space.field
    }

    pub fn dimension(&self) -> usize {
        self.scenario.space.dimension
    }

    pub fn vector(&self, entries: &[ScalarLit]) -> crate::Result<HVector> {
        let v = lit_vector(entries, self.field())?;
        if v.dim() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: v.dim(),
            });
        }
        Ok(v)
    }

    pub fn family(&mut self, name: &str) -> crate::Result<VectorFamily> {
        self.family_at(name, 0)
    }

    pub fn operator(&mut self, name: &str) -> crate::Result<LinearOperator> {
        self.operator_at(name, 0)
    }

    fn family_at(&mut self, name: &str, depth: usize) -> crate::Result<VectorFamily> {
        if let Some(f) = self.families.get(name) {
            return Ok(f.clone());
        }
        if depth > self.scenario.families.len() {
            return Err(Error::BadSpec(format!("family `{name}` is defined cyclically")));
        }
        let spec = self
            .scenario
            .families
            .get(name)
            .ok_or_else(|| Error::BadSpec(format!("undefined family `{name}`")))?
            .clone();
        let space = match &spec.measure {
            Some(m) => Arc::new(m.build()?),
            None => self.measure.clone(),
        };
        let (n, field) = (self.dimension(), self.field());
        let mut family = if let Some(g) = spec.generator {
            self.generate_family(g, space, spec.seed.unwrap_or(0), name)?
        } else if let Some(rows) = &spec.inline {
            let vectors = rows
                .iter()
                .map(|r| self.vector(r))
                .collect::<crate::Result<Vec<_>>>()?;
            VectorFamily::new(space, vectors, name)?
        } else {
            let m = spec.map.as_ref().expect("validated");
            let base = self.family_at(&m.family, depth + 1)?;
            let op = self.operator_at(&m.operator, depth + 1)?;
            base.mapped(&op, name)?
        };
        if family.dimension() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: family.dimension(),
            });
        }
        if family.field() != field {
            return Err(Error::FieldMismatch {
                left: field.name(),
                right: family.field().name(),
            });
        }
        if let Some(s) = spec.scale {
            family = family.scaled(Scalar::new(s, 0.0));
        }
        self.families.insert(name.to_string(), family.clone());
        Ok(family)
    }

    fn generate_family(
        &self,
        g: FamilyGenerator,
        space: Arc<MeasureSpace>,
        seed: u64,
        label: &str,
    ) -> crate::Result<VectorFamily> {
        let (n, field) = (self.dimension(), self.field());
        let fixed = |values: [f64; 2]| -> crate::Result<HVector> {
            HVector::new(DVector::from_iterator(2, values.iter().map(|&x| Scalar::new(x, 0.0))), field)
        };
        let needs_two = |f: &dyn Fn() -> crate::Result<VectorFamily>| {
            if n != 2 {
                Err(Error::DimensionMismatch { expected: 2, found: n })
            } else {
                f()
            }
        };
        match g {
            FamilyGenerator::Example1Xi => {
                needs_two(&|| VectorFamily::sample(space.clone(), label, |_, w| fixed([0.0, w])))
            }
            FamilyGenerator::Example1Phi => {
                needs_two(&|| VectorFamily::sample(space.clone(), label, |_, w| fixed([w, 1.0])))
            }
            FamilyGenerator::Example2Xi => {
                needs_two(&|| VectorFamily::sample(space.clone(), label, |_, w| fixed([w, w / 2.0])))
            }
            FamilyGenerator::Example2Phi => {
                needs_two(&|| VectorFamily::sample(space.clone(), label, |_, w| fixed([2.0 * w, w])))
            }
            FamilyGenerator::RieszExample => needs_two(&|| {
                let rows = [[1.0, -2.0], [-1.0, 0.0]];
                let vectors = rows.iter().map(|r| fixed(*r)).collect::<crate::Result<Vec<_>>>()?;
                VectorFamily::new(space.clone(), vectors, label)
            }),
            FamilyGenerator::Onb => {
                let vectors = (0..n).map(|k| HVector::basis(n, k, field)).collect();
                VectorFamily::new(space, vectors, label)
            }
            FamilyGenerator::Random => Ok(random::gaussian_family(&mut random::rng(seed), &space, n, field, label)),
            FamilyGenerator::RandomInvertible => {
                let op = random::invertible(&mut random::rng(seed), n, field);
                VectorFamily::new(space, VectorFamily::from_columns(&op, label).vectors().to_vec(), label)
            }
        }
    }

    fn operator_at(&mut self, name: &str, depth: usize) -> crate::Result<LinearOperator> {
        if let Some(o) = self.operators.get(name) {
            return Ok(o.clone());
        }
        if depth > self.scenario.operators.len() {
            return Err(Error::BadSpec(format!("operator `{name}` is defined cyclically")));
        }
        let spec = self
            .scenario
            .operators
            .get(name)
            .ok_or_else(|| Error::BadSpec(format!("undefined operator `{name}`")))?
            .clone();
        let (n, field) = (self.dimension(), self.field());
        let tol = self.scenario.tolerances.unwrap_or_default();
        let mut op = if let Some(rows) = &spec.literal {
            lit_operator(rows, field)?
        } else if let Some(d) = &spec.diagonal {
            coerce_operator(LinearOperator::diagonal(d), field)?
        } else if let Some(g) = spec.generator {
            let mut rng = random::rng(spec.seed.unwrap_or(0));
            match g {
                OperatorGenerator::Identity => LinearOperator::identity(n, field),
                OperatorGenerator::RandomPositive => random::positive_definite(&mut rng, n, field),
                OperatorGenerator::RandomUnitary => random::unitary(&mut rng, n, field),
                OperatorGenerator::RandomInvertible => random::invertible(&mut rng, n, field),
                OperatorGenerator::RandomGaussian => random::gaussian_operator(&mut rng, n, field),
                OperatorGenerator::Rotation => {
                    if n != 2 {
                        return Err(Error::DimensionMismatch { expected: 2, found: n });
                    }
                    coerce_operator(LinearOperator::rotation(spec.degrees.unwrap_or(0.0)), field)?
                }
            }
        } else if let Some(d) = spec.derive {
            let base = self.operator_at(spec.of.as_deref().expect("validated"), depth + 1)?;
            match d {
                Derivation::Adjoint => base.adjoint(),
                Derivation::Inverse => base.inverse(tol.max_condition)?,
                Derivation::InverseAdjoint => base.adjoint().inverse(tol.max_condition)?,
            }
        } else {
            let names = spec.compose.as_ref().expect("validated");
            let mut acc = LinearOperator::identity(n, field);
            for part in names {
                acc = acc.compose(&self.operator_at(part, depth + 1)?)?;
            }
            acc
        };
        if op.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: op.dim() });
        }
        if let Some(s) = spec.scale {
            op = op.scale(Scalar::new(s, 0.0));
        }
        self.operators.insert(name.to_string(), op.clone());
        Ok(op)
    }

    /// Builds a factorization spec; omitted `b`, `d` default to `1 − a`, `1 − c` and
    /// omitted `w`, `top` to the identity.
    pub fn factorization_spec(&mut self, fields: &SpecFields) -> crate::Result<FactorizationSpec> {
        let (n, field) = (self.dimension(), self.field());
        let w = match &fields.w {
            Some(name) => self.operator(name)?,
            None => LinearOperator::identity(n, field),
        };
        let top = match &fields.top {
            Some(name) => self.operator(name)?,
            None => LinearOperator::identity(n, field),
        };
        FactorizationSpec::new(
            fields.a,
            fields.b.unwrap_or(1.0 - fields.a),
            fields.c,
            fields.d.unwrap_or(1.0 - fields.c),
            w,
            top,
        )
    }
}

fn coerce_operator(op: LinearOperator, field: Field) -> crate::Result<LinearOperator> {
    LinearOperator::new(op.matrix().clone(), field)
}
