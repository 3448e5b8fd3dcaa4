//! Continuous biframes in finite-dimensional Hilbert spaces.

pub mod engine;
pub mod error;
pub mod family;
pub mod linalg;
pub mod measure;
pub mod paper_examples;
pub mod properties;
pub mod random;
pub mod report;
pub mod riesz;
pub mod scenario;
pub mod verify;

pub use engine::{BiframeReport, Tolerances};
pub use error::{Error, Result};
pub use family::VectorFamily;
pub use linalg::{Field, HVector, LinearOperator, Scalar};
pub use measure::MeasureSpace;
pub use paper_examples::run_paper_examples;
pub use properties::{run_property_suite, SuiteParams};
pub use report::{RunReport, Verdict};
pub use scenario::{Scenario, ScenarioError};
pub use verify::{run_scenario, RunOptions};
