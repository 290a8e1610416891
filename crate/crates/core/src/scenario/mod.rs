//! Scenario files, batch runs and the diagnostic reports.

mod config;
mod horn;
mod reports;
mod run;
mod snapshot;

pub use config::{
    parse_config, BoundaryKind, Distribution, DomainShape, DtPolicy, LinearSolverKind, OutputConfig, Placement,
    ProfileCut, Reference, ScenarioConfig, SolverConfig, SolverKind, SourceConfig, SourceKind, VolumeRule, SECTIONS,
};
pub use horn::HornGeometry;
pub use reports::{alpha_sweep, sparsity_report, stability_report, SparsityRow, SweepRow, TABLE_SPARSITY};
pub use run::{build_setup, reference_config, run_scenario, simulate, write_artifact, Outcome, ProfileRow, Setup};
pub use snapshot::{l2_error, relative_l2, Snapshot, SnapshotRow};

use std::path::Path;

use thiserror::Error;

use crate::boundary::BoundaryError;
use crate::cavity::CavityError;
use crate::cloud::CloudError;
use crate::operators::OperatorError;
use crate::source::SourceError;
use crate::stepping::StepError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Config { line: usize, message: String },
    /// Configuration problem not tied to a line of the file.
    #[error("{0}")]
    Invalid(String),
    #[error("setup failed: {0}")]
    Setup(String),
    #[error("divergence at step {step}: |field| = {value:.3e} exceeds {threshold:.3e}")]
    Divergence { step: usize, value: f64, threshold: f64 },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Runtime(String),
}

impl ScenarioError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        ScenarioError::Io { path: path.display().to_string(), message: e.to_string() }
    }

    /// Process exit code: 1 configuration, 2 divergence, 3 solver or other
    /// runtime failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config { .. } | ScenarioError::Invalid(_) | ScenarioError::Setup(_) => 1,
            ScenarioError::Divergence { .. } => 2,
            ScenarioError::Solver(_) | ScenarioError::Io { .. } | ScenarioError::Runtime(_) => 3,
        }
    }
}

impl From<CloudError> for ScenarioError {
    fn from(e: CloudError) -> Self {
        ScenarioError::Setup(e.to_string())
    }
}

impl From<BoundaryError> for ScenarioError {
    fn from(e: BoundaryError) -> Self {
        ScenarioError::Setup(e.to_string())
    }
}

impl From<SourceError> for ScenarioError {
    fn from(e: SourceError) -> Self {
        ScenarioError::Setup(e.to_string())
    }
}

impl From<CavityError> for ScenarioError {
    fn from(e: CavityError) -> Self {
        ScenarioError::Runtime(e.to_string())
    }
}

impl From<OperatorError> for ScenarioError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::Sparse(s) => ScenarioError::Solver(s.to_string()),
            other => ScenarioError::Setup(other.to_string()),
        }
    }
}

impl From<StepError> for ScenarioError {
    fn from(e: StepError) -> Self {
        match e {
            StepError::Divergence { step, value, threshold } => ScenarioError::Divergence { step, value, threshold },
            StepError::Solver(s) => ScenarioError::Solver(s.to_string()),
            StepError::Operator(o) => o.into(),
            StepError::Source(s) => s.into(),
            StepError::Layout(m) | StepError::Setup(m) => ScenarioError::Setup(m),
        }
    }
}
