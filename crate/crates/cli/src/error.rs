use imd_core::anchored::AnchoredError;
use imd_core::cycles::CycleError;
use imd_core::flatness::FlatnessError;
use imd_core::quiver::QuiverError;
use imd_core::reductions::ReductionError;
use imd_core::weyl::WeylError;
use serde_json::json;
use thiserror::Error;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const RESIDUE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const UNSUPPORTED: i32 = 4;
    pub const RESOURCE: i32 = 5;
    pub const OTHER: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Resource(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Unsupported(_) => "unsupported",
            CliError::Resource(_) => "resource_limit",
            CliError::Other(_) => "internal",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Config(_) => exit::CONFIG,
            CliError::Unsupported(_) => exit::UNSUPPORTED,
            CliError::Resource(_) => exit::RESOURCE,
            CliError::Other(_) => exit::OTHER,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"error": {"kind": self.kind(), "message": self.to_string(), "exit_code": self.exit_code()}})
    }
}

impl From<QuiverError> for CliError {
    fn from(e: QuiverError) -> CliError {
        CliError::Config(e.to_string())
    }
}

impl From<CycleError> for CliError {
    fn from(e: CycleError) -> CliError {
        match e {
            CycleError::Quiver(q) => q.into(),
            CycleError::UnsupportedDegenerateReading(_) => CliError::Unsupported(e.to_string()),
            CycleError::UntimedNode(_) => CliError::Usage(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<AnchoredError> for CliError {
    fn from(e: AnchoredError) -> CliError {
        match e {
            AnchoredError::Cycle(c) => c.into(),
            AnchoredError::NotAnIMDCycle(_) | AnchoredError::UnsupportedPair(_) => CliError::Unsupported(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<WeylError> for CliError {
    fn from(e: WeylError) -> CliError {
        match e {
            WeylError::Malformed(_) => CliError::Config(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<FlatnessError> for CliError {
    fn from(e: FlatnessError) -> CliError {
        match e {
            FlatnessError::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            FlatnessError::UnknownNode(_) => CliError::Config(e.to_string()),
            FlatnessError::Cycle(c) => c.into(),
            FlatnessError::Anchored(a) => a.into(),
            FlatnessError::Quiver(q) => q.into(),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> CliError {
        match e {
            ReductionError::Quiver(q) => q.into(),
            ReductionError::Cycle(c) => c.into(),
            ReductionError::Anchored(a) => a.into(),
            ReductionError::Weyl(w) => w.into(),
            ReductionError::OrderCapExceeded { .. } => CliError::Resource(e.to_string()),
            ReductionError::BadPolynomial(_) => CliError::Usage(e.to_string()),
            ReductionError::UnsupportedGraph(_)
            | ReductionError::NonUniformConstants(_)
            | ReductionError::BadDimension(_)
            | ReductionError::OrientationMismatch(_) => CliError::Unsupported(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}
