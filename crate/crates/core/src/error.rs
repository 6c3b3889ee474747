use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage that produced an error, used to name the failing step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Spectrum,
    RecurrenceB,
    RecurrenceC,
    CTable,
    BTable,
    ATable,
    GammaTable,
    Profile,
    Filters,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Spectrum => "euler-frobenius spectrum",
            Stage::RecurrenceB => "recurrence B",
            Stage::RecurrenceC => "recurrence C",
            Stage::CTable => "c table",
            Stage::BTable => "b table",
            Stage::ATable => "a table",
            Stage::GammaTable => "gamma table",
            Stage::Profile => "asymptotic profile",
            Stage::Filters => "filter derivation",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("spline order m = {m} is invalid here (requires m >= {min})")]
    InvalidOrder { m: u32, min: u32 },

    #[error("spline order m = {m} exceeds the supported maximum {max}")]
    OrderTooLarge { m: u32, max: u32 },

    #[error("root isolation failed for m = {m}: found {found} sign changes on (-1, 0), expected {expected}")]
    RootIsolation { m: u32, found: usize, expected: usize },

    #[error("{what} did not converge at depth {depth}: certificate {defect:.3e} exceeds {tol:.3e}")]
    NonConvergence {
        what: &'static str,
        depth: usize,
        defect: f64,
        tol: f64,
    },

    #[error("recurrence table depth {have} is insufficient, {need} terms required")]
    InsufficientDepth { have: usize, need: usize },

    #[error("requested tolerance {requested:.3e} is below the achievable floor {floor:.3e}")]
    ToleranceFloor { requested: f64, floor: f64 },

    #[error("x = {x} lies outside the certified range |x| <= {limit}")]
    OutOfRange { x: f64, limit: f64 },

    #[error("index {index} lies outside the table window [-{window}, {window}]")]
    IndexOutOfWindow { index: i64, window: i64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// Stage that failed, if the error was raised inside the build pipeline.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    /// True for failures of a numerical procedure, as opposed to bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::RootIsolation { .. } | Error::NonConvergence { .. } | Error::InsufficientDepth { .. }
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self.root(), Error::Io(_) | Error::Json(_) | Error::Csv(_))
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
