use mtk_core::MtkError;
use thiserror::Error;

/// Failures that stop a run before any job starts.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => Status::InputError.exit_code(),
        }
    }
}

/// Job status, ordered by the severity used to pick the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ResourceError,
    InputError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::InputError => 2,
            Status::ResourceError => 3,
        }
    }

    pub fn of_error(err: &MtkError) -> Status {
        match err {
            MtkError::NoStabilisation(_) | MtkError::EnumerationBound(_) => Status::ResourceError,
            MtkError::IsoNotFound(_) => Status::Fail,
            _ => Status::InputError,
        }
    }
}

/// The message for a library error, with a hint where one helps.
pub fn describe(err: &MtkError) -> String {
    match err {
        MtkError::NoStabilisation(b) => format!("{err}; raise --budget above {b}"),
        MtkError::EnumerationBound(_) => format!("{err}; lower --bound"),
        _ => err.to_string(),
    }
}
