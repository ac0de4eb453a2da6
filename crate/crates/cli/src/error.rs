use std::fmt;
use std::process::ExitCode;

use leafspace::conemodel::ConeError;
use leafspace::leafaction::ActionError;
use leafspace::plhomeo::PlError;
use leafspace::qfield::FieldError;
use leafspace::shearlab::ShearError;

/// Failure modes with stable exit codes: 2 for malformed input, 3 for a
/// violated precondition, 1 for I/O on the output side.
#[derive(Debug)]
pub enum CliError {
    Malformed(String),
    Precondition(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Malformed(_) => ExitCode::from(2),
            CliError::Precondition(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Malformed(m) => write!(f, "malformed input: {m}"),
            CliError::Precondition(m) => write!(f, "precondition violated: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Parse { .. } | FieldError::InvalidDiscriminant(_) => CliError::Malformed(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

macro_rules! precondition_from {
    ($($ty:ty => $field:path),* $(,)?) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                match e {
                    $field(inner) => inner.into(),
                    other => CliError::Precondition(other.to_string()),
                }
            }
        }
    )*};
}

precondition_from!(
    PlError => PlError::Field,
    ActionError => ActionError::Field,
    ShearError => ShearError::Field,
    ConeError => ConeError::Field,
);

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
