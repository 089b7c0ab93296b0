use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("solver abort: {0}")]
    Solver(rhsim_core::Error),

    #[error("verification failed: criteria {0:?}")]
    Verification(Vec<u8>),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<rhsim_core::Error> for CliError {
    fn from(e: rhsim_core::Error) -> Self {
        use rhsim_core::Error as E;
        match e {
            E::SolverAbort { .. } => CliError::Solver(e),
            E::Io(m) => CliError::Io(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
