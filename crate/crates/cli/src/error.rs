use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {0}: {1}")]
    Io(String, std::io::Error),
    #[error("cannot parse {0}: {1}")]
    Parse(String, serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("exact LP would need {vars} variables, above the DAW_MAX_LP_VARS cap of {cap}")]
    LpBudget { vars: usize, cap: usize },
}

impl CliError {
    pub fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::Invalid(e.to_string())
    }
}
