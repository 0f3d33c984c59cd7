use thiserror::Error;

/// Problems with a scenario file itself, as opposed to a failed check.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error: {0}")]
    Schema(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}
