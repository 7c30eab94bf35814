use thiserror::Error;

/// Crate-wide error type.
///
/// `Config` covers invalid specifications and inputs (CLI exit code 2);
/// `Numerical` covers failures detected while computing (exit code 3).
#[derive(Debug, Error)]
pub enum QifError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl QifError {
    pub fn config(msg: impl Into<String>) -> Self {
        QifError::Config(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        QifError::Numerical(msg.into())
    }

    /// Process exit code mandated for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            QifError::Config(_) | QifError::Io(_) => 2,
            QifError::Numerical(_) => 3,
        }
    }
}

impl From<serde_json::Error> for QifError {
    fn from(e: serde_json::Error) -> Self {
        QifError::Config(format!("json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, QifError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(QifError::config("x").exit_code(), 2);
        assert_eq!(QifError::numerical("x").exit_code(), 3);
        let io = QifError::from(std::io::Error::new(std::io::ErrorKind::NotFound, "gone"));
        assert_eq!(io.exit_code(), 2);
    }
}
