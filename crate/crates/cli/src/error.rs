use std::path::{Path, PathBuf};

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Validation { field: String, message: String },

    #[error("{message}")]
    Numerical { message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Wraps a library error raised while handling `field`.
    pub fn core(field: &str, err: shaping_core::Error) -> Self {
        use shaping_core::Error as E;
        match err {
            E::NonConvergence { .. } | E::NoAcceptances { .. } => Self::Numerical {
                message: err.to_string(),
            },
            other => Self::validation(field, other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation { .. } => 2,
            Self::Numerical { .. } => 3,
            Self::Io { .. } => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Validation { .. } => "validation",
            Self::Numerical { .. } => "numerical",
            Self::Io { .. } => "io",
        }
    }

    /// Single-line JSON object for stderr.
    pub fn to_line(&self) -> String {
        let v = match self {
            Self::Validation { field, message } => {
                json!({"error": self.kind(), "field": field, "message": message})
            }
            Self::Numerical { message } => json!({"error": self.kind(), "message": message}),
            Self::Io { path, source } => {
                json!({"error": self.kind(), "path": path, "message": source.to_string()})
            }
        };
        v.to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_kind() {
        let v = CliError::validation("channel", "bad");
        assert_eq!(v.exit_code(), 2);
        let n = CliError::core(
            "x",
            shaping_core::Error::NonConvergence {
                solver: "s",
                iterations: 3,
                residual: 1.0,
            },
        );
        assert_eq!(n.exit_code(), 3);
        let i = CliError::io(Path::new("/x"), std::io::Error::other("denied"));
        assert_eq!(i.exit_code(), 4);
    }

    #[test]
    fn lines_are_single_line_json() {
        let e = CliError::validation("snr-db", "bad\nrange");
        let line = e.to_line();
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["field"], "snr-db");
        assert_eq!(v["error"], "validation");
    }

    #[test]
    fn library_domain_errors_are_validation() {
        let e = CliError::core(
            "constraint",
            shaping_core::Error::Infeasible { violation: 0.1 },
        );
        assert_eq!(e.kind(), "validation");
    }
}
