//! CLI error type mapped onto process exit codes.

use thiserror::Error;

/// Exit code 2: usage or configuration problems. Exit code 3: degenerate
/// data (single-class training).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Degenerate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Degenerate(_) => 3,
        }
    }
}

impl From<qmkl_core::data::DataError> for CliError {
    fn from(e: qmkl_core::data::DataError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<qmkl_core::kernels::KernelError> for CliError {
    fn from(e: qmkl_core::kernels::KernelError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<qmkl_core::svm::SvmError> for CliError {
    fn from(e: qmkl_core::svm::SvmError) -> Self {
        match e {
            qmkl_core::svm::SvmError::SingleClassTraining => {
                CliError::Degenerate("SVM training labels contain a single class".to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<qmkl_core::gbm::GbmError> for CliError {
    fn from(e: qmkl_core::gbm::GbmError) -> Self {
        match e {
            qmkl_core::gbm::GbmError::SingleClassTraining => {
                CliError::Degenerate("GBM training labels contain a single class".to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<qmkl_core::eval::EvalError> for CliError {
    fn from(e: qmkl_core::eval::EvalError) -> Self {
        match e {
            qmkl_core::eval::EvalError::SingleClassEval => {
                CliError::Degenerate("evaluation labels contain a single class".to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io error: {e}"))
    }
}
