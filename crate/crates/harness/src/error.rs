use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("suite {suite}: {source}")]
    Suite {
        suite: String,
        source: Box<HarnessError>,
    },
    #[error(transparent)]
    Calculus(#[from] calculus::CalculusError),
    #[error(transparent)]
    Qsi(#[from] qsi::QsiError),
    #[error(transparent)]
    Process(#[from] processes::ProcessError),
    #[error(transparent)]
    Cmx(#[from] cmx::CmxError),
    #[error(transparent)]
    Fock(#[from] fock_core::FockError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Json {
        context: String,
        source: serde_json::Error,
    },
}

impl HarnessError {
    pub(crate) fn in_suite(self, suite: &str) -> Self {
        HarnessError::Suite {
            suite: suite.to_string(),
            source: Box::new(self),
        }
    }
}
