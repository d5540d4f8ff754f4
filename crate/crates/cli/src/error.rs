use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}, column {column}: {message}")]
    ConfigSyntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{key}: {message}")]
    ConfigValue { key: String, message: String },
    #[error("missing required setting {0} (give it in the config file or as --{0})")]
    Missing(&'static str),
    #[error("unknown experiment {0:?}; see `grouplab list`")]
    UnknownExperiment(String),
    #[error("experiment {experiment}: {source}")]
    Run {
        experiment: String,
        #[source]
        source: grouplab::Error,
    },
    #[error("{0}")]
    Table(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// The experiment name is filled in by `run_experiment`.
impl From<grouplab::Error> for CliError {
    fn from(source: grouplab::Error) -> Self {
        CliError::Run {
            experiment: String::new(),
            source,
        }
    }
}
