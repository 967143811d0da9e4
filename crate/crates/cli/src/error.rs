use quasi1d::ErrorClass;
use serde_json::json;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    UnknownFigure(String),
    Solver(quasi1d::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::UnknownFigure(_) => 2,
            CliError::Io(_) => 1,
            CliError::Solver(e) => match e.class() {
                ErrorClass::InvalidInput => 2,
                ErrorClass::NonConvergence | ErrorClass::Numerical => 3,
                ErrorClass::PhysicalRegime => 4,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigError",
            CliError::UnknownFigure(_) => "UnknownFigure",
            CliError::Io(_) => "IoError",
            CliError::Solver(e) => e.kind(),
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() }).to_string()
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::UnknownFigure(m) => write!(f, "unknown figure '{m}' (expected fig1..fig5 or fig-two-site)"),
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<quasi1d::Error> for CliError {
    fn from(e: quasi1d::Error) -> Self {
        CliError::Solver(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
