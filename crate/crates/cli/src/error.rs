use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(gengrover::Error),
    Io(PathBuf, std::io::Error),
    /// A self-check ran but its residuals exceeded the tolerance.
    Check(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "USAGE",
            CliError::Core(e) => e.code(),
            CliError::Io(..) => "IO_ERROR",
            CliError::Check(_) => "CHECK_FAILED",
        }
    }

    /// 2 for anything the user typed wrong (flags, malformed files), 1 for
    /// inputs that parse but fail validation or numerics.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(gengrover::Error::Parse(_)) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Check(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

impl From<gengrover::Error> for CliError {
    fn from(e: gengrover::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
