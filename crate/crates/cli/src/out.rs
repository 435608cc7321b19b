use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use bex_core::Error;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    MissingFile(String),
    Format(String),
    Runtime(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }

    pub fn from_io(path: &Path, e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::NotFound {
            CliError::MissingFile(path.display().to_string())
        } else {
            CliError::Runtime(format!("{}: {e}", path.display()))
        }
    }

    pub fn core(e: Error) -> Self {
        match e {
            Error::Config(m) => CliError::Config(m),
            Error::Format(m) => CliError::Format(m),
            Error::Io(e) => CliError::io(e),
            Error::ProbabilityDomain(_)
            | Error::InvalidDistribution(_)
            | Error::InvalidPrelec { .. }
            | Error::RenyiNearOne(_)
            | Error::UndefinedFixedPoint(_)
            | Error::OutcomeCount(_)
            | Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error[usage]: {m}"),
            CliError::Config(m) => write!(f, "error[config]: {m}"),
            CliError::MissingFile(m) => write!(f, "error[missing-file]: {m}"),
            CliError::Format(m) => write!(f, "error[format]: {m}"),
            CliError::Runtime(m) => write!(f, "error[runtime]: {m}"),
        }
    }
}

/// Write via a temporary file in the target directory, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        return Err(CliError::MissingFile(format!("output directory {}", dir.display())));
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::from_io(dir, e))?;
    tmp.write_all(bytes).map_err(CliError::io)?;
    tmp.as_file().sync_all().map_err(CliError::io)?;
    tmp.persist(path).map_err(|e| CliError::io(e.error))?;
    Ok(())
}
