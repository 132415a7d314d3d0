use std::fmt;
use std::path::Path;
use std::process::ExitCode;

/// A command failure, classified by the exit-code contract: 2 for bad
/// usage or inputs, 1 for everything else.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> ExitCode {
        match self {
            Failure::Input(_) => ExitCode::from(2),
            Failure::Internal(_) => ExitCode::from(1),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        let msg = format!("{}: {e}", path.display());
        match e.kind() {
            std::io::ErrorKind::NotFound | std::io::ErrorKind::InvalidInput => Failure::Input(msg),
            _ => Failure::Internal(msg),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl From<hydrosar::Error> for Failure {
    fn from(e: hydrosar::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub fn write_file(path: &Path, contents: &str) -> CmdResult {
    std::fs::write(path, contents).map_err(|e| Failure::io(path, e))
}

pub fn create_dir(path: &Path) -> CmdResult {
    std::fs::create_dir_all(path).map_err(|e| Failure::io(path, e))
}
