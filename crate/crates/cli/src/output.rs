use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numerical,
    Size,
    Io,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Config, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Numerical, message: message.into() }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        CliError { kind: ErrorKind::Io, message: format!("{}: {err}", path.display()) }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Size => 4,
            ErrorKind::Io => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<neutrino_magic::Error> for CliError {
    fn from(e: neutrino_magic::Error) -> Self {
        use neutrino_magic::Error::*;
        let kind = match e {
            InvalidArgument(_) => ErrorKind::Config,
            UnsupportedSize(_) => ErrorKind::Size,
            Domain(_) | IntegrationFailure { .. } => ErrorKind::Numerical,
        };
        CliError { kind, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Serialize, serde::Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Serialize, serde::Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub started: String,
    pub finished: String,
    pub files: Vec<FileEntry>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Reads a subcommand config, or the `config` echo of a manifest written by `command`.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>, command: &str) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let value = match serde_json::from_value::<Manifest>(value.clone()) {
        Ok(m) if m.command == command => m.config,
        Ok(m) => {
            return Err(CliError::config(format!(
                "{}: manifest was written by `{}`, not `{command}`",
                path.display(),
                m.command
            )))
        }
        Err(_) => value,
    };
    serde_json::from_value(value).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("output types serialize");
    out.push(b'\n');
    out
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Everything one command writes, held in memory until the run succeeded.
pub struct Outputs {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub started: String,
    pub files: Vec<(&'static str, Vec<u8>)>,
}

impl Outputs {
    pub fn new<C: Serialize>(command: &'static str, seed: Option<u64>, config: &C) -> Self {
        Outputs {
            command,
            seed,
            config: serde_json::to_value(config).expect("configs serialize"),
            started: now(),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: &'static str, bytes: Vec<u8>) {
        self.files.push((name, bytes));
    }

    /// Writes every file plus the manifest. Files are staged under temporary
    /// names and renamed only once all of them were written.
    pub fn write(self, dir: &Path) -> CliResult<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.into(),
            seed: self.seed,
            config: self.config,
            started: self.started,
            finished: now(),
            files: self
                .files
                .iter()
                .map(|(name, bytes)| FileEntry {
                    name: (*name).into(),
                    bytes: bytes.len(),
                    sha256: hex::encode(Sha256::digest(bytes)),
                })
                .collect(),
        };
        let mut files = self.files;
        files.push((MANIFEST_NAME, to_json(&manifest)));

        let mut staged = Vec::new();
        for (name, bytes) in &files {
            let tmp = dir.join(format!(".{name}.partial"));
            if let Err(e) = fs::write(&tmp, bytes) {
                for path in staged.iter().chain(std::iter::once(&tmp)) {
                    let _ = fs::remove_file(path);
                }
                return Err(CliError::io(&tmp, e));
            }
            staged.push(tmp);
        }
        let mut written = Vec::new();
        for (tmp, (name, _)) in staged.iter().zip(&files) {
            let dest = dir.join(name);
            fs::rename(tmp, &dest).map_err(|e| CliError::io(&dest, e))?;
            written.push(dest);
        }
        Ok(written)
    }
}
