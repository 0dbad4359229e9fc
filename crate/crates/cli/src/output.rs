use std::path::{Path, PathBuf};
use std::process::ExitCode;

use recspec::thermo::fmt_float;
use recspec::Error;
use serde_json::{json, Value};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Domain(Error),
    Io(PathBuf, std::io::Error),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(Error::InvalidArgument(_) | Error::InvalidMap(_) | Error::Parse(_) | Error::InfeasibleTarget(_)) => 2,
            CliError::Domain(Error::HorizonTooShort { .. } | Error::BirkhoffMiss { .. } | Error::Overflow { .. }) => 4,
            CliError::Domain(_) | CliError::Io(..) | CliError::Failed(_) => 3,
        }
    }

    fn kind(&self) -> String {
        match self {
            CliError::Config(_) => "Config".into(),
            CliError::Domain(e) => {
                let dbg = format!("{e:?}");
                dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Domain").to_string()
            }
            CliError::Io(..) => "Io".into(),
            CliError::Failed(_) => "CheckFailed".into(),
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) | CliError::Failed(m) => m.clone(),
            CliError::Domain(e) => e.to_string(),
            CliError::Io(p, e) => format!("{}: {e}", p.display()),
        }
    }

    /// Prints a one-line JSON error record to stderr and returns the exit code.
    pub fn report(&self) -> ExitCode {
        let code = self.exit_code();
        let record = json!({ "error": { "kind": self.kind(), "message": self.message(), "exit_code": code } });
        eprintln!("{record}");
        ExitCode::from(code)
    }
}

/// Floats rounded to 12 significant digits; non-finite values become strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(fmt_float(x).parse::<f64>().unwrap())
    } else {
        json!(fmt_float(x))
    }
}

/// Collects the files of one run and writes them together with the manifest.
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), files: Vec::new() }
    }

    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn add_json(&mut self, name: &str, value: &Value) {
        self.add(name, serde_json::to_string_pretty(value).unwrap() + "\n");
    }

    pub fn write(self, manifest: Value) -> Result<(), CliError> {
        std::fs::create_dir_all(&self.dir).map_err(|e| CliError::Io(self.dir.clone(), e))?;
        let mut listed = Vec::new();
        for (name, contents) in &self.files {
            let path = self.dir.join(name);
            std::fs::write(&path, contents).map_err(|e| CliError::Io(path.clone(), e))?;
            listed.push(json!({ "file": name, "bytes": contents.len() }));
        }
        let mut manifest = manifest;
        manifest["outputs"] = Value::Array(listed);
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap() + "\n").map_err(|e| CliError::Io(path, e))?;
        for (name, _) in &self.files {
            println!("{}", self.dir.join(name).display());
        }
        Ok(())
    }
}
