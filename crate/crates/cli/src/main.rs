mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use output::CliError;

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => return e.report(),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return CliError::Config(format!("thread pool: {e}")).report();
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}

/// Replaces `--config FILE` by the command words and `--key value` flags it holds:
///
/// ```toml
/// command = ["spectrum", "ae"]
/// seed = 7
/// [params]
/// map = "doubling"
/// samples = 100
/// ```
fn expand_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(i) = argv.iter().position(|a| a == "--config") else { return Ok(argv) };
    let path = argv.get(i + 1).ok_or_else(|| CliError::Config("--config needs a file".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
    let table: toml::Table = text.parse().map_err(|e| CliError::Config(format!("{path}: {e}")))?;
    let mut out: Vec<String> = argv[..i].iter().chain(&argv[i + 2..]).cloned().collect();
    for key in ["seed", "out", "threads"] {
        if let Some(v) = table.get(key) {
            out.push(format!("--{key}"));
            out.push(scalar(v)?);
        }
    }
    if table.get("dry-run").and_then(toml::Value::as_bool) == Some(true) {
        out.push("--dry-run".into());
    }
    match table.get("command") {
        Some(toml::Value::String(s)) => out.push(s.clone()),
        Some(toml::Value::Array(words)) => {
            for w in words {
                out.push(w.as_str().ok_or_else(|| CliError::Config("command words must be strings".into()))?.to_string());
            }
        }
        _ => return Err(CliError::Config(format!("{path}: missing `command`"))),
    }
    if let Some(params) = table.get("params") {
        let params = params.as_table().ok_or_else(|| CliError::Config("[params] must be a table".into()))?;
        for (k, v) in params {
            let flag = format!("--{}", k.replace('_', "-"));
            match v {
                toml::Value::Boolean(true) => out.push(flag),
                toml::Value::Boolean(false) => {}
                toml::Value::Array(items) => {
                    out.push(flag);
                    out.push(items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?.join(","));
                }
                v => {
                    out.push(flag);
                    out.push(scalar(v)?);
                }
            }
        }
    }
    Ok(out)
}

fn scalar(v: &toml::Value) -> Result<String, CliError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        other => Err(CliError::Config(format!("unsupported config value {other}"))),
    }
}
