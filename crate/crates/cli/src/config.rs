//! TOML configuration files whose keys are the long flags of a subcommand,
//! e.g. `t-max = 10`, `init = [1.0, 0.5]`, `special = true`.

use std::ffi::OsString;
use std::path::PathBuf;

use toml::Value;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("--config: {path}: {reason}")]
    Read { path: PathBuf, reason: String },
    #[error("--config: key `{key}`: {reason}")]
    Value { key: String, reason: String },
    #[error("--config expects a file path")]
    MissingPath,
}

fn scalar(key: &str, v: &Value) -> Result<String, ConfigError> {
    match v {
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(f) => Ok(f.to_string()),
        Value::String(s) => Ok(s.clone()),
        _ => Err(ConfigError::Value {
            key: key.into(),
            reason: "expected a number, string, boolean or array of numbers".into(),
        }),
    }
}

/// Flag tokens for every key of the table; booleans become bare flags.
pub fn tokens(table: &toml::Table) -> Result<Vec<(String, Vec<String>)>, ConfigError> {
    let mut out = Vec::new();
    for (key, v) in table {
        let flag = format!("--{key}");
        match v {
            Value::Boolean(true) => out.push((key.clone(), vec![flag])),
            Value::Boolean(false) => {}
            Value::Array(items) => {
                let parts = items.iter().map(|i| scalar(key, i)).collect::<Result<Vec<_>, _>>()?;
                out.push((key.clone(), vec![flag, parts.join(",")]));
            }
            other => out.push((key.clone(), vec![flag, scalar(key, other)?])),
        }
    }
    Ok(out)
}

fn flag_name(arg: &str) -> Option<&str> {
    let name = arg.strip_prefix("--")?;
    Some(name.split_once('=').map_or(name, |(n, _)| n))
}

/// Removes `--config <path>` from `argv` and splices the file's flags in
/// after the subcommand words. Flags given on the command line win.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let mut args: Vec<String> = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter().map(|a| a.to_string_lossy().into_owned());
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(PathBuf::from(it.next().ok_or(ConfigError::MissingPath)?));
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else {
            args.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(args.into_iter().map(OsString::from).collect());
    };
    let text = std::fs::read_to_string(&path).map_err(|e| ConfigError::Read {
        path: path.clone(),
        reason: e.to_string(),
    })?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Read {
        path: path.clone(),
        reason: e.message().to_string(),
    })?;
    let given: Vec<&str> = args.iter().filter_map(|a| flag_name(a)).collect();
    let extra: Vec<String> = tokens(&table)?
        .into_iter()
        .filter(|(key, _)| !given.contains(&key.as_str()))
        .flat_map(|(_, t)| t)
        .collect();
    let split = 1 + args.iter().skip(1).take_while(|a| !a.starts_with('-')).count();
    let mut merged: Vec<String> = args[..split].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[split..]);
    Ok(merged.into_iter().map(OsString::from).collect())
}
