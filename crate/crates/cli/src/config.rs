//! JSON config files. Keys mirror long flag names; anything given on the
//! command line wins.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::Value;

fn config_path(argv: &[String]) -> Option<String> {
    let mut iter = argv.iter();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            return iter.next().cloned();
        }
        if let Some(path) = arg.strip_prefix("--config=") {
            return Some(path.to_string());
        }
    }
    None
}

fn has_flag(argv: &[String], flag: &str) -> bool {
    let with_value = format!("{flag}=");
    argv.iter().any(|a| a == flag || a.starts_with(&with_value))
}

fn scalar(key: &str, value: &Value) -> Result<String> {
    Ok(match value {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => bail!("config key '{key}' has unsupported value {other}"),
    })
}

/// Appends the flags from `--config <file>` that are missing from `argv`.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(Path::new(&path)).with_context(|| format!("cannot read config file {path}"))?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("config file {path} is not valid JSON"))?;
    let Value::Object(entries) = doc else {
        bail!("config file {path} must hold a JSON object");
    };
    let mut out = argv;
    let mut extra = Vec::new();
    for (key, value) in &entries {
        let flag = format!("--{}", key.replace('_', "-"));
        if flag == "--config" || has_flag(&out, &flag) {
            continue;
        }
        match value {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => extra.push(flag),
            Value::Array(items) => {
                let joined = items.iter().map(|v| scalar(key, v)).collect::<Result<Vec<_>>>()?.join(",");
                extra.push(flag);
                extra.push(joined);
            }
            v => {
                extra.push(flag);
                extra.push(scalar(key, v)?);
            }
        }
    }
    out.extend(extra);
    Ok(out)
}
