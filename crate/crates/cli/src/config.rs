//! Flat `key=value` config files.
//!
//! ```text
//! # comment
//! pe = 4
//! kappa_d = 0.5
//! out = curve.csv
//! ```
//!
//! Each entry becomes `--key value` right after the subcommand, so flags given
//! on the command line win. `true` turns into a bare switch and `false` drops
//! the entry.

use std::ffi::OsString;
use std::fs;

use anyhow::Context;

use crate::UsageError;

pub const SUBCOMMANDS: [&str; 5] = ["eigen", "curve", "signatures", "fit", "validate"];

pub fn parse(text: &str) -> Result<Vec<(String, String)>, UsageError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected key=value", i + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(UsageError(format!("config line {}: invalid key", i + 1)));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut iter = args.iter().skip(1);
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return iter.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

/// Splices the config file named by `--config` into the argument list.
pub fn expand(args: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", path.to_string_lossy()))?;
    let entries = parse(&text)?;
    let mut at = None;
    let mut skip_next = false;
    for (i, a) in args.iter().enumerate().skip(1) {
        if skip_next {
            skip_next = false;
            continue;
        }
        let s = a.to_string_lossy();
        if s == "--config" {
            skip_next = true;
        } else if SUBCOMMANDS.contains(&s.as_ref()) {
            at = Some(i + 1);
            break;
        }
    }
    let Some(at) = at else {
        return Ok(args);
    };
    let mut inserted = Vec::new();
    for (key, value) in entries {
        match value.as_str() {
            "true" => inserted.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                inserted.push(format!("--{key}").into());
                inserted.push(value.into());
            }
        }
    }
    let mut out = args;
    out.splice(at..at, inserted);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_and_normalizes_keys() {
        let e = parse("# c\n\nkappa_d = 0.5\n--pe=4\n").unwrap();
        assert_eq!(e, vec![("kappa-d".into(), "0.5".into()), ("pe".into(), "4".into())]);
        assert!(parse("novalue\n").is_err());
    }

    #[test]
    fn entries_land_after_the_subcommand() {
        let dir = std::env::temp_dir().join(format!("radpulse-config-{}", std::process::id()));
        std::fs::write(&dir, "pe=4\nstep_check=true\nverbose=false\n").unwrap();
        let path = dir.to_string_lossy().to_string();
        let out = expand(os(&["radpulse", "--config", &path, "curve", "--pe", "2"])).unwrap();
        assert_eq!(
            out,
            os(&[
                "radpulse",
                "--config",
                &path,
                "curve",
                "--pe",
                "4",
                "--step-check",
                "--pe",
                "2"
            ])
        );
        std::fs::remove_file(&dir).unwrap();
    }

    #[test]
    fn no_config_is_a_no_op() {
        let args = os(&["radpulse", "eigen", "--pe", "4"]);
        assert_eq!(expand(args.clone()).unwrap(), args);
    }
}
