use std::ffi::OsString;
use std::path::Path;

use crate::Failure;

const SUBCOMMANDS: [&str; 5] = ["point", "sweep", "compare", "polsim", "material"];

/// Reads `key = value` lines into `--key=value` arguments. A value of
/// `true` becomes a bare `--key`.
pub fn config_args(path: &Path) -> Result<Vec<String>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::Usage(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                i + 1
            ))
        })?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim().trim_matches('"');
        if key.is_empty() || key == "config" {
            return Err(Failure::Usage(format!(
                "{}:{}: invalid key",
                path.display(),
                i + 1
            )));
        }
        if value == "true" {
            out.push(format!("--{key}"));
        } else {
            out.push(format!("--{key}={value}"));
        }
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

const EXCLUSIVE: [&[&str]; 2] = [&["diameter-um", "radius-um"], &["wavelength-um", "band"]];

fn key_of(arg: &str) -> Option<&str> {
    let k = arg.strip_prefix("--")?;
    Some(k.split_once('=').map_or(k, |(k, _)| k))
}

fn same_setting(a: &str, b: &str) -> bool {
    a == b || EXCLUSIVE.iter().any(|g| g.contains(&a) && g.contains(&b))
}

/// Inserts the config-file arguments right after the subcommand. Entries
/// for settings also given on the command line are dropped, so flags win.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let extra = config_args(Path::new(&path))?;
    let Some(mut at) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    if args[at] == "material" && args.get(at + 1).is_some_and(|a| a == "show") {
        at += 1;
    }
    let given: Vec<String> = args[at + 1..]
        .iter()
        .filter_map(|a| key_of(&a.to_string_lossy()).map(String::from))
        .collect();
    let mut out = args[..=at].to_vec();
    out.extend(
        extra
            .into_iter()
            .filter(|e| key_of(e).is_some_and(|k| !given.iter().any(|g| same_setting(g, k))))
            .map(OsString::from),
    );
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}
