//! Flat `key = value` text files with `#` comments.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

pub fn parse(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse(format!("line {}: expected `key = value`", n + 1)));
        };
        let key = k.trim();
        if key.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key", n + 1)));
        }
        out.insert(key.to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn format(map: &BTreeMap<String, String>, comments: &[&str]) -> String {
    let mut s = String::new();
    for c in comments {
        s.push_str("# ");
        s.push_str(c);
        s.push('\n');
    }
    for (k, v) in map {
        s.push_str(k);
        s.push_str(" = ");
        s.push_str(v);
        s.push('\n');
    }
    s
}

pub fn read_file(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    parse(&std::fs::read_to_string(path)?)
}

pub fn write_file(path: impl AsRef<Path>, map: &BTreeMap<String, String>, comments: &[&str]) -> Result<()> {
    crate::fields::write_atomic(path, format(map, comments).as_bytes())
}
