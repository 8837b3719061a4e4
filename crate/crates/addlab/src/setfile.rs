//! Plain-text set files.
//!
//! ```text
//! group fp:5:2
//! # comments run to the end of the line
//! 0,1
//! 3,4
//! ```
//!
//! The first non-blank line names the group; every further line holds one
//! element as comma-separated coordinates. [`render_set`] writes the canonical
//! form (sorted, reduced, no comments), which [`parse_set`] reads back to the
//! same set and which re-renders byte for byte.

use std::fs;
use std::path::Path;

use addlab_core::{GroupElement, GroupSet, GroupSpec};
use num_bigint::BigInt;

use crate::CliError;

/// Parses one element line such as `3,-1`.
pub fn parse_element(spec: &GroupSpec, text: &str) -> Result<GroupElement, String> {
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<BigInt>().map_err(|_| format!("bad coordinate {:?}", c.trim())))
        .collect::<Result<Vec<_>, _>>()?;
    spec.element_big(coords).map_err(|e| e.to_string())
}

pub fn parse_set(text: &str) -> Result<GroupSet, String> {
    let mut spec = None;
    let mut elems = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |e: String| format!("line {}: {e}", no + 1);
        match &spec {
            None => {
                let rest = line.strip_prefix("group").filter(|r| r.starts_with(char::is_whitespace));
                let rest = rest.ok_or_else(|| at("expected `group <spec>`".into()))?;
                spec = Some(rest.trim().parse::<GroupSpec>().map_err(|e| at(e.to_string()))?);
            }
            Some(s) => elems.push(parse_element(s, line).map_err(at)?),
        }
    }
    let spec = spec.ok_or("missing `group <spec>` line")?;
    GroupSet::new(spec, elems).map_err(|e| e.to_string())
}

pub fn render_set(set: &GroupSet) -> String {
    let mut out = format!("group {}\n", set.spec());
    for e in set {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

/// Reads a set file, returning the set and the raw bytes (for digests).
pub fn read_set(path: &Path) -> Result<(GroupSet, Vec<u8>), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| CliError::Usage(format!("{}: not UTF-8", path.display())))?;
    let set = parse_set(text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok((set, bytes))
}

pub fn write_set(path: &Path, set: &GroupSet) -> Result<(), CliError> {
    fs::write(path, render_set(set)).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
