//! Tabulated profile files: one "xi value" record per line, fields split on
//! whitespace or commas, "#" starts a comment, xi strictly increasing.

use std::path::Path;

use evans_core::TabulatedProfile;

use crate::config::config_err;
use crate::CliError;

pub fn load_profile(path: &Path) -> Result<TabulatedProfile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    parse_profile(&text).map_err(|msg| config_err(format!("{}: {msg}", path.display())))
}

pub fn parse_profile(text: &str) -> Result<TabulatedProfile, String> {
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    let mut last_line = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let data = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let fields: Vec<&str> = data
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 2 {
            return Err(format!(
                "parse error at line {line_no}: expected two numeric fields, found {}",
                fields.len()
            ));
        }
        let xi: f64 = fields[0]
            .parse()
            .map_err(|_| format!("parse error at line {line_no}: bad xi '{}'", fields[0]))?;
        let value: f64 = fields[1]
            .parse()
            .map_err(|_| format!("parse error at line {line_no}: bad value '{}'", fields[1]))?;
        if let Some(&prev) = nodes.last() {
            if xi <= prev {
                return Err(format!(
                    "xi values must be strictly increasing (line {line_no}: {xi} after {prev})"
                ));
            }
        }
        nodes.push(xi);
        values.push(value);
        last_line = line_no;
    }
    if nodes.len() < 4 {
        return Err(format!(
            "too few rows: need at least 4 samples, found {} (last data line {last_line})",
            nodes.len()
        ));
    }
    TabulatedProfile::new(nodes, values).map_err(|e| e.to_string())
}
