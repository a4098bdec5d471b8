//! Deterministic CSV output.
//!
//! Numbers are rendered in a fixed `%.9e`-style scientific format so that
//! repeated runs produce byte-identical files.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// C-style `%.9e`: nine fractional digits, two-digit signed exponent.
pub fn fmt_e9(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.9e}");
    // Rust renders the exponent without sign or padding ("1.5e9"); rewrite
    // it as e+09 / e-09.
    match s.split_once('e') {
        Some((mant, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            if digits.len() < 2 {
                format!("{mant}e{sign}0{digits}")
            } else {
                format!("{mant}e{sign}{digits}")
            }
        }
        None => s,
    }
}

/// Write a CSV file: provenance header comments, one column-name line,
/// then the data rows.
pub fn write_csv(
    path: &Path,
    header_comments: &[String],
    columns: &[&str],
    rows: &[Vec<String>],
) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut out = String::new();
    for line in header_comments {
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())
}
