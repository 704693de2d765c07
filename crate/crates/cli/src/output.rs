//! Output formatting: CSV with lossless float encoding and pretty JSON.

use std::io::Write;
use std::path::Path;

/// Formats a float with 17 significant digits, enough to round-trip any
/// finite double exactly.
pub fn float_field(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders header plus rows as CSV with `,` separators and `.` decimals.
pub fn csv_document(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub fn json_document<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Writes to the given path, or stdout when absent.
pub fn emit(out: Option<&Path>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)
                .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}
