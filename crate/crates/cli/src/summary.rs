//! Structured summary files and the aggregated report.
//!
//! Every experiment subcommand drops a `<name>.summary` file into the output
//! directory: `key value` lines with at least `type`. The `report`
//! subcommand folds all of them into a fixed-column text table plus a
//! machine-readable TSV.

use crate::CliError;
use std::collections::BTreeMap;
use std::path::Path;

pub fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::Internal(format!("creating {}: {e}", parent.display())))?;
    }
    std::fs::write(path, content)
        .map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display())))
}

pub fn write_summary(out_dir: &Path, name: &str, pairs: &[(&str, String)]) -> Result<(), CliError> {
    let mut content = String::new();
    for (key, value) in pairs {
        content.push_str(&format!("{key} {value}\n"));
    }
    write_file(&out_dir.join(format!("{name}.summary")), &content)
}

fn parse_kv(text: &str) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((key, value)) = line.split_once(char::is_whitespace) {
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
    }
    map
}

/// Aggregate every `*.summary` under `out_dir` into `report.txt` and
/// `report.tsv`. Deterministic: rows are sorted by file name.
pub fn cmd_report(out_dir: &Path) -> Result<(), CliError> {
    let mut rows: Vec<(String, BTreeMap<String, String>)> = Vec::new();
    if out_dir.is_dir() {
        let mut entries: Vec<_> = std::fs::read_dir(out_dir)
            .map_err(|e| CliError::Internal(format!("reading {}: {e}", out_dir.display())))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|ext| ext == "summary"))
            .collect();
        entries.sort();
        for path in entries {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Internal(format!("reading {}: {e}", path.display())))?;
            let map = parse_kv(&text);
            if !map.contains_key("type") {
                return Err(CliError::Usage(format!(
                    "{} has no 'type' field",
                    path.display()
                )));
            }
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("?")
                .to_string();
            rows.push((name, map));
        }
    }

    let columns = ["type", "n", "rate", "predicted", "z"];
    let get = |map: &BTreeMap<String, String>, key: &str| -> String {
        map.get(key).cloned().unwrap_or_else(|| "-".to_string())
    };

    let mut table = String::new();
    table.push_str(&format!(
        "{:<24} {:<14} {:>10} {:>12} {:>12} {:>8}\n",
        "file", "type", "n", "rate", "predicted", "z"
    ));
    let mut tsv = String::from("file\ttype\tn\trate\tpredicted\tz\n");
    for (name, map) in &rows {
        let values: Vec<String> = columns.iter().map(|c| get(map, c)).collect();
        table.push_str(&format!(
            "{:<24} {:<14} {:>10} {:>12} {:>12} {:>8}\n",
            name,
            trunc(&values[0], 14),
            trunc(&values[1], 10),
            trunc(&values[2], 12),
            trunc(&values[3], 12),
            trunc(&values[4], 8)
        ));
        tsv.push_str(&format!("{name}\t{}\n", values.join("\t")));
    }

    write_file(&out_dir.join("report.txt"), &table)?;
    write_file(&out_dir.join("report.tsv"), &tsv)?;
    print!("{table}");
    println!(
        "{} row(s) -> {}",
        rows.len(),
        out_dir.join("report.txt").display()
    );
    Ok(())
}

fn trunc(s: &str, width: usize) -> String {
    if s.len() > width {
        s[..width].to_string()
    } else {
        s.to_string()
    }
}

/// Format an f64 for summaries: full shortest-round-trip representation.
pub fn num(v: f64) -> String {
    format!("{v}")
}
