//! Plain CSV tables with a column-name line followed by a `#` units line.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// A column name with its unit tag.
pub type Column<'a> = (&'a str, &'a str);

pub fn render(columns: &[Column], rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    let names: Vec<&str> = columns.iter().map(|c| c.0).collect();
    let units: Vec<&str> = columns.iter().map(|c| c.1).collect();
    let _ = writeln!(s, "{}", names.join(","));
    let _ = writeln!(s, "# {}", units.join(","));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

pub fn write_table(path: &Path, columns: &[Column], rows: &[Vec<f64>]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(render(columns, rows).as_bytes())
        .map_err(|e| Error::io(path, e))
}

/// A parsed table: column names and numeric rows with their line numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<(u64, Vec<f64>)>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

pub fn parse_table(text: &str, path: &Path) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let csv_err = |line: u64, msg: String| Error::Csv {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let columns: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_err(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        // Unit lines are kept as records so that line numbers stay exact.
        if rec.get(0).is_some_and(|f| f.starts_with('#')) {
            continue;
        }
        if rec.len() != columns.len() {
            return Err(csv_err(
                line,
                format!("expected {} fields, found {}", columns.len(), rec.len()),
            ));
        }
        let vals = rec
            .iter()
            .enumerate()
            .map(|(k, v)| {
                v.parse::<f64>().map_err(|_| {
                    csv_err(
                        line,
                        format!("column {:?}: {v:?} is not a number", columns.get(k).map_or("?", |c| c.as_str())),
                    )
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, vals));
    }
    Ok(Table { columns, rows })
}

pub fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_table(&text, path)
}
