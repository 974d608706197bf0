use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ResultRow;
use crate::error::{Error, Result};

/// Version of the result table layout; bumped on any column change.
pub const SCHEMA_VERSION: u32 = 1;

const CSV_COLUMNS: [&str; 11] =
    ["scenario", "method", "c", "eta", "trial", "silhouette", "accuracy", "n_iter", "wall_time_ms", "seed", "error"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::InvalidArgument(format!("unknown format `{s}`, expected csv or json"))),
        }
    }
}

impl OutputFormat {
    /// Guesses from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::Json,
            _ => Self::Csv,
        }
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// CSV with a `# schema=N` comment line ahead of the header.
pub fn write_rows_csv<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    writeln!(out, "# teamsplit results schema={SCHEMA_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.method.clone(),
            r.c.to_string(),
            r.eta.to_string(),
            r.trial.to_string(),
            opt(&r.silhouette),
            opt(&r.accuracy),
            opt(&r.n_iter),
            opt(&r.wall_time_ms),
            r.seed.to_string(),
            opt(&r.error),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct RowsDoc {
    schema_version: u32,
    rows: Vec<ResultRow>,
}

pub fn write_rows_json<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    let doc = RowsDoc { schema_version: SCHEMA_VERSION, rows: rows.to_vec() };
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

pub fn write_rows<W: Write>(rows: &[ResultRow], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_rows_csv(rows, out),
        OutputFormat::Json => write_rows_json(rows, out),
    }
}

fn parse_opt<T: FromStr>(field: &str, column: &str) -> Result<Option<T>> {
    if field.is_empty() {
        return Ok(None);
    }
    field.parse().map(Some).map_err(|_| Error::Parse(format!("bad value `{field}` in column {column}")))
}

pub fn read_rows_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_COLUMNS {
        return Err(Error::Parse(format!("unexpected result columns: {headers:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let need = |i: usize| -> Result<&str> { Ok(&rec[i]) };
        let req = |i: usize| -> Result<String> { Ok(need(i)?.to_string()) };
        let num = |i: usize| -> Result<String> {
            let v = need(i)?;
            if v.is_empty() {
                Err(Error::Parse(format!("missing {}", CSV_COLUMNS[i])))
            } else {
                Ok(v.to_string())
            }
        };
        let parse = |i: usize| -> Result<f64> {
            num(i)?.parse().map_err(|_| Error::Parse(format!("bad number in column {}", CSV_COLUMNS[i])))
        };
        let parse_int = |i: usize| -> Result<u64> {
            num(i)?.parse().map_err(|_| Error::Parse(format!("bad integer in column {}", CSV_COLUMNS[i])))
        };
        rows.push(ResultRow {
            scenario: req(0)?,
            method: req(1)?,
            c: parse_int(2)? as usize,
            eta: parse(3)?,
            trial: parse_int(4)? as usize,
            silhouette: parse_opt(&rec[5], CSV_COLUMNS[5])?,
            accuracy: parse_opt(&rec[6], CSV_COLUMNS[6])?,
            n_iter: parse_opt(&rec[7], CSV_COLUMNS[7])?,
            wall_time_ms: parse_opt(&rec[8], CSV_COLUMNS[8])?,
            seed: parse_int(9)?,
            error: Some(rec[10].to_string()).filter(|s| !s.is_empty()),
        });
    }
    Ok(rows)
}

pub fn read_rows_json<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let doc: RowsDoc = serde_json::from_reader(input).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported schema version {}", doc.schema_version)));
    }
    Ok(doc.rows)
}

/// Reads a result file, choosing the parser by extension.
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let file = fs::File::open(path)?;
    match OutputFormat::from_path(path) {
        OutputFormat::Csv => read_rows_csv(file),
        OutputFormat::Json => read_rows_json(file),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ResultRow> {
        vec![
            ResultRow {
                scenario: "platoon_vee".into(),
                method: "multimodal".into(),
                c: 5,
                eta: 0.1,
                trial: 0,
                silhouette: Some(0.731_234_567_890_123),
                accuracy: Some(1.0),
                n_iter: Some(4),
                wall_time_ms: None,
                seed: 12_345_678_901_234_567_890,
                error: None,
            },
            ResultRow {
                scenario: "platoon_vee".into(),
                method: "single:sonar".into(),
                c: 5,
                eta: 0.1,
                trial: 0,
                silhouette: None,
                accuracy: None,
                n_iter: None,
                wall_time_ms: Some(1.5),
                seed: 1,
                error: Some("invalid argument: bundle has no `sonar` graph, really".into()),
            },
        ]
    }

    #[test]
    fn csv_and_json_round_trip() {
        let rows = sample();
        let mut buf = Vec::new();
        write_rows_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# teamsplit results schema=1\nscenario,method,c,eta"));
        assert_eq!(read_rows_csv(&buf[..]).unwrap(), rows);

        let mut buf = Vec::new();
        write_rows_json(&rows, &mut buf).unwrap();
        assert_eq!(read_rows_json(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn rejects_foreign_tables() {
        assert!(read_rows_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_rows_json(r#"{"schema_version": 9, "rows": []}"#.as_bytes()).is_err());
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
