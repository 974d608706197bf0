use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ResultRow;
use crate::error::{Error, Result};

/// A column results can be grouped by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupField {
    Scenario,
    Method,
    C,
    Eta,
    Trial,
}

impl GroupField {
    pub fn name(self) -> &'static str {
        match self {
            GroupField::Scenario => "scenario",
            GroupField::Method => "method",
            GroupField::C => "c",
            GroupField::Eta => "eta",
            GroupField::Trial => "trial",
        }
    }

    fn value(self, row: &ResultRow) -> String {
        match self {
            GroupField::Scenario => row.scenario.clone(),
            GroupField::Method => row.method.clone(),
            GroupField::C => row.c.to_string(),
            GroupField::Eta => row.eta.to_string(),
            GroupField::Trial => row.trial.to_string(),
        }
    }
}

impl FromStr for GroupField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scenario" => Ok(GroupField::Scenario),
            "method" => Ok(GroupField::Method),
            "c" => Ok(GroupField::C),
            "eta" => Ok(GroupField::Eta),
            "trial" => Ok(GroupField::Trial),
            _ => Err(Error::InvalidArgument(format!("cannot group by `{s}`"))),
        }
    }
}

/// Mean, population standard deviation and range of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Stats { mean, std: var.sqrt(), min, max })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    /// Values of the grouping fields, in the order requested.
    pub key: Vec<String>,
    pub count: usize,
    /// Rows in the group that carry an error.
    pub errors: usize,
    pub silhouette: Option<Stats>,
    pub accuracy: Option<Stats>,
}

/// Aggregates rows by `group_by`, keeping groups in order of first appearance.
pub fn summarize(rows: &[ResultRow], group_by: &[GroupField]) -> Result<Vec<SummaryRow>> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no result rows to summarize".into()));
    }
    let mut keys: Vec<Vec<String>> = Vec::new();
    let mut members: Vec<Vec<&ResultRow>> = Vec::new();
    for row in rows {
        let key: Vec<String> = group_by.iter().map(|f| f.value(row)).collect();
        match keys.iter().position(|k| *k == key) {
            Some(i) => members[i].push(row),
            None => {
                keys.push(key);
                members.push(vec![row]);
            }
        }
    }
    Ok(keys
        .into_iter()
        .zip(members)
        .map(|(key, group)| {
            let sil: Vec<f64> = group.iter().filter_map(|r| r.silhouette).collect();
            let acc: Vec<f64> = group.iter().filter_map(|r| r.accuracy).collect();
            SummaryRow {
                key,
                count: group.len(),
                errors: group.iter().filter(|r| r.error.is_some()).count(),
                silhouette: Stats::of(&sil),
                accuracy: Stats::of(&acc),
            }
        })
        .collect())
}

/// Writes a summary as CSV.
pub fn write_summary<W: Write>(summary: &[SummaryRow], group_by: &[GroupField], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = group_by.iter().map(|f| f.name().to_string()).collect();
    for col in ["count", "errors"] {
        header.push(col.into());
    }
    for metric in ["silhouette", "accuracy"] {
        for stat in ["mean", "std", "min", "max"] {
            header.push(format!("{metric}_{stat}"));
        }
    }
    let csv_err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for s in summary {
        let mut rec = s.key.clone();
        rec.push(s.count.to_string());
        rec.push(s.errors.to_string());
        for stats in [s.silhouette, s.accuracy] {
            match stats {
                Some(st) => rec.extend([st.mean, st.std, st.min, st.max].iter().map(f64::to_string)),
                None => rec.extend(std::iter::repeat_n(String::new(), 4)),
            }
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
