//! Observation files: numeric CSV with a header row.

use std::path::Path;

use super::config::Transform;
use crate::error::{Error, Result};

/// Column-named numeric table, one row per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Observations {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    fn targets(&self, column: &Option<String>) -> Result<Vec<usize>> {
        match column {
            None => Ok((0..self.columns.len()).collect()),
            Some(c) => self
                .columns
                .iter()
                .position(|x| x == c)
                .map(|j| vec![j])
                .ok_or_else(|| Error::Data(format!("transform refers to unknown column '{c}'"))),
        }
    }

    /// Applies one transform in place.
    pub fn apply(&mut self, tr: &Transform) -> Result<()> {
        match tr {
            Transform::Divide { column, by } => {
                if *by == 0.0 || !by.is_finite() {
                    return Err(Error::Data(format!("cannot divide by {by}")));
                }
                for j in self.targets(column)? {
                    for r in &mut self.rows {
                        r[j] /= by;
                    }
                }
            }
            Transform::DayStartDifference { column, period } => {
                let p = period.unwrap_or(24);
                if p == 0 {
                    return Err(Error::Data("difference period must be >= 1".into()));
                }
                for j in self.targets(column)? {
                    let w: Vec<f64> = self.rows.iter().map(|r| r[j]).collect();
                    for (i, r) in self.rows.iter_mut().enumerate() {
                        // Row i holds W_{i+1}; the reference is W_{p⌊i/p⌋}.
                        let k = p * (i / p);
                        let base = if k == 0 { 0.0 } else { w[k - 1] };
                        r[j] = w[i] - base;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parses CSV text. `columns` selects and orders the columns kept.
pub fn parse_observations(text: &str, columns: Option<&[String]>) -> Result<Observations> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::Data("empty file: no header row".into()));
    }
    let pick: Vec<usize> = match columns {
        None => (0..header.len()).collect(),
        Some(cs) => cs
            .iter()
            .map(|c| {
                header.iter().position(|h| h == c).ok_or_else(|| Error::Data(format!("column '{c}' not in header")))
            })
            .collect::<Result<_>>()?,
    };
    let mut rows = vec![];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Data(format!("row {}: {e}", i + 1)))?;
        if rec.len() != header.len() {
            return Err(Error::Data(format!("row {}: {} fields, header has {}", i + 1, rec.len(), header.len())));
        }
        let mut row = Vec::with_capacity(pick.len());
        for &j in &pick {
            let cell = &rec[j];
            let v: f64 = cell.parse().map_err(|_| {
                Error::Data(format!("row {}, column {} ('{}'): non-numeric value '{cell}'", i + 1, j + 1, header[j]))
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Data("no observations".into()));
    }
    Ok(Observations { columns: pick.iter().map(|&j| header[j].clone()).collect(), rows })
}

/// Reads an observation file and applies `transforms` in order.
pub fn load_observations(path: &Path, columns: Option<&[String]>, transforms: &[Transform]) -> Result<Observations> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut obs = parse_observations(&text, columns)?;
    for tr in transforms {
        obs.apply(tr)?;
    }
    Ok(obs)
}
