use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Dated values with strictly increasing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable<T> {
    entries: Vec<(NaiveDate, T)>,
    pub label: String,
    pub units: String,
}

impl<T: Scalar> SeriesTable<T> {
    /// Dates must be strictly increasing; an order error reports the
    /// 1-based position of the first offending entry.
    pub fn new(
        label: impl Into<String>,
        units: impl Into<String>,
        entries: Vec<(NaiveDate, T)>,
    ) -> Result<Self> {
        if let Some(i) = entries.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(Error::SeriesOrder {
                row: i + 2,
                date: entries[i + 1].0,
            });
        }
        Ok(SeriesTable {
            entries,
            label: label.into(),
            units: units.into(),
        })
    }

    /// Sorts by date first; duplicate dates are still an error.
    pub fn from_unsorted(
        label: impl Into<String>,
        units: impl Into<String>,
        mut entries: Vec<(NaiveDate, T)>,
    ) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        Self::new(label, units, entries)
    }

    pub fn entries(&self) -> &[(NaiveDate, T)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        self.entries.iter().map(|e| e.1)
    }

    pub fn map_values(&self, mut f: impl FnMut(T) -> T) -> Self {
        SeriesTable {
            entries: self.entries.iter().map(|&(d, v)| (d, f(v))).collect(),
            label: self.label.clone(),
            units: self.units.clone(),
        }
    }
}

/// Reads a `date,value` CSV with ISO-8601 dates. Rows are numbered from 1
/// for the first data row in error messages.
pub fn read_series_csv<T: Scalar>(path: impl AsRef<Path>) -> Result<SeriesTable<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_series_csv(&text, &label)
}

pub(crate) fn parse_series_csv<T: Scalar>(text: &str, label: &str) -> Result<SeriesTable<T>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().unwrap_or_default();
    if header.trim() != "date,value" {
        return Err(Error::parse(
            "series csv",
            format!("expected header \"date,value\", found {header:?}"),
        ));
    }
    let mut entries = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        let (d, v) = line
            .split_once(',')
            .ok_or_else(|| Error::parse("series csv", format!("row {row}: expected two fields")))?;
        let date = NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d")
            .map_err(|e| Error::parse("series csv", format!("row {row}: bad date {d:?}: {e}")))?;
        let value = v
            .trim()
            .parse::<T>()
            .map_err(|_| Error::parse("series csv", format!("row {row}: bad value {v:?}")))?;
        entries.push((date, value));
    }
    SeriesTable::new(label, "", entries)
}

pub fn write_series_csv<T: Scalar>(table: &SeriesTable<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_series_csv(table)).map_err(|e| Error::io(path, e))
}

pub(crate) fn format_series_csv<T: Scalar>(table: &SeriesTable<T>) -> String {
    let mut out = String::from("date,value\n");
    for (d, v) in table.entries() {
        let _ = writeln!(out, "{},{}", d.format("%Y-%m-%d"), v);
    }
    out
}
