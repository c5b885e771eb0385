//! Frequency tables, their CSV form and the bundled blackspot catalog.
//!
//! The CSV format is a fixed two-column layout:
//!
//! ```text
//! value,count
//! 3,525
//! 4,209
//! ```
//!
//! Values are non-negative integers, counts positive integers. Duplicate
//! values are merged on read; output is sorted by value with `\n` line endings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CSV_HEADER: &str = "value,count";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DataError {
    #[error("line 1: expected header `value,count`, found `{found}`")]
    BadHeader { found: String },
    #[error("no data rows after the header")]
    EmptyBody,
    #[error("line {line}: expected 2 fields, found {found}")]
    FieldCount { line: u64, found: usize },
    #[error("line {line}: {field} `{text}` is not an integer")]
    Malformed { line: u64, field: &'static str, text: String },
    #[error("line {line}: {field} must not be negative, got {value}")]
    Negative { line: u64, field: &'static str, value: i64 },
    #[error("line {line}: count must be positive, got 0")]
    ZeroCount { line: u64 },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("frequency table has no entries")]
    EmptyTable,
    #[error("values must be strictly increasing ({previous} then {value})")]
    Unsorted { previous: u64, value: u64 },
    #[error("value {value} has count 0")]
    ZeroCountEntry { value: u64 },
    #[error("unknown dataset `{name}`; available: {available}")]
    UnknownDataset { name: String, available: String },
}

/// Observed counts per non-negative integer value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    label: String,
    entries: Vec<(u64, u64)>,
}

impl FrequencyTable {
    /// Builds a table from `(value, count)` pairs already sorted by value.
    pub fn new(label: impl Into<String>, entries: Vec<(u64, u64)>) -> Result<Self, DataError> {
        if entries.is_empty() {
            return Err(DataError::EmptyTable);
        }
        for w in entries.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(DataError::Unsorted { previous: w[0].0, value: w[1].0 });
            }
        }
        if let Some(&(value, _)) = entries.iter().find(|e| e.1 == 0) {
            return Err(DataError::ZeroCountEntry { value });
        }
        Ok(FrequencyTable { label: label.into(), entries })
    }

    /// Tallies raw observations.
    pub fn from_values(
        label: impl Into<String>,
        values: impl IntoIterator<Item = u64>,
    ) -> Result<Self, DataError> {
        let mut counts = BTreeMap::new();
        for v in values {
            *counts.entry(v).or_insert(0u64) += 1;
        }
        Self::new(label, counts.into_iter().collect())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().copied()
    }

    /// Sample size.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// Sum of `value * count`.
    pub fn weighted_sum(&self) -> u64 {
        self.entries.iter().map(|&(v, c)| v * c).sum()
    }

    pub fn min_value(&self) -> u64 {
        self.entries[0].0
    }

    pub fn max_value(&self) -> u64 {
        self.entries[self.entries.len() - 1].0
    }

    pub fn count_of(&self, value: u64) -> u64 {
        self.entries
            .binary_search_by_key(&value, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Every observation, repeated by count.
    pub fn expand(&self) -> Vec<u64> {
        self.entries
            .iter()
            .flat_map(|&(v, c)| std::iter::repeat_n(v, c as usize))
            .collect()
    }

    /// Same counts with every value shifted up by `by`.
    pub fn shifted(&self, by: u64) -> Self {
        FrequencyTable {
            label: self.label.clone(),
            entries: self.entries.iter().map(|&(v, c)| (v + by, c)).collect(),
        }
    }

    /// Parses the `value,count` CSV format.
    pub fn parse_csv(text: &[u8]) -> Result<Self, DataError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text);
        let mut records = reader.records();
        let header = match records.next() {
            None => return Err(DataError::BadHeader { found: String::new() }),
            Some(r) => r.map_err(csv_error)?,
        };
        let found: Vec<&str> = header.iter().collect();
        if found != ["value", "count"] {
            return Err(DataError::BadHeader { found: found.join(",") });
        }
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for record in records {
            let record = record.map_err(csv_error)?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() == 1 && record[0].is_empty() {
                continue;
            }
            if record.len() != 2 {
                return Err(DataError::FieldCount { line, found: record.len() });
            }
            let value = parse_field(&record[0], "value", line)?;
            let count = parse_field(&record[1], "count", line)?;
            if count == 0 {
                return Err(DataError::ZeroCount { line });
            }
            *counts.entry(value).or_insert(0) += count;
        }
        if counts.is_empty() {
            return Err(DataError::EmptyBody);
        }
        Self::new("", counts.into_iter().collect())
    }

    /// Renders the table as `value,count` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(16 * (self.entries.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for &(v, c) in &self.entries {
            out.push_str(&format!("{v},{c}\n"));
        }
        out
    }
}

fn csv_error(e: csv::Error) -> DataError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    DataError::Csv { line, message: e.to_string() }
}

fn parse_field(text: &str, field: &'static str, line: u64) -> Result<u64, DataError> {
    match text.parse::<i64>() {
        Ok(v) if v < 0 => Err(DataError::Negative { line, field, value: v }),
        Ok(v) => Ok(v as u64),
        Err(_) => text
            .parse::<u64>()
            .map_err(|_| DataError::Malformed { line, field, text: text.to_string() }),
    }
}

/// Per-year totals of the blackspot survey.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct YearSummary {
    pub year: u16,
    pub blackspots: u64,
    pub accidents: u64,
    pub deaths: u64,
}

/// Spanish road-accident blackspots, 2003-2007: blackspot count and number of
/// accidents and deaths on those blackspots.
pub const YEAR_SUMMARIES: [YearSummary; 5] = [
    YearSummary { year: 2003, blackspots: 958, accidents: 3941, deaths: 220 },
    YearSummary { year: 2004, blackspots: 780, accidents: 3200, deaths: 191 },
    YearSummary { year: 2005, blackspots: 737, accidents: 3051, deaths: 179 },
    YearSummary { year: 2006, blackspots: 748, accidents: 3071, deaths: 171 },
    YearSummary { year: 2007, blackspots: 802, accidents: 3289, deaths: 134 },
];

pub const TOTAL_ACCIDENTS: u64 = 16552;
pub const TOTAL_DEATHS: u64 = 895;

pub const YEARS: [u16; 5] = [2003, 2004, 2005, 2006, 2007];

// Blackspots by number of accidents (support starts at 3 by the blackspot
// definition). Four 2-accident sites listed by the source are excluded.
const ACCIDENTS_2003: &[(u64, u64)] = &[
    (3, 525), (4, 209), (5, 94), (6, 41), (7, 34), (8, 15), (9, 22), (10, 5), (11, 2),
    (12, 4), (13, 1), (14, 1), (16, 1), (17, 1), (19, 1), (20, 1), (39, 1),
];
const ACCIDENTS_2004: &[(u64, u64)] = &[
    (3, 438), (4, 173), (5, 71), (6, 38), (7, 23), (8, 9), (9, 8), (10, 6), (11, 1),
    (12, 3), (13, 2), (14, 2), (15, 2), (19, 1), (20, 1), (27, 1), (49, 1),
];
const ACCIDENTS_2005: &[(u64, u64)] = &[
    (3, 400), (4, 177), (5, 68), (6, 35), (7, 22), (8, 11), (9, 4), (10, 4), (11, 3),
    (12, 3), (13, 3), (15, 1), (16, 2), (18, 1), (33, 2), (36, 1),
];
const ACCIDENTS_2006: &[(u64, u64)] = &[
    (3, 404), (4, 164), (5, 89), (6, 45), (7, 20), (8, 8), (9, 4), (10, 1), (11, 3),
    (12, 2), (14, 1), (16, 2), (21, 1), (22, 1), (24, 1), (29, 1), (39, 1),
];
const ACCIDENTS_2007: &[(u64, u64)] = &[
    (3, 445), (4, 172), (5, 77), (6, 48), (7, 19), (8, 11), (9, 11), (10, 2), (11, 4),
    (12, 1), (13, 5), (14, 2), (15, 2), (17, 1), (25, 1), (32, 1),
];

// Blackspots by number of deaths.
const DEATHS_2003: &[(u64, u64)] = &[(0, 797), (1, 126), (2, 19), (3, 12), (4, 2), (6, 2)];
const DEATHS_2004: &[(u64, u64)] = &[(0, 636), (1, 108), (2, 27), (3, 7), (4, 2)];
const DEATHS_2005: &[(u64, u64)] =
    &[(0, 611), (1, 94), (2, 23), (3, 3), (4, 3), (5, 1), (6, 1), (7, 1)];
const DEATHS_2006: &[(u64, u64)] =
    &[(0, 632), (1, 84), (2, 19), (3, 9), (4, 1), (5, 1), (6, 1), (7, 1)];
const DEATHS_2007: &[(u64, u64)] = &[(0, 693), (1, 92), (2, 12), (3, 4), (6, 1)];

const CATALOG: [(&str, &[(u64, u64)]); 10] = [
    ("accidents_2003", ACCIDENTS_2003),
    ("accidents_2004", ACCIDENTS_2004),
    ("accidents_2005", ACCIDENTS_2005),
    ("accidents_2006", ACCIDENTS_2006),
    ("accidents_2007", ACCIDENTS_2007),
    ("deaths_2003", DEATHS_2003),
    ("deaths_2004", DEATHS_2004),
    ("deaths_2005", DEATHS_2005),
    ("deaths_2006", DEATHS_2006),
    ("deaths_2007", DEATHS_2007),
];

/// Names of the bundled datasets, accidents first.
pub fn dataset_names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|(name, _)| *name)
}

/// One of the bundled frequency tables, by name.
pub fn bundled(name: &str) -> Result<FrequencyTable, DataError> {
    let entries = CATALOG
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, e)| e.to_vec())
        .ok_or_else(|| DataError::UnknownDataset {
            name: name.to_string(),
            available: dataset_names().collect::<Vec<_>>().join(", "),
        })?;
    FrequencyTable::new(name, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let t = FrequencyTable::parse_csv(b"value,count\n3,525\n4,209").unwrap();
        assert_eq!(t.entries(), &[(3, 525), (4, 209)]);
        assert_eq!(t.total(), 734);
        let t = FrequencyTable::parse_csv(b"value,count\n0,1\n").unwrap();
        assert_eq!(t.entries(), &[(0, 1)]);
        let t = FrequencyTable::parse_csv(b"value,count\n5,2\n5,3\n").unwrap();
        assert_eq!(t.entries(), &[(5, 5)]);
    }

    #[test]
    fn parse_sorts_and_tolerates_crlf() {
        let t = FrequencyTable::parse_csv(b"value,count\r\n9,1\r\n2,4\r\n").unwrap();
        assert_eq!(t.entries(), &[(2, 4), (9, 1)]);
    }

    #[test]
    fn parse_diagnostics() {
        use DataError::*;
        let err = |s: &str| FrequencyTable::parse_csv(s.as_bytes()).unwrap_err();
        assert!(matches!(err("val,count\n1,1"), BadHeader { .. }));
        assert!(matches!(err(""), BadHeader { .. }));
        assert_eq!(err("value,count\n"), EmptyBody);
        assert!(matches!(err("value,count\n1,1\nx,2"), Malformed { line: 3, field: "value", .. }));
        assert!(matches!(err("value,count\n1,2.5"), Malformed { line: 2, field: "count", .. }));
        assert!(matches!(err("value,count\n-1,2"), Negative { line: 2, field: "value", .. }));
        assert!(matches!(err("value,count\n1,-2"), Negative { line: 2, field: "count", .. }));
        assert_eq!(err("value,count\n1,2\n4,0"), ZeroCount { line: 3 });
        assert!(matches!(err("value,count\n1,2,3"), FieldCount { line: 2, found: 3 }));
    }

    #[test]
    fn emit_is_canonical() {
        let t = FrequencyTable::new("z", vec![(0, 4), (7, 1)]).unwrap();
        assert_eq!(t.to_csv(), "value,count\n0,4\n7,1\n");
    }

    #[test]
    fn constructor_invariants() {
        assert_eq!(FrequencyTable::new("", vec![]).unwrap_err(), DataError::EmptyTable);
        assert!(FrequencyTable::new("", vec![(2, 1), (2, 1)]).is_err());
        assert!(FrequencyTable::new("", vec![(2, 0)]).is_err());
    }

    #[test]
    fn bundled_examples() {
        let t = bundled("accidents_2003").unwrap();
        assert_eq!(t.entries().len(), 17);
        assert_eq!(t.total(), 958);
        assert_eq!(t.max_value(), 39);
        let d = bundled("deaths_2007").unwrap();
        assert_eq!(d.entries(), &[(0, 693), (1, 92), (2, 12), (3, 4), (6, 1)]);
        assert_eq!(d.total(), 802);
        let a4 = bundled("accidents_2004").unwrap();
        assert_eq!(*a4.entries().last().unwrap(), (49, 1));
        let d3 = bundled("deaths_2003").unwrap();
        assert_eq!(d3.entries(), &[(0, 797), (1, 126), (2, 19), (3, 12), (4, 2), (6, 2)]);
        match bundled("nope") {
            Err(DataError::UnknownDataset { available, .. }) => {
                assert!(available.contains("deaths_2005"))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn catalog_totals_match_year_summaries() {
        for (i, s) in YEAR_SUMMARIES.iter().enumerate() {
            let acc = bundled(&format!("accidents_{}", s.year)).unwrap();
            let dea = bundled(&format!("deaths_{}", s.year)).unwrap();
            assert_eq!(acc.total(), s.blackspots, "{i}");
            assert_eq!(dea.total(), s.blackspots);
            assert_eq!(acc.weighted_sum(), s.accidents);
            assert_eq!(dea.weighted_sum(), s.deaths);
        }
        let acc: u64 = YEAR_SUMMARIES.iter().map(|s| s.accidents).sum();
        let dea: u64 = YEAR_SUMMARIES.iter().map(|s| s.deaths).sum();
        assert_eq!(acc, TOTAL_ACCIDENTS);
        assert_eq!(dea, TOTAL_DEATHS);
    }

    #[test]
    fn bundled_round_trip() {
        for name in dataset_names() {
            let t = bundled(name).unwrap();
            let back = FrequencyTable::parse_csv(t.to_csv().as_bytes()).unwrap().with_label(name);
            assert_eq!(back, t);
        }
    }
}
