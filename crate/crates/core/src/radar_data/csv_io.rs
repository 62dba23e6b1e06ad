use std::fs;
use std::io::Write;
use std::path::Path;

use super::{DataError, Dataset, Feature, RadarRecord, Result};

/// Column order written by [`write_csv`].
pub const CSV_HEADER: [&str; 6] = ["timestamp", "density", "reflection", "velocity", "label", "spoofed"];

#[derive(Clone, Copy, PartialEq)]
enum Column {
    Value(Feature),
    Label,
    Spoofed,
}

impl Column {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "label" => Ok(Column::Label),
            "spoofed" => Ok(Column::Spoofed),
            other => other
                .parse()
                .map(Column::Value)
                .map_err(|_| DataError::UnknownColumn(other.to_owned())),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Column::Value(f) => f.name(),
            Column::Label => "label",
            Column::Spoofed => "spoofed",
        }
    }
}

/// Parses a dataset from CSV text.
///
/// Leading lines starting with `#` form the provenance note. The header row
/// must name every schema column exactly once, in any order; `distance` is
/// read as `density`.
pub fn parse_csv(text: &str) -> Result<Dataset> {
    let mut provenance = Vec::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        let Some(comment) = line.strip_prefix('#') else {
            break;
        };
        let comment = comment.trim_end_matches(['\n', '\r']);
        provenance.push(comment.strip_prefix(' ').unwrap_or(comment));
        body_start += line.len();
    }
    let body = &text[body_start..];
    if body.trim().is_empty() {
        return Err(DataError::EmptyFile);
    }

    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header = reader.headers()?.clone();
    let mut columns = Vec::with_capacity(header.len());
    for name in header.iter() {
        let column = Column::parse(name.trim())?;
        if columns.contains(&column) {
            return Err(DataError::DuplicateColumn(column.name().to_owned()));
        }
        columns.push(column);
    }
    for required in CSV_HEADER {
        if !columns.iter().any(|c| c.name() == required) {
            return Err(DataError::MissingColumn(required.to_owned()));
        }
    }

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_number = i + 1;
        let row = row?;
        let mut record = RadarRecord {
            timestamp: 0.0,
            density: 0.0,
            reflection: 0.0,
            velocity: 0.0,
            label: String::new(),
            spoofed: false,
        };
        for (column, cell) in columns.iter().zip(row.iter()) {
            let cell = cell.trim();
            match *column {
                Column::Value(feature) => {
                    *record.value_mut(feature) = cell.parse().map_err(|_| DataError::NonNumericCell {
                        row: row_number,
                        column: feature.name().to_owned(),
                    })?;
                }
                Column::Label => record.label = cell.to_owned(),
                Column::Spoofed => {
                    record.spoofed = match cell {
                        "0" => false,
                        "1" => true,
                        other => {
                            return Err(DataError::InvalidFlag {
                                row: row_number,
                                value: other.to_owned(),
                            })
                        }
                    }
                }
            }
        }
        records.push(record);
    }

    let dataset = Dataset::new(records, provenance.join("\n"));
    dataset.validate()?;
    Ok(dataset)
}

/// Renders a dataset as CSV: provenance lines as `# ` comments, then the
/// fixed header, then one row per record with `0`/`1` spoof flags.
pub fn to_csv_string(dataset: &Dataset) -> Result<String> {
    let mut out = Vec::new();
    if !dataset.provenance.is_empty() {
        for line in dataset.provenance.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    {
        let mut writer = csv::Writer::from_writer(&mut out);
        writer.write_record(CSV_HEADER)?;
        for r in &dataset.records {
            writer.write_record([
                r.timestamp.to_string(),
                r.density.to_string(),
                r.reflection.to_string(),
                r.velocity.to_string(),
                r.label.clone(),
                if r.spoofed { "1" } else { "0" }.to_owned(),
            ])?;
        }
        writer.flush()?;
    }
    Ok(String::from_utf8(out).expect("csv output is utf-8"))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    parse_csv(&fs::read_to_string(path)?)
}

pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_csv_string(dataset)?)?;
    Ok(())
}
