//! Radar reading schema, CSV datasets, a seeded synthetic generator and the
//! label-flip spoofing attack.

mod csv_io;
mod generator;
mod record;
mod spoof;

pub use csv_io::{parse_csv, read_csv, to_csv_string, write_csv, CSV_HEADER};
pub use generator::{generate, ClassSpec, Gaussian, GeneratorConfig, GENERATED_FEATURES};
pub use record::{radar_frame, Dataset, Feature, RadarRecord, MOVING, STATIONARY};
pub use spoof::{flipped_label, inject_spoof, train_test_split, Split, SpoofSelection, DEFAULT_TRAIN_FRACTION};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("csv error: {0}")]
    Csv(String),
    #[error("file is empty")]
    EmptyFile,
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("column {0:?} appears more than once")]
    DuplicateColumn(String),
    #[error("row {row}: non-numeric value in column {column:?}")]
    NonNumericCell { row: usize, column: String },
    #[error("row {row}: spoofed flag must be 0 or 1, got {value:?}")]
    InvalidFlag { row: usize, value: String },
    #[error("row {row}: invalid label {label:?}")]
    InvalidLabel { row: usize, label: String },
    #[error("row {row}: {feature} is not finite")]
    NonFinite { row: usize, feature: Feature },
    #[error("row {row}: {feature} must not be negative")]
    NegativeValue { row: usize, feature: Feature },
    #[error("row {row}: timestamp decreases")]
    TimestampOrder { row: usize },
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("record index {index} out of range for {len} records")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("cannot spoof {count} records, only {available} available")]
    CountExceedsDataset { count: usize, available: usize },
    #[error("record {index} has label {label:?}, which has no opposite class")]
    NotFlippable { index: usize, label: String },
}

impl From<std::io::Error> for DataError {
    fn from(e: std::io::Error) -> Self {
        DataError::Io(e.to_string())
    }
}

impl From<csv::Error> for DataError {
    fn from(e: csv::Error) -> Self {
        DataError::Csv(e.to_string())
    }
}

pub type Result<T, E = DataError> = std::result::Result<T, E>;
