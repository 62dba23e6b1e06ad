use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{DataError, Result};
use crate::dst::Frame;

/// Label of the stationary hypothesis.
pub const STATIONARY: &str = "s";
/// Label of the moving hypothesis.
pub const MOVING: &str = "m";

/// The obstacle-state frame `{s, m}` used by every radar dataset.
pub fn radar_frame() -> Frame {
    Frame::new([STATIONARY, MOVING]).expect("static frame is valid")
}

/// One measured column of a radar reading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    Timestamp,
    Density,
    Reflection,
    Velocity,
}

impl Feature {
    /// Schema order, which is also the CSV column order.
    pub const ALL: [Feature; 4] = [
        Feature::Timestamp,
        Feature::Density,
        Feature::Reflection,
        Feature::Velocity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Timestamp => "timestamp",
            Feature::Density => "density",
            Feature::Reflection => "reflection",
            Feature::Velocity => "velocity",
        }
    }

    /// Parses a comma-separated list such as `"velocity,reflection"`.
    pub fn parse_list(text: &str) -> Result<Vec<Feature>> {
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let feature: Feature = part.parse()?;
            if !out.contains(&feature) {
                out.push(feature);
            }
        }
        Ok(out)
    }

    pub fn join(features: &[Feature]) -> String {
        features.iter().map(|f| f.name()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = DataError;

    /// `distance` is accepted as an alias for `density`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "timestamp" => Ok(Feature::Timestamp),
            "density" | "distance" => Ok(Feature::Density),
            "reflection" => Ok(Feature::Reflection),
            "velocity" => Ok(Feature::Velocity),
            other => Err(DataError::UnknownFeature(other.to_owned())),
        }
    }
}

/// One radar reading with its claimed class and ground-truth spoof flag.
#[derive(Clone, Debug, PartialEq)]
pub struct RadarRecord {
    /// Seconds.
    pub timestamp: f64,
    /// Width of the obstruction ahead.
    pub density: f64,
    /// Reflection intensity.
    pub reflection: f64,
    /// km/h.
    pub velocity: f64,
    /// Claimed class: `s`, `m`, or the composite `sm`.
    pub label: String,
    pub spoofed: bool,
}

impl RadarRecord {
    pub fn value(&self, feature: Feature) -> f64 {
        match feature {
            Feature::Timestamp => self.timestamp,
            Feature::Density => self.density,
            Feature::Reflection => self.reflection,
            Feature::Velocity => self.velocity,
        }
    }

    pub(crate) fn value_mut(&mut self, feature: Feature) -> &mut f64 {
        match feature {
            Feature::Timestamp => &mut self.timestamp,
            Feature::Density => &mut self.density,
            Feature::Reflection => &mut self.reflection,
            Feature::Velocity => &mut self.velocity,
        }
    }
}

/// An ordered collection of radar records with a free-text provenance note.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub records: Vec<RadarRecord>,
    pub provenance: String,
}

impl Dataset {
    pub fn new(records: Vec<RadarRecord>, provenance: impl Into<String>) -> Self {
        Self {
            records,
            provenance: provenance.into(),
        }
    }

    pub fn schema(&self) -> &'static [Feature] {
        &Feature::ALL
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records at `indices`, in the order given.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let records = indices
            .iter()
            .map(|&i| {
                self.records.get(i).cloned().ok_or(DataError::IndexOutOfRange {
                    index: i,
                    len: self.len(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Dataset::new(records, self.provenance.clone()))
    }

    /// Checks every record against the schema: finite values, non-negative
    /// density and reflection, non-decreasing timestamps and labels naming a
    /// non-empty subset of the radar frame. Row numbers in errors are 1-based.
    pub fn validate(&self) -> Result<()> {
        let frame = radar_frame();
        let mut previous = f64::NEG_INFINITY;
        for (i, record) in self.records.iter().enumerate() {
            let row = i + 1;
            for feature in Feature::ALL {
                let value = record.value(feature);
                if !value.is_finite() {
                    return Err(DataError::NonFinite { row, feature });
                }
                let non_negative = matches!(feature, Feature::Timestamp | Feature::Density | Feature::Reflection);
                if non_negative && value < 0.0 {
                    return Err(DataError::NegativeValue { row, feature });
                }
            }
            if record.timestamp < previous {
                return Err(DataError::TimestampOrder { row });
            }
            previous = record.timestamp;
            match frame.parse_set(&record.label) {
                Ok(set) if !set.is_empty() => {}
                _ => {
                    return Err(DataError::InvalidLabel {
                        row,
                        label: record.label.clone(),
                    })
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn record(t: f64, label: &str) -> RadarRecord {
        RadarRecord {
            timestamp: t,
            density: 1.0,
            reflection: 2.0,
            velocity: 3.0,
            label: label.to_owned(),
            spoofed: false,
        }
    }

    #[test]
    fn feature_names_and_alias() {
        assert_eq!("distance".parse::<Feature>().unwrap(), Feature::Density);
        assert_eq!(
            Feature::parse_list("velocity, reflection,velocity").unwrap(),
            [Feature::Velocity, Feature::Reflection]
        );
        assert!(matches!("speed".parse::<Feature>(), Err(DataError::UnknownFeature(_))));
        assert_eq!(Feature::join(&Feature::ALL), "timestamp,density,reflection,velocity");
    }

    #[test]
    fn validation_catches_schema_violations() {
        let ok = Dataset::new(vec![record(0.0, "s"), record(0.1, "sm")], "");
        assert!(ok.validate().is_ok());

        let mut backwards = ok.clone();
        backwards.records[1].timestamp = -0.5;
        assert!(matches!(
            backwards.validate(),
            Err(DataError::NegativeValue { row: 2, .. })
        ));
        backwards.records[0].timestamp = 1.0;
        backwards.records[1].timestamp = 0.5;
        assert_eq!(backwards.validate(), Err(DataError::TimestampOrder { row: 2 }));

        let mut bad_label = ok.clone();
        bad_label.records[0].label = "x".into();
        assert!(matches!(
            bad_label.validate(),
            Err(DataError::InvalidLabel { row: 1, .. })
        ));

        let mut nan = ok;
        nan.records[0].velocity = f64::NAN;
        assert_eq!(
            nan.validate(),
            Err(DataError::NonFinite {
                row: 1,
                feature: Feature::Velocity
            })
        );
    }

    #[test]
    fn subset_bounds() {
        let d = Dataset::new(vec![record(0.0, "s"), record(1.0, "m")], "p");
        assert_eq!(d.subset(&[1]).unwrap().records[0].label, "m");
        assert!(matches!(d.subset(&[2]), Err(DataError::IndexOutOfRange { .. })));
    }
}
