use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use super::{radar_frame, DataError, Dataset, Feature, RadarRecord, Result, MOVING, STATIONARY};

/// Features drawn by the generator; timestamps are synthesized instead.
pub const GENERATED_FEATURES: [Feature; 3] = [Feature::Density, Feature::Reflection, Feature::Velocity];

const MAX_REDRAWS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaussian {
    pub mean: f64,
    pub variance: f64,
}

impl Gaussian {
    pub const fn new(mean: f64, variance: f64) -> Self {
        Self { mean, variance }
    }
}

/// Record count and per-feature distributions for one class label.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSpec {
    pub label: String,
    pub count: usize,
    pub features: BTreeMap<Feature, Gaussian>,
}

impl ClassSpec {
    pub fn new(label: &str, count: usize, density: Gaussian, reflection: Gaussian, velocity: Gaussian) -> Self {
        Self {
            label: label.to_owned(),
            count,
            features: BTreeMap::from([
                (Feature::Density, density),
                (Feature::Reflection, reflection),
                (Feature::Velocity, velocity),
            ]),
        }
    }
}

/// Parameters of a synthetic corpus. A fixed seed yields identical output.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub timestamp_start: f64,
    pub timestamp_step: f64,
    pub classes: Vec<ClassSpec>,
}

impl GeneratorConfig {
    /// Stationary and moving obstacles that are far apart in velocity (10σ)
    /// and reflection (6σ) while their density distributions overlap.
    pub fn well_separated(seed: u64, stationary: usize, moving: usize) -> Self {
        Self {
            seed,
            timestamp_start: 0.0,
            timestamp_step: 0.1,
            classes: vec![
                ClassSpec::new(
                    STATIONARY,
                    stationary,
                    Gaussian::new(2.0, 0.36),
                    Gaussian::new(60.0, 25.0),
                    Gaussian::new(0.0, 2.25),
                ),
                ClassSpec::new(
                    MOVING,
                    moving,
                    Gaussian::new(2.3, 0.36),
                    Gaussian::new(30.0, 25.0),
                    Gaussian::new(40.0, 16.0),
                ),
            ],
        }
    }

    pub fn class(&self, label: &str) -> Option<&ClassSpec> {
        self.classes.iter().find(|c| c.label == label)
    }

    pub fn class_mut(&mut self, label: &str) -> Option<&mut ClassSpec> {
        self.classes.iter_mut().find(|c| c.label == label)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(DataError::InvalidConfig(msg));
        if !(self.timestamp_start.is_finite() && self.timestamp_start >= 0.0) {
            return invalid(format!(
                "timestamp_start must be finite and >= 0, got {}",
                self.timestamp_start
            ));
        }
        if !(self.timestamp_step.is_finite() && self.timestamp_step >= 0.0) {
            return invalid(format!(
                "timestamp_step must be finite and >= 0, got {}",
                self.timestamp_step
            ));
        }
        let frame = radar_frame();
        for (i, class) in self.classes.iter().enumerate() {
            if !matches!(frame.parse_set(&class.label), Ok(set) if !set.is_empty()) {
                return invalid(format!("unknown class label {:?}", class.label));
            }
            if self.classes[..i].iter().any(|c| c.label == class.label) {
                return invalid(format!("class {:?} listed twice", class.label));
            }
            for feature in GENERATED_FEATURES {
                let Some(dist) = class.features.get(&feature) else {
                    return invalid(format!("class {:?} has no {feature} distribution", class.label));
                };
                if !dist.mean.is_finite() {
                    return invalid(format!("{}.{feature}.mean is not finite", class.label));
                }
                if !(dist.variance.is_finite() && dist.variance > 0.0) {
                    return invalid(format!("{}.{feature}.variance must be > 0", class.label));
                }
            }
            if let Some(extra) = class.features.keys().find(|f| !GENERATED_FEATURES.contains(f)) {
                return invalid(format!("{extra} cannot be generated for class {:?}", class.label));
            }
        }
        Ok(())
    }

    /// Key-value rendering accepted by [`GeneratorConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "timestamp_start = {}", self.timestamp_start);
        let _ = writeln!(out, "timestamp_step = {}", self.timestamp_step);
        let labels: Vec<&str> = self.classes.iter().map(|c| c.label.as_str()).collect();
        let _ = writeln!(out, "classes = {}", labels.join(","));
        for class in &self.classes {
            let _ = writeln!(out, "{}.count = {}", class.label, class.count);
            for (feature, dist) in &class.features {
                let _ = writeln!(out, "{}.{feature}.mean = {}", class.label, dist.mean);
                let _ = writeln!(out, "{}.{feature}.variance = {}", class.label, dist.variance);
            }
        }
        out
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| DataError::InvalidConfig(format!("line {}: expected key = value", n + 1)))?;
            if entries.insert(key.trim().to_owned(), value.trim().to_owned()).is_some() {
                return Err(DataError::InvalidConfig(format!("duplicate key {:?}", key.trim())));
            }
        }

        let mut take = |key: &str| {
            entries
                .remove(key)
                .ok_or_else(|| DataError::InvalidConfig(format!("missing key {key:?}")))
        };
        fn num<T: std::str::FromStr>(key: &str, value: String) -> Result<T> {
            value
                .parse()
                .map_err(|_| DataError::InvalidConfig(format!("{key}: cannot parse {value:?}")))
        }

        let seed = num("seed", take("seed")?)?;
        let timestamp_start = num("timestamp_start", take("timestamp_start")?)?;
        let timestamp_step = num("timestamp_step", take("timestamp_step")?)?;
        let labels = take("classes")?;
        let mut classes = Vec::new();
        for label in labels.split(',').map(str::trim).filter(|l| !l.is_empty()) {
            let count_key = format!("{label}.count");
            let count = num(&count_key, take(&count_key)?)?;
            let mut features = BTreeMap::new();
            for feature in GENERATED_FEATURES {
                let mean_key = format!("{label}.{feature}.mean");
                let var_key = format!("{label}.{feature}.variance");
                let mean = num(&mean_key, take(&mean_key)?)?;
                let variance = num(&var_key, take(&var_key)?)?;
                features.insert(feature, Gaussian::new(mean, variance));
            }
            classes.push(ClassSpec {
                label: label.to_owned(),
                count,
                features,
            });
        }
        if let Some(key) = entries.keys().next() {
            return Err(DataError::InvalidConfig(format!("unknown key {key:?}")));
        }
        let config = Self {
            seed,
            timestamp_start,
            timestamp_step,
            classes,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Draws every class's records from its configured Gaussians, shuffles them
/// into one stream and stamps them at `start + i·step`.
///
/// Density and reflection draws below zero are redrawn so the output always
/// satisfies the schema. All records are honest (`spoofed = false`).
pub fn generate(config: &GeneratorConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut records = Vec::with_capacity(config.classes.iter().map(|c| c.count).sum());

    for class in &config.classes {
        let samplers: Vec<(Feature, Normal<f64>)> = GENERATED_FEATURES
            .iter()
            .map(|&f| {
                let d = class.features[&f];
                let normal = Normal::new(d.mean, d.variance.sqrt())
                    .map_err(|e| DataError::InvalidConfig(format!("{}.{f}: {e}", class.label)))?;
                Ok((f, normal))
            })
            .collect::<Result<_>>()?;

        for _ in 0..class.count {
            let mut record = RadarRecord {
                timestamp: 0.0,
                density: 0.0,
                reflection: 0.0,
                velocity: 0.0,
                label: class.label.clone(),
                spoofed: false,
            };
            for (feature, normal) in &samplers {
                let mut value = rng.sample(normal);
                if *feature != Feature::Velocity {
                    let mut redraws = 0;
                    while value < 0.0 && redraws < MAX_REDRAWS {
                        value = rng.sample(normal);
                        redraws += 1;
                    }
                    value = value.max(0.0);
                }
                *record.value_mut(*feature) = value;
            }
            records.push(record);
        }
    }

    records.shuffle(&mut rng);
    for (i, record) in records.iter_mut().enumerate() {
        record.timestamp = config.timestamp_start + i as f64 * config.timestamp_step;
    }
    let dataset = Dataset::new(records, format!("synthetic corpus, seed {}", config.seed));
    dataset.validate()?;
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radar_data::to_csv_string;

    #[test]
    fn zero_counts_give_empty_dataset() {
        let d = generate(&GeneratorConfig::well_separated(1, 0, 0)).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn same_seed_same_bytes() {
        let config = GeneratorConfig::well_separated(7, 100, 100);
        let a = to_csv_string(&generate(&config).unwrap()).unwrap();
        let b = to_csv_string(&generate(&config).unwrap()).unwrap();
        assert_eq!(a, b);
        let other = to_csv_string(&generate(&GeneratorConfig::well_separated(8, 100, 100)).unwrap()).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn counts_labels_and_timestamps() {
        let d = generate(&GeneratorConfig::well_separated(3, 5, 7)).unwrap();
        assert_eq!(d.records.iter().filter(|r| r.label == "s").count(), 5);
        assert_eq!(d.records.iter().filter(|r| r.label == "m").count(), 7);
        assert!(d.records.iter().all(|r| !r.spoofed));
        for (i, r) in d.records.iter().enumerate() {
            assert!((r.timestamp - i as f64 * 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn config_text_round_trip() {
        let mut config = GeneratorConfig::well_separated(11, 3, 4);
        config.timestamp_start = 2.5;
        let parsed = GeneratorConfig::parse(&config.to_text()).unwrap();
        assert_eq!(parsed, config);
    }

    #[test]
    fn config_errors() {
        let mut bad = GeneratorConfig::well_separated(1, 1, 1);
        bad.classes[0]
            .features
            .insert(Feature::Velocity, Gaussian::new(0.0, 0.0));
        assert!(matches!(generate(&bad), Err(DataError::InvalidConfig(_))));

        let mut unknown = GeneratorConfig::well_separated(1, 1, 1);
        unknown.classes[1].label = "q".into();
        assert!(matches!(unknown.validate(), Err(DataError::InvalidConfig(_))));

        let text = GeneratorConfig::well_separated(1, 1, 1).to_text();
        assert!(GeneratorConfig::parse(&format!("{text}bogus = 1\n")).is_err());
        assert!(GeneratorConfig::parse(&text.replace("seed = 1\n", "")).is_err());
        assert!(GeneratorConfig::parse(&text.replace("s.count = 1", "s.count = -1")).is_err());
    }

    #[test]
    fn composite_class_can_be_generated() {
        let mut config = GeneratorConfig::well_separated(5, 2, 2);
        config.classes.push(ClassSpec::new(
            "sm",
            3,
            Gaussian::new(2.0, 1.0),
            Gaussian::new(45.0, 25.0),
            Gaussian::new(20.0, 16.0),
        ));
        let d = generate(&config).unwrap();
        assert_eq!(d.records.iter().filter(|r| r.label == "sm").count(), 3);
    }
}
