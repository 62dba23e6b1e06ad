//! Class-conditional Gaussian feature likelihoods and the per-feature mass
//! assignment built from them.
//!
//! For a feature value `x`, every non-empty subset `S` of the frame gets a
//! likelihood `f^S(x)`: the fitted Gaussian density for singletons, and for
//! composite sets either the sum of the member densities or, in
//! [`CompositeMode::FittedComposite`], a Gaussian fitted to records carrying
//! that composite label. Masses are the likelihoods divided by their total
//! over the power set.

mod model_file;

pub use model_file::{deserialize_model, read_model, serialize_model, write_model, FORMAT_VERSION};

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dst::{DstError, FocalSet, Frame, MassFunction};
use crate::radar_data::{Feature, RadarRecord};

/// Lower bound applied to every fitted variance.
pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Below this likelihood total the observation carries no usable evidence.
pub const UNDERFLOW_LIMIT: f64 = 1e-300;

/// Minimum number of training records per class.
pub const MIN_CLASS_RECORDS: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("at least one feature is required")]
    NoFeatures,
    #[error("feature {0} listed more than once")]
    DuplicateFeature(Feature),
    #[error("class {class:?} has {count} training records, at least {MIN_CLASS_RECORDS} are needed")]
    InsufficientData { class: String, count: usize },
    #[error("feature {0:?} is not part of this model")]
    UnknownFeature(String),
    #[error("label {0:?} is not a subset of the model frame")]
    UnknownLabel(String),
    #[error("observation {0} is not finite")]
    NonFiniteInput(f64),
    #[error("no parameters for ({feature}, {class})")]
    MissingParams { feature: String, class: String },
    #[error("invalid parameters for ({feature}, {class}): {reason}")]
    InvalidParams {
        feature: String,
        class: String,
        reason: String,
    },
    #[error("model file line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("model file version {found} is not supported (expected {expected})")]
    VersionMismatch { found: String, expected: u32 },
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Dst(#[from] DstError),
}

impl From<std::io::Error> for ModelError {
    fn from(e: std::io::Error) -> Self {
        ModelError::Io(e.to_string())
    }
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

/// Mean and variance of a univariate normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianParams {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianParams {
    pub fn density(&self, x: f64) -> f64 {
        let z2 = (x - self.mean) * (x - self.mean) / self.variance;
        (-0.5 * z2).exp() / (2.0 * PI * self.variance).sqrt()
    }

    /// Sample mean and `n − 1` variance, floored at [`VARIANCE_FLOOR`].
    fn estimate(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        Self {
            mean,
            variance: (ss / (n - 1.0)).max(VARIANCE_FLOOR),
        }
    }
}

/// How likelihoods of composite sets such as `{s, m}` are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CompositeMode {
    /// `f^S(x) = Σ_{A∈S} f^A(x)`.
    #[default]
    SumOfSingletons,
    /// Gaussians fitted to composite-labeled records where available, with
    /// the sum of singletons for composites that have none.
    FittedComposite,
}

impl CompositeMode {
    pub fn name(self) -> &'static str {
        match self {
            CompositeMode::SumOfSingletons => "sum-of-singletons",
            CompositeMode::FittedComposite => "fitted-composite",
        }
    }
}

impl fmt::Display for CompositeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompositeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sum-of-singletons" => Ok(CompositeMode::SumOfSingletons),
            "fitted-composite" => Ok(CompositeMode::FittedComposite),
            other => Err(format!(
                "unknown composite mode {other:?} (expected sum-of-singletons or fitted-composite)"
            )),
        }
    }
}

/// Fitted per-(feature, class) Gaussians over a frame. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureModel {
    frame: Frame,
    features: Vec<Feature>,
    params: BTreeMap<(Feature, FocalSet), GaussianParams>,
    composite_mode: CompositeMode,
}

impl FeatureModel {
    /// Assembles a model from explicit parameters.
    ///
    /// Every (feature, singleton) pair must be present. Composite entries are
    /// only allowed in [`CompositeMode::FittedComposite`]. Variances below the
    /// floor are raised to it.
    pub fn new(
        frame: Frame,
        features: Vec<Feature>,
        params: BTreeMap<(Feature, FocalSet), GaussianParams>,
        composite_mode: CompositeMode,
    ) -> Result<Self> {
        check_features(&features)?;
        let mut params = params;
        for (&(feature, set), p) in params.iter_mut() {
            let class = frame.set_label(set);
            if !features.contains(&feature) {
                return Err(ModelError::UnknownFeature(feature.name().to_owned()));
            }
            if set.is_empty() || !frame.contains(set) {
                return Err(ModelError::UnknownLabel(class));
            }
            if !set.is_singleton() && composite_mode == CompositeMode::SumOfSingletons {
                return Err(ModelError::InvalidParams {
                    feature: feature.name().to_owned(),
                    class,
                    reason: "composite parameters require fitted-composite mode".into(),
                });
            }
            if !p.mean.is_finite() || !p.variance.is_finite() || p.variance < 0.0 {
                return Err(ModelError::InvalidParams {
                    feature: feature.name().to_owned(),
                    class,
                    reason: format!("mean {} variance {}", p.mean, p.variance),
                });
            }
            if p.variance < VARIANCE_FLOOR {
                log::warn!(
                    "variance {} for ({feature}, {class}) raised to floor {VARIANCE_FLOOR}",
                    p.variance
                );
                p.variance = VARIANCE_FLOOR;
            }
        }
        for &feature in &features {
            for set in frame.singletons() {
                if !params.contains_key(&(feature, set)) {
                    return Err(ModelError::MissingParams {
                        feature: feature.name().to_owned(),
                        class: frame.set_label(set),
                    });
                }
            }
        }
        Ok(Self {
            frame,
            features,
            params,
            composite_mode,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Features in the model's canonical order.
    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn composite_mode(&self) -> CompositeMode {
        self.composite_mode
    }

    pub fn params(&self, feature: Feature, set: FocalSet) -> Option<GaussianParams> {
        self.params.get(&(feature, set)).copied()
    }

    /// All stored parameters, ordered by feature then set.
    pub fn all_params(&self) -> impl Iterator<Item = (Feature, FocalSet, GaussianParams)> + '_ {
        self.params.iter().map(|(&(f, s), &p)| (f, s, p))
    }

    fn check_feature(&self, feature: Feature) -> Result<()> {
        if self.features.contains(&feature) {
            Ok(())
        } else {
            Err(ModelError::UnknownFeature(feature.name().to_owned()))
        }
    }

    /// `f^S(x)`; zero for the empty set.
    pub fn likelihood(&self, feature: Feature, x: f64, set: FocalSet) -> Result<f64> {
        self.check_feature(feature)?;
        if !self.frame.contains(set) {
            return Err(DstError::FrameMismatch.into());
        }
        Ok(self.likelihood_unchecked(feature, x, set))
    }

    fn likelihood_unchecked(&self, feature: Feature, x: f64, set: FocalSet) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        if let Some(p) = self.params.get(&(feature, set)) {
            return p.density(x);
        }
        set.members()
            .map(|i| self.params[&(feature, FocalSet::singleton(i))].density(x))
            .sum()
    }

    /// `m(S) = f^S(x) / Σ_{B≠∅} f^B(x)`, or the vacuous mass function when
    /// that total underflows below [`UNDERFLOW_LIMIT`].
    pub fn mass_from_feature(&self, feature: Feature, x: f64) -> Result<MassFunction> {
        self.check_feature(feature)?;
        if !x.is_finite() {
            return Err(ModelError::NonFiniteInput(x));
        }
        let mut masses = vec![0.0; self.frame.power_set_size()];
        for set in self.frame.non_empty_sets() {
            masses[set.bits() as usize] = self.likelihood_unchecked(feature, x, set);
        }
        // Summed in ascending set order; on a binary frame this makes the
        // composite share exactly one half in sum-of-singletons mode.
        let total: f64 = masses.iter().sum();
        if !total.is_finite() || total < UNDERFLOW_LIMIT {
            return Ok(MassFunction::vacuous(&self.frame));
        }
        for m in &mut masses {
            *m /= total;
        }
        Ok(MassFunction::from_dense(&self.frame, masses)?)
    }
}

fn check_features(features: &[Feature]) -> Result<()> {
    if features.is_empty() {
        return Err(ModelError::NoFeatures);
    }
    for (i, f) in features.iter().enumerate() {
        if features[..i].contains(f) {
            return Err(ModelError::DuplicateFeature(*f));
        }
    }
    Ok(())
}

/// Fits one Gaussian per (feature, singleton class) from the records labeled
/// with that class.
///
/// In [`CompositeMode::FittedComposite`], composite sets with at least two
/// records carrying their label get their own Gaussian as well.
pub fn fit(
    records: &[RadarRecord],
    features: &[Feature],
    frame: &Frame,
    composite_mode: CompositeMode,
) -> Result<FeatureModel> {
    check_features(features)?;
    let mut by_set: BTreeMap<FocalSet, Vec<&RadarRecord>> = BTreeMap::new();
    for record in records {
        let set = frame
            .parse_set(&record.label)
            .ok()
            .filter(|s| !s.is_empty())
            .ok_or_else(|| ModelError::UnknownLabel(record.label.clone()))?;
        by_set.entry(set).or_default().push(record);
    }

    let mut params = BTreeMap::new();
    for set in frame.non_empty_sets() {
        let members = by_set.get(&set).map(Vec::as_slice).unwrap_or(&[]);
        if set.is_singleton() {
            if members.len() < MIN_CLASS_RECORDS {
                return Err(ModelError::InsufficientData {
                    class: frame.set_label(set),
                    count: members.len(),
                });
            }
        } else if composite_mode == CompositeMode::SumOfSingletons || members.len() < MIN_CLASS_RECORDS {
            continue;
        }
        for &feature in features {
            let values: Vec<f64> = members.iter().map(|r| r.value(feature)).collect();
            params.insert((feature, set), GaussianParams::estimate(&values));
        }
    }
    FeatureModel::new(frame.clone(), features.to_vec(), params, composite_mode)
}
