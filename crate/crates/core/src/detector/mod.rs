//! Evidential classification of radar records and spoof detection.
//!
//! Per record: one mass function per feature, fused in the model's feature
//! order with Dempster's rule, then belief intervals for every non-empty set.
//! The decision is the singleton with the highest belief unless the top two
//! are tied or the full frame holds more than the ambiguity threshold of the
//! mass, in which case the decision is the full frame. A singleton decision
//! that differs from the record's claimed label flags a spoof.

mod evaluate;
mod explain;

pub use evaluate::{evaluate, plot_data_csv, ConfusionEntry, Evaluation, EvaluationReport, Execution};
pub use explain::{explain, explain_json, Explanation};

use thiserror::Error;

use crate::dst::{combine_sequence_with_conflict, interval, BeliefInterval, DstError, FocalSet, MassFunction};
use crate::feature_model::{FeatureModel, ModelError};
use crate::radar_data::{Feature, RadarRecord};

/// Default feature subset: velocity and reflection.
pub const DEFAULT_FEATURES: [Feature; 2] = [Feature::Velocity, Feature::Reflection];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectorError {
    #[error("no features selected")]
    NoFeatures,
    #[error("feature {0} is not part of the model")]
    UnknownFeature(Feature),
    #[error("record {index}: claimed label {label:?} is not a subset of the frame")]
    InvalidClaim { index: usize, label: String },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid decision policy: {0}")]
    InvalidPolicy(String),
    #[error("record {index}: {source}")]
    Model {
        index: usize,
        #[source]
        source: ModelError,
    },
    #[error(transparent)]
    Dst(#[from] DstError),
}

pub type Result<T, E = DetectorError> = std::result::Result<T, E>;

/// Thresholds of the decision rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecisionPolicy {
    /// Singleton beliefs closer than this count as tied.
    pub tie_epsilon: f64,
    /// Full-frame mass above this makes the decision ambiguous.
    pub ambiguity_threshold: f64,
}

impl Default for DecisionPolicy {
    fn default() -> Self {
        Self {
            tie_epsilon: 1e-9,
            ambiguity_threshold: 0.5,
        }
    }
}

impl DecisionPolicy {
    pub fn with_threshold(ambiguity_threshold: f64) -> Result<Self> {
        let policy = Self {
            ambiguity_threshold,
            ..Self::default()
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.ambiguity_threshold) {
            return Err(DetectorError::InvalidPolicy(format!(
                "ambiguity threshold must lie in [0, 1], got {}",
                self.ambiguity_threshold
            )));
        }
        if !(self.tie_epsilon >= 0.0 && self.tie_epsilon.is_finite()) {
            return Err(DetectorError::InvalidPolicy(format!(
                "tie epsilon must be finite and >= 0, got {}",
                self.tie_epsilon
            )));
        }
        Ok(())
    }

    /// Argmax-belief singleton, or the full frame on a tie or when the full
    /// frame's mass exceeds the ambiguity threshold.
    pub fn decide(&self, mass: &MassFunction) -> FocalSet {
        let frame = mass.frame();
        let full = frame.full_set();
        // Singleton beliefs are just their masses.
        let mut best: Option<(FocalSet, f64)> = None;
        let mut runner_up = f64::NEG_INFINITY;
        for set in frame.singletons() {
            let b = mass.mass(set);
            match best {
                Some((_, top)) if b <= top => runner_up = runner_up.max(b),
                _ => {
                    if let Some((_, top)) = best {
                        runner_up = runner_up.max(top);
                    }
                    best = Some((set, b));
                }
            }
        }
        let (best_set, best_belief) = best.expect("frames are non-empty");
        if best_belief - runner_up < self.tie_epsilon || mass.mass(full) > self.ambiguity_threshold {
            full
        } else {
            best_set
        }
    }
}

/// Everything the classifier derived for one record.
#[derive(Clone, Debug, PartialEq)]
pub struct EvidentialVerdict {
    pub record_index: usize,
    /// Per-feature masses in the model's canonical feature order.
    pub per_feature: Vec<(Feature, MassFunction)>,
    pub combined: MassFunction,
    /// Conflict `K` of the final pairwise combination.
    pub conflict: f64,
    /// Set when the per-feature masses were irreconcilable; `combined` is
    /// then vacuous.
    pub total_conflict: bool,
    /// Interval for every non-empty set, in ascending set order.
    pub intervals: Vec<(FocalSet, BeliefInterval)>,
    pub decided: FocalSet,
    pub claimed: FocalSet,
    pub spoof_flagged: bool,
}

impl EvidentialVerdict {
    pub fn interval(&self, set: FocalSet) -> Option<BeliefInterval> {
        self.intervals.iter().find(|(s, _)| *s == set).map(|&(_, i)| i)
    }

    pub fn is_ambiguous(&self) -> bool {
        !self.decided.is_singleton()
    }

    /// Uncertainty (`pl − bel`) of the decided set.
    pub fn decided_uncertainty(&self) -> f64 {
        self.interval(self.decided).map_or(1.0, |i| i.uncertainty)
    }
}

/// Features to use, in the model's canonical order regardless of how the
/// caller listed them.
pub fn canonical_features(model: &FeatureModel, requested: &[Feature]) -> Result<Vec<Feature>> {
    if requested.is_empty() {
        return Err(DetectorError::NoFeatures);
    }
    if let Some(&missing) = requested.iter().find(|f| !model.features().contains(f)) {
        return Err(DetectorError::UnknownFeature(missing));
    }
    Ok(model
        .features()
        .iter()
        .copied()
        .filter(|f| requested.contains(f))
        .collect())
}

/// Classifies one record. Total conflict between features does not fail; the
/// verdict falls back to the vacuous mass function and is marked.
pub fn classify(
    model: &FeatureModel,
    record: &RadarRecord,
    record_index: usize,
    features: &[Feature],
    policy: &DecisionPolicy,
) -> Result<EvidentialVerdict> {
    let features = canonical_features(model, features)?;
    let frame = model.frame();
    let claimed = frame
        .parse_set(&record.label)
        .ok()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| DetectorError::InvalidClaim {
            index: record_index,
            label: record.label.clone(),
        })?;

    let per_feature = features
        .iter()
        .map(|&f| {
            model
                .mass_from_feature(f, record.value(f))
                .map(|m| (f, m))
                .map_err(|source| DetectorError::Model {
                    index: record_index,
                    source,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let masses: Vec<MassFunction> = per_feature.iter().map(|(_, m)| m.clone()).collect();

    let (combined, conflict, total_conflict) = match combine_sequence_with_conflict(&masses) {
        Ok(c) => (c.mass, c.conflict, false),
        Err(DstError::TotalConflict(k)) => {
            log::warn!("record {record_index}: total conflict (K = {k}), using vacuous mass");
            (MassFunction::vacuous(frame), k, true)
        }
        Err(e) => return Err(e.into()),
    };

    let intervals = frame
        .non_empty_sets()
        .map(|set| interval(&combined, set).map(|i| (set, i)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let decided = policy.decide(&combined);
    let spoof_flagged = decided.is_singleton() && decided != claimed;

    Ok(EvidentialVerdict {
        record_index,
        per_feature,
        combined,
        conflict,
        total_conflict,
        intervals,
        decided,
        claimed,
        spoof_flagged,
    })
}
