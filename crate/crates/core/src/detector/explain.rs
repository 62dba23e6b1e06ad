use serde::ser::{Serialize, SerializeMap, Serializer};

use super::EvidentialVerdict;
use crate::dst::{BeliefInterval, Frame, MassFunction};
use crate::radar_data::Feature;

/// JSON object whose keys keep insertion order.
#[derive(Clone, Debug, PartialEq)]
pub struct Ordered<T>(pub Vec<(String, T)>);

impl<T: Serialize> Serialize for Ordered<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct FeatureMasses {
    pub feature: Feature,
    pub masses: Ordered<f64>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Ambiguity {
    pub set: String,
    #[serde(flatten)]
    pub interval: BeliefInterval,
}

/// Machine-readable account of one verdict: where every mass came from, how
/// the sources disagreed and how the decision compares with the claim.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Explanation {
    pub record_index: usize,
    pub per_feature_masses: Vec<FeatureMasses>,
    pub combined_mass: Ordered<f64>,
    pub conflict: f64,
    pub total_conflict: bool,
    pub intervals: Ordered<BeliefInterval>,
    pub decided: String,
    pub claimed: String,
    pub spoof_flagged: bool,
    /// Present when the decision is a composite set.
    pub ambiguity: Option<Ambiguity>,
}

fn masses(frame: &Frame, mass: &MassFunction) -> Ordered<f64> {
    Ordered(
        frame
            .non_empty_sets()
            .map(|set| (frame.set_label(set), mass.mass(set)))
            .collect(),
    )
}

pub fn explain(verdict: &EvidentialVerdict) -> Explanation {
    let frame = verdict.combined.frame();
    Explanation {
        record_index: verdict.record_index,
        per_feature_masses: verdict
            .per_feature
            .iter()
            .map(|(feature, m)| FeatureMasses {
                feature: *feature,
                masses: masses(frame, m),
            })
            .collect(),
        combined_mass: masses(frame, &verdict.combined),
        conflict: verdict.conflict,
        total_conflict: verdict.total_conflict,
        intervals: Ordered(
            verdict
                .intervals
                .iter()
                .map(|(set, i)| (frame.set_label(*set), *i))
                .collect(),
        ),
        decided: frame.set_label(verdict.decided),
        claimed: frame.set_label(verdict.claimed),
        spoof_flagged: verdict.spoof_flagged,
        ambiguity: verdict.is_ambiguous().then(|| Ambiguity {
            set: frame.set_label(verdict.decided),
            interval: verdict.interval(verdict.decided).unwrap_or(BeliefInterval {
                belief: 0.0,
                plausibility: 1.0,
                uncertainty: 1.0,
            }),
        }),
    }
}

/// One JSON line (no trailing newline).
pub fn explain_json(verdict: &EvidentialVerdict) -> String {
    serde_json::to_string(&explain(verdict)).expect("explanations serialize")
}
