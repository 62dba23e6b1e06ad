use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{canonical_features, classify, DecisionPolicy, DetectorError, EvidentialVerdict, Result};
use crate::feature_model::FeatureModel;
use crate::radar_data::{Dataset, Feature};

/// How [`evaluate`] walks the records. Both produce identical results.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfusionEntry {
    pub claimed: String,
    pub decided: String,
    pub count: usize,
}

/// Aggregate scores over a dataset.
///
/// Accuracy is computed over honest records that received a singleton
/// decision; ambiguous decisions count as neither right nor wrong and are
/// reported through `ambiguity_rate`. Rates with an empty denominator are
/// `None`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub features: Vec<Feature>,
    pub records: usize,
    pub honest_records: usize,
    pub spoofed_records: usize,
    pub scored_records: usize,
    pub correct: usize,
    pub accuracy: Option<f64>,
    pub spoofs_detected: usize,
    pub spoof_detection_rate: Option<f64>,
    pub false_flags: usize,
    pub ambiguous: usize,
    pub ambiguity_rate: f64,
    pub total_conflicts: usize,
    pub confusion: Vec<ConfusionEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub report: EvaluationReport,
    pub verdicts: Vec<EvidentialVerdict>,
}

/// Classifies every record of `dataset` and aggregates the outcome.
pub fn evaluate(
    model: &FeatureModel,
    dataset: &Dataset,
    features: &[Feature],
    policy: &DecisionPolicy,
    execution: Execution,
) -> Result<Evaluation> {
    if dataset.is_empty() {
        return Err(DetectorError::EmptyDataset);
    }
    policy.validate()?;
    let features = canonical_features(model, features)?;
    let run = |(i, record)| classify(model, record, i, &features, policy);
    let outcomes: Vec<Result<EvidentialVerdict>> = match execution {
        Execution::Sequential => dataset.records.iter().enumerate().map(run).collect(),
        Execution::Parallel => dataset.records.par_iter().enumerate().map(run).collect(),
    };
    // Report the first failing record, whichever way the work was scheduled.
    let verdicts = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    let frame = model.frame();
    let mut honest = 0;
    let mut scored = 0;
    let mut correct = 0;
    let mut detected = 0;
    let mut false_flags = 0;
    let mut ambiguous = 0;
    let mut total_conflicts = 0;
    let mut confusion = BTreeMap::new();
    for (record, verdict) in dataset.records.iter().zip(&verdicts) {
        *confusion.entry((verdict.claimed, verdict.decided)).or_insert(0) += 1;
        if verdict.is_ambiguous() {
            ambiguous += 1;
        }
        if verdict.total_conflict {
            total_conflicts += 1;
        }
        if record.spoofed {
            if verdict.spoof_flagged {
                detected += 1;
            }
        } else {
            honest += 1;
            if verdict.spoof_flagged {
                false_flags += 1;
            }
            if !verdict.is_ambiguous() {
                scored += 1;
                if verdict.decided == verdict.claimed {
                    correct += 1;
                }
            }
        }
    }
    let records = dataset.len();
    let spoofed = records - honest;
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);

    let report = EvaluationReport {
        features,
        records,
        honest_records: honest,
        spoofed_records: spoofed,
        scored_records: scored,
        correct,
        accuracy: ratio(correct, scored),
        spoofs_detected: detected,
        spoof_detection_rate: ratio(detected, spoofed),
        false_flags,
        ambiguous,
        ambiguity_rate: ambiguous as f64 / records as f64,
        total_conflicts,
        confusion: confusion
            .into_iter()
            .map(|((claimed, decided), count)| ConfusionEntry {
                claimed: frame.set_label(claimed),
                decided: frame.set_label(decided),
                count,
            })
            .collect(),
    };
    Ok(Evaluation { report, verdicts })
}

/// Per-record combined masses for external plotting: `index`, one `m_<set>`
/// column per non-empty set (`m_s,m_m,m_sm` on the obstacle frame), then
/// `decided,claimed,spoofed`. Each entry of `notes` becomes a leading `# `
/// comment line.
pub fn plot_data_csv(dataset: &Dataset, verdicts: &[EvidentialVerdict], notes: &[String]) -> String {
    let mut out = String::new();
    for note in notes {
        for line in note.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    let Some(first) = verdicts.first() else {
        out.push_str("index,decided,claimed,spoofed\n");
        return out;
    };
    let frame = first.combined.frame().clone();
    out.push_str("index");
    for set in frame.non_empty_sets() {
        let _ = write!(out, ",m_{}", frame.set_label(set));
    }
    out.push_str(",decided,claimed,spoofed\n");
    for verdict in verdicts {
        let _ = write!(out, "{}", verdict.record_index);
        for set in frame.non_empty_sets() {
            let _ = write!(out, ",{}", verdict.combined.mass(set));
        }
        let spoofed = dataset.records.get(verdict.record_index).is_some_and(|r| r.spoofed);
        let _ = writeln!(
            out,
            ",{},{},{}",
            frame.set_label(verdict.decided),
            frame.set_label(verdict.claimed),
            u8::from(spoofed)
        );
    }
    out
}
