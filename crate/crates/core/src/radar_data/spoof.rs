use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DataError, Dataset, Result, MOVING, STATIONARY};

/// Which records a spoofing attack rewrites.
#[derive(Clone, Debug, PartialEq)]
pub enum SpoofSelection {
    /// Exactly these record positions.
    Indices(Vec<usize>),
    /// `count` honest singleton-labeled records drawn uniformly with `seed`.
    Random { count: usize, seed: u64 },
}

/// Opposite singleton on the binary obstacle frame.
pub fn flipped_label(label: &str) -> Option<&'static str> {
    match label {
        STATIONARY => Some(MOVING),
        MOVING => Some(STATIONARY),
        _ => None,
    }
}

/// Label-flip attack: each selected record claims the opposite class while
/// its measurements stay those of the true class, and is marked spoofed.
/// Nothing else in the dataset changes.
pub fn inject_spoof(dataset: &Dataset, selection: &SpoofSelection) -> Result<Dataset> {
    let targets = match selection {
        SpoofSelection::Indices(indices) => {
            let mut targets = indices.clone();
            targets.sort_unstable();
            targets.dedup();
            if let Some(&index) = targets.iter().find(|&&i| i >= dataset.len()) {
                return Err(DataError::IndexOutOfRange {
                    index,
                    len: dataset.len(),
                });
            }
            targets
        }
        SpoofSelection::Random { count, seed } => {
            if *count > dataset.len() {
                return Err(DataError::CountExceedsDataset {
                    count: *count,
                    available: dataset.len(),
                });
            }
            let eligible: Vec<usize> = dataset
                .records
                .iter()
                .enumerate()
                .filter(|(_, r)| !r.spoofed && flipped_label(&r.label).is_some())
                .map(|(i, _)| i)
                .collect();
            if *count > eligible.len() {
                return Err(DataError::CountExceedsDataset {
                    count: *count,
                    available: eligible.len(),
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut targets: Vec<usize> = index::sample(&mut rng, eligible.len(), *count)
                .into_iter()
                .map(|k| eligible[k])
                .collect();
            targets.sort_unstable();
            targets
        }
    };

    let mut out = dataset.clone();
    for i in targets {
        let record = &mut out.records[i];
        let flipped = flipped_label(&record.label).ok_or_else(|| DataError::NotFlippable {
            index: i,
            label: record.label.clone(),
        })?;
        record.label = flipped.to_owned();
        record.spoofed = true;
    }
    Ok(out)
}

/// A partition of record positions into training and held-out parts, each
/// listed in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Default share of records used for fitting.
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;

/// Seeded random partition of `0..len`; `round(len · train_fraction)`
/// positions go to training. The partition depends only on `len`, the
/// fraction and the seed, so a dataset and its spoofed copy split alike.
pub fn train_test_split(len: usize, train_fraction: f64, seed: u64) -> Result<Split> {
    if !(0.0..=1.0).contains(&train_fraction) {
        return Err(DataError::InvalidConfig(format!(
            "train fraction must lie in [0, 1], got {train_fraction}"
        )));
    }
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (len as f64 * train_fraction).round() as usize;
    let mut train = order[..n_train].to_vec();
    let mut test = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}
