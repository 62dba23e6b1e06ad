use log::warn;

use super::{DstError, FocalSet, Frame, Result, MASS_SUM_TOLERANCE, RENORMALIZE_LIMIT};

/// A normalized basic belief assignment, dense over the power set of its frame.
///
/// Invariants: every entry lies in `[0, 1]`, the empty set carries no mass and
/// the entries sum to one within [`MASS_SUM_TOLERANCE`].
#[derive(Clone, Debug, PartialEq)]
pub struct MassFunction {
    frame: Frame,
    masses: Vec<f64>,
}

impl MassFunction {
    /// Total ignorance: all mass on the full frame.
    pub fn vacuous(frame: &Frame) -> Self {
        let mut masses = vec![0.0; frame.power_set_size()];
        masses[frame.full_set().index()] = 1.0;
        Self {
            frame: frame.clone(),
            masses,
        }
    }

    /// Builds a mass function from one entry per subset, indexed by the
    /// subset's bit pattern.
    ///
    /// Totals within `1e-9` of one are kept as given. Totals off by up to
    /// `1e-6` are rescaled and logged; anything further is rejected.
    pub fn from_dense(frame: &Frame, masses: Vec<f64>) -> Result<Self> {
        let expected = frame.power_set_size();
        if masses.len() != expected {
            return Err(DstError::WrongLength {
                expected,
                actual: masses.len(),
            });
        }
        for (bits, &value) in masses.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(DstError::MassOutOfRange {
                    set: frame.set_label(FocalSet::from_bits(bits as u32)),
                    value,
                });
            }
        }
        if masses[0] != 0.0 {
            return Err(DstError::MassOnEmptySet(masses[0]));
        }
        let total: f64 = masses.iter().sum();
        let deviation = (total - 1.0).abs();
        if deviation > RENORMALIZE_LIMIT {
            return Err(DstError::Unnormalized(total));
        }
        let masses = if deviation > MASS_SUM_TOLERANCE {
            warn!("renormalizing mass function with total {total}");
            masses.into_iter().map(|m| m / total).collect()
        } else {
            masses
        };
        Ok(Self {
            frame: frame.clone(),
            masses,
        })
    }

    /// Builds a mass function from `(set, mass)` pairs; unlisted sets get zero
    /// and repeated sets accumulate.
    pub fn from_pairs<I>(frame: &Frame, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FocalSet, f64)>,
    {
        let mut masses = vec![0.0; frame.power_set_size()];
        for (set, mass) in pairs {
            if !frame.contains(set) {
                return Err(DstError::FrameMismatch);
            }
            masses[set.index()] += mass;
        }
        Self::from_dense(frame, masses)
    }

    /// Like [`MassFunction::from_pairs`], naming sets by their compact labels
    /// (`"s"`, `"m"`, `"sm"`).
    pub fn from_labels(frame: &Frame, pairs: &[(&str, f64)]) -> Result<Self> {
        let pairs = pairs
            .iter()
            .map(|&(label, mass)| Ok((frame.parse_set(label)?, mass)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(frame, pairs)
    }

    /// Wraps masses that are already known to satisfy the invariants.
    pub(crate) fn from_normalized(frame: &Frame, masses: Vec<f64>) -> Self {
        debug_assert_eq!(masses.len(), frame.power_set_size());
        debug_assert!((masses.iter().sum::<f64>() - 1.0).abs() <= MASS_SUM_TOLERANCE);
        Self {
            frame: frame.clone(),
            masses,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Mass of exactly `set`; zero for sets outside the frame.
    pub fn mass(&self, set: FocalSet) -> f64 {
        self.masses.get(set.index()).copied().unwrap_or(0.0)
    }

    /// Mass of the set named by `label`.
    pub fn mass_of(&self, label: &str) -> Result<f64> {
        Ok(self.mass(self.frame.parse_set(label)?))
    }

    /// Dense entries indexed by bit pattern.
    pub fn as_slice(&self) -> &[f64] {
        &self.masses
    }

    /// `(set, mass)` for every subset in ascending bit order.
    pub fn iter(&self) -> impl Iterator<Item = (FocalSet, f64)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .map(|(bits, &m)| (FocalSet::from_bits(bits as u32), m))
    }

    /// Sets carrying positive mass.
    pub fn focal_elements(&self) -> impl Iterator<Item = (FocalSet, f64)> + '_ {
        self.iter().filter(|&(_, m)| m > 0.0)
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn is_vacuous(&self) -> bool {
        self.mass(self.frame.full_set()) == 1.0
    }

    /// Largest per-entry absolute difference, or `None` across frames.
    pub fn max_abs_diff(&self, other: &MassFunction) -> Option<f64> {
        if self.frame != other.frame {
            return None;
        }
        Some(
            self.masses
                .iter()
                .zip(&other.masses)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sm() -> Frame {
        Frame::new(["s", "m"]).unwrap()
    }

    #[test]
    fn vacuous_binary_frame() {
        let m = MassFunction::vacuous(&sm());
        assert_eq!(m.as_slice(), &[0.0, 0.0, 0.0, 1.0]);
        assert!(m.is_vacuous());
    }

    #[test]
    fn vacuous_singleton_frame() {
        let frame = Frame::new(["a"]).unwrap();
        assert_eq!(MassFunction::vacuous(&frame).as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn labels_address_dense_entries() {
        let frame = sm();
        let m = MassFunction::from_labels(&frame, &[("s", 0.6), ("m", 0.3), ("sm", 0.1)]).unwrap();
        assert_eq!(m.as_slice(), &[0.0, 0.6, 0.3, 0.1]);
        assert_eq!(m.mass_of("sm").unwrap(), 0.1);
        assert_eq!(m.focal_elements().count(), 3);
    }

    #[test]
    fn small_drift_is_renormalized() {
        let m = MassFunction::from_dense(&sm(), vec![0.0, 0.5, 0.5, 5e-7]).unwrap();
        assert!((m.total() - 1.0).abs() <= MASS_SUM_TOLERANCE);
        assert!(m.mass(FocalSet::from_bits(1)) < 0.5);
    }

    #[test]
    fn totals_within_tolerance_are_kept_verbatim() {
        let m = MassFunction::from_dense(&sm(), vec![0.0, 0.25, 0.25, 0.5 + 1e-12]).unwrap();
        assert_eq!(m.as_slice()[1], 0.25);
    }

    #[test]
    fn rejects_invalid_masses() {
        let frame = sm();
        assert!(matches!(
            MassFunction::from_dense(&frame, vec![0.0, 0.5, 0.4, 0.0]),
            Err(DstError::Unnormalized(_))
        ));
        assert!(matches!(
            MassFunction::from_dense(&frame, vec![0.1, 0.5, 0.4, 0.0]),
            Err(DstError::MassOnEmptySet(_))
        ));
        assert!(matches!(
            MassFunction::from_dense(&frame, vec![0.0, 1.5, -0.5, 0.0]),
            Err(DstError::MassOutOfRange { .. })
        ));
        assert!(matches!(
            MassFunction::from_dense(&frame, vec![0.0, f64::NAN, 0.5, 0.5]),
            Err(DstError::MassOutOfRange { .. })
        ));
        assert_eq!(
            MassFunction::from_dense(&frame, vec![1.0]),
            Err(DstError::WrongLength { expected: 4, actual: 1 })
        );
        assert_eq!(
            MassFunction::from_pairs(&frame, [(FocalSet::from_bits(0b100), 1.0)]),
            Err(DstError::FrameMismatch)
        );
    }
}
