use serde::Serialize;

use super::{DstError, FocalSet, MassFunction, Result};

/// Lower and upper probability bounds for a hypothesis, and their gap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BeliefInterval {
    pub belief: f64,
    pub plausibility: f64,
    pub uncertainty: f64,
}

/// `bel(A) = Σ_{∅≠B⊆A} m(B)`.
pub fn belief(mass: &MassFunction, set: FocalSet) -> Result<f64> {
    interval(mass, set).map(|i| i.belief)
}

/// `pl(A) = Σ_{B∩A≠∅} m(B)`.
pub fn plausibility(mass: &MassFunction, set: FocalSet) -> Result<f64> {
    interval(mass, set).map(|i| i.plausibility)
}

/// Belief, plausibility and `plausibility − belief` for `set`.
pub fn interval(mass: &MassFunction, set: FocalSet) -> Result<BeliefInterval> {
    if !mass.frame().contains(set) {
        return Err(DstError::FrameMismatch);
    }
    // bel's terms are a subset of pl's, summed in the same order.
    let mut belief = 0.0;
    let mut plausibility = 0.0;
    for (b, m) in mass.focal_elements() {
        if b.intersects(set) {
            plausibility += m;
            if b.is_subset_of(set) {
                belief += m;
            }
        }
    }
    let plausibility = f64::min(plausibility, 1.0);
    let belief = f64::min(belief, plausibility);
    Ok(BeliefInterval {
        belief,
        plausibility,
        uncertainty: plausibility - belief,
    })
}
