use super::{DstError, MassFunction, Result, CONFLICT_MARGIN};

/// Result of fusing two sources: the combined masses and the conflict `K`
/// (product mass that fell on disjoint set pairs) that was normalized away.
#[derive(Clone, Debug, PartialEq)]
pub struct Combination {
    pub mass: MassFunction,
    pub conflict: f64,
}

/// Dempster's rule of combination.
///
/// `m(A) = Σ_{B∩C=A} m1(B)·m2(C) / (1 − K)` for non-empty `A`, with
/// `K = Σ_{B∩C=∅} m1(B)·m2(C)`. Fails with [`DstError::TotalConflict`] when
/// `K ≥ 1 − 1e-12`.
pub fn combine(first: &MassFunction, second: &MassFunction) -> Result<MassFunction> {
    combine_with_conflict(first, second).map(|c| c.mass)
}

/// [`combine`], also reporting the conflict.
pub fn combine_with_conflict(first: &MassFunction, second: &MassFunction) -> Result<Combination> {
    if first.frame() != second.frame() {
        return Err(DstError::FrameMismatch);
    }
    let frame = first.frame();
    let rhs: Vec<_> = second.focal_elements().collect();

    let mut joint = vec![0.0; frame.power_set_size()];
    let mut conflict = 0.0;
    for (b, mb) in first.focal_elements() {
        for &(c, mc) in &rhs {
            let product = mb * mc;
            let meet = b.intersection(c);
            if meet.is_empty() {
                conflict += product;
            } else {
                joint[meet.index()] += product;
            }
        }
    }

    // Normalize by the agreeing mass itself rather than 1 - K: the two are
    // equal for normalized inputs, but the direct sum does not lose precision
    // when K approaches one.
    let agreement: f64 = joint.iter().sum();
    if conflict >= 1.0 - CONFLICT_MARGIN || agreement <= CONFLICT_MARGIN {
        return Err(DstError::TotalConflict(conflict));
    }
    for m in &mut joint {
        *m = (*m / agreement).min(1.0);
    }
    Ok(Combination {
        mass: MassFunction::from_normalized(frame, joint),
        conflict,
    })
}

/// Left fold of [`combine`] over `masses`, in the given order.
pub fn combine_sequence(masses: &[MassFunction]) -> Result<MassFunction> {
    combine_sequence_with_conflict(masses).map(|c| c.mass)
}

/// Left fold reporting the conflict of the final pairwise step (zero for a
/// single source).
pub fn combine_sequence_with_conflict(masses: &[MassFunction]) -> Result<Combination> {
    let (head, tail) = masses.split_first().ok_or(DstError::EmptyInput)?;
    if tail.iter().any(|m| m.frame() != head.frame()) {
        return Err(DstError::FrameMismatch);
    }
    tail.iter().try_fold(
        Combination {
            mass: head.clone(),
            conflict: 0.0,
        },
        |acc, next| combine_with_conflict(&acc.mass, next),
    )
}
