use serde::{Deserialize, Serialize};

use super::{Filtration, PlaneMap, Point2};

/// How an orbit left (or failed to leave) the bidisk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum OrbitClass {
    /// Forward iterate `step` is the first one in `V⁺`.
    EnteredPlus { step: usize },
    /// Backward iterate `step` is the first one in `V⁻`.
    EnteredMinus { step: usize },
    /// Never reached the escape region within the budget. Not a claim of boundedness.
    StayedInV { steps: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub start: Point2,
    pub iterations: usize,
    /// `trajectory[k]` is the `k`-th iterate, up to and including the classifying one.
    pub trajectory: Vec<Point2>,
    pub class: OrbitClass,
}

impl OrbitRecord {
    pub fn escaped(&self) -> bool {
        !matches!(self.class, OrbitClass::StayedInV { .. })
    }

    pub fn last(&self) -> Point2 {
        *self.trajectory.last().expect("trajectory holds the start point")
    }
}

/// Iterate forward until the orbit enters `V⁺`, for at most `n_max` steps.
pub fn classify_orbit(map: &dyn PlaneMap, filt: &Filtration, p: Point2, n_max: usize) -> OrbitRecord {
    let mut trajectory = vec![p];
    let mut q = p;
    for k in 0..=n_max {
        if filt.in_v_plus(q) {
            return OrbitRecord { start: p, iterations: k, trajectory, class: OrbitClass::EnteredPlus { step: k } };
        }
        if k == n_max || !q.is_finite() {
            break;
        }
        q = map.apply(q);
        trajectory.push(q);
    }
    let iterations = trajectory.len() - 1;
    OrbitRecord { start: p, iterations, trajectory, class: OrbitClass::StayedInV { steps: iterations } }
}

/// Iterate backward until the orbit enters `V⁻`. Maps without an inverse report
/// zero steps.
pub fn classify_backward_orbit(map: &dyn PlaneMap, filt: &Filtration, p: Point2, n_max: usize) -> OrbitRecord {
    let mut trajectory = vec![p];
    let mut q = p;
    for k in 0..=n_max {
        if filt.in_v_minus(q) {
            return OrbitRecord { start: p, iterations: k, trajectory, class: OrbitClass::EnteredMinus { step: k } };
        }
        if k == n_max || !q.is_finite() {
            break;
        }
        match map.inverse(q) {
            Some(next) => q = next,
            None => break,
        }
        trajectory.push(q);
    }
    let iterations = trajectory.len() - 1;
    OrbitRecord { start: p, iterations, trajectory, class: OrbitClass::StayedInV { steps: iterations } }
}
