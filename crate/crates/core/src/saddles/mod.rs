//! Periodic orbits of `P`, their continuation in the Jacobian parameter, and the
//! linearizing charts of their unstable manifolds.

mod chart;
mod continuation;
mod periodic;

pub use chart::{leaf_escape_region, linearize, GridSpec, LeafChart, DEFAULT_SEED_ORDER};
pub use continuation::{continue_from, continue_saddle, reduction_saddle, EigenNormalization, SaddleOrbit2D};
pub use periodic::{find_periodic_1d, PeriodicOrbit1D};
