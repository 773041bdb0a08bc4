//! Polynomials, composed Hénon systems, filtrations and orbit classification.

mod filtration;
mod henon;
mod linalg;
mod orbit;
mod poly;

pub use filtration::{certify_filtration, certify_with, Filtration, Region, DEFAULT_CERTIFICATION_SAMPLES};
pub use henon::{FamilyMap, HenonFactor, HenonSystem, PlaneMap};
pub use linalg::{Mat2, Point2};
pub use orbit::{classify_backward_orbit, classify_orbit, OrbitClass, OrbitRecord};
pub use poly::Polynomial;
