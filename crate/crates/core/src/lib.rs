//! Computational toolkit for complex Hénon maps `(x, y) ↦ (y, P(y) − b x)`.
//!
//! Modules, bottom-up:
//!
//! * [`dynamics`]: polynomials, composed Hénon systems, the `V / V⁺ / V⁻`
//!   filtration and orbit classification.
//! * [`potential`]: Green functions `G⁺ / G⁻`, the one-variable Böttcher
//!   coordinate, `φ⁺` on `V⁺`, and its continuation along unstable leaves.
//! * [`saddles`]: periodic orbits of `P`, their continuation in the Jacobian
//!   parameter, and linearizing charts of unstable manifolds.
//! * [`solenoid`]: the exterior solenoid model and the coding of leaf points.
//! * [`rays`]: external rays in one variable and on leaves, ray identifications,
//!   and the motions `φ₁⁻¹φ₀` and `Φ₁⁻¹Φ₀`.
//! * [`extended`]: double-double arithmetic for oracle paths.
//! * [`io`]: JSON and CSV formats shared with the command-line front end.

pub mod dynamics;
pub mod error;
pub mod extended;
pub mod io;
pub mod potential;
pub mod rays;
pub mod saddles;
pub mod solenoid;

mod level;

pub use dynamics::{
    certify_filtration, classify_backward_orbit, classify_orbit, FamilyMap, Filtration, HenonFactor, HenonSystem, Mat2,
    OrbitClass, OrbitRecord, PlaneMap, Point2, Polynomial, Region,
};
pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use potential::{BoettcherValue, BranchPath, GreenValue};
pub use rays::{AngleOrbit, ExternalAngle, IdentificationReport, MotionCheck, Partition, RayOptions, RayTrace};
pub use saddles::{GridSpec, LeafChart, PeriodicOrbit1D, SaddleOrbit2D};
pub use solenoid::{RayAddress, SolenoidFixedPoint, SolenoidWindow};
