//! External rays in one variable and on unstable leaves, their identifications, and
//! the motions `φ₁⁻¹φ₀` and `Φ₁⁻¹Φ₀`.

mod angles;
mod leaf;
mod motions;
mod ray1d;

pub use angles::{periodic_angles, AngleOrbit, ExternalAngle};
pub use leaf::{
    compare_identifications, leaf_rays_at_saddle, trace_ray_leaf, CompareOptions, IdentificationReport, LeafRay, LeafRaySearch,
};
pub use motions::{check_motion_1d, check_motion_leaf, motion_psi_1d, motion_psi_leaf, MotionCheck};
pub use ray1d::{
    detect_identifications, ray_point_1d, trace_ray_1d, AngleClass, Landing, Partition, RayOptions, RaySample, RayStatus,
    RayTrace,
};
