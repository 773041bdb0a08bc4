use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{HenonSystem, PlaneMap, Point2};
use crate::error::{Error, Result};

pub const DEFAULT_CERTIFICATION_SAMPLES: usize = 10_000;

/// Expansion margin demanded by [`Filtration::search`].
const SEARCH_EXPANSION: f64 = 1.25;

/// Largest admissible `|y'/(C y^d) − 1|` on `V⁺`.
/// Keeps every factor of the `φ⁺` product inside the principal-log disk.
const RATIO_BOUND: f64 = 0.5;

/// Bidisk radius `R` with the regions
/// `V⁺ = {|y| ≥ |x|, |y| ≥ R}`, `V⁻ = {|x| ≥ |y|, |x| ≥ R}`, `V = {|x| < R, |y| < R}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Filtration {
    #[serde(rename = "R")]
    pub r: f64,
    /// Smallest observed ratio `|π_y H(p)| / |y|` over the `V⁺` samples.
    pub expansion: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Interior,
    Plus,
    Minus,
}

impl Filtration {
    /// Uncertified filtration, for callers that already know `R` is valid.
    pub fn trusted(r: f64) -> Self {
        Self { r, expansion: f64::NAN }
    }

    #[inline]
    pub fn in_v_plus(&self, p: Point2) -> bool {
        let (ax, ay) = (p.x.norm(), p.y.norm());
        ay >= ax && ay >= self.r
    }

    #[inline]
    pub fn in_v_minus(&self, p: Point2) -> bool {
        let (ax, ay) = (p.x.norm(), p.y.norm());
        ax >= ay && ax >= self.r
    }

    #[inline]
    pub fn in_v(&self, p: Point2) -> bool {
        p.x.norm() < self.r && p.y.norm() < self.r
    }

    /// Region of `p`; boundary ties between `V⁺` and `V⁻` go to `V⁺`.
    pub fn region(&self, p: Point2) -> Region {
        if self.in_v_plus(p) {
            Region::Plus
        } else if self.in_v_minus(p) {
            Region::Minus
        } else {
            Region::Interior
        }
    }

    /// Find a small certified radius: start from `1 + Σ|coefficients|`, halve while
    /// certification passes, bisect the last bracket, then back off by 10% so the
    /// radius is not sitting on a lattice-resolution boundary.
    pub fn search(map: &dyn PlaneMap, mass: f64) -> Result<Self> {
        let samples = DEFAULT_CERTIFICATION_SAMPLES;
        let mut good = 1.0 + mass;
        let mut cert = None;
        for _ in 0..8 {
            match certify_with(map, good, samples, SEARCH_EXPANSION) {
                Ok(f) => {
                    cert = Some(f);
                    break;
                }
                Err(_) => good *= 2.0,
            }
        }
        let mut cert = cert.ok_or_else(|| Error::CertificationFailed {
            witness: Point2::real(good, good),
            reason: "no certified radius found".into(),
        })?;
        let mut bad = good / 2.0;
        while let Ok(f) = certify_with(map, bad, samples, SEARCH_EXPANSION) {
            good = bad;
            cert = f;
            bad /= 2.0;
            if bad < 1e-3 {
                return Ok(cert);
            }
        }
        for _ in 0..20 {
            let mid = 0.5 * (good + bad);
            match certify_with(map, mid, samples, SEARCH_EXPANSION) {
                Ok(f) => {
                    good = mid;
                    cert = f;
                }
                Err(_) => bad = mid,
            }
            if good - bad < 1e-4 * good {
                break;
            }
        }
        certify_with(map, 1.1 * good, samples, SEARCH_EXPANSION).or(Ok(cert))
    }

    /// [`Filtration::search`] for a Hénon system.
    pub fn for_system(sys: &HenonSystem) -> Result<Self> {
        Self::search(sys, sys.coefficient_mass())
    }
}

/// Certify radius `R` for `sys` on the default sample lattice with expansion `ρ > 1`.
pub fn certify_filtration(sys: &HenonSystem, r: f64) -> Result<Filtration> {
    certify_with(sys, r, DEFAULT_CERTIFICATION_SAMPLES, 1.0)
}

/// Boundary lattice of `V⁺`, in `(x, y)` order. The `V⁻` lattice is the swap.
///
/// Two faces: `|y| = R ≥ |x|` and the cone edge `|x| = |y| = s` for `s ∈ [R, 4R]`.
fn face_lattice(r: f64, samples: usize) -> Vec<(C64, C64)> {
    const RADII: usize = 5;
    let per_face = (samples / 2).max(RADII);
    let n_ang = ((per_face / RADII) as f64).sqrt().ceil().max(2.0) as usize;
    let mut out = Vec::with_capacity(2 * RADII * n_ang * n_ang);
    for k in 0..RADII {
        let t = k as f64 / (RADII - 1) as f64;
        for i in 0..n_ang {
            // the half-step offset keeps the lattice off the real axes
            let a = TAU * (i as f64 + 0.5 * t) / n_ang as f64;
            for j in 0..n_ang {
                let b = TAU * (j as f64 + 0.25) / n_ang as f64;
                out.push((C64::from_polar(r * t, b), C64::from_polar(r, a)));
                let s = r * (1.0 + 3.0 * t);
                out.push((C64::from_polar(s, b), C64::from_polar(s, a)));
            }
        }
    }
    out
}

/// Certification with explicit lattice size and expansion threshold.
pub fn certify_with(map: &dyn PlaneMap, r: f64, samples: usize, min_expansion: f64) -> Result<Filtration> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("filtration radius must be positive, got {r}")));
    }
    let filt = Filtration { r, expansion: f64::INFINITY };
    let d = map.degree() as i32;
    let lattice = face_lattice(r, samples);
    let fail = |witness: Point2, reason: String| Err(Error::CertificationFailed { witness, reason });

    let lead = map.forward_lead();
    let mut expansion = f64::INFINITY;
    for &(x, y) in &lattice {
        let p = Point2::new(x, y);
        let q = map.apply(p);
        if !filt.in_v_plus(q) {
            return fail(p, format!("H(p) = {q} leaves V⁺"));
        }
        let rho = q.y.norm() / y.norm();
        if !(rho > min_expansion) {
            return fail(p, format!("expansion {rho:.6} ≤ {min_expansion}"));
        }
        let ratio = (q.y / (lead * y.powi(d)) - 1.0).norm();
        if !(ratio <= RATIO_BOUND) {
            return fail(p, format!("leading-term ratio deviates by {ratio:.6}"));
        }
        expansion = expansion.min(rho);
    }

    if map.backward_lead().is_some() {
        for &(y, x) in &lattice {
            let p = Point2::new(x, y);
            let Some(q) = map.inverse(p) else { break };
            if !filt.in_v_minus(q) {
                return fail(p, format!("H⁻¹(p) = {q} leaves V⁻"));
            }
            let rho = q.x.norm() / x.norm();
            if !(rho > min_expansion) {
                return fail(p, format!("backward expansion {rho:.6} ≤ {min_expansion}"));
            }
        }
    }
    Ok(Filtration { r, expansion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Polynomial;

    #[test]
    fn lattice_points_lie_on_the_boundary() {
        let r = 2.0;
        for (x, y) in face_lattice(r, 1000) {
            assert!(y.norm() >= r - 1e-12 && x.norm() <= y.norm() + 1e-12);
        }
    }

    #[test]
    fn certifies_radius_two() {
        let h = HenonSystem::quadratic(0.0, 0.3).unwrap();
        let f = certify_filtration(&h, 2.0).unwrap();
        assert!(f.expansion >= 1.7 - 1e-12, "{}", f.expansion);
    }

    #[test]
    fn small_radius_fails_with_witness() {
        let h = HenonSystem::quadratic(0.0, 0.3).unwrap();
        match certify_filtration(&h, 0.5) {
            Err(Error::CertificationFailed { witness, .. }) => assert!(witness.y.norm() >= 0.5 - 1e-12),
            other => panic!("expected failure, got {other:?}"),
        }
        // the hand witness (0.5, 0.5) ↦ (0.5, 0.1) leaves V⁺
        let f = Filtration::trusted(0.5);
        assert!(!f.in_v_plus(h.apply(Point2::real(0.5, 0.5))));
    }

    #[test]
    fn figure_map_certifies_at_three() {
        let h = HenonSystem::single(Polynomial::quadratic(-1.124), C64::new(0.125, 0.0)).unwrap();
        assert!(certify_filtration(&h, 3.0).is_ok());
    }

    #[test]
    fn search_returns_a_radius_that_recertifies_finer() {
        let h = HenonSystem::quadratic(-1.0, 0.3).unwrap();
        let f = Filtration::for_system(&h).unwrap();
        assert!(f.r < 1.0 + h.coefficient_mass());
        assert!(certify_with(&h, f.r, 4 * DEFAULT_CERTIFICATION_SAMPLES, 1.0).is_ok());
    }

    #[test]
    fn regions_cover_the_plane() {
        let f = Filtration::trusted(1.0);
        assert_eq!(f.region(Point2::real(0.0, 3.0)), Region::Plus);
        assert_eq!(f.region(Point2::real(3.0, 1.0)), Region::Minus);
        assert_eq!(f.region(Point2::real(0.5, -0.5)), Region::Interior);
    }
}
