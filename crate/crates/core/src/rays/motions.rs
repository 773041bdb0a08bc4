use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::angles::ExternalAngle;
use super::ray1d::ray_point_1d;
use crate::dynamics::Polynomial;
use crate::error::{Error, Result};
use crate::level::{self, wrap_pi, LevelFunction};
use crate::potential::{boettcher_1d, extend_phi_plus, green_1d, LeafLevel};
use crate::saddles::{continue_from, LeafChart};

/// Continuation stages tried when the direct leaf solve lands on the wrong branch.
const MOTION_STAGES: usize = 8;

/// `ψ(z) = φ₁⁻¹(φ₀(z))`: the point of the `P₁` ray through `φ₀(z)` at potential `G₀(z)`.
pub fn motion_psi_1d(p0: &Polynomial, p1: &Polynomial, z: C64, tol: f64) -> Result<C64> {
    let w = boettcher_1d(p0, z, tol)?.value;
    let g = w.norm().ln();
    if !(g > 0.0) {
        return Err(Error::NotEscaping { potential: g });
    }
    let angle = ExternalAngle::Turns((w.arg() / TAU).rem_euclid(1.0));
    ray_point_1d(p1, &angle, g, 0.5)
}

/// Solve `f₁(ζ) = w` on the leaf of `chart`, seeded at `guess`.
fn solve_leaf_value(chart: &LeafChart, w: C64, guess: C64, tol: f64) -> Option<C64> {
    let lvl = LeafLevel { chart };
    let g = w.norm().ln();
    let d = lvl.degree();
    let k = lvl.first_admissible(guess, 64)?.max(level::chart_for(&lvl, g));
    let im = wrap_pi((d as f64).powi(k as i32) * w.arg());
    let zeta = level::solve_at(&lvl, guess, g, im, k)?;
    let back = extend_phi_plus(chart, zeta, tol).ok()?.value;
    ((back - w).norm() < 1e-8 * w.norm()).then_some(zeta)
}

/// `Ψ(z) = f₁⁻¹(f₀(z))` on the leaves of one saddle continued to two parameters,
/// where `f_i` is the continued `φ⁺` of chart `i`. Falls back to continuation in `b`
/// through intermediate charts when Newton from `z` finds another branch.
pub fn motion_psi_leaf(chart0: &LeafChart, chart1: &LeafChart, z: C64, tol: f64) -> Result<C64> {
    let w = extend_phi_plus(chart0, z, tol)?.value;
    if let Some(zeta) = solve_leaf_value(chart1, w, z, tol) {
        return Ok(zeta);
    }
    let (b0, b1) = (chart0.saddle().b, chart1.saddle().b);
    let mut zeta = z;
    let mut saddle = chart0.saddle().clone();
    for j in 1..=MOTION_STAGES {
        let b = b0 + (b1 - b0) * (j as f64 / MOTION_STAGES as f64);
        saddle = continue_from(&saddle, b, 4)?;
        let stage = if j == MOTION_STAGES { chart1.clone() } else { LeafChart::new(saddle.clone())? };
        zeta = solve_leaf_value(&stage, w, zeta, tol)
            .ok_or_else(|| Error::NewtonDiverged(format!("leaf motion at b = {b} from {z}")))?;
    }
    Ok(zeta)
}

/// Suprema of the motion residuals over a sample set, each with its witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionCheck {
    /// Parameters at the two ends: the constant term of `P` in one variable, `b` on leaves.
    pub from: C64,
    pub to: C64,
    pub samples: usize,
    pub max_conjugacy_residual: f64,
    pub conjugacy_witness: C64,
    pub max_identity_residual: f64,
    pub identity_witness: C64,
    pub max_potential_residual: f64,
    pub potential_witness: C64,
}

impl MotionCheck {
    fn new(from: C64, to: C64) -> Self {
        let z = C64::new(f64::NAN, f64::NAN);
        Self {
            from,
            to,
            samples: 0,
            max_conjugacy_residual: 0.0,
            conjugacy_witness: z,
            max_identity_residual: 0.0,
            identity_witness: z,
            max_potential_residual: 0.0,
            potential_witness: z,
        }
    }

    fn record(&mut self, z: C64, conj: f64, ident: f64, pot: f64) {
        self.samples += 1;
        if !(conj <= self.max_conjugacy_residual) {
            self.max_conjugacy_residual = conj;
            self.conjugacy_witness = z;
        }
        if !(ident <= self.max_identity_residual) {
            self.max_identity_residual = ident;
            self.identity_witness = z;
        }
        if !(pot <= self.max_potential_residual) {
            self.max_potential_residual = pot;
            self.potential_witness = z;
        }
    }
}

/// `ψ(P₀ z) = P₁(ψ z)`, `φ₁(ψ z) = φ₀(z)` and `G₁(ψ z) = G₀(z)` at each sample.
pub fn check_motion_1d(p0: &Polynomial, p1: &Polynomial, samples: &[C64], tol: f64) -> Result<MotionCheck> {
    let mut check = MotionCheck::new(p0.coeffs()[0], p1.coeffs()[0]);
    for &z in samples {
        let zeta = motion_psi_1d(p0, p1, z, tol)?;
        let conj = (motion_psi_1d(p0, p1, p0.eval(z), tol)? - p1.eval(zeta)).norm();
        let ident = (boettcher_1d(p1, zeta, tol)?.value - boettcher_1d(p0, z, tol)?.value).norm();
        let pot = (green_1d(p1, zeta, tol, 10_000).value - green_1d(p0, z, tol, 10_000).value).abs();
        check.record(z, conj, ident, pot);
    }
    Ok(check)
}

/// `Ψ(λ₀ z) = λ₁ Ψ(z)`, `f₁(Ψ z) = f₀(z)` and `G⁺₁(γ₁ Ψ z) = G⁺₀(γ₀ z)` at each sample.
pub fn check_motion_leaf(chart0: &LeafChart, chart1: &LeafChart, samples: &[C64], tol: f64) -> Result<MotionCheck> {
    let mut check = MotionCheck::new(chart0.saddle().b, chart1.saddle().b);
    for &z in samples {
        let zeta = motion_psi_leaf(chart0, chart1, z, tol)?;
        let conj = (motion_psi_leaf(chart0, chart1, chart0.lambda() * z, tol)? - chart1.lambda() * zeta).norm();
        let ident = (extend_phi_plus(chart1, zeta, tol)?.value - extend_phi_plus(chart0, z, tol)?.value).norm();
        let pot = (chart1.green(zeta, tol).value - chart0.green(z, tol).value).abs();
        check.record(z, conj, ident, pot);
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saddles::{continue_saddle, find_periodic_1d};

    #[test]
    fn identity_motion() {
        let p = Polynomial::quadratic(-0.2);
        for z in [C64::new(2.0, 0.5), C64::new(-0.3, 1.4), C64::new(0.0, -3.0)] {
            assert!((motion_psi_1d(&p, &p, z, 1e-15).unwrap() - z).norm() < 1e-10, "{z}");
        }
    }

    #[test]
    fn one_variable_conjugacy() {
        let (p0, p1) = (Polynomial::quadratic(0.0), Polynomial::quadratic(-0.2));
        let samples: Vec<C64> = (0..12).map(|k| C64::from_polar(1.1 + 0.15 * k as f64, 0.53 * k as f64 + 0.1)).collect();
        let check = check_motion_1d(&p0, &p1, &samples, 1e-15).unwrap();
        assert!(check.max_conjugacy_residual < 1e-7, "{check:?}");
        assert!(check.max_identity_residual < 1e-9, "{check:?}");
        assert!(check.max_potential_residual < 1e-8, "{check:?}");
    }

    fn fixed_chart(b: f64) -> LeafChart {
        let p = Polynomial::quadratic(0.0);
        let o = find_periodic_1d(&p, 1).unwrap().into_iter().find(|o| o.is_repelling()).unwrap();
        LeafChart::new(continue_saddle(&p, &o, C64::new(b, 0.0), 20).unwrap()).unwrap()
    }

    #[test]
    fn leaf_motion_is_identity_at_equal_parameters() {
        let c = fixed_chart(0.2);
        let z = C64::new(0.3, 0.2);
        assert!((motion_psi_leaf(&c, &c, z, 1e-15).unwrap() - z).norm() < 1e-10);
    }

    #[test]
    fn leaf_motion_commutes_with_dilation() {
        let (c0, c1) = (fixed_chart(0.2), fixed_chart(0.3));
        let samples: Vec<C64> = (0..4).map(|k| C64::from_polar(0.25 + 0.05 * k as f64, -0.6 + 0.4 * k as f64)).collect();
        let check = check_motion_leaf(&c0, &c1, &samples, 1e-15).unwrap();
        assert!(check.max_conjugacy_residual < 1e-6, "{check:?}");
        assert!(check.max_potential_residual < 1e-7, "{check:?}");
    }
}
