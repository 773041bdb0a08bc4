use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{Mat2, Point2, Polynomial};
use crate::error::{Error, Result};

/// A polynomial self-map of ℂ² with the structure needed by the potential theory:
/// total degree, asymptotic leading constants, and (when invertible) the inverse.
pub trait PlaneMap: Send + Sync {
    fn apply(&self, p: Point2) -> Point2;

    /// `None` when the map is not invertible (the `b = 0` reduction).
    fn inverse(&self, p: Point2) -> Option<Point2>;

    fn jacobian(&self, p: Point2) -> Mat2;

    fn degree(&self) -> usize;

    /// `C` where `π_y H(x, y) ≈ C y^d` for `|y| ≥ |x|` large.
    fn forward_lead(&self) -> C64;

    /// `C⁻` where `π_x H⁻¹(x, y) ≈ C⁻ x^d` for `|x| ≥ |y|` large.
    fn backward_lead(&self) -> Option<C64>;

    fn forward_lead_log(&self) -> f64 {
        self.forward_lead().norm().ln()
    }

    fn backward_lead_log(&self) -> Option<f64> {
        self.backward_lead().map(|c| c.norm().ln())
    }

    /// All factor polynomials monic (needed for Böttcher-type coordinates).
    fn is_monic(&self) -> bool;

    fn iterate(&self, p: Point2, n: usize) -> Point2 {
        (0..n).fold(p, |q, _| self.apply(q))
    }
}

/// One generalized Hénon factor `(x, y) ↦ (y, P(y) − b x)` with `b ≠ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HenonFactor {
    #[serde(rename = "coeffs")]
    pub poly: Polynomial,
    pub b: C64,
}

impl HenonFactor {
    #[inline]
    fn apply(&self, p: Point2) -> Point2 {
        Point2::new(p.y, self.poly.eval(p.y) - self.b * p.x)
    }

    #[inline]
    fn inverse(&self, p: Point2) -> Point2 {
        Point2::new((self.poly.eval(p.x) - p.y) / self.b, p.x)
    }

    fn jacobian(&self, p: Point2) -> Mat2 {
        let (_, dp) = self.poly.eval_deriv(p.y);
        Mat2::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0), -self.b, dp)
    }
}

/// Composition `F_m ∘ … ∘ F_1` of Hénon factors, applied in list order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<HenonFactor>", into = "Vec<HenonFactor>")]
pub struct HenonSystem {
    factors: Vec<HenonFactor>,
}

impl HenonSystem {
    pub fn new(factors: Vec<HenonFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidSystem("no factors".into()));
        }
        for (j, f) in factors.iter().enumerate() {
            if !f.b.is_finite() || f.b.norm() == 0.0 {
                return Err(Error::InvalidSystem(format!("factor {j}: b must be nonzero")));
            }
        }
        Ok(Self { factors })
    }

    /// Single factor `(x, y) ↦ (y, P(y) − b x)`.
    pub fn single(poly: Polynomial, b: C64) -> Result<Self> {
        Self::new(vec![HenonFactor { poly, b }])
    }

    /// `(x, y) ↦ (y, y² + c − b x)` with real parameters.
    pub fn quadratic(c: f64, b: f64) -> Result<Self> {
        Self::single(Polynomial::quadratic(c), C64::new(b, 0.0))
    }

    pub fn factors(&self) -> &[HenonFactor] {
        &self.factors
    }

    /// Jacobian parameter `b = ∏ b_j = det DH`.
    pub fn jacobian_parameter(&self) -> C64 {
        self.factors.iter().map(|f| f.b).product()
    }

    /// Sum of moduli of every coefficient and every `b_j`.
    pub fn coefficient_mass(&self) -> f64 {
        self.factors
            .iter()
            .map(|f| f.poly.coeffs().iter().map(|c| c.norm()).sum::<f64>() + f.b.norm())
            .sum()
    }

    /// The single factor `(P, b)` when the system has exactly one.
    pub fn as_single(&self) -> Option<(&Polynomial, C64)> {
        match self.factors.as_slice() {
            [f] => Some((&f.poly, f.b)),
            _ => None,
        }
    }
}

impl TryFrom<Vec<HenonFactor>> for HenonSystem {
    type Error = Error;
    fn try_from(v: Vec<HenonFactor>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<HenonSystem> for Vec<HenonFactor> {
    fn from(s: HenonSystem) -> Self {
        s.factors
    }
}

/// Fold the monomial approximations `a_j·w^{d_j}` of a sequence of factors into `C`.
fn fold_lead(steps: impl Iterator<Item = (C64, usize)>) -> C64 {
    steps.fold(C64::new(1.0, 0.0), |c, (a, dj)| a * c.powu(dj as u32))
}

impl PlaneMap for HenonSystem {
    fn apply(&self, p: Point2) -> Point2 {
        self.factors.iter().fold(p, |q, f| f.apply(q))
    }

    fn inverse(&self, p: Point2) -> Option<Point2> {
        Some(self.factors.iter().rev().fold(p, |q, f| f.inverse(q)))
    }

    fn jacobian(&self, p: Point2) -> Mat2 {
        let mut q = p;
        let mut acc = Mat2::identity();
        for f in &self.factors {
            acc = f.jacobian(q) * acc;
            q = f.apply(q);
        }
        acc
    }

    fn degree(&self) -> usize {
        self.factors.iter().map(|f| f.poly.degree()).product()
    }

    fn forward_lead(&self) -> C64 {
        fold_lead(self.factors.iter().map(|f| (f.poly.leading(), f.poly.degree())))
    }

    fn backward_lead(&self) -> Option<C64> {
        Some(fold_lead(self.factors.iter().rev().map(|f| (f.poly.leading() / f.b, f.poly.degree()))))
    }

    fn is_monic(&self) -> bool {
        self.factors.iter().all(|f| f.poly.is_monic())
    }
}

/// A member `H_b(x, y) = (y, P(y) − b x)` of the single-factor family, with `b = 0`
/// allowed: at `b = 0` this is the non-invertible reduction `(x, y) ↦ (y, P(y))`
/// whose dynamics is that of `P` on the parabola `y = P(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMap {
    pub poly: Polynomial,
    pub b: C64,
}

impl FamilyMap {
    pub fn new(poly: Polynomial, b: C64) -> Self {
        Self { poly, b }
    }

    pub fn is_reduced(&self) -> bool {
        self.b.norm() == 0.0
    }

    /// The invertible system, or an error for the `b = 0` reduction.
    pub fn to_system(&self) -> Result<HenonSystem> {
        HenonSystem::single(self.poly.clone(), self.b)
    }
}

impl PlaneMap for FamilyMap {
    #[inline]
    fn apply(&self, p: Point2) -> Point2 {
        Point2::new(p.y, self.poly.eval(p.y) - self.b * p.x)
    }

    fn inverse(&self, p: Point2) -> Option<Point2> {
        if self.is_reduced() {
            None
        } else {
            Some(Point2::new((self.poly.eval(p.x) - p.y) / self.b, p.x))
        }
    }

    fn jacobian(&self, p: Point2) -> Mat2 {
        let (_, dp) = self.poly.eval_deriv(p.y);
        Mat2::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0), -self.b, dp)
    }

    fn degree(&self) -> usize {
        self.poly.degree()
    }

    fn forward_lead(&self) -> C64 {
        self.poly.leading()
    }

    fn backward_lead(&self) -> Option<C64> {
        (!self.is_reduced()).then(|| self.poly.leading() / self.b)
    }

    fn is_monic(&self) -> bool {
        self.poly.is_monic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn quadratic_map_sends_origin_to_minus_c() {
        let h = HenonSystem::single(Polynomial::quadratic(-1.124), c(0.125, 0.0)).unwrap();
        let q = h.apply(Point2::real(0.0, 0.0));
        assert_eq!(q, Point2::real(0.0, -1.124));
    }

    #[test]
    fn forward_and_inverse_examples() {
        let h = HenonSystem::quadratic(0.0, 0.3).unwrap();
        let q = h.apply(Point2::real(1.0, 2.0));
        assert!((q.x - 2.0).norm() < 1e-15 && (q.y - 3.7).norm() < 1e-15);
        let p = h.inverse(Point2::real(2.0, 3.7)).unwrap();
        assert!(p.dist(&Point2::real(1.0, 2.0)) < 1e-15);
        // fixed point x = x² − 0.3x ⇒ x = 1.3
        let f = h.apply(Point2::real(1.3, 1.3));
        assert!(f.dist(&Point2::real(1.3, 1.3)) < 1e-15);

        let g = HenonSystem::quadratic(-1.0, 1.0).unwrap();
        assert_eq!(g.inverse(Point2::real(0.0, -1.0)).unwrap(), Point2::real(0.0, 0.0));
    }

    #[test]
    fn zero_jacobian_parameter_is_rejected() {
        assert!(HenonSystem::quadratic(0.0, 0.0).is_err());
        assert!(FamilyMap::new(Polynomial::quadratic(0.0), c(0.0, 0.0)).to_system().is_err());
    }

    #[test]
    fn composed_degree_and_jacobian_parameter() {
        let f1 = HenonFactor { poly: Polynomial::quadratic(0.1), b: c(0.5, 0.1) };
        let f2 = HenonFactor { poly: Polynomial::unicritical(3, c(0.0, 0.2)).unwrap(), b: c(-0.3, 0.0) };
        let h = HenonSystem::new(vec![f1, f2]).unwrap();
        assert_eq!(h.degree(), 6);
        assert_eq!(h.jacobian_parameter(), c(0.5, 0.1) * c(-0.3, 0.0));
        let p = Point2::new(c(0.3, -0.2), c(0.1, 0.7));
        assert!((h.jacobian(p).det() - h.jacobian_parameter()).norm() < 1e-14);
    }

    #[test]
    fn backward_lead_constant_of_single_factor() {
        let h = HenonSystem::quadratic(0.0, 0.3).unwrap();
        assert!((h.backward_lead_log().unwrap() - (1.0f64 / 0.3).ln()).abs() < 1e-15);
        assert_eq!(h.forward_lead_log(), 0.0);
    }
}
