use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-variable complex polynomial of degree `d ≥ 2`, coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() < 3 {
            return Err(Error::InvalidPolynomial(format!(
                "degree must be at least 2, got {} coefficients",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
        }
        if coeffs.last().is_none_or(|c| c.norm() == 0.0) {
            return Err(Error::InvalidPolynomial("leading coefficient is zero".into()));
        }
        Ok(Self { coeffs })
    }

    /// `z^d + c`.
    pub fn unicritical(d: usize, c: C64) -> Result<Self> {
        let mut coeffs = vec![C64::new(0.0, 0.0); d + 1];
        coeffs[0] = c;
        coeffs[d] = C64::new(1.0, 0.0);
        Self::new(coeffs)
    }

    /// `z^2 + c` with real `c`.
    pub fn quadratic(c: f64) -> Self {
        Self::unicritical(2, C64::new(c, 0.0)).expect("valid quadratic")
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> C64 {
        self.coeffs[self.degree()]
    }

    pub fn is_monic(&self) -> bool {
        (self.leading() - 1.0).norm() == 0.0
    }

    /// Sum of moduli of the non-leading coefficients.
    pub fn lower_mass(&self) -> f64 {
        self.coeffs[..self.degree()].iter().map(|c| c.norm()).sum()
    }

    #[inline]
    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = self.leading();
        for c in self.coeffs[..self.degree()].iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// `(P(z), P'(z))` by a joint Horner pass.
    #[inline]
    pub fn eval_deriv(&self, z: C64) -> (C64, C64) {
        let mut p = self.leading();
        let mut dp = C64::new(0.0, 0.0);
        for c in self.coeffs[..self.degree()].iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn iterate(&self, z: C64, n: usize) -> C64 {
        (0..n).fold(z, |w, _| self.eval(w))
    }

    /// Radius beyond which every factor `P(w)/(a w^d)` lies within 1/2 of 1 and the
    /// orbit escapes monotonically. Monomials return 1 (all `|w| > 1` qualify).
    pub fn dominant_radius(&self) -> f64 {
        let d = self.degree() as f64;
        let a = self.lower_mass() / self.leading().norm();
        let lead = self.leading().norm();
        // |P(w)| ≥ |a_d||w|^d / 2 ≥ 2|w| once |w|^{d-1} ≥ 4/|a_d|
        let growth = (4.0 / lead).powf(1.0 / (d - 1.0));
        if a == 0.0 {
            return (1.0 / lead).powf(1.0 / (d - 1.0));
        }
        (2.0 * a).max(growth).max(1.0)
    }
}

impl TryFrom<Vec<C64>> for Polynomial {
    type Error = Error;
    fn try_from(v: Vec<C64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Polynomial> for Vec<C64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_degree_and_zero_leading() {
        assert!(Polynomial::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(Polynomial::new(vec![C64::new(1.0, 0.0); 2].into_iter().chain([C64::new(0.0, 0.0)]).collect()).is_err());
    }

    #[test]
    fn horner_and_derivative() {
        let p = Polynomial::quadratic(-1.0);
        let z = C64::new(0.5, 2.0);
        let (v, dv) = p.eval_deriv(z);
        assert_eq!(v, z * z - 1.0);
        assert_eq!(dv, 2.0 * z);
        assert_eq!(p.degree(), 2);
        assert!(p.is_monic());
    }

    #[test]
    fn dominant_radius_of_basilica() {
        let p = Polynomial::quadratic(-1.0);
        assert_eq!(p.dominant_radius(), 4.0);
        assert_eq!(Polynomial::quadratic(0.0).dominant_radius(), 1.0);
    }
}
