use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::green::eval_dd;
use crate::dynamics::Polynomial;
use crate::error::{Error, Result};
use crate::extended::{CDD, DD};
use crate::level::{self, LevelFunction};

/// A value of `φ` or `φ⁺` with the index where the product was truncated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoettcherValue {
    pub value: C64,
    pub truncation: usize,
    pub error_bound: f64,
}

impl BoettcherValue {
    pub fn potential(&self) -> f64 {
        self.value.norm().ln()
    }
}

/// Modulus past which the product factors equal 1 to double precision.
pub(crate) const PRODUCT_STOP: f64 = 1e20;

/// Telescoped product on the dominant region: returns `(Σ log r_n / d^{n+1},
/// d/dw log φ(w), terms, tail bound)` with `r_n = P(w_n) / w_n^d`.
pub(crate) fn direct_log_product(poly: &Polynomial, w: C64, tol: f64) -> (C64, C64, usize, f64) {
    let d = poly.degree() as f64;
    let mut sum = C64::new(0.0, 0.0);
    let mut s = w.inv();
    let mut wn = w;
    let mut scale = 1.0 / d;
    let mut n = 0;
    let mut tail = 0.0;
    let mut quiet = 0;
    while wn.norm() < PRODUCT_STOP && n < 200 {
        let (pw, dpw) = poly.eval_deriv(wn);
        let term = ratio(poly, wn.inv()).ln() * scale;
        sum += term;
        s *= wn * dpw / (d * pw);
        wn = pw;
        scale /= d;
        n += 1;
        // later terms shrink at least geometrically in 1/d
        tail = term.norm() / (d - 1.0);
        quiet = if tail < 0.5 * tol { quiet + 1 } else { 0 };
        if quiet >= 2 {
            break;
        }
    }
    (sum, s, n, tail)
}

/// `P(w) / w^d` by Horner in `s = 1/w`; exactly the leading coefficient for monomials.
fn ratio(poly: &Polynomial, s: C64) -> C64 {
    poly.coeffs().iter().fold(C64::new(0.0, 0.0), |acc, &a| acc * s + a)
}

/// Charts `log Φ_k(z) = log φ(P^k z)` of the one-variable Böttcher coordinate.
pub(crate) struct OneDimLevel<'a> {
    pub poly: &'a Polynomial,
    pub r_dom: f64,
}

impl<'a> OneDimLevel<'a> {
    pub fn new(poly: &'a Polynomial) -> Self {
        Self { poly, r_dom: poly.dominant_radius() }
    }
}

impl LevelFunction for OneDimLevel<'_> {
    fn degree(&self) -> usize {
        self.poly.degree()
    }

    fn threshold(&self) -> f64 {
        self.r_dom.ln() + 1.0
    }

    fn log_phi(&self, z: C64, k: usize) -> Option<(C64, C64)> {
        let (mut w, mut dw) = (z, C64::new(1.0, 0.0));
        for _ in 0..k {
            let (p, dp) = self.poly.eval_deriv(w);
            dw *= dp;
            w = p;
        }
        if !(w.norm() > self.r_dom) || !w.is_finite() {
            return None;
        }
        let (sum, s, _, _) = direct_log_product(self.poly, w, 1e-17);
        Some((w.ln() + sum, s * dw))
    }
}

const ESCAPE_BUDGET: usize = 10_000;

/// Böttcher coordinate `φ(z) = lim (P^n z)^{1/d^n}` of a monic polynomial, normalized
/// to be tangent to the identity at infinity.
///
/// On the dominant region the telescoped product is evaluated with principal
/// branches. Elsewhere the external ray through `z` is followed upward until the
/// product becomes valid; the argument is constant along it.
pub fn boettcher_1d(poly: &Polynomial, z: C64, tol: f64) -> Result<BoettcherValue> {
    if !poly.is_monic() {
        return Err(Error::NotMonic);
    }
    let lvl = OneDimLevel::new(poly);
    if z.norm() > lvl.r_dom {
        let (sum, _, n, tail) = direct_log_product(poly, z, tol);
        return Ok(BoettcherValue { value: z * sum.exp(), truncation: n, error_bound: tail * z.norm() });
    }
    let (k, w) = escape_index(poly, z, lvl.r_dom)?;
    let (sum, _, n, tail) = direct_log_product(poly, w, tol);
    let g = (w.norm().ln() + sum.re) / (poly.degree() as f64).powi(k as i32);
    let (im, _) = level::ascend(&lvl, z, g, k + 2)?;
    let value = C64::from_polar(g.exp(), im);
    Ok(BoettcherValue { value, truncation: k + n, error_bound: tail + 1e-13 * value.norm() })
}

/// First `k` with `|P^k z| > r`.
pub(crate) fn escape_index(poly: &Polynomial, z: C64, r: f64) -> Result<(usize, C64)> {
    let mut w = z;
    for k in 0..ESCAPE_BUDGET {
        if w.norm() > r {
            return Ok((k, w));
        }
        w = poly.eval(w);
    }
    Err(Error::DoesNotEscape { point: z, iterations: ESCAPE_BUDGET })
}

/// Push `z` forward `k` steps, evaluate `φ` there directly, and pull back by choosing
/// at each step the `d`-th root nearest the orbit point (φ is close to the identity on
/// the dominant region). Fails if two roots are nearly equidistant.
pub fn boettcher_pullback(poly: &Polynomial, z: C64, k: usize, tol: f64) -> Result<BoettcherValue> {
    let orbit: Vec<C64> = std::iter::successors(Some(z), |w| Some(poly.eval(*w))).take(k + 1).collect();
    let top = boettcher_1d(poly, orbit[k], tol)?;
    let d = poly.degree();
    let mut v = top.value;
    for w in orbit[..k].iter().rev() {
        let base = v.powf(1.0 / d as f64);
        let mut roots: Vec<C64> = (0..d)
            .map(|j| base * C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / d as f64))
            .collect();
        roots.sort_by(|a, b| (a - w).norm().total_cmp(&(b - w).norm()));
        let (near, next) = ((roots[0] - w).norm(), (roots[1] - w).norm());
        if near > 0.5 * next {
            return Err(Error::BranchAmbiguity { at: *w, detail: format!("root distances {near:.3e} vs {next:.3e}") });
        }
        v = roots[0];
    }
    Ok(BoettcherValue { value: v, truncation: top.truncation, error_bound: top.error_bound })
}

/// Double-double oracle of the direct product; `z` must lie in the dominant region.
pub fn boettcher_1d_extended(poly: &Polynomial, z: C64, n: usize) -> C64 {
    let d = poly.degree() as u32;
    let inv_d = DD::ONE / DD::new(d as f64);
    let mut w = CDD::from_c64(z);
    let mut scale = inv_d;
    let mut sum = CDD::default();
    for _ in 0..n {
        if w.norm_sqr().to_f64() > 1e60 {
            break;
        }
        let pw = eval_dd(poly, w);
        let r = pw / w.powi(d);
        sum = sum + CDD::log1p_series(r - CDD::ONE).scale(scale);
        w = pw;
        scale = scale * inv_d;
    }
    (CDD::from_c64(z) * CDD::exp_series(sum)).to_c64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_is_identity() {
        for d in 2..=4 {
            let p = Polynomial::unicritical(d, C64::new(0.0, 0.0)).unwrap();
            for &z in &[C64::new(1.2, 0.3), C64::new(-50.0, 7.0), C64::from_polar(1.11, 2.0), C64::from_polar(99.0, 2.5)] {
                let v = boettcher_1d(&p, z, 1e-15).unwrap().value;
                assert_eq!(v, z, "d={d}");
            }
        }
    }

    #[test]
    fn basilica_at_one_hundred() {
        let p = Polynomial::quadratic(-1.0);
        let z = C64::new(100.0, 0.0);
        let v = boettcher_1d(&p, z, 1e-16).unwrap().value;
        // 40-digit reference value
        assert!((v.re - 99.994_999_624_956_24).abs() < 1e-12, "{v}");
        assert!(v.im.abs() < 1e-14);
        let oracle = boettcher_1d_extended(&p, z, 40);
        assert!((oracle - v).norm() < 1e-12);
        let up = boettcher_1d(&p, p.eval(z), 1e-16).unwrap().value;
        assert!((up.sqrt() - v).norm() < 1e-12);
    }

    #[test]
    fn ascent_matches_functional_equation() {
        let p = Polynomial::quadratic(-1.0);
        for &z in &[C64::new(2.2, 0.4), C64::new(-1.0, 2.1), C64::new(0.3, -2.5)] {
            let a = boettcher_1d(&p, z, 1e-15).unwrap().value;
            let b = boettcher_1d(&p, p.eval(z), 1e-15).unwrap().value;
            assert!((b - a * a).norm() < 1e-10, "{z}: {}", (b - a * a).norm());
        }
    }

    #[test]
    fn pullback_agrees_with_direct() {
        let p = Polynomial::quadratic(-1.0);
        let z = C64::new(6.0, 3.0);
        let a = boettcher_1d(&p, z, 1e-15).unwrap().value;
        let b = boettcher_pullback(&p, z, 3, 1e-15).unwrap().value;
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn bounded_point_is_rejected() {
        let p = Polynomial::quadratic(-1.0);
        assert!(matches!(boettcher_1d(&p, C64::new(0.0, 0.0), 1e-12), Err(Error::DoesNotEscape { .. })));
    }
}
