use serde::{Deserialize, Serialize};

use crate::dynamics::{Filtration, PlaneMap, Point2, Polynomial};
use crate::extended::{CDD, DD};

/// Escape rate of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenValue {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl GreenValue {
    pub const fn bounded(iterations: usize) -> Self {
        Self { value: 0.0, iterations, converged: false }
    }
}

/// `|y|` beyond which the refinement stops: further terms are below round-off.
const HUGE: f64 = 1e150;

/// Refine `d^{-n}(log|w_n| + log|C|/(d−1))` along an escaping coordinate sequence.
/// `next` advances the state and returns the new escaping coordinate.
fn refine<S>(mut state: S, mut w: f64, d: f64, lead_log: f64, tol: f64, n_max: usize, first: usize, next: impl Fn(&S) -> (S, f64)) -> GreenValue {
    let shift = lead_log / (d - 1.0);
    let mut scale = d.powi(-(first as i32));
    let mut g = scale * (w.ln() + shift);
    // two consecutive small differences: a single one can be an exact coincidence
    let mut quiet = 0;
    for n in first..n_max {
        if w > HUGE {
            return GreenValue { value: g, iterations: n, converged: true };
        }
        let (s, wn) = next(&state);
        state = s;
        w = wn;
        scale /= d;
        let gn = scale * (w.ln() + shift);
        if !gn.is_finite() {
            return GreenValue { value: g, iterations: n, converged: true };
        }
        quiet = if (gn - g).abs() < tol { quiet + 1 } else { 0 };
        g = gn;
        if quiet >= 2 {
            return GreenValue { value: g, iterations: n + 1, converged: true };
        }
    }
    GreenValue { value: g, iterations: n_max, converged: false }
}

/// `G⁺(p) = lim d^{-n} log|π_y H^n(p)|`, evaluated once the orbit is in `V⁺`.
///
/// The lead constant `C` (where `π_y H ≈ C y^d`) is folded in so successive
/// estimates differ by `O(|y_n|^{-1} d^{-n})` instead of `O(d^{-n})`.
pub fn green_plus(map: &dyn PlaneMap, filt: &Filtration, p: Point2, tol: f64, n_max: usize) -> GreenValue {
    let mut q = p;
    for k in 0..n_max {
        if filt.in_v_plus(q) {
            let d = map.degree() as f64;
            return refine(q, q.y.norm(), d, map.forward_lead_log(), tol, n_max, k, |q| {
                let r = map.apply(*q);
                (r, r.y.norm())
            });
        }
        q = map.apply(q);
        if !q.is_finite() {
            break;
        }
    }
    GreenValue::bounded(n_max)
}

/// `G⁻` by the mirror construction with `H⁻¹`, `V⁻` and `π_x`. Non-invertible maps
/// report a non-escaping orbit.
pub fn green_minus(map: &dyn PlaneMap, filt: &Filtration, p: Point2, tol: f64, n_max: usize) -> GreenValue {
    let Some(lead) = map.backward_lead_log() else {
        return GreenValue::bounded(0);
    };
    let mut q = p;
    for k in 0..n_max {
        if filt.in_v_minus(q) {
            let d = map.degree() as f64;
            return refine(q, q.x.norm(), d, lead, tol, n_max, k, |q| {
                let r = map.inverse(*q).expect("invertible");
                (r, r.x.norm())
            });
        }
        match map.inverse(q) {
            Some(r) if r.is_finite() => q = r,
            _ => break,
        }
    }
    GreenValue::bounded(n_max)
}

/// One-variable Green function `G_P(z) = lim d^{-n} log|P^n(z)|` (monic or not).
pub fn green_1d(poly: &Polynomial, z: num_complex::Complex64, tol: f64, n_max: usize) -> GreenValue {
    let r = poly.dominant_radius();
    let d = poly.degree() as f64;
    let mut w = z;
    for k in 0..n_max {
        if w.norm() > r {
            return refine(w, w.norm(), d, poly.leading().norm().ln(), tol, n_max, k, |w| {
                let v = poly.eval(*w);
                (v, v.norm())
            });
        }
        w = poly.eval(w);
    }
    GreenValue::bounded(n_max)
}

/// Double-double oracle for `G⁺` of a map given by Hénon factors `(P_j, b_j)`.
/// Iterates `n` steps (or until `|y|` is huge) and returns the last estimate.
pub fn green_plus_extended(factors: &[(Polynomial, num_complex::Complex64)], p: Point2, n: usize) -> f64 {
    let d: usize = factors.iter().map(|(q, _)| q.degree()).product();
    let lead: f64 = {
        let mut c = num_complex::Complex64::new(1.0, 0.0);
        for (q, _) in factors {
            c = q.leading() * c.powu(q.degree() as u32);
        }
        c.norm().ln()
    };
    let (mut x, mut y) = (CDD::from_c64(p.x), CDD::from_c64(p.y));
    let mut est = 0.0;
    let mut scale = DD::ONE;
    let inv_d = DD::ONE / DD::new(d as f64);
    let shift = DD::new(lead) / DD::new(d as f64 - 1.0);
    for _ in 0..=n {
        let ay = y.norm_sqr().to_f64().sqrt();
        if ay > 1.0 && ay >= x.norm_sqr().to_f64().sqrt() {
            est = (scale * (y.ln_abs() + shift)).to_f64();
        }
        if ay > HUGE {
            break;
        }
        for (q, b) in factors {
            let py = eval_dd(q, y);
            let nx = y;
            y = py - CDD::from_c64(*b) * x;
            x = nx;
        }
        scale = scale * inv_d;
    }
    est
}

/// Horner evaluation in double-double arithmetic.
pub fn eval_dd(poly: &Polynomial, z: CDD) -> CDD {
    let c = poly.coeffs();
    let mut acc = CDD::from_c64(c[c.len() - 1]);
    for a in c[..c.len() - 1].iter().rev() {
        acc = acc * z + CDD::from_c64(*a);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{FamilyMap, HenonSystem};
    use num_complex::Complex64 as C64;

    #[test]
    fn reduction_gives_log_modulus() {
        let m = FamilyMap::new(Polynomial::quadratic(0.0), C64::new(0.0, 0.0));
        let f = Filtration::trusted(2.0);
        let g = green_plus(&m, &f, Point2::real(0.0, 4.0), 1e-14, 100);
        assert!((g.value - 4f64.ln()).abs() < 1e-15);
        assert!(g.converged);
    }

    #[test]
    fn fixed_point_is_bounded() {
        let h = HenonSystem::quadratic(0.0, 0.3).unwrap();
        let f = Filtration::trusted(2.0);
        let g = green_plus(&h, &f, Point2::real(1.3, 1.3), 1e-12, 30);
        assert_eq!(g.value, 0.0);
        assert!(!g.converged);
        // round-off eventually pushes the orbit off the saddle; the escape rate is negligible
        assert!(green_plus(&h, &f, Point2::real(1.3, 1.3), 1e-12, 500).value < 1e-11);
    }

    #[test]
    fn matches_extended_oracle() {
        // 40-digit reference: 1.3851104877378119...
        let h = HenonSystem::quadratic(0.0, 0.3).unwrap();
        let f = Filtration::trusted(2.0);
        let g = green_plus(&h, &f, Point2::real(0.0, 4.0), 1e-15, 100);
        let factors = [(Polynomial::quadratic(0.0), C64::new(0.3, 0.0))];
        let oracle = green_plus_extended(&factors, Point2::real(0.0, 4.0), 60);
        assert!((oracle - 1.385_110_487_737_812).abs() < 1e-15, "{oracle}");
        assert!((g.value - oracle).abs() < 1e-13, "{} vs {oracle}", g.value);
    }

    #[test]
    fn backward_green_escapes() {
        let h = HenonSystem::quadratic(0.0, 0.3).unwrap();
        let f = Filtration::trusted(2.0);
        let g = green_minus(&h, &f, Point2::real(4.0, 0.0), 1e-14, 200);
        assert!(g.converged);
        assert!((g.value - 2.589_915_281_154_703_3).abs() < 1e-12, "{}", g.value);
    }
}
