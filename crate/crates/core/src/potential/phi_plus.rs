use num_complex::Complex64 as C64;

use super::boettcher::{BoettcherValue, PRODUCT_STOP};
use super::green::eval_dd;
use crate::dynamics::{Filtration, PlaneMap, Point2, Polynomial};
use crate::error::{Error, Result};
use crate::extended::{CDD, DD};

/// Telescoped `φ⁺` product from a point of `V⁺`, with the directional derivative of
/// `log φ⁺` along `v` (pass zero to skip it). Returns `(log φ⁺ − log y, derivative,
/// terms, tail bound)`.
pub(crate) fn log_phi_plus_product(map: &dyn PlaneMap, p: Point2, v: Point2, tol: f64) -> (C64, C64, usize, f64) {
    let d = map.degree() as f64;
    let du = map.degree() as u32;
    let mut sum = C64::new(0.0, 0.0);
    let mut q = p;
    let mut s = v.scale(q.y.inv());
    let mut scale = 1.0 / d;
    let mut n = 0;
    let mut tail = 0.0;
    let mut quiet = 0;
    while q.y.norm() < PRODUCT_STOP && n < 200 {
        let next = map.apply(q);
        let term = (next.y / q.y.powu(du)).ln() * scale;
        sum += term;
        s = map.jacobian(q).apply(s).scale(q.y / (d * next.y));
        q = next;
        scale /= d;
        n += 1;
        tail = term.norm() / (d - 1.0);
        quiet = if tail < 0.5 * tol { quiet + 1 } else { 0 };
        if quiet >= 2 {
            break;
        }
    }
    (sum, s.y, n, tail)
}

/// `φ⁺(p) = lim (π_y H^n p)^{1/d^n}` on `V⁺`, the branch asymptotic to `y`.
///
/// A non-invertible reduction map is accepted: at `b = 0` this is `φ_P(y)`.
pub fn phi_plus(map: &dyn PlaneMap, filt: &Filtration, p: Point2, tol: f64) -> Result<BoettcherValue> {
    if !filt.in_v_plus(p) {
        return Err(Error::OutsideVPlus(p));
    }
    if !map.is_monic() {
        return Err(Error::NotMonic);
    }
    let (sum, _, n, tail) = log_phi_plus_product(map, p, Point2::real(0.0, 0.0), tol);
    Ok(BoettcherValue { value: p.y * sum.exp(), truncation: n, error_bound: tail * p.y.norm() })
}

/// Double-double oracle for `φ⁺` of a map given by Hénon factors; `p` must be in a
/// certified `V⁺`.
pub fn phi_plus_extended(factors: &[(Polynomial, C64)], p: Point2, n: usize) -> C64 {
    let d: u32 = factors.iter().map(|(q, _)| q.degree() as u32).product();
    let inv_d = DD::ONE / DD::new(d as f64);
    let (mut x, mut y) = (CDD::from_c64(p.x), CDD::from_c64(p.y));
    let y0 = y;
    let mut scale = inv_d;
    let mut sum = CDD::default();
    for _ in 0..n {
        if y.norm_sqr().to_f64() > 1e60 {
            break;
        }
        let oy = y;
        for (q, b) in factors {
            let py = eval_dd(q, y);
            let nx = y;
            y = py - CDD::from_c64(*b) * x;
            x = nx;
        }
        let r = y / oy.powi(d);
        sum = sum + CDD::log1p_series(r - CDD::ONE).scale(scale);
        scale = scale * inv_d;
    }
    (y0 * CDD::exp_series(sum)).to_c64()
}
