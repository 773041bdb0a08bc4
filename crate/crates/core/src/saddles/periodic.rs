use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::Polynomial;
use crate::error::{Error, Result};

/// A periodic orbit of a one-variable polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit1D {
    pub points: Vec<C64>,
    pub period: usize,
    /// `∏ P'(q_k)`.
    pub multiplier: C64,
    /// `|d^m ∏ q_k − multiplier|`: the alternative product form agrees with the
    /// derivative product only for `z² + c`.
    pub product_form_gap: f64,
}

impl PeriodicOrbit1D {
    pub fn is_repelling(&self) -> bool {
        self.multiplier.norm() > 1.0
    }
}

/// `(P^m(z) − z, (P^m)'(z) − 1)`.
fn period_map(poly: &Polynomial, z: C64, m: usize) -> (C64, C64) {
    let (mut w, mut dw) = (z, C64::new(1.0, 0.0));
    for _ in 0..m {
        let (p, dp) = poly.eval_deriv(w);
        dw *= dp;
        w = p;
    }
    (w - z, dw - 1.0)
}

fn polish(poly: &Polynomial, mut z: C64, m: usize) -> (C64, f64) {
    for _ in 0..100 {
        let (f, df) = period_map(poly, z, m);
        let step = f / df;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    let r = period_map(poly, z, m).0.norm();
    (z, r)
}

/// Winding number of `P^m(z) − z` around an axis-aligned box, by adaptive sampling of
/// the boundary. `None` when a zero sits (numerically) on the boundary.
fn winding(poly: &Polynomial, m: usize, lo: C64, hi: C64) -> Option<i64> {
    let corners = [lo, C64::new(hi.re, lo.im), hi, C64::new(lo.re, hi.im), lo];
    let f = |z: C64| {
        let (v, dv) = period_map(poly, z, m);
        (z, v, dv)
    };
    let mut total = 0.0;
    for e in corners.windows(2) {
        const START: usize = 8;
        let pts: Vec<_> = (0..=START).map(|i| f(e[0] + (e[1] - e[0]) * (i as f64 / START as f64))).collect();
        let mut stack: Vec<_> = pts.windows(2).map(|w| (w[0], w[1], 0u32)).collect();
        while let Some(((a, fa, dfa), (b, fb, dfb), depth)) = stack.pop() {
            if fa.norm() == 0.0 || fb.norm() == 0.0 {
                return None;
            }
            let turn = (fb / fa).arg();
            // the segment must also be short against the Newton step |f/f'| at both
            // ends, or a high-degree map can wind between samples unseen
            let h = (b - a).norm();
            let short = h * dfa.norm() < 0.3 * fa.norm() && h * dfb.norm() < 0.3 * fb.norm();
            if short && turn.abs() < 0.5 && (fb - fa).norm() < 0.5 * fa.norm().min(fb.norm()) {
                total += turn;
                continue;
            }
            if depth > 48 {
                return None;
            }
            let mid = f(0.5 * (a + b));
            stack.push((mid, (b, fb, dfb), depth + 1));
            stack.push(((a, fa, dfa), mid, depth + 1));
        }
    }
    Some((total / TAU).round() as i64)
}

/// Recursive isolation of the `n` roots inside a box.
fn isolate(poly: &Polynomial, m: usize, lo: C64, hi: C64, n: i64, depth: u32, out: &mut Vec<C64>) -> Result<()> {
    if n <= 0 {
        return Ok(());
    }
    let width = (hi.re - lo.re).max(hi.im - lo.im);
    let tiny = width < 1e-9 || depth > 60;
    if n == 1 || tiny {
        let (z, res) = polish(poly, 0.5 * (lo + hi), m);
        let pad = 1e-9 * (1.0 + width);
        let inside = z.re >= lo.re - pad && z.re <= hi.re + pad && z.im >= lo.im - pad && z.im <= hi.im + pad;
        if tiny || (inside && res < 1e-9 * (1.0 + z.norm())) {
            if res > 1e-8 * (1.0 + z.norm()) {
                return Err(Error::RootPolishFailed { root: z, residual: res });
            }
            out.extend(std::iter::repeat_n(z, n as usize));
            return Ok(());
        }
    }
    // split off-center when a child boundary passes through a root
    for t in [0.5, 0.513_7, 0.473_1, 0.551_9, 0.441_1] {
        let mid = C64::new(lo.re + t * (hi.re - lo.re), lo.im + (1.0 - t) * (hi.im - lo.im));
        let children = [
            (lo, mid),
            (C64::new(mid.re, lo.im), C64::new(hi.re, mid.im)),
            (C64::new(lo.re, mid.im), C64::new(mid.re, hi.im)),
            (mid, hi),
        ];
        let counts: Option<Vec<i64>> = children.iter().map(|&(a, b)| winding(poly, m, a, b)).collect();
        if let Some(counts) = counts.filter(|c| c.iter().sum::<i64>() == n) {
            for (&(a, b), &k) in children.iter().zip(&counts) {
                isolate(poly, m, a, b, k, depth + 1, out)?;
            }
            return Ok(());
        }
    }
    Err(Error::RootPolishFailed { root: 0.5 * (lo + hi), residual: f64::NAN })
}

/// Every root of `P^m(z) − z`, by argument-principle subdivision and Newton polishing.
fn all_periodic_points(poly: &Polynomial, m: usize) -> Result<Vec<C64>> {
    let expected = poly.degree().pow(m as u32) as i64;
    // offsets keep the outer box away from symmetry axes, where roots cluster
    let off = C64::new(1.234_567e-3, 2.345_678e-3);
    let mut r = 1.05 * poly.dominant_radius() + 0.1;
    for _ in 0..8 {
        let (lo, hi) = (C64::new(-r, -r) + off, C64::new(r, r) + off);
        if winding(poly, m, lo, hi) == Some(expected) {
            let mut out = Vec::with_capacity(expected as usize);
            isolate(poly, m, lo, hi, expected, 0, &mut out)?;
            return Ok(out);
        }
        r *= 1.5;
    }
    Err(Error::RootPolishFailed { root: C64::new(r, 0.0), residual: f64::NAN })
}

fn canonical_start(points: &[C64]) -> usize {
    (0..points.len())
        .max_by(|&a, &b| points[a].re.total_cmp(&points[b].re).then(points[a].im.total_cmp(&points[b].im)))
        .unwrap_or(0)
}

/// All periodic orbits of exact period `m`, each starting at its point of largest real
/// part, sorted by that point.
pub fn find_periodic_1d(poly: &Polynomial, m: usize) -> Result<Vec<PeriodicOrbit1D>> {
    if m == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    if poly.degree().checked_pow(m as u32).is_none_or(|n| n > 4096) {
        return Err(Error::InvalidInput(format!("d^m too large for period {m}")));
    }
    let roots = all_periodic_points(poly, m)?;
    let close = |a: C64, b: C64| (a - b).norm() < 1e-8 * (1.0 + a.norm());
    let mut used = vec![false; roots.len()];
    let mut orbits = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let z = roots[i];
        let exact = (1..=m).find(|&j| m.is_multiple_of(j) && close(poly.iterate(z, j), z)).unwrap_or(m);
        let mut pts = Vec::with_capacity(exact);
        let mut w = z;
        for _ in 0..exact {
            // mark the matching root and use its polished value
            if let Some(k) = (0..roots.len()).find(|&k| !used[k] && close(roots[k], w)) {
                used[k] = true;
                pts.push(roots[k]);
            } else {
                pts.push(w);
            }
            w = poly.eval(w);
        }
        if exact != m {
            continue;
        }
        let s = canonical_start(&pts);
        pts.rotate_left(s);
        let multiplier = pts.iter().map(|&q| poly.eval_deriv(q).1).product::<C64>();
        let d = poly.degree() as f64;
        let prod_form = d.powi(m as i32) * pts.iter().product::<C64>();
        orbits.push(PeriodicOrbit1D { points: pts, period: m, multiplier, product_form_gap: (prod_form - multiplier).norm() });
    }
    orbits.sort_by(|a, b| a.points[0].re.total_cmp(&b.points[0].re).then(a.points[0].im.total_cmp(&b.points[0].im)));
    Ok(orbits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basilica_fixed_points() {
        let p = Polynomial::quadratic(-1.0);
        let orbits = find_periodic_1d(&p, 1).unwrap();
        assert_eq!(orbits.len(), 2);
        let s5 = 5f64.sqrt();
        let beta = (1.0 + s5) / 2.0;
        let alpha = (1.0 - s5) / 2.0;
        assert!((orbits[1].points[0] - beta).norm() < 1e-14);
        assert!((orbits[0].points[0] - alpha).norm() < 1e-14);
        assert!((orbits[1].multiplier - 2.0 * beta).norm() < 1e-13);
        assert!((orbits[0].multiplier - 2.0 * alpha).norm() < 1e-13);
    }

    #[test]
    fn basilica_superattracting_two_cycle() {
        let p = Polynomial::quadratic(-1.0);
        let orbits = find_periodic_1d(&p, 2).unwrap();
        assert_eq!(orbits.len(), 1);
        let o = &orbits[0];
        assert!((o.points[0] - 0.0).norm() < 1e-12 && (o.points[1] + 1.0).norm() < 1e-12);
        assert!(o.multiplier.norm() < 1e-12);
    }

    #[test]
    fn circle_two_cycle() {
        let p = Polynomial::quadratic(0.0);
        let orbits = find_periodic_1d(&p, 2).unwrap();
        assert_eq!(orbits.len(), 1);
        let o = &orbits[0];
        assert!((o.multiplier - 4.0).norm() < 1e-12);
        for q in &o.points {
            assert!((q.norm() - 1.0).abs() < 1e-13);
        }
        assert!(o.product_form_gap < 1e-12);
    }

    #[test]
    fn cubic_product_form_differs() {
        let p = Polynomial::unicritical(3, C64::new(0.1, 0.0)).unwrap();
        let orbits = find_periodic_1d(&p, 1).unwrap();
        assert_eq!(orbits.len(), 3);
        assert!(orbits.iter().any(|o| o.product_form_gap > 1e-3));
    }

    #[test]
    fn counts_all_period_four_points() {
        let p = Polynomial::quadratic(-0.2);
        let orbits = find_periodic_1d(&p, 4).unwrap();
        // (16 − 4) / 4 orbits of exact period 4
        assert_eq!(orbits.len(), 3);
    }

    #[test]
    fn basilica_cycles_near_the_box_edges() {
        // real cycles sit a few 1e-3 from the subdivision lines
        let p = Polynomial::quadratic(-1.0);
        let counts: Vec<usize> = (1..=4).map(|m| find_periodic_1d(&p, m).unwrap().len()).collect();
        assert_eq!(counts, [2, 1, 2, 3]);
    }
}
