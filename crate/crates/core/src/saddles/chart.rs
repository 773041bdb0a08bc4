use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::continuation::monodromy;
use super::SaddleOrbit2D;
use crate::dynamics::{FamilyMap, Filtration, PlaneMap, Point2};
use crate::error::{Error, Result};
use crate::potential::{green_plus, GreenValue};

/// Taylor order of the local unstable-manifold parametrization.
pub const DEFAULT_SEED_ORDER: usize = 12;

/// Linearizing coordinate `γ` of the unstable manifold of a saddle orbit:
/// `γ(0) = q_0`, `γ'(0) = v`, and `H^m(γ(z)) = γ(λ z)`.
///
/// Evaluated as `γ(z) = H^{mn}(W(z/λ^n))` where `W` is the Taylor polynomial of `γ`
/// at 0 (solved order by order) and `n` is the smallest budget that puts `z/λ^n`
/// inside the seed radius `r₀ = 0.01 (1 + ‖q_0‖)`.
#[derive(Debug, Clone)]
pub struct LeafChart {
    saddle: SaddleOrbit2D,
    map: FamilyMap,
    filt: Filtration,
    coeffs: Vec<Point2>,
    r0: f64,
}

type Series = Vec<C64>;

fn series_mul(a: &[C64], b: &[C64], n: usize) -> Series {
    let mut out = vec![C64::new(0.0, 0.0); n + 1];
    for (i, &ai) in a.iter().enumerate().take(n + 1) {
        if ai == C64::new(0.0, 0.0) {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Apply `H^m` to the series `(X(s), Y(s))`, truncated at order `n`.
fn compose_series(map: &FamilyMap, m: usize, mut x: Series, mut y: Series, n: usize) -> (Series, Series) {
    let c = map.poly.coeffs();
    for _ in 0..m {
        let mut acc = vec![C64::new(0.0, 0.0); n + 1];
        acc[0] = c[c.len() - 1];
        for &a in c[..c.len() - 1].iter().rev() {
            acc = series_mul(&acc, &y, n);
            acc[0] += a;
        }
        let ny: Series = acc.iter().zip(&x).map(|(p, xi)| p - map.b * xi).collect();
        x = y;
        y = ny;
    }
    (x, y)
}

fn taylor_coefficients(saddle: &SaddleOrbit2D, map: &FamilyMap, order: usize) -> Result<Vec<Point2>> {
    let m = saddle.period;
    let dh = monodromy(map, saddle.q0(), m);
    let mut coeffs = vec![saddle.q0(), saddle.v];
    for k in 2..=order {
        let x: Series = coeffs.iter().map(|a| a.x).chain([C64::new(0.0, 0.0)]).collect();
        let y: Series = coeffs.iter().map(|a| a.y).chain([C64::new(0.0, 0.0)]).collect();
        let (hx, hy) = compose_series(map, m, x, y, k);
        let rhs = Point2::new(hx[k], hy[k]);
        let a = dh
            .sub_scalar(saddle.lambda.powi(k as i32))
            .solve(rhs)
            .ok_or(Error::NotConverged { discrepancy: f64::INFINITY })?;
        // (λ^k − DH^m) a = E  ⇔  (DH^m − λ^k) a = −E
        coeffs.push(Point2::new(-a.x, -a.y));
    }
    Ok(coeffs)
}

impl LeafChart {
    pub fn new(saddle: SaddleOrbit2D) -> Result<Self> {
        Self::with_order(saddle, DEFAULT_SEED_ORDER)
    }

    /// Chart with a Taylor seed of the given order; order 1 is the linear seed
    /// `q + (z/λ^n) v`.
    pub fn with_order(saddle: SaddleOrbit2D, order: usize) -> Result<Self> {
        let map = saddle.map();
        let mass = map.poly.coeffs().iter().map(|c| c.norm()).sum::<f64>() + map.b.norm();
        let filt = Filtration::search(&map, mass)?;
        let coeffs = taylor_coefficients(&saddle, &map, order.max(1))?;
        let r0 = 0.01 * (1.0 + saddle.q0().norm());
        Ok(Self { saddle, map, filt, coeffs, r0 })
    }

    pub fn saddle(&self) -> &SaddleOrbit2D {
        &self.saddle
    }

    pub fn map(&self) -> &FamilyMap {
        &self.map
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filt
    }

    pub fn lambda(&self) -> C64 {
        self.saddle.lambda
    }

    pub fn period(&self) -> usize {
        self.saddle.period
    }

    pub fn degree(&self) -> usize {
        self.map.degree()
    }

    pub fn seed_radius(&self) -> f64 {
        self.r0
    }

    /// Taylor coefficients `a_0 = q_0, a_1 = v, a_2, …`.
    pub fn coefficients(&self) -> &[Point2] {
        &self.coeffs
    }

    /// Smallest `n` with `|z| / |λ|^n ≤ r₀`.
    pub fn budget(&self, z: C64) -> usize {
        let (mut n, mut s) = (0, z.norm());
        let l = self.lambda().norm();
        while s > self.r0 && n < 10_000 {
            s /= l;
            n += 1;
        }
        n
    }

    /// The local parametrization `W(s)` and `W'(s)`.
    pub fn seed(&self, s: C64) -> (Point2, Point2) {
        let mut p = Point2::default();
        let mut dp = Point2::default();
        for a in self.coeffs.iter().rev() {
            dp = dp.scale(s) + p;
            p = p.scale(s) + *a;
        }
        (p, dp)
    }

    /// Seed point for `z` together with the number of `H` applications `mn` that
    /// carry it to `γ(z)`, and the seed tangent scaled for `d/dz`.
    pub fn seed_for(&self, z: C64) -> (Point2, Point2, usize) {
        let n = self.budget(z);
        let ln = self.lambda().powi(n as i32);
        let (p, dp) = self.seed(z / ln);
        (p, dp.scale(ln.inv()), self.period() * n)
    }

    pub fn eval(&self, z: C64) -> Point2 {
        let (p, _, steps) = self.seed_for(z);
        self.map.iterate(p, steps)
    }

    /// `(γ(z), γ'(z))`.
    pub fn eval_with_tangent(&self, z: C64) -> (Point2, Point2) {
        let (mut p, mut t, steps) = self.seed_for(z);
        for _ in 0..steps {
            t = self.map.jacobian(p).apply(t);
            p = self.map.apply(p);
        }
        (p, t)
    }

    /// `G⁺(γ(z))`, iterating from the seed so large leaf parameters do not overflow.
    pub fn green(&self, z: C64, tol: f64) -> GreenValue {
        self.green_with_budget(z, tol, 2000)
    }

    /// [`LeafChart::green`] allowing `budget` iterations past `γ(z)`.
    pub fn green_with_budget(&self, z: C64, tol: f64, budget: usize) -> GreenValue {
        let (p, _, steps) = self.seed_for(z);
        let scale = (self.degree() as f64).powi(steps as i32);
        let g = green_plus(&self.map, &self.filt, p, tol / scale, steps + budget);
        GreenValue { value: g.value * scale, iterations: g.iterations, converged: g.converged }
    }

    /// Leaf parameter of a point `p` near `γ(guess)`, by Gauss–Newton.
    pub fn locate(&self, p: Point2, guess: C64) -> Result<C64> {
        let mut z = guess;
        for _ in 0..50 {
            let (q, t) = self.eval_with_tangent(z);
            let r = p - q;
            let tn = t.x.norm_sqr() + t.y.norm_sqr();
            let step = (t.x.conj() * r.x + t.y.conj() * r.y) / tn;
            z += step;
            if !z.is_finite() {
                break;
            }
            if step.norm() < 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        let res = self.eval(z).dist(&p);
        if res < 1e-8 * (1.0 + p.norm()) {
            Ok(z)
        } else {
            Err(Error::NotConverged { discrepancy: res })
        }
    }
}

/// `γ_n(z) = H^{mn}(q + (z/λ^n) v)` with the doubling check `‖γ_n − γ_{2n}‖ ≤ tol`.
pub fn linearize(saddle: &SaddleOrbit2D, z: C64, n: usize, tol: f64) -> Result<Point2> {
    let map = saddle.map();
    let at = |n: usize| {
        let s = z / saddle.lambda.powi(n as i32);
        map.iterate(saddle.q0() + saddle.v.scale(s), saddle.period * n)
    };
    let (a, b) = (at(n), at(2 * n));
    let discrepancy = a.dist(&b);
    if discrepancy > tol || !discrepancy.is_finite() {
        return Err(Error::NotConverged { discrepancy });
    }
    Ok(b)
}

/// Rectangular grid of leaf parameters, row-major from the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub width: usize,
    pub height: usize,
}

impl GridSpec {
    pub fn point(&self, col: usize, row: usize) -> C64 {
        let fx = (col as f64 + 0.5) / self.width as f64;
        let fy = (row as f64 + 0.5) / self.height as f64;
        C64::new(self.re[0] + fx * (self.re[1] - self.re[0]), self.im[1] - fy * (self.im[1] - self.im[0]))
    }
}

/// Sample `G⁺ ∘ γ` on a grid; the zero set approximates `γ⁻¹(K⁺)`.
pub fn leaf_escape_region(chart: &LeafChart, grid: &GridSpec, tol: f64) -> Vec<GreenValue> {
    (0..grid.height)
        .flat_map(|r| (0..grid.width).map(move |c| (c, r)))
        .map(|(c, r)| chart.green(grid.point(c, r), tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Polynomial;
    use crate::saddles::{continue_saddle, find_periodic_1d, reduction_saddle, EigenNormalization};

    fn fixed_one(b: f64) -> SaddleOrbit2D {
        let p = Polynomial::quadratic(0.0);
        let o = find_periodic_1d(&p, 1).unwrap().into_iter().find(|o| o.is_repelling()).unwrap();
        if b == 0.0 {
            reduction_saddle(&p, &o).unwrap()
        } else {
            continue_saddle(&p, &o, C64::new(b, 0.0), 20).unwrap()
        }
    }

    #[test]
    fn origin_is_the_saddle() {
        let chart = LeafChart::new(fixed_one(0.3)).unwrap();
        assert_eq!(chart.eval(C64::new(0.0, 0.0)), chart.saddle().q0());
    }

    #[test]
    fn reduction_chart_closed_form() {
        let s = fixed_one(0.0).normalized(EigenNormalization::SecondComponentOne);
        let chart = LeafChart::new(s).unwrap();
        for z in [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let expect = Point2::new((z / 2.0).exp(), z.exp());
            assert!(chart.eval(z).dist(&expect) < 1e-12, "{z}");
        }
    }

    #[test]
    fn functional_equation() {
        let chart = LeafChart::new(fixed_one(0.3)).unwrap();
        let map = chart.map().clone();
        for k in 0..8 {
            let z = C64::from_polar(0.9, 0.7 * k as f64);
            let lhs = map.apply(chart.eval(z));
            let rhs = chart.eval(chart.lambda() * z);
            assert!(lhs.dist(&rhs) < 1e-10, "{z}: {}", lhs.dist(&rhs));
        }
    }

    #[test]
    fn tangent_matches_finite_difference() {
        let chart = LeafChart::new(fixed_one(0.3)).unwrap();
        let z = C64::new(0.4, 0.3);
        let (_, t) = chart.eval_with_tangent(z);
        let h = 1e-6;
        let fd = (chart.eval(z + h) - chart.eval(z - h)).scale(C64::new(0.5 / h, 0.0));
        assert!((fd - t).norm() < 1e-6 * t.norm());
    }

    #[test]
    fn reduction_escape_region_is_right_half_plane() {
        let s = fixed_one(0.0).normalized(EigenNormalization::SecondComponentOne);
        let chart = LeafChart::new(s).unwrap();
        for z in [C64::new(0.5, 0.3), C64::new(2.0, -1.0)] {
            assert!((chart.green(z, 1e-13).value - z.re).abs() < 1e-10);
        }
        assert_eq!(chart.green(C64::new(-0.5, 0.2), 1e-12).value, 0.0);
    }

    #[test]
    fn linear_seed_converges() {
        let s = fixed_one(0.3);
        let z = C64::new(0.5, 0.2);
        let chart = LeafChart::new(s.clone()).unwrap();
        // the linear seed is limited by round-off in q + s·v amplified by λ^n
        let p = linearize(&s, z, 12, 1e-4).unwrap();
        assert!(p.dist(&chart.eval(z)) < 1e-4);
        assert!(linearize(&s, z, 1, 1e-10).is_err());
    }

    #[test]
    fn locate_inverts() {
        let chart = LeafChart::new(fixed_one(0.3)).unwrap();
        let z = C64::new(0.3, -0.6);
        let back = chart.locate(chart.eval(z), z + 0.01).unwrap();
        assert!((back - z).norm() < 1e-10);
    }
}
