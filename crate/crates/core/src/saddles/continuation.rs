use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::PeriodicOrbit1D;
use crate::dynamics::{FamilyMap, Mat2, PlaneMap, Point2, Polynomial};
use crate::error::{Error, Result};

/// How the unstable eigenvector is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenNormalization {
    /// Unit Euclidean norm, first nonzero component on the positive real axis.
    #[default]
    Unit,
    /// Second component equal to 1; at `b = 0` this is `(1/(d q₁'^{d−1}) · …, 1)`, the
    /// scaling for which the `z²` chart is `(e^{z/2}, e^z)`.
    SecondComponentOne,
}

/// A periodic saddle orbit of `H_b(x, y) = (y, P(y) − b x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleOrbit2D {
    pub poly: Polynomial,
    pub b: C64,
    pub period: usize,
    pub points: Vec<Point2>,
    /// Unstable eigenvalue of `DH^m(q_0)`.
    pub lambda: C64,
    /// Stable eigenvalue.
    pub mu: C64,
    pub v: Point2,
    pub orbit_residual: f64,
    pub eigen_residual: f64,
}

impl SaddleOrbit2D {
    pub fn map(&self) -> FamilyMap {
        FamilyMap::new(self.poly.clone(), self.b)
    }

    pub fn q0(&self) -> Point2 {
        self.points[0]
    }

    /// `DH^m(q_0)`.
    pub fn monodromy(&self) -> Mat2 {
        monodromy(&self.map(), self.q0(), self.period)
    }

    /// The same orbit started at `q_j`, with the unstable direction transported by
    /// `DH^j` so the charts of all orbit points share one normalization convention.
    pub fn rotated(&self, j: usize) -> Self {
        let m = self.period;
        let j = j % m;
        let map = self.map();
        let points: Vec<Point2> = (0..m).map(|i| self.points[(i + j) % m]).collect();
        let v = normalize(monodromy(&map, self.q0(), j).apply(self.v), EigenNormalization::Unit);
        let dh = monodromy(&map, points[0], m);
        let eigen_residual = (dh.apply(v) - v.scale(self.lambda)).norm();
        Self { points, v, eigen_residual, ..self.clone() }
    }

    /// Same orbit with the eigenvector rescaled.
    pub fn normalized(mut self, norm: EigenNormalization) -> Self {
        self.v = normalize(self.v, norm);
        self
    }
}

pub(crate) fn monodromy(map: &FamilyMap, q: Point2, m: usize) -> Mat2 {
    let mut acc = Mat2::identity();
    let mut p = q;
    for _ in 0..m {
        acc = map.jacobian(p) * acc;
        p = map.apply(p);
    }
    acc
}

fn normalize(v: Point2, norm: EigenNormalization) -> Point2 {
    match norm {
        EigenNormalization::Unit => {
            let n = v.norm();
            let lead = if v.x.norm() > 1e-14 * n { v.x } else { v.y };
            let rot = lead.conj() / lead.norm();
            v.scale(rot / n)
        }
        EigenNormalization::SecondComponentOne => v.scale(v.y.inv()),
    }
}

/// Assemble the saddle record at `q0` (already a periodic point of `H_b`).
fn build(poly: &Polynomial, b: C64, q0: Point2, m: usize) -> Result<SaddleOrbit2D> {
    let map = FamilyMap::new(poly.clone(), b);
    let mut points = Vec::with_capacity(m);
    let mut p = q0;
    for _ in 0..m {
        points.push(p);
        p = map.apply(p);
    }
    let orbit_residual = (0..m).map(|k| map.apply(points[k]).dist(&points[(k + 1) % m])).fold(0.0, f64::max);
    let dh = monodromy(&map, q0, m);
    let [mu, lambda] = dh.eigenvalues();
    if !(mu.norm() < 1.0 && lambda.norm() > 1.0) {
        return Err(Error::NotSaddle { moduli: [mu.norm(), lambda.norm()] });
    }
    let v = normalize(dh.eigenvector(lambda), EigenNormalization::Unit);
    let eigen_residual = (dh.apply(v) - v.scale(lambda)).norm();
    Ok(SaddleOrbit2D { poly: poly.clone(), b, period: m, points, lambda, mu, v, orbit_residual, eigen_residual })
}

/// Newton on `F(q) = H_b^m(q) − q` from `q`.
fn newton_periodic(map: &FamilyMap, mut q: Point2, m: usize) -> Option<Point2> {
    for _ in 0..40 {
        let f = map.iterate(q, m) - q;
        let j = monodromy(map, q, m).sub_scalar(C64::new(1.0, 0.0));
        let step = j.solve(f)?;
        q = q - step;
        if !q.is_finite() {
            return None;
        }
        if step.norm() <= 1e-15 * (1.0 + q.norm()) {
            break;
        }
    }
    let res = (map.iterate(q, m) - q).norm();
    (res <= 1e-12 * (1.0 + q.norm())).then_some(q)
}

/// The `b = 0` seed `(q'_0, q'_1)` of a repelling orbit of `P` and its degenerate
/// saddle structure (stable eigenvalue 0).
pub fn reduction_saddle(poly: &Polynomial, orbit: &PeriodicOrbit1D) -> Result<SaddleOrbit2D> {
    if !orbit.is_repelling() {
        return Err(Error::NotSaddle { moduli: [0.0, orbit.multiplier.norm()] });
    }
    let q1 = poly.eval(orbit.points[0]);
    build(poly, C64::new(0.0, 0.0), Point2::new(orbit.points[0], q1), orbit.period)
}

/// Follow the orbit from `b = 0` to `b_target` in `steps` equal increments, Newton at
/// each step from the previous solution.
pub fn continue_saddle(poly: &Polynomial, orbit: &PeriodicOrbit1D, b_target: C64, steps: usize) -> Result<SaddleOrbit2D> {
    let start = reduction_saddle(poly, orbit)?;
    continue_from(&start, b_target, steps)
}

/// Continue an existing saddle to a new Jacobian parameter along a straight path.
pub fn continue_from(saddle: &SaddleOrbit2D, b_target: C64, steps: usize) -> Result<SaddleOrbit2D> {
    let steps = steps.max(1);
    let m = saddle.period;
    let b0 = saddle.b;
    let mut q = saddle.q0();
    for j in 1..=steps {
        let b = b0 + (b_target - b0) * (j as f64 / steps as f64);
        let map = FamilyMap::new(saddle.poly.clone(), b);
        q = newton_periodic(&map, q, m).ok_or_else(|| Error::NewtonDiverged(format!("continuation step {j} of {steps} (b = {b})")))?;
    }
    build(&saddle.poly, b_target, q, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::saddles::find_periodic_1d;

    fn one_fixed() -> (Polynomial, PeriodicOrbit1D) {
        let p = Polynomial::quadratic(0.0);
        let o = find_periodic_1d(&p, 1).unwrap().into_iter().find(|o| (o.points[0] - 1.0).norm() < 1e-9).unwrap();
        (p, o)
    }

    #[test]
    fn closed_form_fixed_point() {
        let (p, o) = one_fixed();
        let s = continue_saddle(&p, &o, C64::new(0.1, 0.0), 10).unwrap();
        assert!(s.q0().dist(&Point2::real(1.1, 1.1)) < 1e-14);
    }

    #[test]
    fn reduction_jacobian() {
        let (p, o) = one_fixed();
        let s = reduction_saddle(&p, &o).unwrap();
        let dh = s.monodromy();
        let expect = Mat2::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(2.0, 0.0));
        for i in 0..2 {
            for j in 0..2 {
                assert!((dh.m[i][j] - expect.m[i][j]).norm() < 1e-15);
            }
        }
        assert!(s.mu.norm() < 1e-15 && (s.lambda - 2.0).norm() < 1e-15);
        // the unit eigenvector is a positive multiple of (1/2, 1)
        let w = s.clone().normalized(EigenNormalization::SecondComponentOne).v;
        assert!(w.dist(&Point2::real(0.5, 1.0)) < 1e-15);
    }

    #[test]
    fn eigenvalues_at_three_tenths() {
        let (p, o) = one_fixed();
        let s = continue_saddle(&p, &o, C64::new(0.3, 0.0), 30).unwrap();
        assert!(s.q0().dist(&Point2::real(1.3, 1.3)) < 1e-12);
        let disc = (2.6f64 * 2.6 - 1.2).sqrt();
        assert!((s.lambda - (2.6 + disc) / 2.0).norm() < 1e-9);
        assert!((s.mu - (2.6 - disc) / 2.0).norm() < 1e-9);
        assert!(s.eigen_residual < 1e-8);
    }

    #[test]
    fn superattracting_orbit_is_not_a_saddle() {
        let p = Polynomial::quadratic(-1.0);
        let o = find_periodic_1d(&p, 2).unwrap().remove(0);
        assert!(matches!(continue_saddle(&p, &o, C64::new(0.05, 0.0), 5), Err(Error::NotSaddle { .. })));
    }

    #[test]
    fn rotation_keeps_the_eigenpair() {
        let p = Polynomial::quadratic(0.0);
        let o = find_periodic_1d(&p, 2).unwrap().remove(0);
        let s = continue_saddle(&p, &o, C64::new(0.3, 0.0), 20).unwrap();
        let r = s.rotated(1);
        assert_eq!(r.q0(), s.points[1]);
        assert!(r.eigen_residual < 1e-10, "{}", r.eigen_residual);
        assert_eq!(s.rotated(2).q0(), s.q0());
    }

    #[test]
    fn path_independence() {
        let p = Polynomial::quadratic(-1.0);
        let o = find_periodic_1d(&p, 1).unwrap().remove(0);
        let direct = continue_saddle(&p, &o, C64::new(0.05, 0.0), 10).unwrap();
        let there = continue_saddle(&p, &o, C64::new(0.1, 0.0), 10).unwrap();
        let back = continue_from(&there, C64::new(0.05, 0.0), 10).unwrap();
        assert!(direct.q0().dist(&back.q0()) < 1e-9);
    }
}
