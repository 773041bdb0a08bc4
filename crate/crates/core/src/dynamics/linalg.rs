use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// A point of ℂ².
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: C64,
    pub y: C64,
}

impl Point2 {
    pub const fn new(x: C64, y: C64) -> Self {
        Self { x, y }
    }

    pub fn real(x: f64, y: f64) -> Self {
        Self::new(C64::new(x, 0.0), C64::new(y, 0.0))
    }

    /// Euclidean norm on ℂ².
    pub fn norm(&self) -> f64 {
        (self.x.norm_sqr() + self.y.norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.x * s, self.y * s)
    }

    pub fn dist(&self, other: &Point2) -> f64 {
        (*self - *other).norm()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Complex 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[C64; 2]; 2],
}

impl Mat2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn apply(&self, v: Point2) -> Point2 {
        Point2::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    pub fn sub_scalar(&self, s: C64) -> Self {
        Self::new(self.m[0][0] - s, self.m[0][1], self.m[1][0], self.m[1][1] - s)
    }

    /// Solves `self · v = rhs`; `None` when the matrix is numerically singular.
    pub fn solve(&self, rhs: Point2) -> Option<Point2> {
        let det = self.det();
        let scale = self.m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        if det.norm() <= 1e-300 || det.norm() <= f64::EPSILON * scale * scale * 1e-3 {
            return None;
        }
        Some(Point2::new(
            (self.m[1][1] * rhs.x - self.m[0][1] * rhs.y) / det,
            (self.m[0][0] * rhs.y - self.m[1][0] * rhs.x) / det,
        ))
    }

    /// Eigenvalues ordered by increasing modulus.
    pub fn eigenvalues(&self) -> [C64; 2] {
        let tr = self.trace();
        let det = self.det();
        let disc = (tr * tr - 4.0 * det).sqrt();
        // the root with the larger modulus first, the other from det / λ to avoid cancellation
        let big = if (tr + disc).norm() >= (tr - disc).norm() {
            (tr + disc) / 2.0
        } else {
            (tr - disc) / 2.0
        };
        let small = if big.norm() > 0.0 { det / big } else { C64::new(0.0, 0.0) };
        [small, big]
    }

    /// An eigenvector for `lambda`, scaled to unit Euclidean norm.
    pub fn eigenvector(&self, lambda: C64) -> Point2 {
        let [[a, b], [c, d]] = self.m;
        let v1 = Point2::new(b, lambda - a);
        let v2 = Point2::new(lambda - d, c);
        let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
        let n = v.norm();
        if n == 0.0 {
            // λ·I: any vector works
            return Point2::real(1.0, 0.0);
        }
        v.scale(C64::new(1.0 / n, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &rhs.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenpairs_of_triangular_matrix() {
        let m = Mat2::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(2.0, 0.0));
        let [mu, lambda] = m.eigenvalues();
        assert!(mu.norm() < 1e-15);
        assert!((lambda - 2.0).norm() < 1e-15);
        let v = m.eigenvector(lambda);
        let r = m.apply(v) - v.scale(lambda);
        assert!(r.norm() < 1e-15);
    }

    #[test]
    fn solve_recovers_rhs() {
        let m = Mat2::new(C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.3, -1.0), C64::new(2.0, 0.1));
        let v = Point2::new(C64::new(0.7, -0.2), C64::new(-1.1, 0.4));
        let w = m.solve(m.apply(v)).unwrap();
        assert!(w.dist(&v) < 1e-14);
    }
}
