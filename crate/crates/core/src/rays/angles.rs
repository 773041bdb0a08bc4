use std::f64::consts::TAU;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::level::wrap_pi;

/// External angle in turns: an exact rational for periodic rays, a float otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExternalAngle {
    Rational(Ratio<u64>),
    Turns(f64),
}

/// `base^exp mod m` without overflow.
fn pow_mod(base: u64, mut exp: usize, m: u64) -> u64 {
    let m = m as u128;
    let (mut acc, mut b) = (1u128 % m, base as u128 % m);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

impl ExternalAngle {
    /// `p/q` reduced into `[0, 1)`.
    pub fn rational(p: u64, q: u64) -> Self {
        Self::Rational(Ratio::new(p % q, q))
    }

    pub fn turns(&self) -> f64 {
        match *self {
            Self::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Self::Turns(t) => t.rem_euclid(1.0),
        }
    }

    /// `d^k θ mod 1`, exact for rationals.
    pub fn multiply(&self, d: usize, k: usize) -> Self {
        match *self {
            Self::Rational(r) => {
                let q = *r.denom();
                let p = (*r.numer() as u128 * pow_mod(d as u64, k, q) as u128 % q as u128) as u64;
                Self::rational(p, q)
            }
            Self::Turns(t) => Self::Turns((t * (d as f64).powi(k as i32)).rem_euclid(1.0)),
        }
    }

    /// Argument `2π d^k θ` wrapped into `(−π, π]`.
    pub fn chart_radians(&self, d: usize, k: usize) -> f64 {
        wrap_pi(TAU * self.multiply(d, k).turns())
    }

    /// Exact period under `θ ↦ dθ`, when the angle is rational and periodic.
    pub fn period(&self, d: usize) -> Option<usize> {
        let Self::Rational(r) = *self else { return None };
        let q = *r.denom();
        if q.gcd(&(d as u64)) != 1 {
            return None;
        }
        (1..=64).find(|&k| self.multiply(d, k) == *self)
    }
}

impl fmt::Display for ExternalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Self::Turns(t) => write!(f, "{t}"),
        }
    }
}

/// A cycle of angles of exact period `K` under multiplication by `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleOrbit {
    pub d: usize,
    pub period: usize,
    /// `θ_{j+1} = d θ_j mod 1`, starting from the smallest.
    pub angles: Vec<Ratio<u64>>,
}

impl AngleOrbit {
    pub fn external(&self) -> impl Iterator<Item = ExternalAngle> + '_ {
        self.angles.iter().map(|&r| ExternalAngle::Rational(r))
    }
}

/// All cycles of exact period `K`, as fractions `k/(d^K − 1)` in lowest terms.
///
/// Returns an empty list when `d^K − 1` does not fit in a `u64`.
pub fn periodic_angles(d: usize, k: usize) -> Vec<AngleOrbit> {
    let Some(n) = (d as u64).checked_pow(k as u32).map(|x| x - 1) else { return Vec::new() };
    if n == 0 {
        return Vec::new();
    }
    let d64 = d as u64;
    let mut seen = vec![false; n as usize];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start as usize] {
            continue;
        }
        let mut cycle = vec![start];
        let mut x = (start as u128 * d64 as u128 % n as u128) as u64;
        while x != start {
            cycle.push(x);
            x = (x as u128 * d64 as u128 % n as u128) as u64;
        }
        for &c in &cycle {
            seen[c as usize] = true;
        }
        if cycle.len() == k {
            out.push(AngleOrbit { d, period: k, angles: cycle.into_iter().map(|c| Ratio::new(c, n)).collect() });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: u64, q: u64) -> Ratio<u64> {
        Ratio::new(p, q)
    }

    #[test]
    fn small_cases() {
        let o = periodic_angles(2, 1);
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].angles, vec![r(0, 1)]);
        let o = periodic_angles(2, 2);
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].angles, vec![r(1, 3), r(2, 3)]);
        let o = periodic_angles(3, 1);
        let all: Vec<_> = o.iter().flat_map(|a| a.angles.clone()).collect();
        assert_eq!(all, vec![r(0, 1), r(1, 2)]);
    }

    #[test]
    fn counts_match_necklaces() {
        // number of period-K points of doubling: 2^K − Σ_{j | K, j < K} (period-j points)
        assert_eq!(periodic_angles(2, 3).len(), 2);
        assert_eq!(periodic_angles(2, 4).len(), 3);
        assert_eq!(periodic_angles(2, 6).len(), 9);
        assert_eq!(periodic_angles(3, 2).len(), 3);
    }

    #[test]
    fn exact_multiplication() {
        let a = ExternalAngle::rational(1, 7);
        assert_eq!(a.multiply(2, 3), a);
        assert_eq!(a.period(2), Some(3));
        assert_eq!(ExternalAngle::rational(1, 4).period(2), None);
        let big = ExternalAngle::rational(1, (1 << 40) - 1);
        assert_eq!(big.multiply(2, 40), big);
        assert!((ExternalAngle::rational(2, 3).chart_radians(2, 1) - TAU / 3.0).abs() < 1e-15);
    }
}
