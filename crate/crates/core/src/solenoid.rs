//! The degree-`d` solenoid: windows of orbits of `z ↦ z^d`, the shift, the angle
//! projection, and the coding `Φ_t = φ⁺ ∘ H^t` of points on a saddle leaf.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{PlaneMap, Point2};
use crate::error::{Error, Result};
use crate::level::{self, LevelFunction};
use crate::potential::{extend_phi_plus, phi_plus, LeafLevel};
use crate::saddles::LeafChart;

/// Truncated bi-infinite sequence `(z_t)_{t ∈ [−T, T]}` with `z_{t+1} = z_t^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolenoidWindow {
    pub d: usize,
    #[serde(rename = "T")]
    pub t: usize,
    /// Ordered `t = −T, …, T`.
    pub entries: Vec<C64>,
}

impl SolenoidWindow {
    pub fn new(d: usize, t: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != 2 * t + 1 {
            return Err(Error::Format(format!("window with T = {t} needs {} entries, got {}", 2 * t + 1, entries.len())));
        }
        if d < 2 {
            return Err(Error::Format("solenoid degree must be at least 2".into()));
        }
        Ok(Self { d, t, entries })
    }

    /// Window generated from `z_0` by powers forward and principal roots backward.
    pub fn from_center(d: usize, t: usize, z0: C64) -> Self {
        let mut entries = vec![C64::new(0.0, 0.0); 2 * t + 1];
        entries[t] = z0;
        for i in t + 1..=2 * t {
            entries[i] = entries[i - 1].powu(d as u32);
        }
        for i in (0..t).rev() {
            entries[i] = entries[i + 1].powf(1.0 / d as f64);
        }
        Self { d, t, entries }
    }

    /// Constant window of a fixed point `s`.
    pub fn constant(d: usize, t: usize, s: C64) -> Self {
        Self { d, t, entries: vec![s; 2 * t + 1] }
    }

    /// Entry `z_t` for `t ∈ [−T, T]`.
    pub fn at(&self, t: i64) -> C64 {
        self.entries[(t + self.t as i64) as usize]
    }

    /// `max_t |z_{t+1} − z_t^d| / max(1, |z_{t+1}|)`.
    pub fn consistency(&self) -> f64 {
        self.entries
            .windows(2)
            .map(|w| (w[1] - w[0].powu(self.d as u32)).norm() / w[1].norm().max(1.0))
            .fold(0.0, f64::max)
    }

    /// `|z_t| ≥ 1` up to `tol`.
    pub fn in_model(&self, tol: f64) -> bool {
        self.entries.iter().all(|z| z.norm() >= 1.0 - tol)
    }

    /// `z'_t = z_{t+1}`, with the new top entry regenerated as `z_T^d`.
    pub fn shift(&self) -> Self {
        let mut entries: Vec<C64> = self.entries[1..].to_vec();
        entries.push(self.entries[2 * self.t].powu(self.d as u32));
        Self { d: self.d, t: self.t, entries }
    }

    /// Angle projection `Θ(z)_t = arg z_t`.
    pub fn theta(&self) -> RayAddress {
        RayAddress { d: self.d, t: self.t, angles: self.entries.iter().map(|z| z.arg().rem_euclid(TAU)).collect() }
    }

    /// `|z_t^{d−1} − 1|` for `t = 0, −1, …, −T`.
    pub fn root_of_unity_profile(&self) -> Vec<f64> {
        (0..=self.t as i64).map(|k| (self.at(-k).powu(self.d as u32 - 1) - 1.0).norm()).collect()
    }
}

/// Angle window `(θ_t)` with `θ_{t+1} = d θ_t mod 2π`, radians in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayAddress {
    pub d: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub angles: Vec<f64>,
}

impl RayAddress {
    pub fn at(&self, t: i64) -> f64 {
        self.angles[(t + self.t as i64) as usize]
    }

    /// Largest violation of `θ_{t+1} ≡ d θ_t (mod 2π)`.
    pub fn consistency(&self) -> f64 {
        self.angles
            .windows(2)
            .map(|w| level::wrap_pi(w[1] - self.d as f64 * w[0]).abs())
            .fold(0.0, f64::max)
    }

    pub fn shift(&self) -> Self {
        let mut angles: Vec<f64> = self.angles[1..].to_vec();
        angles.push((self.d as f64 * self.angles[2 * self.t]).rem_euclid(TAU));
        Self { d: self.d, t: self.t, angles }
    }
}

/// Fixed point of the shift: a constant sequence at a `(d−1)`-st root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolenoidFixedPoint {
    pub s: C64,
}

impl SolenoidFixedPoint {
    pub fn window(&self, d: usize, t: usize) -> SolenoidWindow {
        SolenoidWindow::constant(d, t, self.s)
    }
}

pub fn solenoid_fixed_points(d: usize) -> Vec<SolenoidFixedPoint> {
    (0..d.saturating_sub(1))
        .map(|k| {
            let s = if k == 0 { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, TAU * k as f64 / (d - 1) as f64) };
            SolenoidFixedPoint { s }
        })
        .collect()
}

/// Coding `Φ_t(γ(z))` for `t ∈ [−T, T]` on the leaf of a saddle of period `m`.
///
/// With `t = mk + r`, `0 ≤ r < m`, the point `H^t(γ(z))` is `H^r(γ(λ^k z))`, so
/// `Φ_t = f(λ^k z)^{d^r}` where `f` is the continued `φ⁺` on the leaf. Entries whose
/// point is already in `V⁺` are evaluated by the direct product.
pub fn code_window(chart: &LeafChart, z: C64, t: usize, tol: f64) -> Result<SolenoidWindow> {
    let m = chart.period() as i64;
    let d = chart.degree();
    let lambda = chart.lambda();
    let map = chart.map();
    let filt = chart.filtration();
    let mut entries = Vec::with_capacity(2 * t + 1);
    for tt in -(t as i64)..=(t as i64) {
        let k = tt.div_euclid(m);
        let r = tt.rem_euclid(m) as u32;
        let w = z * lambda.powi(k as i32);
        let direct = (tt >= 0)
            .then(|| map.iterate(chart.eval(z), tt as usize))
            .filter(|p| p.is_finite() && filt.in_v_plus(*p));
        let v = match direct {
            Some(p) => phi_plus(map, filt, p, tol)?.value,
            None => extend_phi_plus(chart, w, tol)?.value.powu((d as u32).pow(r)),
        };
        entries.push(v);
    }
    SolenoidWindow::new(d, t, entries)
}

/// Coding of a point of `ℂ²` on the leaf: locate its leaf parameter from `guess`, then code.
pub fn code_point(chart: &LeafChart, p: Point2, guess: C64, t: usize, tol: f64) -> Result<SolenoidWindow> {
    let z = chart.locate(p, guess)?;
    code_window(chart, z, t, tol)
}

/// `max_{t ≤ 0} |z_t − z'_t|` with the per-`t` profile (index 0 is `t = 0`).
pub fn unstable_distance_diag(a: &SolenoidWindow, b: &SolenoidWindow) -> Result<(f64, Vec<f64>)> {
    if a.d != b.d || a.t != b.t {
        return Err(Error::InvalidInput("windows differ in degree or width".into()));
    }
    let profile: Vec<f64> = (0..=a.t as i64).map(|k| (a.at(-k) - b.at(-k)).norm()).collect();
    Ok((profile.iter().copied().fold(0.0, f64::max), profile))
}

/// Empirical lower bound on the covering degree of `Φ` restricted to a leaf: the
/// number of distinct leaf parameters in the fundamental annulus
/// `{r ≤ |ζ| < r|λ|}` whose backward coding `(Φ_t)_{−T ≤ t ≤ 0}` matches that of `z`.
pub fn covering_degree_probe(chart: &LeafChart, z: C64, t: usize, seeds: usize, tol: f64) -> Result<usize> {
    let target = code_window(chart, z, t, tol)?;
    let lvl = LeafLevel { chart };
    let g = chart.green(z, tol).value;
    let w0 = target.at(0);
    let l = chart.lambda().norm();
    let r = z.norm() / l.sqrt();
    let mut found: Vec<C64> = Vec::new();
    let n = (seeds as f64).sqrt().ceil() as usize;
    for i in 0..n {
        let rad = r * l.powf((i as f64 + 0.5) / n as f64);
        for j in 0..n {
            let seed = C64::from_polar(rad, TAU * (j as f64 + 0.5) / n as f64);
            let Some(k) = lvl.first_admissible(seed, 64) else { continue };
            let kk = k.max(level::chart_for(&lvl, g));
            let dk = (lvl.degree() as f64).powi(kk as i32);
            let im = level::wrap_pi(dk * w0.arg());
            let Some(zeta) = level::solve_at(&lvl, seed, g, im, kk) else { continue };
            let n_rad = zeta.norm();
            if !(n_rad >= r * (1.0 - 1e-9) && n_rad < r * l) || found.iter().any(|f| (f - zeta).norm() < 1e-6 * (1.0 + n_rad)) {
                continue;
            }
            let Ok(cand) = code_window(chart, zeta, t, tol) else { continue };
            let matches = (0..=t as i64).all(|s| (cand.at(-s) - target.at(-s)).norm() < 1e-6 * target.at(-s).norm());
            if matches {
                found.push(zeta);
            }
        }
    }
    Ok(found.len().max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Polynomial;
    use crate::saddles::{continue_saddle, find_periodic_1d};

    #[test]
    fn fixed_points_are_roots_of_unity() {
        assert_eq!(solenoid_fixed_points(2).len(), 1);
        let f3 = solenoid_fixed_points(3);
        assert!((f3[1].s + 1.0).norm() < 1e-15);
        let f4 = solenoid_fixed_points(4);
        assert_eq!(f4.len(), 3);
        for f in f4 {
            assert!((f.s.powu(3) - 1.0).norm() < 1e-14);
            let w = f.window(4, 3);
            assert!((w.shift().entries[0] - w.entries[0]).norm() < 1e-14);
        }
    }

    #[test]
    fn shift_examples() {
        let w = SolenoidWindow::constant(3, 2, C64::new(-1.0, 0.0));
        assert_eq!(w.shift(), w);
        let w = SolenoidWindow::from_center(2, 2, C64::new(2.0, 0.0));
        let s = w.shift();
        assert_eq!(s.at(-1), C64::new(2.0, 0.0));
        assert_eq!(s.at(0), C64::new(4.0, 0.0));
        assert!(s.consistency() < 1e-15);
    }

    #[test]
    fn theta_examples() {
        let w = SolenoidWindow::new(2, 1, vec![C64::from_polar(2f64.sqrt(), TAU / 3.0 / 2.0 + TAU / 2.0), C64::from_polar(2.0, TAU / 3.0), C64::from_polar(4.0, 2.0 * TAU / 3.0)]).unwrap();
        let th = w.theta();
        assert!((th.at(0) - TAU / 3.0).abs() < 1e-14);
        assert!((th.at(1) - 2.0 * TAU / 3.0).abs() < 1e-14);
        assert!(th.consistency() < 1e-14);
    }

    #[test]
    fn unstable_distance() {
        let a = SolenoidWindow::from_center(2, 4, C64::new(3.0, 1.0));
        assert_eq!(unstable_distance_diag(&a, &a).unwrap().0, 0.0);
        let b = SolenoidWindow::from_center(2, 4, C64::new(3.0, 1.0).powu(2));
        let (m, prof) = unstable_distance_diag(&a, &b).unwrap();
        assert_eq!(m, prof[0]);
        assert!(prof.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn leaf_coding_is_consistent() {
        let p = Polynomial::quadratic(0.0);
        let o = find_periodic_1d(&p, 1).unwrap().into_iter().find(|o| o.is_repelling()).unwrap();
        let chart = LeafChart::new(continue_saddle(&p, &o, C64::new(0.3, 0.0), 20).unwrap()).unwrap();
        let z = C64::new(0.15, 0.05);
        let w = code_window(&chart, z, 6, 1e-14).unwrap();
        assert!(w.consistency() < 1e-10, "{}", w.consistency());
        let g = chart.green(z, 1e-15).value;
        for t in -6..=6i64 {
            assert!((w.at(t).norm().ln() - 2f64.powi(t as i32) * g).abs() < 1e-8);
        }
        let prof = w.root_of_unity_profile();
        assert!(prof.windows(2).all(|p| p[1] < p[0]));
    }
}
