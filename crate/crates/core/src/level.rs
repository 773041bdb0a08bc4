//! Level-curve continuation shared by the one-variable and leafwise ray machinery.
//!
//! A level function exposes charts `log Φ_k(z) = d^k log φ(z)` that are computable
//! (branch-free) wherever the `k`-th image lies in the escape region. Rays are the
//! curves `Im log Φ_k = const`; following them by Newton with a basin check keeps the
//! branch of `log φ` continuous without ever extracting roots.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub(crate) trait LevelFunction {
    fn degree(&self) -> usize;

    /// Potential level above which the `k = 0` chart is expected to be admissible.
    fn threshold(&self) -> f64;

    /// `(log Φ_k(z), d/dz log Φ_k(z))` for some branch of the logarithm, or `None` when
    /// the `k`-th image is not yet in the escape region.
    fn log_phi(&self, z: C64, k: usize) -> Option<(C64, C64)>;

    /// Smallest admissible `k ≤ k_max`.
    fn first_admissible(&self, z: C64, k_max: usize) -> Option<usize> {
        (0..=k_max).find(|&k| self.log_phi(z, k).is_some())
    }
}

/// Wrap into `(−π, π]`.
#[inline]
pub(crate) fn wrap_pi(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Residual `log Φ_k(z) − target` with the imaginary part taken mod `2π`.
#[inline]
fn residual(value: C64, target: C64) -> C64 {
    let diff = value - target;
    C64::new(diff.re, wrap_pi(diff.im))
}

const NEWTON_MAX: usize = 60;
/// Fraction of the sheet spacing `2π / |F'|` a converged point may sit from the predictor.
const BASIN_FRACTION: f64 = 0.25;

/// Solve `log Φ_k(z) ≡ target (mod 2πi)` by Newton from `z`.
pub(crate) fn newton_level(f: &dyn LevelFunction, mut z: C64, k: usize, target: C64) -> Option<(C64, C64)> {
    let tol = 1e-14 * (1.0 + target.re.abs());
    let mut last_step = f64::INFINITY;
    for _ in 0..NEWTON_MAX {
        let (v, dv) = f.log_phi(z, k)?;
        let r = residual(v, target);
        if r.norm() <= tol {
            return Some((z, dv));
        }
        let step = r / dv;
        if !step.is_finite() {
            return None;
        }
        z -= step;
        let s = step.norm();
        if s <= 1e-16 * (1.0 + z.norm()) || (s >= last_step && r.norm() < 1e-10 * (1.0 + target.re.abs())) {
            // stagnation at round-off level
            return f.log_phi(z, k).map(|(_, dv)| (z, dv));
        }
        last_step = s;
    }
    None
}

/// One continuation step: predict with the current derivative, correct by Newton,
/// and reject the result if it jumped to a neighbouring sheet. Steps longer than
/// `π/2` in the chart could reach another sheet unnoticed, and a predictor that does
/// not halve the residual means the step is outside the linear regime.
fn level_step(f: &dyn LevelFunction, z: C64, k: usize, target: C64) -> Option<(C64, C64)> {
    let (v, dv) = f.log_phi(z, k)?;
    let r0 = residual(v, target);
    if r0.norm() > FRAC_PI_2 {
        return None;
    }
    let pred = z - r0 / dv;
    let (vp, _) = f.log_phi(pred, k)?;
    if residual(vp, target).norm() > 0.5 * r0.norm() {
        return None;
    }
    let (zc, dvc) = newton_level(f, pred, k, target)?;
    let sheet = TAU / dv.norm().max(dvc.norm());
    ((zc - pred).norm() < BASIN_FRACTION * sheet).then_some((zc, dvc))
}

/// A point on a traced level curve: potential, location and chart index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LevelSample {
    pub g: f64,
    pub z: C64,
    pub k: usize,
}

/// Schedule shared by ascent and descent: first try ratio 2 (or 1/2), then shrink.
const MAX_REFINEMENTS: usize = 12;

/// Smallest chart index with `d^k g ≥ threshold`.
pub(crate) fn chart_for(f: &dyn LevelFunction, g: f64) -> usize {
    let d = f.degree() as f64;
    let mut k = 0;
    let mut u = g;
    while u < f.threshold() && k < 200 {
        u *= d;
        k += 1;
    }
    k
}

/// Climb the level curve through `z0` (potential `g0`) until the `k = 0` chart is
/// admissible. Returns `Im log φ(z0)` in `(−π, π]` together with the visited samples.
pub(crate) fn ascend(f: &dyn LevelFunction, z0: C64, g0: f64, k_max: usize) -> Result<(f64, Vec<LevelSample>)> {
    let mut k = f
        .first_admissible(z0, k_max)
        .ok_or(Error::DoesNotEscape { point: z0, iterations: k_max })?;
    let (v0, _) = f.log_phi(z0, k).expect("admissible");
    let mut samples = vec![LevelSample { g: g0, z: z0, k }];
    let (mut z, mut g, mut im) = (z0, g0, v0.im);
    let d = f.degree() as f64;
    while k > 0 {
        // drop charts as soon as a lower one is admissible
        if let Some((v, _)) = f.log_phi(z, k - 1) {
            k -= 1;
            im = v.im;
            samples.push(LevelSample { g, z, k });
            continue;
        }
        let mut frac = 1.0;
        let mut advanced = false;
        for _ in 0..MAX_REFINEMENTS {
            let g_new = g * (1.0 + frac);
            let target = C64::new(d.powi(k as i32) * g_new, im);
            if let Some((zn, _)) = level_step(f, z, k, target) {
                z = zn;
                g = g_new;
                advanced = true;
                break;
            }
            frac *= 0.5;
        }
        if !advanced {
            return Err(Error::AmbiguousPreimage { potential: g });
        }
        samples.push(LevelSample { g, z, k });
        if g > 1e3 {
            return Err(Error::NewtonDiverged(format!("ascent from {z0} left the chart range")));
        }
    }
    let (v, _) = f.log_phi(z, 0).expect("k = 0 admissible");
    Ok((wrap_pi(v.im), samples))
}

/// Descend the level curve `Im log Φ_k = angle(k)` from `start` down to `g_stop`.
///
/// `angle(k)` gives the chart-`k` argument in radians (the caller supplies an exact
/// reduction for rational angles). Each step multiplies the potential by
/// `1 − frac0`, and on a failed or sheet-jumping Newton step `frac` is halved
/// (`1/2 → 3/4 → 7/8 …` of the previous potential for `frac0 = 1/2`).
pub(crate) fn descend(
    f: &dyn LevelFunction,
    start: LevelSample,
    g_stop: f64,
    angle: &dyn Fn(usize) -> f64,
    frac0: f64,
    k_max: usize,
) -> Result<Vec<LevelSample>> {
    let d = f.degree() as f64;
    let mut samples = vec![start];
    let LevelSample { mut g, mut z, mut k } = start;
    while g > g_stop {
        let mut frac = frac0;
        let mut advanced = false;
        for _ in 0..MAX_REFINEMENTS {
            let g_new = (g * (1.0 - frac)).max(g_stop);
            let k0 = chart_for(f, g_new).max(k).min(k_max);
            // charts only deepen while descending
            let found = (k0..=(k0 + 3).min(k_max)).find_map(|kk| {
                let target = C64::new(d.powi(kk as i32) * g_new, angle(kk));
                level_step(f, z, kk, target).map(|(zn, _)| (zn, kk))
            });
            if let Some((zn, kn)) = found {
                z = zn;
                k = kn;
                g = g_new;
                advanced = true;
                break;
            }
            frac *= 0.5;
        }
        if !advanced {
            return Err(Error::AmbiguousPreimage { potential: g });
        }
        samples.push(LevelSample { g, z, k });
    }
    Ok(samples)
}

/// Solve for the point at potential `g` and chart-`k` argument `im` from a guess.
pub(crate) fn solve_at(f: &dyn LevelFunction, guess: C64, g: f64, im: f64, k: usize) -> Option<C64> {
    let d = f.degree() as f64;
    newton_level(f, guess, k, C64::new(d.powi(k as i32) * g, im)).map(|(z, _)| z)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `φ = id` for `z ↦ z²`; charts are `2^k log z`.
    struct Square;

    impl LevelFunction for Square {
        fn degree(&self) -> usize {
            2
        }
        fn threshold(&self) -> f64 {
            1.0
        }
        fn log_phi(&self, z: C64, k: usize) -> Option<(C64, C64)> {
            let w = z.powu(1 << k);
            (w.norm() > 1.0).then(|| (w.ln(), C64::new((1u64 << k) as f64, 0.0) / z))
        }
    }

    #[test]
    fn wrap_is_symmetric() {
        assert!((wrap_pi(3.0 * PI) - PI).abs() < 1e-15);
        assert!((wrap_pi(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn ascent_recovers_argument() {
        let z0 = C64::from_polar(1.001, 2.0);
        let (im, samples) = ascend(&Square, z0, 1.001f64.ln(), 40).unwrap();
        assert!((im - 2.0).abs() < 1e-12, "{im}");
        assert!(samples.windows(2).all(|w| w[1].g >= w[0].g));
    }

    #[test]
    fn descent_follows_radial_line() {
        let theta = 1.0 / 3.0;
        let angle = |k: usize| wrap_pi(TAU * ((1u64 << k) as f64 * theta).fract());
        let g0 = 2.0;
        let start = LevelSample { g: g0, z: C64::from_polar(g0.exp(), TAU * theta), k: 0 };
        let samples = descend(&Square, start, 1e-6, &angle, 0.5, 60).unwrap();
        for s in &samples {
            assert!((s.z.arg() - TAU * theta).abs() < 1e-10);
            assert!((s.z.norm().ln() - s.g).abs() < 1e-12);
        }
        assert!(samples.last().unwrap().g <= 1e-6);
    }
}
