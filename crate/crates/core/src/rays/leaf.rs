use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::angles::{AngleOrbit, ExternalAngle};
use super::ray1d::{descend_to_landing, detect_identifications, landing_certificate, Landing, Partition, RayOptions, RaySample, RayTrace};
use crate::dynamics::{Point2, Polynomial};
use crate::error::{Error, Result};
use crate::level::{self, wrap_pi, LevelFunction, LevelSample};
use crate::potential::{extend_phi_plus, LeafLevel};
use crate::saddles::{continue_saddle, find_periodic_1d, LeafChart};

/// Leaf charts go deep fast near the saddle; stop well before round-off dominates.
const LEAF_FLOOR: f64 = 1e-40;
const CHART_BUDGET: usize = 64;

/// Point on the leaf where `log f_k = d^k (g + 2πiθ)`, from `seed`.
fn solve_on_leaf(lvl: &LeafLevel, seed: C64, g: f64, angle: &ExternalAngle) -> Option<LevelSample> {
    let k = lvl.first_admissible(seed, CHART_BUDGET)?.max(level::chart_for(lvl, g));
    let z = level::solve_at(lvl, seed, g, angle.chart_radians(lvl.degree(), k), k)?;
    Some(LevelSample { g, z, k })
}

/// `|arg f(z) − 2πθ|` with `f` the continued `φ⁺` on the leaf.
fn angle_error(chart: &LeafChart, z: C64, angle: &ExternalAngle, tol: f64) -> Result<f64> {
    let v = extend_phi_plus(chart, z, tol)?.value;
    Ok(wrap_pi(v.arg() - TAU * angle.turns()).abs())
}

/// Leafwise ray of angle `θ` through the point of potential `g_start` nearest `seed`,
/// traced in the leaf parameter toward the landing point.
pub fn trace_ray_leaf(chart: &LeafChart, angle: &ExternalAngle, seed: C64, opts: &RayOptions) -> Result<RayTrace> {
    if !(opts.g_start > opts.g_stop && opts.g_stop > 0.0) {
        return Err(Error::InvalidInput(format!("need g_start > g_stop > 0, got {} and {}", opts.g_start, opts.g_stop)));
    }
    let lvl = LeafLevel { chart };
    let start = solve_on_leaf(&lvl, seed, opts.g_start, angle)
        .ok_or_else(|| Error::NewtonDiverged(format!("leaf ray start from {seed} at potential {}", opts.g_start)))?;
    let err = angle_error(chart, start.z, angle, 1e-14)?;
    if err > 1e-6 {
        return Err(Error::BranchAmbiguity { at: start.z, detail: format!("start lies on another ray (angle off by {err:.3e} rad)") });
    }
    let (levels, status) = descend_to_landing(&lvl, start, angle, opts, LEAF_FLOOR)?;
    let samples: Vec<RaySample> = levels.iter().map(|s| RaySample { g: s.g, z: s.z, image: Some(chart.eval(s.z)) }).collect();
    let pts: Vec<(f64, C64)> = samples.iter().map(|s| (s.g, s.z)).collect();
    let landing = landing_certificate(&pts).map(|(contraction, tail_bound)| {
        let point = pts.last().expect("certificate needs samples").1;
        Landing { point, image: Some(chart.eval(point)), tail_bound, contraction, polished: false }
    });
    Ok(RayTrace { angle: *angle, samples, landing, status })
}

/// Seed lattice for [`leaf_rays_at_saddle`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeafRaySearch {
    /// Inner radius of the fundamental annulus; `0` picks `0.05 (1 + ‖q‖)`.
    pub radius: f64,
    pub radial: usize,
    pub angular: usize,
    pub tol: f64,
}

impl Default for LeafRaySearch {
    fn default() -> Self {
        Self { radius: 0.0, radial: 6, angular: 64, tol: 1e-14 }
    }
}

/// A periodic leaf ray landing at the chart's base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeafRay {
    pub angle: ExternalAngle,
    /// Crossing of the common reference potential.
    pub crossing: C64,
    pub reference_potential: f64,
    /// `|ζ' − ζ|` after following the ray from `Λζ` back down to the potential of `ζ`.
    pub invariance_residual: f64,
    pub landing: Point2,
}

/// Rays of a periodic angle `θ` (period `K`, with `m | K` for the chart's period `m`)
/// that land at the saddle point `γ(0)`.
///
/// Such a ray is invariant under `z ↦ Λz`, `Λ = λ^{K/m}`, so it crosses every annulus
/// `{r ≤ |z| ≤ r|Λ|}`. Candidates are found by Newton from a seed lattice there, kept
/// when following the ray down from `Λζ` returns to `ζ` and the continued `φ⁺` has
/// argument `2πθ`, and finally merged by their crossing of a common potential.
pub fn leaf_rays_at_saddle(chart: &LeafChart, angle: &ExternalAngle, search: &LeafRaySearch) -> Result<Vec<LeafRay>> {
    let d = chart.degree();
    let m = chart.period();
    let k = angle.period(d).ok_or_else(|| Error::InvalidInput(format!("angle {angle} is not periodic under ×{d}")))?;
    if k % m != 0 {
        return Ok(Vec::new());
    }
    let lvl = LeafLevel { chart };
    let big = chart.lambda().powi((k / m) as i32);
    let gain = (d as f64).powi(k as i32);
    let r = if search.radius > 0.0 { search.radius } else { 0.05 * (1.0 + chart.saddle().q0().norm()) };
    let r_out = r * big.norm();
    let chart_angle = |kk: usize| angle.chart_radians(d, kk);

    let mut raw: Vec<LevelSample> = Vec::new();
    for i in 0..search.radial {
        let rho = r * big.norm().powf((i as f64 + 0.5) / search.radial as f64);
        for j in 0..search.angular {
            let seed = C64::from_polar(rho, TAU * (j as f64 + 0.5 * (i % 2) as f64) / search.angular as f64);
            let g = chart.green(seed, search.tol).value;
            if !(g > 1e-10) {
                continue;
            }
            let Some(s) = solve_on_leaf(&lvl, seed, g, angle) else { continue };
            let n = s.z.norm();
            if n < 0.5 * r || n > 2.0 * r_out || raw.iter().any(|o| (o.z - s.z).norm() < 1e-9 * (1.0 + n)) {
                continue;
            }
            raw.push(s);
        }
    }

    let mut kept: Vec<(LevelSample, f64)> = Vec::new();
    for s in raw {
        let up = big * s.z;
        let Some(k0) = lvl.first_admissible(up, CHART_BUDGET) else { continue };
        let start = LevelSample { g: gain * s.g, z: up, k: k0 };
        let Ok(path) = level::descend(&lvl, start, s.g, &chart_angle, 0.5, CHART_BUDGET) else { continue };
        let back = path.last().expect("descent keeps its start").z;
        let res = (back - s.z).norm();
        if res > 1e-7 * (1.0 + s.z.norm()) {
            continue;
        }
        if angle_error(chart, s.z, angle, search.tol).map_or(true, |e| e > 1e-6) {
            continue;
        }
        kept.push((s, res));
    }

    let g_ref = kept.iter().map(|(s, _)| s.g).fold(f64::INFINITY, f64::min);
    let mut rays: Vec<LeafRay> = Vec::new();
    for (s, res) in kept {
        let crossing = if s.g > g_ref {
            match level::descend(&lvl, s, g_ref, &chart_angle, 0.5, CHART_BUDGET) {
                Ok(path) => path.last().expect("descent keeps its start").z,
                Err(_) => continue,
            }
        } else {
            s.z
        };
        if rays.iter().any(|ray| (ray.crossing - crossing).norm() < 1e-6 * (1.0 + crossing.norm())) {
            continue;
        }
        rays.push(LeafRay { angle: *angle, crossing, reference_potential: g_ref, invariance_residual: res, landing: chart.saddle().q0() });
    }
    rays.sort_by(|a, b| a.crossing.arg().total_cmp(&b.crossing.arg()));
    Ok(rays)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub ray: RayOptions,
    /// Landing points closer than this are identified.
    pub land_tol: f64,
    pub search: LeafRaySearch,
    /// Continuation steps from `b = 0`.
    pub steps: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self { ray: RayOptions::default(), land_tol: 1e-6, search: LeafRaySearch::default(), steps: 20 }
    }
}

/// Outcome of comparing ray identifications for `P` and for `H_b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentificationReport {
    pub b: C64,
    pub one_dim: Partition,
    pub henon: Partition,
    pub matched: bool,
    /// Angles whose classes differ, or that found no landing saddle.
    pub witnesses: Vec<String>,
    /// Number of distinct leaf rays found per angle (1 is the expected count).
    pub ray_counts: Vec<(String, usize)>,
    /// Orbits of `P` that did not continue to saddles.
    pub skipped_orbits: Vec<String>,
    /// Largest `|π_y(q) − z|` between a saddle landing point and the one-variable one.
    pub max_landing_shift: f64,
}

/// Partition of periodic angles by landing point, for `P` and for `H_b` on the
/// unstable leaves of the continued saddles; a disagreement is reported, not raised.
pub fn compare_identifications(poly: &Polynomial, b: C64, orbits: &[AngleOrbit], opts: &CompareOptions) -> Result<IdentificationReport> {
    let (one_dim, traces) = detect_identifications(poly, orbits, &opts.ray, opts.land_tol)?;

    let mut periods: Vec<usize> = orbits.iter().map(|o| o.period).collect();
    periods.sort_unstable();
    periods.dedup();
    let needed: Vec<usize> = (1..=periods.iter().copied().max().unwrap_or(0)).filter(|m| periods.iter().any(|k| k % m == 0)).collect();

    let mut charts: Vec<LeafChart> = Vec::new();
    let mut skipped_orbits = Vec::new();
    for m in needed {
        for orbit in find_periodic_1d(poly, m)? {
            match continue_saddle(poly, &orbit, b, opts.steps) {
                Ok(s) => {
                    for j in 0..m {
                        charts.push(LeafChart::new(s.rotated(j))?);
                    }
                }
                Err(e @ (Error::NotSaddle { .. } | Error::NewtonDiverged(_))) => {
                    skipped_orbits.push(format!("period {m} orbit at {}: {e}", orbit.points[0]));
                }
                Err(e) => return Err(e),
            }
        }
    }

    let mut items = Vec::new();
    let mut ray_counts = Vec::new();
    let mut witnesses = Vec::new();
    let mut max_landing_shift = 0.0f64;
    for trace in &traces {
        let angle = trace.angle;
        let mut landed: Option<Point2> = None;
        let mut count = 0;
        for chart in &charts {
            let rays = leaf_rays_at_saddle(chart, &angle, &opts.search)?;
            if let Some(ray) = rays.first() {
                count += rays.len();
                landed.get_or_insert(ray.landing);
            }
        }
        ray_counts.push((angle.to_string(), count));
        match landed {
            Some(q) => {
                let z = trace.landing.expect("landed").point;
                max_landing_shift = max_landing_shift.max((q.y - z).norm());
                items.push((angle, q.y, Some(q)));
            }
            None => witnesses.push(format!("{angle}: no leaf ray lands at a continued saddle")),
        }
    }
    let henon = Partition::from_landings(items, opts.land_tol);
    let matched = witnesses.is_empty() && one_dim.same_as(&henon);
    if !matched {
        for class in &one_dim.classes {
            if !henon.classes.iter().any(|h| h.angles == class.angles) {
                let labels: Vec<String> = class.angles.iter().map(|a| a.to_string()).collect();
                witnesses.push(format!("one-variable class {{{}}} has no Hénon counterpart", labels.join(", ")));
            }
        }
    }
    Ok(IdentificationReport { b, one_dim, henon, matched, witnesses, ray_counts, skipped_orbits, max_landing_shift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rays::periodic_angles;
    use crate::saddles::{reduction_saddle, EigenNormalization};

    fn fixed_chart(c: f64, b: f64, pick: impl Fn(C64) -> bool) -> LeafChart {
        let p = Polynomial::quadratic(c);
        let o = find_periodic_1d(&p, 1).unwrap().into_iter().find(|o| pick(o.points[0])).unwrap();
        let s = if b == 0.0 { reduction_saddle(&p, &o).unwrap() } else { continue_saddle(&p, &o, C64::new(b, 0.0), 20).unwrap() };
        LeafChart::new(s).unwrap()
    }

    #[test]
    fn reduction_ray_is_the_real_axis() {
        let p = Polynomial::quadratic(0.0);
        let o = find_periodic_1d(&p, 1).unwrap().into_iter().find(|o| o.is_repelling()).unwrap();
        let s = reduction_saddle(&p, &o).unwrap().normalized(EigenNormalization::SecondComponentOne);
        let chart = LeafChart::new(s).unwrap();
        let opts = RayOptions { g_start: 1.0, g_stop: 1e-8, ..RayOptions::default() };
        let t = trace_ray_leaf(&chart, &ExternalAngle::rational(0, 1), C64::new(1.1, 0.1), &opts).unwrap();
        assert!(t.landed());
        for s in &t.samples {
            assert!((s.z - s.g).norm() < 1e-10, "{} {}", s.g, s.z);
        }
        let land = t.landing.unwrap();
        assert!(land.image.unwrap().dist(&Point2::real(1.0, 1.0)) < 1e-6);
    }

    #[test]
    fn near_reduction_ray_lands_at_the_saddle() {
        let chart = fixed_chart(0.0, 0.01, |z| (z - 1.0).norm() < 1e-6);
        let opts = RayOptions { g_start: 0.5, ..RayOptions::default() };
        let t = trace_ray_leaf(&chart, &ExternalAngle::rational(0, 1), C64::new(0.5, 0.0), &opts).unwrap();
        assert!(t.landed());
        let q = chart.saddle().q0();
        assert!(t.landing.unwrap().image.unwrap().dist(&q) < 0.05);
        // recorded potentials agree with G⁺ ∘ γ
        for s in t.samples.iter().step_by(5) {
            assert!((chart.green(s.z, 1e-15).value - s.g).abs() < 1e-7 * (1.0 + s.g));
        }
    }

    #[test]
    fn fixed_leaf_has_one_zero_ray() {
        let chart = fixed_chart(0.0, 0.3, |z| (z - 1.0).norm() < 1e-6);
        let rays = leaf_rays_at_saddle(&chart, &ExternalAngle::rational(0, 1), &LeafRaySearch::default()).unwrap();
        assert_eq!(rays.len(), 1, "{rays:?}");
        assert!(rays[0].invariance_residual < 1e-7);
        // no period-2 ray lands at the fixed point
        let rays = leaf_rays_at_saddle(&chart, &ExternalAngle::rational(1, 3), &LeafRaySearch::default()).unwrap();
        assert!(rays.is_empty());
    }

    #[test]
    fn basilica_identifications_persist() {
        let p = Polynomial::quadratic(-1.0);
        let orbits: Vec<_> = (1..=2).flat_map(|k| periodic_angles(2, k)).collect();
        let rep = compare_identifications(&p, C64::new(0.05, 0.0), &orbits, &CompareOptions::default()).unwrap();
        assert!(rep.matched, "{rep:?}");
        assert_eq!(rep.henon.labels(), vec![vec!["0/1".to_string()], vec!["1/3".into(), "2/3".into()]]);
    }
}
