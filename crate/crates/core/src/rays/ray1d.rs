use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::angles::{AngleOrbit, ExternalAngle};
use crate::dynamics::{Point2, Polynomial};
use crate::error::{Error, Result};
use crate::level::{self, LevelFunction, LevelSample};
use crate::potential::OneDimLevel;

/// Deepest potential a trace will descend to while waiting for a landing certificate.
const G_FLOOR: f64 = 1e-80;
/// Samples used by the contraction test.
const LANDING_WINDOW: usize = 5;
const LANDING_RATIO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayOptions {
    pub g_start: f64,
    pub g_stop: f64,
    /// Cauchy-tail bound required to declare the ray landed.
    pub land_tol: f64,
    /// Fraction of the potential removed per step (`1/2` halves it).
    pub step: f64,
}

impl Default for RayOptions {
    fn default() -> Self {
        Self { g_start: 4.0, g_stop: 1e-8, land_tol: 1e-6, step: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RayStatus {
    Landed,
    Truncated,
    EscapedToAmbiguity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySample {
    pub g: f64,
    /// Plane point (one variable) or leaf parameter.
    pub z: C64,
    /// `γ(z)` for leaf rays.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub image: Option<Point2>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landing {
    pub point: C64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub image: Option<Point2>,
    /// Sum of the remaining geometric series of sample gaps.
    pub tail_bound: f64,
    /// Largest successive-gap ratio over the landing window.
    pub contraction: f64,
    /// Whether the estimate was refined to a periodic point.
    pub polished: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayTrace {
    pub angle: ExternalAngle,
    pub samples: Vec<RaySample>,
    pub landing: Option<Landing>,
    pub status: RayStatus,
}

impl RayTrace {
    pub fn landed(&self) -> bool {
        self.status == RayStatus::Landed
    }
}

/// Contraction certificate over the last samples: `(ratio, tail bound)`.
///
/// Gap ratios are normalized to one halving of the potential, so refined steps do not
/// look like slower contraction. The tail bound uses the raw per-step ratio.
pub(crate) fn landing_certificate(samples: &[(f64, C64)]) -> Option<(f64, f64)> {
    if samples.len() < LANDING_WINDOW + 1 {
        return None;
    }
    let tail = &samples[samples.len() - LANDING_WINDOW - 1..];
    let gaps: Vec<(f64, f64)> = tail.windows(2).map(|w| ((w[1].1 - w[0].1).norm(), w[0].0 / w[1].0)).collect();
    let last = gaps.last()?.0;
    if last == 0.0 {
        return Some((0.0, 0.0));
    }
    let (mut per_halving, mut per_step) = (0.0f64, 0.0f64);
    for w in gaps.windows(2) {
        let r = w[1].0 / w[0].0;
        per_step = per_step.max(r);
        per_halving = per_halving.max(r.powf(std::f64::consts::LN_2 / w[1].1.ln()));
    }
    (per_halving < LANDING_RATIO && per_step < 1.0).then(|| (per_halving, last * per_step / (1.0 - per_step)))
}

/// Descend from `start` to `opts.g_stop`, and further in factors of `10⁴` (down to
/// `floor`) while the landing certificate is not yet below `opts.land_tol`.
pub(crate) fn descend_to_landing(
    lvl: &dyn LevelFunction,
    start: LevelSample,
    angle: &ExternalAngle,
    opts: &RayOptions,
    floor: f64,
) -> Result<(Vec<LevelSample>, RayStatus)> {
    let d = lvl.degree();
    let chart_angle = |k: usize| angle.chart_radians(d, k);
    let mut levels = vec![start];
    let mut g_stop = opts.g_stop;
    let status = loop {
        let from = *levels.last().expect("nonempty");
        let k_max = level::chart_for(lvl, g_stop) + 8;
        match level::descend(lvl, from, g_stop, &chart_angle, opts.step, k_max) {
            Ok(more) => levels.extend_from_slice(&more[1..]),
            Err(Error::AmbiguousPreimage { .. }) => break RayStatus::EscapedToAmbiguity,
            Err(e) => return Err(e),
        }
        let pts: Vec<(f64, C64)> = levels.iter().filter(|s| s.g <= opts.g_start).map(|s| (s.g, s.z)).collect();
        match landing_certificate(&pts) {
            Some((_, tail)) if tail < opts.land_tol => break RayStatus::Landed,
            _ if g_stop * 1e-4 < floor => break RayStatus::Truncated,
            _ => g_stop *= 1e-4,
        }
    };
    Ok((levels, status))
}

/// Newton on `P^K(z) = z`.
fn polish_periodic(poly: &Polynomial, z0: C64, k: usize) -> Option<C64> {
    let mut z = z0;
    for _ in 0..60 {
        let (mut w, mut dw) = (z, C64::new(1.0, 0.0));
        for _ in 0..k {
            let (p, dp) = poly.eval_deriv(w);
            dw *= dp;
            w = p;
        }
        let step = (w - z) / (dw - 1.0);
        if !step.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    ((poly.iterate(z, k) - z).norm() < 1e-12 * (1.0 + z.norm())).then_some(z)
}

/// Chart-0 starting point `φ⁻¹(e^{g + 2πiθ})`, from the asymptote `z ≈ e^{g + 2πiθ}`.
fn start_sample(lvl: &OneDimLevel, angle: &ExternalAngle, g: f64) -> Result<LevelSample> {
    let im = angle.chart_radians(lvl.degree(), 0);
    let guess = C64::from_polar(g.exp(), im);
    let z = level::solve_at(lvl, guess, g, im, 0).ok_or_else(|| Error::NewtonDiverged(format!("ray start at potential {g}")))?;
    Ok(LevelSample { g, z, k: 0 })
}

/// External ray of angle `θ` for a monic polynomial, from potential `g_start` down to
/// `g_stop` (further if the landing certificate needs it).
pub fn trace_ray_1d(poly: &Polynomial, angle: &ExternalAngle, opts: &RayOptions) -> Result<RayTrace> {
    if !poly.is_monic() {
        return Err(Error::NotMonic);
    }
    if !(opts.g_start > opts.g_stop && opts.g_stop > 0.0) {
        return Err(Error::InvalidInput(format!("need g_start > g_stop > 0, got {} and {}", opts.g_start, opts.g_stop)));
    }
    let lvl = OneDimLevel::new(poly);
    let d = lvl.degree();
    let top = opts.g_start.max(lvl.threshold());
    let start = start_sample(&lvl, angle, top)?;
    let (levels, status) = descend_to_landing(&lvl, start, angle, opts, G_FLOOR)?;
    let samples: Vec<RaySample> =
        levels.iter().filter(|s| s.g <= opts.g_start).map(|s| RaySample { g: s.g, z: s.z, image: None }).collect();
    let pts: Vec<(f64, C64)> = samples.iter().map(|s| (s.g, s.z)).collect();
    let landing = landing_certificate(&pts).map(|(contraction, tail_bound)| {
        let raw = pts.last().expect("certificate needs samples").1;
        let polished = angle
            .period(d)
            .and_then(|k| polish_periodic(poly, raw, k))
            .filter(|z| (z - raw).norm() <= 3.0 * tail_bound + 1e-12);
        Landing { point: polished.unwrap_or(raw), image: None, tail_bound, contraction, polished: polished.is_some() }
    });
    Ok(RayTrace { angle: *angle, samples, landing, status })
}

/// The point of the ray of angle `θ` at potential exactly `g`.
pub fn ray_point_1d(poly: &Polynomial, angle: &ExternalAngle, g: f64, step: f64) -> Result<C64> {
    if !(g > 0.0) {
        return Err(Error::NotEscaping { potential: g });
    }
    let lvl = OneDimLevel::new(poly);
    let d = lvl.degree();
    let top = lvl.threshold().max(g);
    let start = start_sample(&lvl, angle, top)?;
    let chart_angle = |k: usize| angle.chart_radians(d, k);
    let samples = level::descend(&lvl, start, g, &chart_angle, step, level::chart_for(&lvl, g) + 8)?;
    Ok(samples.last().expect("descent keeps its start").z)
}

/// Angles grouped by common landing point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub classes: Vec<AngleClass>,
    /// Largest landing distance inside a class.
    pub max_within: f64,
    /// Smallest landing distance between classes (`∞` with a single class).
    pub min_between: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleClass {
    pub angles: Vec<ExternalAngle>,
    pub landing: C64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub image: Option<Point2>,
}

fn angle_key(a: &ExternalAngle) -> f64 {
    a.turns()
}

impl Partition {
    /// Union of points closer than `tol`, with classes and members sorted by angle.
    pub(crate) fn from_landings(items: Vec<(ExternalAngle, C64, Option<Point2>)>, tol: f64) -> Self {
        let n = items.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        let dist = |i: usize, j: usize| match (items[i].2, items[j].2) {
            (Some(a), Some(b)) => a.dist(&b),
            _ => (items[i].1 - items[j].1).norm(),
        };
        for i in 0..n {
            for j in i + 1..n {
                if dist(i, j) < tol {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let (mut max_within, mut min_between) = (0.0f64, f64::INFINITY);
        for i in 0..n {
            for j in i + 1..n {
                if find(&mut parent, i) == find(&mut parent, j) {
                    max_within = max_within.max(dist(i, j));
                } else {
                    min_between = min_between.min(dist(i, j));
                }
            }
        }
        let mut classes: Vec<AngleClass> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            match roots.iter().position(|&x| x == r) {
                Some(c) => classes[c].angles.push(items[i].0),
                None => {
                    roots.push(r);
                    classes.push(AngleClass { angles: vec![items[i].0], landing: items[i].1, image: items[i].2 });
                }
            }
        }
        for c in &mut classes {
            c.angles.sort_by(|a, b| angle_key(a).total_cmp(&angle_key(b)));
        }
        classes.sort_by(|a, b| angle_key(&a.angles[0]).total_cmp(&angle_key(&b.angles[0])));
        Self { classes, max_within, min_between }
    }

    /// Equality as set partitions of the angles.
    pub fn same_as(&self, other: &Partition) -> bool {
        self.classes.len() == other.classes.len()
            && self.classes.iter().zip(&other.classes).all(|(a, b)| a.angles == b.angles)
    }

    /// Angles of each class, e.g. `[["0/1"], ["1/3", "2/3"]]`.
    pub fn labels(&self) -> Vec<Vec<String>> {
        self.classes.iter().map(|c| c.angles.iter().map(|a| a.to_string()).collect()).collect()
    }
}

/// Identifications of the rays of all angles in `orbits`, grouped by landing points closer than `tol`.
pub fn detect_identifications(poly: &Polynomial, orbits: &[AngleOrbit], opts: &RayOptions, tol: f64) -> Result<(Partition, Vec<RayTrace>)> {
    let traces: Vec<RayTrace> =
        orbits.iter().flat_map(|o| o.external()).map(|a| trace_ray_1d(poly, &a, opts)).collect::<Result<_>>()?;
    let unlanded: Vec<String> = traces.iter().filter(|t| !t.landed()).map(|t| t.angle.to_string()).collect();
    if !unlanded.is_empty() {
        return Err(Error::UnlandedRay(unlanded));
    }
    let items = traces.iter().map(|t| (t.angle, t.landing.expect("landed").point, None)).collect();
    Ok((Partition::from_landings(items, tol), traces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::boettcher_1d;
    use crate::rays::periodic_angles;
    use std::f64::consts::TAU;

    #[test]
    fn identity_ray_is_a_radius() {
        let p = Polynomial::quadratic(0.0);
        let t = trace_ray_1d(&p, &ExternalAngle::rational(0, 1), &RayOptions::default()).unwrap();
        assert!(t.landed());
        for s in &t.samples {
            assert!((s.z - s.g.exp()).norm() < 1e-12);
        }
        assert!((t.landing.unwrap().point - 1.0).norm() < 1e-6);
        assert!(t.samples.windows(2).all(|w| w[1].g < w[0].g));
    }

    #[test]
    fn basilica_rays_land_at_fixed_points() {
        let p = Polynomial::quadratic(-1.0);
        let s5 = 5f64.sqrt();
        let (beta, alpha) = ((1.0 + s5) / 2.0, (1.0 - s5) / 2.0);
        for (a, expect) in [((0, 1), beta), ((1, 3), alpha), ((2, 3), alpha)] {
            let angle = ExternalAngle::rational(a.0, a.1);
            let t = trace_ray_1d(&p, &angle, &RayOptions::default()).unwrap();
            assert!(t.landed(), "{angle}");
            assert!((t.landing.unwrap().point - expect).norm() < 1e-6, "{angle}: {:?}", t.landing);
            for s in t.samples.iter().step_by(7) {
                let phi = boettcher_1d(&p, s.z, 1e-15).unwrap().value;
                assert!(crate::level::wrap_pi(phi.arg() - TAU * angle.turns()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn basilica_partition_is_stable() {
        let p = Polynomial::quadratic(-1.0);
        let orbits: Vec<_> = (1..=2).flat_map(|k| periodic_angles(2, k)).collect();
        for tol in [1e-7, 1e-4] {
            let (part, _) = detect_identifications(&p, &orbits, &RayOptions::default(), tol).unwrap();
            assert_eq!(part.labels(), vec![vec!["0/1".to_string()], vec!["1/3".into(), "2/3".into()]]);
        }
    }

    #[test]
    fn circle_rays_are_distinct() {
        let p = Polynomial::quadratic(0.0);
        let orbits: Vec<_> = (1..=2).flat_map(|k| periodic_angles(2, k)).collect();
        let (part, traces) = detect_identifications(&p, &orbits, &RayOptions::default(), 1e-6).unwrap();
        assert_eq!(part.classes.len(), 3);
        for t in traces {
            let expect = C64::from_polar(1.0, TAU * t.angle.turns());
            assert!((t.landing.unwrap().point - expect).norm() < 1e-6);
        }
    }

    #[test]
    fn ray_point_has_requested_coordinate() {
        let p = Polynomial::quadratic(-1.0);
        let a = ExternalAngle::Turns(0.2);
        let z = ray_point_1d(&p, &a, 0.3, 0.5).unwrap();
        let phi = boettcher_1d(&p, z, 1e-15).unwrap().value;
        assert!((phi - C64::from_polar(0.3f64.exp(), TAU * 0.2)).norm() < 1e-10);
    }
}
