//! Verification suites. Each suite is a list of independent jobs run on the rayon
//! pool; results are collected in job order, so reports do not depend on scheduling.

use std::f64::consts::{PI, TAU};

use anyhow::{bail, Context};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use solenoid_core::dynamics::DEFAULT_CERTIFICATION_SAMPLES;
use solenoid_core::extended::CDD;
use solenoid_core::potential::{
    boettcher_1d, boettcher_1d_extended, boettcher_pullback, eval_dd, green_minus, green_plus,
    green_plus_extended, phi_plus, phi_plus_extended,
};
use solenoid_core::rays::{
    check_motion_1d, check_motion_leaf, compare_identifications, detect_identifications, leaf_rays_at_saddle,
    periodic_angles, trace_ray_1d, AngleOrbit, CompareOptions, ExternalAngle, LeafRaySearch, RayOptions,
};
use solenoid_core::saddles::{continue_from, continue_saddle, find_periodic_1d, reduction_saddle, EigenNormalization};
use solenoid_core::solenoid::{code_window, covering_degree_probe, solenoid_fixed_points};
use solenoid_core::{
    classify_backward_orbit, classify_orbit, FamilyMap, Filtration, HenonSystem, LeafChart,
    OrbitClass, PlaneMap, Point2, Polynomial, SolenoidWindow,
};

use crate::config::{Config, Precision};
use crate::render::{saddle_chart, system_of};
use crate::report::{Check, VerifyReport};

pub const SUITES: [&str; 6] = ["filtration", "potential", "solenoid", "saddles", "rays", "motions"];

const TOL: f64 = 1e-15;
const N_MAX: usize = 1000;

type Job<'a> = Box<dyn FnOnce() -> Vec<Check> + Send + 'a>;

/// Run `name` (one of [`SUITES`] or `"all"`). Unknown names are usage errors.
pub fn run_suite(name: &str, cfg: &Config) -> anyhow::Result<VerifyReport> {
    let jobs: Vec<Job> = match name {
        "all" => SUITES.iter().flat_map(|s| prefixed(s, jobs_for(s, cfg))).collect(),
        s if SUITES.contains(&s) => jobs_for(s, cfg),
        _ => bail!("unknown suite {name:?}; expected one of {} or all", SUITES.join(", ")),
    };
    let checks: Vec<Vec<Check>> = jobs.into_par_iter().map(|job| job()).collect();
    Ok(VerifyReport::new(name, checks.into_iter().flatten().collect()))
}

/// Report for a system file that could not be read: a single failed check.
pub fn unreadable_system(name: &str, path: &str, err: impl std::fmt::Display) -> VerifyReport {
    VerifyReport::new(name, vec![Check::failed("system", path, err)])
}

fn jobs_for<'a>(suite: &str, cfg: &'a Config) -> Vec<Job<'a>> {
    match suite {
        "filtration" => filtration(cfg),
        "potential" => potential(cfg),
        "solenoid" => solenoid(cfg),
        "saddles" => saddles(cfg),
        "rays" => rays(cfg),
        "motions" => motions(cfg),
        _ => unreachable!("suite names are checked by the caller"),
    }
}

fn prefixed<'a>(suite: &'static str, jobs: Vec<Job<'a>>) -> Vec<Job<'a>> {
    jobs.into_iter()
        .map(|job| -> Job<'a> {
            Box::new(move || {
                job().into_iter().map(|mut c| {
                    c.name = format!("{suite}/{}", c.name);
                    c
                })
                .collect()
            })
        })
        .collect()
}

/// A job whose errors become one failed check named `name`.
fn job<'a>(name: &'a str, f: impl FnOnce() -> anyhow::Result<Vec<Check>> + Send + 'a) -> Job<'a> {
    Box::new(move || f().unwrap_or_else(|e| vec![Check::failed(name, "setup", format!("{e:#}"))]))
}

fn rng(cfg: &Config, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.suite.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn in_disk(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::from_polar(r * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>())
}

fn in_annulus(rng: &mut ChaCha8Rng, r0: f64, r1: f64) -> C64 {
    C64::from_polar(r0 + (r1 - r0) * rng.random::<f64>(), TAU * rng.random::<f64>())
}

/// Running maximum of a residual together with the input that produced it.
struct Worst {
    value: f64,
    witness: String,
}

impl Worst {
    fn new() -> Self {
        Self { value: 0.0, witness: "none".into() }
    }

    fn push(&mut self, value: f64, witness: impl FnOnce() -> String) {
        if !(value <= self.value) {
            self.value = value;
            self.witness = witness();
        }
    }

    fn check(self, name: impl Into<String>, threshold: f64, detail: impl Into<String>) -> Check {
        Check::bound(name, self.value, threshold, self.witness, detail)
    }
}

fn quadratic_system(b: f64) -> HenonSystem {
    HenonSystem::quadratic(0.0, b).expect("y² − b x is a valid system")
}

fn repelling_fixed_point(poly: &Polynomial) -> anyhow::Result<C64> {
    find_periodic_1d(poly, 1)?
        .into_iter()
        .filter(|o| o.is_repelling())
        .map(|o| o.points[0])
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .context("no repelling fixed point")
}

/// Leaf of the outermost repelling fixed point of `P` at `b`.
fn fixed_leaf(poly: &Polynomial, b: C64) -> anyhow::Result<LeafChart> {
    let mut cfg = Config { poly: poly.coeffs().to_vec(), b, ..Config::default() };
    cfg.system = None;
    let near = repelling_fixed_point(poly)?;
    saddle_chart(&cfg, near, 1)
}

// ---------------------------------------------------------------- filtration

fn filtration(cfg: &Config) -> Vec<Job<'_>> {
    let (sys, filt) = match system_of(cfg) {
        Ok(s) => s,
        Err(e) => return vec![Box::new(move || vec![Check::failed("system", system_witness(cfg), format!("{e:#}"))])],
    };
    let n = cfg.suite.samples;
    let (s1, s2, s3, s4) = (sys.clone(), sys.clone(), sys.clone(), sys);
    vec![
        Box::new(move || {
            vec![Check::holds("certify", true, "", format!("R = {}, expansion {:.6}", filt.r, filt.expansion))]
        }),
        job("finer-lattice", move || {
            let res = solenoid_core::dynamics::certify_with(&s1, filt.r, 4 * DEFAULT_CERTIFICATION_SAMPLES, 1.0);
            Ok(vec![match res {
                Ok(f) => Check::holds("finer-lattice", true, "", format!("expansion {:.6}", f.expansion)),
                Err(e) => Check::failed("finer-lattice", format!("R = {}", filt.r), e),
            }])
        }),
        job("inverse-roundtrip", move || Ok(inverse_roundtrip(&s2, cfg, n))),
        Box::new(move || {
            let product: usize = s3.factors().iter().map(|f| f.poly.degree()).product();
            let d = s3.degree();
            vec![Check::holds("degree", d == product, format!("{} factors", s3.factors().len()), format!("degree {d}, product {product}"))]
        }),
        job("jacobian", move || Ok(vec![jacobian_check(&s4, cfg)])),
    ]
}

fn system_witness(cfg: &Config) -> String {
    match &cfg.system {
        Some(s) => serde_json::to_string(s).expect("system files serialize"),
        None => format!("P = {:?}, b = {}", cfg.poly, cfg.b),
    }
}

fn apply_dd(sys: &HenonSystem, x: CDD, y: CDD) -> (CDD, CDD) {
    sys.factors().iter().fold((x, y), |(x, y), f| (y, eval_dd(&f.poly, y) - CDD::from_c64(f.b) * x))
}

fn inverse_dd(sys: &HenonSystem, x: CDD, y: CDD) -> (CDD, CDD) {
    sys.factors().iter().rev().fold((x, y), |(x, y), f| ((eval_dd(&f.poly, x) - y) / CDD::from_c64(f.b), x))
}

/// `H⁻¹ ∘ H = id` for `‖p‖ ≤ 10⁶`. In doubles the forward image of a large `y`
/// keeps only `ε |P(y)|` absolute accuracy, so the double check allows that floor.
fn inverse_roundtrip(sys: &HenonSystem, cfg: &Config, n: usize) -> Vec<Check> {
    let mut rng = rng(cfg, 1);
    let mut dd = Worst::new();
    let mut dbl = Worst::new();
    for _ in 0..n {
        let r = 10f64.powf(rng.random_range(-2.0..6.0));
        let p = Point2::new(in_disk(&mut rng, r), in_disk(&mut rng, r));
        let scale = 1.0 + p.norm();

        let (x, y) = apply_dd(sys, CDD::from_c64(p.x), CDD::from_c64(p.y));
        let (x, y) = inverse_dd(sys, x, y);
        let back = Point2::new(x.to_c64(), y.to_c64());
        dd.push(back.dist(&p) / scale, || p.to_string());

        let back = sys.inverse(sys.apply(p)).expect("systems are invertible");
        let mut floor = 0.0;
        let mut q = p;
        for f in sys.factors() {
            floor += f.poly.eval(q.y).norm() / f.b.norm();
            q = Point2::new(q.y, f.poly.eval(q.y) - f.b * q.x);
        }
        dbl.push(back.dist(&p) / (1e-12 * scale + 64.0 * f64::EPSILON * floor), || p.to_string());
    }
    vec![
        dd.check("inverse-roundtrip", 1e-12, format!("{n} samples, double-double, relative to 1 + ‖p‖")),
        dbl.check("inverse-roundtrip-double", 1.0, "residual over 1e-12 (1 + ‖p‖) plus the rounding floor of H"),
    ]
}

fn jacobian_check(sys: &HenonSystem, cfg: &Config) -> Check {
    let mut rng = rng(cfg, 2);
    let b = sys.jacobian_parameter();
    let mut worst = Worst::new();
    let h = 1e-5;
    for _ in 0..10 {
        let p = Point2::new(in_disk(&mut rng, 1.0), in_disk(&mut rng, 1.0));
        let diff = |e: Point2| {
            let step = e.scale(C64::new(h, 0.0));
            (sys.apply(p + step) - sys.apply(p - step)).scale(C64::new(0.5 / h, 0.0))
        };
        let (cx, cy) = (diff(Point2::real(1.0, 0.0)), diff(Point2::real(0.0, 1.0)));
        let det = cx.x * cy.y - cy.x * cx.y;
        worst.push((det - b).norm() / b.norm(), || p.to_string());
    }
    worst.check("jacobian", 1e-6, format!("finite-difference det DH against b = {b}"))
}

// ----------------------------------------------------------------- potential

fn potential(cfg: &Config) -> Vec<Job<'_>> {
    let mut systems: Vec<(String, HenonSystem, Filtration)> = Vec::new();
    match system_of(cfg) {
        Ok((sys, filt)) => systems.push(("config".into(), sys, filt)),
        Err(e) => {
            let w = system_witness(cfg);
            return vec![Box::new(move || vec![Check::failed("system", w, format!("{e:#}"))])];
        }
    }
    for b in [0.1, 0.3] {
        let sys = quadratic_system(b);
        if systems.iter().all(|(_, s, _)| *s != sys) {
            let filt = Filtration::for_system(&sys).expect("y² − b x has a filtration");
            systems.push((format!("y²−{b}x"), sys, filt));
        }
    }
    let mut jobs: Vec<Job> = Vec::new();
    for (i, (label, sys, filt)) in systems.into_iter().enumerate() {
        let l2 = label.clone();
        let (s2, f2) = (sys.clone(), filt);
        jobs.push(job("functional-equations", move || Ok(functional_equations(&label, &sys, &filt, cfg, 10 + i as u64))));
        jobs.push(job("nonnegativity", move || Ok(vec![nonnegativity(&l2, &s2, &f2, cfg, 20 + i as u64)])));
    }
    jobs.push(job("boettcher-identity", move || Ok(vec![boettcher_identity(cfg)])));
    jobs.push(job("green-oracle", || Ok(vec![green_oracle()])));
    jobs.push(job("pullback-consistency", || Ok(vec![pullback_consistency()?])));
    jobs.push(job("green-minus", move || Ok(vec![green_minus_equation(cfg)])));
    jobs
}

/// Escaping starts `p` together with their first iterate `q` in `V⁺`.
fn escaping_samples(sys: &HenonSystem, filt: &Filtration, cfg: &Config, salt: u64) -> Vec<(Point2, Point2)> {
    let mut rng = rng(cfg, salt);
    let mut out = Vec::with_capacity(cfg.suite.samples);
    let r = 1.5 * filt.r;
    for _ in 0..50 * cfg.suite.samples.max(1) {
        if out.len() == cfg.suite.samples {
            break;
        }
        let p = Point2::new(in_disk(&mut rng, r), in_disk(&mut rng, r));
        let rec = classify_orbit(sys, filt, p, 200);
        if let OrbitClass::EnteredPlus { .. } = rec.class {
            out.push((p, rec.last()));
        }
    }
    out
}

fn functional_equations(label: &str, sys: &HenonSystem, filt: &Filtration, cfg: &Config, salt: u64) -> Vec<Check> {
    let samples = escaping_samples(sys, filt, cfg, salt);
    let d = sys.degree() as f64;
    let factors: Vec<(Polynomial, C64)> = sys.factors().iter().map(|f| (f.poly.clone(), f.b)).collect();
    let extended = cfg.precision == Precision::Extended;
    let green = |p: Point2| {
        if extended {
            green_plus_extended(&factors, p, 80)
        } else {
            green_plus(sys, filt, p, TOL, N_MAX).value
        }
    };
    let phi = |q: Point2| -> anyhow::Result<C64> {
        Ok(if extended { phi_plus_extended(&factors, q, 80) } else { phi_plus(sys, filt, q, TOL)?.value })
    };
    let (mut g_eq, mut phi_eq, mut modulus) = (Worst::new(), Worst::new(), Worst::new());
    for &(p, q) in &samples {
        let g = green(p);
        g_eq.push((green(sys.apply(p)) - d * g).abs(), || p.to_string());
        let (a, b) = match (phi(q), phi(sys.apply(q))) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                phi_eq.push(f64::NAN, || format!("{q}: {e}"));
                continue;
            }
        };
        let ad = a.powu(d as u32);
        phi_eq.push((b - ad).norm() / ad.norm(), || q.to_string());
        modulus.push((a.norm() * (-green(q)).exp() - 1.0).abs(), || q.to_string());
    }
    let n = samples.len();
    let enough = Check::holds(
        format!("escaping-samples[{label}]"),
        n == cfg.suite.samples,
        format!("seed {}", cfg.suite.seed),
        format!("{n} of {} escaping samples drawn", cfg.suite.samples),
    );
    vec![
        enough,
        g_eq.check(format!("green-functional-equation[{label}]"), 1e-9, "|G⁺(H p) − d G⁺(p)|"),
        phi_eq.check(format!("phi-functional-equation[{label}]"), 1e-8, "|φ⁺(H q) − φ⁺(q)^d| / |φ⁺(q)^d|"),
        modulus.check(format!("phi-modulus[{label}]"), 1e-8, "||φ⁺| e^{−G⁺} − 1|"),
    ]
}

/// `G⁺ ≥ 0` everywhere and `G⁺ = 0` on orbits that stay in `V` for 1000 steps.
fn nonnegativity(label: &str, sys: &HenonSystem, filt: &Filtration, cfg: &Config, salt: u64) -> Check {
    let mut rng = rng(cfg, salt);
    let mut worst = Worst::new();
    let mut stayed = 0;
    for _ in 0..cfg.suite.samples {
        let p = Point2::new(in_disk(&mut rng, filt.r), in_disk(&mut rng, filt.r));
        let g = green_plus(sys, filt, p, TOL, N_MAX).value;
        let bad = match classify_orbit(sys, filt, p, N_MAX).class {
            OrbitClass::StayedInV { .. } => {
                stayed += 1;
                g.abs()
            }
            _ => (-g).max(0.0),
        };
        worst.push(if g.is_nan() { f64::NAN } else { bad }, || p.to_string());
    }
    worst.check(format!("green-nonnegative[{label}]"), f64::MIN_POSITIVE, format!("{stayed} samples stayed in V"))
}

fn boettcher_identity(cfg: &Config) -> Check {
    let mut rng = rng(cfg, 3);
    let mut worst = Worst::new();
    for d in 2..=4 {
        let p = Polynomial::unicritical(d, C64::new(0.0, 0.0)).expect("z^d");
        for _ in 0..100 {
            let r = (1.1f64.ln() + (100f64.ln() - 1.1f64.ln()) * rng.random::<f64>()).exp();
            let z = C64::from_polar(r, TAU * rng.random::<f64>());
            let w = match cfg.precision {
                Precision::Extended => Ok(boettcher_1d_extended(&p, z, 40)),
                Precision::Double => boettcher_1d(&p, z, TOL).map(|v| v.value),
            };
            let res = w.map(|w| (w - z).norm() / z.norm()).unwrap_or(f64::NAN);
            worst.push(res, || format!("d = {d}, z = {z}"));
        }
    }
    worst.check("boettcher-identity", 1e-14, "|φ(z) − z| / |z| for z^d, d = 2, 3, 4, 1.1 < |z| < 100")
}

fn green_oracle() -> Check {
    let sys = quadratic_system(0.3);
    let filt = Filtration::for_system(&sys).expect("filtration");
    let p = Point2::real(0.0, 4.0);
    let g = green_plus(&sys, &filt, p, TOL, N_MAX).value;
    let oracle = green_plus_extended(&[(Polynomial::quadratic(0.0), C64::new(0.3, 0.0))], p, 60);
    let res = (g - oracle).abs().max((g - 1.385_110_487_737_812).abs());
    Check::bound("green-oracle", res, 1e-13, "y² − 0.3x at (0, 4)", format!("G⁺ = {g}, double-double {oracle}"))
}

fn pullback_consistency() -> anyhow::Result<Check> {
    let p = Polynomial::quadratic(-1.0);
    let mut worst = Worst::new();
    for z in [C64::new(2.0, 0.5), C64::new(-1.5, 1.2), C64::new(0.3, 1.9), C64::new(3.0, -2.0)] {
        let direct = boettcher_1d(&p, z, TOL)?.value;
        for k in 1..=3 {
            let pulled = boettcher_pullback(&p, z, k, TOL)?.value;
            worst.push((pulled - direct).norm(), || format!("z = {z}, k = {k}"));
        }
    }
    Ok(worst.check("pullback-consistency", 1e-9, "k-step pullback against the direct product, z² − 1"))
}

fn green_minus_equation(cfg: &Config) -> Check {
    let sys = quadratic_system(0.3);
    let filt = Filtration::for_system(&sys).expect("filtration");
    let mut rng = rng(cfg, 4);
    let mut worst = Worst::new();
    let d = sys.degree() as f64;
    let mut n = 0;
    for _ in 0..20 * cfg.suite.samples.max(1) {
        if n == cfg.suite.samples {
            break;
        }
        let p = Point2::new(in_disk(&mut rng, 1.5 * filt.r), in_disk(&mut rng, 1.5 * filt.r));
        if !matches!(classify_backward_orbit(&sys, &filt, p, 200).class, OrbitClass::EnteredMinus { .. }) {
            continue;
        }
        let q = sys.inverse(p).expect("invertible");
        let (g, gq) = (green_minus(&sys, &filt, p, TOL, N_MAX).value, green_minus(&sys, &filt, q, TOL, N_MAX).value);
        worst.push((gq - d * g).abs(), || p.to_string());
        n += 1;
    }
    worst.check("green-minus-functional-equation", 1e-9, format!("|G⁻(H⁻¹ p) − d G⁻(p)| on {n} samples of y² − 0.3x"))
}

// ------------------------------------------------------------------ solenoid

fn solenoid(cfg: &Config) -> Vec<Job<'_>> {
    let chart = match cfg.polynomial().and_then(|p| fixed_leaf(&p, cfg.b)) {
        Ok(c) => c,
        Err(e) => return vec![Box::new(move || vec![Check::failed("leaf", format!("b = {}", cfg.b), format!("{e:#}"))])],
    };
    let samples = leaf_samples(&chart, cfg, 5, 5, 0.02);
    let (c1, c2, c3) = (chart.clone(), chart.clone(), chart);
    let s1 = samples.clone();
    vec![
        job("coding", move || coding_checks(&c1, &s1)),
        job("root-of-unity", move || root_of_unity(&c2, &samples)),
        Box::new(fixed_point_checks),
        job("covering-degree", move || {
            let z = C64::new(0.2, 0.1);
            let k = covering_degree_probe(&c3, z, 6, 64, TOL)?;
            Ok(vec![Check::holds("covering-degree", k >= 1, z.to_string(), format!("lower bound k ≥ {k}"))])
        }),
    ]
}

/// Leaf parameters in an annulus with `G⁺ ∘ γ` above `g_min`.
fn leaf_samples(chart: &LeafChart, cfg: &Config, salt: u64, n: usize, g_min: f64) -> Vec<C64> {
    let mut rng = rng(cfg, salt);
    let r = chart.seed_radius().max(0.05);
    let mut out = Vec::new();
    for _ in 0..200 * n {
        if out.len() == n {
            break;
        }
        let z = in_annulus(&mut rng, 2.0 * r, 0.45);
        if chart.green(z, TOL).value > g_min {
            out.push(z);
        }
    }
    out
}

fn coding_checks(chart: &LeafChart, samples: &[C64]) -> anyhow::Result<Vec<Check>> {
    const T: usize = 6;
    let d = chart.degree() as f64;
    let (mut consistency, mut moduli, mut conj, mut forward) = (Worst::new(), Worst::new(), Worst::new(), Worst::new());
    for &z in samples {
        let w = code_window(chart, z, T, TOL)?;
        consistency.push(w.consistency(), || z.to_string());
        let g = chart.green(z, TOL).value;
        for t in -(T as i64)..=T as i64 {
            let expect = d.powi(t as i32) * g;
            moduli.push((w.at(t).norm().ln() - expect).abs() / expect, || format!("z = {z}, t = {t}"));
        }
        let hp = chart.map().apply(chart.eval(z));
        let z1 = chart.locate(hp, chart.lambda() * z)?;
        let w1 = code_window(chart, z1, T, TOL)?;
        let shifted = w.shift();
        for t in -(T as i64)..T as i64 {
            let (a, b) = (w1.at(t), shifted.at(t));
            conj.push((a - b).norm() / b.norm().max(1.0), || format!("z = {z}, t = {t}"));
        }
        // forward entries: direct product against the leaf continuation
        let m = chart.period();
        let mut p = chart.eval(z);
        for t in 0..=T {
            if chart.filtration().in_v_plus(p) && t % m == 0 {
                let direct = phi_plus(chart.map(), chart.filtration(), p, TOL)?.value;
                let leaf = solenoid_core::potential::extend_phi_plus(chart, z * chart.lambda().powi((t / m) as i32), TOL)?.value;
                forward.push((direct - leaf).norm() / direct.norm(), || format!("z = {z}, t = {t}"));
            }
            p = chart.map().apply(p);
        }
    }
    let witness = format!("{} leaf samples, T = {T}", samples.len());
    Ok(vec![
        Check::holds("coding-samples", samples.len() == 5, witness, "escaping leaf samples drawn"),
        consistency.check("window-consistency", 1e-10, "normalized z_{t+1} = z_t^d"),
        moduli.check("moduli-law", 1e-8, "|log|Φ_t| − d^t G⁺| / (d^t G⁺)"),
        conj.check("shift-conjugacy", 1e-8, "Φ(H p) against σ Φ(p), entrywise"),
        forward.check("forward-entries", 1e-9, "direct φ⁺ in V⁺ against the leaf continuation"),
    ])
}

fn root_of_unity(chart: &LeafChart, samples: &[C64]) -> anyhow::Result<Vec<Check>> {
    let (mut monotone, mut limit) = (Worst::new(), Worst::new());
    for &z in samples {
        let profile = code_window(chart, z, 6, TOL)?.root_of_unity_profile();
        let rises = profile.windows(2).map(|w| (w[1] - w[0]).max(0.0)).fold(0.0, f64::max);
        monotone.push(rises, || z.to_string());
        let tail = code_window(chart, z, 10, TOL)?.root_of_unity_profile();
        limit.push(*tail.last().expect("nonempty"), || z.to_string());
    }
    Ok(vec![
        monotone.check("root-of-unity-monotone", f64::MIN_POSITIVE, "largest increase of |z_t^{d−1} − 1| as t decreases, T = 6"),
        limit.check("root-of-unity-limit", 0.05, "|z_{−T}^{d−1} − 1| at T = 10"),
    ])
}

fn fixed_point_checks() -> Vec<Check> {
    let mut worst = Worst::new();
    for d in 2..=4 {
        let fps = solenoid_fixed_points(d);
        if fps.len() != d - 1 {
            worst.push(f64::INFINITY, || format!("d = {d}: {} fixed points", fps.len()));
        }
        for fp in fps {
            let w = SolenoidWindow::constant(d, 4, fp.s);
            let res = w.entries.iter().zip(&w.shift().entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            worst.push(res.max((fp.s.powu(d as u32 - 1) - 1.0).norm()), || format!("d = {d}, s = {}", fp.s));
        }
    }
    let mut shift = Worst::new();
    for (k, z0) in [C64::new(1.5, 0.5), C64::new(-2.0, 0.1), C64::new(0.2, 1.3)].into_iter().enumerate() {
        let w = SolenoidWindow::from_center(2 + k, 4, z0);
        shift.push(w.shift().consistency(), || format!("d = {}, z_0 = {z0}", 2 + k));
    }
    vec![
        worst.check("fixed-points", 1e-12, "s^{d−1} = 1 and shift invariance, d = 2, 3, 4"),
        shift.check("shift-consistency", 1e-12, "consistency of shifted windows"),
    ]
}

// ------------------------------------------------------------------- saddles

fn saddles(cfg: &Config) -> Vec<Job<'_>> {
    vec![
        job("closed-form-continuation", closed_form_continuation),
        job("reduction-jacobian", || Ok(vec![reduction_jacobian()])),
        job("linearization", move || linearization(cfg)),
        job("path-independence", path_independence),
        job("chart-convergence", chart_convergence),
        job("leaf-invariance", leaf_invariance),
        job("config-saddles", move || config_saddles(cfg)),
        job("periodic-orbits", periodic_orbits),
    ]
}

fn z_squared_fixed_one(b: f64) -> anyhow::Result<solenoid_core::SaddleOrbit2D> {
    let p = Polynomial::quadratic(0.0);
    let o = find_periodic_1d(&p, 1)?.into_iter().find(|o| o.is_repelling()).context("z² has a repelling fixed point")?;
    Ok(if b == 0.0 { reduction_saddle(&p, &o)? } else { continue_saddle(&p, &o, C64::new(b, 0.0), 30)? })
}

fn closed_form_continuation() -> anyhow::Result<Vec<Check>> {
    let s = z_squared_fixed_one(0.3)?;
    let q = s.q0();
    let pos = q.dist(&Point2::real(1.3, 1.3));
    let disc = (2.6f64 * 2.6 - 4.0 * 0.3).sqrt();
    let (l, m) = ((2.6 + disc) / 2.0, (2.6 - disc) / 2.0);
    let eig = (s.lambda - l).norm().max((s.mu - m).norm());
    Ok(vec![
        Check::bound("continued-point", pos, 1e-12, q.to_string(), "z², q' = 1 continued to b = 0.3 against (1.3, 1.3)"),
        Check::bound(
            "continued-eigenvalues",
            eig,
            1e-9,
            format!("λ = {}, μ = {}", s.lambda, s.mu),
            format!("against (2.6 ± √5.56)/2 = {l:.12}, {m:.12}"),
        ),
        Check::bound("eigen-residual", s.eigen_residual, 1e-8, "z², b = 0.3", "‖DH v − λ v‖"),
    ])
}

fn reduction_jacobian() -> Check {
    let map = FamilyMap::new(Polynomial::quadratic(0.0), C64::new(0.0, 0.0));
    let j = map.jacobian(Point2::real(1.0, 1.0));
    let o = C64::new(0.0, 0.0);
    let expect = [o, C64::new(1.0, 0.0), o, C64::new(2.0, 0.0)];
    let got = [j.m[0][0], j.m[0][1], j.m[1][0], j.m[1][1]];
    let mut res = got.iter().zip(&expect).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let mut ev = j.eigenvalues();
    ev.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    res = res.max(ev[0].norm()).max((ev[1] - 2.0).norm());
    Check::bound("reduction-jacobian", res, 1e-15, format!("{j:?}"), "DH₀ at (1, 1) is [[0, 1], [0, 2]] with eigenvalues 0 and 2")
}

fn linearization(cfg: &Config) -> anyhow::Result<Vec<Check>> {
    let chart = LeafChart::new(z_squared_fixed_one(0.3)?)?;
    let mut rng = rng(cfg, 6);
    let mut fe = Worst::new();
    for _ in 0..20 {
        let z = in_disk(&mut rng, 1.0);
        let lhs = chart.map().apply(chart.eval(z));
        fe.push(lhs.dist(&chart.eval(chart.lambda() * z)), || z.to_string());
    }
    let reduced = LeafChart::new(z_squared_fixed_one(0.0)?.normalized(EigenNormalization::SecondComponentOne))?;
    let mut closed = Worst::new();
    for z in [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
        let expect = Point2::new((z / 2.0).exp(), z.exp());
        closed.push(reduced.eval(z).dist(&expect), || z.to_string());
    }
    Ok(vec![
        fe.check("linearization-functional-equation", 1e-8, "‖H(γ(z)) − γ(λ z)‖ on 20 unit-disk samples, z², b = 0.3"),
        closed.check("reduction-closed-form", 1e-8, "γ against (e^{z/2}, e^z) at b = 0"),
    ])
}

fn path_independence() -> anyhow::Result<Vec<Check>> {
    let p = Polynomial::quadratic(-1.0);
    let mut worst = Worst::new();
    for m in 1..=2 {
        for o in find_periodic_1d(&p, m)?.into_iter().filter(|o| o.is_repelling()) {
            let far = continue_saddle(&p, &o, C64::new(0.1, 0.0), 20)?;
            let back = continue_from(&far, C64::new(0.05, 0.0), 10)?;
            let direct = continue_saddle(&p, &o, C64::new(0.05, 0.0), 10)?;
            let res = back.points.iter().zip(&direct.points).map(|(a, b)| a.dist(b)).fold(0.0, f64::max);
            worst.push(res, || format!("z² − 1, orbit through {}", o.points[0]));
        }
    }
    Ok(vec![worst.check("path-independence", 1e-9, "b = 0 → 0.1 → 0.05 against b = 0 → 0.05")])
}

/// `‖γ_n − γ_{n+2}‖` shrinks by about `|λ|^{−2}` from `n` to `n + 2` until rounding takes over.
fn chart_convergence() -> anyhow::Result<Vec<Check>> {
    let s = z_squared_fixed_one(0.3)?;
    let map = s.map();
    let z = C64::new(0.8, 0.3);
    let gamma = |n: usize| map.iterate(s.q0() + s.v.scale(z / s.lambda.powi(n as i32)), s.period * n);
    let diffs: Vec<f64> = (2..30).map(|n| gamma(n).dist(&gamma(n + 2))).collect();
    let bound = 1.5 / s.lambda.norm_sqr();
    // the seed's rounding error grows like |λ|^n under the push-forward
    let floor = |n: usize| 1e3 * f64::EPSILON * s.lambda.norm().powi(n as i32) * (1.0 + s.q0().norm());
    let mut worst = Worst::new();
    let mut judged = 0;
    for (k, w) in diffs.windows(3).enumerate() {
        let n = k + 4;
        if w[2] > floor(n + 2) {
            judged += 1;
            worst.push(w[2] / w[0] / bound, || format!("n = {n}: {:.3e} after {:.3e}", w[2], w[0]));
        }
    }
    if judged < 4 {
        worst.push(f64::NAN, || format!("only {judged} ratios above the rounding floor"));
    }
    Ok(vec![worst.check("chart-convergence", 1.0, format!("successive ratios over 1.5 |λ|^−2 = {bound:.4}"))])
}

fn leaf_invariance() -> anyhow::Result<Vec<Check>> {
    let chart = LeafChart::new(z_squared_fixed_one(0.3)?)?;
    let mut worst = Worst::new();
    for k in 0..10 {
        let z = C64::from_polar(0.3 + 0.05 * k as f64, 0.9 * k as f64);
        let image = chart.map().apply(chart.eval(z));
        let res = match chart.locate(image, chart.lambda() * z) {
            Ok(w) => (w - chart.lambda() * z).norm(),
            Err(_) => f64::NAN,
        };
        worst.push(res, || z.to_string());
    }
    Ok(vec![worst.check("leaf-invariance", 1e-6, "γ⁻¹(H γ(z)) against λ z at 10 points")])
}

/// Every repelling orbit of period ≤ 2 of the configured `P`, continued to the configured `b`.
fn config_saddles(cfg: &Config) -> anyhow::Result<Vec<Check>> {
    let p = cfg.polynomial()?;
    let mut eig = Worst::new();
    let mut orbit = Worst::new();
    let mut n = 0;
    for m in 1..=2 {
        for o in find_periodic_1d(&p, m)?.into_iter().filter(|o| o.is_repelling()) {
            match continue_saddle(&p, &o, cfg.b, 40) {
                Ok(s) => {
                    n += 1;
                    eig.push(s.eigen_residual, || format!("orbit through {}", o.points[0]));
                    orbit.push(s.orbit_residual, || format!("orbit through {}", o.points[0]));
                }
                Err(e) => eig.push(f64::NAN, || format!("orbit through {}: {e}", o.points[0])),
            }
        }
    }
    Ok(vec![
        eig.check("config-eigen-residual", 1e-8, format!("{n} saddles of period ≤ 2 at b = {}", cfg.b)),
        orbit.check("config-orbit-residual", 1e-10, "‖H(q_k) − q_{k+1}‖"),
    ])
}

fn periodic_orbits() -> anyhow::Result<Vec<Check>> {
    let p = Polynomial::quadratic(-1.0);
    let mut gap = Worst::new();
    let mut counts = Vec::new();
    for m in 1..=4 {
        let orbits = find_periodic_1d(&p, m)?;
        counts.push(orbits.len());
        for o in &orbits {
            gap.push(o.product_form_gap, || format!("period {m} through {}", o.points[0]));
            for k in 0..m {
                let res = (p.eval(o.points[k]) - o.points[(k + 1) % m]).norm();
                gap.push(res, || format!("period {m} through {}", o.points[0]));
            }
        }
    }
    Ok(vec![
        Check::holds("periodic-orbit-count", counts == [2, 1, 2, 3], format!("{counts:?}"), "orbits of exact period 1..4 for z² − 1"),
        gap.check("periodic-orbit-residual", 1e-8, "cycle closure and multiplier forms"),
    ])
}

// ---------------------------------------------------------------------- rays

fn angle_orbits(max_period: usize) -> Vec<AngleOrbit> {
    (1..=max_period).flat_map(|k| periodic_angles(2, k)).collect()
}

fn rays(cfg: &Config) -> Vec<Job<'_>> {
    vec![
        job("basilica-landing", basilica_landing),
        job("circle-landing", circle_landing),
        job("ray-monotonicity", ray_monotonicity),
        job("landing-robustness", landing_robustness),
        job("identifications[config]", move || {
            Ok(vec![identifications("identifications[config]", &cfg.polynomial()?, cfg.b)])
        }),
        job("identifications[z²−1, b=0.05]", || {
            Ok(vec![identifications("identifications[z²−1, b=0.05]", &Polynomial::quadratic(-1.0), C64::new(0.05, 0.0))])
        }),
        job("zero-ray-uniqueness", move || zero_ray_uniqueness(cfg)),
    ]
}

fn basilica_landing() -> anyhow::Result<Vec<Check>> {
    let p = Polynomial::quadratic(-1.0);
    let s5 = 5f64.sqrt();
    let (beta, alpha) = (C64::new((1.0 + s5) / 2.0, 0.0), C64::new((1.0 - s5) / 2.0, 0.0));
    let opts = RayOptions::default();
    let mut worst = Worst::new();
    for (angle, target) in [(ExternalAngle::rational(0, 1), beta), (ExternalAngle::rational(1, 3), alpha), (ExternalAngle::rational(2, 3), alpha)] {
        let trace = trace_ray_1d(&p, &angle, &opts)?;
        let res = trace.landing.as_ref().map_or(f64::NAN, |l| (l.point - target).norm());
        worst.push(res, || format!("angle {angle}"));
    }
    let (partition, _) = detect_identifications(&p, &angle_orbits(2), &opts, 1e-4)?;
    let zero = ExternalAngle::rational(0, 1).to_string();
    let (a, b) = (ExternalAngle::rational(1, 3).to_string(), ExternalAngle::rational(2, 3).to_string());
    let expect = vec![vec![zero], vec![a, b]];
    let labels = partition.labels();
    Ok(vec![
        worst.check("basilica-landing", 1e-6, "rays 0, 1/3, 2/3 of z² − 1 against β, α, α"),
        Check::holds("basilica-partition", labels == expect, format!("{labels:?}"), "{{0}, {1/3, 2/3}}"),
    ])
}

fn circle_landing() -> anyhow::Result<Vec<Check>> {
    let p = Polynomial::quadratic(0.0);
    let mut worst = Worst::new();
    let mut points = Vec::new();
    for orbit in angle_orbits(2) {
        for angle in orbit.external() {
            let trace = trace_ray_1d(&p, &angle, &RayOptions::default())?;
            let target = C64::from_polar(1.0, TAU * angle.turns());
            let res = trace.landing.as_ref().map_or(f64::NAN, |l| (l.point - target).norm());
            worst.push(res, || format!("angle {angle}"));
            points.push(target);
        }
    }
    let mut sep = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            sep = sep.min((a - b).norm());
        }
    }
    Ok(vec![
        worst.check("circle-landing", 1e-6, "rays of period ≤ 2 for z² land at e^{2πiθ}"),
        Check::holds("circle-distinct", sep > 0.1, format!("min separation {sep}"), "landing points are distinct"),
    ])
}

fn ray_monotonicity() -> anyhow::Result<Vec<Check>> {
    let p = Polynomial::quadratic(-1.0);
    let mut decrease = Worst::new();
    let mut argument = Worst::new();
    for angle in [ExternalAngle::rational(1, 3), ExternalAngle::rational(1, 7), ExternalAngle::Turns(0.1234)] {
        let trace = trace_ray_1d(&p, &angle, &RayOptions::default())?;
        for w in trace.samples.windows(2) {
            if !(w[1].g < w[0].g) {
                decrease.push(1.0, || format!("angle {angle} at g = {}", w[1].g));
            }
        }
        for s in trace.samples.iter().filter(|s| s.g > 1e-3) {
            let phi = boettcher_1d(&p, s.z, TOL)?.value;
            let diff = ((phi.arg() - TAU * angle.turns() + PI).rem_euclid(TAU) - PI).abs();
            argument.push(diff, || format!("angle {angle} at g = {}", s.g));
        }
    }
    Ok(vec![
        decrease.check("ray-potential-decreasing", 0.5, "potentials along each trace strictly decrease"),
        argument.check("ray-argument-constant", 1e-8, "|arg φ − 2πθ| along traces, g > 1e−3"),
    ])
}

fn landing_robustness() -> anyhow::Result<Vec<Check>> {
    let p = Polynomial::quadratic(-1.0);
    let mut worst = Worst::new();
    for angle in [ExternalAngle::rational(0, 1), ExternalAngle::rational(1, 3), ExternalAngle::rational(1, 7)] {
        let coarse = trace_ray_1d(&p, &angle, &RayOptions::default())?;
        let fine = trace_ray_1d(&p, &angle, &RayOptions { step: 0.25, ..RayOptions::default() })?;
        let res = match (coarse.landing, fine.landing) {
            (Some(a), Some(b)) => (a.point - b.point).norm() / (10.0 * a.tail_bound.max(1e-15)),
            _ => f64::NAN,
        };
        worst.push(res, || format!("angle {angle}"));
    }
    Ok(vec![worst.check("landing-robustness", 1.0, "half-step landing shift over 10× the tail bound")])
}

fn identifications(name: &str, poly: &Polynomial, b: C64) -> Check {
    match compare_identifications(poly, b, &angle_orbits(2), &CompareOptions::default()) {
        Ok(rep) => {
            let single = rep.ray_counts.iter().all(|(_, n)| *n == 1);
            // attracting cycles are skipped: no ray lands on them
            Check::holds(
                name,
                rep.matched && single,
                format!("P = {:?}, b = {b}; witnesses {:?}", poly.coeffs(), rep.witnesses),
                format!(
                    "one-variable {:?}, Hénon {:?}, landing shift {:.3e}, skipped {:?}",
                    rep.one_dim.labels(),
                    rep.henon.labels(),
                    rep.max_landing_shift,
                    rep.skipped_orbits
                ),
            )
        }
        Err(e) => Check::failed(name, format!("P = {:?}, b = {b}", poly.coeffs()), e),
    }
}

/// The θ = 0 ray on the leaf of its landing fixed point is unique.
fn zero_ray_uniqueness(cfg: &Config) -> anyhow::Result<Vec<Check>> {
    let p = cfg.polynomial()?;
    let chart = fixed_leaf(&p, cfg.b)?;
    let rays = leaf_rays_at_saddle(&chart, &ExternalAngle::rational(0, 1), &LeafRaySearch::default())?;
    Ok(vec![Check::holds(
        "zero-ray-uniqueness",
        rays.len() == 1,
        format!("saddle {} at b = {}", chart.saddle().q0(), cfg.b),
        format!("{} distinct θ = 0 rays from all seeds", rays.len()),
    )])
}

// ------------------------------------------------------------------- motions

fn motions(cfg: &Config) -> Vec<Job<'_>> {
    vec![
        job("one-variable-motion", move || one_variable_motion(cfg)),
        job("identity-motion", identity_motion),
        job("leaf-motion", move || leaf_motion(cfg)),
    ]
}

fn one_variable_motion(cfg: &Config) -> anyhow::Result<Vec<Check>> {
    let (p0, p1) = (Polynomial::quadratic(0.0), Polynomial::quadratic(-0.2));
    let mut rng = rng(cfg, 8);
    let samples: Vec<C64> = (0..50).map(|_| in_annulus(&mut rng, 0.06f64.exp(), 3.0)).collect();
    let c = check_motion_1d(&p0, &p1, &samples, TOL)?;
    Ok(vec![
        Check::bound("one-variable-conjugacy", c.max_conjugacy_residual, 1e-7, c.conjugacy_witness.to_string(), "ψ(P₀ z) − P₁(ψ z), c: 0 → −0.2, 50 samples"),
        Check::bound("one-variable-identity", c.max_identity_residual, 1e-9, c.identity_witness.to_string(), "φ₁(ψ z) − φ₀(z)"),
        Check::bound("one-variable-potential", c.max_potential_residual, 1e-8, c.potential_witness.to_string(), "G₁(ψ z) − G₀(z)"),
    ])
}

fn identity_motion() -> anyhow::Result<Vec<Check>> {
    let p = Polynomial::quadratic(-0.2);
    let mut worst = Worst::new();
    for z in [C64::new(2.0, 0.5), C64::new(-0.3, 1.4), C64::new(0.0, -3.0)] {
        worst.push((solenoid_core::rays::motion_psi_1d(&p, &p, z, TOL)? - z).norm(), || z.to_string());
    }
    Ok(vec![worst.check("identity-motion", 1e-10, "ψ = id when P₀ = P₁")])
}

fn leaf_motion(cfg: &Config) -> anyhow::Result<Vec<Check>> {
    let p = Polynomial::quadratic(0.0);
    let (c0, c1) = (fixed_leaf(&p, C64::new(0.2, 0.0))?, fixed_leaf(&p, C64::new(0.3, 0.0))?);
    let samples = leaf_samples(&c0, cfg, 9, 20, 0.01);
    let c = check_motion_leaf(&c0, &c1, &samples, TOL)?;
    Ok(vec![
        Check::holds("leaf-samples", samples.len() == 20, format!("seed {}", cfg.suite.seed), format!("{} escaping leaf samples", samples.len())),
        Check::bound("leaf-conjugacy", c.max_conjugacy_residual, 1e-6, c.conjugacy_witness.to_string(), "Ψ(λ₀ z) − λ₁ Ψ(z), z², b: 0.2 → 0.3"),
        Check::bound("leaf-potential", c.max_potential_residual, 1e-7, c.potential_witness.to_string(), "G⁺₁(γ₁ Ψ z) − G⁺₀(γ₀ z)"),
        Check::bound("leaf-identity", c.max_identity_residual, 1e-8, c.identity_witness.to_string(), "f₁(Ψ z) − f₀(z)"),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope", &Config::default()).is_err());
    }

    #[test]
    fn corrupted_system_fails_with_a_witness() {
        let mut cfg = Config::default();
        cfg.system = Some(solenoid_core::io::SystemFile::from_json(r#"{"factors":[{"coeffs":[[0,0],[0,0],[1,0]],"b":[0.3,0]}],"R":0.01}"#).unwrap());
        let r = run_suite("filtration", &cfg).unwrap();
        assert!(!r.passed);
        assert!(r.failures().all(|c| c.witness.is_some()));
    }

    #[test]
    fn saddle_suite_passes() {
        let r = run_suite("saddles", &Config::default()).unwrap();
        assert!(r.passed, "{}", r.to_json());
    }
}
