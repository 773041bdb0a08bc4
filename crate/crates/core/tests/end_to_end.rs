use solenoid_core::rays::{
    check_motion_1d, compare_identifications, periodic_angles, trace_ray_1d, CompareOptions, ExternalAngle, RayOptions,
};
use solenoid_core::saddles::{continue_saddle, find_periodic_1d};
use solenoid_core::solenoid::code_window;
use solenoid_core::{LeafChart, PlaneMap, Polynomial, C64};

fn fixed_leaf(b: f64) -> LeafChart {
    let p = Polynomial::quadratic(0.0);
    let o = find_periodic_1d(&p, 1).unwrap().into_iter().find(|o| o.is_repelling()).unwrap();
    LeafChart::new(continue_saddle(&p, &o, C64::new(b, 0.0), 30).unwrap()).unwrap()
}

#[test]
fn halving_the_step_keeps_the_landing_point() {
    let p = Polynomial::quadratic(-1.0);
    let a = ExternalAngle::rational(1, 3);
    let coarse = trace_ray_1d(&p, &a, &RayOptions::default()).unwrap();
    let fine = trace_ray_1d(&p, &a, &RayOptions { step: 0.25, ..RayOptions::default() }).unwrap();
    let (lc, lf) = (coarse.landing.unwrap(), fine.landing.unwrap());
    assert!((lc.point - lf.point).norm() <= 10.0 * lc.tail_bound.max(1e-15));
}

#[test]
fn circle_and_basilica_identifications_persist() {
    let orbits: Vec<_> = (1..=2).flat_map(|k| periodic_angles(2, k)).collect();
    for (c, b, classes) in [(-1.0, 0.05, 2), (0.0, 0.3, 3)] {
        let rep = compare_identifications(&Polynomial::quadratic(c), C64::new(b, 0.0), &orbits, &CompareOptions::default()).unwrap();
        assert!(rep.matched, "{rep:?}");
        assert_eq!(rep.henon.classes.len(), classes);
        assert!(rep.ray_counts.iter().all(|(_, n)| *n == 1));
    }
}

#[test]
fn one_variable_motion_along_the_main_cardioid() {
    let (p0, p1) = (Polynomial::quadratic(0.0), Polynomial::quadratic(-0.2));
    let samples: Vec<C64> = (0..20).map(|k| C64::from_polar(1.06 + 0.1 * k as f64, 2.399 * k as f64)).collect();
    let check = check_motion_1d(&p0, &p1, &samples, 1e-15).unwrap();
    assert_eq!(check.samples, 20);
    assert!(check.max_conjugacy_residual < 1e-7, "{check:?}");
}

#[test]
fn coding_conjugates_the_map_to_the_shift() {
    let chart = fixed_leaf(0.3);
    let z = C64::new(0.2, 0.1);
    let w = code_window(&chart, z, 6, 1e-15).unwrap();
    let hp = chart.map().apply(chart.eval(z));
    let z1 = chart.locate(hp, chart.lambda() * z).unwrap();
    let w1 = code_window(&chart, z1, 6, 1e-15).unwrap();
    let shifted = w.shift();
    for t in -6..6i64 {
        let (a, b) = (w1.at(t), shifted.at(t));
        assert!((a - b).norm() < 1e-8 * b.norm().max(1.0), "t = {t}: {a} vs {b}");
    }
}
