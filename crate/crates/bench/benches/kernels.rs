use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64 as C64;
use solenoid_cli::config::Config;
use solenoid_cli::render::render_with_threads;
use solenoid_core::potential::{boettcher_1d, green_plus, phi_plus};
use solenoid_core::rays::{trace_ray_1d, ExternalAngle, RayOptions};
use solenoid_core::saddles::{continue_saddle, find_periodic_1d};
use solenoid_core::{Filtration, HenonSystem, LeafChart, Point2, Polynomial};

fn potentials(c: &mut Criterion) {
    let sys = HenonSystem::quadratic(0.0, 0.3).unwrap();
    let filt = Filtration::for_system(&sys).unwrap();
    let p = Point2::new(C64::new(0.4, 0.2), C64::new(2.5, -1.0));
    c.bench_function("green_plus", |b| b.iter(|| green_plus(&sys, &filt, black_box(p), 1e-15, 1000)));
    c.bench_function("phi_plus", |b| b.iter(|| phi_plus(&sys, &filt, black_box(p), 1e-15)));
    let basilica = Polynomial::quadratic(-1.0);
    c.bench_function("boettcher_1d near J", |b| b.iter(|| boettcher_1d(&basilica, black_box(C64::new(0.2, 0.9)), 1e-15)));
}

fn rays_and_saddles(c: &mut Criterion) {
    let p = Polynomial::quadratic(-1.0);
    let angle = ExternalAngle::rational(1, 3);
    let opts = RayOptions::default();
    c.bench_function("trace_ray_1d 1/3", |b| b.iter(|| trace_ray_1d(&p, black_box(&angle), &opts)));

    let z2 = Polynomial::quadratic(0.0);
    let orbit = find_periodic_1d(&z2, 1).unwrap().into_iter().find(|o| o.is_repelling()).unwrap();
    let s = continue_saddle(&z2, &orbit, C64::new(0.3, 0.0), 30).unwrap();
    c.bench_function("continue_saddle", |b| b.iter(|| continue_saddle(&z2, black_box(&orbit), C64::new(0.3, 0.0), 30)));
    let chart = LeafChart::new(s).unwrap();
    c.bench_function("leaf chart eval", |b| b.iter(|| chart.eval(black_box(C64::new(0.7, 0.4)))));
}

fn renders(c: &mut Criterion) {
    let mut cfg = Config::default();
    cfg.render.width = 128;
    cfg.render.height = 128;
    let mut g = c.benchmark_group("render 128²");
    g.sample_size(10);
    g.bench_function("slice", |b| b.iter(|| render_with_threads(&cfg.render, &cfg, 1)));
    g.finish();
}

criterion_group!(benches, potentials, rays_and_saddles, renders);
criterion_main!(benches);
