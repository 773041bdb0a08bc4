//! Data dumps in the core file formats.

use anyhow::Context;
use num_complex::Complex64 as C64;
use solenoid_core::io::{window_to_json, write_green_csv, write_ray_csv};
use solenoid_core::rays::{trace_ray_1d, trace_ray_leaf, RayOptions, RayTrace};
use solenoid_core::saddles::{continue_from, continue_saddle, find_periodic_1d};
use solenoid_core::solenoid::code_window;
use solenoid_core::{Point2, SaddleOrbit2D, SolenoidWindow};

use crate::config::{parse_angle, Config};
use crate::render::{saddle_chart, system_of};

const TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DumpKind {
    Ray,
    Coding,
    Saddle,
    GreenGrid,
}

pub fn dump(kind: DumpKind, cfg: &Config) -> anyhow::Result<Vec<u8>> {
    let mut out = Vec::new();
    match kind {
        DumpKind::Ray => write_ray_csv(&mut out, &ray(cfg)?)?,
        DumpKind::Coding => {
            out = window_to_json(&coding(cfg)?).into_bytes();
            out.push(b'\n');
        }
        DumpKind::Saddle => {
            out = serde_json::to_vec_pretty(&saddle(cfg)?)?;
            out.push(b'\n');
        }
        DumpKind::GreenGrid => {
            let (sys, filt) = system_of(cfg)?;
            let grid = cfg.dump.grid;
            let points: Vec<Point2> = (0..grid.height)
                .flat_map(|row| (0..grid.width).map(move |col| grid.point(col, row)))
                .map(|y| Point2::new(cfg.render.slice, y))
                .collect();
            write_green_csv(&mut out, &sys, &filt, &points, TOL)?;
        }
    }
    Ok(out)
}

/// The ray of angle `dump.theta`: in one variable, or on the saddle leaf when `dump.leaf`.
pub fn ray(cfg: &Config) -> anyhow::Result<RayTrace> {
    let angle = parse_angle(&cfg.dump.theta)?;
    let opts = RayOptions { g_start: cfg.dump.g_start, g_stop: cfg.dump.g_stop, ..RayOptions::default() };
    if cfg.dump.leaf {
        let chart = saddle_chart(cfg, cfg.dump.near, cfg.dump.period)?;
        Ok(trace_ray_leaf(&chart, &angle, cfg.dump.point, &opts)?)
    } else {
        Ok(trace_ray_1d(&cfg.polynomial()?, &angle, &opts)?)
    }
}

/// Coding window of the leaf point `dump.point` with half-width `dump.T`.
pub fn coding(cfg: &Config) -> anyhow::Result<SolenoidWindow> {
    let chart = saddle_chart(cfg, cfg.dump.near, cfg.dump.period)?;
    Ok(code_window(&chart, cfg.dump.point, cfg.dump.t, TOL)?)
}

/// Saddle orbit of period `dump.period` nearest `dump.near`, continued `b_from → b`.
pub fn saddle(cfg: &Config) -> anyhow::Result<SaddleOrbit2D> {
    let poly = cfg.polynomial()?;
    let near = cfg.dump.near;
    let (orbit, j) = find_periodic_1d(&poly, cfg.dump.period)?
        .into_iter()
        .filter(|o| o.is_repelling())
        .flat_map(|o| (0..o.period).map(move |j| (o.clone(), j)))
        .min_by(|a, b| (a.0.points[a.1] - near).norm().total_cmp(&(b.0.points[b.1] - near).norm()))
        .with_context(|| format!("no repelling orbit of period {}", cfg.dump.period))?;
    let steps = cfg.dump.steps.max(1);
    let s = if cfg.dump.b_from == C64::new(0.0, 0.0) {
        continue_saddle(&poly, &orbit, cfg.b, steps)?
    } else {
        let start = continue_saddle(&poly, &orbit, cfg.dump.b_from, steps)?;
        continue_from(&start, cfg.b, steps)?
    };
    Ok(s.rotated(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use solenoid_core::io::{read_csv, window_from_json};

    #[test]
    fn ray_csv_has_decreasing_potentials() {
        let mut cfg = Config::default();
        cfg.set_quadratic(C64::new(-1.0, 0.0));
        let (header, rows) = read_csv(&dump(DumpKind::Ray, &cfg).unwrap()[..]).unwrap();
        assert_eq!(header, ["g", "theta", "z_re", "z_im"]);
        assert!(rows.windows(2).all(|w| w[1][0] < w[0][0]));
    }

    #[test]
    fn coding_reloads_consistently() {
        let text = String::from_utf8(dump(DumpKind::Coding, &Config::default()).unwrap()).unwrap();
        let w = window_from_json(&text).unwrap();
        assert_eq!((w.d, w.t), (2, 6));
        assert!(w.consistency() < 1e-10);
    }

    #[test]
    fn saddle_dump_reloads() {
        let bytes = dump(DumpKind::Saddle, &Config::default()).unwrap();
        let s: SaddleOrbit2D = serde_json::from_slice(&bytes).unwrap();
        assert!(s.eigen_residual < 1e-8);
        assert!(s.q0().dist(&Point2::real(1.3, 1.3)) < 1e-12);
    }

    #[test]
    fn green_grid_header() {
        let (header, rows) = read_csv(&dump(DumpKind::GreenGrid, &Config::default()).unwrap()[..]).unwrap();
        assert_eq!(header, solenoid_core::io::GREEN_HEADER);
        assert_eq!(rows.len(), 256);
        assert!(rows.iter().all(|r| r[4] >= 0.0));
    }
}
