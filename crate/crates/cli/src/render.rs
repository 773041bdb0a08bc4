use anyhow::{bail, Context};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use solenoid_core::potential::{green_1d, green_plus};
use solenoid_core::saddles::{continue_saddle, find_periodic_1d};
use solenoid_core::{Filtration, GridSpec, HenonSystem, LeafChart, Point2};

use crate::config::{ColorMap, Config, RenderSpec, Target};

const GREEN_TOL: f64 = 1e-12;

/// 8-bit raster, one (PGM) or three (PPM) channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<u8>,
}

impl Image {
    /// Binary PNM: `P5` for gray, `P6` for color, maxval 255.
    pub fn to_pnm(&self) -> Vec<u8> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        let mut out = format!("{magic}\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn extension(&self) -> &'static str {
        if self.channels == 1 {
            "pgm"
        } else {
            "ppm"
        }
    }
}

/// Gamma-mapped potential: 0 on the filled set, toward 255 far out.
fn shade(g: f64) -> u8 {
    if !(g > 0.0) {
        return 0;
    }
    (255.0 * (g / (1.0 + g)).powf(0.45)).round().clamp(1.0, 255.0) as u8
}

/// Evaluate `f` on every pixel, rows in parallel, row-major.
fn sample_grid<F>(grid: &GridSpec, f: F) -> Vec<f64>
where
    F: Fn(C64) -> f64 + Sync,
{
    let mut out = vec![0.0; grid.width * grid.height];
    out.par_chunks_mut(grid.width).enumerate().for_each(|(row, chunk)| {
        for (col, v) in chunk.iter_mut().enumerate() {
            *v = f(grid.point(col, row));
        }
    });
    out
}

fn colorize(values: &[f64], width: usize, height: usize, map: ColorMap) -> Image {
    match map {
        ColorMap::Potential => Image { width, height, channels: 1, data: values.iter().map(|&g| shade(g)).collect() },
        ColorMap::Escape => {
            let inside = |i: usize| !(values[i] > 0.0);
            let mut data = Vec::with_capacity(3 * values.len());
            for row in 0..height {
                for col in 0..width {
                    let i = row * width + col;
                    let rgb = if !inside(i) {
                        [255, 255, 255]
                    } else {
                        let edge = (col > 0 && !inside(i - 1))
                            || (col + 1 < width && !inside(i + 1))
                            || (row > 0 && !inside(i - width))
                            || (row + 1 < height && !inside(i + width));
                        if edge {
                            [255, 0, 0]
                        } else {
                            [0, 0, 0]
                        }
                    };
                    data.extend_from_slice(&rgb);
                }
            }
            Image { width, height, channels: 3, data }
        }
    }
}

/// The configured system with its filtration: the `system` entry, else `(y, P(y) − b x)`.
pub fn system_of(cfg: &Config) -> anyhow::Result<(HenonSystem, Filtration)> {
    match &cfg.system {
        Some(file) => Ok(file.load()?),
        None => {
            let sys = HenonSystem::single(cfg.polynomial()?, cfg.b)?;
            let filt = Filtration::for_system(&sys)?;
            Ok((sys, filt))
        }
    }
}

/// Chart of the saddle of period `period` whose first point is nearest `near`,
/// continued from `b = 0` to the configured `b`.
pub fn saddle_chart(cfg: &Config, near: C64, period: usize) -> anyhow::Result<LeafChart> {
    let poly = cfg.polynomial()?;
    let orbit = find_periodic_1d(&poly, period)?
        .into_iter()
        .filter(|o| o.is_repelling())
        .flat_map(|o| (0..o.period).map(move |j| (o.clone(), j)))
        .min_by(|a, b| (a.0.points[a.1] - near).norm().total_cmp(&(b.0.points[b.1] - near).norm()))
        .with_context(|| format!("no repelling orbit of period {period}"))?;
    let saddle = continue_saddle(&poly, &orbit.0, cfg.b, 40)?.rotated(orbit.1);
    Ok(LeafChart::new(saddle)?)
}

/// Accumulate `π_y γ(z)` over the boundary of the zero set of `G⁺ ∘ γ` on the leaf grid.
fn projection_counts(chart: &LeafChart, leaf: &GridSpec, spec: &RenderSpec) -> Vec<f64> {
    let zero = sample_grid(leaf, |z| chart.green_with_budget(z, GREEN_TOL, spec.budget).value);
    let image = spec.grid();
    let hits: Vec<Vec<usize>> = (0..leaf.height)
        .into_par_iter()
        .map(|row| {
            let mut out = Vec::new();
            for col in 0..leaf.width {
                let i = row * leaf.width + col;
                if zero[i] > 0.0 {
                    continue;
                }
                let edge = (col > 0 && zero[i - 1] > 0.0)
                    || (col + 1 < leaf.width && zero[i + 1] > 0.0)
                    || (row > 0 && zero[i - leaf.width] > 0.0)
                    || (row + 1 < leaf.height && zero[i + leaf.width] > 0.0);
                if !edge {
                    continue;
                }
                let y = chart.eval(leaf.point(col, row)).y;
                let fx = (y.re - image.re[0]) / (image.re[1] - image.re[0]);
                let fy = (image.im[1] - y.im) / (image.im[1] - image.im[0]);
                if (0.0..1.0).contains(&fx) && (0.0..1.0).contains(&fy) {
                    out.push((fy * image.height as f64) as usize * image.width + (fx * image.width as f64) as usize);
                }
            }
            out
        })
        .collect();
    let mut counts = vec![0.0; image.width * image.height];
    for i in hits.into_iter().flatten() {
        counts[i] += 1.0;
    }
    counts
}

/// Render on the current rayon pool.
pub fn render(spec: &RenderSpec, cfg: &Config) -> anyhow::Result<Image> {
    let values = render_values(spec, cfg)?;
    let (w, h) = (spec.width, spec.height);
    if spec.target != Target::JuliaProjection {
        return Ok(colorize(&values, w, h, spec.colormap));
    }
    // hit counts: empty pixels play the role of escaping ones
    Ok(match spec.colormap {
        ColorMap::Escape => {
            let empty: Vec<f64> = values.iter().map(|&c| if c > 0.0 { 0.0 } else { 1.0 }).collect();
            colorize(&empty, w, h, ColorMap::Escape)
        }
        ColorMap::Potential => {
            // dark on white: one hit is mid-gray, dense strands go black
            let gray = |c: f64| if c > 0.0 { (160.0 * (1.0 - (c.ln() / 6.0).min(1.0))).round() as u8 } else { 255 };
            Image { width: w, height: h, channels: 1, data: values.iter().map(|&c| gray(c)).collect() }
        }
    })
}

/// Render on a dedicated pool of `threads` workers.
pub fn render_with_threads(spec: &RenderSpec, cfg: &Config, threads: usize) -> anyhow::Result<Image> {
    if threads == 0 {
        bail!("thread count must be positive");
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    pool.install(|| render(spec, cfg))
}

/// Raw `G` samples of a render target (potential values before shading).
pub fn render_values(spec: &RenderSpec, cfg: &Config) -> anyhow::Result<Vec<f64>> {
    spec.validate()?;
    let grid = spec.grid();
    Ok(match spec.target {
        Target::OneDJulia => {
            let poly = cfg.polynomial()?;
            sample_grid(&grid, |z| green_1d(&poly, z, GREEN_TOL, spec.budget).value)
        }
        Target::KplusSlice => {
            let (sys, filt) = system_of(cfg)?;
            sample_grid(&grid, |y| green_plus(&sys, &filt, Point2::new(spec.slice, y), GREEN_TOL, spec.budget).value)
        }
        Target::LeafEscape => {
            let chart = saddle_chart(cfg, spec.near, spec.period)?;
            sample_grid(&grid, |z| chart.green_with_budget(z, GREEN_TOL, spec.budget).value)
        }
        Target::JuliaProjection => {
            let chart = saddle_chart(cfg, spec.near, spec.period)?;
            let leaf = spec.leaf.unwrap_or(GridSpec { re: [-4.0, 4.0], im: [-4.0, 4.0], width: 1024, height: 1024 });
            projection_counts(&chart, &leaf, spec)
        }
    })
}
