use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::boettcher::BoettcherValue;
use super::phi_plus::log_phi_plus_product;
use crate::dynamics::PlaneMap;
use crate::error::{Error, Result};
use crate::level::{self, LevelFunction};
use crate::saddles::LeafChart;

/// Longest orbit segment searched for entry into `V⁺`.
const ENTRY_BUDGET: usize = 64;

/// Charts `log f_k(z) = log φ⁺(H^k γ(z))` on a leaf, admissible once `H^k γ(z) ∈ V⁺`.
pub(crate) struct LeafLevel<'a> {
    pub chart: &'a LeafChart,
}

impl LevelFunction for LeafLevel<'_> {
    fn degree(&self) -> usize {
        self.chart.degree()
    }

    fn threshold(&self) -> f64 {
        self.chart.filtration().r.ln() + 1.0
    }

    fn log_phi(&self, z: C64, k: usize) -> Option<(C64, C64)> {
        let map = self.chart.map();
        let (mut p, mut t, steps) = self.chart.seed_for(z);
        for _ in 0..steps + k {
            t = map.jacobian(p).apply(t);
            p = map.apply(p);
        }
        if !p.is_finite() || !t.is_finite() || !self.chart.filtration().in_v_plus(p) {
            return None;
        }
        let (sum, dlog, _, _) = log_phi_plus_product(map, p, t, 1e-17);
        Some((p.y.ln() + sum, dlog))
    }
}

/// Leaf parameters along which `φ⁺` is continued by root tracking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPath {
    pub points: Vec<C64>,
    /// Longest allowed gap between consecutive points before refinement.
    pub max_step: f64,
}

impl BranchPath {
    pub fn new(points: Vec<C64>, max_step: f64) -> Self {
        Self { points, max_step }
    }

    /// The ray from `z` up to the first point whose image is in `V⁺`, reversed so
    /// it starts at the reference point.
    pub fn from_ascent(chart: &LeafChart, z: C64, tol: f64) -> Result<Self> {
        let g = chart.green(z, tol).value;
        if g <= tol {
            return Err(Error::NotEscaping { potential: g });
        }
        let lvl = LeafLevel { chart };
        let (_, samples) = level::ascend(&lvl, z, g, ENTRY_BUDGET)?;
        let mut points: Vec<C64> = samples.iter().rev().map(|s| s.z).collect();
        points.dedup();
        let max_step = points.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max);
        Ok(Self { points, max_step: max_step.max(1e-12) })
    }
}

/// Continuous extension of `φ⁺` to `γ(z)`, for `z` in the leaf's escape region.
///
/// Points whose image is already in `V⁺` use the direct product; otherwise the
/// leafwise ray through `z` is climbed until it is, and the argument read off there.
pub fn extend_phi_plus(chart: &LeafChart, z: C64, tol: f64) -> Result<BoettcherValue> {
    let g = chart.green(z, tol).value;
    if g <= tol {
        return Err(Error::NotEscaping { potential: g });
    }
    let lvl = LeafLevel { chart };
    if let Some((v, _)) = lvl.log_phi(z, 0) {
        return Ok(BoettcherValue { value: v.exp(), truncation: 0, error_bound: tol });
    }
    let (im, _) = level::ascend(&lvl, z, g, ENTRY_BUDGET)?;
    Ok(BoettcherValue { value: C64::from_polar(g.exp(), im), truncation: 0, error_bound: tol * g.exp() })
}

/// Continue `φ⁺` along `path`, starting from a point whose image is in `V⁺`: at each
/// point take the `d^K`-th root of `φ⁺(H^K γ(z))` nearest the running value.
///
/// A step is accepted only if the argument moves by less than `(π/d^K)·d/(d+1)`;
/// longer steps are bisected, and [`Error::BranchAmbiguity`] is raised when the
/// bisection depth runs out.
pub fn extend_phi_plus_along(chart: &LeafChart, path: &BranchPath) -> Result<BoettcherValue> {
    let lvl = LeafLevel { chart };
    let d = chart.degree() as f64;
    let first = *path.points.first().ok_or_else(|| Error::InvalidInput("empty branch path".into()))?;
    let (mut running, _) = lvl
        .log_phi(first, 0)
        .ok_or_else(|| Error::InvalidInput(format!("path start {first} is not mapped into V⁺")))?;
    let mut prev = first;

    // branch-select at `z` against the running log value
    let select = |z: C64, run: C64| -> Option<std::result::Result<C64, f64>> {
        let k = lvl.first_admissible(z, ENTRY_BUDGET)?;
        let (v, _) = lvl.log_phi(z, k)?;
        let dk = d.powi(k as i32);
        let j = ((dk * run.im - v.im) / TAU).round();
        let cand = (v + C64::new(0.0, TAU * j)) / dk;
        let limit = std::f64::consts::PI / dk * d / (d + 1.0);
        let moved = (cand.im - run.im).abs();
        Some(if moved < limit { Ok(cand) } else { Err(moved) })
    };

    for &target in &path.points[1..] {
        let mut stack = vec![(target, 0u32)];
        // refine long segments up front
        let pieces = ((target - prev).norm() / path.max_step).ceil().max(1.0) as usize;
        if pieces > 1 {
            stack = (1..=pieces).rev().map(|i| (prev + (target - prev) * (i as f64 / pieces as f64), 0)).collect();
        }
        while let Some((z, depth)) = stack.pop() {
            match select(z, running) {
                Some(Ok(v)) => {
                    running = v;
                    prev = z;
                }
                Some(Err(_)) if depth < 16 => {
                    stack.push((z, depth + 1));
                    stack.push((0.5 * (prev + z), depth + 1));
                }
                Some(Err(moved)) => {
                    return Err(Error::BranchAmbiguity { at: z, detail: format!("argument step {moved:.3e} after bisection") });
                }
                None => return Err(Error::DoesNotEscape { point: z, iterations: ENTRY_BUDGET }),
            }
        }
    }
    Ok(BoettcherValue { value: running.exp(), truncation: path.points.len(), error_bound: f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Polynomial;
    use crate::potential::phi_plus;
    use crate::saddles::{continue_saddle, find_periodic_1d};

    fn chart(c: f64, b: f64) -> LeafChart {
        let p = Polynomial::quadratic(c);
        let o = find_periodic_1d(&p, 1).unwrap().into_iter().rev().find(|o| o.is_repelling()).unwrap();
        LeafChart::new(continue_saddle(&p, &o, C64::new(b, 0.0), 20).unwrap()).unwrap()
    }

    #[test]
    fn agrees_with_direct_product_in_v_plus() {
        let ch = chart(0.0, 0.3);
        let z = C64::new(4.0, 0.5);
        let p = ch.eval(z);
        assert!(ch.filtration().in_v_plus(p));
        let a = extend_phi_plus(&ch, z, 1e-14).unwrap().value;
        let b = phi_plus(ch.map(), ch.filtration(), p, 1e-16).unwrap().value;
        assert!((a - b).norm() < 1e-10 * b.norm());
    }

    #[test]
    fn modulus_and_dilation_law() {
        let ch = chart(0.0, 0.3);
        let lambda = ch.lambda();
        for k in 0..6 {
            let z = C64::new(0.3, 0.0) + C64::from_polar(0.2, k as f64);
            let g = ch.green(z, 1e-15).value;
            let a = extend_phi_plus(&ch, z, 1e-14).unwrap().value;
            assert!((a.norm().ln() - g).abs() < 1e-8);
            let b = extend_phi_plus(&ch, lambda * z, 1e-14).unwrap().value;
            assert!((b - a * a).norm() < 1e-8 * b.norm(), "{z}: {}", (b - a * a).norm());
        }
    }

    #[test]
    fn root_tracking_matches_ascent() {
        let ch = chart(0.0, 0.3);
        let z = C64::new(0.2, 0.35);
        let path = BranchPath::from_ascent(&ch, z, 1e-14).unwrap();
        let a = extend_phi_plus_along(&ch, &path).unwrap().value;
        let b = extend_phi_plus(&ch, z, 1e-14).unwrap().value;
        assert!((a - b).norm() < 1e-9 * b.norm(), "{a} vs {b}");
    }

    #[test]
    fn coarse_path_is_refined_or_rejected() {
        let ch = chart(0.0, 0.3);
        let z = C64::new(0.2, 0.35);
        let mut path = BranchPath::from_ascent(&ch, z, 1e-14).unwrap();
        let ends = vec![path.points[0], *path.points.last().unwrap()];
        path.points = ends;
        path.max_step = f64::INFINITY;
        match extend_phi_plus_along(&ch, &path) {
            Ok(v) => {
                let b = extend_phi_plus(&ch, z, 1e-14).unwrap().value;
                assert!((v.value - b).norm() < 1e-9 * b.norm());
            }
            Err(e) => assert!(matches!(e, Error::BranchAmbiguity { .. } | Error::DoesNotEscape { .. })),
        }
    }

    #[test]
    fn bounded_leaf_point_is_rejected() {
        let ch = chart(0.0, 0.3);
        assert!(matches!(extend_phi_plus(&ch, C64::new(-0.3, 0.0), 1e-12), Err(Error::NotEscaping { .. })));
    }
}
