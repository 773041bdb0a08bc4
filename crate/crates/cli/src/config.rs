use std::path::Path;

use anyhow::{bail, Context};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use solenoid_core::io::SystemFile;
use solenoid_core::rays::ExternalAngle;
use solenoid_core::{GridSpec, Polynomial};

/// Everything a subcommand may read from `--config`; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Composed system for filtration and potential checks and K⁺ renders.
    pub system: Option<SystemFile>,
    /// `P` for single-factor work, coefficients lowest degree first.
    pub poly: Vec<C64>,
    pub b: C64,
    /// Arithmetic for potential evaluations in the suites.
    pub precision: Precision,
    pub render: RenderSpec,
    pub suite: SuiteConfig,
    pub dump: DumpConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            system: None,
            poly: vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            b: C64::new(0.3, 0.0),
            precision: Precision::Double,
            render: RenderSpec::default(),
            suite: SuiteConfig::default(),
            dump: DumpConfig::default(),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn polynomial(&self) -> anyhow::Result<Polynomial> {
        Ok(Polynomial::new(self.poly.clone())?)
    }

    /// `z^d + c` shorthand used by flag overrides.
    pub fn set_quadratic(&mut self, c: C64) {
        self.poly = vec![c, C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    #[default]
    Double,
    /// Double-double oracles.
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    OneDJulia,
    KplusSlice,
    LeafEscape,
    JuliaProjection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorMap {
    /// Grayscale potential, PGM.
    Potential,
    /// Black/white escape with red boundary, PPM.
    Escape,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderSpec {
    pub target: Target,
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub width: usize,
    pub height: usize,
    pub budget: usize,
    pub colormap: ColorMap,
    /// `x` of the `y`-plane slice for `kplus-slice`.
    pub slice: C64,
    /// Saddle orbit of `P` nearest this point (`leaf-escape`, `julia-projection`).
    pub near: C64,
    pub period: usize,
    /// Leaf-parameter grid sampled by `julia-projection`.
    pub leaf: Option<GridSpec>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            target: Target::OneDJulia,
            re: [-2.0, 2.0],
            im: [-2.0, 2.0],
            width: 256,
            height: 256,
            budget: 500,
            colormap: ColorMap::Potential,
            slice: C64::new(0.0, 0.0),
            near: C64::new(1.0, 0.0),
            period: 1,
            leaf: None,
        }
    }
}

impl RenderSpec {
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.width < 2 || self.height < 2 {
            bail!("resolution must be at least 2×2, got {}×{}", self.width, self.height);
        }
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
        if !ok(self.re) || !ok(self.im) {
            bail!("degenerate bounds {:?} × {:?}", self.re, self.im);
        }
        if self.budget == 0 {
            bail!("iteration budget must be positive");
        }
        if let Some(g) = &self.leaf {
            if g.width < 2 || g.height < 2 || !ok(g.re) || !ok(g.im) {
                bail!("degenerate leaf grid");
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec { re: self.re, im: self.im, width: self.width, height: self.height }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Sample count for functional-equation checks.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { samples: 200, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DumpConfig {
    pub theta: String,
    /// Trace on the leaf of the saddle nearest `near` instead of in one variable.
    pub leaf: bool,
    pub near: C64,
    /// Leaf parameter for codings, seed for leaf rays.
    pub point: C64,
    #[serde(rename = "T")]
    pub t: usize,
    pub period: usize,
    pub b_from: C64,
    pub steps: usize,
    pub g_start: f64,
    pub g_stop: f64,
    pub grid: GridSpec,
}

impl Default for DumpConfig {
    fn default() -> Self {
        Self {
            theta: "1/3".into(),
            leaf: false,
            near: C64::new(1.0, 0.0),
            point: C64::new(0.2, 0.1),
            t: 6,
            period: 1,
            b_from: C64::new(0.0, 0.0),
            steps: 30,
            g_start: 4.0,
            g_stop: 1e-8,
            grid: GridSpec { re: [-3.0, 3.0], im: [-3.0, 3.0], width: 16, height: 16 },
        }
    }
}

/// `"p/q"` as an exact angle, anything else as turns.
pub fn parse_angle(s: &str) -> anyhow::Result<ExternalAngle> {
    if let Some((p, q)) = s.split_once('/') {
        let (p, q): (u64, u64) = (p.trim().parse()?, q.trim().parse()?);
        if q == 0 {
            bail!("zero denominator in angle {s}");
        }
        return Ok(ExternalAngle::rational(p, q));
    }
    let t: f64 = s.trim().parse().with_context(|| format!("angle {s:?}"))?;
    Ok(ExternalAngle::Turns(t))
}

/// `"re"` or `"re,im"`.
pub fn parse_complex(s: &str) -> anyhow::Result<C64> {
    let mut parts = s.split(',').map(str::trim);
    let re: f64 = parts.next().unwrap_or("").parse().with_context(|| format!("complex {s:?}"))?;
    let im: f64 = match parts.next() {
        Some(p) => p.parse().with_context(|| format!("complex {s:?}"))?,
        None => 0.0,
    };
    if parts.next().is_some() {
        bail!("complex {s:?} has more than two parts");
    }
    Ok(C64::new(re, im))
}
