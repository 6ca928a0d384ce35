//! Run configuration: a TOML file with `[section]` tables and `key = value`
//! entries (strings quoted). Unknown keys are rejected; every tolerance has
//! a default. See the README for the documented grammar.

use rotor_core::{GridSpec, TorusLift, TorusMapSpec, Vec2};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

/// Configuration error with enough context for an exit-2 diagnostic.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn cfg_err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSection {
    pub family: Option<String>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub expr_x: Option<String>,
    pub expr_y: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub resolution: u32,
    pub offset_x: Option<f64>,
    pub offset_y: Option<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            resolution: 64,
            offset_x: None,
            offset_y: None,
        }
    }
}

/// Either a count of equally spaced directions or an explicit angle list.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Directions {
    Count(u32),
    Explicit(Vec<f64>),
}

impl Default for Directions {
    fn default() -> Self {
        Directions::Count(16)
    }
}

impl Directions {
    pub fn angles(&self) -> Vec<f64> {
        match self {
            Directions::Count(m) => {
                let m = (*m).max(1);
                (0..m)
                    .map(|k| k as f64 * std::f64::consts::TAU / m as f64)
                    .collect()
            }
            Directions::Explicit(list) => list.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub n_schedule: Vec<u64>,
    pub directions: Directions,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub threads: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            n_schedule: vec![250, 500, 1000, 2000],
            directions: Directions::default(),
            seed: 1,
            output_dir: PathBuf::from("out"),
            threads: 0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Interior margin for the Lebesgue-vector verdict.
    pub margin: f64,
    /// Newton convergence tolerance for periodic search.
    pub newton_tol: f64,
    /// Max |det DF − 1| accepted as area preserving.
    pub area_tol: f64,
    /// Deck-commutation tolerance for expression maps.
    pub periodicity_tol: f64,
    /// Deviation-constant estimate M̂; 0 means 2·sup‖φ‖ over the grid.
    pub m_hat: f64,
    /// Fraction of the deviation schedule used for the tail-slope fit.
    pub fit_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            margin: 0.02,
            newton_tol: 1e-12,
            area_tol: 1e-9,
            periodicity_tol: 1e-9,
            m_hat: 0.0,
            fit_fraction: 0.5,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DeviateSection {
    /// Orbit length for support refinement; 0 means the schedule maximum.
    pub n_ref: u64,
    /// Sensitivity control: shift ω inward by this amount along v⊥.
    pub shift: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StaircaseSection {
    /// Exact direction "a/b" (integers) — or set `angle` for a float one.
    pub dir: Option<String>,
    pub angle: Option<f64>,
    pub max_steps: usize,
    pub rect_diameter: f64,
}

impl Default for StaircaseSection {
    fn default() -> Self {
        StaircaseSection {
            dir: None,
            angle: None,
            max_steps: 1000,
            rect_diameter: 0.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeriodicSection {
    pub q: u32,
    pub p: i64,
    pub s: i64,
    pub seed_resolution: u32,
    pub dedupe_radius: f64,
}

impl Default for PeriodicSection {
    fn default() -> Self {
        PeriodicSection {
            q: 1,
            p: 0,
            s: 0,
            seed_resolution: 16,
            dedupe_radius: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LebSection {
    /// "quadrature" or "monte_carlo".
    pub method: String,
    pub resolution: u32,
    pub samples: u64,
}

impl Default for LebSection {
    fn default() -> Self {
        LebSection {
            method: "quadrature".into(),
            resolution: 1024,
            samples: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub map: Option<MapSection>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub deviate: DeviateSection,
    #[serde(default)]
    pub staircase: StaircaseSection,
    #[serde(default)]
    pub periodic: PeriodicSection,
    #[serde(default)]
    pub leb: LebSection,
}

/// Fully validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub map_spec: TorusMapSpec,
    pub grid: GridSpec,
    pub run: RunSection,
    pub tolerances: Tolerances,
    pub deviate: DeviateSection,
    pub staircase: StaircaseSection,
    pub periodic: PeriodicSection,
    pub leb: LebSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| cfg_err(format!("{e}")))?;
        let map = raw.map.ok_or_else(|| cfg_err("missing section: [map]"))?;
        let map_spec = build_map_spec(&map)?;
        let grid = build_grid(&raw.grid)?;
        if raw.run.n_schedule.is_empty() {
            return Err(cfg_err("run.n_schedule must be nonempty"));
        }
        if raw.run.n_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(cfg_err("run.n_schedule must be strictly increasing"));
        }
        if !(raw.tolerances.fit_fraction > 0.0 && raw.tolerances.fit_fraction <= 1.0) {
            return Err(cfg_err("tolerances.fit_fraction must be in (0, 1]"));
        }
        Ok(RunConfig {
            map_spec,
            grid,
            run: raw.run,
            tolerances: raw.tolerances,
            deviate: raw.deviate,
            staircase: raw.staircase,
            periodic: raw.periodic,
            leb: raw.leb,
        })
    }

    /// Build and validate the lift (expression maps run the deck check).
    pub fn lift(&self) -> Result<TorusLift, rotor_core::Error> {
        TorusLift::new(self.map_spec.clone())
    }
}

fn require(opt: Option<f64>, key: &str) -> Result<f64, ConfigError> {
    opt.ok_or_else(|| cfg_err(format!("missing key: {key}")))
}

fn build_map_spec(map: &MapSection) -> Result<TorusMapSpec, ConfigError> {
    let family = map
        .family
        .as_deref()
        .ok_or_else(|| cfg_err("missing key: family"))?;
    match family {
        "translation" => Ok(TorusMapSpec::Translation {
            alpha: require(map.alpha, "alpha")?,
            beta: require(map.beta, "beta")?,
        }),
        "two_shear" => Ok(TorusMapSpec::TwoShear {
            a: require(map.a, "a")?,
            b: require(map.b, "b")?,
            c1: map.c1.unwrap_or(0.0),
            c2: map.c2.unwrap_or(0.0),
        }),
        "expression" => Ok(TorusMapSpec::Expression {
            expr_x: map
                .expr_x
                .clone()
                .ok_or_else(|| cfg_err("missing key: expr_x"))?,
            expr_y: map
                .expr_y
                .clone()
                .ok_or_else(|| cfg_err("missing key: expr_y"))?,
            params: map.params.clone(),
        }),
        other => Err(cfg_err(format!(
            "unknown family `{other}` (expected translation, two_shear, or expression)"
        ))),
    }
}

fn build_grid(grid: &GridSection) -> Result<GridSpec, ConfigError> {
    let res = grid.resolution;
    let default_off = 0.5 / res.max(1) as f64;
    let offset = Vec2::new(
        grid.offset_x.unwrap_or(default_off),
        grid.offset_y.unwrap_or(default_off),
    );
    GridSpec::new(res, offset).map_err(|e| cfg_err(format!("invalid grid: {e}")))
}

/// Parse "a/b" into an exact integer direction pair.
pub fn parse_exact_dir(text: &str) -> Result<(i64, i64), ConfigError> {
    let (a, b) = text
        .split_once('/')
        .ok_or_else(|| cfg_err(format!("direction `{text}` is not of the form a/b")))?;
    let a: i64 = a
        .trim()
        .parse()
        .map_err(|_| cfg_err(format!("direction numerator `{a}` is not an integer")))?;
    let b: i64 = b
        .trim()
        .parse()
        .map_err(|_| cfg_err(format!("direction denominator `{b}` is not an integer")))?;
    Ok((a, b))
}
