//! Flat `key = value` run configuration. `#` starts a comment; unknown keys
//! and malformed values are errors that name the key.

use crate::flexural::{Model2D, Scaling};
use crate::geometry::{Cylinder, Domain, Graph, Height, HemispherePatch, Plate, SurfaceChart};
use crate::loads::{LoadSpec, SpatialProfile, ThicknessProfile, TimeProfile};
use crate::material::MaterialParams;
use crate::mesh::{Edge, Mesh2D, Mesh3D};
use crate::shell3d::ShearStrain;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {reason}")]
    Io { path: PathBuf, reason: String },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: {reason}")]
    BadValue { key: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartKind {
    Plate,
    Cylinder,
    Hemisphere,
    GraphQuadratic,
    GraphWave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadKind {
    None,
    NormalVolume,
    TopTraction,
    Manufactured,
}

/// Every recognized key with its typed value.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub chart: ChartKind,
    pub radius: f64,
    pub graph_coeffs: [f64; 3],
    pub domain_origin: Option<[f64; 2]>,
    pub domain_lengths: Option<[f64; 2]>,
    pub material: MaterialParams,
    pub descaled: bool,
    pub epsilon: f64,
    pub epsilons: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub clamped: Vec<Edge>,
    pub simply_supported: Vec<Edge>,
    pub model: Model2D,
    pub dt: f64,
    pub t_end: f64,
    pub kappa: f64,
    pub shear: ShearStrain,
    pub load: LoadKind,
    pub load_magnitude: f64,
    pub load_spatial: SpatialProfile,
    pub load_thickness: ThicknessProfile,
    pub load_time: TimeProfile,
    pub output_dir: PathBuf,
    pub svg: bool,
    pub seed: u64,
    pub draws: usize,
    pub ode_draws: usize,
    pub geometry_epsilons: Vec<f64>,
    pub korn_draws: usize,
    pub snapshot_every: usize,
}

pub const KEYS: &[&str] = &[
    "chart",
    "chart.radius",
    "chart.coeffs",
    "domain.origin",
    "domain.lengths",
    "material.lambda",
    "material.mu",
    "material.theta",
    "material.rho",
    "mode",
    "epsilon",
    "epsilons",
    "mesh.nx",
    "mesh.ny",
    "mesh.nz",
    "clamped_edges",
    "simply_supported_edges",
    "model",
    "dt",
    "T",
    "penalty_kappa",
    "shear",
    "load",
    "load.magnitude",
    "load.spatial",
    "load.thickness",
    "load.time",
    "load.time_param",
    "output_dir",
    "svg",
    "seed",
    "identities.draws",
    "ode.draws",
    "geometry.epsilons",
    "korn.draws",
    "snapshot_every",
];

impl Default for Config {
    fn default() -> Self {
        Config {
            chart: ChartKind::Plate,
            radius: 1.0,
            graph_coeffs: [0.5, 0.0, 0.25],
            domain_origin: None,
            domain_lengths: None,
            material: MaterialParams { lambda: 1.0, mu: 1.0, theta_v: 1.0, rho_v: 1.0 },
            descaled: false,
            epsilon: 0.1,
            epsilons: vec![0.2, 0.1, 0.05],
            nx: 16,
            ny: 16,
            nz: 8,
            clamped: vec![Edge::Y1Min],
            simply_supported: vec![],
            model: Model2D::Plate,
            dt: 0.05,
            t_end: 1.0,
            kappa: 1e6,
            shear: ShearStrain::Full,
            load: LoadKind::NormalVolume,
            load_magnitude: 1.0,
            load_spatial: SpatialProfile::Uniform,
            load_thickness: ThicknessProfile::Constant,
            load_time: TimeProfile::Constant,
            output_dir: PathBuf::from("out"),
            svg: false,
            seed: 20240607,
            draws: 1000,
            ode_draws: 100,
            geometry_epsilons: vec![0.1, 0.05, 0.025, 0.0125],
            korn_draws: 20,
            snapshot_every: 0,
        }
    }
}

/// Splits text into `(line, key, value)` triples.
pub fn parse_pairs(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.to_string() })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
        }
        out.push((i + 1, k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue { key: key.to_string(), reason: reason.into() }
}

fn num(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad(key, format!("`{v}` is not a finite number")))
}

fn nonnegative(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = num(key, v)?;
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(bad(key, format!("must be non-negative, got {x}")))
    }
}

fn positive(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = num(key, v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(bad(key, format!("must be positive, got {x}")))
    }
}

fn count(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse::<usize>().map_err(|_| bad(key, format!("`{v}` is not a non-negative integer")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| num(key, s.trim())).collect()
}

fn pair(key: &str, v: &str) -> Result<[f64; 2], ConfigError> {
    let l = list(key, v)?;
    <[f64; 2]>::try_from(l).map_err(|_| bad(key, "expected two comma-separated numbers"))
}

fn edges(key: &str, v: &str) -> Result<Vec<Edge>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty() && *s != "none")
        .map(|s| Edge::parse(s).ok_or_else(|| bad(key, format!("unknown edge `{s}` (use y1min, y1max, y2min, y2max)"))))
        .collect()
}

fn flag(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(bad(key, format!("`{v}` is not a boolean"))),
    }
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: path.to_path_buf(), reason: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = Config::default();
        let mut time_param = None;
        let mut time_kind = "constant".to_string();
        let pairs = parse_pairs(text)?;
        let mut seen = BTreeMap::new();
        for (line, k, v) in pairs {
            if seen.insert(k.clone(), line).is_some() {
                return Err(bad(&k, format!("repeated on line {line}")));
            }
            let key = k.as_str();
            match key {
                "chart" => {
                    c.chart = match v.as_str() {
                        "plate" => ChartKind::Plate,
                        "cylinder" => ChartKind::Cylinder,
                        "hemisphere" => ChartKind::Hemisphere,
                        "graph_quadratic" => ChartKind::GraphQuadratic,
                        "graph_wave" => ChartKind::GraphWave,
                        _ => return Err(bad(key, format!("unknown chart `{v}`"))),
                    }
                }
                "chart.radius" => c.radius = positive(key, &v)?,
                "chart.coeffs" => {
                    let l = list(key, &v)?;
                    c.graph_coeffs = <[f64; 3]>::try_from(l).map_err(|_| bad(key, "expected three numbers"))?;
                }
                "domain.origin" => c.domain_origin = Some(pair(key, &v)?),
                "domain.lengths" => {
                    let p = pair(key, &v)?;
                    if p.iter().any(|&x| x <= 0.0) {
                        return Err(bad(key, "lengths must be positive"));
                    }
                    c.domain_lengths = Some(p);
                }
                "material.lambda" => c.material.lambda = nonnegative(key, &v)?,
                "material.mu" => c.material.mu = positive(key, &v)?,
                "material.theta" => c.material.theta_v = positive(key, &v)?,
                "material.rho" => c.material.rho_v = nonnegative(key, &v)?,
                "mode" => {
                    c.descaled = match v.as_str() {
                        "scaled" => false,
                        "descaled" => true,
                        _ => return Err(bad(key, format!("expected scaled|descaled, got `{v}`"))),
                    }
                }
                "epsilon" => c.epsilon = positive(key, &v)?,
                "epsilons" => {
                    c.epsilons = list(key, &v)?;
                    if c.epsilons.iter().any(|&e| e <= 0.0) {
                        return Err(bad(key, "epsilons must be positive"));
                    }
                }
                "mesh.nx" => c.nx = count(key, &v)?,
                "mesh.ny" => c.ny = count(key, &v)?,
                "mesh.nz" => c.nz = count(key, &v)?,
                "clamped_edges" => c.clamped = edges(key, &v)?,
                "simply_supported_edges" => c.simply_supported = edges(key, &v)?,
                "model" => {
                    c.model = match v.as_str() {
                        "plate" => Model2D::Plate,
                        "shell" => Model2D::Shell,
                        _ => return Err(bad(key, format!("expected plate|shell, got `{v}`"))),
                    }
                }
                "dt" => c.dt = positive(key, &v)?,
                "T" => c.t_end = positive(key, &v)?,
                "penalty_kappa" => c.kappa = positive(key, &v)?,
                "shear" => {
                    c.shear = match v.as_str() {
                        "full" => ShearStrain::Full,
                        "ans" => ShearStrain::Ans,
                        _ => return Err(bad(key, format!("expected full|ans, got `{v}`"))),
                    }
                }
                "load" => {
                    c.load = match v.as_str() {
                        "none" => LoadKind::None,
                        "normal_volume" => LoadKind::NormalVolume,
                        "top_traction" => LoadKind::TopTraction,
                        "manufactured" => LoadKind::Manufactured,
                        _ => return Err(bad(key, format!("unknown load `{v}`"))),
                    }
                }
                "load.magnitude" => c.load_magnitude = num(key, &v)?,
                "load.spatial" => {
                    c.load_spatial = match v.as_str() {
                        "uniform" => SpatialProfile::Uniform,
                        "sinsin" => SpatialProfile::SinSin,
                        _ => return Err(bad(key, format!("expected uniform|sinsin, got `{v}`"))),
                    }
                }
                "load.thickness" => {
                    c.load_thickness = match v.as_str() {
                        "constant" => ThicknessProfile::Constant,
                        "linear" => ThicknessProfile::Linear,
                        _ => return Err(bad(key, format!("expected constant|linear, got `{v}`"))),
                    }
                }
                "load.time" => {
                    if !["constant", "ramp", "rise"].contains(&v.as_str()) {
                        return Err(bad(key, format!("expected constant|ramp|rise, got `{v}`")));
                    }
                    time_kind = v.clone();
                }
                "load.time_param" => time_param = Some(positive(key, &v)?),
                "output_dir" => c.output_dir = PathBuf::from(&v),
                "svg" => c.svg = flag(key, &v)?,
                "seed" => c.seed = v.parse().map_err(|_| bad(key, format!("`{v}` is not an unsigned integer")))?,
                "identities.draws" => c.draws = count(key, &v)?,
                "ode.draws" => c.ode_draws = count(key, &v)?,
                "geometry.epsilons" => c.geometry_epsilons = list(key, &v)?,
                "korn.draws" => c.korn_draws = count(key, &v)?,
                "snapshot_every" => c.snapshot_every = count(key, &v)?,
                _ => return Err(ConfigError::UnknownKey(k.clone())),
            }
        }
        c.load_time = match time_kind.as_str() {
            "ramp" => TimeProfile::Ramp { t_ramp: time_param.unwrap_or(1.0) },
            "rise" => TimeProfile::Rise { rate: time_param.unwrap_or(1.0) },
            _ => TimeProfile::Constant,
        };
        for (key, n) in [("mesh.nx", c.nx), ("mesh.ny", c.ny), ("mesh.nz", c.nz)] {
            if n == 0 {
                return Err(bad(key, "must be at least 1"));
            }
        }
        c.material.validate().map_err(|e| bad("material", e.to_string()))?;
        Ok(c)
    }

    /// Parameter domain: chart default, overridden by `domain.*`.
    pub fn domain(&self) -> Domain {
        let mut d = match self.chart {
            ChartKind::Hemisphere => HemispherePatch::default().domain,
            _ => Domain::rect(1.0, 1.0),
        };
        if let Some(o) = self.domain_origin {
            d.origin = o;
        }
        if let Some(l) = self.domain_lengths {
            d.lengths = l;
        }
        d
    }

    pub fn chart(&self) -> Arc<dyn SurfaceChart> {
        let domain = self.domain();
        let [c0, c1, c2] = self.graph_coeffs;
        match self.chart {
            ChartKind::Plate => Arc::new(Plate { domain }),
            ChartKind::Cylinder => Arc::new(Cylinder { radius: self.radius, domain }),
            ChartKind::Hemisphere => Arc::new(HemispherePatch { domain }),
            ChartKind::GraphQuadratic => Arc::new(Graph { height: Height::Quadratic { c11: c0, c12: c1, c22: c2 }, domain }),
            ChartKind::GraphWave => Arc::new(Graph { height: Height::Wave { amp: c0, k1: c1, k2: c2 }, domain }),
        }
    }

    pub fn mesh2d(&self) -> crate::Result<Mesh2D> {
        Mesh2D::new(self.domain(), self.nx, self.ny, self.clamped.clone(), self.simply_supported.clone())
    }

    pub fn mesh3d(&self) -> crate::Result<Mesh3D> {
        Mesh3D::new(self.mesh2d()?, self.nz)
    }

    pub fn loads(&self) -> LoadSpec {
        let base = LoadSpec { spatial: self.load_spatial, time: self.load_time, thickness: self.load_thickness, ..Default::default() };
        let m = self.load_magnitude;
        match self.load {
            LoadKind::None => LoadSpec::default(),
            LoadKind::NormalVolume => LoadSpec { volume: [0.0, 0.0, m], ..base },
            LoadKind::TopTraction => LoadSpec { top: [0.0, 0.0, m], ..base },
            LoadKind::Manufactured => LoadSpec::manufactured(self.material),
        }
    }

    pub fn scaling(&self) -> Scaling {
        if self.descaled {
            Scaling::Descaled { eps: self.epsilon }
        } else {
            Scaling::Scaled
        }
    }
}
