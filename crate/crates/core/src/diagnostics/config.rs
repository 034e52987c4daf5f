//! JSON model files and run configuration.
//!
//! ```json
//! {
//!   "model": "bipartite_chain",
//!   "variant": "hermitian_counterpart",
//!   "boundary": "open",
//!   "L": 40,
//!   "omega": 0.5,
//!   "phase": 0.0,
//!   "params": { "t1": 0.05, "t2": 0.5, "p": -0.1, "mu0": -1.0 }
//! }
//! ```
//!
//! Unknown keys, at the top level, inside `params` or inside `steps`, are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::models::{
    BipartiteChainSpec, Boundary, ChainVariant, DriveSpec, Lattice, ModelSpec, QuenchStep, StarkChainSpec,
    StepQuenchSpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Open,
    Periodic,
    Momentum,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexValue> for C64 {
    fn from(v: ComplexValue) -> Self {
        match v {
            ComplexValue::Real(x) => C64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepFile {
    pub duration: f64,
    #[serde(rename = "J1")]
    pub j1: ComplexValue,
    #[serde(rename = "J2")]
    pub j2: ComplexValue,
    pub b: [f64; 2],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub model: String,
    #[serde(default)]
    pub variant: Option<ChainVariant>,
    #[serde(default)]
    pub boundary: Option<BoundaryKind>,
    #[serde(rename = "L", default)]
    pub cells: Option<usize>,
    #[serde(rename = "N", default)]
    pub sites: Option<usize>,
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default)]
    pub phase: Option<f64>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub steps: Option<Vec<StepFile>>,
}

struct Params<'a> {
    map: &'a BTreeMap<String, f64>,
    model: &'a str,
}

impl Params<'_> {
    fn allow(&self, keys: &[&str]) -> Result<()> {
        for k in self.map.keys() {
            if !keys.contains(&k.as_str()) {
                return Err(Error::Config(format!(
                    "unknown parameter {k:?} for {} (allowed: {})",
                    self.model,
                    keys.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Result<f64> {
        self.map
            .get(key)
            .copied()
            .ok_or_else(|| Error::Config(format!("{} requires parameter {key:?}", self.model)))
    }

    fn get_or(&self, key: &str, default: f64) -> f64 {
        self.map.get(key).copied().unwrap_or(default)
    }
}

fn forbid<T>(value: &Option<T>, key: &str, model: &str) -> Result<()> {
    if value.is_some() {
        return Err(Error::Config(format!("key {key:?} does not apply to {model}")));
    }
    Ok(())
}

impl ModelFile {
    pub fn into_model(self) -> Result<ModelSpec> {
        let params = Params {
            map: &self.params,
            model: &self.model,
        };
        let model: ModelSpec = match self.model.as_str() {
            "bipartite_chain" => {
                forbid(&self.sites, "N", &self.model)?;
                forbid(&self.steps, "steps", &self.model)?;
                let variant = self
                    .variant
                    .ok_or_else(|| Error::Config("bipartite_chain requires \"variant\"".into()))?;
                let boundary = self
                    .boundary
                    .ok_or_else(|| Error::Config("bipartite_chain requires \"boundary\"".into()))?;
                let omega = self
                    .omega
                    .ok_or_else(|| Error::Config("bipartite_chain requires \"omega\"".into()))?;
                let drive = DriveSpec::new(omega).with_phase(self.phase.unwrap_or(0.0));
                let lattice = match boundary {
                    BoundaryKind::Momentum => {
                        forbid(&self.cells, "L", &self.model)?;
                        Lattice::Momentum {
                            k: params.get_or("k", 0.0),
                        }
                    }
                    BoundaryKind::Open | BoundaryKind::Periodic => {
                        let cells = self
                            .cells
                            .ok_or_else(|| Error::Config("real-space bipartite_chain requires \"L\"".into()))?;
                        Lattice::RealSpace {
                            cells,
                            boundary: if boundary == BoundaryKind::Open {
                                Boundary::Open
                            } else {
                                Boundary::Periodic
                            },
                        }
                    }
                };
                let with_k = |keys: &[&'static str]| -> Vec<&'static str> {
                    let mut v = keys.to_vec();
                    if boundary == BoundaryKind::Momentum {
                        v.push("k");
                    }
                    v
                };
                match variant {
                    ChainVariant::NonHermitian => {
                        params.allow(&with_k(&["r1", "r2", "v", "q1", "q2", "mu0"]))?;
                        BipartiteChainSpec::non_hermitian(
                            lattice,
                            drive,
                            params.get("r1")?,
                            params.get("r2")?,
                            params.get("v")?,
                            params.get("q1")?,
                            params.get("q2")?,
                            params.get("mu0")?,
                        )
                    }
                    ChainVariant::HermitianCounterpart | ChainVariant::TemporalOnlyDeformed => {
                        params.allow(&with_k(&["t1", "t2", "p", "mu0"]))?;
                        let spec = BipartiteChainSpec::hermitian(
                            lattice,
                            drive,
                            params.get("t1")?,
                            params.get("t2")?,
                            params.get("p")?,
                            params.get("mu0")?,
                        );
                        BipartiteChainSpec { variant, ..spec }
                    }
                }
                .into()
            }
            "step_quench" => {
                forbid(&self.variant, "variant", &self.model)?;
                forbid(&self.boundary, "boundary", &self.model)?;
                forbid(&self.cells, "L", &self.model)?;
                forbid(&self.sites, "N", &self.model)?;
                forbid(&self.phase, "phase", &self.model)?;
                let period = 2.0 * PI / self.omega.unwrap_or(2.0 * PI);
                let k = [params.get_or("kx", 0.0), params.get_or("ky", 0.0)];
                let gamma = C64::new(params.get_or("gamma", 0.0), params.get_or("gamma_im", 0.0));
                let mut spec = match self.steps {
                    Some(steps) => {
                        params.allow(&["kx", "ky", "gamma", "gamma_im"])?;
                        let spec = StepQuenchSpec {
                            steps: steps
                                .into_iter()
                                .map(|s| QuenchStep {
                                    duration: s.duration,
                                    j1: s.j1.into(),
                                    j2: s.j2.into(),
                                    b: s.b,
                                })
                                .collect(),
                            gamma_z: gamma,
                            k,
                        };
                        if self.omega.is_some() && (spec.period() - period).abs() > 1e-12 * period {
                            return Err(Error::Config("step durations do not sum to 2π/omega".into()));
                        }
                        spec
                    }
                    None => {
                        params.allow(&["J", "r", "r4", "kx", "ky", "gamma", "gamma_im"])?;
                        StepQuenchSpec::seven_step(params.get("J")?, period, k)
                            .with_asymmetry(0, params.get_or("r", 0.0))?
                            .with_asymmetry(3, params.get_or("r4", 0.0))?
                    }
                };
                spec.gamma_z = gamma;
                spec.into()
            }
            "stark_chain" => {
                forbid(&self.variant, "variant", &self.model)?;
                forbid(&self.boundary, "boundary", &self.model)?;
                forbid(&self.cells, "L", &self.model)?;
                forbid(&self.steps, "steps", &self.model)?;
                forbid(&self.omega, "omega", &self.model)?;
                forbid(&self.phase, "phase", &self.model)?;
                params.allow(&["tL", "tR", "alpha"])?;
                StarkChainSpec {
                    sites: self
                        .sites
                        .ok_or_else(|| Error::Config("stark_chain requires \"N\"".into()))?,
                    t_left: params.get("tL")?,
                    t_right: params.get("tR")?,
                    alpha: params.get("alpha")?,
                }
                .into()
            }
            other => return Err(Error::Config(format!("unknown model {other:?}"))),
        };
        model.validate()?;
        Ok(model)
    }
}

pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let file: ModelFile = serde_json::from_str(text)?;
    file.into_model()
}

pub fn load_model(path: &Path) -> Result<ModelSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read model file {}: {e}", path.display())))?;
    parse_model(&text)
}

/// Number with an optional `pi` suffix, e.g. `0.3pi`.
pub fn parse_value(s: &str) -> Result<f64> {
    let t = s.trim();
    let (num, scale) = match t.strip_suffix("pi") {
        Some(rest) if rest.is_empty() || rest == "-" => (format!("{rest}1"), PI),
        Some(rest) => (rest.trim_end_matches('*').to_string(), PI),
        None => (t.to_string(), 1.0),
    };
    let x: f64 = num
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse number {s:?}")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("non-finite number {s:?}")));
    }
    Ok(x * scale)
}

/// `A:B:N` (N evenly spaced points, endpoints included) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, n] => {
            let a = parse_value(a)?;
            let b = parse_value(b)?;
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("grid count in {s:?} is not an integer")))?;
            match n {
                0 => Err(Error::Config("grid needs at least one point".into())),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()),
            }
        }
        [_] => s.split(',').map(parse_value).collect(),
        _ => Err(Error::Config(format!("cannot parse grid {s:?}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Validated command parameters shared by all subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model_path: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub slices: usize,
    pub nk: usize,
    pub cutoff: usize,
    pub mu0: Vec<f64>,
    pub phis: Vec<f64>,
    pub omega: Option<f64>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model_path: None,
            out: None,
            format: OutputFormat::Csv,
            slices: crate::evolution::DEFAULT_SLICES,
            nk: 256,
            cutoff: 16,
            mu0: Vec::new(),
            phis: Vec::new(),
            omega: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.slices == 0 {
            return Err(Error::Config("--slices must be positive".into()));
        }
        if self.nk == 0 {
            return Err(Error::Config("--nk must be positive".into()));
        }
        if let Some(w) = self.omega {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Config("--omega must be positive".into()));
            }
        }
        if self.mu0.iter().chain(&self.phis).any(|x| !x.is_finite()) {
            return Err(Error::Config("grid values must be finite".into()));
        }
        Ok(())
    }

    /// Loads the model file and applies the `--omega` override.
    pub fn load_model(&self) -> Result<ModelSpec> {
        let path = self
            .model_path
            .as_ref()
            .ok_or_else(|| Error::Config("--model is required".into()))?;
        let model = load_model(path)?;
        match self.omega {
            Some(w) => with_omega(&model, w),
            None => Ok(model),
        }
    }
}

/// The same model driven at another frequency.
pub fn with_omega(model: &ModelSpec, omega: f64) -> Result<ModelSpec> {
    let m = match model {
        ModelSpec::BipartiteChain(c) => ModelSpec::BipartiteChain(BipartiteChainSpec {
            drive: DriveSpec { omega, ..c.drive },
            ..c.clone()
        }),
        ModelSpec::StepQuench(q) => {
            let scale = (2.0 * PI / omega) / q.period();
            let mut q = q.clone();
            for s in q.steps.iter_mut() {
                s.duration *= scale;
            }
            ModelSpec::StepQuench(q)
        }
        other => {
            return Err(Error::Config(format!("--omega does not apply to {}", other.name())));
        }
    };
    m.validate()?;
    Ok(m)
}
