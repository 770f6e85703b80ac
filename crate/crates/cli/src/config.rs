//! Experiment configuration: compiled-in presets, a flat TOML file and
//! command-line overrides, applied in that order.
//!
//! ```toml
//! example = "custom"
//! alpha = [0.5]
//! q = [1.0]
//! t_end = 1.0
//! steps = 50
//! cells = 50
//! omega = [[0.4, 0.6]]
//! lambda = 1e-5
//! epsilon = 1e-3
//! max_iters = 100
//! seed = 1
//! delta = 0.01
//! g_true = "quadratic"   # or "hat", or "file:path/to/g.csv"
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use subdiff_core::elliptic::{EllipticCoefficients, SpaceGrid, Subdomain};
use subdiff_core::inverse_cg::InverseConfig;
use subdiff_core::{ContourSpec, MultiTermSpec, TimeGrid, TimeSeries};

use crate::error::{CliError, CliResult};
use crate::output::read_table;

pub const PRESET_IDS: [&str; 6] = ["ex1a", "ex1b", "ex2a", "ex2b", "ex3a", "ex3b"];

/// Seed used by every preset.
pub const PRESET_SEED: u64 = 20_240_607;

/// Ground-truth temporal source.
#[derive(Debug, Clone, PartialEq)]
pub enum GTrue {
    /// `10 t (1 − t)`
    Quadratic,
    /// `1 − |2t − 1|`
    Hat,
    /// Two-column CSV `t,g` on the configured time grid.
    File(PathBuf),
}

impl GTrue {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "quadratic" => Ok(GTrue::Quadratic),
            "hat" => Ok(GTrue::Hat),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(GTrue::File(PathBuf::from(p))),
                _ => Err(CliError::Config(format!(
                    "g_true must be \"quadratic\", \"hat\" or \"file:<path>\", got {s:?}"
                ))),
            },
        }
    }

    pub fn sample(&self, time: TimeGrid) -> CliResult<TimeSeries> {
        match self {
            GTrue::Quadratic => Ok(TimeSeries::from_fn(time, |t| 10.0 * t * (1.0 - t))),
            GTrue::Hat => Ok(TimeSeries::from_fn(time, |t| 1.0 - (2.0 * t - 1.0).abs())),
            GTrue::File(path) => {
                let table = read_table(path)?;
                let g = table
                    .column("g")
                    .ok_or_else(|| CliError::Config(format!("{}: missing column \"g\"", path.display())))?;
                Ok(TimeSeries::new(time, g.to_vec())?)
            }
        }
    }
}

impl fmt::Display for GTrue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GTrue::Quadratic => f.write_str("quadratic"),
            GTrue::Hat => f.write_str("hat"),
            GTrue::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Everything needed for one run of the harness.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: String,
    pub alpha: Vec<f64>,
    pub q: Vec<f64>,
    pub t_end: f64,
    pub steps: usize,
    pub cells: usize,
    pub omega: Vec<(f64, f64)>,
    pub lambda: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub delta: f64,
    pub g_true: GTrue,
    pub out_dir: PathBuf,
    pub emit_plot_data: bool,
    /// Contour half-angle override; `None` uses the midpoint of the admissible interval.
    pub theta0: Option<f64>,
}

/// Preset by id. All presets share `T = 1`, a 50×50 mesh, `ω = (0.4, 0.6)`,
/// `f = sin πx`, `λ = 1e-5`, `ε = 1e-3` and `g₀ = 0`.
pub fn preset(id: &str) -> CliResult<ExperimentConfig> {
    let (alpha, delta, g_true) = match id {
        "ex1a" => (0.2, 0.001, GTrue::Quadratic),
        "ex1b" => (0.8, 0.001, GTrue::Quadratic),
        "ex2a" => (0.2, 0.01, GTrue::Quadratic),
        "ex2b" => (0.8, 0.01, GTrue::Quadratic),
        "ex3a" => (0.2, 0.01, GTrue::Hat),
        "ex3b" => (0.8, 0.01, GTrue::Hat),
        _ => {
            return Err(CliError::Config(format!(
                "unknown example {id:?}; expected one of {}",
                PRESET_IDS.join(", ")
            )))
        }
    };
    Ok(ExperimentConfig {
        id: id.to_owned(),
        alpha: vec![alpha],
        q: vec![1.0],
        t_end: 1.0,
        steps: 50,
        cells: 50,
        omega: vec![(0.4, 0.6)],
        lambda: 1e-5,
        epsilon: 1e-3,
        max_iters: 100,
        seed: PRESET_SEED,
        delta,
        g_true,
        out_dir: PathBuf::from("out").join(id),
        emit_plot_data: true,
        theta0: None,
    })
}

/// Contents of a configuration file; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub example: Option<String>,
    pub alpha: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    pub t_end: Option<f64>,
    pub steps: Option<usize>,
    pub cells: Option<usize>,
    pub omega: Option<Vec<[f64; 2]>>,
    pub lambda: Option<f64>,
    pub epsilon: Option<f64>,
    pub max_iters: Option<usize>,
    pub seed: Option<u64>,
    pub delta: Option<f64>,
    pub g_true: Option<String>,
    pub out: Option<PathBuf>,
    pub plot_data: Option<bool>,
    pub theta0: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

/// Command-line overrides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
    pub steps: Option<usize>,
    pub cells: Option<usize>,
    pub alpha: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
}

/// Keys a custom (non-preset) experiment must set explicitly.
const CUSTOM_KEYS: [&str; 12] = [
    "alpha", "q", "t_end", "steps", "cells", "omega", "lambda", "epsilon", "max_iters", "seed", "delta", "g_true",
];

impl ExperimentConfig {
    /// Resolves preset, file and overrides. With `require_complete`, a custom
    /// configuration must set every field in the file or on the command line;
    /// otherwise missing fields fall back to the `ex1a` preset.
    pub fn resolve(
        example: Option<&str>,
        file: Option<&ConfigFile>,
        ov: &Overrides,
        require_complete: bool,
    ) -> CliResult<Self> {
        let empty = ConfigFile::default();
        let file = file.unwrap_or(&empty);
        let example = example.or(file.example.as_deref());
        let mut cfg = match example {
            Some(id) if id != "custom" => preset(id)?,
            _ => {
                if require_complete {
                    let missing: Vec<&str> = CUSTOM_KEYS
                        .iter()
                        .copied()
                        .filter(|k| !is_set(k, file, ov))
                        .collect();
                    if !missing.is_empty() {
                        return Err(CliError::Config(format!(
                            "a custom experiment must set: {}",
                            missing.join(", ")
                        )));
                    }
                }
                let mut base = preset("ex1a")?;
                base.id = "custom".into();
                base.out_dir = PathBuf::from("out").join("custom");
                base
            }
        };

        macro_rules! take {
            ($src:expr, $($field:ident => $dst:ident),*) => {
                $(if let Some(v) = $src.$field.clone() { cfg.$dst = v; })*
            };
        }
        take!(file, alpha => alpha, q => q, t_end => t_end, steps => steps, cells => cells,
              lambda => lambda, epsilon => epsilon, max_iters => max_iters, seed => seed,
              delta => delta, out => out_dir, plot_data => emit_plot_data);
        if let Some(w) = &file.omega {
            cfg.omega = w.iter().map(|p| (p[0], p[1])).collect();
        }
        if let Some(g) = &file.g_true {
            cfg.g_true = GTrue::parse(g)?;
        }
        if file.theta0.is_some() {
            cfg.theta0 = file.theta0;
        }
        take!(ov, seed => seed, out => out_dir, delta => delta, lambda => lambda, steps => steps,
              cells => cells, alpha => alpha, q => q);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.alpha.len() != self.q.len() {
            return Err(CliError::Config(format!(
                "{} orders but {} coefficients",
                self.alpha.len(),
                self.q.len()
            )));
        }
        self.spec()?;
        if self.steps == 0 || self.cells < 2 {
            return Err(CliError::Config("need steps ≥ 1 and cells ≥ 2".into()));
        }
        Ok(())
    }

    pub fn spec(&self) -> CliResult<MultiTermSpec> {
        MultiTermSpec::from_lists(&self.q, &self.alpha).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn contour(&self) -> CliResult<ContourSpec> {
        let c = ContourSpec::for_spec(&self.spec()?);
        Ok(match self.theta0 {
            Some(t) => c.with_theta0(t),
            None => c,
        })
    }

    pub fn space_grid(&self) -> CliResult<SpaceGrid> {
        Ok(SpaceGrid::unit(self.cells)?)
    }

    pub fn time_grid(&self) -> CliResult<TimeGrid> {
        Ok(TimeGrid::new(self.t_end, self.steps)?)
    }

    pub fn subdomain(&self) -> CliResult<Subdomain> {
        Ok(Subdomain::new(self.omega.clone())?)
    }

    /// Library configuration with `f = sin πx`, unit diffusivity and `g₀ = 0`.
    pub fn inverse_config(&self) -> CliResult<InverseConfig> {
        let space = self.space_grid()?;
        let time = self.time_grid()?;
        let cfg = InverseConfig {
            spec: self.spec()?,
            space,
            coefficients: EllipticCoefficients::laplacian(),
            time,
            f: space.sample(|x| (PI * x).sin()),
            omega: self.subdomain()?,
            lambda_reg: self.lambda,
            epsilon: self.epsilon,
            max_iters: self.max_iters,
            g0: TimeSeries::zeros(time),
            seed: self.seed,
            delta: self.delta,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `key = value` lines echoing the configuration, in a fixed order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let omega = self
            .omega
            .iter()
            .map(|(a, b)| format!("{a}:{b}"))
            .collect::<Vec<_>>()
            .join(",");
        vec![
            ("example".into(), self.id.clone()),
            ("alpha".into(), list(&self.alpha)),
            ("q".into(), list(&self.q)),
            ("t_end".into(), self.t_end.to_string()),
            ("steps".into(), self.steps.to_string()),
            ("cells".into(), self.cells.to_string()),
            ("omega".into(), omega),
            ("lambda".into(), self.lambda.to_string()),
            ("epsilon".into(), self.epsilon.to_string()),
            ("max_iters".into(), self.max_iters.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("delta".into(), self.delta.to_string()),
            ("g_true".into(), self.g_true.to_string()),
        ]
    }
}

fn is_set(key: &str, file: &ConfigFile, ov: &Overrides) -> bool {
    match key {
        "alpha" => file.alpha.is_some() || ov.alpha.is_some(),
        "q" => file.q.is_some() || ov.q.is_some(),
        "t_end" => file.t_end.is_some(),
        "steps" => file.steps.is_some() || ov.steps.is_some(),
        "cells" => file.cells.is_some() || ov.cells.is_some(),
        "omega" => file.omega.is_some(),
        "lambda" => file.lambda.is_some() || ov.lambda.is_some(),
        "epsilon" => file.epsilon.is_some(),
        "max_iters" => file.max_iters.is_some(),
        "seed" => file.seed.is_some() || ov.seed.is_some(),
        "delta" => file.delta.is_some() || ov.delta.is_some(),
        "g_true" => file.g_true.is_some(),
        _ => unreachable!("unknown key {key}"),
    }
}

/// Parses a comma-separated list of reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect()
}
