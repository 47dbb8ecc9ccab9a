//! Run configuration: a flat `key = value` file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SystemConfig, Topology};
use crate::rootfinder::ScanPolicy;

/// One coupling or a sweep.
///
/// In a config file: a number, a list of numbers, or a `"start:stop:step"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Single(f64),
    List(Vec<f64>),
    Range(String),
}

impl AlphaSpec {
    /// Parses the command-line form: `1.4`, `1.1,1.2`, or `1.05:1.6:0.025`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.contains(':') {
            let range = AlphaSpec::Range(text.to_string());
            range.values()?;
            return Ok(range);
        }
        let values = text
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("bad alpha value '{v}': {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(match values.as_slice() {
            [single] => AlphaSpec::Single(*single),
            _ => AlphaSpec::List(values),
        })
    }

    /// The coupling values in order; ranges include `stop` up to rounding.
    pub fn values(&self) -> Result<Vec<f64>> {
        let values = match self {
            AlphaSpec::Single(a) => vec![*a],
            AlphaSpec::List(v) => v.clone(),
            AlphaSpec::Range(text) => {
                let parts: Vec<f64> = text
                    .split(':')
                    .map(|p| {
                        p.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::Config(format!("bad alpha range '{text}': {e}")))
                    })
                    .collect::<Result<_>>()?;
                let [start, stop, step] = parts[..] else {
                    return Err(Error::Config(format!("alpha range '{text}' must be start:stop:step")));
                };
                if !(step > 0.0) || stop < start {
                    return Err(Error::Config(format!("alpha range '{text}' is empty or has a non-positive step")));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                // round to the step's decimal resolution so 1.05 + 9*0.025 prints as 1.275
                (0..count).map(|i| round_to_step(start + i as f64 * step, step)).collect()
            }
        };
        if values.is_empty() {
            return Err(Error::Config("alpha list is empty".into()));
        }
        if let Some(bad) = values.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::Config(format!("alpha must be positive, got {bad}")));
        }
        Ok(values)
    }
}

fn round_to_step(x: f64, step: f64) -> f64 {
    let digits = (-step.log10()).ceil().max(0.0) as i32 + 3;
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

/// Interaction positions: the prime construction or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PositionsSpec {
    Mode(String),
    Explicit(Vec<f64>),
}

impl Default for PositionsSpec {
    fn default() -> Self {
        PositionsSpec::Mode("primes".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub topology: Topology,
    pub alpha: AlphaSpec,
    /// Number of interactions for the prime construction.
    pub n: usize,
    pub positions: PositionsSpec,
    /// Number of roots to compute.
    pub roots: usize,
    /// Read roots from this file (first column of a roots table) instead of solving.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roots_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangency_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_rescans: Option<u32>,
    /// Levels dropped from the bottom of the spectrum before statistics.
    pub drop: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
    pub l_grid: Vec<f64>,
    /// Doublets compared in `perturb-check`.
    pub doublets: usize,
    /// Target sup-norm convergence of the GOE table generator.
    pub accuracy: f64,
    pub output: PathBuf,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            topology: Topology::Circle,
            alpha: AlphaSpec::Single(1.4),
            n: 24,
            positions: PositionsSpec::default(),
            roots: 100_000,
            roots_file: None,
            base_step: None,
            refine_tolerance: None,
            tangency_threshold: None,
            max_rescans: None,
            drop: 0,
            bin_width: None,
            l_grid: vec![0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 7.5, 10.0, 15.0, 20.0],
            doublets: 200,
            accuracy: 1e-9,
            output: PathBuf::from("out"),
            seed: 1,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    pub fn alphas(&self) -> Result<Vec<f64>> {
        self.alpha.values()
    }

    /// The single coupling of a non-sweep run.
    pub fn single_alpha(&self) -> Result<f64> {
        match self.alphas()?.as_slice() {
            [a] => Ok(*a),
            many => Err(Error::Config(format!(
                "this command takes one alpha, got {} values (use `sweep`)",
                many.len()
            ))),
        }
    }

    pub fn positions(&self) -> Result<Vec<f64>> {
        match &self.positions {
            PositionsSpec::Mode(m) if m == "primes" => Ok(crate::model::prime_positions(self.n)),
            PositionsSpec::Mode(m) => Err(Error::Config(format!(
                "positions must be \"primes\" or a list of numbers, got \"{m}\""
            ))),
            PositionsSpec::Explicit(x) => Ok(x.clone()),
        }
    }

    pub fn system(&self, alpha: f64) -> Result<SystemConfig> {
        SystemConfig::new(self.topology, alpha, self.positions()?).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn policy(&self, system: &SystemConfig) -> Result<ScanPolicy> {
        let mut p = ScanPolicy::for_config(system);
        if let Some(v) = self.base_step {
            p.base_step = v;
        }
        if let Some(v) = self.refine_tolerance {
            p.refine_tolerance = v;
        }
        if let Some(v) = self.tangency_threshold {
            p.tangency_threshold = v;
        }
        if let Some(v) = self.max_rescans {
            p.max_rescans = v;
        }
        p.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(p)
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<()> {
        for alpha in self.alphas()? {
            let system = self.system(alpha)?;
            self.policy(&system)?;
        }
        if self.roots == 0 {
            return Err(Error::Config("roots must be at least 1".into()));
        }
        if let Some(w) = self.bin_width {
            if !(w > 0.0) {
                return Err(Error::Config(format!("bin_width must be positive, got {w}")));
            }
        }
        if let Some(l) = self.l_grid.iter().find(|l| !(**l >= 0.0)) {
            return Err(Error::Config(format!("l_grid entries must be non-negative, got {l}")));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if !(self.accuracy > 0.0) {
            return Err(Error::Config(format!("accuracy must be positive, got {}", self.accuracy)));
        }
        Ok(())
    }
}
