//! Machine-readable outputs: tab-separated series with `#` comments and a TOML summary.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::model::Topology;
use crate::rootfinder::{CountCheck, Level};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub topology: Topology,
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub roots_found: usize,
    pub distinct_levels: usize,
    pub k_max: f64,
    pub max_residual: f64,
    pub method: String,
    pub count_check: CountCheck,
}

/// Distances of one spacing class (odd, even or all) to the reference laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: String,
    pub count: usize,
    pub raw_mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_f_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_f_goe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks_goe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub small_s_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub small_s_plain_slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    /// `ok`, `degenerate` or `error`.
    pub status: String,
    pub roots: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_f_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_f_goe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ks_goe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMinima {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_f_w_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_f_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_f_goe_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_f_goe: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSummary {
    pub doublets: usize,
    pub beta: f64,
    pub weak_coupling: bool,
    /// Largest `|k_exact - k_pred|`.
    pub max_error: f64,
    pub max_error_over_beta2: f64,
    /// Largest error of the predicted odd spacings `4|β|λ⁺_j`, in unfolded units.
    pub max_odd_spacing_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSummary {
    pub path: PathBuf,
    pub points: usize,
    pub step: f64,
    pub accuracy: f64,
    pub delta_wigner: f64,
    pub reference: f64,
    pub self_check_passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Result document of one command. Everything except `timings` is a
/// deterministic function of the configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<ClassSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_minima: Option<SweepMinima>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckResult>,
    /// Wall-clock seconds per phase.
    #[serde(default)]
    pub timings: BTreeMap<String, f64>,
}

impl RunSummary {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            warnings: Vec::new(),
            spectrum: None,
            classes: Vec::new(),
            sweep: Vec::new(),
            sweep_minima: None,
            perturbation: None,
            table: None,
            checks: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialize summary: {e}")))
    }

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

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?).map_err(|e| Error::io(path, e))
    }
}

/// Writer for a tab-separated table with `#` comment lines and a `#` column header.
pub struct Tsv {
    path: PathBuf,
    out: BufWriter<File>,
}

impl Tsv {
    pub fn create(path: &Path, comments: &[String], columns: &[&str]) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut tsv = Self {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        };
        for c in comments {
            tsv.line(&format!("# {c}"))?;
        }
        tsv.line(&format!("# {}", columns.join("\t")))?;
        Ok(tsv)
    }

    fn line(&mut self, text: &str) -> Result<()> {
        writeln!(self.out, "{text}").map_err(|e| Error::io(&self.path, e))
    }

    pub fn row(&mut self, cells: &[&dyn Display]) -> Result<()> {
        let text = cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("\t");
        self.line(&text)
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Rows of a tab-separated table, skipping `#` lines.
pub fn read_tsv(path: &Path) -> Result<Vec<Vec<String>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        rows.push(line.split('\t').map(str::to_string).collect());
    }
    Ok(rows)
}

/// Writes the roots table: one row per distinct root.
pub fn write_roots(path: &Path, topology: Topology, alpha: f64, levels: &[Level]) -> Result<()> {
    let comments = [
        format!("topology: {topology}"),
        format!("alpha: {alpha}"),
        "one row per distinct root; e = 2k".to_string(),
    ];
    let mut tsv = Tsv::create(path, &comments, &["index", "k", "e", "multiplicity", "residual", "gap"])?;
    for (i, l) in levels.iter().enumerate() {
        tsv.row(&[&(i + 1), &l.k, &(2.0 * l.k), &l.multiplicity, &l.residual, &l.gap])?;
    }
    tsv.finish()
}

/// Reads a roots table written by [`write_roots`].
pub fn read_roots(path: &Path) -> Result<(Topology, Vec<Level>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |detail: String| Error::Parse {
        path: path.to_path_buf(),
        detail,
    };
    let topology = text
        .lines()
        .find_map(|l| l.strip_prefix("# topology:"))
        .ok_or_else(|| bad("missing '# topology:' header".into()))?
        .trim()
        .parse::<Topology>()
        .map_err(|e| bad(e.to_string()))?;
    let mut levels = Vec::new();
    for (i, row) in read_tsv(path)?.into_iter().enumerate() {
        if row.len() != 6 {
            return Err(bad(format!("data row {} has {} columns, expected 6", i + 1, row.len())));
        }
        let num = |j: usize| row[j].parse::<f64>().map_err(|e| bad(format!("data row {}: {e}", i + 1)));
        let int = |j: usize| row[j].parse::<u64>().map_err(|e| bad(format!("data row {}: {e}", i + 1)));
        levels.push(Level {
            k: num(1)?,
            multiplicity: int(3)? as u8,
            residual: num(4)?,
            gap: int(5)?,
        });
    }
    if levels.windows(2).any(|w| w[1].k < w[0].k) {
        return Err(bad("roots are not sorted".into()));
    }
    Ok((topology, levels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("roots.tsv");
        let levels = vec![
            Level {
                k: 0.1,
                multiplicity: 1,
                residual: 1e-17,
                gap: 0,
            },
            Level {
                k: 1.0 / 3.0,
                multiplicity: 2,
                residual: 0.0,
                gap: 1,
            },
        ];
        write_roots(&path, Topology::Circle, 1.5, &levels).unwrap();
        let (topology, back) = read_roots(&path).unwrap();
        assert_eq!(topology, Topology::Circle);
        assert_eq!(back, levels);
    }

    #[test]
    fn summary_round_trip() {
        let mut s = RunSummary::new("spectrum", &RunConfig::default());
        s.classes.push(ClassSummary {
            class: "odd".into(),
            count: 10,
            raw_mean: 0.1,
            delta_f_w: Some(1e-4),
            delta_f_goe: None,
            ks_w: Some(0.01),
            ks_goe: None,
            small_s_exponent: None,
            small_s_plain_slope: None,
            note: Some("x".into()),
        });
        s.timings.insert("solve".into(), 1.25);
        let text = s.to_toml().unwrap();
        let back = RunSummary::from_toml(&text, Path::new("s.toml")).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_toml().unwrap(), text);
    }
}
