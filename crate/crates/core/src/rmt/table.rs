//! Tabulated GOE spacing distribution.
//!
//! The gap probability `E(s)` of the unit-density orthogonal ensemble is the
//! Fredholm determinant of the even part of the sine kernel on `(0, s/2)`,
//! `K_+(x, y) = K(x - y) + K(x + y)` with `K(u) = sin(πu)/(πu)`. The determinant
//! is discretized with Gauss–Legendre (Nyström), `E` is expanded in Chebyshev
//! polynomials on `[0, s_max]`, and the spacing CDF is `F(s) = 1 + E'(s)`.
//! At runtime only the committed table is read; values between grid points come
//! from a monotone cubic (PCHIP) interpolant.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::GaussRule;

/// `∫ (F_GOE - F_W)^2 ds` over the positive axis.
pub const GOE_WIGNER_DISTANCE: f64 = 3.9280e-5;
/// Allowed deviation of a table from [`GOE_WIGNER_DISTANCE`].
pub const GOE_WIGNER_TOLERANCE: f64 = 1e-6;

pub const DEFAULT_STEP: f64 = 0.005;
pub const DEFAULT_S_MAX: f64 = 6.0;

const SHIPPED: &str = include_str!("../../data/goe_table.txt");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub method: String,
    pub quadrature_points: usize,
    pub chebyshev_degree: usize,
    /// Sup-norm change in `F` against a run at doubled resolution.
    pub accuracy: f64,
    /// `∫ (F_GOE - F_W)^2 ds` computed from the table interpolant.
    pub delta_wigner: f64,
    pub generator: String,
}

/// `F_GOE` on the uniform grid `s_i = i * step`, `i = 0..values.len()`.
#[derive(Debug, Clone)]
pub struct GoeTable {
    pub step: f64,
    pub values: Vec<f64>,
    pub metadata: TableMetadata,
    spline: Pchip,
}

impl GoeTable {
    pub fn new(step: f64, values: Vec<f64>, metadata: TableMetadata) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) || values.len() < 3 {
            return Err(Error::Domain("GOE table needs a positive step and at least 3 points".into()));
        }
        if values[0] != 0.0 {
            return Err(Error::Domain(format!("F_GOE(0) must be 0, got {}", values[0])));
        }
        if values.windows(2).any(|w| w[1] < w[0]) || values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Domain("F_GOE values must be non-decreasing within [0, 1]".into()));
        }
        let spline = Pchip::new(step, &values);
        Ok(Self {
            step,
            values,
            metadata,
            spline,
        })
    }

    /// The committed table.
    pub fn shipped() -> &'static GoeTable {
        static TABLE: OnceLock<GoeTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            GoeTable::parse(SHIPPED, Path::new("data/goe_table.txt")).expect("committed GOE table is valid")
        })
    }

    pub fn s_max(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (i as f64 * self.step, v))
    }

    /// Interpolated CDF; 1 beyond the table.
    pub fn cdf(&self, s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else if s >= self.s_max() {
            1.0
        } else {
            self.spline.eval(s).clamp(0.0, 1.0)
        }
    }

    /// Derivative of the interpolant.
    pub fn pdf(&self, s: f64) -> f64 {
        if s <= 0.0 || s >= self.s_max() {
            0.0
        } else {
            self.spline.derivative(s).max(0.0)
        }
    }

    /// `∫ (F_table - F_W)^2 ds`, piecewise on the grid.
    pub fn delta_wigner(&self) -> f64 {
        let rule = GaussRule::new(8);
        let cells = self.values.len() - 1;
        let inside: f64 = (0..cells)
            .map(|i| {
                let a = i as f64 * self.step;
                rule.integrate(a, a + self.step, |s| {
                    let d = self.spline.eval(s) - super::wigner_cdf_unchecked(s);
                    d * d
                })
            })
            .sum();
        // beyond s_max the table is 1 and 1 - F_W = e^{-π s²/4} is negligible
        let tail = rule.integrate_composite(self.s_max(), self.s_max() + 4.0, 8, |s| {
            let d = 1.0 - super::wigner_cdf_unchecked(s);
            d * d
        });
        inside + tail
    }

    /// Fails unless the table reproduces [`GOE_WIGNER_DISTANCE`].
    pub fn self_check(&self) -> Result<f64> {
        let delta = self.delta_wigner();
        if (delta - GOE_WIGNER_DISTANCE).abs() >= GOE_WIGNER_TOLERANCE {
            return Err(Error::SelfCheck(format!(
                "∫(F_GOE - F_W)² = {delta:.6e}, expected {GOE_WIGNER_DISTANCE:.4e} ± {GOE_WIGNER_TOLERANCE:.0e}"
            )));
        }
        Ok(delta)
    }

    pub fn to_text(&self) -> String {
        let m = &self.metadata;
        let mut out = String::new();
        out.push_str("# GOE nearest-neighbour spacing CDF, unit mean spacing\n");
        let _ = writeln!(out, "# method: {}", m.method);
        let _ = writeln!(out, "# quadrature_points: {}", m.quadrature_points);
        let _ = writeln!(out, "# chebyshev_degree: {}", m.chebyshev_degree);
        let _ = writeln!(out, "# grid_step: {}", self.step);
        let _ = writeln!(out, "# s_max: {}", self.s_max());
        let _ = writeln!(out, "# accuracy: {:.3e}", m.accuracy);
        let _ = writeln!(out, "# delta_wigner: {:.8e}", m.delta_wigner);
        let _ = writeln!(out, "# generator: {}", m.generator);
        out.push_str("# columns: s F_GOE\n");
        for (s, v) in self.grid() {
            let _ = writeln!(out, "{s:.4} {v:.17e}");
        }
        out
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let bad = |detail: String| Error::Parse {
            path: path.to_path_buf(),
            detail,
        };
        let mut meta = TableMetadata {
            method: String::new(),
            quadrature_points: 0,
            chebyshev_degree: 0,
            accuracy: f64::NAN,
            delta_wigner: f64::NAN,
            generator: String::new(),
        };
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                if let Some((key, value)) = header.split_once(':') {
                    let value = value.trim();
                    let num = |v: &str| v.parse::<f64>().map_err(|e| bad(format!("line {}: {e}", lineno + 1)));
                    match key.trim() {
                        "method" => meta.method = value.to_string(),
                        "generator" => meta.generator = value.to_string(),
                        "quadrature_points" => meta.quadrature_points = num(value)? as usize,
                        "chebyshev_degree" => meta.chebyshev_degree = num(value)? as usize,
                        "accuracy" => meta.accuracy = num(value)?,
                        "delta_wigner" => meta.delta_wigner = num(value)?,
                        _ => {}
                    }
                }
                continue;
            }
            let mut cols = line.split_whitespace();
            let (Some(s), Some(v), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(bad(format!("line {}: expected two columns", lineno + 1)));
            };
            let parse = |t: &str| t.parse::<f64>().map_err(|e| bad(format!("line {}: {e}", lineno + 1)));
            grid.push(parse(s)?);
            values.push(parse(v)?);
        }
        if grid.len() < 3 {
            return Err(bad("fewer than 3 data rows".into()));
        }
        let step = grid[1] - grid[0];
        for (i, &s) in grid.iter().enumerate() {
            if (s - i as f64 * step).abs() > 1e-9 {
                return Err(bad(format!("grid is not uniform at row {}", i + 1)));
            }
        }
        GoeTable::new(step, values, meta).map_err(|e| bad(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Settings for [`generate_goe_table`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSettings {
    pub step: f64,
    pub s_max: f64,
    /// Largest acceptable sup-norm change under doubled resolution.
    pub accuracy: f64,
}

impl Default for GeneratorSettings {
    fn default() -> Self {
        Self {
            step: DEFAULT_STEP,
            s_max: DEFAULT_S_MAX,
            accuracy: 1e-9,
        }
    }
}

/// Gap probability `E(s)`: no level in an interval of length `s`.
pub fn gap_probability(s: f64, quadrature_points: usize) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    let rule = GaussRule::new(quadrature_points);
    gap_probability_with(&rule, s)
}

fn sinc_pi(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        let x = std::f64::consts::PI * u;
        x.sin() / x
    }
}

fn gap_probability_with(rule: &GaussRule, s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0;
    }
    let (y, w): (Vec<f64>, Vec<f64>) = rule.mapped(0.0, 0.5 * s).unzip();
    let m = y.len();
    let a = DMatrix::from_fn(m, m, |i, j| {
        let k = sinc_pi(y[i] - y[j]) + sinc_pi(y[i] + y[j]);
        let id = if i == j { 1.0 } else { 0.0 };
        id - (w[i] * w[j]).sqrt() * k
    });
    a.determinant()
}

/// Chebyshev expansion of `E` on `[0, s_max]`.
struct GapExpansion {
    s_max: f64,
    #[cfg_attr(not(test), allow(dead_code))]
    coeffs: Vec<f64>,
    deriv: Vec<f64>,
}

impl GapExpansion {
    fn new(s_max: f64, quadrature_points: usize, degree: usize) -> Self {
        let rule = GaussRule::new(quadrature_points);
        let nodes = degree + 1;
        let samples: Vec<f64> = (0..nodes)
            .into_par_iter()
            .map(|j| {
                let x = (std::f64::consts::PI * (j as f64 + 0.5) / nodes as f64).cos();
                gap_probability_with(&rule, 0.5 * s_max * (1.0 + x))
            })
            .collect();
        let coeffs = chebyshev_coefficients(&samples);
        let mut deriv = chebyshev_derivative(&coeffs);
        // d/ds = (2 / s_max) d/dx
        for c in &mut deriv {
            *c *= 2.0 / s_max;
        }
        Self { s_max, coeffs, deriv }
    }

    fn x(&self, s: f64) -> f64 {
        2.0 * s / self.s_max - 1.0
    }

    #[cfg(test)]
    fn gap(&self, s: f64) -> f64 {
        clenshaw(&self.coeffs, self.x(s))
    }

    fn cdf(&self, s: f64) -> f64 {
        1.0 + clenshaw(&self.deriv, self.x(s))
    }
}

/// Coefficients `c_k` with `f(x) = Σ' c_k T_k(x)` (first term halved folded in)
/// from samples at the Chebyshev–Gauss nodes.
fn chebyshev_coefficients(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let mut c: Vec<f64> = (0..n)
        .map(|k| {
            let sum: f64 = samples
                .iter()
                .enumerate()
                .map(|(j, &f)| f * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                .sum();
            2.0 * sum / n as f64
        })
        .collect();
    c[0] *= 0.5;
    c
}

fn chebyshev_derivative(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    if n < 2 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n];
    // d_{k-1} = d_{k+1} + 2k c_k, then halve d_0
    for k in (1..n).rev() {
        let next = if k + 1 < n { d[k + 1] } else { 0.0 };
        d[k - 1] = next + 2.0 * k as f64 * c[k];
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

fn clenshaw(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + c[0]
}

fn tabulate(expansion: &GapExpansion, step: f64, points: usize) -> Vec<f64> {
    let mut values: Vec<f64> = (0..points)
        .map(|i| expansion.cdf(i as f64 * step).clamp(0.0, 1.0))
        .collect();
    values[0] = 0.0;
    // remove rounding-level dips so the table is exactly monotone
    for i in 1..points {
        if values[i] < values[i - 1] {
            values[i] = values[i - 1];
        }
    }
    values
}

/// Builds the GOE table and then runs [`GoeTable::self_check`] on it.
pub fn generate_goe_table(settings: &GeneratorSettings) -> Result<GoeTable> {
    let table = build_goe_table(settings)?;
    table.self_check()?;
    Ok(table)
}

/// Builds the GOE table, doubling the resolution until two successive runs agree
/// to `settings.accuracy`. The distance to the Wigner CDF is recorded in the
/// metadata but not checked.
pub fn build_goe_table(settings: &GeneratorSettings) -> Result<GoeTable> {
    let GeneratorSettings { step, s_max, accuracy } = *settings;
    if !(step > 0.0 && s_max > step && accuracy > 0.0) {
        return Err(Error::Domain("invalid generator settings".into()));
    }
    let points = (s_max / step).round() as usize + 1;
    let (mut m, mut degree) = (24usize, 64usize);
    let mut current = tabulate(&GapExpansion::new(s_max, m, degree), step, points);
    loop {
        let finer = tabulate(&GapExpansion::new(s_max, 2 * m, 2 * degree), step, points);
        let change = current
            .iter()
            .zip(&finer)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        m *= 2;
        degree *= 2;
        current = finer;
        if change <= accuracy {
            let metadata = TableMetadata {
                method: "fredholm-nystrom gauss-legendre, chebyshev derivative of the gap probability".into(),
                quadrature_points: m,
                chebyshev_degree: degree,
                accuracy: change,
                delta_wigner: f64::NAN,
                generator: concat!("circlespec ", env!("CARGO_PKG_VERSION")).into(),
            };
            let mut table = GoeTable::new(step, current, metadata)?;
            table.metadata.delta_wigner = table.delta_wigner();
            return Ok(table);
        }
        if m > 512 {
            return Err(Error::SelfCheck(format!(
                "GOE table did not converge: change {change:.3e} at {m} quadrature points"
            )));
        }
    }
}

/// Monotone piecewise cubic Hermite interpolant on a uniform grid: centred
/// slopes, limited with the Fritsch–Carlson condition where they would overshoot.
#[derive(Debug, Clone)]
struct Pchip {
    step: f64,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(step: f64, y: &[f64]) -> Self {
        let n = y.len();
        let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / step).collect();
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let (a, b) = (delta[i - 1], delta[i]);
            if a * b > 0.0 {
                d[i] = 0.5 * (a + b);
            }
        }
        let end = |d0: f64, d1: f64| {
            let v = 0.5 * (3.0 * d0 - d1);
            if v * d0 <= 0.0 {
                0.0
            } else {
                v
            }
        };
        d[0] = end(delta[0], delta[1]);
        d[n - 1] = end(delta[n - 2], delta[n - 3]);
        for (i, &dk) in delta.iter().enumerate() {
            if dk == 0.0 {
                d[i] = 0.0;
                d[i + 1] = 0.0;
                continue;
            }
            let (a, b) = (d[i] / dk, d[i + 1] / dk);
            let r = a.hypot(b);
            if r > 3.0 {
                d[i] = 3.0 * a / r * dk;
                d[i + 1] = 3.0 * b / r * dk;
            }
        }
        Self {
            step,
            y: y.to_vec(),
            d,
        }
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let i = ((s / self.step).floor() as usize).min(self.y.len() - 2);
        (i, s / self.step - i as f64)
    }

    fn eval(&self, s: f64) -> f64 {
        let (i, t) = self.locate(s);
        let h = self.step;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h * h10 * self.d[i] + h01 * self.y[i + 1] + h * h11 * self.d[i + 1]
    }

    fn derivative(&self, s: f64) -> f64 {
        let (i, t) = self.locate(s);
        let h = self.step;
        let t2 = t * t;
        let h00 = 6.0 * t2 - 6.0 * t;
        let h10 = 3.0 * t2 - 4.0 * t + 1.0;
        let h01 = -6.0 * t2 + 6.0 * t;
        let h11 = 3.0 * t2 - 2.0 * t;
        (h00 * self.y[i] + h01 * self.y[i + 1]) / h + h10 * self.d[i] + h11 * self.d[i + 1]
    }
}
