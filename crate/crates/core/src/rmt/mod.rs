//! Reference level-spacing laws and number-variance curves.
//!
//! All distributions are normalized to unit mean spacing.

mod oracle;
pub mod special;
pub mod table;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::adaptive;

pub use oracle::{goe_mc_oracle, goe_mc_unfolded_levels, OracleSample};
pub use table::{build_goe_table, generate_goe_table, GeneratorSettings, GoeTable, GOE_WIGNER_DISTANCE, GOE_WIGNER_TOLERANCE};

fn check_s(s: f64) -> Result<f64> {
    if s >= 0.0 {
        Ok(s)
    } else {
        Err(Error::Domain(format!("spacing must be non-negative, got {s}")))
    }
}

pub(crate) fn wigner_cdf_unchecked(s: f64) -> f64 {
    -(-PI * s * s / 4.0).exp_m1()
}

/// Wigner surmise `(π/2) s e^{-π s²/4}`.
pub fn wigner_pdf(s: f64) -> Result<f64> {
    let s = check_s(s)?;
    Ok(0.5 * PI * s * (-PI * s * s / 4.0).exp())
}

pub fn wigner_cdf(s: f64) -> Result<f64> {
    Ok(wigner_cdf_unchecked(check_s(s)?))
}

pub fn poisson_pdf(s: f64) -> Result<f64> {
    Ok((-check_s(s)?).exp())
}

pub fn poisson_cdf(s: f64) -> Result<f64> {
    Ok(-(-check_s(s)?).exp_m1())
}

/// Exact GOE spacing CDF from the committed table.
pub fn goe_cdf(s: f64) -> Result<f64> {
    Ok(GoeTable::shipped().cdf(check_s(s)?))
}

/// GOE spacing density, the derivative of the interpolated table.
pub fn goe_pdf(s: f64) -> Result<f64> {
    Ok(GoeTable::shipped().pdf(check_s(s)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceDistribution {
    Wigner,
    Goe,
    Poisson,
}

impl ReferenceDistribution {
    pub const ALL: [ReferenceDistribution; 3] = [Self::Wigner, Self::Goe, Self::Poisson];

    /// Density; zero for negative `s`.
    pub fn pdf(self, s: f64) -> f64 {
        if s < 0.0 {
            return 0.0;
        }
        match self {
            Self::Wigner => 0.5 * PI * s * (-PI * s * s / 4.0).exp(),
            Self::Goe => GoeTable::shipped().pdf(s),
            Self::Poisson => (-s).exp(),
        }
    }

    /// CDF; zero for negative `s`.
    pub fn cdf(self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Wigner => wigner_cdf_unchecked(s),
            Self::Goe => GoeTable::shipped().cdf(s),
            Self::Poisson => -(-s).exp_m1(),
        }
    }

    /// Smallest `s` with `1 - F(s) < 1e-8`.
    pub fn tail_cutoff(self) -> f64 {
        const TAIL: f64 = 1e-8;
        match self {
            Self::Wigner => (4.0 * (1.0 / TAIL).ln() / PI).sqrt(),
            Self::Poisson => (1.0 / TAIL).ln(),
            Self::Goe => {
                let t = GoeTable::shipped();
                t.grid()
                    .find(|&(_, v)| 1.0 - v < TAIL)
                    .map_or(t.s_max(), |(s, _)| s)
            }
        }
    }
}

impl fmt::Display for ReferenceDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Wigner => "wigner",
            Self::Goe => "goe",
            Self::Poisson => "poisson",
        })
    }
}

impl FromStr for ReferenceDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wigner" => Ok(Self::Wigner),
            "goe" => Ok(Self::Goe),
            "poisson" => Ok(Self::Poisson),
            other => Err(Error::Config(format!("unknown reference distribution '{other}'"))),
        }
    }
}

/// `∫_0^∞ (F_a - F_b)^2 ds`.
pub fn reference_distance(a: ReferenceDistribution, b: ReferenceDistribution) -> f64 {
    let cut = a.tail_cutoff().max(b.tail_cutoff()) + 1.0;
    let f = |s: f64| {
        let d = a.cdf(s) - b.cdf(s);
        d * d
    };
    // unit pieces keep the GOE spline kinks inside short intervals
    (0..cut.ceil() as usize)
        .map(|i| adaptive(&f, i as f64, i as f64 + 1.0, 1e-14))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Goe,
    Gue,
    Poisson,
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Goe => "goe",
            Self::Gue => "gue",
            Self::Poisson => "poisson",
        })
    }
}

/// Sine-kernel number variance `Σ²(L)` for unit mean density.
pub fn number_variance_reference(ensemble: Ensemble, l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("window length must be positive, got {l}")));
    }
    let gue = |l: f64| {
        let x = 2.0 * PI * l;
        let (si, ci) = special::si_ci(x);
        ((x.ln() + special::EULER_GAMMA + 1.0 - x.cos() - ci) / (PI * PI) + l * (1.0 - 2.0 * si / PI)).max(0.0)
    };
    Ok(match ensemble {
        Ensemble::Poisson => l,
        Ensemble::Gue => gue(l),
        Ensemble::Goe => {
            let si = special::si(PI * l) / PI;
            (2.0 * gue(l) + si * si - si).max(0.0)
        }
    })
}
