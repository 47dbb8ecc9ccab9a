//! Unfolding, parity-split spacings, distances to reference laws and number variance.
//!
//! Levels are `e = 2k`, which already have unit mean density on both topologies.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::quad::{adaptive, GaussRule};
use crate::rmt::ReferenceDistribution;
use crate::model::Topology;
use crate::rootfinder::{Level, Spectrum};

/// Unfolded levels `e = 2k`, multiplicity-expanded.
///
/// On the ring the ground level (the one below the first Dirichlet eigenvalue,
/// which continues the free `k = 0` state) is always removed. `drop` further
/// levels are removed from the bottom.
pub fn unfold(spectrum: &Spectrum, drop: usize) -> Vec<f64> {
    unfold_levels(spectrum.topology, &spectrum.levels, drop)
}

/// [`unfold`] for a bare level list, e.g. one read back from a roots table.
pub fn unfold_levels(topology: Topology, levels: &[Level], drop: usize) -> Vec<f64> {
    levels
        .iter()
        .filter(|l| l.gap != 0 || topology == Topology::Segment)
        .flat_map(|l| std::iter::repeat_n(2.0 * l.k, l.multiplicity as usize))
        .skip(drop)
        .collect()
}

/// `e = 2k` for a plain sorted root list.
pub fn unfold_roots(roots: &[f64]) -> Vec<f64> {
    roots.iter().map(|k| 2.0 * k).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

/// Spacings `s_l = e_{l+1} - e_l` with `l = 1` at the first level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingSeries {
    pub levels: Vec<f64>,
    pub spacings: Vec<f64>,
}

impl SpacingSeries {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "need at least 2 levels for a spacing, got {}",
                levels.len()
            )));
        }
        if levels.iter().any(|e| !e.is_finite()) || levels.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain("levels must be finite and sorted".into()));
        }
        let spacings = levels.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self { levels, spacings })
    }

    /// Parity of spacing `i` (0-based), i.e. of `l = i + 1`.
    pub fn parity(i: usize) -> Parity {
        if i % 2 == 0 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn odd(&self) -> Vec<f64> {
        self.spacings.iter().step_by(2).copied().collect()
    }

    pub fn even(&self) -> Vec<f64> {
        self.spacings.iter().skip(1).step_by(2).copied().collect()
    }

    pub fn mean_spacing(&self) -> f64 {
        mean(&self.spacings)
    }
}

/// `(odd, even)` spacings: `{s_1, s_3, ...}` and `{s_2, s_4, ...}`.
pub fn parity_split(levels: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if levels.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "parity split needs at least 3 levels, got {}",
            levels.len()
        )));
    }
    let series = SpacingSeries::new(levels.to_vec())?;
    Ok((series.odd(), series.even()))
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Rescales a sample to unit mean.
pub fn normalize_mean(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    let m = mean(sample);
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InsufficientData(format!(
            "sample mean is {m}; cannot normalize a degenerate sample"
        )));
    }
    Ok(sample.iter().map(|s| s / m).collect())
}

/// Right-continuous step function `F(s) = #{s_i <= s} / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::InsufficientData("empty sample".into()));
        }
        if sample.iter().any(|s| s.is_nan()) {
            return Err(Error::Domain("sample contains NaN".into()));
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= s) as f64 / self.len() as f64
    }

    /// Distinct sample values with the CDF just below and at each.
    fn jumps(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.len() as f64;
        let mut i = 0;
        std::iter::from_fn(move || {
            if i >= self.sorted.len() {
                return None;
            }
            let v = self.sorted[i];
            let below = i as f64 / n;
            while i < self.sorted.len() && self.sorted[i] == v {
                i += 1;
            }
            Some((v, below, i as f64 / n))
        })
    }
}

/// `∫_0^∞ (F(s) - G(s))^2 ds` for a reference CDF `G`.
pub fn delta_f(ecdf: &EmpiricalCdf, reference: ReferenceDistribution) -> f64 {
    delta_f_with(ecdf, |s| reference.cdf(s), reference.tail_cutoff())
}

/// As [`delta_f`] for an arbitrary CDF `g`, integrated up to
/// `max(sample max, tail_cutoff)`.
///
/// `F` is constant between consecutive sample values, so the integral is a sum
/// of smooth pieces, each done by adaptive quadrature.
pub fn delta_f_with(ecdf: &EmpiricalCdf, g: impl Fn(f64) -> f64, tail_cutoff: f64) -> f64 {
    let g = &g;
    let sq = |c: f64| move |s: f64| (c - g(s)).powi(2);
    let smax = *ecdf.sorted.last().expect("non-empty");
    let cut = smax.max(tail_cutoff);
    // absolute tolerance per piece so the total stays near 1e-10
    let tol = |a: f64, b: f64| 1e-10 * ((b - a) / cut.max(1.0)).max(1e-6);
    let mut total = 0.0;
    let mut left = 0.0;
    let mut level = 0.0;
    for (v, _, after) in ecdf.jumps() {
        if v > left {
            total += adaptive(&sq(level), left, v, tol(left, v));
        }
        left = left.max(v);
        level = after;
    }
    if cut > left {
        // the tail of 1 - g can be long (Poisson): split it into unit pieces
        let pieces = (cut - left).ceil() as usize;
        let h = (cut - left) / pieces as f64;
        for i in 0..pieces {
            let a = left + i as f64 * h;
            total += adaptive(&sq(1.0), a, a + h, tol(a, a + h));
        }
    }
    total
}

/// `sup_s |F(s) - G(s)|`, including the left limits of `F` at its jumps.
pub fn ks_distance(ecdf: &EmpiricalCdf, g: impl Fn(f64) -> f64) -> f64 {
    ecdf.jumps()
        .map(|(v, below, at)| {
            let gv = g(v);
            (gv - below).abs().max((at - gv).abs())
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Counts divided by `N * width`; integrates to 1.
    pub densities: Vec<f64>,
}

impl Histogram {
    pub fn width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }
}

const MAX_BINS: usize = 100_000;

/// Freedman–Diaconis width `2 IQR N^{-1/3}`; 0 for a sample without spread.
pub fn freedman_diaconis_width(sorted: &[f64]) -> f64 {
    let q = |p: f64| {
        let pos = p * (sorted.len() - 1) as f64;
        let i = pos.floor() as usize;
        let t = pos - i as f64;
        sorted[i] + t * (sorted[(i + 1).min(sorted.len() - 1)] - sorted[i])
    };
    2.0 * (q(0.75) - q(0.25)) * (sorted.len() as f64).powf(-1.0 / 3.0)
}

/// Density-normalized histogram. Bins are aligned to multiples of the width;
/// without `bin_width` the Freedman–Diaconis rule is used.
pub fn histogram_density(sample: &[f64], bin_width: Option<f64>) -> Result<Histogram> {
    let ecdf = EmpiricalCdf::new(sample)?;
    let sorted = ecdf.sorted();
    let (lo, hi) = (sorted[0], *sorted.last().unwrap());
    let mut width = match bin_width {
        Some(w) if !(w > 0.0 && w.is_finite()) => {
            return Err(Error::Domain(format!("bin width must be positive, got {w}")))
        }
        Some(w) => w,
        None => freedman_diaconis_width(sorted),
    };
    if !(width > 0.0) {
        // no spread in the middle half: fall back to √N bins over the range, or one unit bin
        width = if hi > lo { (hi - lo) / (sorted.len() as f64).sqrt().ceil() } else { 1.0 };
    }
    if (hi - lo) / width > MAX_BINS as f64 {
        width = (hi - lo) / MAX_BINS as f64;
    }
    let first = if hi > lo { (lo / width).floor() * width } else { lo - 0.5 * width };
    let bins = (((hi - first) / width).floor() as usize + 1).max(1);
    let mut counts = vec![0u64; bins];
    for &s in sorted {
        let b = (((s - first) / width).floor() as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = sorted.len() as f64;
    let edges = (0..=bins).map(|i| first + i as f64 * width).collect();
    let densities = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    Ok(Histogram {
        edges,
        counts,
        densities,
    })
}

pub const SMALL_S_MIN_SAMPLES: usize = 10_000;
pub const SMALL_S_MIN_BIN_COUNT: u64 = 50;
const SMALL_S_BINS_PER_DECADE: usize = 10;
const SMALL_S_TOP_QUANTILE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// `a` from the fit `ln P = a ln s - c (s/q)² + b`.
    pub exponent: f64,
    /// Plain least-squares slope of `ln P` against `ln s` on the same bins.
    pub plain_slope: f64,
    /// `(ln s, ln density, count)` of the bins used.
    pub points: Vec<(f64, f64, u64)>,
    /// Upper end `q` of the fitted decade.
    pub upper: f64,
}

/// Exponent `a` of `P(s) ∝ s^a` near zero.
///
/// The sample is binned on a log scale (ten bins per decade) over the decade
/// below its 20% quantile `q`; bins with fewer than 50 counts are dropped. The
/// count-weighted fit of `ln P = a ln s - c (s/q)² + b` absorbs the leading
/// Gaussian-type bend of the density, which otherwise biases a plain log-log slope
/// well before the power law stops holding.
pub fn small_s_exponent(sample: &[f64]) -> Result<PowerLawFit> {
    if sample.len() < SMALL_S_MIN_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "small-s fit needs at least {SMALL_S_MIN_SAMPLES} samples, got {}",
            sample.len()
        )));
    }
    let ecdf = EmpiricalCdf::new(sample)?;
    let sorted = ecdf.sorted();
    let upper = sorted[(sorted.len() as f64 * SMALL_S_TOP_QUANTILE) as usize];
    if !(upper > 0.0) {
        return Err(Error::InsufficientData(
            "a fifth of the sample sits at zero; no small-s decade to fit".into(),
        ));
    }
    let n = sorted.len() as f64;
    let bins = SMALL_S_BINS_PER_DECADE;
    let mut points = Vec::new();
    for i in 0..bins {
        let a = upper * 10f64.powf(i as f64 / bins as f64 - 1.0);
        let b = upper * 10f64.powf((i + 1) as f64 / bins as f64 - 1.0);
        let count = (sorted.partition_point(|&x| x < b) - sorted.partition_point(|&x| x < a)) as u64;
        if count >= SMALL_S_MIN_BIN_COUNT {
            let density = count as f64 / (n * (b - a));
            points.push(((a * b).sqrt().ln(), density.ln(), count));
        }
    }
    if points.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "only {} small-s bins hold {SMALL_S_MIN_BIN_COUNT} or more samples",
            points.len()
        )));
    }
    let rows = points.len();
    let weight = |c: u64| (c as f64).sqrt();
    let design = DMatrix::from_fn(rows, 3, |r, c| {
        let (x, _, count) = points[r];
        let u = x.exp() / upper;
        weight(count) * [x, u * u, 1.0][c]
    });
    let rhs = DVector::from_fn(rows, |r, _| weight(points[r].2) * points[r].1);
    let solution = design
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::InsufficientData(format!("small-s fit failed: {e}")))?;
    let m = rows as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(x, y, _)| (sx + x / m, sy + y / m));
    let (sxy, sxx) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y, _)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    Ok(PowerLawFit {
        exponent: solution[0],
        plain_slope: sxy / sxx,
        points,
        upper,
    })
}

pub const NUMBER_VARIANCE_MIN_LEVELS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberVarianceCurve {
    pub l: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub windows: Vec<usize>,
}

/// `Σ²(L)`: variance of the level count in windows `[a, a + L)` whose start `a`
/// advances from the first level in strides of `L/4`.
pub fn number_variance(levels: &[f64], grid: &[f64]) -> Result<NumberVarianceCurve> {
    if levels.len() < NUMBER_VARIANCE_MIN_LEVELS {
        return Err(Error::InsufficientData(format!(
            "number variance needs at least {NUMBER_VARIANCE_MIN_LEVELS} levels, got {}",
            levels.len()
        )));
    }
    number_variance_unchecked(levels, grid)
}

/// [`number_variance`] without the minimum-size requirement.
pub fn number_variance_unchecked(levels: &[f64], grid: &[f64]) -> Result<NumberVarianceCurve> {
    if levels.len() < 2 || levels.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("levels must be sorted with at least 2 entries".into()));
    }
    let (first, last) = (levels[0], *levels.last().unwrap());
    let span = last - first;
    let mut curve = NumberVarianceCurve {
        l: Vec::with_capacity(grid.len()),
        sigma2: Vec::with_capacity(grid.len()),
        windows: Vec::with_capacity(grid.len()),
    };
    for &l in grid {
        if !(l >= 0.0) {
            return Err(Error::Domain(format!("window length must be non-negative, got {l}")));
        }
        if l > span {
            return Err(Error::Domain(format!("window length {l} exceeds the spectrum span {span}")));
        }
        let (var, count) = if l == 0.0 {
            (0.0, 0)
        } else {
            let stride = l / 4.0;
            let windows = ((span - l) / stride).floor() as usize + 1;
            let (mut s1, mut s2) = (0.0, 0.0);
            for w in 0..windows {
                let a = first + w as f64 * stride;
                let c = (levels.partition_point(|&e| e < a + l) - levels.partition_point(|&e| e < a)) as f64;
                s1 += c;
                s2 += c * c;
            }
            let m = s1 / windows as f64;
            ((s2 / windows as f64 - m * m).max(0.0), windows)
        };
        curve.l.push(l);
        curve.sigma2.push(var);
        curve.windows.push(count);
    }
    Ok(curve)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub n: usize,
    /// Mean of the raw spacings before rescaling to unit mean.
    pub raw_mean: f64,
    pub delta_f_w: f64,
    pub delta_f_goe: f64,
    pub ks_w: f64,
    pub ks_goe: f64,
    pub histogram: Histogram,
}

impl ComparisonReport {
    /// Rescales `spacings` to unit mean and compares them with the Wigner and GOE laws.
    pub fn new(spacings: &[f64], bin_width: Option<f64>) -> Result<Self> {
        let normalized = normalize_mean(spacings)?;
        let ecdf = EmpiricalCdf::new(&normalized)?;
        Ok(Self {
            n: normalized.len(),
            raw_mean: mean(spacings),
            delta_f_w: delta_f(&ecdf, ReferenceDistribution::Wigner),
            delta_f_goe: delta_f(&ecdf, ReferenceDistribution::Goe),
            ks_w: ks_distance(&ecdf, |s| ReferenceDistribution::Wigner.cdf(s)),
            ks_goe: ks_distance(&ecdf, |s| ReferenceDistribution::Goe.cdf(s)),
            histogram: histogram_density(&normalized, bin_width)?,
        })
    }
}

/// KS distance between two samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let fa = EmpiricalCdf::new(a)?;
    let fb = EmpiricalCdf::new(b)?;
    let mut d: f64 = 0.0;
    for &v in fa.sorted().iter().chain(fb.sorted()) {
        d = d.max((fa.eval(v) - fb.eval(v)).abs());
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalFit {
    pub mean: f64,
    pub std_dev: f64,
    pub ks: f64,
}

/// Normal law with the sample mean and standard deviation, and its KS distance.
pub fn normal_fit(sample: &[f64]) -> Result<NormalFit> {
    if sample.len() < 2 {
        return Err(Error::InsufficientData("normal fit needs at least 2 samples".into()));
    }
    let m = mean(sample);
    let var = sample.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (sample.len() - 1) as f64;
    let sd = var.sqrt();
    let normal = Normal::new(m, sd)
        .map_err(|e| Error::InsufficientData(format!("cannot fit a normal law: {e}")))?;
    let ecdf = EmpiricalCdf::new(sample)?;
    Ok(NormalFit {
        mean: m,
        std_dev: sd,
        ks: ks_distance(&ecdf, |s| normal.cdf(s)),
    })
}

/// `∫ g(1 - g) ds` over `[0, cut]`: the expected `delta_f` of an i.i.d. sample of
/// size `N` drawn from `g` is this divided by `N`.
pub fn ecdf_noise_integral(g: impl Fn(f64) -> f64, cut: f64) -> f64 {
    GaussRule::new(32).integrate_composite(0.0, cut, (cut.ceil() as usize).max(1) * 4, |s| {
        let v = g(s);
        v * (1.0 - v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{prime_positions, SystemConfig, Topology};
    use crate::rootfinder::{find_spectrum, Coverage, ScanPolicy};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn wigner_samples(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                (-4.0 * (1.0 - u).ln() / PI).sqrt()
            })
            .collect()
    }

    fn quantiles(n: usize, inv: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|i| inv((i as f64 + 0.5) / n as f64)).collect()
    }

    fn wigner_inv(u: f64) -> f64 {
        (-4.0 * (1.0 - u).ln() / PI).sqrt()
    }

    #[test]
    fn unfold_examples() {
        let free = SystemConfig::new(Topology::Circle, 1.0, prime_positions(3)).unwrap();
        let sp = find_spectrum(&free, Coverage::UpTo(2.0), &ScanPolicy::for_config(&free)).unwrap();
        assert_eq!(unfold(&sp, 0), vec![2.0, 2.0, 4.0, 4.0]);
        assert_eq!(unfold(&sp, 1), vec![2.0, 4.0, 4.0]);
        let seg = SystemConfig::new(Topology::Segment, 1.0, prime_positions(3)).unwrap();
        let sp = find_spectrum(&seg, Coverage::Count(3), &ScanPolicy::for_config(&seg)).unwrap();
        let e = unfold(&sp, 0);
        for (a, b) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(unfold_roots(&[0.5, 1.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn ground_level_is_dropped_on_the_ring() {
        let cfg = SystemConfig::new(Topology::Circle, 2.0, vec![1.3]).unwrap();
        let sp = find_spectrum(&cfg, Coverage::Count(5), &ScanPolicy::for_config(&cfg)).unwrap();
        assert_eq!(sp.levels[0].gap, 0);
        let e = unfold(&sp, 0);
        assert_eq!(e.len(), 4);
        assert!((e[0] - 2.0 * sp.levels[1].k).abs() < 1e-15);
    }

    #[test]
    fn parity_split_examples() {
        let levels = [2.0, 2.0, 4.0, 4.0, 6.0, 6.0];
        let (odd, even) = parity_split(&levels).unwrap();
        assert_eq!(odd, vec![0.0, 0.0, 0.0]);
        assert_eq!(even, vec![2.0, 2.0]);
        assert!(parity_split(&[1.0, 2.0]).is_err());
        let s = SpacingSeries::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(s.spacings.iter().all(|&x| x == 1.0));
        assert_eq!(SpacingSeries::parity(0), Parity::Odd);
        assert!(SpacingSeries::new(vec![2.0, 1.0]).is_err());
    }

    #[test]
    fn ks_examples() {
        let f = EmpiricalCdf::new(&[1.0, 1.0, 1.0]).unwrap();
        let fw = |s: f64| ReferenceDistribution::Wigner.cdf(s);
        // the left limit at s = 1 is 0, so the sup is F_W(1)
        assert!((ks_distance(&f, fw) - (1.0 - (-PI / 4.0).exp())).abs() < 1e-12);
        let n = 1000;
        let q = EmpiricalCdf::new(&quantiles(n, wigner_inv)).unwrap();
        assert!(ks_distance(&q, fw) <= 0.5 / n as f64 + 1e-12);
        assert!(EmpiricalCdf::new(&[]).is_err());
    }

    #[test]
    fn delta_f_matches_noise_identity() {
        // E[ΔF] = (1/N) ∫ F(1 - F) ds = (1 - 1/√2)/N for the Wigner law
        let identity = ecdf_noise_integral(|s| ReferenceDistribution::Wigner.cdf(s), 8.0);
        assert!((identity - (1.0 - 0.5f64.sqrt())).abs() < 1e-10);
        let n = 20_000;
        let trials = 20;
        let avg: f64 = (0..trials)
            .map(|t| delta_f(&EmpiricalCdf::new(&wigner_samples(n, t)).unwrap(), ReferenceDistribution::Wigner))
            .sum::<f64>()
            / trials as f64;
        let expected = identity / n as f64;
        assert!((avg / expected - 1.0).abs() < 0.25, "{avg:e} vs {expected:e}");
        // quantile samples sit far below the i.i.d. level
        let q = EmpiricalCdf::new(&quantiles(n, wigner_inv)).unwrap();
        assert!(delta_f(&q, ReferenceDistribution::Wigner) < 0.1 * expected);
    }

    #[test]
    fn delta_f_of_a_point_mass() {
        // ∫_0^1 F_P² + ∫_1^∞ (1 - F_P)² with F_P = 1 - e^{-s}
        let f = EmpiricalCdf::new(&[1.0]).unwrap();
        let e1 = (-1.0f64).exp();
        let exact = (1.0 - 2.0 * (1.0 - e1) + 0.5 * (1.0 - e1 * e1)) + 0.5 * e1 * e1;
        assert!((delta_f(&f, ReferenceDistribution::Poisson) - exact).abs() < 1e-9);
    }

    #[test]
    fn histogram_examples() {
        let uniform: Vec<f64> = (0..10_000).map(|i| (i as f64 + 0.5) / 10_000.0).collect();
        let h = histogram_density(&uniform, Some(0.1)).unwrap();
        assert_eq!(h.counts.len(), 10);
        assert!(h.densities.iter().all(|&d| (d - 1.0).abs() < 1e-9));
        let w = histogram_density(&wigner_samples(100_000, 3), None).unwrap();
        let peak = w
            .centers()
            .zip(&w.densities)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!((peak - (2.0 / PI).sqrt()).abs() < 0.1, "{peak}");
        let area: f64 = w.densities.iter().map(|d| d * w.width()).sum();
        assert!((area - 1.0).abs() < 1e-12);
        let single = histogram_density(&[2.0; 50], None).unwrap();
        assert_eq!(single.counts, vec![50]);
        assert!(single.edges[0] < 2.0 && 2.0 < single.edges[1]);
        assert!(histogram_density(&[], None).is_err());
        assert!(histogram_density(&[1.0], Some(-1.0)).is_err());
    }

    #[test]
    fn small_s_examples() {
        let n = 100_000;
        let w = wigner_samples(n, 11);
        let fit = small_s_exponent(&w).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.3, "{}", fit.exponent);
        let w2 = wigner_samples(n, 12);
        let sum: Vec<f64> = w.iter().zip(&w2).map(|(a, b)| a + b).collect();
        let fit = small_s_exponent(&sum).unwrap();
        assert!((fit.exponent - 3.0).abs() < 0.3, "{}", fit.exponent);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let fit = small_s_exponent(&u).unwrap();
        assert!(fit.exponent.abs() < 0.3, "{}", fit.exponent);
        assert!(small_s_exponent(&u[..100]).is_err());
        assert!(small_s_exponent(&vec![0.0; 20_000]).is_err());
    }

    #[test]
    fn number_variance_examples() {
        let rigid: Vec<f64> = (1..=2000).map(f64::from).collect();
        let c = number_variance(&rigid, &[0.0, 1.0, 2.0, 5.0]).unwrap();
        assert!(c.sigma2.iter().all(|&v| v == 0.0));
        assert_eq!(c.windows[0], 0);
        // every half-open window of length 2 holds exactly one doublet
        let doubled: Vec<f64> = (1..=1000).flat_map(|j| [2.0 * j as f64; 2]).collect();
        let c = number_variance(&doubled, &[2.0]).unwrap();
        assert_eq!(c.sigma2[0], 0.0);
        // at L = 1 a window holds 0 or 2 levels with equal weight
        let c = number_variance(&doubled, &[1.0]).unwrap();
        assert!((c.sigma2[0] - 1.0).abs() < 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut e = 0.0;
        let poisson: Vec<f64> = (0..200_000)
            .map(|_| {
                e -= (1.0 - rng.random::<f64>()).ln();
                e
            })
            .collect();
        let c = number_variance(&poisson, &[1.0, 5.0]).unwrap();
        assert!((c.sigma2[0] - 1.0).abs() < 0.05 && (c.sigma2[1] - 5.0).abs() < 0.3, "{:?}", c.sigma2);
        assert!(number_variance(&rigid, &[1e5]).is_err());
        assert!(number_variance(&rigid[..10], &[1.0]).is_err());
    }

    #[test]
    fn comparison_report_of_wigner_samples() {
        let r = ComparisonReport::new(&wigner_samples(50_000, 21), None).unwrap();
        assert!(r.ks_w < 0.01 && r.delta_f_w < 2e-5);
        assert!(r.delta_f_goe > 0.0 && r.ks_goe > 0.0);
        assert!(ComparisonReport::new(&[0.0, 0.0], None).is_err());
    }

    #[test]
    fn two_sample_and_normal_fit() {
        let a = wigner_samples(20_000, 1);
        let b = wigner_samples(20_000, 2);
        assert!(ks_two_sample(&a, &b).unwrap() < 0.02);
        let shifted: Vec<f64> = b.iter().map(|x| x + 0.5).collect();
        assert!(ks_two_sample(&a, &shifted).unwrap() > 0.2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g: Vec<f64> = (0..20_000)
            .map(|_| {
                let (u, v): (f64, f64) = (rng.random(), rng.random());
                1.0 + 0.1 * (-2.0 * (1.0 - u).ln()).sqrt() * (2.0 * PI * v).cos()
            })
            .collect();
        let fit = normal_fit(&g).unwrap();
        assert!(fit.ks < 0.015 && (fit.mean - 1.0).abs() < 0.01 && (fit.std_dev - 0.1).abs() < 0.01);
        assert!(normal_fit(&a).unwrap().ks > 0.02);
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn parity_lists_interleave_back(mut levels in prop::collection::vec(0.0f64..1e3, 3..200)) {
            levels.sort_by(f64::total_cmp);
            let (odd, even) = parity_split(&levels).unwrap();
            let series = SpacingSeries::new(levels).unwrap();
            let mut merged = Vec::new();
            for i in 0..odd.len() {
                merged.push(odd[i]);
                if i < even.len() {
                    merged.push(even[i]);
                }
            }
            prop_assert_eq!(merged, series.spacings.clone());
            prop_assert!(series.spacings.iter().all(|&s| s >= 0.0));
        }

        #[test]
        fn delta_f_ignores_order(sample in prop::collection::vec(0.0f64..5.0, 1..60), rot in 0usize..60) {
            let mut rotated = sample.clone();
            let k = rot % rotated.len();
            rotated.rotate_left(k);
            let a = delta_f(&EmpiricalCdf::new(&sample).unwrap(), ReferenceDistribution::Wigner);
            let b = delta_f(&EmpiricalCdf::new(&rotated).unwrap(), ReferenceDistribution::Wigner);
            prop_assert_eq!(a, b);
            prop_assert!(a >= 0.0);
        }

        #[test]
        fn ecdf_is_monotone(sample in prop::collection::vec(-5.0f64..5.0, 1..100), probes in prop::collection::vec(-6.0f64..6.0, 2..30)) {
            let f = EmpiricalCdf::new(&sample).unwrap();
            let mut p = probes;
            p.sort_by(f64::total_cmp);
            let vals: Vec<f64> = p.iter().map(|&s| f.eval(s)).collect();
            prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert_eq!(f.eval(6.0), 1.0);
        }
    }
}
