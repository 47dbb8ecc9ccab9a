//! Certified computation of the positive roots of the secular functions.
//!
//! The default route does not rely on sign changes of the (near-tangent) ring
//! secular function. It uses two exact facts instead:
//!
//! 1. The Dirichlet problem on the cut ring (the segment topology with the same
//!    interactions) has an exact counting function: the number of eigenvalues
//!    below `k` equals the number of zeros of the `f(0) = 0` solution
//!    ([`Secular::dirichlet_count`]). Its eigenvalues `mu_1 < mu_2 < ...` are located
//!    by bisection on that count, so none can be missed.
//! 2. Floquet theory for the periodic operator: the normalized discriminant
//!    `D = Re u` is strictly monotone wherever `|D| < (1-β²)^{n/2}`, and each
//!    Dirichlet eigenvalue lies in a closed spectral gap, alternately antiperiodic
//!    (`D <= -c`, odd `m`) and periodic (`D >= c`, even `m`). The periodic gap around
//!    `mu_{2j}` holds exactly two ring roots (the doublet `j`), one in
//!    `(mu_{2j-1}, mu_{2j}]` and one in `[mu_{2j}, mu_{2j+1})`; below `mu_1` there is
//!    the lone ground-state root when `beta != 0`.
//!
//! The sign pattern of `D` at the Dirichlet eigenvalues is checked for every gap,
//! and the Weyl count `|N(K) - 2K| <= n + 4` is checked at every integer `K`.
//!
//! A generic scan route ([`bracket_scan`], [`refine_root`], [`resolve_tangency`],
//! [`scan_spectrum`]) works for any secular function and serves as an independent
//! cross-check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Secular, SystemConfig, Topology};

/// Width in `k` of the windows the Dirichlet sweep processes independently.
const SWEEP_CHUNK: f64 = 16.0;
/// Grid step of the Dirichlet count sweep. Only affects speed.
const SWEEP_STEP: f64 = 0.125;
/// Slack of the Weyl count check beyond the number of interactions.
pub const WEYL_SLACK: usize = 4;
/// Root residual bound, relative to `max(1, |u(k)|)`.
pub const RESIDUAL_BOUND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPolicy {
    /// Grid step (in k) of the generic scan route.
    pub base_step: f64,
    /// Relative bracket width at which refinement stops; 0 refines to adjacent floats.
    pub refine_tolerance: f64,
    /// `|f|` level below which a local extremum is probed for a hidden root pair.
    pub tangency_threshold: f64,
    pub max_rescans: u32,
}

impl ScanPolicy {
    pub fn for_config(config: &SystemConfig) -> Self {
        let n = config.n();
        let beta = config.beta();
        Self {
            base_step: (0.01f64).min(1.0 / (8.0 * (n as f64 + 1.0))),
            refine_tolerance: 0.0,
            tangency_threshold: (1e-6f64).max(beta * beta * n as f64),
            max_rescans: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base_step > 0.0 && self.base_step.is_finite()) {
            return Err(Error::Config(format!("base_step must be positive, got {}", self.base_step)));
        }
        if !(0.0..=1e-11).contains(&self.refine_tolerance) {
            return Err(Error::Config(format!(
                "refine_tolerance must lie in [0, 1e-11], got {}",
                self.refine_tolerance
            )));
        }
        Ok(())
    }
}

/// How much of the spectrum to compute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coverage {
    /// The first `N` positive roots, counted with multiplicity.
    Count(usize),
    /// All positive roots in `(0, k_max]`.
    UpTo(f64),
}

/// One distinct root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub k: f64,
    pub multiplicity: u8,
    /// `|secular(k)|` at the returned root.
    pub residual: f64,
    /// Spectral-gap index: the doublet index `j` on the ring (0 for the ground
    /// state), the eigenvalue index on the segment.
    pub gap: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountCheck {
    pub bound: usize,
    /// Largest `|N(K) - 2K|` over the integers checked.
    pub max_deviation: u64,
    pub worst_k: u64,
    pub checked_up_to: u64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub method: String,
    pub scan_step: f64,
    pub rescans: u32,
    pub max_residual: f64,
    pub dirichlet_eigenvalues: usize,
    pub gaps_checked: usize,
    pub unresolved_windows: usize,
    pub count_check: CountCheck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub topology: Topology,
    pub levels: Vec<Level>,
    pub diagnostics: Diagnostics,
}

impl Spectrum {
    /// Roots in ascending order, each repeated per multiplicity.
    pub fn roots(&self) -> Vec<f64> {
        self.levels
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.k, l.multiplicity as usize))
            .collect()
    }

    /// Gap index of each entry of [`Spectrum::roots`].
    pub fn gaps(&self) -> Vec<u64> {
        self.levels
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.gap, l.multiplicity as usize))
            .collect()
    }

    pub fn multiplicities(&self) -> Vec<u8> {
        self.levels.iter().map(|l| l.multiplicity).collect()
    }

    /// Number of roots counted with multiplicity.
    pub fn len(&self) -> usize {
        self.levels.iter().map(|l| l.multiplicity as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn k_max(&self) -> f64 {
        self.levels.last().map_or(0.0, |l| l.k)
    }
}

/// Bisection on a sign change. `f(lo)` and `f(hi)` must have opposite signs (a zero
/// value counts as its own sign class). Runs until the bracket is below
/// `rel_tol * max(1, |k|)` or no float lies strictly inside it, then returns the
/// end with the smaller `|f|`.
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let lo_positive = f(lo) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= rel_tol * hi.abs().max(1.0) {
            break;
        }
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Smallest `k` (to float resolution) at which `count(k) >= m`, given
/// `count(lo) < m <= count(hi)`.
fn bisect_count(count: &impl Fn(f64) -> u64, m: u64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid) >= m {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Dirichlet eigenvalues `mu_1 < mu_2 < ...` in `(0, k_end]`, in order.
fn dirichlet_eigenvalues(sec: &Secular, k_end: f64) -> Vec<f64> {
    let chunks = (k_end / SWEEP_CHUNK).ceil().max(1.0) as usize;
    let per_chunk: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let a = c as f64 * SWEEP_CHUNK;
            let b = ((c + 1) as f64 * SWEEP_CHUNK).min(k_end);
            let steps = ((b - a) / SWEEP_STEP).ceil().max(1.0) as usize;
            let count = |k: f64| sec.dirichlet_count(k);
            let mut out = Vec::new();
            let mut lo = a;
            let mut c_lo = count(lo);
            for s in 1..=steps {
                let hi = if s == steps { b } else { a + s as f64 * SWEEP_STEP };
                let c_hi = count(hi);
                for m in (c_lo + 1)..=c_hi {
                    out.push(bisect_count(&count, m, lo, hi));
                }
                lo = hi;
                c_lo = c_hi;
            }
            out
        })
        .collect();
    per_chunk.into_iter().flatten().collect()
}

/// The first `needed` Dirichlet eigenvalues (at least), extending the sweep as required.
fn dirichlet_at_least(sec: &Secular, needed: usize, n: usize) -> Vec<f64> {
    let mut k_end = (needed as f64 / 2.0 + n as f64 + 2.0).max(1.0);
    loop {
        let mu = dirichlet_eigenvalues(sec, k_end);
        if mu.len() >= needed {
            return mu;
        }
        k_end *= 1.25;
    }
}

/// Finds the positive roots of the configuration's secular function.
///
/// Windows are processed with rayon; the result does not depend on the number of
/// worker threads.
pub fn find_spectrum(config: &SystemConfig, coverage: Coverage, policy: &ScanPolicy) -> Result<Spectrum> {
    policy.validate()?;
    match coverage {
        Coverage::Count(0) => return Err(Error::Domain("root count must be at least 1".into())),
        Coverage::UpTo(k) if !(k > 0.0 && k.is_finite()) => {
            return Err(Error::Domain(format!("k_max must be positive, got {k}")))
        }
        _ => {}
    }
    let sec = Secular::new(config);
    let spectrum = match config.topology() {
        Topology::Circle => circle_spectrum(config, &sec, coverage, policy)?,
        Topology::Segment => segment_spectrum(config, &sec, coverage)?,
    };
    if !spectrum.diagnostics.count_check.passed {
        let cc = &spectrum.diagnostics.count_check;
        return Err(Error::Completeness {
            lo: cc.worst_k as f64 - 1.0,
            hi: cc.worst_k as f64,
            detail: format!(
                "counting function deviates from 2K by {} > {} at K = {}",
                cc.max_deviation, cc.bound, cc.worst_k
            ),
        });
    }
    Ok(spectrum)
}

fn segment_spectrum(config: &SystemConfig, sec: &Secular, coverage: Coverage) -> Result<Spectrum> {
    let n = config.n();
    let mu = match coverage {
        Coverage::Count(count) => {
            let mut mu = dirichlet_at_least(sec, count, n);
            mu.truncate(count);
            mu
        }
        Coverage::UpTo(k_max) => dirichlet_eigenvalues(sec, k_max),
    };
    let levels: Vec<Level> = mu
        .par_iter()
        .enumerate()
        .map(|(i, &k)| Level {
            k,
            multiplicity: 1,
            residual: sec.segment(k).abs(),
            gap: i as u64 + 1,
        })
        .collect();
    let count_check = count_check(&levels, n);
    let max_residual = levels.iter().map(|l| l.residual).fold(0.0, f64::max);
    Ok(Spectrum {
        topology: Topology::Segment,
        diagnostics: Diagnostics {
            method: "dirichlet-count".into(),
            scan_step: SWEEP_STEP,
            rescans: 0,
            max_residual,
            dirichlet_eigenvalues: mu.len(),
            gaps_checked: mu.len(),
            unresolved_windows: 0,
            count_check,
        },
        levels,
    })
}

fn circle_spectrum(
    config: &SystemConfig,
    sec: &Secular,
    coverage: Coverage,
    policy: &ScanPolicy,
) -> Result<Spectrum> {
    let n = config.n();
    let f = |k: f64| sec.circle(k);
    let has_ground = f(0.0) > 0.0;
    let needed_doublets = match coverage {
        Coverage::Count(count) => count.saturating_sub(has_ground as usize).div_ceil(2),
        Coverage::UpTo(k_max) => (k_max.ceil() as usize) + n + 2,
    };
    let mut mu = dirichlet_at_least(sec, 2 * needed_doublets + 1, n);
    if let Coverage::UpTo(k_max) = coverage {
        // make sure every doublet with a root <= k_max has its right bracket
        while mu.len() < 3 || mu[mu.len() - 2] <= k_max {
            mu = dirichlet_at_least(sec, mu.len() + 2 * n + 8, n);
        }
    }
    let doublets = (mu.len() - 1) / 2;

    // Sign pattern of D at the Dirichlet eigenvalues: antiperiodic gaps at odd m,
    // periodic gaps at even m.
    let violation = mu.par_iter().enumerate().find_first(|&(i, &k)| {
        let d = sec.discriminant(k);
        if i % 2 == 0 {
            d >= 0.0
        } else {
            // a periodic gap closed to within rounding is a tangency, handled below
            d < -RESIDUAL_BOUND * sec.monodromy_u(k).norm().max(1.0)
        }
    });
    if let Some((i, &k)) = violation {
        let lo = if i > 0 { mu[i - 1] } else { 0.0 };
        let hi = mu.get(i + 1).copied().unwrap_or(k);
        return Err(Error::Completeness {
            lo,
            hi,
            detail: format!(
                "gap {} at k = {k} has discriminant {} of the wrong sign",
                i + 1,
                sec.discriminant(k)
            ),
        });
    }

    let tol = policy.refine_tolerance;
    let mut levels = Vec::with_capacity(2 * doublets + 1);
    if has_ground {
        let k = bisect(&f, 0.0, mu[0], tol);
        levels.push(Level {
            k,
            multiplicity: 1,
            residual: f(k).abs(),
            gap: 0,
        });
    }
    let per_doublet: Vec<Vec<Level>> = (1..=doublets)
        .into_par_iter()
        .map(|j| {
            let (left, centre, right) = (mu[2 * j - 2], mu[2 * j - 1], mu[2 * j]);
            doublet_roots(&f, left, centre, right, j as u64, policy)
        })
        .collect();
    levels.extend(per_doublet.into_iter().flatten());

    if let Coverage::UpTo(k_max) = coverage {
        // a root sitting on k_max itself may land a few ulps above it
        let edge = k_max + 8.0 * f64::EPSILON * k_max.max(1.0);
        levels.retain(|l| l.k <= edge);
    }
    if let Coverage::Count(count) = coverage {
        truncate_to_count(&mut levels, count);
    }
    // rounding in Re u scales with |u|, which grows with the coupling
    if let Some(bad) = levels
        .iter()
        .find(|l| l.residual >= RESIDUAL_BOUND * sec.monodromy_u(l.k).norm().max(1.0))
    {
        return Err(Error::Completeness {
            lo: bad.k,
            hi: bad.k,
            detail: format!("root residual {} exceeds the bound", bad.residual),
        });
    }

    let count_check = count_check(&levels, n);
    let max_residual = levels.iter().map(|l| l.residual).fold(0.0, f64::max);
    Ok(Spectrum {
        topology: Topology::Circle,
        diagnostics: Diagnostics {
            method: "dirichlet-interlacing".into(),
            scan_step: SWEEP_STEP,
            rescans: 0,
            max_residual,
            dirichlet_eigenvalues: mu.len(),
            gaps_checked: mu.len(),
            unresolved_windows: 0,
            count_check,
        },
        levels,
    })
}

/// The two roots of the periodic gap containing `centre`, bracketed by the
/// neighbouring antiperiodic-gap Dirichlet eigenvalues.
fn doublet_roots(
    f: &impl Fn(f64) -> f64,
    left: f64,
    centre: f64,
    right: f64,
    gap: u64,
    policy: &ScanPolicy,
) -> Vec<Level> {
    let tol = policy.refine_tolerance;
    let at_centre = f(centre);
    let mut pair = if at_centre > 0.0 {
        let a = bisect(f, left, centre, tol);
        let b = bisect(f, centre, right, tol);
        vec![(a, 1u8), (b, 1u8)]
    } else {
        // The gap is closed to within rounding of mu; look for the top of the bump.
        let half = (1e-6 * centre.max(1.0)).min(0.5 * (centre - left)).min(0.5 * (right - centre));
        resolve_tangency(f, centre, half, policy)
    };
    if pair.len() == 2 && pair[1].0 - pair[0].0 <= 4.0 * f64::EPSILON * centre.max(1.0) {
        pair = vec![(0.5 * (pair[0].0 + pair[1].0), 2)];
    }
    if pair.is_empty() {
        pair = vec![(centre, 2)];
    }
    pair.into_iter()
        .map(|(k, multiplicity)| Level {
            k,
            multiplicity,
            residual: f(k).abs(),
            gap,
        })
        .collect()
}

fn truncate_to_count(levels: &mut Vec<Level>, count: usize) {
    let mut total = 0usize;
    let mut keep = 0usize;
    for (i, level) in levels.iter_mut().enumerate() {
        if total >= count {
            break;
        }
        let m = level.multiplicity as usize;
        if total + m > count {
            level.multiplicity = (count - total) as u8;
        }
        total += level.multiplicity as usize;
        keep = i + 1;
    }
    levels.truncate(keep);
}

/// `|N(K) - 2K| <= n + 4` for every integer `K` up to the last full unit covered.
fn count_check(levels: &[Level], n: usize) -> CountCheck {
    let bound = n + WEYL_SLACK;
    let top = levels.last().map_or(0, |l| l.k.floor() as u64);
    let mut idx = 0usize;
    let mut counted = 0u64;
    let mut max_dev = 0u64;
    let mut worst = 0u64;
    for kk in 1..=top {
        while idx < levels.len() && levels[idx].k <= kk as f64 {
            counted += levels[idx].multiplicity as u64;
            idx += 1;
        }
        let dev = counted.abs_diff(2 * kk);
        if dev > max_dev {
            max_dev = dev;
            worst = kk;
        }
    }
    CountCheck {
        bound,
        max_deviation: max_dev,
        worst_k: worst,
        checked_up_to: top,
        passed: max_dev <= bound as u64,
    }
}

/// Sign changes and near-zero extrema of `f` sampled on a grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScanResult {
    pub brackets: Vec<(f64, f64)>,
    /// Grid points where `|f|` has a local minimum below the tangency threshold
    /// without a sign change on either side.
    pub tangency_suspects: Vec<f64>,
}

/// Samples `f` on `[a, b]` with the given step.
pub fn bracket_scan(
    f: &impl Fn(f64) -> f64,
    interval: (f64, f64),
    step: f64,
    tangency_threshold: f64,
) -> ScanResult {
    let (a, b) = interval;
    let mut out = ScanResult::default();
    if !(b > a) || !(step > 0.0) {
        return out;
    }
    let steps = ((b - a) / step).ceil() as usize;
    let ks: Vec<f64> = (0..=steps)
        .map(|i| if i == steps { b } else { a + i as f64 * step })
        .collect();
    let vs: Vec<f64> = ks.iter().map(|&k| f(k)).collect();
    let sign = |v: f64| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 };
    for i in 0..steps {
        let (l, r) = (sign(vs[i]), sign(vs[i + 1]));
        if l * r < 0 {
            out.brackets.push((ks[i], ks[i + 1]));
        } else if r == 0 && i + 2 <= steps && l * sign(vs[i + 2]) < 0 {
            // exact zero on the grid with a genuine crossing
            out.brackets.push((ks[i + 1], ks[i + 1]));
        }
    }
    for i in 1..steps {
        let (l, m, r) = (vs[i - 1], vs[i], vs[i + 1]);
        let same_side = sign(l) * sign(r) > 0 && sign(l) * sign(m) >= 0;
        if same_side && m.abs() <= l.abs() && m.abs() <= r.abs() && m.abs() < tangency_threshold {
            out.tangency_suspects.push(ks[i]);
        }
    }
    out
}

/// Refines a sign-change bracket to relative width `tolerance` (0 means float resolution).
pub fn refine_root(f: &impl Fn(f64) -> f64, bracket: (f64, f64), tolerance: f64) -> Result<f64> {
    let (lo, hi) = bracket;
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::Domain(format!(
            "no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    Ok(bisect(f, lo, hi, tolerance))
}

/// Probes a local extremum of `f` near `suspect` for a hidden pair of roots.
///
/// Returns the roots found with their multiplicities: two simple roots if the
/// extremum crosses zero, one double root if it touches zero to within rounding,
/// nothing otherwise.
pub fn resolve_tangency(
    f: &impl Fn(f64) -> f64,
    suspect: f64,
    half_width: f64,
    policy: &ScanPolicy,
) -> Vec<(f64, u8)> {
    let (mut a, mut b) = (suspect - half_width, suspect + half_width);
    let ends = (f(a), f(b));
    // the extremum points towards zero: maximize when the surroundings are negative
    let sign = if ends.0 + ends.1 <= 0.0 { 1.0 } else { -1.0 };
    let g = |k: f64| sign * f(k);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if b - a <= 1e-3 * f64::EPSILON.sqrt() * suspect.abs().max(1.0) {
            break;
        }
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
    }
    let top = if gc > gd { c } else { d };
    let peak = g(top);
    let zero_level = 64.0 * f64::EPSILON * (1.0 + f(suspect).abs());
    if peak > 0.0 && sign * ends.0 < 0.0 && sign * ends.1 < 0.0 {
        let lo = bisect(f, suspect - half_width, top, policy.refine_tolerance);
        let hi = bisect(f, top, suspect + half_width, policy.refine_tolerance);
        vec![(lo, 1), (hi, 1)]
    } else if peak.abs() <= zero_level {
        // on a flat top the golden search drifts; keep the suspect if it already touches zero
        let at = if f(suspect).abs() <= zero_level { suspect } else { top };
        vec![(at, 2)]
    } else {
        Vec::new()
    }
}

/// Generic grid-scan route: sign-change brackets plus tangency probing, with
/// per-unit-window rescans when a ring window yields fewer than two roots.
pub fn scan_spectrum(config: &SystemConfig, k_max: f64, policy: &ScanPolicy) -> Result<Spectrum> {
    policy.validate()?;
    let sec = Secular::new(config);
    let f = |k: f64| sec.eval(k);
    let windows = k_max.ceil() as usize;
    let mut rescans = 0u32;
    let mut unresolved = 0usize;
    let mut roots: Vec<(f64, u8)> = Vec::new();
    for w in 0..windows {
        let a = w as f64;
        let b = ((w + 1) as f64).min(k_max);
        let mut step = policy.base_step;
        let mut attempt = 0;
        let found = loop {
            let found = scan_window(&f, (a.max(1e-9), b), step, policy);
            let expected = if config.topology() == Topology::Circle && w > 0 { 2 } else { 1 };
            let total: usize = found.iter().map(|r| r.1 as usize).sum();
            if total >= expected || attempt >= policy.max_rescans || b - a < 1.0 {
                if total < expected && b - a >= 1.0 {
                    unresolved += 1;
                }
                break found;
            }
            attempt += 1;
            rescans += 1;
            step /= 4.0;
        };
        roots.extend(found);
    }
    roots.sort_by(|x, y| x.0.total_cmp(&y.0));
    let levels: Vec<Level> = roots
        .into_iter()
        .map(|(k, m)| Level {
            k,
            multiplicity: m,
            residual: f(k).abs(),
            gap: 0,
        })
        .collect();
    let count_check = count_check(&levels, config.n());
    let max_residual = levels.iter().map(|l| l.residual).fold(0.0, f64::max);
    Ok(Spectrum {
        topology: config.topology(),
        diagnostics: Diagnostics {
            method: "grid-scan".into(),
            scan_step: policy.base_step,
            rescans,
            max_residual,
            dirichlet_eigenvalues: 0,
            gaps_checked: 0,
            unresolved_windows: unresolved,
            count_check,
        },
        levels,
    })
}

fn scan_window(
    f: &impl Fn(f64) -> f64,
    interval: (f64, f64),
    step: f64,
    policy: &ScanPolicy,
) -> Vec<(f64, u8)> {
    let scan = bracket_scan(f, interval, step, policy.tangency_threshold);
    let mut out: Vec<(f64, u8)> = scan
        .brackets
        .iter()
        .filter_map(|&br| refine_root(f, br, policy.refine_tolerance).ok())
        .map(|k| (k, 1))
        .collect();
    for s in scan.tangency_suspects {
        out.extend(resolve_tangency(f, s, step, policy));
    }
    // a root sitting exactly on a grid point is reported by two brackets
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out.dedup_by(|x, y| (x.0 - y.0).abs() <= 4.0 * f64::EPSILON * x.0.abs().max(1.0));
    out
}
