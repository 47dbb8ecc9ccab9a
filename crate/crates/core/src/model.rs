//! The physical system: a particle on a ring (or a segment) of length 2π with
//! `n` scale-free point interactions of common strength `alpha`.
//!
//! At each interaction the wavefunction obeys `f(x+) = f(x-)/alpha` and
//! `f'(x+) = alpha f'(x-)`. On the free stretches `f = A e^{ikx} + B e^{-ikx}`
//! and crossing the point `x_j` maps `(A, B)` through the 2×2 transfer matrix
//! `C_j`. The ring closes with `C_P = diag(e^{2πik}, e^{-2πik})`.
//!
//! All secular functions here are normalized by `(1 - beta^2)^{n/2}`, which turns
//! every `C_j` into `[[1, beta e^{-2ikx_j}], [beta e^{2ikx_j}, 1]]`. The ring
//! secular function is then `Re u(k) - (1 - beta^2)^{n/2}` where `u` is the
//! top-left entry of the normalized monodromy. Roots are unaffected.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest system the trigonometric expansion will enumerate (2^n subsets).
pub const EXPANSION_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Periodic boundary conditions.
    Circle,
    /// Dirichlet conditions `f(0) = f(2π) = 0`.
    Segment,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Circle => f.write_str("circle"),
            Topology::Segment => f.write_str("segment"),
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "circle" | "ring" => Ok(Topology::Circle),
            "segment" | "line" => Ok(Topology::Segment),
            other => Err(Error::Config(format!("unknown topology '{other}'"))),
        }
    }
}

/// A validated system definition.
///
/// Positions must be strictly increasing inside `(0, 2π)`. Rational independence
/// of the positions is not (and cannot be) checked in floating point; use
/// [`prime_positions`] for a constructive choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    topology: Topology,
    alpha: f64,
    positions: Vec<f64>,
}

impl SystemConfig {
    pub fn new(topology: Topology, alpha: f64, positions: Vec<f64>) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        for (i, &x) in positions.iter().enumerate() {
            if !(x > 0.0 && x < TAU) {
                return Err(Error::Domain(format!(
                    "position {i} = {x} outside the open interval (0, 2π)"
                )));
            }
            if i > 0 && positions[i - 1] >= x {
                return Err(Error::Domain(format!(
                    "positions must be strictly increasing (x[{}] = {} >= x[{i}] = {x})",
                    i - 1,
                    positions[i - 1]
                )));
            }
        }
        Ok(Self {
            topology,
            alpha,
            positions,
        })
    }

    /// `n` interactions at the square-root-of-primes positions.
    pub fn with_prime_positions(topology: Topology, alpha: f64, n: usize) -> Result<Self> {
        Self::new(topology, alpha, prime_positions(n))
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        // alpha > 0 is an invariant of the type
        (1.0 - self.alpha * self.alpha) / (1.0 + self.alpha * self.alpha)
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn is_free(&self) -> bool {
        self.beta() == 0.0 || self.positions.is_empty()
    }

    /// `(1 - beta^2)^{n/2}`, the normalization linking the raw determinant to
    /// the trigonometric expansion.
    pub fn normalization(&self) -> f64 {
        let b = self.beta();
        (1.0 - b * b).powf(self.n() as f64 / 2.0)
    }
}

/// `beta = (1 - alpha^2) / (1 + alpha^2)`.
pub fn beta_of_alpha(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let a2 = alpha * alpha;
    Ok((1.0 - a2) / (1.0 + a2))
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<u64> {
    if count == 0 {
        return Vec::new();
    }
    // p_m < m (ln m + ln ln m) for m >= 6
    let m = count.max(6) as f64;
    let bound = (m * (m.ln() + m.ln().ln())).ceil() as usize + 1;
    let mut composite = vec![false; bound + 1];
    let mut primes = Vec::with_capacity(count);
    for i in 2..=bound {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        if primes.len() == count {
            break;
        }
        let mut j = i * i;
        while j <= bound {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// `x_k = 2π sqrt(p_k / p_{n+1})` for `k = 1..=n`.
pub fn prime_positions(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let primes = first_primes(n + 1);
    let top = (primes[n] as f64).sqrt();
    primes[..n]
        .iter()
        .map(|&p| TAU * (p as f64).sqrt() / top)
        .collect()
}

/// A 2×2 complex matrix acting on plane-wave amplitudes `(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix(pub [[Complex64; 2]; 2]);

impl TransferMatrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        TransferMatrix([[one, zero], [zero, one]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        TransferMatrix(out)
    }
}

/// `C_j`, mapping `(A_{j-1}, B_{j-1})` to `(A_j, B_j)` across the interaction at `x_j`.
pub fn transfer_matrix(k: f64, alpha: f64, x_j: f64) -> Result<TransferMatrix> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    let diag = 0.5 * (1.0 / alpha + alpha);
    let off = 0.5 * (1.0 / alpha - alpha);
    let phase = Complex64::from_polar(1.0, 2.0 * k * x_j);
    Ok(TransferMatrix([
        [Complex64::new(diag, 0.0), off * phase.conj()],
        [off * phase, Complex64::new(diag, 0.0)],
    ]))
}

/// `C_P = diag(e^{2πik}, e^{-2πik})`, closing the ring.
pub fn boundary_matrix(k: f64) -> TransferMatrix {
    let p = unit_phase_2pi(k);
    let zero = Complex64::new(0.0, 0.0);
    TransferMatrix([[p, zero], [zero, p.conj()]])
}

/// `e^{2πik}`, reduced by the nearest integer first so that large `k` keeps full precision.
#[inline]
pub(crate) fn unit_phase_2pi(k: f64) -> Complex64 {
    let frac = k - k.round();
    let (s, c) = (TAU * frac).sin_cos();
    Complex64::new(c, s)
}

/// `(sin, cos)` of the exact product `k * tx`, correcting the rounding of the
/// product with its fma remainder. Keeps phases accurate when `k` is large.
#[inline]
fn sin_cos_product(k: f64, tx: f64) -> (f64, f64) {
    let p = k * tx;
    let e = k.mul_add(tx, -p);
    let (s, c) = p.sin_cos();
    (s + e * c, c - e * s)
}

/// A secular-function value with the size of the imaginary part that was discarded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularValue {
    pub value: f64,
    pub residual_imag: f64,
}

fn product_unnormalized(k: f64, config: &SystemConfig) -> TransferMatrix {
    let alpha = config.alpha();
    config
        .positions()
        .iter()
        .fold(TransferMatrix::identity(), |acc, &x| {
            // alpha was validated by SystemConfig
            transfer_matrix(k, alpha, x).expect("valid alpha") * acc
        })
}

/// Normalized ring secular function `(1-beta^2)^{n/2} (tr(C_P C_n ... C_1) - 2) / 2`,
/// evaluated with explicit complex matrix products.
///
/// Uses `det(M - I) = 2 - tr M` for unimodular `M`.
pub fn secular_circle(k: f64, config: &SystemConfig) -> Result<SecularValue> {
    if config.topology() != Topology::Circle {
        return Err(Error::Usage("secular_circle needs a circle configuration".into()));
    }
    let m = boundary_matrix(k) * product_unnormalized(k, config);
    let tr = m.trace();
    let scale = config.normalization();
    Ok(SecularValue {
        value: scale * (tr.re - 2.0) / 2.0,
        residual_imag: scale * tr.im.abs() / 2.0,
    })
}

/// The finite trigonometric series for the ring secular function,
/// `cos 2πk - (1-β²)^{n/2} + Σ_{even m>=2} β^m Σ_{i1<..<im} cos 2k(x_{i1} - x_{i2} + ... - x_{im} + π)`.
///
/// Enumerates all even-sized subsets, so it refuses `n > EXPANSION_MAX_N`.
pub fn secular_circle_expansion(k: f64, config: &SystemConfig) -> Result<f64> {
    if config.topology() != Topology::Circle {
        return Err(Error::Usage(
            "secular_circle_expansion needs a circle configuration".into(),
        ));
    }
    let n = config.n();
    if n > EXPANSION_MAX_N {
        return Err(Error::Domain(format!(
            "expansion enumerates 2^n subsets; n = {n} exceeds {EXPANSION_MAX_N}"
        )));
    }
    let beta = config.beta();
    let x = config.positions();
    let mut total = (TAU * k).cos() - config.normalization();
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones();
        if size % 2 == 1 {
            continue;
        }
        // ascending indices with alternating signs + - + - ...
        let mut alt = 0.0;
        let mut sign = 1.0;
        for (i, &xi) in x.iter().enumerate() {
            if mask & (1 << i) != 0 {
                alt += sign * xi;
                sign = -sign;
            }
        }
        total += beta.powi(size as i32) * (2.0 * k * (alt + PI)).cos();
    }
    Ok(total)
}

/// Normalized segment secular function: propagate the Dirichlet-compatible
/// amplitudes `(1, -1)` through all interactions and evaluate
/// `(1-β²)^{n/2} (e^{2πik} A_n + e^{-2πik} B_n) / (2i)`, which vanishes iff `f(2π) = 0`.
pub fn secular_segment(k: f64, config: &SystemConfig) -> Result<SecularValue> {
    if config.topology() != Topology::Segment {
        return Err(Error::Usage("secular_segment needs a segment configuration".into()));
    }
    let start = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
    let [a, b] = product_unnormalized(k, config).apply(start);
    let p = unit_phase_2pi(k);
    let end = p * a + p.conj() * b;
    let scale = config.normalization();
    // end/(2i) = (end.im - i end.re) / 2
    Ok(SecularValue {
        value: scale * end.im / 2.0,
        residual_imag: scale * end.re.abs() / 2.0,
    })
}

/// Fast evaluator for the normalized secular functions of one configuration.
///
/// Works with the normalized transfer matrices, whose products keep the form
/// `[[u, v], [conj v, conj u]]`, so only two complex numbers are propagated.
#[derive(Debug, Clone)]
pub struct Secular {
    topology: Topology,
    beta: f64,
    normalization: f64,
    twice_positions: Vec<f64>,
    positions: Vec<f64>,
}

impl Secular {
    pub fn new(config: &SystemConfig) -> Self {
        Self {
            topology: config.topology(),
            beta: config.beta(),
            normalization: config.normalization(),
            twice_positions: config.positions().iter().map(|x| 2.0 * x).collect(),
            positions: config.positions().to_vec(),
        }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `(1-β²)^{n/2}`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Top-left entry `u` of the normalized ring monodromy `C_P C̃_n ... C̃_1`.
    #[inline]
    pub fn monodromy_u(&self, k: f64) -> Complex64 {
        let mut u = Complex64::new(1.0, 0.0);
        let mut v = Complex64::new(0.0, 0.0);
        for &tx in &self.twice_positions {
            let (s, c) = sin_cos_product(k, tx);
            let w = Complex64::new(self.beta * c, -self.beta * s);
            let nu = u + w * v.conj();
            let nv = v + w * u.conj();
            u = nu;
            v = nv;
        }
        unit_phase_2pi(k) * u
    }

    /// Normalized ring discriminant `Re u(k)`; equals `(1-β²)^{n/2} tr(M)/2`.
    #[inline]
    pub fn discriminant(&self, k: f64) -> f64 {
        self.monodromy_u(k).re
    }

    /// Ring secular function `Re u(k) - (1-β²)^{n/2}`.
    #[inline]
    pub fn circle(&self, k: f64) -> f64 {
        self.discriminant(k) - self.normalization
    }

    /// Amplitude `A_j` on every free stretch of the Dirichlet solution (`A_0 = 1`, `B_j = -conj A_j`).
    fn dirichlet_amplitude(&self, k: f64, mut visit: impl FnMut(usize, Complex64)) -> Complex64 {
        let mut a = Complex64::new(1.0, 0.0);
        visit(0, a);
        for (j, &tx) in self.twice_positions.iter().enumerate() {
            let (s, c) = sin_cos_product(k, tx);
            let w = Complex64::new(self.beta * c, -self.beta * s);
            a -= w * a.conj();
            visit(j + 1, a);
        }
        a
    }

    /// Segment secular function `Im(e^{2πik} A_n)`.
    #[inline]
    pub fn segment(&self, k: f64) -> f64 {
        let a = self.dirichlet_amplitude(k, |_, _| {});
        (unit_phase_2pi(k) * a).im
    }

    /// Secular function for this configuration's topology.
    #[inline]
    pub fn eval(&self, k: f64) -> f64 {
        match self.topology {
            Topology::Circle => self.circle(k),
            Topology::Segment => self.segment(k),
        }
    }

    /// Number of Dirichlet eigenvalues (segment topology, same interactions) strictly below `k`.
    ///
    /// Sturm oscillation: equals the number of zeros in `(0, 2π)` of the solution
    /// with `f(0) = 0`. On stretch `j` that solution is proportional to
    /// `sin(arg A_j + k x)`, and the interaction jumps rescale it by a positive factor.
    pub fn dirichlet_count(&self, k: f64) -> u64 {
        if k <= 0.0 {
            return 0;
        }
        let n = self.positions.len();
        let mut zeros: i64 = 0;
        let mut left = 0.0;
        let mut phase0 = 0.0;
        self.dirichlet_amplitude(k, |j, a| {
            let right = if j < n { self.positions[j] } else { TAU };
            if j > 0 {
                phase0 = a.arg();
            }
            let start = phase0 + k * left;
            let end = phase0 + k * right;
            zeros += if j < n {
                // zeros in (left, right]
                (end / PI).floor() as i64 - (start / PI).floor() as i64
            } else {
                // zeros in (left, 2π)
                (end / PI).ceil() as i64 - 1 - (start / PI).floor() as i64
            };
            left = right;
        });
        zeros.max(0) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(alpha: f64, positions: Vec<f64>) -> SystemConfig {
        SystemConfig::new(Topology::Circle, alpha, positions).unwrap()
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_of_alpha(1.0).unwrap(), 0.0);
        assert!((beta_of_alpha(2.0).unwrap() + 0.6).abs() < 1e-15);
        assert!((beta_of_alpha(0.5).unwrap() - 0.6).abs() < 1e-15);
        assert!(beta_of_alpha(0.0).is_err());
        assert!(beta_of_alpha(-1.0).is_err());
    }

    #[test]
    fn primes_and_positions() {
        assert_eq!(first_primes(10), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(first_primes(1000)[999], 7919);
        assert!(prime_positions(0).is_empty());
        let one = prime_positions(1);
        assert!((one[0] - 5.130199320647456).abs() < 1e-12);
        let two = prime_positions(2);
        assert!((two[0] - 3.9738353063184406).abs() < 1e-12);
        assert!((two[1] - 4.866934411168335).abs() < 1e-12);
        for n in [1, 5, 47, 200] {
            let x = prime_positions(n);
            assert!(x.windows(2).all(|w| w[0] < w[1]));
            assert!(*x.last().unwrap() < TAU);
        }
    }

    #[test]
    fn config_validation() {
        assert!(SystemConfig::new(Topology::Circle, 0.0, vec![1.0]).is_err());
        assert!(SystemConfig::new(Topology::Circle, 1.2, vec![2.0, 1.0]).is_err());
        assert!(SystemConfig::new(Topology::Circle, 1.2, vec![1.0, 1.0]).is_err());
        assert!(SystemConfig::new(Topology::Circle, 1.2, vec![0.0]).is_err());
        assert!(SystemConfig::new(Topology::Circle, 1.2, vec![TAU]).is_err());
        assert!(SystemConfig::new(Topology::Segment, 1.2, vec![]).is_ok());
        assert!("Circle".parse::<Topology>().is_ok());
        assert!("torus".parse::<Topology>().is_err());
    }

    #[test]
    fn transfer_matrix_examples() {
        let id = transfer_matrix(3.3, 1.0, 0.7).unwrap();
        assert!((id.0[0][0] - 1.0).norm() < 1e-15 && id.0[0][1].norm() < 1e-15);
        let m = transfer_matrix(1.7, 2.0, 0.0).unwrap();
        let expect = [[1.25, -0.75], [-0.75, 1.25]];
        for (row, want) in m.0.iter().zip(expect) {
            for (z, w) in row.iter().zip(want) {
                assert!((z - w).norm() < 1e-15);
            }
        }
        let m = transfer_matrix(7.3, 1.4, 1.1).unwrap();
        assert!((m.det() - 1.0).norm() < 1e-12);
        assert!((m.0[0][1] - m.0[1][0].conj()).norm() < 1e-15);
        assert!(transfer_matrix(1.0, -2.0, 1.0).is_err());
    }

    #[test]
    fn boundary_matrix_examples() {
        let m = boundary_matrix(4.0);
        assert!((m.0[0][0] - 1.0).norm() < 1e-15 && (m.0[1][1] - 1.0).norm() < 1e-15);
        let q = boundary_matrix(0.25);
        assert!((q.0[0][0] - Complex64::i()).norm() < 1e-15);
        assert!((q.0[1][1] + Complex64::i()).norm() < 1e-15);
        assert!((boundary_matrix(3.7).det().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn circle_examples() {
        let free = circle(1.0, prime_positions(3));
        assert!((secular_circle(0.5, &free).unwrap().value + 2.0).abs() < 1e-14);
        let one = circle(2.0, vec![2.2]);
        for k in [0.1, 0.7, 3.9, 12.01] {
            let v = secular_circle(k, &one).unwrap().value;
            assert!((v - ((TAU * k).cos() - 0.8)).abs() < 1e-13, "k={k}");
        }
        let root = 0.8f64.acos() / TAU;
        assert!((root - 0.10241638234956671).abs() < 1e-15);
        assert!(secular_circle(root, &one).unwrap().value.abs() < 1e-14);
        let three = circle(1.3, prime_positions(3));
        let a = secular_circle(12.345, &three).unwrap().value;
        let b = secular_circle_expansion(12.345, &three).unwrap();
        assert!((a - b).abs() < 1e-9);
        let seg = SystemConfig::new(Topology::Segment, 1.3, vec![1.0]).unwrap();
        assert!(matches!(secular_circle(1.0, &seg), Err(Error::Usage(_))));
    }

    #[test]
    fn expansion_examples() {
        let empty = circle(1.7, vec![]);
        for k in [0.3, 2.2] {
            let v = secular_circle_expansion(k, &empty).unwrap();
            assert!((v - ((TAU * k).cos() - 1.0)).abs() < 1e-15);
        }
        let free = circle(1.0, prime_positions(5));
        let v = secular_circle_expansion(0.37, &free).unwrap();
        assert!((v - ((TAU * 0.37).cos() - 1.0)).abs() < 1e-15);
        let two = circle(1.5, prime_positions(2));
        let a = secular_circle_expansion(3.21, &two).unwrap();
        let b = secular_circle(3.21, &two).unwrap().value;
        assert!((a - b).abs() < 1e-9);
        let big = circle(1.5, prime_positions(13));
        assert!(secular_circle_expansion(1.0, &big).is_err());
    }

    #[test]
    fn segment_examples() {
        let free = SystemConfig::new(Topology::Segment, 1.0, prime_positions(4)).unwrap();
        assert!((secular_segment(0.25, &free).unwrap().value - 1.0).abs() < 1e-14);
        for j in 1..20 {
            assert!(secular_segment(j as f64 / 2.0, &free).unwrap().value.abs() < 1e-12);
        }
        // n = 1 closed form a sin 2πk - b sin 2k(π - x), normalized by 1/a
        let (alpha, x, k) = (2.0f64, 1.0f64, 0.4f64);
        let a = 0.5 * (1.0 / alpha + alpha);
        let b = 0.5 * (1.0 / alpha - alpha);
        let closed = (a * (TAU * k).sin() - b * (2.0 * k * (PI - x)).sin()) / a;
        let seg = SystemConfig::new(Topology::Segment, alpha, vec![x]).unwrap();
        let v = secular_segment(k, &seg).unwrap();
        assert!((v.value - closed).abs() < 1e-12);
        assert!((Secular::new(&seg).segment(k) - closed).abs() < 1e-12);
        let c = circle(2.0, vec![1.0]);
        assert!(matches!(secular_segment(1.0, &c), Err(Error::Usage(_))));
    }

    #[test]
    fn fast_path_matches_matrix_products() {
        let cfg = circle(1.37, prime_positions(9));
        let fast = Secular::new(&cfg);
        for i in 0..200 {
            let k = 0.05 + i as f64 * 0.731;
            let slow = secular_circle(k, &cfg).unwrap();
            assert!((fast.circle(k) - slow.value).abs() < 1e-11);
            assert!(slow.residual_imag < 1e-9 * slow.value.abs().max(1.0));
        }
    }

    #[test]
    fn dirichlet_count_free_segment() {
        // free Dirichlet eigenvalues are k = j/2
        let sec = Secular::new(&SystemConfig::new(Topology::Segment, 1.0, prime_positions(3)).unwrap());
        for (k, expected) in [(0.3, 0), (0.6, 1), (1.2, 2), (10.25, 20), (100.1, 200)] {
            assert_eq!(sec.dirichlet_count(k), expected, "k={k}");
        }
    }
}
