//! Monte-Carlo GOE spacings from sampled real symmetric matrices.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSample {
    /// Unfolded spacings pooled over all matrices, in matrix order.
    pub spacings: Vec<f64>,
    pub matrices: usize,
    pub dim: usize,
}

/// Sorted eigenvalues of matrix number `index`: off-diagonal entries `N(0, 1)`,
/// diagonal entries `N(0, 2)`. Each matrix has its own ChaCha stream.
fn sample_eigenvalues(dim: usize, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let z: f64 = rng.sample(StandardNormal);
            if i == j {
                m[(i, i)] = SQRT_2 * z;
            } else {
                m[(i, j)] = z;
                m[(j, i)] = z;
            }
        }
    }
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn central_range(dim: usize) -> std::ops::Range<usize> {
    (3 * dim / 8)..(5 * dim / 8)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 100 {
        return Err(Error::Domain(format!("matrix dimension must be at least 100, got {dim}")));
    }
    Ok(())
}

/// Pooled nearest-neighbour spacings from the central quarter of each spectrum,
/// each divided by the local mean spacing over a centred window of 10% of the levels.
/// Stops once `count` spacings are collected. Deterministic for a given seed.
pub fn goe_mc_oracle(dim: usize, count: usize, seed: u64) -> Result<OracleSample> {
    check_dim(dim)?;
    let range = central_range(dim);
    let per_matrix = range.len() - 1;
    let matrices = count.div_ceil(per_matrix).max(1);
    let half = ((dim as f64 * 0.05).round() as usize).max(1);
    let per: Vec<Vec<f64>> = (0..matrices as u64)
        .into_par_iter()
        .map(|index| {
            let ev = sample_eigenvalues(dim, seed, index);
            range
                .clone()
                .take(per_matrix)
                .map(|i| {
                    let local = (ev[i + half] - ev[i - half]) / (2 * half) as f64;
                    (ev[i + 1] - ev[i]) / local
                })
                .collect()
        })
        .collect();
    let mut spacings: Vec<f64> = per.into_iter().flatten().collect();
    spacings.truncate(count);
    Ok(OracleSample {
        spacings,
        matrices,
        dim,
    })
}

/// Central-quarter eigenvalues of each sampled matrix, unfolded with the
/// semicircle counting function so that the mean density is 1.
pub fn goe_mc_unfolded_levels(dim: usize, matrices: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    check_dim(dim)?;
    let n = dim as f64;
    let radius = 2.0 * n.sqrt();
    let counting = move |x: f64| {
        let u = (x / radius).clamp(-1.0, 1.0);
        n * (0.5 + (u * (1.0 - u * u).sqrt() + u.asin()) / PI)
    };
    Ok((0..matrices as u64)
        .into_par_iter()
        .map(|index| {
            let ev = sample_eigenvalues(dim, seed, index);
            ev[central_range(dim)].iter().map(|&x| counting(x)).collect()
        })
        .collect())
}
