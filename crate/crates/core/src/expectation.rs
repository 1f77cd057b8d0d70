//! Expectation engine for the semi-analytic evaluators: randomized Sobol
//! points (Owen-scrambled, independent replicates) or plain pseudo-random
//! sampling over the unit hypercube.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Sampling scheme for expectations without closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadScheme {
    SobolQmc,
    PlainMc,
    /// Deterministic quadrature; only for single-antenna integrands.
    TensorQuadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub scheme: QuadScheme,
    pub points: usize,
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            scheme: QuadScheme::SobolQmc,
            points: 1 << 17,
            seed: 0x0005_eed0_f5e9,
        }
    }
}

impl QuadratureSpec {
    pub fn sobol(points: usize, seed: u64) -> Self {
        QuadratureSpec { scheme: QuadScheme::SobolQmc, points, seed }
    }

    pub fn plain(points: usize, seed: u64) -> Self {
        QuadratureSpec { scheme: QuadScheme::PlainMc, points, seed }
    }

    pub fn tensor() -> Self {
        QuadratureSpec { scheme: QuadScheme::TensorQuadrature, points: 0, seed: 0 }
    }

    /// Checks the spec against the number of antennas of the integrand.
    pub fn validate(&self, n_r: usize) -> Result<()> {
        match self.scheme {
            QuadScheme::TensorQuadrature if n_r != 1 => Err(Error::Config(format!(
                "tensor quadrature is only available for N_r = 1, got {n_r}"
            ))),
            QuadScheme::TensorQuadrature => Ok(()),
            _ if self.points < 16 => Err(Error::Config(format!(
                "at least 16 sample points are required, got {}",
                self.points
            ))),
            _ => Ok(()),
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

const MAX_SOBOL_POINTS: usize = 1 << 16;
const MAX_SOBOL_DIMS: usize = sobol_burley::NUM_DIMENSIONS as usize;
const MIN_REPLICATES: usize = 8;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// E[f(U)] for U uniform on the `dims`-dimensional unit cube.
///
/// Sobol estimates average independent scrambled replicates; the standard
/// error is the spread of the replicate means. The f32 Sobol coordinates are
/// dithered below their 2⁻²⁴ resolution so inverse transforms see a
/// continuous uniform. Results depend only on the spec, not on thread count.
pub fn estimate_mean<F>(dims: usize, spec: &QuadratureSpec, f: F) -> Result<MeanEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if dims == 0 {
        return Err(Error::Config("integrand needs at least one dimension".into()));
    }
    match spec.scheme {
        QuadScheme::SobolQmc => {
            if dims > MAX_SOBOL_DIMS {
                return Err(Error::Config(format!(
                    "Sobol engine supports at most {MAX_SOBOL_DIMS} dimensions, got {dims}"
                )));
            }
            let reps = MIN_REPLICATES.max(spec.points.div_ceil(MAX_SOBOL_POINTS));
            let per = (spec.points / reps).max(1);
            let means: Vec<f64> = (0..reps)
                .into_par_iter()
                .map(|r| {
                    let key = splitmix(spec.seed ^ splitmix(r as u64));
                    let seed32 = (key >> 32) as u32 ^ key as u32;
                    let mut u = vec![0.0; dims];
                    let mut acc = 0.0;
                    for i in 0..per {
                        for (d, slot) in u.iter_mut().enumerate() {
                            let s = sobol_burley::sample(i as u32, d as u32, seed32) as f64;
                            let jitter = splitmix(key ^ ((i as u64) << 20) ^ d as u64) >> 11;
                            let x = s + jitter as f64 * (1.0 / (1u64 << 53) as f64) / (1u64 << 24) as f64;
                            *slot = x.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
                        }
                        acc += f(&u);
                    }
                    acc / per as f64
                })
                .collect();
            let k = reps as f64;
            let mean = means.iter().sum::<f64>() / k;
            let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (k - 1.0);
            Ok(MeanEstimate {
                mean,
                std_error: (var / k).sqrt(),
                samples: (reps * per) as u64,
            })
        }
        QuadScheme::PlainMc => {
            let chunks = MIN_REPLICATES;
            let per = (spec.points / chunks).max(1);
            let sums: Vec<(f64, f64)> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                    rng.set_stream(c as u64);
                    let mut u = vec![0.0; dims];
                    let (mut s1, mut s2) = (0.0, 0.0);
                    for _ in 0..per {
                        for slot in u.iter_mut() {
                            // (0, 1): avoids log(0) in inverse transforms
                            *slot = (rng.random::<u64>() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
                                + 0.5 / (1u64 << 53) as f64;
                        }
                        let v = f(&u);
                        s1 += v;
                        s2 += v * v;
                    }
                    (s1, s2)
                })
                .collect();
            let n = (chunks * per) as f64;
            let s1: f64 = sums.iter().map(|s| s.0).sum();
            let s2: f64 = sums.iter().map(|s| s.1).sum();
            let mean = s1 / n;
            let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
            Ok(MeanEstimate {
                mean,
                std_error: (var / n).sqrt(),
                samples: n as u64,
            })
        }
        QuadScheme::TensorQuadrature => Err(Error::Config(
            "tensor quadrature has no sampling form; use the deterministic evaluator".into(),
        )),
    }
}
