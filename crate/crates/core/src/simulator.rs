//! Monte Carlo link simulator.
//!
//! Trials are grouped into batches of 2¹⁶; batch b draws from ChaCha8 stream
//! b of the master seed, so the counts depend only on (config, trials, seed).

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytic::SepEstimate;
use crate::error::{Error, Result};
use crate::signal::{
    complex_normal, detect_lcsi_majority, lcsi_exponent, sector_index, Combiner, PhaseQuantizer,
    SystemConfig,
};
use crate::stats::{compare_counts, Agreement};

/// Trials per batch.
pub const BATCH_SIZE: u64 = 1 << 16;
/// Smallest accepted trial count.
pub const MIN_TRIALS: u64 = 10_000;

/// Identifies one random substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStreamSpec {
    pub master_seed: u64,
    pub batch_index: u64,
}

impl RngStreamSpec {
    pub fn new(master_seed: u64, batch_index: u64) -> Self {
        RngStreamSpec { master_seed, batch_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.batch_index);
        rng
    }
}

/// Error counts of one batch, also split by transmitted symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialBatchResult {
    pub errors: u64,
    pub trials: u64,
    pub batch_index: u64,
    pub symbol_errors: Vec<u64>,
    pub symbol_trials: Vec<u64>,
}

/// Outcome of [`Simulator::simulate_sep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub estimate: SepEstimate,
    pub errors: u64,
    pub trials: u64,
    pub symbol_errors: Vec<u64>,
    pub symbol_trials: Vec<u64>,
    /// No errors were observed; raise the trial count before fitting slopes.
    pub zero_errors: bool,
    pub elapsed: Duration,
}

/// Two simulated SEPs that should agree.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub label: String,
    pub first: SimulationReport,
    pub second: SimulationReport,
    pub agreement: Agreement,
    /// Allowed |z| (3).
    pub tolerance: f64,
    pub passed: bool,
}

/// Per-configuration constants used by the trial kernel.
struct Link {
    order: usize,
    points: Vec<Complex64>,
    quantizer: PhaseQuantizer,
    /// S_{2^n} when small enough to tabulate.
    q_points: Option<Vec<Complex64>>,
    antennas: usize,
    sqrt_rho: f64,
    combiner: Combiner,
}

impl Link {
    fn new(cfg: &SystemConfig) -> Self {
        let q_points = match cfg.quantizer {
            PhaseQuantizer::Bits(n) if n <= 16 => {
                let l = 1usize << n;
                Some(
                    (0..l)
                        .map(|i| Complex64::from_polar(1.0, FRAC_PI_4 + 2.0 * PI * i as f64 / l as f64))
                        .collect(),
                )
            }
            _ => None,
        };
        Link {
            order: cfg.constellation.order(),
            points: cfg.constellation.points().to_vec(),
            quantizer: cfg.quantizer,
            q_points,
            antennas: cfg.antennas,
            sqrt_rho: cfg.snr.sqrt(),
            combiner: cfg.combiner,
        }
    }

    #[inline]
    fn quantize(&self, x: Complex64) -> Complex64 {
        match self.quantizer {
            PhaseQuantizer::Bits(n) => {
                let i = sector_index(x, n);
                match &self.q_points {
                    Some(t) => t[i],
                    None => Complex64::from_polar(1.0, FRAC_PI_4 + 2.0 * PI * i as f64 / (1u64 << n) as f64),
                }
            }
            PhaseQuantizer::Infinite => {
                let r = x.norm();
                // zero has probability 0; map it to the first point like the finite quantizers
                if r == 0.0 {
                    Complex64::from_polar(1.0, FRAC_PI_4)
                } else {
                    x / r
                }
            }
        }
    }

    #[inline]
    fn detect(&self, x: Complex64) -> usize {
        sector_index(x, self.order.trailing_zeros())
    }

    /// One trial; returns (sent, detected).
    fn trial<R: Rng>(&self, rng: &mut R, scratch: &mut Scratch) -> (usize, usize) {
        let sent = rng.random_range(0..self.order);
        let s = self.points[sent];
        let a = self.sqrt_rho;
        let detected = match self.combiner {
            Combiner::Mrc => {
                let mut acc = Complex64::new(0.0, 0.0);
                for _ in 0..self.antennas {
                    let h = complex_normal(rng);
                    let n = complex_normal(rng);
                    acc += h.conj() * self.quantize(a * h * s + n);
                }
                self.detect(acc)
            }
            Combiner::E2Equivalent => {
                let mut acc = Complex64::new(0.0, 0.0);
                for _ in 0..self.antennas {
                    let h = complex_normal(rng);
                    let n = complex_normal(rng);
                    acc += self.quantize(h).conj() * (a * h * s + n);
                }
                self.detect(acc)
            }
            Combiner::MisoMrtDual => {
                let mut acc = Complex64::new(0.0, 0.0);
                for _ in 0..self.antennas {
                    let h = complex_normal(rng);
                    acc += h * self.quantize(h.conj() * s);
                }
                let w = complex_normal(rng);
                self.detect(a / (self.antennas as f64).sqrt() * acc + w)
            }
            Combiner::Sc => {
                // |h|²(1 − |sin 2θ̃|) with θ̃ the phase error of h·s, which is what
                // the quantized branch sees; it reduces to (|Re h| − |Im h|)²
                let mut best = f64::NEG_INFINITY;
                let mut pick = Complex64::new(0.0, 0.0);
                for _ in 0..self.antennas {
                    let h = complex_normal(rng);
                    let n = complex_normal(rng);
                    let d = h.re.abs() - h.im.abs();
                    let metric = d * d;
                    if metric > best {
                        best = metric;
                        pick = h.conj() * self.quantize(a * h * s + n);
                    }
                }
                self.detect(pick)
            }
            Combiner::LcsiMajority => {
                scratch.lcsi.clear();
                scratch.r.clear();
                for _ in 0..self.antennas {
                    let h = complex_normal(rng);
                    let n = complex_normal(rng);
                    scratch.lcsi.push(lcsi_exponent(h));
                    scratch.r.push(sector_index(a * h * s + n, 2));
                }
                detect_lcsi_majority(&scratch.lcsi, &scratch.r, rng)
            }
        };
        (sent, detected)
    }
}

#[derive(Default)]
struct Scratch {
    lcsi: Vec<u8>,
    r: Vec<usize>,
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < MIN_TRIALS {
        Err(Error::InsufficientTrials(format!(
            "at least {MIN_TRIALS} trials are required, got {trials}"
        )))
    } else {
        Ok(())
    }
}

/// Runs `trials` trials on one stream.
pub fn run_batch(config: &SystemConfig, stream: RngStreamSpec, trials: u64) -> Result<TrialBatchResult> {
    config.validate()?;
    let link = Link::new(config);
    Ok(run_batch_with(&link, stream, trials))
}

fn run_batch_with(link: &Link, stream: RngStreamSpec, trials: u64) -> TrialBatchResult {
    let mut rng = stream.rng();
    let mut scratch = Scratch::default();
    let mut symbol_errors = vec![0u64; link.order];
    let mut symbol_trials = vec![0u64; link.order];
    for _ in 0..trials {
        let (sent, detected) = link.trial(&mut rng, &mut scratch);
        symbol_trials[sent] += 1;
        symbol_errors[sent] += (sent != detected) as u64;
    }
    TrialBatchResult {
        errors: symbol_errors.iter().sum(),
        trials,
        batch_index: stream.batch_index,
        symbol_errors,
        symbol_trials,
    }
}

/// Trial-level (sent, detected) pairs for one stream.
pub fn trial_decisions(config: &SystemConfig, stream: RngStreamSpec, trials: u64) -> Result<Vec<(usize, usize)>> {
    config.validate()?;
    let link = Link::new(config);
    let mut rng = stream.rng();
    let mut scratch = Scratch::default();
    Ok((0..trials).map(|_| link.trial(&mut rng, &mut scratch)).collect())
}

/// Parallel batch runner.
pub struct Simulator {
    workers: usize,
    pool: rayon::ThreadPool,
}

impl std::fmt::Debug for Simulator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulator").field("workers", &self.workers).finish()
    }
}

impl Simulator {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::Config("worker count must be positive".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        Ok(Simulator { workers, pool })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Simulated SEP with a 95% Wilson interval.
    pub fn simulate_sep(&self, config: &SystemConfig, trials: u64, seed: u64) -> Result<SimulationReport> {
        config.validate()?;
        check_trials(trials)?;
        let start = Instant::now();
        let link = Link::new(config);
        let batches = trials.div_ceil(BATCH_SIZE);
        let results: Vec<TrialBatchResult> = self.pool.install(|| {
            (0..batches)
                .into_par_iter()
                .map(|b| {
                    let n = BATCH_SIZE.min(trials - b * BATCH_SIZE);
                    run_batch_with(&link, RngStreamSpec::new(seed, b), n)
                })
                .collect()
        });
        let mut symbol_errors = vec![0u64; link.order];
        let mut symbol_trials = vec![0u64; link.order];
        for r in &results {
            for i in 0..link.order {
                symbol_errors[i] += r.symbol_errors[i];
                symbol_trials[i] += r.symbol_trials[i];
            }
        }
        let errors: u64 = symbol_errors.iter().sum();
        Ok(SimulationReport {
            estimate: SepEstimate::monte_carlo(errors, trials),
            errors,
            trials,
            symbol_errors,
            symbol_trials,
            zero_errors: errors == 0,
            elapsed: start.elapsed(),
        })
    }

    fn compare(
        &self,
        label: String,
        a: &SystemConfig,
        b: &SystemConfig,
        trials: u64,
        seed: u64,
    ) -> Result<VerifyReport> {
        let first = self.simulate_sep(a, trials, seed)?;
        let second = self.simulate_sep(b, trials, independent_seed(seed))?;
        let agreement = compare_counts(first.errors, first.trials, second.errors, second.trials);
        let tolerance = 3.0;
        Ok(VerifyReport {
            label,
            passed: agreement.within(tolerance),
            first,
            second,
            agreement,
            tolerance,
        })
    }

    /// ε₁ chain (quantize y, combine with h) against the ε₂ chain (combine
    /// unquantized y with 𝒬_n(h)).
    pub fn verify_theorem1(
        &self,
        m_order: usize,
        q: PhaseQuantizer,
        n_r: usize,
        rho: f64,
        trials: u64,
        seed: u64,
    ) -> Result<VerifyReport> {
        let a = SystemConfig::new(m_order, q, n_r, rho, Combiner::Mrc)?;
        let b = SystemConfig::new(m_order, q, n_r, rho, Combiner::E2Equivalent)?;
        self.compare(format!("theorem1 M={m_order} n={q} N_r={n_r} rho={rho:.4}"), &a, &b, trials, seed)
    }

    /// SIMO-MRC against the MISO transmitter with N_t = N_r.
    pub fn verify_duality(
        &self,
        m_order: usize,
        q: PhaseQuantizer,
        antennas: usize,
        rho: f64,
        trials: u64,
        seed: u64,
    ) -> Result<VerifyReport> {
        let a = SystemConfig::new(m_order, q, antennas, rho, Combiner::Mrc)?;
        let b = SystemConfig::new(m_order, q, antennas, rho, Combiner::MisoMrtDual)?;
        self.compare(format!("duality M={m_order} n={q} antennas={antennas} rho={rho:.4}"), &a, &b, trials, seed)
    }
}

impl Default for Simulator {
    /// One worker per available core.
    fn default() -> Self {
        let w = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        Simulator::new(w).expect("thread pool")
    }
}

/// Seed for the second arm of a comparison (splitmix64 step).
pub fn independent_seed(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
