//! Self-check suite behind `pqsimo verify`.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::fmt;

use pqsimo_core::analytic::sep_lcsi_closed_form;
use pqsimo_core::asymptotics::error_floor_lower_bound;
use pqsimo_core::keystats::{branch_from_channel, cov_z_ztilde, moments_u};
use pqsimo_core::signal::complex_normal;
use pqsimo_core::stats::{batch_mean_se, compare_to_reference};
use pqsimo_core::{
    db_to_linear, Combiner, KeyStatDraw, PhaseQuantizer, Simulator, SystemConfig, VerifyReport,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// Deliberate faults used to make sure the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Z computed as √2|h|sin θ̃ instead of √2|h|cos(θ̃ + π/4).
    SwapZ,
}

impl std::str::FromStr for Mutation {
    type Err = crate::error::CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "swap-z" | "swap_z" => Ok(Mutation::SwapZ),
            other => Err(crate::error::CliError::Config(format!("unknown mutation '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub tolerance: String,
    pub measured: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifySummary {
    pub checks: Vec<CheckResult>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, tolerance: impl Into<String>, measured: String, passed: bool) {
        self.checks.push(CheckResult { name: name.into(), tolerance: tolerance.into(), measured, passed });
    }

    fn push_report(&mut self, r: &VerifyReport) {
        self.push(
            r.label.clone(),
            format!("|z| <= {}", r.tolerance),
            format!(
                "{:.4e} vs {:.4e}, z = {:.2}",
                r.first.estimate.value,
                r.second.estimate.value,
                r.agreement.z_score()
            ),
            r.passed,
        );
    }
}

impl fmt::Display for VerifySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<44} tol {:<16} measured {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.tolerance,
                c.measured
            )?;
        }
        let ok = self.checks.iter().filter(|c| c.passed).count();
        write!(f, "{ok}/{} checks passed", self.checks.len())
    }
}

const TRIALS: u64 = 1_000_000;
const BATCHES: usize = 20;
const PER_BATCH: usize = 50_000;
/// Batch-mean checks allow this many standard errors.
const SE_TOL: f64 = 4.0;

fn branch(h: num_complex::Complex64, q: PhaseQuantizer, mutation: Option<Mutation>) -> Result<KeyStatDraw> {
    let mut b = branch_from_channel(h, q)?;
    if mutation == Some(Mutation::SwapZ) {
        b.z = SQRT_2 * b.magnitude * b.phase_error.sin();
    } else {
        debug_assert!((b.z - SQRT_2 * b.magnitude * (b.phase_error + FRAC_PI_4).cos()).abs() < 1e-12);
    }
    Ok(b)
}

fn covariance_checks(out: &mut VerifySummary, seed: u64, mutation: Option<Mutation>) -> Result<()> {
    for n in [1u32, 2, 3] {
        let q = PhaseQuantizer::Bits(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x100 + n as u64));
        let mut covs = Vec::with_capacity(BATCHES);
        for _ in 0..BATCHES {
            let (mut sz, mut szt, mut szz) = (0.0, 0.0, 0.0);
            for _ in 0..PER_BATCH {
                let b = branch(complex_normal(&mut rng), q, mutation)?;
                sz += b.z;
                szt += b.z_tilde;
                szz += b.z * b.z_tilde;
            }
            let k = PER_BATCH as f64;
            covs.push((szz - sz * szt / k) / (k - 1.0));
        }
        let (cov, se) = batch_mean_se(&covs);
        let want = cov_z_ztilde(q);
        out.push(
            format!("cov(Z, Z~) n={n}"),
            format!("{SE_TOL} se"),
            format!("{cov:+.5} vs {want:+.5} (se {se:.1e})"),
            (cov - want).abs() <= SE_TOL * se,
        );
    }
    Ok(())
}

fn moment_checks(out: &mut VerifySummary, seed: u64, mutation: Option<Mutation>) -> Result<()> {
    let q = PhaseQuantizer::Bits(2);
    for n_r in [1usize, 2, 4, 8] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x200 + n_r as u64));
        let (mut means, mut vars) = (Vec::new(), Vec::new());
        for _ in 0..BATCHES {
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..PER_BATCH {
                let mut t = 0.0;
                for _ in 0..n_r {
                    t += branch(complex_normal(&mut rng), q, mutation)?.z;
                }
                let u = t * t / n_r as f64;
                s1 += u;
                s2 += u * u;
            }
            let k = PER_BATCH as f64;
            means.push(s1 / k);
            vars.push((s2 - s1 * s1 / k) / (k - 1.0));
        }
        let (m, m_se) = batch_mean_se(&means);
        let (v, v_se) = batch_mean_se(&vars);
        let (mu, var) = moments_u(n_r);
        out.push(
            format!("moments of U N_r={n_r}"),
            format!("{SE_TOL} se"),
            format!("mean {m:.4} vs {mu:.4}, var {v:.4} vs {var:.4}"),
            (m - mu).abs() <= SE_TOL * m_se && (v - var).abs() <= SE_TOL * v_se,
        );
    }
    Ok(())
}

/// Runs every check. A failed check is reported, not returned as an error.
pub fn run_verify(sim: &Simulator, seed: u64, mutation: Option<Mutation>) -> Result<VerifySummary> {
    let mut out = VerifySummary::default();
    let theorem = [
        (4usize, PhaseQuantizer::Bits(2), 4usize, 10.0),
        (8, PhaseQuantizer::Bits(3), 2, 10.0),
        (4, PhaseQuantizer::Infinite, 2, 5.0),
    ];
    for (i, &(m, q, n_r, db)) in theorem.iter().enumerate() {
        let r = sim.verify_theorem1(m, q, n_r, db_to_linear(db), TRIALS, seed.wrapping_add(i as u64))?;
        out.push_report(&r);
    }
    let r = sim.verify_duality(8, PhaseQuantizer::Bits(3), 4, db_to_linear(10.0), TRIALS, seed.wrapping_add(10))?;
    out.push_report(&r);

    covariance_checks(&mut out, seed, mutation)?;
    moment_checks(&mut out, seed, mutation)?;

    for n_r in [1usize, 2] {
        let cfg = SystemConfig::new(4, PhaseQuantizer::Bits(1), n_r, db_to_linear(40.0), Combiner::Mrc)?;
        let r = sim.simulate_sep(&cfg, TRIALS, seed.wrapping_add(20 + n_r as u64))?;
        let bound = error_floor_lower_bound(n_r);
        out.push(
            format!("floor n=1 N_r={n_r} 40 dB"),
            format!(">= {bound}"),
            format!("{:.5}", r.estimate.value),
            r.estimate.value >= bound,
        );
    }

    let rho = db_to_linear(10.0);
    let cfg = SystemConfig::new(4, PhaseQuantizer::Bits(2), 3, rho, Combiner::LcsiMajority)?;
    let r = sim.simulate_sep(&cfg, TRIALS, seed.wrapping_add(30))?;
    let cf = sep_lcsi_closed_form(3, rho)?.value;
    let a = compare_to_reference(r.errors, r.trials, cf, 0.0);
    out.push(
        "lcsi N_r=3 10 dB vs closed form",
        "|z| <= 3",
        format!("{:.4e} vs {cf:.4e}, z = {:.2}", r.estimate.value, a.z_score()),
        a.within(3.0),
    );
    Ok(out)
}
