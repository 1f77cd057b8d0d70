//! Key channel statistics: per-branch projections Z, Z̃, their normalized
//! sums T, T̃, squares U, Ũ, the selection metric V and the M-PSK statistic η.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::signal::{quantize_phase, PhaseQuantizer};
use crate::special::q_function;

/// One branch: |h|, the phase error θ̃ and the projections Z, Z̃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyStatDraw {
    pub magnitude: f64,
    pub phase_error: f64,
    pub z: f64,
    pub z_tilde: f64,
}

impl KeyStatDraw {
    pub fn new(magnitude: f64, phase_error: f64) -> Self {
        let a = phase_error + FRAC_PI_4;
        KeyStatDraw {
            magnitude,
            phase_error,
            z: SQRT_2 * magnitude * a.cos(),
            z_tilde: SQRT_2 * magnitude * a.sin(),
        }
    }
}

/// Normalized sums over N_r branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateDraw {
    pub t: f64,
    pub t_tilde: f64,
    pub u: f64,
    pub u_tilde: f64,
    /// Σ Z_i²
    pub sum_sq: f64,
    /// Σ |h_i|²
    pub sum_abs_h_sq: f64,
}

impl AggregateDraw {
    pub fn from_branches(branches: &[KeyStatDraw]) -> Self {
        let n = branches.len() as f64;
        let (mut sz, mut szt, mut sq, mut sh) = (0.0, 0.0, 0.0, 0.0);
        for b in branches {
            sz += b.z;
            szt += b.z_tilde;
            sq += b.z * b.z;
            sh += b.magnitude * b.magnitude;
        }
        let t = sz / n.sqrt();
        let t_tilde = szt / n.sqrt();
        AggregateDraw {
            t,
            t_tilde,
            u: t * t,
            u_tilde: t_tilde * t_tilde,
            sum_sq: sq,
            sum_abs_h_sq: sh,
        }
    }
}

/// η for M-PSK.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpskKeyStat {
    pub eta: f64,
}

/// Gamma law (shape α, rate λ) matched to the first two moments of U.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFit {
    pub shape: f64,
    pub rate: f64,
}

/// Draws |h| (Rayleigh, E|h|² = 1) and θ̃ ~ U(−π/2ⁿ, π/2ⁿ) independently.
pub fn sample_branch<R: Rng + ?Sized>(q: PhaseQuantizer, rng: &mut R) -> KeyStatDraw {
    let power: f64 = rng.sample(Exp1);
    let half = q.half_sector();
    let theta = if half > 0.0 {
        (2.0 * rng.random::<f64>() - 1.0) * half
    } else {
        0.0
    };
    KeyStatDraw::new(power.sqrt(), theta)
}

/// Key statistics of a channel coefficient h under quantizer q, with
/// θ̃ = arg(h·𝒬_n(h)*).
pub fn branch_from_channel(h: Complex64, q: PhaseQuantizer) -> Result<KeyStatDraw> {
    let r = quantize_phase(h, q)?;
    Ok(KeyStatDraw::new(h.norm(), (h * r.conj()).arg()))
}

pub fn sample_aggregate<R: Rng + ?Sized>(q: PhaseQuantizer, n_r: usize, rng: &mut R) -> AggregateDraw {
    assert!(n_r >= 1, "n_r must be positive");
    let branches: Vec<KeyStatDraw> = (0..n_r).map(|_| sample_branch(q, rng)).collect();
    AggregateDraw::from_branches(&branches)
}

/// η = (1/√N_r) Σ |h_i|(cos θ̃_i − sin θ̃_i cot(π/M)).
pub fn eta_from_branches(order: usize, branches: &[KeyStatDraw]) -> MpskKeyStat {
    let cot = 1.0 / (PI / order as f64).tan();
    let s: f64 = branches
        .iter()
        .map(|b| b.magnitude * (b.phase_error.cos() - b.phase_error.sin() * cot))
        .sum();
    MpskKeyStat {
        eta: s / (branches.len() as f64).sqrt(),
    }
}

pub fn sample_eta<R: Rng + ?Sized>(
    order: usize,
    q: PhaseQuantizer,
    n_r: usize,
    rng: &mut R,
) -> Result<MpskKeyStat> {
    if order < 2 || !order.is_power_of_two() {
        return Err(Error::Config(format!("M must be a power of two >= 2, got {order}")));
    }
    if n_r == 0 {
        return Err(Error::Config("n_r must be positive".into()));
    }
    let branches: Vec<KeyStatDraw> = (0..n_r).map(|_| sample_branch(q, rng)).collect();
    Ok(eta_from_branches(order, &branches))
}

/// Selection metric V = |h|²(1 − |sin 2θ̃|) for one 2-bit branch.
pub fn sample_v<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let b = sample_branch(PhaseQuantizer::Bits(2), rng);
    b.magnitude * b.magnitude * (1.0 - (2.0 * b.phase_error).sin().abs())
}

/// (α_L, α_H) with α_L² Σ|h|²/N_r ≤ U ≤ α_H² Σ|h|², valid for n ≥ 3.
pub fn pathwise_alphas(n: u32) -> (f64, f64) {
    let s = (PI / (1u64 << (n - 1)) as f64).sin();
    ((1.0 - s).sqrt(), (1.0 + s).sqrt())
}

/// Density of a single Z.
pub fn pdf_z(q: PhaseQuantizer, z: f64) -> f64 {
    match q {
        PhaseQuantizer::Bits(1) => (2.0 / PI).sqrt() * q_function(-z) * (-z * z / 2.0).exp(),
        _ if z < 0.0 => 0.0,
        PhaseQuantizer::Bits(2) => (2.0 / PI).sqrt() * (-z * z / 2.0).exp(),
        PhaseQuantizer::Bits(n) => {
            if z == 0.0 {
                return 0.0;
            }
            let half = PI / (1u64 << n) as f64;
            let integrand = |t: f64| {
                let d = 1.0 - (2.0 * t).sin();
                (-z * z / d).exp() / d
            };
            let scale = (1u64 << n) as f64 * z / PI;
            let v = integrate_adaptive(integrand, -half, half, 1e-9 / scale, 1e-12)
                .expect("integrand is smooth on the sector");
            scale * v
        }
        PhaseQuantizer::Infinite => 2.0 * z * (-z * z).exp(),
    }
}

/// Pr[V ≤ v] = 1 − 4Q(√v)².
pub fn cdf_v(v: f64) -> Result<f64> {
    if v.is_nan() || v < 0.0 {
        return Err(Error::Domain(format!("cdf_v needs v >= 0, got {v}")));
    }
    let q = q_function(v.sqrt());
    Ok(1.0 - 4.0 * q * q)
}

/// Density of V_max = max of N_r i.i.d. V.
pub fn pdf_v_max(n_r: usize, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let q = q_function(v.sqrt());
    4.0 * n_r as f64 / (2.0 * PI * v).sqrt()
        * (-v / 2.0).exp()
        * q
        * (1.0 - 4.0 * q * q).powi(n_r as i32 - 1)
}

/// cov(Z, Z̃) = (2ⁿ/π) sin(π/2ⁿ)(cos(π/2ⁿ) − 2^{n−2} sin(π/2ⁿ)); the
/// infinite quantizer gives the limit 1 − π/4.
pub fn cov_z_ztilde(q: PhaseQuantizer) -> f64 {
    match q {
        PhaseQuantizer::Bits(n) => {
            let l = (1u64 << n) as f64;
            let a = PI / l;
            l / PI * a.sin() * (a.cos() - l / 4.0 * a.sin())
        }
        PhaseQuantizer::Infinite => 1.0 - FRAC_PI_4,
    }
}

/// (μ_U, σ_U²) at n = 2.
pub fn moments_u(n_r: usize) -> (f64, f64) {
    let n = n_r as f64;
    let mean = (-2.0 + 2.0 * n + PI) / PI;
    let var = 2.0 / (PI * PI * n)
        * (4.0 * (PI - 3.0) + 4.0 * n * n * (PI - 2.0) + n * (20.0 - 8.0 * PI + PI * PI));
    (mean, var)
}

/// Moment-matched gamma law for U at n = 2.
pub fn gamma_fit(n_r: usize) -> GammaFit {
    let n = n_r as f64;
    let d = 8.0 * (PI - 2.0) * n * n + 2.0 * (20.0 - 8.0 * PI + PI * PI) * n + 8.0 * (PI - 3.0);
    let g = 2.0 * n + PI - 2.0;
    GammaFit {
        shape: n * g * g / d,
        rate: PI * n * g / d,
    }
}
