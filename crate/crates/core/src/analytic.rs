//! Closed-form and semi-analytic SEP evaluators.
//!
//! Every sampled expectation here has the form E[g(√(ρ·R²·D²/N))] where R²
//! is a gamma-distributed radius independent of a direction-dependent factor
//! D. The radius is integrated exactly through the Craig-form gamma MGF
//! ([`q_gamma_mgf`], [`qq_gamma_mgf`]) and only the direction is sampled,
//! which keeps the relative error flat even when the SEP is tiny.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::asymptotics::{asymptote_sep, gains_mrc};
use crate::error::{Error, Result};
pub use crate::expectation::{QuadScheme, QuadratureSpec};
use crate::expectation::{estimate_mean, MeanEstimate};
use crate::keystats::{gamma_fit, pdf_v_max};
use crate::quadrature::integrate_adaptive;
use crate::signal::PhaseQuantizer;
use crate::special::{
    binomial, craig_gamma_segment, gauss_2f1, ln_gamma, norm_inv, q_function, q_gamma_mgf,
    qq_gamma_mgf,
};
use crate::stats::{wilson_interval, Z95};

/// How an SEP value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SepMethod {
    ClosedForm,
    SemiAnalytic,
    MonteCarlo,
    Asymptote,
}

/// An SEP value with its interval and provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SepEstimate {
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub method: SepMethod,
    pub samples_used: u64,
    /// Standard error of `value` (0 for deterministic values).
    pub std_error: f64,
    /// Set when an asymptote exceeds 1.
    pub flagged: bool,
}

impl SepEstimate {
    pub fn closed_form(value: f64) -> Self {
        SepEstimate {
            value,
            ci_low: value,
            ci_high: value,
            method: SepMethod::ClosedForm,
            samples_used: 0,
            std_error: 0.0,
            flagged: false,
        }
    }

    pub fn semi_analytic(value: f64, std_error: f64, samples: u64) -> Self {
        let value = value.clamp(0.0, 1.0);
        SepEstimate {
            value,
            ci_low: (value - Z95 * std_error).clamp(0.0, value),
            ci_high: (value + Z95 * std_error).clamp(value, 1.0),
            method: SepMethod::SemiAnalytic,
            samples_used: samples,
            std_error,
            flagged: false,
        }
    }

    /// Error rate with a 95% Wilson interval.
    pub fn monte_carlo(errors: u64, trials: u64) -> Self {
        let p = errors as f64 / trials as f64;
        let (lo, hi) = wilson_interval(errors, trials, Z95);
        SepEstimate {
            value: p,
            ci_low: lo,
            ci_high: hi,
            method: SepMethod::MonteCarlo,
            samples_used: trials,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
            flagged: false,
        }
    }

    /// High-SNR law value; never clamped, flagged above 1.
    pub fn asymptote(value: f64) -> Self {
        SepEstimate {
            value,
            ci_low: value,
            ci_high: value,
            method: SepMethod::Asymptote,
            samples_used: 0,
            std_error: 0.0,
            flagged: value > 1.0,
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("SNR must be positive and finite, got {rho}")))
    }
}

fn check_nr(n_r: usize) -> Result<()> {
    if n_r == 0 {
        Err(Error::Config("n_r must be positive".into()))
    } else {
        Ok(())
    }
}

const TIGHT: f64 = 1e-13;

/// Half-normal variate from a uniform.
#[inline]
fn half_normal(u: f64) -> f64 {
    -norm_inv(0.5 * u)
}

/// Rayleigh variate with E[r²] = 1 from a uniform.
#[inline]
fn rayleigh(u: f64) -> f64 {
    (-u.ln()).sqrt()
}

/// E[Q(√(cW))] for W ~ Exp(1), in closed form.
#[inline]
fn q_exp_mgf(c: f64) -> f64 {
    let k = (c / (c + 2.0)).sqrt();
    1.0 / ((c + 2.0) * (1.0 + k))
}

/// SEP of a single branch conditioned on its phase error, averaged over |h|.
fn siso_conditional_sep(theta: f64, rho: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let c1 = rho * (c - s) * (c - s);
    let c2 = rho * (c + s) * (c + s);
    let split = (c1 / c2).sqrt().atan();
    let both = (craig_gamma_segment(c1, 1.0, split) + craig_gamma_segment(c2, 1.0, FRAC_PI_2 - split))
        / (2.0 * PI);
    q_exp_mgf(c1) + q_exp_mgf(c2) - both
}

fn mrc_siso(q: PhaseQuantizer, rho: f64) -> Result<SepEstimate> {
    let value = match q {
        PhaseQuantizer::Bits(2) => {
            // U = Z² with Z half-normal: E[Q(√(ρU))] = E_W[Q(√(2ρW))], W ~ Gamma(1/2)
            let e = integrate_adaptive(
                |phi: f64| {
                    let s = phi.sin();
                    s / (s * s + rho).sqrt()
                },
                0.0,
                FRAC_PI_2,
                1e-300,
                TIGHT,
            )? / PI;
            2.0 * e - e * e
        }
        PhaseQuantizer::Bits(n) => {
            let half = PI / (1u64 << n) as f64;
            integrate_adaptive(|t| siso_conditional_sep(t, rho), 0.0, half, 1e-300, TIGHT)? / half
        }
        PhaseQuantizer::Infinite => siso_conditional_sep(0.0, rho),
    };
    Ok(SepEstimate::closed_form(value))
}

fn from_sep_mean(m: MeanEstimate) -> SepEstimate {
    SepEstimate::semi_analytic(m.mean, m.std_error, m.samples)
}

/// Rayleigh-radius path: samples θ̃ and the direction of |h|, returning
/// E[Q(√ρT)] + E[Q(√ρT̃)] − E[Q(√ρT)Q(√ρT̃)].
fn mrc_joint_sampled(q: PhaseQuantizer, n_r: usize, rho: f64, quad: &QuadratureSpec) -> Result<SepEstimate> {
    let half = q.half_sector();
    let with_phase = half > 0.0;
    let dims = if with_phase { 2 * n_r } else { n_r };
    let m = n_r as f64;
    let scale = rho / m;
    let est = estimate_mean(dims, quad, |u| {
        let (mut a, mut b, mut r2) = (0.0, 0.0, 0.0);
        for i in 0..n_r {
            let r = rayleigh(u[i]);
            let (s, c) = if with_phase {
                ((2.0 * u[n_r + i] - 1.0) * half).sin_cos()
            } else {
                (0.0, 1.0)
            };
            a += r * (c - s);
            b += r * (c + s);
            r2 += r * r;
        }
        let c1 = scale * a * a / r2;
        let c2 = scale * b * b / r2;
        q_gamma_mgf(c1, m) + q_gamma_mgf(c2, m) - qq_gamma_mgf(c1, c2, m)
    })?;
    Ok(from_sep_mean(est))
}

/// Exact average QPSK SEP of the n-bit phase-quantized MRC receiver.
///
/// n = 2 uses 2E − E² with E = E[Q(√(ρU))]; n ≥ 3 and the infinite
/// quantizer use 2E[Q(√(ρU))] − E[Q(√(ρU))Q(√(ρŨ))]. N_r = 1 is evaluated
/// deterministically whatever the scheme. n = 1 has no exact form here.
pub fn sep_qpsk_mrc_exact(
    q: PhaseQuantizer,
    n_r: usize,
    rho: f64,
    quad: &QuadratureSpec,
) -> Result<SepEstimate> {
    check_nr(n_r)?;
    check_rho(rho)?;
    quad.validate(n_r)?;
    if q == PhaseQuantizer::Bits(1) {
        return Err(Error::Unsupported(
            "n = 1 has an error floor and no exact SEP expression; use the simulator and \
             error_floor_lower_bound"
                .into(),
        ));
    }
    if n_r == 1 {
        return mrc_siso(q, rho);
    }
    match q {
        PhaseQuantizer::Bits(2) => {
            // ΣZ_i² is chi-square(N_r): radius Gamma(N_r/2), direction sampled
            let m = n_r as f64 / 2.0;
            let scale = 2.0 * rho / n_r as f64;
            let e = estimate_mean(n_r, quad, |u| {
                let (mut s, mut r2) = (0.0, 0.0);
                for &x in u {
                    let z = half_normal(x);
                    s += z;
                    r2 += z * z;
                }
                q_gamma_mgf(scale * s * s / r2, m)
            })?;
            let value = 2.0 * e.mean - e.mean * e.mean;
            let se = (2.0 - 2.0 * e.mean).abs() * e.std_error;
            Ok(SepEstimate::semi_analytic(value, se, e.samples))
        }
        _ => mrc_joint_sampled(q, n_r, rho, quad),
    }
}

/// The n = 2 SEP in the joint form 2E[Q] − E[Q·Q̃], which ignores the
/// independence of U and Ũ. Agrees with [`sep_qpsk_mrc_exact`] only because
/// Z and Z̃ are independent at n = 2.
pub fn sep_qpsk_mrc_joint_form(
    q: PhaseQuantizer,
    n_r: usize,
    rho: f64,
    quad: &QuadratureSpec,
) -> Result<SepEstimate> {
    check_nr(n_r)?;
    check_rho(rho)?;
    if quad.scheme == QuadScheme::TensorQuadrature {
        return Err(Error::Config("joint form is sampled only".into()));
    }
    mrc_joint_sampled(q, n_r, rho, quad)
}

/// QPSK SEP of the unquantized MRC receiver, 1 − E[Q(−√(ρ‖h‖²))²].
///
/// ‖h‖² ~ Gamma(N_r, 1), so the expectation is a single Craig integral.
pub fn sep_qpsk_unquantized(n_r: usize, rho: f64, quad: &QuadratureSpec) -> Result<SepEstimate> {
    check_nr(n_r)?;
    check_rho(rho)?;
    quad.validate(n_r)?;
    let m = n_r as f64;
    Ok(SepEstimate::closed_form(2.0 * q_gamma_mgf(rho, m) - qq_gamma_mgf(rho, rho, m)))
}

/// P̃ = E[Q(√(ρU_γ))] for the moment-matched gamma law of U, via ₂F₁.
pub fn p_tilde(n_r: usize, rho: f64) -> Result<f64> {
    check_nr(n_r)?;
    check_rho(rho)?;
    let g = gamma_fit(n_r);
    let (a, l) = (g.shape, g.rate);
    let log_pref = a * (l / (2.0 * rho)).ln() + ln_gamma(2.0 * a) - ln_gamma(a) - ln_gamma(a + 1.0);
    Ok(log_pref.exp() * gauss_2f1(a, a + 0.5, a + 1.0, -2.0 * l / rho)?)
}

/// min(2P̃ − P̃², (G_cρ)^{−G_d}) at n = 2.
pub fn sep_qpsk_mrc_approx(n_r: usize, rho: f64) -> Result<SepEstimate> {
    let p = p_tilde(n_r, rho)?;
    let body = 2.0 * p - p * p;
    let tail = asymptote_sep(&gains_mrc(4, PhaseQuantizer::Bits(2), n_r)?, rho)?.value;
    Ok(SepEstimate::closed_form(body.min(tail)))
}

/// BPSK SEP with 2-bit phase quantization and MRC,
/// E[Q(√((ρ/N_r)(‖Re h‖₁ + ‖Im h‖₁)²))].
pub fn sep_bpsk_mrc(n_r: usize, rho: f64, quad: &QuadratureSpec) -> Result<SepEstimate> {
    check_nr(n_r)?;
    check_rho(rho)?;
    quad.validate(n_r)?;
    if n_r == 1 {
        // (|X₁| + |X₂|)² = R²(1 + sin 2φ) with φ uniform and R²/2 ~ Exp(1)
        let v = integrate_adaptive(
            |phi: f64| q_exp_mgf(rho * (1.0 + (2.0 * phi).sin())),
            0.0,
            FRAC_PI_2,
            1e-300,
            TIGHT,
        )? / FRAC_PI_2;
        return Ok(SepEstimate::closed_form(v));
    }
    // the 2N_r rails are half-normal with chi-square(2N_r) radius
    let m = n_r as f64;
    let scale = rho / m;
    let e = estimate_mean(2 * n_r, quad, |u| {
        let (mut s, mut r2) = (0.0, 0.0);
        for &x in u {
            let z = half_normal(x);
            s += z;
            r2 += z * z;
        }
        q_gamma_mgf(scale * s * s / r2, m)
    })?;
    Ok(from_sep_mean(e))
}

/// High-SNR SC expression E[Q(√(ρ V_max))] by sampling V_max.
///
/// N_r = 1 is evaluated deterministically through [`sep_sc_asymptotic_pdf`].
pub fn sep_sc_asymptotic(n_r: usize, rho: f64, quad: &QuadratureSpec) -> Result<SepEstimate> {
    check_nr(n_r)?;
    check_rho(rho)?;
    quad.validate(n_r)?;
    if n_r == 1 {
        return sep_sc_asymptotic_pdf(n_r, rho);
    }
    let e = estimate_mean(2 * n_r, quad, |u| {
        let mut vmax: f64 = 0.0;
        for i in 0..n_r {
            let w = -u[i].ln();
            let theta = (2.0 * u[n_r + i] - 1.0) * FRAC_PI_4;
            vmax = vmax.max(w * (1.0 - (2.0 * theta).sin().abs()));
        }
        q_function((rho * vmax).sqrt())
    })?;
    Ok(from_sep_mean(e))
}

/// Integral over [0, ∞) split into panels that double from `first`; keeps
/// adaptive refinement from missing a narrow peak at the origin.
fn integrate_doubling<F: FnMut(f64) -> f64>(mut f: F, first: f64, end: f64) -> Result<f64> {
    let mut acc = integrate_adaptive(&mut f, 0.0, first, 1e-300, TIGHT)?;
    let mut lo = first;
    while lo < end {
        let hi = (2.0 * lo).min(end);
        acc += integrate_adaptive(&mut f, lo, hi, 1e-300, TIGHT)?;
        lo = hi;
    }
    Ok(acc)
}

/// High-SNR SC expression by integrating against the density of V_max.
pub fn sep_sc_asymptotic_pdf(n_r: usize, rho: f64) -> Result<SepEstimate> {
    check_nr(n_r)?;
    check_rho(rho)?;
    // v = t², so the density becomes smooth in t
    let v = integrate_doubling(
        |t| q_function(rho.sqrt() * t) * 2.0 * t * pdf_v_max(n_r, t * t),
        (1.0 / rho.sqrt()).min(1.0),
        40.0,
    )?;
    Ok(SepEstimate::closed_form(v))
}

/// Closed-form SEP of the majority decision with 2-bit CSIR.
pub fn sep_lcsi_closed_form(n_r: usize, rho: f64) -> Result<SepEstimate> {
    check_nr(n_r)?;
    check_rho(rho)?;
    let p1 = (1.0 / rho.sqrt()).atan() / PI;
    let k = n_r.div_ceil(2) as u64;
    let top = 2 * k - 1;
    let p: f64 = (k..=top)
        .map(|i| binomial(top, i) * p1.powi(i as i32) * (1.0 - p1).powi((top - i) as i32))
        .sum();
    Ok(SepEstimate::closed_form(2.0 * p - p * p))
}

/// Lower and upper bounds E[Q(√(2ρ) sin(π/M) η)] ≤ 𝒫 ≤ 2E[·] for M-PSK.
pub fn mpsk_sep_bounds(
    order: usize,
    q: PhaseQuantizer,
    n_r: usize,
    rho: f64,
    quad: &QuadratureSpec,
) -> Result<(SepEstimate, SepEstimate)> {
    if order < 2 || !order.is_power_of_two() {
        return Err(Error::Config(format!("M must be a power of two >= 2, got {order}")));
    }
    check_nr(n_r)?;
    check_rho(rho)?;
    quad.validate(n_r)?;
    let sin_m = (PI / order as f64).sin();
    let cot = 1.0 / (PI / order as f64).tan();
    let m = n_r as f64;
    let scale = 2.0 * rho * sin_m * sin_m / m;
    let half = q.half_sector();
    let signed = |d: f64, c: f64| {
        if d >= 0.0 {
            q_gamma_mgf(c, m)
        } else {
            1.0 - q_gamma_mgf(c, m)
        }
    };
    let lower = if n_r == 1 {
        let cond = |t: f64| {
            let d = t.cos() - t.sin() * cot;
            signed(d, scale * d * d)
        };
        let v = if half > 0.0 {
            integrate_adaptive(cond, -half, half, 1e-300, TIGHT)? / (2.0 * half)
        } else {
            cond(0.0)
        };
        SepEstimate::closed_form(v)
    } else {
        let dims = if half > 0.0 { 2 * n_r } else { n_r };
        let e = estimate_mean(dims, quad, |u| {
            let (mut d, mut r2) = (0.0, 0.0);
            for i in 0..n_r {
                let r = rayleigh(u[i]);
                let (s, c) = if half > 0.0 {
                    ((2.0 * u[n_r + i] - 1.0) * half).sin_cos()
                } else {
                    (0.0, 1.0)
                };
                d += r * (c - s * cot);
                r2 += r * r;
            }
            signed(d, scale * d * d / r2)
        })?;
        from_sep_mean(e)
    };
    let mut upper = lower;
    upper.value = (2.0 * lower.value).min(1.0);
    upper.std_error = 2.0 * lower.std_error;
    upper.ci_low = (2.0 * lower.ci_low).min(upper.value);
    upper.ci_high = (2.0 * lower.ci_high).min(1.0).max(upper.value);
    Ok((lower, upper))
}
