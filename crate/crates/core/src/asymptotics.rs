//! High-SNR diversity and coding gains, error floors and slope fitting.

use std::f64::consts::PI;

use crate::analytic::SepEstimate;
use crate::error::{Error, Result};
use crate::signal::PhaseQuantizer;
use crate::special::{binomial, gamma, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// SEP saturates at a nonzero floor (G_d = 0).
    Floor,
    /// SEP decays as (G_c ρ)^{−G_d}.
    PowerLaw,
}

/// Diversity and coding gain pair.
///
/// `coding` is `None` in the floor regime and also where no coding gain is
/// known (power-law regime with M ≠ 4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighSnrGains {
    pub diversity: f64,
    pub coding: Option<f64>,
    pub regime: Regime,
}

impl HighSnrGains {
    fn power_law(diversity: f64, coding: Option<f64>) -> Self {
        HighSnrGains { diversity, coding, regime: Regime::PowerLaw }
    }

    fn floor() -> Self {
        HighSnrGains { diversity: 0.0, coding: None, regime: Regime::Floor }
    }

    /// Asymptote coefficient G_c^{−G_d}, i.e. SEP ≈ coefficient · ρ^{−G_d}.
    pub fn coefficient(&self) -> Option<f64> {
        self.coding.map(|g| g.powf(-self.diversity))
    }
}

fn check_nr(n_r: usize) -> Result<()> {
    if n_r == 0 {
        Err(Error::Config("n_r must be positive".into()))
    } else {
        Ok(())
    }
}

/// Gains of phase-quantized MRC with M-PSK.
///
/// Diversity is 0, N_r/2 or N_r according to whether 2ⁿ is below, equal to
/// or above M. Coding gains are only given for M = 4.
pub fn gains_mrc(m_order: usize, q: PhaseQuantizer, n_r: usize) -> Result<HighSnrGains> {
    if m_order < 2 || !m_order.is_power_of_two() {
        return Err(Error::Config(format!("M must be a power of two >= 2, got {m_order}")));
    }
    check_nr(n_r)?;
    let n = n_r as f64;
    let levels = q.levels();
    let qpsk = m_order == 4;
    let g = match levels {
        Some(l) if l < m_order => HighSnrGains::floor(),
        Some(l) if l == m_order => {
            let gc = qpsk.then(|| {
                let log_inner = n * 2f64.ln() - (n + 1.0) / 2.0 * PI.ln() + n / 2.0 * n.ln()
                    + ln_gamma((n + 1.0) / 2.0)
                    - ln_gamma(n + 1.0);
                (-2.0 / n * log_inner).exp()
            });
            HighSnrGains::power_law(n / 2.0, gc)
        }
        _ => {
            let base = (ln_gamma(n + 1.0) / n).exp() / n;
            let gc = qpsk.then(|| match q {
                PhaseQuantizer::Bits(bits) => {
                    let x = PI / (1u64 << (bits - 1)) as f64;
                    base * x / x.tan()
                }
                PhaseQuantizer::Infinite => base,
            });
            HighSnrGains::power_law(n, gc)
        }
    };
    Ok(g)
}

/// Gains of unquantized MRC with QPSK.
pub fn gains_unquantized(n_r: usize) -> Result<HighSnrGains> {
    check_nr(n_r)?;
    let n = n_r as u64;
    Ok(HighSnrGains::power_law(n_r as f64, Some(2.0 * binomial(2 * n, n).powf(-1.0 / n_r as f64))))
}

/// Gains of 2-bit selection combining with QPSK.
pub fn gains_sc(n_r: usize) -> Result<HighSnrGains> {
    check_nr(n_r)?;
    let n = n_r as f64;
    let inner = 2f64.powf(2.0 * n - 1.0) * PI.powf(-(n + 1.0) / 2.0) * gamma((n + 1.0) / 2.0);
    Ok(HighSnrGains::power_law(n / 2.0, Some(inner.powf(-2.0 / n))))
}

/// Gains of the majority decision with 2-bit CSIR.
pub fn gains_lcsi(n_r: usize) -> Result<HighSnrGains> {
    check_nr(n_r)?;
    let k = n_r.div_ceil(2) as u64;
    let gc = PI * PI * binomial(2 * k, k).powf(-2.0 / k as f64);
    Ok(HighSnrGains::power_law(k as f64 / 2.0, Some(gc)))
}

/// Gains implied by a small-value density a·x^t of X when SEP ≈ E[Q(√(kρX))].
///
/// The factor in front of E[Q] must be folded into `a`.
pub fn gains_from_small_value_density(a: f64, t: f64, k: f64) -> HighSnrGains {
    let c_t = 2f64.powf(t) * gamma(t + 1.5) / (PI.sqrt() * (t + 1.0));
    HighSnrGains::power_law(t + 1.0, Some(k * (a * c_t).powf(-1.0 / (t + 1.0))))
}

/// Lower bound 2^{−1−2N_r} on the SEP floor of 1-bit QPSK.
pub fn error_floor_lower_bound(n_r: usize) -> f64 {
    2f64.powf(-1.0 - 2.0 * n_r as f64)
}

/// (G_c ρ)^{−G_d}.
pub fn asymptote_sep(gains: &HighSnrGains, rho: f64) -> Result<SepEstimate> {
    if gains.regime == Regime::Floor {
        return Err(Error::Unsupported("no power-law asymptote in the error-floor regime".into()));
    }
    let gc = gains
        .coding
        .ok_or_else(|| Error::Unsupported("coding gain undefined for this configuration".into()))?;
    Ok(SepEstimate::asymptote((gc * rho).powf(-gains.diversity)))
}

/// Least-squares diversity estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub estimated_gd: f64,
    pub rho_points: Vec<(f64, f64)>,
    /// RMS residual of log10 SEP about the fitted line.
    pub residual: f64,
}

/// Fits the slope of −log SEP against log ρ (ρ linear).
pub fn fit_diversity_slope(points: &[(f64, SepEstimate)]) -> Result<SlopeFit> {
    if points.len() < 2 {
        return Err(Error::Config("slope fit needs at least two points".into()));
    }
    if let Some((rho, _)) = points.iter().find(|(_, e)| e.value <= 0.0) {
        return Err(Error::InsufficientTrials(format!(
            "zero SEP at rho = {rho}; increase the trial count"
        )));
    }
    if points.iter().any(|(rho, _)| !(rho.is_finite() && *rho > 0.0)) {
        return Err(Error::Domain("rho must be positive and finite".into()));
    }
    let xs: Vec<f64> = points.iter().map(|(r, _)| r.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, e)| e.value.log10()).collect();
    let span = xs.iter().cloned().fold(f64::MIN, f64::max) - xs.iter().cloned().fold(f64::MAX, f64::min);
    if span < 1.0 - 1e-9 {
        return Err(Error::Config(format!("rho span {:.2} dB is below 10 dB", 10.0 * span)));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let residual =
        (xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum::<f64>() / n).sqrt();
    Ok(SlopeFit {
        estimated_gd: -slope,
        rho_points: points.iter().map(|(r, e)| (*r, e.value)).collect(),
        residual,
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{sep_qpsk_mrc_exact, sep_qpsk_unquantized, QuadratureSpec};
    use crate::special::factorial;
    use proptest::prelude::*;

    #[test]
    fn siso_two_bit() {
        let g = gains_mrc(4, PhaseQuantizer::Bits(2), 1).unwrap();
        assert_eq!(g.diversity, 0.5);
        assert!((g.coding.unwrap() - PI * PI / 4.0).abs() < 1e-12);
        for rho in [1.0, 100.0, 1e5] {
            let v = asymptote_sep(&g, rho).unwrap().value;
            assert!((v - 2.0 / PI / rho.sqrt()).abs() < 1e-12 * v.max(1e-300) + 1e-15);
        }
        assert!((asymptote_sep(&g, 100.0).unwrap().value - 0.06366197723675814).abs() < 1e-12);
    }

    #[test]
    fn fig1_coefficient() {
        let c = gains_mrc(4, PhaseQuantizer::Bits(2), 16).unwrap().coefficient().unwrap();
        assert!((c - 11.22639).abs() < 1e-4, "{c}");
    }

    #[test]
    fn remark_ratio() {
        for n_r in 1..=20 {
            let a = gains_mrc(4, PhaseQuantizer::Bits(4), n_r).unwrap().coding.unwrap();
            let b = gains_mrc(4, PhaseQuantizer::Infinite, n_r).unwrap().coding.unwrap();
            let want = (PI / 8.0) / (PI / 8.0).tan();
            assert!((a / b - want).abs() < 1e-12);
            assert!((a / b - 0.9481).abs() < 0.0005);
        }
    }

    #[test]
    fn infinite_bit_coefficient() {
        let c = gains_mrc(4, PhaseQuantizer::Infinite, 4).unwrap().coefficient().unwrap();
        assert!((c - 256.0 / 24.0).abs() < 1e-10);
        let g = gains_mrc(4, PhaseQuantizer::Infinite, 4).unwrap();
        assert!((asymptote_sep(&g, 1.0 / g.coding.unwrap()).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn floor_and_undefined() {
        let g = gains_mrc(8, PhaseQuantizer::Bits(2), 4).unwrap();
        assert_eq!(g.regime, Regime::Floor);
        assert!(asymptote_sep(&g, 10.0).is_err());
        let g = gains_mrc(8, PhaseQuantizer::Bits(3), 4).unwrap();
        assert_eq!((g.diversity, g.coding), (2.0, None));
        assert!(matches!(asymptote_sep(&g, 10.0), Err(Error::Unsupported(_))));
        assert_eq!(error_floor_lower_bound(1), 0.125);
        assert_eq!(error_floor_lower_bound(2), 0.03125);
    }

    #[test]
    fn sc_examples() {
        assert_eq!(gains_sc(1).unwrap(), gains_mrc(4, PhaseQuantizer::Bits(2), 1).unwrap());
        assert!((gains_sc(2).unwrap().coding.unwrap() - PI / 4.0).abs() < 1e-12);
        assert_eq!(gains_sc(4).unwrap().diversity, 2.0);
    }

    #[test]
    fn lcsi_coefficients() {
        let want = [2.0 / PI, 6.0 / (PI * PI), 20.0 / PI.powi(3), 70.0 / PI.powi(4)];
        for (n_r, w) in [1, 3, 5, 7].into_iter().zip(want) {
            let c = gains_lcsi(n_r).unwrap().coefficient().unwrap();
            assert!((c - w).abs() < 1e-10, "{n_r}: {c} {w}");
        }
        assert_eq!(gains_lcsi(1).unwrap().diversity, 0.5);
    }

    #[test]
    fn density_route_two_bit_mrc() {
        // X = (ΣZ_i)² for half-normal Z_i, U = X/N_r, SEP ≈ 2E[Q(√(ρU))]
        for n_r in 1..=16usize {
            let n = n_r as f64;
            // density of X near 0 is (2/π)^{N/2} x^{N/2−1} / (2(N−1)!), times the SEP factor 2
            let a = (2.0 / PI).powf(n / 2.0) / factorial(n_r as u64 - 1);
            let g = gains_from_small_value_density(a, n / 2.0 - 1.0, 1.0 / n);
            let h = gains_mrc(4, PhaseQuantizer::Bits(2), n_r).unwrap();
            assert!((g.diversity - h.diversity).abs() < 1e-12);
            assert!((g.coding.unwrap() / h.coding.unwrap() - 1.0).abs() < 1e-10, "{n_r}");
        }
    }

    #[test]
    fn density_route_sc() {
        for n_r in 1..=12usize {
            let n = n_r as f64;
            let a = n / 2.0 * (4.0 / (2.0 * PI).sqrt()).powf(n);
            let g = gains_from_small_value_density(a, n / 2.0 - 1.0, 1.0);
            let h = gains_sc(n_r).unwrap();
            assert!((g.coding.unwrap() / h.coding.unwrap() - 1.0).abs() < 1e-10, "{n_r}");
        }
    }

    #[test]
    fn exact_sep_approaches_asymptote() {
        // at n = 2 the squared term is of higher order, so the ratio tends to 1
        let quad = QuadratureSpec::default();
        for (n_r, rho) in [(1, 1e8), (2, 1e6), (4, 1e5)] {
            let q = PhaseQuantizer::Bits(2);
            let exact = sep_qpsk_mrc_exact(q, n_r, rho, &quad).unwrap().value;
            let asym = asymptote_sep(&gains_mrc(4, q, n_r).unwrap(), rho).unwrap().value;
            assert!((exact / asym - 1.0).abs() < 0.02, "{n_r}: {exact} {asym}");
        }
    }

    #[test]
    fn cross_term_keeps_full_diversity_below_asymptote() {
        // for n ≥ 3 the stated gains describe 2E[Q(√(ρU))] alone; the product
        // term has the same order, so the exact SEP settles at a fixed fraction
        let quad = QuadratureSpec::default();
        let rho = 1e6;
        let uq = sep_qpsk_unquantized(1, rho, &quad).unwrap().value;
        assert!((uq * rho - (0.75 + 0.5 / PI)).abs() < 1e-4, "{}", uq * rho);
        let inf = sep_qpsk_mrc_exact(PhaseQuantizer::Infinite, 1, rho, &quad).unwrap().value;
        assert!((inf / uq - 1.0).abs() < 1e-9);
        for (q, n_r) in [(PhaseQuantizer::Bits(3), 1), (PhaseQuantizer::Bits(3), 2), (PhaseQuantizer::Infinite, 2)] {
            let g = gains_mrc(4, q, n_r).unwrap();
            let r: Vec<f64> = [1e5, 1e6]
                .iter()
                .map(|&rho| {
                    sep_qpsk_mrc_exact(q, n_r, rho, &quad).unwrap().value / asymptote_sep(&g, rho).unwrap().value
                })
                .collect();
            assert!(r[0] > 0.5 && r[0] < 1.0, "{q} {n_r}: {r:?}");
            assert!((r[0] / r[1] - 1.0).abs() < 0.01, "{q} {n_r}: {r:?}");
        }
        for n_r in [1, 2, 3] {
            let g = gains_unquantized(n_r).unwrap();
            let a = sep_qpsk_unquantized(n_r, 1e5, &quad).unwrap().value / asymptote_sep(&g, 1e5).unwrap().value;
            assert!(a > 0.5 && a < 1.0, "{n_r}: {a}");
        }
    }

    #[test]
    fn n_monotone_toward_infinite() {
        for n_r in [1, 2, 5, 9] {
            let inf = gains_mrc(4, PhaseQuantizer::Infinite, n_r).unwrap().coding.unwrap();
            let mut prev = 0.0;
            for bits in 3..=12 {
                let g = gains_mrc(4, PhaseQuantizer::Bits(bits), n_r).unwrap().coding.unwrap();
                let x = PI / (1u64 << (bits - 1)) as f64;
                assert!((g / inf - x / x.tan()).abs() < 1e-12);
                assert!(g > prev && g < inf);
                prev = g;
            }
        }
    }

    #[test]
    fn slope_fit() {
        let g = gains_mrc(4, PhaseQuantizer::Bits(3), 3).unwrap();
        let pts: Vec<_> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&r| (r, asymptote_sep(&g, r).unwrap()))
            .collect();
        let f = fit_diversity_slope(&pts).unwrap();
        assert!((f.estimated_gd - 3.0).abs() < 1e-10);
        assert!(f.residual < 1e-10);
        assert!(fit_diversity_slope(&pts[..1]).is_err());
        let narrow = [(10.0, pts[0].1), (50.0, pts[1].1)];
        assert!(fit_diversity_slope(&narrow).is_err());
        let zero = [(10.0, SepEstimate::monte_carlo(0, 100)), (1000.0, pts[2].1)];
        assert!(matches!(fit_diversity_slope(&zero), Err(Error::InsufficientTrials(_))));
    }

    proptest! {
        #[test]
        fn corollary_table(m_exp in 1u32..=4, bits in 1u32..=5, n_r in 1usize..=32) {
            let m = 1usize << m_exp;
            let g = gains_mrc(m, PhaseQuantizer::Bits(bits), n_r).unwrap();
            let l = 1usize << bits;
            let want = if l < m { 0.0 } else if l == m { n_r as f64 / 2.0 } else { n_r as f64 };
            prop_assert_eq!(g.diversity, want);
            prop_assert_eq!(g.regime == Regime::Floor, want == 0.0);
            if g.regime == Regime::Floor {
                prop_assert!(g.coding.is_none());
            }
        }

        #[test]
        fn lcsi_pairs(k in 1usize..=30) {
            prop_assert_eq!(gains_lcsi(2 * k).unwrap(), gains_lcsi(2 * k - 1).unwrap());
        }
    }
}
