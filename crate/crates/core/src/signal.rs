//! Constellations, phase quantizers, channel draws and detection primitives.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Relative tolerance (in sectors) inside which a phase counts as a tie.
const TIE_TOL: f64 = 1e-12;

/// M-PSK constellation with points e^{j(π/4 + 2πi/M)}.
#[derive(Debug, Clone, PartialEq)]
pub struct PskConstellation {
    order: usize,
    points: Vec<Complex64>,
}

impl PskConstellation {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::Config(format!(
                "constellation order must be a power of two >= 2, got {order}"
            )));
        }
        Ok(PskConstellation {
            order,
            points: psk_points(order),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// m = log₂ M.
    pub fn bits(&self) -> u32 {
        self.order.trailing_zeros()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Complex64 {
        self.points[i]
    }

    /// Index of the constellation point nearest to x (the 𝒬_m decision).
    #[inline]
    pub fn nearest_index(&self, x: Complex64) -> usize {
        sector_index(x, self.bits())
    }
}

fn psk_points(order: usize) -> Vec<Complex64> {
    (0..order)
        .map(|i| Complex64::from_polar(1.0, FRAC_PI_4 + 2.0 * PI * i as f64 / order as f64))
        .collect()
}

/// Phase quantizer 𝒬_n: finite resolution or the unit-modulus projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseQuantizer {
    Bits(u32),
    Infinite,
}

impl PhaseQuantizer {
    pub fn bits(n: u32) -> Result<Self> {
        if !(1..=30).contains(&n) {
            return Err(Error::Config(format!("quantizer bits must be in 1..=30, got {n}")));
        }
        Ok(PhaseQuantizer::Bits(n))
    }

    /// Number of output points 2ⁿ, or None for the infinite-resolution case.
    pub fn levels(&self) -> Option<usize> {
        match *self {
            PhaseQuantizer::Bits(n) => Some(1usize << n),
            PhaseQuantizer::Infinite => None,
        }
    }

    /// Half-width π/2ⁿ of the phase-error interval (0 when infinite).
    pub fn half_sector(&self) -> f64 {
        match *self {
            PhaseQuantizer::Bits(n) => PI / (1u64 << n) as f64,
            PhaseQuantizer::Infinite => 0.0,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PhaseQuantizer::Infinite)
    }

    pub fn quantize(&self, x: Complex64) -> Result<Complex64> {
        quantize_phase(x, *self)
    }
}

impl fmt::Display for PhaseQuantizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseQuantizer::Bits(n) => write!(f, "{n}"),
            PhaseQuantizer::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for PhaseQuantizer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinite") {
            return Ok(PhaseQuantizer::Infinite);
        }
        let n: u32 = t
            .parse()
            .map_err(|_| Error::Config(format!("bad quantizer resolution '{s}'")))?;
        PhaseQuantizer::bits(n)
    }
}

/// Index of the nearest point of S_{2^bits}; ties go to the lower index and
/// x = 0 maps to index 0.
#[inline]
pub fn sector_index(x: Complex64, bits: u32) -> usize {
    match bits {
        1 => {
            let s = x.re + x.im;
            if s < 0.0 {
                1
            } else {
                0
            }
        }
        2 if x.re != 0.0 && x.im != 0.0 => match (x.re > 0.0, x.im > 0.0) {
            (true, true) => 0,
            (false, true) => 1,
            (false, false) => 2,
            (true, false) => 3,
        },
        _ => sector_index_general(x, bits),
    }
}

fn sector_index_general(x: Complex64, bits: u32) -> usize {
    if x.re == 0.0 && x.im == 0.0 {
        return 0;
    }
    let levels = 1usize << bits;
    let t = (x.im.atan2(x.re) - FRAC_PI_4) * levels as f64 / (2.0 * PI);
    let fl = t.floor();
    let frac = t - fl;
    let lo = (fl as i64).rem_euclid(levels as i64) as usize;
    let hi = (lo + 1) % levels;
    if (frac - 0.5).abs() <= TIE_TOL {
        lo.min(hi)
    } else if frac < 0.5 {
        lo
    } else {
        hi
    }
}

/// 𝒬_n(x): nearest point of S_{2^n}, or x/|x| for the infinite quantizer.
pub fn quantize_phase(x: Complex64, q: PhaseQuantizer) -> Result<Complex64> {
    match q {
        PhaseQuantizer::Bits(n) => {
            let i = sector_index(x, n);
            let levels = 1usize << n;
            Ok(Complex64::from_polar(1.0, FRAC_PI_4 + 2.0 * PI * i as f64 / levels as f64))
        }
        PhaseQuantizer::Infinite => {
            let r = x.norm();
            if r == 0.0 {
                return Err(Error::Domain("infinite-resolution quantizer of zero".into()));
            }
            Ok(x / r)
        }
    }
}

/// Receiver combining architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Combiner {
    Mrc,
    Sc,
    LcsiMajority,
    MisoMrtDual,
    E2Equivalent,
}

impl Combiner {
    pub fn name(&self) -> &'static str {
        match self {
            Combiner::Mrc => "mrc",
            Combiner::Sc => "sc",
            Combiner::LcsiMajority => "lcsi",
            Combiner::MisoMrtDual => "miso",
            Combiner::E2Equivalent => "e2",
        }
    }
}

impl std::str::FromStr for Combiner {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mrc" => Ok(Combiner::Mrc),
            "sc" => Ok(Combiner::Sc),
            "lcsi" | "lcsi_majority" | "majority" => Ok(Combiner::LcsiMajority),
            "miso" | "miso_mrt_dual" | "mrt" => Ok(Combiner::MisoMrtDual),
            "e2" | "e2_equivalent" => Ok(Combiner::E2Equivalent),
            other => Err(Error::Config(format!("unknown combiner '{other}'"))),
        }
    }
}

/// Channel knowledge at the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Csir {
    Perfect,
    TwoBitPhase,
}

impl std::str::FromStr for Csir {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "perfect" | "full" => Ok(Csir::Perfect),
            "two_bit_phase" | "2bit" | "two-bit" | "lcsi" => Ok(Csir::TwoBitPhase),
            other => Err(Error::Config(format!("unknown CSIR mode '{other}'"))),
        }
    }
}

/// Complete description of one link experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub constellation: PskConstellation,
    pub quantizer: PhaseQuantizer,
    /// N_r, or N_t for the MISO dual.
    pub antennas: usize,
    /// Linear transmit SNR ρ.
    pub snr: f64,
    pub combiner: Combiner,
    pub csir: Csir,
}

impl SystemConfig {
    /// Builds and validates a configuration. LCSI picks 2-bit CSIR itself.
    pub fn new(
        order: usize,
        quantizer: PhaseQuantizer,
        antennas: usize,
        snr: f64,
        combiner: Combiner,
    ) -> Result<Self> {
        let csir = if combiner == Combiner::LcsiMajority {
            Csir::TwoBitPhase
        } else {
            Csir::Perfect
        };
        Self::with_csir(order, quantizer, antennas, snr, combiner, csir)
    }

    pub fn with_csir(
        order: usize,
        quantizer: PhaseQuantizer,
        antennas: usize,
        snr: f64,
        combiner: Combiner,
        csir: Csir,
    ) -> Result<Self> {
        let cfg = SystemConfig {
            constellation: PskConstellation::new(order)?,
            quantizer,
            antennas,
            snr,
            combiner,
            csir,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(Error::Config("at least one antenna is required".into()));
        }
        if !(self.snr.is_finite() && self.snr > 0.0) {
            return Err(Error::Config(format!("SNR must be positive and finite, got {}", self.snr)));
        }
        if let PhaseQuantizer::Bits(n) = self.quantizer {
            if !(1..=30).contains(&n) {
                return Err(Error::Config(format!("quantizer bits must be in 1..=30, got {n}")));
            }
        }
        let qpsk_2bit =
            self.constellation.order() == 4 && self.quantizer == PhaseQuantizer::Bits(2);
        match (self.combiner, self.csir) {
            (Combiner::LcsiMajority, Csir::TwoBitPhase) if qpsk_2bit => Ok(()),
            (Combiner::LcsiMajority, Csir::TwoBitPhase) => Err(Error::Config(
                "majority decision with 2-bit CSIR requires M = 4 and n = 2".into(),
            )),
            (Combiner::LcsiMajority, Csir::Perfect) => Err(Error::Config(
                "majority decision requires 2-bit phase CSIR".into(),
            )),
            (other, Csir::TwoBitPhase) => Err(Error::Config(format!(
                "2-bit phase CSIR is only defined for the majority decision, not {}",
                other.name()
            ))),
            (Combiner::Sc, Csir::Perfect) if !qpsk_2bit => Err(Error::Config(
                "selection combining is defined for M = 4 and n = 2 only".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn with_snr(&self, snr: f64) -> Result<Self> {
        let mut c = self.clone();
        c.snr = snr;
        c.validate()?;
        Ok(c)
    }
}

/// One draw of fading and noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: Vec<Complex64>,
    pub noise: Vec<Complex64>,
}

/// One CN(0, 1) sample.
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Draws h and noise, each i.i.d. CN(0, 1); per antenna h_i is drawn before n_i.
pub fn sample_channel<R: Rng + ?Sized>(n_r: usize, rng: &mut R) -> ChannelRealization {
    let mut h = Vec::with_capacity(n_r);
    let mut noise = Vec::with_capacity(n_r);
    for _ in 0..n_r {
        h.push(complex_normal(rng));
        noise.push(complex_normal(rng));
    }
    ChannelRealization { h, noise }
}

/// Index of 𝒬_m(hᴴ r).
pub fn detect_mrc(h: &[Complex64], r: &[Complex64], constellation: &PskConstellation) -> usize {
    assert_eq!(h.len(), r.len(), "h and r must have equal length");
    let acc: Complex64 = h.iter().zip(r).map(|(hi, ri)| hi.conj() * ri).sum();
    constellation.nearest_index(acc)
}

/// 2-bit CSIR exponents l_i with h_i^LCSI = e^{j l_i π/2} = e^{jπ/4}(𝒬₂(h_i e^{jπ/4}))*.
pub fn lcsi_from_channel(h: &[Complex64]) -> Vec<u8> {
    h.iter().map(|&x| lcsi_exponent(x)).collect()
}

#[inline]
pub(crate) fn lcsi_exponent(h: Complex64) -> u8 {
    let k = sector_index(h * Complex64::from_polar(1.0, FRAC_PI_4), 2);
    ((4 - k) % 4) as u8
}

/// e^{j l π/2}.
pub fn lcsi_phasor(l: u8) -> Complex64 {
    match l % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Majority decision over co-phased branches.
///
/// `h_lcsi` holds the exponents l_i, `r` the S₄ indices of the quantized
/// samples. Each product h_i^LCSI·r_i is again a point of S₄ and votes on
/// the sign of the real and imaginary rails; a tied rail is settled by a
/// fair draw from `rng`.
pub fn detect_lcsi_majority<R: Rng + ?Sized>(h_lcsi: &[u8], r: &[usize], rng: &mut R) -> usize {
    assert_eq!(h_lcsi.len(), r.len(), "h_lcsi and r must have equal length");
    let mut re_vote = 0i64;
    let mut im_vote = 0i64;
    for (&l, &ri) in h_lcsi.iter().zip(r) {
        let idx = (ri + l as usize) % 4;
        re_vote += if idx == 0 || idx == 3 { 1 } else { -1 };
        im_vote += if idx <= 1 { 1 } else { -1 };
    }
    let re_pos = match re_vote.signum() {
        1 => true,
        -1 => false,
        _ => rng.random::<bool>(),
    };
    let im_pos = match im_vote.signum() {
        1 => true,
        -1 => false,
        _ => rng.random::<bool>(),
    };
    match (re_pos, im_pos) {
        (true, true) => 0,
        (false, true) => 1,
        (false, false) => 2,
        (true, false) => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn constellation_layout() {
        for m in [2, 4, 8, 16, 64] {
            let s = PskConstellation::new(m).unwrap();
            assert_eq!(s.points().len(), m);
            assert!((s.point(0).arg() - FRAC_PI_4).abs() < 1e-15);
            for (i, p) in s.points().iter().enumerate() {
                assert!((p.norm() - 1.0).abs() < 1e-12);
                let next = s.point((i + 1) % m);
                let step = (next / p).arg().rem_euclid(2.0 * PI);
                assert!((step - 2.0 * PI / m as f64).abs() < 1e-12);
                assert_eq!(s.nearest_index(*p), i);
            }
        }
        assert!(PskConstellation::new(3).is_err());
        assert!(PskConstellation::new(1).is_err());
    }

    #[test]
    fn quantizer_examples() {
        let q2 = PhaseQuantizer::Bits(2);
        let got = quantize_phase(c(0.3, -0.7), q2).unwrap();
        assert!(close(got, c(1.0, -1.0) * FRAC_1_SQRT_2));
        // S₈ contains the phase-0 point 1 + 0j (index 7 at π/4 + 7π/4)
        let got = quantize_phase(Complex64::from_polar(1.0, 0.1), PhaseQuantizer::Bits(3)).unwrap();
        assert!(close(got, c(1.0, 0.0)));
        let got = quantize_phase(Complex64::from_polar(3.0, 1.2), PhaseQuantizer::Infinite).unwrap();
        assert!(close(got, Complex64::from_polar(1.0, 1.2)));
        assert!(quantize_phase(c(0.0, 0.0), PhaseQuantizer::Infinite).is_err());
        assert_eq!(sector_index(c(0.0, 0.0), 3), 0);
        assert_eq!(sector_index(c(0.0, 0.0), 2), 0);
    }

    #[test]
    fn ties_go_to_lower_index() {
        // phase π/2 sits between S₄ points 0 and 1
        assert_eq!(sector_index(c(0.0, 2.0), 2), 0);
        // phase −π/4 + π ... between 2 and 1 → 1
        assert_eq!(sector_index(c(-1.0, 0.0), 2), 1);
        // phase 0 between 3 and 0 → 0
        assert_eq!(sector_index(c(1.0, 0.0), 2), 0);
        // n = 1 boundary at 3π/4
        assert_eq!(sector_index(c(-1.0, 1.0), 1), 0);
    }

    #[test]
    fn mrc_examples() {
        let s4 = PskConstellation::new(4).unwrap();
        let e = |p: f64| Complex64::from_polar(1.0, p);
        assert_eq!(detect_mrc(&[c(1.0, 0.0)], &[e(FRAC_PI_4)], &s4), 0);
        assert_eq!(
            detect_mrc(&[c(1.0, 0.0), c(1.0, 0.0)], &[e(FRAC_PI_4), e(3.0 * FRAC_PI_4)], &s4),
            0
        );
        // hᴴ multiplies by −j: π/4 → −π/4, index 3
        assert_eq!(detect_mrc(&[c(0.0, 1.0)], &[e(FRAC_PI_4)], &s4), 3);
    }

    #[test]
    fn lcsi_examples() {
        assert_eq!(lcsi_from_channel(&[c(1.0, 0.0)]), vec![0]);
        let l = lcsi_from_channel(&[Complex64::from_polar(1.0, 1.3)]);
        assert!(close(lcsi_phasor(l[0]), c(0.0, -1.0)));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(detect_lcsi_majority(&[0], &[0], &mut rng), 0);
        // real votes (+, +, −), imaginary (+, +, +)
        assert_eq!(detect_lcsi_majority(&[0, 0, 0], &[0, 0, 1], &mut rng), 0);
    }

    #[test]
    fn lcsi_tie_uses_coin() {
        // real votes (+, −), imaginary (+, +): decision is 0 or 1, both seen
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen = [0usize; 4];
        for _ in 0..2000 {
            seen[detect_lcsi_majority(&[0, 0], &[0, 1], &mut rng)] += 1;
        }
        assert_eq!(seen[2] + seen[3], 0);
        assert!(seen[0] > 850 && seen[1] > 850, "{seen:?}");
    }

    #[test]
    fn lcsi_siso_equivalence_exhaustive() {
        let s4 = PskConstellation::new(4).unwrap();
        for deg in 0..360 {
            // offset keeps the grid off the quantizer boundaries
            let h = Complex64::from_polar(1.0, (deg as f64 + 0.5).to_radians());
            let l = lcsi_from_channel(&[h]);
            let mut rng = ChaCha8Rng::seed_from_u64(deg);
            for sym in 0..4 {
                let r = s4.point(sym);
                let full = detect_mrc(&[h], &[r], &s4);
                let limited = detect_lcsi_majority(&l, &[sym], &mut rng);
                assert_eq!(full, limited, "deg={deg} sym={sym}");
            }
        }
    }

    #[test]
    fn config_validation() {
        let q2 = PhaseQuantizer::Bits(2);
        assert!(SystemConfig::new(4, q2, 2, 1.0, Combiner::LcsiMajority).is_ok());
        assert!(SystemConfig::new(8, q2, 2, 1.0, Combiner::LcsiMajority).is_err());
        assert!(SystemConfig::with_csir(4, q2, 2, 1.0, Combiner::LcsiMajority, Csir::Perfect).is_err());
        assert!(SystemConfig::with_csir(4, q2, 2, 1.0, Combiner::Mrc, Csir::TwoBitPhase).is_err());
        assert!(SystemConfig::new(4, q2, 0, 1.0, Combiner::Mrc).is_err());
        assert!(SystemConfig::new(4, q2, 1, 0.0, Combiner::Mrc).is_err());
        assert!(SystemConfig::new(8, PhaseQuantizer::Bits(3), 4, 1.0, Combiner::Sc).is_err());
        assert!(SystemConfig::new(8, PhaseQuantizer::Infinite, 4, 1.0, Combiner::E2Equivalent).is_ok());
    }

    #[test]
    fn channel_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 1_000_000;
        let (mut s1, mut s2, mut pos) = (0.0, 0.0, 0usize);
        for _ in 0..n {
            let ch = sample_channel(1, &mut rng);
            let p = ch.h[0].norm_sqr();
            s1 += p;
            s2 += p * p;
            if ch.h[0].re > 0.0 {
                pos += 1;
            }
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!((mean - 1.0).abs() < 0.004, "{mean}");
        assert!((var - 1.0).abs() < 0.01, "{var}");
        assert!((pos as f64 / n as f64 - 0.5).abs() < 0.002);
    }

    #[test]
    fn channel_power_ks_against_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 100_000;
        let mut x: Vec<f64> = (0..n).map(|_| complex_normal(&mut rng).norm_sqr()).collect();
        x.sort_by(f64::total_cmp);
        let mut d: f64 = 0.0;
        for (i, v) in x.iter().enumerate() {
            let f = 1.0 - (-v).exp();
            d = d.max((f - i as f64 / n as f64).abs()).max(((i + 1) as f64 / n as f64 - f).abs());
        }
        // critical value at α = 0.01
        assert!(d < 1.628 / (n as f64).sqrt(), "D = {d}");
    }

    #[test]
    fn noiseless_single_branch_recovers_symbol() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (m, n) in [(4, 2), (4, 3), (8, 3), (8, 5), (2, 1), (16, 4)] {
            let s = PskConstellation::new(m).unwrap();
            let q = PhaseQuantizer::Bits(n);
            for _ in 0..2000 {
                let h = complex_normal(&mut rng);
                let sym = rng.random_range(0..m);
                let r = quantize_phase(h * s.point(sym), q).unwrap();
                // skip draws whose phase error sits on a decision boundary
                let err = (r / (h * s.point(sym))).arg().abs();
                if (err - q.half_sector()).abs() < 1e-9 {
                    continue;
                }
                assert_eq!(detect_mrc(&[h], &[r], &s), sym, "M={m} n={n}");
            }
        }
    }

    fn arb_nonzero() -> impl Strategy<Value = Complex64> {
        (0.01f64..10.0, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    fn arb_quantizer() -> impl Strategy<Value = PhaseQuantizer> {
        prop_oneof![(1u32..=6).prop_map(PhaseQuantizer::Bits), Just(PhaseQuantizer::Infinite)]
    }

    proptest! {
        #[test]
        fn idempotent(x in arb_nonzero(), q in arb_quantizer()) {
            let once = quantize_phase(x, q).unwrap();
            let twice = quantize_phase(once, q).unwrap();
            prop_assert!(close(once, twice));
        }

        #[test]
        fn scale_invariant(x in arb_nonzero(), k in 1e-3f64..1e3, q in arb_quantizer()) {
            prop_assert!(close(quantize_phase(x * k, q).unwrap(), quantize_phase(x, q).unwrap()));
        }

        // S₂ is not closed under conjugation, so n = 1 is excluded
        #[test]
        fn conjugation_off_boundaries(x in arb_nonzero(), n in 2u32..=6) {
            let q = PhaseQuantizer::Bits(n);
            let levels = (1u64 << n) as f64;
            let t = (x.arg() - FRAC_PI_4) * levels / (2.0 * PI);
            let off = (t - t.floor() - 0.5).abs() > 1e-9;
            // the conjugate's boundaries are mirrored: check both
            let tc = (-x.arg() - FRAC_PI_4) * levels / (2.0 * PI);
            let offc = (tc - tc.floor() - 0.5).abs() > 1e-9;
            prop_assume!(off && offc);
            prop_assert!(close(quantize_phase(x.conj(), q).unwrap(), quantize_phase(x, q).unwrap().conj()));
        }

        #[test]
        fn output_on_grid(x in arb_nonzero(), n in 1u32..=8) {
            let y = quantize_phase(x, PhaseQuantizer::Bits(n)).unwrap();
            prop_assert!((y.norm() - 1.0).abs() < 1e-12);
            let levels = (1u64 << n) as f64;
            let t = (y.arg() - FRAC_PI_4) * levels / (2.0 * PI);
            prop_assert!((t - t.round()).abs() < 1e-9);
        }

        #[test]
        fn nearest_in_euclidean_distance(x in arb_nonzero(), n in 1u32..=6) {
            let s = PskConstellation::new(1 << n).unwrap();
            let i = s.nearest_index(x);
            let d = (s.point(i) - x).norm();
            for p in s.points() {
                prop_assert!(d <= (p - x).norm() + 1e-12);
            }
        }
    }
}
