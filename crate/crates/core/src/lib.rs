//! Symbol error probability analysis for phase-quantized SIMO links over
//! i.i.d. Rayleigh fading.
//!
//! The crate is split into the signal model ([`signal`]), the key channel
//! statistics ([`keystats`]), analytic and semi-analytic SEP evaluators
//! ([`analytic`]), high-SNR gains ([`asymptotics`]) and a parallel Monte
//! Carlo link simulator ([`simulator`]).

pub mod analytic;
pub mod asymptotics;
pub mod error;
pub mod expectation;
pub mod keystats;
pub mod quadrature;
pub mod signal;
pub mod simulator;
pub mod special;
pub mod stats;

pub use analytic::{QuadScheme, QuadratureSpec, SepEstimate, SepMethod};
pub use asymptotics::{HighSnrGains, Regime, SlopeFit};
pub use error::{Error, Result};
pub use keystats::{AggregateDraw, GammaFit, KeyStatDraw, MpskKeyStat};
pub use signal::{
    ChannelRealization, Combiner, Csir, PhaseQuantizer, PskConstellation, SystemConfig,
};
pub use simulator::{RngStreamSpec, SimulationReport, Simulator, TrialBatchResult, VerifyReport};

/// Converts an SNR in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear SNR to dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
