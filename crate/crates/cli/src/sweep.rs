//! SNR sweeps over one link template.

use std::time::Instant;

use pqsimo_core::analytic::{
    mpsk_sep_bounds, sep_bpsk_mrc, sep_lcsi_closed_form, sep_qpsk_mrc_approx,
    sep_qpsk_mrc_exact, sep_sc_asymptotic,
};
use pqsimo_core::asymptotics::{asymptote_sep, gains_lcsi, gains_mrc, gains_sc};
use pqsimo_core::{
    db_to_linear, Combiner, Error, HighSnrGains, PhaseQuantizer, QuadratureSpec, SepEstimate,
    Simulator,
};
use serde::{Deserialize, Serialize};

use crate::config::{LinkTemplate, Method, MethodRequest, SweepRequest};
use crate::error::Result;

/// One CSV line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub rho_db: f64,
    pub method: Method,
    pub sep: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Monte Carlo trials or quadrature samples; 0 for closed forms.
    pub trials: u64,
    pub elapsed_s: f64,
}

impl SweepRow {
    fn from_estimate(rho_db: f64, method: Method, e: &SepEstimate, elapsed_s: f64) -> Self {
        SweepRow {
            rho_db,
            method,
            sep: e.value,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            trials: e.samples_used,
            elapsed_s,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn sort(&mut self) {
        self.rows
            .sort_by(|a, b| a.rho_db.total_cmp(&b.rho_db).then(a.method.cmp(&b.method)));
    }

    pub fn rows_for(&self, method: Method) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.method == method)
    }
}

/// A (ρ, method) pair that could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct RowFailure {
    pub rho_db: f64,
    pub method: MethodRequest,
    pub message: String,
}

fn is_mrc_family(c: Combiner) -> bool {
    matches!(c, Combiner::Mrc | Combiner::E2Equivalent | Combiner::MisoMrtDual)
}

fn unsupported(what: &str, link: &LinkTemplate) -> Error {
    Error::Unsupported(format!(
        "no {what} evaluator for M={} n={} {}",
        link.order,
        link.quantizer,
        link.combiner.name()
    ))
}

/// Deterministic SEP for the link at linear SNR `rho`.
pub fn analytic(link: &LinkTemplate, rho: f64, quad: &QuadratureSpec) -> pqsimo_core::Result<SepEstimate> {
    let n = link.antennas;
    match link.combiner {
        c if is_mrc_family(c) => match (link.order, link.quantizer) {
            (4, q) => sep_qpsk_mrc_exact(q, n, rho, quad),
            (2, PhaseQuantizer::Bits(2)) => sep_bpsk_mrc(n, rho, quad),
            _ => Err(unsupported("analytic", link)),
        },
        Combiner::Sc => sep_sc_asymptotic(n, rho, quad),
        Combiner::LcsiMajority => sep_lcsi_closed_form(n, rho),
        _ => Err(unsupported("analytic", link)),
    }
}

pub fn gains(link: &LinkTemplate) -> pqsimo_core::Result<HighSnrGains> {
    match link.combiner {
        c if is_mrc_family(c) => gains_mrc(link.order, link.quantizer, link.antennas),
        Combiner::Sc => gains_sc(link.antennas),
        Combiner::LcsiMajority => gains_lcsi(link.antennas),
        _ => Err(unsupported("gain", link)),
    }
}

fn approx(link: &LinkTemplate, rho: f64) -> pqsimo_core::Result<SepEstimate> {
    if is_mrc_family(link.combiner) && link.order == 4 && link.quantizer == PhaseQuantizer::Bits(2) {
        sep_qpsk_mrc_approx(link.antennas, rho)
    } else {
        Err(unsupported("gamma-approximation", link))
    }
}

fn evaluate(
    sim: &Simulator,
    req: &SweepRequest,
    index: usize,
    rho_db: f64,
    method: MethodRequest,
    quad: &QuadratureSpec,
) -> Result<Vec<SweepRow>> {
    let rho = db_to_linear(rho_db);
    let link = &req.link;
    let start = Instant::now();
    let est = match method {
        MethodRequest::Mc => {
            let cfg = link.at(rho)?;
            let seed = req.seed.wrapping_add(index as u64);
            sim.simulate_sep(&cfg, req.trials_at(rho_db), seed)?.estimate
        }
        MethodRequest::Analytic => analytic(link, rho, quad)?,
        MethodRequest::Approx => approx(link, rho)?,
        MethodRequest::Asymptote => asymptote_sep(&gains(link)?, rho)?,
        MethodRequest::Bounds => {
            if !is_mrc_family(link.combiner) {
                return Err(unsupported("bound", link).into());
            }
            let (lo, hi) = mpsk_sep_bounds(link.order, link.quantizer, link.antennas, rho, quad)?;
            let t = start.elapsed().as_secs_f64();
            return Ok(vec![
                SweepRow::from_estimate(rho_db, Method::BoundsLower, &lo, t),
                SweepRow::from_estimate(rho_db, Method::BoundsUpper, &hi, t),
            ]);
        }
    };
    let t = start.elapsed().as_secs_f64();
    Ok(vec![SweepRow::from_estimate(rho_db, method.rows()[0], &est, t)])
}

/// One row per (ρ, method), sorted. Failing pairs are returned separately
/// and do not stop the sweep.
pub fn run_sweep(sim: &Simulator, req: &SweepRequest) -> Result<(SweepResult, Vec<RowFailure>)> {
    req.validate()?;
    let quad = QuadratureSpec { seed: req.seed, ..QuadratureSpec::default() };
    let mut result = SweepResult::default();
    let mut failures = Vec::new();
    for (i, &rho_db) in req.rho_db.iter().enumerate() {
        for &m in &req.methods {
            match evaluate(sim, req, i, rho_db, m, &quad) {
                Ok(rows) => result.rows.extend(rows),
                Err(e) => failures.push(RowFailure { rho_db, method: m, message: e.to_string() }),
            }
        }
    }
    result.sort();
    Ok((result, failures))
}
