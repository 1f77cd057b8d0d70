//! Presets that regenerate the data behind the SEP figures.

use std::path::{Path, PathBuf};

use pqsimo_core::simulator::independent_seed;
use pqsimo_core::{Combiner, Csir, PhaseQuantizer, Simulator};

use crate::config::{db_range, LinkTemplate, MethodRequest, SweepRequest};
use crate::error::{CliError, Result};
use crate::output::save_csv;
use crate::sweep::{run_sweep, RowFailure, SweepResult};

/// One curve family member of a figure, written to `<stem>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureCurve {
    pub stem: String,
    pub request: SweepRequest,
}

fn link(order: usize, quantizer: PhaseQuantizer, antennas: usize, combiner: Combiner) -> LinkTemplate {
    let csir = if combiner == Combiner::LcsiMajority {
        Csir::TwoBitPhase
    } else {
        Csir::Perfect
    };
    LinkTemplate {
        order,
        quantizer,
        antennas,
        combiner,
        csir,
    }
}

type Layout = (
    &'static [usize],
    Vec<f64>,
    Vec<MethodRequest>,
    fn(usize) -> LinkTemplate,
);

/// Curves of figure `k` (1..=7). `trials` overrides the default per-point
/// counts.
pub fn preset(k: u32, trials: Option<u64>, seed: u64) -> Result<Vec<FigureCurve>> {
    use MethodRequest::*;
    let (antennas, grid, methods, make): Layout = match k {
        1 => (
            &[1, 4, 8, 16],
            db_range(-10.0, 20.0, 2.0),
            vec![Mc, Analytic, Asymptote],
            |n| link(4, PhaseQuantizer::Bits(2), n, Combiner::Mrc),
        ),
        2 => (
            &[1, 2, 3, 4],
            db_range(10.0, 35.0, 2.5),
            vec![Mc, Analytic, Asymptote],
            |n| link(4, PhaseQuantizer::Bits(3), n, Combiner::Mrc),
        ),
        3 => (
            &[1, 2, 4, 8],
            db_range(0.0, 18.0, 2.0),
            vec![Mc, Analytic, Asymptote],
            |n| link(4, PhaseQuantizer::Infinite, n, Combiner::Mrc),
        ),
        4 => (
            &[1, 4, 8, 16],
            db_range(-10.0, 20.0, 2.0),
            vec![Analytic, Approx, Asymptote],
            |n| link(4, PhaseQuantizer::Bits(2), n, Combiner::Mrc),
        ),
        5 => (&[1, 4, 8, 16], db_range(0.0, 20.0, 2.0), vec![Mc], |n| {
            link(8, PhaseQuantizer::Bits(3), n, Combiner::Mrc)
        }),
        6 => (
            &[1, 2, 4, 8],
            db_range(10.0, 30.0, 2.0),
            vec![Mc, Analytic, Asymptote],
            |n| link(4, PhaseQuantizer::Bits(2), n, Combiner::Sc),
        ),
        7 => (
            &[1, 3, 5, 7],
            db_range(5.0, 20.0, 2.5),
            vec![Mc, Analytic, Asymptote],
            |n| link(4, PhaseQuantizer::Bits(2), n, Combiner::LcsiMajority),
        ),
        other => return Err(CliError::Config(format!("figure must be 1..=7, got {other}"))),
    };
    let mut curves = Vec::new();
    for (i, &n) in antennas.iter().enumerate() {
        let base = SweepRequest {
            link: make(n),
            rho_db: grid.clone(),
            methods: methods.clone(),
            trials,
            seed: seed.wrapping_add(1000 * i as u64),
            output_path: None,
        };
        if k == 5 {
            let mut miso = base.clone();
            miso.link.combiner = Combiner::MisoMrtDual;
            miso.seed = independent_seed(base.seed);
            curves.push(FigureCurve {
                stem: format!("fig5_nr{n}_mrc"),
                request: base,
            });
            curves.push(FigureCurve {
                stem: format!("fig5_nr{n}_miso"),
                request: miso,
            });
        } else {
            curves.push(FigureCurve {
                stem: format!("fig{k}_nr{n}"),
                request: base,
            });
        }
    }
    Ok(curves)
}

#[derive(Debug)]
pub struct FigureOutput {
    pub files: Vec<(PathBuf, SweepResult)>,
    pub failures: Vec<(String, RowFailure)>,
}

/// Runs every curve of figure `k` and writes one CSV per curve into `dir`.
pub fn run_figure(sim: &Simulator, k: u32, dir: &Path, trials: Option<u64>, seed: u64) -> Result<FigureOutput> {
    let curves = preset(k, trials, seed)?;
    std::fs::create_dir_all(dir)?;
    let mut out = FigureOutput {
        files: Vec::new(),
        failures: Vec::new(),
    };
    for c in curves {
        let (res, fails) = run_sweep(sim, &c.request)?;
        let path = dir.join(format!("{}.csv", c.stem));
        save_csv(&res, &path)?;
        out.failures.extend(fails.into_iter().map(|f| (c.stem.clone(), f)));
        out.files.push((path, res));
    }
    Ok(out)
}
