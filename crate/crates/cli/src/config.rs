//! Sweep requests: flags, key=value files and validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pqsimo_core::{Combiner, Csir, PhaseQuantizer, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Trials used when none are requested: 10⁶ up to 20 dB, 10⁷ above.
pub fn default_trials(rho_db: f64) -> u64 {
    if rho_db <= 20.0 {
        1_000_000
    } else {
        10_000_000
    }
}

pub const DEFAULT_SEED: u64 = 1;

/// Evaluation route of one CSV row. The declaration order is the row order
/// within one ρ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Approx,
    Asymptote,
    BoundsLower,
    BoundsUpper,
    Mc,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Approx => "approx",
            Method::Asymptote => "asymptote",
            Method::BoundsLower => "bounds_lower",
            Method::BoundsUpper => "bounds_upper",
            Method::Mc => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What the user asks for on the command line. `bounds` expands to both
/// bound rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MethodRequest {
    Mc,
    Analytic,
    Approx,
    Asymptote,
    Bounds,
}

impl MethodRequest {
    pub fn rows(&self) -> &'static [Method] {
        match self {
            MethodRequest::Mc => &[Method::Mc],
            MethodRequest::Analytic => &[Method::Analytic],
            MethodRequest::Approx => &[Method::Approx],
            MethodRequest::Asymptote => &[Method::Asymptote],
            MethodRequest::Bounds => &[Method::BoundsLower, Method::BoundsUpper],
        }
    }
}

impl fmt::Display for MethodRequest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodRequest::Mc => "mc",
            MethodRequest::Analytic => "analytic",
            MethodRequest::Approx => "approx",
            MethodRequest::Asymptote => "asymptote",
            MethodRequest::Bounds => "bounds",
        })
    }
}

impl FromStr for MethodRequest {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mc" | "sim" | "simulate" => Ok(MethodRequest::Mc),
            "analytic" | "exact" => Ok(MethodRequest::Analytic),
            "approx" => Ok(MethodRequest::Approx),
            "asymptote" | "bound" => Ok(MethodRequest::Asymptote),
            "bounds" => Ok(MethodRequest::Bounds),
            other => Err(CliError::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// Parses "a,b,c" or "start:stop:step" (inclusive) in dB.
pub fn parse_rho_list(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("bad SNR value '{t}'")))?;
        if !v.is_finite() {
            return Err(CliError::Config(format!("SNR must be finite, got '{t}'")));
        }
        Ok(v)
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!("range '{s}' must be start:stop:step")));
        }
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step <= 0.0 || b < a {
            return Err(CliError::Config(format!("range '{s}' is empty or has a non-positive step")));
        }
        return Ok(db_range(a, b, step));
    }
    s.split(',').map(num).collect()
}

/// Inclusive grid a, a + step, …, b.
pub fn db_range(a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = ((b - a) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| a + step * i as f64).collect()
}

pub fn parse_methods(s: &str) -> Result<Vec<MethodRequest>> {
    let mut v: Vec<MethodRequest> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(MethodRequest::from_str)
        .collect::<Result<_>>()?;
    v.sort();
    v.dedup();
    if v.is_empty() {
        return Err(CliError::Config("no methods requested".into()));
    }
    Ok(v)
}

/// Everything a sweep needs except ρ, which varies per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTemplate {
    pub order: usize,
    pub quantizer: PhaseQuantizer,
    pub antennas: usize,
    pub combiner: Combiner,
    pub csir: Csir,
}

impl LinkTemplate {
    pub fn at(&self, rho: f64) -> Result<SystemConfig> {
        Ok(SystemConfig::with_csir(
            self.order,
            self.quantizer,
            self.antennas,
            rho,
            self.combiner,
            self.csir,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub link: LinkTemplate,
    pub rho_db: Vec<f64>,
    pub methods: Vec<MethodRequest>,
    /// None picks [`default_trials`] per point.
    pub trials: Option<u64>,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

impl SweepRequest {
    pub fn validate(&self) -> Result<()> {
        if self.rho_db.is_empty() {
            return Err(CliError::Config("the SNR list is empty".into()));
        }
        if self.methods.is_empty() {
            return Err(CliError::Config("no methods requested".into()));
        }
        // checks the template itself at a harmless SNR
        self.link.at(1.0)?;
        Ok(())
    }

    pub fn trials_at(&self, rho_db: f64) -> u64 {
        self.trials.unwrap_or_else(|| default_trials(rho_db))
    }
}

/// Raw settings before merging; every field optional.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub m: Option<usize>,
    pub n: Option<PhaseQuantizer>,
    pub nr: Option<usize>,
    pub combiner: Option<Combiner>,
    pub csir: Option<Csir>,
    pub rho_db: Option<Vec<f64>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub methods: Option<Vec<MethodRequest>>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

fn parse_int<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .replace('_', "")
        .parse()
        .map_err(|_| CliError::Config(format!("bad value '{v}' for {key}")))
}

fn parse_count(key: &str, v: &str) -> Result<u64> {
    // accepts 1e6 style counts too
    if let Ok(n) = parse_int::<u64>(key, v) {
        return Ok(n);
    }
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad value '{v}' for {key}")))?;
    if x >= 0.0 && x.fract() == 0.0 && x < 1.8e19 {
        Ok(x as u64)
    } else {
        Err(CliError::Config(format!("bad value '{v}' for {key}")))
    }
}

impl Settings {
    /// Reads a plain key=value file. `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key=value, got '{line}'", lineno + 1))
            })?;
            let key = k.trim().to_ascii_lowercase().replace('-', "_");
            map.insert(key, v.trim().to_string());
        }
        let mut s = Settings::default();
        for (k, v) in &map {
            s.set(k, v)?;
        }
        Ok(s)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "m" => self.m = Some(parse_int(key, v)?),
            "n" => self.n = Some(v.parse()?),
            "nr" | "n_r" | "antennas" => self.nr = Some(parse_int(key, v)?),
            "combiner" => self.combiner = Some(v.parse()?),
            "csir" => self.csir = Some(v.parse()?),
            "rho_db" | "rho" => self.rho_db = Some(parse_rho_list(v)?),
            "trials" => self.trials = Some(parse_count(key, v)?),
            "seed" => self.seed = Some(parse_int(key, v)?),
            "method" | "methods" => self.methods = Some(parse_methods(v)?),
            "out" | "output" => self.out = Some(PathBuf::from(v)),
            "workers" => self.workers = Some(parse_int(key, v)?),
            other => return Err(CliError::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Values set in `over` win.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            m: over.m.or(self.m),
            n: over.n.or(self.n),
            nr: over.nr.or(self.nr),
            combiner: over.combiner.or(self.combiner),
            csir: over.csir.or(self.csir),
            rho_db: over.rho_db.or(self.rho_db),
            trials: over.trials.or(self.trials),
            seed: over.seed.or(self.seed),
            methods: over.methods.or(self.methods),
            out: over.out.or(self.out),
            workers: over.workers.or(self.workers),
        }
    }

    /// Defaults: QPSK, n = 2, one antenna, MRC, methods mc and analytic.
    pub fn link(&self) -> LinkTemplate {
        let combiner = self.combiner.unwrap_or(Combiner::Mrc);
        let csir = self.csir.unwrap_or(if combiner == Combiner::LcsiMajority {
            Csir::TwoBitPhase
        } else {
            Csir::Perfect
        });
        LinkTemplate {
            order: self.m.unwrap_or(4),
            quantizer: self.n.unwrap_or(PhaseQuantizer::Bits(2)),
            antennas: self.nr.unwrap_or(1),
            combiner,
            csir,
        }
    }

    pub fn sweep_request(&self) -> Result<SweepRequest> {
        let req = SweepRequest {
            link: self.link(),
            rho_db: self.rho_db.clone().unwrap_or_default(),
            methods: self
                .methods
                .clone()
                .unwrap_or_else(|| vec![MethodRequest::Mc, MethodRequest::Analytic]),
            trials: self.trials,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            output_path: self.out.clone(),
        };
        req.validate()?;
        Ok(req)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_lists() {
        assert_eq!(parse_rho_list("0, 5,10").unwrap(), vec![0.0, 5.0, 10.0]);
        assert_eq!(parse_rho_list("-10:20:5").unwrap(), vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]);
        assert!(parse_rho_list("").unwrap().is_empty());
        assert!(parse_rho_list("5:0:1").is_err());
        assert!(parse_rho_list("x").is_err());
    }

    #[test]
    fn methods_sorted_and_deduplicated() {
        let m = parse_methods("mc,bounds,analytic,mc").unwrap();
        assert_eq!(m, vec![MethodRequest::Mc, MethodRequest::Analytic, MethodRequest::Bounds]);
        assert!(parse_methods("nope").is_err());
    }

    #[test]
    fn file_then_flags() {
        let file = Settings::parse("# link\nm = 8\nn = inf\nnr=4\nrho_db=0,10\ntrials=1e5\n").unwrap();
        assert_eq!(file.n, Some(PhaseQuantizer::Infinite));
        assert_eq!(file.trials, Some(100_000));
        let flags = Settings { nr: Some(2), ..Default::default() };
        let s = file.overlay(flags);
        assert_eq!(s.m, Some(8));
        assert_eq!(s.nr, Some(2));
        let req = s.sweep_request().unwrap();
        assert_eq!(req.rho_db, vec![0.0, 10.0]);
        assert_eq!(req.link.antennas, 2);
    }

    #[test]
    fn bad_files_rejected() {
        assert!(Settings::parse("m 4").is_err());
        assert!(Settings::parse("colour=red").is_err());
        assert!(Settings::parse("n=0").is_err());
    }

    #[test]
    fn empty_rho_is_a_config_error() {
        let s = Settings::default();
        assert!(matches!(s.sweep_request(), Err(CliError::Config(_))));
    }

    #[test]
    fn lcsi_picks_two_bit_csir() {
        let s = Settings { combiner: Some(Combiner::LcsiMajority), ..Default::default() };
        assert_eq!(s.link().csir, Csir::TwoBitPhase);
    }

    #[test]
    fn trial_defaults() {
        assert_eq!(default_trials(20.0), 1_000_000);
        assert_eq!(default_trials(20.5), 10_000_000);
    }
}
