//! CSV and JSON emission of sweep results.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{CliError, Result};
use crate::sweep::{SweepResult, SweepRow};

pub const CSV_HEADER: &str = "rho_db,method,sep,ci_low,ci_high,trials,elapsed_s";

pub fn write_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    // Display gives the shortest text that parses back to the same f64
    for r in &result.rows {
        w.write_record([
            r.rho_db.to_string(),
            r.method.to_string(),
            r.sep.to_string(),
            r.ci_low.to_string(),
            r.ci_high.to_string(),
            r.trials.to_string(),
            r.elapsed_s.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<SweepResult> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(CliError::Config(format!("unexpected CSV header '{}'", header.join(","))));
    }
    let rows = rd.deserialize::<SweepRow>().collect::<std::result::Result<_, _>>()?;
    Ok(SweepResult { rows })
}

pub fn save_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write_csv(result, File::create(path)?)
}

pub fn load_csv(path: &Path) -> Result<SweepResult> {
    read_csv(File::open(path)?)
}

/// Array of row objects with the CSV field names.
pub fn save_json(result: &SweepResult, path: &Path) -> Result<()> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, &result.rows)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn load_json(path: &Path) -> Result<SweepResult> {
    let rows = serde_json::from_reader(File::open(path)?)?;
    Ok(SweepResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Method;

    fn sample() -> SweepResult {
        SweepResult {
            rows: vec![
                SweepRow {
                    rho_db: -2.5,
                    method: Method::Analytic,
                    sep: 0.1 + 0.2,
                    ci_low: 0.29999999999999993,
                    ci_high: 1.0 / 3.0,
                    trials: 131_072,
                    elapsed_s: 1.234e-5,
                },
                SweepRow {
                    rho_db: 30.0,
                    method: Method::Asymptote,
                    sep: 1.7e-300,
                    ci_low: 1.7e-300,
                    ci_high: 1.7e-300,
                    trials: 0,
                    elapsed_s: 0.0,
                },
            ],
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut buf = Vec::new();
        write_csv(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(read_csv(&buf[..]).unwrap(), sample());
    }

    #[test]
    fn empty_result_keeps_header() {
        let mut buf = Vec::new();
        write_csv(&SweepResult::default(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().trim(), CSV_HEADER);
        assert!(read_csv(&buf[..]).unwrap().rows.is_empty());
    }

    #[test]
    fn foreign_header_rejected() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
