//! High-SNR gain tables.

use std::fmt::Write;

use pqsimo_core::asymptotics::error_floor_lower_bound;
use pqsimo_core::{Combiner, Csir, PhaseQuantizer, Regime};

use crate::config::LinkTemplate;
use crate::error::Result;
use crate::sweep::gains;

/// Formats G_d, G_c (or FLOOR / UNDEFINED) and the asymptote coefficient.
pub fn print_gains(m_order: usize, q: PhaseQuantizer, n_r: usize, combiner: Combiner) -> Result<String> {
    let csir = if combiner == Combiner::LcsiMajority { Csir::TwoBitPhase } else { Csir::Perfect };
    let link = LinkTemplate { order: m_order, quantizer: q, antennas: n_r, combiner, csir };
    // catches combinations such as SC with n = 3
    link.at(1.0)?;
    let g = gains(&link)?;
    let mut s = String::new();
    let _ = writeln!(s, "architecture  {}", combiner.name());
    let _ = writeln!(s, "M             {m_order}");
    let _ = writeln!(s, "n             {q}");
    let _ = writeln!(s, "N_r           {n_r}");
    match g.regime {
        Regime::Floor => {
            let _ = writeln!(s, "G_d           0");
            let _ = writeln!(s, "G_c           FLOOR");
            let _ = writeln!(s, "coefficient   FLOOR");
            if m_order == 4 && q == PhaseQuantizer::Bits(1) {
                let _ = writeln!(s, "floor_bound   {}", error_floor_lower_bound(n_r));
            }
        }
        Regime::PowerLaw => {
            let _ = writeln!(s, "G_d           {}", g.diversity);
            match (g.coding, g.coefficient()) {
                (Some(gc), Some(c)) => {
                    let _ = writeln!(s, "G_c           {gc:.10}");
                    let _ = writeln!(s, "coefficient   {c:.10}");
                }
                _ => {
                    let _ = writeln!(s, "G_c           UNDEFINED");
                    let _ = writeln!(s, "coefficient   UNDEFINED");
                }
            }
        }
    }
    Ok(s)
}

/// Value of one `key value` line of [`print_gains`] output.
pub fn field<'a>(table: &'a str, key: &str) -> Option<&'a str> {
    table.lines().find_map(|l| {
        let mut it = l.split_whitespace();
        (it.next() == Some(key)).then(|| it.next()).flatten()
    })
}
