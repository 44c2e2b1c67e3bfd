//! CSV tables, including the gap-versus-bound plot data.

use crate::error::{CliError, CliResult};
use gapforge_core::GapRecord;
use std::io::Write;

/// A rectangular table with a fixed header row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self { headers: headers.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// UTF-8, comma separated, LF line endings.
    pub fn write_csv<W: Write>(&self, w: W) -> CliResult<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let io = |e: csv::Error| CliError::Usage(format!("csv output: {e}"));
        out.write_record(&self.headers).map_err(io)?;
        for r in &self.rows {
            out.write_record(r).map_err(io)?;
        }
        out.flush().map_err(|e| CliError::Usage(format!("csv output: {e}")))
    }
}

/// Shortest representation that parses back to the same float.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Column sets for gap plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    /// `p_lo,gap,rankin_merit`: gaps normalized by the Rankin lower bound.
    Rankin,
    /// `p_lo,gap,merit`: gaps over `log p_lo`.
    Merit,
    /// `p_lo,p_hi,gap,merit,rankin_merit`.
    Full,
}

/// Gap records as a table. `rankin_merit` is left empty where the bound is
/// undefined.
pub fn gap_table(records: &[GapRecord], kind: PlotKind) -> Table {
    let headers: &[&'static str] = match kind {
        PlotKind::Rankin => &["p_lo", "gap", "rankin_merit"],
        PlotKind::Merit => &["p_lo", "gap", "merit"],
        PlotKind::Full => &["p_lo", "p_hi", "gap", "merit", "rankin_merit"],
    };
    let mut t = Table::new(headers);
    for r in records {
        t.push(match kind {
            PlotKind::Rankin => vec![r.p_lo.to_string(), r.gap.to_string(), fmt_opt(r.rankin_merit)],
            PlotKind::Merit => vec![r.p_lo.to_string(), r.gap.to_string(), fmt_f64(r.merit)],
            PlotKind::Full => vec![
                r.p_lo.to_string(),
                r.p_hi.to_string(),
                r.gap.to_string(),
                fmt_f64(r.merit),
                fmt_opt(r.rankin_merit),
            ],
        });
    }
    t
}

/// Writes plot data for `records`; an empty record set is a usage error.
pub fn emit_plotdata<W: Write>(records: &[GapRecord], kind: PlotKind, w: W) -> CliResult<()> {
    if records.is_empty() {
        return Err(CliError::Usage("no gap records to plot".into()));
    }
    gap_table(records, kind).write_csv(w)
}
