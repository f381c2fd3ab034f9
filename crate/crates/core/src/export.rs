//! Deterministic emitters for traces and tables.
//!
//! Display formatting is fixed: utilities to 4 decimals, efforts and
//! thresholds to 3; JSON-lines keep full precision. CSV uses a comma
//! delimiter, dot decimals, and a header row. Column order never changes,
//! so identical runs produce byte-identical files.

use std::io::{self, Write};

use crate::population::SimTrace;

/// Fixed display precision for utility-like values.
pub fn fmt_utility(v: f64) -> String {
    format!("{v:.4}")
}

/// Fixed display precision for efforts and thresholds.
pub fn fmt_effort(v: f64) -> String {
    format!("{v:.3}")
}

/// One JSON object per round, full precision.
pub fn write_trace_jsonl<W: Write>(trace: &SimTrace, mut w: W) -> io::Result<()> {
    for round in &trace.rounds {
        serde_json::to_writer(&mut w, round)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Per-round aggregate columns; per-family vectors live in the jsonl export.
pub fn write_trace_csv<W: Write>(trace: &SimTrace, w: W) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "round",
        "s_cut",
        "sigma_s",
        "mean_t",
        "welfare_total",
        "welfare_mean",
        "n_active",
        "n_exhausted",
    ])?;
    for r in &trace.rounds {
        out.write_record([
            r.round.to_string(),
            format!("{}", r.s_cut),
            format!("{}", r.sigma_s),
            format!("{}", r.mean_t),
            format!("{}", r.welfare_total),
            format!("{}", r.welfare_mean),
            r.n_active.to_string(),
            r.n_exhausted.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Render a GitHub-style markdown table.
pub fn markdown_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = String::new();
    s.push_str("| ");
    s.push_str(&headers.join(" | "));
    s.push_str(" |\n|");
    for _ in headers {
        s.push_str(" --- |");
    }
    s.push('\n');
    for row in rows {
        s.push_str("| ");
        s.push_str(&row.join(" | "));
        s.push_str(" |\n");
    }
    s
}
