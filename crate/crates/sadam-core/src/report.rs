//! CSV and JSON artifact writers.
//!
//! Every emitted file embeds the hash of the resolved configuration that
//! produced it: CSVs carry a `# config_hash=<hex>` first line ahead of the
//! header, JSON summaries carry a `config_hash` field. Floats print in
//! Rust's shortest round-trip form, which is what makes byte-identical
//! reruns a meaningful contract.

use crate::error::Result;
use crate::experiments::{FieldNode, RunRow, RunSummary, StabilityRow};
use crate::lgi::ConcentrationRow;
use serde::Serialize;
use std::io::Write;

/// Header of the per-run CSV when the objective has a stationarity oracle.
pub const RUN_HEADER_WITH_ORACLE: &str =
    "t,loss,rho,brake,eta_hat,grad_norm,update_norm,clarke_dist,status";
/// Header of the per-run CSV without an oracle column.
pub const RUN_HEADER_PLAIN: &str = "t,loss,rho,brake,eta_hat,grad_norm,update_norm,status";

fn hash_line(config_hash: &str) -> String {
    format!("# config_hash={config_hash}")
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Per-run metric rows. The `clarke_dist` column exists exactly when the
/// objective has an oracle.
pub fn write_run_csv<W: Write>(
    mut w: W,
    config_hash: &str,
    rows: &[RunRow],
    with_oracle: bool,
) -> Result<()> {
    writeln!(w, "{}", hash_line(config_hash))?;
    let header = if with_oracle {
        RUN_HEADER_WITH_ORACLE
    } else {
        RUN_HEADER_PLAIN
    };
    writeln!(w, "{header}")?;
    for r in rows {
        if with_oracle {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.t,
                r.loss,
                r.rho,
                r.brake,
                r.eta_hat,
                r.grad_norm,
                r.update_norm,
                opt_cell(r.clarke_dist),
                r.status.as_str()
            )?;
        } else {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.t,
                r.loss,
                r.rho,
                r.brake,
                r.eta_hat,
                r.grad_norm,
                r.update_norm,
                r.status.as_str()
            )?;
        }
    }
    Ok(())
}

/// Probe field grid: one row per node.
pub fn write_field_csv<W: Write>(mut w: W, config_hash: &str, nodes: &[FieldNode]) -> Result<()> {
    writeln!(w, "{}", hash_line(config_hash))?;
    writeln!(w, "x,y,rho,brake,status")?;
    for n in nodes {
        writeln!(
            w,
            "{},{},{},{},{}",
            n.x,
            n.y,
            n.rho,
            n.brake,
            n.status.as_str()
        )?;
    }
    Ok(())
}

/// Concentration table: estimation error versus probe count.
pub fn write_concentration_csv<W: Write>(
    mut w: W,
    config_hash: &str,
    rows: &[ConcentrationRow],
) -> Result<()> {
    writeln!(w, "{}", hash_line(config_hash))?;
    writeln!(w, "k,median_err,q95_err,trials")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.k, r.median_err, r.q95_err, r.trials)?;
    }
    Ok(())
}

/// Stability table: per-seed final-iterate drift per optimizer.
pub fn write_stability_csv<W: Write>(
    mut w: W,
    config_hash: &str,
    rows: &[StabilityRow],
) -> Result<()> {
    writeln!(w, "{}", hash_line(config_hash))?;
    writeln!(w, "seed,divergence_sadam,divergence_adamw,ratio,status")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.seed,
            r.divergence_sadam,
            r.divergence_adamw,
            r.ratio,
            if r.ok { "ok" } else { "failed" }
        )?;
    }
    Ok(())
}

/// Side-by-side optimizer comparison: one row per (optimizer, seed).
pub fn write_compare_csv<W: Write>(
    mut w: W,
    config_hash: &str,
    entries: &[(String, RunSummary)],
) -> Result<()> {
    writeln!(w, "{}", hash_line(config_hash))?;
    writeln!(
        w,
        "optimizer,seed,status,best_loss,final_loss,min_clarke_dist,chatter_cosine,chatter_cv"
    )?;
    for (name, s) in entries {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            name,
            s.seed,
            s.status.as_str(),
            opt_cell(s.best_loss),
            opt_cell(s.final_loss),
            opt_cell(s.min_clarke_dist),
            opt_cell(s.chatter_cosine),
            opt_cell(s.chatter_cv)
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    schema_version: u32,
    library_version: &'a str,
    config_hash: &'a str,
    summary: &'a RunSummary,
    config: &'a serde_json::Value,
}

/// JSON run summary: config echo, hash, library version, and the scalar
/// summary. Wall time is intentionally absent (it would break determinism).
pub fn write_summary_json<W: Write>(
    mut w: W,
    config_hash: &str,
    config_echo: &serde_json::Value,
    summary: &RunSummary,
) -> Result<()> {
    let doc = SummaryDoc {
        schema_version: 1,
        library_version: crate::VERSION,
        config_hash,
        summary,
        config: config_echo,
    };
    let text = serde_json::to_string_pretty(&doc).expect("serializable");
    writeln!(w, "{text}")?;
    Ok(())
}

/// Recover the embedded config hash from previously written file contents
/// (either format). Used to refuse clobbering outputs of a different
/// configuration.
pub fn extract_config_hash(contents: &str) -> Option<String> {
    let first = contents.lines().next()?;
    if let Some(hash) = first.strip_prefix("# config_hash=") {
        return Some(hash.trim().to_string());
    }
    // JSON: parse and read the field.
    let doc: serde_json::Value = serde_json::from_str(contents).ok()?;
    doc.get("config_hash")?.as_str().map(|s| s.to_string())
}
