//! Subcommand implementations. Stdout carries line-buffered progress only;
//! all data goes to files in the output directory.

use crate::config::{CliDocument, Defaults};
use crate::error::{CliError, CliResult};
use crate::output::OutputDir;
use sadam_core::experiments::{
    lgi_field_scan, median, run_experiment, stability_study, ExperimentConfig, ObjectiveSpec,
};
use sadam_core::lgi::{concentration_study, log_log_slope, population_lgi_quadratic};
use sadam_core::matrix::SymMatrix;
use sadam_core::report;
use sadam_core::vector::ParamVector;

fn require<'a, T>(section: &'a Option<T>, name: &str) -> CliResult<&'a T> {
    section
        .as_ref()
        .ok_or_else(|| CliError::config(format!("config is missing the [{name}] section")))
}

fn experiment_with_seed(doc: &CliDocument, seed: Option<u64>) -> CliResult<ExperimentConfig> {
    let mut exp = require(&doc.experiment, "experiment")?.clone();
    if let Some(s) = seed {
        exp.seeds = vec![s];
    }
    exp.validate().map_err(CliError::from)?;
    Ok(exp)
}

pub fn cmd_run(doc: &CliDocument, seed: Option<u64>, out: &OutputDir) -> CliResult<()> {
    let exp = experiment_with_seed(doc, seed)?;
    // The hash covers the document as actually executed, including a seed
    // override.
    let mut resolved = doc.clone();
    resolved.experiment = Some(exp.clone());
    let hash = resolved.hash();
    let echo = resolved.echo();

    let records = run_experiment(&exp).map_err(CliError::from)?;
    let with_oracle = records
        .iter()
        .flat_map(|r| r.rows.iter())
        .any(|r| r.clarke_dist.is_some());
    for record in &records {
        let seed = record.summary.seed;
        let csv = out.write_with(&format!("run_seed{seed}.csv"), &hash, |w| {
            report::write_run_csv(w, &hash, &record.rows, with_oracle)
        })?;
        let json = out.write_with(&format!("run_seed{seed}.json"), &hash, |w| {
            report::write_summary_json(w, &hash, &echo, &record.summary)
        })?;
        println!(
            "run seed {seed}: status={} steps={} wall={:.3}s -> {}, {}",
            record.summary.status.as_str(),
            record.summary.executed_steps,
            record.summary.wall_time.as_secs_f64(),
            csv.display(),
            json.display()
        );
    }
    Ok(())
}

pub fn cmd_compare(doc: &CliDocument, seed: Option<u64>, out: &OutputDir) -> CliResult<()> {
    let base = experiment_with_seed(doc, seed)?;
    let compare = require(&doc.compare, "compare")?;
    if compare.optimizers.is_empty() {
        return Err(CliError::config("compare.optimizers must not be empty"));
    }
    let mut resolved = doc.clone();
    resolved.experiment = Some(base.clone());
    let hash = resolved.hash();

    let mut entries = Vec::new();
    for optimizer in &compare.optimizers {
        let mut exp = base.clone();
        exp.optimizer = optimizer.clone();
        let records = run_experiment(&exp).map_err(CliError::from)?;
        for record in records {
            println!(
                "compare {} seed {}: status={} best_loss={:?} wall={:.3}s",
                optimizer.id(),
                record.summary.seed,
                record.summary.status.as_str(),
                record.summary.best_loss,
                record.summary.wall_time.as_secs_f64()
            );
            entries.push((optimizer.id().to_string(), record.summary));
        }
    }
    let path = out.write_with("compare.csv", &hash, |w| {
        report::write_compare_csv(w, &hash, &entries)
    })?;
    println!("compare table -> {}", path.display());
    Ok(())
}

pub fn cmd_probe(doc: &CliDocument, out: &OutputDir) -> CliResult<()> {
    let probe = require(&doc.probe, "probe")?;
    let hash = doc.hash();
    let objective = probe.objective.build(probe.seed).map_err(CliError::from)?;
    let nodes =
        lgi_field_scan(objective.as_ref(), &probe.grid, &probe.lgi, probe.seed)
            .map_err(CliError::from)?;
    let failed = nodes
        .iter()
        .filter(|n| n.status == sadam_core::experiments::RunStatus::Failed)
        .count();
    let path = out.write_with("probe.csv", &hash, |w| {
        report::write_field_csv(w, &hash, &nodes)
    })?;
    println!(
        "probe: {} nodes ({} failed) -> {}",
        nodes.len(),
        failed,
        path.display()
    );
    Ok(())
}

/// Closed-form reference score for objectives that have one.
fn reference_rho(
    spec: &ObjectiveSpec,
    point: &ParamVector,
    delta: f64,
    epsilon: f64,
) -> Option<f64> {
    match spec {
        ObjectiveSpec::Linear { gradient } => {
            let h = SymMatrix::zeros(gradient.len()).ok()?;
            population_lgi_quadratic(gradient, &h, delta, epsilon).ok()
        }
        ObjectiveSpec::QuadraticDiag {
            gradient,
            hessian_diag,
        } => {
            let h = SymMatrix::from_diag(hessian_diag).ok()?;
            let hx = h.matvec(point.as_slice());
            let g: Vec<f64> = gradient.iter().zip(hx).map(|(a, b)| a + b).collect();
            population_lgi_quadratic(&g, &h, delta, epsilon).ok()
        }
        _ => None,
    }
}

pub fn cmd_concentration(doc: &CliDocument, out: &OutputDir) -> CliResult<()> {
    let section = require(&doc.concentration, "concentration")?;
    let hash = doc.hash();
    let objective = section
        .objective
        .build(section.seed)
        .map_err(CliError::from)?;
    let point = match &section.point {
        Some(values) => ParamVector::new(values.clone()).map_err(CliError::from)?,
        None => ParamVector::zeros(objective.dim()).map_err(CliError::from)?,
    };
    let rho_ref = section
        .reference_rho
        .or_else(|| reference_rho(&section.objective, &point, section.lgi.delta, section.lgi.epsilon))
        .ok_or_else(|| {
            CliError::config(
                "reference_rho is required for objectives without a closed-form score",
            )
        })?;
    let rows = concentration_study(
        objective.as_ref(),
        &point,
        &section.lgi,
        &section.k_grid,
        section.trials,
        section.seed,
        rho_ref,
    )
    .map_err(CliError::from)?;
    let slope = if rows.len() >= 2 {
        log_log_slope(&rows, |r| r.q95_err)
    } else {
        f64::NAN
    };
    let path = out.write_with("concentration.csv", &hash, |w| {
        report::write_concentration_csv(w, &hash, &rows)
    })?;
    println!(
        "concentration: reference rho {rho_ref:.6}, q95 log-log slope {slope:.3} -> {}",
        path.display()
    );
    Ok(())
}

pub fn cmd_stability(doc: &CliDocument, out: &OutputDir) -> CliResult<()> {
    let section = require(&doc.stability, "stability")?;
    let hash = doc.hash();
    let rows = stability_study(section).map_err(CliError::from)?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let path = out.write_with("stability.csv", &hash, |w| {
        report::write_stability_csv(w, &hash, &rows)
    })?;
    println!(
        "stability: {} seeds, median divergence ratio {:.4} -> {}",
        rows.len(),
        median(&ratios),
        path.display()
    );
    Ok(())
}

pub fn cmd_defaults() -> CliResult<()> {
    let text = toml::to_string_pretty(&Defaults::default())
        .map_err(|e| CliError::config(format!("cannot serialize defaults: {e}")))?;
    print!("{text}");
    Ok(())
}
