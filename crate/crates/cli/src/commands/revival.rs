//! Collapse-and-revival run of the conservative, atom-driven system: the
//! photon-number trace over a gt window, Q-function snapshots at the requested
//! times, and a direct Schrödinger-integration cross-check of every snapshot.

use anyhow::{Context, Result};
use jcps_core::phasespace::{evaluate_grid, evaluate_grid_fn, find_extrema, FieldKind};
use jcps_core::revival::{
    displaced_cavity_state, mean_photon_number, revival_q, schrodinger_oracle_sequence,
    RevivalParams,
};
use serde_json::json;

use crate::commands::steady::extrema_json;
use crate::config::RunConfig;
use crate::output::{json_f64, write_field, write_report, write_trace, Metadata, Outcome};

/// Oracle integrator tolerances (relative, absolute); also recorded in the
/// report so the stated discrepancy is reproducible.
const ORACLE_TOL: (f64, f64) = (3e-12, 1e-14);

/// Run the command: photon trace, Q snapshots, oracle discrepancies, report.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let params = RevivalParams::new(cfg.alpha0, cfg.n_trunc)?;
    let hash = cfg.config_hash();
    let mut files = Vec::new();

    // Photon-number trace: explicit gt samples, or a uniform sweep to gt = 260.
    let trace_times: Vec<f64> = if cfg.times.is_empty() {
        let n = (260.0 / cfg.trace_step).round() as usize;
        (0..=n).map(|i| i as f64 * cfg.trace_step).collect()
    } else {
        cfg.times.clone()
    };
    let trace: Vec<(f64, f64)> = trace_times
        .iter()
        .map(|&t| (t, mean_photon_number(&params, t)))
        .collect();
    let mut meta = Metadata::new("revival", &hash);
    meta.push("alpha0", format!("{:.16e}", cfg.alpha0))
        .push("n_trunc", cfg.n_trunc);
    let trace_path = cfg.out.join("revival_photon_trace.csv");
    write_trace(&trace_path, ["gt", "n_mean"], &trace, &meta)?;
    files.push(trace_path.clone());

    // Landmarks read off the trace (reported only when the window covers them).
    let peak_in = |lo: f64, hi: f64| -> Option<(f64, f64)> {
        trace
            .iter()
            .filter(|&&(t, _)| (lo..=hi).contains(&t))
            .cloned()
            .fold(None, |best, (t, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((t, v)),
            })
    };
    let early = peak_in(0.0, 25.0);
    let late = peak_in(100.0, f64::INFINITY);
    let peak_json = |p: Option<(f64, f64)>| match p {
        Some((t, v)) => json!({"gt": json_f64(t), "n_mean": json_f64(v)}),
        None => serde_json::Value::Null,
    };

    // Q snapshots and the independent-route discrepancy at the same times.
    let mut inset_times: Vec<f64> = cfg.inset_times.clone();
    inset_times.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));
    inset_times.dedup();
    let grid = cfg.phase_grid_or(4.0, 201)?;
    let mut insets = Vec::new();
    if !inset_times.is_empty() {
        let oracle_n_max = cfg.n_max.max(2 * cfg.n_trunc);
        let states = schrodinger_oracle_sequence(&params, &inset_times, oracle_n_max)
            .context("direct integration cross-check")?;
        for (&t, psi) in inset_times.iter().zip(states.iter()) {
            let series = evaluate_grid_fn(|z| revival_q(&params, z, t), &grid, FieldKind::Husimi);
            let reduced = displaced_cavity_state(psi, cfg.alpha0)?;
            let direct = evaluate_grid(&reduced, &grid, FieldKind::Husimi);
            let gap = series
                .values
                .iter()
                .zip(direct.values.iter())
                .fold(0.0f64, |m, (&a, &b)| m.max((a - b).abs()));

            let mut meta_q = Metadata::new("revival", &hash);
            meta_q
                .push("alpha0", format!("{:.16e}", cfg.alpha0))
                .push("n_trunc", cfg.n_trunc)
                .push("gt", format!("{t:.16e}"))
                .push("grid", format!("{},{},{},{},{},{}", grid.x_min, grid.x_max, grid.y_min, grid.y_max, grid.nx, grid.ny))
                .push("oracle_n_max", oracle_n_max)
                .push("oracle_tolerances", format!("{:e},{:e}", ORACLE_TOL.0, ORACLE_TOL.1));
            let path = cfg.out.join(format!("revival_q_gt_{t:.2}.csv"));
            write_field(&path, &series, &meta_q)?;

            insets.push(json!({
                "gt": json_f64(t),
                "n_mean": json_f64(mean_photon_number(&params, t)),
                "extrema": extrema_json(&find_extrema(&series), 4),
                "oracle_max_abs_gap": json_f64(gap),
                "file": path.display().to_string(),
            }));
            files.push(path);
        }
    }

    let report = json!({
        "command": "revival",
        "config_sha256": hash,
        "alpha0": json_f64(cfg.alpha0),
        "n_trunc": cfg.n_trunc,
        "trace_file": trace_path.display().to_string(),
        "early_peak": peak_json(early),
        "late_peak": peak_json(late),
        "insets": insets,
    });
    let report_path = cfg.out.join("revival_report.json");
    write_report(&report_path, &report)?;
    files.push(report_path);
    Ok(Outcome { files, report })
}
