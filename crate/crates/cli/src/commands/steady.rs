//! Steady-state Wigner maps: for each requested occupation, the closed-form
//! four-level result and the full dissipative model side by side, with their
//! extrema and the largest pointwise discrepancy.

use anyhow::{Context, Result};
use jcps_core::effective_model::steady_state_wigner;
use jcps_core::master_equation::{
    build_liouvillian, partial_trace_cavity, steady_state, SystemParams,
};
use jcps_core::operators::FockSpace;
use jcps_core::phasespace::{
    evaluate_grid, evaluate_grid_fn, find_extrema, Extremum, FieldKind, PhaseField,
};
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{json_f64, write_field, write_report, Metadata, Outcome};

/// Extrema as JSON rows, strongest first.
pub(crate) fn extrema_json(extrema: &[Extremum], keep: usize) -> serde_json::Value {
    serde_json::Value::Array(
        extrema
            .iter()
            .take(keep)
            .map(|e| {
                json!({
                    "x": json_f64(e.position.re),
                    "y": json_f64(e.position.im),
                    "value": json_f64(e.value),
                    "kind": format!("{:?}", e.kind),
                })
            })
            .collect(),
    )
}

fn max_abs_difference(a: &PhaseField, b: &PhaseField) -> f64 {
    a.values
        .iter()
        .zip(b.values.iter())
        .fold(0.0f64, |m, (&x, &y)| m.max((x - y).abs()))
}

/// Run the command: two fields per occupation (closed form and full model),
/// one report.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let p3s = cfg.drive_p3s()?;
    let grid = cfg.phase_grid_or(2.0, 161)?;
    let hash = cfg.config_hash();
    let mut files = Vec::new();
    let mut per_p3 = Vec::new();

    for &p3 in &p3s {
        let analytic = evaluate_grid_fn(
            |z| steady_state_wigner(p3, z).expect("p3 validated by the config"),
            &grid,
            FieldKind::Wigner,
        );

        let sys = SystemParams::from_p3(p3, cfg.g_over_gamma)?;
        let space = FockSpace::new(cfg.n_max)?;
        let liouvillian = build_liouvillian(&sys, &space);
        let rho_ss = steady_state(&liouvillian)
            .with_context(|| format!("steady state at p3 = {p3}"))?;
        let cavity = partial_trace_cavity(&rho_ss)?;
        let numeric = evaluate_grid(&cavity, &grid, FieldKind::Wigner);

        let mut meta = Metadata::new("steady", &hash);
        meta.push("p3", format!("{p3:.16e}"))
            .push("g_over_gamma", format!("{:.16e}", cfg.g_over_gamma))
            .push("n_max", cfg.n_max)
            .push("grid", format!("{},{},{},{},{},{}", grid.x_min, grid.x_max, grid.y_min, grid.y_max, grid.nx, grid.ny))
            .push("steady_solver_residual_tolerance", "1e-9");

        let tag = format!("p3_{p3:.4}");
        let analytic_path = cfg.out.join(format!("steady_wigner_analytic_{tag}.csv"));
        let numeric_path = cfg.out.join(format!("steady_wigner_full_{tag}.csv"));
        let mut meta_analytic = meta.clone();
        meta_analytic.push("route", "closed_form_four_level");
        write_field(&analytic_path, &analytic, &meta_analytic)?;
        let mut meta_numeric = meta;
        meta_numeric.push("route", "full_model_steady_state");
        write_field(&numeric_path, &numeric, &meta_numeric)?;

        let discrepancy = max_abs_difference(&analytic, &numeric);
        per_p3.push(json!({
            "p3": json_f64(p3),
            "eps_d_over_gamma": json_f64(sys.eps_d.re),
            "drive_detuning_over_gamma": json_f64(sys.delta_omega_d),
            "mean_photon_number_full": json_f64(rho_ss.mean_photon_number()),
            "analytic_extrema": extrema_json(&find_extrema(&analytic), 4),
            "full_extrema": extrema_json(&find_extrema(&numeric), 4),
            "max_abs_discrepancy": json_f64(discrepancy),
            "files": [analytic_path.display().to_string(), numeric_path.display().to_string()],
        }));
        files.push(analytic_path);
        files.push(numeric_path);
    }

    let report = json!({
        "command": "steady",
        "config_sha256": hash,
        "runs": per_p3,
    });
    let report_path = cfg.out.join("steady_report.json");
    write_report(&report_path, &report)?;
    files.push(report_path);
    Ok(Outcome { files, report })
}

/// Parse one field CSV back (header lines skipped); used by the tests.
#[cfg(test)]
pub(crate) fn read_field_values(path: &std::path::Path) -> Vec<f64> {
    let text = std::fs::read_to_string(path).expect("read CSV");
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('x'))
        .map(|l| l.rsplit(',').next().expect("value column").parse::<f64>().expect("float"))
        .collect()
}
