//! Conditional Wigner maps after a forwards photodetection: the four-level
//! cascade is collapsed to its conditional state, propagated in closed form to
//! each requested delay, reduced to the cavity, and mapped on the grid. The
//! report tracks the minimum of each map and its negative weight — the
//! nonclassicality witness this preparation is known for.

use anyhow::{bail, Result};
use jcps_core::effective_model::{
    cavity_density_matrix, conditional_state, effective_params, four_level_state,
};
use jcps_core::master_equation::SystemParams;
use jcps_core::phasespace::{evaluate_grid, negativity, wigner, FieldKind};
use num_complex::Complex64 as C64;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{json_f64, write_field, write_report, Metadata, Outcome};

/// Run the command: one Wigner field per delay, one report.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let p3s = cfg.drive_p3s()?;
    if p3s.len() != 1 {
        bail!("the transient command takes exactly one drive setting, got {}", p3s.len());
    }
    let p3 = p3s[0];
    if cfg.times.is_empty() {
        bail!("the transient command needs delays: set times (γτ values, e.g. 0,0.3549,0.5401)");
    }
    let sys = SystemParams::from_p3(p3, cfg.g_over_gamma)?;
    let p = effective_params(&sys)?;
    let (initial, constants) = conditional_state(&p);
    let grid = cfg.phase_grid_or(2.0, 201)?;
    let hash = cfg.config_hash();

    let mut files = Vec::new();
    let mut snapshots = Vec::new();
    for &tau in &cfg.times {
        let state = four_level_state(&constants, &p, tau);
        let cavity = cavity_density_matrix(&state)?;
        let field = evaluate_grid(&cavity, &grid, FieldKind::Wigner);

        let mut meta = Metadata::new("transient", &hash);
        meta.push("p3", format!("{p3:.16e}"))
            .push("gamma_tau", format!("{tau:.16e}"))
            .push("grid", format!("{},{},{},{},{},{}", grid.x_min, grid.x_max, grid.y_min, grid.y_max, grid.nx, grid.ny))
            .push("route", "closed_form_conditional");
        let path = cfg.out.join(format!("transient_wigner_tau_{tau:.4}.csv"));
        write_field(&path, &field, &meta)?;

        let (min_w, negative_area) = negativity(&field);
        snapshots.push(json!({
            "gamma_tau": json_f64(tau),
            "w_origin": json_f64(wigner(&cavity, C64::new(0.0, 0.0))),
            "min_w": json_f64(min_w),
            "negative_area": json_f64(negative_area),
            "doublet_population": json_f64(state.doublet_sum()),
            "upper_population": json_f64(state.rho33),
            "file": path.display().to_string(),
        }));
        files.push(path);
    }

    let report = json!({
        "command": "transient",
        "config_sha256": hash,
        "p3": json_f64(p3),
        "initial_state": {
            "rho00": json_f64(initial.rho00),
            "rho11": json_f64(initial.rho11),
            "rho22": json_f64(initial.rho22),
            "rho33": json_f64(initial.rho33),
            "rho12_re": json_f64(initial.rho12.re),
            "rho12_im": json_f64(initial.rho12.im),
        },
        "snapshots": snapshots,
    });
    let report_path = cfg.out.join("transient_report.json");
    write_report(&report_path, &report)?;
    files.push(report_path);
    Ok(Outcome { files, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Right at the detection the conditional map is positive everywhere; at
    /// γτ = 0.3549 it develops a negative dip at the origin.
    #[test]
    fn negativity_appears_at_the_depicted_delay_and_not_at_zero() {
        let dir = tempfile::tempdir().expect("tempdir");
        let cfg = RunConfig {
            p3: vec![0.247],
            times: vec![0.0, 0.3549],
            grid: Some("-2,2,-2,2,101,101".into()),
            out: dir.path().to_path_buf(),
            ..RunConfig::default()
        };
        let outcome = run(&cfg).expect("run");
        assert_eq!(outcome.files.len(), 3, "two fields and a report");

        let snaps = outcome.report["snapshots"].as_array().expect("snapshots");
        let at_zero = &snaps[0];
        assert!(at_zero["min_w"].as_f64().expect("min") > -1e-12, "no negativity at τ = 0");
        assert_abs_diff_eq!(at_zero["negative_area"].as_f64().expect("area"), 0.0, epsilon = 1e-15);

        let at_dip = &snaps[1];
        let w0 = at_dip["w_origin"].as_f64().expect("w0");
        assert!(w0 < 0.0, "origin dips negative at γτ = 0.3549, got {w0}");
        assert!(w0 > -0.3, "the dip is shallow, got {w0}");
        assert!(at_dip["negative_area"].as_f64().expect("area") > 0.0);

        // Conditional initial state of the cascade.
        let init = &outcome.report["initial_state"];
        assert_abs_diff_eq!(init["rho00"].as_f64().expect("rho00"), 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(
            init["rho11"].as_f64().expect("rho11"),
            (3.0 + 2.0 * std::f64::consts::SQRT_2) / 10.0,
            epsilon = 1e-12,
        );
        assert_abs_diff_eq!(init["rho12_re"].as_f64().expect("rho12"), 0.1, epsilon = 1e-12);
    }

    /// Delays are mandatory and the command is single-setting.
    #[test]
    fn missing_delays_or_multiple_settings_are_rejected() {
        let dir = tempfile::tempdir().expect("tempdir");
        let no_times = RunConfig {
            p3: vec![0.247],
            out: dir.path().to_path_buf(),
            ..RunConfig::default()
        };
        assert!(run(&no_times).is_err());

        let two = RunConfig {
            p3: vec![0.1, 0.2],
            times: vec![0.0],
            out: dir.path().to_path_buf(),
            ..RunConfig::default()
        };
        assert!(run(&two).is_err());
    }
}
