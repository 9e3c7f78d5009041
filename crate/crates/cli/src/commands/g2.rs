//! Intensity correlation g²(τ) of the forwards-scattered light at a single
//! drive setting: the closed-form series with and without the quantum beat,
//! landmark values (τ = 0, the maximum, the first return to 1), and an
//! optional full-model overlay from the quantum regression procedure.

use anyhow::{bail, Context, Result};
use jcps_core::effective_model::{effective_params, g2_analytic, g2_coefficients};
use jcps_core::master_equation::{build_liouvillian, g2_numeric, steady_state, SystemParams};
use jcps_core::operators::FockSpace;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{json_f64, write_report, write_trace, Metadata, Outcome};

/// Evenly spaced delays 0..=end with the given step (end included).
fn delay_grid(end: f64, step: f64) -> Vec<f64> {
    let n = (end / step).round() as usize;
    (0..=n).map(|i| i as f64 * step).collect()
}

/// Global maximum of the beat-on series on γτ ∈ [0, 2] and the first downward
/// crossing of 1 after it (scanned out to γτ = 4, where the transient part
/// has decayed to ~e⁻⁴ of its initial weight). Returns
/// `((tau_max, g2_max), Option<tau_crossing>)`.
pub(crate) fn landmarks(
    p: &jcps_core::effective_model::EffectiveModelParams,
) -> Result<((f64, f64), Option<f64>)> {
    let step: f64 = 1e-5;
    let mut tau_max = 0.0;
    let mut g2_max = g2_analytic(p, 0.0, true)?;
    let n_scan = (2.0 / step).round() as usize;
    for i in 1..=n_scan {
        let tau = i as f64 * step;
        let v = g2_analytic(p, tau, true)?;
        if v > g2_max {
            g2_max = v;
            tau_max = tau;
        }
    }
    let mut crossing = None;
    if g2_max > 1.0 {
        let mut prev = g2_max;
        let n_tail = ((4.0 - tau_max) / step).round() as usize;
        for i in 1..=n_tail {
            let tau = tau_max + i as f64 * step;
            let v = g2_analytic(p, tau, true)?;
            if prev >= 1.0 && v < 1.0 {
                // Linear interpolation between the bracketing samples.
                crossing = Some(tau - step * (1.0 - v) / (prev - v));
                break;
            }
            prev = v;
        }
    }
    Ok(((tau_max, g2_max), crossing))
}

/// Run the command: beat-on and beat-averaged series, landmark report, and
/// (when requested) the full-model overlay.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let p3s = cfg.drive_p3s()?;
    if p3s.len() != 1 {
        bail!("the correlation command takes exactly one drive setting, got {}", p3s.len());
    }
    let p3 = p3s[0];
    let sys = SystemParams::from_p3(p3, cfg.g_over_gamma)?;
    let p = effective_params(&sys)?;
    let hash = cfg.config_hash();

    let taus: Vec<f64> = if cfg.times.is_empty() { delay_grid(2.0, 5e-4) } else { cfg.times.clone() };
    let mut beat_on = Vec::with_capacity(taus.len());
    let mut beat_avg = Vec::with_capacity(taus.len());
    for &tau in &taus {
        beat_on.push((tau, g2_analytic(&p, tau, true)?));
        beat_avg.push((tau, g2_analytic(&p, tau, false)?));
    }

    let mut meta = Metadata::new("g2", &hash);
    meta.push("p3", format!("{p3:.16e}"))
        .push("g_over_gamma", format!("{:.16e}", cfg.g_over_gamma))
        .push("omega_over_gamma", format!("{:.16e}", p.omega))
        .push("nu_over_gamma", format!("{:.16e}", p.nu));
    let mut files = Vec::new();

    let on_path = cfg.out.join("g2_beat_on.csv");
    let mut meta_on = meta.clone();
    meta_on.push("series", "beat_on");
    write_trace(&on_path, ["gamma_tau", "g2"], &beat_on, &meta_on)?;
    files.push(on_path);

    let avg_path = cfg.out.join("g2_beat_averaged.csv");
    let mut meta_avg = meta.clone();
    meta_avg.push("series", "beat_averaged");
    write_trace(&avg_path, ["gamma_tau", "g2"], &beat_avg, &meta_avg)?;
    files.push(avg_path);

    let mut overlay_summary = serde_json::Value::Null;
    if cfg.g2_numeric_overlay {
        let overlay_taus: Vec<f64> = if cfg.times.is_empty() { delay_grid(2.0, 0.01) } else { cfg.times.clone() };
        let space = FockSpace::new(cfg.n_max)?;
        let liouvillian = build_liouvillian(&sys, &space);
        let rho_ss = steady_state(&liouvillian).context("steady state for the overlay")?;
        let values = g2_numeric(&liouvillian, &rho_ss, &overlay_taus)
            .context("regression propagation for the overlay")?;
        let rows: Vec<(f64, f64)> = overlay_taus.iter().cloned().zip(values.iter().cloned()).collect();
        let full_path = cfg.out.join("g2_full_model.csv");
        let mut meta_full = meta.clone();
        meta_full.push("series", "full_model").push("n_max", cfg.n_max);
        write_trace(&full_path, ["gamma_tau", "g2"], &rows, &meta_full)?;
        files.push(full_path);
        overlay_summary = json!({
            "n_max": cfg.n_max,
            "g2_zero": json_f64(values[0]),
            "points": overlay_taus.len(),
        });
    }

    let g2_zero = g2_analytic(&p, 0.0, true)?;
    let ((tau_max, g2_max), crossing) = landmarks(&p)?;
    let a = g2_coefficients(&p)?;
    let report = json!({
        "command": "g2",
        "config_sha256": hash,
        "p3": json_f64(p3),
        "omega_over_gamma": json_f64(p.omega),
        "nu_over_gamma": json_f64(p.nu),
        "beat_period_gamma_tau": json_f64(2.0 * std::f64::consts::PI / p.nu),
        "coefficients": [json_f64(a[0]), json_f64(a[1]), json_f64(a[2]), json_f64(a[3])],
        "g2_zero": json_f64(g2_zero),
        "antibunched": g2_zero < 1.0,
        "max": {"gamma_tau": json_f64(tau_max), "g2": json_f64(g2_max)},
        "first_crossing_of_one_after_max": crossing.map_or(serde_json::Value::Null, json_f64),
        "beat_averaged_at_max": json_f64(g2_analytic(&p, tau_max, false)?),
        "overlay": overlay_summary,
    });
    let report_path = cfg.out.join("g2_report.json");
    write_report(&report_path, &report)?;
    files.push(report_path);
    Ok(Outcome { files, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// The strong-beat setting: g²(0) ≈ 0.648, maximum 1.4317 at γτ = 0.3549,
    /// and the beat-averaged curve within a percent of 1 at γτ = 0.5401.
    #[test]
    fn landmark_report_matches_the_frozen_strong_beat_values() {
        let dir = tempfile::tempdir().expect("tempdir");
        let cfg = RunConfig {
            p3: vec![0.247],
            times: vec![0.0, 0.3549, 0.5401],
            out: dir.path().to_path_buf(),
            ..RunConfig::default()
        };
        let outcome = run(&cfg).expect("run");
        let r = &outcome.report;
        assert_abs_diff_eq!(r["g2_zero"].as_f64().expect("g2_zero"), 0.6477732793522267, epsilon = 1e-12);
        assert_eq!(r["antibunched"], serde_json::Value::Bool(true));
        assert_abs_diff_eq!(r["max"]["gamma_tau"].as_f64().expect("tau"), 0.354871, epsilon = 2e-5);
        assert_abs_diff_eq!(r["max"]["g2"].as_f64().expect("max"), 1.431682, epsilon = 1e-4);
        let crossing = r["first_crossing_of_one_after_max"].as_f64().expect("crossing exists");
        assert!(crossing > 0.354871 && crossing < 0.5402, "beat-on series returns to 1 between the maximum and the averaged crossing, got {crossing}");
        assert_relative_eq!(
            g2_analytic(&effective_params(&SystemParams::from_p3(0.247, 500.0).expect("sys")).expect("p"), 0.5401, false).expect("avg"),
            1.0,
            epsilon = 1e-2,
        );

        // The τ-series files carry exactly the requested delays.
        let text = std::fs::read_to_string(&outcome.files[0]).expect("beat-on CSV");
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows[0], "gamma_tau,g2");
        assert_eq!(rows.len(), 1 + 3);
        assert!(rows[1].starts_with("0.0000000000000000e0,6.4777327935222"));
    }

    /// Weak drive bunches: at p₃ = 0.005 the coefficients give exactly
    /// g²(0) = 1 + a₁ + a₃ + a₄ = 32.
    #[test]
    fn weak_drive_reports_bunching() {
        let dir = tempfile::tempdir().expect("tempdir");
        let cfg = RunConfig {
            p3: vec![0.005],
            times: vec![0.0, 0.1],
            out: dir.path().to_path_buf(),
            ..RunConfig::default()
        };
        let outcome = run(&cfg).expect("run");
        assert_abs_diff_eq!(outcome.report["g2_zero"].as_f64().expect("g2_zero"), 32.0, epsilon = 1e-9);
        assert_eq!(outcome.report["antibunched"], serde_json::Value::Bool(false));
    }

    /// The overlay propagates the full model at the same delays and lands in
    /// the same range as the closed form (they agree on bunching character,
    /// not to high precision at finite g/γ).
    #[test]
    fn full_model_overlay_is_produced_on_request() {
        let dir = tempfile::tempdir().expect("tempdir");
        let cfg = RunConfig {
            p3: vec![0.247],
            times: vec![0.0, 0.05, 0.1],
            n_max: 10,
            g2_numeric_overlay: true,
            out: dir.path().to_path_buf(),
            ..RunConfig::default()
        };
        let outcome = run(&cfg).expect("run");
        assert_eq!(outcome.files.len(), 4, "beat-on, beat-averaged, overlay, report");
        let overlay_zero = outcome.report["overlay"]["g2_zero"].as_f64().expect("overlay g2(0)");
        assert!((0.4..1.0).contains(&overlay_zero), "full-model g²(0) is antibunched, got {overlay_zero}");
        let text = std::fs::read_to_string(&outcome.files[2]).expect("overlay CSV");
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 1 + 3);
    }

    /// Requesting several drive settings at once is an error for this command.
    #[test]
    fn multiple_drive_settings_are_rejected() {
        let dir = tempfile::tempdir().expect("tempdir");
        let cfg = RunConfig {
            p3: vec![0.1, 0.2],
            out: dir.path().to_path_buf(),
            ..RunConfig::default()
        };
        assert!(run(&cfg).is_err());
    }
}
