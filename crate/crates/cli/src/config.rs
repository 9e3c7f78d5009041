//! Run configuration: a flat key–value file (TOML syntax) merged with
//! command-line overrides, validated once, and hashed so every output file can
//! state exactly which inputs produced it.
//!
//! The drive is specified either as upper-level occupations `p3` (each in
//! [0, 1/4)) or as drive amplitudes `eps_d` in units of γ — exactly one of the
//! two lists may be non-empty. All other keys have defaults, so an empty file
//! (or no file at all) is a valid starting point. Command-line flags override
//! file values field by field; validation runs on the merged result.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use jcps_core::effective_model::effective_params;
use jcps_core::master_equation::SystemParams;
use jcps_core::phasespace::PhaseGrid;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Rectangular sampling window `xmin,xmax,ymin,ymax,nx,ny` for phase-space
/// fields, in the textual form used both in config files and on the command
/// line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// Symmetric square window [−r, r]² with n samples per axis.
    pub fn centered(r: f64, n: usize) -> Self {
        GridSpec { x_min: -r, x_max: r, y_min: -r, y_max: r, nx: n, ny: n }
    }

    /// Convert into the evaluation grid, re-checking bounds and sample counts.
    pub fn to_phase_grid(self) -> Result<PhaseGrid> {
        PhaseGrid::new(self.x_min, self.x_max, self.y_min, self.y_max, self.nx, self.ny)
            .with_context(|| format!("invalid grid `{self}`"))
    }
}

impl FromStr for GridSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            bail!("grid must be `xmin,xmax,ymin,ymax,nx,ny`, got `{s}`");
        }
        let f = |i: usize| -> Result<f64> {
            parts[i].parse::<f64>().with_context(|| format!("grid field {} (`{}`)", i + 1, parts[i]))
        };
        let n = |i: usize| -> Result<usize> {
            parts[i].parse::<usize>().with_context(|| format!("grid field {} (`{}`)", i + 1, parts[i]))
        };
        Ok(GridSpec { x_min: f(0)?, x_max: f(1)?, y_min: f(2)?, y_max: f(3)?, nx: n(4)?, ny: n(5)? })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            out,
            "{},{},{},{},{},{}",
            self.x_min, self.x_max, self.y_min, self.y_max, self.nx, self.ny
        )
    }
}

/// Effective parameters of one invocation after merging file and flags.
///
/// Field meanings:
/// * `p3` — upper-level occupations to run, each in [0, 1/4).
/// * `eps_d` — drive amplitudes in units of γ (alternative to `p3`).
/// * `g_over_gamma` — coupling in units of γ.
/// * `grid` — phase-space window as `xmin,xmax,ymin,ymax,nx,ny`; commands fall
///   back to a window suited to their observable when unset.
/// * `times` — command-specific time list (γτ for dissipative commands, gt for
///   the conservative one).
/// * `n_max` — Fock-space truncation for full-model runs.
/// * `alpha0`, `n_trunc`, `inset_times`, `trace_step` — conservative-run
///   controls: drive-to-coupling ratio, series truncation, snapshot times, and
///   photon-trace resolution.
/// * `g2_numeric_overlay` — also propagate the full model alongside the
///   closed-form correlation series.
/// * `seed` — seed for the randomized point sets used in cross-checks.
/// * `out` — output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub p3: Vec<f64>,
    pub eps_d: Vec<f64>,
    pub g_over_gamma: f64,
    pub grid: Option<String>,
    pub times: Vec<f64>,
    pub n_max: usize,
    pub alpha0: f64,
    pub n_trunc: usize,
    pub inset_times: Vec<f64>,
    pub trace_step: f64,
    pub g2_numeric_overlay: bool,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p3: Vec::new(),
            eps_d: Vec::new(),
            g_over_gamma: 500.0,
            grid: None,
            times: Vec::new(),
            n_max: 30,
            alpha0: 3.0_f64.sqrt(),
            n_trunc: 30,
            inset_times: vec![230.67, 249.3],
            trace_step: 0.05,
            g2_numeric_overlay: false,
            seed: 7,
            out: PathBuf::from("out"),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub p3: Option<Vec<f64>>,
    pub eps_d: Option<Vec<f64>>,
    pub g_over_gamma: Option<f64>,
    pub grid: Option<String>,
    pub times: Option<Vec<f64>>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Read the file (when given), apply overrides, validate.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read config `{}`", p.display()))?;
                toml::from_str(&text).with_context(|| format!("cannot parse config `{}`", p.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = &overrides.p3 {
            cfg.p3 = v.clone();
        }
        if let Some(v) = &overrides.eps_d {
            cfg.eps_d = v.clone();
        }
        if let Some(v) = overrides.g_over_gamma {
            cfg.g_over_gamma = v;
        }
        if let Some(v) = &overrides.grid {
            cfg.grid = Some(v.clone());
        }
        if let Some(v) = &overrides.times {
            cfg.times = v.clone();
        }
        if let Some(v) = overrides.n_max {
            cfg.n_max = v;
        }
        if let Some(v) = overrides.seed {
            cfg.seed = v;
        }
        if let Some(v) = &overrides.out {
            cfg.out = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Check every invariant the commands rely on.
    pub fn validate(&self) -> Result<()> {
        if !self.p3.is_empty() && !self.eps_d.is_empty() {
            bail!("give the drive either as p3 or as eps_d, not both");
        }
        if !(self.g_over_gamma.is_finite() && self.g_over_gamma > 0.0) {
            bail!("g_over_gamma must be positive and finite, got {}", self.g_over_gamma);
        }
        for &p in &self.p3 {
            if !(p.is_finite() && (0.0..0.25).contains(&p)) {
                bail!("each p3 must lie in [0, 1/4), got {p}");
            }
        }
        for &e in &self.eps_d {
            if !(e.is_finite() && e > 0.0) {
                bail!("each eps_d must be positive and finite, got {e}");
            }
        }
        for &t in &self.times {
            if !(t.is_finite() && t >= 0.0) {
                bail!("times must be finite and non-negative, got {t}");
            }
        }
        if self.n_max < 2 {
            bail!("n_max must be at least 2, got {}", self.n_max);
        }
        if !(self.alpha0.is_finite() && self.alpha0 >= 0.0) {
            bail!("alpha0 must be non-negative and finite, got {}", self.alpha0);
        }
        if self.n_trunc == 0 {
            bail!("n_trunc must be at least 1");
        }
        if !(self.trace_step.is_finite() && self.trace_step > 0.0) {
            bail!("trace_step must be positive and finite, got {}", self.trace_step);
        }
        for &t in &self.inset_times {
            if !(t.is_finite() && t >= 0.0) {
                bail!("inset_times must be finite and non-negative, got {t}");
            }
        }
        if let Some(g) = &self.grid {
            g.parse::<GridSpec>()?;
        }
        Ok(())
    }

    /// The occupations to run: `p3` as given, or each `eps_d` converted
    /// through the dressed-cascade relation at this `g_over_gamma`.
    pub fn drive_p3s(&self) -> Result<Vec<f64>> {
        if !self.p3.is_empty() {
            return Ok(self.p3.clone());
        }
        if self.eps_d.is_empty() {
            bail!("a drive is required: set p3 or eps_d");
        }
        self.eps_d
            .iter()
            .map(|&eps| {
                let sys = SystemParams::two_photon_resonant(self.g_over_gamma, 0.5, eps)
                    .with_context(|| format!("eps_d = {eps}"))?;
                let p = effective_params(&sys).with_context(|| format!("eps_d = {eps}"))?;
                if p.p3 >= 0.25 {
                    bail!("eps_d = {eps} drives the cascade outside its validity (p3 = {} ≥ 1/4)", p.p3);
                }
                Ok(p.p3)
            })
            .collect()
    }

    /// The configured grid, or the command's fallback window [−r, r]² with n
    /// samples per axis.
    pub fn phase_grid_or(&self, r: f64, n: usize) -> Result<PhaseGrid> {
        match &self.grid {
            Some(g) => g.parse::<GridSpec>()?.to_phase_grid(),
            None => Ok(PhaseGrid::centered(r, n)?),
        }
    }

    /// SHA-256 of the canonical serialized form of the merged config. Stable
    /// across runs and platforms; written into every output header so results
    /// can be traced to their exact inputs.
    pub fn config_hash(&self) -> String {
        let canonical = toml::to_string(self).expect("a validated config always serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest {
            use fmt::Write;
            write!(hex, "{byte:02x}").expect("writing to a String cannot fail");
        }
        hex
    }
}
