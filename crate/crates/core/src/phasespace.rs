//! Phase-space representations of cavity states: Wigner and Husimi-Q
//! distributions on grids, their moments, extrema, and negativity regions.
//!
//! The Wigner function is evaluated through the displaced-parity form
//!
//! ```text
//! W(α) = (2/π) tr[ρ D(2α) P],   P = (−1)^{a†a},
//! ```
//!
//! which is mathematically equivalent to the Fourier transform of the
//! symmetrically-ordered characteristic function χ_S but exact for states of
//! finite Fock support: the displacement matrix elements ⟨m|D(β)|n⟩ follow
//! from the closed recurrence seeded by the coherent column ⟨m|D(β)|0⟩, and
//! no quadrature or windowing enters. The defining χ_S integral is retained
//! in the tests as a slow cross-check. The Husimi function is the coherent
//! expectation Q(α) = ⟨α|ρ|α⟩/π, a Gaussian smoothing of W.
//!
//! Moments over a gridded Wigner field use the symmetric-ordering rule: the
//! |α|² moment equals ⟨a†a⟩ + 1/2, which serves as a consistency check
//! between the algebra and the quadrature.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operators::CavityDensityMatrix;

const ZERO: C64 = C64::new(0.0, 0.0);
const PI: f64 = std::f64::consts::PI;

/// Uniform rectangular grid in the phase plane α = x + iy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGrid {
    /// Lower x bound.
    pub x_min: f64,
    /// Upper x bound.
    pub x_max: f64,
    /// Lower y bound.
    pub y_min: f64,
    /// Upper y bound.
    pub y_max: f64,
    /// Samples along x (≥ 3).
    pub nx: usize,
    /// Samples along y (≥ 3).
    pub ny: usize,
}

impl PhaseGrid {
    /// Validated constructor: ordered finite bounds, at least 3 samples per
    /// axis.
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && y_min.is_finite() && y_max.is_finite()) {
            return Err(Error::InvalidParameter("grid bounds must be finite".into()));
        }
        if !(x_min < x_max && y_min < y_max) {
            return Err(Error::InvalidParameter(format!(
                "grid bounds must be ordered: [{x_min}, {x_max}] × [{y_min}, {y_max}]"
            )));
        }
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 3 samples per axis, got {nx}×{ny}"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max, nx, ny })
    }

    /// Square grid [−r, r]² with n samples per axis.
    pub fn centered(r: f64, n: usize) -> Result<Self> {
        Self::new(-r, r, -r, r, n, n)
    }

    /// x step.
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    /// y step.
    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny - 1) as f64
    }

    /// x coordinate of column `ix`.
    pub fn x_at(&self, ix: usize) -> f64 {
        self.x_min + ix as f64 * self.dx()
    }

    /// y coordinate of row `iy`.
    pub fn y_at(&self, iy: usize) -> f64 {
        self.y_min + iy as f64 * self.dy()
    }

    /// Phase-space point of the (ix, iy) node.
    pub fn point(&self, ix: usize, iy: usize) -> C64 {
        C64::new(self.x_at(ix), self.y_at(iy))
    }
}

/// Which quasiprobability a field holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Symmetrically-ordered (Wigner) distribution.
    Wigner,
    /// Antinormally-ordered (Husimi-Q) distribution.
    Husimi,
}

/// A quasiprobability sampled on a `PhaseGrid`; `values[(iy, ix)]` is the
/// value at (x_at(ix), y_at(iy)).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    /// Sample grid.
    pub grid: PhaseGrid,
    /// Samples, shape (ny, nx), row-major over y then x.
    pub values: Array2<f64>,
    /// Distribution type.
    pub kind: FieldKind,
}

/// A located extremum of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Refined phase-space position.
    pub position: C64,
    /// Refined field value.
    pub value: f64,
    /// Maximum or minimum.
    pub kind: ExtremumKind,
}

/// Extremum character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    /// Strict local maximum.
    Maximum,
    /// Strict local minimum.
    Minimum,
}

/// Result of a field moment: the quadrature value and whether the integrand
/// had decayed at the grid boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentResult {
    /// ∫ field(α) α*^k α^l d²α by trapezoidal quadrature.
    pub value: C64,
    /// True when the boundary samples are below 1e-8 of the field maximum;
    /// when false, the quadrature is missing weight outside the grid.
    pub boundary_decayed: bool,
}

/// Matrix elements ⟨m|D(β)|n⟩ of the displacement D(β) = exp(βa† − β*a) for
/// m, n < dim. Column 0 is the coherent state |β⟩; higher columns follow
/// from D a† = (a† − β*) D. Exact in the truncated block: the recurrence
/// never references indices ≥ dim.
fn displacement_elements(dim: usize, beta: C64) -> Array2<C64> {
    let mut d = Array2::from_elem((dim, dim), ZERO);
    let gauss = (-0.5 * beta.norm_sqr()).exp();
    d[(0, 0)] = C64::new(gauss, 0.0);
    for m in 1..dim {
        d[(m, 0)] = d[(m - 1, 0)] * beta / (m as f64).sqrt();
    }
    for n in 0..dim - 1 {
        for m in 0..dim {
            let raise = if m == 0 { ZERO } else { (m as f64).sqrt() * d[(m - 1, n)] };
            d[(m, n + 1)] = (raise - beta.conj() * d[(m, n)]) / ((n + 1) as f64).sqrt();
        }
    }
    d
}

/// Coefficients ⟨n|β⟩ = e^{−|β|²/2} βⁿ/√n! of a coherent state, up to `dim`.
fn coherent_coefficients(dim: usize, beta: C64) -> Vec<C64> {
    let mut c = vec![ZERO; dim];
    c[0] = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for n in 1..dim {
        c[n] = c[n - 1] * beta / (n as f64).sqrt();
    }
    c
}

/// Wigner function of `rho` at a phase-space point, via displaced parity:
/// W(α) = (2/π) Σ_{n,m} ρ_{nm} ⟨m|D(2α)|n⟩ (−1)ⁿ. Exact for the truncated
/// state (no quadrature error); real up to roundoff.
pub fn wigner(rho: &CavityDensityMatrix, point: C64) -> f64 {
    let dim = rho.dim();
    let d = displacement_elements(dim, 2.0 * point);
    let mut acc = ZERO;
    for n in 0..dim {
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        for m in 0..dim {
            acc += rho.entry(n, m) * d[(m, n)] * parity;
        }
    }
    debug_assert!(acc.im.abs() < 1e-10, "Wigner imaginary part {:.3e}", acc.im);
    2.0 / PI * acc.re
}

/// Husimi function Q(α) = ⟨α|ρ|α⟩/π ∈ [0, 1/π]. Exact for the truncated
/// state: only the first `dim` coherent coefficients enter.
pub fn husimi_q(rho: &CavityDensityMatrix, point: C64) -> f64 {
    let dim = rho.dim();
    let c = coherent_coefficients(dim, point);
    let mut acc = ZERO;
    for m in 0..dim {
        for n in 0..dim {
            acc += c[m].conj() * rho.entry(m, n) * c[n];
        }
    }
    debug_assert!(acc.im.abs() < 1e-12);
    acc.re / PI
}

/// Evaluate the chosen distribution of `rho` on every grid node.
pub fn evaluate_grid(rho: &CavityDensityMatrix, grid: &PhaseGrid, kind: FieldKind) -> PhaseField {
    evaluate_grid_fn(
        |p| match kind {
            FieldKind::Wigner => wigner(rho, p),
            FieldKind::Husimi => husimi_q(rho, p),
        },
        grid,
        kind,
    )
}

/// Build a field by sampling an arbitrary distribution function (used for
/// closed-form distributions that never materialize a density matrix).
pub fn evaluate_grid_fn<F: Fn(C64) -> f64>(f: F, grid: &PhaseGrid, kind: FieldKind) -> PhaseField {
    let mut values = Array2::zeros((grid.ny, grid.nx));
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            values[(iy, ix)] = f(grid.point(ix, iy));
        }
    }
    PhaseField { grid: *grid, values, kind }
}

impl PhaseField {
    /// Trapezoidal integral of the field over its grid.
    pub fn integral(&self) -> f64 {
        let mut acc = 0.0;
        for iy in 0..self.grid.ny {
            let wy = if iy == 0 || iy == self.grid.ny - 1 { 0.5 } else { 1.0 };
            for ix in 0..self.grid.nx {
                let wx = if ix == 0 || ix == self.grid.nx - 1 { 0.5 } else { 1.0 };
                acc += wx * wy * self.values[(iy, ix)];
            }
        }
        acc * self.grid.dx() * self.grid.dy()
    }

    /// Largest |value| over the grid.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }
}

/// Moment ∫ W(α) α*^k α^l d²α of a Wigner field by trapezoidal quadrature.
/// These are symmetrically-ordered operator averages; k = l = 1 returns
/// ⟨a†a⟩ + 1/2. Husimi fields are rejected (their moments obey the
/// antinormal rule and would silently disagree).
pub fn moment(field: &PhaseField, k: u32, l: u32) -> Result<MomentResult> {
    if field.kind != FieldKind::Wigner {
        return Err(Error::InvalidParameter(
            "moments are defined here for Wigner fields only; Husimi moments follow a different ordering rule".into(),
        ));
    }
    let g = &field.grid;
    let mut acc = ZERO;
    for iy in 0..g.ny {
        let wy = if iy == 0 || iy == g.ny - 1 { 0.5 } else { 1.0 };
        for ix in 0..g.nx {
            let wx = if ix == 0 || ix == g.nx - 1 { 0.5 } else { 1.0 };
            let alpha = g.point(ix, iy);
            acc += wx * wy * field.values[(iy, ix)] * alpha.conj().powu(k) * alpha.powu(l);
        }
    }
    acc *= g.dx() * g.dy();

    let max = field.max_abs();
    let mut boundary: f64 = 0.0;
    for ix in 0..g.nx {
        boundary = boundary
            .max(field.values[(0, ix)].abs())
            .max(field.values[(g.ny - 1, ix)].abs());
    }
    for iy in 0..g.ny {
        boundary = boundary
            .max(field.values[(iy, 0)].abs())
            .max(field.values[(iy, g.nx - 1)].abs());
    }
    Ok(MomentResult { value: acc, boundary_decayed: boundary < 1e-8 * max })
}

/// Locate strict local extrema (8-neighborhood, interior nodes only) and
/// refine each by a least-squares quadratic fit over its 3×3 neighborhood;
/// the refinement shift is clamped to one cell. Sorted by |value| descending.
pub fn find_extrema(field: &PhaseField) -> Vec<Extremum> {
    let g = &field.grid;
    let v = &field.values;
    let mut out = Vec::new();
    for iy in 1..g.ny - 1 {
        for ix in 1..g.nx - 1 {
            let c = v[(iy, ix)];
            let mut above = 0;
            let mut below = 0;
            for (du, dv) in [(-1i64, -1i64), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)] {
                let n = v[((iy as i64 + dv) as usize, (ix as i64 + du) as usize)];
                if c > n {
                    above += 1;
                } else if c < n {
                    below += 1;
                }
            }
            let kind = if above == 8 {
                ExtremumKind::Maximum
            } else if below == 8 {
                ExtremumKind::Minimum
            } else {
                continue;
            };

            // Least-squares fit of a + bu + cv + du² + euv + fv² on the 3×3
            // stencil (u, v ∈ {−1, 0, 1} in cell units).
            let (mut s0, mut s1, mut s2, mut sb, mut sc, mut se) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for dv in -1i64..=1 {
                for du in -1i64..=1 {
                    let f = v[((iy as i64 + dv) as usize, (ix as i64 + du) as usize)];
                    let (u, w) = (du as f64, dv as f64);
                    s0 += f;
                    s1 += f * u * u;
                    s2 += f * w * w;
                    sb += f * u;
                    sc += f * w;
                    se += f * u * w;
                }
            }
            let b = sb / 6.0;
            let cc = sc / 6.0;
            let e = se / 4.0;
            let dpg = 0.5 * (s1 + s2 - 4.0 / 3.0 * s0);
            let dmg = 0.5 * (s1 - s2);
            let dq = 0.5 * (dpg + dmg);
            let gq = 0.5 * (dpg - dmg);
            let a = (s0 - 6.0 * (dq + gq)) / 9.0;
            let det = 4.0 * dq * gq - e * e;
            let (mut u, mut w) = if det.abs() < 1e-300 {
                (0.0, 0.0)
            } else {
                ((-2.0 * gq * b + e * cc) / det, (-2.0 * dq * cc + e * b) / det)
            };
            u = u.clamp(-1.0, 1.0);
            w = w.clamp(-1.0, 1.0);
            let value = a + b * u + cc * w + dq * u * u + e * u * w + gq * w * w;
            out.push(Extremum {
                position: C64::new(g.x_at(ix) + u * g.dx(), g.y_at(iy) + w * g.dy()),
                value,
                kind,
            });
        }
    }
    out.sort_by(|p, q| q.value.abs().partial_cmp(&p.value.abs()).unwrap());
    out
}

/// Minimum field value and the quadrature area of the region where the field
/// is negative (node count × cell area).
pub fn negativity(field: &PhaseField) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut count = 0usize;
    for &v in field.values.iter() {
        min = min.min(v);
        if v < 0.0 {
            count += 1;
        }
    }
    (min, count as f64 * field.grid.dx() * field.grid.dy())
}

/// Write a field as CSV: a `x,y,value` header then one row per node,
/// row-major over y then x, 17 significant digits.
pub fn write_csv<W: std::io::Write>(field: &PhaseField, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "x,y,value")?;
    for iy in 0..field.grid.ny {
        for ix in 0..field.grid.nx {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                field.grid.x_at(ix),
                field.grid.y_at(iy),
                field.values[(iy, ix)]
            )?;
        }
    }
    Ok(())
}
