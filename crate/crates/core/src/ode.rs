//! Adaptive embedded Runge–Kutta integration for complex linear (and mildly
//! nonlinear) systems.
//!
//! The integrator is the Dormand–Prince 4(5) pair with FSAL: the fifth-order
//! solution propagates, the embedded fourth-order solution drives the step-size
//! controller. This order class resolves the fast coherent scales of the driven
//! JC problem (detunings and beats up to ~2g above the decay rates) without the
//! cost of an implicit method; all generators used in this crate are bounded
//! matrices, so stability is governed by the spectral radius rather than true
//! stiffness.
//!
//! State vectors are complex. The error norm is the usual componentwise scaled
//! RMS norm with absolute and relative tolerances applied to complex magnitudes.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerances and guards for one integration run.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Relative tolerance per step.
    pub rtol: f64,
    /// Absolute tolerance per step.
    pub atol: f64,
    /// Initial step size; chosen automatically when `None`.
    pub h_init: Option<f64>,
    /// Step-size floor relative to the integration span; crossing it aborts
    /// with a stiffness failure.
    pub h_min_frac: f64,
    /// Hard cap on accepted + rejected steps.
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-8,
            atol: 1e-10,
            h_init: None,
            h_min_frac: 1e-14,
            max_steps: 50_000_000,
        }
    }
}

impl OdeOptions {
    /// Options with the given tolerances and defaults elsewhere.
    pub fn with_tol(rtol: f64, atol: f64) -> Self {
        OdeOptions {
            rtol,
            atol,
            ..OdeOptions::default()
        }
    }
}

// Dormand–Prince 4(5) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights (equal to the last tableau row: FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Embedded fourth-order weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `dy/dt = f(t, y)` from `t0` to each time in `times` (strictly
/// ascending, all ≥ `t0`) and return the state at every requested time.
///
/// The derivative callback writes into its third argument. Steps are clamped so
/// every output time is hit exactly; no interpolation is involved.
pub fn integrate_sequence<F>(
    mut f: F,
    t0: f64,
    y0: &Array1<C64>,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Array1<C64>>>
where
    F: FnMut(f64, &Array1<C64>, &mut Array1<C64>),
{
    if times.is_empty() {
        return Ok(Vec::new());
    }
    let ascending = times.windows(2).all(|w| w[0] < w[1]);
    if !ascending || times[0] < t0 {
        return Err(Error::InvalidParameter(
            "output times must be strictly ascending and start at or after t0".into(),
        ));
    }

    let n = y0.len();
    let span = (times[times.len() - 1] - t0).max(f64::MIN_POSITIVE);
    let h_floor = span * opts.h_min_frac;

    let mut t = t0;
    let mut y = y0.clone();
    let mut out = Vec::with_capacity(times.len());

    let mut k: Vec<Array1<C64>> = (0..7).map(|_| Array1::zeros(n)).collect();
    let mut y_stage = Array1::<C64>::zeros(n);
    let mut y5 = Array1::<C64>::zeros(n);

    // FSAL: k[0] at the current point is valid across accepted steps.
    f(t, &y, &mut k[0]);
    let mut h = opts.h_init.unwrap_or_else(|| initial_step(&y, &k[0], span, opts));

    let mut steps = 0usize;
    for &t_target in times {
        while t < t_target {
            if steps >= opts.max_steps {
                return Err(Error::Stiffness { t });
            }
            steps += 1;
            let h_try = h.min(t_target - t);

            // Stages 2..7.
            for s in 1..7 {
                y_stage.assign(&y);
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = if s < 6 { A[s - 1][j] } else { B5[j] };
                    if a != 0.0 {
                        let w = C64::new(a * h_try, 0.0);
                        y_stage.zip_mut_with(kj, |ys, kv| *ys += w * kv);
                    }
                }
                let (ts, buf) = (t + C[s] * h_try, &mut k[s]);
                f(ts, &y_stage, buf);
            }
            // k[6] was evaluated at y5 (the last stage IS the 5th-order result).
            y5.assign(&y);
            for (j, kj) in k.iter().enumerate() {
                if B5[j] != 0.0 {
                    let w = C64::new(B5[j] * h_try, 0.0);
                    y5.zip_mut_with(kj, |ys, kv| *ys += w * kv);
                }
            }

            // Scaled RMS of the 5th/4th difference.
            let mut err_sq = 0.0;
            for i in 0..n {
                let mut e = C64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate() {
                    let db = B5[j] - B4[j];
                    if db != 0.0 {
                        e += C64::new(db * h_try, 0.0) * kj[i];
                    }
                }
                let scale = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
                let r = e.norm() / scale;
                err_sq += r * r;
            }
            let mut err = (err_sq / n as f64).sqrt();
            if !err.is_finite() {
                // Overflowed stage: treat as a maximally failed step.
                err = f64::INFINITY;
            }

            if err <= 1.0 {
                t += h_try;
                std::mem::swap(&mut y, &mut y5);
                // FSAL: the 7th stage is f at the accepted point.
                k.swap(0, 6);
            }

            let factor = if err > 0.0 {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            h = (h_try * factor).max(h_floor);
            if h <= h_floor && err > 1.0 {
                return Err(Error::Stiffness { t });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// Integrate to a single end time and return the final state.
pub fn integrate_to<F>(
    f: F,
    t0: f64,
    y0: &Array1<C64>,
    t_end: f64,
    opts: &OdeOptions,
) -> Result<Array1<C64>>
where
    F: FnMut(f64, &Array1<C64>, &mut Array1<C64>),
{
    if t_end == t0 {
        return Ok(y0.clone());
    }
    let mut states = integrate_sequence(f, t0, y0, &[t_end], opts)?;
    Ok(states.pop().expect("one output time requested"))
}

/// Conservative automatic initial step from the derivative magnitude.
fn initial_step(y: &Array1<C64>, dy: &Array1<C64>, span: f64, opts: &OdeOptions) -> f64 {
    let ny = norm2(y);
    let nd = norm2(dy);
    let h = if nd > 1e-300 {
        0.01 * (ny.max(opts.atol) / nd).max(1e-300)
    } else {
        span * 1e-3
    };
    h.min(span).max(span * 1e-12) * opts.rtol.powf(0.2).max(1e-3)
}

fn norm2(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
