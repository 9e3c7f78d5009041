//! Full driven dissipative Jaynes–Cummings model: Liouvillian construction,
//! steady-state solve, time propagation, cavity reduction, and intensity
//! correlations.
//!
//! The Hamiltonian is taken in the frame rotating at the drive frequency ω_d,
//! where it is time-independent (ħ = 1, Δω_d = ω_d − ω₀):
//!
//! ```text
//! H = −Δω_d (σ₊σ₋ + a†a) + g (a σ₊ + a† σ₋) + (ε_d* a + ε_d a†)
//! ```
//!
//! Dissipation is Lindblad-form photon loss at rate 2κ and spontaneous
//! emission at rate γ:
//!
//! ```text
//! ρ̇ = −i[H, ρ] + κ(2aρa† − a†aρ − ρa†a) + (γ/2)(2σ₋ρσ₊ − σ₊σ₋ρ − ρσ₊σ₋)
//! ```
//!
//! All rates are expressed in units of a common reference rate (γ in the
//! regime studied here), times in the inverse unit. This module is the
//! numerical oracle against which the closed forms of `effective_model` are
//! checked.
//!
//! Density matrices are vectorized column-major, so a map ρ ↦ AρB becomes
//! the matrix Bᵀ ⊗ A on the stacked columns. The Liouvillian is stored
//! sparse (CSR) above composite dimension 16 and dense below; the steady
//! state comes from a constrained linear solve in which one row of the
//! generator is replaced by the vectorized trace functional.

use ndarray::{Array1, Array2};
use ndarray_linalg::{FactorizeInto, Solve};
use num_complex::Complex64 as C64;

use crate::effective_model::FourLevelDensityMatrix;
use crate::error::{Error, Result};
use crate::ode::{integrate_sequence, OdeOptions};
use crate::operators::{
    annihilation, atomic_lowering, atomic_raising, creation, dressed_state, outer,
    CavityDensityMatrix, FockSpace, Operator, StateVector,
};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const IM: C64 = C64::new(0.0, 1.0);

/// Hermiticity and trace tolerance for state validation.
const STATE_TOL: f64 = 1e-10;
/// Most negative admissible eigenvalue of a state.
const EIG_FLOOR: f64 = -1e-8;
/// Residual bound for the steady-state solve.
const RESIDUAL_TOL: f64 = 1e-9;
/// Composite dimension below which the superoperator is stored dense.
const DENSE_LIMIT: usize = 16;

/// Physical rates of the driven Jaynes–Cummings system, all in units of a
/// common reference rate (conventionally γ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Atom–cavity coupling rate g.
    pub g: f64,
    /// Cavity field decay rate κ (the photon loss rate is 2κ).
    pub kappa: f64,
    /// Atomic spontaneous emission rate γ.
    pub gamma: f64,
    /// Complex drive amplitude ε_d.
    pub eps_d: C64,
    /// Drive–cavity detuning Δω_d = ω_d − ω₀.
    pub delta_omega_d: f64,
}

impl SystemParams {
    /// Validated constructor; rates must be finite and non-negative.
    pub fn new(g: f64, kappa: f64, gamma: f64, eps_d: C64, delta_omega_d: f64) -> Result<Self> {
        for (name, v) in [("g", g), ("kappa", kappa), ("gamma", gamma)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and ≥ 0, got {v}"
                )));
            }
        }
        if !eps_d.is_finite() || !delta_omega_d.is_finite() {
            return Err(Error::InvalidParameter(
                "drive amplitude and detuning must be finite".into(),
            ));
        }
        Ok(Self { g, kappa, gamma, eps_d, delta_omega_d })
    }

    /// Parameters tuned to the two-photon resonance: γ = 2κ and the drive
    /// detuned to Δω_d = −g/√2 − √2 ε_d²/g, which compensates the
    /// drive-induced level shifts of the ξ₀ → ξ₃ transition.
    pub fn two_photon_resonant(g: f64, kappa: f64, eps_d: f64) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "two-photon resonance requires g > 0, got {g}"
            )));
        }
        let detuning = crate::effective_model::two_photon_detuning_from(g, eps_d * eps_d);
        Self::new(g, kappa, 2.0 * kappa, C64::new(eps_d, 0.0), detuning)
    }

    /// Two-photon-resonant parameters in units of γ (γ = 1, κ = 1/2), with
    /// the drive amplitude chosen so the upper-level excitation probability
    /// equals `p3`.
    pub fn from_p3(p3: f64, g_over_gamma: f64) -> Result<Self> {
        let eps = crate::effective_model::epsilon_from_p3(p3, g_over_gamma, 1.0)?;
        Self::two_photon_resonant(g_over_gamma, 0.5, eps)
    }

    /// Whether γ = 2κ holds to relative precision 1e-12 (the regime in which
    /// the cascade rates of `effective_model` are quoted).
    pub fn is_gamma_twice_kappa(&self) -> bool {
        (self.gamma - 2.0 * self.kappa).abs() <= 1e-12 * self.gamma.abs().max(1.0)
    }
}

/// Compressed-sparse-row complex matrix (square).
#[derive(Debug, Clone)]
struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    /// Build from (row, col, value) triplets; duplicates are summed, exact
    /// zeros dropped.
    fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut rows_seen: Vec<usize> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if let (Some(&lr), Some(&lc)) = (rows_seen.last(), col_idx.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows_seen.push(r);
            col_idx.push(c);
            vals.push(v);
        }
        // Drop entries that cancelled exactly.
        let mut k = 0;
        for i in 0..vals.len() {
            if vals[i] != ZERO {
                rows_seen[k] = rows_seen[i];
                col_idx[k] = col_idx[i];
                vals[k] = vals[i];
                k += 1;
            }
        }
        rows_seen.truncate(k);
        col_idx.truncate(k);
        vals.truncate(k);
        for &r in &rows_seen {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { n, row_ptr, col_idx, vals }
    }

    fn matvec(&self, x: &Array1<C64>, out: &mut Array1<C64>) {
        for r in 0..self.n {
            let mut acc = ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.col_idx[k]];
            }
            out[r] = acc;
        }
    }
}

enum Storage {
    Dense(Array2<C64>),
    Sparse(Csr),
}

/// Linear generator acting on vectorized density matrices of a composite
/// space of Hilbert dimension `dim`.
pub struct Superoperator {
    hilbert_dim: usize,
    storage: Storage,
}

impl Superoperator {
    /// Composite Hilbert dimension d (the generator is d² × d²).
    pub fn dim(&self) -> usize {
        self.hilbert_dim
    }

    /// Whether the generator is held in sparse storage.
    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    /// Apply to the vectorized state, writing into `out`.
    fn apply_vec(&self, x: &Array1<C64>, out: &mut Array1<C64>) {
        match &self.storage {
            Storage::Dense(m) => ndarray::linalg::general_mat_vec_mul(ONE, m, x, ZERO, out),
            Storage::Sparse(c) => c.matvec(x, out),
        }
    }

    /// Apply to a density-matrix-shaped operand: returns L(ρ) as a matrix.
    pub fn apply(&self, rho: &Array2<C64>) -> Result<Array2<C64>> {
        let d = self.hilbert_dim;
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: rho.nrows() });
        }
        let x = vectorize(rho);
        let mut out = Array1::zeros(d * d);
        self.apply_vec(&x, &mut out);
        Ok(devectorize(&out, d))
    }

    /// Densified d² × d² matrix of the generator.
    fn to_dense(&self) -> Array2<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(c) => {
                let mut m = Array2::from_elem((c.n, c.n), ZERO);
                for r in 0..c.n {
                    for k in c.row_ptr[r]..c.row_ptr[r + 1] {
                        m[(r, c.col_idx[k])] += c.vals[k];
                    }
                }
                m
            }
        }
    }
}

/// Column-major vec index of matrix element (row, col).
#[inline]
fn vid(d: usize, row: usize, col: usize) -> usize {
    col * d + row
}

fn vectorize(m: &Array2<C64>) -> Array1<C64> {
    let d = m.nrows();
    Array1::from_shape_fn(d * d, |idx| m[(idx % d, idx / d)])
}

fn devectorize(v: &Array1<C64>, d: usize) -> Array2<C64> {
    Array2::from_shape_fn((d, d), |(i, j)| v[vid(d, i, j)])
}

fn nonzeros(m: &Operator) -> Vec<(usize, usize, C64)> {
    let mut nz = Vec::new();
    for ((i, j), &v) in m.indexed_iter() {
        if v != ZERO {
            nz.push((i, j, v));
        }
    }
    nz
}

/// ρ ↦ Mρ contributions: kron(I, M).
fn add_left(triplets: &mut Vec<(usize, usize, C64)>, m: &Operator, d: usize) {
    for (i, k, v) in nonzeros(m) {
        for j in 0..d {
            triplets.push((vid(d, i, j), vid(d, k, j), v));
        }
    }
}

/// ρ ↦ ρM contributions: kron(Mᵀ, I).
fn add_right(triplets: &mut Vec<(usize, usize, C64)>, m: &Operator, d: usize) {
    for (l, j, v) in nonzeros(m) {
        for i in 0..d {
            triplets.push((vid(d, i, j), vid(d, i, l), v));
        }
    }
}

/// ρ ↦ c·AρA† contributions: c·kron(conj(A), A).
fn add_sandwich(triplets: &mut Vec<(usize, usize, C64)>, a: &Operator, c: f64, d: usize) {
    let nz = nonzeros(a);
    let cw = C64::new(c, 0.0);
    for &(i, k, va) in &nz {
        for &(j, l, vb) in &nz {
            triplets.push((vid(d, i, j), vid(d, k, l), cw * va * vb.conj()));
        }
    }
}

/// Assemble the Lindblad generator for the given parameters on the given
/// truncated space.
pub fn build_liouvillian(params: &SystemParams, space: &FockSpace) -> Superoperator {
    let d = space.dim();
    let a = annihilation(space);
    let ad = creation(space);
    let sm = atomic_lowering(space);
    let sp = atomic_raising(space);
    let n_op = ad.dot(&a);
    let pop = sp.dot(&sm);

    let mut h = Array2::from_elem((d, d), ZERO);
    let det = C64::new(-params.delta_omega_d, 0.0);
    let g = C64::new(params.g, 0.0);
    h.zip_mut_with(&n_op, |hv, &v| *hv += det * v);
    h.zip_mut_with(&pop, |hv, &v| *hv += det * v);
    let jc = a.dot(&sp) + ad.dot(&sm);
    h.zip_mut_with(&jc, |hv, &v| *hv += g * v);
    h.zip_mut_with(&a, |hv, &v| *hv += params.eps_d.conj() * v);
    h.zip_mut_with(&ad, |hv, &v| *hv += params.eps_d * v);

    // No-jump part: −iH − κ a†a − (γ/2) σ₊σ₋ from the left, its mirror with
    // +iH from the right.
    let kap = C64::new(params.kappa, 0.0);
    let half_gamma = C64::new(0.5 * params.gamma, 0.0);
    let mut m_left = h.mapv(|z| -IM * z);
    let mut m_right = h.mapv(|z| IM * z);
    for m in [&mut m_left, &mut m_right] {
        m.zip_mut_with(&n_op, |mv, &v| *mv -= kap * v);
        m.zip_mut_with(&pop, |mv, &v| *mv -= half_gamma * v);
    }

    let mut triplets = Vec::new();
    add_left(&mut triplets, &m_left, d);
    add_right(&mut triplets, &m_right, d);
    add_sandwich(&mut triplets, &a, 2.0 * params.kappa, d);
    add_sandwich(&mut triplets, &sm, params.gamma, d);

    let storage = if d < DENSE_LIMIT {
        let mut m = Array2::from_elem((d * d, d * d), ZERO);
        for (r, c, v) in triplets {
            m[(r, c)] += v;
        }
        Storage::Dense(m)
    } else {
        Storage::Sparse(Csr::from_triplets(d * d, triplets))
    };
    Superoperator { hilbert_dim: d, storage }
}

/// Density matrix on the composite space, validated on construction:
/// Hermitian and unit-trace within 1e-10, minimum eigenvalue ≥ −1e-8.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: Array2<C64>,
}

impl DensityMatrix {
    /// Validated constructor.
    pub fn new(entries: Array2<C64>) -> Result<Self> {
        let d = entries.nrows();
        if entries.ncols() != d || d == 0 {
            return Err(Error::DimensionMismatch { expected: d, got: entries.ncols() });
        }
        let mut herm: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                herm = herm.max((entries[(i, j)] - entries[(j, i)].conj()).norm());
            }
        }
        if herm > STATE_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix not Hermitian: deviation {herm:.3e}"
            )));
        }
        let trace: C64 = (0..d).map(|i| entries[(i, i)]).sum();
        if (trace - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {trace} differs from 1"
            )));
        }
        let evals = crate::linalg::eigvalsh_hermitian(&entries)?;
        let min_eig = evals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < EIG_FLOOR {
            return Err(Error::InvalidParameter(format!(
                "density matrix not positive: eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(DensityMatrix { entries })
    }

    /// Projector |ψ⟩⟨ψ| onto a unit-norm pure state.
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParameter(format!(
                "pure state must have unit norm, got {norm}"
            )));
        }
        Self::new(outer(psi, psi))
    }

    /// Composite dimension.
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Matrix element ρ_{ij}.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    /// Full matrix view.
    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    /// ⟨a†a⟩ in the composite basis (index 2n + s carries photon number n).
    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim()).map(|i| (i / 2) as f64 * self.entries[(i, i)].re).sum()
    }

    /// Population ⟨ψ|ρ|ψ⟩ of a pure state on the same space.
    pub fn population(&self, psi: &StateVector) -> Result<f64> {
        let d = self.dim();
        if psi.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: psi.len() });
        }
        let mut acc = ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += psi[i].conj() * self.entries[(i, j)] * psi[j];
            }
        }
        Ok(acc.re)
    }
}

/// Solve L(ρ) = 0 for the unit-trace steady state by replacing one row of
/// the densified generator with the vectorized trace functional. Fails with
/// a kernel diagnostic when the residual exceeds 1e-9.
pub fn steady_state(liouvillian: &Superoperator) -> Result<DensityMatrix> {
    let d = liouvillian.dim();
    let n = d * d;
    let mut m = liouvillian.to_dense();
    for col in 0..n {
        m[(0, col)] = if col % (d + 1) == 0 { ONE } else { ZERO };
    }
    let mut rhs = Array1::from_elem(n, ZERO);
    rhs[0] = ONE;
    let lu = m
        .factorize_into()
        .map_err(|e| Error::Backend(format!("steady-state factorization: {e}")))?;
    let x = lu
        .solve_into(rhs)
        .map_err(|e| Error::Backend(format!("steady-state solve: {e}")))?;

    let raw = devectorize(&x, d);
    let mut rho = Array2::from_elem((d, d), ZERO);
    for i in 0..d {
        for j in 0..d {
            rho[(i, j)] = 0.5 * (raw[(i, j)] + raw[(j, i)].conj());
        }
    }
    let trace: C64 = (0..d).map(|i| rho[(i, i)]).sum();
    if trace.norm() < 1e-300 {
        return Err(Error::DegenerateKernel { residual: f64::INFINITY, tolerance: RESIDUAL_TOL });
    }
    rho.mapv_inplace(|z| z / trace);

    let v = vectorize(&rho);
    let mut resid = Array1::zeros(n);
    liouvillian.apply_vec(&v, &mut resid);
    let residual = resid.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if residual > RESIDUAL_TOL {
        return Err(Error::DegenerateKernel { residual, tolerance: RESIDUAL_TOL });
    }
    DensityMatrix::new(rho)
}

/// Propagate ρ(0) through the generator and return validated snapshots at
/// the requested times (ascending, starting at or after 0).
///
/// The default tolerances sit a decade below the state-validation floors:
/// the fast eigenmodes near ±2ig hold the stepper at its stability limit, so
/// a trajectory accumulates roughly (steps × per-step tolerance) of noise,
/// and the 1e-8-relative class would leave snapshots right at the positivity
/// floor. Use [`evolve_with`] to trade accuracy for speed explicitly.
pub fn evolve(
    liouvillian: &Superoperator,
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<Vec<DensityMatrix>> {
    evolve_with(liouvillian, rho0, times, &OdeOptions::with_tol(1e-9, 1e-12))
}

/// [`evolve`] with explicit integrator tolerances.
pub fn evolve_with(
    liouvillian: &Superoperator,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<DensityMatrix>> {
    let d = liouvillian.dim();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: rho0.dim() });
    }
    let y0 = vectorize(rho0.entries());
    let states = integrate_sequence(
        |_t, y, out| liouvillian.apply_vec(y, out),
        0.0,
        &y0,
        times,
        opts,
    )?;
    states
        .iter()
        .map(|v| DensityMatrix::new(hermitian_part(&devectorize(v, d))?))
        .collect()
}

/// Project onto the Hermitian subspace, which the exact flow preserves;
/// summation-order roundoff across ~1e4 stability-limited steps leaves an
/// asymmetry of order 1e-10 that carries no information. An asymmetry above
/// the noise budget indicates a broken generator and is an error.
fn hermitian_part(m: &Array2<C64>) -> Result<Array2<C64>> {
    let d = m.nrows();
    let mut asym: f64 = 0.0;
    let mut out = Array2::from_elem((d, d), ZERO);
    for i in 0..d {
        for j in 0..d {
            asym = asym.max((m[(i, j)] - m[(j, i)].conj()).norm());
            out[(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)].conj());
        }
    }
    if asym > 1e-8 {
        return Err(Error::InvalidParameter(format!(
            "propagated state asymmetry {asym:.3e} exceeds the roundoff budget"
        )));
    }
    Ok(out)
}

/// Reduced cavity state: ρ_c ≡ ⟨+|ρ|+⟩ + ⟨−|ρ|−⟩ over the atom factor.
pub fn partial_trace_cavity(rho: &DensityMatrix) -> Result<CavityDensityMatrix> {
    let d = rho.dim();
    if d % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "composite dimension must be even, got {d}"
        )));
    }
    let nc = d / 2;
    let mut m = Array2::from_elem((nc, nc), ZERO);
    for i in 0..nc {
        for j in 0..nc {
            m[(i, j)] = rho.entry(2 * i, 2 * j) + rho.entry(2 * i + 1, 2 * j + 1);
        }
    }
    CavityDensityMatrix::new(m)
}

/// Unnormalized correlation seed a ρ a† and the mean photon number of ρ.
fn photon_emission_seed(rho: &DensityMatrix) -> (Array2<C64>, f64) {
    let d = rho.dim();
    let mut seed = Array2::from_elem((d, d), ZERO);
    for i in 0..d - 2 {
        let fi = (((i / 2) + 1) as f64).sqrt();
        for j in 0..d - 2 {
            let fj = (((j / 2) + 1) as f64).sqrt();
            seed[(i, j)] = fi * fj * rho.entry(i + 2, j + 2);
        }
    }
    (seed, rho.mean_photon_number())
}

/// g²(0) from the steady state directly: tr(a†a†aa ρ)/⟨a†a⟩², no
/// propagation (a†a†aa is diagonal with weights n(n−1)).
pub fn g2_at_zero(rho_ss: &DensityMatrix) -> Result<f64> {
    let nbar = rho_ss.mean_photon_number();
    if nbar <= 0.0 {
        return Err(Error::InvalidParameter(
            "g² undefined: steady state holds no photons".into(),
        ));
    }
    let num: f64 = (0..rho_ss.dim())
        .map(|i| {
            let n = (i / 2) as f64;
            n * (n - 1.0) * rho_ss.entry(i, i).re
        })
        .sum();
    Ok(num / (nbar * nbar))
}

/// Normalized intensity correlation g²(τ) of the forwards-scattered light at
/// the given delays (ascending, ≥ 0), by the quantum regression procedure:
/// propagate a ρ_ss a†/⟨a†a⟩ under the same generator and read out ⟨a†a⟩.
pub fn g2_numeric(
    liouvillian: &Superoperator,
    rho_ss: &DensityMatrix,
    taus: &[f64],
) -> Result<Vec<f64>> {
    g2_numeric_with(liouvillian, rho_ss, taus, &OdeOptions::default())
}

/// [`g2_numeric`] with explicit integrator tolerances.
pub fn g2_numeric_with(
    liouvillian: &Superoperator,
    rho_ss: &DensityMatrix,
    taus: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<f64>> {
    let d = liouvillian.dim();
    if rho_ss.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: rho_ss.dim() });
    }
    let (mut seed, nbar) = photon_emission_seed(rho_ss);
    if nbar <= 0.0 {
        return Err(Error::InvalidParameter(
            "g² undefined: steady state holds no photons".into(),
        ));
    }
    seed.mapv_inplace(|z| z / nbar);
    let y0 = vectorize(&seed);
    let states = integrate_sequence(
        |_t, y, out| liouvillian.apply_vec(y, out),
        0.0,
        &y0,
        taus,
        opts,
    )?;
    Ok(states
        .iter()
        .map(|v| {
            (0..d)
                .map(|i| (i / 2) as f64 * v[vid(d, i, i)].re)
                .sum::<f64>()
                / nbar
        })
        .collect())
}

/// Embed a four-level dressed-basis state into the full composite space,
/// ρ = Σ_{jk} ρ_{jk} |ξ_j⟩⟨ξ_k| with the coherences ρ₁₂ and ρ₀₃.
pub fn embed_four_level(state: &FourLevelDensityMatrix, space: &FockSpace) -> Result<DensityMatrix> {
    state.validate()?;
    let d = space.dim();
    let xi: Vec<StateVector> = (0..4)
        .map(|k| dressed_state(space, k))
        .collect::<Result<_>>()?;
    let mut m = Array2::from_elem((d, d), ZERO);
    for (k, w) in [state.rho00, state.rho11, state.rho22, state.rho33]
        .into_iter()
        .enumerate()
    {
        let p = outer(&xi[k], &xi[k]);
        m.zip_mut_with(&p, |mv, &v| *mv += C64::new(w, 0.0) * v);
    }
    let c12 = outer(&xi[1], &xi[2]);
    m.zip_mut_with(&c12, |mv, &v| *mv += state.rho12 * v);
    let c21 = outer(&xi[2], &xi[1]);
    m.zip_mut_with(&c21, |mv, &v| *mv += state.rho12.conj() * v);
    let c03 = outer(&xi[0], &xi[3]);
    m.zip_mut_with(&c03, |mv, &v| *mv += state.rho03 * v);
    let c30 = outer(&xi[3], &xi[0]);
    m.zip_mut_with(&c30, |mv, &v| *mv += state.rho03.conj() * v);
    DensityMatrix::new(m)
}
