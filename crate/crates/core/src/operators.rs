//! Hilbert-space plumbing for one cavity mode coupled to one two-level emitter.
//!
//! The cavity factor is truncated at photon number `n_max` (dimension
//! `n_max + 1`); the composite space has dimension `2(n_max + 1)`. The basis
//! ordering is fixed once here and relied on by every partial trace and
//! embedding in the crate:
//!
//! ```text
//! index = 2 n + s,   s = 0 ≡ |−⟩ (atom ground),  s = 1 ≡ |+⟩ (atom excited)
//! ```
//!
//! so the photon number is the "slow" index. Operators carry no rates: they are
//! dimensionless matrices, and all physical rates live in the parameter structs
//! of the dynamics modules.
//!
//! Besides the ladder operators, this module builds the first four dressed
//! states of the JC ladder
//!
//! ```text
//! |ξ0⟩ = |0,−⟩                      |ξ1⟩ = (|1,−⟩ − |0,+⟩)/√2
//! |ξ2⟩ = (|1,−⟩ + |0,+⟩)/√2        |ξ3⟩ = (|2,−⟩ − |1,+⟩)/√2
//! ```
//!
//! (eigenstates of g(aσ₊ + a†σ₋) with eigenvalues 0, −g, +g, −√2 g), truncated
//! coherent states, and the displacement operator D(α₀) = exp[α₀(a† − a)],
//! which satisfies D†(α₀) a D(α₀) = a + α₀ and maps the vacuum to the coherent
//! state of amplitude +α₀. All constructors are deterministic pure functions of
//! value types and safe to share read-only across threads.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Complex matrix over the composite (or a bare cavity) Hilbert space.
pub type Operator = Array2<C64>;
/// Complex amplitude vector over the composite (or a bare cavity) space.
pub type StateVector = Array1<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Truncated Fock ⊗ two-level space descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    /// A space keeping photon numbers 0..=`n_max`. The two-photon physics
    /// needs at least the Fock states |0⟩, |1⟩, |2⟩, so `n_max ≥ 2`.
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_max must be at least 2, got {n_max}"
            )));
        }
        Ok(FockSpace { n_max })
    }

    /// Photon-number cutoff.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Dimension of the bare cavity factor, `n_max + 1`.
    pub fn cavity_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Dimension of the composite space, `2 (n_max + 1)`.
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    /// Composite basis index of |n, s⟩ with `excited = (s == +)`.
    pub fn index(&self, n: usize, excited: bool) -> usize {
        debug_assert!(n <= self.n_max);
        2 * n + usize::from(excited)
    }
}

/// Annihilation operator a ⊗ 1 on the composite space: a|n⟩ = √n |n−1⟩ on the
/// cavity factor, identity on the atom factor.
pub fn annihilation(space: &FockSpace) -> Operator {
    let d = space.dim();
    let mut a = Array2::from_elem((d, d), ZERO);
    for n in 1..=space.n_max() {
        let amp = C64::new((n as f64).sqrt(), 0.0);
        for s in [false, true] {
            a[(space.index(n - 1, s), space.index(n, s))] = amp;
        }
    }
    a
}

/// Creation operator a† ⊗ 1, the exact adjoint of [`annihilation`] as stored.
pub fn creation(space: &FockSpace) -> Operator {
    dagger(&annihilation(space))
}

/// Atomic lowering operator 1 ⊗ σ₋: σ₋|+⟩ = |−⟩, σ₋|−⟩ = 0.
pub fn atomic_lowering(space: &FockSpace) -> Operator {
    let d = space.dim();
    let mut sm = Array2::from_elem((d, d), ZERO);
    for n in 0..=space.n_max() {
        sm[(space.index(n, false), space.index(n, true))] = ONE;
    }
    sm
}

/// Atomic raising operator 1 ⊗ σ₊ = (1 ⊗ σ₋)†.
pub fn atomic_raising(space: &FockSpace) -> Operator {
    dagger(&atomic_lowering(space))
}

/// The k-th dressed state |ξ_k⟩, k ∈ {0, 1, 2, 3} (see module docs).
pub fn dressed_state(space: &FockSpace, k: usize) -> Result<StateVector> {
    let d = space.dim();
    let mut psi = Array1::from_elem(d, ZERO);
    let inv_sqrt2 = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match k {
        0 => psi[space.index(0, false)] = ONE,
        1 => {
            psi[space.index(1, false)] = inv_sqrt2;
            psi[space.index(0, true)] = -inv_sqrt2;
        }
        2 => {
            psi[space.index(1, false)] = inv_sqrt2;
            psi[space.index(0, true)] = inv_sqrt2;
        }
        3 => {
            psi[space.index(2, false)] = inv_sqrt2;
            psi[space.index(1, true)] = -inv_sqrt2;
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "dressed-state label must be 0..=3, got {k}"
            )))
        }
    }
    Ok(psi)
}

/// A truncated coherent state on the bare cavity factor.
pub struct CoherentState {
    /// Cavity-factor amplitudes (dimension `n_max + 1`), renormalized to unit
    /// norm after truncation.
    pub amplitudes: Array1<C64>,
    /// Norm of the raw truncated expansion before renormalization; `1 − this²`
    /// is the Poisson weight dropped at the cutoff.
    pub renormalization: f64,
    /// Set when `|α|² > n_max / 4`, i.e. the cutoff margin is uncomfortably
    /// small for downstream dynamics.
    pub heavy_truncation: bool,
}

/// Expand the coherent state of complex amplitude α into the truncated Fock
/// basis: c_n = e^{−|α|²/2} αⁿ/√n!, then renormalize.
pub fn coherent_state(space: &FockSpace, alpha: C64) -> CoherentState {
    let nf = space.cavity_dim();
    let mut c = Array1::from_elem(nf, ZERO);
    c[0] = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 1..nf {
        c[n] = c[n - 1] * alpha / C64::new((n as f64).sqrt(), 0.0);
    }
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        c.mapv_inplace(|z| z / norm);
    }
    CoherentState {
        amplitudes: c,
        renormalization: norm,
        heavy_truncation: alpha.norm_sqr() > space.n_max() as f64 / 4.0,
    }
}

/// Tensor a cavity-factor vector with an atom-factor vector ([c−, c+]) into a
/// composite state under the fixed `2n + s` ordering.
pub fn kron_state(cavity: &Array1<C64>, atom: [C64; 2]) -> StateVector {
    let mut psi = Array1::from_elem(2 * cavity.len(), ZERO);
    for (n, &cn) in cavity.iter().enumerate() {
        psi[2 * n] = cn * atom[0];
        psi[2 * n + 1] = cn * atom[1];
    }
    psi
}

/// Displacement operator D(α₀) = exp[α₀(a† − a)] ⊗ 1 on the composite space,
/// built by exponentiating the (anti-Hermitian) generator through the
/// eigendecomposition of −i α₀(a† − a).
///
/// Unitary up to truncation leakage near the cutoff; on the low-lying block it
/// satisfies D†(α₀) a D(α₀) = a + α₀ and D(α₀)|0⟩ = |α₀⟩ (coherent state of
/// amplitude +α₀).
pub fn displacement(space: &FockSpace, alpha0: f64) -> Result<Operator> {
    let nf = space.cavity_dim();
    // Hermitian generator h = −i α₀ (a† − a) on the cavity factor; D = e^{i h}.
    let mut h = Array2::from_elem((nf, nf), ZERO);
    for n in 1..nf {
        let g = alpha0 * (n as f64).sqrt();
        h[(n, n - 1)] = C64::new(0.0, -g);
        h[(n - 1, n)] = C64::new(0.0, g);
    }
    let (evals, evecs) = crate::linalg::eigh_hermitian(&h)?;
    // D_cav = V e^{i Λ} V†.
    let phases = Array1::from_iter(evals.iter().map(|&l| C64::new(0.0, l).exp()));
    let mut d_cav = Array2::from_elem((nf, nf), ZERO);
    for i in 0..nf {
        for j in 0..nf {
            let mut acc = ZERO;
            for k in 0..nf {
                acc += evecs[(i, k)] * phases[k] * evecs[(j, k)].conj();
            }
            d_cav[(i, j)] = acc;
        }
    }
    // Lift to the composite space: D ⊗ 1 under the 2n + s ordering.
    let dim = space.dim();
    let mut d = Array2::from_elem((dim, dim), ZERO);
    for i in 0..nf {
        for j in 0..nf {
            for s in [false, true] {
                d[(space.index(i, s), space.index(j, s))] = d_cav[(i, j)];
            }
        }
    }
    Ok(d)
}

/// Conjugate transpose.
pub fn dagger(m: &Operator) -> Operator {
    let mut out = m.t().to_owned();
    out.mapv_inplace(|z| z.conj());
    out
}

/// Expectation value ⟨ψ|A|ψ⟩ (real to rounding for Hermitian A).
pub fn expectation(op: &Operator, psi: &StateVector) -> Result<C64> {
    if op.nrows() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: op.nrows(),
            got: psi.len(),
        });
    }
    let apsi = op.dot(psi);
    Ok(psi.iter().zip(apsi.iter()).map(|(p, q)| p.conj() * q).sum())
}

/// Outer product |ψ⟩⟨φ|.
pub fn outer(psi: &StateVector, phi: &StateVector) -> Operator {
    let mut out = Array2::from_elem((psi.len(), phi.len()), ZERO);
    for i in 0..psi.len() {
        for j in 0..phi.len() {
            out[(i, j)] = psi[i] * phi[j].conj();
        }
    }
    out
}

/// Hermitian cavity-field density matrix over the truncated Fock basis.
///
/// Produced by the partial trace of the composite state or directly by the
/// four-level model's reduction; consumed by the phase-space transforms.
#[derive(Debug, Clone)]
pub struct CavityDensityMatrix {
    entries: Array2<C64>,
}

impl CavityDensityMatrix {
    /// Wrap a matrix, enforcing Hermiticity and unit trace at tolerance 1e-10.
    pub fn new(entries: Array2<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        let dm = CavityDensityMatrix { entries };
        dm.check_hermitian_trace(1e-10)?;
        Ok(dm)
    }

    fn check_hermitian_trace(&self, tol: f64) -> Result<()> {
        let m = &self.entries;
        let mut herm_dev: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                herm_dev = herm_dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if herm_dev > tol {
            return Err(Error::InvalidParameter(format!(
                "cavity matrix not Hermitian: deviation {herm_dev:.3e}"
            )));
        }
        let tr: C64 = (0..m.nrows()).map(|i| m[(i, i)]).sum();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidParameter(format!(
                "cavity matrix trace {} ≠ 1",
                tr.re
            )));
        }
        Ok(())
    }

    /// Matrix dimension (`n_max + 1` of the producing space).
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Entry ⟨m|ρ_c|n⟩.
    pub fn entry(&self, m: usize, n: usize) -> C64 {
        self.entries[(m, n)]
    }

    /// Underlying matrix.
    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    /// ⟨a†a⟩ = Σ n ρ_nn.
    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim()).map(|n| n as f64 * self.entries[(n, n)].re).sum()
    }
}
