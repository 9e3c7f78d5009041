//! Closed-form effective model of the two-photon resonance: a driven
//! four-level cascade in the dressed basis.
//!
//! On two-photon resonance the coherent drive couples the ground state |ξ₀⟩
//! to |ξ₃⟩ at the two-photon Rabi frequency Ω = 2√2 ε_d²/g, and |ξ₃⟩ relaxes
//! radiatively through the intermediate doublet |ξ₁⟩, |ξ₂⟩ at the cascade
//! rates Γ₃₁, Γ₃₂ (each doublet state then decays to |ξ₀⟩ at γ). All rates
//! here are quoted for the special case γ = 2κ, where the doublet coherence
//! ρ₁₂ decays at Γ = γ while precessing at the beat frequency ν = 2g + δ₂−δ₁.
//! The drive also shifts the dressed levels by δ₀–δ₃, which fixes the
//! resonant drive detuning Δω_d = −g/√2 − √2 ε_d²/g.
//!
//! Everything in this module is a closed form in the upper-level excitation
//! probability p₃ = Ω²/(γ² + 4Ω²) < 1/4: the transient density-matrix
//! elements after a photon emission, the steady state, the reduced cavity
//! state on the {|0⟩, |1⟩, |2⟩} Fock block, the steady-state Wigner function,
//! and the intensity correlation function g²(τ) with its quantum beat. The
//! full numerical model in `master_equation` serves as the independent check
//! on every formula.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::master_equation::SystemParams;
use ndarray::Array2;
pub use crate::operators::CavityDensityMatrix;

const SQRT2: f64 = std::f64::consts::SQRT_2;
const ZERO: C64 = C64::new(0.0, 0.0);

/// Rates and level shifts of the effective four-level cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveModelParams {
    /// Two-photon Rabi frequency Ω = 2√2 ε_d²/g.
    pub omega: f64,
    /// Upper-level excitation probability p₃ = Ω²/(γ² + 4Ω²) ∈ [0, 1/4).
    pub p3: f64,
    /// Cascade rate Γ₃₁ = (γ/4)[1 + (√2+1)²] into |ξ₁⟩.
    pub gamma31: f64,
    /// Cascade rate Γ₃₂ = (γ/4)[1 + (√2−1)²] into |ξ₂⟩.
    pub gamma32: f64,
    /// Atomic decay rate γ; also the decay rate Γ of the doublet coherence
    /// ρ₁₂ (the two coincide for γ = 2κ).
    pub gamma: f64,
    /// Quantum-beat frequency ν = 2g + δ₂ − δ₁.
    pub nu: f64,
    /// Drive-induced level shifts [δ₀, δ₁, δ₂, δ₃].
    pub delta: [f64; 4],
    /// Shifted level energies [Ẽ₀, Ẽ₁, Ẽ₂, Ẽ₃] relative to ω₀ = 0:
    /// Ẽ₀ = δ₀, Ẽ₁ = −g + δ₁, Ẽ₂ = g + δ₂, Ẽ₃ = −√2 g + δ₃.
    pub e_tilde: [f64; 4],
}

impl EffectiveModelParams {
    /// √(p₃(1 − 4p₃)) = Ωγ/(γ² + 4Ω²), the magnitude of the steady-state
    /// ξ₀–ξ₃ coherence ρ₀₃.
    pub fn steady_coherence(&self) -> f64 {
        (self.p3 * (1.0 - 4.0 * self.p3)).max(0.0).sqrt()
    }
}

/// Effective cascade parameters for a drive on two-photon resonance.
///
/// Requires γ = 2κ: the cascade rates Γ₃₁, Γ₃₂ and Γ = γ are specific to
/// that case. The drive phase only rotates the cavity quadratures, so all
/// formulas use |ε_d|.
pub fn effective_params(params: &SystemParams) -> Result<EffectiveModelParams> {
    if !params.is_gamma_twice_kappa() {
        return Err(Error::InvalidParameter(format!(
            "cascade rates require γ = 2κ; got γ = {}, κ = {}",
            params.gamma, params.kappa
        )));
    }
    if !(params.g > 0.0) || !(params.gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "effective model requires g > 0 and γ > 0; got g = {}, γ = {}",
            params.g, params.gamma
        )));
    }
    let (g, gamma) = (params.g, params.gamma);
    let eps_sq = params.eps_d.norm_sqr();
    let omega = 2.0 * SQRT2 * eps_sq / g;
    let p3 = if omega == 0.0 {
        0.0
    } else {
        omega * omega / (gamma * gamma + 4.0 * omega * omega)
    };
    let delta = [
        SQRT2 * eps_sq / g,
        -(20.0 + 19.0 * SQRT2) / 7.0 * eps_sq / g,
        (20.0 - 19.0 * SQRT2) / 7.0 * eps_sq / g,
        -SQRT2 * eps_sq / g,
    ];
    Ok(EffectiveModelParams {
        omega,
        p3,
        gamma31: gamma / 4.0 * (1.0 + (SQRT2 + 1.0) * (SQRT2 + 1.0)),
        gamma32: gamma / 4.0 * (1.0 + (SQRT2 - 1.0) * (SQRT2 - 1.0)),
        gamma,
        nu: 2.0 * g + delta[2] - delta[1],
        delta,
        e_tilde: [delta[0], -g + delta[1], g + delta[2], -SQRT2 * g + delta[3]],
    })
}

/// Δω_d = −g/√2 − √2 ε_d²/g for given g > 0 and ε_d² (shared with the
/// `SystemParams` resonant constructor, which cannot yet hold a params value).
pub(crate) fn two_photon_detuning_from(g: f64, eps_sq: f64) -> f64 {
    -g / SQRT2 - SQRT2 * eps_sq / g
}

/// Drive detuning that hits the shifted two-photon resonance,
/// Δω_d = −g/√2 + (δ₃ − δ₀)/2 = −g/√2 − √2 ε_d²/g. Requires g > 0.
pub fn two_photon_drive_detuning(params: &SystemParams) -> Result<f64> {
    if !(params.g > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "two-photon resonance requires g > 0, got {}",
            params.g
        )));
    }
    Ok(two_photon_detuning_from(params.g, params.eps_d.norm_sqr()))
}

/// Drive amplitude that produces a given upper-level excitation probability:
/// Ω = γ√(p₃/(1−4p₃)), ε_d = √(Ωg/(2√2)). Rejects p₃ ≥ 1/4 (saturation
/// bound) and p₃ < 0.
pub fn epsilon_from_p3(p3: f64, g: f64, gamma: f64) -> Result<f64> {
    if !(0.0..0.25).contains(&p3) {
        return Err(Error::InvalidParameter(format!(
            "p₃ must lie in [0, 1/4) (saturation bound), got {p3}"
        )));
    }
    if !(g > 0.0) || !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "drive inversion requires g > 0 and γ > 0; got g = {g}, γ = {gamma}"
        )));
    }
    let omega = gamma * (p3 / (1.0 - 4.0 * p3)).sqrt();
    Ok((omega * g / (2.0 * SQRT2)).sqrt())
}

/// Integration constants of the closed-form transients, fixed by the initial
/// state.
///
/// Σ ≡ ρ₃₃(0) − ρ₀₀(0), C follows from ρ₃₃(0), and C′ from ρ₁₁(0) + ρ₂₂(0).
/// The individual doublet populations at τ = 0 are kept as well so the
/// cascade split Γ₃₁ : Γ₃₂ can be propagated exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransientConstants {
    /// Σ = ρ₃₃(0) − ρ₀₀(0).
    pub sigma: f64,
    /// Coefficient of the e^{−2γτ} mode in ρ₃₃: C = ρ₃₃(0) − p₃(1 + 2Σ).
    pub c: f64,
    /// Coefficient of the e^{−γτ} mode in ρ₁₁ + ρ₂₂.
    pub c_prime: f64,
    /// Initial doublet coherence ρ₁₂(0).
    pub rho12_0: C64,
    /// Initial population of |ξ₁⟩.
    pub rho11_0: f64,
    /// Initial population of |ξ₂⟩.
    pub rho22_0: f64,
}

impl TransientConstants {
    /// Constants for a given initial state.
    ///
    /// The closed forms describe states with no initial ξ₀–ξ₃ coherence —
    /// exactly the family prepared by a photodetection, which destroys ρ₀₃.
    /// Initial states with ρ₀₃(0) ≠ 0 are rejected rather than silently
    /// projected.
    pub fn from_initial(
        state: &FourLevelDensityMatrix,
        p: &EffectiveModelParams,
    ) -> Result<Self> {
        state.validate()?;
        if state.rho03.norm() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "closed-form transients assume ρ₀₃(0) = 0 (post-emission state); got |ρ₀₃(0)| = {:.3e}",
                state.rho03.norm()
            )));
        }
        let sigma = state.rho33 - state.rho00;
        let c = state.rho33 - p.p3 * (1.0 + 2.0 * sigma);
        let s0 = state.rho11 + state.rho22;
        let r4 = 1.0 - 4.0 * p.p3;
        let c_prime = s0 + 2.0 * c - 2.0 * p.p3 - r4 * (1.0 + sigma);
        Ok(Self {
            sigma,
            c,
            c_prime,
            rho12_0: state.rho12,
            rho11_0: state.rho11,
            rho22_0: state.rho22,
        })
    }
}

/// Density matrix of the four-level cascade in the dressed basis
/// {|ξ₀⟩, |ξ₁⟩, |ξ₂⟩, |ξ₃⟩}, keeping only the elements that the dynamics
/// couple: the populations, the doublet coherence ρ₁₂, and the two-photon
/// coherence ρ₀₃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourLevelDensityMatrix {
    /// Ground-state population ⟨ξ₀|ρ|ξ₀⟩.
    pub rho00: f64,
    /// Doublet population ⟨ξ₁|ρ|ξ₁⟩.
    pub rho11: f64,
    /// Doublet population ⟨ξ₂|ρ|ξ₂⟩.
    pub rho22: f64,
    /// Upper-level population ⟨ξ₃|ρ|ξ₃⟩.
    pub rho33: f64,
    /// Doublet coherence ⟨ξ₁|ρ|ξ₂⟩ (source of the quantum beat).
    pub rho12: C64,
    /// Two-photon coherence ⟨ξ₀|ρ|ξ₃⟩.
    pub rho03: C64,
    /// Time (units of the inverse reference rate) at which the elements are
    /// taken; ∞ for the steady state.
    pub tau: f64,
}

impl FourLevelDensityMatrix {
    /// Sum of the intermediate-doublet populations ρ₁₁ + ρ₂₂.
    pub fn doublet_sum(&self) -> f64 {
        self.rho11 + self.rho22
    }

    /// Check physicality: populations ≥ −1e-12 summing to 1 within 1e-10,
    /// and both coherences within their Cauchy–Schwarz bounds (+1e-10).
    pub fn validate(&self) -> Result<()> {
        let pops = [self.rho00, self.rho11, self.rho22, self.rho33];
        if pops.iter().any(|&p| !p.is_finite() || p < -1e-12) {
            return Err(Error::InvalidParameter(format!(
                "negative population in {pops:?}"
            )));
        }
        let sum: f64 = pops.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "populations sum to {sum}, not 1"
            )));
        }
        if self.rho12.norm() > (self.rho11 * self.rho22).max(0.0).sqrt() + 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "|ρ₁₂| = {} exceeds √(ρ₁₁ρ₂₂)",
                self.rho12.norm()
            )));
        }
        if self.rho03.norm() > (self.rho00 * self.rho33).max(0.0).sqrt() + 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "|ρ₀₃| = {} exceeds √(ρ₀₀ρ₃₃)",
                self.rho03.norm()
            )));
        }
        Ok(())
    }
}

/// Closed-form transient state at time `tau` ≥ 0 (units of the inverse
/// reference rate), for the integration constants of a post-emission initial
/// state.
///
/// With q = √(p₃(1−4p₃)) and r₄ = 1 − 4p₃:
///
/// ```text
/// ρ₃₃(τ)  = C e^{−2γτ} + p₃[1 − (γ/Ω) e^{−γτ} sin 2Ωτ]
///           − Σ e^{−γτ} [q sin 2Ωτ − 2p₃ cos 2Ωτ]
/// ρ₁₁+ρ₂₂ = C′e^{−γτ} + 2γ e^{−γτ} ∫ ρ₃₃ e^{γτ} dτ   (antiderivative below)
/// ρ₁₂(τ)  = ρ₁₂(0) e^{−Γτ} e^{iντ}
/// ρ₀₃(τ)  = iq − (i/2) e^{−γτ} [(Σ + r₄) sin 2Ωτ + 2q cos 2Ωτ]
/// ρ₀₀(τ)  = 1 − ρ₁₁ − ρ₂₂ − ρ₃₃
/// ```
///
/// The indefinite integral in the doublet sum is evaluated in closed form
/// (the e^{γτ}·{e^{−2γτ}, 1, e^{−γτ}sin 2Ωτ, e^{−γτ}cos 2Ωτ} primitives),
/// giving
///
/// ```text
/// ρ₁₁+ρ₂₂ = C′e^{−γτ} − 2C e^{−2γτ} + 2p₃
///           + e^{−γτ}[(1+Σ) r₄ cos 2Ωτ + 2Σ q sin 2Ωτ],
/// ```
///
/// cross-checked against numerical quadrature in the tests. The individual
/// doublet populations follow from their rate equations
/// ρ̇ᵢᵢ = −γρᵢᵢ + Γ₃ᵢ ρ₃₃, which split the fed population in the ratio
/// Γ₃₁ : Γ₃₂.
pub fn four_level_state(
    k: &TransientConstants,
    p: &EffectiveModelParams,
    tau: f64,
) -> FourLevelDensityMatrix {
    let (gamma, p3) = (p.gamma, p.p3);
    let q = p.steady_coherence();
    let r4 = 1.0 - 4.0 * p3;
    let e1 = (-gamma * tau).exp();
    let e2 = e1 * e1;
    let (sin2, cos2) = (2.0 * p.omega * tau).sin_cos();

    let rho33 = k.c * e2 + p3 - q * e1 * sin2 - k.sigma * e1 * (q * sin2 - 2.0 * p3 * cos2);
    let doublet = k.c_prime * e1 - 2.0 * k.c * e2
        + 2.0 * p3
        + e1 * ((1.0 + k.sigma) * r4 * cos2 + 2.0 * k.sigma * q * sin2);
    // Population fed into the doublet since τ = 0, split by the branching
    // ratio of the cascade rates.
    let fed = doublet - (k.rho11_0 + k.rho22_0) * e1;
    let branch31 = p.gamma31 / (p.gamma31 + p.gamma32);
    let rho11 = k.rho11_0 * e1 + branch31 * fed;
    let rho22 = k.rho22_0 * e1 + (1.0 - branch31) * fed;
    let rho03 = C64::new(
        0.0,
        q - 0.5 * e1 * ((k.sigma + r4) * sin2 + 2.0 * q * cos2),
    );
    let rho12 = k.rho12_0 * e1 * C64::new(0.0, p.nu * tau).exp();

    FourLevelDensityMatrix {
        rho00: 1.0 - rho33 - doublet,
        rho11,
        rho22,
        rho33,
        rho12,
        rho03,
        tau,
    }
}

/// Steady state of the cascade: ρ₃₃ = p₃, ρ₀₀ = 1 − 3p₃, the doublet carries
/// 2p₃ split in the cascade branching ratio, ρ₁₂ = 0, and
/// ρ₀₃ = iΩγ/(γ² + 4Ω²) = i√(p₃(1−4p₃)).
pub fn steady_four_level(p: &EffectiveModelParams) -> FourLevelDensityMatrix {
    let p3 = p.p3;
    FourLevelDensityMatrix {
        rho00: 1.0 - 3.0 * p3,
        rho11: p.gamma31 / p.gamma * p3,
        rho22: p.gamma32 / p.gamma * p3,
        rho33: p3,
        rho12: ZERO,
        rho03: C64::new(0.0, p.steady_coherence()),
        tau: f64::INFINITY,
    }
}

/// Conditional state right after a photon is emitted from the cavity in the
/// steady state, together with its transient constants:
///
/// ρ(0) = (2/5)|ξ₀⟩⟨ξ₀| + (3/5)|ψ_b⟩⟨ψ_b|,
/// |ψ_b⟩ = √(2/3) [ (√2+1)/2 |ξ₁⟩ + (√2−1)/2 |ξ₂⟩ ],
///
/// giving ρ₁₁(0) = (3+2√2)/10, ρ₂₂(0) = (3−2√2)/10, ρ₁₂(0) = 1/10, and the
/// constants Σ = −2/5, C = −p₃/5, C′ = 0.
pub fn conditional_state(
    p: &EffectiveModelParams,
) -> (FourLevelDensityMatrix, TransientConstants) {
    let state = FourLevelDensityMatrix {
        rho00: 0.4,
        rho11: (3.0 + 2.0 * SQRT2) / 10.0,
        rho22: (3.0 - 2.0 * SQRT2) / 10.0,
        rho33: 0.0,
        rho12: C64::new(0.1, 0.0),
        rho03: ZERO,
        tau: 0.0,
    };
    let constants = TransientConstants::from_initial(&state, p)
        .expect("post-emission state satisfies the closed-form preconditions");
    (state, constants)
}

/// Reduce the four-level state to the cavity field on the {|0⟩, |1⟩, |2⟩}
/// Fock block:
///
/// ```text
/// ρ_c = [ρ₀₀ + (ρ₁₁+ρ₂₂)/2 − Re ρ₁₂] |0⟩⟨0|
///     + [(ρ₁₁+ρ₂₂+ρ₃₃)/2 + Re ρ₁₂] |1⟩⟨1|
///     + (ρ₃₃/2) |2⟩⟨2| + (ρ₀₃/√2) |0⟩⟨2| + h.c.
/// ```
pub fn cavity_density_matrix(state: &FourLevelDensityMatrix) -> Result<CavityDensityMatrix> {
    state.validate()?;
    let doublet = state.doublet_sum();
    let mut m = Array2::from_elem((3, 3), ZERO);
    m[(0, 0)] = C64::new(state.rho00 + 0.5 * doublet - state.rho12.re, 0.0);
    m[(1, 1)] = C64::new(0.5 * (doublet + state.rho33) + state.rho12.re, 0.0);
    m[(2, 2)] = C64::new(0.5 * state.rho33, 0.0);
    m[(0, 2)] = state.rho03 / SQRT2;
    m[(2, 0)] = state.rho03.conj() / SQRT2;
    CavityDensityMatrix::new(m)
}

/// Steady-state Wigner function of the cavity field at a phase-space point
/// α = x + iy:
///
/// ```text
/// W(α) = (2/π) e^{−2|α|²} {4p₃|α|⁴ + 2p₃|α|² + (1−3p₃)
///                          + 2i√(p₃(1−4p₃)) [α² − (α*)²]}
/// ```
///
/// (the last term equals −8√(p₃(1−4p₃)) xy). Non-negative everywhere for
/// p₃ ∈ [0, 1/4]; the saturation endpoint p₃ = 1/4, where the bimodal term
/// vanishes, is admitted.
pub fn steady_state_wigner(p3: f64, point: C64) -> Result<f64> {
    if !(0.0..=0.25).contains(&p3) {
        return Err(Error::InvalidParameter(format!(
            "steady-state Wigner function requires p₃ ∈ [0, 1/4], got {p3}"
        )));
    }
    let q = (p3 * (1.0 - 4.0 * p3)).max(0.0).sqrt();
    let r2 = point.norm_sqr();
    let poly = 4.0 * p3 * r2 * r2 + 2.0 * p3 * r2 + (1.0 - 3.0 * p3)
        - 8.0 * q * point.re * point.im;
    Ok(2.0 / std::f64::consts::PI * (-2.0 * r2).exp() * poly)
}

/// Coefficients [a₁, a₂, a₃, a₄] of the intensity correlation function:
/// a₁ = 3(1−8p₃)/(25p₃), a₂ = −(13/25)√((1−4p₃)/p₃), a₃ = −1/25,
/// a₄ = 1/(25p₃). Rejects p₃ = 0, where the correlation function of an
/// empty cavity is undefined and the coefficients diverge.
pub fn g2_coefficients(p: &EffectiveModelParams) -> Result<[f64; 4]> {
    let p3 = p.p3;
    if !(p3 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "g²(τ) coefficients diverge as p₃ → 0, got p₃ = {p3}"
        )));
    }
    Ok([
        3.0 * (1.0 - 8.0 * p3) / (25.0 * p3),
        -13.0 / 25.0 * ((1.0 - 4.0 * p3) / p3).sqrt(),
        -1.0 / 25.0,
        1.0 / (25.0 * p3),
    ])
}

/// Intensity correlation g²(τ) of the forward-scattered light, even in τ:
///
/// ```text
/// g²(τ) = 1 + e^{−γ|τ|} [a₁ cos 2Ωτ + a₂ sin 2Ω|τ| + a₃ e^{−γ|τ|} + a₄ cos ντ]
/// ```
///
/// With `include_beat` off, the a₄ quantum-beat term (frequency ν ≈ 2g) is
/// dropped, leaving the beat-averaged envelope.
pub fn g2_analytic(p: &EffectiveModelParams, tau: f64, include_beat: bool) -> Result<f64> {
    let [a1, a2, a3, a4] = g2_coefficients(p)?;
    let t = tau.abs();
    let e1 = (-p.gamma * t).exp();
    let (sin2, cos2) = (2.0 * p.omega * t).sin_cos();
    let mut bracket = a1 * cos2 + a2 * sin2 + a3 * e1;
    if include_beat {
        bracket += a4 * (p.nu * t).cos();
    }
    Ok(1.0 + e1 * bracket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{integrate_sequence, OdeOptions};
    use approx::assert_abs_diff_eq;
    use ndarray::Array1;
    use proptest::prelude::*;

    fn params_for(p3: f64) -> EffectiveModelParams {
        effective_params(&SystemParams::from_p3(p3, 500.0).unwrap()).unwrap()
    }

    #[test]
    fn params_match_quoted_operating_point() {
        let sys = SystemParams::two_photon_resonant(500.0, 0.5, 28.32).unwrap();
        let p = effective_params(&sys).unwrap();
        assert_abs_diff_eq!(p.omega, 4.54, epsilon = 0.005);
        assert_abs_diff_eq!(p.p3, 0.247, epsilon = 0.0005);
        // Cascade rates, frozen from (γ/4)[1+(√2±1)²] at γ = 1.
        assert_abs_diff_eq!(p.gamma31, 1.7071067811865475, epsilon = 1e-15);
        assert_abs_diff_eq!(p.gamma32, 0.2928932188134524, epsilon = 1e-15);
        assert_abs_diff_eq!(p.gamma31 + p.gamma32, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.gamma, 1.0, epsilon = 0.0);
        // Beat frequency assembles from the doublet shifts.
        assert_abs_diff_eq!(p.nu, 2.0 * 500.0 + p.delta[2] - p.delta[1], epsilon = 1e-12);
        assert_abs_diff_eq!(
            p.nu,
            2.0 * 500.0 + 40.0 / 7.0 * 28.32 * 28.32 / 500.0,
            epsilon = 1e-9
        );
        // Shifted energies sit at the unshifted dressed levels plus δ.
        assert_abs_diff_eq!(p.e_tilde[1], -500.0 + p.delta[1], epsilon = 1e-12);
        assert_abs_diff_eq!(p.e_tilde[3], -500.0 * SQRT2 + p.delta[3], epsilon = 1e-12);
        // δ₀ = −δ₃ = √2 ε²/g.
        assert_abs_diff_eq!(p.delta[0], -p.delta[3], epsilon = 1e-15);

        let rejected = SystemParams::new(500.0, 0.5, 1.5, C64::new(1.0, 0.0), 0.0).unwrap();
        assert!(effective_params(&rejected).is_err());
    }

    #[test]
    fn zero_drive_params_vanish() {
        let sys = SystemParams::two_photon_resonant(500.0, 0.5, 0.0).unwrap();
        let p = effective_params(&sys).unwrap();
        assert_eq!(p.omega, 0.0);
        assert_eq!(p.p3, 0.0);
        assert_eq!(p.delta, [0.0; 4]);
        assert_eq!(p.e_tilde, [0.0, -500.0, 500.0, -500.0 * SQRT2]);
    }

    #[test]
    fn detuning_formula() {
        let sys = SystemParams::new(500.0, 0.5, 1.0, C64::new(28.32, 0.0), 0.0).unwrap();
        let d = two_photon_drive_detuning(&sys).unwrap();
        assert_abs_diff_eq!(d, -355.82, epsilon = 0.005);
        // Consistency with the level shifts: Δω_d = −g/√2 + (δ₃ − δ₀)/2.
        let p = effective_params(&SystemParams::two_photon_resonant(500.0, 0.5, 28.32).unwrap())
            .unwrap();
        assert_abs_diff_eq!(
            d,
            -500.0 / SQRT2 + 0.5 * (p.delta[3] - p.delta[0]),
            epsilon = 1e-12
        );
        let undriven = SystemParams::new(500.0, 0.5, 1.0, ZERO, 0.0).unwrap();
        assert_abs_diff_eq!(
            two_photon_drive_detuning(&undriven).unwrap(),
            -500.0 / SQRT2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn drive_inversion_round_trips() {
        for &p3 in &[0.247, 0.2, 0.05, 1e-6] {
            let eps = epsilon_from_p3(p3, 500.0, 1.0).unwrap();
            let p = params_for(p3);
            assert_abs_diff_eq!(p.p3, p3, epsilon = 1e-12);
            if p3 == 0.247 {
                assert_abs_diff_eq!(eps, 28.3, epsilon = 0.05);
            }
        }
        assert_eq!(epsilon_from_p3(0.0, 500.0, 1.0).unwrap(), 0.0);
        assert!(epsilon_from_p3(0.25, 500.0, 1.0).is_err());
        assert!(epsilon_from_p3(-0.01, 500.0, 1.0).is_err());
    }

    #[test]
    fn conditional_state_matches_quoted_constants() {
        let p = params_for(0.247);
        let (state, k) = conditional_state(&p);
        state.validate().unwrap();
        assert_abs_diff_eq!(state.rho00, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(state.rho11, 0.5828427124746190, epsilon = 1e-15);
        assert_abs_diff_eq!(state.rho22, 0.0171572875253810, epsilon = 1e-15);
        assert_eq!(state.rho33, 0.0);
        assert_eq!(state.rho12, C64::new(0.1, 0.0));
        assert_abs_diff_eq!(k.sigma, -0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(k.c, -p.p3 / 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.c_prime, 0.0, epsilon = 1e-14);
        // |ψ_b⟩ is normalized: the doublet block is pure, |ρ₁₂|² = ρ₁₁ρ₂₂.
        assert_abs_diff_eq!(
            state.rho12.norm_sqr(),
            state.rho11 * state.rho22,
            epsilon = 1e-15
        );
    }

    #[test]
    fn transient_limits() {
        let p = params_for(0.247);
        let (state0, k) = conditional_state(&p);

        // τ = 0 reproduces the initial state exactly.
        let s = four_level_state(&k, &p, 0.0);
        assert_abs_diff_eq!(s.rho00, state0.rho00, epsilon = 1e-14);
        assert_abs_diff_eq!(s.rho11, state0.rho11, epsilon = 1e-14);
        assert_abs_diff_eq!(s.rho22, state0.rho22, epsilon = 1e-14);
        assert_abs_diff_eq!(s.rho33, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.doublet_sum(), 0.6, epsilon = 1e-14);
        assert!((s.rho12 - state0.rho12).norm() < 1e-14);
        assert!(s.rho03.norm() < 1e-14);

        // Long times relax to the steady state.
        let s_inf = four_level_state(&k, &p, 50.0);
        let ss = steady_four_level(&p);
        assert_abs_diff_eq!(s_inf.rho33, ss.rho33, epsilon = 1e-12);
        assert_abs_diff_eq!(s_inf.rho00, ss.rho00, epsilon = 1e-12);
        assert!((s_inf.rho03 - ss.rho03).norm() < 1e-12);
        assert!(s_inf.rho12.norm() < 1e-12);

        // Undriven cascade started in the ground state stays there.
        let sys0 = SystemParams::two_photon_resonant(500.0, 0.5, 0.0).unwrap();
        let p0 = effective_params(&sys0).unwrap();
        let ground = FourLevelDensityMatrix {
            rho00: 1.0,
            rho11: 0.0,
            rho22: 0.0,
            rho33: 0.0,
            rho12: ZERO,
            rho03: ZERO,
            tau: 0.0,
        };
        let k0 = TransientConstants::from_initial(&ground, &p0).unwrap();
        for &tau in &[0.0, 0.3, 2.0, 20.0] {
            let g = four_level_state(&k0, &p0, tau);
            assert_abs_diff_eq!(g.rho00, 1.0, epsilon = 1e-14);
            assert!(g.rho33.abs() < 1e-14 && g.rho03.norm() < 1e-14);
        }

        // States with an initial two-photon coherence are outside the family.
        let mut with_coherence = steady_four_level(&p);
        with_coherence.tau = 0.0;
        assert!(TransientConstants::from_initial(&with_coherence, &p).is_err());
    }

    /// Independent check of every closed form: integrate the four-level
    /// master equation (drive Ω on 0↔3, cascade jumps 3→1, 3→2 at Γ₃₁, Γ₃₂,
    /// doublet decay 1→0, 2→0 at γ, doublet splitting ν) with the adaptive
    /// stepper and compare all matrix elements.
    #[test]
    fn transients_match_integrated_master_equation() {
        let p = params_for(0.247);
        let (state0, k) = conditional_state(&p);

        let dim = 4usize;
        let idx = |i: usize, j: usize| i * dim + j;
        let mut rho0 = Array1::from_elem(dim * dim, ZERO);
        rho0[idx(0, 0)] = C64::new(state0.rho00, 0.0);
        rho0[idx(1, 1)] = C64::new(state0.rho11, 0.0);
        rho0[idx(2, 2)] = C64::new(state0.rho22, 0.0);
        rho0[idx(3, 3)] = C64::new(state0.rho33, 0.0);
        rho0[idx(1, 2)] = state0.rho12;
        rho0[idx(2, 1)] = state0.rho12.conj();

        // H = Ω(|0⟩⟨3| + |3⟩⟨0|) − (ν/2)|1⟩⟨1| + (ν/2)|2⟩⟨2|.
        let mut h = Array2::from_elem((dim, dim), ZERO);
        h[(0, 3)] = C64::new(p.omega, 0.0);
        h[(3, 0)] = C64::new(p.omega, 0.0);
        h[(1, 1)] = C64::new(-p.nu / 2.0, 0.0);
        h[(2, 2)] = C64::new(p.nu / 2.0, 0.0);
        let jumps: Vec<(f64, usize, usize)> = vec![
            (p.gamma31, 1, 3),
            (p.gamma32, 2, 3),
            (p.gamma, 0, 1),
            (p.gamma, 0, 2),
        ];

        let rhs = move |_t: f64, y: &Array1<C64>, dy: &mut Array1<C64>| {
            let at = |i: usize, j: usize| y[idx(i, j)];
            for i in 0..dim {
                for j in 0..dim {
                    let mut acc = ZERO;
                    for m in 0..dim {
                        acc += h[(i, m)] * at(m, j) - at(i, m) * h[(m, j)];
                    }
                    acc *= C64::new(0.0, -1.0);
                    for &(rate, lo, hi) in &jumps {
                        // D[L]ρ with L = √rate |lo⟩⟨hi|.
                        let mut term = ZERO;
                        if i == lo && j == lo {
                            term += at(hi, hi);
                        }
                        if i == hi {
                            term -= 0.5 * at(hi, j);
                        }
                        if j == hi {
                            term -= 0.5 * at(i, hi);
                        }
                        acc += rate * term;
                    }
                    dy[idx(i, j)] = acc;
                }
            }
        };

        let taus = [0.05, 0.1, 0.3549, 0.5401, 1.0, 2.5];
        let opts = OdeOptions::with_tol(1e-11, 1e-13);
        let snapshots = integrate_sequence(rhs, 0.0, &rho0, &taus, &opts).unwrap();
        for (snap, &tau) in snapshots.iter().zip(&taus) {
            let s = four_level_state(&k, &p, tau);
            assert_abs_diff_eq!(s.rho00, snap[idx(0, 0)].re, epsilon = 3e-10);
            assert_abs_diff_eq!(s.rho11, snap[idx(1, 1)].re, epsilon = 3e-10);
            assert_abs_diff_eq!(s.rho22, snap[idx(2, 2)].re, epsilon = 3e-10);
            assert_abs_diff_eq!(s.rho33, snap[idx(3, 3)].re, epsilon = 3e-10);
            assert!((s.rho12 - snap[idx(1, 2)]).norm() < 3e-10, "ρ₁₂ at τ={tau}");
            assert!((s.rho03 - snap[idx(0, 3)]).norm() < 3e-10, "ρ₀₃ at τ={tau}");
            s.validate().unwrap();
        }
    }

    /// The hard-coded antiderivative in the doublet sum against Simpson
    /// quadrature of 2γ e^{−γτ} ∫₀^τ ρ₃₃ e^{γu} du.
    #[test]
    fn doublet_sum_matches_quadrature() {
        let p = params_for(0.247);
        let (state0, k) = conditional_state(&p);
        let s0 = state0.doublet_sum();
        for &tau in &[0.37, 1.3, 2.9] {
            let n = 6000; // even
            let h = tau / n as f64;
            let f = |u: f64| four_level_state(&k, &p, u).rho33 * (p.gamma * u).exp();
            let mut integral = f(0.0) + f(tau);
            for i in 1..n {
                integral += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            integral *= h / 3.0;
            let e1 = (-p.gamma * tau).exp();
            let via_quadrature = s0 * e1 + 2.0 * p.gamma * e1 * integral;
            let closed = four_level_state(&k, &p, tau).doublet_sum();
            assert_abs_diff_eq!(closed, via_quadrature, epsilon = 1e-10);
        }
    }

    #[test]
    fn steady_state_values() {
        let p = params_for(0.05);
        let ss = steady_four_level(&p);
        ss.validate().unwrap();
        assert_abs_diff_eq!(ss.rho33, 0.05, epsilon = 1e-12);
        assert_abs_diff_eq!(ss.rho00, 0.85, epsilon = 1e-12);
        assert_abs_diff_eq!(ss.doublet_sum(), 0.1, epsilon = 1e-12);
        // ρ₀₃ = iΩγ/(γ²+4Ω²), and √(p₃(1−4p₃)) evaluates the same number:
        // 0.2 at p₃ = 0.05.
        let direct = p.omega * p.gamma / (p.gamma * p.gamma + 4.0 * p.omega * p.omega);
        assert_abs_diff_eq!(ss.rho03.im, direct, epsilon = 1e-14);
        assert_abs_diff_eq!(ss.rho03.im, 0.2, epsilon = 1e-12);
        assert_eq!(ss.rho03.re, 0.0);
        // Cascade split of the doublet population.
        assert_abs_diff_eq!(ss.rho11, 1.7071067811865475 * 0.05, epsilon = 1e-12);
        assert_abs_diff_eq!(ss.rho22, 0.2928932188134524 * 0.05, epsilon = 1e-12);

        // p₃ = 0 is the pure ground state.
        let p0 = effective_params(&SystemParams::two_photon_resonant(500.0, 0.5, 0.0).unwrap())
            .unwrap();
        let vac = steady_four_level(&p0);
        assert_eq!(vac.rho00, 1.0);
        assert_eq!(vac.rho33, 0.0);
        assert_eq!(vac.rho03, ZERO);
    }

    #[test]
    fn cavity_reduction_cases() {
        // Ground state reduces to the vacuum.
        let p = params_for(0.24);
        let ground = FourLevelDensityMatrix {
            rho00: 1.0,
            rho11: 0.0,
            rho22: 0.0,
            rho33: 0.0,
            rho12: ZERO,
            rho03: ZERO,
            tau: 0.0,
        };
        let rc = cavity_density_matrix(&ground).unwrap();
        assert_eq!(rc.entry(0, 0), C64::new(1.0, 0.0));
        assert_eq!(rc.entry(1, 1), ZERO);
        assert_eq!(rc.entry(2, 2), ZERO);

        // Pure |ξ₃⟩ spreads over one and two photons equally.
        let xi3 = FourLevelDensityMatrix {
            rho00: 0.0,
            rho11: 0.0,
            rho22: 0.0,
            rho33: 1.0,
            rho12: ZERO,
            rho03: ZERO,
            tau: 0.0,
        };
        let rc3 = cavity_density_matrix(&xi3).unwrap();
        assert_abs_diff_eq!(rc3.entry(0, 0).re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rc3.entry(1, 1).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rc3.entry(2, 2).re, 0.5, epsilon = 1e-15);

        // Steady state carries ⟨a†a⟩ = 5p₃/2.
        let ss = cavity_density_matrix(&steady_four_level(&p)).unwrap();
        assert_abs_diff_eq!(ss.mean_photon_number(), 2.5 * 0.24, epsilon = 1e-12);
        assert_abs_diff_eq!(ss.entry(0, 0).re, 1.0 - 2.0 * 0.24, epsilon = 1e-12);
        assert_abs_diff_eq!(ss.entry(1, 1).re, 1.5 * 0.24, epsilon = 1e-12);
        assert_abs_diff_eq!(ss.entry(2, 2).re, 0.5 * 0.24, epsilon = 1e-12);
        let q = (0.24f64 * (1.0 - 4.0 * 0.24)).sqrt();
        assert!((ss.entry(0, 2) - C64::new(0.0, q / SQRT2)).norm() < 1e-12);
    }

    #[test]
    fn wigner_closed_form() {
        // p₃ = 0: the vacuum Gaussian.
        for &(x, y) in &[(0.0, 0.0), (0.7, -0.3), (1.5, 1.5)] {
            let a = C64::new(x, y);
            let w = steady_state_wigner(0.0, a).unwrap();
            let vac = 2.0 / std::f64::consts::PI * (-2.0 * a.norm_sqr()).exp();
            assert_abs_diff_eq!(w, vac, epsilon = 1e-15);
        }

        // p₃ = 0.24: the two maxima sit near ±(0.48 − 0.48i), on y = −x.
        let mut best = (0.0, 0.0, f64::MIN);
        let n = 401;
        for ix in 0..n {
            let x = -1.0 + 2.0 * ix as f64 / (n - 1) as f64;
            for iy in 0..n {
                let y = -1.0 + 2.0 * iy as f64 / (n - 1) as f64;
                let w = steady_state_wigner(0.24, C64::new(x, y)).unwrap();
                if w > best.2 {
                    best = (x, y, w);
                }
            }
        }
        // W(α) = W(−α) exactly, so the argmax lands on either of the pair;
        // check magnitudes and the y = −x placement.
        assert_abs_diff_eq!(best.0.abs(), 0.48, epsilon = 0.01);
        assert_abs_diff_eq!(best.1.abs(), 0.48, epsilon = 0.01);
        assert!(best.0 * best.1 < 0.0, "maxima lie on y = −x, got {best:?}");
        assert_abs_diff_eq!(
            steady_state_wigner(0.24, C64::new(-best.0, -best.1)).unwrap(),
            best.2,
            epsilon = 1e-15
        );

        // Inversion symmetry and positivity across the admissible range.
        for &p3 in &[0.05, 0.2, 0.249, 0.25] {
            for &(x, y) in &[(0.3, 0.4), (-1.1, 0.9), (0.6, 0.6), (2.0, -2.0)] {
                let w = steady_state_wigner(p3, C64::new(x, y)).unwrap();
                let w_neg = steady_state_wigner(p3, C64::new(-x, -y)).unwrap();
                assert_eq!(w, w_neg);
                assert!(w >= 0.0, "W({x},{y}) = {w} at p₃ = {p3}");
            }
        }

        // Normalization by trapezoid quadrature on [−3,3]².
        let n = 201;
        let h = 6.0 / (n - 1) as f64;
        let mut integral = 0.0;
        for ix in 0..n {
            let x = -3.0 + ix as f64 * h;
            let wx = if ix == 0 || ix == n - 1 { 0.5 } else { 1.0 };
            for iy in 0..n {
                let y = -3.0 + iy as f64 * h;
                let wy = if iy == 0 || iy == n - 1 { 0.5 } else { 1.0 };
                integral +=
                    wx * wy * steady_state_wigner(0.2, C64::new(x, y)).unwrap();
            }
        }
        integral *= h * h;
        assert_abs_diff_eq!(integral, 1.0, epsilon = 1e-6);

        assert!(steady_state_wigner(0.26, ZERO).is_err());
        assert!(steady_state_wigner(-0.01, ZERO).is_err());
    }

    #[test]
    fn g2_landmarks() {
        let p = params_for(0.247);
        let [a1, a2, a3, a4] = g2_coefficients(&p).unwrap();
        // Frozen coefficient values at p₃ = 0.247, plus the γ/Ω dual forms.
        assert_abs_diff_eq!(a1, -0.47417004048582996, epsilon = 1e-14);
        assert_abs_diff_eq!(a2, -0.11461606390582067, epsilon = 1e-14);
        assert_abs_diff_eq!(a3, -0.04, epsilon = 1e-16);
        assert_abs_diff_eq!(a4, 0.1619433198380567, epsilon = 1e-14);
        let (g2_, om) = (p.gamma, p.omega);
        assert_abs_diff_eq!(
            a1,
            3.0 * (g2_ * g2_ - 4.0 * om * om) / (25.0 * om * om),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(a2, -13.0 / 25.0 * g2_ / om, epsilon = 1e-12);
        assert_abs_diff_eq!(
            a4,
            (g2_ * g2_ + 4.0 * om * om) / (25.0 * om * om),
            epsilon = 1e-12
        );

        // g²(0) = 1 + a₁ + a₃ + a₄ ≈ 0.648 < 1: antibunching.
        let g20 = g2_analytic(&p, 0.0, true).unwrap();
        assert_abs_diff_eq!(g20, 1.0 + a1 + a3 + a4, epsilon = 1e-14);
        assert_abs_diff_eq!(g20, 0.6477732793522267, epsilon = 1e-12);
        assert_abs_diff_eq!(g20, 0.648, epsilon = 5e-4);

        // Beat-on maximum near γτ = 0.3549.
        let mut best = (0.0, f64::MIN);
        let mut t = 0.30;
        while t <= 0.42 {
            let v = g2_analytic(&p, t, true).unwrap();
            if v > best.1 {
                best = (t, v);
            }
            t += 1e-5;
        }
        assert_abs_diff_eq!(best.0, 0.354871, epsilon = 2e-5);
        assert_abs_diff_eq!(best.1, 1.431682, epsilon = 1e-5);
        assert_abs_diff_eq!(best.1, 1.43, epsilon = 0.01);

        // Beat-averaged envelope passes through 1 at γτ = 0.5401.
        let avg = g2_analytic(&p, 0.5401, false).unwrap();
        assert_abs_diff_eq!(avg, 1.0, epsilon = 0.01);

        // Decorrelation (the residual is bounded by e^{−γτ}(|a₁|+|a₂|+|a₄|))
        // and evenness.
        assert_abs_diff_eq!(g2_analytic(&p, 10.0, true).unwrap(), 1.0, epsilon = 5e-5);
        for &t in &[0.1, 0.3549, 2.0] {
            assert_eq!(
                g2_analytic(&p, t, true).unwrap(),
                g2_analytic(&p, -t, true).unwrap()
            );
        }

        let p0 = effective_params(&SystemParams::two_photon_resonant(500.0, 0.5, 0.0).unwrap())
            .unwrap();
        assert!(g2_analytic(&p0, 0.0, true).is_err());
    }

    #[test]
    fn antibunching_criterion_and_low_drive_bunching() {
        let p = params_for(0.247);
        let h = 1e-4;
        let f = |t: f64| g2_analytic(&p, t, false).unwrap();
        // Central first difference vanishes identically (even function).
        let d1 = (f(h) - f(-h)) / (2.0 * h);
        assert!(d1.abs() < 1e-12, "g²′(0) = {d1}");
        // Forward second difference is positive: the correlation initially
        // rises away from its antibunched minimum.
        let d2 = (f(2.0 * h) - 2.0 * f(h) + f(0.0)) / (h * h);
        assert!(d2 > 0.0, "g²″(0) = {d2}");

        // Low drive flips the character to bunching.
        for &p3 in &[0.001, 0.005, 0.01] {
            let weak = params_for(p3);
            assert!(g2_analytic(&weak, 0.0, true).unwrap() > 1.0);
        }
    }

    /// The a₄ term oscillates with period 2π/ν: measure peak-to-peak spacing
    /// of the isolated beat on a fine grid with parabolic refinement.
    #[test]
    fn beat_period_matches_doublet_splitting() {
        let p = params_for(0.247);
        let beat = |t: f64| {
            g2_analytic(&p, t, true).unwrap() - g2_analytic(&p, t, false).unwrap()
        };
        let (t0, t1, dt) = (0.005, 0.025, 1e-6);
        let n = ((t1 - t0) / dt) as usize;
        let mut peaks = Vec::new();
        let mut prev = beat(t0);
        let mut cur = beat(t0 + dt);
        for i in 2..n {
            let next = beat(t0 + i as f64 * dt);
            if cur > prev && cur >= next {
                // Parabolic refinement around the discrete maximum.
                let denom = prev - 2.0 * cur + next;
                let shift = if denom == 0.0 { 0.0 } else { 0.5 * (prev - next) / denom };
                peaks.push(t0 + (i as f64 - 1.0 + shift) * dt);
            }
            prev = cur;
            cur = next;
        }
        assert!(peaks.len() >= 3, "expected several beat peaks, got {}", peaks.len());
        let period = 2.0 * std::f64::consts::PI / p.nu;
        for w in peaks.windows(2) {
            assert_abs_diff_eq!(w[1] - w[0], period, epsilon = 1e-6 * period.max(1e-9));
        }
    }

    proptest! {
        #[test]
        fn drive_round_trip_is_identity(p3 in 0.0..0.2499f64) {
            let eps = epsilon_from_p3(p3, 500.0, 1.0).unwrap();
            let sys = SystemParams::two_photon_resonant(500.0, 0.5, eps).unwrap();
            let p = effective_params(&sys).unwrap();
            prop_assert!((p.p3 - p3).abs() < 1e-10);
        }

        #[test]
        fn transients_stay_physical(
            p3 in 0.001..0.2499f64,
            tau in 0.0..5.0f64,
        ) {
            let p = params_for(p3);
            let (_, k) = conditional_state(&p);
            let s = four_level_state(&k, &p, tau);
            prop_assert!(s.validate().is_ok());
            let rc = cavity_density_matrix(&s).unwrap();
            prop_assert!(rc.mean_photon_number() >= -1e-12);
        }

        #[test]
        fn steady_wigner_nonnegative(
            p3 in 0.0..=0.25f64,
            x in -3.0..3.0f64,
            y in -3.0..3.0f64,
        ) {
            let w = steady_state_wigner(p3, C64::new(x, y)).unwrap();
            prop_assert!(w >= -1e-15);
        }
    }
}
