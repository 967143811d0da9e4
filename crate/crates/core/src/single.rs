//! One particle scattering off a zero-range impurity at the trap centre.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{alpha_closed, AlphaValue, Parity, TransverseSpectrum, J};

/// Relative distance from the pole below which a coupling counts as resonant.
pub const RESONANCE_TOL: f64 = 1e-12;

/// Default tolerance on the neglected channel remainder.
pub const TAIL_TOL: f64 = 1e-10;

/// How many transverse channels enter the closed-channel sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChannelCutoff {
    /// Every state of the spectrum.
    All,
    /// Channels `1..=n`.
    Fixed(usize),
    /// Smallest cutoff whose remainder over the grid basis is below `tail_tol`.
    Auto { tail_tol: f64 },
}

/// Lowest scattering energy at quasi-momentum `k`: `E(k) = -2J cos k + E₀`.
pub fn energy_at(spectrum: &TransverseSpectrum, k: f64) -> f64 {
    -2.0 * J * k.cos() + spectrum.ground_energy()
}

/// Resonance position at quasi-momentum `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirValue {
    pub k: f64,
    /// `1/U_CIR(k)`; zero when no channel couples to the impurity.
    pub inverse: f64,
    /// Highest channel index included.
    pub n_cut: usize,
    /// Magnitude of the neglected remainder of `1/U_CIR` over the grid basis.
    pub tail: f64,
    /// Decay factors of channels `1..=n_cut`; `None` for odd channels of a
    /// symmetric trap, which never couple to the impurity.
    pub alphas: Vec<Option<AlphaValue>>,
}

impl CirValue {
    /// `U_CIR(k)`, or `None` if the closed-channel sum vanishes.
    pub fn u_cir(&self) -> Option<f64> {
        (self.inverse != 0.0).then(|| 1.0 / self.inverse)
    }
}

fn validate_k(k: f64) -> Result<()> {
    if !(k.is_finite() && (0.0..std::f64::consts::PI).contains(&k)) {
        return Err(invalid(format!("quasi-momentum must lie in [0, π), got {k}")));
    }
    Ok(())
}

/// `1/U_CIR(k) = Σₙ |ψₙ(0)|² / (2Jαₙ + E(k) - Eₙ)` over closed channels `n ≥ 1`.
pub fn u_cir(spectrum: &TransverseSpectrum, k: f64, cutoff: ChannelCutoff) -> Result<CirValue> {
    validate_k(k)?;
    let e = energy_at(spectrum, k);
    let mut alphas = Vec::with_capacity(spectrum.len().saturating_sub(1));
    let mut terms = Vec::with_capacity(alphas.capacity());
    for n in 1..spectrum.len() {
        if spectrum.parity(n) == Some(Parity::Odd) {
            terms.push(0.0);
            alphas.push(None);
            continue;
        }
        let alpha = alpha_closed(spectrum.energy(n), e, J)?;
        let psi = spectrum.origin_amplitude(n);
        terms.push(psi * psi / alpha.denominator);
        alphas.push(Some(alpha));
    }
    // remainders[i] = Σ_{m ≥ i} terms[m], accumulated from the small end
    let mut remainders = vec![0.0; terms.len() + 1];
    for i in (0..terms.len()).rev() {
        remainders[i] = remainders[i + 1] + terms[i];
    }
    let (n_cut, tail_tol) = match cutoff {
        ChannelCutoff::All => (terms.len(), f64::INFINITY),
        ChannelCutoff::Fixed(n) => {
            if n > terms.len() {
                return Err(invalid(format!(
                    "cutoff {n} exceeds the {} available closed channels",
                    terms.len()
                )));
            }
            (n, f64::INFINITY)
        }
        ChannelCutoff::Auto { tail_tol } => {
            let n = (0..=terms.len()).find(|&n| remainders[n].abs() <= tail_tol).unwrap_or(terms.len());
            (n, tail_tol)
        }
    };
    let tail = remainders[n_cut].abs();
    if tail > tail_tol {
        return Err(Error::TailTooLarge { tail, tol: tail_tol });
    }
    let inverse = terms[..n_cut].iter().sum();
    alphas.truncate(n_cut);
    Ok(CirValue { k, inverse, n_cut, tail, alphas })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringResult {
    pub k: f64,
    pub u: f64,
    pub u1d: f64,
    /// Scattering length, for `k = 0` and `U1D != 0`.
    pub a: Option<f64>,
    /// Phase shift in `(-π/2, π/2)`, for `k > 0`.
    pub delta_k: Option<f64>,
    /// `bₙ` for `n = 1, 2, …`, normalized to the open channel
    /// `(|x| - a)ψ₀` at `k = 0` and `cos(k|x| + δ)ψ₀` otherwise.
    pub channel_amplitudes: Vec<f64>,
}

/// Effective 1D coupling at bare coupling `u` and quasi-momentum `k`.
pub fn effective_u1d(spectrum: &TransverseSpectrum, u: f64, k: f64) -> Result<ScatteringResult> {
    let cir = u_cir(spectrum, k, ChannelCutoff::All)?;
    effective_u1d_with(spectrum, &cir, u)
}

/// Same as [`effective_u1d`] with a precomputed resonance sum, for sweeps.
pub fn effective_u1d_with(spectrum: &TransverseSpectrum, cir: &CirValue, u: f64) -> Result<ScatteringResult> {
    if !u.is_finite() {
        return Err(invalid(format!("coupling must be finite, got {u}")));
    }
    let k = cir.k;
    let psi0 = spectrum.origin_amplitude(0);
    if psi0 == 0.0 {
        return Err(invalid("the transverse ground state vanishes at the impurity"));
    }
    let detuning = 1.0 - u * cir.inverse;
    if detuning.abs() < RESONANCE_TOL {
        return Err(Error::AtResonance { u, u_cir: 1.0 / cir.inverse });
    }
    let u1d = u * psi0 * psi0 / detuning;
    let sin_k = k.sin();
    let (a, delta_k, scale) = if k == 0.0 {
        // Ψ(0,0) = 2J/(Uψ₀(0)) in the (|x| - a) normalization
        let a = (u1d != 0.0).then(|| -2.0 * J / u1d);
        let scale = if u == 0.0 { 0.0 } else { 2.0 * J / psi0 };
        (a, None, scale)
    } else {
        let delta = (-u1d / (2.0 * J * sin_k)).atan();
        (None, Some(delta), -2.0 * J * sin_k * delta.sin() / psi0)
    };
    let channel_amplitudes = cir
        .alphas
        .iter()
        .enumerate()
        .map(|(i, alpha)| match alpha {
            Some(alpha) => scale * spectrum.origin_amplitude(i + 1) / alpha.denominator,
            None => 0.0,
        })
        .collect();
    Ok(ScatteringResult { k, u, u1d, a, delta_k, channel_amplitudes })
}

/// Midpoints of the grid intervals on which `U1D` flips sign. Both poles and
/// zeros show up; a separable problem has exactly one of each.
pub fn sign_changes(spectrum: &TransverseSpectrum, cir: &CirValue, grid: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let value = |u: f64| -> Result<Option<f64>> {
        match effective_u1d_with(spectrum, cir, u) {
            Ok(r) => Ok(Some(r.u1d)),
            Err(Error::AtResonance { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    for w in grid.windows(2) {
        let (Some(lo), Some(hi)) = (value(w[0])?, value(w[1])?) else {
            continue;
        };
        if lo != 0.0 && hi != 0.0 && lo.signum() != hi.signum() {
            out.push(0.5 * (w[0] + w[1]));
        }
    }
    Ok(out)
}
