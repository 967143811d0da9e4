use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{AlphaValue, Parity, TransverseSpectrum, J};

/// Sign convention for the collective tunnelling rate of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum JkSign {
    /// `J_K = 2J cos(K/2)`: the pair band bottom sits at `-2J_K`, like the
    /// single-particle `-2J`.
    #[default]
    Physical,
    /// `J_K = -2J cos(K/2)`, kept to test the opposite convention.
    Flipped,
}

impl JkSign {
    pub fn j_k(self, total_k: f64) -> f64 {
        let magnitude = 2.0 * J * (0.5 * total_k).cos();
        match self {
            JkSign::Physical => magnitude,
            JkSign::Flipped => -magnitude,
        }
    }
}

/// A closed pair channel `(n₁, n₂)` with `n₁ ≤ n₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairChannel {
    pub n1: usize,
    pub n2: usize,
    pub alpha: AlphaValue,
    /// Combined parity, for symmetric traps.
    pub parity_weight: Option<Parity>,
}

/// Where the pair is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    /// Total quasi-momentum `K`, `|K| < π`.
    pub total_k: f64,
    /// Relative quasi-momentum `k`, `0 ≤ k < π`.
    pub k: f64,
    /// Number of transverse states per particle.
    pub n_cut: usize,
    pub sign: JkSign,
}

impl KernelParams {
    pub fn new(n_cut: usize) -> Self {
        Self { total_k: 0.0, k: 0.0, n_cut, sign: JkSign::Physical }
    }
}

/// Pair overlaps `R(c; c') = Σ_y φ_c(y) φ_{c'}(y)` of the symmetrized
/// products `φ_c = ψ_{n₁}ψ_{n₂}` (times `√2` for `n₁ ≠ n₂`), with the Green's
/// denominators of every closed channel.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapKernel {
    pub params: KernelParams,
    pub j_k: f64,
    /// Scattering energy `-2J_K cos k + 2E₀`.
    pub energy: f64,
    pub channels: Vec<PairChannel>,
    /// Closed-channel block of `R`.
    pub r: DMatrix<f64>,
    /// `R(c; 0,0)`.
    pub entrance_column: DVector<f64>,
    /// `R(0,0; 0,0)`.
    pub r0000: f64,
}

impl OverlapKernel {
    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn denominators(&self) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.channels.iter().map(|c| c.alpha.denominator))
    }

    /// `M = R D⁻¹`, the matrix of the linear system `(1 - U M) I = r`.
    pub fn m_matrix(&self) -> DMatrix<f64> {
        let mut m = self.r.clone();
        for (j, c) in self.channels.iter().enumerate() {
            m.column_mut(j).scale_mut(1.0 / c.alpha.denominator);
        }
        m
    }

    /// `max |R - Rᵀ|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.r - self.r.transpose()).abs().max()
    }
}

/// `φ(y) = ψ_{n₁}(y)ψ_{n₂}(y)`, times `√2` for distinct indices.
pub fn pair_function(spectrum: &TransverseSpectrum, n1: usize, n2: usize) -> Vec<f64> {
    let weight = if n1 == n2 { 1.0 } else { std::f64::consts::SQRT_2 };
    spectrum.psi(n1).iter().zip(spectrum.psi(n2)).map(|(a, b)| weight * a * b).collect()
}

/// A single overlap `R(n₁,n₂; m₁,m₂)`.
pub fn overlap(spectrum: &TransverseSpectrum, a: (usize, usize), b: (usize, usize)) -> f64 {
    let fa = pair_function(spectrum, a.0, a.1);
    let fb = pair_function(spectrum, b.0, b.1);
    fa.iter().zip(&fb).map(|(x, y)| x * y).sum()
}

/// Decay factor for a channel with collective tunnelling `j_eff` of either
/// sign: the root of `α² - gα + 1 = 0` with `|α| < 1`, `g = (E_c - E)/J_eff`.
pub fn pair_alpha(channel_energy: f64, target_energy: f64, j_eff: f64) -> Result<AlphaValue> {
    if j_eff == 0.0 || !j_eff.is_finite() {
        return Err(invalid("collective tunnelling vanishes (|K| = π)"));
    }
    let g = (channel_energy - target_energy) / j_eff;
    if g.is_nan() || g.abs() <= 2.0 {
        return Err(Error::OpenChannel { g });
    }
    let root = ((g.abs() - 2.0) * (g.abs() + 2.0)).sqrt();
    let alpha = 2.0 / (g + root.copysign(g));
    Ok(AlphaValue { alpha, denominator: j_eff * (2.0 * alpha - g), g })
}

/// Pair channels `(n₁ ≤ n₂) ≠ (0,0)` with `n₂ < n_cut`, lexicographic. For
/// symmetric traps only even combined parity couples to the entrance channel.
pub fn pair_channels(spectrum: &TransverseSpectrum, n_cut: usize) -> Vec<(usize, usize, Option<Parity>)> {
    let mut out = Vec::new();
    for n1 in 0..n_cut {
        for n2 in n1..n_cut {
            if (n1, n2) == (0, 0) {
                continue;
            }
            let parity = match (spectrum.parity(n1), spectrum.parity(n2)) {
                (Some(a), Some(b)) => Some(if a == b { Parity::Even } else { Parity::Odd }),
                _ => None,
            };
            if parity == Some(Parity::Odd) {
                continue;
            }
            out.push((n1, n2, parity));
        }
    }
    out
}

/// Assembles the overlap kernel and the closed-channel denominators.
pub fn build_kernel(spectrum: &TransverseSpectrum, params: KernelParams) -> Result<OverlapKernel> {
    let KernelParams { total_k, k, n_cut, sign } = params;
    if n_cut < 2 || n_cut > spectrum.len() {
        return Err(invalid(format!(
            "channel cutoff {n_cut} must lie in [2, {}] (transverse states available)",
            spectrum.len()
        )));
    }
    if !(total_k.abs() < std::f64::consts::PI) {
        return Err(invalid(format!("total quasi-momentum must satisfy |K| < π, got {total_k}")));
    }
    if !(0.0..std::f64::consts::PI).contains(&k) {
        return Err(invalid(format!("relative quasi-momentum must lie in [0, π), got {k}")));
    }
    let j_k = sign.j_k(total_k);
    let e0 = spectrum.ground_energy();
    let energy = -2.0 * j_k * k.cos() + 2.0 * e0;

    let pairs = pair_channels(spectrum, n_cut);
    let mut channels = Vec::with_capacity(pairs.len());
    for (n1, n2, parity_weight) in pairs {
        let alpha = pair_alpha(spectrum.energy(n1) + spectrum.energy(n2), energy, j_k)?;
        if !(alpha.denominator < 0.0) {
            return Err(Error::SignConventionViolation { n1, n2, denominator: alpha.denominator });
        }
        channels.push(PairChannel { n1, n2, alpha, parity_weight });
    }

    let sites = spectrum.sites().len();
    let phi = DMatrix::from_fn(channels.len(), sites, |c, y| {
        let ch = &channels[c];
        let w = if ch.n1 == ch.n2 { 1.0 } else { std::f64::consts::SQRT_2 };
        w * spectrum.psi(ch.n1)[y] * spectrum.psi(ch.n2)[y]
    });
    let entrance = DVector::from_iterator(sites, spectrum.psi(0).iter().map(|p| p * p));
    let r = &phi * phi.transpose();
    let entrance_column = &phi * &entrance;
    let r0000 = entrance.dot(&entrance);
    Ok(OverlapKernel { params, j_k, energy, channels, r, entrance_column, r0000 })
}
