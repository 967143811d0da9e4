//! Transverse trap spectra and the closed-channel decay factors.
//!
//! Energies are measured in units of the tunnelling rate `J` (which is set to
//! one) and lengths in lattice sites. The transverse Hamiltonian on a grid
//! `y ∈ [-y_max, y_max]` with hard walls is
//! `H_y = -J Σ (|y+1⟩⟨y| + h.c.) + Σ V(y) |y⟩⟨y|`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::tridiag::symmetric_tridiagonal_eigen;

/// Tunnelling rate; the unit of energy.
pub const J: f64 = 1.0;

/// Edge amplitude a retained state must stay below.
pub const EDGE_TOL: f64 = 1e-10;

/// Amplitudes at the origin smaller than this count as zero (odd states).
pub const NODE_TOL: f64 = 1e-12;

const MAX_AUTO_Y: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrapKind {
    /// `V(y) = Ω y²`.
    Harmonic { omega: f64 },
    /// `V(y) = V₀ - V₀ δ_{y,0}`: one bound state below a transverse continuum.
    DeltaWell { v0: f64 },
    /// Two sites `{0, 1}` with open boundaries and `V(1) = 2V`.
    TwoSite { v: f64 },
    /// Explicit values; sites missing from the table take `outside`.
    Tabulated { values: BTreeMap<i64, f64>, outside: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    pub kind: TrapKind,
    /// Grid half-width. Ignored by the two-site trap.
    pub y_max: usize,
    /// Fail with `NonSymmetric` instead of falling back to an unreduced solve.
    #[serde(default)]
    pub require_symmetric: bool,
}

impl TrapSpec {
    pub fn harmonic(omega: f64, y_max: usize) -> Self {
        Self::new(TrapKind::Harmonic { omega }, y_max)
    }

    pub fn delta_well(v0: f64, y_max: usize) -> Self {
        Self::new(TrapKind::DeltaWell { v0 }, y_max)
    }

    pub fn two_site(v: f64) -> Self {
        Self::new(TrapKind::TwoSite { v }, 1)
    }

    pub fn tabulated(values: BTreeMap<i64, f64>, outside: f64, y_max: usize) -> Self {
        Self::new(TrapKind::Tabulated { values, outside }, y_max)
    }

    pub fn new(kind: TrapKind, y_max: usize) -> Self {
        Self { kind, y_max, require_symmetric: false }
    }

    pub fn requiring_symmetry(mut self) -> Self {
        self.require_symmetric = true;
        self
    }

    /// Harmonic trap on a grid of exactly `n_states` sites, so that the
    /// retained transverse basis is complete on that grid.
    pub fn harmonic_complete(omega: f64, n_states: usize) -> Result<Self> {
        if n_states % 2 == 0 || n_states < 3 {
            return Err(invalid(format!(
                "a symmetric grid needs an odd number of sites >= 3, got {n_states}"
            )));
        }
        Ok(Self::harmonic(omega, (n_states - 1) / 2))
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            TrapKind::Harmonic { omega } => {
                if !(omega.is_finite() && *omega > 0.0) {
                    return Err(invalid(format!("harmonic trap needs Ω > 0, got {omega}")));
                }
            }
            TrapKind::DeltaWell { v0 } => {
                if !(v0.is_finite() && *v0 > 0.0) {
                    return Err(invalid(format!(
                        "delta well needs V₀ > 0 (V₀ = 0 has no bound state), got {v0}"
                    )));
                }
            }
            TrapKind::TwoSite { v } => {
                if !v.is_finite() {
                    return Err(invalid("two-site trap strength must be finite"));
                }
                return Ok(());
            }
            TrapKind::Tabulated { values, outside } => {
                if !outside.is_finite() || values.values().any(|v| !v.is_finite()) {
                    return Err(invalid("tabulated potential must be finite"));
                }
            }
        }
        if self.y_max == 0 {
            return Err(invalid("y_max must be positive"));
        }
        Ok(())
    }

    pub fn potential(&self, y: i64) -> f64 {
        match &self.kind {
            TrapKind::Harmonic { omega } => omega * (y * y) as f64,
            TrapKind::DeltaWell { v0 } => {
                if y == 0 {
                    0.0
                } else {
                    *v0
                }
            }
            TrapKind::TwoSite { v } => {
                if y == 1 {
                    2.0 * v
                } else {
                    0.0
                }
            }
            TrapKind::Tabulated { values, outside } => values.get(&y).copied().unwrap_or(*outside),
        }
    }

    pub fn sites(&self) -> Vec<i64> {
        match self.kind {
            TrapKind::TwoSite { .. } => vec![0, 1],
            _ => {
                let y = self.y_max as i64;
                (-y..=y).collect()
            }
        }
    }

    /// First `y > 0` with `V(y) != V(-y)`, if any.
    pub fn asymmetry(&self) -> Option<i64> {
        match &self.kind {
            TrapKind::Harmonic { .. } | TrapKind::DeltaWell { .. } => None,
            TrapKind::TwoSite { .. } => Some(1),
            TrapKind::Tabulated { values, .. } => {
                let reach = values
                    .keys()
                    .map(|y| y.unsigned_abs() as i64)
                    .max()
                    .unwrap_or(0)
                    .min(self.y_max as i64);
                (1..=reach).find(|&y| {
                    let (a, b) = (self.potential(y), self.potential(-y));
                    (a - b).abs() > 1e-14 * (1.0 + a.abs().max(b.abs()))
                })
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry().is_none()
    }

    /// Smallest grid half-width on which the lowest `n_states` states all
    /// decay below `tol` at the walls.
    pub fn auto_y_max(kind: TrapKind, n_states: usize, tol: f64) -> Result<usize> {
        if n_states == 0 {
            return Err(invalid("auto y_max needs at least one state"));
        }
        if let TrapKind::DeltaWell { v0 } = kind {
            if n_states > 1 {
                return Err(invalid("the delta well has a single bound state"));
            }
            let (beta, norm) = delta_well_decay(v0);
            let y = ((tol / norm).ln() / beta.ln()).ceil().max(1.0);
            return Ok(y as usize);
        }
        if matches!(kind, TrapKind::TwoSite { .. }) {
            return Ok(1);
        }
        let passes = |y_max: usize| -> Result<bool> {
            let spec = TrapSpec::new(kind.clone(), y_max);
            let spectrum = solve_transverse(&spec)?;
            if spectrum.len() < n_states {
                return Ok(false);
            }
            Ok((0..n_states).all(|n| spectrum.edge_amplitude(n) < tol))
        };
        let mut lo = 0usize;
        let mut hi = 4usize;
        while !passes(hi)? {
            lo = hi;
            hi = hi * 5 / 4 + 2;
            if hi > MAX_AUTO_Y {
                return Err(Error::EdgeLeak { state: n_states - 1, amplitude: f64::NAN, tol });
            }
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if passes(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Eigenstates of the transverse Hamiltonian on the truncated grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseSpectrum {
    sites: Vec<i64>,
    origin: usize,
    energies: Vec<f64>,
    wavefunctions: Vec<Vec<f64>>,
    parities: Option<Vec<Parity>>,
    origin_amplitudes: Vec<f64>,
}

impl TransverseSpectrum {
    fn from_states(sites: Vec<i64>, states: Vec<(f64, Option<Parity>, Vec<f64>)>) -> Self {
        let origin = sites.iter().position(|&y| y == 0).expect("grid contains y = 0");
        let has_parity = states.iter().all(|s| s.1.is_some());
        let mut energies = Vec::with_capacity(states.len());
        let mut wavefunctions = Vec::with_capacity(states.len());
        let mut parities = Vec::with_capacity(states.len());
        for (e, p, psi) in states {
            energies.push(e);
            parities.push(p.unwrap_or(Parity::Even));
            wavefunctions.push(psi);
        }
        let origin_amplitudes = wavefunctions.iter().map(|psi| psi[origin]).collect();
        Self {
            sites,
            origin,
            energies,
            wavefunctions,
            parities: has_parity.then_some(parities),
            origin_amplitudes,
        }
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn origin_index(&self) -> usize {
        self.origin
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.energies[n]
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn psi(&self, n: usize) -> &[f64] {
        &self.wavefunctions[n]
    }

    /// `ψₙ(0)`.
    pub fn origin_amplitude(&self, n: usize) -> f64 {
        self.origin_amplitudes[n]
    }

    pub fn origin_amplitudes(&self) -> &[f64] {
        &self.origin_amplitudes
    }

    pub fn parity(&self, n: usize) -> Option<Parity> {
        self.parities.as_ref().map(|p| p[n])
    }

    pub fn has_parity(&self) -> bool {
        self.parities.is_some()
    }

    pub fn edge_amplitude(&self, n: usize) -> f64 {
        let psi = &self.wavefunctions[n];
        psi[0].abs().max(psi[psi.len() - 1].abs())
    }

    pub fn require_edge_decay(&self, n_states: usize, tol: f64) -> Result<()> {
        for n in 0..n_states.min(self.len()) {
            let amplitude = self.edge_amplitude(n);
            if amplitude >= tol {
                return Err(Error::EdgeLeak { state: n, amplitude, tol });
            }
        }
        Ok(())
    }

    /// Keeps the lowest `n` states.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            sites: self.sites.clone(),
            origin: self.origin,
            energies: self.energies[..n].to_vec(),
            wavefunctions: self.wavefunctions[..n].to_vec(),
            parities: self.parities.as_ref().map(|p| p[..n].to_vec()),
            origin_amplitudes: self.origin_amplitudes[..n].to_vec(),
        }
    }

    /// `max |⟨ψₙ|ψₘ⟩ - δₙₘ|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (n, a) in self.wavefunctions.iter().enumerate() {
            for (m, b) in self.wavefunctions.iter().enumerate().skip(n) {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let target = if n == m { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Solves the transverse problem on the grid described by `spec`.
///
/// Symmetric traps are diagonalized separately in the even and odd sectors,
/// so parity labels are exact and odd states vanish identically at `y = 0`.
/// The delta well returns only its single bound state.
pub fn solve_transverse(spec: &TrapSpec) -> Result<TransverseSpectrum> {
    spec.validate()?;
    if spec.require_symmetric {
        if let Some(y) = spec.asymmetry() {
            return Err(Error::NonSymmetric { y });
        }
    }
    match spec.kind {
        TrapKind::DeltaWell { v0 } => Ok(delta_well_bound_state(v0, spec.y_max)),
        TrapKind::TwoSite { .. } => {
            let sites = spec.sites();
            let diag: Vec<f64> = sites.iter().map(|&y| spec.potential(y)).collect();
            let eig = symmetric_tridiagonal_eigen(&diag, &[-J])?;
            let states = eig
                .values
                .into_iter()
                .zip(eig.vectors)
                .map(|(e, mut v)| {
                    fix_sign(&mut v);
                    (e, None, v)
                })
                .collect();
            Ok(TransverseSpectrum::from_states(sites, states))
        }
        _ if spec.is_symmetric() => solve_by_parity(spec),
        _ => {
            let sites = spec.sites();
            let diag: Vec<f64> = sites.iter().map(|&y| spec.potential(y)).collect();
            let off = vec![-J; diag.len() - 1];
            let eig = symmetric_tridiagonal_eigen(&diag, &off)?;
            let states = eig
                .values
                .into_iter()
                .zip(eig.vectors)
                .map(|(e, mut v)| {
                    fix_sign(&mut v);
                    (e, None, v)
                })
                .collect();
            Ok(TransverseSpectrum::from_states(sites, states))
        }
    }
}

fn solve_by_parity(spec: &TrapSpec) -> Result<TransverseSpectrum> {
    let y_max = spec.y_max;
    let sites = spec.sites();
    let width = sites.len();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;

    // even sector: |0⟩, (|y⟩ + |-y⟩)/√2
    let even_diag: Vec<f64> = (0..=y_max as i64).map(|y| spec.potential(y)).collect();
    let mut even_off = vec![-J; y_max];
    even_off[0] = -std::f64::consts::SQRT_2 * J;
    let even = symmetric_tridiagonal_eigen(&even_diag, &even_off)?;

    // odd sector: (|y⟩ - |-y⟩)/√2, y ≥ 1
    let odd_diag: Vec<f64> = (1..=y_max as i64).map(|y| spec.potential(y)).collect();
    let odd_off = vec![-J; y_max - 1];
    let odd = symmetric_tridiagonal_eigen(&odd_diag, &odd_off)?;

    let mut states = Vec::with_capacity(width);
    for (e, mut c) in even.values.into_iter().zip(even.vectors) {
        fix_sign(&mut c);
        let mut psi = vec![0.0; width];
        psi[y_max] = c[0];
        for y in 1..=y_max {
            psi[y_max + y] = c[y] * inv_sqrt2;
            psi[y_max - y] = c[y] * inv_sqrt2;
        }
        states.push((e, Some(Parity::Even), psi));
    }
    for (e, mut c) in odd.values.into_iter().zip(odd.vectors) {
        fix_sign(&mut c);
        let mut psi = vec![0.0; width];
        for y in 1..=y_max {
            psi[y_max + y] = c[y - 1] * inv_sqrt2;
            psi[y_max - y] = -c[y - 1] * inv_sqrt2;
        }
        states.push((e, Some(Parity::Odd), psi));
    }
    // stable: even precedes odd on exact ties
    states.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(TransverseSpectrum::from_states(sites, states))
}

/// Makes the first non-negligible component positive.
fn fix_sign(v: &mut [f64]) {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * scale) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Decay ratio `β` and `ψ₀(0)` of the delta-well bound state `ψ₀(y) ∝ β^|y|`.
fn delta_well_decay(v0: f64) -> (f64, f64) {
    let s = (v0 * v0 + 4.0 * J * J).sqrt() / J;
    let beta = 2.0 / (s + (s * s - 4.0).sqrt());
    let norm = ((1.0 - beta * beta) / (1.0 + beta * beta)).sqrt();
    (beta, norm)
}

/// Exact infinite-lattice bound state of the delta well sampled on the grid.
fn delta_well_bound_state(v0: f64, y_max: usize) -> TransverseSpectrum {
    let energy = v0 - (v0 * v0 + 4.0 * J * J).sqrt();
    let (beta, norm) = delta_well_decay(v0);
    let y = y_max as i64;
    let sites: Vec<i64> = (-y..=y).collect();
    let psi = sites.iter().map(|s| norm * beta.powi(s.abs() as i32)).collect();
    TransverseSpectrum::from_states(sites, vec![(energy, Some(Parity::Even), psi)])
}

/// Decay factor of a closed channel and its Green's denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaValue {
    pub alpha: f64,
    /// `E + 2 J_eff α - E_channel`, always negative.
    pub denominator: f64,
    /// `(E_channel - E) / J_eff`.
    pub g: f64,
}

/// Solves `-J_eff (1 + α²)/α + E_channel = E` for the root with `0 < α < 1`.
pub fn alpha_closed(channel_energy: f64, target_energy: f64, j_eff: f64) -> Result<AlphaValue> {
    if !(j_eff.is_finite() && j_eff > 0.0) {
        return Err(invalid(format!("effective tunnelling must be positive, got {j_eff}")));
    }
    let g = (channel_energy - target_energy) / j_eff;
    if g.is_nan() || g <= 2.0 {
        return Err(Error::OpenChannel { g });
    }
    let root = ((g - 2.0) * (g + 2.0)).sqrt();
    // 2/(g + √(g²-4)) equals (g - √(g²-4))/2 without the cancellation
    let alpha = 2.0 / (g + root);
    Ok(AlphaValue { alpha, denominator: -j_eff * root, g })
}
