//! A finite quasi-1D ring of `L` sites with periodic boundary conditions.
//!
//! On the ring a closed channel decays from the impurity in both directions,
//! `bₙ(αₙ^x + αₙ^{L-x})`, which replaces the infinite-system denominator
//! `J(1/αₙ - αₙ)` by
//! `Dₙ = J(1/αₙ - αₙ)(1 - αₙ^L)/(1 + αₙ^L)`.
//! The allowed momenta solve
//! `2J sin k tan(kL/2) = U|ψ₀(0)|² / (1 + U Σₙ |ψₙ(0)|²/Dₙ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{alpha_closed, Parity, TransverseSpectrum, J};
use crate::roots::brent;

/// Two roots closer than this in one branch are reported as a collision.
pub const COLLISION_TOL: f64 = 1e-8;

const SCAN_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingSolution {
    pub l: usize,
    pub u: f64,
    pub branch: usize,
    pub k: f64,
    /// `-2J cos k`, measured from `E₀`.
    pub energy: f64,
    /// Residual of the quantization condition in its pole-free form.
    pub residual: f64,
}

/// `Σₙ |ψₙ(0)|²/Dₙ(k)` for a ring of length `l`; `l = None` is the infinite line.
pub fn ring_channel_sum(spectrum: &TransverseSpectrum, k: f64, l: Option<usize>) -> Result<f64> {
    let e = -2.0 * J * k.cos() + spectrum.ground_energy();
    let mut sum = 0.0;
    for n in 1..spectrum.len() {
        if spectrum.parity(n) == Some(Parity::Odd) {
            continue;
        }
        let psi = spectrum.origin_amplitude(n);
        let alpha = alpha_closed(spectrum.energy(n), e, J)?;
        // J(1/α - α) = -denominator
        let mut d = -alpha.denominator;
        if let Some(l) = l {
            let p = alpha.alpha.powi(l as i32);
            d *= (1.0 - p) / (1.0 + p);
        }
        sum += psi * psi / d;
    }
    Ok(sum)
}

/// Largest momentum at which every coupled channel is still closed.
pub fn closed_momentum_limit(spectrum: &TransverseSpectrum) -> f64 {
    let gap = (1..spectrum.len())
        .filter(|&n| spectrum.parity(n) != Some(Parity::Odd))
        .map(|n| spectrum.energy(n) - spectrum.ground_energy())
        .fold(f64::INFINITY, f64::min);
    let c = 1.0 - gap / (2.0 * J);
    if c <= -1.0 {
        PI
    } else {
        c.acos()
    }
}

/// Quantization condition multiplied through by `cos(kL/2)(1 + UΣ)`, which
/// has no poles in `k`.
fn condition(spectrum: &TransverseSpectrum, u: f64, l: Option<usize>, l_phase: f64, k: f64) -> Result<f64> {
    let sigma = ring_channel_sum(spectrum, k, l)?;
    let psi0 = spectrum.origin_amplitude(0);
    let (s, c) = (0.5 * k * l_phase).sin_cos();
    Ok(2.0 * J * k.sin() * s * (1.0 + u * sigma) - u * psi0 * psi0 * c)
}

/// Momentum window of branch `m`: `((2m - 1)π/L, (2m + 1)π/L) ∩ (0, π)`.
pub fn branch_window(l: usize, branch: usize) -> Option<(f64, f64)> {
    let lf = l as f64;
    let lo = ((2.0 * branch as f64 - 1.0) * PI / lf).max(0.0);
    let hi = ((2.0 * branch as f64 + 1.0) * PI / lf).min(PI);
    (lo < hi).then_some((lo, hi))
}

pub fn branch_count(l: usize) -> usize {
    (0..).take_while(|&m| branch_window(l, m).is_some()).count()
}

fn validate(u: f64, l: usize) -> Result<()> {
    if l < 4 {
        return Err(invalid(format!("ring length must be at least 4, got {l}")));
    }
    if !u.is_finite() {
        return Err(invalid(format!("coupling must be finite, got {u}")));
    }
    Ok(())
}

/// All roots in a branch, ascending.
fn branch_roots(
    spectrum: &TransverseSpectrum,
    u: f64,
    l: usize,
    infinite_channels: bool,
    branch: usize,
) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = branch_window(l, branch).ok_or(Error::NoRootInBranch { branch })?;
    let k_open = closed_momentum_limit(spectrum);
    if lo >= k_open {
        // surfaces the OpenChannel error of the offending channel
        ring_channel_sum(spectrum, lo.max(k_open), None)?;
        return Err(Error::NoRootInBranch { branch });
    }
    // the upper part of a branch may reach open channels; only the closed
    // part is searched
    let hi = hi.min(k_open * (1.0 - 1e-12));
    let channel_l = (!infinite_channels).then_some(l);
    let lf = l as f64;
    let f = |k: f64| condition(spectrum, u, channel_l, lf, k);
    // k = 0 and k = π are excluded: no scattering state sits there
    let margin = 1e-13 * (hi - lo);
    let grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / SCAN_POINTS as f64)
        .map(|k| k.clamp(lo.max(margin), hi - if hi >= PI { margin } else { 0.0 }))
        .collect();
    let values: Vec<f64> = grid.iter().map(|&k| f(k)).collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for i in 0..SCAN_POINTS {
        let (a, b) = (grid[i], grid[i + 1]);
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 && i > 0 {
            continue;
        }
        if fa == 0.0 || fb == 0.0 || fa.signum() != fb.signum() {
            let mut failure = None;
            let k = brent(
                |k| match f(k) {
                    Ok(v) => v,
                    Err(e) => {
                        failure = Some(e);
                        f64::NAN
                    }
                },
                a,
                b,
                1e-15,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            if k > 0.0 && k < PI {
                roots.push((k, f(k)?.abs()));
            }
        }
    }
    Ok(roots)
}

fn solve(spectrum: &TransverseSpectrum, u: f64, l: usize, branch: usize, infinite_channels: bool) -> Result<RingSolution> {
    validate(u, l)?;
    let roots = branch_roots(spectrum, u, l, infinite_channels, branch)?;
    for w in roots.windows(2) {
        if (w[1].0 - w[0].0).abs() < COLLISION_TOL {
            return Err(Error::BranchCollision { branch, sep: (w[1].0 - w[0].0).abs() });
        }
    }
    let &(k, residual) = roots.first().ok_or(Error::NoRootInBranch { branch })?;
    Ok(RingSolution { l, u, branch, k, energy: -2.0 * J * k.cos(), residual })
}

/// Lowest root of the ring quantization condition in branch `branch`.
pub fn ring_momentum(spectrum: &TransverseSpectrum, u: f64, l: usize, branch: usize) -> Result<RingSolution> {
    solve(spectrum, u, l, branch, false)
}

/// The same quantization with the infinite-line coupling `U1D(k)` on the
/// right-hand side, i.e. with `αₙ^L` dropped from the channel sum.
pub fn ring_momentum_infinite_channels(
    spectrum: &TransverseSpectrum,
    u: f64,
    l: usize,
    branch: usize,
) -> Result<RingSolution> {
    solve(spectrum, u, l, branch, true)
}

/// Every root in every branch at coupling `u`.
pub fn ring_spectrum(spectrum: &TransverseSpectrum, u: f64, l: usize) -> Result<Vec<RingSolution>> {
    validate(u, l)?;
    let mut out = Vec::new();
    for branch in 0..branch_count(l) {
        match branch_roots(spectrum, u, l, false, branch) {
            Ok(roots) => out.extend(roots.into_iter().map(|(k, residual)| RingSolution {
                l,
                u,
                branch,
                k,
                energy: -2.0 * J * k.cos(),
                residual,
            })),
            Err(Error::OpenChannel { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Couplings at which a ring level reaches a fermionized energy
/// `-2J cos((2n + 1)π/L)`, restricted to `[u_lo, u_hi]`.
///
/// At `k = (2n + 1)π/L` the tangent diverges, so the right-hand side must
/// too: `U = -1/Σ(k)`. The channel sum is positive, hence every crossing
/// lies at negative `U`.
pub fn ring_cir_crossings(spectrum: &TransverseSpectrum, l: usize, u_lo: f64, u_hi: f64) -> Result<Vec<f64>> {
    validate(0.0, l)?;
    if !(u_lo < u_hi) {
        return Err(invalid("empty coupling window"));
    }
    let mut out = Vec::new();
    for n in 0.. {
        let k = (2 * n + 1) as f64 * PI / l as f64;
        if k >= PI {
            break;
        }
        let sigma = match ring_channel_sum(spectrum, k, Some(l)) {
            Ok(s) => s,
            Err(Error::OpenChannel { .. }) => break,
            Err(e) => return Err(e),
        };
        if sigma > 0.0 {
            let u = -1.0 / sigma;
            if (u_lo..=u_hi).contains(&u) {
                out.push(u);
            }
        }
    }
    Ok(out)
}
