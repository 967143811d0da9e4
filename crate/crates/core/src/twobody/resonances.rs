use serde::{Deserialize, Serialize};

use super::kernel::OverlapKernel;
use super::solve::{determinant_sign, SpectralKernel};
use crate::error::{invalid, Result};
use crate::roots::brent;

/// Poles whose residue is below this fraction of the strongest one in the
/// window leave no trace on `U1D` and are not counted.
pub const VISIBLE_WEIGHT: f64 = 1e-5;
/// Visible poles below this fraction of the strongest are narrow.
pub const NARROW_WEIGHT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonanceClass {
    Broad,
    Narrow,
    /// Decoupled from the entrance channel to numerical accuracy.
    Suppressed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub u_cir: f64,
    /// Residue of `U1D` at the pole, `U1D ≈ residue / (U - U_CIR)`.
    pub residue: f64,
    /// `|residue|` relative to the strongest pole in the window.
    pub relative_weight: f64,
    pub class: ResonanceClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub window: (f64, f64),
    /// Every pole in the window, ascending in `U`.
    pub resonances: Vec<Resonance>,
    /// Couplings where `U1D` crosses zero away from `U = 0`.
    pub zero_crossings: Vec<f64>,
    pub method: String,
}

impl ResonanceReport {
    /// Poles that show up on `U1D`.
    pub fn cirs(&self) -> impl Iterator<Item = &Resonance> {
        self.resonances.iter().filter(|r| r.class != ResonanceClass::Suppressed)
    }

    pub fn broad(&self) -> Option<&Resonance> {
        self.cirs().filter(|r| r.class == ResonanceClass::Broad).max_by(|a, b| a.residue.abs().total_cmp(&b.residue.abs()))
    }

    pub fn count(&self, class: ResonanceClass) -> usize {
        self.resonances.iter().filter(|r| r.class == class).count()
    }
}

/// CIRs from the eigenvalues of the kernel (the determinant condition is
/// linear in `U`), plus the zero crossings of `U1D` between them.
///
/// Zero crossings are searched on `I₀₀` restricted to the visible poles: each
/// suppressed pole drags a zero crossing along within its own negligible
/// width, which is not an observable feature of the curve.
pub fn locate_resonances(kernel: &OverlapKernel, window: (f64, f64)) -> Result<ResonanceReport> {
    let (lo, hi) = window;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid(format!("resonance window [{lo}, {hi}] is empty")));
    }
    let spectral = SpectralKernel::new(kernel);
    let mut poles: Vec<(f64, f64, f64, f64)> = spectral
        .lambdas
        .iter()
        .zip(&spectral.weights)
        .filter(|(l, _)| **l > 0.0)
        .map(|(l, p)| {
            let u = -1.0 / l;
            (u, -u * u * p / l, *l, *p)
        })
        .filter(|(u, ..)| *u >= lo && *u <= hi)
        .collect();
    poles.sort_by(|a, b| a.0.total_cmp(&b.0));
    let strongest = poles.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let resonances: Vec<Resonance> = poles
        .iter()
        .map(|&(u_cir, residue, ..)| {
            let relative_weight = if strongest > 0.0 { residue.abs() / strongest } else { 0.0 };
            let class = if relative_weight < VISIBLE_WEIGHT {
                ResonanceClass::Suppressed
            } else if relative_weight < NARROW_WEIGHT {
                ResonanceClass::Narrow
            } else {
                ResonanceClass::Broad
            };
            Resonance { u_cir, residue, relative_weight, class }
        })
        .collect();

    // I₀₀ without the suppressed poles in the window
    let visible: Vec<(f64, f64)> = poles
        .iter()
        .zip(&resonances)
        .filter(|(_, r)| r.class != ResonanceClass::Suppressed)
        .map(|(p, _)| (p.2, p.3))
        .collect();
    let outside: Vec<(f64, f64)> = spectral
        .lambdas
        .iter()
        .zip(&spectral.weights)
        .filter(|(l, _)| {
            let u = -1.0 / **l;
            !(**l > 0.0 && u >= lo && u <= hi)
        })
        .map(|(l, p)| (*l, *p))
        .collect();
    let reduced = |u: f64| {
        let smooth: f64 = outside.iter().map(|(l, p)| p / (1.0 + u * l)).sum();
        let sharp: f64 = visible.iter().map(|(l, p)| p / (1.0 + u * l)).sum();
        spectral.r0000 - u * (smooth + sharp)
    };

    let mut edges = vec![lo];
    edges.extend(resonances.iter().filter(|r| r.class != ResonanceClass::Suppressed).map(|r| r.u_cir));
    edges.push(hi);
    let mut zero_crossings = Vec::new();
    for pair in edges.windows(2) {
        let span = pair[1] - pair[0];
        if span <= 0.0 {
            continue;
        }
        let shrink = 1e-12 * span.max(1.0);
        let (a, b) = (pair[0] + shrink, pair[1] - shrink);
        let (fa, fb) = (reduced(a), reduced(b));
        if fa.is_finite() && fb.is_finite() && fa * fb < 0.0 {
            let root = brent(reduced, a, b, 1e-13 * span.max(1.0))?;
            if root.abs() > 1e-9 {
                zero_crossings.push(root);
            }
        }
    }
    Ok(ResonanceReport { window, resonances, zero_crossings, method: "eigenvalue".into() })
}

/// Sign changes of `det(1 - U M)` on a uniform scan, refined by bisection.
pub fn determinant_scan(kernel: &OverlapKernel, window: (f64, f64), points: usize) -> Vec<f64> {
    let (lo, hi) = window;
    let step = (hi - lo) / points.max(1) as f64;
    let mut out = Vec::new();
    let mut prev = (lo, determinant_sign(kernel, lo));
    for i in 1..=points {
        let u = lo + step * i as f64;
        let s = determinant_sign(kernel, u);
        if s != 0.0 && prev.1 != 0.0 && s != prev.1 {
            let (mut a, mut b) = (prev.0, u);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid == a || mid == b {
                    break;
                }
                if determinant_sign(kernel, mid) == prev.1 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            out.push(0.5 * (a + b));
        }
        if s != 0.0 {
            prev = (u, s);
        }
    }
    out
}
