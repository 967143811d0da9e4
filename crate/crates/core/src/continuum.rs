//! Transverse wells with a finite number of bound states below a continuum.
//!
//! The well has depth `V₀ = V(|y| > R)` and finite range `R`. Continuum states
//! have energies `ε_q = V₀ - 2J cos q` and, outside the well, the form
//! `cos(q|y| + θ_q)`. Their weight at the impurity enters the resonance
//! condition through the integral `S(k)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{alpha_closed, solve_transverse, TransverseSpectrum, TrapKind, TrapSpec, EDGE_TOL, J};
use crate::quadrature::{adaptive, trapezoid};
use crate::single::{u_cir, ChannelCutoff, CirValue};

/// Absolute tolerance on the continuum integral.
pub const QUAD_TOL: f64 = 1e-10;

/// Points of the fixed trapezoid cross-check.
pub const CROSSCHECK_POINTS: usize = 10_000;

/// `|∂θ/∂q|` above which a sharp resonance is flagged.
pub const SHARP_THRESHOLD: f64 = 1e3;

const SCAN_POINTS: usize = 4096;
const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumState {
    pub q: f64,
    pub theta_q: f64,
    /// Inner amplitude `φ_q(0)` for unit asymptotic amplitude.
    pub phi0: f64,
    pub dtheta_dq: f64,
}

/// Even scattering state of the delta well, `tan θ_q = V₀/(2J sin q)`.
pub fn delta_well_state(v0: f64, q: f64) -> ContinuumState {
    let two_sin = 2.0 * J * q.sin();
    let theta_q = v0.atan2(two_sin);
    let phi0 = theta_q.cos();
    let dtheta_dq = -v0 * 2.0 * J * q.cos() / (two_sin * two_sin + v0 * v0);
    ContinuumState { q, theta_q, phi0, dtheta_dq }
}

/// `g(q) = L/π + (1/π) ∂θ_q/∂q`.
pub fn density_of_states(state: &ContinuumState, l: f64) -> f64 {
    (l + state.dtheta_dq) / PI
}

/// Symmetric finite-range well read off a trap description.
#[derive(Debug, Clone, PartialEq)]
pub struct Well {
    /// `V(0), V(1), …, V(R)`.
    pub inner: Vec<f64>,
    /// `V₀`, the potential for `|y| > R`.
    pub depth: f64,
}

impl Well {
    pub fn from_spec(spec: &TrapSpec) -> Result<Self> {
        spec.validate()?;
        match &spec.kind {
            TrapKind::DeltaWell { v0 } => Ok(Self { inner: vec![0.0], depth: *v0 }),
            TrapKind::Tabulated { values, outside } => {
                if let Some(y) = spec.asymmetry() {
                    return Err(Error::NonSymmetric { y });
                }
                let range = values.keys().map(|y| y.unsigned_abs() as usize).max().unwrap_or(0);
                let inner: Vec<f64> = (0..=range as i64).map(|y| spec.potential(y)).collect();
                if inner.iter().any(|v| *v > *outside) {
                    return Err(invalid("well potential must not exceed its asymptotic value V₀"));
                }
                if inner[0] >= *outside {
                    return Err(invalid("the well must be attractive at y = 0 (V(0) < V₀)"));
                }
                Ok(Self { inner, depth: *outside })
            }
            _ => Err(invalid("continuum sums need a delta well or a tabulated finite-range well")),
        }
    }

    pub fn range(&self) -> usize {
        self.inner.len() - 1
    }

    fn potential(&self, y: usize) -> f64 {
        self.inner.get(y).copied().unwrap_or(self.depth)
    }

    /// Even scattering state by outward transfer matrix from `ψ(0) = 1`,
    /// matched to `A cos(qy + θ)` at `y = R, R + 1`.
    pub fn state(&self, q: f64) -> ContinuumState {
        if self.range() == 0 {
            return delta_well_state(self.depth - self.inner[0], q);
        }
        let eps = self.depth - 2.0 * J * q.cos();
        let deps = 2.0 * J * q.sin();
        let r = self.range();
        // ψ and ∂ψ/∂q along y = 0..=R+1
        let mut psi = vec![1.0, (self.potential(0) - eps) / (2.0 * J)];
        let mut dpsi = vec![0.0, -deps / (2.0 * J)];
        for y in 1..=r {
            let v = self.potential(y) - eps;
            psi.push((v * psi[y] / J) - psi[y - 1]);
            dpsi.push((v * dpsi[y] - deps * psi[y]) / J - dpsi[y - 1]);
        }
        let (p0, p1, d0, d1) = (psi[r], psi[r + 1], dpsi[r], dpsi[r + 1]);
        let rf = r as f64;
        let (s0, c0) = (q * rf).sin_cos();
        let (s1, c1) = (q * (rf + 1.0)).sin_cos();
        let sq = q.sin();
        // A cos(qy + θ) = c cos(qy) - s sin(qy)
        let c = (p0 * s1 - p1 * s0) / sq;
        let s = (p0 * c1 - p1 * c0) / sq;
        // q-derivatives of c and s, including the trigonometric factors
        let dsq = q.cos();
        let dc = (d0 * s1 + p0 * (rf + 1.0) * c1 - d1 * s0 - p1 * rf * c0) / sq - c * dsq / sq;
        let ds = (d0 * c1 - p0 * (rf + 1.0) * s1 - d1 * c0 + p1 * rf * s0) / sq - s * dsq / sq;
        let amp2 = c * c + s * s;
        ContinuumState {
            q,
            theta_q: s.atan2(c),
            phi0: c.signum() / amp2.sqrt(),
            dtheta_dq: (c * ds - s * dc) / amp2,
        }
    }

    /// Bound states of the well: the grid eigenstates below the continuum
    /// edge `V₀ - 2J`, each required to decay before the walls.
    pub fn bound_states(&self, y_max: usize) -> Result<TransverseSpectrum> {
        if self.inner == [0.0] {
            return solve_transverse(&TrapSpec::delta_well(self.depth, y_max));
        }
        if y_max <= self.range() + 1 {
            return Err(invalid("y_max must exceed the well range"));
        }
        let values = (-(self.range() as i64)..=self.range() as i64)
            .map(|y| (y, self.inner[y.unsigned_abs() as usize]))
            .collect();
        let spectrum = solve_transverse(&TrapSpec::tabulated(values, self.depth, y_max))?;
        let edge = self.depth - 2.0 * J;
        let m = spectrum.energies().iter().take_while(|e| **e < edge).count();
        let bound = spectrum.truncated(m);
        bound.require_edge_decay(m, EDGE_TOL)?;
        Ok(bound)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpResonance {
    pub q0: f64,
    /// Full width in `q` from the peak height of `∂θ/∂q`.
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumSum {
    /// `S(k)` in units of `1/J`.
    pub value: f64,
    /// Part of `value` coming from `|q - q₀| < 10 × width` around flagged
    /// sharp resonances; zero when there are none.
    pub sharp_resonance_part: f64,
    pub quadrature_error: f64,
    /// Fixed-grid trapezoid evaluation of the same integral.
    pub crosscheck: f64,
    pub sharp_resonances: Vec<SharpResonance>,
}

/// `S(k) = (1/2π) ∫ dq |φ_q(0)|² / (E(k) + 2Jα_q - ε_q)` over `q ∈ (-π, π)`.
///
/// `ground_energy` is `E₀` of the well. The integrand is even in `q`, so the
/// integral runs over `(0, π)` and is doubled.
pub fn continuum_sum(well: &Well, ground_energy: f64, k: f64) -> Result<ContinuumSum> {
    let e = -2.0 * J * k.cos() + ground_energy;
    let integrand = |q: f64| -> Result<f64> {
        // the inner weight vanishes like sin²q at the band edges
        if q.sin().abs() < 1e-14 {
            return Ok(0.0);
        }
        let state = well.state(q);
        let eps = well.depth - 2.0 * J * q.cos();
        let alpha = alpha_closed(eps, e, J)?;
        Ok(state.phi0 * state.phi0 / alpha.denominator / PI)
    };
    // every channel must be closed; the lowest continuum energy is at q = 0
    alpha_closed(well.depth - 2.0 * J, e, J)?;

    let sharp = locate_sharp_resonances(well)?;
    let mut breakpoints = Vec::new();
    for r in &sharp {
        for m in [-10.0, -1.0, 0.0, 1.0, 10.0] {
            breakpoints.push(r.q0 + m * r.width);
        }
    }
    let f = |q: f64| integrand(q).unwrap_or(f64::NAN);
    let full = adaptive(f, 0.0, PI, &breakpoints, QUAD_TOL, MAX_INTERVALS)?;
    let mut sharp_part = 0.0;
    for r in &sharp {
        let lo = (r.q0 - 10.0 * r.width).max(0.0);
        let hi = (r.q0 + 10.0 * r.width).min(PI);
        sharp_part += adaptive(f, lo, hi, &[r.q0], QUAD_TOL, MAX_INTERVALS)?.value;
    }
    let crosscheck = trapezoid(f, 0.0, PI, CROSSCHECK_POINTS);
    Ok(ContinuumSum {
        value: full.value,
        sharp_resonance_part: sharp_part,
        quadrature_error: full.error,
        crosscheck,
        sharp_resonances: sharp,
    })
}

/// Scans `∂θ/∂q` on a uniform grid and localizes every peak above
/// [`SHARP_THRESHOLD`] by golden-section search.
pub fn locate_sharp_resonances(well: &Well) -> Result<Vec<SharpResonance>> {
    let h = PI / SCAN_POINTS as f64;
    let slope = |q: f64| well.state(q).dtheta_dq.abs();
    let mut out = Vec::new();
    for i in 1..SCAN_POINTS - 1 {
        let q = h * i as f64;
        let (a, b, c) = (slope(q - h), slope(q), slope(q + h));
        if b >= a && b > c && b > SHARP_THRESHOLD {
            let q0 = golden_max(&slope, q - h, q + h);
            let peak = slope(q0);
            if !peak.is_finite() {
                return Err(Error::SharpResonanceUnresolved { q });
            }
            // a Lorentzian phase step has peak slope 2/width
            let width = 2.0 / peak;
            if width < 1e-12 {
                return Err(Error::SharpResonanceUnresolved { q: q0 });
            }
            out.push(SharpResonance { q0, width });
        }
    }
    Ok(out)
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// Resonance condition including the continuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumCir {
    pub k: f64,
    /// Sum over the excited bound states `n = 1 … M-1`.
    pub bound_part: f64,
    pub continuum: ContinuumSum,
    /// `1/U_CIR(k)`.
    pub inverse: f64,
}

impl ContinuumCir {
    pub fn u_cir(&self) -> Option<f64> {
        (self.inverse != 0.0).then(|| 1.0 / self.inverse)
    }

    /// View as a plain resonance value, so the single-particle formulas for
    /// `U1D` and `δ_k` apply unchanged.
    pub fn as_cir_value(&self, bound: &CirValue) -> CirValue {
        CirValue { inverse: self.inverse, ..bound.clone() }
    }
}

/// `1/U_CIR(k) = Σ_{n=1}^{M-1} |ψₙ(0)|²/(2Jαₙ + E(k) - Eₙ) + S(k)`.
pub fn u_cir_with_continuum(bound: &TransverseSpectrum, well: &Well, k: f64) -> Result<ContinuumCir> {
    if bound.is_empty() {
        return Err(invalid("the well has no bound state"));
    }
    let bound_sum = u_cir(bound, k, ChannelCutoff::All)?;
    let continuum = continuum_sum(well, bound.ground_energy(), k)?;
    Ok(ContinuumCir {
        k,
        bound_part: bound_sum.inverse,
        inverse: bound_sum.inverse + continuum.value,
        continuum,
    })
}

/// `U_CIR` of the delta well at `k = 0`, where `1/U_CIR = S(0)` exactly.
pub fn delta_well_u_cir(v0: f64) -> Result<f64> {
    let spec = TrapSpec::delta_well(v0, 1);
    let well = Well::from_spec(&spec)?;
    let e0 = v0 - (v0 * v0 + 4.0 * J * J).sqrt();
    Ok(1.0 / continuum_sum(&well, e0, 0.0)?.value)
}
