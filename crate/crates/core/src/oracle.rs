//! Brute-force reference solutions on the full two-dimensional lattice,
//! independent of the channel expansion.
//!
//! The threshold scattering state is even in `x`, so only `x ≥ 0` is kept and
//! the impurity row uses the mirror image of `x = 1`. Fixing the open-channel
//! amplitude at the far end `x = Lx` turns the problem into a block-tridiagonal
//! linear system, solved by block elimination. Away from the impurity the
//! open-channel projection is exactly linear, `p(x) ∝ x - a`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{alpha_closed, solve_transverse, TrapSpec, J};
use crate::twobody::kernel::{pair_alpha, JkSign};

/// Largest closed-channel weight tolerated in the fit window.
pub const CONTAMINATION_TOL: f64 = 1e-8;
/// Required `Lx (1 - α)` for the slowest closed channel.
pub const DECAY_LENGTHS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripProblem {
    /// Sites kept on each side of the impurity.
    pub lx: usize,
    pub spec: TrapSpec,
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub a: f64,
    pub slope: f64,
    pub fit_window: (usize, usize),
    /// Largest `‖Ψ_x - p(x)φ₀‖² / p(x)²` in the fit window.
    pub closed_weight: f64,
}

fn transverse_hamiltonian(spec: &TrapSpec) -> DMatrix<f64> {
    let sites = spec.sites();
    let n = sites.len();
    let mut h = DMatrix::zeros(n, n);
    for (i, &y) in sites.iter().enumerate() {
        h[(i, i)] = spec.potential(y);
        if i + 1 < n {
            h[(i, i + 1)] = -J;
            h[(i + 1, i)] = -J;
        }
    }
    h
}

/// Solves `-t (Ψ_{x+1} + Ψ_{x-1}) + (T + δ_{x0} W) Ψ_x = 0` for `0 ≤ x < lx`
/// with `Ψ_{-1} = S Ψ_1` and `Ψ_lx = boundary`.
fn block_solve(t: &DMatrix<f64>, w: &DMatrix<f64>, mirror: &DMatrix<f64>, hop: f64, lx: usize, boundary: &DVector<f64>) -> Result<Vec<DVector<f64>>> {
    let n = t.nrows();
    let identity = DMatrix::<f64>::identity(n, n);
    let singular = || Error::SingularSystem { u: f64::NAN };
    // Ψ_x = C_x Ψ_{x+1}
    let mut c = Vec::with_capacity(lx);
    let first = (t + w).lu().solve(&((&identity + mirror) * hop)).ok_or_else(singular)?;
    c.push(first);
    for _ in 1..lx {
        let prev = c.last().expect("nonempty");
        let next = (t - prev * hop).lu().solve(&(&identity * hop)).ok_or_else(singular)?;
        c.push(next);
    }
    let mut psi = vec![DVector::zeros(n); lx + 1];
    psi[lx] = boundary.clone();
    for x in (0..lx).rev() {
        psi[x] = &c[x] * &psi[x + 1];
    }
    Ok(psi)
}

fn fit_line(psi: &[DVector<f64>], open: &DVector<f64>, lx: usize) -> Result<OracleResult> {
    let (lo, hi) = (lx / 4, lx / 2);
    if hi < lo + 2 || lo < 2 {
        return Err(Error::FitWindowTooSmall(format!("fit window [{lo}, {hi}] from Lx = {lx}")));
    }
    let xs: Vec<f64> = (lo..=hi).map(|x| x as f64).collect();
    let ps: Vec<f64> = (lo..=hi).map(|x| open.dot(&psi[x])).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let mp = ps.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxp: f64 = xs.iter().zip(&ps).map(|(x, p)| (x - mx) * (p - mp)).sum();
    let slope = sxp / sxx;
    let scale = ps.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    if !(slope.abs() > 1e-12 * scale) {
        return Err(Error::NoScattering);
    }
    let intercept = mp - slope * mx;
    let mut closed_weight = 0.0f64;
    for (x, p) in (lo..=hi).zip(&ps) {
        let rest = &psi[x] - open * *p;
        closed_weight = closed_weight.max(rest.norm_squared() / (p * p).max(f64::MIN_POSITIVE));
    }
    if closed_weight > CONTAMINATION_TOL {
        return Err(Error::ContaminatedChannel { weight: closed_weight, tol: CONTAMINATION_TOL });
    }
    Ok(OracleResult { a: -intercept / slope, slope, fit_window: (lo, hi), closed_weight })
}

fn check_problem(problem: &StripProblem) -> Result<()> {
    if !problem.u.is_finite() {
        return Err(invalid(format!("coupling must be finite, got {}", problem.u)));
    }
    problem.spec.validate()
}

fn check_decay(lx: usize, alpha: f64) -> Result<()> {
    if (lx as f64) * (1.0 - alpha) <= DECAY_LENGTHS {
        return Err(Error::FitWindowTooSmall(format!(
            "Lx = {lx} spans fewer than {DECAY_LENGTHS} decay lengths of the slowest closed channel (alpha = {alpha})"
        )));
    }
    Ok(())
}

/// Scattering length of one particle on the strip at the threshold energy
/// `-2J + E₀`.
pub fn strip_scattering_length(problem: &StripProblem) -> Result<OracleResult> {
    check_problem(problem)?;
    let spectrum = solve_transverse(&problem.spec)?;
    let energy = -2.0 * J + spectrum.ground_energy();
    if spectrum.len() > 1 {
        check_decay(problem.lx, alpha_closed(spectrum.energy(1), energy, J)?.alpha)?;
    }
    let h = transverse_hamiltonian(&problem.spec);
    let n = h.nrows();
    let t = &h - DMatrix::identity(n, n) * energy;
    let mut w = DMatrix::zeros(n, n);
    w[(spectrum.origin_index(), spectrum.origin_index())] = problem.u;
    let open = DVector::from_column_slice(spectrum.psi(0));
    let psi = block_solve(&t, &w, &DMatrix::identity(n, n), J, problem.lx, &open)?;
    fit_line(&psi, &open, problem.lx)
}

/// Scattering length of two bosons at total quasi-momentum `K`, in the
/// relative coordinate `x = x₁ - x₂` and both transverse coordinates, at the
/// threshold energy `-2J_K + 2E₀`. The relative hopping `2J cos(K/2)` follows
/// from the lattice Hamiltonian and does not depend on any sign convention.
pub fn pair_scattering_length(problem: &StripProblem, total_k: f64) -> Result<OracleResult> {
    check_problem(problem)?;
    if !(total_k.abs() < std::f64::consts::PI) {
        return Err(invalid(format!("total quasi-momentum must satisfy |K| < π, got {total_k}")));
    }
    let spectrum = solve_transverse(&problem.spec)?;
    let hop = JkSign::Physical.j_k(total_k);
    let e0 = spectrum.ground_energy();
    let energy = -2.0 * hop + 2.0 * e0;
    if spectrum.len() > 1 {
        check_decay(problem.lx, pair_alpha(e0 + spectrum.energy(1), energy, hop)?.alpha)?;
    }
    let h = transverse_hamiltonian(&problem.spec);
    let ny = h.nrows();
    let n = ny * ny;
    let index = |a: usize, b: usize| a * ny + b;
    let mut t = DMatrix::zeros(n, n);
    let mut w = DMatrix::zeros(n, n);
    let mut swap = DMatrix::zeros(n, n);
    for a in 0..ny {
        for b in 0..ny {
            let i = index(a, b);
            t[(i, i)] = h[(a, a)] + h[(b, b)] - energy;
            for c in 0..ny {
                if c != a && h[(a, c)] != 0.0 {
                    t[(i, index(c, b))] = h[(a, c)];
                }
                if c != b && h[(b, c)] != 0.0 {
                    t[(i, index(a, c))] = h[(b, c)];
                }
            }
            swap[(i, index(b, a))] = 1.0;
        }
        w[(index(a, a), index(a, a))] = problem.u;
    }
    let psi0 = spectrum.psi(0);
    let open = DVector::from_fn(n, |i, _| psi0[i / ny] * psi0[i % ny]);
    let psi = block_solve(&t, &w, &swap, hop, problem.lx, &open)?;
    fit_line(&psi, &open, problem.lx)
}

/// Full spectrum of one particle on a ring of `l` sites with the impurity at
/// `x = 0`, by dense diagonalization. Energies include `E₀`.
pub fn ring_brute_force(spec: &TrapSpec, l: usize, u: f64) -> Result<Vec<f64>> {
    if l < 3 {
        return Err(invalid(format!("ring needs at least 3 sites, got {l}")));
    }
    spec.validate()?;
    let h = transverse_hamiltonian(spec);
    let ny = h.nrows();
    let origin = spec.sites().iter().position(|&y| y == 0).expect("grid contains y = 0");
    let mut full = DMatrix::zeros(l * ny, l * ny);
    for x in 0..l {
        full.view_mut((x * ny, x * ny), (ny, ny)).copy_from(&h);
        let right = ((x + 1) % l) * ny;
        for y in 0..ny {
            full[(x * ny + y, right + y)] = -J;
            full[(right + y, x * ny + y)] = -J;
        }
    }
    full[(origin, origin)] += u;
    let mut values: Vec<f64> = SymmetricEigen::new(full).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::single::effective_u1d;

    #[test]
    fn free_strip_has_no_scattering() {
        let p = StripProblem { lx: 200, spec: TrapSpec::harmonic(1e-1, 8), u: 0.0 };
        assert!(matches!(strip_scattering_length(&p), Err(Error::NoScattering)));
        assert!(matches!(pair_scattering_length(&StripProblem { lx: 60, spec: TrapSpec::two_site(1.0), u: 0.0 }, 0.0), Err(Error::NoScattering)));
    }

    #[test]
    fn two_site_single_particle() {
        let spec = TrapSpec::two_site(1.0);
        let s = solve_transverse(&spec).unwrap();
        for u in [-5.0, -1.0, 2.0] {
            let exact = effective_u1d(&s, u, 0.0).unwrap().a.unwrap();
            let brute = strip_scattering_length(&StripProblem { lx: 80, spec: spec.clone(), u }).unwrap();
            assert!(((brute.a - exact) / exact).abs() < 1e-8, "{u}: {} vs {exact}", brute.a);
        }
    }

    #[test]
    fn short_strip_rejected() {
        let p = StripProblem { lx: 6, spec: TrapSpec::two_site(1.0), u: -1.0 };
        assert!(matches!(strip_scattering_length(&p), Err(Error::FitWindowTooSmall(_))));
    }

    #[test]
    fn ring_free_levels() {
        let spec = TrapSpec::two_site(1.0);
        let s = solve_transverse(&spec).unwrap();
        let levels = ring_brute_force(&spec, 8, 0.0).unwrap();
        assert!((levels[0] - (-2.0 + s.ground_energy())).abs() < 1e-12);
        assert_eq!(levels.len(), 16);
    }
}
