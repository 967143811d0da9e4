use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::kernel::OverlapKernel;
use crate::error::{invalid, Error, Result};

/// Relative pivot size below which the linear system counts as singular.
pub const SINGULAR_TOL: f64 = 1e-13;

/// Residual the finite-momentum solver must reach.
pub const FINITE_K_TOL: f64 = 1e-10;
pub const DAMPING: f64 = 0.5;
pub const NEWTON_AFTER: usize = 50;
pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    DirectSolve,
    Spectral,
    Born { order: usize, converged: bool },
    FixedPoint { iterations: usize },
    Newton { iterations: usize },
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::DirectSolve => "direct".into(),
            Method::Spectral => "spectral".into(),
            Method::Born { order, .. } => format!("born({order})"),
            Method::FixedPoint { .. } => "fixed-point".into(),
            Method::Newton { .. } => "newton".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoBodyResult {
    pub u: f64,
    /// `U · I₀₀` at `k = 0`; at finite `k` the momentum-dependent coupling
    /// with `tan δ_k = -U1D/(2J_K sin k)`.
    pub u1d: f64,
    /// `-2J_K / U1D`, zero-momentum runs only.
    pub a: Option<f64>,
    pub delta_k: Option<f64>,
    /// `I₀₀` followed by the closed-channel amplitudes in kernel order.
    pub i_vector: Vec<f64>,
    pub method: Method,
}

impl TwoBodyResult {
    pub fn i00(&self) -> f64 {
        self.i_vector[0]
    }
}

fn check_u(u: f64) -> Result<()> {
    if !u.is_finite() {
        return Err(invalid(format!("coupling must be finite, got {u}")));
    }
    Ok(())
}

/// Solves `(1 - U M) I = r` and returns `G₀₀ = R₀₀₀₀ + U Σ_c r_c I_c / D_c`
/// together with `I`.
fn linear_solve(kernel: &OverlapKernel, u: f64) -> Result<(f64, DVector<f64>)> {
    let n = kernel.len();
    let a = DMatrix::identity(n, n) - kernel.m_matrix() * u;
    let lu = a.lu();
    let pivots = lu.u().diagonal().abs();
    let (lo, hi) = (pivots.min(), pivots.max());
    if n > 0 && (lo <= SINGULAR_TOL * hi.max(1.0) || !lo.is_finite()) {
        return Err(Error::SingularSystem { u });
    }
    let i = lu.solve(&kernel.entrance_column).ok_or(Error::SingularSystem { u })?;
    let d = kernel.denominators();
    let g00 = kernel.r0000 + u * kernel.entrance_column.iter().zip(i.iter()).zip(d.iter()).map(|((r, x), d)| r * x / d).sum::<f64>();
    Ok((g00, i))
}

/// Zero-momentum scattering by dense LU solve of the channel system.
pub fn solve_scattering_length(kernel: &OverlapKernel, u: f64) -> Result<TwoBodyResult> {
    check_u(u)?;
    let (i00, i) = linear_solve(kernel, u)?;
    let u1d = u * i00;
    let a = (kernel.params.k == 0.0 && u1d != 0.0).then(|| -2.0 * kernel.j_k / u1d);
    let mut i_vector = vec![i00];
    i_vector.extend(i.iter());
    Ok(TwoBodyResult { u, u1d, a, delta_k: None, i_vector, method: Method::DirectSolve })
}

/// Sign of `det(1 - U M)`, or zero if it is numerically singular.
pub fn determinant_sign(kernel: &OverlapKernel, u: f64) -> f64 {
    let n = kernel.len();
    let a = DMatrix::identity(n, n) - kernel.m_matrix() * u;
    let lu = a.lu();
    let mut sign = lu.p().determinant::<f64>();
    for p in lu.u().diagonal().iter() {
        if *p == 0.0 {
            return 0.0;
        }
        sign *= p.signum();
    }
    sign
}

/// Eigen-decomposition of the kernel that makes `U1D(U)` explicit.
///
/// With `S = |D|^{-1/2}` and `A = S R S` (symmetric, positive semidefinite),
/// `M = -S⁻¹ A S`, so the system is singular exactly at `U = -1/λᵢ` and
/// `U1D(U) = U R₀₀₀₀ - U² Σᵢ pᵢ/(1 + U λᵢ)` with `pᵢ = (Qᵀ S r)ᵢ²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralKernel {
    pub r0000: f64,
    pub j_k: f64,
    /// Eigenvalues `λᵢ` of `A`, ascending.
    pub lambdas: Vec<f64>,
    /// Entrance weights `pᵢ`.
    pub weights: Vec<f64>,
}

impl SpectralKernel {
    pub fn new(kernel: &OverlapKernel) -> Self {
        let s = kernel.denominators().map(|d| 1.0 / d.abs().sqrt());
        let mut a = kernel.r.clone();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                a[(i, j)] *= s[i] * s[j];
            }
        }
        let w = kernel.entrance_column.component_mul(&s);
        let eig = SymmetricEigen::new(a);
        let proj = eig.eigenvectors.transpose() * w;
        let mut pairs: Vec<(f64, f64)> = eig.eigenvalues.iter().copied().zip(proj.iter().map(|x| x * x)).collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        Self {
            r0000: kernel.r0000,
            j_k: kernel.j_k,
            lambdas: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// `I₀₀(U)`.
    pub fn i00(&self, u: f64) -> Result<f64> {
        let mut sum = 0.0;
        for (l, p) in self.lambdas.iter().zip(&self.weights) {
            let det = 1.0 + u * l;
            if det.abs() <= SINGULAR_TOL * (1.0 + (u * l).abs()) {
                return Err(Error::SingularSystem { u });
            }
            sum += p / det;
        }
        Ok(self.r0000 - u * sum)
    }

    pub fn u1d(&self, u: f64) -> Result<f64> {
        check_u(u)?;
        Ok(u * self.i00(u)?)
    }

    pub fn solve(&self, u: f64) -> Result<TwoBodyResult> {
        let i00 = self.i00(u)?;
        let u1d = u * i00;
        let a = (u1d != 0.0).then(|| -2.0 * self.j_k / u1d);
        Ok(TwoBodyResult { u, u1d, a, delta_k: None, i_vector: vec![i00], method: Method::Spectral })
    }

    /// Couplings where the system is singular, `U = -1/λᵢ` for `λᵢ > 0`.
    pub fn poles(&self) -> Vec<(f64, f64)> {
        let scale = self.lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        self.lambdas
            .iter()
            .zip(&self.weights)
            .filter(|(l, _)| **l > 1e-14 * scale)
            .map(|(l, p)| {
                let u = -1.0 / l;
                // residue of U1D at the pole
                (u, -u * u * p / l)
            })
            .collect()
    }
}

/// Finite relative momentum `k > 0`.
///
/// The channel amplitudes are `I = cos δ · G`, where `G` solves the linear
/// system with unit entrance amplitude. Eliminating `G` leaves the scalar
/// equation `I₀₀ = G₀₀ √(1 - (U I₀₀ / 2J_K sin k)²)`, which is solved by damped
/// fixed-point iteration from `I₀₀ = G₀₀`, switching to Newton's method after
/// [`NEWTON_AFTER`] iterations.
pub fn solve_finite_k(kernel: &OverlapKernel, u: f64) -> Result<TwoBodyResult> {
    check_u(u)?;
    let k = kernel.params.k;
    if !(k > 0.0) {
        return Err(invalid("finite-momentum solve needs k > 0; use solve_scattering_length at k = 0"));
    }
    let (g00, g) = linear_solve(kernel, u)?;
    let s = 2.0 * kernel.j_k * k.sin();
    let ratio = u / s;
    let cos_factor = |x: f64| (1.0 - (ratio * x).powi(2)).max(0.0).sqrt();
    let residual = |x: f64| x - g00 * cos_factor(x);

    // the residual increases through its root, which lies between 0 and g00
    // inside the sine bound |x| < |s/U|
    let bound = if ratio != 0.0 { 1.0 / ratio.abs() } else { f64::INFINITY };
    let (mut lo, mut hi) = if g00 >= 0.0 { (0.0, g00.min(bound)) } else { (g00.max(-bound), 0.0) };
    let mut x = g00;
    let mut method = None;
    for it in 1..=MAX_ITERATIONS {
        if it <= NEWTON_AFTER {
            x = (1.0 - DAMPING) * x + DAMPING * g00 * cos_factor(x);
        } else {
            let f = residual(x);
            if f > 0.0 {
                hi = hi.min(x).max(lo);
            } else {
                lo = lo.max(x).min(hi);
            }
            let c = cos_factor(x);
            let slope = 1.0 + g00 * ratio * ratio * x / c;
            let next = x - f / slope;
            // safeguarded Newton: bisect whenever the step leaves the bracket
            x = if next.is_finite() && next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        }
        if residual(x).abs() <= FINITE_K_TOL * (1.0 + g00.abs()) {
            method = Some(if it <= NEWTON_AFTER {
                Method::FixedPoint { iterations: it }
            } else {
                Method::Newton { iterations: it - NEWTON_AFTER }
            });
            break;
        }
    }
    let method = method.ok_or(Error::NoConvergence { iterations: MAX_ITERATIONS, residual: residual(x).abs() })?;
    if (u * x).abs() > s.abs() * (1.0 + 1e-12) {
        return Err(Error::UnphysicalAmplitude { value: (u * x).abs(), bound: s.abs() });
    }
    let cos_delta = cos_factor(x);
    let sin_delta = -u * x / s;
    let delta_k = sin_delta.atan2(cos_delta);
    let mut i_vector = vec![x];
    i_vector.extend(g.iter().map(|v| v * cos_delta));
    Ok(TwoBodyResult { u, u1d: u * g00, a: None, delta_k: Some(delta_k), i_vector, method })
}

#[cfg(test)]
mod tests {
    use super::super::kernel::{build_kernel, KernelParams};
    use super::*;
    use crate::lattice::{solve_transverse, TrapSpec};

    fn two_site() -> OverlapKernel {
        let s = solve_transverse(&TrapSpec::two_site(1.0)).unwrap();
        build_kernel(&s, KernelParams::new(2)).unwrap()
    }

    #[test]
    fn zero_coupling() {
        let k = two_site();
        let r = solve_scattering_length(&k, 0.0).unwrap();
        assert_eq!(r.u1d, 0.0);
        assert_eq!(r.a, None);
        assert_eq!(&r.i_vector[1..], k.entrance_column.as_slice());
    }

    #[test]
    fn spectral_matches_direct() {
        let k = two_site();
        let sp = SpectralKernel::new(&k);
        for u in [-50.0, -20.0, -5.0, 3.0, 40.0] {
            let d = solve_scattering_length(&k, u).unwrap().u1d;
            let s = sp.u1d(u).unwrap();
            assert!((d - s).abs() < 1e-11 * d.abs().max(1.0), "{u}: {d} vs {s}");
        }
    }

    #[test]
    fn singular_at_pole() {
        let k = two_site();
        let sp = SpectralKernel::new(&k);
        for (u, _) in sp.poles() {
            assert!(matches!(solve_scattering_length(&k, u), Err(Error::SingularSystem { .. })));
        }
    }

    #[test]
    fn consistency_of_scattering_length() {
        let k = two_site();
        let r = solve_scattering_length(&k, -5.0).unwrap();
        assert!((r.a.unwrap() * r.u1d + 2.0 * k.j_k).abs() < 1e-12);
    }

    #[test]
    fn finite_k_closed_form() {
        let s = solve_transverse(&TrapSpec::two_site(1.0)).unwrap();
        let params = KernelParams { k: 0.3, ..KernelParams::new(2) };
        let kernel = build_kernel(&s, params).unwrap();
        for u in [-40.0, -10.0, -1.0, 0.5, 6.0] {
            let r = solve_finite_k(&kernel, u).unwrap();
            let expected = (-r.u1d / (2.0 * kernel.j_k * 0.3f64.sin())).atan();
            assert!((r.delta_k.unwrap() - expected).abs() < 1e-9, "{u}: {:?}", r.method);
            let sin_delta = r.delta_k.unwrap().sin();
            assert!((2.0 * kernel.j_k * 0.3f64.sin() * sin_delta + u * r.i00()).abs() < 1e-9);
        }
    }

    #[test]
    fn finite_k_zero_coupling() {
        let s = solve_transverse(&TrapSpec::two_site(1.0)).unwrap();
        let kernel = build_kernel(&s, KernelParams { k: 0.5, ..KernelParams::new(2) }).unwrap();
        let r = solve_finite_k(&kernel, 0.0).unwrap();
        assert_eq!(r.delta_k, Some(0.0));
        assert_eq!(&r.i_vector[1..], kernel.entrance_column.as_slice());
    }

    #[test]
    fn finite_k_newton_path() {
        // a strong coupling makes |tan δ| large, beyond the damped iteration
        let s = solve_transverse(&TrapSpec::two_site(1.0)).unwrap();
        let kernel = build_kernel(&s, KernelParams { k: 0.05, ..KernelParams::new(2) }).unwrap();
        let r = solve_finite_k(&kernel, 8.0).unwrap();
        assert!(matches!(r.method, Method::Newton { .. }));
        let expected = (-r.u1d / (2.0 * kernel.j_k * 0.05f64.sin())).atan();
        assert!((r.delta_k.unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn determinant_changes_sign_at_poles() {
        let k = two_site();
        let sp = SpectralKernel::new(&k);
        for (u, _) in sp.poles() {
            let h = 1e-6 * u.abs();
            assert_eq!(determinant_sign(&k, u - h), -determinant_sign(&k, u + h));
        }
    }
}
