use nalgebra::DVector;

use super::kernel::OverlapKernel;
use super::solve::{Method, TwoBodyResult};
use crate::error::{invalid, Error, Result};

/// Consecutive growing orders after which the series counts as divergent.
pub const GROWTH_STREAK: usize = 5;

/// Born series for `I₀₀`: the Neumann expansion `Σⱼ (U M)ʲ r` of the
/// channel system truncated so that order `n` carries terms up to `Uⁿ⁻¹`.
/// Order one is `I₀₀ = R₀₀₀₀`.
pub fn born_series(kernel: &OverlapKernel, u: f64, order: usize) -> Result<TwoBodyResult> {
    if order == 0 {
        return Err(invalid("Born order must be at least 1"));
    }
    if !u.is_finite() {
        return Err(invalid(format!("coupling must be finite, got {u}")));
    }
    let m = kernel.m_matrix() * u;
    let weights: DVector<f64> = kernel.entrance_column.component_div(&kernel.denominators()) * u;
    let mut v = kernel.entrance_column.clone();
    let mut amplitudes = v.clone();
    let mut i00 = kernel.r0000;
    let mut last_norm = v.norm();
    let mut streak = 0;
    let mut last_term = f64::INFINITY;
    for n in 2..=order {
        let term = weights.dot(&v);
        i00 += term;
        last_term = term.abs();
        v = &m * &v;
        let norm = v.norm();
        if norm > last_norm {
            streak += 1;
            if streak >= GROWTH_STREAK {
                return Err(Error::Diverging { order: n, streak });
            }
        } else {
            streak = 0;
        }
        last_norm = norm;
        if n < order {
            amplitudes += &v;
        }
    }
    let converged = order == 1 || last_term <= 1e-12 * i00.abs().max(f64::MIN_POSITIVE);
    let u1d = u * i00;
    let a = (kernel.params.k == 0.0 && u1d != 0.0).then(|| -2.0 * kernel.j_k / u1d);
    let mut i_vector = vec![i00];
    i_vector.extend(amplitudes.iter());
    Ok(TwoBodyResult { u, u1d, a, delta_k: None, i_vector, method: Method::Born { order, converged } })
}
