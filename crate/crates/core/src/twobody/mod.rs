//! Two identical bosons in the same transverse trap with a contact
//! interaction. Centre-of-mass and relative motion do not separate on the
//! lattice, so the closed pair channels `(n₁, n₂)` couple through the
//! overlap kernel `R` and the effective coupling follows from a linear
//! system in the channel amplitudes.

pub mod born;
pub mod kernel;
pub mod resonances;
pub mod solve;

pub use born::born_series;
pub use kernel::{build_kernel, JkSign, KernelParams, OverlapKernel, PairChannel};
pub use resonances::{locate_resonances, Resonance, ResonanceClass, ResonanceReport};
pub use solve::{solve_finite_k, solve_scattering_length, Method, SpectralKernel, TwoBodyResult};
