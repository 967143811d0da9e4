//! Quasi-one-dimensional scattering on a two-dimensional lattice.
//!
//! A particle (or a pair) moves freely along `x` and is confined along `y` by
//! a transverse trap `V(y)`. Contact interactions of strength `U` at the trap
//! centre renormalize into an effective 1D coupling `U1D`, which diverges at
//! confinement-induced resonances. All energies are in units of the
//! tunnelling rate `J`.

pub mod continuum;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod quadrature;
pub mod ring;
pub mod roots;
pub mod single;
pub mod spa;
pub mod tridiag;
pub mod twobody;

pub use error::{Error, ErrorClass, Result};
pub use lattice::{alpha_closed, solve_transverse, AlphaValue, Parity, TransverseSpectrum, TrapKind, TrapSpec, J};
pub use single::{effective_u1d, u_cir, ChannelCutoff, CirValue, ScatteringResult};
