use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure classes, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    InvalidInput,
    NonConvergence,
    PhysicalRegime,
    Numerical,
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("transverse state {state} leaks to the grid edge (|psi| = {amplitude:e} > {tol:e}); increase y_max")]
    EdgeLeak { state: usize, amplitude: f64, tol: f64 },

    #[error("trap is not symmetric under y -> -y (first mismatch at y = {y})")]
    NonSymmetric { y: i64 },

    #[error("channel is open: g = {g} <= 2 (the virtual state would reach |alpha| = 1)")]
    OpenChannel { g: f64 },

    #[error("channel truncation tail {tail:e} exceeds tolerance {tol:e}")]
    TailTooLarge { tail: f64, tol: f64 },

    #[error("coupling U = {u} sits on the resonance U_CIR = {u_cir}")]
    AtResonance { u: f64, u_cir: f64 },

    #[error("quadrature error estimate {estimate:e} exceeds {tol:e}")]
    QuadratureFail { estimate: f64, tol: f64 },

    #[error("sharp transverse resonance near q = {q} could not be localized")]
    SharpResonanceUnresolved { q: f64 },

    #[error("no root of the ring quantization condition in branch {branch}")]
    NoRootInBranch { branch: usize },

    #[error("two ring momenta in branch {branch} are closer than {sep:e}")]
    BranchCollision { branch: usize, sep: f64 },

    #[error("Green's denominator {denominator} of channel ({n1},{n2}) is non-negative")]
    SignConventionViolation { n1: usize, n2: usize, denominator: f64 },

    #[error("linear system is singular at U = {u} (determinant root)")]
    SingularSystem { u: f64 },

    #[error("Born series diverges: term norms grew for {streak} consecutive orders (order {order})")]
    Diverging { order: usize, streak: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("|U I_00| = {value} exceeds the sine bound {bound}")]
    UnphysicalAmplitude { value: f64, bound: f64 },

    #[error("fit window contains the pole U_CIR = {u_cir}")]
    PoleInWindow { u_cir: f64 },

    #[error("fit window too small: {0}")]
    FitWindowTooSmall(String),

    #[error("closed-channel weight {weight:e} in the fit window exceeds {tol:e}")]
    ContaminatedChannel { weight: f64, tol: f64 },

    #[error("no scattering: the asymptotic form has no kink (U = 0 or decoupled)")]
    NoScattering,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidInput(_) | NonSymmetric { .. } | FitWindowTooSmall(_) => ErrorClass::InvalidInput,
            TailTooLarge { .. }
            | QuadratureFail { .. }
            | SharpResonanceUnresolved { .. }
            | NoRootInBranch { .. }
            | BranchCollision { .. }
            | Diverging { .. }
            | NoConvergence { .. } => ErrorClass::NonConvergence,
            EdgeLeak { .. }
            | OpenChannel { .. }
            | AtResonance { .. }
            | SignConventionViolation { .. }
            | UnphysicalAmplitude { .. }
            | PoleInWindow { .. }
            | NoScattering => ErrorClass::PhysicalRegime,
            SingularSystem { .. } | ContaminatedChannel { .. } => ErrorClass::Numerical,
        }
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidInput(_) => "InvalidInput",
            EdgeLeak { .. } => "EdgeLeak",
            NonSymmetric { .. } => "NonSymmetric",
            OpenChannel { .. } => "OpenChannel",
            TailTooLarge { .. } => "TailTooLarge",
            AtResonance { .. } => "AtResonance",
            QuadratureFail { .. } => "QuadratureFail",
            SharpResonanceUnresolved { .. } => "SharpResonanceUnresolved",
            NoRootInBranch { .. } => "NoRootInBranch",
            BranchCollision { .. } => "BranchCollision",
            SignConventionViolation { .. } => "SignConventionViolation",
            SingularSystem { .. } => "SingularSystem",
            Diverging { .. } => "Diverging",
            NoConvergence { .. } => "NoConvergence",
            UnphysicalAmplitude { .. } => "UnphysicalAmplitude",
            PoleInWindow { .. } => "PoleInWindow",
            FitWindowTooSmall(_) => "FitWindowTooSmall",
            ContaminatedChannel { .. } => "ContaminatedChannel",
            NoScattering => "NoScattering",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
