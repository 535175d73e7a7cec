//! Learning sensor positions and the Tikhonov weight for frequency-domain
//! full waveform inversion by bilevel optimisation.
//!
//! The lower level is FWI itself (L-BFGS with Wolfe line search, adjoint-state
//! gradients); the upper level optimises sensor coordinates and the
//! regularisation weight with a bound-constrained quasi-Newton method, using
//! implicit differentiation through the lower-level Hessian. Hessian systems
//! are solved matrix-free with preconditioned CG, and the whole scheme runs
//! inside a frequency-continuation loop.

pub mod error;
pub mod fem;
pub mod grid;
pub mod helmholtz;
pub mod optim;
pub mod restriction;
pub mod sparse;

pub use error::{FwiError, Result};
pub use fem::{assemble_regulariser, assemble_stiffness, difference_matrix, nodal_weights, Regulariser};
pub use grid::{build_grid, Grid, Model, NodeClass};
pub use helmholtz::{
    apply_g, factorize, point_source_rhs, solve_adjoint, solve_forward, BoundaryPair, Frequency,
    HelmholtzFactorization, SolveCount, SolveCounter, SolvePhase, Wavefield,
};
pub use restriction::{
    build_stencil, restrict, restrict_adjoint, sensor_derivative, CoordSpec, RestrictionStencil,
    SensorSet,
};
