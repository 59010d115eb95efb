//! Finite Cech covers of the torus and the twisted complex of a flat bundle on them.

mod complex;
mod linalg;
mod nerve;
mod solve;

pub use complex::{transitions, Cochain0, Cochain1, TwistedComplex};
pub use nerve::*;
pub use solve::{
    k_upper, solve_coboundary, ueda_bounds, ueda_oracle, ueda_ratio, CoboundarySolution, SigmaRoute, UedaBounds,
    UedaOptions, COCYCLE_TOL, SOLVE_TOL,
};
