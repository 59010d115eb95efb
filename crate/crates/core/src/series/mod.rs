//! Degreewise formal solutions of twisted coboundary equations and witness families.

mod formal;
mod io;
mod witness;

pub use formal::{
    convergence_check, radius_verdict, solve_formal, twist_power, ConvergenceReport, Direction, DivergenceCertificate,
    FormalCocycle, FormalSolution, LevelSolution, RadiusReport, RadiusVerdict, MIN_LEVELS,
};
pub use io::{read_cocycle, write_cocycle, write_solution, Content, FormalHeader};
pub use witness::{
    build_laurent_witness, build_taylor_witness, denominator_budget, lambda_of, partial_coboundary_gap,
    CertificateEntry, ScanRow, WitnessCertificate, WitnessFamily, WitnessLevel,
};
