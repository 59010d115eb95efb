//! Flat line bundles on elliptic curves: Diophantine classification of their powers,
//! Ueda-type constants on finite Cech covers, degreewise twisted coboundary solvers,
//! witness families and theorem-level cohomology profiles.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cover;
pub mod diophantine;
pub mod error;
pub mod interval;
pub mod pic0;
pub mod series;

pub use diophantine::{
    best_approx_error, cf_convergents, classify_growth, make_az_theta, orbit_distance, CertificateKind, Convergent,
    GrowthLabel, GrowthSource, GrowthVerdict, Precision, ScaledTheta, Schedule, ThetaSpec,
};
pub use error::{Error, Result};
pub use interval::Interval;
