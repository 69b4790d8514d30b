//! Einstein metrics on spaces H×H/ΔK: catalog, closed-form curvature,
//! solvers, stability, a brute-force Lie-algebra oracle and Ricci flow.

pub mod catalog;
pub mod diagonal;
pub mod einstein;
pub mod emit;
pub mod error;
pub mod expr;
pub mod flow;
pub mod lie;
pub mod numeric;
pub mod stability;
pub mod symmetric;
pub mod tolerance;
pub mod verify;

pub use catalog::{existence_condition, Catalog, CatalogEntry, Cond2, SpaceSpec};
pub use diagonal::{DiagonalMetric, NormalMetric, RicciEigenvalues, StructuralConstants};
pub use einstein::{solve_diagonal, EinsteinSolution, Label};
pub use error::{Error, Result};
pub use numeric::Rational;
pub use stability::{stability_report, Classification, StabilityReport};
pub use symmetric::{classify_symmetric, FullMetric};
