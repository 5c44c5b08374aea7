//! Polynomial-coefficient exponential-power mixtures: densities of the form
//! `f(x) = c (Σ θᵢ xⁱ) e^{-βx^d}` on `x > 0`, with closed-form distribution
//! functions, moments, reliability and entropy, plus quadrature and Monte
//! Carlo oracles that check them.

pub mod catalog;
pub mod entropy;
pub mod error;
pub mod family;
mod numeric;
pub mod oracle;
pub mod specfun;
pub mod stress_strength;

pub use catalog::{build_binomial, build_example1, build_named, list_catalog, CatalogEntry};
pub use entropy::{tsallis, tsallis_integer, tsallis_quadrature, EntropyMode, EntropyOrder};
pub use error::{Error, Result};
pub use family::{make_family, CfMethod, CfValue, Component, Family, FamilyParams, MixtureView, SummaryStats};
pub use oracle::{check_family, OracleReport, QuadratureControl, Quantity};
pub use specfun::SeriesControl;
pub use stress_strength::{reliability, reliability_quadrature, reliability_series, StressStrengthResult};
