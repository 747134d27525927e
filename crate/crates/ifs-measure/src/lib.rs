//! Integrals against stationary measures of iterated function systems.
//!
//! Given contractions `φ_1, …, φ_N` of the unit interval and a probability
//! vector `p`, the stationary measure `μ` is the unique measure with
//! `∫ g dμ = Σ_i p_i ∫ g∘φ_i dμ`. This crate approximates `∫ g dμ` through
//! periodic-point sums: traces `t_m`, `τ_m` over the fixed points of all
//! `m`-fold map compositions feed a determinant-style coefficient recursion
//! whose partial sums converge to the integral super-exponentially in the
//! truncation level `k`.
//!
//! The pipeline is split along its natural seams:
//!
//! * [`precision`]: arbitrary-precision reals/complexes and decimal rendering,
//! * [`ifs`]: map catalog, weights, and the hypothesis checks,
//! * [`orbit`]: words, cyclic classes, fixed points, periodic-orbit data,
//! * [`observable`]: the integrand catalog,
//! * [`trace`]: the trace sequences `t_m`, `τ_m`,
//! * [`determinant`]: coefficient recursions and the estimate series,
//! * [`applications`]: moments, Wasserstein distances, Lyapunov exponents,
//!   piecewise integrands, and a push-forward cross-check oracle.
//!
//! The runnable programs under `examples/` exercise one capability each and
//! are the quickest way in. A thin `ifs-measure` binary wraps the same calls
//! behind a config-file CLI.

pub mod applications;
pub mod cli;
pub mod config;
pub mod determinant;
pub mod ifs;
pub mod observable;
pub mod orbit;
pub mod poly;
pub mod precision;
pub mod trace;

pub use applications::{
    integrate, integrate_piecewise, iterate_oracle, lyapunov, moments, moments_oracle_affine,
    wasserstein, wasserstein_oracle_affine, wasserstein_oracle_affine_exact, Integrator,
    MomentVector, WassersteinResult,
};
pub use determinant::{coeffs_direct, coeffs_recursive, estimate, CoefficientTable, EstimateSeries};
pub use ifs::{IfsConfig, MapSpec, Scalar, ValidatedIfs, ValidationReport, WeightSpec};
pub use observable::Observable;
pub use orbit::{cyclic_classes, fixed_point, orbit_data, CyclicClass, PeriodicOrbit, Word};
pub use poly::Poly;
pub use precision::{Complex, PrecisionContext, Real};
pub use trace::{trace_t, trace_tau, OrbitSet, TraceTable};

use std::fmt;

/// Everything that can go wrong across the pipeline.
///
/// The CLI maps these onto exit codes: input/construction problems are code 1,
/// unmet mathematical hypotheses are code 2, numeric/budget failures are code 3.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Working precision below the supported floor.
    PrecisionTooLow { digits: u32 },
    /// More rendered digits requested than the context carries.
    RenderDigits { requested: u32, carried: u32 },
    /// Malformed input: bad constructor arguments, piece sets, config values.
    InvalidInput(String),
    /// Config file syntax or semantics.
    Config(String),
    /// Evaluation outside a map's or observable's domain (pole, vanishing derivative).
    Domain(String),
    /// A hypothesis check failed (contraction, weights, sign condition, control).
    Validation(String),
    /// The requested operation is not defined for this configuration.
    Unsupported(String),
    /// Work-size cap exceeded.
    Budget(String),
    /// Numeric failure at run time (iteration cap, vanishing denominator).
    Numeric(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::PrecisionTooLow { digits } => {
                write!(f, "precision too low: {digits} digits (minimum is 30)")
            }
            Error::RenderDigits { requested, carried } => write!(
                f,
                "cannot render {requested} digits from a {carried}-digit context"
            ),
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Config(m) => write!(f, "invalid config: {m}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Validation(m) => write!(f, "validation failure: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported configuration: {m}"),
            Error::Budget(m) => write!(f, "budget exceeded: {m}"),
            Error::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
