//! Synthetic signals on inhomogeneous domains and the Monte Carlo error study
//! comparing domain-informed against standard B-spline interpolation, plus
//! the ensemble coherence study.

mod coherence;
mod error;
mod monte_carlo;
mod signal;

pub use coherence::{coherence_study, CoherenceCell, CoherenceConfig};
pub use error::{interior_interval, relative_l2_error, ERROR_QUAD_DIVISIONS};
pub use monte_carlo::{monte_carlo, ErrorEntry, ErrorTable, Method, MonteCarloConfig};
pub use signal::{
    realize_signal, sample_signal, NonUniformSpline, SyntheticSignal, DEFAULT_JITTER,
};
