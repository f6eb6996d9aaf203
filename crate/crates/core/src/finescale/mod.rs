//! Fine-scale statistics of `{xi x^n}`: exact power sequences, k-level
//! correlations, gap distributions and the associated phase integrals.

mod correlation;
pub mod dd;
mod experiment;
mod gaps;
mod phase_integral;
mod power;

pub use correlation::{
    c_k, k_level_correlation, k_level_correlation_with, CorrelationConfig, CorrelationReport, EnumerationMode,
    TestFunction,
};
pub use experiment::{
    poisson_experiment, poisson_experiment_for, sequence_statistics, ExperimentBundle, ExperimentConfig, KSummary,
    SeedResult,
};
pub use gaps::{default_s_grid, gap_distribution, gap_distribution_on, GapReport};
pub use phase_integral::{correlation_phase_integral, CorrelationPhase, PhaseIntegral};
pub use power::{
    circle_distance, power_fractional_sequence, power_fractional_sequence_with, FixedPoint, PowerSequence,
    PreciseReal, PrecisionPolicy, MAX_ERROR_LOG2,
};
