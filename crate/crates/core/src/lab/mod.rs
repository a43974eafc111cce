//! Experiments on the multiplier and Grushin layers: decay regressions,
//! maximal and weighted batteries, square-function probes, the `L^p` probe
//! and the one-dimensional Hermite diagnostics. Results are kept as
//! [`ExperimentRecord`]s.

mod battery;
mod decay;
mod fit;
mod n1;
mod probes;
mod record;
pub mod thresholds;

pub use battery::{derived_seed, stream_rng, FrequencyLaw, Generator, RandomBattery};
pub use decay::{
    decay_fit, dyadic_block_sum, small_rt_check, target_slope, DecayFit, Regime, SmallRtEntry,
    SmallRtReport, MIN_DECAY_RADII, SMALL_RT_MAX_LEVEL, SMALL_RT_TAIL,
};
pub use fit::{fit_line, fit_loglog, LineFit};
pub use n1::{
    compact_sup, global_sup, log_levels, n1_diagnostic, N1Diagnostic, SlopeFit, COMPACT_TARGET,
    GLOBAL_TARGET,
};
pub use probes::{
    lp_probe, maximal_ratio_battery, rbound_derivative_probe, rbound_families, rbound_probe, square_function_ratio,
    weighted_battery, DerivativeMethod, LpEstimate, LpReport, LpSetup, MaximalKind, MaximalRatio,
    RBoundFamilies, RBoundMeasurement, WeightedBattery,
};
pub use record::{
    append_jsonl, parse_record_line, read_jsonl, write_csv, CsvRow, ExperimentRecord, FitSummary,
    Sample, CODE_VERSION,
};
pub use thresholds::{WindowPosition, INCONCLUSIVE_RESIDUAL};
