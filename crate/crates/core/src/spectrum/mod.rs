//! End-to-end pipeline: equilibrium sources on survivor shifts, explicit points with
//! prescribed recurrence rates, and recurrence-rate experiments.

mod construct;
mod estimate;
mod experiments;
mod source;

pub use construct::{construct_e_point, construct_e_point_with, ConstructOptions, ConstructedPoint, PerturbationReport, MAX_HORIZON};
pub use estimate::{
    compare_routes, estimate_recurrence_rate, geometric_estimate, symbolic_estimate, RateInput, RecurrenceEstimate, RouteComparison,
    ScalePolicy,
};
pub use experiments::{ae_rate_experiment, dimension_ladder, AeReport, LadderReport, LadderRow, PointRate};
pub use source::{
    birkhoff_average, build_source, build_source_with, default_base_cylinder, long_return_holes, sample_source_point, SourceConfig,
    SourceSample,
};
