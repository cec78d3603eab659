//! Equidistribution tests and the grid-versus-Monte-Carlo benchmark.

mod bench;
mod density;
mod discrepancy;
mod ktuple;
mod region;
mod report;

pub use bench::{
    curse_benchmark, midpoint_rule, monte_carlo_mean, BenchMethod, BenchRow, BenchTable,
};
pub use density::{density_variation, DensityReport, DEFAULT_BOOTSTRAP_REPS};
pub use discrepancy::{star_discrepancy_1d, star_discrepancy_brute};
pub use ktuple::{
    ktuple_test, rank_uniformize, KTupleReport, KTUPLE_CELL_LIMIT, KTUPLE_CONFIDENCE,
};
pub use region::{region_test, region_z, Region, RegionResult, Z_THRESHOLD};
pub use report::{Report, TestRecord};
