//! Separating matrices of planar point configurations.
//!
//! For a configuration of points in general position, entry `(i, j)` of the
//! separating matrix counts the lines through two other points of the
//! configuration that separate point `i` from point `j`. This crate computes
//! that matrix exactly, screens arbitrary matrices against conditions every
//! separating matrix satisfies, and recovers the convex hull of the
//! configuration from the matrix alone.
//!
//! - [`geometry`]: integer points, exact orientation, the geometric hull.
//! - [`matrix`]: matrix construction, parity partition, validation.
//! - [`recovery`]: hull recovery and the fake-hull filters.
//! - [`otdb`]: reader for order-type database files.
//! - [`census`]: corpus-wide recovery experiments.

pub mod census;
pub mod geometry;
pub mod matrix;
pub mod otdb;
pub mod recovery;
pub mod text;

pub use geometry::{
    convex_hull, in_convex_position, orientation, random_configuration, separates,
    separating_count, Configuration, GeometryError, HullCycle, Orientation, Point,
};
pub use matrix::{
    compute_matrix, orchard_partition, row_sums, validate, CheckId, MatrixError, OrchardPartition,
    SeparatingMatrix, SquareMatrix, ValidationReport,
};
pub use otdb::{read_database, OrderTypeRecord, OtdbError};
pub use recovery::{
    classify_against_oracle, combined_filter, cycle_score, detect_hull_size3, general_hull_search,
    min_cycle, row_sum_filter, target, CandidateStatus, CycleScore, HullCandidate, RecoveryError,
    RecoveryResult, SearchOptions,
};
pub use text::FormatError;
