//! Coupled first-order methods: coefficient schedules, executors, the
//! mirror-dual transform and the Euclidean step-matrix reduction.

mod executor;
mod hdual;
mod schedule;

pub use executor::{run_cfom, run_mirror_dual, Trajectory};
pub use hdual::{run_fsfom, to_h_matrix, HMatrix};
pub use schedule::{CoefficientSchedule, ScheduleFile, ScheduleRole, ValidityReport};

/// Anti-transposed coefficient tables of `s`.
pub fn mirror_dual_schedule(s: &CoefficientSchedule) -> CoefficientSchedule {
    s.mirror_dual()
}

pub fn validate_schedule(s: &CoefficientSchedule) -> ValidityReport {
    s.validate()
}

/// `H^A[i][j] = H[N-1-j][N-1-i]`.
pub fn anti_transpose(h: &HMatrix) -> HMatrix {
    h.anti_transpose()
}
