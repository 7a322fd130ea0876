//! Mirror descent, accelerated mirror descent and their mirror duals, with
//! executable energy certificates and an entropic optimal transport solver.
//!
//! Points live in [`PrimalVector`] and gradients in [`DualVector`]; the two
//! only meet through [`pairing`].

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::large_enum_variant)]

pub mod certificates;
pub mod cfom;
pub mod dgf;
pub mod error;
pub mod methods;
pub mod objectives;
pub mod ot;
pub mod spaces;

pub use certificates::{
    check_mirror_duality, duality_transform, dual_energy_trace, evaluate_u, evaluate_v, primal_energy_trace,
    DualityCheckOptions, DualityReport, EnergyTrace, GradientScenario,
};
pub use cfom::{
    anti_transpose, mirror_dual_schedule, run_cfom, run_fsfom, run_mirror_dual, to_h_matrix, validate_schedule,
    CoefficientSchedule, HMatrix, ScheduleRole, Trajectory, ValidityReport,
};
pub use dgf::{Dgf, DgfDescriptor, DgfKind};
pub use error::{Error, Result};
pub use methods::{
    amd_schedule, run_amd, run_concat, run_dual_amd, run_dual_md, run_md, theta_sequence, ConcatTrace,
    MethodConfig, MethodKind, MethodRun, ThetaSequence, Trace,
};
pub use objectives::{ObjectiveDescriptor, SmoothObjective};
pub use ot::{lp_oracle, round_plan, solve_ot, OtInstance, OtSolution, TransportPlan};
pub use spaces::{bregman, pair, pairing, Dual, DualVector, NormIndex, Primal, PrimalVector, Space, Vector};
