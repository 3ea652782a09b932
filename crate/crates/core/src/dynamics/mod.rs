//! Artificial parameter dynamics: spaces, schedules and kernels.

mod kernel;
mod samplers;
mod schedule;
mod space;

pub use kernel::{apply_kernel, kernel_at};
pub use samplers::{
    sample_discrete_kernel, sample_truncated_normal, sample_truncated_student, ScaleMatrix, DEFAULT_REJECTION_CAP,
};
pub use schedule::{DynamicsSchedule, EpochCursor, Flavor, PompSchedule};
pub use space::{DiscreteSet, LinearConstraint, ParameterSpace};
