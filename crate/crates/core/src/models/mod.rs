//! Concrete models and their simulators.

mod lg_periodic;
mod seird;
mod spline;
mod sv;
mod urn;

pub use lg_periodic::{hour, LgPeriodic, INITIAL_VARIANCE};
pub use seird::{effective_reproduction, log_beta_density, sample_dirichlet, seird_map, Seird, SeirdState};
pub use spline::{natural_cubic_basis, SplineBasis};
pub use sv::{StochasticVolatility, SvInnovation};
pub use urn::{
    urn_as_cloned_ssm, urn_grid_mle, urn_loglik, urn_simulate, urn_space, urn_transition, UrnModel, UrnSpec,
};

/// Names accepted in configuration files.
pub const MODEL_NAMES: [&str; 4] = ["lg-periodic", "sv", "seird", "urn"];
