//! Particle filtering engine for the parameter-augmented model.

mod cloud;
mod filter;
mod model;
mod record;
mod resample;

pub use cloud::{estimate_theta, log_sum_exp, ParticleCloud};
pub use filter::{
    run_adaptive_fast, run_adaptive_slow, run_bootstrap_so_pf, run_filter, Filter, FilterConfig, Gating, StepReport,
    Variant,
};
pub use model::{Bootstrap, ObsSource, Prior, Propagator, Simulate, SsmModel};
pub use record::{RecordRow, RunRecord};
pub use resample::{ess, offspring_counts, resample, Scheme};
