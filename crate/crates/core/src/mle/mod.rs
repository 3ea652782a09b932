//! Maximum likelihood by iterated filtering on cloned data, and the noisy
//! optimiser.

mod cloning;
mod iterated;
mod noisy;

pub use cloning::{clone_model, ClonedDataset, ClonedModel};
pub use iterated::{run_if_fast, run_if_slow, run_iterated, IfConfig};
pub use noisy::{run_noisy_opt, NoisyPayoff};

pub use crate::dynamics::PompSchedule;

use crate::dynamics::Flavor;
use crate::error::Result;

/// Pomp-style cooling schedule with fraction `alpha` over blocks of `period`.
pub fn pomp_schedule(flavor: Flavor, alpha: f64, period: usize) -> Result<PompSchedule> {
    PompSchedule::new(flavor, alpha, period)
}
