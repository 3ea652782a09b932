//! Global optimisation of `θ ↦ E[h(Y, θ)]` from a stream of draws `Y_t`,
//! by filtering with weights `exp(h(Y_t, θ))`.

use std::marker::PhantomData;

use crate::dynamics::{DynamicsSchedule, ParameterSpace};
use crate::engine::{run_filter, FilterConfig, Gating, Prior, Propagator, RunRecord, Variant};
use crate::error::Result;
use crate::rng::StreamRng;

/// Propagator with no state: the log-weight is the payoff `h(y, θ)`.
pub struct NoisyPayoff<O, F> {
    payoff: F,
    _obs: PhantomData<fn(&O)>,
}

impl<O, F: Fn(&O, &[f64]) -> f64> NoisyPayoff<O, F> {
    pub fn new(payoff: F) -> Self {
        NoisyPayoff { payoff, _obs: PhantomData }
    }

    fn eval(&self, y: &O, theta: &[f64]) -> f64 {
        let v = (self.payoff)(y, theta);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }
}

impl<O: Sync, F: Fn(&O, &[f64]) -> f64 + Sync> Propagator for NoisyPayoff<O, F> {
    type Payload = ();
    type Obs = O;

    fn init(&self, _theta: &[f64], _rng: &mut StreamRng) {}

    fn weight_first(&self, theta: &[f64], _p: &mut (), y: &O) -> f64 {
        self.eval(y, theta)
    }

    fn advance(&self, _t: usize, _m: &[f64], theta: &[f64], _p: &(), y: &O, _rng: &mut StreamRng) -> ((), f64) {
        ((), self.eval(y, theta))
    }

    fn summary_dim(&self) -> usize {
        0
    }

    fn summarize(&self, _p: &(), _out: &mut [f64]) {}
}

/// Runs the optimiser over `ys`: `θ_1 ~ μ_0`, then epoch-or-ESS gated moves
/// as in the adaptive slow filter. `θ̂_t` estimates the maximiser.
pub fn run_noisy_opt<O: Sync, F: Fn(&O, &[f64]) -> f64 + Sync>(
    payoff: F,
    ys: &[O],
    space: &ParameterSpace,
    prior: &Prior,
    schedule: &DynamicsSchedule,
    cfg: &FilterConfig,
) -> Result<RunRecord> {
    let prop = NoisyPayoff::new(payoff);
    let cfg = cfg.clone().with_variant(Variant::ThetaBeforeX);
    run_filter(&prop, ys, ys.len(), space, prior, schedule, &cfg, Gating::EpochOrResample)
}
