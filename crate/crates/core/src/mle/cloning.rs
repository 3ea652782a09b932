use rand::Rng;

use crate::engine::{ObsSource, SsmModel};
use crate::error::{Error, Result};
use crate::kalman::{KalmanState, LgSpec, Observation, Transition};

/// A fixed data set `ỹ_1..ỹ_T` replayed forever: `y_t = ỹ_{t - T⌊(t-1)/T⌋}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClonedDataset<O> {
    data: Vec<O>,
}

impl<O> ClonedDataset<O> {
    pub fn new(data: Vec<O>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidArgument("cloned data set is empty".into()));
        }
        Ok(ClonedDataset { data })
    }

    /// Block length `T`.
    pub fn period(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[O] {
        &self.data
    }

    pub fn obs_at(&self, t: usize) -> &O {
        &self.data[(t - 1) % self.data.len()]
    }
}

impl<O> ObsSource<O> for ClonedDataset<O> {
    fn at(&self, t: usize) -> &O {
        self.obs_at(t)
    }
}

/// The model of a cloned data set: within a block the base model runs as
/// usual; the first step of every block restarts the state from its
/// initial law.
#[derive(Debug, Clone, Copy)]
pub struct ClonedModel<'a, M> {
    base: &'a M,
    period: usize,
}

/// Wraps `base` for data cloned with block length `period`.
pub fn clone_model<M>(base: &M, period: usize) -> Result<ClonedModel<'_, M>> {
    if period == 0 {
        return Err(Error::InvalidArgument("block length must be >= 1".into()));
    }
    Ok(ClonedModel { base, period })
}

impl<M> ClonedModel<'_, M> {
    /// Step within the block, in `1..=T`.
    pub fn local(&self, t: usize) -> usize {
        (t - 1) % self.period + 1
    }

    pub fn base(&self) -> &M {
        self.base
    }
}

impl<M: SsmModel> SsmModel for ClonedModel<'_, M> {
    type State = M::State;
    type Obs = M::Obs;

    fn period(&self) -> usize {
        self.period
    }

    fn param_dim(&self) -> usize {
        self.base.param_dim()
    }

    fn state_summary_dim(&self) -> usize {
        self.base.state_summary_dim()
    }

    fn sample_initial<R: Rng + ?Sized>(&self, theta: &[f64], rng: &mut R) -> M::State {
        self.base.sample_initial(theta, rng)
    }

    fn sample_transition<R: Rng + ?Sized>(&self, t: usize, theta: &[f64], prev: &M::State, rng: &mut R) -> M::State {
        match self.local(t) {
            1 => self.base.sample_initial(theta, rng),
            s => self.base.sample_transition(s, theta, prev, rng),
        }
    }

    fn log_obs_density(&self, t: usize, theta: &[f64], x: &M::State, y: &M::Obs) -> f64 {
        self.base.log_obs_density(self.local(t), theta, x, y)
    }

    fn summarize_state(&self, x: &M::State, out: &mut [f64]) {
        self.base.summarize_state(x, out)
    }
}

impl<M: LgSpec> LgSpec for ClonedModel<'_, M> {
    type Obs = M::Obs;

    fn state_dim(&self) -> usize {
        self.base.state_dim()
    }

    fn obs_dim(&self) -> usize {
        self.base.obs_dim()
    }

    fn initial(&self, theta: &[f64]) -> KalmanState {
        self.base.initial(theta)
    }

    fn transition(&self, t: usize, theta: &[f64]) -> Transition {
        match self.local(t) {
            1 => Transition::Restart,
            s => self.base.transition(s, theta),
        }
    }

    fn observation(&self, t: usize, theta: &[f64]) -> Observation {
        self.base.observation(self.local(t), theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cloned_indexing() {
        let d = ClonedDataset::new(vec![10, 20, 30]).unwrap();
        assert_eq!(*d.obs_at(1), 10);
        assert_eq!(*d.obs_at(3), 30);
        assert_eq!(*d.obs_at(4), 10);
        assert_eq!(*d.obs_at(3 * 5 + 2), 20);
        assert!(ClonedDataset::<i32>::new(vec![]).is_err());
    }
}
