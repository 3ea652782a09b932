use rand::Rng;

use crate::dynamics::ParameterSpace;
use crate::error::Result;
use crate::rng::StreamRng;

/// A parametric state-space model with time-indexed transitions `M_{t,θ}`
/// and observation densities `f_{t,θ}`.
pub trait SsmModel: Sync {
    type State: Clone + Send + Sync;
    type Obs: Sync;

    /// Period of the time dependence (`1` for homogeneous models).
    fn period(&self) -> usize {
        1
    }

    fn param_dim(&self) -> usize;

    /// Length of the vector written by [`SsmModel::summarize_state`].
    fn state_summary_dim(&self) -> usize;

    /// `X_1 ~ χ_θ`.
    fn sample_initial<R: Rng + ?Sized>(&self, theta: &[f64], rng: &mut R) -> Self::State;

    /// `X_t ~ M_{t,θ}(x_{t-1}, ·)` for `t >= 2`.
    fn sample_transition<R: Rng + ?Sized>(
        &self,
        t: usize,
        theta: &[f64],
        prev: &Self::State,
        rng: &mut R,
    ) -> Self::State;

    /// `log f_{t,θ}(y | x)`; `-∞` for impossible pairs.
    fn log_obs_density(&self, t: usize, theta: &[f64], x: &Self::State, y: &Self::Obs) -> f64;

    /// Numeric summary of a state (its filtering mean is recorded).
    fn summarize_state(&self, x: &Self::State, out: &mut [f64]);

    /// Exact log-likelihood of `ys` when available in closed form.
    fn exact_loglik(&self, _theta: &[f64], _ys: &[Self::Obs]) -> Option<f64> {
        None
    }
}

/// Models that can also generate observations.
pub trait Simulate: SsmModel {
    fn sample_observation<R: Rng + ?Sized>(&self, t: usize, theta: &[f64], x: &Self::State, rng: &mut R) -> Self::Obs;

    /// States and observations for `t = 1..=len`.
    fn simulate<R: Rng + ?Sized>(&self, theta: &[f64], len: usize, rng: &mut R) -> (Vec<Self::State>, Vec<Self::Obs>) {
        let mut xs: Vec<Self::State> = Vec::with_capacity(len);
        let mut ys = Vec::with_capacity(len);
        for t in 1..=len {
            let x = match xs.last() {
                None => self.sample_initial(theta, rng),
                Some(prev) => self.sample_transition(t, theta, prev, rng),
            };
            ys.push(self.sample_observation(t, theta, &x, rng));
            xs.push(x);
        }
        (xs, ys)
    }
}

/// What a particle carries besides its parameter, and how it is moved and
/// weighted. The bootstrap propagator carries a sampled state; the
/// Rao-Blackwellised one a Kalman filter.
pub trait Propagator: Sync {
    type Payload: Clone + Send + Sync;
    type Obs: Sync;

    /// Payload before the first observation, from `θ_0`.
    fn init(&self, theta: &[f64], rng: &mut StreamRng) -> Self::Payload;

    /// Log-weight of the first observation; may update the payload.
    fn weight_first(&self, theta: &[f64], payload: &mut Self::Payload, y: &Self::Obs) -> f64;

    /// Moves the payload from `t - 1` to `t` with `theta_move`, then weights
    /// `y_t` with `theta_obs`.
    fn advance(
        &self,
        t: usize,
        theta_move: &[f64],
        theta_obs: &[f64],
        prev: &Self::Payload,
        y: &Self::Obs,
        rng: &mut StreamRng,
    ) -> (Self::Payload, f64);

    fn summary_dim(&self) -> usize;

    fn summarize(&self, payload: &Self::Payload, out: &mut [f64]);
}

fn no_nan(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Propagates sampled states through the model transition.
pub struct Bootstrap<'a, M> {
    pub model: &'a M,
}

impl<'a, M> Bootstrap<'a, M> {
    pub fn new(model: &'a M) -> Self {
        Bootstrap { model }
    }
}

impl<M: SsmModel> Propagator for Bootstrap<'_, M> {
    type Payload = M::State;
    type Obs = M::Obs;

    fn init(&self, theta: &[f64], rng: &mut StreamRng) -> M::State {
        self.model.sample_initial(theta, rng)
    }

    fn weight_first(&self, theta: &[f64], x: &mut M::State, y: &M::Obs) -> f64 {
        no_nan(self.model.log_obs_density(1, theta, x, y))
    }

    fn advance(
        &self,
        t: usize,
        theta_move: &[f64],
        theta_obs: &[f64],
        prev: &M::State,
        y: &M::Obs,
        rng: &mut StreamRng,
    ) -> (M::State, f64) {
        let x = self.model.sample_transition(t, theta_move, prev, rng);
        let lw = no_nan(self.model.log_obs_density(t, theta_obs, &x, y));
        (x, lw)
    }

    fn summary_dim(&self) -> usize {
        self.model.state_summary_dim()
    }

    fn summarize(&self, x: &M::State, out: &mut [f64]) {
        self.model.summarize_state(x, out)
    }
}

/// Observation stream indexed from `t = 1`.
pub trait ObsSource<O> {
    fn at(&self, t: usize) -> &O;
}

impl<O> ObsSource<O> for [O] {
    fn at(&self, t: usize) -> &O {
        &self[t - 1]
    }
}

impl<O> ObsSource<O> for Vec<O> {
    fn at(&self, t: usize) -> &O {
        &self[t - 1]
    }
}

type PriorFn = dyn Fn(&mut StreamRng) -> Vec<f64> + Send + Sync;

/// Initial law `μ_0` of the parameter.
pub enum Prior {
    /// Uniform on the parameter space.
    Uniform,
    /// Dirac mass, e.g. for filtering at a fixed parameter.
    Point(Vec<f64>),
    Custom(Box<PriorFn>),
}

impl Prior {
    pub fn custom(f: impl Fn(&mut StreamRng) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Prior::Custom(Box::new(f))
    }

    pub fn sample(&self, space: &ParameterSpace, rng: &mut StreamRng) -> Result<Vec<f64>> {
        match self {
            Prior::Uniform => space.sample_uniform(rng),
            Prior::Point(p) => Ok(p.clone()),
            Prior::Custom(f) => Ok(f(rng)),
        }
    }
}

impl std::fmt::Debug for Prior {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Prior::Uniform => write!(f, "Uniform"),
            Prior::Point(p) => write!(f, "Point({p:?})"),
            Prior::Custom(_) => write!(f, "Custom"),
        }
    }
}
