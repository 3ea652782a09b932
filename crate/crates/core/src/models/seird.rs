//! Beta-Dirichlet SEIRD epidemic model on population fractions.
//!
//! State: compartments `(S, E, I, R, D)` on the simplex plus a time-varying
//! transmission rate `β_t` and infectious fraction `q_t`, both following
//! log random walks. Observations are the daily fractions of new cases and
//! new deaths. The parameter is `θ = (η, γ, μ, σ_q, σ_β, κ, λ_1, λ_2)`.

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::dynamics::ParameterSpace;
use crate::engine::{Simulate, SsmModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeirdState {
    /// `(S, E, I, R, D)`.
    pub w: [f64; 5],
    pub beta: f64,
    pub q: f64,
}

/// Euler step of the compartment ODE.
pub fn seird_map(w: [f64; 5], beta: f64, q: f64, eta: f64, gamma: f64, mu: f64) -> [f64; 5] {
    let [s, e, i, r, d] = w;
    let inf = beta * s * (e + q * i);
    [s - inf, e + inf - eta * e - gamma * e, i + eta * e - gamma * i - mu * i, r + gamma * e + gamma * i, d + mu * i]
}

/// `β_t S_t (1 + q_t η / (γ + μ)) / (γ + η)`.
pub fn effective_reproduction(theta: &[f64], state: &SeirdState) -> Result<f64> {
    let (eta, gamma, mu) = (theta[0], theta[1], theta[2]);
    if gamma + mu <= 0.0 || gamma + eta <= 0.0 {
        return Err(Error::InvalidArgument("effective reproduction needs gamma + mu > 0 and gamma + eta > 0".into()));
    }
    Ok(state.beta * state.w[0] * (1.0 + state.q * eta / (gamma + mu)) / (gamma + eta))
}

/// `log Beta(y; a, b)`, `-∞` for invalid shapes or `y ∉ (0, 1)`.
pub fn log_beta_density(y: f64, a: f64, b: f64) -> f64 {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) || !(y > 0.0 && y < 1.0) {
        return f64::NEG_INFINITY;
    }
    ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + (a - 1.0) * y.ln() + (b - 1.0) * (-y).ln_1p()
}

/// Dirichlet draw by normalised gammas; non-positive concentrations give a
/// zero component.
pub fn sample_dirichlet<R: Rng + ?Sized, const N: usize>(alpha: [f64; N], rng: &mut R) -> [f64; N] {
    let mut g = [0.0; N];
    for (gi, &a) in g.iter_mut().zip(&alpha) {
        if a > 0.0 && a.is_finite() {
            *gi = Gamma::new(a, 1.0).expect("positive shape").sample(rng);
        }
    }
    let total: f64 = g.iter().sum();
    if total > 0.0 {
        for gi in g.iter_mut() {
            *gi /= total;
        }
    }
    g
}

#[derive(Debug, Clone, Default)]
pub struct Seird;

impl Seird {
    pub fn new() -> Self {
        Seird
    }

    /// `(γ, μ, σ_q, σ_β) ∈ [0, 0.5]^4`, `η ∈ [0, 1 - γ]`,
    /// `(κ, λ_1, λ_2) ∈ [1e-7, 1e-4]^3`.
    pub fn default_space() -> ParameterSpace {
        let lo = vec![0.0, 0.0, 0.0, 0.0, 0.0, 1e-7, 1e-7, 1e-7];
        let hi = vec![1.0, 0.5, 0.5, 0.5, 0.5, 1e-4, 1e-4, 1e-4];
        ParameterSpace::boxed(lo, hi)
            .and_then(|s| s.with_constraint(vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0))
            .expect("valid space")
    }

    fn advance<R: Rng + ?Sized>(&self, theta: &[f64], prev: &SeirdState, rng: &mut R) -> SeirdState {
        let (eta, gamma, mu, sq, sb, kappa) = (theta[0], theta[1], theta[2], theta[3], theta[4], theta[5]);
        let f = seird_map(prev.w, prev.beta, prev.q, eta, gamma, mu);
        let alpha = f.map(|v| v / kappa);
        let w = sample_dirichlet(alpha, rng);
        let zq: f64 = rng.sample(StandardNormal);
        let zb: f64 = rng.sample(StandardNormal);
        SeirdState { w, q: prev.q * (sq * zq).exp(), beta: prev.beta * (sb * zb).exp() }
    }

    fn obs_shapes(theta: &[f64], x: &SeirdState) -> [(f64, f64); 2] {
        let (eta, mu, l1, l2) = (theta[0], theta[2], theta[6], theta[7]);
        let a1 = eta * x.w[1];
        let a2 = mu * x.w[2];
        [(a1 / l1, (1.0 - a1) / l1), (a2 / l2, (1.0 - a2) / l2)]
    }
}

impl SsmModel for Seird {
    type State = SeirdState;
    type Obs = [f64; 2];

    fn param_dim(&self) -> usize {
        8
    }

    /// `(S, E, I, R, D, β, q)`.
    fn state_summary_dim(&self) -> usize {
        7
    }

    fn sample_initial<R: Rng + ?Sized>(&self, theta: &[f64], rng: &mut R) -> SeirdState {
        let i0 = rng.random_range(0.0..1e-4);
        let e0 = rng.random_range(0.0..1e-4);
        let q0 = rng.random_range(0.5..1.0);
        let beta0 = rng.random_range(0.0..0.5);
        let x0 = SeirdState { w: [1.0 - i0 - e0, e0, i0, 0.0, 0.0], beta: beta0, q: q0 };
        self.advance(theta, &x0, rng)
    }

    fn sample_transition<R: Rng + ?Sized>(
        &self,
        _t: usize,
        theta: &[f64],
        prev: &SeirdState,
        rng: &mut R,
    ) -> SeirdState {
        self.advance(theta, prev, rng)
    }

    fn log_obs_density(&self, _t: usize, theta: &[f64], x: &SeirdState, y: &[f64; 2]) -> f64 {
        let [(a1, b1), (a2, b2)] = Self::obs_shapes(theta, x);
        log_beta_density(y[0], a1, b1) + log_beta_density(y[1], a2, b2)
    }

    fn summarize_state(&self, x: &SeirdState, out: &mut [f64]) {
        out[..5].copy_from_slice(&x.w);
        out[5] = x.beta;
        out[6] = x.q;
    }
}

impl Simulate for Seird {
    fn sample_observation<R: Rng + ?Sized>(&self, _t: usize, theta: &[f64], x: &SeirdState, rng: &mut R) -> [f64; 2] {
        Self::obs_shapes(theta, x).map(|(a, b)| match Beta::new(a, b) {
            Ok(d) => d.sample(rng),
            Err(_) => 0.0,
        })
    }
}
