//! Stochastic volatility model: `y_t ~ N(0, β² e^{x_t})` with an
//! autoregressive log-volatility, Student-t or Gaussian innovations.
//! The parameter is `θ = (α, β, σ)`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use statrs::function::gamma::ln_gamma;

use crate::engine::{Simulate, SsmModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SvInnovation {
    /// `x_{t+1} ~ t_ν(α x_t, σ²)`.
    Student { nu: f64 },
    /// `x_{t+1} ~ N(α x_t, σ²)`.
    Gaussian,
}

#[derive(Debug, Clone)]
pub struct StochasticVolatility {
    pub innovation: SvInnovation,
    /// `x_1 ~ N(initial_mean, initial_sd²)`.
    pub initial_mean: f64,
    pub initial_sd: f64,
    student: Option<StudentT<f64>>,
}

impl StochasticVolatility {
    pub fn new(innovation: SvInnovation) -> Result<Self> {
        let student = match innovation {
            SvInnovation::Student { nu } => Some(
                StudentT::new(nu)
                    .map_err(|_| Error::InvalidArgument(format!("degrees of freedom {nu} must be > 0")))?,
            ),
            SvInnovation::Gaussian => None,
        };
        Ok(StochasticVolatility { innovation, initial_mean: 0.0, initial_sd: 1.0, student })
    }

    pub fn with_initial(mut self, mean: f64, sd: f64) -> Self {
        self.initial_mean = mean;
        self.initial_sd = sd;
        self
    }

    pub fn validate_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != 3 {
            return Err(Error::InvalidArgument(format!("parameter has {} entries, expected 3", theta.len())));
        }
        if theta[1] <= 0.0 || theta[2] <= 0.0 {
            return Err(Error::InvalidArgument("beta and sigma must be positive".into()));
        }
        Ok(())
    }

    /// Log-density of the state transition.
    pub fn log_transition_density(&self, theta: &[f64], prev: f64, x: f64) -> f64 {
        let (alpha, sigma) = (theta[0], theta[2]);
        if sigma <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let z = (x - alpha * prev) / sigma;
        match self.innovation {
            SvInnovation::Gaussian => -0.5 * (2.0 * std::f64::consts::PI).ln() - sigma.ln() - 0.5 * z * z,
            SvInnovation::Student { nu } => {
                ln_gamma((nu + 1.0) / 2.0)
                    - ln_gamma(nu / 2.0)
                    - 0.5 * (nu * std::f64::consts::PI).ln()
                    - sigma.ln()
                    - (nu + 1.0) / 2.0 * (z * z / nu).ln_1p()
            }
        }
    }
}

impl SsmModel for StochasticVolatility {
    type State = f64;
    type Obs = f64;

    fn param_dim(&self) -> usize {
        3
    }

    fn state_summary_dim(&self) -> usize {
        1
    }

    fn sample_initial<R: Rng + ?Sized>(&self, _theta: &[f64], rng: &mut R) -> f64 {
        self.initial_mean + self.initial_sd * rng.sample::<f64, _>(StandardNormal)
    }

    fn sample_transition<R: Rng + ?Sized>(&self, _t: usize, theta: &[f64], prev: &f64, rng: &mut R) -> f64 {
        let e: f64 = match &self.student {
            Some(st) => st.sample(rng),
            None => rng.sample(StandardNormal),
        };
        theta[0] * prev + theta[2] * e
    }

    fn log_obs_density(&self, _t: usize, theta: &[f64], x: &f64, y: &f64) -> f64 {
        let beta = theta[1];
        if beta <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let var = beta * beta * x.exp();
        -0.5 * (2.0 * std::f64::consts::PI * var).ln() - 0.5 * y * y / var
    }

    fn summarize_state(&self, x: &f64, out: &mut [f64]) {
        out[0] = *x;
    }
}

impl Simulate for StochasticVolatility {
    fn sample_observation<R: Rng + ?Sized>(&self, _t: usize, theta: &[f64], x: &f64, rng: &mut R) -> f64 {
        theta[1] * (0.5 * x).exp() * rng.sample::<f64, _>(StandardNormal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obs_density_examples() {
        let m = StochasticVolatility::new(SvInnovation::Gaussian).unwrap();
        let want = -0.5 * (2.0 * std::f64::consts::PI).ln() - 0.5;
        assert!((m.log_obs_density(1, &[0.9, 1.0, 0.3], &0.0, &1.0) - want).abs() < 1e-15);
        assert!(m.validate_theta(&[0.9, 0.0, 0.3]).is_err());
        assert!(m.validate_theta(&[0.9, 1.0, -0.3]).is_err());
    }

    #[test]
    fn student_density_integrates_to_one() {
        let m = StochasticVolatility::new(SvInnovation::Student { nu: 5.0 }).unwrap();
        let th = [0.5, 1.0, 0.7];
        let h = 1e-3;
        let total: f64 =
            (-40_000..40_000).map(|k| m.log_transition_density(&th, 0.4, 0.2 + k as f64 * h).exp() * h).sum();
        assert!((total - 1.0).abs() < 1e-3, "{total}");
    }
}
