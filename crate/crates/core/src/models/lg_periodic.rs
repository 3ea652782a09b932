//! Daily-periodic linear Gaussian model with a natural cubic spline mean.
//!
//! With hour `h(t) = t - 24⌊(t - 1)/24⌋` and basis row `b(h)`,
//! `y_t ~ N(Σ_j (β_j + X_{j,t}) b_j(h(t)), σ_1²)` and
//! `X_{t+1} ~ N(diag(ρ) X_t, diag(σ_2², …, σ_{p+1}²))`, `X_1 ~ N(0, 4 I)`.
//! The parameter is `θ = (β_1..β_p, ρ_1..ρ_p, σ_1..σ_{p+1})`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::spline::SplineBasis;
use crate::dynamics::ParameterSpace;
use crate::engine::{Simulate, SsmModel};
use crate::error::{Error, Result};
use crate::kalman::{kf_loglik, KalmanState, LgSpec, Observation, Transition};

/// Variance of each coordinate of `X_1`.
pub const INITIAL_VARIANCE: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct LgPeriodic {
    p: usize,
    basis: SplineBasis,
    /// `b(h)` for `h = 1..=24`.
    rows: Vec<Vec<f64>>,
}

/// Hour of the day, in `1..=24`, for time `t >= 1`.
pub fn hour(t: usize) -> usize {
    t - 24 * ((t - 1) / 24)
}

impl LgPeriodic {
    pub fn new(basis: SplineBasis) -> Result<Self> {
        let rows = (1..=24).map(|h| basis.eval(h as f64)).collect::<Result<Vec<_>>>()?;
        Ok(LgPeriodic { p: basis.dim(), basis, rows })
    }

    /// Model with `p` equally spaced interior knots.
    pub fn with_dim(p: usize) -> Result<Self> {
        Self::new(SplineBasis::uniform(p)?)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn basis(&self) -> &SplineBasis {
        &self.basis
    }

    /// Basis row used at time `t`.
    pub fn basis_row(&self, t: usize) -> &[f64] {
        &self.rows[hour(t) - 1]
    }

    fn split<'a>(&self, theta: &'a [f64]) -> (&'a [f64], &'a [f64], &'a [f64]) {
        let p = self.p;
        (&theta[..p], &theta[p..2 * p], &theta[2 * p..])
    }

    /// Rejects parameters of the wrong length or with negative scales.
    pub fn validate_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != 3 * self.p + 1 {
            return Err(Error::InvalidArgument(format!(
                "parameter has {} entries, expected {}",
                theta.len(),
                3 * self.p + 1
            )));
        }
        if let Some(i) = self.split(theta).2.iter().position(|s| *s < 0.0) {
            return Err(Error::InvalidArgument(format!("scale sigma_{} is negative", i + 1)));
        }
        Ok(())
    }

    /// Search box used for learning: `β ∈ [-10, 10]^p`, `ρ ∈ [-1, 1]^p`,
    /// `σ ∈ [0, 4]^{p+1}`.
    pub fn default_space(&self) -> ParameterSpace {
        let p = self.p;
        let mut lo = vec![-10.0; p];
        let mut hi = vec![10.0; p];
        lo.extend(vec![-1.0; p]);
        hi.extend(vec![1.0; p]);
        lo.extend(vec![0.0; p + 1]);
        hi.extend(vec![4.0; p + 1]);
        ParameterSpace::boxed(lo, hi).expect("valid box")
    }

    /// Draw of a true parameter for simulation studies: `β ~ U[-2, 2]^p`,
    /// `ρ ~ U[-1, 1]^p`, `σ = (0.5, 1, …, 1)`.
    pub fn sample_true_theta<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let p = self.p;
        let mut th: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
        th.extend((0..p).map(|_| rng.random_range(-1.0..1.0)));
        th.push(0.5);
        th.extend(vec![1.0; p]);
        th
    }

    fn mean_obs(&self, t: usize, theta: &[f64], x: &[f64]) -> f64 {
        let (beta, _, _) = self.split(theta);
        self.basis_row(t).iter().zip(beta.iter().zip(x)).map(|(b, (be, xi))| b * (be + xi)).sum()
    }
}

impl SsmModel for LgPeriodic {
    type State = Vec<f64>;
    type Obs = f64;

    fn period(&self) -> usize {
        24
    }

    fn param_dim(&self) -> usize {
        3 * self.p + 1
    }

    fn state_summary_dim(&self) -> usize {
        self.p
    }

    fn sample_initial<R: Rng + ?Sized>(&self, _theta: &[f64], rng: &mut R) -> Vec<f64> {
        let sd = INITIAL_VARIANCE.sqrt();
        (0..self.p).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
    }

    fn sample_transition<R: Rng + ?Sized>(&self, _t: usize, theta: &[f64], prev: &Vec<f64>, rng: &mut R) -> Vec<f64> {
        let (_, rho, sigma) = self.split(theta);
        prev.iter()
            .zip(rho)
            .zip(&sigma[1..])
            .map(|((x, r), s)| r * x + s * rng.sample::<f64, _>(StandardNormal))
            .collect()
    }

    fn log_obs_density(&self, t: usize, theta: &[f64], x: &Vec<f64>, y: &f64) -> f64 {
        let s = self.split(theta).2[0];
        if s < 0.0 {
            return f64::NEG_INFINITY;
        }
        let z = y - self.mean_obs(t, theta, x);
        if s == 0.0 {
            return if z == 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        -0.5 * (2.0 * std::f64::consts::PI).ln() - s.ln() - 0.5 * (z / s).powi(2)
    }

    fn summarize_state(&self, x: &Vec<f64>, out: &mut [f64]) {
        out.copy_from_slice(x);
    }

    fn exact_loglik(&self, theta: &[f64], ys: &[f64]) -> Option<f64> {
        kf_loglik(self, theta, ys).ok()
    }
}

impl Simulate for LgPeriodic {
    fn sample_observation<R: Rng + ?Sized>(&self, t: usize, theta: &[f64], x: &Vec<f64>, rng: &mut R) -> f64 {
        let s = self.split(theta).2[0];
        self.mean_obs(t, theta, x) + s * rng.sample::<f64, _>(StandardNormal)
    }
}

impl LgSpec for LgPeriodic {
    type Obs = f64;

    fn state_dim(&self) -> usize {
        self.p
    }

    fn obs_dim(&self) -> usize {
        1
    }

    fn initial(&self, _theta: &[f64]) -> KalmanState {
        KalmanState::new(DVector::zeros(self.p), DMatrix::identity(self.p, self.p) * INITIAL_VARIANCE)
    }

    fn transition(&self, _t: usize, theta: &[f64]) -> Transition {
        let (_, rho, sigma) = self.split(theta);
        Transition::Linear {
            c: DMatrix::from_diagonal(&DVector::from_column_slice(rho)),
            d: DMatrix::from_diagonal(&DVector::from_iterator(self.p, sigma[1..].iter().map(|s| s * s))),
        }
    }

    fn observation(&self, t: usize, theta: &[f64]) -> Observation {
        let (beta, _, sigma) = self.split(theta);
        let row = self.basis_row(t);
        let offset: f64 = row.iter().zip(beta).map(|(b, be)| b * be).sum();
        Observation {
            offset: DVector::from_element(1, offset),
            loading: DMatrix::from_row_slice(1, self.p, row),
            cov: DMatrix::from_element(1, 1, sigma[0] * sigma[0]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, Streams};

    #[test]
    fn period_and_hours() {
        let m = LgPeriodic::with_dim(3).unwrap();
        assert_eq!(hour(1), 1);
        assert_eq!(hour(24), 24);
        assert_eq!(hour(25), 1);
        assert_eq!(m.basis_row(25), m.basis_row(1));
        assert_eq!(m.basis().knots(), &[0.0, 8.0, 16.0, 24.0]);
        assert_eq!(LgPeriodic::with_dim(4).unwrap().basis().knots(), &[0.0, 6.0, 12.0, 18.0, 24.0]);
    }

    #[test]
    fn negative_scale_rejected() {
        let m = LgPeriodic::with_dim(1).unwrap();
        assert!(m.validate_theta(&[0.0, 0.5, -1.0, 1.0]).is_err());
        assert!(m.validate_theta(&[0.0, 0.5, 1.0]).is_err());
        assert!(m.validate_theta(&[0.0, 0.5, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn zero_dynamics_give_deterministic_state() {
        let m = LgPeriodic::with_dim(2).unwrap();
        let th = [1.0, -1.0, 0.0, 0.0, 0.3, 0.0, 0.0];
        let mut rng = Streams::new(5).stream(Purpose::Simulate, 0, 0);
        let (xs, _) = m.simulate(&th, 30, &mut rng);
        for x in &xs[1..] {
            assert!(x.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn true_theta_lies_in_space() {
        let m = LgPeriodic::with_dim(2).unwrap();
        let mut rng = Streams::new(6).stream(Purpose::Simulate, 0, 0);
        for _ in 0..50 {
            assert!(m.default_space().contains(&m.sample_true_theta(&mut rng)));
        }
    }
}
