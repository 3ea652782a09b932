//! Kalman recursions for linear Gaussian models and the Rao-Blackwellised
//! propagator that runs one Kalman filter per particle.
//!
//! Model form: `y_t | x_t ~ N(m_t + A_t x_t, B_t)` and
//! `x_t | x_{t-1} ~ N(C x_{t-1}, D)` with `(C, D)` supplied per time step.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::engine::Propagator;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Gaussian belief over the state.
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanState {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl KalmanState {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        KalmanState { mean, cov }
    }
}

/// Law of `x_t` given `x_{t-1}`.
#[derive(Debug, Clone)]
pub enum Transition {
    /// `x_t ~ N(C x_{t-1}, D)`.
    Linear { c: DMatrix<f64>, d: DMatrix<f64> },
    /// The state is redrawn from the initial law, independent of the past.
    Restart,
}

/// Observation law `y_t ~ N(offset + loading x_t, cov)`.
#[derive(Debug, Clone)]
pub struct Observation {
    pub offset: DVector<f64>,
    pub loading: DMatrix<f64>,
    pub cov: DMatrix<f64>,
}

/// Observations usable by the Kalman filter.
pub trait ObsVector {
    fn as_obs_slice(&self) -> &[f64];
}

impl ObsVector for f64 {
    fn as_obs_slice(&self) -> &[f64] {
        std::slice::from_ref(self)
    }
}

impl ObsVector for Vec<f64> {
    fn as_obs_slice(&self) -> &[f64] {
        self
    }
}

impl<const N: usize> ObsVector for [f64; N] {
    fn as_obs_slice(&self) -> &[f64] {
        self
    }
}

/// Linear Gaussian model description.
pub trait LgSpec: Sync {
    type Obs: ObsVector + Sync;

    fn state_dim(&self) -> usize;
    fn obs_dim(&self) -> usize;
    /// Law of `x_1`.
    fn initial(&self, theta: &[f64]) -> KalmanState;
    /// Law of `x_t` given `x_{t-1}`, `t >= 2`.
    fn transition(&self, t: usize, theta: &[f64]) -> Transition;
    fn observation(&self, t: usize, theta: &[f64]) -> Observation;
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Prediction step to time `t`.
pub fn kf_predict<L: LgSpec + ?Sized>(state: &KalmanState, spec: &L, theta: &[f64], t: usize) -> KalmanState {
    match spec.transition(t, theta) {
        Transition::Restart => spec.initial(theta),
        Transition::Linear { c, d } => {
            let mean = &c * &state.mean;
            let mut cov = &c * &state.cov * c.transpose() + d;
            symmetrize(&mut cov);
            KalmanState { mean, cov }
        }
    }
}

/// Update of a predicted state with `y_t`; returns the filtered state and
/// `log p(y_t | y_{1:t-1})`.
pub fn kf_update<L: LgSpec + ?Sized>(
    pred: &KalmanState,
    spec: &L,
    theta: &[f64],
    t: usize,
    y: &L::Obs,
) -> Result<(KalmanState, f64)> {
    let obs = spec.observation(t, theta);
    let y = y.as_obs_slice();
    let dy = y.len();
    if dy != obs.offset.len() {
        return Err(Error::InvalidArgument(format!(
            "observation at t={t} has {dy} entries, model expects {}",
            obs.offset.len()
        )));
    }
    let a = &obs.loading;
    let pa_t = &pred.cov * a.transpose();
    let mut s = a * &pa_t + &obs.cov;
    symmetrize(&mut s);
    let chol = Cholesky::<f64, Dyn>::new(s).ok_or(Error::NotPositiveDefinite { t })?;
    let innov = DVector::from_column_slice(y) - &obs.offset - a * &pred.mean;
    let sinv_v = chol.solve(&innov);
    let log_det: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let quad = innov.dot(&sinv_v);
    let incr = -0.5 * (dy as f64 * (2.0 * std::f64::consts::PI).ln() + log_det + quad);
    // gain K = P A' S^{-1}
    let gain = chol.solve(&pa_t.transpose()).transpose();
    let mean = &pred.mean + &gain * innov;
    let n = pred.mean.len();
    let ika = DMatrix::<f64>::identity(n, n) - &gain * a;
    let mut cov = &ika * &pred.cov * ika.transpose() + &gain * &obs.cov * gain.transpose();
    symmetrize(&mut cov);
    Ok((KalmanState { mean, cov }, incr))
}

/// One predict/update step from the filtered state at `t - 1` to `t`.
pub fn kf_step<L: LgSpec + ?Sized>(
    state: &KalmanState,
    spec: &L,
    theta: &[f64],
    t: usize,
    y: &L::Obs,
) -> Result<(KalmanState, f64)> {
    let pred = kf_predict(state, spec, theta, t);
    kf_update(&pred, spec, theta, t, y)
}

/// Filtered states and log-likelihood increments for `y_1..y_T`.
pub fn kf_filter<L: LgSpec + ?Sized>(spec: &L, theta: &[f64], ys: &[L::Obs]) -> Result<Vec<(KalmanState, f64)>> {
    let mut out: Vec<(KalmanState, f64)> = Vec::with_capacity(ys.len());
    for (i, y) in ys.iter().enumerate() {
        let t = i + 1;
        let pred = match out.last() {
            None => spec.initial(theta),
            Some((prev, _)) => kf_predict(prev, spec, theta, t),
        };
        out.push(kf_update(&pred, spec, theta, t, y)?);
    }
    Ok(out)
}

/// Exact log-likelihood `log p_θ(y_{1:T})`; zero for no observations.
pub fn kf_loglik<L: LgSpec + ?Sized>(spec: &L, theta: &[f64], ys: &[L::Obs]) -> Result<f64> {
    let mut total = 0.0;
    let mut state: Option<KalmanState> = None;
    for (i, y) in ys.iter().enumerate() {
        let t = i + 1;
        let pred = match &state {
            None => spec.initial(theta),
            Some(prev) => kf_predict(prev, spec, theta, t),
        };
        let (s, incr) = kf_update(&pred, spec, theta, t, y)?;
        total += incr;
        state = Some(s);
    }
    Ok(total)
}

/// Rao-Blackwellised propagator: each particle carries the Kalman filter of
/// the state given its own parameter path, and is weighted by the Kalman
/// predictive density. A particle whose innovation covariance is not
/// positive definite gets zero weight.
pub struct RaoBlackwell<'a, L> {
    pub spec: &'a L,
}

impl<'a, L> RaoBlackwell<'a, L> {
    pub fn new(spec: &'a L) -> Self {
        RaoBlackwell { spec }
    }
}

impl<L: LgSpec> Propagator for RaoBlackwell<'_, L> {
    type Payload = KalmanState;
    type Obs = L::Obs;

    fn init(&self, theta: &[f64], _rng: &mut StreamRng) -> KalmanState {
        self.spec.initial(theta)
    }

    fn weight_first(&self, theta: &[f64], payload: &mut KalmanState, y: &L::Obs) -> f64 {
        match kf_update(payload, self.spec, theta, 1, y) {
            Ok((s, incr)) if !incr.is_nan() => {
                *payload = s;
                incr
            }
            _ => f64::NEG_INFINITY,
        }
    }

    fn advance(
        &self,
        t: usize,
        theta_move: &[f64],
        theta_obs: &[f64],
        prev: &KalmanState,
        y: &L::Obs,
        _rng: &mut StreamRng,
    ) -> (KalmanState, f64) {
        let pred = kf_predict(prev, self.spec, theta_move, t);
        match kf_update(&pred, self.spec, theta_obs, t, y) {
            Ok((s, incr)) if !incr.is_nan() => (s, incr),
            _ => (pred, f64::NEG_INFINITY),
        }
    }

    fn summary_dim(&self) -> usize {
        self.spec.state_dim()
    }

    fn summarize(&self, payload: &KalmanState, out: &mut [f64]) {
        out.copy_from_slice(payload.mean.as_slice());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scalar random walk `x_t = x_{t-1} + N(0, q)`, `y_t = x_t + N(0, r)`.
    struct Scalar {
        q: f64,
        r: f64,
    }

    impl LgSpec for Scalar {
        type Obs = f64;
        fn state_dim(&self) -> usize {
            1
        }
        fn obs_dim(&self) -> usize {
            1
        }
        fn initial(&self, _theta: &[f64]) -> KalmanState {
            KalmanState::new(DVector::from_element(1, 0.0), DMatrix::from_element(1, 1, 1.0))
        }
        fn transition(&self, _t: usize, _theta: &[f64]) -> Transition {
            Transition::Linear { c: DMatrix::from_element(1, 1, 1.0), d: DMatrix::from_element(1, 1, self.q) }
        }
        fn observation(&self, _t: usize, _theta: &[f64]) -> Observation {
            Observation {
                offset: DVector::from_element(1, 0.0),
                loading: DMatrix::from_element(1, 1, 1.0),
                cov: DMatrix::from_element(1, 1, self.r),
            }
        }
    }

    fn log_normal(y: f64, var: f64) -> f64 {
        -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + y * y / var)
    }

    #[test]
    fn update_example() {
        let spec = Scalar { q: 0.0, r: 1.0 };
        let prior = spec.initial(&[]);
        let (s, incr) = kf_update(&prior, &spec, &[], 1, &0.0).unwrap();
        assert!(s.mean[0].abs() < 1e-15);
        assert!((s.cov[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((incr - log_normal(0.0, 2.0)).abs() < 1e-14);
        // predict with C = 1, D = 0 leaves the state unchanged
        let (s2, _) = kf_step(&s, &spec, &[], 2, &0.0).unwrap();
        assert!((s2.cov[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn loglik_edge_cases() {
        let spec = Scalar { q: 1.0, r: 1.0 };
        assert_eq!(kf_loglik(&spec, &[], &[]).unwrap(), 0.0);
        // y_1 ~ N(0, 2) under this spec
        let ll = kf_loglik(&spec, &[], &[0.0]).unwrap();
        assert!((ll - log_normal(0.0, 2.0)).abs() < 1e-14);
        // two-step marginal: (y1, y2) ~ N(0, [[2, 1], [1, 3]])
        let ys = [0.3, -0.7];
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let det: f64 = cov.determinant();
        let inv = cov.try_inverse().unwrap();
        let v = DVector::from_column_slice(&ys);
        let want = -0.5 * (2.0 * (2.0 * std::f64::consts::PI).ln() + det.ln() + v.dot(&(&inv * &v)));
        let got = kf_loglik(&spec, &[], &ys).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn non_pd_innovation_is_an_error() {
        let spec = Scalar { q: 0.0, r: -5.0 };
        let err = kf_loglik(&spec, &[], &[0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { t: 1 }));
    }
}
