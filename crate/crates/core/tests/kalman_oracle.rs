// Kalman recursions against the joint Gaussian law of y_{1:T}, built
// directly from the model matrices.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use sossm::kalman::{kf_filter, kf_loglik, KalmanState, LgSpec, Observation, Transition};

#[derive(Debug, Clone)]
struct Fixed {
    m0: DVector<f64>,
    p0: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
    offset: DVector<f64>,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl LgSpec for Fixed {
    type Obs = Vec<f64>;

    fn state_dim(&self) -> usize {
        self.c.nrows()
    }

    fn obs_dim(&self) -> usize {
        self.a.nrows()
    }

    fn initial(&self, _theta: &[f64]) -> KalmanState {
        KalmanState::new(self.m0.clone(), self.p0.clone())
    }

    fn transition(&self, _t: usize, _theta: &[f64]) -> Transition {
        Transition::Linear { c: self.c.clone(), d: self.d.clone() }
    }

    fn observation(&self, _t: usize, _theta: &[f64]) -> Observation {
        Observation { offset: self.offset.clone(), loading: self.a.clone(), cov: self.b.clone() }
    }
}

fn spd(n: usize, v: &[f64]) -> DMatrix<f64> {
    let l = DMatrix::from_fn(n, n, |i, j| if j <= i { v[i * 3 + j] } else { 0.0 });
    &l * l.transpose() + DMatrix::identity(n, n) * 0.3
}

/// Mean and covariance of the stacked observations.
fn joint(m: &Fixed, t_len: usize) -> (DVector<f64>, DMatrix<f64>) {
    let (dx, dy) = (m.state_dim(), m.obs_dim());
    let mut means = vec![m.m0.clone()];
    let mut covs = vec![m.p0.clone()];
    for t in 1..t_len {
        means.push(&m.c * &means[t - 1]);
        covs.push(&m.c * &covs[t - 1] * m.c.transpose() + &m.d);
    }
    let mut mu = DVector::zeros(t_len * dy);
    let mut sig = DMatrix::zeros(t_len * dy, t_len * dy);
    for s in 0..t_len {
        mu.rows_mut(s * dy, dy).copy_from(&(&m.offset + &m.a * &means[s]));
        let mut cross = covs[s].clone();
        for t in s..t_len {
            // Cov(x_s, x_t) = P_s (C^{t-s})'
            let block = &m.a * &cross * m.a.transpose();
            sig.view_mut((s * dy, t * dy), (dy, dy)).copy_from(&block);
            sig.view_mut((t * dy, s * dy), (dy, dy)).copy_from(&block.transpose());
            cross = &cross * m.c.transpose();
        }
        let diag = sig.view((s * dy, s * dy), (dy, dy)) + &m.b;
        sig.view_mut((s * dy, s * dy), (dy, dy)).copy_from(&diag);
    }
    let _ = dx;
    (mu, sig)
}

fn gaussian_logpdf(y: &DVector<f64>, mu: &DVector<f64>, sig: &DMatrix<f64>) -> f64 {
    let n = y.len() as f64;
    let ch = sig.clone().cholesky().expect("positive definite");
    let r = y - mu;
    let z = ch.solve(&r);
    let logdet: f64 = 2.0 * ch.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    -0.5 * (n * (2.0 * std::f64::consts::PI).ln() + logdet + r.dot(&z))
}

fn arb_case() -> impl Strategy<Value = (Fixed, Vec<Vec<f64>>)> {
    (1usize..=3, 1usize..=2, 1usize..=6).prop_flat_map(|(dx, dy, t_len)| {
        (
            prop::collection::vec(-0.8f64..0.8, 9),
            prop::collection::vec(-1.0f64..1.0, 9),
            prop::collection::vec(-1.0f64..1.0, 9),
            prop::collection::vec(-1.0f64..1.0, 9),
            prop::collection::vec(-1.0f64..1.0, 9),
            prop::collection::vec(-2.0f64..2.0, t_len * dy + 5),
        )
            .prop_map(move |(c, d, p0, a, b, ys)| {
                let m = Fixed {
                    m0: DVector::from_fn(dx, |i, _| ys[ys.len() - 1 - i]),
                    p0: spd(dx, &p0),
                    c: DMatrix::from_fn(dx, dx, |i, j| c[i * 3 + j] / dx as f64),
                    d: spd(dx, &d),
                    offset: DVector::from_fn(dy, |i, _| a[8 - i]),
                    a: DMatrix::from_fn(dy, dx, |i, j| a[i * 3 + j]),
                    b: spd(dy, &b),
                };
                let obs = (0..t_len).map(|t| ys[t * dy..(t + 1) * dy].to_vec()).collect();
                (m, obs)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn loglik_matches_joint_density((model, ys) in arb_case()) {
        let got = kf_loglik(&model, &[], &ys).unwrap();
        let (mu, sig) = joint(&model, ys.len());
        let y = DVector::from_iterator(mu.len(), ys.iter().flatten().copied());
        let want = gaussian_logpdf(&y, &mu, &sig);
        prop_assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0), "kalman {got} joint {want}");
    }

    #[test]
    fn filtered_increments_sum_to_loglik((model, ys) in arb_case()) {
        let steps = kf_filter(&model, &[], &ys).unwrap();
        let total: f64 = steps.iter().map(|s| s.1).sum();
        let ll = kf_loglik(&model, &[], &ys).unwrap();
        prop_assert!((total - ll).abs() <= 1e-10 * ll.abs().max(1.0));
        for s in &steps {
            prop_assert!(s.0.cov.symmetric_eigenvalues().iter().all(|e| *e > 0.0));
        }
    }
}

#[test]
fn scalar_random_walk_by_hand() {
    // x_1 ~ N(0, 1), x_2 = x_1 + N(0, 1), y_t = x_t + N(0, 1)
    let one = DMatrix::from_element(1, 1, 1.0);
    let m = Fixed {
        m0: DVector::zeros(1),
        p0: one.clone(),
        c: one.clone(),
        d: one.clone(),
        offset: DVector::zeros(1),
        a: one.clone(),
        b: one,
    };
    let ys = vec![vec![1.0], vec![2.0]];
    // y ~ N(0, [[2, 1], [1, 3]])
    let (det, q) = (5.0f64, (3.0 * 1.0 - 2.0 * 1.0 * 2.0 + 2.0 * 4.0) / 5.0);
    let want = -(2.0 * std::f64::consts::PI).ln() - 0.5 * det.ln() - 0.5 * q;
    assert!((kf_loglik(&m, &[], &ys).unwrap() - want).abs() < 1e-12);
}
