// Global optimisation of an expected payoff from noisy draws: maximise
// `E[-(θ - Y)²]` with `Y ~ N(0.3, 1)`, whose maximiser is 0.3.
//
// `cargo run --release --example noisy_optimizer`

use rand::Rng;
use rand_distr::StandardNormal;
use sossm::dynamics::{DynamicsSchedule, ParameterSpace};
use sossm::engine::{FilterConfig, Prior};
use sossm::mle::run_noisy_opt;
use sossm::rng::{Purpose, Streams};

/// Returns the final estimate of the maximiser.
pub fn run_example() -> sossm::Result<f64> {
    let mut rng = Streams::new(1).stream(Purpose::Simulate, 0, 0);
    let ys: Vec<f64> = (0..5000).map(|_| 0.3 + rng.sample::<f64, _>(StandardNormal)).collect();
    let space = ParameterSpace::boxed(vec![-2.0], vec![2.0])?;
    let schedule = DynamicsSchedule::slow(0.5, 1, 1, 101);
    let rec = run_noisy_opt(
        |y: &f64, th: &[f64]| -(th[0] - y).powi(2),
        &ys,
        &space,
        &Prior::Uniform,
        &schedule,
        &FilterConfig::new(1000, 1),
    )?;
    for t in [10, 100, 1000, 5000] {
        println!("t={t:5}  theta_hat={:.4}", rec.at(t).expect("row").theta_hat[0]);
    }
    Ok(rec.theta_hat().expect("rows")[0])
}

#[allow(dead_code)]
fn main() -> sossm::Result<()> {
    run_example().map(|_| ())
}
