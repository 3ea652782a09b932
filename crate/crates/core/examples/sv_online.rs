// Online learning of a stochastic volatility model with Student-t
// log-volatility innovations.
//
// `cargo run --release --example sv_online`

use sossm::dynamics::{DynamicsSchedule, ParameterSpace};
use sossm::engine::{run_adaptive_slow, FilterConfig, Prior, Simulate};
use sossm::models::{StochasticVolatility, SvInnovation};
use sossm::rng::{Purpose, Streams};

/// Returns `(θ⋆, final θ̂)`.
pub fn run_example() -> sossm::Result<(Vec<f64>, Vec<f64>)> {
    let model = StochasticVolatility::new(SvInnovation::Student { nu: 5.0 })?;
    let theta_star = vec![0.9, 0.7, 0.4];
    let (_, ys) = model.simulate(&theta_star, 4000, &mut Streams::new(5).stream(Purpose::Simulate, 0, 0));

    let space = ParameterSpace::boxed(vec![-1.0, 1e-3, 1e-3], vec![1.0, 5.0, 3.0])?;
    let schedule = DynamicsSchedule::slow(0.5, 3, 1, 101);
    let rec = run_adaptive_slow(&model, &ys, &space, &Prior::Uniform, &schedule, &FilterConfig::new(1000, 5))?;
    println!("theta* = {theta_star:.3?}  (alpha, beta, sigma)");
    for t in [100, 1000, 4000] {
        let row = rec.at(t).expect("row");
        println!("t={t:5}  theta_hat={:.3?}  ess={:.0}", row.theta_hat, row.ess);
    }
    Ok((theta_star, rec.theta_hat().expect("rows").to_vec()))
}

#[allow(dead_code)]
fn main() -> sossm::Result<()> {
    run_example().map(|_| ())
}
