// Log-likelihood of the linear Gaussian model at a fixed parameter:
// Kalman filter, Rao-Blackwellised filter and bootstrap filter.
//
// `cargo run --release --example rbpf_vs_bootstrap`

use sossm::dynamics::DynamicsSchedule;
use sossm::engine::{run_bootstrap_so_pf, run_filter, FilterConfig, Gating, Prior, Simulate};
use sossm::kalman::{kf_loglik, RaoBlackwell};
use sossm::models::LgPeriodic;
use sossm::rng::{Purpose, Streams};

/// Returns `(kalman, rao_blackwell, bootstrap mean over seeds)`.
pub fn run_example() -> sossm::Result<(f64, f64, f64)> {
    let model = LgPeriodic::with_dim(2)?;
    let theta = vec![1.0, -0.5, 0.9, 0.7, 0.5, 1.0, 0.8];
    let (_, ys) = model.simulate(&theta, 240, &mut Streams::new(3).stream(Purpose::Simulate, 0, 0));
    let exact = kf_loglik(&model, &theta, &ys)?;

    let space = model.default_space();
    let prior = Prior::Point(theta.clone());
    let fixed = DynamicsSchedule::none(space.dim());

    // Every particle carries the exact conditional law, so N = 10 suffices.
    let rb = RaoBlackwell::new(&model);
    let rec = run_filter(&rb, &ys, ys.len(), &space, &prior, &fixed, &FilterConfig::new(10, 1), Gating::Always)?;
    let rb_ll = rec.log_likelihood();

    let seeds = 5;
    let mut boot = 0.0;
    for seed in 0..seeds {
        let rec = run_bootstrap_so_pf(&model, &ys, &space, &prior, &fixed, &FilterConfig::new(2000, seed))?;
        boot += rec.log_likelihood() / seeds as f64;
    }
    println!("kalman           {exact:.6}");
    println!("rao-blackwell    {rb_ll:.6}  (N = 10)");
    println!("bootstrap mean   {boot:.6}  (N = 2000, {seeds} seeds)");
    Ok((exact, rb_ll, boot))
}

#[allow(dead_code)]
fn main() -> sossm::Result<()> {
    run_example().map(|_| ())
}
