// Iterated filtering on a short simulated SEIRD epidemic and the implied
// effective reproduction number.
//
// `cargo run --release --example iffit_seird`

use sossm::dynamics::{DynamicsSchedule, ScaleMatrix};
use sossm::engine::{Prior, Simulate};
use sossm::mle::{run_if_slow, ClonedDataset, IfConfig};
use sossm::models::{effective_reproduction, Seird};
use sossm::rng::{Purpose, Streams};

/// Returns the final `θ̂` and the reproduction numbers along the true path.
pub fn run_example() -> sossm::Result<(Vec<f64>, Vec<f64>)> {
    let model = Seird::new();
    let theta_star = vec![0.2, 0.1, 0.01, 0.05, 0.05, 1e-5, 1e-5, 1e-5];
    let (xs, ys) = model.simulate(&theta_star, 40, &mut Streams::new(21).stream(Purpose::Simulate, 0, 0));
    let er: Vec<f64> = xs.iter().map(|x| effective_reproduction(&theta_star, x)).collect::<sossm::Result<_>>()?;
    println!("true ER_t at t = 1, 20, 40: {:.3} {:.3} {:.3}", er[0], er[19], er[39]);

    let space = Seird::default_space();
    // Move each coordinate on the scale of its box.
    let widths: Vec<f64> = space.lower().iter().zip(space.upper()).map(|(l, u)| ((u - l) / 10.0).powi(2)).collect();
    let schedule = DynamicsSchedule::slow(0.5, 8, 1, 2).with_sigma(ScaleMatrix::diagonal(widths)?);
    let mut cfg = IfConfig::new(400, 8, 21);
    cfg.first_epoch_pass = 2;
    let data = ClonedDataset::new(ys)?;
    let rec = run_if_slow(&model, &data, &space, &Prior::Uniform, &schedule, &cfg)?;
    for row in &rec.rows {
        println!(
            "pass {}  eta={:.3} gamma={:.3} mu={:.4}  log-lik {:.2}",
            row.t, row.theta_hat[0], row.theta_hat[1], row.theta_hat[2], row.log_increment
        );
    }
    Ok((rec.theta_hat().expect("rows").to_vec(), er))
}

#[allow(dead_code)]
fn main() -> sossm::Result<()> {
    run_example().map(|_| ())
}
