// Online learning of the periodic linear Gaussian model with slowly
// vanishing artificial dynamics.
//
// `cargo run --release --example online_lg`

use sossm::dynamics::DynamicsSchedule;
use sossm::engine::{run_adaptive_slow, FilterConfig, Prior, Simulate};
use sossm::models::LgPeriodic;
use sossm::rng::{Purpose, Streams};

/// Returns the distance between `θ̂_t` and `θ⋆` at each checkpoint.
pub fn run_example() -> sossm::Result<Vec<(usize, f64)>> {
    let model = LgPeriodic::with_dim(1)?;
    let streams = Streams::new(42);
    let theta_star = model.sample_true_theta(&mut streams.stream(Purpose::Simulate, 1, 0));
    let (_, ys) = model.simulate(&theta_star, 3000, &mut streams.stream(Purpose::Simulate, 0, 0));

    let space = model.default_space();
    let schedule = DynamicsSchedule::slow(0.5, space.dim(), 1, 101);
    let cfg = FilterConfig::new(500, 42);
    let rec = run_adaptive_slow(&model, &ys, &space, &Prior::Uniform, &schedule, &cfg)?;

    println!("theta* = {theta_star:.3?}");
    let mut out = vec![];
    for t in [100, 500, 1000, 3000] {
        let row = rec.at(t).expect("row");
        let dist = row.theta_hat.iter().zip(&theta_star).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        println!("t={t:5}  theta_hat={:.3?}  |theta_hat - theta*|={dist:.3}", row.theta_hat);
        out.push((t, dist));
    }
    println!(
        "kernel applied at {} of {} steps, {} resamplings",
        rec.kernel_applications,
        ys.len(),
        rec.resample_count()
    );
    Ok(out)
}

#[allow(dead_code)]
fn main() -> sossm::Result<()> {
    run_example().map(|_| ())
}
