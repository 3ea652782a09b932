// Maximum likelihood for the Bernoulli-Laplace urn by iterated filtering
// on cloned data, compared with an exhaustive grid search.
//
// `cargo run --release --example iffit_urn`

use sossm::dynamics::DynamicsSchedule;
use sossm::engine::Prior;
use sossm::mle::{run_if_slow, IfConfig};
use sossm::models::{urn_as_cloned_ssm, urn_grid_mle, urn_simulate, urn_space, UrnSpec};
use sossm::rng::{Purpose, Streams};

/// Returns `(grid MLE, IF estimate)`.
pub fn run_example() -> sossm::Result<(Vec<i64>, Vec<i64>)> {
    let truth = UrnSpec::new(4, 4, 4)?;
    let ws = urn_simulate(&truth, 150, &mut Streams::new(9).stream(Purpose::Simulate, 0, 0));
    let space = urn_space(&ws, 12)?;
    let (mle, ll) = urn_grid_mle(&ws, &space)?;
    println!(
        "{} points in the parameter set, grid MLE {mle:?} (log-lik {ll:.3})",
        space.discrete_set().map_or(0, |s| s.points().len())
    );

    let (data, model) = urn_as_cloned_ssm(&ws)?;
    let schedule = DynamicsSchedule::mixed(0.5, 0, 1, 2);
    let cfg = IfConfig::new(500, 60, 9);
    let rec = run_if_slow(&model, &data, &space, &Prior::Uniform, &schedule, &cfg)?;
    for row in rec.rows.iter().filter(|r| r.t % 10 == 0) {
        println!("pass {:3}  theta_hat={:.2?}  theta_proj={:?}", row.t, row.theta_hat, row.theta_proj);
    }
    let fin: Vec<i64> = rec.theta_proj().expect("rows").iter().map(|v| v.round() as i64).collect();
    Ok((mle, fin))
}

#[allow(dead_code)]
fn main() -> sossm::Result<()> {
    run_example().map(|_| ())
}
