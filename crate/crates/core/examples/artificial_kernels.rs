// The artificial parameter dynamics: scales, epochs and single kernel
// draws on a box with a discrete coordinate.
//
// `cargo run --release --example artificial_kernels`

use sossm::dynamics::{kernel_at, DiscreteSet, DynamicsSchedule, Flavor, ParameterSpace, PompSchedule};
use sossm::rng::{Purpose, Streams};

/// Returns the first few epoch times of the slow schedule.
pub fn run_example() -> sossm::Result<Vec<usize>> {
    let fast = DynamicsSchedule::fast(1.1, 2);
    let slow = DynamicsSchedule::slow(0.5, 2, 1, 101);
    for t in [2, 10, 100, 1000] {
        println!("t={t:5}  fast h_t={:.5}  slow h_t={:.5}", fast.h_at(t)?, slow.h_at(t)?);
    }
    let mut epochs = vec![];
    let mut cursor = slow.epochs();
    while epochs.len() < 6 {
        let t = cursor.peek().expect("epochs never run out");
        cursor.hit(t, &slow)?;
        epochs.push(t);
    }
    println!("slow epochs: {epochs:?}");

    let pomp = PompSchedule::new(Flavor::PompGeometric, 0.5, 24)?;
    println!(
        "geometric cooling over passes 1, 51, 101: {:.3} {:.3} {:.3}",
        pomp.h(1, 1),
        pomp.h(51, 1),
        pomp.h(101, 1)
    );

    let space = ParameterSpace::boxed(vec![0.0, -1.0], vec![1.0, 1.0])?.with_discrete(DiscreteSet::grid(1, 1, 6)?);
    let mixed = DynamicsSchedule::mixed(0.5, 2, 1, 101);
    let mut rng = Streams::new(3).stream(Purpose::Step, 0, 0);
    let theta = vec![0.5, 0.0, 3.0];
    for t in [2, 50, 101, 5000] {
        let moved = kernel_at(&mixed, t, &theta, &space, &mut rng)?;
        println!("t={t:5}  epoch={}  {theta:?} -> {moved:.3?}", mixed.is_epoch(t)?);
    }
    Ok(epochs)
}

#[allow(dead_code)]
fn main() -> sossm::Result<()> {
    run_example().map(|_| ())
}
