use rand::Rng;

use super::samplers::{sample_discrete_kernel, sample_truncated_normal, sample_truncated_student};
use super::schedule::{DynamicsSchedule, Flavor};
use super::space::ParameterSpace;
use crate::error::Result;

/// Draws `θ_t ~ K_t(θ_{t-1}, ·)` for the given schedule. `at_epoch` selects
/// the heavy-tailed epoch move where the flavor has one.
pub fn apply_kernel<R: Rng + ?Sized>(
    schedule: &DynamicsSchedule,
    t: usize,
    at_epoch: bool,
    theta: &[f64],
    space: &ParameterSpace,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if schedule.flavor == Flavor::None {
        return Ok(theta.to_vec());
    }
    let dc = space.continuous_dim();
    let (cont, disc) = theta.split_at(dc);
    let mut out = if dc == 0 {
        vec![]
    } else {
        let h = schedule.continuous_scale(t, at_epoch)?;
        let cap = schedule.rejection_cap;
        if at_epoch && schedule.heavy_tailed_at_epochs() {
            sample_truncated_student(cont, h, &schedule.sigma, schedule.nu, space, rng, cap)?
        } else {
            sample_truncated_normal(cont, h, &schedule.sigma, space, rng, cap)?
        }
    };
    if let Some(set) = space.discrete_set() {
        let p = schedule.discrete_prob(t, at_epoch)?;
        let psi: Vec<i64> = disc.iter().map(|&v| v.round() as i64).collect();
        let (a, b) = set.bounds();
        let moved = sample_discrete_kernel(&psi, p, (b - a) as u64, set, rng, schedule.rejection_cap)?;
        out.extend(moved.into_iter().map(|v| v as f64));
    }
    Ok(out)
}

/// [`apply_kernel`] with the epoch membership of `t` taken from the schedule.
pub fn kernel_at<R: Rng + ?Sized>(
    schedule: &DynamicsSchedule,
    t: usize,
    theta: &[f64],
    space: &ParameterSpace,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let at_epoch = schedule.is_epoch(t)?;
    apply_kernel(schedule, t, at_epoch, theta, space, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DiscreteSet;
    use crate::rng::{Purpose, Streams};

    #[test]
    fn none_is_identity_and_moves_stay_inside() {
        let space = ParameterSpace::boxed(vec![0.0, -1.0], vec![1.0, 1.0])
            .unwrap()
            .with_discrete(DiscreteSet::grid(1, 1, 4).unwrap());
        let th = vec![0.5, 0.0, 2.0];
        let mut rng = Streams::new(1).stream(Purpose::Step, 0, 0);
        let none = DynamicsSchedule::none(2);
        assert_eq!(kernel_at(&none, 5, &th, &space, &mut rng).unwrap(), th);
        let mixed = DynamicsSchedule::mixed(0.5, 2, 1, 10);
        let mut moved_disc = 0;
        for t in 2..200 {
            let x = kernel_at(&mixed, t, &th, &space, &mut rng).unwrap();
            assert!(space.contains(&x), "{x:?}");
            if x[2] != th[2] {
                moved_disc += 1;
            }
        }
        assert!(moved_disc > 0);
    }
}
