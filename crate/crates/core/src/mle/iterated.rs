//! Iterated filtering on cloned data: the filter runs over `K` passes of
//! the data and the parameter cloud concentrates on the maximiser of the
//! likelihood.

use super::cloning::{clone_model, ClonedDataset};
use crate::dynamics::{DynamicsSchedule, ParameterSpace};
use crate::engine::{
    Bootstrap, Filter, FilterConfig, Gating, Prior, Propagator, RecordRow, RunRecord, Scheme, SsmModel, Variant,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct IfConfig {
    pub particles: usize,
    pub c_ess: f64,
    pub resampling: Scheme,
    pub seed: u64,
    /// Number of passes `K` through the data.
    pub passes: usize,
    /// The first epoch is `1 + k0 T`; only used by the slow variant.
    pub first_epoch_pass: usize,
    pub parallel: bool,
}

impl Default for IfConfig {
    fn default() -> Self {
        IfConfig {
            particles: 1000,
            c_ess: 0.7,
            resampling: Scheme::Ssp,
            seed: 0,
            passes: 50,
            first_epoch_pass: 10,
            parallel: false,
        }
    }
}

impl IfConfig {
    pub fn new(particles: usize, passes: usize, seed: u64) -> Self {
        IfConfig { particles, passes, seed, ..Default::default() }
    }

    fn filter_config(&self) -> FilterConfig {
        FilterConfig {
            particles: self.particles,
            c_ess: self.c_ess,
            variant: Variant::ThetaBeforeX,
            resampling: self.resampling,
            seed: self.seed,
            parallel: self.parallel,
        }
    }
}

/// Runs `K` passes with the propagator of an already cloned model and
/// records one row per pass (`t` is the pass index, the log-increment is
/// the pass total).
#[allow(clippy::too_many_arguments)]
pub fn run_iterated<P: Propagator>(
    prop: &P,
    data: &ClonedDataset<P::Obs>,
    space: &ParameterSpace,
    prior: &Prior,
    schedule: &DynamicsSchedule,
    cfg: &IfConfig,
    slow: bool,
) -> Result<RunRecord> {
    if cfg.passes == 0 {
        return Err(Error::InvalidArgument("number of passes must be >= 1".into()));
    }
    let period = data.period();
    let first = if slow { Some(1 + cfg.first_epoch_pass * period) } else { None };
    let sched = schedule.clone().with_period(period).with_first_epoch(first);
    let gating = if slow { Gating::EpochOrResample } else { Gating::OnResample };
    let mut f = Filter::new(prop, space, &sched, cfg.filter_config(), gating)?;
    let to_pass = |e: Error| match e {
        Error::Degenerate { t } => Error::DegeneratePass { pass: (t - 1) / period + 1, step: (t - 1) % period + 1 },
        other => other,
    };
    let mut rows: Vec<RecordRow> = Vec::with_capacity(cfg.passes);
    let (mut pass_ll, mut any_resampled, mut any_moved) = (0.0, false, false);
    for t in 1..=cfg.passes * period {
        let rep = if t == 1 {
            f.start(prior, data.obs_at(1), cfg.c_ess >= 1.0).map_err(to_pass)?
        } else {
            f.step(data.obs_at(t)).map_err(to_pass)?
        };
        pass_ll += rep.log_increment;
        any_resampled |= rep.resampled;
        any_moved |= rep.moved;
        if t % period == 0 {
            let mut row = f.row(&rep)?;
            row.t = t / period;
            row.log_increment = pass_ll;
            row.resampled = any_resampled;
            row.moved = any_moved;
            rows.push(row);
            (pass_ll, any_resampled, any_moved) = (0.0, false, false);
        }
    }
    Ok(RunRecord { rows, kernel_applications: f.kernel_applications(), theta_star: None })
}

/// Iterated filtering with fast vanishing dynamics: normal moves whenever
/// the cloud is resampled (at the start of a pass this uses the ESS at the
/// end of the previous pass).
pub fn run_if_fast<M: SsmModel>(
    base: &M,
    data: &ClonedDataset<M::Obs>,
    space: &ParameterSpace,
    prior: &Prior,
    schedule: &DynamicsSchedule,
    cfg: &IfConfig,
) -> Result<RunRecord> {
    let cloned = clone_model(base, data.period())?;
    run_iterated(&Bootstrap::new(&cloned), data, space, prior, schedule, cfg, false)
}

/// Iterated filtering with slowly vanishing dynamics: Student-t moves at the
/// start of the passes listed by the epoch sequence `t_{p+1} = t_p + ΔT⌊(log
/// t_p)²⌋`, normal moves on other resampling steps.
pub fn run_if_slow<M: SsmModel>(
    base: &M,
    data: &ClonedDataset<M::Obs>,
    space: &ParameterSpace,
    prior: &Prior,
    schedule: &DynamicsSchedule,
    cfg: &IfConfig,
) -> Result<RunRecord> {
    let cloned = clone_model(base, data.period())?;
    run_iterated(&Bootstrap::new(&cloned), data, space, prior, schedule, cfg, true)
}
