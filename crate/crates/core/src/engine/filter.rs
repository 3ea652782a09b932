//! Online particle filters on the parameter-augmented model.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cloud::{log_sum_exp, ParticleCloud};
use super::model::{Bootstrap, ObsSource, Prior, Propagator, SsmModel};
use super::record::{RecordRow, RunRecord};
use super::resample::{ess_unchecked, resample_unchecked, Scheme};
use crate::dynamics::{apply_kernel, DynamicsSchedule, EpochCursor, Flavor, ParameterSpace};
use crate::error::{Error, Result};
use crate::rng::{Purpose, StreamRng, Streams};

/// Order of the parameter move and the state move within a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// The state moves with the previous parameter, then the parameter
    /// moves: `X_t ~ M_{t,θ_{t-1}}`, `θ_t ~ K_t(θ_{t-1})`.
    #[default]
    ThetaAfterX,
    /// The parameter moves first and the state uses it: `X_t ~ M_{t,θ_t}`.
    ThetaBeforeX,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::ThetaAfterX => "theta-after-x",
            Variant::ThetaBeforeX => "theta-before-x",
        }
    }
}

/// When resampling and the parameter kernel fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gating {
    /// Kernel every step, resampling when the ESS drops below `N c_ESS`.
    Always,
    /// Kernel only on steps that resample (ESS rule).
    OnResample,
    /// As `OnResample`, but epochs of the schedule also force a resampling
    /// step with the heavy-tailed kernel.
    EpochOrResample,
}

#[derive(Debug, Clone)]
pub struct FilterConfig {
    pub particles: usize,
    /// Resample when `ESS <= N c_ess`.
    pub c_ess: f64,
    pub variant: Variant,
    pub resampling: Scheme,
    pub seed: u64,
    /// Process particles on the rayon pool. Results do not depend on it.
    pub parallel: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            particles: 1000,
            c_ess: 0.7,
            variant: Variant::ThetaAfterX,
            resampling: Scheme::Ssp,
            seed: 0,
            parallel: false,
        }
    }
}

impl FilterConfig {
    pub fn new(particles: usize, seed: u64) -> Self {
        FilterConfig { particles, seed, ..Default::default() }
    }

    pub fn with_variant(mut self, v: Variant) -> Self {
        self.variant = v;
        self
    }

    pub fn with_c_ess(mut self, c: f64) -> Self {
        self.c_ess = c;
        self
    }

    pub fn with_resampling(mut self, s: Scheme) -> Self {
        self.resampling = s;
        self
    }

    pub fn with_parallel(mut self, p: bool) -> Self {
        self.parallel = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.particles == 0 {
            return Err(Error::InvalidArgument("particle count must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.c_ess) {
            return Err(Error::InvalidArgument(format!("c_ess={} must lie in [0, 1]", self.c_ess)));
        }
        Ok(())
    }
}

/// Summary of one filter step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub t: usize,
    pub ess: f64,
    pub resampled: bool,
    pub moved: bool,
    pub epoch: bool,
    pub log_increment: f64,
}

/// Stepwise particle filter. Drivers below wrap it for the common cases.
pub struct Filter<'a, P: Propagator> {
    prop: &'a P,
    space: &'a ParameterSpace,
    schedule: &'a DynamicsSchedule,
    cfg: FilterConfig,
    gating: Gating,
    streams: Streams,
    epochs: EpochCursor,
    cloud: Option<ParticleCloud<P::Payload>>,
    kernel_applications: usize,
}

type ParticleOut<S> = Result<(Vec<f64>, S, f64)>;

impl<'a, P: Propagator> Filter<'a, P> {
    pub fn new(
        prop: &'a P,
        space: &'a ParameterSpace,
        schedule: &'a DynamicsSchedule,
        cfg: FilterConfig,
        gating: Gating,
    ) -> Result<Self> {
        cfg.validate()?;
        schedule.validate()?;
        if schedule.flavor != Flavor::None && schedule.sigma.dim() != space.continuous_dim() {
            return Err(Error::InvalidArgument(format!(
                "scale matrix has dimension {}, space has {} continuous coordinates",
                schedule.sigma.dim(),
                space.continuous_dim()
            )));
        }
        Ok(Filter {
            prop,
            space,
            schedule,
            streams: Streams::new(cfg.seed),
            cfg,
            gating,
            epochs: schedule.epochs(),
            cloud: None,
            kernel_applications: 0,
        })
    }

    pub fn cloud(&self) -> Option<&ParticleCloud<P::Payload>> {
        self.cloud.as_ref()
    }

    pub fn kernel_applications(&self) -> usize {
        self.kernel_applications
    }

    fn map_particles<F>(&self, f: F) -> Result<Vec<(Vec<f64>, P::Payload, f64)>>
    where
        F: Fn(usize) -> ParticleOut<P::Payload> + Sync + Send,
    {
        let n = self.cfg.particles;
        if self.cfg.parallel {
            (0..n).into_par_iter().map(f).collect()
        } else {
            (0..n).map(f).collect()
        }
    }

    fn install(
        &mut self,
        t: usize,
        out: Vec<(Vec<f64>, P::Payload, f64)>,
        base: Option<&[f64]>,
        ancestors: Vec<usize>,
        resampled: bool,
    ) -> Result<f64> {
        let n = out.len();
        let dim = self.space.dim();
        let mut theta = Vec::with_capacity(n * dim);
        let mut payload = Vec::with_capacity(n);
        let mut logw = Vec::with_capacity(n);
        for (k, (th, p, lw)) in out.into_iter().enumerate() {
            theta.extend_from_slice(&th);
            payload.push(p);
            logw.push(base.map_or(0.0, |b| b[k]) + lw);
        }
        let total = log_sum_exp(&logw);
        if !total.is_finite() {
            return Err(Error::Degenerate { t });
        }
        let base_total = match base {
            Some(b) => log_sum_exp(b),
            None => (n as f64).ln(),
        };
        for v in logw.iter_mut() {
            *v -= total;
        }
        let weights: Vec<f64> = logw.iter().map(|v| v.exp()).collect();
        let ess = ess_unchecked(&weights).clamp(1.0, n as f64);
        self.cloud =
            Some(ParticleCloud { t, dim, theta, payload, log_weights: logw, weights, ancestors, resampled, ess });
        Ok(total - base_total)
    }

    /// Draws `θ_0 ~ μ_0`, `X_1` and weights `y_1`. With `initial_move` the
    /// parameter is moved by `K_1` before the state when the variant is
    /// theta-before-x (under theta-after-x it always moves).
    pub fn start(&mut self, prior: &Prior, y1: &P::Obs, initial_move: bool) -> Result<StepReport> {
        let n = self.cfg.particles;
        let mut theta0 = Vec::with_capacity(n);
        for k in 0..n {
            let mut rng = self.streams.stream(Purpose::Prior, 0, k as u64);
            let th = prior.sample(self.space, &mut rng)?;
            if !self.space.contains(&th) {
                return Err(Error::OutsideSpace(format!("initial parameter draw {th:?}")));
            }
            theta0.push(th);
        }
        let moved = match self.cfg.variant {
            Variant::ThetaAfterX => true,
            Variant::ThetaBeforeX => initial_move,
        };
        let epoch = match self.gating {
            Gating::OnResample => false,
            _ => self.epochs.hit(1, self.schedule)?,
        };
        let (prop, space, schedule, streams) = (self.prop, self.space, self.schedule, self.streams);
        let theta0 = &theta0;
        let out = self.map_particles(|k| {
            let mut rng: StreamRng = streams.stream(Purpose::Step, 1, k as u64);
            let mut payload = prop.init(&theta0[k], &mut rng);
            let th =
                if moved { apply_kernel(schedule, 1, epoch, &theta0[k], space, &mut rng)? } else { theta0[k].clone() };
            let lw = prop.weight_first(&th, &mut payload, y1);
            Ok((th, payload, lw))
        })?;
        if moved && schedule.flavor != Flavor::None {
            self.kernel_applications += 1;
        }
        let log_increment = self.install(1, out, None, (0..n).collect(), false)?;
        let ess = self.cloud.as_ref().map(|c| c.ess).unwrap_or(0.0);
        Ok(StepReport { t: 1, ess, resampled: false, moved, epoch, log_increment })
    }

    /// Processes the next observation.
    pub fn step(&mut self, y: &P::Obs) -> Result<StepReport> {
        let prev =
            self.cloud.take().ok_or_else(|| Error::InvalidArgument("filter must be started before stepping".into()))?;
        let t = prev.t + 1;
        let n = self.cfg.particles;
        let trigger = prev.ess <= n as f64 * self.cfg.c_ess;
        let epoch = match self.gating {
            Gating::OnResample => false,
            _ => self.epochs.hit(t, self.schedule)?,
        };
        let resampled = match self.gating {
            Gating::EpochOrResample => trigger || epoch,
            _ => trigger,
        };
        let moved = match self.gating {
            Gating::Always => true,
            _ => resampled,
        };
        let ancestors = if resampled {
            let mut rng = self.streams.stream(Purpose::Resample, t as u64, 0);
            resample_unchecked(self.cfg.resampling, &prev.weights, &mut rng)
        } else {
            (0..n).collect()
        };
        let (prop, space, schedule, streams, variant) =
            (self.prop, self.space, self.schedule, self.streams, self.cfg.variant);
        let (prev_ref, anc) = (&prev, &ancestors);
        let out = self.map_particles(|k| {
            let a = anc[k];
            let mut rng = streams.stream(Purpose::Step, t as u64, k as u64);
            let parent = prev_ref.theta(a);
            let th = if moved { apply_kernel(schedule, t, epoch, parent, space, &mut rng)? } else { parent.to_vec() };
            let theta_move = match variant {
                Variant::ThetaAfterX => parent,
                Variant::ThetaBeforeX => th.as_slice(),
            };
            let (payload, lw) = prop.advance(t, theta_move, &th, &prev_ref.payload[a], y, &mut rng);
            Ok((th, payload, lw))
        })?;
        if moved && schedule.flavor != Flavor::None {
            self.kernel_applications += 1;
        }
        let base = if resampled { None } else { Some(prev.log_weights.as_slice()) };
        let log_increment = self.install(t, out, base, ancestors, resampled)?;
        let ess = self.cloud.as_ref().map(|c| c.ess).unwrap_or(0.0);
        Ok(StepReport { t, ess, resampled, moved, epoch, log_increment })
    }

    /// Record row for the current cloud.
    pub fn row(&self, report: &StepReport) -> Result<RecordRow> {
        let cloud = self.cloud.as_ref().ok_or_else(|| Error::InvalidArgument("filter has no particles yet".into()))?;
        let theta_hat = cloud.theta_mean();
        let theta_proj = self.space.project(&theta_hat)?;
        let sd = self.prop.summary_dim();
        let mut state_mean = vec![0.0; sd];
        let mut buf = vec![0.0; sd];
        for (p, w) in cloud.payload.iter().zip(&cloud.weights) {
            self.prop.summarize(p, &mut buf);
            for (m, b) in state_mean.iter_mut().zip(&buf) {
                *m += w * b;
            }
        }
        Ok(RecordRow {
            t: report.t,
            theta_hat,
            theta_proj,
            state_mean,
            ess: report.ess,
            resampled: report.resampled,
            moved: report.moved,
            log_increment: report.log_increment,
        })
    }
}

/// Runs a filter over `t = 1..=horizon` and records every step.
#[allow(clippy::too_many_arguments)]
pub fn run_filter<P, S>(
    prop: &P,
    obs: &S,
    horizon: usize,
    space: &ParameterSpace,
    prior: &Prior,
    schedule: &DynamicsSchedule,
    cfg: &FilterConfig,
    gating: Gating,
) -> Result<RunRecord>
where
    P: Propagator,
    S: ObsSource<P::Obs> + ?Sized,
{
    if horizon == 0 {
        return Err(Error::InvalidArgument("need at least one observation".into()));
    }
    let mut f = Filter::new(prop, space, schedule, cfg.clone(), gating)?;
    let mut rows = Vec::with_capacity(horizon);
    let rep = f.start(prior, obs.at(1), false)?;
    rows.push(f.row(&rep)?);
    for t in 2..=horizon {
        let rep = f.step(obs.at(t))?;
        rows.push(f.row(&rep)?);
    }
    Ok(RunRecord { rows, kernel_applications: f.kernel_applications(), theta_star: None })
}

/// Plain self-organised bootstrap filter: the kernel is applied at every
/// step, resampling follows the ESS rule.
pub fn run_bootstrap_so_pf<M: SsmModel>(
    model: &M,
    ys: &[M::Obs],
    space: &ParameterSpace,
    prior: &Prior,
    schedule: &DynamicsSchedule,
    cfg: &FilterConfig,
) -> Result<RunRecord> {
    run_filter(&Bootstrap::new(model), ys, ys.len(), space, prior, schedule, cfg, Gating::Always)
}

/// Adaptive filter with fast vanishing dynamics: the kernel is applied only
/// on resampling steps.
pub fn run_adaptive_fast<M: SsmModel>(
    model: &M,
    ys: &[M::Obs],
    space: &ParameterSpace,
    prior: &Prior,
    schedule: &DynamicsSchedule,
    cfg: &FilterConfig,
) -> Result<RunRecord> {
    run_filter(&Bootstrap::new(model), ys, ys.len(), space, prior, schedule, cfg, Gating::OnResample)
}

/// Adaptive filter with slowly vanishing dynamics: epochs force resampling
/// with a Student-t move, other resampling steps use the normal kernel.
pub fn run_adaptive_slow<M: SsmModel>(
    model: &M,
    ys: &[M::Obs],
    space: &ParameterSpace,
    prior: &Prior,
    schedule: &DynamicsSchedule,
    cfg: &FilterConfig,
) -> Result<RunRecord> {
    run_filter(&Bootstrap::new(model), ys, ys.len(), space, prior, schedule, cfg, Gating::EpochOrResample)
}
