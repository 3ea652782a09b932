//! Job dispatch and run artifacts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;

use super::config::{IfAlgorithm, JobConfig, JobKind, OnlineAlgorithm};
use super::data::{load_observations, Observations};
use crate::dynamics::ParameterSpace;
use crate::engine::{run_filter, Bootstrap, Gating, Prior, Propagator, RecordRow, RunRecord, Simulate, SsmModel};
use crate::error::{Error, Result};
use crate::kalman::RaoBlackwell;
use crate::mle::{clone_model, run_iterated, run_noisy_opt, ClonedDataset};
use crate::models::{
    urn_as_cloned_ssm, urn_simulate, urn_space, LgPeriodic, Seird, SplineBasis, StochasticVolatility, SvInnovation,
    UrnSpec,
};
use crate::rng::{Purpose, Streams};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a job produced.
#[derive(Debug, Clone, PartialEq)]
pub enum ArtifactBody {
    /// Filter or iterated-filtering rows.
    Record { record: RunRecord, dim: usize },
    /// Simulated states and observations.
    Simulation(Observations),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifact {
    pub kind: JobKind,
    pub body: ArtifactBody,
    /// Flattened resolved configuration.
    pub config_echo: Vec<(String, String)>,
    pub seed: u64,
    pub version: &'static str,
    pub kernel_applications: usize,
    pub wall_time_secs: f64,
}

impl RunArtifact {
    pub fn record(&self) -> Option<&RunRecord> {
        match &self.body {
            ArtifactBody::Record { record, .. } => Some(record),
            ArtifactBody::Simulation(_) => None,
        }
    }

    /// CSV text of the rows; deterministic given the configuration.
    pub fn csv(&self) -> String {
        match &self.body {
            ArtifactBody::Record { record, dim } => record_csv(record, *dim),
            ArtifactBody::Simulation(obs) => observations_csv(obs),
        }
    }

    /// `key=value` lines of the sidecar file.
    pub fn metadata(&self) -> String {
        let mut s = String::new();
        let rows = match &self.body {
            ArtifactBody::Record { record, .. } => record.rows.len(),
            ArtifactBody::Simulation(o) => o.len(),
        };
        let _ = writeln!(s, "version={}", self.version);
        let _ = writeln!(s, "job={}", self.kind.name());
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "rows={rows}");
        let _ = writeln!(s, "kernel_applications={}", self.kernel_applications);
        let _ = writeln!(s, "wall_time_secs={:.6}", self.wall_time_secs);
        for (k, v) in &self.config_echo {
            let _ = writeln!(s, "config.{k}={v}");
        }
        s
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

/// Columns `t, theta_hat_1..d, theta_proj_1..d, ess, resampled, log_increment`.
pub fn record_csv(record: &RunRecord, dim: usize) -> String {
    let mut s = String::from("t");
    for i in 1..=dim {
        let _ = write!(s, ",theta_hat_{i}");
    }
    for i in 1..=dim {
        let _ = write!(s, ",theta_proj_{i}");
    }
    s.push_str(",ess,resampled,log_increment\n");
    for r in &record.rows {
        let _ = write!(s, "{}", r.t);
        for v in r.theta_hat.iter().chain(&r.theta_proj) {
            let _ = write!(s, ",{}", fmt_f(*v));
        }
        let _ = writeln!(s, ",{},{},{}", fmt_f(r.ess), u8::from(r.resampled), fmt_f(r.log_increment));
    }
    s
}

fn observations_csv(obs: &Observations) -> String {
    let mut s = String::from("t");
    for c in &obs.columns {
        let _ = write!(s, ",{c}");
    }
    s.push('\n');
    for (i, row) in obs.rows.iter().enumerate() {
        let _ = write!(s, "{}", i + 1);
        for v in row {
            if v.fract() == 0.0 && v.abs() < 1e15 && obs.columns == ["w"] {
                let _ = write!(s, ",{}", *v as i64);
            } else {
                let _ = write!(s, ",{}", fmt_f(*v));
            }
        }
        s.push('\n');
    }
    s
}

/// Parses a record CSV written by [`record_csv`]. State means and the
/// `moved` flag are not stored and come back empty.
pub fn parse_record_csv(text: &str) -> Result<Vec<RecordRow>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    let d = header.iter().filter(|h| h.starts_with("theta_hat_")).count();
    if header.len() != 2 * d + 4 {
        return Err(Error::Data(format!("unexpected record header with {} columns", header.len())));
    }
    let mut rows = vec![];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |j: usize| -> Result<f64> {
            rec[j].parse().map_err(|_| Error::Data(format!("row {}, column {}: bad number", i + 1, j + 1)))
        };
        let t = rec[0].parse().map_err(|_| Error::Data(format!("row {}: bad t", i + 1)))?;
        let theta_hat = (1..=d).map(num).collect::<Result<_>>()?;
        let theta_proj = (d + 1..=2 * d).map(num).collect::<Result<_>>()?;
        rows.push(RecordRow {
            t,
            theta_hat,
            theta_proj,
            state_mean: vec![],
            ess: num(2 * d + 1)?,
            resampled: &rec[2 * d + 2] == "1",
            moved: false,
            log_increment: num(2 * d + 3)?,
        });
    }
    Ok(rows)
}

/// Sidecar path for an output file: `<out>.meta`.
pub fn metadata_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Writes the CSV and its sidecar.
pub fn write_artifact(artifact: &RunArtifact, out: &Path) -> Result<()> {
    std::fs::write(out, artifact.csv())?;
    std::fs::write(metadata_path(out), artifact.metadata())?;
    Ok(())
}

/// Runs the job and writes its output to `data.output`.
pub fn run_job(config: &JobConfig) -> Result<RunArtifact> {
    let out = config.data.output.clone().ok_or_else(|| Error::Config("data.output: missing output path".into()))?;
    let artifact = execute(config)?;
    write_artifact(&artifact, &out)?;
    Ok(artifact)
}

/// Runs the job without writing anything.
pub fn execute(config: &JobConfig) -> Result<RunArtifact> {
    let cfg = config.clone().resolve()?;
    let start = Instant::now();
    let body = match cfg.kind() {
        JobKind::Simulate => ArtifactBody::Simulation(simulate(&cfg)?),
        JobKind::Online | JobKind::Iffit => ArtifactBody::Record { record: infer(&cfg)?, dim: cfg.param_dim() },
        JobKind::Optimize => ArtifactBody::Record { record: optimize(&cfg)?, dim: 1 },
    };
    let kernel_applications = match &body {
        ArtifactBody::Record { record, .. } => record.kernel_applications,
        ArtifactBody::Simulation(_) => 0,
    };
    Ok(RunArtifact {
        kind: cfg.kind(),
        body,
        config_echo: cfg.echo(),
        seed: cfg.seed.unwrap_or(0),
        version: VERSION,
        kernel_applications,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

fn lg_model(cfg: &JobConfig) -> Result<LgPeriodic> {
    match &cfg.model.knots {
        Some(k) => LgPeriodic::new(SplineBasis::new(k.clone())?),
        None => LgPeriodic::with_dim(cfg.model.p.unwrap_or(2)),
    }
}

fn sv_model(cfg: &JobConfig) -> Result<StochasticVolatility> {
    let inn = match cfg.model.innovation.as_deref() {
        Some("gaussian") => SvInnovation::Gaussian,
        _ => SvInnovation::Student { nu: cfg.model.innovation_nu.unwrap_or(5.0) },
    };
    StochasticVolatility::new(inn)
}

fn sv_default_space() -> ParameterSpace {
    ParameterSpace::boxed(vec![-1.0, 1e-3, 1e-3], vec![1.0, 5.0, 3.0]).expect("valid box")
}

fn sim_rng(cfg: &JobConfig) -> crate::rng::StreamRng {
    Streams::new(cfg.seed.unwrap_or(0)).stream(Purpose::Simulate, 0, 0)
}

/// Parameter for simulation: the configured one, or for the LG model a draw
/// of the default random truth.
fn simulation_theta(cfg: &JobConfig, lg: Option<&LgPeriodic>) -> Result<Vec<f64>> {
    match (&cfg.model.theta, lg) {
        (Some(t), _) => Ok(t.clone()),
        (None, Some(m)) => {
            let mut rng = Streams::new(cfg.seed.unwrap_or(0)).stream(Purpose::Simulate, 1, 0);
            Ok(m.sample_true_theta(&mut rng))
        }
        (None, None) => Err(Error::Config("model.theta: missing".into())),
    }
}

fn simulate_table<M: Simulate>(
    model: &M,
    theta: &[f64],
    len: usize,
    state_names: Vec<String>,
    obs_of: impl Fn(&M::Obs) -> Vec<f64>,
    cfg: &JobConfig,
) -> Observations {
    let (xs, ys) = model.simulate(theta, len, &mut sim_rng(cfg));
    let mut rows = Vec::with_capacity(len);
    let mut buf = vec![0.0; model.state_summary_dim()];
    for (x, y) in xs.iter().zip(&ys) {
        model.summarize_state(x, &mut buf);
        let mut row = buf.clone();
        row.extend(obs_of(y));
        rows.push(row);
    }
    let mut columns = state_names;
    let k = rows.first().map_or(0, |r: &Vec<f64>| r.len()) - columns.len();
    if k == 1 {
        columns.push("y".into());
    } else {
        columns.extend((1..=k).map(|i| format!("y_{i}")));
    }
    Observations { columns, rows }
}

fn indexed(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}_{i}")).collect()
}

fn simulate(cfg: &JobConfig) -> Result<Observations> {
    let len = cfg.model.length.unwrap_or(0);
    match cfg.model_name() {
        "lg-periodic" => {
            let m = lg_model(cfg)?;
            let th = simulation_theta(cfg, Some(&m))?;
            m.validate_theta(&th)?;
            Ok(simulate_table(&m, &th, len, indexed("x", m.p()), |y| vec![*y], cfg))
        }
        "sv" => {
            let m = sv_model(cfg)?;
            let th = simulation_theta(cfg, None)?;
            m.validate_theta(&th)?;
            Ok(simulate_table(&m, &th, len, vec!["x".into()], |y| vec![*y], cfg))
        }
        "seird" => {
            let m = Seird::new();
            let th = simulation_theta(cfg, None)?;
            let names = ["s", "e", "i", "r", "d", "beta", "q"].map(String::from).to_vec();
            Ok(simulate_table(&m, &th, len, names, |y| y.to_vec(), cfg))
        }
        "urn" => {
            let th = simulation_theta(cfg, None)?;
            let spec = UrnSpec::from_theta(&th)?;
            let ws = urn_simulate(&spec, len, &mut sim_rng(cfg));
            Ok(Observations { columns: vec!["w".into()], rows: ws.into_iter().map(|w| vec![w as f64]).collect() })
        }
        other => Err(Error::Config(format!("model.name: cannot simulate '{other}'"))),
    }
}

/// Default observation columns of a simulated file, per model.
fn default_columns(name: &str) -> Vec<String> {
    match name {
        "seird" => vec!["y_1".into(), "y_2".into()],
        "urn" => vec!["w".into()],
        _ => vec!["y".into()],
    }
}

/// Observations from the input file, or simulated from `model.theta`.
fn observations(cfg: &JobConfig) -> Result<Observations> {
    match &cfg.data.input {
        Some(path) => {
            let cols = match &cfg.data.columns {
                Some(c) => Some(c.clone()),
                None => {
                    // Use the simulator's column names when present.
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
                    let header: Vec<String> =
                        text.lines().next().unwrap_or("").split(',').map(|s| s.trim().to_string()).collect();
                    let want = default_columns(cfg.model_name());
                    want.iter().all(|w| header.contains(w)).then_some(want)
                }
            };
            load_observations(path, cols.as_deref(), &cfg.data.transforms)
        }
        None => {
            let mut obs = simulate(cfg)?;
            let want = default_columns(cfg.model_name());
            let idx: Vec<usize> = want.iter().filter_map(|w| obs.columns.iter().position(|c| c == w)).collect();
            obs.rows = obs.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect();
            obs.columns = want;
            for tr in &cfg.data.transforms {
                obs.apply(tr)?;
            }
            Ok(obs)
        }
    }
}

fn scalar_obs(obs: &Observations) -> Result<Vec<f64>> {
    if obs.columns.len() != 1 {
        return Err(Error::Data(format!("expected one observation column, got {}", obs.columns.len())));
    }
    Ok(obs.rows.iter().map(|r| r[0]).collect())
}

fn pair_obs(obs: &Observations) -> Result<Vec<[f64; 2]>> {
    if obs.columns.len() != 2 {
        return Err(Error::Data(format!("expected two observation columns, got {}", obs.columns.len())));
    }
    Ok(obs.rows.iter().map(|r| [r[0], r[1]]).collect())
}

fn urn_chain(obs: &Observations) -> Result<Vec<i64>> {
    let ys = scalar_obs(obs)?;
    ys.iter()
        .enumerate()
        .map(|(i, &v)| {
            if v.fract() == 0.0 && v >= 0.0 {
                Ok(v as i64)
            } else {
                Err(Error::Data(format!("row {}: urn count {v} is not a non-negative integer", i + 1)))
            }
        })
        .collect()
}

fn gating(cfg: &JobConfig) -> Gating {
    match cfg.filter.algorithm.unwrap_or(OnlineAlgorithm::AdaptiveSlow) {
        OnlineAlgorithm::Bootstrap => Gating::Always,
        OnlineAlgorithm::AdaptiveFast => Gating::OnResample,
        OnlineAlgorithm::AdaptiveSlow => Gating::EpochOrResample,
    }
}

fn run_online<P: Propagator>(cfg: &JobConfig, prop: &P, ys: &[P::Obs], space: &ParameterSpace) -> Result<RunRecord> {
    let sched = cfg.dynamics_schedule(None)?;
    run_filter(prop, ys, ys.len(), space, &Prior::Uniform, &sched, &cfg.filter_config(), gating(cfg))
}

fn run_offline<M: SsmModel>(
    cfg: &JobConfig,
    base: &M,
    ys: Vec<M::Obs>,
    space: &ParameterSpace,
    rao_blackwell: Option<&dyn Fn(&ClonedDataset<M::Obs>) -> Result<RunRecord>>,
) -> Result<RunRecord> {
    let data = ClonedDataset::new(ys)?;
    if let Some(rb) = rao_blackwell {
        return rb(&data);
    }
    let cloned = clone_model(base, data.period())?;
    let sched = cfg.dynamics_schedule(Some(data.period()))?;
    let slow = cfg.iffit.algorithm.unwrap_or(IfAlgorithm::Slow) == IfAlgorithm::Slow;
    run_iterated(&Bootstrap::new(&cloned), &data, space, &Prior::Uniform, &sched, &cfg.if_config(), slow)
}

fn infer(cfg: &JobConfig) -> Result<RunRecord> {
    let obs = observations(cfg)?;
    let online = cfg.kind() == JobKind::Online;
    let slow = cfg.iffit.algorithm.unwrap_or(IfAlgorithm::Slow) == IfAlgorithm::Slow;
    let mut record = match cfg.model_name() {
        "lg-periodic" => {
            let m = lg_model(cfg)?;
            let ys = scalar_obs(&obs)?;
            let space = cfg.space_box()?.unwrap_or_else(|| m.default_space());
            let rb = cfg.filter.rao_blackwell.unwrap_or(false);
            match (online, rb) {
                (true, true) => run_online(cfg, &RaoBlackwell::new(&m), &ys, &space)?,
                (true, false) => run_online(cfg, &Bootstrap::new(&m), &ys, &space)?,
                (false, true) => {
                    let rb_run = |data: &ClonedDataset<f64>| {
                        let cloned = clone_model(&m, data.period())?;
                        let sched = cfg.dynamics_schedule(Some(data.period()))?;
                        let prop = RaoBlackwell::new(&cloned);
                        run_iterated(&prop, data, &space, &Prior::Uniform, &sched, &cfg.if_config(), slow)
                    };
                    run_offline(cfg, &m, ys, &space, Some(&rb_run))?
                }
                (false, false) => run_offline(cfg, &m, ys, &space, None)?,
            }
        }
        "sv" => {
            let m = sv_model(cfg)?;
            let ys = scalar_obs(&obs)?;
            let space = cfg.space_box()?.unwrap_or_else(sv_default_space);
            if online {
                run_online(cfg, &Bootstrap::new(&m), &ys, &space)?
            } else {
                run_offline(cfg, &m, ys, &space, None)?
            }
        }
        "seird" => {
            let m = Seird::new();
            let ys = pair_obs(&obs)?;
            let space = match cfg.space_box()? {
                Some(b) => b.with_constraint(vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0)?,
                None => Seird::default_space(),
            };
            if online {
                run_online(cfg, &Bootstrap::new(&m), &ys, &space)?
            } else {
                run_offline(cfg, &m, ys, &space, None)?
            }
        }
        "urn" => {
            let ws = urn_chain(&obs)?;
            let space = urn_space(&ws, cfg.model.urn_bound.unwrap_or(20))?;
            let (data, model) = urn_as_cloned_ssm(&ws)?;
            if online {
                run_online(cfg, &Bootstrap::new(&model), data.data(), &space)?
            } else {
                run_offline(cfg, &model, data.data().to_vec(), &space, None)?
            }
        }
        other => return Err(Error::Config(format!("model.name: unknown model '{other}'"))),
    };
    record.theta_star = cfg.model.theta.clone().filter(|_| cfg.data.input.is_none());
    Ok(record)
}

fn optimize(cfg: &JobConfig) -> Result<RunRecord> {
    let ys: Vec<f64> = match &cfg.data.input {
        Some(_) => scalar_obs(&observations_file(cfg)?)?,
        None => {
            let (m, sd) = (cfg.optimize.target.unwrap_or(0.3), cfg.optimize.noise_sd.unwrap_or(1.0));
            let mut rng = sim_rng(cfg);
            (0..cfg.optimize.length.unwrap_or(5000)).map(|_| m + sd * rng.sample::<f64, _>(StandardNormal)).collect()
        }
    };
    let space = cfg.space_box()?.ok_or_else(|| Error::Config("space: missing bounds".into()))?;
    let sched = cfg.dynamics_schedule(None)?;
    let payoff = |y: &f64, th: &[f64]| -(th[0] - y).powi(2);
    run_noisy_opt(payoff, &ys, &space, &Prior::Uniform, &sched, &cfg.filter_config())
}

fn observations_file(cfg: &JobConfig) -> Result<Observations> {
    let path = cfg.data.input.as_ref().ok_or_else(|| Error::Config("data.input: missing".into()))?;
    load_observations(path, cfg.data.columns.as_deref(), &cfg.data.transforms)
}
