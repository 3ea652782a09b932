//! Job configuration files (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{DynamicsSchedule, Flavor, ParameterSpace, ScaleMatrix};
use crate::engine::{FilterConfig, Scheme, Variant};
use crate::error::{Error, Result};
use crate::mle::IfConfig;
use crate::models::MODEL_NAMES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobKind {
    Simulate,
    Online,
    Iffit,
    Optimize,
}

impl JobKind {
    pub fn name(self) -> &'static str {
        match self {
            JobKind::Simulate => "simulate",
            JobKind::Online => "online",
            JobKind::Iffit => "iffit",
            JobKind::Optimize => "optimize",
        }
    }
}

/// Online filter flavours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnlineAlgorithm {
    Bootstrap,
    AdaptiveFast,
    AdaptiveSlow,
}

/// Iterated filtering flavours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IfAlgorithm {
    Fast,
    Slow,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub name: Option<String>,
    /// Spline dimension of the periodic LG model.
    pub p: Option<usize>,
    /// Spline knots, `0 = ξ_1 < … < ξ_{p+1} = 24`. Overrides `p`.
    pub knots: Option<Vec<f64>>,
    /// Parameter used for simulation when no input file is given.
    pub theta: Option<Vec<f64>>,
    /// Number of simulated observations (urn: number of transitions).
    pub length: Option<usize>,
    /// Stochastic volatility innovations: "student" or "gaussian".
    pub innovation: Option<String>,
    /// Degrees of freedom of Student innovations.
    pub innovation_nu: Option<f64>,
    /// Upper bound of the urn parameter grid.
    pub urn_bound: Option<i64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub flavor: Option<Flavor>,
    pub alpha: Option<f64>,
    pub nu: Option<f64>,
    /// Diagonal of Σ; identity by default.
    pub sigma: Option<Vec<f64>>,
    pub delta: Option<usize>,
    pub first_epoch: Option<usize>,
    pub beta: Option<f64>,
    pub c: Option<f64>,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    /// Times after which `h_t` restarts.
    pub resets: Option<Vec<usize>>,
    pub h_first_zero: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    pub particles: Option<usize>,
    pub c_ess: Option<f64>,
    pub variant: Option<Variant>,
    pub resampling: Option<Scheme>,
    pub algorithm: Option<OnlineAlgorithm>,
    /// Use Kalman sufficient statistics per particle (LG model only).
    pub rao_blackwell: Option<bool>,
    pub parallel: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IffitSection {
    pub algorithm: Option<IfAlgorithm>,
    pub passes: Option<usize>,
    pub first_epoch_pass: Option<usize>,
}

/// Payoff `h(y, θ) = -(θ - y)²` with `Y_t ~ N(target, noise_sd²)`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub target: Option<f64>,
    pub noise_sd: Option<f64>,
    pub length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Transform {
    /// Divide a column (or every column) by a constant.
    Divide { column: Option<String>, by: f64 },
    /// `Y_t = W_t - W_{P⌊(t-1)/P⌋}` with `W_0 = 0`: each value minus the
    /// last value of the previous block of `period` rows.
    DayStartDifference { column: Option<String>, period: Option<usize> },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub input: Option<PathBuf>,
    /// Columns to read, in order; all columns by default.
    pub columns: Option<Vec<String>>,
    #[serde(default)]
    pub transforms: Vec<Transform>,
    pub output: Option<PathBuf>,
}

/// A job description. Fields left out of the file are filled by
/// [`JobConfig::resolve`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub kind: Option<JobKind>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub space: SpaceSection,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub filter: FilterSection,
    #[serde(default)]
    pub iffit: IffitSection,
    #[serde(default)]
    pub optimize: OptimizeSection,
    #[serde(default)]
    pub data: DataSection,
}

fn cfg_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

fn model_dim(name: &str, p: usize) -> usize {
    match name {
        "lg-periodic" => 3 * p + 1,
        "sv" | "urn" => 3,
        "seird" => 8,
        _ => 1,
    }
}

impl JobConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().replace('\n', " ");
            Error::Config(format!("parse error: {msg}"))
        })
    }

    pub fn kind(&self) -> JobKind {
        self.kind.unwrap_or(JobKind::Online)
    }

    pub fn model_name(&self) -> &str {
        self.model.name.as_deref().unwrap_or("")
    }

    /// Parameter dimension implied by the model section.
    pub fn param_dim(&self) -> usize {
        if self.kind() == JobKind::Optimize {
            return 1;
        }
        let p = match &self.model.knots {
            Some(k) => k.len().saturating_sub(1),
            None => self.model.p.unwrap_or(2),
        };
        model_dim(self.model_name(), p)
    }

    /// Checks required fields and fills every default explicitly.
    pub fn resolve(mut self) -> Result<Self> {
        let kind = self.kind.ok_or_else(|| cfg_err("kind", "missing (simulate, online, iffit or optimize)"))?;
        if self.seed.is_none() {
            return Err(cfg_err("seed", "missing; every job needs an explicit seed"));
        }
        if kind == JobKind::Optimize {
            self.model.name.get_or_insert_with(|| "quadratic".into());
        } else {
            let name = self.model.name.clone().ok_or_else(|| cfg_err("model.name", "missing"))?;
            if !MODEL_NAMES.contains(&name.as_str()) {
                return Err(cfg_err(
                    "model.name",
                    format!("unknown model '{name}', expected one of {}", MODEL_NAMES.join(", ")),
                ));
            }
        }
        let name = self.model_name().to_string();
        if name == "lg-periodic" {
            if let Some(k) = &self.model.knots {
                if k.len() < 2 {
                    return Err(cfg_err("model.knots", "need at least two knots"));
                }
                self.model.p = Some(k.len() - 1);
            }
            let p = *self.model.p.get_or_insert(2);
            if p == 0 {
                return Err(cfg_err("model.p", "must be >= 1"));
            }
        }
        if name == "sv" {
            let inn = self.model.innovation.get_or_insert_with(|| "student".into());
            if inn != "student" && inn != "gaussian" {
                return Err(cfg_err("model.innovation", format!("'{inn}' is not student or gaussian")));
            }
            if inn == "student" {
                let nu = *self.model.innovation_nu.get_or_insert(5.0);
                if !(nu > 0.0) {
                    return Err(cfg_err("model.innovation_nu", "must be > 0"));
                }
            }
        }
        if name == "urn" {
            let b = *self.model.urn_bound.get_or_insert(20);
            if b < 1 {
                return Err(cfg_err("model.urn_bound", "must be >= 1"));
            }
        }
        let d = self.param_dim();
        if let Some(th) = &self.model.theta {
            if th.len() != d {
                return Err(cfg_err("model.theta", format!("has {} entries, expected {d}", th.len())));
            }
        }

        let has_input = self.data.input.is_some();
        let can_simulate = self.model.length.is_some() && (self.model.theta.is_some() || name == "lg-periodic");
        match kind {
            JobKind::Simulate => {
                if self.model.length.is_none() {
                    return Err(cfg_err("model.length", "missing for a simulate job"));
                }
                if self.model.theta.is_none() && name != "lg-periodic" {
                    return Err(cfg_err("model.theta", "missing for a simulate job"));
                }
            }
            JobKind::Online if !has_input && !can_simulate => {
                return Err(cfg_err("data.input", "missing; give an input file or model.length and model.theta"));
            }
            JobKind::Iffit if !has_input && !can_simulate => {
                return Err(cfg_err(
                    "data.input",
                    "cannot derive the data length T; give an input file or model.length and model.theta",
                ));
            }
            _ => {}
        }
        if kind == JobKind::Iffit && self.model.length == Some(0) && !has_input {
            return Err(cfg_err("model.length", "data length T must be >= 1"));
        }

        if kind == JobKind::Optimize {
            self.optimize.target.get_or_insert(0.3);
            let sd = *self.optimize.noise_sd.get_or_insert(1.0);
            if !(sd >= 0.0) {
                return Err(cfg_err("optimize.noise_sd", "must be >= 0"));
            }
            let n = *self.optimize.length.get_or_insert(5000);
            if n == 0 {
                return Err(cfg_err("optimize.length", "must be >= 1"));
            }
            self.space.lower.get_or_insert_with(|| vec![-2.0]);
            self.space.upper.get_or_insert_with(|| vec![2.0]);
        }

        // Space bounds: explicit boxes are checked coordinatewise.
        if name != "urn" {
            match (&self.space.lower, &self.space.upper) {
                (Some(lo), Some(hi)) => {
                    if lo.len() != d || hi.len() != d {
                        return Err(cfg_err(
                            "space",
                            format!("lower/upper have {}/{} entries, expected {d}", lo.len(), hi.len()),
                        ));
                    }
                    for i in 0..d {
                        if !(lo[i] < hi[i]) {
                            return Err(cfg_err(
                                &format!("space.lower[{i}]"),
                                format!("coordinate {i}: lower {} must be < upper {}", lo[i], hi[i]),
                            ));
                        }
                    }
                }
                (None, None) => {}
                _ => return Err(cfg_err("space", "give both lower and upper")),
            }
        }

        if kind != JobKind::Simulate {
            let f = &mut self.filter;
            let n = *f.particles.get_or_insert(1000);
            if n == 0 {
                return Err(cfg_err("filter.particles", "must be >= 1"));
            }
            let c = *f.c_ess.get_or_insert(0.7);
            if !(0.0..=1.0).contains(&c) {
                return Err(cfg_err("filter.c_ess", format!("{c} must lie in [0, 1]")));
            }
            f.resampling.get_or_insert(Scheme::Ssp);
            f.parallel.get_or_insert(false);
            let rb = *f.rao_blackwell.get_or_insert(false);
            if rb && name != "lg-periodic" {
                return Err(cfg_err("filter.rao_blackwell", "only available for the lg-periodic model"));
            }
            match kind {
                JobKind::Online => {
                    f.variant.get_or_insert(Variant::ThetaAfterX);
                    f.algorithm.get_or_insert(OnlineAlgorithm::AdaptiveSlow);
                }
                _ => {
                    f.variant = Some(Variant::ThetaBeforeX);
                }
            }
            if kind == JobKind::Iffit {
                let s = &mut self.iffit;
                s.algorithm.get_or_insert(IfAlgorithm::Slow);
                let k = *s.passes.get_or_insert(50);
                if k == 0 {
                    return Err(cfg_err("iffit.passes", "must be >= 1"));
                }
                s.first_epoch_pass.get_or_insert(10);
            }
            self.resolve_schedule(kind, d)?;
        }
        Ok(self)
    }

    fn resolve_schedule(&mut self, kind: JobKind, d: usize) -> Result<()> {
        let urn = self.model_name() == "urn";
        let default_flavor = match kind {
            JobKind::Iffit if self.iffit.algorithm == Some(IfAlgorithm::Fast) && !urn => Flavor::Fast,
            _ if urn => Flavor::Mixed,
            JobKind::Online => match self.filter.algorithm {
                Some(OnlineAlgorithm::AdaptiveFast) => Flavor::Fast,
                _ => Flavor::Slow,
            },
            _ => Flavor::Slow,
        };
        let s = &mut self.schedule;
        let flavor = *s.flavor.get_or_insert(default_flavor);
        let alpha = *s.alpha.get_or_insert(match flavor {
            Flavor::Fast => 1.1,
            Flavor::PompGeometric | Flavor::PompHyperbolic => 0.5,
            _ => 0.5,
        });
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(cfg_err("schedule.alpha", format!("{alpha} must be finite and >= 0")));
        }
        let nu = *s.nu.get_or_insert(100.0);
        if !(nu > 0.0) {
            return Err(cfg_err("schedule.nu", "must be > 0"));
        }
        let cont = if urn { 0 } else { d };
        let sigma = s.sigma.get_or_insert_with(|| vec![1.0; cont]);
        if sigma.len() != cont {
            return Err(cfg_err("schedule.sigma", format!("has {} entries, expected {cont}", sigma.len())));
        }
        if sigma.iter().any(|v| !(*v > 0.0)) {
            return Err(cfg_err("schedule.sigma", "diagonal entries must be > 0"));
        }
        let delta = *s.delta.get_or_insert(1);
        if delta == 0 {
            return Err(cfg_err("schedule.delta", "must be >= 1"));
        }
        if matches!(flavor, Flavor::Slow | Flavor::Mixed) && kind != JobKind::Iffit {
            let t0 = *s.first_epoch.get_or_insert(101);
            if t0 < 2 {
                return Err(cfg_err("schedule.first_epoch", "must be >= 2"));
            }
        }
        s.beta.get_or_insert(0.01);
        s.c.get_or_insert(1.0);
        s.alpha1.get_or_insert(alpha);
        s.alpha2.get_or_insert(alpha);
        s.resets.get_or_insert_with(Vec::new);
        s.h_first_zero.get_or_insert(!matches!(flavor, Flavor::PompGeometric | Flavor::PompHyperbolic));
        Ok(())
    }

    /// Schedule of a resolved config; `period` is set for iterated filtering.
    pub fn dynamics_schedule(&self, period: Option<usize>) -> Result<DynamicsSchedule> {
        let s = &self.schedule;
        let flavor = s.flavor.unwrap_or(Flavor::Slow);
        let alpha = s.alpha.unwrap_or(0.5);
        let sigma_diag = s.sigma.clone().unwrap_or_default();
        let dim = sigma_diag.len();
        let mut sched = match flavor {
            Flavor::PompGeometric | Flavor::PompHyperbolic => {
                let p = period
                    .ok_or_else(|| cfg_err("schedule.flavor", "pomp flavors are only available for iffit jobs"))?;
                DynamicsSchedule::pomp(flavor, alpha, p, dim).map_err(|e| cfg_err("schedule.alpha", e))?
            }
            Flavor::None => DynamicsSchedule::none(dim),
            Flavor::Fast => DynamicsSchedule::fast(alpha, dim),
            Flavor::Slow => DynamicsSchedule::slow(alpha, dim, s.delta.unwrap_or(1), s.first_epoch.unwrap_or(101)),
            Flavor::Mixed => DynamicsSchedule::mixed(alpha, dim, s.delta.unwrap_or(1), s.first_epoch.unwrap_or(101)),
        };
        if dim > 0 {
            sched = sched.with_sigma(ScaleMatrix::diagonal(sigma_diag).map_err(|e| cfg_err("schedule.sigma", e))?);
        }
        sched.nu = s.nu.unwrap_or(100.0);
        sched.beta = s.beta.unwrap_or(0.01);
        sched.c = s.c.unwrap_or(1.0);
        sched.alpha1 = s.alpha1.unwrap_or(alpha);
        sched.alpha2 = s.alpha2.unwrap_or(alpha);
        sched.h_first_zero = s.h_first_zero.unwrap_or(sched.h_first_zero);
        sched = sched.with_resets(s.resets.clone().unwrap_or_default());
        if let Some(p) = period {
            sched = sched.with_period(p);
        }
        if period.is_none() {
            sched.validate().map_err(|e| cfg_err("schedule", e))?;
        }
        Ok(sched)
    }

    /// Explicit box from the space section, if any.
    pub fn space_box(&self) -> Result<Option<ParameterSpace>> {
        match (&self.space.lower, &self.space.upper) {
            (Some(lo), Some(hi)) => Ok(Some(ParameterSpace::boxed(lo.clone(), hi.clone())?)),
            _ => Ok(None),
        }
    }

    pub fn filter_config(&self) -> FilterConfig {
        let f = &self.filter;
        FilterConfig {
            particles: f.particles.unwrap_or(1000),
            c_ess: f.c_ess.unwrap_or(0.7),
            variant: f.variant.unwrap_or_default(),
            resampling: f.resampling.unwrap_or_default(),
            seed: self.seed.unwrap_or(0),
            parallel: f.parallel.unwrap_or(false),
        }
    }

    pub fn if_config(&self) -> IfConfig {
        let f = self.filter_config();
        IfConfig {
            particles: f.particles,
            c_ess: f.c_ess,
            resampling: f.resampling,
            seed: f.seed,
            passes: self.iffit.passes.unwrap_or(50),
            first_epoch_pass: self.iffit.first_epoch_pass.unwrap_or(10),
            parallel: f.parallel,
        }
    }

    /// Every resolved field as flat `key = value` pairs, sorted by key.
    pub fn echo(&self) -> Vec<(String, String)> {
        let value = toml::Value::try_from(self).unwrap_or(toml::Value::Table(Default::default()));
        let mut out = vec![];
        flatten("", &value, &mut out);
        out.sort();
        out
    }
}

fn flatten(prefix: &str, v: &toml::Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        toml::Value::Table(t) => {
            for (k, x) in t {
                flatten(&join(k), x, out);
            }
        }
        toml::Value::Array(a) if a.iter().any(|x| x.is_table()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        toml::Value::Array(a) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", items.join(","))));
        }
        x => out.push((prefix.to_string(), scalar(x))),
    }
}

fn scalar(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Float(f) => format!("{f:?}"),
        other => other.to_string(),
    }
}

/// Reads, resolves and validates a configuration file.
pub fn load_config(path: &Path) -> Result<JobConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    JobConfig::from_toml_str(&text)?.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<JobConfig> {
        JobConfig::from_toml_str(s)?.resolve()
    }

    #[test]
    fn minimal_online_gets_defaults() {
        let c =
            parse("kind = \"online\"\nseed = 3\n[model]\nname = \"lg-periodic\"\n[data]\ninput = \"y.csv\"\n").unwrap();
        assert_eq!(c.filter.c_ess, Some(0.7));
        assert_eq!(c.schedule.nu, Some(100.0));
        assert_eq!(c.schedule.alpha, Some(0.5));
        assert_eq!(c.schedule.sigma, Some(vec![1.0; 7]));
        let echo = c.echo();
        assert!(echo.iter().any(|(k, v)| k == "filter.c_ess" && v == "0.7"));
        assert!(echo.iter().any(|(k, v)| k == "schedule.nu" && v == "100.0"));
    }

    #[test]
    fn reversed_box_names_coordinate() {
        let e = parse(
            "kind = \"online\"\nseed = 1\n[model]\nname = \"sv\"\nlength = 5\ntheta = [0.5, 1.0, 0.3]\n\
             [space]\nlower = [0.0, 0.0, 2.0]\nupper = [1.0, 1.0, 1.0]\n",
        )
        .unwrap_err();
        assert!(e.to_string().contains("coordinate 2"), "{e}");
    }

    #[test]
    fn iffit_without_length_fails() {
        let e = parse("kind = \"iffit\"\nseed = 1\n[model]\nname = \"urn\"\ntheta = [5.0, 5.0, 5.0]\n").unwrap_err();
        assert!(e.to_string().contains("data length T"), "{e}");
    }

    #[test]
    fn missing_fields_are_named() {
        let e = parse("kind = \"online\"\n[model]\nname = \"sv\"\n").unwrap_err();
        assert!(e.to_string().starts_with("config: seed"), "{e}");
        let e = parse("kind = \"online\"\nseed = 1\n[model]\nname = \"ar\"\n").unwrap_err();
        assert!(e.to_string().contains("model.name"), "{e}");
        let e = parse("kind = \"online\"\nseed = 1\n[filter]\nparticle = 3\n").unwrap_err();
        assert!(e.to_string().contains("particle"), "{e}");
    }
}
