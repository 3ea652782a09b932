//! Schedules of the artificial parameter dynamics: scale sequences `h_t`,
//! discrete move probabilities and the epoch times at which heavy-tailed
//! moves are enforced.

use serde::{Deserialize, Serialize};

use super::samplers::{ScaleMatrix, DEFAULT_REJECTION_CAP};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    /// No artificial dynamics: the kernel is the identity.
    None,
    /// Truncated normal moves with `h_t = t^{-α}`, typically `α > 1`.
    Fast,
    /// Truncated normal moves, Student-t moves at epochs, `h_t = t^{-α}` with
    /// `α ∈ (0, 1]`.
    Slow,
    /// Continuous and discrete coordinates; epoch moves use the slowly
    /// varying exponent `β_t = (log t)^{-β}`.
    Mixed,
    /// Geometric cooling per observation, as in iterated filtering packages.
    PompGeometric,
    /// Hyperbolic cooling per observation.
    PompHyperbolic,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::None => "none",
            Flavor::Fast => "fast",
            Flavor::Slow => "slow",
            Flavor::Mixed => "mixed",
            Flavor::PompGeometric => "pomp-geometric",
            Flavor::PompHyperbolic => "pomp-hyperbolic",
        }
    }
}

/// Full description of the artificial dynamics.
#[derive(Debug, Clone)]
pub struct DynamicsSchedule {
    pub flavor: Flavor,
    /// Exponent α of `h_t = t^{-α}` (α₃ for the mixed flavor; the cooling
    /// fraction for the pomp flavors).
    pub alpha: f64,
    /// Discrete move exponents off and on epochs (mixed flavor).
    pub alpha1: f64,
    pub alpha2: f64,
    /// Exponent of `β_t = (log t)^{-β}`.
    pub beta: f64,
    /// Discrete move probability multiplier, `p_t = c t^{-…}`.
    pub c: f64,
    /// Student-t degrees of freedom for epoch moves.
    pub nu: f64,
    pub sigma: ScaleMatrix,
    /// Epoch spacing multiplier Δ.
    pub delta: usize,
    /// First epoch; `None` means no epochs.
    pub first_epoch: Option<usize>,
    /// Observation block length `T` when the model is a cloned data set:
    /// epochs are then kept congruent to 1 mod `T`, and the pomp flavors
    /// cool over blocks of `T` steps.
    pub period: Option<usize>,
    /// Use `h_1 = 0` (and `p_1 = 0`).
    pub h_first_zero: bool,
    /// Explicit scale sequence `h_1, h_2, …` replacing the formula.
    pub h_override: Option<Vec<f64>>,
    /// Times `T_i` after which the schedule restarts as `(t - T_i)^{-α}`.
    pub resets: Vec<usize>,
    pub rejection_cap: usize,
}

impl DynamicsSchedule {
    fn base(flavor: Flavor, alpha: f64, dim: usize) -> Self {
        DynamicsSchedule {
            flavor,
            alpha,
            alpha1: 0.5,
            alpha2: 0.5,
            beta: 0.01,
            c: 1.0,
            nu: 100.0,
            sigma: ScaleMatrix::identity(dim),
            delta: 1,
            first_epoch: None,
            period: None,
            h_first_zero: true,
            h_override: None,
            resets: vec![],
            rejection_cap: DEFAULT_REJECTION_CAP,
        }
    }

    /// Identity kernel.
    pub fn none(dim: usize) -> Self {
        Self::base(Flavor::None, 0.0, dim)
    }

    /// `h_t = t^{-alpha}` with normal moves only.
    pub fn fast(alpha: f64, dim: usize) -> Self {
        Self::base(Flavor::Fast, alpha, dim)
    }

    /// `h_t = t^{-alpha}` with Student-t moves at epochs starting at
    /// `first_epoch`.
    pub fn slow(alpha: f64, dim: usize, delta: usize, first_epoch: usize) -> Self {
        let mut s = Self::base(Flavor::Slow, alpha, dim);
        s.delta = delta;
        s.first_epoch = Some(first_epoch);
        s
    }

    /// Mixed continuous/discrete dynamics with `α₁ = α₂ = α₃ = alpha`.
    /// `continuous_dim` sizes the default scale matrix.
    pub fn mixed(alpha: f64, continuous_dim: usize, delta: usize, first_epoch: usize) -> Self {
        let mut s = Self::base(Flavor::Mixed, alpha, continuous_dim);
        s.alpha1 = alpha;
        s.alpha2 = alpha;
        s.delta = delta;
        s.first_epoch = Some(first_epoch);
        s
    }

    /// Pomp-style cooling with fraction `alpha` over 50 blocks of `period`.
    pub fn pomp(flavor: Flavor, alpha: f64, period: usize, dim: usize) -> Result<Self> {
        if !matches!(flavor, Flavor::PompGeometric | Flavor::PompHyperbolic) {
            return Err(Error::InvalidSchedule(format!("{} is not a pomp flavor", flavor.name())));
        }
        let mut s = Self::base(flavor, alpha, dim);
        s.period = Some(period);
        s.h_first_zero = false;
        s.validate()?;
        Ok(s)
    }

    pub fn with_sigma(mut self, sigma: ScaleMatrix) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn with_period(mut self, period: usize) -> Self {
        self.period = Some(period);
        self
    }

    pub fn with_first_epoch(mut self, first: Option<usize>) -> Self {
        self.first_epoch = first;
        self
    }

    pub fn with_resets(mut self, mut resets: Vec<usize>) -> Self {
        resets.sort_unstable();
        self.resets = resets;
        self
    }

    pub fn with_h_override(mut self, h: Vec<f64>) -> Self {
        self.h_override = Some(h);
        self
    }

    pub fn with_h_first_zero(mut self, on: bool) -> Self {
        self.h_first_zero = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSchedule(m));
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad(format!("alpha={} must be finite and >= 0", self.alpha));
        }
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return bad(format!("nu={} must be > 0", self.nu));
        }
        if self.delta == 0 {
            return bad("delta must be >= 1".into());
        }
        if let Some(t) = self.first_epoch {
            if t < 2 {
                return bad(format!("first epoch {t} must be >= 2"));
            }
            if let Some(p) = self.period {
                if (t - 1) % p != 0 {
                    return bad(format!("first epoch {t} is not congruent to 1 mod {p}"));
                }
            }
        }
        if self.period == Some(0) {
            return bad("period must be >= 1".into());
        }
        if matches!(self.flavor, Flavor::PompGeometric | Flavor::PompHyperbolic) {
            if !(self.alpha > 1.0 / 50.0 && self.alpha < 1.0) {
                return bad(format!("pomp cooling fraction {} must lie in (1/50, 1)", self.alpha));
            }
            if self.period.is_none() {
                return bad("pomp flavors need a period".into());
            }
        }
        if self.flavor == Flavor::Mixed {
            if !(0.0..=1.0).contains(&self.c) {
                return bad(format!("c={} must lie in [0, 1]", self.c));
            }
            if self.alpha1 < 0.0 || self.alpha2 < 0.0 || self.beta < 0.0 {
                return bad("alpha1, alpha2 and beta must be >= 0".into());
            }
        }
        if let Some(h) = &self.h_override {
            if h.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return bad("h_override entries must be finite and >= 0".into());
            }
        }
        Ok(())
    }

    /// Time measured from the latest reset strictly before `t`.
    fn local_time(&self, t: usize) -> usize {
        let base = self.resets.iter().copied().filter(|&r| r < t).max().unwrap_or(0);
        t - base
    }

    /// `β_t = (log t)^{-β}`, taken as 1 at `t = 1`.
    pub fn beta_t(&self, t: usize) -> f64 {
        if t <= 1 {
            1.0
        } else {
            (t as f64).ln().powf(-self.beta)
        }
    }

    /// Scale `h_t` of the continuous kernel off epochs.
    pub fn h_at(&self, t: usize) -> Result<f64> {
        if t == 0 {
            return Err(Error::InvalidArgument("schedule time t must be >= 1".into()));
        }
        if let Some(h) = &self.h_override {
            return h
                .get(t - 1)
                .copied()
                .ok_or_else(|| Error::InvalidArgument(format!("h_override has {} entries, asked for t={t}", h.len())));
        }
        match self.flavor {
            Flavor::None => Ok(0.0),
            Flavor::Fast | Flavor::Slow | Flavor::Mixed => {
                let s = self.local_time(t);
                if s == 1 && self.h_first_zero {
                    Ok(0.0)
                } else {
                    Ok((s as f64).powf(-self.alpha))
                }
            }
            Flavor::PompGeometric | Flavor::PompHyperbolic => {
                let p = self.period.unwrap_or(1);
                let pomp = PompSchedule::new(self.flavor, self.alpha, p)?;
                Ok(pomp.h_global(t))
            }
        }
    }

    /// Scale multiplying `Σ^{1/2}` in the continuous kernel at `t`.
    pub fn continuous_scale(&self, t: usize, at_epoch: bool) -> Result<f64> {
        if self.flavor == Flavor::Mixed && at_epoch && self.h_override.is_none() {
            let s = self.local_time(t);
            if s == 1 && self.h_first_zero {
                return Ok(0.0);
            }
            return Ok((s as f64).powf(-self.alpha * self.beta_t(s)));
        }
        self.h_at(t)
    }

    /// Move probability of the discrete kernel at `t`.
    pub fn discrete_prob(&self, t: usize, at_epoch: bool) -> Result<f64> {
        if t == 0 {
            return Err(Error::InvalidArgument("schedule time t must be >= 1".into()));
        }
        if self.flavor != Flavor::Mixed {
            return Ok(0.0);
        }
        let s = self.local_time(t);
        if s == 1 && self.h_first_zero {
            return Ok(0.0);
        }
        let sf = s as f64;
        let p = if at_epoch { self.c * sf.powf(-self.alpha2 * self.beta_t(s)) } else { self.c * sf.powf(-self.alpha1) };
        Ok(p.clamp(0.0, 1.0))
    }

    /// Whether epoch moves use the Student-t kernel.
    pub fn heavy_tailed_at_epochs(&self) -> bool {
        matches!(self.flavor, Flavor::Slow | Flavor::Mixed)
    }

    /// Epoch following `t_p`.
    pub fn next_epoch(&self, tp: usize) -> Result<usize> {
        if tp < 2 {
            return Err(Error::InvalidArgument(format!("epoch t_p={tp} must be >= 2")));
        }
        let l = (tp as f64).ln();
        let gap = match (self.flavor, self.period) {
            (Flavor::Mixed, None) => self.delta * l.powf(1.0 - self.beta / 2.0).ceil() as usize,
            (_, None) => self.delta * (l * l).ceil() as usize,
            (Flavor::Mixed, Some(p)) => self.delta * p * l.powf(1.0 - self.beta / 2.0).ceil() as usize,
            (_, Some(p)) => self.delta * p * ((l * l).floor() as usize).max(1),
        };
        Ok(tp + gap.max(1))
    }

    /// Fresh cursor over the epoch sequence.
    pub fn epochs(&self) -> EpochCursor {
        EpochCursor { next: self.first_epoch }
    }

    /// Whether `t` is an epoch (walks the sequence from the start).
    pub fn is_epoch(&self, t: usize) -> Result<bool> {
        let mut e = self.first_epoch;
        while let Some(tp) = e {
            if tp == t {
                return Ok(true);
            }
            if tp > t {
                return Ok(false);
            }
            e = Some(self.next_epoch(tp)?);
        }
        Ok(false)
    }
}

/// Walks the epoch sequence as time advances.
#[derive(Debug, Clone)]
pub struct EpochCursor {
    next: Option<usize>,
}

impl EpochCursor {
    /// Next pending epoch.
    pub fn peek(&self) -> Option<usize> {
        self.next
    }

    /// Returns whether `t` is the pending epoch, advancing past it if so.
    /// Times must be visited in increasing order.
    pub fn hit(&mut self, t: usize, schedule: &DynamicsSchedule) -> Result<bool> {
        match self.next {
            Some(tp) if tp == t => {
                self.next = Some(schedule.next_epoch(tp)?);
                Ok(true)
            }
            _ => Ok(false),
        }
    }
}

/// Pomp-style cooling over passes of length `T`: pass `k`, step `s`.
#[derive(Debug, Clone, Copy)]
pub struct PompSchedule {
    pub flavor: Flavor,
    pub alpha: f64,
    pub period: usize,
}

impl PompSchedule {
    pub fn new(flavor: Flavor, alpha: f64, period: usize) -> Result<Self> {
        if !matches!(flavor, Flavor::PompGeometric | Flavor::PompHyperbolic) {
            return Err(Error::InvalidSchedule(format!("{} is not a pomp flavor", flavor.name())));
        }
        if !(alpha > 1.0 / 50.0 && alpha < 1.0) {
            return Err(Error::InvalidSchedule(format!("pomp cooling fraction {alpha} must lie in (1/50, 1)")));
        }
        if period == 0 {
            return Err(Error::InvalidSchedule("period must be >= 1".into()));
        }
        Ok(PompSchedule { flavor, alpha, period })
    }

    /// `h` at pass `k >= 1`, step `s ∈ {1..T}`.
    pub fn h(&self, k: usize, s: usize) -> f64 {
        self.h_global((k - 1) * self.period + s)
    }

    /// `h` at global time `t = (k - 1) T + s`.
    pub fn h_global(&self, t: usize) -> f64 {
        let tf = self.period as f64;
        let a = self.alpha;
        match self.flavor {
            Flavor::PompGeometric => a.powf((t as f64 - 1.0) / (50.0 * tf)),
            _ => a * (50.0 * tf - 1.0) / (50.0 * a * tf - 1.0 + (1.0 - a) * t as f64),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_examples() {
        let slow = DynamicsSchedule::slow(0.5, 1, 1, 100);
        assert!(slow.h_at(0).is_err());
        assert_eq!(slow.h_at(4).unwrap(), 0.5);
        let fast = DynamicsSchedule::fast(1.1, 1);
        assert_eq!(fast.h_at(1).unwrap(), 0.0);
        let o = DynamicsSchedule::fast(1.1, 1).with_h_override(vec![0.3, 0.2]);
        assert_eq!(o.h_at(2).unwrap(), 0.2);
        assert!(o.h_at(3).is_err());
        assert_eq!(DynamicsSchedule::none(1).h_at(5).unwrap(), 0.0);
    }

    #[test]
    fn resets_rebase_time() {
        let s = DynamicsSchedule::slow(0.5, 1, 1, 100).with_resets(vec![10]);
        assert_eq!(s.h_at(14).unwrap(), 0.5);
        assert_eq!(s.h_at(11).unwrap(), 0.0);
        assert_eq!(s.h_at(4).unwrap(), 0.5);
    }

    #[test]
    fn epoch_examples() {
        let slow = DynamicsSchedule::slow(0.5, 1, 1, 100);
        assert_eq!(slow.next_epoch(100).unwrap(), 122);
        assert!(slow.next_epoch(1).is_err());
        let mixed = DynamicsSchedule::mixed(0.5, 1, 1, 100);
        assert_eq!(mixed.next_epoch(100).unwrap(), 105);
        let c1 = DynamicsSchedule::slow(0.5, 1, 1, 3).with_period(1);
        assert_eq!(c1.next_epoch(3).unwrap(), 4);
        let c2 = DynamicsSchedule::slow(0.5, 1, 1, 11).with_period(2);
        assert_eq!(c2.next_epoch(11).unwrap(), 21);
        assert!(slow.is_epoch(122).unwrap());
        assert!(!slow.is_epoch(121).unwrap());
    }

    #[test]
    fn mixed_scales() {
        let m = DynamicsSchedule::mixed(0.5, 1, 1, 100);
        let off = m.continuous_scale(100, false).unwrap();
        assert!((off * off - 0.01).abs() < 1e-15);
        let p = m.discrete_prob(100, true).unwrap();
        assert!((p - 0.10356).abs() < 1e-4, "{p}");
        assert!((m.beta_t(100) - 0.98484).abs() < 1e-5);
    }

    #[test]
    fn pomp_values() {
        let g = PompSchedule::new(Flavor::PompGeometric, 0.5, 3).unwrap();
        assert_eq!(g.h(1, 1), 1.0);
        assert!((g.h_global(1 + 150) - 0.5).abs() < 1e-15);
        let h = PompSchedule::new(Flavor::PompHyperbolic, 0.5, 3).unwrap();
        // α(50T - 1) / (50αT - 1 + (1 - α)) = 1 at the first step
        assert!((h.h(1, 1) - 1.0).abs() < 1e-15);
        for t in 1..2000 {
            assert!(h.h_global(t + 1) < h.h_global(t));
            assert!(t as f64 * h.h_global(t) >= 1.0 - 1e-12);
        }
        assert!(PompSchedule::new(Flavor::PompGeometric, 0.01, 3).is_err());
        assert!(PompSchedule::new(Flavor::PompGeometric, 1.0, 3).is_err());
    }
}
