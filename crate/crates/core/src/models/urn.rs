//! Bernoulli-Laplace urn: two urns hold `j` and `k` balls, `r` of them red.
//! Each step swaps one uniformly chosen ball from each urn; `W_t` counts the
//! red balls in the second urn. The parameter `θ = (j, k, r)` is discrete.

use rand::Rng;

use crate::dynamics::{DiscreteSet, ParameterSpace};
use crate::engine::SsmModel;
use crate::error::{Error, Result};
use crate::mle::ClonedDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UrnSpec {
    pub j: i64,
    pub k: i64,
    pub r: i64,
}

impl UrnSpec {
    pub fn new(j: i64, k: i64, r: i64) -> Result<Self> {
        if j < 1 || k < 1 || r < 1 {
            return Err(Error::InvalidArgument(format!("urn sizes ({j}, {k}, {r}) must be positive")));
        }
        if r >= j + k {
            return Err(Error::InvalidArgument(format!("red balls r={r} must be fewer than j + k = {}", j + k)));
        }
        Ok(UrnSpec { j, k, r })
    }

    pub fn from_theta(theta: &[f64]) -> Result<Self> {
        if theta.len() != 3 {
            return Err(Error::InvalidArgument(format!("urn parameter has {} entries", theta.len())));
        }
        Self::new(theta[0].round() as i64, theta[1].round() as i64, theta[2].round() as i64)
    }

    /// `{max(0, r - j), …, min(k, r)}` as an inclusive range.
    pub fn support(&self) -> (i64, i64) {
        ((self.r - self.j).max(0), self.k.min(self.r))
    }

    /// `p(w2 | w1)`.
    pub fn transition(&self, w1: i64, w2: i64) -> f64 {
        let (lo, hi) = self.support();
        if w1 < lo || w1 > hi {
            return 0.0;
        }
        let (j, k, r) = (self.j as f64, self.k as f64, self.r as f64);
        let w = w1 as f64;
        let jk = j * k;
        if w2 == w1 - 1 {
            (j - r + w) * w / jk
        } else if w2 == w1 {
            ((r - w) * w + (j - r + w) * (k - w)) / jk
        } else if w2 == w1 + 1 {
            (r - w) * (k - w) / jk
        } else {
            0.0
        }
    }

    /// Stationary mean `r k / (j + k)` of `W_t`.
    pub fn stationary_mean(&self) -> f64 {
        self.r as f64 * self.k as f64 / (self.j + self.k) as f64
    }
}

/// `p(w2 | w1)` for `θ = (j, k, r)`; zero for invalid parameters.
pub fn urn_transition(theta: &[f64], w1: i64, w2: i64) -> f64 {
    UrnSpec::from_theta(theta).map_or(0.0, |s| s.transition(w1, w2))
}

/// Chain `W_1, …, W_{T+1}` started from `W_1 = 0`.
pub fn urn_simulate<R: Rng + ?Sized>(spec: &UrnSpec, steps: usize, rng: &mut R) -> Vec<i64> {
    let mut w = vec![0i64; steps + 1];
    for t in 1..=steps {
        let prev = w[t - 1];
        let down = spec.transition(prev, prev - 1);
        let stay = spec.transition(prev, prev);
        let u: f64 = rng.random();
        w[t] = if u < down {
            prev - 1
        } else if u < down + stay {
            prev
        } else {
            prev + 1
        };
    }
    w
}

/// The urn chain seen as a state-space model on pairs `(w_t, w_{t+1})`,
/// weighted by `p_θ(w_{t+1} | w_t)`. There is no latent state.
#[derive(Debug, Clone, Default)]
pub struct UrnModel;

impl SsmModel for UrnModel {
    type State = ();
    type Obs = [i64; 2];

    fn param_dim(&self) -> usize {
        3
    }

    fn state_summary_dim(&self) -> usize {
        0
    }

    fn sample_initial<R: Rng + ?Sized>(&self, _theta: &[f64], _rng: &mut R) {}

    fn sample_transition<R: Rng + ?Sized>(&self, _t: usize, _theta: &[f64], _prev: &(), _rng: &mut R) {}

    fn log_obs_density(&self, _t: usize, theta: &[f64], _x: &(), y: &[i64; 2]) -> f64 {
        urn_transition(theta, y[0], y[1]).ln()
    }

    fn summarize_state(&self, _x: &(), _out: &mut [f64]) {}
}

/// Pairs `(w_t, w_{t+1})` as a cloned data set of block length `T`.
pub fn urn_as_cloned_ssm(ws: &[i64]) -> Result<(ClonedDataset<[i64; 2]>, UrnModel)> {
    if ws.len() < 2 {
        return Err(Error::InvalidArgument("urn chain needs at least two values".into()));
    }
    let pairs = ws.windows(2).map(|p| [p[0], p[1]]).collect();
    Ok((ClonedDataset::new(pairs)?, UrnModel))
}

/// `{(j, k, r) ∈ {1..bound}^3 : r < j + k, r >= v, k >= v}` with `v = max w`.
pub fn urn_space(ws: &[i64], bound: i64) -> Result<ParameterSpace> {
    let v = ws.iter().copied().max().unwrap_or(0);
    let mut pts = vec![];
    for j in 1..=bound {
        for k in 1..=bound {
            for r in 1..=bound {
                if r < j + k && r >= v && k >= v {
                    pts.push(vec![j, k, r]);
                }
            }
        }
    }
    Ok(ParameterSpace::discrete(DiscreteSet::new(3, 1, bound, pts)?))
}

/// `Σ_t log p_θ(w_{t+1} | w_t)`.
pub fn urn_loglik(spec: &UrnSpec, ws: &[i64]) -> f64 {
    ws.windows(2).map(|p| spec.transition(p[0], p[1]).ln()).sum()
}

/// Exhaustive maximiser of the chain likelihood over the points of
/// `space`; ties go to the lexicographically smallest point.
pub fn urn_grid_mle(ws: &[i64], space: &ParameterSpace) -> Result<(Vec<i64>, f64)> {
    let set = space.discrete_set().ok_or_else(|| Error::InvalidArgument("urn space must be discrete".into()))?;
    let mut best: Option<(Vec<i64>, f64)> = None;
    for p in set.points() {
        let spec = UrnSpec::new(p[0], p[1], p[2])?;
        let ll = urn_loglik(&spec, ws);
        if best.as_ref().is_none_or(|(_, b)| ll > *b) {
            best = Some((p.clone(), ll));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("empty urn space".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, Streams};

    #[test]
    fn transition_example_and_rows() {
        let s = UrnSpec::new(2, 2, 2).unwrap();
        assert_eq!(s.transition(1, 0), 0.25);
        assert_eq!(s.transition(1, 1), 0.5);
        assert_eq!(s.transition(1, 2), 0.25);
        assert_eq!(s.transition(1, 3), 0.0);
        for (j, k, r) in [(3, 5, 4), (7, 2, 8), (1, 1, 1), (5, 5, 5), (4, 9, 2)] {
            let s = UrnSpec::new(j, k, r).unwrap();
            let (lo, hi) = s.support();
            assert!(lo <= hi);
            for w in lo..=hi {
                let row: f64 = (lo..=hi).map(|v| s.transition(w, v)).sum();
                assert!((row - 1.0).abs() < 1e-12);
                assert!(s.transition(w, w - 1) >= 0.0 && s.transition(w, w + 1) >= 0.0);
            }
        }
        assert!(UrnSpec::new(2, 2, 4).is_err());
    }

    #[test]
    fn simulate_edge_cases() {
        let mut rng = Streams::new(1).stream(Purpose::Simulate, 0, 0);
        assert_eq!(urn_simulate(&UrnSpec::new(5, 5, 5).unwrap(), 0, &mut rng), vec![0]);
        let w = urn_simulate(&UrnSpec::new(5, 5, 5).unwrap(), 200, &mut rng);
        assert_eq!(w[0], 0);
        assert!(urn_loglik(&UrnSpec::new(5, 5, 5).unwrap(), &w).is_finite());
    }

    #[test]
    fn space_respects_observed_maximum() {
        let ws = vec![0, 1, 2, 3, 2];
        let space = urn_space(&ws, 6).unwrap();
        for p in space.discrete_set().unwrap().points() {
            assert!(p[2] < p[0] + p[1] && p[2] >= 3 && p[1] >= 3);
        }
        let (best, ll) = urn_grid_mle(&ws, &space).unwrap();
        assert!(ll.is_finite());
        assert_eq!(best.len(), 3);
    }
}
