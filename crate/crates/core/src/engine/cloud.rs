use crate::dynamics::ParameterSpace;
use crate::error::Result;

/// Weighted particles at one time: parameter, payload and normalised
/// log-weight per particle.
#[derive(Debug, Clone)]
pub struct ParticleCloud<S> {
    pub(crate) t: usize,
    pub(crate) dim: usize,
    pub(crate) theta: Vec<f64>,
    pub(crate) payload: Vec<S>,
    pub(crate) log_weights: Vec<f64>,
    pub(crate) weights: Vec<f64>,
    pub(crate) ancestors: Vec<usize>,
    pub(crate) resampled: bool,
    pub(crate) ess: f64,
}

impl<S> ParticleCloud<S> {
    pub fn len(&self) -> usize {
        self.payload.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payload.is_empty()
    }

    /// Time of the last processed observation.
    pub fn time(&self) -> usize {
        self.t
    }

    pub fn param_dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self, n: usize) -> &[f64] {
        &self.theta[n * self.dim..(n + 1) * self.dim]
    }

    pub fn payload(&self, n: usize) -> &S {
        &self.payload[n]
    }

    pub fn payloads(&self) -> &[S] {
        &self.payload
    }

    /// Normalised weights `W_t^n`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `log W_t^n`.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Ancestor index of each particle for the last step.
    pub fn ancestors(&self) -> &[usize] {
        &self.ancestors
    }

    /// Whether the last step resampled.
    pub fn resampled(&self) -> bool {
        self.resampled
    }

    pub fn ess(&self) -> f64 {
        self.ess
    }

    /// Weighted mean `Σ W θ`.
    pub fn theta_mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for (n, w) in self.weights.iter().enumerate() {
            for (mi, v) in m.iter_mut().zip(self.theta(n)) {
                *mi += w * v;
            }
        }
        m
    }
}

/// Point estimate `θ̂ = Σ W θ` and its projection `θ̌` onto the space.
pub fn estimate_theta<S>(cloud: &ParticleCloud<S>, space: &ParameterSpace) -> Result<(Vec<f64>, Vec<f64>)> {
    let hat = cloud.theta_mean();
    let proj = space.project(&hat)?;
    Ok((hat, proj))
}

/// `log Σ exp(v)` with max-shift; `-∞` when every entry is `-∞`.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DiscreteSet;

    #[test]
    fn estimate_projects_onto_discrete_set() {
        let space = ParameterSpace::discrete(DiscreteSet::new(1, 1, 3, vec![vec![1], vec![3]]).unwrap());
        let cloud = ParticleCloud {
            t: 1,
            dim: 1,
            theta: vec![1.0, 3.0],
            payload: vec![(), ()],
            log_weights: vec![0.55f64.ln(), 0.45f64.ln()],
            weights: vec![0.55, 0.45],
            ancestors: vec![0, 1],
            resampled: false,
            ess: 1.0,
        };
        let (hat, proj) = estimate_theta(&cloud, &space).unwrap();
        assert!((hat[0] - 1.9).abs() < 1e-12);
        assert_eq!(proj, vec![1.0]);
    }

    #[test]
    fn lse_handles_infinities() {
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY; 3]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
        assert!((log_sum_exp(&[-1000.0, -1000.0]) - (2f64.ln() - 1000.0)).abs() < 1e-12);
    }
}
