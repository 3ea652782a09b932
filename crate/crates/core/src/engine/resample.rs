use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Resampling scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Srinivasan sampling process: offspring counts are `⌊NW⌋` or `⌈NW⌉`
    /// and resampled indices are not reordered.
    #[default]
    Ssp,
    Systematic,
    Stratified,
    Multinomial,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ssp => "ssp",
            Scheme::Systematic => "systematic",
            Scheme::Stratified => "stratified",
            Scheme::Multinomial => "multinomial",
        }
    }
}

/// Effective sample size `1 / Σ W²` of normalised weights.
pub fn ess(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::InvalidArgument("ess of an empty weight vector".into()));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidArgument("weights must be finite and non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("weights sum to {total}, expected 1")));
    }
    Ok(ess_unchecked(weights))
}

pub(crate) fn ess_unchecked(weights: &[f64]) -> f64 {
    1.0 / weights.iter().map(|w| w * w).sum::<f64>()
}

/// Draws `N = weights.len()` ancestor indices, returned in increasing order.
pub fn resample<R: Rng + ?Sized>(scheme: Scheme, weights: &[f64], rng: &mut R) -> Result<Vec<usize>> {
    ess(weights)?;
    Ok(resample_unchecked(scheme, weights, rng))
}

pub(crate) fn resample_unchecked<R: Rng + ?Sized>(scheme: Scheme, weights: &[f64], rng: &mut R) -> Vec<usize> {
    let n = weights.len();
    match scheme {
        Scheme::Ssp => counts_to_indices(&ssp_counts(weights, rng)),
        Scheme::Systematic => {
            let u: f64 = rng.random();
            inverse_cdf(weights, (0..n).map(|k| (k as f64 + u) / n as f64))
        }
        Scheme::Stratified => {
            let us: Vec<f64> = (0..n).map(|k| (k as f64 + rng.random::<f64>()) / n as f64).collect();
            inverse_cdf(weights, us.into_iter())
        }
        Scheme::Multinomial => {
            // sorted uniforms from normalised exponential spacings
            let mut acc = 0.0;
            let mut e: Vec<f64> = (0..=n)
                .map(|_| {
                    acc += -(1.0 - rng.random::<f64>()).ln();
                    acc
                })
                .collect();
            let total = e[n];
            e.truncate(n);
            inverse_cdf(weights, e.into_iter().map(|v| v / total))
        }
    }
}

/// Offspring counts from a list of ancestor indices.
pub fn offspring_counts(ancestors: &[usize], n: usize) -> Vec<usize> {
    let mut c = vec![0; n];
    for &a in ancestors {
        c[a] += 1;
    }
    c
}

fn counts_to_indices(counts: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(counts.iter().sum());
    for (i, &c) in counts.iter().enumerate() {
        out.extend(std::iter::repeat_n(i, c));
    }
    out
}

/// Walks the CDF of `weights` with nondecreasing points in `[0, 1)`.
fn inverse_cdf(weights: &[f64], points: impl Iterator<Item = f64>) -> Vec<usize> {
    let n = weights.len();
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    let mut cum = weights[0];
    for u in points {
        while u >= cum && j + 1 < n {
            j += 1;
            cum += weights[j];
        }
        out.push(j);
    }
    out
}

/// Pairwise Srinivasan sampling of the fractional parts of `N W`.
fn ssp_counts<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Vec<usize> {
    let n = weights.len();
    let mw: Vec<f64> = weights.iter().map(|w| w * n as f64).collect();
    let mut counts: Vec<usize> = mw.iter().map(|v| v.floor() as usize).collect();
    let mut xi: Vec<f64> = mw.iter().zip(&counts).map(|(v, c)| v - *c as f64).collect();
    if n == 1 {
        return vec![1];
    }
    let (mut i, mut j) = (0usize, 1usize);
    for k in 0..n - 1 {
        let mut delta_i = xi[j].min(1.0 - xi[i]);
        let delta_j = xi[i].min(1.0 - xi[j]);
        let sum = delta_i + delta_j;
        let pj = if sum > 0.0 { delta_i / sum } else { 0.0 };
        if rng.random::<f64>() < pj {
            std::mem::swap(&mut i, &mut j);
            delta_i = delta_j;
        }
        if xi[j] < 1.0 - xi[i] {
            xi[i] += delta_i;
            j = k + 2;
        } else {
            xi[j] -= delta_i;
            counts[i] += 1;
            i = k + 2;
        }
    }
    // Round-off can leave the last open index one child short.
    let total: usize = counts.iter().sum();
    if total < n {
        let open: Vec<usize> = [i, j].into_iter().filter(|&x| x < n).collect();
        let best = open
            .into_iter()
            .max_by(|&a, &b| xi[a].total_cmp(&xi[b]))
            .unwrap_or_else(|| (0..n).max_by(|&a, &b| xi[a].total_cmp(&xi[b])).expect("n >= 1"));
        counts[best] += n - total;
    }
    counts
}
