//! Truncated samplers used by the artificial parameter dynamics.
//!
//! With a diagonal scale matrix both truncated laws are drawn exactly
//! without rejection against the box: the normal coordinatewise by inverse
//! CDF, the Student-t through its normal/gamma scale mixture, where the
//! mixing variable is first drawn from its box-conditioned law (by an
//! envelope made of truncated gamma pieces) and the coordinates are then
//! conditionally independent truncated normals. A general scale matrix falls
//! back to plain rejection.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, StandardNormal};
use statrs::distribution::{ContinuousCDF, Gamma as GammaLaw};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use super::space::{DiscreteSet, ParameterSpace};
use crate::error::{Error, Result};

/// Default cap on rejection loops.
pub const DEFAULT_REJECTION_CAP: usize = 1_000_000;

/// Positive-definite scale matrix `Σ` with its Cholesky factor.
#[derive(Debug, Clone)]
pub struct ScaleMatrix {
    matrix: DMatrix<f64>,
    chol: DMatrix<f64>,
    diag_sd: Option<Vec<f64>>,
}

impl ScaleMatrix {
    pub fn identity(d: usize) -> Self {
        Self::diagonal(vec![1.0; d]).expect("identity is positive definite")
    }

    pub fn diagonal(variances: Vec<f64>) -> Result<Self> {
        if let Some(i) = variances.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "degenerate scale matrix: diagonal entry {i} is {}",
                variances[i]
            )));
        }
        let matrix = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(variances.clone()));
        let sd: Vec<f64> = variances.iter().map(|v| v.sqrt()).collect();
        let chol = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(sd.clone()));
        Ok(ScaleMatrix { matrix, chol, diag_sd: Some(sd) })
    }

    pub fn full(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument("scale matrix must be square".into()));
        }
        let n = matrix.nrows();
        let is_diag = (0..n).all(|i| (0..n).all(|j| i == j || matrix[(i, j)] == 0.0));
        if is_diag {
            return Self::diagonal(matrix.diagonal().iter().copied().collect());
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let chol = nalgebra::Cholesky::new(sym.clone())
            .ok_or_else(|| Error::InvalidArgument("degenerate scale matrix: not positive definite".into()))?
            .l();
        Ok(ScaleMatrix { matrix: sym, chol, diag_sd: None })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_diagonal(&self) -> bool {
        self.diag_sd.is_some()
    }
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn std_normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal restricted to `[a, b]` with `a <= 0 <= b`, by inverse CDF
/// evaluated on whichever tail keeps precision.
fn std_truncated_normal<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    let pa = std_normal_cdf(a);
    let qb = std_normal_sf(b);
    let mass = 1.0 - pa - qb;
    let v = rng.random::<f64>() * mass;
    let x = if pa + v <= 0.5 {
        -std::f64::consts::SQRT_2 * erfc_inv(2.0 * (pa + v))
    } else {
        let q = qb + (mass - v);
        std::f64::consts::SQRT_2 * erfc_inv(2.0 * q)
    };
    x.clamp(a, b)
}

fn check_center(center: &[f64], h: f64, sigma: &ScaleMatrix, space: &ParameterSpace) -> Result<()> {
    let d = space.continuous_dim();
    if center.len() != d || sigma.dim() != d {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: center {}, scale {}, space {d}",
            center.len(),
            sigma.dim()
        )));
    }
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::InvalidArgument(format!("kernel scale h={h} must be finite and >= 0")));
    }
    for (i, (c, (l, u))) in center.iter().zip(space.lower().iter().zip(space.upper())).enumerate() {
        if !(c >= l && c <= u) {
            return Err(Error::OutsideSpace(format!("kernel center coordinate {i} = {c} outside [{l}, {u}]")));
        }
    }
    Ok(())
}

fn in_box(x: &[f64], space: &ParameterSpace) -> bool {
    x.iter().zip(space.lower().iter().zip(space.upper())).all(|(v, (l, u))| v >= l && v <= u)
}

/// Repeats `draw` until the constraints of `space` hold.
fn with_constraints<R: Rng + ?Sized>(
    space: &ParameterSpace,
    rng: &mut R,
    cap: usize,
    what: &str,
    mut draw: impl FnMut(&mut R) -> Result<Option<Vec<f64>>>,
) -> Result<Vec<f64>> {
    for _ in 0..cap {
        if let Some(x) = draw(rng)? {
            if space.satisfies_constraints(&x) {
                return Ok(x);
            }
        }
    }
    Err(Error::RejectionCap { what: what.into(), attempts: cap })
}

/// Draw from `N(center, h² Σ)` restricted to the continuous part of `space`.
/// Returns `center` when `h = 0`.
pub fn sample_truncated_normal<R: Rng + ?Sized>(
    center: &[f64],
    h: f64,
    sigma: &ScaleMatrix,
    space: &ParameterSpace,
    rng: &mut R,
    cap: usize,
) -> Result<Vec<f64>> {
    check_center(center, h, sigma, space)?;
    if h == 0.0 {
        return Ok(center.to_vec());
    }
    let (lower, upper) = (space.lower(), space.upper());
    match &sigma.diag_sd {
        Some(sd) => with_constraints(space, rng, cap, "truncated normal", |rng| {
            let x = center
                .iter()
                .zip(sd)
                .enumerate()
                .map(|(i, (&m, &s))| {
                    let s = h * s;
                    let z = std_truncated_normal((lower[i] - m) / s, (upper[i] - m) / s, rng);
                    (m + s * z).clamp(lower[i], upper[i])
                })
                .collect();
            Ok(Some(x))
        }),
        None => with_constraints(space, rng, cap, "truncated normal", |rng| {
            let x = correlated_draw(center, h, &sigma.chol, 1.0, rng);
            Ok(in_box(&x, space).then_some(x))
        }),
    }
}

fn correlated_draw<R: Rng + ?Sized>(
    center: &[f64],
    h: f64,
    chol: &DMatrix<f64>,
    inv_sqrt_w: f64,
    rng: &mut R,
) -> Vec<f64> {
    let d = center.len();
    let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    (0..d)
        .map(|i| {
            let lz: f64 = (0..=i).map(|j| chol[(i, j)] * z[j]).sum();
            center[i] + h * inv_sqrt_w * lz
        })
        .collect()
}

/// Draw from the multivariate Student-t `t_ν(center, h² Σ)` restricted to the
/// continuous part of `space`. Returns `center` when `h = 0`.
pub fn sample_truncated_student<R: Rng + ?Sized>(
    center: &[f64],
    h: f64,
    sigma: &ScaleMatrix,
    nu: f64,
    space: &ParameterSpace,
    rng: &mut R,
    cap: usize,
) -> Result<Vec<f64>> {
    check_center(center, h, sigma, space)?;
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidArgument(format!("degrees of freedom nu={nu} must be > 0")));
    }
    if h == 0.0 {
        return Ok(center.to_vec());
    }
    match &sigma.diag_sd {
        Some(sd) => {
            let env = MixingEnvelope::new(center, h, sd, nu, space);
            with_constraints(space, rng, cap, "truncated student", |rng| {
                let w = env.sample_mixing(rng, cap)?;
                let (lower, upper) = (space.lower(), space.upper());
                let x = center
                    .iter()
                    .zip(&env.scale)
                    .enumerate()
                    .map(|(i, (&m, &s))| {
                        let s = s / w.sqrt();
                        let z = std_truncated_normal((lower[i] - m) / s, (upper[i] - m) / s, rng);
                        (m + s * z).clamp(lower[i], upper[i])
                    })
                    .collect();
                Ok(Some(x))
            })
        }
        None => {
            let gamma = Gamma::new(nu / 2.0, 2.0 / nu).expect("valid gamma");
            with_constraints(space, rng, cap, "truncated student", |rng| {
                let w: f64 = gamma.sample(rng);
                let x = correlated_draw(center, h, &sigma.chol, 1.0 / w.sqrt(), rng);
                Ok(in_box(&x, space).then_some(x))
            })
        }
    }
}

/// Law of the gamma mixing variable `W` conditioned on the draw landing in
/// the box. With `W` given, coordinate `i` is `N(m_i, s_i²/W)` and lands in
/// its interval with probability `P_i(W) <= min(c_i, a_i √W)`; the product of
/// these bounds times the gamma density is piecewise a scaled gamma density.
struct MixingEnvelope {
    nu: f64,
    scale: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Per coordinate: saturated bound `c_i` and slope `a_i`.
    c: Vec<f64>,
    a: Vec<f64>,
    /// Breakpoints `B_0 = 0 < B_1 <= ... <= B_d`, plus rank of each coordinate.
    breaks: Vec<f64>,
    rank: Vec<usize>,
    /// Normalised piece probabilities.
    piece_prob: Vec<f64>,
}

impl MixingEnvelope {
    fn new(center: &[f64], h: f64, sd: &[f64], nu: f64, space: &ParameterSpace) -> Self {
        let d = center.len();
        let scale: Vec<f64> = sd.iter().map(|s| h * s).collect();
        let lo: Vec<f64> = (0..d).map(|i| space.lower()[i] - center[i]).collect();
        let hi: Vec<f64> = (0..d).map(|i| space.upper()[i] - center[i]).collect();
        let c: Vec<f64> =
            (0..d).map(|i| if lo[i] < 0.0 { 0.5 } else { 0.0 } + if hi[i] > 0.0 { 0.5 } else { 0.0 }).collect();
        let a: Vec<f64> = (0..d).map(|i| (hi[i] - lo[i]) / (scale[i] * (2.0 * std::f64::consts::PI).sqrt())).collect();
        let b: Vec<f64> = (0..d).map(|i| (c[i] / a[i]).powi(2)).collect();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| b[i].total_cmp(&b[j]));
        let mut rank = vec![0; d];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let mut breaks = vec![0.0];
        breaks.extend(order.iter().map(|&i| b[i]));
        breaks.push(f64::INFINITY);

        let half = nu / 2.0;
        let mut log_mass = Vec::with_capacity(d + 1);
        for j in 0..=d {
            let k = d - j;
            let shape = half + k as f64 / 2.0;
            let mut lc = 0.0;
            for i in 0..d {
                lc += if rank[i] < j { c[i].ln() } else { a[i].ln() };
            }
            let g_lo = gamma_cdf(shape, half, breaks[j]);
            let g_hi = gamma_cdf(shape, half, breaks[j + 1]);
            let width = g_hi - g_lo;
            let lm = if width > 0.0 {
                lc + ln_gamma(shape) - ln_gamma(half) - (k as f64 / 2.0) * half.ln() + width.ln()
            } else {
                f64::NEG_INFINITY
            };
            log_mass.push(lm);
        }
        let mx = log_mass.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = log_mass.iter().map(|l| (l - mx).exp()).collect();
        let total: f64 = w.iter().sum();
        let piece_prob = w.iter().map(|x| x / total).collect();
        MixingEnvelope { nu, scale, lo, hi, c, a, breaks, rank, piece_prob }
    }

    fn sample_mixing<R: Rng + ?Sized>(&self, rng: &mut R, cap: usize) -> Result<f64> {
        let d = self.scale.len();
        let half = self.nu / 2.0;
        for _ in 0..cap {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut j = d;
            for (idx, p) in self.piece_prob.iter().enumerate() {
                acc += p;
                if u < acc {
                    j = idx;
                    break;
                }
            }
            while self.piece_prob[j] == 0.0 {
                j -= 1;
            }
            let shape = half + (d - j) as f64 / 2.0;
            let w = truncated_gamma(shape, half, self.breaks[j], self.breaks[j + 1], rng, cap)?;
            let mut ratio = 1.0;
            for i in 0..d {
                let sw = w.sqrt() / self.scale[i];
                let p = 1.0 - std_normal_cdf(self.lo[i] * sw) - std_normal_sf(self.hi[i] * sw);
                let bound = if self.rank[i] < j { self.c[i] } else { self.a[i] * w.sqrt() };
                ratio *= (p / bound).min(1.0);
            }
            if rng.random::<f64>() < ratio {
                return Ok(w);
            }
        }
        Err(Error::RejectionCap { what: "student mixing variable".into(), attempts: cap })
    }
}

fn gamma_cdf(shape: f64, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        gamma_lr(shape, rate * x)
    }
}

/// Gamma(shape, rate) restricted to `[lo, hi)`.
fn truncated_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, lo: f64, hi: f64, rng: &mut R, cap: usize) -> Result<f64> {
    let g_lo = gamma_cdf(shape, rate, lo);
    let g_hi = gamma_cdf(shape, rate, hi);
    if g_hi - g_lo > 0.05 {
        let gamma = Gamma::new(shape, 1.0 / rate).expect("valid gamma");
        for _ in 0..cap {
            let w: f64 = gamma.sample(rng);
            if w >= lo && w < hi {
                return Ok(w);
            }
        }
        return Err(Error::RejectionCap { what: "truncated gamma".into(), attempts: cap });
    }
    let law = GammaLaw::new(shape, rate).expect("valid gamma");
    let u = g_lo + rng.random::<f64>() * (g_hi - g_lo);
    let w = law.inverse_cdf(u.clamp(0.0, 1.0));
    Ok(if hi.is_finite() { w.clamp(lo, hi) } else { w.max(lo) })
}

/// Discrete kernel: each coordinate moves to `ψ_i + (2I - 1) B` with
/// `I ~ Bernoulli(1/2)` and `B ~ Binomial(span, p)`, redrawn jointly until
/// the result lies in `set`.
pub fn sample_discrete_kernel<R: Rng + ?Sized>(
    psi: &[i64],
    p: f64,
    span: u64,
    set: &DiscreteSet,
    rng: &mut R,
    cap: usize,
) -> Result<Vec<i64>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("move probability p={p} outside [0, 1]")));
    }
    if psi.len() != set.dim() {
        return Err(Error::InvalidArgument(format!(
            "discrete center has dimension {}, set has {}",
            psi.len(),
            set.dim()
        )));
    }
    if p == 0.0 || span == 0 {
        return Ok(psi.to_vec());
    }
    let binom = Binomial::new(span, p).expect("valid binomial");
    let mut out = vec![0i64; psi.len()];
    for _ in 0..cap.min(DISCRETE_QUICK_TRIES) {
        for (o, &c) in out.iter_mut().zip(psi) {
            let up = rng.random::<bool>();
            let b = binom.sample(rng) as i64;
            *o = if up { c + b } else { c - b };
        }
        if set.contains(&out) {
            return Ok(out);
        }
    }
    if cap <= DISCRETE_QUICK_TRIES {
        return Err(Error::RejectionCap { what: "discrete kernel".into(), attempts: cap });
    }
    discrete_by_enumeration(psi, p, span, set, rng)
        .ok_or_else(|| Error::RejectionCap { what: "discrete kernel".into(), attempts: cap })
}

/// Rejection attempts before the discrete kernel switches to enumeration.
const DISCRETE_QUICK_TRIES: usize = 64;

/// Same law as the rejection loop: the proposal mass of every point of the
/// set, normalised. `None` when no point carries mass.
fn discrete_by_enumeration<R: Rng + ?Sized>(
    psi: &[i64],
    p: f64,
    span: u64,
    set: &DiscreteSet,
    rng: &mut R,
) -> Option<Vec<i64>> {
    let mut pmf = vec![0.0; span as usize + 1];
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    for (b, m) in pmf.iter_mut().enumerate() {
        let b = b as u64;
        let lc = ln_gamma(span as f64 + 1.0) - ln_gamma(b as f64 + 1.0) - ln_gamma((span - b) as f64 + 1.0);
        let lpb = if b == 0 { 0.0 } else { b as f64 * lp };
        let lqb = if b == span { 0.0 } else { (span - b) as f64 * lq };
        *m = (lc + lpb + lqb).exp();
    }
    // A step of d != 0 needs the matching sign, hence the factor 1/2.
    let step = |d: i64| -> f64 {
        let a = d.unsigned_abs() as usize;
        match a {
            0 => pmf[0],
            a if a <= span as usize => 0.5 * pmf[a],
            _ => 0.0,
        }
    };
    let masses: Vec<f64> =
        set.points().iter().map(|pt| pt.iter().zip(psi).map(|(&v, &c)| step(v - c)).product()).collect();
    let total: f64 = masses.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut u = rng.random::<f64>() * total;
    for (pt, m) in set.points().iter().zip(&masses) {
        if u < *m {
            return Some(pt.clone());
        }
        u -= m;
    }
    set.points().iter().zip(&masses).rev().find(|(_, m)| **m > 0.0).map(|(pt, _)| pt.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, Streams};

    fn rng(k: u64) -> crate::rng::StreamRng {
        Streams::new(11).stream(Purpose::Other(k), 0, 0)
    }

    #[test]
    fn zero_scale_is_dirac() {
        let space = ParameterSpace::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let s = ScaleMatrix::identity(2);
        let c = [0.3, 0.7];
        let mut r = rng(0);
        assert_eq!(sample_truncated_normal(&c, 0.0, &s, &space, &mut r, 10).unwrap(), c);
        assert_eq!(sample_truncated_student(&c, 0.0, &s, 5.0, &space, &mut r, 10).unwrap(), c);
    }

    #[test]
    fn center_outside_and_degenerate_scale_rejected() {
        let space = ParameterSpace::boxed(vec![0.0], vec![1.0]).unwrap();
        let s = ScaleMatrix::identity(1);
        let mut r = rng(1);
        let err = sample_truncated_normal(&[1.5], 0.1, &s, &space, &mut r, 10).unwrap_err();
        assert!(matches!(err, Error::OutsideSpace(_)));
        assert!(ScaleMatrix::diagonal(vec![1.0, 0.0]).is_err());
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(ScaleMatrix::full(singular).is_err());
    }

    #[test]
    fn truncated_normal_tail_mass_matches_cdf() {
        // center at the lower edge: draws follow a half-normal
        let space = ParameterSpace::boxed(vec![0.0], vec![10.0]).unwrap();
        let s = ScaleMatrix::identity(1);
        let mut r = rng(2);
        let n = 200_000;
        let mut below = 0;
        for _ in 0..n {
            let x = sample_truncated_normal(&[0.0], 1.0, &s, &space, &mut r, 10).unwrap()[0];
            assert!((0.0..=10.0).contains(&x));
            if x < 1.0 {
                below += 1;
            }
        }
        let expected = 2.0 * (std_normal_cdf(1.0) - 0.5);
        let got = below as f64 / n as f64;
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((got - expected).abs() < 4.0 * se, "{got} vs {expected}");
    }

    #[test]
    fn truncated_student_matches_rejection_reference() {
        // Compare the exact sampler with naive rejection on a tight 2-d box.
        let space = ParameterSpace::boxed(vec![-0.5, -0.2], vec![1.0, 0.3]).unwrap();
        let s = ScaleMatrix::diagonal(vec![1.0, 0.25]).unwrap();
        let c = [0.1, 0.0];
        let nu = 3.0;
        let n = 100_000;
        let mut r = rng(3);
        let (mut m0, mut m1, mut q0) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let x = sample_truncated_student(&c, 1.0, &s, nu, &space, &mut r, 1000).unwrap();
            assert!(space.contains(&x));
            m0 += x[0];
            m1 += x[1];
            q0 += x[0] * x[0];
        }
        let gamma = Gamma::new(nu / 2.0, 2.0 / nu).unwrap();
        let (mut r0, mut r1, mut rq0, mut acc) = (0.0, 0.0, 0.0, 0usize);
        let mut r2 = rng(4);
        while acc < n {
            let w: f64 = gamma.sample(&mut r2);
            let z0: f64 = r2.sample(StandardNormal);
            let z1: f64 = r2.sample(StandardNormal);
            let x = [c[0] + z0 / w.sqrt(), c[1] + 0.5 * z1 / w.sqrt()];
            if space.contains(&x) {
                acc += 1;
                r0 += x[0];
                r1 += x[1];
                rq0 += x[0] * x[0];
            }
        }
        let nf = n as f64;
        assert!((m0 / nf - r0 / nf).abs() < 0.01, "{} {}", m0 / nf, r0 / nf);
        assert!((m1 / nf - r1 / nf).abs() < 0.004, "{} {}", m1 / nf, r1 / nf);
        assert!((q0 / nf - rq0 / nf).abs() < 0.01, "{} {}", q0 / nf, rq0 / nf);
    }

    #[test]
    fn correlated_scale_uses_rejection() {
        let space = ParameterSpace::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let s = ScaleMatrix::full(m).unwrap();
        assert!(!s.is_diagonal());
        let mut r = rng(5);
        for _ in 0..1000 {
            let x = sample_truncated_normal(&[0.0, 0.9], 0.5, &s, &space, &mut r, 1000).unwrap();
            assert!(space.contains(&x));
            let y = sample_truncated_student(&[0.0, 0.9], 0.5, &s, 4.0, &space, &mut r, 1000).unwrap();
            assert!(space.contains(&y));
        }
    }

    #[test]
    fn discrete_kernel_small_example() {
        let set = DiscreteSet::new(1, -1, 1, vec![vec![-1], vec![0], vec![1]]).unwrap();
        let mut r = rng(6);
        let mut counts = [0usize; 3];
        let n = 100_000;
        for _ in 0..n {
            let v = sample_discrete_kernel(&[0], 0.5, 1, &set, &mut r, 100).unwrap()[0];
            counts[(v + 1) as usize] += 1;
        }
        for (c, p) in counts.iter().zip([0.25, 0.5, 0.25]) {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() < 4.0 * se);
        }
    }

    #[test]
    fn discrete_enumeration_matches_rejection() {
        // wide span on a thin set, so most proposals fall outside
        let pts = vec![vec![0, 2], vec![1, 1], vec![2, 0], vec![3, 3], vec![1, 4]];
        let set = DiscreteSet::new(2, 0, 4, pts.clone()).unwrap();
        let n = 40_000;
        let mut r = rng(8);
        let mut a = vec![0usize; pts.len()];
        let mut b = vec![0usize; pts.len()];
        for _ in 0..n {
            let binom = Binomial::new(4, 0.6).unwrap();
            let x = loop {
                let v: Vec<i64> =
                    (0..2).map(|_| if r.random::<bool>() { 1 } else { -1 } * binom.sample(&mut r) as i64 + 1).collect();
                if set.contains(&v) {
                    break v;
                }
            };
            a[pts.iter().position(|q| *q == x).unwrap()] += 1;
            let y = discrete_by_enumeration(&[1, 1], 0.6, 4, &set, &mut r).unwrap();
            b[pts.iter().position(|q| *q == y).unwrap()] += 1;
        }
        for (x, y) in a.iter().zip(&b) {
            let (fx, fy) = (*x as f64 / n as f64, *y as f64 / n as f64);
            let se = (fx.max(fy) * (1.0 - fx.min(fy)) * 2.0 / n as f64).sqrt().max(1e-4);
            assert!((fx - fy).abs() < 5.0 * se, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn discrete_kernel_hits_cap() {
        // p = 1 forces a jump of exactly 2 which never lands in {0, 1}
        let set = DiscreteSet::new(1, 0, 2, vec![vec![0], vec![1]]).unwrap();
        let mut r = rng(7);
        let err = sample_discrete_kernel(&[1], 1.0, 2, &set, &mut r, 50).unwrap_err();
        assert!(matches!(err, Error::RejectionCap { .. }));
    }
}
