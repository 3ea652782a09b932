//! Natural cubic spline basis on `[0, 24]` used for daily periodic means.

use crate::error::{Error, Result};

/// Cardinal natural cubic splines `b_1..b_p` on knots `κ_0 = 0 < … < κ_p = 24`:
/// `b_j` interpolates `δ_{ij}` at `κ_i` and has zero second derivative at
/// both ends, so every basis function vanishes at `0`.
#[derive(Debug, Clone)]
pub struct SplineBasis {
    knots: Vec<f64>,
    /// Second derivatives at the knots, one row per basis function.
    second: Vec<Vec<f64>>,
}

impl SplineBasis {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidArgument("spline basis needs at least two knots".into()));
        }
        if knots[0] != 0.0 || *knots.last().expect("non-empty") != 24.0 {
            return Err(Error::InvalidArgument("knots must start at 0 and end at 24".into()));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("knots must be strictly increasing".into()));
        }
        let p = knots.len() - 1;
        let second = (1..=p)
            .map(|j| {
                let values: Vec<f64> = (0..=p).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
                natural_second_derivatives(&knots, &values)
            })
            .collect();
        Ok(SplineBasis { knots, second })
    }

    /// Equally spaced knots `{0, 24/p, …, 24}`.
    pub fn uniform(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("spline dimension p must be >= 1".into()));
        }
        Self::new((0..=p).map(|i| 24.0 * i as f64 / p as f64).collect())
    }

    pub fn dim(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn locate(&self, s: f64) -> Result<usize> {
        if !(0.0..=24.0).contains(&s) {
            return Err(Error::InvalidArgument(format!("spline argument {s} outside [0, 24]")));
        }
        let p = self.dim();
        Ok((0..p).find(|&i| s <= self.knots[i + 1]).unwrap_or(p - 1))
    }

    /// `(b_1(s), …, b_p(s))`.
    pub fn eval(&self, s: f64) -> Result<Vec<f64>> {
        let i = self.locate(s)?;
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let a = (x1 - s) / h;
        let b = (s - x0) / h;
        Ok((0..self.dim())
            .map(|j| {
                let y0 = if i == j + 1 { 1.0 } else { 0.0 };
                let y1 = if i + 1 == j + 1 { 1.0 } else { 0.0 };
                let (m0, m1) = (self.second[j][i], self.second[j][i + 1]);
                a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
            })
            .collect())
    }

    /// Second derivatives `(b_1''(s), …, b_p''(s))`.
    pub fn second_derivative(&self, s: f64) -> Result<Vec<f64>> {
        let i = self.locate(s)?;
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let a = (x1 - s) / h;
        let b = (s - x0) / h;
        Ok((0..self.dim()).map(|j| a * self.second[j][i] + b * self.second[j][i + 1]).collect())
    }
}

/// Evaluates the natural cubic basis on `knots` at `s`.
pub fn natural_cubic_basis(s: f64, knots: &[f64]) -> Result<Vec<f64>> {
    SplineBasis::new(knots.to_vec())?.eval(s)
}

/// Natural spline second derivatives through `(x_i, y_i)` (tridiagonal solve).
fn natural_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    let k = n - 2;
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    let mut lower = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for r in 0..k {
        let i = r + 1;
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        lower[r] = h0;
        diag[r] = 2.0 * (h0 + h1);
        upper[r] = h1;
        rhs[r] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for r in 1..k {
        let w = lower[r] / diag[r - 1];
        diag[r] -= w * upper[r - 1];
        rhs[r] -= w * rhs[r - 1];
    }
    let mut sol = vec![0.0; k];
    sol[k - 1] = rhs[k - 1] / diag[k - 1];
    for r in (0..k - 1).rev() {
        sol[r] = (rhs[r] - upper[r] * sol[r + 1]) / diag[r];
    }
    m[1..=k].copy_from_slice(&sol);
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_knot_interval_is_linear() {
        let b = SplineBasis::uniform(1).unwrap();
        assert!((b.eval(6.0).unwrap()[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn interpolation_and_boundary_conditions() {
        for p in 2..=4 {
            let b = SplineBasis::uniform(p).unwrap();
            for (i, &k) in b.knots().iter().enumerate() {
                let v = b.eval(k).unwrap();
                for (j, vj) in v.iter().enumerate() {
                    let want = if i == j + 1 { 1.0 } else { 0.0 };
                    assert!((vj - want).abs() < 1e-12);
                }
            }
            for d in b.second_derivative(24.0 - 1e-9).unwrap() {
                assert!(d.abs() < 1e-4);
            }
            for d in b.second_derivative(0.0).unwrap() {
                assert!(d.abs() < 1e-12);
            }
        }
        assert!(natural_cubic_basis(25.0, &[0.0, 12.0, 24.0]).is_err());
        assert!(natural_cubic_basis(-0.1, &[0.0, 12.0, 24.0]).is_err());
    }

    #[test]
    fn first_derivative_is_continuous_at_knots() {
        let b = SplineBasis::uniform(3).unwrap();
        let eps = 1e-6;
        for &k in &b.knots()[1..3] {
            let l = b.eval(k - eps).unwrap();
            let c = b.eval(k).unwrap();
            let r = b.eval(k + eps).unwrap();
            for j in 0..3 {
                let dl = (c[j] - l[j]) / eps;
                let dr = (r[j] - c[j]) / eps;
                assert!((dl - dr).abs() < 1e-4);
            }
        }
    }
}
