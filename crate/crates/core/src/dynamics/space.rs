use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};

/// Half-space `coeffs · x <= bound` on the continuous coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

impl LinearConstraint {
    fn value(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum()
    }
}

/// Finite set of integer points inside `{lo, ..., hi}^dim`.
#[derive(Debug, Clone)]
pub struct DiscreteSet {
    dim: usize,
    lo: i64,
    hi: i64,
    points: Vec<Vec<i64>>,
    lookup: HashSet<Vec<i64>>,
}

impl DiscreteSet {
    pub fn new(dim: usize, lo: i64, hi: i64, points: Vec<Vec<i64>>) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidSpace(format!("discrete bounds a={lo} > b={hi}")));
        }
        if points.is_empty() {
            return Err(Error::InvalidSpace("discrete set is empty".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::InvalidSpace(format!(
                    "discrete point {p:?} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|&v| v < lo || v > hi) {
                return Err(Error::InvalidSpace(format!("discrete point {p:?} outside {{{lo},...,{hi}}}^{dim}")));
            }
        }
        let mut points = points;
        points.sort();
        points.dedup();
        let lookup = points.iter().cloned().collect();
        Ok(DiscreteSet { dim, lo, hi, points, lookup })
    }

    /// The full grid `{lo, ..., hi}^dim`.
    pub fn grid(dim: usize, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidSpace(format!("discrete bounds a={lo} > b={hi}")));
        }
        let mut points = vec![vec![]];
        for _ in 0..dim {
            points = points
                .into_iter()
                .flat_map(|p| {
                    (lo..=hi).map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        Self::new(dim, lo, hi, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    /// Points in lexicographic order.
    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.lookup.contains(p)
    }

    /// Nearest point in Euclidean distance; ties go to the lexicographically
    /// smallest point.
    pub fn nearest(&self, v: &[f64]) -> &[i64] {
        let mut best = &self.points[0];
        let mut best_d = f64::INFINITY;
        for p in &self.points {
            let d: f64 = p.iter().zip(v).map(|(&a, &b)| (a as f64 - b).powi(2)).sum();
            if d < best_d {
                best_d = d;
                best = p;
            }
        }
        best
    }
}

/// Parameter space: a continuous box (optionally cut by linear constraints)
/// times an optional finite discrete set. Parameter vectors list continuous
/// coordinates first, then the discrete ones stored as integral `f64`.
#[derive(Debug, Clone)]
pub struct ParameterSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
    constraints: Vec<LinearConstraint>,
    discrete: Option<DiscreteSet>,
}

impl ParameterSpace {
    /// Box `[lower_i, upper_i]`; requires `lower_i < upper_i`.
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidSpace(format!(
                "lower has {} coordinates, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite()) {
                return Err(Error::InvalidSpace(format!("coordinate {i}: bounds must be finite")));
            }
            if l >= u {
                return Err(Error::InvalidSpace(format!("coordinate {i}: lower {l} must be below upper {u}")));
            }
        }
        Ok(ParameterSpace { lower, upper, constraints: vec![], discrete: None })
    }

    /// Purely discrete space.
    pub fn discrete(set: DiscreteSet) -> Self {
        ParameterSpace { lower: vec![], upper: vec![], constraints: vec![], discrete: Some(set) }
    }

    pub fn with_discrete(mut self, set: DiscreteSet) -> Self {
        self.discrete = Some(set);
        self
    }

    /// Adds `coeffs · x <= bound` on the continuous coordinates.
    pub fn with_constraint(mut self, coeffs: Vec<f64>, bound: f64) -> Result<Self> {
        if coeffs.len() != self.lower.len() {
            return Err(Error::InvalidSpace(format!(
                "constraint has {} coefficients, box has {} coordinates",
                coeffs.len(),
                self.lower.len()
            )));
        }
        self.constraints.push(LinearConstraint { coeffs, bound });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.continuous_dim() + self.discrete_dim()
    }

    pub fn continuous_dim(&self) -> usize {
        self.lower.len()
    }

    pub fn discrete_dim(&self) -> usize {
        self.discrete.as_ref().map_or(0, |s| s.dim())
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn discrete_set(&self) -> Option<&DiscreteSet> {
        self.discrete.as_ref()
    }

    pub(crate) fn satisfies_constraints(&self, x: &[f64]) -> bool {
        self.constraints.iter().all(|c| c.value(x) <= c.bound + 1e-12)
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        if theta.len() != self.dim() {
            return false;
        }
        let (cont, disc) = theta.split_at(self.continuous_dim());
        let in_box = cont.iter().zip(self.lower.iter().zip(&self.upper)).all(|(v, (l, u))| v >= l && v <= u);
        if !in_box || !self.satisfies_constraints(cont) {
            return false;
        }
        match &self.discrete {
            None => true,
            Some(set) => {
                if disc.iter().any(|v| v.fract() != 0.0) {
                    return false;
                }
                let p: Vec<i64> = disc.iter().map(|&v| v as i64).collect();
                set.contains(&p)
            }
        }
    }

    /// Nearest point of the space: the continuous part is projected onto the
    /// box (and constraints), the discrete part snapped to the nearest set
    /// point.
    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::InvalidArgument(format!("point has dimension {}, space has {}", v.len(), self.dim())));
        }
        let (cont, disc) = v.split_at(self.continuous_dim());
        let mut out = self.project_continuous(cont);
        if let Some(set) = &self.discrete {
            out.extend(set.nearest(disc).iter().map(|&x| x as f64));
        }
        Ok(out)
    }

    fn clamp(&self, x: &mut [f64]) {
        for (v, (l, u)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*l, *u);
        }
    }

    fn project_continuous(&self, v: &[f64]) -> Vec<f64> {
        let mut x = v.to_vec();
        if self.constraints.is_empty() {
            self.clamp(&mut x);
            return x;
        }
        // Dykstra's alternating projections onto the box and each half-space.
        let sets = 1 + self.constraints.len();
        let d = x.len();
        let mut incr = vec![vec![0.0; d]; sets];
        for _ in 0..10_000 {
            let before = x.clone();
            for (k, inc) in incr.iter_mut().enumerate() {
                let y: Vec<f64> = x.iter().zip(inc.iter()).map(|(a, b)| a + b).collect();
                let mut p = y.clone();
                if k == 0 {
                    self.clamp(&mut p);
                } else {
                    let c = &self.constraints[k - 1];
                    let excess = c.value(&p) - c.bound;
                    let norm2: f64 = c.coeffs.iter().map(|a| a * a).sum();
                    if excess > 0.0 && norm2 > 0.0 {
                        for (pi, a) in p.iter_mut().zip(&c.coeffs) {
                            *pi -= excess * a / norm2;
                        }
                    }
                }
                for i in 0..d {
                    inc[i] = y[i] - p[i];
                }
                x = p;
            }
            let change: f64 = x.iter().zip(&before).map(|(a, b)| (a - b).abs()).sum();
            if change < 1e-15 {
                break;
            }
        }
        self.clamp(&mut x);
        x
    }

    /// Uniform draw on the space (continuous part by rejection against the
    /// constraints).
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        const CAP: usize = 1_000_000;
        let mut out = Vec::with_capacity(self.dim());
        let mut attempts = 0;
        loop {
            out.clear();
            for (l, u) in self.lower.iter().zip(&self.upper) {
                out.push(l + (u - l) * rng.random::<f64>());
            }
            if self.satisfies_constraints(&out) {
                break;
            }
            attempts += 1;
            if attempts >= CAP {
                return Err(Error::RejectionCap { what: "uniform draw on constrained box".into(), attempts });
            }
        }
        if let Some(set) = &self.discrete {
            let k = rng.random_range(0..set.points().len());
            out.extend(set.points()[k].iter().map(|&x| x as f64));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, Streams};

    #[test]
    fn box_validation_names_coordinate() {
        let err = ParameterSpace::boxed(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap_err();
        assert!(err.to_string().contains("coordinate 1"), "{err}");
        assert!(DiscreteSet::new(1, 2, 1, vec![vec![1]]).is_err());
        assert!(DiscreteSet::new(1, 0, 1, vec![vec![2]]).is_err());
    }

    #[test]
    fn projection_clamps_and_snaps() {
        let space = ParameterSpace::boxed(vec![0.0], vec![1.0])
            .unwrap()
            .with_discrete(DiscreteSet::new(1, 1, 3, vec![vec![1], vec![3]]).unwrap());
        assert_eq!(space.project(&[1.7, 1.9]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(space.project(&[-0.5, 2.1]).unwrap(), vec![0.0, 3.0]);
        // tie at 2.0: lexicographically smaller point wins
        assert_eq!(space.project(&[0.5, 2.0]).unwrap(), vec![0.5, 1.0]);
        assert!(space.contains(&[0.5, 3.0]));
        assert!(!space.contains(&[0.5, 2.0]));
        assert!(!space.contains(&[0.5, 1.5]));
    }

    #[test]
    fn constrained_projection_is_nearest_point() {
        // x + y <= 1 inside [0,1]^2: (1,1) projects to (0.5,0.5)
        let space = ParameterSpace::boxed(vec![0.0, 0.0], vec![1.0, 1.0])
            .unwrap()
            .with_constraint(vec![1.0, 1.0], 1.0)
            .unwrap();
        let p = space.project(&[1.0, 1.0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-9 && (p[1] - 0.5).abs() < 1e-9, "{p:?}");
        let p = space.project(&[2.0, 0.2]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-9 && p[1].abs() < 1e-9, "{p:?}");
        assert!(space.contains(&[0.3, 0.6]));
        assert!(!space.contains(&[0.6, 0.6]));
    }

    #[test]
    fn uniform_draws_are_inside() {
        let space = ParameterSpace::boxed(vec![0.0, 0.0], vec![1.0, 1.0])
            .unwrap()
            .with_constraint(vec![1.0, 1.0], 1.0)
            .unwrap()
            .with_discrete(DiscreteSet::grid(2, 0, 2).unwrap());
        let mut rng = Streams::new(3).stream(Purpose::Prior, 0, 0);
        for _ in 0..1000 {
            let th = space.sample_uniform(&mut rng).unwrap();
            assert!(space.contains(&th), "{th:?}");
        }
    }
}
