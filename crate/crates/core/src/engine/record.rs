/// One recorded time step (or one pass for iterated filtering).
#[derive(Debug, Clone, PartialEq)]
pub struct RecordRow {
    pub t: usize,
    /// `θ̂_t = Σ W θ`.
    pub theta_hat: Vec<f64>,
    /// `θ̂_t` projected onto the parameter space.
    pub theta_proj: Vec<f64>,
    /// Weighted mean of the state summaries.
    pub state_mean: Vec<f64>,
    pub ess: f64,
    pub resampled: bool,
    /// Whether the artificial kernel was applied.
    pub moved: bool,
    /// `log p̂(y_t | y_{1:t-1})`, or the sum over the pass.
    pub log_increment: f64,
}

/// Output of a filtering run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunRecord {
    pub rows: Vec<RecordRow>,
    /// Number of steps at which the kernel was applied.
    pub kernel_applications: usize,
    /// True parameter, when known (simulation studies).
    pub theta_star: Option<Vec<f64>>,
}

impl RunRecord {
    pub fn last(&self) -> Option<&RecordRow> {
        self.rows.last()
    }

    /// Final `θ̂`.
    pub fn theta_hat(&self) -> Option<&[f64]> {
        self.last().map(|r| r.theta_hat.as_slice())
    }

    /// Final projected estimate.
    pub fn theta_proj(&self) -> Option<&[f64]> {
        self.last().map(|r| r.theta_proj.as_slice())
    }

    /// Sum of the log-likelihood increments.
    pub fn log_likelihood(&self) -> f64 {
        self.rows.iter().map(|r| r.log_increment).sum()
    }

    pub fn resample_count(&self) -> usize {
        self.rows.iter().filter(|r| r.resampled).count()
    }

    /// Row recorded at time `t`.
    pub fn at(&self, t: usize) -> Option<&RecordRow> {
        self.rows.iter().find(|r| r.t == t)
    }
}
