use serde::Serialize;

/// Numerical thresholds used by the float backend. The rational backend
/// ignores all of them and decides every comparison exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank decisions. `None` means
    /// `max(rows, cols) * f64::EPSILON`.
    pub rank: Option<f64>,
    /// Scale factor of the Penrose certificate bound
    /// `cert * (1 + |M|_F) * (1 + |X|_F)`.
    pub cert: f64,
    /// Relative tolerance for matrix and vector equality.
    pub eq: f64,
    /// Relative tolerance for range-inclusion residuals.
    pub incl: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: None,
            cert: 1e-10,
            eq: 1e-9,
            incl: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn rank_cutoff(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        let rel = self
            .rank
            .unwrap_or(rows.max(cols) as f64 * f64::EPSILON);
        rel * sigma_max
    }

    pub fn cert_bound(&self, m_norm: f64, x_norm: f64) -> f64 {
        self.cert * (1.0 + m_norm) * (1.0 + x_norm)
    }

    /// Threshold for `|X - Y|` when `Y` has norm `reference`.
    pub fn eq_bound(&self, reference: f64) -> f64 {
        self.eq * (1.0 + reference)
    }

    pub fn incl_bound(&self, numerator_norm: f64) -> f64 {
        self.incl * numerator_norm.max(1.0)
    }
}
