use crate::error::{Error, Result};

/// Uniform sampling `t_k = k t0 / intervals`, `k = 0..=intervals`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    intervals: usize,
}

impl TimeGrid {
    pub const DEFAULT_INTERVALS: usize = 200;

    pub fn new(t0: f64, intervals: usize) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::invalid(format!("end time must be positive, got {t0}")));
        }
        if intervals < 2 {
            return Err(Error::invalid(format!("need at least 2 intervals, got {intervals}")));
        }
        Ok(Self { t0, intervals })
    }

    pub fn with_default_intervals(t0: f64) -> Result<Self> {
        Self::new(t0, Self::DEFAULT_INTERVALS)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        if k == self.intervals {
            self.t0
        } else {
            k as f64 * self.t0 / self.intervals as f64
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples() {
        let g = TimeGrid::with_default_intervals(3e-6).unwrap();
        let t = g.times();
        assert_eq!(t.len(), 201);
        assert_eq!(t[0], 0.0);
        assert_eq!(t[200], 3e-6);
        assert!((t[100] - 1.5e-6).abs() < 1e-20);
        assert!(TimeGrid::new(0.0, 200).is_err());
        assert!(TimeGrid::new(1.0, 1).is_err());
    }
}
