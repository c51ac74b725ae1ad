use crate::error::{PricingError, Result};

/// Strictly increasing simulation times starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
    uniform: bool,
}

impl TimeGrid {
    /// `steps` equal intervals on `[0, horizon]`.
    pub fn uniform(steps: usize, horizon: f64) -> Result<Self> {
        if steps == 0 || !(horizon > 0.0) || !horizon.is_finite() {
            return Err(PricingError::domain(format!(
                "uniform grid needs steps >= 1 and horizon > 0 (steps={steps}, horizon={horizon})"
            )));
        }
        let dt = horizon / steps as f64;
        let mut times: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
        times[steps] = horizon;
        Ok(Self { times, uniform: true })
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times[0] != 0.0 {
            return Err(PricingError::domain("grid needs at least two times starting at 0"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(PricingError::domain("grid times must be finite and strictly increasing"));
        }
        let dt0 = times[1] - times[0];
        let uniform = times.windows(2).all(|w| ((w[1] - w[0]) - dt0).abs() <= 1e-12 * dt0.max(1.0));
        Ok(Self { times, uniform })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of intervals.
    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn dt(&self, i: usize) -> f64 {
        self.times[i + 1] - self.times[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid() {
        let g = TimeGrid::uniform(4, 2.0).unwrap();
        assert_eq!(g.times(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!(g.is_uniform());
        assert_eq!(g.steps(), 4);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TimeGrid::uniform(0, 1.0).is_err());
        assert!(TimeGrid::from_times(vec![0.0]).is_err());
        assert!(TimeGrid::from_times(vec![0.1, 0.2]).is_err());
        assert!(TimeGrid::from_times(vec![0.0, 0.5, 0.5]).is_err());
        let g = TimeGrid::from_times(vec![0.0, 0.1, 0.5]).unwrap();
        assert!(!g.is_uniform());
    }
}
