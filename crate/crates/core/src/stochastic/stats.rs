//! Pathwise statistics: quadratic variation, Itô sums, stochastic exponentials
//! and the reflection-principle first-passage estimate.

use rayon::prelude::*;

use super::grid::TimeGrid;
use super::rng::RngStream;
use crate::error::{PricingError, Result};
use crate::normal::norm_cdf;

/// Sum of squared increments along a path; 0 for fewer than two points.
pub fn quadratic_variation(path: &[f64]) -> f64 {
    path.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum()
}

fn left_points<'a>(integrand: &'a [f64], path: &[f64]) -> Result<&'a [f64]> {
    let n = path.len().saturating_sub(1);
    match integrand.len() {
        l if l == n => Ok(integrand),
        l if l == n + 1 => Ok(&integrand[..n]),
        l => Err(PricingError::DimensionMismatch { expected: path.len(), got: l }),
    }
}

/// Left-point Itô sum Σ f(t_i) (W_{i+1} - W_i).
///
/// `integrand` may hold one value per grid point (the last is unused) or one per interval.
pub fn ito_sum(integrand: &[f64], path: &[f64]) -> Result<f64> {
    let f = left_points(integrand, path)?;
    Ok(f.iter().zip(path.windows(2)).map(|(fi, w)| fi * (w[1] - w[0])).sum())
}

/// Stochastic exponential exp(-Σ θ_i ΔW_i - ½ Σ θ_i² Δt_i), the Girsanov density
/// that turns W + ∫θ dt into a Brownian motion.
pub fn stochastic_exponential(theta: &[f64], path: &[f64], grid: &TimeGrid) -> Result<f64> {
    if path.len() != grid.len() {
        return Err(PricingError::DimensionMismatch { expected: grid.len(), got: path.len() });
    }
    let th = left_points(theta, path)?;
    let mut stoch = 0.0;
    let mut quad = 0.0;
    for (i, (&t, w)) in th.iter().zip(path.windows(2)).enumerate() {
        stoch += t * (w[1] - w[0]);
        quad += t * t * grid.dt(i);
    }
    Ok((-stoch - 0.5 * quad).exp())
}

/// Monte-Carlo and closed-form sides of the reflection equality
/// P(τ_m ≤ t, W_t ≤ w) = 1 - N((2m - w)/√t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionEstimate {
    pub lhs: f64,
    pub rhs: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub steps: usize,
}

/// Estimates the joint first-passage probability with discrete monitoring of
/// the level on a uniform grid. Discrete monitoring misses crossings between
/// grid points, so `lhs` is biased low by O(√Δt).
pub fn reflection_probability(
    m: f64,
    w: f64,
    t: f64,
    n_paths: usize,
    steps: usize,
    rng: &RngStream,
) -> Result<ReflectionEstimate> {
    if !(m > 0.0 && w <= m && t > 0.0) || !w.is_finite() || !t.is_finite() || !m.is_finite() {
        return Err(PricingError::domain(format!("reflection needs m > 0, w <= m, t > 0 (m={m}, w={w}, t={t})")));
    }
    if n_paths == 0 || steps == 0 {
        return Err(PricingError::domain("reflection needs at least one path and one step"));
    }
    let sd = (t / steps as f64).sqrt();
    let hits: usize = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut g = rng.offset(p as u64).generator();
            let mut x = 0.0;
            let mut crossed = false;
            for _ in 0..steps {
                x += sd * g.normal();
                crossed |= x >= m;
            }
            usize::from(crossed && x <= w)
        })
        .sum();
    let lhs = hits as f64 / n_paths as f64;
    Ok(ReflectionEstimate {
        lhs,
        rhs: 1.0 - norm_cdf((2.0 * m - w) / t.sqrt()),
        std_error: (lhs * (1.0 - lhs) / n_paths as f64).sqrt(),
        n_paths,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::sample_brownian;

    #[test]
    fn qv_of_smooth_and_flat_paths() {
        assert_eq!(quadratic_variation(&[2.0; 50]), 0.0);
        for n in [10usize, 100, 1000] {
            let c = 3.0;
            let path: Vec<f64> = (0..=n).map(|i| c * i as f64 / n as f64).collect();
            let qv = quadratic_variation(&path);
            assert!((qv - c * c / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn qv_of_brownian_path() {
        let g = TimeGrid::uniform(1_000_000, 1.0).unwrap();
        let b = sample_brownian(&g, 1, &RngStream::new(12, 0));
        let qv = quadratic_variation(b.path(0));
        assert!((0.99..=1.01).contains(&qv), "{qv}");
    }

    #[test]
    fn unit_integrand_telescopes() {
        let g = TimeGrid::uniform(50, 1.0).unwrap();
        let b = sample_brownian(&g, 1, &RngStream::new(1, 0));
        let p = b.path(0);
        let s = ito_sum(&vec![1.0; p.len()], p).unwrap();
        assert!((s - p[50]).abs() < 1e-12);
        assert!(ito_sum(&[1.0; 3], p).is_err());
    }

    #[test]
    fn ito_identity_for_w_dw() {
        // RMS of Σ W dW - (W_T²/2 - T/2) is sqrt(T²/(2n)) ~ 0.007 at n = 10^4
        let n = 10_000;
        let g = TimeGrid::uniform(n, 1.0).unwrap();
        let b = sample_brownian(&g, 200, &RngStream::new(5, 0));
        let ms: f64 = b
            .paths()
            .map(|p| {
                let s = ito_sum(p, p).unwrap();
                (s - (0.5 * p[n] * p[n] - 0.5)).powi(2)
            })
            .sum::<f64>()
            / 200.0;
        assert!(ms.sqrt() < 0.012, "{}", ms.sqrt());
    }

    #[test]
    fn zero_theta_exponential_is_one() {
        let g = TimeGrid::uniform(10, 1.0).unwrap();
        let b = sample_brownian(&g, 1, &RngStream::new(1, 0));
        assert_eq!(stochastic_exponential(&[0.0; 11], b.path(0), &g).unwrap(), 1.0);
    }

    #[test]
    fn reflection_closed_form_and_short_horizon() {
        let r = reflection_probability(1.0, 0.5, 1.0, 10, 10, &RngStream::new(1, 0)).unwrap();
        assert!((r.rhs - 0.066_807_201_268_858_07).abs() < 1e-15);
        let r = reflection_probability(1.0, 0.5, 1e-4, 2000, 20, &RngStream::new(1, 0)).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.rhs < 1e-100);
        assert!(reflection_probability(-1.0, 0.0, 1.0, 1, 1, &RngStream::new(1, 0)).is_err());
        assert!(reflection_probability(1.0, 2.0, 1.0, 1, 1, &RngStream::new(1, 0)).is_err());
    }

    #[test]
    fn reflection_at_the_level() {
        let (m, t) = (0.8, 1.0);
        let r = reflection_probability(m, m, t, 40_000, 400, &RngStream::new(6, 0)).unwrap();
        let diff = r.rhs - r.lhs;
        assert!(diff >= -3.0 * r.std_error && diff <= 0.5 * (t / 400.0f64).sqrt(), "{r:?}");
    }
}
