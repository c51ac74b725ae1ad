//! Sample-path generators. Path `p` of a batch always draws from stream
//! `stream_offset + p`, so any contiguous block of paths can be produced
//! independently and the batch is identical however the work is split.

use std::io::{Read, Write};

use rayon::prelude::*;

use super::grid::TimeGrid;
use super::rng::{RngStream, StreamRng};
use crate::analytic::eta_z;
use crate::csvio::{fmt_f64, parse_f64};
use crate::error::{PricingError, Result};

/// Matrix of simulated paths (row per path) on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBatch {
    grid: TimeGrid,
    values: Vec<f64>,
    n_paths: usize,
    seed: u64,
    stream_offset: u64,
}

impl PathBatch {
    fn generate<F>(grid: TimeGrid, n_paths: usize, rng: &RngStream, fill: F) -> Result<Self>
    where
        F: Fn(&TimeGrid, &mut StreamRng, &mut [f64]) -> Result<()> + Sync,
    {
        let width = grid.len();
        let mut values = vec![0.0; n_paths * width];
        values.par_chunks_mut(width).enumerate().try_for_each(|(p, row)| {
            let mut g = rng.offset(p as u64).generator();
            fill(&grid, &mut g, row)
        })?;
        Ok(Self { grid, values, n_paths, seed: rng.seed, stream_offset: rng.stream_id })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_offset(&self) -> u64 {
        self.stream_offset
    }

    pub fn path(&self, p: usize) -> &[f64] {
        let w = self.grid.len();
        &self.values[p * w..(p + 1) * w]
    }

    pub fn paths(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.grid.len())
    }

    /// Values at the last grid time, one per path.
    pub fn terminal(&self) -> impl Iterator<Item = f64> + '_ {
        self.paths().map(|p| p[p.len() - 1])
    }

    /// Values at grid index `i` across paths.
    pub fn column(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        self.paths().map(move |p| p[i])
    }

    /// Writes `path_id,step,t,value`, one row per (path, step), 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["path_id", "step", "t", "value"])?;
        for (p, path) in self.paths().enumerate() {
            for (i, (&t, &v)) in self.grid.times().iter().zip(path).enumerate() {
                w.write_record([p.to_string(), i.to_string(), fmt_f64(t), fmt_f64(v)])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a batch written by [`PathBatch::write_csv`]. Seed metadata is not
    /// part of the file and comes back as zero.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != ["path_id", "step", "t", "value"] {
            return Err(PricingError::domain(format!("unexpected path CSV header {header:?}")));
        }
        let mut rows: Vec<(usize, usize, f64, f64)> = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let p = field(0).parse().map_err(|_| PricingError::domain("bad path_id"))?;
            let s = field(1).parse().map_err(|_| PricingError::domain("bad step"))?;
            rows.push((p, s, parse_f64(field(2))?, parse_f64(field(3))?));
        }
        let n_paths = rows.iter().map(|r| r.0 + 1).max().unwrap_or(0);
        let times: Vec<f64> = rows.iter().filter(|r| r.0 == 0).map(|r| r.2).collect();
        let grid = TimeGrid::from_times(times)?;
        let width = grid.len();
        if rows.len() != n_paths * width {
            return Err(PricingError::DimensionMismatch { expected: n_paths * width, got: rows.len() });
        }
        let mut values = vec![f64::NAN; n_paths * width];
        for (p, s, _, v) in rows {
            if s >= width {
                return Err(PricingError::domain(format!("step {s} beyond grid")));
            }
            values[p * width + s] = v;
        }
        Ok(Self { grid, values, n_paths, seed: 0, stream_offset: 0 })
    }
}

/// Brownian motion started at 0 with independent N(0, dt) increments.
pub fn sample_brownian(grid: &TimeGrid, n_paths: usize, rng: &RngStream) -> PathBatch {
    PathBatch::generate(grid.clone(), n_paths, rng, |g, r, row| {
        brownian_fill(g, r, row);
        Ok(())
    })
    .expect("brownian fill is infallible")
}

pub(crate) fn brownian_fill(grid: &TimeGrid, rng: &mut StreamRng, row: &mut [f64]) {
    row[0] = 0.0;
    let mut w = 0.0;
    for i in 0..grid.steps() {
        w += grid.dt(i).sqrt() * rng.normal();
        row[i + 1] = w;
    }
}

/// Symmetric ±1 random walk over `steps` moves on `[0, horizon]`, scaled by
/// sqrt(horizon / steps) so the terminal variance is `horizon`. For a unit
/// horizon this is the classical 1/sqrt(n) scaling.
pub fn scaled_random_walk(steps: usize, horizon: f64, n_paths: usize, rng: &RngStream) -> Result<PathBatch> {
    let grid = TimeGrid::uniform(steps, horizon)?;
    let scale = (horizon / steps as f64).sqrt();
    PathBatch::generate(grid, n_paths, rng, move |g, r, row| {
        let mut m = 0.0;
        row[0] = 0.0;
        for v in row.iter_mut().skip(1).take(g.steps()) {
            m += r.sign();
            *v = m * scale;
        }
        Ok(())
    })
}

/// Geometric Brownian motion sampled exactly: s0 exp((mu - sigma^2/2) t + sigma W_t).
pub fn gbm_exact(s0: f64, mu: f64, sigma: f64, grid: &TimeGrid, n_paths: usize, rng: &RngStream) -> Result<PathBatch> {
    if !(s0 > 0.0 && sigma > 0.0) || !s0.is_finite() || !sigma.is_finite() || !mu.is_finite() {
        return Err(PricingError::domain(format!("gbm needs s0 > 0 and sigma > 0 (s0={s0}, sigma={sigma}, mu={mu})")));
    }
    let drift = mu - 0.5 * sigma * sigma;
    PathBatch::generate(grid.clone(), n_paths, rng, move |g, r, row| {
        brownian_fill(g, r, row);
        for (v, &t) in row.iter_mut().zip(g.times()) {
            *v = s0 * (drift * t + sigma * *v).exp();
        }
        Ok(())
    })
}

/// Stock paths on a recombining lattice: each of `steps` periods multiplies by
/// `up` with probability `prob_up` and by `down` otherwise.
#[allow(clippy::too_many_arguments)]
pub fn binomial_paths(
    s0: f64,
    up: f64,
    down: f64,
    prob_up: f64,
    steps: usize,
    horizon: f64,
    n_paths: usize,
    rng: &RngStream,
) -> Result<PathBatch> {
    if !(up > down && down > 0.0 && (0.0..=1.0).contains(&prob_up) && s0.is_finite()) {
        return Err(PricingError::domain(format!(
            "lattice paths need up > down > 0 and prob_up in [0, 1] (up={up}, down={down}, prob_up={prob_up})"
        )));
    }
    let grid = TimeGrid::uniform(steps, horizon)?;
    PathBatch::generate(grid, n_paths, rng, move |_, r, row| {
        row[0] = s0;
        for i in 1..row.len() {
            row[i] = row[i - 1] * if r.uniform() < prob_up { up } else { down };
        }
        Ok(())
    })
}

/// Euler-Maruyama walk of dX = vol(X, t) dW with left-point evaluation, fed by
/// `normals`. Returns the terminal value; `visit` sees every state.
#[inline]
pub(crate) fn euler_walk<V, N, S>(x0: f64, vol_fn: &V, grid: &TimeGrid, mut normals: N, mut visit: S) -> Result<f64>
where
    V: Fn(f64, f64) -> f64,
    N: FnMut() -> f64,
    S: FnMut(usize, f64),
{
    let times = grid.times();
    let mut x = x0;
    visit(0, x);
    for i in 0..grid.steps() {
        let t = times[i];
        let vol = vol_fn(x, t);
        if !vol.is_finite() {
            return Err(PricingError::numeric(format!("volatility is {vol} at x={x}, t={t}")));
        }
        x += vol * (times[i + 1] - t).sqrt() * normals();
        visit(i + 1, x);
    }
    Ok(x)
}

/// Euler-Maruyama paths of the driftless local-volatility SDE dX = vol(X, t) dW.
pub fn euler_local_vol<V>(x0: f64, vol_fn: V, grid: &TimeGrid, n_paths: usize, rng: &RngStream) -> Result<PathBatch>
where
    V: Fn(f64, f64) -> f64 + Sync,
{
    PathBatch::generate(grid.clone(), n_paths, rng, |g, r, row| {
        euler_walk(x0, &vol_fn, g, || r.normal(), |i, x| row[i] = x).map(|_| ())
    })
}

/// Local volatility of the logistic excess price for Euler stepping.
///
/// At t = 0 the standardized variable x / b(t) is 0/0; the scale is floored
/// at b(first_step), which only touches the first step where x = 0.
pub fn logistic_vol_fn(a: f64, first_step: f64) -> impl Fn(f64, f64) -> f64 + Sync + Copy {
    let floor = a * first_step.sqrt();
    move |x, t| a * eta_z(x / (a * t.sqrt()).max(floor))
}

/// Brownian bridges pinned at `start_value` at t = 0 and `end_value` at the horizon.
pub fn brownian_bridge(
    grid: &TimeGrid,
    start_value: f64,
    end_value: f64,
    n_paths: usize,
    rng: &RngStream,
) -> PathBatch {
    let horizon = grid.horizon();
    PathBatch::generate(grid.clone(), n_paths, rng, move |g, r, row| {
        brownian_fill(g, r, row);
        let w_end = row[row.len() - 1];
        for (v, &t) in row.iter_mut().zip(g.times()) {
            let frac = t / horizon;
            *v = start_value + (*v - frac * w_end) + frac * (end_value - start_value);
        }
        row[0] = start_value;
        let last = row.len() - 1;
        row[last] = end_value;
        Ok(())
    })
    .expect("bridge fill is infallible")
}
