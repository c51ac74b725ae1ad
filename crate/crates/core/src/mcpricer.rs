//! Monte-Carlo pricing of European options with standard errors, optional
//! antithetic variates and convergence tables.
//!
//! BSM and Bachelier terminal prices are sampled exactly; the logistic model is
//! stepped with Euler-Maruyama; the binomial model walks its lattice with the
//! risk-neutral up probability. Path (or antithetic pair) `i` always draws from
//! stream `i` of the seed, and per-path payoffs are summed in path order, so an
//! estimate does not depend on how rayon splits the work.

use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;

use crate::csvio::{fmt_f64, fmt_opt, parse_f64, parse_opt};
use crate::error::{PricingError, Result};
use crate::pricing::closed_form;
use crate::stochastic::{euler_walk, logistic_vol_fn, RngStream, StreamRng, TimeGrid};
use crate::types::{ensure_valid, ExerciseStyle, ModelParams, OptionSpec};

/// A Monte-Carlo price with its standard error.
///
/// `std_error` is NaN when fewer than two independent samples were drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub n_steps: usize,
    pub elapsed_seconds: f64,
    pub seed: u64,
}

/// Random draws for one path; the antithetic twin negates every normal and
/// reflects every uniform.
struct Draws {
    rng: StreamRng,
    flip: bool,
}

impl Draws {
    #[inline]
    fn normal(&mut self) -> f64 {
        let z = self.rng.normal();
        if self.flip {
            -z
        } else {
            z
        }
    }

    #[inline]
    fn uniform(&mut self) -> f64 {
        let u = self.rng.uniform();
        if self.flip {
            1.0 - u
        } else {
            u
        }
    }
}

/// Discounted payoff of one simulated path under a fixed model.
enum Sampler {
    Bsm { drift: f64, vol: f64, disc: f64 },
    Bachelier { vol: f64 },
    Logistic { a: f64, grid: TimeGrid },
    Binomial { up: f64, down: f64, prob_up: f64, steps: usize, disc: f64 },
}

impl Sampler {
    fn new(model: &ModelParams, spec: &OptionSpec, n_steps: usize) -> Result<Self> {
        let t = spec.maturity;
        Ok(match *model {
            ModelParams::Bsm { r, sigma } => {
                Sampler::Bsm { drift: (r - 0.5 * sigma * sigma) * t, vol: sigma * t.sqrt(), disc: (-r * t).exp() }
            }
            ModelParams::Bachelier { sigma_n } => Sampler::Bachelier { vol: sigma_n * t.sqrt() },
            ModelParams::Logistic { a } => Sampler::Logistic { a, grid: TimeGrid::uniform(n_steps, t)? },
            ModelParams::Binomial { u, d, r, steps } => Sampler::Binomial {
                up: u,
                down: d,
                prob_up: crate::binomial::risk_neutral_prob(u, d, r)?,
                steps,
                disc: (1.0 + r).powi(-(steps as i32)),
            },
        })
    }

    fn steps(&self, n_steps: usize) -> usize {
        match self {
            Sampler::Logistic { .. } => n_steps,
            Sampler::Binomial { steps, .. } => *steps,
            _ => 1,
        }
    }

    fn payoff(&self, spec: &OptionSpec, draws: &mut Draws) -> Result<f64> {
        let s0 = spec.spot;
        let value = match self {
            Sampler::Bsm { drift, vol, disc } => {
                let st = s0 * (drift + vol * draws.normal()).exp();
                disc * spec.kind.intrinsic(st, spec.strike)
            }
            Sampler::Bachelier { vol } => spec.kind.intrinsic(s0 + vol * draws.normal(), spec.strike),
            Sampler::Logistic { a, grid } => {
                let vol_fn = logistic_vol_fn(*a, grid.dt(0));
                let x = euler_walk(0.0, &vol_fn, grid, || draws.normal(), |_, _| {})?;
                spec.kind.intrinsic(s0 + x, spec.strike)
            }
            Sampler::Binomial { up, down, prob_up, steps, disc } => {
                let ups = (0..*steps).filter(|_| draws.uniform() < *prob_up).count();
                let st = s0 * up.powi(ups as i32) * down.powi((steps - ups) as i32);
                disc * spec.kind.intrinsic(st, spec.strike)
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(PricingError::numeric(format!("non-finite payoff {value}")))
        }
    }
}

fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, f64::NAN);
    }
    let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0) / n).sqrt())
}

/// Monte-Carlo price of a European option.
///
/// `n_steps` is the Euler step count for the logistic model and is ignored by
/// the exactly sampled models; the binomial walk uses the lattice's own steps.
/// With `antithetic`, `n_paths` must be even and the standard error is taken
/// over pair averages.
pub fn mc_price(
    model: &ModelParams,
    spec: &OptionSpec,
    n_paths: usize,
    n_steps: usize,
    seed: u64,
    antithetic: bool,
) -> Result<Estimate> {
    mc_price_on(model, spec, n_paths, n_steps, RngStream::new(seed, 0), antithetic)
}

/// As [`mc_price`], drawing path `i` from stream `base.stream_id + i`.
pub fn mc_price_on(
    model: &ModelParams,
    spec: &OptionSpec,
    n_paths: usize,
    n_steps: usize,
    base: RngStream,
    antithetic: bool,
) -> Result<Estimate> {
    ensure_valid(spec, model)?;
    if spec.style != ExerciseStyle::European {
        return Err(PricingError::Unsupported("Monte-Carlo pricing is European only".into()));
    }
    if n_paths == 0 {
        return Err(PricingError::domain("n_paths must be at least 1"));
    }
    if antithetic && !n_paths.is_multiple_of(2) {
        return Err(PricingError::domain(format!("antithetic sampling needs an even n_paths, got {n_paths}")));
    }
    let start = Instant::now();
    let sampler = Sampler::new(model, spec, n_steps)?;
    let n_units = if antithetic { n_paths / 2 } else { n_paths };

    let samples: Vec<f64> = (0..n_units)
        .into_par_iter()
        .map(|i| {
            let rng = base.offset(i as u64).generator();
            if antithetic {
                let plus = sampler.payoff(spec, &mut Draws { rng: rng.clone(), flip: false })?;
                let minus = sampler.payoff(spec, &mut Draws { rng, flip: true })?;
                Ok(0.5 * (plus + minus))
            } else {
                sampler.payoff(spec, &mut Draws { rng, flip: false })
            }
        })
        .collect::<Result<_>>()?;

    let (value, std_error) = mean_and_se(&samples);
    Ok(Estimate {
        value,
        std_error,
        n_paths,
        n_steps: sampler.steps(n_steps),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        seed: base.seed,
    })
}

/// Logistic Euler prices at several step counts on common random numbers.
///
/// Each path draws normals on the finest grid; coarser grids sum them in
/// blocks, so all resolutions see the same Brownian path and their differences
/// measure discretization bias rather than sampling noise. Every entry of
/// `steps` must divide the largest one.
pub fn euler_refinement(
    a: f64,
    spec: &OptionSpec,
    n_paths: usize,
    steps: &[usize],
    seed: u64,
) -> Result<Vec<Estimate>> {
    let model = ModelParams::Logistic { a };
    ensure_valid(spec, &model)?;
    if spec.style != ExerciseStyle::European || n_paths == 0 {
        return Err(PricingError::domain("refinement needs a European option and at least one path"));
    }
    let finest = steps.iter().copied().max().unwrap_or(0);
    if steps.iter().any(|&n| n == 0 || finest % n != 0) {
        return Err(PricingError::domain(format!("step counts {steps:?} must divide {finest}")));
    }
    let start = Instant::now();
    let grids = steps.iter().map(|&n| TimeGrid::uniform(n, spec.maturity)).collect::<Result<Vec<_>>>()?;
    let base = RngStream::new(seed, 0);

    let samples: Vec<Vec<f64>> = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut g = base.offset(i as u64).generator();
            let fine: Vec<f64> = (0..finest).map(|_| g.normal()).collect();
            grids
                .iter()
                .map(|grid| {
                    let m = finest / grid.steps();
                    let norm = (m as f64).sqrt().recip();
                    let mut blocks = fine.chunks(m).map(|c| c.iter().sum::<f64>() * norm);
                    let vol_fn = logistic_vol_fn(a, grid.dt(0));
                    let x = euler_walk(0.0, &vol_fn, grid, || blocks.next().unwrap_or(0.0), |_, _| {})?;
                    Ok(spec.kind.intrinsic(spec.spot + x, spec.strike))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let elapsed = start.elapsed().as_secs_f64();
    Ok(steps
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let column: Vec<f64> = samples.iter().map(|s| s[j]).collect();
            let (value, std_error) = mean_and_se(&column);
            Estimate { value, std_error, n_paths, n_steps: n, elapsed_seconds: elapsed, seed }
        })
        .collect())
}

/// One line of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n_paths: usize,
    pub estimate: f64,
    pub std_error: f64,
    /// Distance to the closed form; `None` for the binomial model.
    pub abs_error: Option<f64>,
}

/// Prices at each path count with the same seed, so larger runs extend smaller ones.
pub fn convergence_report(
    model: &ModelParams,
    spec: &OptionSpec,
    path_counts: &[usize],
    seed: u64,
    n_steps: usize,
) -> Result<Vec<ConvergenceRow>> {
    let oracle = closed_form(spec, model);
    path_counts
        .iter()
        .map(|&n| {
            let est = mc_price(model, spec, n, n_steps, seed, false)?;
            Ok(ConvergenceRow {
                n_paths: n,
                estimate: est.value,
                std_error: est.std_error,
                abs_error: oracle.map(|c| (est.value - c).abs()),
            })
        })
        .collect()
}

const CONVERGENCE_HEADER: [&str; 4] = ["n_paths", "estimate", "std_error", "abs_error"];

/// Writes `n_paths,estimate,std_error,abs_error`; undefined values are empty fields.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CONVERGENCE_HEADER)?;
    for r in rows {
        let se = Some(r.std_error).filter(|s| s.is_finite());
        w.write_record([r.n_paths.to_string(), fmt_f64(r.estimate), fmt_opt(se), fmt_opt(r.abs_error)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_convergence_csv<R: Read>(input: R) -> Result<Vec<ConvergenceRow>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(CONVERGENCE_HEADER) {
        return Err(PricingError::domain("unexpected convergence CSV header"));
    }
    r.records()
        .map(|rec| {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            Ok(ConvergenceRow {
                n_paths: field(0).parse().map_err(|_| PricingError::domain("bad n_paths"))?,
                estimate: parse_f64(field(1))?,
                std_error: parse_opt(field(2))?.unwrap_or(f64::NAN),
                abs_error: parse_opt(field(3))?,
            })
        })
        .collect()
}
