//! Subcommand bodies.

use std::path::Path;

use duality_pricer::analytic::{bachelier_binary_put, logistic_binary_put};
use duality_pricer::bench::{self, BenchFunction, BenchModel, GridSpec};
use duality_pricer::binomial::risk_neutral_prob;
use duality_pricer::csvio::{write_long_csv, LongRow};
use duality_pricer::greeks::all_greeks;
use duality_pricer::mcpricer::{convergence_report, mc_price, write_convergence_csv};
use duality_pricer::normal::norm_cdf;
use duality_pricer::pricing::{closed_form, price as price_option};
use duality_pricer::stochastic::{
    binomial_paths, euler_local_vol, gbm_exact, logistic_vol_fn, PathBatch, RngStream, TimeGrid,
};
use duality_pricer::verify::{self, format_table};
use duality_pricer::{ExerciseStyle, ModelParams, OptionKind, OptionSpec};

use crate::output::write_atomic;
use crate::scenario::{env_seed, resolve_seed, Scenario};
use crate::CliError;

fn describe(spec: &OptionSpec) -> String {
    let style = match spec.style {
        ExerciseStyle::European => "european",
        ExerciseStyle::American => "american",
    };
    let kind = match spec.kind {
        OptionKind::Call => "call",
        OptionKind::Put => "put",
    };
    format!("{style} {kind}")
}

pub fn price(config: &Path, greeks: bool) -> Result<(), CliError> {
    let sc = Scenario::load(config)?;
    let model = sc.model_params()?;
    let spec = sc.option_spec()?;
    let result = price_option(&spec, &model)?;
    println!("model      {}", model.tag());
    println!("option     {}", describe(&spec));
    println!("price      {:.7}", result.price);
    for (k, v) in &result.diagnostics {
        println!("{k:<10} {v:.7}");
    }
    if greeks {
        for (k, v) in all_greeks(&spec, &model)? {
            println!("{k:<10} {v:.7}");
        }
    }
    Ok(())
}

fn simulate_paths(
    model: &ModelParams,
    spec: &OptionSpec,
    n_paths: usize,
    steps: usize,
    rng: &RngStream,
) -> duality_pricer::Result<PathBatch> {
    let s0 = spec.spot;
    let t = spec.maturity;
    match *model {
        ModelParams::Bsm { r, sigma } => gbm_exact(s0, r, sigma, &TimeGrid::uniform(steps, t)?, n_paths, rng),
        ModelParams::Bachelier { sigma_n } => {
            euler_local_vol(s0, move |_, _| sigma_n, &TimeGrid::uniform(steps, t)?, n_paths, rng)
        }
        ModelParams::Logistic { a } => {
            let grid = TimeGrid::uniform(steps, t)?;
            let vol = logistic_vol_fn(a, grid.dt(0));
            euler_local_vol(s0, move |x, t| vol(x - s0, t), &grid, n_paths, rng)
        }
        ModelParams::Binomial { u, d, r, steps } => {
            binomial_paths(s0, u, d, risk_neutral_prob(u, d, r)?, steps, t, n_paths, rng)
        }
    }
}

pub fn simulate(config: &Path, out: &Path, seed: Option<u64>, convergence: Option<&Path>) -> Result<(), CliError> {
    let sc = Scenario::load(config)?;
    let model = sc.model_params()?;
    let spec = sc.option_spec()?;
    duality_pricer::ensure_valid(&spec, &model)?;
    let seed = resolve_seed(seed, sc.seed)?;
    let n_paths = sc.paths();
    let steps = sc.steps();
    if n_paths == 0 || steps == 0 {
        return Err(CliError::Usage("paths and steps must be positive".into()));
    }

    let batch = simulate_paths(&model, &spec, n_paths, steps, &RngStream::new(seed, 0))?;
    write_atomic(out, |w| batch.write_csv(w))?;
    println!("model      {}", model.tag());
    println!("seed       {seed}");
    println!("paths      {n_paths}");
    println!("steps      {}", batch.grid().steps());
    println!("wrote      {}", out.display());

    if spec.style == ExerciseStyle::European {
        let est = mc_price(&model, &spec, n_paths, steps, seed, false)?;
        println!("mc_price   {:.7}", est.value);
        println!("std_error  {:.7}", est.std_error);
        if let Some(c) = closed_form(&spec, &model) {
            println!("closed     {c:.7}");
        }
    }
    if let Some(path) = convergence {
        let mut counts: Vec<usize> = [64, 16, 4, 1].iter().map(|f| n_paths / f).filter(|&n| n > 0).collect();
        counts.dedup();
        let rows = convergence_report(&model, &spec, &counts, seed, steps)?;
        write_atomic(path, |w| write_convergence_csv(&rows, w))?;
        println!("wrote      {}", path.display());
    }
    Ok(())
}

fn strike_grid(k_min: f64, k_max: f64, k_steps: usize) -> Result<Vec<f64>, CliError> {
    if !(k_min.is_finite() && k_max.is_finite()) || k_min > k_max || k_steps == 0 || (k_steps == 1 && k_min != k_max) {
        return Err(CliError::Usage(format!(
            "strike grid needs finite k-min <= k-max and k-steps >= 1 (k-steps = 1 only when k-min = k-max); got {k_min}, {k_max}, {k_steps}"
        )));
    }
    if k_steps == 1 {
        return Ok(vec![k_min]);
    }
    Ok((0..k_steps).map(|i| k_min + (k_max - k_min) * i as f64 / (k_steps - 1) as f64).collect())
}

fn binary_put(model: &ModelParams, spec: &OptionSpec) -> duality_pricer::Result<Option<f64>> {
    let (k, s0, t) = (spec.strike, spec.spot, spec.maturity);
    Ok(match *model {
        ModelParams::Bachelier { sigma_n } => Some(bachelier_binary_put(k, s0, t, sigma_n)?.price),
        ModelParams::Logistic { a } => Some(logistic_binary_put(k, s0, t, a)?.price),
        ModelParams::Bsm { r, .. } => {
            let put = price_option(&OptionSpec { kind: OptionKind::Put, ..*spec }, model)?;
            let d_minus = put.diagnostic("d_minus").unwrap_or(f64::NAN);
            Some((-r * t).exp() * norm_cdf(-d_minus))
        }
        ModelParams::Binomial { .. } => None,
    })
}

pub fn compare(config: &Path, k_min: f64, k_max: f64, k_steps: usize, out: &Path) -> Result<(), CliError> {
    let sc = Scenario::load(config)?;
    sc.model_params()?;
    let base = OptionSpec { style: ExerciseStyle::European, ..sc.option_spec()? };
    let strikes = strike_grid(k_min, k_max, k_steps)?;
    let mut rows = Vec::new();
    for model in sc.available_models() {
        let tag = model.tag();
        for kind in [OptionKind::Put, OptionKind::Call] {
            let name = if kind == OptionKind::Put { "put" } else { "call" };
            for &k in &strikes {
                let spec = OptionSpec { kind, strike: k, ..base };
                let value = price_option(&spec, &model)?.price;
                rows.push(LongRow { x: k, series: format!("{tag}_{name}"), value });
            }
        }
        for &k in &strikes {
            if let Some(value) = binary_put(&model, &OptionSpec { strike: k, ..base })? {
                rows.push(LongRow { x: k, series: format!("{tag}_binary_put"), value });
            }
        }
    }
    write_atomic(out, |w| write_long_csv(&rows, w))?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

/// z from -8 to 8 in steps of 0.1.
pub fn z_grid() -> Vec<f64> {
    (0..=160).map(|i| -8.0 + i as f64 / 10.0).collect()
}

/// δ from 0.001 to 0.999 in steps of 0.001.
pub fn delta_grid() -> Vec<f64> {
    (1..=999).map(|i| i as f64 / 1000.0).collect()
}

pub fn funcs(out: &Path) -> Result<(), CliError> {
    let (zs, ds) = (z_grid(), delta_grid());
    let mut rows = Vec::new();
    for model in BenchModel::ALL {
        for function in BenchFunction::ALL {
            let xs = if function.takes_delta() { &ds } else { &zs };
            let series = format!("{}_{function}", model.as_str().to_lowercase());
            rows.extend(xs.iter().map(|&x| LongRow {
                x,
                series: series.clone(),
                value: bench::evaluate(function, model, x),
            }));
        }
    }
    write_atomic(out, |w| write_long_csv(&rows, w))?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

pub fn verify(
    checks: Option<Vec<String>>,
    out: Option<&Path>,
    seed: Option<u64>,
    reseed: bool,
) -> Result<(), CliError> {
    let seed = if reseed {
        rand::random::<u64>()
    } else {
        match seed {
            Some(s) => s,
            None => env_seed()?.unwrap_or(verify::DEFAULT_SEED),
        }
    };
    let results = verify::run_suite_seeded(checks.as_deref(), seed)?;
    print!("{}", format_table(&results));
    if let Some(path) = out {
        write_atomic(path, |w| verify::write_report_csv(&results, w))?;
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    if reseed {
        println!("base seed {seed} (fresh draw; failures are reported, not asserted)");
        return Ok(());
    }
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}

pub fn bench(n_evals: usize, reps: usize, out: Option<&Path>) -> Result<(), CliError> {
    let report = bench::run_bench(n_evals, &GridSpec::default(), reps)?;
    print!("{}", bench::format_table(&report));
    if let Some(path) = out {
        write_atomic(path, |w| bench::write_csv(&report, w))?;
    }
    Ok(())
}
