//! Acceptance criteria 1-10, run in sequence with one PASS/FAIL line each.
//!
//! Built with `harness = false` so the timed criteria never share the CPU
//! with other tests and the report always reaches the terminal.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::path::Path;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use duality_pricer::analytic::{bachelier_binary_put, bachelier_put, bsm_price, logistic_binary_put, logistic_put};
use duality_pricer::bench::{self, GridSpec};
use duality_pricer::binomial::{build_lattice, crr_params};
use duality_pricer::mcpricer::{euler_refinement, mc_price};
use duality_pricer::pricing::price;
use duality_pricer::verify::{self, CheckResult};
use duality_pricer::{ModelParams, OptionKind, OptionSpec};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{label}: got {got}, want {want} +/- {tol:e}"))
}

fn suite(names: &[&str]) -> Result<Vec<CheckResult>, String> {
    let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    verify::run_suite_seeded(Some(&names), verify::DEFAULT_SEED).map_err(|e| e.to_string())
}

fn all_pass(results: &[CheckResult]) -> Outcome {
    let summary: Vec<String> = results.iter().map(|r| format!("{}={:.3e}", r.name, r.statistic)).collect();
    let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    ensure(failed.is_empty(), || format!("failed {failed:?}; {}", summary.join(" ")))?;
    Ok(summary.join(" "))
}

fn binomial_lattice_nodes() -> Outcome {
    let params = ModelParams::Binomial { u: 1.1, d: 0.9, r: 0.0, steps: 3 };
    let lattice = build_lattice(100.0, 3.0, &params).map_err(|e| e.to_string())?;
    let want: [&[f64]; 3] = [&[90.0, 110.0], &[81.0, 99.0, 121.0], &[72.9, 89.1, 108.9, 133.1]];
    for (i, level) in want.iter().enumerate() {
        for (j, &w) in level.iter().enumerate() {
            close(&format!("node ({}, {j})", i + 1), lattice.stock_price(i + 1, j), w, 1e-10)?;
        }
    }
    let one = build_lattice(10.0, 1.0, &ModelParams::Binomial { u: 1.05, d: 0.95, r: 0.0, steps: 1 })
        .map_err(|e| e.to_string())?;
    close("one-period up", one.stock_price(1, 1), 10.5, 1e-10)?;
    close("one-period down", one.stock_price(1, 0), 9.5, 1e-10)?;
    Ok("nine three-period nodes and the one-period pair match".into())
}

/// Discounted call payoff integrated against the normal density by Simpson's rule.
fn call_by_quadrature(s0: f64, k: f64, r: f64, sigma: f64, t: f64) -> f64 {
    let (lo, hi, n) = (-12.0, 12.0, 240_000);
    let h = (hi - lo) / n as f64;
    let f = |z: f64| {
        let s = s0 * ((r - 0.5 * sigma * sigma) * t + sigma * t.sqrt() * z).exp();
        (s - k).max(0.0) * (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
    };
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        acc += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    (-r * t).exp() * acc * h / 3.0
}

fn crr_convergence() -> Outcome {
    let spec = OptionSpec::european(OptionKind::Call, 100.0, 1.0, 100.0);
    let lattice = price(&spec, &crr_params(0.2, 0.05, 1.0, 1000)).map_err(|e| e.to_string())?.price;
    let oracle = call_by_quadrature(100.0, 100.0, 0.05, 0.2, 1.0);
    let closed = bsm_price(1.0, 100.0, 100.0, 0.05, 0.2, OptionKind::Call).map_err(|e| e.to_string())?.price;
    close("closed form vs quadrature", closed, oracle, 1e-6)?;
    close("oracle", oracle, 10.4506, 1e-4)?;
    let rel = ((lattice - closed) / closed).abs();
    ensure(rel < 1e-3, || format!("lattice {lattice} vs {closed}: relative {rel:e}"))?;
    Ok(format!("lattice {lattice:.6}, closed form {closed:.6}, relative gap {rel:.2e}"))
}

fn closed_form_identities() -> Outcome {
    let e = |r: duality_pricer::Result<duality_pricer::PricingResult>| r.map(|p| p.price).map_err(|e| e.to_string());
    close("logistic ATM put", e(logistic_put(100.0, 100.0, 1.0, 1.0))?, LN_2, 1e-12)?;
    close("logistic ATM put, T = 4, a = 0.5", e(logistic_put(7.0, 7.0, 4.0, 0.5))?, LN_2, 1e-12)?;
    let b = 2.0 * 3f64.sqrt();
    close("Bachelier ATM put", e(bachelier_put(100.0, 100.0, 3.0, 2.0))?, b / (2.0 * PI).sqrt(), 1e-12)?;
    close("logistic ATM binary put", e(logistic_binary_put(100.0, 100.0, 1.0, 1.0))?, 0.5, 1e-15)?;
    close("Bachelier ATM binary put", e(bachelier_binary_put(100.0, 100.0, 1.0, 1.0))?, 0.5, 1e-15)?;
    let parity = verify::put_call_parity().map_err(|e| e.to_string())?;
    let binary = verify::binary_put_consistency().map_err(|e| e.to_string())?;
    all_pass(&[parity, binary])
}

fn monte_carlo() -> Outcome {
    let mut notes = Vec::new();
    let cases = [
        ("bsm", ModelParams::Bsm { r: 0.05, sigma: 0.2 }, OptionKind::Call, 1_000_000, 1, 0.0),
        ("bachelier", ModelParams::Bachelier { sigma_n: 1.0 }, OptionKind::Put, 1_000_000, 1, 0.0),
        ("logistic", ModelParams::Logistic { a: 1.0 }, OptionKind::Put, 200_000, 512, 5e-3),
    ];
    for (i, (label, model, kind, n_paths, steps, floor)) in cases.into_iter().enumerate() {
        let spec = OptionSpec::european(kind, 100.0, 1.0, 100.0);
        let est = mc_price(&model, &spec, n_paths, steps, 7 + i as u64, false).map_err(|e| e.to_string())?;
        let exact = price(&spec, &model).map_err(|e| e.to_string())?.price;
        let allowance = (3.0 * est.std_error).max(floor);
        close(label, est.value, exact, allowance)?;
        notes.push(format!("{label} {:.5} vs {exact:.5} (SE {:.1e})", est.value, est.std_error));
    }
    let spec = OptionSpec::european(OptionKind::Put, 0.0, 1.0, 0.0);
    let v: Vec<f64> = euler_refinement(1.0, &spec, 50_000, &[256, 512, 1024], 11)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|e| e.value)
        .collect();
    // first-order scheme: bias at 512 steps is about twice |v512 - v1024|
    let bias = 2.0 * (v[1] - v[2]).abs();
    ensure(bias < 5e-3, || format!("step-doubling bias {bias:e} from {v:?}"))?;
    ensure((v[0] - v[1]).abs() < 2.0 * 5e-3, || format!("256/512 gap from {v:?}"))?;
    notes.push(format!("bias(512) ~ {bias:.1e}"));
    Ok(notes.join("; "))
}

fn stochastic_suite() -> Outcome {
    let results = suite(&[
        "qv_check",
        "ito_isometry",
        "ito_formula_identity",
        "stoch_exp_martingale",
        "girsanov_shift",
        "reflection_equality",
    ])?;
    let qv = results[0].details["qv"];
    ensure((0.99..=1.01).contains(&qv), || format!("qv {qv}"))?;
    close("reflection rhs", results[5].details["rhs"], 0.0668, 1e-4)?;
    all_pass(&results)
}

fn dual_delta() -> Outcome {
    let results = suite(&["dual_delta_martingale"])?;
    let d: &BTreeMap<String, f64> = &results[0].details;
    for start in ["0.5", "0.9"] {
        let (lo, hi) = (d[&format!("start_{start}_min")], d[&format!("start_{start}_max")]);
        ensure(lo >= 0.0 && hi <= 1.0, || format!("start {start}: terminal range [{lo}, {hi}]"))?;
    }
    all_pass(&results)
}

fn bench_harness() -> Outcome {
    let grid = GridSpec::default();
    let report = bench::run_bench(50_000, &grid, 5).map_err(|e| e.to_string())?;
    ensure(report.rows.len() == 12 && report.totals.len() == 2, || "expected 12 rows and 2 totals".into())?;
    for (model, total) in &report.totals {
        let sum: f64 = report.rows.iter().filter(|r| r.model == *model).map(|r| r.seconds).sum();
        ensure(sum.to_bits() == total.to_bits(), || format!("{model} total {total} != {sum}"))?;
    }
    let table = bench::format_table(&report);
    ensure(table.lines().count() == 8 && table.contains("Total"), || format!("table layout:\n{table}"))?;
    let mut csv = Vec::new();
    bench::write_csv(&report, &mut csv).map_err(|e| e.to_string())?;
    let back = bench::read_csv(csv.as_slice()).map_err(|e| e.to_string())?;
    ensure(back.totals == report.totals, || "CSV totals do not round-trip".into())?;

    let ratios = bench::work_doubling(50_000, &grid, 9).map_err(|e| e.to_string())?;
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.2), hi.max(r.2)));
    let bad: Vec<String> =
        ratios.iter().filter(|r| !(1.5..=3.0).contains(&r.2)).map(|r| format!("{} {}: {:.2}", r.0, r.1, r.2)).collect();
    ensure(bad.is_empty(), || format!("doubling outside [1.5, 3]: {}", bad.join(", ")))?;
    Ok(format!("12 rows + 2 totals, doubling factors in [{lo:.2}, {hi:.2}]"))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<Output, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_duality-pricer"))
        .args(args)
        .current_dir(dir)
        .env_remove("DUALITY_PRICER_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("{args:?} exited {:?}: {}", out.status, String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out)
}

fn same_bytes(label: &str, a: &[u8], b: &[u8]) -> Result<(), String> {
    ensure(!a.is_empty() && a == b, || format!("{label} differs between runs"))
}

fn determinism() -> Outcome {
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    let config = dirs[0].path().join("scenario.json");
    std::fs::write(
        &config,
        r#"{"model": "logistic", "s0": 100, "k": 100, "T": 1, "a": 1, "option": "put", "paths": 1000, "steps": 64}"#,
    )
    .map_err(|e| e.to_string())?;
    let config = config.to_str().ok_or("non-UTF-8 temp path")?;
    let sim = ["simulate", "--config", config, "--out", "paths.csv", "--seed", "2024", "--convergence", "conv.csv"];
    let ver = ["verify", "--out", "report.csv"];
    let mut runs = Vec::new();
    for dir in &dirs {
        let s = run_cli(dir.path(), &sim)?;
        let v = run_cli(dir.path(), &ver)?;
        let read = |f: &str| std::fs::read(dir.path().join(f)).map_err(|e| e.to_string());
        runs.push((s.stdout, v.stdout, read("paths.csv")?, read("conv.csv")?, read("report.csv")?));
    }
    let (a, b) = (&runs[0], &runs[1]);
    same_bytes("simulate stdout", &a.0, &b.0)?;
    same_bytes("verify stdout", &a.1, &b.1)?;
    same_bytes("paths.csv", &a.2, &b.2)?;
    same_bytes("conv.csv", &a.3, &b.3)?;
    same_bytes("report.csv", &a.4, &b.4)?;
    Ok(format!("simulate ({} bytes of paths) and verify byte-identical over two runs", a.2.len()))
}

type Criterion = (u32, &'static str, Option<u64>, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "binomial lattice nodes", Some(1), binomial_lattice_nodes),
        (2, "binomial to BSM convergence", Some(5), crr_convergence),
        (3, "PDE residuals", Some(2), || all_pass(&suite(&["bsm_pde_residual", "dupire_residual_logistic"])?)),
        (4, "convex duality", Some(2), || all_pass(&suite(&["legendre_duality", "neumann_ode_residual"])?)),
        (5, "closed-form identities", None, closed_form_identities),
        (6, "Monte-Carlo vs closed form", Some(60), monte_carlo),
        (7, "stochastic-analysis suite", Some(60), stochastic_suite),
        (8, "dual-delta martingale", Some(30), dual_delta),
        (9, "bench harness", None, bench_harness),
        (10, "determinism", None, determinism),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(secs)) = (&outcome, limit) {
            if elapsed > Duration::from_secs(secs) {
                outcome = Err(format!("took {:.2} s, limit {secs} s", elapsed.as_secs_f64()));
            }
        }
        let (verdict, note) = match &outcome {
            Ok(note) => ("PASS", note),
            Err(note) => ("FAIL", note),
        };
        failed += outcome.is_err() as usize;
        println!("{verdict} criterion {id:>2} {name} ({:.2} s): {note}", elapsed.as_secs_f64());
    }
    println!("{}/10 acceptance criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
