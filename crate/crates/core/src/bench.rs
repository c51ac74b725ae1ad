//! Wall-time comparison of the Bachelier and logistic function families.
//!
//! For each model the six functions are the primal variance η(z), the dual
//! volatility η_δ(δ), the put value π(z), its conjugate π*(δ), the CDF δ(z) and
//! its inverse z(δ). On the Bachelier side η is constant, η_δ = N'(N⁻¹(δ)),
//! π is the normal put value z N(z) + N'(z) and π* is its Legendre conjugate
//! computed by golden-section search. Each row is the fastest of several
//! single-threaded repetitions over a fixed input grid.

use std::fmt::{self, Write as _};
use std::hint::black_box;
use std::io::{Read, Write};
use std::time::Instant;

use crate::analytic::legendre::convex_conjugate;
use crate::analytic::logistic::{entropy_unchecked, eta_delta_unchecked};
use crate::analytic::{delta_of_z, eta_z, normal_put_value, pi};
use crate::csvio::{fmt_f64, parse_f64};
use crate::error::{PricingError, Result};
use crate::normal::{norm_cdf, norm_inv, norm_pdf};

/// Smallest admissible evaluation count; below it timer resolution dominates.
pub const MIN_EVALS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BenchFunction {
    EtaZ,
    EtaDelta,
    Pi,
    PiStar,
    DeltaOfZ,
    ZOfDelta,
}

impl BenchFunction {
    pub const ALL: [BenchFunction; 6] = [
        BenchFunction::EtaZ,
        BenchFunction::EtaDelta,
        BenchFunction::Pi,
        BenchFunction::PiStar,
        BenchFunction::DeltaOfZ,
        BenchFunction::ZOfDelta,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchFunction::EtaZ => "eta_z",
            BenchFunction::EtaDelta => "eta_delta",
            BenchFunction::Pi => "pi",
            BenchFunction::PiStar => "pi_star",
            BenchFunction::DeltaOfZ => "delta_of_z",
            BenchFunction::ZOfDelta => "z_of_delta",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.as_str() == s)
    }

    /// True for functions of a probability δ, false for functions of z.
    pub fn takes_delta(self) -> bool {
        matches!(self, BenchFunction::EtaDelta | BenchFunction::PiStar | BenchFunction::ZOfDelta)
    }
}

impl fmt::Display for BenchFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BenchModel {
    Bachelier,
    Logistic,
}

impl BenchModel {
    pub const ALL: [BenchModel; 2] = [BenchModel::Bachelier, BenchModel::Logistic];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchModel::Bachelier => "Bachelier",
            BenchModel::Logistic => "Logistic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

impl fmt::Display for BenchModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evaluates one function of one model at `x`.
pub fn evaluate(function: BenchFunction, model: BenchModel, x: f64) -> f64 {
    use BenchFunction::*;
    match (model, function) {
        (BenchModel::Logistic, EtaZ) => eta_z(x),
        (BenchModel::Logistic, EtaDelta) => eta_delta_unchecked(x),
        (BenchModel::Logistic, Pi) => pi(x),
        (BenchModel::Logistic, PiStar) => -entropy_unchecked(x),
        (BenchModel::Logistic, DeltaOfZ) => delta_of_z(x),
        (BenchModel::Logistic, ZOfDelta) => (x / (1.0 - x)).ln(),
        (BenchModel::Bachelier, EtaZ) => 1.0,
        (BenchModel::Bachelier, EtaDelta) => norm_pdf(norm_inv(x)),
        (BenchModel::Bachelier, Pi) => normal_put_value(x),
        (BenchModel::Bachelier, PiStar) => bachelier_pi_star(x),
        (BenchModel::Bachelier, DeltaOfZ) => norm_cdf(x),
        (BenchModel::Bachelier, ZOfDelta) => norm_inv(x),
    }
}

/// Numeric Legendre conjugate of the normal put value, sup_z(δz - π_N(z)).
pub fn bachelier_pi_star(delta: f64) -> f64 {
    convex_conjugate(normal_put_value, delta, -40.0, 40.0)
}

/// Input ranges; z-functions see `n_evals` evenly spaced points of
/// `[z_min, z_max]`, δ-functions the same count over `[delta_min, delta_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub z_min: f64,
    pub z_max: f64,
    pub delta_min: f64,
    pub delta_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { z_min: -8.0, z_max: 8.0, delta_min: 0.001, delta_max: 0.999 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.z_min, self.z_max, self.delta_min, self.delta_max].iter().all(|x| x.is_finite());
        if !finite || self.z_min >= self.z_max {
            return Err(PricingError::domain(format!("bad z range [{}, {}]", self.z_min, self.z_max)));
        }
        if !(0.0 < self.delta_min && self.delta_min < self.delta_max && self.delta_max < 1.0) {
            return Err(PricingError::domain(format!(
                "delta range [{}, {}] must lie inside (0, 1)",
                self.delta_min, self.delta_max
            )));
        }
        Ok(())
    }

    fn points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub function: BenchFunction,
    pub model: BenchModel,
    /// Fastest repetition, in seconds.
    pub seconds: f64,
    pub n_evals: usize,
    /// Sum of the outputs; identical on every run.
    pub checksum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    /// Six functions for Bachelier, then six for logistic.
    pub rows: Vec<BenchRow>,
    /// Per-model sums of the row seconds, Bachelier first.
    pub totals: Vec<(BenchModel, f64)>,
}

impl BenchReport {
    pub fn row(&self, function: BenchFunction, model: BenchModel) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.function == function && r.model == model)
    }

    pub fn total(&self, model: BenchModel) -> Option<f64> {
        self.totals.iter().find(|t| t.0 == model).map(|t| t.1)
    }
}

fn time_once(function: BenchFunction, model: BenchModel, inputs: &[f64]) -> (f64, f64) {
    let start = Instant::now();
    let mut acc = 0.0;
    for &x in inputs {
        acc += black_box(evaluate(function, model, black_box(x)));
    }
    (start.elapsed().as_secs_f64(), acc)
}

fn cell_inputs(function: BenchFunction, n_evals: usize, grid: &GridSpec) -> Vec<f64> {
    if function.takes_delta() {
        GridSpec::points(grid.delta_min, grid.delta_max, n_evals)
    } else {
        GridSpec::points(grid.z_min, grid.z_max, n_evals)
    }
}

fn check_counts(n_evals: usize, repetitions: usize) -> Result<()> {
    if n_evals < MIN_EVALS {
        return Err(PricingError::domain(format!("n_evals must be at least {MIN_EVALS}, got {n_evals}")));
    }
    if repetitions == 0 {
        return Err(PricingError::domain("repetitions must be at least 1"));
    }
    Ok(())
}

/// Times each cell in `cells` `repetitions` times and keeps the fastest pass.
///
/// Repetitions run round-robin over the cells, so a burst of machine noise
/// lands on one pass of many cells instead of every pass of one cell.
fn time_cells(cells: &[(BenchFunction, BenchModel, usize)], grid: &GridSpec, repetitions: usize) -> Vec<BenchRow> {
    let inputs: Vec<Vec<f64>> = cells.iter().map(|&(f, _, n)| cell_inputs(f, n, grid)).collect();
    let mut rows: Vec<BenchRow> = cells
        .iter()
        .map(|&(function, model, n_evals)| BenchRow { function, model, seconds: f64::INFINITY, n_evals, checksum: 0.0 })
        .collect();
    for _ in 0..repetitions {
        for (row, xs) in rows.iter_mut().zip(&inputs) {
            let (secs, acc) = time_once(row.function, row.model, xs);
            row.seconds = row.seconds.min(secs);
            row.checksum = acc;
        }
    }
    rows
}

/// Times a single (function, model) cell: fastest of `repetitions` passes.
pub fn bench_cell(
    function: BenchFunction,
    model: BenchModel,
    n_evals: usize,
    grid: &GridSpec,
    repetitions: usize,
) -> Result<BenchRow> {
    check_counts(n_evals, repetitions)?;
    grid.validate()?;
    Ok(time_cells(&[(function, model, n_evals)], grid, repetitions)[0])
}

/// Times all twelve cells and sums each model's rows.
pub fn run_bench(n_evals: usize, grid: &GridSpec, repetitions: usize) -> Result<BenchReport> {
    check_counts(n_evals, repetitions)?;
    grid.validate()?;
    let cells: Vec<_> = BenchModel::ALL
        .into_iter()
        .flat_map(|m| BenchFunction::ALL.into_iter().map(move |f| (f, m, n_evals)))
        .collect();
    let rows = time_cells(&cells, grid, repetitions);
    let totals = BenchModel::ALL
        .into_iter()
        .map(|m| (m, rows.iter().filter(|r| r.model == m).map(|r| r.seconds).sum()))
        .collect();
    Ok(BenchReport { rows, totals })
}

/// Ratio of best time at `2 * n_evals` to best time at `n_evals` for every
/// cell, with both sizes timed round-robin. Near 2 when the loop cost is
/// proportional to the work; far from 2 when fixed overhead dominates.
pub fn work_doubling(
    n_evals: usize,
    grid: &GridSpec,
    repetitions: usize,
) -> Result<Vec<(BenchFunction, BenchModel, f64)>> {
    check_counts(n_evals, repetitions)?;
    grid.validate()?;
    let cells: Vec<_> = BenchModel::ALL
        .into_iter()
        .flat_map(|m| BenchFunction::ALL.into_iter().flat_map(move |f| [(f, m, n_evals), (f, m, 2 * n_evals)]))
        .collect();
    let rows = time_cells(&cells, grid, repetitions);
    Ok(rows.chunks(2).map(|pair| (pair[0].function, pair[0].model, pair[1].seconds / pair[0].seconds)).collect())
}

const CSV_HEADER: [&str; 4] = ["function", "model", "n_evals", "seconds"];

/// Writes `function,model,n_evals,seconds`: twelve rows, then one `Total` row per model.
pub fn write_csv<W: Write>(report: &BenchReport, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &report.rows {
        w.write_record([r.function.as_str(), r.model.as_str(), &r.n_evals.to_string(), &fmt_f64(r.seconds)])?;
    }
    let n = report.rows.first().map_or(0, |r| r.n_evals);
    for (model, secs) in &report.totals {
        w.write_record(["Total", model.as_str(), &n.to_string(), &fmt_f64(*secs)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_csv`]. Checksums are not stored and come back as NaN.
pub fn read_csv<R: Read>(input: R) -> Result<BenchReport> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(PricingError::domain("unexpected bench CSV header"));
    }
    let mut rows = Vec::new();
    let mut totals = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let model =
            BenchModel::parse(field(1)).ok_or_else(|| PricingError::domain(format!("bad model {:?}", field(1))))?;
        let seconds = parse_f64(field(3))?;
        if field(0) == "Total" {
            totals.push((model, seconds));
            continue;
        }
        let function = BenchFunction::parse(field(0))
            .ok_or_else(|| PricingError::domain(format!("bad function {:?}", field(0))))?;
        let n_evals = field(2).parse().map_err(|_| PricingError::domain("bad n_evals"))?;
        rows.push(BenchRow { function, model, seconds, n_evals, checksum: f64::NAN });
    }
    Ok(BenchReport { rows, totals })
}

/// Side-by-side table: one line per function, a Total line, and the faster model.
pub fn format_table(report: &BenchReport) -> String {
    let mut s = format!("{:<12} {:>14} {:>14}  {}\n", "Function", "Bachelier (s)", "Logistic (s)", "Faster model");
    let mut line = |name: &str, b: f64, l: f64| {
        let faster = if b < l {
            "Bachelier"
        } else if l < b {
            "Logistic"
        } else {
            "tie"
        };
        let _ = writeln!(s, "{name:<12} {b:>14.6e} {l:>14.6e}  {faster}");
    };
    for f in BenchFunction::ALL {
        let b = report.row(f, BenchModel::Bachelier).map_or(f64::NAN, |r| r.seconds);
        let l = report.row(f, BenchModel::Logistic).map_or(f64::NAN, |r| r.seconds);
        line(f.as_str(), b, l);
    }
    let b = report.total(BenchModel::Bachelier).unwrap_or(f64::NAN);
    let l = report.total(BenchModel::Logistic).unwrap_or(f64::NAN);
    line("Total", b, l);
    s
}
