//! Recombining binomial lattice with backward-induction pricing.
//!
//! Nodes are indexed by period `i` and up-move count `j <= i`; the stock price
//! at a node is `s0 * u^j * d^(i-j)`. Values are rolled back with the
//! risk-neutral up probability `p = (1 + r - d) / (u - d)`, discounting one
//! period at a time by `1 + r`.

use crate::error::{PricingError, Result, Violation, ViolationCode};
use crate::types::{ensure_valid, ExerciseStyle, ModelParams, ModelTag, OptionSpec, PricingResult};

/// Risk-neutral up probability of a one-period step.
pub fn risk_neutral_prob(u: f64, d: f64, r: f64) -> Result<f64> {
    if !(d > 0.0 && u > d && d < 1.0 + r && 1.0 + r < u) {
        return Err(PricingError::Validation(vec![Violation::new(
            ViolationCode::NoArbitrageViolated,
            format!("need 0 < d < 1+r < u, got u={u}, d={d}, r={r}"),
        )]));
    }
    Ok((1.0 + r - d) / (u - d))
}

/// Dense triangular lattice. Storage for period `i` starts at `i * (i + 1) / 2`.
#[derive(Debug, Clone)]
pub struct Lattice {
    steps: usize,
    dt: f64,
    up: f64,
    down: f64,
    prob_up: f64,
    stock: Vec<f64>,
    values: Option<Vec<f64>>,
    exercise: Vec<bool>,
}

#[inline]
fn offset(i: usize) -> usize {
    i * (i + 1) / 2
}

impl Lattice {
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Years per step.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn up(&self) -> f64 {
        self.up
    }

    pub fn down(&self) -> f64 {
        self.down
    }

    pub fn prob_up(&self) -> f64 {
        self.prob_up
    }

    /// Stock price at period `i` after `j` up moves.
    pub fn stock_price(&self, i: usize, j: usize) -> f64 {
        assert!(i <= self.steps && j <= i, "node ({i}, {j}) outside lattice");
        self.stock[offset(i) + j]
    }

    /// Option value at a node, once the lattice has been priced.
    pub fn option_value(&self, i: usize, j: usize) -> Option<f64> {
        assert!(i <= self.steps && j <= i, "node ({i}, {j}) outside lattice");
        self.values.as_ref().map(|v| v[offset(i) + j])
    }

    /// True where early exercise strictly beats continuation.
    pub fn exercise_now(&self, i: usize, j: usize) -> bool {
        assert!(i <= self.steps && j <= i, "node ({i}, {j}) outside lattice");
        self.exercise.get(offset(i) + j).copied().unwrap_or(false)
    }

    /// Stock prices of one period, ordered by increasing up-count.
    pub fn level(&self, i: usize) -> &[f64] {
        &self.stock[offset(i)..offset(i) + i + 1]
    }
}

/// Builds the stock-price lattice for a binomial parameter set.
///
/// `maturity` only sets the per-step year fraction reported by [`Lattice::dt`].
pub fn build_lattice(s0: f64, maturity: f64, params: &ModelParams) -> Result<Lattice> {
    let ModelParams::Binomial { u, d, r, steps } = *params else {
        return Err(PricingError::Unsupported(format!("lattice needs binomial parameters, got {}", params.tag())));
    };
    let probe = OptionSpec::european(crate::OptionKind::Call, 0.0, maturity, s0);
    ensure_valid(&probe, params)?;
    let prob_up = risk_neutral_prob(u, d, r)?;

    let mut stock = Vec::with_capacity(offset(steps + 1));
    for i in 0..=steps {
        for j in 0..=i {
            stock.push(s0 * u.powi(j as i32) * d.powi((i - j) as i32));
        }
    }
    Ok(Lattice {
        steps,
        dt: maturity / steps as f64,
        up: u,
        down: d,
        prob_up,
        stock,
        values: None,
        exercise: Vec::new(),
    })
}

fn roll_back(lattice: &mut Lattice, spec: &OptionSpec, r: f64, american: bool) -> Result<f64> {
    let p = risk_neutral_prob(lattice.up, lattice.down, r)?;
    let disc = 1.0 / (1.0 + r);
    let n = lattice.steps;
    let mut values = vec![0.0; lattice.stock.len()];
    let mut exercise = vec![false; lattice.stock.len()];

    let last = offset(n);
    for j in 0..=n {
        values[last + j] = spec.kind.intrinsic(lattice.stock[last + j], spec.strike);
    }
    for i in (0..n).rev() {
        let (here, next) = (offset(i), offset(i + 1));
        for j in 0..=i {
            let cont = disc * (p * values[next + j + 1] + (1.0 - p) * values[next + j]);
            let v = if american {
                let intrinsic = spec.kind.intrinsic(lattice.stock[here + j], spec.strike);
                // ties keep the option alive
                if intrinsic > cont {
                    exercise[here + j] = true;
                    intrinsic
                } else {
                    cont
                }
            } else {
                cont
            };
            values[here + j] = v;
        }
    }
    let root = values[0];
    lattice.values = Some(values);
    lattice.exercise = exercise;
    Ok(root)
}

fn result(lattice: &Lattice, price: f64, r: f64) -> PricingResult {
    PricingResult::new(price, ModelTag::Binomial)
        .with_diagnostic("prob_up", lattice.prob_up)
        .with_diagnostic("steps", lattice.steps as f64)
        .with_diagnostic("rate_per_period", r)
}

/// Prices a European option by backward induction, filling the lattice's values.
pub fn price_european(lattice: &mut Lattice, spec: &OptionSpec, r: f64) -> Result<PricingResult> {
    if spec.style != ExerciseStyle::European {
        return Err(PricingError::Unsupported("price_european needs a European option".into()));
    }
    let price = roll_back(lattice, spec, r, false)?;
    Ok(result(lattice, price, r))
}

/// Prices an American option; nodes where exercise strictly wins are flagged.
pub fn price_american(lattice: &mut Lattice, spec: &OptionSpec, r: f64) -> Result<PricingResult> {
    if spec.style != ExerciseStyle::American {
        return Err(PricingError::Unsupported("price_american needs an American option".into()));
    }
    let price = roll_back(lattice, spec, r, true)?;
    let n_ex = lattice.exercise.iter().filter(|&&e| e).count();
    Ok(result(lattice, price, r).with_diagnostic("exercise_nodes", n_ex as f64))
}

/// Builds and prices in one go, dispatching on the exercise style.
pub fn price(spec: &OptionSpec, params: &ModelParams) -> Result<PricingResult> {
    ensure_valid(spec, params)?;
    let ModelParams::Binomial { r, .. } = *params else { unreachable!("validated as binomial by build_lattice") };
    let mut lattice = build_lattice(spec.spot, spec.maturity, params)?;
    match spec.style {
        ExerciseStyle::European => price_european(&mut lattice, spec, r),
        ExerciseStyle::American => price_american(&mut lattice, spec, r),
    }
}

/// Cox-Ross-Rubinstein calibration: u = exp(sigma sqrt(dt)), d = 1/u and a
/// simple per-period rate `rate * dt`.
pub fn crr_params(sigma: f64, rate: f64, maturity: f64, steps: usize) -> ModelParams {
    let dt = maturity / steps as f64;
    let u = (sigma * dt.sqrt()).exp();
    ModelParams::Binomial { u, d: 1.0 / u, r: rate * dt, steps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::OptionKind;

    fn tree(s0: f64, u: f64, d: f64, r: f64, steps: usize) -> Lattice {
        build_lattice(s0, 1.0, &ModelParams::Binomial { u, d, r, steps }).unwrap()
    }

    /// Price by enumerating every coin-flip sequence.
    fn brute_force(spec: &OptionSpec, u: f64, d: f64, r: f64, n: usize) -> f64 {
        let p = (1.0 + r - d) / (u - d);
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            let ups = mask.count_ones() as i32;
            let s = spec.spot * u.powi(ups) * d.powi(n as i32 - ups);
            total += p.powi(ups) * (1.0 - p).powi(n as i32 - ups) * spec.kind.intrinsic(s, spec.strike);
        }
        total / (1.0 + r).powi(n as i32)
    }

    #[test]
    fn risk_neutral_examples() {
        assert!((risk_neutral_prob(1.1, 0.9, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((risk_neutral_prob(1.05, 0.95, 0.01).unwrap() - 0.6).abs() < 1e-12);
        let err = risk_neutral_prob(1.1, 0.9, 0.25).unwrap_err();
        match err {
            PricingError::Validation(v) => assert_eq!(v[0].code, ViolationCode::NoArbitrageViolated),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn one_period_nodes() {
        let l = tree(10.0, 1.05, 0.95, 0.0, 1);
        assert!((l.stock_price(1, 1) - 10.5).abs() < 1e-12);
        assert!((l.stock_price(1, 0) - 9.5).abs() < 1e-12);
    }

    #[test]
    fn three_period_corner_nodes() {
        let l = tree(100.0, 1.1, 0.9, 0.0, 3);
        assert!((l.stock_price(3, 3) - 133.1).abs() < 1e-10);
        assert!((l.stock_price(3, 0) - 72.9).abs() < 1e-10);
        assert!((l.stock_price(2, 1) - 99.0).abs() < 1e-10);
        assert!(l.option_value(0, 0).is_none());
    }

    #[test]
    fn reciprocal_down_factor() {
        let u = 1.1;
        let l = tree(100.0, u, 1.0 / u, 0.0, 1);
        assert!((l.stock_price(1, 0) - 90.909_090_909_090_9).abs() < 1e-10);
    }

    #[test]
    fn european_call_matches_path_enumeration() {
        let spec = OptionSpec::european(OptionKind::Call, 100.0, 1.0, 100.0);
        let mut l = tree(100.0, 1.1, 0.9, 0.0, 3);
        let got = price_european(&mut l, &spec, 0.0).unwrap().price;
        // payoffs 33.1, 3 x 8.9, 4 x 0 over 8 equiprobable paths
        assert!((got - 59.8 / 8.0).abs() < 1e-12);
        assert!((got - brute_force(&spec, 1.1, 0.9, 0.0, 3)).abs() < 1e-12);
        assert!(l.option_value(3, 3).unwrap() > 33.0);
    }

    #[test]
    fn zero_strike_call_is_the_stock() {
        let spec = OptionSpec::european(OptionKind::Call, 0.0, 1.0, 100.0);
        let mut l = tree(100.0, 1.1, 0.9, 0.0, 7);
        let got = price_european(&mut l, &spec, 0.0).unwrap().price;
        assert!((got - 100.0).abs() < 1e-10);
    }

    #[test]
    fn far_otm_put_is_worthless() {
        let spec = OptionSpec::european(OptionKind::Put, 10.0, 1.0, 100.0);
        let mut l = tree(100.0, 1.1, 0.9, 0.0, 5);
        assert_eq!(price_european(&mut l, &spec, 0.0).unwrap().price, 0.0);
    }

    #[test]
    fn american_call_equals_european_without_dividends() {
        for r in [0.0, 0.01, 0.05] {
            let eu = OptionSpec::european(OptionKind::Call, 95.0, 1.0, 100.0);
            let am = OptionSpec::american(OptionKind::Call, 95.0, 1.0, 100.0);
            let mut l = tree(100.0, 1.1, 0.9, r, 6);
            let e = price_european(&mut l, &eu, r).unwrap().price;
            let a = price_american(&mut l, &am, r).unwrap().price;
            assert!((a - e).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn american_put_two_steps() {
        // p = 0.75; terminal puts 0, 1, 19; the down node at S=90 exercises (10 > 5.5/1.05)
        let p: f64 = 0.75;
        let disc = 1.0 / 1.05;
        let up = disc * (1.0 - p) * 1.0;
        let down_cont = disc * (p * 1.0 + (1.0 - p) * 19.0);
        let eu_expect = disc * (p * up + (1.0 - p) * down_cont);
        let am_expect = disc * (p * up + (1.0 - p) * 10.0_f64.max(down_cont));

        let mut l = tree(100.0, 1.1, 0.9, 0.05, 2);
        let eu = price_european(&mut l, &OptionSpec::european(OptionKind::Put, 100.0, 1.0, 100.0), 0.05).unwrap().price;
        let am = price_american(&mut l, &OptionSpec::american(OptionKind::Put, 100.0, 1.0, 100.0), 0.05).unwrap().price;
        assert!((eu - eu_expect).abs() < 1e-12);
        assert!((am - am_expect).abs() < 1e-12);
        assert!(am > eu);
        assert!(l.exercise_now(1, 0));
        assert!(!l.exercise_now(1, 1));
    }

    #[test]
    fn deep_itm_american_put_exercises_at_root() {
        let spec = OptionSpec::american(OptionKind::Put, 200.0, 1.0, 100.0);
        let mut l = tree(100.0, 1.1, 0.9, 0.05, 1);
        let got = price_american(&mut l, &spec, 0.05).unwrap();
        assert_eq!(got.price, 100.0);
        assert!(l.exercise_now(0, 0));
    }

    #[test]
    fn exercise_ties_keep_the_option() {
        // with r = 0 and dyadic factors continuation equals intrinsic exactly
        let spec = OptionSpec::american(OptionKind::Put, 200.0, 1.0, 100.0);
        let mut l = tree(100.0, 1.25, 0.75, 0.0, 1);
        let got = price_american(&mut l, &spec, 0.0).unwrap();
        assert_eq!(got.price, 100.0);
        assert!(!l.exercise_now(0, 0));
    }

    #[test]
    fn martingale_and_recombination() {
        let l = tree(100.0, 1.1, 0.9, 0.0, 40);
        let p = l.prob_up();
        for i in 0..40 {
            for j in 0..=i {
                let next = p * l.stock_price(i + 1, j + 1) + (1.0 - p) * l.stock_price(i + 1, j);
                let s = l.stock_price(i, j);
                assert!((next - s).abs() <= 1e-12 * s.max(1.0), "({i},{j})");
            }
        }
        // ud = du: the node reached by up-then-down equals down-then-up
        let (u, d) = (l.up(), l.down());
        assert!((100.0 * u * d - l.stock_price(2, 1)).abs() < 1e-12);
    }

    #[test]
    fn backward_induction_equals_enumeration() {
        for n in 1..=12 {
            for (kind, k) in [(OptionKind::Call, 97.0), (OptionKind::Put, 104.0)] {
                let spec = OptionSpec::european(kind, k, 1.0, 100.0);
                let mut l = tree(100.0, 1.07, 0.94, 0.004, n);
                let bi = price_european(&mut l, &spec, 0.004).unwrap().price;
                assert!((bi - brute_force(&spec, 1.07, 0.94, 0.004, n)).abs() < 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn american_dominates_intrinsic_everywhere() {
        let spec = OptionSpec::american(OptionKind::Put, 105.0, 1.0, 100.0);
        let mut l = tree(100.0, 1.08, 0.93, 0.01, 25);
        price_american(&mut l, &spec, 0.01).unwrap();
        for i in 0..=25 {
            for j in 0..=i {
                let v = l.option_value(i, j).unwrap();
                assert!(v >= spec.kind.intrinsic(l.stock_price(i, j), 105.0) - 1e-12);
            }
        }
    }

    #[test]
    fn style_mismatch_is_rejected() {
        let mut l = tree(100.0, 1.1, 0.9, 0.0, 2);
        let am = OptionSpec::american(OptionKind::Put, 100.0, 1.0, 100.0);
        assert!(price_european(&mut l, &am, 0.0).is_err());
    }
}
