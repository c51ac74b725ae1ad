//! Model dispatch: one entry point that prices any admissible (option, model) pair.

use crate::analytic::{bachelier_call, bachelier_put, bsm_price, logistic_call, logistic_put};
use crate::binomial;
use crate::error::{PricingError, Result};
use crate::types::{ensure_valid, ExerciseStyle, ModelParams, OptionKind, OptionSpec, PricingResult};

/// Prices `spec` under `params`. Continuous-time models are European only.
pub fn price(spec: &OptionSpec, params: &ModelParams) -> Result<PricingResult> {
    ensure_valid(spec, params)?;
    if let ModelParams::Binomial { .. } = params {
        return binomial::price(spec, params);
    }
    if spec.style == ExerciseStyle::American {
        return Err(PricingError::Unsupported(format!(
            "American exercise is only priced on the binomial lattice, not under {}",
            params.tag()
        )));
    }
    let (k, s0, t) = (spec.strike, spec.spot, spec.maturity);
    match (*params, spec.kind) {
        (ModelParams::Bsm { r, sigma }, kind) => bsm_price(t, s0, k, r, sigma, kind),
        (ModelParams::Bachelier { sigma_n }, OptionKind::Put) => bachelier_put(k, s0, t, sigma_n),
        (ModelParams::Bachelier { sigma_n }, OptionKind::Call) => bachelier_call(k, s0, t, sigma_n),
        (ModelParams::Logistic { a }, OptionKind::Put) => logistic_put(k, s0, t, a),
        (ModelParams::Logistic { a }, OptionKind::Call) => logistic_call(k, s0, t, a),
        (ModelParams::Binomial { .. }, _) => unreachable!(),
    }
}

/// Continuous closed-form value when the model has one (everything except the lattice).
pub fn closed_form(spec: &OptionSpec, params: &ModelParams) -> Option<f64> {
    match params {
        ModelParams::Binomial { .. } => None,
        _ => price(&OptionSpec { style: ExerciseStyle::European, ..*spec }, params).ok().map(|r| r.price),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatch() {
        let spec = OptionSpec::european(OptionKind::Put, 100.0, 1.0, 100.0);
        let p = price(&spec, &ModelParams::Logistic { a: 1.0 }).unwrap();
        assert!((p.price - std::f64::consts::LN_2).abs() < 1e-15);
        let b = price(&spec, &ModelParams::Binomial { u: 1.1, d: 0.9, r: 0.0, steps: 3 }).unwrap();
        assert!(b.price > 0.0);
        assert!(closed_form(&spec, &ModelParams::Binomial { u: 1.1, d: 0.9, r: 0.0, steps: 3 }).is_none());
    }

    #[test]
    fn american_continuous_unsupported() {
        let spec = OptionSpec::american(OptionKind::Put, 100.0, 1.0, 100.0);
        let err = price(&spec, &ModelParams::Bsm { r: 0.0, sigma: 0.2 }).unwrap_err();
        assert_eq!(err.code(), "UNSUPPORTED");
    }

    #[test]
    fn validation_first() {
        let spec = OptionSpec::european(OptionKind::Put, 100.0, 0.0, 100.0);
        let err = price(&spec, &ModelParams::Bachelier { sigma_n: 1.0 }).unwrap_err();
        assert_eq!(err.code(), "VALIDATION");
    }
}
