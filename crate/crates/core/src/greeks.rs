//! Option sensitivities: closed-form BSM delta, central finite differences for
//! any pricer, and portfolio delta aggregation.

use std::collections::BTreeMap;

use crate::error::{PricingError, Result};
use crate::normal::norm_cdf;
use crate::types::{ModelParams, OptionKind, OptionSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Greek {
    Delta,
    Gamma,
    Theta,
    Vega,
    Rho,
}

impl Greek {
    pub const ALL: [Greek; 5] = [Greek::Delta, Greek::Gamma, Greek::Theta, Greek::Vega, Greek::Rho];

    pub fn as_str(self) -> &'static str {
        match self {
            Greek::Delta => "delta",
            Greek::Gamma => "gamma",
            Greek::Theta => "theta",
            Greek::Vega => "vega",
            Greek::Rho => "rho",
        }
    }
}

pub const SPOT_BUMP: f64 = 1e-4;
pub const VOL_BUMP: f64 = 1e-4;
pub const RATE_BUMP: f64 = 1e-5;
pub const TIME_BUMP: f64 = 1e-5;

/// Closed-form BSM delta: N(d+) for calls, N(d+) - 1 for puts.
pub fn bsm_delta(tau: f64, x: f64, k: f64, r: f64, sigma: f64, kind: OptionKind) -> Result<f64> {
    let res = crate::analytic::bsm_price(tau, x, k, r, sigma, kind)?;
    let n = norm_cdf(res.diagnostic("d_plus").expect("bsm diagnostics carry d_plus"));
    Ok(match kind {
        OptionKind::Call => n,
        OptionKind::Put => n - 1.0,
    })
}

fn bump_vol(params: &ModelParams, h: f64) -> Result<ModelParams> {
    Ok(match *params {
        ModelParams::Bsm { r, sigma } => ModelParams::Bsm { r, sigma: sigma + h },
        ModelParams::Bachelier { sigma_n } => ModelParams::Bachelier { sigma_n: sigma_n + h },
        ModelParams::Logistic { a } => ModelParams::Logistic { a: a + h },
        ModelParams::Binomial { .. } => {
            return Err(PricingError::Unsupported(
                "vega is undefined for a lattice given by raw up/down factors".into(),
            ))
        }
    })
}

fn bump_rate(params: &ModelParams, h: f64) -> Result<ModelParams> {
    Ok(match *params {
        ModelParams::Bsm { r, sigma } => ModelParams::Bsm { r: r + h, sigma },
        ModelParams::Binomial { u, d, r, steps } => ModelParams::Binomial { u, d, r: r + h, steps },
        other => {
            return Err(PricingError::Unsupported(format!("{} is a zero-rate model; rho is undefined", other.tag())))
        }
    })
}

/// Central finite-difference sensitivity of `price_fn` at `(spec, params)`.
///
/// Delta and gamma bump the spot by `1e-4 * max(1, |s0|)`; theta is minus the
/// maturity derivative (step 1e-5); vega bumps the model's volatility-like
/// parameter by 1e-4; rho bumps the rate by 1e-5.
pub fn fd_greek<F>(price_fn: F, which: Greek, spec: &OptionSpec, params: &ModelParams) -> Result<f64>
where
    F: Fn(&OptionSpec, &ModelParams) -> Result<f64>,
{
    let eval = |s: &OptionSpec, p: &ModelParams| {
        price_fn(s, p).map_err(|e| PricingError::numeric(format!("{} bump failed: {e}", which.as_str())))
    };
    match which {
        Greek::Delta | Greek::Gamma => {
            let h = SPOT_BUMP * spec.spot.abs().max(1.0);
            let up = eval(&spec.with_spot(spec.spot + h), params)?;
            let dn = eval(&spec.with_spot(spec.spot - h), params)?;
            if which == Greek::Delta {
                Ok((up - dn) / (2.0 * h))
            } else {
                let mid = eval(spec, params)?;
                Ok((up - 2.0 * mid + dn) / (h * h))
            }
        }
        Greek::Theta => {
            let h = TIME_BUMP;
            let up = eval(&spec.with_maturity(spec.maturity + h), params)?;
            let dn = eval(&spec.with_maturity(spec.maturity - h), params)?;
            Ok(-(up - dn) / (2.0 * h))
        }
        Greek::Vega => {
            let up = eval(spec, &bump_vol(params, VOL_BUMP)?)?;
            let dn = eval(spec, &bump_vol(params, -VOL_BUMP)?)?;
            Ok((up - dn) / (2.0 * VOL_BUMP))
        }
        Greek::Rho => {
            let up = eval(spec, &bump_rate(params, RATE_BUMP)?)?;
            let dn = eval(spec, &bump_rate(params, -RATE_BUMP)?)?;
            Ok((up - dn) / (2.0 * RATE_BUMP))
        }
    }
}

/// Every greek that is defined for the model, by finite differences on
/// [`crate::pricing::price`]. Greeks a model cannot express are left out.
pub fn all_greeks(spec: &OptionSpec, params: &ModelParams) -> Result<BTreeMap<String, f64>> {
    let price_fn = |s: &OptionSpec, p: &ModelParams| crate::pricing::price(s, p).map(|r| r.price);
    let mut out = BTreeMap::new();
    for g in Greek::ALL {
        let skip = match (params, g) {
            // lattice prices depend on T only through the reported step length
            (ModelParams::Binomial { .. }, Greek::Theta | Greek::Vega) => true,
            (ModelParams::Bachelier { .. } | ModelParams::Logistic { .. }, Greek::Rho) => true,
            _ => false,
        };
        if skip {
            continue;
        }
        out.insert(g.as_str().to_string(), fd_greek(price_fn, g, spec, params)?);
    }
    Ok(out)
}

/// Holding in one instrument. Short exposure is carried by the sign of
/// `quantity` alone: a short stock position is `(-60, 1.0)`, not `(-60, -1.0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    quantity: f64,
    delta_per_unit: f64,
}

impl Position {
    pub fn new(quantity: f64, delta_per_unit: f64) -> Result<Self> {
        if !quantity.is_finite() || !delta_per_unit.is_finite() {
            return Err(PricingError::domain(format!(
                "position needs finite quantity and delta (got {quantity}, {delta_per_unit})"
            )));
        }
        if quantity < 0.0 && delta_per_unit < 0.0 {
            return Err(PricingError::domain(format!(
                "short exposure encoded twice (quantity {quantity}, delta {delta_per_unit}); \
                 carry the short in the quantity sign only"
            )));
        }
        Ok(Self { quantity, delta_per_unit })
    }

    pub fn quantity(&self) -> f64 {
        self.quantity
    }

    pub fn delta_per_unit(&self) -> f64 {
        self.delta_per_unit
    }
}

/// Sum of quantity times per-unit delta.
pub fn portfolio_delta(positions: &[Position]) -> f64 {
    positions.iter().map(|p| p.quantity * p.delta_per_unit).sum()
}
