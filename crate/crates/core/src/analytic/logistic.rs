//! Logistic local-volatility model and its convex-dual function family.
//!
//! With scale b(T) = a sqrt(T) and excess strike x = k - s0 the put is
//! `b * pi(x / b)` where `pi(z) = ln(1 + e^z)`. The Legendre conjugate of `pi`
//! is minus the Bernoulli entropy, `pi*(delta) = -H(delta)`, and the strike
//! derivative of the put is the logistic CDF `delta(z) = 1 / (1 + e^-z)`.

use crate::error::{PricingError, Result};
use crate::types::{ModelTag, PricingResult};

/// ln(1 + e^x) without overflow for large `x`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Primal put value in standardized units, pi(z) = ln(1 + e^z).
#[inline]
pub fn pi(z: f64) -> f64 {
    softplus(z)
}

/// Logistic CDF, the binary put price as a function of z.
#[inline]
pub fn delta_of_z(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn check_probability(delta: f64, open: bool) -> Result<()> {
    let ok = if open { delta > 0.0 && delta < 1.0 } else { (0.0..=1.0).contains(&delta) };
    if ok {
        Ok(())
    } else {
        let range = if open { "(0, 1)" } else { "[0, 1]" };
        Err(PricingError::domain(format!("probability {delta} outside {range}")))
    }
}

/// Bernoulli entropy H(delta) in nats; 0 at the endpoints.
pub fn entropy(delta: f64) -> Result<f64> {
    check_probability(delta, false)?;
    Ok(entropy_unchecked(delta))
}

#[inline]
pub(crate) fn entropy_unchecked(delta: f64) -> f64 {
    let a = if delta > 0.0 { -delta * delta.ln() } else { 0.0 };
    let b = if delta < 1.0 { -(1.0 - delta) * (-delta).ln_1p() } else { 0.0 };
    a + b
}

/// Dual-delta volatility sqrt(H(delta) delta (1 - delta)).
pub fn eta_delta(delta: f64) -> Result<f64> {
    check_probability(delta, false)?;
    Ok(eta_delta_unchecked(delta))
}

#[inline]
pub(crate) fn eta_delta_unchecked(delta: f64) -> f64 {
    (entropy_unchecked(delta) * delta * (1.0 - delta)).sqrt()
}

/// Primal variance function
/// eta(z) = sqrt((1 + e^z) ln(1 + e^-z) + (1 + e^-z) ln(1 + e^z)).
///
/// Even in `z`; evaluated through e^-|z| so it stays finite for any finite input.
#[inline]
pub fn eta_z(z: f64) -> f64 {
    let u = z.abs();
    let e = (-u).exp();
    let l = e.ln_1p();
    // (1 + e^u) ln(1 + e^-u) = (1 + e) * ln(1 + e) / e
    let ratio = if e > 1e-8 { l / e } else { 1.0 - 0.5 * e };
    ((1.0 + e) * ratio + (1.0 + e) * (u + l)).sqrt()
}

/// Legendre conjugate of `pi`: pi*(delta) = -H(delta).
pub fn pi_star(delta: f64) -> Result<f64> {
    check_probability(delta, true)?;
    Ok(-entropy_unchecked(delta))
}

/// Logit, the inverse of [`delta_of_z`].
pub fn z_of_delta(delta: f64) -> Result<f64> {
    check_probability(delta, true)?;
    Ok((delta / (1.0 - delta)).ln())
}

/// Scale function b(T) = a sqrt(T).
#[inline]
pub fn scale(maturity: f64, a: f64) -> f64 {
    a * maturity.sqrt()
}

fn checked_scale(maturity: f64, a: f64) -> Result<f64> {
    if !(maturity > 0.0 && a > 0.0) || !maturity.is_finite() || !a.is_finite() {
        return Err(PricingError::domain(format!("logistic model needs T > 0 and a > 0 (T={maturity}, a={a})")));
    }
    Ok(scale(maturity, a))
}

fn excess(k: f64, s0: f64) -> Result<f64> {
    if k.is_finite() && s0.is_finite() {
        Ok(k - s0)
    } else {
        Err(PricingError::domain(format!("non-finite strike or spot (k={k}, s0={s0})")))
    }
}

/// Logistic put b ln(1 + exp((k - s0)/b)).
pub fn logistic_put(k: f64, s0: f64, maturity: f64, a: f64) -> Result<PricingResult> {
    let x = excess(k, s0)?;
    let b = checked_scale(maturity, a)?;
    Ok(PricingResult::new(b * softplus(x / b), ModelTag::Logistic).with_diagnostic("b", b).with_diagnostic("z", x / b))
}

/// Logistic call b ln(1 + exp(-(k - s0)/b)); parity gives c - p = s0 - k.
pub fn logistic_call(k: f64, s0: f64, maturity: f64, a: f64) -> Result<PricingResult> {
    let x = excess(k, s0)?;
    let b = checked_scale(maturity, a)?;
    Ok(PricingResult::new(b * softplus(-x / b), ModelTag::Logistic).with_diagnostic("b", b).with_diagnostic("z", x / b))
}

/// Binary put delta((k - s0)/b).
pub fn logistic_binary_put(k: f64, s0: f64, maturity: f64, a: f64) -> Result<PricingResult> {
    let x = excess(k, s0)?;
    let b = checked_scale(maturity, a)?;
    Ok(PricingResult::new(delta_of_z(x / b), ModelTag::Logistic).with_diagnostic("z", x / b))
}

/// Dual put value p*(delta, tau) = b(tau) pi*(delta) = -b(tau) H(delta).
pub fn dual_put_value(delta: f64, tau: f64, a: f64) -> Result<f64> {
    let b = checked_scale(tau, a)?;
    Ok(b * pi_star(delta)?)
}

/// Dual excess price X* = d p*/d delta = b(tau) logit(delta).
pub fn dual_excess_price(delta: f64, tau: f64, a: f64) -> Result<f64> {
    let b = checked_scale(tau, a)?;
    Ok(b * z_of_delta(delta)?)
}

/// Local volatility of the excess price X = S - s0 at time `t`:
/// sqrt(2 b b') eta(x / b), which is a * eta(x / (a sqrt(t))) for b = a sqrt(t).
pub fn logistic_local_vol(x: f64, t: f64, a: f64) -> Result<f64> {
    let b = checked_scale(t, a)?;
    if !x.is_finite() {
        return Err(PricingError::domain(format!("non-finite price change {x}")));
    }
    Ok(a * eta_z(x / b))
}
