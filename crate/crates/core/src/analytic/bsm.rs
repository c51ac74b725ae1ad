use crate::error::{PricingError, Result};
use crate::normal::norm_cdf;
use crate::types::{ModelTag, OptionKind, PricingResult};

/// Black-Scholes-Merton value of a European option with `tau` years left.
///
/// Diagnostics carry `d_plus` and `d_minus`. Puts come from parity with the call.
pub fn bsm_price(tau: f64, x: f64, k: f64, r: f64, sigma: f64, kind: OptionKind) -> Result<PricingResult> {
    if !(tau > 0.0 && x > 0.0 && k > 0.0 && sigma > 0.0)
        || !(tau.is_finite() && x.is_finite() && k.is_finite())
        || !sigma.is_finite()
        || !r.is_finite()
    {
        return Err(PricingError::domain(format!(
            "bsm_price needs tau, x, k, sigma > 0 (tau={tau}, x={x}, k={k}, sigma={sigma}, r={r})"
        )));
    }
    let vol = sigma * tau.sqrt();
    let d_plus = ((x / k).ln() + (r + 0.5 * sigma * sigma) * tau) / vol;
    let d_minus = d_plus - vol;
    let df = (-r * tau).exp();
    let call = x * norm_cdf(d_plus) - k * df * norm_cdf(d_minus);
    let price = match kind {
        OptionKind::Call => call,
        OptionKind::Put => call - x + k * df,
    };
    Ok(PricingResult::new(price.max(0.0), ModelTag::Bsm)
        .with_diagnostic("d_plus", d_plus)
        .with_diagnostic("d_minus", d_minus))
}
