use crate::error::{PricingError, Result};
use crate::normal::{norm_cdf, norm_pdf};
use crate::types::{ModelTag, PricingResult};

fn scale(maturity: f64, sigma_n: f64) -> Result<f64> {
    if !(maturity > 0.0 && sigma_n > 0.0) || !maturity.is_finite() || !sigma_n.is_finite() {
        return Err(PricingError::domain(format!(
            "Bachelier needs T > 0 and sigma_n > 0 (T={maturity}, sigma_n={sigma_n})"
        )));
    }
    Ok(sigma_n * maturity.sqrt())
}

fn check_prices(k: f64, s0: f64) -> Result<()> {
    if k.is_finite() && s0.is_finite() {
        Ok(())
    } else {
        Err(PricingError::domain(format!("non-finite strike or spot (k={k}, s0={s0})")))
    }
}

/// Normal-model put value in standardized units, z N(z) + N'(z).
#[inline]
pub fn normal_put_value(z: f64) -> f64 {
    z * norm_cdf(z) + norm_pdf(z)
}

/// Undiscounted Bachelier put: (k - s0) N(m) + b N'(m), with b = sigma_n sqrt(T), m = (k - s0)/b.
pub fn bachelier_put(k: f64, s0: f64, maturity: f64, sigma_n: f64) -> Result<PricingResult> {
    check_prices(k, s0)?;
    let b = scale(maturity, sigma_n)?;
    let m = (k - s0) / b;
    let price = (k - s0) * norm_cdf(m) + b * norm_pdf(m);
    Ok(PricingResult::new(price.max(0.0), ModelTag::Bachelier).with_diagnostic("b", b).with_diagnostic("m", m))
}

/// Undiscounted Bachelier call: (s0 - k) N(-m) + b N'(m).
pub fn bachelier_call(k: f64, s0: f64, maturity: f64, sigma_n: f64) -> Result<PricingResult> {
    check_prices(k, s0)?;
    let b = scale(maturity, sigma_n)?;
    let m = (k - s0) / b;
    let price = (s0 - k) * norm_cdf(-m) + b * norm_pdf(m);
    Ok(PricingResult::new(price.max(0.0), ModelTag::Bachelier).with_diagnostic("b", b).with_diagnostic("m", m))
}

/// Binary put N(m), the strike derivative of the put.
pub fn bachelier_binary_put(k: f64, s0: f64, maturity: f64, sigma_n: f64) -> Result<PricingResult> {
    check_prices(k, s0)?;
    let b = scale(maturity, sigma_n)?;
    let m = (k - s0) / b;
    Ok(PricingResult::new(norm_cdf(m), ModelTag::Bachelier).with_diagnostic("m", m))
}
