//! Contract and model descriptors shared by every pricer, and the admissibility
//! gate that decides whether an (option, model) pair can be priced.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Violation, ViolationCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

impl OptionKind {
    /// Exercise value of one unit at underlying price `s`.
    #[inline]
    pub fn intrinsic(self, s: f64, strike: f64) -> f64 {
        match self {
            OptionKind::Call => (s - strike).max(0.0),
            OptionKind::Put => (strike - s).max(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExerciseStyle {
    European,
    American,
}

/// A vanilla option contract together with the spot it is priced from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub kind: OptionKind,
    pub style: ExerciseStyle,
    pub strike: f64,
    /// Years to expiry.
    pub maturity: f64,
    pub spot: f64,
}

impl OptionSpec {
    pub fn new(kind: OptionKind, style: ExerciseStyle, strike: f64, maturity: f64, spot: f64) -> Self {
        Self { kind, style, strike, maturity, spot }
    }

    pub fn european(kind: OptionKind, strike: f64, maturity: f64, spot: f64) -> Self {
        Self::new(kind, ExerciseStyle::European, strike, maturity, spot)
    }

    pub fn american(kind: OptionKind, strike: f64, maturity: f64, spot: f64) -> Self {
        Self::new(kind, ExerciseStyle::American, strike, maturity, spot)
    }

    pub fn with_spot(self, spot: f64) -> Self {
        Self { spot, ..self }
    }

    pub fn with_strike(self, strike: f64) -> Self {
        Self { strike, ..self }
    }

    pub fn with_maturity(self, maturity: f64) -> Self {
        Self { maturity, ..self }
    }
}

/// Per-model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    /// Multi-period lattice with up/down factors and a per-period simple rate.
    Binomial { u: f64, d: f64, r: f64, steps: usize },
    /// Geometric Brownian motion with continuously compounded rate.
    Bsm { r: f64, sigma: f64 },
    /// Arithmetic Brownian motion; `sigma_n` is in price units per sqrt-year.
    Bachelier { sigma_n: f64 },
    /// Logistic local-volatility model with scale function b(T) = a * sqrt(T).
    Logistic { a: f64 },
}

impl ModelParams {
    pub fn tag(&self) -> ModelTag {
        match self {
            ModelParams::Binomial { .. } => ModelTag::Binomial,
            ModelParams::Bsm { .. } => ModelTag::Bsm,
            ModelParams::Bachelier { .. } => ModelTag::Bachelier,
            ModelParams::Logistic { .. } => ModelTag::Logistic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    Binomial,
    Bsm,
    Bachelier,
    Logistic,
}

impl ModelTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Binomial => "binomial",
            ModelTag::Bsm => "bsm",
            ModelTag::Bachelier => "bachelier",
            ModelTag::Logistic => "logistic",
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Output of every pricer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricingResult {
    pub price: f64,
    pub model: ModelTag,
    pub greeks: Option<BTreeMap<String, f64>>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl PricingResult {
    pub fn new(price: f64, model: ModelTag) -> Self {
        Self { price, model, greeks: None, diagnostics: BTreeMap::new() }
    }

    pub fn with_diagnostic(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }

    pub fn diagnostic(&self, key: &str) -> Option<f64> {
        self.diagnostics.get(key).copied()
    }
}

/// Checks every admissibility rule of the pair and reports all failures at once.
///
/// Bachelier and logistic models live on the whole real line, so they accept
/// negative spots and strikes. BSM needs strictly positive prices; the lattice
/// needs a positive spot and a nonnegative strike.
pub fn validate(spec: &OptionSpec, params: &ModelParams) -> Result<(), Vec<Violation>> {
    let mut errs = Vec::new();

    if !(spec.maturity > 0.0) || !spec.maturity.is_finite() {
        errs.push(Violation::new(
            ViolationCode::NonpositiveMaturity,
            format!("maturity must be positive and finite, got {}", spec.maturity),
        ));
    }
    if !spec.strike.is_finite() {
        errs.push(Violation::new(
            ViolationCode::NonfiniteStrike,
            format!("strike must be finite, got {}", spec.strike),
        ));
    }
    if !spec.spot.is_finite() {
        errs.push(Violation::new(ViolationCode::NonfiniteSpot, format!("spot must be finite, got {}", spec.spot)));
    }

    let need_finite = |name: &str, v: f64, errs: &mut Vec<Violation>| {
        if !v.is_finite() {
            errs.push(Violation::new(ViolationCode::NonfiniteParameter, format!("{name} must be finite, got {v}")));
            false
        } else {
            true
        }
    };

    match *params {
        ModelParams::Binomial { u, d, r, steps } => {
            let finite =
                need_finite("u", u, &mut errs) & need_finite("d", d, &mut errs) & need_finite("r", r, &mut errs);
            if spec.spot.is_finite() && spec.spot <= 0.0 {
                errs.push(Violation::new(
                    ViolationCode::NonpositiveSpot,
                    format!("binomial spot must be positive, got {}", spec.spot),
                ));
            }
            if spec.strike.is_finite() && spec.strike < 0.0 {
                errs.push(Violation::new(
                    ViolationCode::NonpositiveStrike,
                    format!("binomial strike must be nonnegative, got {}", spec.strike),
                ));
            }
            if steps == 0 {
                errs.push(Violation::new(ViolationCode::ZeroSteps, "lattice needs at least one step"));
            }
            if finite {
                if !(u > d && d > 0.0) {
                    errs.push(Violation::new(
                        ViolationCode::InvalidFactors,
                        format!("factors must satisfy u > d > 0, got u={u}, d={d}"),
                    ));
                } else if !(d < 1.0 + r && 1.0 + r < u) {
                    errs.push(Violation::new(
                        ViolationCode::NoArbitrageViolated,
                        format!("need d < 1+r < u, got d={d}, 1+r={}, u={u}", 1.0 + r),
                    ));
                }
            }
        }
        ModelParams::Bsm { r, sigma } => {
            need_finite("r", r, &mut errs);
            if !(sigma > 0.0) || !sigma.is_finite() {
                errs.push(Violation::new(
                    ViolationCode::NonpositiveVolatility,
                    format!("sigma must be positive and finite, got {sigma}"),
                ));
            }
            if spec.spot.is_finite() && spec.spot <= 0.0 {
                errs.push(Violation::new(
                    ViolationCode::NonpositiveSpot,
                    format!("BSM spot must be positive, got {}", spec.spot),
                ));
            }
            if spec.strike.is_finite() && spec.strike <= 0.0 {
                errs.push(Violation::new(
                    ViolationCode::NonpositiveStrike,
                    format!("BSM strike must be positive, got {}", spec.strike),
                ));
            }
        }
        ModelParams::Bachelier { sigma_n } => {
            if !(sigma_n > 0.0) || !sigma_n.is_finite() {
                errs.push(Violation::new(
                    ViolationCode::NonpositiveVolatility,
                    format!("sigma_n must be positive and finite, got {sigma_n}"),
                ));
            }
        }
        ModelParams::Logistic { a } => {
            if !(a > 0.0) || !a.is_finite() {
                errs.push(Violation::new(
                    ViolationCode::NonpositiveVolatility,
                    format!("logistic scale a must be positive and finite, got {a}"),
                ));
            }
        }
    }

    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

/// [`validate`] lifted into the crate error type.
pub fn ensure_valid(spec: &OptionSpec, params: &ModelParams) -> crate::Result<()> {
    validate(spec, params).map_err(crate::PricingError::Validation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(r: Result<(), Vec<Violation>>) -> Vec<ViolationCode> {
        r.err().unwrap_or_default().into_iter().map(|v| v.code).collect()
    }

    fn call() -> OptionSpec {
        OptionSpec::european(OptionKind::Call, 100.0, 1.0, 100.0)
    }

    #[test]
    fn binomial_tree_factors_are_admissible() {
        let p = ModelParams::Binomial { u: 1.1, d: 0.9, r: 0.0, steps: 3 };
        assert!(validate(&call(), &p).is_ok());
    }

    #[test]
    fn high_rate_violates_no_arbitrage() {
        let p = ModelParams::Binomial { u: 1.1, d: 0.9, r: 0.25, steps: 3 };
        assert_eq!(codes(validate(&call(), &p)), vec![ViolationCode::NoArbitrageViolated]);
    }

    #[test]
    fn zero_maturity_rejected() {
        let p = ModelParams::Bsm { r: 0.05, sigma: 0.2 };
        let spec = call().with_maturity(0.0);
        assert_eq!(codes(validate(&spec, &p)), vec![ViolationCode::NonpositiveMaturity]);
        assert_eq!(ViolationCode::NonpositiveMaturity.as_str(), "NONPOSITIVE_MATURITY");
    }

    #[test]
    fn all_violations_reported_together() {
        let p = ModelParams::Bsm { r: f64::NAN, sigma: -1.0 };
        let spec = OptionSpec::european(OptionKind::Put, -5.0, -1.0, -3.0);
        let c = codes(validate(&spec, &p));
        assert!(c.contains(&ViolationCode::NonpositiveMaturity));
        assert!(c.contains(&ViolationCode::NonfiniteParameter));
        assert!(c.contains(&ViolationCode::NonpositiveVolatility));
        assert!(c.contains(&ViolationCode::NonpositiveSpot));
        assert!(c.contains(&ViolationCode::NonpositiveStrike));
    }

    #[test]
    fn real_line_models_accept_negative_prices() {
        let spec = OptionSpec::european(OptionKind::Put, -2.0, 1.0, -1.0);
        assert!(validate(&spec, &ModelParams::Bachelier { sigma_n: 1.0 }).is_ok());
        assert!(validate(&spec, &ModelParams::Logistic { a: 1.0 }).is_ok());
        assert!(validate(&spec, &ModelParams::Logistic { a: 0.0 }).is_err());
    }

    #[test]
    fn bad_factors_and_steps() {
        let p = ModelParams::Binomial { u: 0.9, d: 1.1, r: 0.0, steps: 0 };
        let c = codes(validate(&call(), &p));
        assert_eq!(c, vec![ViolationCode::ZeroSteps, ViolationCode::InvalidFactors]);
    }

    #[test]
    fn rate_sweep_matches_gate_exactly() {
        let (u, d) = (1.1, 0.9);
        for i in -400..=400 {
            let r = i as f64 * 1e-3;
            let p = ModelParams::Binomial { u, d, r, steps: 1 };
            let expect = d < 1.0 + r && 1.0 + r < u;
            assert_eq!(validate(&call(), &p).is_ok(), expect, "r={r}");
        }
        // exact boundaries
        for r in [d - 1.0, u - 1.0] {
            let p = ModelParams::Binomial { u, d, r, steps: 1 };
            let one_plus = 1.0 + r;
            assert_eq!(validate(&call(), &p).is_ok(), d < one_plus && one_plus < u);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn validate_is_total(
                k in prop::num::f64::ANY, t in prop::num::f64::ANY, s in prop::num::f64::ANY,
                u in prop::num::f64::ANY, d in prop::num::f64::ANY, r in prop::num::f64::ANY,
                steps in 0usize..5, which in 0u8..4,
            ) {
                let spec = OptionSpec::european(OptionKind::Call, k, t, s);
                let params = match which {
                    0 => ModelParams::Binomial { u, d, r, steps },
                    1 => ModelParams::Bsm { r, sigma: u },
                    2 => ModelParams::Bachelier { sigma_n: d },
                    _ => ModelParams::Logistic { a: r },
                };
                if let Err(v) = validate(&spec, &params) {
                    prop_assert!(!v.is_empty());
                }
            }

            #[test]
            fn gate_iff_for_positive_factors(d in 0.01f64..2.0, gap in 0.001f64..1.0, r in -1.0f64..2.0) {
                let u = d + gap;
                let p = ModelParams::Binomial { u, d, r, steps: 2 };
                prop_assert_eq!(validate(&call(), &p).is_ok(), d < 1.0 + r && 1.0 + r < u);
            }
        }
    }
}
