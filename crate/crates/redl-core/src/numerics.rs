//! Scalar special functions and evidence (output activation) functions.
//!
//! `lgamma`, `digamma` and `trigamma` are evaluated with a Stirling-type
//! asymptotic expansion after shifting the argument above 10 via the
//! recurrences ln Γ(x+1) = ln Γ(x) + ln x, ψ(x+1) = ψ(x) + 1/x and
//! ψ₁(x+1) = ψ₁(x) − 1/x². Absolute accuracy is ~1e-14 for arguments of
//! moderate size; for very large arguments the error is limited by the
//! f64 representation of the result itself (relative ~1e-15).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ln(√(2π))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// B₂ₙ / (2n(2n−1)) for the ln Γ asymptotic series.
const LGAMMA_SERIES: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// B₂ₙ / (2n) for the ψ asymptotic series.
const DIGAMMA_SERIES: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// B₂ₙ for the ψ₁ asymptotic series.
const TRIGAMMA_SERIES: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Arguments at or above this use the asymptotic series directly.
const ASYMPTOTIC_THRESHOLD: f64 = 10.0;

fn check_positive(op: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::domain(op, format!("argument must be finite, got {x}")));
    }
    if x <= 0.0 {
        return Err(Error::domain(op, format!("argument must be positive, got {x}")));
    }
    Ok(())
}

fn horner(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c)
}

pub(crate) fn lgamma_raw(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_THRESHOLD {
        shift += z.ln();
        z += 1.0;
    }
    let r = 1.0 / (z * z);
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + horner(&LGAMMA_SERIES, r) / z - shift
}

pub(crate) fn digamma_raw(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_THRESHOLD {
        shift += 1.0 / z;
        z += 1.0;
    }
    let r = 1.0 / (z * z);
    z.ln() - 0.5 / z - r * horner(&DIGAMMA_SERIES, r) - shift
}

pub(crate) fn trigamma_raw(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_THRESHOLD {
        shift += 1.0 / (z * z);
        z += 1.0;
    }
    let r = 1.0 / (z * z);
    1.0 / z + 0.5 * r + r / z * horner(&TRIGAMMA_SERIES, r) + shift
}

/// ln Γ(x) for x > 0.
pub fn lgamma(x: f64) -> Result<f64> {
    check_positive("lgamma", x)?;
    Ok(lgamma_raw(x))
}

/// Digamma function ψ(x) = d/dx ln Γ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    Ok(digamma_raw(x))
}

/// Trigamma function ψ₁(x) = d/dx ψ(x) for x > 0.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive("trigamma", x)?;
    Ok(trigamma_raw(x))
}

/// Numerically stable ln(1 + eˣ).
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Logistic sigmoid, the derivative of softplus.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn default_clamp_lo() -> f64 {
    -10.0
}

fn default_clamp_hi() -> f64 {
    10.0
}

/// Non-negative output activation mapping logits to evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvidenceFunction {
    /// max(0, x); zero for non-positive logits.
    Relu,
    /// ln(1 + eˣ); strictly positive with a gradual growth rate.
    Softplus,
    /// exp(x) with the input clipped to [clamp_lo, clamp_hi] first.
    ClampedExp {
        #[serde(default = "default_clamp_lo")]
        clamp_lo: f64,
        #[serde(default = "default_clamp_hi")]
        clamp_hi: f64,
    },
}

impl EvidenceFunction {
    /// Clamped exponential with the default ±10 overflow guard.
    pub fn clamped_exp() -> Self {
        EvidenceFunction::ClampedExp {
            clamp_lo: default_clamp_lo(),
            clamp_hi: default_clamp_hi(),
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            EvidenceFunction::Relu => x.max(0.0),
            EvidenceFunction::Softplus => softplus(x),
            EvidenceFunction::ClampedExp { clamp_lo, clamp_hi } => {
                x.clamp(clamp_lo, clamp_hi).exp()
            }
        }
    }

    /// Derivative of the activation; the kinks of relu and of the clamp
    /// boundaries take the one-sided value used in training.
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            EvidenceFunction::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            EvidenceFunction::Softplus => sigmoid(x),
            EvidenceFunction::ClampedExp { clamp_lo, clamp_hi } => {
                if x > clamp_lo && x < clamp_hi {
                    x.exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Elementwise application, rejecting non-finite logits.
    pub fn apply_slice(&self, logits: &[f64]) -> Result<Vec<f64>> {
        if let Some(bad) = logits.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(
                "apply_evidence_fn",
                format!("logits must be finite, got {bad}"),
            ));
        }
        Ok(logits.iter().map(|&x| self.apply(x)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Reference values computed with 30-digit arithmetic before the build.
    const LGAMMA_REF: [(f64, f64); 14] = [
        (0.001, 6.9071788853838536825),
        (0.01, 4.5994798780420217225),
        (0.1, 2.2527126517342059599),
        (0.5, 0.57236494292470008707),
        (1.0, 0.0),
        (1.5, -0.12078223763524522235),
        (2.0, 0.0),
        (3.5, 1.2009736023470742248),
        (5.0, 3.1780538303479456196),
        (10.1, 13.027526738633237959),
        (25.0, 54.78472939811231919),
        (100.0, 359.13420536957539878),
        (1000.0, 5905.2204232091812118),
        (1e6, 12815504.56914761166),
    ];

    const DIGAMMA_REF: [(f64, f64); 14] = [
        (0.001, -1000.5755719318103005),
        (0.01, -100.5608854578686745),
        (0.1, -10.423754940411076795),
        (0.5, -1.9635100260214234794),
        (1.0, -0.57721566490153286061),
        (1.5, 0.036489973978576520559),
        (2.0, 0.42278433509846713939),
        (3.5, 1.1031566406452431872),
        (5.0, 1.5061176684318004727),
        (10.1, 2.2622143570941481605),
        (25.0, 3.1987425128519740085),
        (100.0, 4.6001618527380874002),
        (1000.0, 6.9072551956488120521),
        (1e6, 13.815510057964190771),
    ];

    const TRIGAMMA_REF: [(f64, f64); 14] = [
        (0.001, 1000001.642533195869),
        (0.01, 10001.62121352831322),
        (0.1, 101.43329915079275882),
        (0.5, 4.9348022005446793094),
        (1.0, 1.6449340668482264365),
        (1.5, 0.93480220054467930942),
        (2.0, 0.64493406684822643647),
        (3.5, 0.33035775610023486497),
        (5.0, 0.22132295573711532536),
        (10.1, 0.10407283129749604065),
        (25.0, 0.040810663257225579187),
        (100.0, 0.010050166663333571395),
        (1000.0, 0.0010005001666666333334),
        (1e6, 1.0000005000001666667e-6),
    ];

    /// abs error for small magnitudes, relative once the value itself is large.
    fn assert_close(got: f64, want: f64, tol: f64) {
        let scale = 1.0f64.max(want.abs());
        assert!(
            (got - want).abs() <= tol * scale,
            "got {got}, want {want} (scaled tol {})",
            tol * scale
        );
    }

    #[test]
    fn lgamma_reference_values() {
        for &(x, want) in &LGAMMA_REF {
            assert_close(lgamma(x).unwrap(), want, 1e-13);
        }
    }

    #[test]
    fn digamma_reference_values() {
        for &(x, want) in &DIGAMMA_REF {
            assert_close(digamma(x).unwrap(), want, 1e-13);
        }
    }

    #[test]
    fn trigamma_reference_values() {
        for &(x, want) in &TRIGAMMA_REF {
            assert_close(trigamma(x).unwrap(), want, 1e-13);
        }
    }

    #[test]
    fn spec_point_values() {
        assert!((lgamma(1.0).unwrap()).abs() < 1e-15);
        assert!((lgamma(2.0).unwrap()).abs() < 1e-15);
        assert!((lgamma(0.5).unwrap() - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
        assert!((digamma(1.0).unwrap() + 0.57721566490153286061).abs() < 1e-13);
        assert!((digamma(2.0).unwrap() - (digamma(1.0).unwrap() + 1.0)).abs() < 1e-13);
        assert!((digamma(0.5).unwrap() + 1.9635100260214234794).abs() < 1e-13);
        assert!((trigamma(1.0).unwrap() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-13);
    }

    #[test]
    fn domain_errors() {
        for x in [0.0, -1.0, f64::NAN, f64::INFINITY, f64::NEG_INFINITY] {
            assert!(lgamma(x).is_err());
            assert!(digamma(x).is_err());
            assert!(trigamma(x).is_err());
        }
    }

    #[test]
    fn evidence_function_spec_examples() {
        let sp = EvidenceFunction::Softplus;
        assert!((sp.apply(0.0) - std::f64::consts::LN_2).abs() < 1e-15);

        let relu = EvidenceFunction::Relu;
        assert_eq!(relu.apply_slice(&[-3.0, 2.0]).unwrap(), vec![0.0, 2.0]);

        let ce = EvidenceFunction::clamped_exp();
        assert!((ce.apply(15.0) - 10.0f64.exp()).abs() < 1e-9);
        assert!((ce.apply(15.0) - 22026.465794806718).abs() < 1e-9);
    }

    #[test]
    fn evidence_function_rejects_non_finite() {
        assert!(EvidenceFunction::Softplus.apply_slice(&[f64::NAN]).is_err());
        assert!(EvidenceFunction::Relu.apply_slice(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn softplus_approaches_relu() {
        for x in [-40.0, -30.0, 30.0, 40.0] {
            assert!((softplus(x) - x.max(0.0)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn digamma_recurrence(x in 1e-3f64..1e3) {
            let lhs = digamma_raw(x + 1.0);
            let rhs = digamma_raw(x) + 1.0 / x;
            let scale = 1.0f64.max(rhs.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn lgamma_recurrence(x in 1e-3f64..1e3) {
            let lhs = lgamma_raw(x + 1.0);
            let rhs = lgamma_raw(x) + x.ln();
            let scale = 1.0f64.max(lgamma_raw(x).abs()).max(lgamma_raw(x + 1.0).abs());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn trigamma_recurrence(x in 1e-3f64..1e3) {
            let lhs = trigamma_raw(x + 1.0);
            let rhs = trigamma_raw(x) - 1.0 / (x * x);
            let scale = 1.0f64.max(rhs.abs());
            prop_assert!((lhs - rhs).abs() <= 1e-11 * scale);
        }

        #[test]
        fn evidence_functions_monotone_and_non_negative(
            a in -20.0f64..20.0,
            b in -20.0f64..20.0,
        ) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for f in [
                EvidenceFunction::Relu,
                EvidenceFunction::Softplus,
                EvidenceFunction::clamped_exp(),
            ] {
                prop_assert!(f.apply(lo) >= 0.0);
                prop_assert!(f.apply(lo) <= f.apply(hi) + 1e-15);
            }
            prop_assert!(EvidenceFunction::Softplus.apply(lo) > 0.0);
            prop_assert!(EvidenceFunction::clamped_exp().apply(lo) > 0.0);
        }
    }
}
