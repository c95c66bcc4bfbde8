//! Subjective opinions, evidence, prior weight, projected probability, and
//! the bijection with Dirichlet concentration parameters.
//!
//! An opinion over a C-class domain is the triple (belief mass, uncertainty
//! mass, base rate) with Σb + u = 1. Given a prior weight W it maps
//! bijectively onto a Dirichlet PDF through α(x) = b(x)·W/u + a(x)·W; with a
//! uniform base rate and W = C·λ this reduces to α = e + λ for an evidence
//! vector e.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the additivity invariant Σb + u = 1.
pub const ADDITIVITY_TOL: f64 = 1e-12;

/// Per-domain configuration: class count, base rate, and per-class prior
/// weight λ (so the full prior weight is W = C·λ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainConfig {
    num_classes: usize,
    base_rate: Vec<f64>,
    lambda: f64,
}

impl DomainConfig {
    /// Uniform base rate over `num_classes` classes.
    pub fn uniform(num_classes: usize, lambda: f64) -> Result<Self> {
        let a = vec![1.0 / num_classes as f64; num_classes];
        Self::with_base_rate(num_classes, lambda, a)
    }

    pub fn with_base_rate(num_classes: usize, lambda: f64, base_rate: Vec<f64>) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::invalid("DomainConfig", "need at least 2 classes"));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::invalid(
                "DomainConfig",
                format!("lambda must be positive, got {lambda}"),
            ));
        }
        check_base_rate(num_classes, &base_rate)?;
        Ok(DomainConfig {
            num_classes,
            base_rate,
            lambda,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn base_rate(&self) -> &[f64] {
        &self.base_rate
    }

    /// Full prior weight W = C·λ.
    pub fn prior_weight(&self) -> f64 {
        self.num_classes as f64 * self.lambda
    }
}

fn check_base_rate(num_classes: usize, a: &[f64]) -> Result<()> {
    if a.len() != num_classes {
        return Err(Error::DimensionMismatch {
            op: "base_rate",
            expected: num_classes,
            got: a.len(),
        });
    }
    if a.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::invalid("base_rate", "entries must be non-negative"));
    }
    let sum: f64 = a.iter().sum();
    if (sum - 1.0).abs() > ADDITIVITY_TOL {
        return Err(Error::invalid(
            "base_rate",
            format!("entries must sum to 1, got {sum}"),
        ));
    }
    Ok(())
}

/// Non-negative per-class evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceVector(Vec<f64>);

impl EvidenceVector {
    pub fn new(e: Vec<f64>) -> Result<Self> {
        if e.is_empty() {
            return Err(Error::invalid("EvidenceVector", "must be non-empty"));
        }
        if let Some(bad) = e.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::invalid(
                "EvidenceVector",
                format!("evidence must be finite and non-negative, got {bad}"),
            ));
        }
        Ok(EvidenceVector(e))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// A subjective opinion: belief mass per class, uncertainty mass, base rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Opinion {
    belief: Vec<f64>,
    uncertainty: f64,
    base_rate: Vec<f64>,
}

impl Opinion {
    /// Validates non-negativity and the additivity requirement Σb + u = 1.
    pub fn new(belief: Vec<f64>, uncertainty: f64, base_rate: Vec<f64>) -> Result<Self> {
        if belief.iter().any(|&b| !b.is_finite() || b < 0.0) {
            return Err(Error::invalid("Opinion", "belief mass must be non-negative"));
        }
        if !(uncertainty.is_finite() && uncertainty >= 0.0) {
            return Err(Error::invalid(
                "Opinion",
                format!("uncertainty mass must be non-negative, got {uncertainty}"),
            ));
        }
        check_base_rate(belief.len(), &base_rate)?;
        let total: f64 = belief.iter().sum::<f64>() + uncertainty;
        if (total - 1.0).abs() > ADDITIVITY_TOL {
            return Err(Error::invalid(
                "Opinion",
                format!("belief + uncertainty must sum to 1, got {total}"),
            ));
        }
        Ok(Opinion {
            belief,
            uncertainty,
            base_rate,
        })
    }

    /// The vacuous opinion: zero belief, uncertainty mass 1.
    pub fn vacuous(base_rate: Vec<f64>) -> Result<Self> {
        let c = base_rate.len();
        Opinion::new(vec![0.0; c], 1.0, base_rate)
    }

    /// Forms the opinion b = e/S, u = Cλ/S with S = Σe + Cλ.
    pub fn from_evidence(e: &EvidenceVector, cfg: &DomainConfig) -> Result<Self> {
        if e.len() != cfg.num_classes() {
            return Err(Error::DimensionMismatch {
                op: "opinion_from_evidence",
                expected: cfg.num_classes(),
                got: e.len(),
            });
        }
        let w = cfg.prior_weight();
        let s = e.total() + w;
        let belief = e.as_slice().iter().map(|&ev| ev / s).collect();
        Opinion::new(belief, w / s, cfg.base_rate().to_vec())
    }

    pub fn belief(&self) -> &[f64] {
        &self.belief
    }

    pub fn uncertainty(&self) -> f64 {
        self.uncertainty
    }

    pub fn base_rate(&self) -> &[f64] {
        &self.base_rate
    }

    pub fn num_classes(&self) -> usize {
        self.belief.len()
    }

    /// P(x) = b(x) + a(x)·u, which always sums to 1.
    pub fn projected_probability(&self) -> Vec<f64> {
        self.belief
            .iter()
            .zip(&self.base_rate)
            .map(|(&b, &a)| b + a * self.uncertainty)
            .collect()
    }

    /// Maps the opinion to its Dirichlet image α(x) = b(x)·W/u + a(x)·W.
    ///
    /// Fails with a degenerate-opinion error when u = 0, where the
    /// concentration would be infinite.
    pub fn to_dirichlet(&self, prior_weight: f64) -> Result<DirichletParams> {
        if !(prior_weight.is_finite() && prior_weight > 0.0) {
            return Err(Error::invalid(
                "opinion_to_dirichlet",
                format!("prior weight must be positive, got {prior_weight}"),
            ));
        }
        if self.uncertainty <= 0.0 {
            return Err(Error::DegenerateOpinion);
        }
        let alpha = self
            .belief
            .iter()
            .zip(&self.base_rate)
            .map(|(&b, &a)| b * prior_weight / self.uncertainty + a * prior_weight)
            .collect();
        DirichletParams::new(alpha)
    }

    /// Inverse map: u = W/S and b(x) = (α(x) − a(x)·W)/S.
    ///
    /// Requires α(x) ≥ a(x)·W so belief stays non-negative.
    pub fn from_dirichlet(d: &DirichletParams, prior_weight: f64, base_rate: &[f64]) -> Result<Self> {
        if !(prior_weight.is_finite() && prior_weight > 0.0) {
            return Err(Error::invalid(
                "dirichlet_to_opinion",
                format!("prior weight must be positive, got {prior_weight}"),
            ));
        }
        check_base_rate(d.num_classes(), base_rate)?;
        let s = d.sum();
        let mut belief = Vec::with_capacity(d.num_classes());
        for (&alpha, &a) in d.alpha().iter().zip(base_rate) {
            let b = (alpha - a * prior_weight) / s;
            if b < -ADDITIVITY_TOL {
                return Err(Error::invalid(
                    "dirichlet_to_opinion",
                    format!("alpha {alpha} below base-rate floor {}", a * prior_weight),
                ));
            }
            belief.push(b.max(0.0));
        }
        Opinion::new(belief, prior_weight / s, base_rate.to_vec())
    }

    /// Index of the largest projected probability, lowest index on ties.
    pub fn argmax_projected(&self) -> usize {
        argmax(&self.projected_probability())
    }
}

/// Dirichlet concentration parameters with the cached sum S = Σα.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletParams {
    alpha: Vec<f64>,
    sum: f64,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::invalid(
                "DirichletParams",
                "need at least 2 concentration entries",
            ));
        }
        if let Some(bad) = alpha.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::invalid(
                "DirichletParams",
                format!("concentration entries must be positive, got {bad}"),
            ));
        }
        let sum = alpha.iter().sum();
        Ok(DirichletParams { alpha, sum })
    }

    /// α = e + λ, the evidence form of the concentration parameter.
    pub fn from_evidence(e: &EvidenceVector, cfg: &DomainConfig) -> Result<Self> {
        if e.len() != cfg.num_classes() {
            return Err(Error::DimensionMismatch {
                op: "dirichlet_from_evidence",
                expected: cfg.num_classes(),
                got: e.len(),
            });
        }
        let alpha = e.as_slice().iter().map(|&ev| ev + cfg.lambda()).collect();
        DirichletParams::new(alpha)
    }

    /// The symmetric parameter λ·1 bijective to the vacuous opinion.
    pub fn scaled_uniform(num_classes: usize, lambda: f64) -> Result<Self> {
        DirichletParams::new(vec![lambda; num_classes])
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn num_classes(&self) -> usize {
        self.alpha.len()
    }
}

/// The λ = 0 path: the pure evidence proportion e(x)/Σe.
///
/// Kept separate from the opinion calculus because the bijection requires a
/// positive prior weight; guarded against an all-zero evidence vector.
pub fn proportion_probability(e: &EvidenceVector) -> Result<Vec<f64>> {
    let total = e.total();
    if total <= 0.0 {
        return Err(Error::domain(
            "proportion_probability",
            "total evidence is zero; the zero-prior-weight limit is undefined",
        ));
    }
    Ok(e.as_slice().iter().map(|&ev| ev / total).collect())
}

/// Lowest index attaining the maximum.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
