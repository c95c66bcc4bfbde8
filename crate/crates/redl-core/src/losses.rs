//! The evidential loss family with analytic gradients with respect to logits.
//!
//! Per-sample losses over a C-class domain with one-hot targets:
//!
//! * `edl_mse` — the Dirichlet-integrated MSE, i.e. the MSE on the projected
//!   probability plus (optionally) the variance-minimizing term;
//! * `re_edl_mse` — MSE applied directly to the projected probability;
//! * `ce_projected` — cross-entropy on the projected probability;
//! * `softmax_mse` / `softmax_ce` — baselines on the softmax head.
//!
//! Evidential forms may add the KL regularizer that drives the non-target
//! concentration towards the vacuous value λ, scaled by a constant or
//! annealed coefficient μ_t.

use serde::{Deserialize, Serialize};

use crate::dirichlet::{kl_to_scaled_uniform, KlMode};
use crate::error::{Error, Result};
use crate::numerics::{trigamma_raw, EvidenceFunction};
use crate::sl::DirichletParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossForm {
    EdlMse,
    ReEdlMse,
    CeProjected,
    SoftmaxMse,
    SoftmaxCe,
}

impl LossForm {
    /// Whether the form goes through the evidence head (as opposed to softmax).
    pub fn is_evidential(self) -> bool {
        !matches!(self, LossForm::SoftmaxMse | LossForm::SoftmaxCe)
    }
}

/// Schedule for the KL coefficient μ_t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KlSchedule {
    /// μ_t = μ · min(1, t/horizon); the usual horizon is 10 epochs.
    Annealed { horizon: u32 },
    /// μ_t = μ for every epoch.
    Constant,
}

impl Default for KlSchedule {
    fn default() -> Self {
        KlSchedule::Annealed { horizon: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub form: LossForm,
    /// Per-class prior weight λ = W/C.
    pub lambda: f64,
    /// Adds the Dirichlet variance term to `edl_mse`.
    pub use_variance_term: bool,
    /// Base KL coefficient μ; 0 disables the regularizer.
    pub kl_coefficient: f64,
    pub kl_schedule: KlSchedule,
    pub evidence_fn: EvidenceFunction,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            form: LossForm::ReEdlMse,
            lambda: 1.0,
            use_variance_term: false,
            kl_coefficient: 0.0,
            kl_schedule: KlSchedule::default(),
            evidence_fn: EvidenceFunction::Softplus,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::invalid(
                "LossConfig",
                format!("lambda must be positive, got {}", self.lambda),
            ));
        }
        if !(self.kl_coefficient.is_finite() && self.kl_coefficient >= 0.0) {
            return Err(Error::invalid(
                "LossConfig",
                format!("kl_coefficient must be >= 0, got {}", self.kl_coefficient),
            ));
        }
        if let KlSchedule::Annealed { horizon } = self.kl_schedule {
            if horizon == 0 {
                return Err(Error::invalid("LossConfig", "anneal horizon must be >= 1"));
            }
        }
        Ok(())
    }

    /// μ_t for epoch t.
    pub fn kl_coefficient_at(&self, epoch: u32) -> f64 {
        match self.kl_schedule {
            KlSchedule::Constant => self.kl_coefficient,
            KlSchedule::Annealed { horizon } => {
                self.kl_coefficient * 1.0f64.min(epoch as f64 / horizon as f64)
            }
        }
    }
}

/// Checks the one-hot target and returns the target index.
fn target_index(logits: &[f64], one_hot: &[f64], op: &'static str) -> Result<usize> {
    if one_hot.len() != logits.len() {
        return Err(Error::DimensionMismatch {
            op,
            expected: logits.len(),
            got: one_hot.len(),
        });
    }
    if logits.len() < 2 {
        return Err(Error::invalid(op, "need at least 2 classes"));
    }
    let mut target = None;
    for (i, &y) in one_hot.iter().enumerate() {
        if y == 1.0 {
            if target.replace(i).is_some() {
                return Err(Error::invalid(op, "label has more than one hot entry"));
            }
        } else if y != 0.0 {
            return Err(Error::invalid(op, format!("label entry {y} is not 0 or 1")));
        }
    }
    target.ok_or_else(|| Error::invalid(op, "label has no hot entry"))
}

/// Evidence head: e = f(logits), α = e + λ, S = Σα, P = α/S.
struct EvidentialHead {
    alpha: Vec<f64>,
    s: f64,
    p: Vec<f64>,
}

fn evidential_head(logits: &[f64], cfg: &LossConfig) -> Result<EvidentialHead> {
    let evidence = cfg.evidence_fn.apply_slice(logits)?;
    let alpha: Vec<f64> = evidence.iter().map(|&e| e + cfg.lambda).collect();
    let s: f64 = alpha.iter().sum();
    let p: Vec<f64> = alpha.iter().map(|&a| a / s).collect();
    Ok(EvidentialHead { alpha, s, p })
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let exps: Vec<f64> = logits.iter().map(|&l| (l - m).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Σ Var[p(x)] = (S² − Σ α²) / (S²(S+1)).
pub fn variance_term(alpha: &DirichletParams) -> f64 {
    let s = alpha.sum();
    let q: f64 = alpha.alpha().iter().map(|&a| a * a).sum();
    (s * s - q) / (s * s * (s + 1.0))
}

/// MSE on the projected probability: Σ (y − P)².
pub fn re_edl_empirical_risk(logits: &[f64], one_hot: &[f64], cfg: &LossConfig) -> Result<f64> {
    target_index(logits, one_hot, "re_edl_empirical_risk")?;
    let head = evidential_head(logits, cfg)?;
    Ok(one_hot
        .iter()
        .zip(&head.p)
        .map(|(&y, &p)| (y - p) * (y - p))
        .sum())
}

/// The Dirichlet-integrated MSE: the projected-probability MSE plus, when
/// enabled, the variance term. Built as the literal sum of the two parts so
/// the decomposition identity holds exactly.
pub fn edl_empirical_risk(logits: &[f64], one_hot: &[f64], cfg: &LossConfig) -> Result<f64> {
    let mse = re_edl_empirical_risk(logits, one_hot, cfg)?;
    if cfg.use_variance_term {
        let head = evidential_head(logits, cfg)?;
        let alpha = DirichletParams::new(head.alpha)?;
        Ok(mse + variance_term(&alpha))
    } else {
        Ok(mse)
    }
}

/// Cross-entropy on the projected probability: −Σ y ln P.
pub fn ce_projected_risk(logits: &[f64], one_hot: &[f64], cfg: &LossConfig) -> Result<f64> {
    let t = target_index(logits, one_hot, "ce_projected_risk")?;
    let head = evidential_head(logits, cfg)?;
    Ok(-head.p[t].ln())
}

/// MSE on the softmax probability.
pub fn softmax_mse_risk(logits: &[f64], one_hot: &[f64]) -> Result<f64> {
    target_index(logits, one_hot, "softmax_mse_risk")?;
    let p = softmax(logits);
    Ok(one_hot
        .iter()
        .zip(&p)
        .map(|(&y, &pi)| (y - pi) * (y - pi))
        .sum())
}

/// Cross-entropy on the softmax probability.
pub fn softmax_ce_risk(logits: &[f64], one_hot: &[f64]) -> Result<f64> {
    let t = target_index(logits, one_hot, "softmax_ce_risk")?;
    let p = softmax(logits);
    Ok(-p[t].ln())
}

/// Dispatches on `cfg.form`.
pub fn empirical_risk(logits: &[f64], one_hot: &[f64], cfg: &LossConfig) -> Result<f64> {
    match cfg.form {
        LossForm::EdlMse => edl_empirical_risk(logits, one_hot, cfg),
        LossForm::ReEdlMse => re_edl_empirical_risk(logits, one_hot, cfg),
        LossForm::CeProjected => ce_projected_risk(logits, one_hot, cfg),
        LossForm::SoftmaxMse => softmax_mse_risk(logits, one_hot),
        LossForm::SoftmaxCe => softmax_ce_risk(logits, one_hot),
    }
}

/// The modified parameter vector α̃ = λ·y + (1 − y) ⊙ α.
fn substituted_alpha(head: &EvidentialHead, target: usize, lambda: f64) -> Vec<f64> {
    head.alpha
        .iter()
        .enumerate()
        .map(|(i, &a)| if i == target { lambda } else { a })
        .collect()
}

/// μ_t · KL(Dir(α̃) ‖ Dir(λ·1)) in the truncated (training) form.
///
/// The substitution fixes the target entry to the constant λ, so the term is
/// invariant to the target-class evidence and carries no gradient through it.
pub fn kl_regularizer(logits: &[f64], one_hot: &[f64], epoch: u32, cfg: &LossConfig) -> Result<f64> {
    let t = target_index(logits, one_hot, "kl_regularizer")?;
    let mu_t = cfg.kl_coefficient_at(epoch);
    if mu_t == 0.0 {
        return Ok(0.0);
    }
    let head = evidential_head(logits, cfg)?;
    let tilde = DirichletParams::new(substituted_alpha(&head, t, cfg.lambda))?;
    Ok(mu_t * kl_to_scaled_uniform(&tilde, cfg.lambda, KlMode::Truncated)?)
}

/// Empirical risk plus, for evidential forms, the KL regularizer.
pub fn total_loss(logits: &[f64], one_hot: &[f64], epoch: u32, cfg: &LossConfig) -> Result<f64> {
    let mut loss = empirical_risk(logits, one_hot, cfg)?;
    if cfg.form.is_evidential() && cfg.kl_coefficient > 0.0 {
        loss += kl_regularizer(logits, one_hot, epoch, cfg)?;
    }
    Ok(loss)
}

/// d(total loss)/d(logits), composed analytically per loss form.
pub fn loss_gradient(
    logits: &[f64],
    one_hot: &[f64],
    epoch: u32,
    cfg: &LossConfig,
) -> Result<Vec<f64>> {
    let t = target_index(logits, one_hot, "loss_gradient")?;
    match cfg.form {
        LossForm::SoftmaxCe => {
            let p = softmax(logits);
            Ok(p.iter().zip(one_hot).map(|(&pi, &y)| pi - y).collect())
        }
        LossForm::SoftmaxMse => {
            let p = softmax(logits);
            let dot: f64 = p.iter().zip(one_hot).map(|(&pi, &y)| (pi - y) * pi).sum();
            Ok(p
                .iter()
                .zip(one_hot)
                .map(|(&pi, &y)| 2.0 * pi * ((pi - y) - dot))
                .collect())
        }
        _ => {
            let head = evidential_head(logits, cfg)?;
            let mut de = vec![0.0; logits.len()];

            match cfg.form {
                LossForm::ReEdlMse | LossForm::EdlMse => {
                    add_mse_on_p_grad(&head, one_hot, 1.0, &mut de);
                    if cfg.form == LossForm::EdlMse && cfg.use_variance_term {
                        add_variance_grad(&head, 1.0, &mut de);
                    }
                }
                LossForm::CeProjected => {
                    // −ln P_t: (P_t − δ_tk) / (P_t · S)
                    let pt = head.p[t];
                    for (k, g) in de.iter_mut().enumerate() {
                        let delta = if k == t { 1.0 } else { 0.0 };
                        *g += (pt - delta) / (pt * head.s);
                    }
                }
                _ => unreachable!(),
            }

            let mu_t = if cfg.kl_coefficient > 0.0 {
                cfg.kl_coefficient_at(epoch)
            } else {
                0.0
            };
            if mu_t > 0.0 {
                add_kl_grad(&head, t, cfg.lambda, mu_t, &mut de);
            }

            Ok(de
                .iter()
                .zip(logits)
                .map(|(&g, &l)| g * cfg.evidence_fn.derivative(l))
                .collect())
        }
    }
}

/// d/de of Σ (y − P)² with P = α/S; dP_x/de_k = (δ_xk − P_x)/S.
fn add_mse_on_p_grad(head: &EvidentialHead, one_hot: &[f64], scale: f64, de: &mut [f64]) {
    let dot: f64 = head
        .p
        .iter()
        .zip(one_hot)
        .map(|(&p, &y)| (p - y) * p)
        .sum();
    for (k, g) in de.iter_mut().enumerate() {
        *g += scale * 2.0 * ((head.p[k] - one_hot[k]) - dot) / head.s;
    }
}

/// d/de of (S² − Σα²)/(S²(S+1)), with both the direct α_k path and the
/// shared S path.
fn add_variance_grad(head: &EvidentialHead, scale: f64, de: &mut [f64]) {
    let s = head.s;
    let q: f64 = head.alpha.iter().map(|&a| a * a).sum();
    let d = s * s * (s + 1.0);
    let ds_part = (2.0 * s * d - (s * s - q) * (3.0 * s * s + 2.0 * s)) / (d * d);
    for (g, &a) in de.iter_mut().zip(&head.alpha) {
        *g += scale * (-2.0 * a / d + ds_part);
    }
}

/// d/de of the truncated KL with the target entry substituted by the
/// constant λ: (α̃_k − λ)ψ₁(α̃_k) − (S̃ − Cλ)ψ₁(S̃) for non-target k, 0 for
/// the target.
fn add_kl_grad(head: &EvidentialHead, target: usize, lambda: f64, scale: f64, de: &mut [f64]) {
    let c = head.alpha.len() as f64;
    let s_tilde: f64 = head
        .alpha
        .iter()
        .enumerate()
        .map(|(i, &a)| if i == target { lambda } else { a })
        .sum();
    let excess = s_tilde - c * lambda;
    let tri_s = trigamma_raw(s_tilde);
    for (k, g) in de.iter_mut().enumerate() {
        if k == target {
            continue;
        }
        let a = head.alpha[k];
        *g += scale * ((a - lambda) * trigamma_raw(a) - excess * tri_s);
    }
}

/// Mean per-class evidence diagnostics for a batch of logits.
pub fn evidence_stats(
    logits: &[Vec<f64>],
    targets: &[usize],
    evidence_fn: &EvidenceFunction,
) -> Result<(f64, f64)> {
    if logits.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            op: "evidence_stats",
            expected: logits.len(),
            got: targets.len(),
        });
    }
    let mut target_sum = 0.0;
    let mut nontarget_sum = 0.0;
    let mut nontarget_count = 0usize;
    for (row, &t) in logits.iter().zip(targets) {
        let e = evidence_fn.apply_slice(row)?;
        for (i, &ev) in e.iter().enumerate() {
            if i == t {
                target_sum += ev;
            } else {
                nontarget_sum += ev;
                nontarget_count += 1;
            }
        }
    }
    let n = logits.len().max(1) as f64;
    Ok((target_sum / n, nontarget_sum / nontarget_count.max(1) as f64))
}
