//! Closed-form Dirichlet statistics, uncertainty measures, the KL-divergence
//! regularizer target, and a seeded sampling oracle.
//!
//! All entropies are in nats.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::numerics::{digamma_raw, lgamma_raw};
use crate::sl::DirichletParams;

impl DirichletParams {
    /// E[p(x)] = α(x)/S.
    pub fn expectation(&self) -> Vec<f64> {
        let s = self.sum();
        self.alpha().iter().map(|&a| a / s).collect()
    }

    /// Var[p(x)] = α(x)(S − α(x)) / (S²(S+1)).
    pub fn variance(&self) -> Vec<f64> {
        let s = self.sum();
        let denom = s * s * (s + 1.0);
        self.alpha().iter().map(|&a| a * (s - a) / denom).collect()
    }

    /// Differential entropy of the Dirichlet density itself:
    /// Σ ln Γ(α) − ln Γ(S) − Σ (α−1)(ψ(α) − ψ(S)).
    pub fn differential_entropy(&self) -> f64 {
        let s = self.sum();
        let psi_s = digamma_raw(s);
        let mut h = -lgamma_raw(s);
        for &a in self.alpha() {
            h += lgamma_raw(a) - (a - 1.0) * (digamma_raw(a) - psi_s);
        }
        h
    }

    /// Expected Shannon entropy of p under the Dirichlet:
    /// −Σ (α/S)(ψ(α+1) − ψ(S+1)).
    pub fn expected_entropy(&self) -> f64 {
        let s = self.sum();
        let psi_s1 = digamma_raw(s + 1.0);
        -self
            .alpha()
            .iter()
            .map(|&a| a / s * (digamma_raw(a + 1.0) - psi_s1))
            .sum::<f64>()
    }

    /// Mutual information between the label and p, the distributional part of
    /// the total uncertainty: −Σ (α/S)(ln(α/S) − ψ(α+1) + ψ(S+1)).
    pub fn mutual_information(&self) -> f64 {
        let s = self.sum();
        let psi_s1 = digamma_raw(s + 1.0);
        -self
            .alpha()
            .iter()
            .map(|&a| {
                let q = a / s;
                q * (q.ln() - digamma_raw(a + 1.0) + psi_s1)
            })
            .sum::<f64>()
    }

    /// Shannon entropy of the expectation vector, the total uncertainty.
    pub fn entropy_of_expectation(&self) -> f64 {
        let s = self.sum();
        -self
            .alpha()
            .iter()
            .map(|&a| {
                let q = a / s;
                q * q.ln()
            })
            .sum::<f64>()
    }

    /// Largest entry of the expectation vector (max projected probability).
    pub fn max_projected(&self) -> f64 {
        let s = self.sum();
        self.alpha().iter().fold(f64::MIN, |m, &a| m.max(a / s))
    }

    /// Uncertainty mass u = W/S of the bijective opinion.
    pub fn uncertainty_mass(&self, prior_weight: f64) -> f64 {
        prior_weight / self.sum()
    }
}

/// The four uncertainty measures plus expected entropy for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    /// Max projected probability (a confidence; higher means more certain).
    pub mp: f64,
    /// Uncertainty mass W/S.
    pub um: f64,
    /// Differential entropy of the Dirichlet density.
    pub de: f64,
    /// Mutual information (distributional uncertainty).
    pub mi: f64,
    /// Expected entropy (data uncertainty).
    pub ee: f64,
}

pub fn uncertainty_report(d: &DirichletParams, prior_weight: f64) -> UncertaintyReport {
    UncertaintyReport {
        mp: d.max_projected(),
        um: d.uncertainty_mass(prior_weight),
        de: d.differential_entropy(),
        mi: d.mutual_information(),
        ee: d.expected_entropy(),
    }
}

/// Which form of the regularizer KL term to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KlMode {
    /// The training form with the α̃-independent normalizer dropped.
    Truncated,
    /// The full KL(Dir(α̃) ‖ Dir(λ·1)); non-negative, zero iff α̃ = λ·1.
    Exact,
}

/// KL divergence from Dir(α̃) to the scaled uniform Dir(λ·1).
///
/// `Truncated` omits the constant C·ln Γ(λ) − ln Γ(Cλ), which does not depend
/// on α̃ and therefore leaves gradients unchanged.
pub fn kl_to_scaled_uniform(d_tilde: &DirichletParams, lambda: f64, mode: KlMode) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(
            "kl_to_scaled_uniform",
            format!("lambda must be positive, got {lambda}"),
        ));
    }
    let s = d_tilde.sum();
    let psi_s = digamma_raw(s);
    let mut kl = lgamma_raw(s);
    for &a in d_tilde.alpha() {
        kl += -lgamma_raw(a) + (a - lambda) * (digamma_raw(a) - psi_s);
    }
    if mode == KlMode::Exact {
        let c = d_tilde.num_classes() as f64;
        kl += c * lgamma_raw(lambda) - lgamma_raw(c * lambda);
    }
    Ok(kl)
}

/// Streams `n` i.i.d. Dirichlet draws into `visit`, reusing one buffer.
fn sample_stream(d: &DirichletParams, n: usize, seed: u64, mut visit: impl FnMut(&[f64])) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gammas: Vec<Gamma<f64>> = d
        .alpha()
        .iter()
        .map(|&a| Gamma::new(a, 1.0).expect("positive shape"))
        .collect();
    let mut row = vec![0.0; d.num_classes()];
    for _ in 0..n {
        for (v, g) in row.iter_mut().zip(&gammas) {
            *v = g.sample(&mut rng);
        }
        let total: f64 = row.iter().sum();
        for v in &mut row {
            *v /= total;
        }
        visit(&row);
    }
}

/// Draws `n` i.i.d. probability vectors from Dir(α) as normalized Gamma
/// variates. Deterministic for a given seed.
pub fn sample(d: &DirichletParams, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    sample_stream(d, n, seed, |row| out.push(row.to_vec()));
    out
}

/// Monte-Carlo estimators used as independent oracles for the closed forms.
///
/// Each returns `(estimate, standard_error)` and integrates directly over
/// sampled probability vectors without calling the closed-form counterpart.
pub mod montecarlo {
    use super::*;

    /// Running mean and standard error via Welford accumulation.
    struct Accumulator {
        n: u64,
        mean: f64,
        m2: f64,
    }

    impl Accumulator {
        fn new() -> Self {
            Accumulator {
                n: 0,
                mean: 0.0,
                m2: 0.0,
            }
        }

        fn push(&mut self, x: f64) {
            self.n += 1;
            let d = x - self.mean;
            self.mean += d / self.n as f64;
            self.m2 += d * (x - self.mean);
        }

        fn finish(&self) -> (f64, f64) {
            let var = if self.n > 1 {
                self.m2 / (self.n - 1) as f64
            } else {
                0.0
            };
            (self.mean, (var / self.n as f64).sqrt())
        }
    }

    fn estimate(d: &DirichletParams, n: usize, seed: u64, f: impl Fn(&[f64]) -> f64) -> (f64, f64) {
        let mut acc = Accumulator::new();
        sample_stream(d, n, seed, |row| acc.push(f(row)));
        acc.finish()
    }

    /// Log-density of Dir(α) at p.
    pub fn log_pdf(d: &DirichletParams, p: &[f64]) -> f64 {
        let mut lp = lgamma_raw(d.sum());
        for (&a, &pi) in d.alpha().iter().zip(p) {
            lp += -lgamma_raw(a) + (a - 1.0) * pi.ln();
        }
        lp
    }

    /// Sample mean of each coordinate.
    pub fn mean(d: &DirichletParams, n: usize, seed: u64) -> Vec<(f64, f64)> {
        let c = d.num_classes();
        let mut accs: Vec<Accumulator> = (0..c).map(|_| Accumulator::new()).collect();
        sample_stream(d, n, seed, |row| {
            for (acc, &v) in accs.iter_mut().zip(row) {
                acc.push(v);
            }
        });
        accs.iter().map(Accumulator::finish).collect()
    }

    /// Sample variance of each coordinate, with the squared deviation from
    /// the first pass's mean as the second-pass integrand.
    pub fn variance(d: &DirichletParams, n: usize, seed: u64) -> Vec<(f64, f64)> {
        let c = d.num_classes();
        let means: Vec<f64> = mean(d, n, seed).iter().map(|&(m, _)| m).collect();
        let mut accs: Vec<Accumulator> = (0..c).map(|_| Accumulator::new()).collect();
        sample_stream(d, n, seed, |row| {
            for ((acc, &v), &m) in accs.iter_mut().zip(row).zip(&means) {
                acc.push((v - m) * (v - m));
            }
        });
        accs.iter().map(Accumulator::finish).collect()
    }

    /// E[−Σ p ln p]: the expected-entropy integrand.
    pub fn expected_entropy(d: &DirichletParams, n: usize, seed: u64) -> (f64, f64) {
        estimate(d, n, seed, |p| {
            -p.iter()
                .map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 })
                .sum::<f64>()
        })
    }

    /// E[−ln Dir(p; α)] under p ∼ Dir(α): the differential entropy.
    pub fn differential_entropy(d: &DirichletParams, n: usize, seed: u64) -> (f64, f64) {
        estimate(d, n, seed, |p| -log_pdf(d, p))
    }

    /// Entropy of the sample mean minus the sampled expected entropy; the
    /// standard error is taken from the expected-entropy part, which
    /// dominates at large n.
    pub fn mutual_information(d: &DirichletParams, n: usize, seed: u64) -> (f64, f64) {
        let means = mean(d, n, seed);
        let total: f64 = -means
            .iter()
            .map(|&(m, _)| if m > 0.0 { m * m.ln() } else { 0.0 })
            .sum::<f64>();
        let (ee, se) = expected_entropy(d, n, seed ^ 0x9e37_79b9_7f4a_7c15);
        (total - ee, se)
    }

    /// E_{p∼Dir(α̃)}[ln Dir(p; α̃) − ln Dir(p; λ·1)]: the exact KL.
    pub fn kl_to_scaled_uniform(
        d_tilde: &DirichletParams,
        lambda: f64,
        n: usize,
        seed: u64,
    ) -> (f64, f64) {
        let target = DirichletParams::scaled_uniform(d_tilde.num_classes(), lambda)
            .expect("positive lambda");
        estimate(d_tilde, n, seed, |p| {
            log_pdf(d_tilde, p) - log_pdf(&target, p)
        })
    }

    /// E‖y − p‖² under p ∼ Dir(α): the integrated squared error.
    pub fn mse_risk(d: &DirichletParams, one_hot: &[f64], n: usize, seed: u64) -> (f64, f64) {
        estimate(d, n, seed, |p| {
            one_hot
                .iter()
                .zip(p)
                .map(|(&y, &v)| (y - v) * (y - v))
                .sum::<f64>()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dp(alpha: &[f64]) -> DirichletParams {
        DirichletParams::new(alpha.to_vec()).unwrap()
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(dp(&[1.0, 1.0]).expectation(), vec![0.5, 0.5]);
        let e = dp(&[2.5, 1.5]).expectation();
        assert!((e[0] - 0.625).abs() < 1e-15);
        assert!((e[1] - 0.375).abs() < 1e-15);
        for v in dp(&[0.3, 0.3, 0.3]).expectation() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn variance_examples() {
        for v in dp(&[1.0, 1.0]).variance() {
            assert!((v - 1.0 / 12.0).abs() < 1e-15);
        }
        for v in dp(&[10.0, 10.0]).variance() {
            assert!((v - 100.0 / (400.0 * 21.0)).abs() < 1e-15);
        }
        for v in dp(&[5e5, 5e5]).variance() {
            assert!(v <= 1e-6);
        }
    }

    #[test]
    fn differential_entropy_examples() {
        assert!(dp(&[1.0, 1.0]).differential_entropy().abs() < 1e-13);
        // −ln 6 + 5/3, from the closed form (also confirmed by the MC oracle
        // in the acceptance suite).
        assert!((dp(&[2.0, 2.0]).differential_entropy() - (-0.12509280256138833)).abs() < 1e-12);
        assert!((dp(&[5.0, 1.0]).differential_entropy() - (-0.80943791243410037)).abs() < 1e-12);
    }

    #[test]
    fn expected_entropy_examples() {
        assert!((dp(&[1.0, 1.0]).expected_entropy() - 0.5).abs() < 1e-13);
        assert!((dp(&[1000.0, 1000.0]).expected_entropy() - std::f64::consts::LN_2).abs() < 1e-3);
        assert!((dp(&[1.0, 1.0, 1.0]).expected_entropy() - 5.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn mutual_information_examples() {
        let want = std::f64::consts::LN_2 - 0.5;
        assert!((dp(&[1.0, 1.0]).mutual_information() - want).abs() < 1e-13);
        assert!(dp(&[1000.0, 1000.0]).mutual_information().abs() < 1e-3);
    }

    #[test]
    fn mi_decomposition_identity() {
        for alpha in [
            vec![1.0, 1.0],
            vec![2.5, 1.5],
            vec![0.3, 4.0, 1.1],
            vec![7.0, 0.2, 0.9, 3.3, 2.2],
        ] {
            let d = dp(&alpha);
            let lhs = d.mutual_information();
            let rhs = d.entropy_of_expectation() - d.expected_entropy();
            assert!((lhs - rhs).abs() < 1e-12, "alpha={alpha:?}");
        }
    }

    #[test]
    fn kl_zero_at_target() {
        for (c, lambda) in [(2usize, 1.0), (3, 0.4), (10, 1.3)] {
            let d = DirichletParams::scaled_uniform(c, lambda).unwrap();
            let kl = kl_to_scaled_uniform(&d, lambda, KlMode::Exact).unwrap();
            assert!(kl.abs() < 1e-12, "c={c} lambda={lambda}");
        }
    }

    #[test]
    fn kl_hand_example() {
        // KL(Dir([1,2]) ‖ Dir([1,1])) = ln 2 − 1/2.
        let d = dp(&[1.0, 2.0]);
        let want = std::f64::consts::LN_2 - 0.5;
        assert!((kl_to_scaled_uniform(&d, 1.0, KlMode::Exact).unwrap() - want).abs() < 1e-13);
        // λ = 1 makes the normalizer vanish, so both modes agree.
        assert!(
            (kl_to_scaled_uniform(&d, 1.0, KlMode::Truncated).unwrap() - want).abs() < 1e-13
        );
    }

    #[test]
    fn truncated_vs_exact_differ_by_normalizer() {
        let lambda = 0.6;
        let c = 4;
        let norm = c as f64 * lgamma_raw(lambda) - lgamma_raw(c as f64 * lambda);
        for alpha in [vec![0.6, 1.0, 2.0, 5.0], vec![3.0, 0.7, 0.6, 0.6]] {
            let d = dp(&alpha);
            let t = kl_to_scaled_uniform(&d, lambda, KlMode::Truncated).unwrap();
            let e = kl_to_scaled_uniform(&d, lambda, KlMode::Exact).unwrap();
            assert!((e - t - norm).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_rows_normalized_and_deterministic() {
        let d = dp(&[0.4, 2.0, 1.1]);
        let a = sample(&d, 100, 7);
        let b = sample(&d, 100, 7);
        assert_eq!(a, b);
        for row in &a {
            let s: f64 = row.iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|&v| v >= 0.0));
        }
        assert_ne!(sample(&d, 100, 8), a);
    }

    #[test]
    fn sample_mean_matches_expectation() {
        let d = dp(&[5.0, 1.0]);
        let est = montecarlo::mean(&d, 200_000, 42);
        let want = d.expectation();
        for ((m, se), w) in est.iter().zip(&want) {
            assert!((m - w).abs() <= 4.0 * se, "mean {m} want {w} se {se}");
        }
    }

    #[test]
    fn closed_forms_match_monte_carlo_smoke() {
        let d = dp(&[2.0, 0.7, 3.5]);
        let n = 200_000;

        let (ee, se) = montecarlo::expected_entropy(&d, n, 11);
        assert!((d.expected_entropy() - ee).abs() <= 4.0 * se);

        let (de, se) = montecarlo::differential_entropy(&d, n, 12);
        assert!((d.differential_entropy() - de).abs() <= 4.0 * se);

        let (mi, se) = montecarlo::mutual_information(&d, n, 13);
        assert!((d.mutual_information() - mi).abs() <= 4.0 * se);

        let (kl, se) = montecarlo::kl_to_scaled_uniform(&d, 0.7, n, 14);
        let closed = kl_to_scaled_uniform(&d, 0.7, KlMode::Exact).unwrap();
        assert!((closed - kl).abs() <= 4.0 * se);
    }

    #[test]
    fn kl_rejects_bad_lambda() {
        let d = dp(&[1.0, 2.0]);
        assert!(kl_to_scaled_uniform(&d, 0.0, KlMode::Exact).is_err());
        assert!(kl_to_scaled_uniform(&d, f64::NAN, KlMode::Exact).is_err());
    }
}
