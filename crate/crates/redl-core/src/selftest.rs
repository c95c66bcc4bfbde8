//! The oracle/invariant suite behind `selftest` and the acceptance tests.
//!
//! Each check is self-contained, seeded, and returns a pass/fail outcome
//! with measured runtime. Oracles here are independent of the closed forms
//! they certify: Monte-Carlo integration over sampled probability vectors,
//! central finite differences, and brute-force pair counting.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::data;
use crate::dirichlet::{kl_to_scaled_uniform, montecarlo, KlMode};
use crate::harness::{
    prepare_data, run_experiment, select_lambda, train_and_eval, DatasetSpec, ExperimentConfig,
};
use crate::losses::{self, KlSchedule, LossConfig, LossForm};
use crate::metrics::{self, ScoredSample};
use crate::nn::{self, Activation, Mlp, MlpSpec};
use crate::numerics::{lgamma_raw, EvidenceFunction};
use crate::sl::{proportion_probability, DirichletParams, DomainConfig, EvidenceVector, Opinion};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn summary_line(&self) -> String {
        format!(
            "[{}] {} {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.details
        )
    }
}

struct Check {
    id: &'static str,
    name: &'static str,
    started: Instant,
    failures: Vec<String>,
    notes: Vec<String>,
    time_limit: Option<f64>,
}

impl Check {
    fn new(id: &'static str, name: &'static str) -> Self {
        Check {
            id,
            name,
            started: Instant::now(),
            failures: Vec::new(),
            notes: Vec::new(),
            time_limit: None,
        }
    }

    fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = Some(seconds);
        self
    }

    fn require(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 8 {
            self.failures.push(message());
        } else if !ok {
            // Counted but not stored beyond the first few.
            self.failures.push(String::new());
        }
    }

    fn note(&mut self, message: impl Into<String>) {
        self.notes.push(message.into());
    }

    fn finish(mut self) -> CheckOutcome {
        let seconds = self.started.elapsed().as_secs_f64();
        if let Some(limit) = self.time_limit {
            if seconds > limit {
                self.failures
                    .push(format!("runtime {seconds:.2}s exceeded limit {limit}s"));
            }
        }
        let passed = self.failures.is_empty();
        let mut details = self.notes.join("; ");
        if !passed {
            let shown: Vec<&String> = self.failures.iter().filter(|f| !f.is_empty()).collect();
            let msg = format!(
                "{} failure(s): {}",
                self.failures.len(),
                shown
                    .iter()
                    .take(3)
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(" | ")
            );
            details = if details.is_empty() {
                msg
            } else {
                format!("{details}; {msg}")
            };
        }
        if details.is_empty() {
            details = "ok".into();
        }
        CheckOutcome {
            id: self.id,
            name: self.name,
            passed,
            details,
            seconds,
        }
    }
}

fn random_opinion(rng: &mut ChaCha8Rng, c: usize, uniform_base: bool) -> Opinion {
    let u = rng.random_range(0.01..0.99);
    let raw: Vec<f64> = (0..c).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = raw.iter().sum::<f64>().max(f64::MIN_POSITIVE);
    let belief: Vec<f64> = raw.iter().map(|&r| r / total * (1.0 - u)).collect();
    let u = 1.0 - belief.iter().sum::<f64>();
    let base_rate = if uniform_base {
        vec![1.0 / c as f64; c]
    } else {
        let raw: Vec<f64> = (0..c).map(|_| rng.random_range(0.05..1.0)).collect();
        let t: f64 = raw.iter().sum();
        raw.iter().map(|&r| r / t).collect()
    };
    Opinion::new(belief, u, base_rate).expect("constructed valid opinion")
}

/// Criterion 1: opinion ↔ Dirichlet round trips agree to 1e-12 on 1,000
/// random instances, C ∈ {2..10}, in under a second.
pub fn check_bijection_round_trip() -> CheckOutcome {
    let mut check = Check::new("C01", "bijection round-trip").with_time_limit(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for i in 0..1000 {
        let c = 2 + i % 9;
        let op = random_opinion(&mut rng, c, i % 2 == 0);
        let w = rng.random_range(0.1..20.0);

        // Forward: opinion → Dirichlet → opinion.
        let d = op.to_dirichlet(w).expect("u > 0");
        let back = Opinion::from_dirichlet(&d, w, op.base_rate()).expect("valid inverse");
        for (a, b) in op.belief().iter().zip(back.belief()) {
            check.require((a - b).abs() <= 1e-12, || {
                format!("instance {i}: belief {a} vs {b}")
            });
        }
        check.require(
            (op.uncertainty() - back.uncertainty()).abs() <= 1e-12,
            || format!("instance {i}: uncertainty mismatch"),
        );

        // Reverse: Dirichlet → opinion → Dirichlet.
        let alpha: Vec<f64> = op
            .base_rate()
            .iter()
            .map(|&a| a * w + rng.random_range(0.0..10.0))
            .collect();
        let d0 = DirichletParams::new(alpha).unwrap();
        let mid = Opinion::from_dirichlet(&d0, w, op.base_rate()).expect("precondition holds");
        let d1 = mid.to_dirichlet(w).expect("u > 0");
        for (a, b) in d0.alpha().iter().zip(d1.alpha()) {
            check.require((a - b).abs() <= 1e-12 * a.abs().max(1.0), || {
                format!("instance {i}: alpha {a} vs {b}")
            });
        }
    }
    check.note("1000 instances, both directions, C in 2..=10");
    check.finish()
}

/// Criterion 2: projected probability equals the Dirichlet expectation of
/// the bijective image, to 1e-12 on 1,000 random instances.
pub fn check_expectation_identity() -> CheckOutcome {
    let mut check = Check::new("C02", "projected probability = Dirichlet expectation");
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for i in 0..1000 {
        let c = 2 + i % 9;
        let op = random_opinion(&mut rng, c, i % 3 == 0);
        let w = rng.random_range(0.1..20.0);
        let p = op.projected_probability();
        let e = op.to_dirichlet(w).unwrap().expectation();
        for (a, b) in p.iter().zip(&e) {
            check.require((a - b).abs() <= 1e-12, || {
                format!("instance {i}: P {a} vs E {b}")
            });
        }
    }
    check.note("1000 instances");
    check.finish()
}

/// Criterion 3: the loss decomposition is exact and both sides match the
/// Monte-Carlo integral of ‖y − p‖² at 1e6 samples within 3 standard errors.
pub fn check_loss_decomposition() -> CheckOutcome {
    let mut check = Check::new("C03", "loss decomposition + MC integral");
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let classes = [2usize, 3, 5, 10];
    for i in 0..20 {
        let c = classes[i % classes.len()];
        let logits: Vec<f64> = (0..c).map(|_| rng.random_range(-3.0..3.0)).collect();
        let lambda = rng.random_range(0.1..1.3);
        let mut y = vec![0.0; c];
        y[rng.random_range(0..c)] = 1.0;
        let cfg = LossConfig {
            form: LossForm::EdlMse,
            lambda,
            use_variance_term: true,
            evidence_fn: EvidenceFunction::Softplus,
            ..LossConfig::default()
        };

        let edl = losses::edl_empirical_risk(&logits, &y, &cfg).unwrap();
        let re = losses::re_edl_empirical_risk(&logits, &y, &cfg).unwrap();
        let e = cfg.evidence_fn.apply_slice(&logits).unwrap();
        let alpha =
            DirichletParams::new(e.iter().map(|&v| v + lambda).collect()).unwrap();
        let var = losses::variance_term(&alpha);
        check.require(edl == re + var, || {
            format!("draw {i}: decomposition not exact: {edl} vs {}", re + var)
        });

        let (mc, se) = montecarlo::mse_risk(&alpha, &y, 1_000_000, 9000 + i as u64);
        check.require((edl - mc).abs() <= 3.0 * se, || {
            format!("draw {i}: edl {edl} vs MC {mc} (se {se})")
        });
    }
    check.note("20 random (alpha, y), 1e6 samples each");
    check.finish()
}

/// Criterion 4: expected entropy, differential entropy, and mutual
/// information match Monte-Carlo estimates within 3 standard errors; the MI
/// decomposition holds to 1e-12.
pub fn check_uncertainty_measure_oracles() -> CheckOutcome {
    let mut check = Check::new("C04", "uncertainty-measure oracles");
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let classes = [2usize, 3, 5, 10];
    let n = 1_000_000;
    for i in 0..20 {
        let c = classes[i % classes.len()];
        let alpha: Vec<f64> = (0..c).map(|_| rng.random_range(0.2..8.0)).collect();
        let d = DirichletParams::new(alpha).unwrap();

        let ee = d.expected_entropy();
        let (mc_ee, se) = montecarlo::expected_entropy(&d, n, 1000 + i as u64);
        check.require((ee - mc_ee).abs() <= 3.0 * se, || {
            format!("draw {i}: EE {ee} vs MC {mc_ee} (se {se})")
        });

        let de = d.differential_entropy();
        let (mc_de, se) = montecarlo::differential_entropy(&d, n, 2000 + i as u64);
        check.require((de - mc_de).abs() <= 3.0 * se, || {
            format!("draw {i}: DE {de} vs MC {mc_de} (se {se})")
        });

        let mi = d.mutual_information();
        let (mc_mi, se) = montecarlo::mutual_information(&d, n, 3000 + i as u64);
        check.require((mi - mc_mi).abs() <= 3.0 * se, || {
            format!("draw {i}: MI {mi} vs MC {mc_mi} (se {se})")
        });

        let identity = d.entropy_of_expectation() - d.expected_entropy();
        check.require((mi - identity).abs() <= 1e-12, || {
            format!("draw {i}: MI decomposition {mi} vs {identity}")
        });
    }
    check.note("20 draws over C in {2,3,5,10}, 1e6 samples per estimate");
    check.finish()
}

/// Criterion 5: exact KL is non-negative and vanishes only at α̃ = λ·1,
/// matches its MC estimate, and differs from the truncated form by an
/// α̃-independent constant.
pub fn check_kl_regularizer() -> CheckOutcome {
    let mut check = Check::new("C05", "KL regularizer modes");
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (c, lambda) = (4usize, 0.7);
    let normalizer = c as f64 * lgamma_raw(lambda) - lgamma_raw(c as f64 * lambda);

    let at_target = DirichletParams::scaled_uniform(c, lambda).unwrap();
    let kl0 = kl_to_scaled_uniform(&at_target, lambda, KlMode::Exact).unwrap();
    check.require(kl0.abs() <= 1e-12, || format!("KL at target = {kl0}"));

    let mut diffs = Vec::new();
    for i in 0..10 {
        let alpha: Vec<f64> = (0..c).map(|_| rng.random_range(0.1..6.0)).collect();
        // Keep at least one entry well away from λ so the divergence is real.
        let mut alpha = alpha;
        alpha[0] = lambda + rng.random_range(0.5..4.0);
        let d = DirichletParams::new(alpha).unwrap();

        let exact = kl_to_scaled_uniform(&d, lambda, KlMode::Exact).unwrap();
        let truncated = kl_to_scaled_uniform(&d, lambda, KlMode::Truncated).unwrap();
        check.require(exact >= -1e-9, || format!("draw {i}: exact KL {exact} < 0"));
        check.require(exact > 1e-6, || {
            format!("draw {i}: exact KL {exact} not positive away from target")
        });
        diffs.push(exact - truncated);

        let (mc, se) = montecarlo::kl_to_scaled_uniform(&d, lambda, 1_000_000, 4000 + i as u64);
        check.require((exact - mc).abs() <= 3.0 * se, || {
            format!("draw {i}: exact {exact} vs MC {mc} (se {se})")
        });
    }
    for (i, &diff) in diffs.iter().enumerate() {
        check.require((diff - normalizer).abs() <= 1e-10, || {
            format!("draw {i}: exact-truncated {diff} vs normalizer {normalizer}")
        });
    }
    check.note(format!(
        "normalizer C·lnG(l)−lnG(Cl) = {normalizer:.6}, constant across 10 draws"
    ));
    check.finish()
}

fn fd_logit_gradient(logits: &[f64], y: &[f64], epoch: u32, cfg: &LossConfig) -> Vec<f64> {
    let h = 1e-5;
    (0..logits.len())
        .map(|k| {
            let mut up = logits.to_vec();
            let mut dn = logits.to_vec();
            up[k] += h;
            dn[k] -= h;
            (losses::total_loss(&up, y, epoch, cfg).unwrap()
                - losses::total_loss(&dn, y, epoch, cfg).unwrap())
                / (2.0 * h)
        })
        .collect()
}

/// Criterion 6: analytic gradients (per logit and end-to-end per parameter)
/// match central finite differences (h = 1e-5) with max relative error 1e-4
/// for every loss form × evidence function, in under 30 seconds.
pub fn check_gradient_certification() -> CheckOutcome {
    let mut check = Check::new("C06", "gradient certification").with_time_limit(30.0);
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let forms = [
        LossForm::EdlMse,
        LossForm::ReEdlMse,
        LossForm::CeProjected,
        LossForm::SoftmaxMse,
        LossForm::SoftmaxCe,
    ];
    let evidence_fns = [
        EvidenceFunction::Relu,
        EvidenceFunction::Softplus,
        EvidenceFunction::clamped_exp(),
    ];
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-4);

    let mut max_err: f64 = 0.0;
    for &form in &forms {
        for &ef in &evidence_fns {
            // Per-logit gradients on 100 random draws.
            for i in 0..100 {
                let c = *[2usize, 3, 5].choose(&mut rng).unwrap();
                let mut logits: Vec<f64> =
                    (0..c).map(|_| rng.random_range(-4.0..4.0)).collect();
                for l in &mut logits {
                    if l.abs() < 1e-3 {
                        *l += 0.01;
                    }
                }
                let mut y = vec![0.0; c];
                y[rng.random_range(0..c)] = 1.0;
                let cfg = LossConfig {
                    form,
                    lambda: rng.random_range(0.1..1.3),
                    use_variance_term: i % 2 == 0,
                    kl_coefficient: *[0.0, 0.5, 1.0].choose(&mut rng).unwrap(),
                    kl_schedule: KlSchedule::Constant,
                    evidence_fn: ef,
                };
                let epoch = rng.random_range(0..15);
                let analytic = losses::loss_gradient(&logits, &y, epoch, &cfg).unwrap();
                let numeric = fd_logit_gradient(&logits, &y, epoch, &cfg);
                for (a, b) in analytic.iter().zip(&numeric) {
                    let err = rel(*a, *b);
                    max_err = max_err.max(err);
                    check.require(err <= 1e-4, || {
                        format!("{form:?}/{ef:?} draw {i}: logit grad rel err {err}")
                    });
                }
            }

            // End-to-end parameter gradients on a 2-8-8-3 network.
            let mut net = Mlp::new(MlpSpec::new(
                vec![2, 8, 8, 3],
                Activation::Tanh,
                rng.random::<u64>(),
            ))
            .unwrap();
            let xs: Vec<Vec<f64>> = (0..4)
                .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
                .collect();
            let ts: Vec<usize> = (0..4).map(|_| rng.random_range(0..3)).collect();
            let cfg = LossConfig {
                form,
                lambda: 0.6,
                use_variance_term: true,
                kl_coefficient: 0.4,
                kl_schedule: KlSchedule::Constant,
                evidence_fn: ef,
            };
            let batch_loss = |net: &Mlp| -> f64 {
                let logits = net.forward(&xs).unwrap();
                logits
                    .iter()
                    .zip(&ts)
                    .map(|(row, &t)| {
                        losses::total_loss(row, &nn::one_hot(t, 3), 5, &cfg).unwrap()
                    })
                    .sum::<f64>()
                    / xs.len() as f64
            };
            let (logits, cache) = net.forward_cached(&xs).unwrap();
            let dlogits: Vec<Vec<f64>> = logits
                .iter()
                .zip(&ts)
                .map(|(row, &t)| {
                    losses::loss_gradient(row, &nn::one_hot(t, 3), 5, &cfg).unwrap()
                })
                .collect();
            let analytic = net.backward(&cache, &dlogits);
            let h = 1e-5;
            for k in (0..net.num_params()).step_by(3) {
                let orig = net.params()[k];
                net.params_mut()[k] = orig + h;
                let up = batch_loss(&net);
                net.params_mut()[k] = orig - h;
                let dn = batch_loss(&net);
                net.params_mut()[k] = orig;
                let numeric = (up - dn) / (2.0 * h);
                let err = rel(analytic[k], numeric);
                max_err = max_err.max(err);
                check.require(err <= 1e-4, || {
                    format!("{form:?}/{ef:?} param {k}: rel err {err}")
                });
            }
        }
    }
    check.note(format!(
        "15 form x evidence combos, 100 logit draws each + 2-8-8-3 params; max rel err {max_err:.2e}"
    ));
    check.finish()
}

/// Criterion 7: the 100-class single-hot spot value P(1) = 0.505.
pub fn check_paper_spot_value() -> CheckOutcome {
    let mut check = Check::new("C07", "100-class spot value P(1) = 0.505");
    let cfg = DomainConfig::uniform(100, 1.0).unwrap();
    let mut ev = vec![0.0; 100];
    ev[0] = 100.0;
    let e = EvidenceVector::new(ev).unwrap();
    let want = 101.0 / 200.0;

    let p = Opinion::from_evidence(&e, &cfg)
        .unwrap()
        .projected_probability();
    check.require((p[0] - want).abs() <= 1e-15, || {
        format!("opinion route P(1) = {}", p[0])
    });

    let d = DirichletParams::from_evidence(&e, &cfg).unwrap();
    let exp = d.expectation();
    check.require((exp[0] - want).abs() <= 1e-15, || {
        format!("dirichlet route P(1) = {}", exp[0])
    });
    check.note(format!("P(1) = {}", p[0]));
    check.finish()
}

/// Criterion 8: argmax of the projected probability is λ-invariant, and the
/// λ = 0 proportion path is scale-invariant.
pub fn check_argmax_lambda_invariance() -> CheckOutcome {
    let mut check = Check::new("C08", "argmax lambda-invariance + scale law");
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let lambdas: Vec<f64> = (1..=13).map(|i| i as f64 / 10.0).collect();
    for i in 0..1000 {
        let c = 2 + i % 9;
        let ev: Vec<f64> = (0..c).map(|_| rng.random_range(0.0..20.0)).collect();
        let e = EvidenceVector::new(ev.clone()).unwrap();
        let mut winner = None;
        for &lambda in &lambdas {
            let cfg = DomainConfig::uniform(c, lambda).unwrap();
            let w = Opinion::from_evidence(&e, &cfg).unwrap().argmax_projected();
            match winner {
                None => winner = Some(w),
                Some(prev) => check.require(prev == w, || {
                    format!("instance {i}: argmax changed from {prev} to {w} at lambda {lambda}")
                }),
            }
        }

        if e.total() > 0.0 {
            let p0 = proportion_probability(&e).unwrap();
            for &k in &[0.5f64, 2.0, 10.0] {
                let scaled =
                    EvidenceVector::new(ev.iter().map(|&v| v * k).collect()).unwrap();
                let p1 = proportion_probability(&scaled).unwrap();
                for (a, b) in p0.iter().zip(&p1) {
                    check.require((a - b).abs() <= 1e-12, || {
                        format!("instance {i}: scale {k} moved P by {}", (a - b).abs())
                    });
                }
            }
        }
    }
    check.note("1000 evidence draws, lambda in 0.1..=1.3, k in {0.5,2,10}");
    check.finish()
}

fn direction_config() -> ExperimentConfig {
    ExperimentConfig {
        format_version: crate::harness::FORMAT_VERSION,
        dataset: DatasetSpec {
            num_classes: 3,
            per_class: 150,
            dim: 2,
            spread: 0.5,
            data_seed: 1,
            ood_count: 300,
            ood_radius: 2.5,
            val_fraction: 0.2,
            test_fraction: 0.2,
            standardize: true,
        },
        hidden_widths: vec![32, 32],
        hidden_activation: Activation::Relu,
        loss: LossConfig::default(),
        lambda_sweep: (1..=10).map(|i| i as f64 / 10.0).collect(),
        mu_sweep: vec![0.0],
        seeds: vec![1, 2, 3, 4, 5],
        epochs: 40,
        batch_size: 32,
        learning_rate: 1e-3,
        measures: metrics::UncertaintyMeasure::ALL.to_vec(),
        output_dir: None,
    }
}

/// Criterion 9: a constant μ = 1 KL regularizer suppresses non-target
/// evidence and raises the target/total ratio relative to μ = 0, in at
/// least 4 of 5 seeds, within 2 minutes.
pub fn check_evidence_suppression_direction() -> CheckOutcome {
    let mut check = Check::new("C09", "KL evidence-suppression direction").with_time_limit(120.0);
    let cfg = direction_config();
    let data = prepare_data(&cfg.dataset).unwrap();
    let base = LossConfig {
        form: LossForm::EdlMse,
        lambda: 1.0,
        use_variance_term: true,
        kl_schedule: KlSchedule::Constant,
        evidence_fn: EvidenceFunction::Softplus,
        ..LossConfig::default()
    };
    let mut wins_nontarget = 0;
    let mut wins_ratio = 0;
    let mut lines = Vec::new();
    for &seed in &cfg.seeds {
        let with_kl = train_and_eval(
            &data,
            &cfg,
            &LossConfig {
                kl_coefficient: 1.0,
                ..base
            },
            seed,
        )
        .unwrap();
        let without_kl = train_and_eval(
            &data,
            &cfg,
            &LossConfig {
                kl_coefficient: 0.0,
                ..base
            },
            seed,
        )
        .unwrap();
        let nt_kl = with_kl.metrics["nontarget_evidence"];
        let nt_free = without_kl.metrics["nontarget_evidence"];
        let ratio_kl = with_kl.metrics["target_total_ratio"];
        let ratio_free = without_kl.metrics["target_total_ratio"];
        if nt_kl < nt_free {
            wins_nontarget += 1;
        }
        if ratio_kl > ratio_free {
            wins_ratio += 1;
        }
        lines.push(format!(
            "seed {seed}: nontarget {nt_kl:.4} vs {nt_free:.4}, ratio {ratio_kl:.4} vs {ratio_free:.4}"
        ));
    }
    check.require(wins_nontarget >= 4, || {
        format!("non-target suppression in only {wins_nontarget}/5 seeds")
    });
    check.require(wins_ratio >= 4, || {
        format!("ratio increase in only {wins_ratio}/5 seeds")
    });
    check.note(format!(
        "nontarget down {wins_nontarget}/5, ratio up {wins_ratio}/5 [{}]",
        lines.join("; ")
    ));
    check.finish()
}

/// Criterion 10: Re-EDL with λ tuned on validation (no variance term, no
/// KL) reaches OOD AUROC at or above the softmax-MSE baseline in at least
/// 4 of 5 seeds, within 3 minutes. The per-seed gap is reported.
pub fn check_projected_probability_benefit() -> CheckOutcome {
    let mut check = Check::new("C10", "projected-probability OOD benefit").with_time_limit(180.0);
    let cfg = direction_config();
    let data = prepare_data(&cfg.dataset).unwrap();
    let re_edl = LossConfig {
        form: LossForm::ReEdlMse,
        use_variance_term: false,
        kl_coefficient: 0.0,
        evidence_fn: EvidenceFunction::Softplus,
        ..LossConfig::default()
    };
    let softmax = LossConfig {
        form: LossForm::SoftmaxMse,
        ..re_edl
    };
    let mut wins = 0;
    let mut gaps = Vec::new();
    let mut lines = Vec::new();
    for &seed in &cfg.seeds {
        let (lambda, _) = select_lambda(&data, &cfg, &re_edl, seed).unwrap();
        let tuned = LossConfig { lambda, ..re_edl };
        let evidential = train_and_eval(&data, &cfg, &tuned, seed).unwrap();
        let baseline = train_and_eval(&data, &cfg, &softmax, seed).unwrap();
        let auroc_re = evidential.metrics["ood_auroc_um"];
        let auroc_sm = baseline.metrics["ood_auroc_maxp"];
        if auroc_re >= auroc_sm {
            wins += 1;
        }
        gaps.push(auroc_re - auroc_sm);
        lines.push(format!(
            "seed {seed}: re_edl(l={lambda}) {auroc_re:.4} vs softmax {auroc_sm:.4}"
        ));
    }
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    check.require(wins >= 4, || format!("re_edl won only {wins}/5 seeds"));
    check.note(format!(
        "wins {wins}/5, mean AUROC gap {mean_gap:+.4} [{}]",
        lines.join("; ")
    ));
    check.finish()
}

/// Criterion 11: rank metrics match brute-force oracles; brier/ece trivial
/// cases are exact.
pub fn check_metric_correctness() -> CheckOutcome {
    let mut check = Check::new("C11", "metric correctness vs oracles");
    let mut rng = ChaCha8Rng::seed_from_u64(1111);

    // AUROC against O(n²) pair counting, with deliberate ties.
    for i in 0..100 {
        let n_pos = rng.random_range(1..100);
        let n_neg = rng.random_range(1..101);
        let q = |v: f64| (v * 25.0).round() / 25.0;
        let mut samples: Vec<ScoredSample> = Vec::with_capacity(n_pos + n_neg);
        for _ in 0..n_pos {
            samples.push(ScoredSample::new(q(rng.random_range(0.0..1.0)), true));
        }
        for _ in 0..n_neg {
            samples.push(ScoredSample::new(q(rng.random_range(0.0..1.0)), false));
        }
        let fast = metrics::auroc(&samples).unwrap();
        let mut pairs = 0.0;
        for p in samples.iter().filter(|s| s.is_positive) {
            for n in samples.iter().filter(|s| !s.is_positive) {
                pairs += if p.confidence > n.confidence {
                    1.0
                } else if p.confidence == n.confidence {
                    0.5
                } else {
                    0.0
                };
            }
        }
        let brute = pairs / (n_pos as f64 * n_neg as f64);
        check.require((fast - brute).abs() <= 1e-12, || {
            format!("auroc instance {i}: {fast} vs {brute}")
        });
    }

    // AUPR against the pointwise step-through (distinct scores).
    for i in 0..25 {
        let n = rng.random_range(3..40);
        let mut samples: Vec<ScoredSample> = (0..n)
            .map(|k| {
                ScoredSample::new(
                    // Distinct by construction.
                    k as f64 + rng.random_range(0.0..0.5),
                    rng.random_bool(0.4),
                )
            })
            .collect();
        if !samples.iter().any(|s| s.is_positive) {
            samples[0].is_positive = true;
        }
        let fast = metrics::aupr(&samples).unwrap();
        let mut sorted = samples.clone();
        sorted.sort_by(|a, b| b.confidence.partial_cmp(&a.confidence).unwrap());
        let n_pos = sorted.iter().filter(|s| s.is_positive).count();
        let mut tp = 0usize;
        let mut oracle = 0.0;
        for (k, s) in sorted.iter().enumerate() {
            if s.is_positive {
                tp += 1;
                oracle += tp as f64 / (k + 1) as f64 / n_pos as f64;
            }
        }
        check.require((fast - oracle).abs() <= 1e-12, || {
            format!("aupr instance {i}: {fast} vs {oracle}")
        });
    }

    // Trivial brier/ece cases.
    let b = metrics::brier(&[vec![1.0, 0.0]], &[vec![1.0, 0.0]]).unwrap();
    check.require(b == 0.0, || format!("brier one-hot exact: {b}"));
    let b = metrics::brier(&[vec![0.5, 0.5]], &[vec![1.0, 0.0]]).unwrap();
    check.require((b - 0.5).abs() < 1e-15, || format!("brier uniform: {b}"));
    let e = metrics::ece(&[1.0], &[true], 15).unwrap();
    check.require(e == 0.0, || format!("ece single exact: {e}"));
    let e = metrics::ece(&[0.8, 0.8], &[true, false], 15).unwrap();
    check.require((e - 0.3).abs() < 1e-15, || format!("ece two-sample: {e}"));

    check.note("100 auroc instances, 25 aupr instances, trivial brier/ece");
    check.finish()
}

/// Criterion 12: identical configs reproduce byte-identical CSV outputs.
pub fn check_determinism() -> CheckOutcome {
    let mut check = Check::new("C12", "byte-identical reruns");
    let cfg = ExperimentConfig {
        dataset: DatasetSpec {
            per_class: 40,
            ood_count: 60,
            val_fraction: 0.2,
            test_fraction: 0.2,
            ..DatasetSpec::default()
        },
        hidden_widths: vec![16],
        lambda_sweep: vec![0.3, 1.0],
        mu_sweep: vec![0.0, 1.0],
        seeds: vec![1, 2],
        epochs: 3,
        batch_size: 16,
        ..ExperimentConfig::default()
    };
    let a = run_experiment(&cfg).unwrap().to_csv_string();
    let b = run_experiment(&cfg).unwrap().to_csv_string();
    check.require(a == b, || "sweep CSVs differ between reruns".into());

    let ds1 = data::gaussian_blobs(3, 25, 2, 0.4, 7).unwrap();
    let ds2 = data::gaussian_blobs(3, 25, 2, 0.4, 7).unwrap();
    check.require(ds1 == ds2, || "dataset generation differs between reruns".into());

    let d = DirichletParams::new(vec![0.7, 2.0]).unwrap();
    let s1 = crate::dirichlet::sample(&d, 1000, 3);
    let s2 = crate::dirichlet::sample(&d, 1000, 3);
    check.require(s1 == s2, || "sampler differs between reruns".into());

    check.note("4-cell sweep x 2 seeds re-run byte-identical; generators stable");
    check.finish()
}

/// Runs the full suite in criterion order.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        check_bijection_round_trip(),
        check_expectation_identity(),
        check_loss_decomposition(),
        check_uncertainty_measure_oracles(),
        check_kl_regularizer(),
        check_gradient_certification(),
        check_paper_spot_value(),
        check_argmax_lambda_invariance(),
        check_evidence_suppression_direction(),
        check_projected_probability_benefit(),
        check_metric_correctness(),
        check_determinism(),
    ]
}

/// Map of check id → outcome for selective runs.
pub fn run_named(ids: &[String]) -> Vec<CheckOutcome> {
    let all: Vec<(&str, fn() -> CheckOutcome)> = vec![
        ("C01", check_bijection_round_trip),
        ("C02", check_expectation_identity),
        ("C03", check_loss_decomposition),
        ("C04", check_uncertainty_measure_oracles),
        ("C05", check_kl_regularizer),
        ("C06", check_gradient_certification),
        ("C07", check_paper_spot_value),
        ("C08", check_argmax_lambda_invariance),
        ("C09", check_evidence_suppression_direction),
        ("C10", check_projected_probability_benefit),
        ("C11", check_metric_correctness),
        ("C12", check_determinism),
    ];
    let wanted: BTreeMap<String, ()> = ids.iter().map(|s| (s.to_uppercase(), ())).collect();
    all.into_iter()
        .filter(|(id, _)| wanted.is_empty() || wanted.contains_key(*id))
        .map(|(_, f)| f())
        .collect()
}
