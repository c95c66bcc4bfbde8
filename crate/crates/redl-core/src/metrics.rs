//! Evaluation metrics: AUROC, AUPR (average precision), calibration (ECE,
//! Brier), uncertainty-based confidence scores, and PR/ROC curve points.
//!
//! Confidence direction convention everywhere: higher confidence means more
//! ID-like (OOD detection) or more likely correct (misclassification
//! detection). Positives are ID / correct samples.

use crate::dirichlet::UncertaintyReport;
use crate::error::{Error, Result};
use crate::sl::DirichletParams;

/// One scored sample: a confidence and whether it is a positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSample {
    pub confidence: f64,
    pub is_positive: bool,
}

impl ScoredSample {
    pub fn new(confidence: f64, is_positive: bool) -> Self {
        ScoredSample {
            confidence,
            is_positive,
        }
    }
}

fn check_finite(samples: &[ScoredSample], metric: &'static str) -> Result<()> {
    if samples.iter().any(|s| !s.confidence.is_finite()) {
        return Err(Error::UndefinedMetric {
            metric,
            message: "confidence scores must be finite".into(),
        });
    }
    Ok(())
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half. Computed by average ranks, equal to brute-force pair
/// counting.
pub fn auroc(samples: &[ScoredSample]) -> Result<f64> {
    check_finite(samples, "auroc")?;
    let n_pos = samples.iter().filter(|s| s.is_positive).count();
    let n_neg = samples.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedMetric {
            metric: "auroc",
            message: format!("need both classes, got {n_pos} positives / {n_neg} negatives"),
        });
    }

    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        samples[a]
            .confidence
            .partial_cmp(&samples[b].confidence)
            .unwrap()
    });

    // Average ranks within tie blocks (ranks are 1-based).
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len()
            && samples[order[j]].confidence == samples[order[i]].confidence
        {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if samples[idx].is_positive {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }

    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Average precision: Σ over descending-score blocks of precision·Δrecall,
/// with tied scores processed as one block.
pub fn aupr(samples: &[ScoredSample]) -> Result<f64> {
    check_finite(samples, "aupr")?;
    let n_pos = samples.iter().filter(|s| s.is_positive).count();
    if n_pos == 0 {
        return Err(Error::UndefinedMetric {
            metric: "aupr",
            message: "need at least one positive".into(),
        });
    }

    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        samples[b]
            .confidence
            .partial_cmp(&samples[a].confidence)
            .unwrap()
    });

    let mut ap = 0.0;
    let mut tp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let mut block_tp = 0usize;
        while j < order.len()
            && samples[order[j]].confidence == samples[order[i]].confidence
        {
            if samples[order[j]].is_positive {
                block_tp += 1;
            }
            j += 1;
        }
        let prev_recall = tp as f64 / n_pos as f64;
        tp += block_tp;
        let recall = tp as f64 / n_pos as f64;
        let precision = tp as f64 / j as f64;
        ap += precision * (recall - prev_recall);
        i = j;
    }
    Ok(ap)
}

/// Expected calibration error over equal-width bins on [0, 1].
pub fn ece(confidences: &[f64], correctness: &[bool], bins: usize) -> Result<f64> {
    if confidences.len() != correctness.len() {
        return Err(Error::DimensionMismatch {
            op: "ece",
            expected: confidences.len(),
            got: correctness.len(),
        });
    }
    if bins == 0 {
        return Err(Error::invalid("ece", "need at least one bin"));
    }
    if confidences
        .iter()
        .any(|&c| !c.is_finite() || !(0.0..=1.0).contains(&c))
    {
        return Err(Error::domain("ece", "confidences must lie in [0, 1]"));
    }
    if confidences.is_empty() {
        return Ok(0.0);
    }

    let mut count = vec![0usize; bins];
    let mut conf_sum = vec![0.0; bins];
    let mut correct_sum = vec![0usize; bins];
    for (&c, &ok) in confidences.iter().zip(correctness) {
        let b = ((c * bins as f64) as usize).min(bins - 1);
        count[b] += 1;
        conf_sum[b] += c;
        if ok {
            correct_sum[b] += 1;
        }
    }
    let n = confidences.len() as f64;
    let mut total = 0.0;
    for b in 0..bins {
        if count[b] == 0 {
            continue;
        }
        let acc = correct_sum[b] as f64 / count[b] as f64;
        let conf = conf_sum[b] / count[b] as f64;
        total += count[b] as f64 / n * (acc - conf).abs();
    }
    Ok(total)
}

/// Mean over samples of Σ (y − P)².
pub fn brier(probs: &[Vec<f64>], one_hot: &[Vec<f64>]) -> Result<f64> {
    if probs.len() != one_hot.len() {
        return Err(Error::DimensionMismatch {
            op: "brier",
            expected: probs.len(),
            got: one_hot.len(),
        });
    }
    if probs.is_empty() {
        return Err(Error::UndefinedMetric {
            metric: "brier",
            message: "need at least one sample".into(),
        });
    }
    let mut total = 0.0;
    for (p, y) in probs.iter().zip(one_hot) {
        if p.len() != y.len() {
            return Err(Error::DimensionMismatch {
                op: "brier",
                expected: p.len(),
                got: y.len(),
            });
        }
        total += p
            .iter()
            .zip(y)
            .map(|(&pi, &yi)| (yi - pi) * (yi - pi))
            .sum::<f64>();
    }
    Ok(total / probs.len() as f64)
}

/// The four uncertainty measures usable as confidence scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UncertaintyMeasure {
    /// Max projected probability (already a confidence).
    Mp,
    /// Uncertainty mass.
    Um,
    /// Differential entropy.
    De,
    /// Mutual information.
    Mi,
}

impl UncertaintyMeasure {
    pub const ALL: [UncertaintyMeasure; 4] = [
        UncertaintyMeasure::Mp,
        UncertaintyMeasure::Um,
        UncertaintyMeasure::De,
        UncertaintyMeasure::Mi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UncertaintyMeasure::Mp => "mp",
            UncertaintyMeasure::Um => "um",
            UncertaintyMeasure::De => "de",
            UncertaintyMeasure::Mi => "mi",
        }
    }

    /// Order-preserving confidence from a report: MP passes through, the
    /// uncertainty-valued measures are negated so that higher = more ID.
    pub fn confidence(self, report: &UncertaintyReport) -> f64 {
        match self {
            UncertaintyMeasure::Mp => report.mp,
            UncertaintyMeasure::Um => -report.um,
            UncertaintyMeasure::De => -report.de,
            UncertaintyMeasure::Mi => -report.mi,
        }
    }
}

/// Per-sample confidence scores for a batch of Dirichlet parameters.
pub fn uncertainty_scores(
    params: &[DirichletParams],
    measure: UncertaintyMeasure,
    prior_weight: f64,
) -> Vec<f64> {
    params
        .iter()
        .map(|d| {
            let report = crate::dirichlet::uncertainty_report(d, prior_weight);
            measure.confidence(&report)
        })
        .collect()
}

/// (x − min)/(max − min); a constant list maps to all zeros.
pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if range <= 0.0 || !range.is_finite() {
        return vec![0.0; values.len()];
    }
    values.iter().map(|&v| (v - min) / range).collect()
}

/// (threshold, precision, recall) at every distinct confidence, descending.
pub fn pr_points(samples: &[ScoredSample]) -> Result<Vec<(f64, f64, f64)>> {
    check_finite(samples, "pr_points")?;
    let n_pos = samples.iter().filter(|s| s.is_positive).count();
    if n_pos == 0 {
        return Err(Error::UndefinedMetric {
            metric: "pr_points",
            message: "need at least one positive".into(),
        });
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        samples[b]
            .confidence
            .partial_cmp(&samples[a].confidence)
            .unwrap()
    });
    let mut out = Vec::new();
    let mut tp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let threshold = samples[order[i]].confidence;
        let mut j = i;
        while j < order.len() && samples[order[j]].confidence == threshold {
            if samples[order[j]].is_positive {
                tp += 1;
            }
            j += 1;
        }
        out.push((
            threshold,
            tp as f64 / j as f64,
            tp as f64 / n_pos as f64,
        ));
        i = j;
    }
    Ok(out)
}

/// (fpr, tpr) at every distinct confidence, from (0,0) to (1,1).
pub fn roc_points(samples: &[ScoredSample]) -> Result<Vec<(f64, f64)>> {
    check_finite(samples, "roc_points")?;
    let n_pos = samples.iter().filter(|s| s.is_positive).count();
    let n_neg = samples.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::UndefinedMetric {
            metric: "roc_points",
            message: "need both classes".into(),
        });
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        samples[b]
            .confidence
            .partial_cmp(&samples[a].confidence)
            .unwrap()
    });
    let mut out = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let threshold = samples[order[i]].confidence;
        let mut j = i;
        while j < order.len() && samples[order[j]].confidence == threshold {
            if samples[order[j]].is_positive {
                tp += 1;
            } else {
                fp += 1;
            }
            j += 1;
        }
        out.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
        i = j;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scored(pos: &[f64], neg: &[f64]) -> Vec<ScoredSample> {
        pos.iter()
            .map(|&c| ScoredSample::new(c, true))
            .chain(neg.iter().map(|&c| ScoredSample::new(c, false)))
            .collect()
    }

    /// O(n²) pair counting, the oracle for the rank-based implementation.
    fn auroc_brute_force(samples: &[ScoredSample]) -> f64 {
        let pos: Vec<f64> = samples
            .iter()
            .filter(|s| s.is_positive)
            .map(|s| s.confidence)
            .collect();
        let neg: Vec<f64> = samples
            .iter()
            .filter(|s| !s.is_positive)
            .map(|s| s.confidence)
            .collect();
        let mut score = 0.0;
        for &p in &pos {
            for &n in &neg {
                if p > n {
                    score += 1.0;
                } else if p == n {
                    score += 0.5;
                }
            }
        }
        score / (pos.len() * neg.len()) as f64
    }

    #[test]
    fn auroc_examples() {
        assert_eq!(auroc(&scored(&[0.9, 0.8], &[0.1, 0.2])).unwrap(), 1.0);
        assert_eq!(auroc(&scored(&[0.5, 0.5], &[0.5])).unwrap(), 0.5);
        assert_eq!(auroc(&scored(&[0.8, 0.2], &[0.5])).unwrap(), 0.5);
    }

    #[test]
    fn auroc_undefined_with_one_class() {
        assert!(auroc(&scored(&[0.9], &[])).is_err());
        assert!(auroc(&scored(&[], &[0.9])).is_err());
    }

    #[test]
    fn aupr_examples() {
        assert_eq!(aupr(&scored(&[0.9, 0.8], &[0.1, 0.2])).unwrap(), 1.0);
        // All scores tied: one block, AP = prevalence.
        let s = scored(&[0.5, 0.5, 0.5], &[0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5]);
        assert!((aupr(&s).unwrap() - 0.3).abs() < 1e-15);
        // Hand step-through: 0.9(+), 0.5(−), 0.4(+) → 1·0.5 + 2/3·0.5.
        let s = vec![
            ScoredSample::new(0.9, true),
            ScoredSample::new(0.5, false),
            ScoredSample::new(0.4, true),
        ];
        assert!((aupr(&s).unwrap() - (0.5 + 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn aupr_needs_a_positive() {
        assert!(aupr(&scored(&[], &[0.4, 0.2])).is_err());
    }

    #[test]
    fn ece_examples() {
        assert_eq!(ece(&[1.0], &[true], 15).unwrap(), 0.0);
        // Two samples at conf 0.8, one correct: |0.5 − 0.8| = 0.3.
        assert!((ece(&[0.8, 0.8], &[true, false], 15).unwrap() - 0.3).abs() < 1e-15);
        assert!(ece(&[1.5], &[true], 15).is_err());
    }

    #[test]
    fn ece_calibrated_stream_bounded_by_bin_width() {
        // Confidences uniform in each bin, correctness matching the bin's
        // mean confidence exactly on average.
        let bins = 15;
        let mut confs = Vec::new();
        let mut correct = Vec::new();
        for b in 0..bins {
            let conf = (b as f64 + 0.5) / bins as f64;
            let n = 2000;
            let hits = (conf * n as f64).round() as usize;
            for k in 0..n {
                confs.push(conf);
                correct.push(k < hits);
            }
        }
        let e = ece(&confs, &correct, bins).unwrap();
        assert!(e <= 1.0 / (2.0 * bins as f64), "ece {e}");
    }

    #[test]
    fn brier_examples() {
        let exact = brier(&[vec![1.0, 0.0]], &[vec![1.0, 0.0]]).unwrap();
        assert_eq!(exact, 0.0);
        let uniform2 = brier(&[vec![0.5, 0.5]], &[vec![1.0, 0.0]]).unwrap();
        assert!((uniform2 - 0.5).abs() < 1e-15);
        for c in [3usize, 5, 10] {
            let p = vec![1.0 / c as f64; c];
            let mut y = vec![0.0; c];
            y[0] = 1.0;
            let b = brier(&[p], &[y]).unwrap();
            assert!((b - (c as f64 - 1.0) / c as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn uncertainty_score_directions() {
        let vacuous = DirichletParams::new(vec![0.5, 0.5]).unwrap();
        let confident = DirichletParams::new(vec![50.0, 0.5]).unwrap();
        let w = 1.0;
        let report = crate::dirichlet::uncertainty_report(&vacuous, w);
        assert!((report.um - 1.0).abs() < 1e-12);
        for m in UncertaintyMeasure::ALL {
            let s = uncertainty_scores(&[vacuous.clone(), confident.clone()], m, w);
            assert!(s[1] > s[0], "{m:?}: confident sample must score higher");
        }
    }

    #[test]
    fn min_max_examples() {
        let n = min_max_normalize(&[2.0, 4.0, 3.0]);
        assert_eq!(n, vec![0.0, 1.0, 0.5]);
        assert_eq!(min_max_normalize(&[1.0, 1.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn um_ranking_equals_reversed_total_evidence_ranking() {
        let params: Vec<DirichletParams> = [[3.0, 1.0], [0.6, 0.6], [10.0, 5.0], [1.2, 2.0]]
            .iter()
            .map(|a| DirichletParams::new(a.to_vec()).unwrap())
            .collect();
        let um = uncertainty_scores(&params, UncertaintyMeasure::Um, 1.0);
        let mut by_um: Vec<usize> = (0..params.len()).collect();
        by_um.sort_by(|&a, &b| um[a].partial_cmp(&um[b]).unwrap());
        let mut by_s: Vec<usize> = (0..params.len()).collect();
        by_s.sort_by(|&a, &b| params[a].sum().partial_cmp(&params[b].sum()).unwrap());
        assert_eq!(by_um, by_s);
    }

    #[test]
    fn curve_points_shapes() {
        let s = scored(&[0.9, 0.7, 0.7], &[0.7, 0.3]);
        let pr = pr_points(&s).unwrap();
        assert_eq!(pr.len(), 3); // distinct thresholds 0.9, 0.7, 0.3
        assert_eq!(pr.last().unwrap().2, 1.0);
        let roc = roc_points(&s).unwrap();
        assert_eq!(roc.first().unwrap(), &(0.0, 0.0));
        assert_eq!(roc.last().unwrap(), &(1.0, 1.0));
    }

    proptest! {
        #[test]
        fn auroc_equals_brute_force(
            pos in proptest::collection::vec(0.0f64..1.0, 1..100),
            neg in proptest::collection::vec(0.0f64..1.0, 1..100),
        ) {
            // Quantize to force plenty of ties.
            let q = |v: f64| (v * 20.0).round() / 20.0;
            let s: Vec<ScoredSample> = pos
                .iter()
                .map(|&c| ScoredSample::new(q(c), true))
                .chain(neg.iter().map(|&c| ScoredSample::new(q(c), false)))
                .collect();
            let fast = auroc(&s).unwrap();
            let brute = auroc_brute_force(&s);
            prop_assert!((fast - brute).abs() < 1e-12);
        }

        #[test]
        fn rank_metrics_invariant_under_monotone_transform(
            pos in proptest::collection::vec(0.01f64..1.0, 1..40),
            neg in proptest::collection::vec(0.01f64..1.0, 1..40),
        ) {
            let s = scored(&pos, &neg);
            let t: Vec<ScoredSample> = s
                .iter()
                .map(|x| ScoredSample::new((5.0 * x.confidence).exp(), x.is_positive))
                .collect();
            prop_assert!((auroc(&s).unwrap() - auroc(&t).unwrap()).abs() < 1e-12);
            prop_assert!((aupr(&s).unwrap() - aupr(&t).unwrap()).abs() < 1e-12);
        }
    }
}
