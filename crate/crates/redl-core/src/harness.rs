//! Experiment configuration, sweep and ablation grids, and run-directory
//! output writing.
//!
//! A run trains one classifier per (grid cell × seed) on synthetic blobs,
//! evaluates classification, misclassification detection, and OOD detection
//! under the four uncertainty measures, and aggregates mean ± SD across
//! seeds. Re-running with an identical config yields byte-identical CSVs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde::{Deserialize, Serialize};

use crate::data::{gaussian_blobs, ood_ring, LabeledDataset, Standardizer};
use crate::error::{Error, Result};
use crate::losses::{softmax, LossConfig, LossForm};
use crate::metrics::{self, ScoredSample, UncertaintyMeasure};
use crate::nn::{train, Activation, AdamConfig, EpochLog, Mlp, MlpSpec, TrainConfig};
use crate::sl::{argmax, DirichletParams};

pub const FORMAT_VERSION: u32 = 1;

/// Environment variable naming the default output root for run directories.
pub const OUTPUT_ROOT_ENV: &str = "REDL_OUT_ROOT";

/// Synthetic-task description: ID blobs plus an OOD ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetSpec {
    pub num_classes: usize,
    pub per_class: usize,
    pub dim: usize,
    pub spread: f64,
    pub data_seed: u64,
    pub ood_count: usize,
    pub ood_radius: f64,
    pub val_fraction: f64,
    pub test_fraction: f64,
    pub standardize: bool,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec {
            num_classes: 3,
            per_class: 150,
            dim: 2,
            spread: 0.5,
            data_seed: 1,
            ood_count: 300,
            ood_radius: 2.5,
            val_fraction: 0.05,
            test_fraction: 0.25,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub format_version: u32,
    pub dataset: DatasetSpec,
    pub hidden_widths: Vec<usize>,
    pub hidden_activation: Activation,
    pub loss: LossConfig,
    pub lambda_sweep: Vec<f64>,
    pub mu_sweep: Vec<f64>,
    pub seeds: Vec<u64>,
    pub epochs: u32,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub measures: Vec<UncertaintyMeasure>,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            format_version: FORMAT_VERSION,
            dataset: DatasetSpec::default(),
            hidden_widths: vec![64, 64],
            hidden_activation: Activation::Relu,
            loss: LossConfig::default(),
            lambda_sweep: (1..=10).map(|i| i as f64 / 10.0).collect(),
            mu_sweep: vec![0.0],
            seeds: vec![1, 2, 3, 4, 5],
            epochs: 40,
            batch_size: 32,
            learning_rate: 1e-3,
            measures: UncertaintyMeasure::ALL.to_vec(),
            output_dir: None,
        }
    }
}

fn config_err(path: &str, message: impl Into<String>) -> Error {
    Error::InvalidConfig {
        path: path.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let d = &self.dataset;
        if d.num_classes < 2 {
            return Err(config_err("dataset.num_classes", "need at least 2"));
        }
        if d.per_class == 0 {
            return Err(config_err("dataset.per_class", "need at least 1"));
        }
        if d.dim < 2 {
            return Err(config_err("dataset.dim", "need at least 2"));
        }
        if !(d.spread.is_finite() && d.spread >= 0.0) {
            return Err(config_err("dataset.spread", "must be non-negative"));
        }
        if d.ood_count > 0 && !(d.ood_radius.is_finite() && d.ood_radius > 0.0) {
            return Err(config_err("dataset.ood_radius", "must be positive"));
        }
        if !(0.0..1.0).contains(&d.val_fraction)
            || !(0.0..1.0).contains(&d.test_fraction)
            || d.val_fraction + d.test_fraction >= 1.0
        {
            return Err(config_err(
                "dataset.val_fraction",
                "need 0 <= val + test < 1",
            ));
        }
        if d.ood_count > 0 && d.val_fraction + d.test_fraction == 0.0 {
            return Err(config_err(
                "dataset.test_fraction",
                "ood rows need a val or test share",
            ));
        }
        if self.hidden_widths.is_empty() {
            return Err(config_err("hidden_widths", "need at least one hidden layer"));
        }
        if self.hidden_widths.iter().any(|&w| w == 0) {
            return Err(config_err("hidden_widths", "widths must be positive"));
        }
        self.loss
            .validate()
            .map_err(|e| config_err("loss", e.to_string()))?;
        if self.lambda_sweep.is_empty() {
            return Err(config_err("lambda_sweep", "must be non-empty"));
        }
        if self
            .lambda_sweep
            .iter()
            .any(|&l| !(l.is_finite() && l > 0.0))
        {
            return Err(config_err("lambda_sweep", "entries must be positive"));
        }
        if self.mu_sweep.is_empty() {
            return Err(config_err("mu_sweep", "must be non-empty"));
        }
        if self.mu_sweep.iter().any(|&m| !(m.is_finite() && m >= 0.0)) {
            return Err(config_err("mu_sweep", "entries must be non-negative"));
        }
        if self.seeds.is_empty() {
            return Err(config_err("seeds", "must be non-empty"));
        }
        let distinct: BTreeSet<u64> = self.seeds.iter().cloned().collect();
        if distinct.len() != self.seeds.len() {
            return Err(config_err("seeds", "must be distinct"));
        }
        if self.epochs == 0 {
            return Err(config_err("epochs", "need at least 1"));
        }
        if self.batch_size == 0 {
            return Err(config_err("batch_size", "need at least 1"));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(config_err("learning_rate", "must be positive"));
        }
        if self.measures.is_empty() {
            return Err(config_err("measures", "must be non-empty"));
        }
        Ok(())
    }

    fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            // Decorrelated from the init seed.
            shuffle_seed: seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1),
            adam: AdamConfig {
                learning_rate: self.learning_rate,
                ..AdamConfig::default()
            },
        }
    }

    fn mlp_spec(&self, seed: u64) -> MlpSpec {
        let mut widths = Vec::with_capacity(self.hidden_widths.len() + 2);
        widths.push(self.dataset.dim);
        widths.extend(&self.hidden_widths);
        widths.push(self.dataset.num_classes);
        MlpSpec::new(widths, self.hidden_activation, seed)
    }
}

/// Train/val/test feature splits with the OOD rows separated out.
pub struct PreparedData {
    pub num_classes: usize,
    pub train_x: Vec<Vec<f64>>,
    pub train_t: Vec<usize>,
    pub val_x: Vec<Vec<f64>>,
    pub val_t: Vec<usize>,
    pub val_ood_x: Vec<Vec<f64>>,
    pub test_x: Vec<Vec<f64>>,
    pub test_t: Vec<usize>,
    pub test_ood_x: Vec<Vec<f64>>,
}

/// Generates the blobs + ring, splits stratified, and standardizes on the
/// train statistics.
pub fn prepare_data(spec: &DatasetSpec) -> Result<PreparedData> {
    let mut ds = gaussian_blobs(
        spec.num_classes,
        spec.per_class,
        spec.dim,
        spec.spread,
        spec.data_seed,
    )?;
    if spec.ood_count > 0 {
        let ring = ood_ring(
            spec.ood_count,
            spec.dim,
            spec.ood_radius,
            spec.data_seed.wrapping_add(1),
        )?;
        ds.extend(&ring)?;
    }
    let (mut train, mut val, mut test) =
        ds.split_stratified(spec.val_fraction, spec.test_fraction, spec.data_seed ^ 0xA5)?;

    if spec.standardize {
        let (train_feats, _) = train.labeled_rows();
        let st = Standardizer::fit(&train_feats)?;
        st.transform_dataset(&mut train);
        st.transform_dataset(&mut val);
        st.transform_dataset(&mut test);
    }

    let split_ood = |d: &LabeledDataset| -> (Vec<Vec<f64>>, Vec<usize>, Vec<Vec<f64>>) {
        let mut x = Vec::new();
        let mut t = Vec::new();
        let mut ood = Vec::new();
        for i in 0..d.len() {
            match d.labels[i] {
                Some(c) => {
                    x.push(d.features[i].clone());
                    t.push(c);
                }
                None => ood.push(d.features[i].clone()),
            }
        }
        (x, t, ood)
    };

    let (train_x, train_t, train_ood) = split_ood(&train);
    debug_assert!(train_ood.is_empty());
    let (val_x, val_t, val_ood_x) = split_ood(&val);
    let (test_x, test_t, test_ood_x) = split_ood(&test);

    if train_x.is_empty() {
        return Err(Error::Dataset("train split is empty".into()));
    }
    Ok(PreparedData {
        num_classes: spec.num_classes,
        train_x,
        train_t,
        val_x,
        val_t,
        val_ood_x,
        test_x,
        test_t,
        test_ood_x,
    })
}

/// Everything measured on one trained model.
pub struct RunOutput {
    pub metrics: BTreeMap<String, f64>,
    pub epoch_log: Vec<EpochLog>,
    pub val_ood_auroc: Option<f64>,
    pub net: Mlp,
}

fn dirichlet_batch(
    logits: &[Vec<f64>],
    loss: &LossConfig,
) -> Result<Vec<DirichletParams>> {
    logits
        .iter()
        .map(|row| {
            let e = loss.evidence_fn.apply_slice(row)?;
            DirichletParams::new(e.iter().map(|&v| v + loss.lambda).collect())
        })
        .collect()
}

fn max_softmax_confidences(logits: &[Vec<f64>]) -> Vec<f64> {
    logits
        .iter()
        .map(|row| {
            let p = softmax(row);
            p.iter().cloned().fold(f64::MIN, f64::max)
        })
        .collect()
}

/// Confidence per sample for OOD scoring under the configured head.
fn ood_confidences(
    logits: &[Vec<f64>],
    loss: &LossConfig,
    measure: UncertaintyMeasure,
) -> Result<Vec<f64>> {
    if loss.form.is_evidential() {
        let params = dirichlet_batch(logits, loss)?;
        let w = loss.lambda * logits[0].len() as f64;
        Ok(metrics::uncertainty_scores(&params, measure, w))
    } else {
        Ok(max_softmax_confidences(logits))
    }
}

/// Trains one model and evaluates the full metric set.
pub fn train_and_eval(
    data: &PreparedData,
    cfg: &ExperimentConfig,
    loss: &LossConfig,
    seed: u64,
) -> Result<RunOutput> {
    let mut net = Mlp::new(cfg.mlp_spec(seed))?;
    let epoch_log = train(
        &mut net,
        &data.train_x,
        &data.train_t,
        loss,
        &cfg.train_config(seed),
    )?;

    let mut out = BTreeMap::new();
    let test_logits = net.forward(&data.test_x)?;

    // Classification accuracy and per-sample correctness on test ID rows.
    let correct: Vec<bool> = test_logits
        .iter()
        .zip(&data.test_t)
        .map(|(row, &t)| argmax(row) == t)
        .collect();
    let accuracy = correct.iter().filter(|&&c| c).count() as f64 / correct.len().max(1) as f64;
    out.insert("cls_acc".into(), accuracy);

    // Misclassification detection: correct = positive, confidence = max
    // projected probability (max softmax probability for softmax heads).
    let mis_conf: Vec<f64> = if loss.form.is_evidential() {
        dirichlet_batch(&test_logits, loss)?
            .iter()
            .map(|d| d.max_projected())
            .collect()
    } else {
        max_softmax_confidences(&test_logits)
    };
    let mis_samples: Vec<ScoredSample> = mis_conf
        .iter()
        .zip(&correct)
        .map(|(&c, &ok)| ScoredSample::new(c, ok))
        .collect();
    if let Ok(v) = metrics::aupr(&mis_samples) {
        out.insert("mis_aupr".into(), v);
    }

    // OOD detection on the test split, ID = positive.
    if !data.test_ood_x.is_empty() {
        let ood_logits = net.forward(&data.test_ood_x)?;
        if loss.form.is_evidential() {
            for &measure in &cfg.measures {
                let id_scores = ood_confidences(&test_logits, loss, measure)?;
                let ood_scores = ood_confidences(&ood_logits, loss, measure)?;
                let samples: Vec<ScoredSample> = id_scores
                    .iter()
                    .map(|&c| ScoredSample::new(c, true))
                    .chain(ood_scores.iter().map(|&c| ScoredSample::new(c, false)))
                    .collect();
                out.insert(
                    format!("ood_aupr_{}", measure.name()),
                    metrics::aupr(&samples)?,
                );
                out.insert(
                    format!("ood_auroc_{}", measure.name()),
                    metrics::auroc(&samples)?,
                );
            }
        } else {
            let id_scores = max_softmax_confidences(&test_logits);
            let ood_scores = max_softmax_confidences(&ood_logits);
            let samples: Vec<ScoredSample> = id_scores
                .iter()
                .map(|&c| ScoredSample::new(c, true))
                .chain(ood_scores.iter().map(|&c| ScoredSample::new(c, false)))
                .collect();
            out.insert("ood_aupr_maxp".into(), metrics::aupr(&samples)?);
            out.insert("ood_auroc_maxp".into(), metrics::auroc(&samples)?);
        }

        // Evidence allocation diagnostics.
        if loss.form.is_evidential() {
            let mut target_sum = 0.0;
            let mut nontarget_sum = 0.0;
            let mut nontarget_n = 0usize;
            for (row, &t) in test_logits.iter().zip(&data.test_t) {
                let e = loss.evidence_fn.apply_slice(row)?;
                for (k, &v) in e.iter().enumerate() {
                    if k == t {
                        target_sum += v;
                    } else {
                        nontarget_sum += v;
                        nontarget_n += 1;
                    }
                }
            }
            let n_id = data.test_x.len().max(1) as f64;
            let target_mean = target_sum / n_id;
            let nontarget_mean = nontarget_sum / nontarget_n.max(1) as f64;
            out.insert("target_evidence".into(), target_mean);
            out.insert("nontarget_evidence".into(), nontarget_mean);
            out.insert(
                "target_total_ratio".into(),
                target_sum / (target_sum + nontarget_sum).max(f64::MIN_POSITIVE),
            );
            let mut ood_total = 0.0;
            for row in &ood_logits {
                ood_total += loss.evidence_fn.apply_slice(row)?.iter().sum::<f64>();
            }
            out.insert(
                "ood_evidence".into(),
                ood_total / data.test_ood_x.len() as f64,
            );
        }
    }

    // Validation OOD AUROC for λ selection.
    let val_ood_auroc = if !data.val_x.is_empty() && !data.val_ood_x.is_empty() {
        let val_logits = net.forward(&data.val_x)?;
        let val_ood_logits = net.forward(&data.val_ood_x)?;
        let measure = UncertaintyMeasure::Um;
        let id_scores = ood_confidences(&val_logits, loss, measure)?;
        let ood_scores = ood_confidences(&val_ood_logits, loss, measure)?;
        let samples: Vec<ScoredSample> = id_scores
            .iter()
            .map(|&c| ScoredSample::new(c, true))
            .chain(ood_scores.iter().map(|&c| ScoredSample::new(c, false)))
            .collect();
        let v = metrics::auroc(&samples)?;
        out.insert("val_ood_auroc".into(), v);
        Some(v)
    } else {
        None
    };

    Ok(RunOutput {
        metrics: out,
        epoch_log,
        val_ood_auroc,
        net,
    })
}

/// Trains once per sweep value and returns the λ maximizing validation OOD
/// AUROC (lowest λ wins ties), with the whole selection curve.
pub fn select_lambda(
    data: &PreparedData,
    cfg: &ExperimentConfig,
    loss: &LossConfig,
    seed: u64,
) -> Result<(f64, Vec<(f64, f64)>)> {
    let mut curve = Vec::with_capacity(cfg.lambda_sweep.len());
    let mut best: Option<(f64, f64)> = None;
    for &lambda in &cfg.lambda_sweep {
        let candidate = LossConfig { lambda, ..*loss };
        let run = train_and_eval(data, cfg, &candidate, seed)?;
        let score = run.val_ood_auroc.ok_or_else(|| {
            Error::Dataset("lambda selection needs a validation split with ood rows".into())
        })?;
        curve.push((lambda, score));
        if best.map(|(_, b)| score > b).unwrap_or(true) {
            best = Some((lambda, score));
        }
    }
    Ok((best.unwrap().0, curve))
}

/// One aggregated grid cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub label: String,
    pub lambda: String,
    pub mu: f64,
    /// metric name → (mean, sd) across seeds.
    pub metrics: BTreeMap<String, (f64, f64)>,
    /// λ chosen per seed when the cell tunes λ on validation.
    pub selected_lambdas: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultTable {
    pub format_version: u32,
    pub rows: Vec<CellResult>,
}

fn aggregate(per_seed: &[BTreeMap<String, f64>]) -> BTreeMap<String, (f64, f64)> {
    let mut keys = BTreeSet::new();
    for m in per_seed {
        keys.extend(m.keys().cloned());
    }
    let mut out = BTreeMap::new();
    for key in keys {
        let values: Vec<f64> = per_seed.iter().filter_map(|m| m.get(&key).cloned()).collect();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        out.insert(key, (mean, sd));
    }
    out
}

impl ResultTable {
    /// Flat CSV with one row per cell: label, lambda, mu, then
    /// `<metric>_mean`/`<metric>_sd` column pairs over the union of metrics.
    pub fn to_csv_string(&self) -> String {
        let mut names = BTreeSet::new();
        for row in &self.rows {
            names.extend(row.metrics.keys().cloned());
        }
        let mut out = String::from("label,lambda,mu");
        for name in &names {
            let _ = write!(out, ",{name}_mean,{name}_sd");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{},{}", row.label, row.lambda, row.mu);
            for name in &names {
                match row.metrics.get(name) {
                    Some((mean, sd)) => {
                        let _ = write!(out, ",{mean},{sd}");
                    }
                    None => out.push_str(",,"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Full λ × μ sweep: every cell trained on every seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let data = prepare_data(&cfg.dataset)?;
    let mut rows = Vec::new();
    for &lambda in &cfg.lambda_sweep {
        for &mu in &cfg.mu_sweep {
            let loss = LossConfig {
                lambda,
                kl_coefficient: mu,
                ..cfg.loss
            };
            let mut per_seed = Vec::with_capacity(cfg.seeds.len());
            for &seed in &cfg.seeds {
                per_seed.push(train_and_eval(&data, cfg, &loss, seed)?.metrics);
            }
            rows.push(CellResult {
                label: format!("lambda={lambda},mu={mu}"),
                lambda: format!("{lambda}"),
                mu,
                metrics: aggregate(&per_seed),
                selected_lambdas: Vec::new(),
            });
        }
    }
    Ok(ResultTable {
        format_version: FORMAT_VERSION,
        rows,
    })
}

/// One ablation row: which of the three legacy settings are retained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AblationCell {
    /// λ pinned to 1 (retained) vs tuned on validation (relaxed).
    pub fixed_lambda: bool,
    /// Variance-minimizing term in the empirical risk.
    pub variance_term: bool,
    /// KL regularizer on non-target evidence.
    pub kl_regularizer: bool,
}

impl AblationCell {
    pub fn label(&self) -> String {
        match (self.fixed_lambda, self.variance_term, self.kl_regularizer) {
            (true, true, true) => "edl".into(),
            (false, false, false) => "re_edl".into(),
            (f, v, k) => format!(
                "lambda_{}|var_{}|kl_{}",
                if f { "fixed" } else { "tuned" },
                if v { "on" } else { "off" },
                if k { "on" } else { "off" }
            ),
        }
    }
}

/// The eight rows, from all-retained (traditional form) to all-relaxed.
pub fn ablation_grid() -> Vec<AblationCell> {
    let mut rows = Vec::with_capacity(8);
    for &(f, v, k) in &[
        (true, true, true),
        (false, true, true),
        (true, false, true),
        (true, true, false),
        (false, false, true),
        (false, true, false),
        (true, false, false),
        (false, false, false),
    ] {
        rows.push(AblationCell {
            fixed_lambda: f,
            variance_term: v,
            kl_regularizer: k,
        });
    }
    rows
}

/// Runs the eight-row ablation. Rows that relax λ tune it per seed on the
/// validation split; the KL coefficient for retained-KL rows comes from
/// `cfg.loss.kl_coefficient` (1.0 when that is zero).
pub fn run_ablation(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let data = prepare_data(&cfg.dataset)?;
    let kl_on = if cfg.loss.kl_coefficient > 0.0 {
        cfg.loss.kl_coefficient
    } else {
        1.0
    };
    let mut rows = Vec::new();
    for cell in ablation_grid() {
        let base = LossConfig {
            form: if cell.variance_term {
                LossForm::EdlMse
            } else {
                LossForm::ReEdlMse
            },
            use_variance_term: cell.variance_term,
            kl_coefficient: if cell.kl_regularizer { kl_on } else { 0.0 },
            ..cfg.loss
        };
        let mut per_seed = Vec::with_capacity(cfg.seeds.len());
        let mut selected = Vec::new();
        for &seed in &cfg.seeds {
            let loss = if cell.fixed_lambda {
                LossConfig { lambda: 1.0, ..base }
            } else {
                let (lambda, _) = select_lambda(&data, cfg, &base, seed)?;
                selected.push(lambda);
                LossConfig { lambda, ..base }
            };
            per_seed.push(train_and_eval(&data, cfg, &loss, seed)?.metrics);
        }
        rows.push(CellResult {
            label: cell.label(),
            lambda: if cell.fixed_lambda {
                "1".into()
            } else {
                "tuned".into()
            },
            mu: if cell.kl_regularizer { kl_on } else { 0.0 },
            metrics: aggregate(&per_seed),
            selected_lambdas: selected,
        });
    }
    Ok(ResultTable {
        format_version: FORMAT_VERSION,
        rows,
    })
}

/// Serializes the curve points produced by the metrics module.
pub fn pr_csv(points: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("threshold,precision,recall\n");
    for (t, p, r) in points {
        let _ = writeln!(out, "{t},{p},{r}");
    }
    out
}

pub fn roc_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("fpr,tpr\n");
    for (fpr, tpr) in points {
        let _ = writeln!(out, "{fpr},{tpr}");
    }
    out
}

pub fn epochs_csv(log: &[EpochLog]) -> String {
    let mut out = String::from("epoch,loss,accuracy,target_evidence,nontarget_evidence\n");
    for e in log {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.epoch, e.mean_loss, e.accuracy, e.mean_target_evidence, e.mean_nontarget_evidence
        );
    }
    out
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub format_version: u32,
    pub tool_version: &'static str,
    pub git_hash: Option<String>,
}

impl Manifest {
    pub fn collect() -> Self {
        Manifest {
            format_version: FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            git_hash: git_hash(),
        }
    }
}

fn git_hash() -> Option<String> {
    let out = Command::new("git")
        .args(["rev-parse", "HEAD"])
        .output()
        .ok()?;
    if !out.status.success() {
        return None;
    }
    Some(String::from_utf8_lossy(&out.stdout).trim().to_string())
}

/// A run directory guarded by a `.partial` marker: the marker exists from
/// creation until `finish`, so interrupted runs are recognizable.
pub struct RunDir {
    dir: PathBuf,
}

impl RunDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(".partial"), b"")?;
        Ok(RunDir {
            dir: dir.to_path_buf(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), contents)?;
        Ok(())
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        self.write(name, &serde_json::to_string_pretty(value)?)
    }

    pub fn finish(self) -> Result<()> {
        std::fs::remove_file(self.dir.join(".partial"))?;
        Ok(())
    }
}
