//! Minimal feedforward classifier producing logits, trained with Adam
//! against any configured loss.
//!
//! Parameters live in one flat `Vec<f64>` (per layer: row-major weight
//! matrix, then bias), which keeps the optimizer and the finite-difference
//! certification trivial. Everything is seeded and single-threaded, so a
//! training run is bit-reproducible.

use std::fs;
use std::ops::Range;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::{self, LossConfig};
use crate::sl::argmax;

pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the post-activation value.
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

/// Architecture: full width sequence (input, hidden..., classes).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub layer_widths: Vec<usize>,
    pub hidden_activation: Activation,
    pub init_seed: u64,
}

impl MlpSpec {
    pub fn new(layer_widths: Vec<usize>, hidden_activation: Activation, init_seed: u64) -> Self {
        MlpSpec {
            layer_widths,
            hidden_activation,
            init_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_widths.len() < 3 {
            return Err(Error::invalid(
                "MlpSpec",
                "need input, at least one hidden, and output widths",
            ));
        }
        if self.layer_widths.iter().any(|&w| w == 0) {
            return Err(Error::invalid("MlpSpec", "layer widths must be positive"));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layer_widths[0]
    }

    pub fn num_classes(&self) -> usize {
        *self.layer_widths.last().unwrap()
    }

    fn num_params(&self) -> usize {
        self.layer_widths
            .windows(2)
            .map(|w| w[1] * w[0] + w[1])
            .sum()
    }
}

/// Cached per-layer outputs from a forward pass (post-activation for hidden
/// layers, raw logits for the last).
pub struct ForwardCache {
    inputs: Vec<Vec<f64>>,
    layer_outputs: Vec<Vec<Vec<f64>>>,
}

pub struct Mlp {
    spec: MlpSpec,
    params: Vec<f64>,
}

impl Mlp {
    /// Glorot-uniform weights (±√(6/(fan_in+fan_out))), zero biases.
    pub fn new(spec: MlpSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.init_seed);
        let mut params = Vec::with_capacity(spec.num_params());
        for w in spec.layer_widths.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for _ in 0..fan_in * fan_out {
                params.push(rng.random_range(-bound..bound));
            }
            for _ in 0..fan_out {
                params.push(0.0);
            }
        }
        Ok(Mlp { spec, params })
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    /// Flat ranges of each layer's weight block and bias block.
    pub fn layer_param_ranges(&self) -> Vec<(Range<usize>, Range<usize>)> {
        let mut out = Vec::new();
        let mut offset = 0;
        for w in self.spec.layer_widths.windows(2) {
            let wlen = w[1] * w[0];
            let weights = offset..offset + wlen;
            let biases = offset + wlen..offset + wlen + w[1];
            offset = biases.end;
            out.push((weights, biases));
        }
        out
    }

    fn check_batch(&self, batch: &[Vec<f64>]) -> Result<()> {
        let d = self.spec.input_dim();
        for row in batch {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    op: "forward",
                    expected: d,
                    got: row.len(),
                });
            }
        }
        Ok(())
    }

    pub fn forward(&self, batch: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        Ok(self.forward_cached(batch)?.0)
    }

    pub fn forward_cached(&self, batch: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, ForwardCache)> {
        self.check_batch(batch)?;
        let ranges = self.layer_param_ranges();
        let n_layers = ranges.len();
        let mut layer_outputs: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(batch.len()); n_layers];

        for x in batch {
            let mut h = x.clone();
            for (l, (wr, br)) in ranges.iter().enumerate() {
                let weights = &self.params[wr.clone()];
                let biases = &self.params[br.clone()];
                let fan_in = h.len();
                let mut z: Vec<f64> = biases.to_vec();
                for (o, zo) in z.iter_mut().enumerate() {
                    let row = &weights[o * fan_in..(o + 1) * fan_in];
                    *zo += row.iter().zip(&h).map(|(&w, &hi)| w * hi).sum::<f64>();
                }
                if l + 1 < n_layers {
                    for v in &mut z {
                        *v = self.spec.hidden_activation.apply(*v);
                    }
                }
                layer_outputs[l].push(z.clone());
                h = z;
            }
        }

        let logits = layer_outputs[n_layers - 1].clone();
        let cache = ForwardCache {
            inputs: batch.to_vec(),
            layer_outputs,
        };
        Ok((logits, cache))
    }

    /// Backpropagates the per-sample logit gradients and returns the flat
    /// parameter gradient of the batch-mean loss.
    pub fn backward(&self, cache: &ForwardCache, dlogits: &[Vec<f64>]) -> Vec<f64> {
        let ranges = self.layer_param_ranges();
        let n_layers = ranges.len();
        let batch = cache.inputs.len();
        let mut grads = vec![0.0; self.params.len()];

        for s in 0..batch {
            let mut delta = dlogits[s].clone();
            for l in (0..n_layers).rev() {
                let (wr, br) = &ranges[l];
                let prev: &[f64] = if l == 0 {
                    &cache.inputs[s]
                } else {
                    &cache.layer_outputs[l - 1][s]
                };
                let fan_in = prev.len();
                {
                    let gw = &mut grads[wr.clone()];
                    for (o, &d) in delta.iter().enumerate() {
                        for (i, &p) in prev.iter().enumerate() {
                            gw[o * fan_in + i] += d * p;
                        }
                    }
                }
                {
                    let gb = &mut grads[br.clone()];
                    for (o, &d) in delta.iter().enumerate() {
                        gb[o] += d;
                    }
                }
                if l > 0 {
                    let weights = &self.params[wr.clone()];
                    let mut prev_delta = vec![0.0; fan_in];
                    for (o, &d) in delta.iter().enumerate() {
                        let row = &weights[o * fan_in..(o + 1) * fan_in];
                        for (i, &w) in row.iter().enumerate() {
                            prev_delta[i] += w * d;
                        }
                    }
                    for (pd, &a) in prev_delta.iter_mut().zip(prev) {
                        *pd *= self.spec.hidden_activation.derivative_from_output(a);
                    }
                    delta = prev_delta;
                }
            }
        }

        let scale = 1.0 / batch as f64;
        for g in &mut grads {
            *g *= scale;
        }
        grads
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let ckpt = Checkpoint {
            format_version: CHECKPOINT_FORMAT_VERSION,
            spec: self.spec.clone(),
            params: self.params.clone(),
        };
        fs::write(path, serde_json::to_string(&ckpt)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let ckpt: Checkpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
        if ckpt.format_version != CHECKPOINT_FORMAT_VERSION {
            return Err(Error::invalid(
                "checkpoint",
                format!("unsupported format_version {}", ckpt.format_version),
            ));
        }
        ckpt.spec.validate()?;
        if ckpt.params.len() != ckpt.spec.num_params() {
            return Err(Error::invalid(
                "checkpoint",
                format!(
                    "parameter count {} does not match spec ({})",
                    ckpt.params.len(),
                    ckpt.spec.num_params()
                ),
            ));
        }
        Ok(Mlp {
            spec: ckpt.spec,
            params: ckpt.params,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format_version: u32,
    spec: MlpSpec,
    params: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Adam with bias correction.
pub struct AdamState {
    cfg: AdamConfig,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    pub fn new(cfg: AdamConfig, param_count: usize) -> Self {
        AdamState {
            cfg,
            step: 0,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn apply(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                op: "adam_step",
                expected: self.m.len(),
                got: params.len().min(grads.len()),
            });
        }
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.cfg.beta1.powi(t);
        let c2 = 1.0 - self.cfg.beta2.powi(t);
        for i in 0..params.len() {
            self.m[i] = self.cfg.beta1 * self.m[i] + (1.0 - self.cfg.beta1) * grads[i];
            self.v[i] = self.cfg.beta2 * self.v[i] + (1.0 - self.cfg.beta2) * grads[i] * grads[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.cfg.learning_rate * m_hat / (v_hat.sqrt() + self.cfg.epsilon);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: u32,
    pub batch_size: usize,
    /// Seed for the epoch shuffles (independent of the init seed).
    pub shuffle_seed: u64,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 60,
            batch_size: 32,
            shuffle_seed: 0,
            adam: AdamConfig::default(),
        }
    }
}

/// Per-epoch diagnostics recorded by `train`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: u32,
    pub mean_loss: f64,
    pub accuracy: f64,
    pub mean_target_evidence: f64,
    pub mean_nontarget_evidence: f64,
}

pub fn one_hot(index: usize, num_classes: usize) -> Vec<f64> {
    let mut y = vec![0.0; num_classes];
    y[index] = 1.0;
    y
}

/// Mini-batch training against the configured loss. The last partial batch
/// is kept. Deterministic for fixed seeds and configuration.
pub fn train(
    net: &mut Mlp,
    features: &[Vec<f64>],
    targets: &[usize],
    loss_cfg: &LossConfig,
    train_cfg: &TrainConfig,
) -> Result<Vec<EpochLog>> {
    if features.is_empty() {
        return Err(Error::Dataset("cannot train on an empty dataset".into()));
    }
    if features.len() != targets.len() {
        return Err(Error::DimensionMismatch {
            op: "train",
            expected: features.len(),
            got: targets.len(),
        });
    }
    let c = net.spec().num_classes();
    if let Some(&bad) = targets.iter().find(|&&t| t >= c) {
        return Err(Error::Dataset(format!(
            "target class {bad} out of range for {c} classes"
        )));
    }
    if train_cfg.batch_size == 0 {
        return Err(Error::invalid("TrainConfig", "batch_size must be >= 1"));
    }
    loss_cfg.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(train_cfg.shuffle_seed);
    let mut adam = AdamState::new(train_cfg.adam, net.num_params());
    let mut order: Vec<usize> = (0..features.len()).collect();
    let mut log = Vec::with_capacity(train_cfg.epochs as usize);

    for epoch in 0..train_cfg.epochs {
        shuffle(&mut order, &mut rng);

        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        let mut target_ev_sum = 0.0;
        let mut nontarget_ev_sum = 0.0;
        let mut nontarget_count = 0usize;

        for chunk in order.chunks(train_cfg.batch_size) {
            let batch: Vec<Vec<f64>> = chunk.iter().map(|&i| features[i].clone()).collect();
            let (logits, cache) = net.forward_cached(&batch)?;

            let mut dlogits = Vec::with_capacity(chunk.len());
            for (row, &i) in logits.iter().zip(chunk) {
                let y = one_hot(targets[i], c);
                loss_sum += losses::total_loss(row, &y, epoch, loss_cfg)?;
                dlogits.push(losses::loss_gradient(row, &y, epoch, loss_cfg)?);

                if argmax(row) == targets[i] {
                    correct += 1;
                }
                let ev = loss_cfg.evidence_fn.apply_slice(row)?;
                for (k, &e) in ev.iter().enumerate() {
                    if k == targets[i] {
                        target_ev_sum += e;
                    } else {
                        nontarget_ev_sum += e;
                        nontarget_count += 1;
                    }
                }
            }

            let grads = net.backward(&cache, &dlogits);
            adam.apply(net.params_mut(), &grads)?;
        }

        let n = features.len() as f64;
        log.push(EpochLog {
            epoch,
            mean_loss: loss_sum / n,
            accuracy: correct as f64 / n,
            mean_target_evidence: target_ev_sum / n,
            mean_nontarget_evidence: nontarget_ev_sum / nontarget_count.max(1) as f64,
        });
    }
    Ok(log)
}

/// Fisher–Yates with the caller's generator.
fn shuffle(order: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::{KlSchedule, LossForm};
    use crate::numerics::EvidenceFunction;

    fn small_spec() -> MlpSpec {
        MlpSpec::new(vec![2, 8, 8, 3], Activation::Tanh, 17)
    }

    #[test]
    fn spec_validation() {
        assert!(MlpSpec::new(vec![2, 3], Activation::Relu, 0).validate().is_err());
        assert!(MlpSpec::new(vec![2, 0, 3], Activation::Relu, 0)
            .validate()
            .is_err());
        assert!(small_spec().validate().is_ok());
    }

    #[test]
    fn zero_params_give_bias_logits() {
        let mut net = Mlp::new(small_spec()).unwrap();
        for p in net.params_mut() {
            *p = 0.0;
        }
        let ranges = net.layer_param_ranges();
        let (_, bias_range) = ranges.last().unwrap().clone();
        for (k, i) in bias_range.clone().enumerate() {
            net.params_mut()[i] = k as f64 + 1.0;
        }
        let logits = net
            .forward(&[vec![0.3, -0.8], vec![5.0, 2.0]])
            .unwrap();
        for row in logits {
            assert_eq!(row, vec![1.0, 2.0, 3.0]);
        }
    }

    #[test]
    fn identity_wiring_passes_positive_inputs_through() {
        let spec = MlpSpec::new(vec![2, 2, 2], Activation::Relu, 3);
        let mut net = Mlp::new(spec).unwrap();
        for p in net.params_mut() {
            *p = 0.0;
        }
        let ranges = net.layer_param_ranges();
        for (wr, _) in &ranges {
            // 2x2 identity
            net.params_mut()[wr.start] = 1.0;
            net.params_mut()[wr.start + 3] = 1.0;
        }
        let logits = net.forward(&[vec![0.5, 1.25]]).unwrap();
        assert_eq!(logits[0], vec![0.5, 1.25]);
    }

    #[test]
    fn forward_is_deterministic() {
        let net = Mlp::new(small_spec()).unwrap();
        let x = vec![vec![0.1, -0.4], vec![1.0, 2.0]];
        assert_eq!(net.forward(&x).unwrap(), net.forward(&x).unwrap());
        let net2 = Mlp::new(small_spec()).unwrap();
        assert_eq!(net.params(), net2.params());
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let net = Mlp::new(small_spec()).unwrap();
        assert!(net.forward(&[vec![1.0, 2.0, 3.0]]).is_err());
    }

    #[test]
    fn zero_upstream_gradient_gives_zero_param_gradient() {
        let net = Mlp::new(small_spec()).unwrap();
        let x = vec![vec![0.2, 0.9]];
        let (_, cache) = net.forward_cached(&x).unwrap();
        let grads = net.backward(&cache, &[vec![0.0, 0.0, 0.0]]);
        assert!(grads.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn batch_gradient_is_mean_of_per_sample_gradients() {
        let net = Mlp::new(small_spec()).unwrap();
        let xs = vec![vec![0.2, 0.9], vec![-1.0, 0.3], vec![0.7, -0.7]];
        let ds = vec![
            vec![0.1, -0.2, 0.3],
            vec![-0.4, 0.5, 0.6],
            vec![0.7, 0.8, -0.9],
        ];
        let (_, cache) = net.forward_cached(&xs).unwrap();
        let batch_grads = net.backward(&cache, &ds);

        let mut mean = vec![0.0; net.num_params()];
        for (x, d) in xs.iter().zip(&ds) {
            let (_, c1) = net.forward_cached(std::slice::from_ref(x)).unwrap();
            let g = net.backward(&c1, std::slice::from_ref(d));
            for (m, gi) in mean.iter_mut().zip(&g) {
                *m += gi;
            }
        }
        for m in &mut mean {
            *m /= xs.len() as f64;
        }
        for (a, b) in batch_grads.iter().zip(&mean) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    /// Mean total loss of a batch as a function of the parameter vector.
    fn batch_loss(net: &Mlp, xs: &[Vec<f64>], ts: &[usize], cfg: &LossConfig) -> f64 {
        let logits = net.forward(xs).unwrap();
        logits
            .iter()
            .zip(ts)
            .map(|(row, &t)| {
                losses::total_loss(row, &one_hot(t, row.len()), 5, cfg).unwrap()
            })
            .sum::<f64>()
            / xs.len() as f64
    }

    #[test]
    fn end_to_end_gradient_matches_finite_differences() {
        let xs = vec![vec![0.2, 0.9], vec![-1.0, 0.3], vec![0.7, -0.7], vec![0.1, 0.1]];
        let ts = vec![0usize, 1, 2, 1];
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
        for (fi, &form) in forms.iter().enumerate() {
            for (ei, &ef) in evidence_fns.iter().enumerate() {
                let mut net = Mlp::new(MlpSpec::new(
                    vec![2, 8, 8, 3],
                    Activation::Tanh,
                    100 + (fi * 3 + ei) as u64,
                ))
                .unwrap();
                let cfg = LossConfig {
                    form,
                    lambda: 0.6,
                    use_variance_term: true,
                    kl_coefficient: 0.4,
                    kl_schedule: KlSchedule::Constant,
                    evidence_fn: ef,
                };

                let (logits, cache) = net.forward_cached(&xs).unwrap();
                let dlogits: Vec<Vec<f64>> = logits
                    .iter()
                    .zip(&ts)
                    .map(|(row, &t)| {
                        losses::loss_gradient(row, &one_hot(t, 3), 5, &cfg).unwrap()
                    })
                    .collect();
                let analytic = net.backward(&cache, &dlogits);

                let h = 1e-5;
                for k in (0..net.num_params()).step_by(7) {
                    let orig = net.params()[k];
                    net.params_mut()[k] = orig + h;
                    let up = batch_loss(&net, &xs, &ts, &cfg);
                    net.params_mut()[k] = orig - h;
                    let dn = batch_loss(&net, &xs, &ts, &cfg);
                    net.params_mut()[k] = orig;
                    let numeric = (up - dn) / (2.0 * h);
                    let denom = analytic[k].abs().max(numeric.abs()).max(1e-4);
                    assert!(
                        (analytic[k] - numeric).abs() / denom <= 1e-4,
                        "form {form:?} ef {ef:?} param {k}: analytic {} numeric {numeric}",
                        analytic[k]
                    );
                }
            }
        }
    }

    #[test]
    fn adam_zero_gradient_keeps_params() {
        let mut params = vec![0.5, -0.25, 1.0];
        let mut adam = AdamState::new(AdamConfig::default(), 3);
        for _ in 0..10 {
            adam.apply(&mut params, &[0.0, 0.0, 0.0]).unwrap();
        }
        assert_eq!(params, vec![0.5, -0.25, 1.0]);
    }

    #[test]
    fn adam_constant_gradient_step_magnitude_approaches_lr() {
        let cfg = AdamConfig::default();
        let mut params = vec![0.0, 0.0];
        let mut adam = AdamState::new(cfg, 2);
        let grads = [2.5, -0.03];
        let mut prev = params.clone();
        for _ in 0..200 {
            prev.copy_from_slice(&params);
            adam.apply(&mut params, &grads).unwrap();
        }
        for ((p, q), g) in params.iter().zip(&prev).zip(&grads) {
            let step = p - q;
            assert!((step.abs() - cfg.learning_rate).abs() < 1e-5);
            assert!(step.signum() == -g.signum());
        }
    }

    #[test]
    fn adam_shape_mismatch() {
        let mut adam = AdamState::new(AdamConfig::default(), 3);
        let mut params = vec![0.0; 2];
        assert!(adam.apply(&mut params, &[0.0, 0.0]).is_err());
    }

    fn blob_toy() -> (Vec<Vec<f64>>, Vec<usize>) {
        // Two well separated clusters.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut xs = Vec::new();
        let mut ts = Vec::new();
        for i in 0..60 {
            let c = i % 2;
            let cx = if c == 0 { -2.0 } else { 2.0 };
            xs.push(vec![
                cx + rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
            ]);
            ts.push(c);
        }
        (xs, ts)
    }

    #[test]
    fn training_separates_blobs() {
        let (xs, ts) = blob_toy();
        let mut net = Mlp::new(MlpSpec::new(vec![2, 16, 16, 2], Activation::Relu, 2)).unwrap();
        let loss_cfg = LossConfig::default();
        let tc = TrainConfig {
            epochs: 100,
            batch_size: 16,
            shuffle_seed: 9,
            adam: AdamConfig::default(),
        };
        let log = train(&mut net, &xs, &ts, &loss_cfg, &tc).unwrap();
        assert_eq!(log.len(), 100);
        assert!(log.last().unwrap().accuracy >= 0.99, "{:?}", log.last());
    }

    #[test]
    fn training_is_reproducible() {
        let (xs, ts) = blob_toy();
        let run = || {
            let mut net =
                Mlp::new(MlpSpec::new(vec![2, 8, 2], Activation::Tanh, 2)).unwrap();
            let tc = TrainConfig {
                epochs: 5,
                batch_size: 8,
                shuffle_seed: 4,
                adam: AdamConfig::default(),
            };
            train(&mut net, &xs, &ts, &LossConfig::default(), &tc).unwrap();
            net.params().to_vec()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn train_rejects_empty_dataset() {
        let mut net = Mlp::new(small_spec()).unwrap();
        let r = train(
            &mut net,
            &[],
            &[],
            &LossConfig::default(),
            &TrainConfig::default(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn checkpoint_round_trip() {
        let dir = std::env::temp_dir().join("redl_nn_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ckpt.json");
        let net = Mlp::new(small_spec()).unwrap();
        net.save(&path).unwrap();
        let loaded = Mlp::load(&path).unwrap();
        assert_eq!(net.params(), loaded.params());
        assert_eq!(net.spec(), loaded.spec());
        std::fs::remove_file(&path).ok();
    }
}
