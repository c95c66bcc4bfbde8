//! Seeded synthetic datasets for ID classification, OOD detection, and the
//! noisy setting, plus CSV import/export and split/standardization helpers.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Provenance tag carried by every row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Origin {
    Id,
    Ood,
    /// Gaussian-perturbed copy of an ID row, tagged with the noise SD.
    Noisy(f64),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Id => write!(f, "id"),
            Origin::Ood => write!(f, "ood"),
            Origin::Noisy(sigma) => write!(f, "noisy:{sigma}"),
        }
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "id" => Ok(Origin::Id),
            "ood" => Ok(Origin::Ood),
            other => {
                if let Some(sigma) = other.strip_prefix("noisy:") {
                    let sigma: f64 = sigma
                        .parse()
                        .map_err(|_| Error::Dataset(format!("bad origin tag `{other}`")))?;
                    Ok(Origin::Noisy(sigma))
                } else {
                    Err(Error::Dataset(format!("bad origin tag `{other}`")))
                }
            }
        }
    }
}

/// Feature rows with class labels (`None` marks OOD rows, which never enter
/// a training split) and per-row origin tags.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub num_classes: usize,
    pub dim: usize,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<Option<usize>>,
    pub origins: Vec<Origin>,
}

impl LabeledDataset {
    pub fn empty(num_classes: usize, dim: usize) -> Self {
        LabeledDataset {
            num_classes,
            dim,
            features: Vec::new(),
            labels: Vec::new(),
            origins: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn one_hot(&self, row: usize) -> Option<Vec<f64>> {
        self.labels[row].map(|c| {
            let mut y = vec![0.0; self.num_classes];
            y[c] = 1.0;
            y
        })
    }

    /// Appends all rows of `other`; dimensions must agree.
    pub fn extend(&mut self, other: &LabeledDataset) -> Result<()> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                op: "dataset_extend",
                expected: self.dim,
                got: other.dim,
            });
        }
        self.num_classes = self.num_classes.max(other.num_classes);
        self.features.extend(other.features.iter().cloned());
        self.labels.extend(other.labels.iter().cloned());
        self.origins.extend(other.origins.iter().cloned());
        Ok(())
    }

    pub fn select(&self, indices: &[usize]) -> Self {
        LabeledDataset {
            num_classes: self.num_classes,
            dim: self.dim,
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            origins: indices.iter().map(|&i| self.origins[i]).collect(),
        }
    }

    /// Rows carrying a class label, as (features, label) pairs.
    pub fn labeled_rows(&self) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut xs = Vec::new();
        let mut ts = Vec::new();
        for (i, label) in self.labels.iter().enumerate() {
            if let Some(c) = label {
                xs.push(self.features[i].clone());
                ts.push(*c);
            }
        }
        (xs, ts)
    }

    /// Stratified split into (train, val, test), reproducible per seed.
    ///
    /// Each class stratum is shuffled and cut by the requested fractions.
    /// OOD rows never reach the train split; they are divided between val
    /// and test proportionally.
    pub fn split_stratified(
        &self,
        val_fraction: f64,
        test_fraction: f64,
        seed: u64,
    ) -> Result<(Self, Self, Self)> {
        if !(0.0..1.0).contains(&val_fraction)
            || !(0.0..1.0).contains(&test_fraction)
            || val_fraction + test_fraction >= 1.0
        {
            return Err(Error::invalid(
                "split_stratified",
                "need 0 <= val + test < 1",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut strata: Vec<Vec<usize>> = vec![Vec::new(); self.num_classes + 1];
        for (i, label) in self.labels.iter().enumerate() {
            match label {
                Some(c) => strata[*c].push(i),
                None => strata[self.num_classes].push(i),
            }
        }

        let mut train_idx = Vec::new();
        let mut val_idx = Vec::new();
        let mut test_idx = Vec::new();

        for (stratum, indices) in strata.iter_mut().enumerate() {
            shuffle(indices, &mut rng);
            let n = indices.len();
            if stratum == self.num_classes {
                // OOD stratum: split between val and test only.
                if n > 0 && val_fraction + test_fraction == 0.0 {
                    return Err(Error::invalid(
                        "split_stratified",
                        "ood rows present but val and test fractions are both zero",
                    ));
                }
                let share = if val_fraction + test_fraction > 0.0 {
                    val_fraction / (val_fraction + test_fraction)
                } else {
                    0.0
                };
                let n_val = (n as f64 * share).round() as usize;
                val_idx.extend(&indices[..n_val]);
                test_idx.extend(&indices[n_val..]);
            } else {
                let n_val = (n as f64 * val_fraction).round() as usize;
                let n_test = (n as f64 * test_fraction).round() as usize;
                val_idx.extend(&indices[..n_val]);
                test_idx.extend(&indices[n_val..n_val + n_test]);
                train_idx.extend(&indices[n_val + n_test..]);
            }
        }

        train_idx.sort_unstable();
        val_idx.sort_unstable();
        test_idx.sort_unstable();
        Ok((
            self.select(&train_idx),
            self.select(&val_idx),
            self.select(&test_idx),
        ))
    }

    /// Writes `f0..f{d-1},label,origin` rows; OOD rows use the sentinel -1.
    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for j in 0..self.dim {
            out.push_str(&format!("f{j},"));
        }
        out.push_str("label,origin\n");
        for i in 0..self.len() {
            for v in &self.features[i] {
                out.push_str(&format!("{v},"));
            }
            match self.labels[i] {
                Some(c) => out.push_str(&format!("{c},")),
                None => out.push_str("-1,"),
            }
            out.push_str(&format!("{}\n", self.origins[i]));
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Dataset("empty csv".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 3 || cols[cols.len() - 2] != "label" || cols[cols.len() - 1] != "origin" {
            return Err(Error::Dataset(
                "expected header f0..fN,label,origin".into(),
            ));
        }
        let dim = cols.len() - 2;

        let mut ds = LabeledDataset::empty(0, dim);
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != dim + 2 {
                return Err(Error::Dataset(format!(
                    "row {}: expected {} fields, got {}",
                    lineno + 2,
                    dim + 2,
                    fields.len()
                )));
            }
            let mut row = Vec::with_capacity(dim);
            for f in &fields[..dim] {
                row.push(f.parse::<f64>().map_err(|_| {
                    Error::Dataset(format!("row {}: bad feature `{f}`", lineno + 2))
                })?);
            }
            let label: i64 = fields[dim]
                .parse()
                .map_err(|_| Error::Dataset(format!("row {}: bad label", lineno + 2)))?;
            let label = if label < 0 { None } else { Some(label as usize) };
            let origin: Origin = fields[dim + 1].parse()?;
            if let Some(c) = label {
                ds.num_classes = ds.num_classes.max(c + 1);
            }
            ds.features.push(row);
            ds.labels.push(label);
            ds.origins.push(origin);
        }
        Ok(ds)
    }
}

fn shuffle(order: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
}

/// Class means evenly spaced on the unit circle in the first two feature
/// dimensions (an equilateral arrangement for three classes), zero elsewhere.
pub fn blob_means(num_classes: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..num_classes)
        .map(|c| {
            let angle = 2.0 * std::f64::consts::PI * c as f64 / num_classes as f64;
            let mut mean = vec![0.0; dim];
            mean[0] = angle.cos();
            mean[1] = angle.sin();
            mean
        })
        .collect()
}

/// Isotropic Gaussian clusters around the circle arrangement of `blob_means`.
pub fn gaussian_blobs(
    num_classes: usize,
    n_per_class: usize,
    dim: usize,
    spread: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    if num_classes < 2 {
        return Err(Error::invalid("gaussian_blobs", "need at least 2 classes"));
    }
    if dim < 2 {
        return Err(Error::invalid("gaussian_blobs", "need dim >= 2"));
    }
    if n_per_class == 0 {
        return Err(Error::invalid("gaussian_blobs", "need n_per_class >= 1"));
    }
    if !(spread.is_finite() && spread >= 0.0) {
        return Err(Error::invalid(
            "gaussian_blobs",
            format!("spread must be non-negative, got {spread}"),
        ));
    }
    let means = blob_means(num_classes, dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ds = LabeledDataset::empty(num_classes, dim);
    for (c, mean) in means.iter().enumerate() {
        for _ in 0..n_per_class {
            let row: Vec<f64> = mean
                .iter()
                .map(|&m| m + spread * rng.sample::<f64, _>(StandardNormal))
                .collect();
            ds.features.push(row);
            ds.labels.push(Some(c));
            ds.origins.push(Origin::Id);
        }
    }
    Ok(ds)
}

/// Points uniform in direction on an annulus of the given radius (±10%),
/// tagged OOD with the sentinel label.
pub fn ood_ring(n: usize, dim: usize, radius: f64, seed: u64) -> Result<LabeledDataset> {
    if dim < 2 {
        return Err(Error::invalid("ood_ring", "need dim >= 2"));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::invalid(
            "ood_ring",
            format!("radius must be positive, got {radius}"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ds = LabeledDataset::empty(0, dim);
    for _ in 0..n {
        let mut dir: Vec<f64> = (0..dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        // A fresh direction is drawn if the Gaussian vector is degenerate.
        if norm < 1e-12 {
            dir = vec![1.0; dim];
        }
        let r = radius * rng.random_range(0.9..1.1);
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut dir {
            *v *= r / norm;
        }
        ds.features.push(dir);
        ds.labels.push(None);
        ds.origins.push(Origin::Ood);
    }
    Ok(ds)
}

/// One perturbed copy of the dataset per σ: features += N(0, σ²) i.i.d.,
/// labels preserved, rows re-tagged `noisy:σ`.
pub fn add_noise(ds: &LabeledDataset, sigmas: &[f64], seed: u64) -> Result<Vec<LabeledDataset>> {
    if let Some(&bad) = sigmas.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(Error::invalid(
            "add_noise",
            format!("sigma must be non-negative, got {bad}"),
        ));
    }
    let mut out = Vec::with_capacity(sigmas.len());
    for (k, &sigma) in sigmas.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let mut noisy = ds.clone();
        for row in &mut noisy.features {
            for v in row.iter_mut() {
                *v += sigma * rng.sample::<f64, _>(StandardNormal);
            }
        }
        for origin in &mut noisy.origins {
            *origin = Origin::Noisy(sigma);
        }
        out.push(noisy);
    }
    Ok(out)
}

/// The noise grid 0.025, 0.050, ..., 0.200.
pub fn default_noise_grid() -> Vec<f64> {
    (1..=8).map(|i| i as f64 * 0.025).collect()
}

/// Per-feature zero-mean/unit-variance scaling fitted on train statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl Standardizer {
    pub fn fit(features: &[Vec<f64>]) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Dataset("cannot fit standardizer on no rows".into()));
        }
        let dim = features[0].len();
        let n = features.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in features {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; dim];
        for row in features {
            for ((vv, &v), &m) in var.iter_mut().zip(row).zip(&mean) {
                *vv += (v - m) * (v - m);
            }
        }
        let sd = var
            .iter()
            .map(|&v| (v / n).sqrt().max(1e-12))
            .collect();
        Ok(Standardizer { mean, sd })
    }

    pub fn transform(&self, features: &[Vec<f64>]) -> Vec<Vec<f64>> {
        features
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.mean)
                    .zip(&self.sd)
                    .map(|((&v, &m), &s)| (v - m) / s)
                    .collect()
            })
            .collect()
    }

    pub fn transform_dataset(&self, ds: &mut LabeledDataset) {
        ds.features = self.transform(&ds.features);
    }
}
