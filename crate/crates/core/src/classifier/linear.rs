use super::features::{featurize, FeatureConfig, SparseVector};
use super::{ClassifierError, LabelDistribution, PairClassifier, Task};
use crate::dataset::PairInstance;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper {
    pub epochs: usize,
    pub lr: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            epochs: 10,
            lr: 0.1,
            l2: 1e-6,
            seed: 0,
        }
    }
}

/// Training settings and outcome stored alongside the parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrainingMeta {
    pub seed: u64,
    pub epochs: u32,
    pub lr: f64,
    pub l2: f64,
    pub final_loss: f64,
}

/// Multinomial logistic regression over hashed features. `weights` is
/// row-major, one row of `dim` values per label.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub task: Task,
    pub features: FeatureConfig,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub meta: TrainingMeta,
}

/// A featurized example with its label index.
pub type LabeledVector = (SparseVector, usize);

/// Gradient with the same layout as the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean regularized training loss after each epoch.
    pub epoch_losses: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(task: Task, features: FeatureConfig) -> Self {
        let k = task.num_labels();
        LinearModel {
            task,
            features,
            weights: vec![0.0; k * features.dim],
            bias: vec![0.0; k],
            meta: TrainingMeta::default(),
        }
    }

    pub fn num_labels(&self) -> usize {
        self.bias.len()
    }

    fn row(&self, k: usize) -> &[f64] {
        let d = self.features.dim;
        &self.weights[k * d..(k + 1) * d]
    }

    pub fn logits(&self, x: &SparseVector) -> Vec<f64> {
        (0..self.num_labels())
            .map(|k| x.dot(self.row(k)) + self.bias[k])
            .collect()
    }

    pub fn predict_vector(&self, x: &SparseVector) -> LabelDistribution {
        LabelDistribution::softmax(&self.logits(x))
    }

    pub fn predict(&self, inst: &PairInstance) -> LabelDistribution {
        self.predict_vector(&featurize(inst, &self.features))
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.bias).all(|v| v.is_finite())
    }

    /// Mean cross-entropy over `batch` plus `l2 / 2 * ||weights||^2`, and
    /// its analytic gradient. The bias is not regularized.
    pub fn loss_and_grad(&self, batch: &[LabeledVector]) -> (f64, Gradient) {
        assert!(!batch.is_empty(), "empty batch");
        let k = self.num_labels();
        let d = self.features.dim;
        let l2 = self.meta.l2;
        let mut grad = Gradient {
            weights: self.weights.iter().map(|w| l2 * w).collect(),
            bias: vec![0.0; k],
        };
        let scale = 1.0 / batch.len() as f64;
        let mut ce = 0.0;
        for (x, y) in batch {
            let p = self.predict_vector(x);
            ce -= p.scores[*y].ln();
            for c in 0..k {
                let g = (p.scores[c] - if c == *y { 1.0 } else { 0.0 }) * scale;
                grad.bias[c] += g;
                for &(j, v) in &x.entries {
                    grad.weights[c * d + j as usize] += g * v;
                }
            }
        }
        let sq: f64 = self.weights.iter().map(|w| w * w).sum();
        (ce * scale + 0.5 * l2 * sq, grad)
    }

    /// Mean regularized loss without the gradient.
    pub fn loss(&self, data: &[LabeledVector]) -> f64 {
        let ce: f64 = data
            .iter()
            .map(|(x, y)| -self.predict_vector(x).scores[*y].ln())
            .sum();
        let sq: f64 = self.weights.iter().map(|w| w * w).sum();
        ce / data.len() as f64 + 0.5 * self.meta.l2 * sq
    }
}

impl PairClassifier for LinearModel {
    fn task(&self) -> Task {
        self.task
    }

    fn classify(&self, instances: &[PairInstance]) -> Result<Vec<LabelDistribution>, ClassifierError> {
        Ok(crate::par::map(instances, |inst| self.predict(inst)))
    }
}

/// Trains by per-example SGD on softmax cross-entropy with L2 decay. The
/// example order is reshuffled every epoch from `hyper.seed`, so the result
/// is bit-identical for identical inputs.
pub fn train(
    examples: &[(PairInstance, usize)],
    task: Task,
    features: FeatureConfig,
    hyper: Hyper,
) -> Result<(LinearModel, TrainReport), ClassifierError> {
    let k = task.num_labels();
    let mut present = vec![false; k];
    for (_, y) in examples {
        match present.get_mut(*y) {
            Some(p) => *p = true,
            None => {
                return Err(ClassifierError::UnknownLabel {
                    task,
                    label: y.to_string(),
                })
            }
        }
    }
    if let Some(missing) = present.iter().position(|p| !p) {
        return Err(ClassifierError::DegenerateData(task.labels()[missing].to_string()));
    }

    let data: Vec<LabeledVector> = crate::par::map(examples, |(inst, y)| (featurize(inst, &features), *y));
    train_vectors(&data, task, features, hyper)
}

/// [`train`] on already featurized data.
pub fn train_vectors(
    data: &[LabeledVector],
    task: Task,
    features: FeatureConfig,
    hyper: Hyper,
) -> Result<(LinearModel, TrainReport), ClassifierError> {
    let k = task.num_labels();
    let d = features.dim;
    let mut model = LinearModel::zeros(task, features);
    model.meta = TrainingMeta {
        seed: hyper.seed,
        epochs: hyper.epochs as u32,
        lr: hyper.lr,
        l2: hyper.l2,
        final_loss: f64::NAN,
    };
    let mut rng = SplitMix64::new(hyper.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let decay = 1.0 - hyper.lr * hyper.l2;
    // weights = scale * raw, so the L2 shrink is O(1) per step.
    let mut scale = 1.0f64;
    let mut losses = Vec::with_capacity(hyper.epochs);
    let mut logits = vec![0.0; k];

    for epoch in 0..hyper.epochs {
        rng.shuffle(&mut order);
        for &i in &order {
            let (x, y) = &data[i];
            for (c, z) in logits.iter_mut().enumerate() {
                *z = scale * x.dot(&model.weights[c * d..(c + 1) * d]) + model.bias[c];
            }
            let p = LabelDistribution::softmax(&logits);
            scale *= decay;
            let step = hyper.lr / scale;
            for c in 0..k {
                let g = p.scores[c] - if c == *y { 1.0 } else { 0.0 };
                if g == 0.0 {
                    continue;
                }
                model.bias[c] -= hyper.lr * g;
                let row = &mut model.weights[c * d..(c + 1) * d];
                for &(j, v) in &x.entries {
                    row[j as usize] -= step * g * v;
                }
            }
            if scale < 1e-6 {
                model.weights.iter_mut().for_each(|w| *w *= scale);
                scale = 1.0;
            }
        }
        if scale != 1.0 {
            model.weights.iter_mut().for_each(|w| *w *= scale);
            scale = 1.0;
        }
        let loss = model.loss(data);
        if !loss.is_finite() || !model.is_finite() {
            return Err(ClassifierError::NonFiniteLoss { epoch: epoch + 1 });
        }
        losses.push(loss);
    }
    model.meta.final_loss = losses.last().copied().unwrap_or_else(|| {
        if data.is_empty() {
            f64::NAN
        } else {
            model.loss(data)
        }
    });
    Ok((model, TrainReport { epoch_losses: losses }))
}
