//! Native classifiers behind a uniform train/predict contract: logistic
//! regression (batch gradient descent on log-loss), a linear SVM
//! (sub-gradient descent on L2-regularized hinge loss), and gradient-boosted
//! depth-1 stumps on logistic loss.
//!
//! All three standardize features with statistics captured at fit time and
//! resolve probability/margin ties at the decision threshold to the positive
//! class, so predictions are fully deterministic.

use serde::{Deserialize, Serialize};

use crate::data::DataView;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    LogisticRegression,
    LinearSvm,
    BoostedStumps,
}

impl ModelKind {
    pub fn label(&self) -> &'static str {
        match self {
            ModelKind::LogisticRegression => "logistic_regression",
            ModelKind::LinearSvm => "linear_svm",
            ModelKind::BoostedStumps => "boosted_stumps",
        }
    }
}

/// Training hyperparameters. `learning_rate` is the gradient step size for
/// the linear models and the shrinkage for boosted stumps; `n_rounds` only
/// applies to stumps and `epochs` only to the linear models.
#[derive(Clone, Debug, Serialize)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_penalty: f64,
    pub n_rounds: usize,
    pub seed: u64,
}

impl TrainConfig {
    /// Per-kind defaults: learning_rate 0.1, epochs 200, l2 1e-3 for the
    /// linear models; shrinkage 0.3 with 50 rounds for boosted stumps.
    pub fn for_kind(kind: ModelKind) -> Self {
        Self {
            kind,
            learning_rate: match kind {
                ModelKind::BoostedStumps => 0.3,
                _ => 0.1,
            },
            epochs: 200,
            l2_penalty: 1e-3,
            n_rounds: 50,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 || self.learning_rate.is_nan() {
            return Err(Error::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be positive".into()));
        }
        if self.l2_penalty < 0.0 || self.l2_penalty.is_nan() {
            return Err(Error::Config(format!(
                "l2_penalty must be non-negative, got {}",
                self.l2_penalty
            )));
        }
        if self.n_rounds == 0 {
            return Err(Error::Config("n_rounds must be positive".into()));
        }
        Ok(())
    }
}

/// Per-feature mean and standard deviation captured at fit time.
/// Zero-variance features get their SD clamped to 1, which turns them into
/// constant zeros after centering.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[f64], n_rows: usize, n_features: usize) -> Self {
        let mut means = vec![0.0; n_features];
        for row in 0..n_rows {
            for (j, m) in means.iter_mut().enumerate() {
                *m += x[row * n_features + j];
            }
        }
        for m in means.iter_mut() {
            *m /= n_rows as f64;
        }
        let mut sds = vec![0.0; n_features];
        for row in 0..n_rows {
            for (j, s) in sds.iter_mut().enumerate() {
                let d = x[row * n_features + j] - means[j];
                *s += d * d;
            }
        }
        for s in sds.iter_mut() {
            *s = (*s / n_rows as f64).sqrt();
            if *s < 1e-12 {
                *s = 1.0;
            }
        }
        Self { means, sds }
    }

    pub fn apply(&self, x: &mut [f64], n_rows: usize) {
        let d = self.means.len();
        for row in 0..n_rows {
            for j in 0..d {
                x[row * d + j] = (x[row * d + j] - self.means[j]) / self.sds[j];
            }
        }
    }
}

/// One axis-aligned depth-1 regression tree. Leaf values are already scaled
/// by the shrinkage.
#[derive(Clone, Debug, PartialEq)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    /// Added to the score when x[feature] < threshold.
    pub left_value: f64,
    pub right_value: f64,
}

#[derive(Clone, Debug)]
pub enum ModelParams {
    Linear { weights: Vec<f64>, bias: f64 },
    Stumps { base_score: f64, stumps: Vec<Stump> },
}

/// Opaque fitted classifier: predictions are deterministic given the fitted
/// state, and the parameter dimensionality equals the training view's
/// feature count.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub params: ModelParams,
    pub standardizer: Standardizer,
}

impl TrainedModel {
    pub fn n_features(&self) -> usize {
        self.standardizer.means.len()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + exp(z)) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn dot_row(weights: &[f64], x: &[f64], row: usize) -> f64 {
    let d = weights.len();
    let mut z = 0.0;
    for (j, w) in weights.iter().enumerate() {
        z += w * x[row * d + j];
    }
    z
}

/// Mean log-loss plus (l2/2)·||w||² over a standardized row-major matrix.
pub fn log_loss_value(weights: &[f64], bias: f64, x: &[f64], labels: &[u8], l2: f64) -> f64 {
    let n = labels.len();
    let mut loss = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        let z = dot_row(weights, x, i) + bias;
        loss += softplus(z) - f64::from(y) * z;
    }
    loss / n as f64 + 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Analytic gradient of [`log_loss_value`] with respect to weights and bias.
pub fn log_loss_gradient(
    weights: &[f64],
    bias: f64,
    x: &[f64],
    labels: &[u8],
    l2: f64,
) -> (Vec<f64>, f64) {
    let n = labels.len();
    let d = weights.len();
    let mut grad_w = vec![0.0; d];
    let mut grad_b = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        let z = dot_row(weights, x, i) + bias;
        let residual = sigmoid(z) - f64::from(y);
        for (j, g) in grad_w.iter_mut().enumerate() {
            *g += residual * x[i * d + j];
        }
        grad_b += residual;
    }
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n as f64 + l2 * w;
    }
    (grad_w, grad_b / n as f64)
}

/// Mean hinge loss plus (l2/2)·||w||², labels in {0,1} mapped to ±1.
pub fn hinge_loss_value(weights: &[f64], bias: f64, x: &[f64], labels: &[u8], l2: f64) -> f64 {
    let n = labels.len();
    let mut loss = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        let target = 2.0 * f64::from(y) - 1.0;
        let margin = target * (dot_row(weights, x, i) + bias);
        loss += (1.0 - margin).max(0.0);
    }
    loss / n as f64 + 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Sub-gradient of [`hinge_loss_value`]; rows exactly at the hinge kink
/// (margin = 1) contribute nothing.
pub fn hinge_loss_gradient(
    weights: &[f64],
    bias: f64,
    x: &[f64],
    labels: &[u8],
    l2: f64,
) -> (Vec<f64>, f64) {
    let n = labels.len();
    let d = weights.len();
    let mut grad_w = vec![0.0; d];
    let mut grad_b = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        let target = 2.0 * f64::from(y) - 1.0;
        let margin = target * (dot_row(weights, x, i) + bias);
        if margin < 1.0 {
            for (j, g) in grad_w.iter_mut().enumerate() {
                *g -= target * x[i * d + j];
            }
            grad_b -= target;
        }
    }
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n as f64 + l2 * w;
    }
    (grad_w, grad_b / n as f64)
}

fn train_linear(config: &TrainConfig, x: &[f64], labels: &[u8], d: usize) -> (Vec<f64>, f64) {
    let mut weights = vec![0.0; d];
    let mut bias = 0.0;
    for _ in 0..config.epochs {
        let (grad_w, grad_b) = match config.kind {
            ModelKind::LogisticRegression => {
                log_loss_gradient(&weights, bias, x, labels, config.l2_penalty)
            }
            ModelKind::LinearSvm => {
                hinge_loss_gradient(&weights, bias, x, labels, config.l2_penalty)
            }
            ModelKind::BoostedStumps => unreachable!(),
        };
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= config.learning_rate * g;
        }
        bias -= config.learning_rate * grad_b;
    }
    (weights, bias)
}

fn train_stumps(config: &TrainConfig, x: &[f64], labels: &[u8], n: usize, d: usize) -> ModelParams {
    let lambda = config.l2_penalty;
    let shrinkage = config.learning_rate;

    let positives = labels.iter().map(|&y| y as usize).sum::<usize>();
    let prior = (positives as f64 / n as f64).clamp(1e-12, 1.0 - 1e-12);
    let base_score = (prior / (1.0 - prior)).ln();

    // per-feature sort orders are reused across all boosting rounds
    let orders: Vec<Vec<usize>> = (0..d)
        .map(|j| {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_unstable_by(|&a, &b| x[a * d + j].total_cmp(&x[b * d + j]));
            order
        })
        .collect();

    let mut scores = vec![base_score; n];
    let mut stumps: Vec<Stump> = Vec::with_capacity(config.n_rounds);

    for _ in 0..config.n_rounds {
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n];
        let mut g_total = 0.0;
        let mut h_total = 0.0;
        for i in 0..n {
            let p = sigmoid(scores[i]);
            grad[i] = p - f64::from(labels[i]);
            hess[i] = p * (1.0 - p);
            g_total += grad[i];
            h_total += hess[i];
        }
        let root_score = g_total * g_total / (h_total + lambda);

        let mut best: Option<(f64, usize, f64, f64, f64)> = None;
        for (j, order) in orders.iter().enumerate() {
            let mut g_left = 0.0;
            let mut h_left = 0.0;
            for k in 0..n - 1 {
                let row = order[k];
                g_left += grad[row];
                h_left += hess[row];
                let value = x[row * d + j];
                let next = x[order[k + 1] * d + j];
                if next > value {
                    let g_right = g_total - g_left;
                    let h_right = h_total - h_left;
                    let gain = g_left * g_left / (h_left + lambda)
                        + g_right * g_right / (h_right + lambda)
                        - root_score;
                    // strict improvement keeps the lowest feature index and
                    // lowest threshold among gain ties
                    if best.map_or(gain > 1e-12, |(bg, ..)| gain > bg) {
                        let threshold = 0.5 * (value + next);
                        let left = -g_left / (h_left + lambda) * shrinkage;
                        let right = -g_right / (h_right + lambda) * shrinkage;
                        best = Some((gain, j, threshold, left, right));
                    }
                }
            }
        }

        let Some((_, feature, threshold, left_value, right_value)) = best else {
            break; // no split improves the loss
        };
        for i in 0..n {
            scores[i] += if x[i * d + feature] < threshold {
                left_value
            } else {
                right_value
            };
        }
        stumps.push(Stump {
            feature,
            threshold,
            left_value,
            right_value,
        });
    }

    ModelParams::Stumps { base_score, stumps }
}

/// Fit the configured classifier on the masked training view.
pub fn train(config: &TrainConfig, view: &DataView) -> Result<TrainedModel> {
    config.validate()?;
    let n = view.n_rows();
    let d = view.n_features();
    if d == 0 {
        return Err(Error::Model("cannot train on zero features".into()));
    }
    if n < 2 {
        return Err(Error::Model(format!("cannot train on {n} rows")));
    }
    let labels = view.labels();
    let positives = labels.iter().map(|&y| y as usize).sum::<usize>();
    if positives == 0 || positives == labels.len() {
        return Err(Error::Model("single-class training labels".into()));
    }

    let mut x = view.to_dense();
    let standardizer = Standardizer::fit(&x, n, d);
    standardizer.apply(&mut x, n);

    let params = match config.kind {
        ModelKind::LogisticRegression | ModelKind::LinearSvm => {
            let (weights, bias) = train_linear(config, &x, &labels, d);
            ModelParams::Linear { weights, bias }
        }
        ModelKind::BoostedStumps => train_stumps(config, &x, &labels, n, d),
    };

    Ok(TrainedModel {
        kind: config.kind,
        params,
        standardizer,
    })
}

/// Raw decision scores on standardized inputs: the linear margin, or the
/// boosted log-odds score. The sign decides the class.
pub fn decision_scores(model: &TrainedModel, view: &DataView) -> Result<Vec<f64>> {
    let d = model.n_features();
    if view.n_features() != d {
        return Err(Error::Model(format!(
            "model expects {d} features but view has {}",
            view.n_features()
        )));
    }
    let n = view.n_rows();
    let mut x = view.to_dense();
    model.standardizer.apply(&mut x, n);

    let scores = match &model.params {
        ModelParams::Linear { weights, bias } => {
            (0..n).map(|i| dot_row(weights, &x, i) + bias).collect()
        }
        ModelParams::Stumps { base_score, stumps } => (0..n)
            .map(|i| {
                let mut score = *base_score;
                for stump in stumps {
                    score += if x[i * d + stump.feature] < stump.threshold {
                        stump.left_value
                    } else {
                        stump.right_value
                    };
                }
                score
            })
            .collect(),
    };
    Ok(scores)
}

/// Binary predictions: score >= 0 (probability >= 0.5 or non-negative
/// margin) maps to the positive class.
pub fn predict(model: &TrainedModel, view: &DataView) -> Result<Vec<u8>> {
    Ok(decision_scores(model, view)?
        .into_iter()
        .map(|z| u8::from(z >= 0.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{encode, parse_csv, ColumnKind, EncodeOptions, LoadOptions};
    use approx::assert_relative_eq;
    use std::path::PathBuf;
    use std::sync::Arc;

    pub(crate) fn dataset_from_rows(rows: &[(f64, f64, u8)]) -> Arc<crate::data::EncodedDataset> {
        let mut content = String::from("f0,f1,label\n");
        for (a, b, y) in rows {
            content.push_str(&format!("{a},{b},{y}\n"));
        }
        let table = parse_csv(
            &content,
            &LoadOptions {
                delimiter: ',',
                has_header: true,
                missing_token: None,
            },
            &PathBuf::from("toy.csv"),
        )
        .unwrap();
        let options = EncodeOptions {
            kinds: vec![
                ColumnKind::Numeric,
                ColumnKind::Numeric,
                ColumnKind::Categorical,
            ],
            label_column: "label".into(),
            positive_label: "1".into(),
            protected_column: "f0".into(),
            reference_group: rows[0].0.to_string(),
        };
        Arc::new(encode(&table, &options).unwrap())
    }

    fn separable_eight_points() -> Arc<crate::data::EncodedDataset> {
        dataset_from_rows(&[
            (0.0, 0.0, 0),
            (0.0, 1.0, 0),
            (1.0, 0.0, 0),
            (0.5, 0.5, 0),
            (3.0, 3.0, 1),
            (3.0, 4.0, 1),
            (4.0, 3.0, 1),
            (3.5, 3.5, 1),
        ])
    }

    fn training_accuracy(kind: ModelKind, data: &Arc<crate::data::EncodedDataset>) -> f64 {
        let view = data.view();
        let model = train(&TrainConfig::for_kind(kind), &view).unwrap();
        let preds = predict(&model, &view).unwrap();
        let labels = view.labels();
        let hits = preds.iter().zip(&labels).filter(|(p, y)| p == y).count();
        hits as f64 / labels.len() as f64
    }

    #[test]
    fn all_kinds_separate_the_linearly_separable_toy_set() {
        let data = separable_eight_points();
        for kind in [
            ModelKind::LogisticRegression,
            ModelKind::LinearSvm,
            ModelKind::BoostedStumps,
        ] {
            assert_relative_eq!(training_accuracy(kind, &data), 1.0);
        }
    }

    /// Checkerboard pattern over a 3x3 value grid: the label is the exclusive
    /// or of (f0 >= 1) and (f1 >= 1). No linear rule fits it; an additive
    /// stump ensemble does much better.
    fn xor_patterned_grid() -> Arc<crate::data::EncodedDataset> {
        let mut rows = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                let y = u8::from((a >= 1) ^ (b >= 1));
                rows.push((a as f64, b as f64, y));
                rows.push((a as f64, b as f64, y));
            }
        }
        dataset_from_rows(&rows)
    }

    #[test]
    fn boosted_stumps_beat_logistic_regression_on_xor_pattern() {
        let data = xor_patterned_grid();
        let lr = training_accuracy(ModelKind::LogisticRegression, &data);
        let stumps = training_accuracy(ModelKind::BoostedStumps, &data);
        assert!(
            lr <= 0.75,
            "logistic regression reached {lr} on the XOR grid"
        );
        assert!(
            stumps > lr,
            "stumps accuracy {stumps} does not exceed logistic regression {lr}"
        );
    }

    #[test]
    fn constant_feature_keeps_zero_weight() {
        let data = dataset_from_rows(&[(5.0, 0.0, 0), (5.0, 1.0, 0), (5.0, 3.0, 1), (5.0, 4.0, 1)]);
        let view = data.view();
        let model = train(&TrainConfig::for_kind(ModelKind::LogisticRegression), &view).unwrap();
        match &model.params {
            ModelParams::Linear { weights, .. } => assert_eq!(weights[0], 0.0),
            _ => unreachable!(),
        }
        // standardization guard: sd clamped to 1, centered column is all zero
        assert_eq!(model.standardizer.sds[0], 1.0);
    }

    #[test]
    fn single_class_labels_are_rejected() {
        let data = dataset_from_rows(&[(0.0, 0.0, 1), (1.0, 1.0, 1), (2.0, 2.0, 1), (3.0, 3.0, 0)]);
        // restrict the view to the positive rows only
        let single_class = data.view().with_rows(vec![0, 1, 2]);
        let err = train(&TrainConfig::for_kind(ModelKind::LinearSvm), &single_class);
        assert!(err.is_err());
    }

    #[test]
    fn zero_weight_model_predicts_positive_everywhere() {
        let data = dataset_from_rows(&[(0.0, 0.0, 0), (1.0, 1.0, 1)]);
        let view = data.view();
        let model = TrainedModel {
            kind: ModelKind::LogisticRegression,
            params: ModelParams::Linear {
                weights: vec![0.0, 0.0],
                bias: 0.0,
            },
            standardizer: Standardizer::fit(&view.to_dense(), 2, 2),
        };
        assert_eq!(predict(&model, &view).unwrap(), vec![1, 1]);
    }

    #[test]
    fn predict_rejects_dimension_mismatch() {
        let data = separable_eight_points();
        let view = data.view();
        let model = train(&TrainConfig::for_kind(ModelKind::LinearSvm), &view).unwrap();
        let narrow = view
            .mask(&crate::evolve::Chromosome::from_mask_str("10").unwrap())
            .unwrap();
        assert!(predict(&model, &narrow).is_err());
    }

    #[test]
    fn predict_on_zero_rows_is_empty() {
        let data = separable_eight_points();
        let view = data.view();
        let model = train(&TrainConfig::for_kind(ModelKind::BoostedStumps), &view).unwrap();
        let empty = view.with_rows(Vec::new());
        assert_eq!(predict(&model, &empty).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn training_is_deterministic() {
        let data = separable_eight_points();
        let view = data.view();
        for kind in [
            ModelKind::LogisticRegression,
            ModelKind::LinearSvm,
            ModelKind::BoostedStumps,
        ] {
            let cfg = TrainConfig::for_kind(kind);
            let a = train(&cfg, &view).unwrap();
            let b = train(&cfg, &view).unwrap();
            match (&a.params, &b.params) {
                (
                    ModelParams::Linear {
                        weights: wa,
                        bias: ba,
                    },
                    ModelParams::Linear {
                        weights: wb,
                        bias: bb,
                    },
                ) => {
                    assert_eq!(wa, wb);
                    assert_eq!(ba, bb);
                }
                (
                    ModelParams::Stumps {
                        base_score: sa,
                        stumps: ta,
                    },
                    ModelParams::Stumps {
                        base_score: sb,
                        stumps: tb,
                    },
                ) => {
                    assert_eq!(sa, sb);
                    assert_eq!(ta, tb);
                }
                _ => unreachable!(),
            }
            assert_eq!(predict(&a, &view).unwrap(), predict(&b, &view).unwrap());
        }
    }

    /// Permuting feature columns permutes linear weights and leaves
    /// predictions unchanged (up to float summation order).
    #[test]
    fn feature_order_equivariance() {
        let rows = [
            (0.1, 2.3, 0u8),
            (1.4, 0.2, 0),
            (0.9, 1.1, 0),
            (2.8, 3.1, 1),
            (3.3, 2.2, 1),
            (2.1, 4.0, 1),
        ];
        let data = dataset_from_rows(&rows);
        let swapped =
            dataset_from_rows(&rows.iter().map(|&(a, b, y)| (b, a, y)).collect::<Vec<_>>());
        for kind in [ModelKind::LogisticRegression, ModelKind::LinearSvm] {
            let cfg = TrainConfig::for_kind(kind);
            let m1 = train(&cfg, &data.view()).unwrap();
            let m2 = train(&cfg, &swapped.view()).unwrap();
            match (&m1.params, &m2.params) {
                (
                    ModelParams::Linear {
                        weights: w1,
                        bias: b1,
                    },
                    ModelParams::Linear {
                        weights: w2,
                        bias: b2,
                    },
                ) => {
                    assert_relative_eq!(w1[0], w2[1], max_relative = 1e-9);
                    assert_relative_eq!(w1[1], w2[0], max_relative = 1e-9);
                    assert_relative_eq!(b1, b2, max_relative = 1e-9);
                }
                _ => unreachable!(),
            }
            assert_eq!(
                predict(&m1, &data.view()).unwrap(),
                predict(&m2, &swapped.view()).unwrap()
            );
        }
    }

    #[test]
    fn standardizer_reproduces_training_transform_at_predict_time() {
        let data = separable_eight_points();
        let view = data.view();
        let mut at_fit = view.to_dense();
        let standardizer = Standardizer::fit(&at_fit, view.n_rows(), view.n_features());
        standardizer.apply(&mut at_fit, view.n_rows());

        let mut at_predict = view.to_dense();
        standardizer.apply(&mut at_predict, view.n_rows());
        assert_eq!(at_fit, at_predict);
    }

    fn finite_difference_check(
        value: impl Fn(&[f64], f64) -> f64,
        gradient: (Vec<f64>, f64),
        weights: &[f64],
        bias: f64,
    ) {
        let h = 1e-5;
        // relative to the gradient scale, floored at 1 so the central
        // difference's ~1e-11 cancellation noise cannot dominate near-zero
        // coordinates
        let (grad_w, grad_b) = gradient;
        for j in 0..weights.len() {
            let mut plus = weights.to_vec();
            let mut minus = weights.to_vec();
            plus[j] += h;
            minus[j] -= h;
            let numeric = (value(&plus, bias) - value(&minus, bias)) / (2.0 * h);
            let denom = numeric.abs().max(grad_w[j].abs()).max(1.0);
            assert!(
                ((grad_w[j] - numeric) / denom).abs() < 1e-5,
                "weight {j}: analytic {} vs numeric {numeric}",
                grad_w[j]
            );
        }
        let numeric_b = (value(weights, bias + h) - value(weights, bias - h)) / (2.0 * h);
        let denom = numeric_b.abs().max(grad_b.abs()).max(1.0);
        assert!(
            ((grad_b - numeric_b) / denom).abs() < 1e-5,
            "bias: analytic {grad_b} vs numeric {numeric_b}"
        );
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = crate::rng::stream(2024, &[0]);
        use rand::Rng;
        let n = 12;
        let d = 4;
        for _ in 0..10 {
            let x: Vec<f64> = (0..n * d)
                .map(|_| rng.random::<f64>() * 4.0 - 2.0)
                .collect();
            let labels: Vec<u8> = (0..n).map(|_| rng.random::<bool>() as u8).collect();
            let weights: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let bias: f64 = rng.random::<f64>() - 0.5;
            let l2 = 0.01;

            let grad = log_loss_gradient(&weights, bias, &x, &labels, l2);
            finite_difference_check(
                |w, b| log_loss_value(w, b, &x, &labels, l2),
                grad,
                &weights,
                bias,
            );

            // hinge is piecewise linear, so the check is exact as long as no
            // margin sits within h of the kink at 1; redraw if one does
            let (weights, bias) = loop {
                let w: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
                let b: f64 = rng.random::<f64>() - 0.5;
                let clear = labels.iter().enumerate().all(|(i, &y)| {
                    let target = 2.0 * f64::from(y) - 1.0;
                    let margin = target * (dot_row(&w, &x, i) + b);
                    (margin - 1.0).abs() > 1e-3
                });
                if clear {
                    break (w, b);
                }
            };
            let grad = hinge_loss_gradient(&weights, bias, &x, &labels, l2);
            finite_difference_check(
                |w, b| hinge_loss_value(w, b, &x, &labels, l2),
                grad,
                &weights,
                bias,
            );
        }
    }
}
