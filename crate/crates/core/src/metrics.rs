//! Classification and fairness metrics: confusion counts, accuracy,
//! F1-score, group selection rates, and statistical parity difference.
//!
//! All functions are pure; label 1 is the positive class and protected
//! group 1 is the reference group throughout.

use crate::data::DataView;
use crate::error::{Error, Result};
use crate::models::{predict, TrainedModel};

/// Standard 2x2 tally with label 1 as the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Positive-prediction (selection) rates per protected group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupRates {
    /// Selection rate where protected = 1 (reference group).
    pub rate_group1: f64,
    /// Selection rate where protected = 0.
    pub rate_group0: f64,
    pub n_group1: usize,
    pub n_group0: usize,
}

/// Holdout metrics of one trained model, as consumed by the optimizers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoldoutMetrics {
    pub accuracy: f64,
    pub f1: f64,
    pub spd_signed: f64,
    pub spd_abs: f64,
}

fn check_binary(name: &str, values: &[u8]) -> Result<()> {
    if values.iter().any(|&v| v > 1) {
        return Err(Error::Runtime(format!(
            "{name} vector contains non-binary values"
        )));
    }
    Ok(())
}

/// Tally predictions against labels.
pub fn confusion(predictions: &[u8], labels: &[u8]) -> Result<ConfusionCounts> {
    if predictions.len() != labels.len() {
        return Err(Error::Runtime(format!(
            "confusion length mismatch: {} predictions vs {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::Runtime("confusion over empty vectors".into()));
    }
    check_binary("prediction", predictions)?;
    check_binary("label", labels)?;
    let mut counts = ConfusionCounts::default();
    for (&p, &y) in predictions.iter().zip(labels) {
        match (p, y) {
            (1, 1) => counts.tp += 1,
            (0, 0) => counts.tn += 1,
            (1, 0) => counts.fp += 1,
            (0, 1) => counts.fn_ += 1,
            _ => unreachable!(),
        }
    }
    Ok(counts)
}

/// Fraction of predictions the model got right: (TP+TN)/(TP+TN+FP+FN).
pub fn accuracy(c: &ConfusionCounts) -> Result<f64> {
    let total = c.total();
    if total == 0 {
        return Err(Error::Runtime("accuracy of zero evaluated samples".into()));
    }
    Ok((c.tp + c.tn) as f64 / total as f64)
}

/// Harmonic mean of precision and recall: 2*TP / (2*TP + FP + FN).
///
/// The degenerate case tp = fp = fn = 0 (no positives anywhere in scope) is
/// defined as 0.
pub fn f1_score(c: &ConfusionCounts) -> f64 {
    let denominator = 2 * c.tp + c.fp + c.fn_;
    if denominator == 0 {
        return 0.0;
    }
    2.0 * c.tp as f64 / denominator as f64
}

/// Per-group positive-prediction rates.
pub fn group_rates(predictions: &[u8], protected: &[u8]) -> Result<GroupRates> {
    if predictions.len() != protected.len() {
        return Err(Error::Runtime(format!(
            "group rates length mismatch: {} predictions vs {} protected",
            predictions.len(),
            protected.len()
        )));
    }
    check_binary("prediction", predictions)?;
    check_binary("protected", protected)?;
    let mut positive = [0usize; 2];
    let mut size = [0usize; 2];
    for (&p, &g) in predictions.iter().zip(protected) {
        size[g as usize] += 1;
        positive[g as usize] += p as usize;
    }
    if size[0] == 0 || size[1] == 0 {
        return Err(Error::Runtime(
            "statistical parity difference undefined: a protected group is empty".into(),
        ));
    }
    Ok(GroupRates {
        rate_group1: positive[1] as f64 / size[1] as f64,
        rate_group0: positive[0] as f64 / size[0] as f64,
        n_group1: size[1],
        n_group0: size[0],
    })
}

/// Signed statistical parity difference: selection rate of group 1 minus
/// selection rate of group 0. Callers minimizing the fairness violation use
/// the absolute value.
pub fn statistical_parity_difference(predictions: &[u8], protected: &[u8]) -> Result<f64> {
    let rates = group_rates(predictions, protected)?;
    Ok(rates.rate_group1 - rates.rate_group0)
}

/// Train-side composition point: run the model on the holdout view and bundle
/// accuracy, F1 and SPD.
///
/// SPD is always computed against the holdout's full protected vector, never
/// against the masked features, so deselecting the protected column cannot
/// hide disparity.
pub fn evaluate_all(model: &TrainedModel, holdout: &DataView) -> Result<HoldoutMetrics> {
    let predictions = predict(model, holdout)?;
    let labels = holdout.labels();
    let counts = confusion(&predictions, &labels)?;
    let spd = statistical_parity_difference(&predictions, &holdout.protected())?;
    Ok(HoldoutMetrics {
        accuracy: accuracy(&counts)?,
        f1: f1_score(&counts),
        spd_signed: spd,
        spd_abs: spd.abs(),
    })
}
