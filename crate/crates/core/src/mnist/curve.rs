use std::fmt;

use crate::engine::MuMode;
use crate::exec::Execution;

use super::{
    auc_macro, knn_batch, predict_batch, BinarizedItem, DigitDistribution, MacroAuc, MnistError,
    PixelBits,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Reasoning(MuMode),
    Knn(usize),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Reasoning(mode) => write!(f, "mu={mode}"),
            Method::Knn(k) => write!(f, "knn={k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub distributions: Vec<DigitDistribution>,
    pub auc: MacroAuc,
    pub accuracy: f64,
}

/// Scores every labelled test item with `method`.
pub fn evaluate_method(
    train: &[BinarizedItem],
    test: &[BinarizedItem],
    method: Method,
    exec: Execution,
) -> Result<Evaluation, MnistError> {
    let labels = test
        .iter()
        .enumerate()
        .map(|(i, t)| t.label.ok_or(MnistError::MissingLabel(i)))
        .collect::<Result<Vec<u8>, _>>()?;
    let pixels: Vec<PixelBits> = test.iter().map(|t| t.pixels.clone()).collect();
    let distributions = match method {
        Method::Reasoning(mode) => predict_batch(train, &pixels, mode, exec)?,
        Method::Knn(k) => knn_batch(train, &pixels, k, exec)?,
    };
    let auc = auc_macro(&distributions, &labels)?;
    let correct = distributions
        .iter()
        .zip(&labels)
        .filter(|(d, &l)| d.argmax() == l)
        .count();
    Ok(Evaluation {
        accuracy: correct as f64 / labels.len().max(1) as f64,
        distributions,
        auc,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub method: Method,
    pub size: usize,
    pub auc: f64,
}

/// Macro AUC for every (size, method) pair, training on the first `size`
/// items of `train`. Rows are ordered by size, then by method.
pub fn learning_curve(
    train: &[BinarizedItem],
    test: &[BinarizedItem],
    sizes: &[usize],
    methods: &[Method],
    exec: Execution,
) -> Result<Vec<CurveRow>, MnistError> {
    let mut rows = Vec::with_capacity(sizes.len() * methods.len());
    for &size in sizes {
        let subset = &train[..size.min(train.len())];
        for &method in methods {
            let eval = evaluate_method(subset, test, method, exec)?;
            rows.push(CurveRow {
                method,
                size,
                auc: eval.auc.value,
            });
        }
    }
    Ok(rows)
}
