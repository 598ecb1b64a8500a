//! Next-horizon demand prediction.
//!
//! A windowed linear autoregression: one ridge-damped least-squares fit per
//! resource dimension over the selected window statistics. Deterministic and
//! closed-form; anything producing a [`DemandForecast`] can replace it.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ResourceVector;
use crate::pipeline::{extract_features, NormalizationParams, ProcessedDataset, RawSample};

pub const MIN_TRAINING_ROWS: usize = 10;
/// Damping multiplier applied each time the normal equations fail to factor.
const LAMBDA_ESCALATION: f64 = 1e3;
const MAX_ESCALATIONS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearFit {
    fn eval(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }
}

/// A trained predictor. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandModel {
    /// Indices into [`crate::pipeline::FEATURE_NAMES`] the weights apply to.
    pub columns: Vec<usize>,
    /// One fit per dimension: cpu, memory, bandwidth.
    pub fits: [LinearFit; 3],
    pub window_len: usize,
    pub horizon: usize,
    pub training_mse: f64,
    pub validation_mse: f64,
    pub norm: NormalizationParams,
    /// Damping actually used; larger than requested after a rank-deficiency fallback.
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemandForecast {
    pub horizon_start: f64,
    /// Predicted mean utilization per dimension, clamped at 0.
    pub utilization: ResourceVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Leading (time-ordered) fraction of rows used for fitting.
    pub split: f64,
    pub lambda: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            split: 0.8,
            lambda: 1e-6,
        }
    }
}

/// Solve `(XᵀX + λ diag(1..1, 0)) β = Xᵀy` with the bias as the last,
/// undamped coefficient. Escalates `λ` until the system factors.
fn ridge(
    x: &DMatrix<f64>,
    ys: &[DVector<f64>; 3],
    lambda: f64,
) -> Option<([DVector<f64>; 3], f64)> {
    let p = x.ncols();
    let gram = x.transpose() * x;
    let mut lam = lambda;
    for _ in 0..=MAX_ESCALATIONS {
        let mut a = gram.clone();
        for i in 0..p - 1 {
            a[(i, i)] += lam;
        }
        if let Some(chol) = a.cholesky() {
            let sol = [0, 1, 2].map(|d| chol.solve(&(x.transpose() * &ys[d])));
            if sol.iter().all(|s| s.iter().all(|v| v.is_finite())) {
                return Some((sol, lam));
            }
        }
        lam = if lam > 0.0 {
            lam * LAMBDA_ESCALATION
        } else {
            1e-9
        };
    }
    None
}

/// Fit one linear model per dimension on the first `split` fraction of rows.
pub fn train(
    dataset: &ProcessedDataset,
    cfg: &TrainConfig,
    window_len: usize,
    horizon: usize,
) -> Result<DemandModel> {
    let rows = dataset.rows();
    if rows < MIN_TRAINING_ROWS {
        return Err(Error::TooShort {
            needed: MIN_TRAINING_ROWS,
            got: rows,
        });
    }
    if !(cfg.split > 0.0 && cfg.split < 1.0) {
        return Err(Error::invalid("split", "must be in (0, 1)"));
    }
    if !(cfg.lambda.is_finite() && cfg.lambda >= 0.0) {
        return Err(Error::invalid("lambda", "must be >= 0"));
    }
    let n_train = ((rows as f64 * cfg.split) as usize).clamp(1, rows - 1);
    let k = dataset.columns.len();

    let x = DMatrix::from_fn(n_train, k + 1, |r, c| {
        if c < k {
            dataset.features[r][c]
        } else {
            1.0
        }
    });
    let ys = [0, 1, 2].map(|d| DVector::from_fn(n_train, |r, _| dataset.targets[r][d]));
    let (sol, lambda) = ridge(&x, &ys, cfg.lambda)
        .ok_or_else(|| Error::invalid("dataset", "normal equations could not be solved"))?;
    let fits = sol.map(|b| LinearFit {
        weights: b.as_slice()[..k].to_vec(),
        bias: b[k],
    });

    let mut model = DemandModel {
        columns: dataset.columns.clone(),
        fits,
        window_len,
        horizon,
        training_mse: 0.0,
        validation_mse: 0.0,
        norm: dataset.norm.clone(),
        lambda,
    };
    model.training_mse = mse_over(&model, dataset, 0..n_train)?;
    model.validation_mse = mse_over(&model, dataset, n_train..rows)?;
    Ok(model)
}

fn mse_over(
    model: &DemandModel,
    dataset: &ProcessedDataset,
    rows: core::ops::Range<usize>,
) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let n = rows.len();
    let mut sum = 0.0;
    for r in rows {
        let pred = model
            .predict(&dataset.features[r], 0.0)?
            .utilization
            .to_array();
        for ((p, range), t) in pred
            .iter()
            .zip(&dataset.norm.targets)
            .zip(dataset.targets[r])
        {
            let e = p - range.denormalize(t);
            sum += e * e;
        }
    }
    Ok(sum / (3 * n) as f64)
}

/// Mean squared error in utilization units, averaged over rows and dimensions.
pub fn evaluate(model: &DemandModel, dataset: &ProcessedDataset) -> Result<f64> {
    if dataset.columns.len() != model.columns.len() {
        return Err(Error::DimensionMismatch {
            expected: model.columns.len(),
            got: dataset.columns.len(),
        });
    }
    mse_over(model, dataset, 0..dataset.rows())
}

impl DemandModel {
    /// `wᵀx + b` per dimension, in normalized target space, before clamping.
    pub fn predict_normalized(&self, features: &[f64]) -> Result<[f64; 3]> {
        if features.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                got: features.len(),
            });
        }
        Ok([0, 1, 2].map(|d| self.fits[d].eval(features)))
    }

    /// Forecast from an already-normalized, already-selected feature row.
    pub fn predict(&self, features: &[f64], horizon_start: f64) -> Result<DemandForecast> {
        let raw = self.predict_normalized(features)?;
        let u = [0, 1, 2].map(|d| self.norm.targets[d].denormalize(raw[d]).max(0.0));
        Ok(DemandForecast {
            horizon_start,
            utilization: ResourceVector::from_array(u),
        })
    }

    /// Extract, select and normalize features from a full-length feature row.
    pub fn prepare(&self, full_row: &[f64]) -> Vec<f64> {
        self.columns
            .iter()
            .zip(&self.norm.features)
            .map(|(&c, r)| r.normalize(full_row[c]).clamp(0.0, 1.0))
            .collect()
    }

    /// Forecast from the trailing `window_len` samples of `history`.
    /// `None` while the history is shorter than a window.
    pub fn forecast_from_history(&self, history: &[RawSample]) -> Option<DemandForecast> {
        if history.len() < self.window_len {
            return None;
        }
        let window = &history[history.len() - self.window_len..];
        let row = extract_features(window).ok()?;
        let start = window.last().map_or(0.0, |s| s.timestamp);
        self.predict(&self.prepare(&row), start).ok()
    }
}
