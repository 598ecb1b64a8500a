//! Preprocessing chain turning raw monitoring samples into supervised
//! training pairs: clean, min-max normalize, winsorize outliers, extract
//! windowed statistics, and drop low-variance features.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ResourceVector;

/// One monitoring observation.
///
/// `utilization` is per-dimension load as a fraction of reference capacity.
/// Simulator-produced samples measure offered load (running plus queued
/// demand) against private-tier capacity, so values above 1 mean the private
/// tier alone cannot absorb the load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawSample {
    pub timestamp: f64,
    pub utilization: ResourceVector,
    pub request_rate: f64,
    pub mean_response_time: f64,
    pub anomaly: bool,
}

impl RawSample {
    fn is_complete(&self) -> bool {
        self.timestamp.is_finite()
            && self.utilization.to_array().iter().all(|v| v.is_finite())
            && self.request_rate.is_finite()
            && self.mean_response_time.is_finite()
    }

    fn is_consistent(&self) -> bool {
        self.utilization.is_non_negative()
            && self.request_rate >= 0.0
            && self.mean_response_time >= 0.0
    }
}

/// Drop incomplete (NaN/infinite), inconsistent (negative) and duplicate or
/// out-of-order rows. The first row for a timestamp wins; order is preserved.
pub fn clean(samples: &[RawSample]) -> Vec<RawSample> {
    let mut seen = BTreeSet::new();
    let mut last = f64::NEG_INFINITY;
    let mut out = Vec::with_capacity(samples.len());
    for s in samples {
        if !s.is_complete() || !s.is_consistent() {
            continue;
        }
        if !seen.insert(s.timestamp.to_bits()) || s.timestamp <= last {
            continue;
        }
        last = s.timestamp;
        out.push(*s);
    }
    out
}

/// Observed range of one feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureRange {
    pub min: f64,
    pub max: f64,
}

impl FeatureRange {
    pub fn fit(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut it = values.into_iter();
        let first = it.next()?;
        let (min, max) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Some(Self { min, max })
    }

    pub fn is_degenerate(&self) -> bool {
        self.max <= self.min
    }

    /// `(x - min) / (max - min)`, or 0 for a degenerate range.
    pub fn normalize(&self, x: f64) -> f64 {
        if self.is_degenerate() {
            0.0
        } else {
            (x - self.min) / (self.max - self.min)
        }
    }

    pub fn denormalize(&self, x: f64) -> f64 {
        x * (self.max - self.min) + self.min
    }
}

/// Frozen min-max parameters for every feature column plus the three targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub features: Vec<FeatureRange>,
    pub targets: [FeatureRange; 3],
}

/// Min-max scale `x` into `[0, 1]` relative to `range`.
pub fn min_max_normalize(x: &[f64], range: FeatureRange) -> Result<Vec<f64>> {
    if range.is_degenerate() {
        return Err(Error::DegenerateRange { value: range.min });
    }
    Ok(x.iter().map(|v| range.normalize(*v)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", content = "factor", rename_all = "snake_case")]
pub enum OutlierMethod {
    /// Winsorize beyond `k` population standard deviations from the mean.
    ZScore(f64),
    /// Winsorize beyond `f * IQR` outside the quartiles.
    Iqr(f64),
}

impl Default for OutlierMethod {
    fn default() -> Self {
        OutlierMethod::ZScore(3.0)
    }
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population variance.
pub(crate) fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = libm::ceil(pos) as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Clamp outliers to the fence of the chosen method. Length is preserved.
pub fn clip_outliers(x: &[f64], method: OutlierMethod) -> Result<Vec<f64>> {
    let (lo, hi) = match method {
        OutlierMethod::ZScore(k) => {
            if x.is_empty() {
                return Err(Error::TooShort { needed: 1, got: 0 });
            }
            let m = mean(x);
            let sd = libm::sqrt(variance(x));
            if sd == 0.0 {
                return Ok(x.to_vec());
            }
            (m - k * sd, m + k * sd)
        }
        OutlierMethod::Iqr(f) => {
            if x.len() < 4 {
                return Err(Error::TooShort {
                    needed: 4,
                    got: x.len(),
                });
            }
            let mut sorted = x.to_vec();
            sorted.sort_by(f64::total_cmp);
            let q1 = quantile(&sorted, 0.25);
            let q3 = quantile(&sorted, 0.75);
            let iqr = q3 - q1;
            if iqr == 0.0 {
                return Ok(x.to_vec());
            }
            (q1 - f * iqr, q3 + f * iqr)
        }
    };
    Ok(x.iter()
        .map(|&v| {
            if v > hi {
                hi
            } else if v < lo {
                lo
            } else {
                v
            }
        })
        .collect())
}

/// Statistics emitted per series, in order.
pub const STATISTICS: [&str; 5] = ["mean", "var", "skew", "max", "slope"];
/// Series summarized per window, in order.
pub const SERIES: [&str; 4] = ["cpu", "memory", "bandwidth", "request_rate"];
pub const FEATURE_COUNT: usize = 20;

/// Column names of the full feature row: `<series>_<statistic>`, series-major.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "cpu_mean",
    "cpu_var",
    "cpu_skew",
    "cpu_max",
    "cpu_slope",
    "memory_mean",
    "memory_var",
    "memory_skew",
    "memory_max",
    "memory_slope",
    "bandwidth_mean",
    "bandwidth_var",
    "bandwidth_skew",
    "bandwidth_max",
    "bandwidth_slope",
    "request_rate_mean",
    "request_rate_var",
    "request_rate_skew",
    "request_rate_max",
    "request_rate_slope",
];

pub const MIN_WINDOW: usize = 3;

fn series_stats(ts: &[f64], v: &[f64]) -> [f64; 5] {
    let m = mean(v);
    let var = variance(v);
    let skew = if var > 0.0 {
        let m3 = v
            .iter()
            .map(|x| {
                let d = x - m;
                d * d * d
            })
            .sum::<f64>()
            / v.len() as f64;
        m3 / libm::pow(var, 1.5)
    } else {
        0.0
    };
    let peak = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tm = mean(ts);
    let sxx: f64 = ts.iter().map(|t| (t - tm) * (t - tm)).sum();
    let slope = if sxx > 0.0 {
        ts.iter()
            .zip(v)
            .map(|(t, x)| (t - tm) * (x - m))
            .sum::<f64>()
            / sxx
    } else {
        0.0
    };
    [m, var, skew, peak, slope]
}

/// Summarize a window as a full feature row (see [`FEATURE_NAMES`]).
pub fn extract_features(window: &[RawSample]) -> Result<Vec<f64>> {
    if window.len() < MIN_WINDOW {
        return Err(Error::TooShort {
            needed: MIN_WINDOW,
            got: window.len(),
        });
    }
    let ts: Vec<f64> = window.iter().map(|s| s.timestamp).collect();
    let mut row = Vec::with_capacity(FEATURE_COUNT);
    for series in 0..SERIES.len() {
        let v: Vec<f64> = window
            .iter()
            .map(|s| match series {
                0 => s.utilization.cpu,
                1 => s.utilization.memory,
                2 => s.utilization.bandwidth,
                _ => s.request_rate,
            })
            .collect();
        row.extend_from_slice(&series_stats(&ts, &v));
    }
    Ok(row)
}

/// Supervised pairs ready for training.
///
/// `features` rows are normalized (and clamped) into `[0, 1]`; `columns`
/// holds the index in [`FEATURE_NAMES`] of each retained column. Targets are
/// the next-horizon mean utilization per dimension, normalized with
/// `norm.targets`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedDataset {
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<[f64; 3]>,
    pub columns: Vec<usize>,
    pub norm: NormalizationParams,
    /// Leading rows the normalization (and any later fit) may learn from.
    pub train_rows: usize,
    /// Columns whose training range was constant and were mapped to 0.
    pub degenerate: Vec<usize>,
}

impl ProcessedDataset {
    pub fn rows(&self) -> usize {
        self.features.len()
    }

    pub fn feature_names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.columns.iter().map(|&c| FEATURE_NAMES[c])
    }

    /// Targets mapped back to utilization units.
    pub fn raw_targets(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.targets.iter().map(|t| {
            let r = &self.norm.targets;
            [
                r[0].denormalize(t[0]),
                r[1].denormalize(t[1]),
                r[2].denormalize(t[2]),
            ]
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WindowConfig {
    pub window_len: usize,
    pub horizon: usize,
    /// Fraction of leading rows used to fit normalization parameters.
    pub train_fraction: f64,
    /// Skip pairs whose window or target span contains an anomalous sample.
    pub exclude_anomalies: bool,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            window_len: 10,
            horizon: 10,
            train_fraction: 0.8,
            exclude_anomalies: true,
        }
    }
}

impl WindowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_len < MIN_WINDOW {
            return Err(Error::invalid("window_len", "must be >= 3"));
        }
        if self.horizon == 0 {
            return Err(Error::invalid("horizon", "must be >= 1"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return Err(Error::invalid("train_fraction", "must be in (0, 1]"));
        }
        Ok(())
    }
}

/// Slide a stride-1 window over `samples`, pairing each window's features with
/// the mean utilization of the following `horizon` samples.
pub fn windowize(samples: &[RawSample], cfg: &WindowConfig) -> Result<ProcessedDataset> {
    cfg.validate()?;
    let span = cfg.window_len + cfg.horizon;
    if samples.len() < span {
        return Err(Error::TooShort {
            needed: span,
            got: samples.len(),
        });
    }
    let mut raw_rows = Vec::new();
    let mut raw_targets = Vec::new();
    for start in 0..=samples.len() - span {
        let window = &samples[start..start + cfg.window_len];
        let ahead = &samples[start + cfg.window_len..start + span];
        if cfg.exclude_anomalies && window.iter().chain(ahead).any(|s| s.anomaly) {
            continue;
        }
        raw_rows.push(extract_features(window)?);
        let mut t = [0.0; 3];
        for s in ahead {
            for (acc, v) in t.iter_mut().zip(s.utilization.to_array()) {
                *acc += v;
            }
        }
        raw_targets.push(t.map(|v| v / cfg.horizon as f64));
    }
    if raw_rows.is_empty() {
        return Err(Error::Empty("dataset (every window contained an anomaly)"));
    }

    let rows = raw_rows.len();
    let train_rows = ((rows as f64 * cfg.train_fraction) as usize).clamp(1, rows);
    let fit = |col: &dyn Fn(usize) -> f64| {
        FeatureRange::fit((0..train_rows).map(col)).expect("train_rows >= 1")
    };
    let features: Vec<FeatureRange> = (0..FEATURE_COUNT)
        .map(|c| fit(&|r| raw_rows[r][c]))
        .collect();
    let targets = [0, 1, 2].map(|d| fit(&|r| raw_targets[r][d]));
    let degenerate = (0..FEATURE_COUNT)
        .filter(|&c| features[c].is_degenerate())
        .collect();

    let norm_features = raw_rows
        .iter()
        .map(|row| {
            row.iter()
                .zip(&features)
                .map(|(v, r)| r.normalize(*v).clamp(0.0, 1.0))
                .collect()
        })
        .collect();
    let norm_targets = raw_targets
        .iter()
        .map(|t| [0, 1, 2].map(|d| targets[d].normalize(t[d])))
        .collect();

    Ok(ProcessedDataset {
        features: norm_features,
        targets: norm_targets,
        columns: (0..FEATURE_COUNT).collect(),
        norm: NormalizationParams { features, targets },
        train_rows,
        degenerate,
    })
}

/// Keep columns whose variance over the training rows is at least
/// `min_variance`. The highest-variance column always survives.
pub fn select_features(dataset: &ProcessedDataset, min_variance: f64) -> ProcessedDataset {
    let n = dataset.columns.len();
    let train = &dataset.features[..dataset.train_rows.clamp(1, dataset.rows())];
    let variances: Vec<f64> = (0..n)
        .map(|c| {
            let col: Vec<f64> = train.iter().map(|r| r[c]).collect();
            variance(&col)
        })
        .collect();
    let mut keep: Vec<usize> = (0..n).filter(|&c| variances[c] >= min_variance).collect();
    if keep.is_empty() && n > 0 {
        let best = (0..n).fold(0, |b, c| if variances[c] > variances[b] { c } else { b });
        keep.push(best);
    }
    ProcessedDataset {
        features: dataset
            .features
            .iter()
            .map(|r| keep.iter().map(|&c| r[c]).collect())
            .collect(),
        targets: dataset.targets.clone(),
        columns: keep.iter().map(|&c| dataset.columns[c]).collect(),
        norm: NormalizationParams {
            features: keep.iter().map(|&c| dataset.norm.features[c]).collect(),
            targets: dataset.norm.targets,
        },
        train_rows: dataset.train_rows,
        degenerate: dataset
            .degenerate
            .iter()
            .filter(|d| keep.iter().any(|&c| dataset.columns[c] == **d))
            .copied()
            .collect(),
    }
}

/// End-to-end preprocessing settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub window: WindowConfig,
    pub outliers: OutlierMethod,
    pub min_variance: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            window: WindowConfig::default(),
            outliers: OutlierMethod::default(),
            min_variance: 1e-4,
        }
    }
}

/// Clean, winsorize every series, windowize, then select features.
pub fn preprocess(samples: &[RawSample], cfg: &PipelineConfig) -> Result<ProcessedDataset> {
    if !(cfg.min_variance.is_finite() && cfg.min_variance >= 0.0) {
        return Err(Error::invalid("min_variance", "must be >= 0"));
    }
    let mut rows = clean(samples);
    if rows.is_empty() {
        return Err(Error::Empty("samples after cleaning"));
    }
    let series: [fn(&mut RawSample) -> &mut f64; 5] = [
        |s| &mut s.utilization.cpu,
        |s| &mut s.utilization.memory,
        |s| &mut s.utilization.bandwidth,
        |s| &mut s.request_rate,
        |s| &mut s.mean_response_time,
    ];
    for field in series {
        let col: Vec<f64> = rows.iter_mut().map(|s| *field(s)).collect();
        for (s, v) in rows.iter_mut().zip(clip_outliers(&col, cfg.outliers)?) {
            *field(s) = v;
        }
    }
    Ok(select_features(
        &windowize(&rows, &cfg.window)?,
        cfg.min_variance,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn sample(t: f64, u: f64) -> RawSample {
        RawSample {
            timestamp: t,
            utilization: ResourceVector::splat(u),
            request_rate: u * 10.0,
            mean_response_time: 0.1,
            anomaly: false,
        }
    }

    #[test]
    fn clean_drops_duplicates_and_nan() {
        let mut rows = vec![
            sample(0.0, 0.1),
            sample(1.0, 0.2),
            sample(1.0, 0.9),
            sample(2.0, 0.3),
        ];
        assert_eq!(clean(&rows).len(), 3);
        assert_eq!(clean(&rows)[1].utilization.cpu, 0.2);
        let tidy = clean(&rows);
        assert_eq!(clean(&tidy), tidy);
        rows.iter_mut().for_each(|r| r.request_rate = f64::NAN);
        assert!(clean(&rows).is_empty());
    }

    #[test]
    fn normalize_examples() {
        let r = FeatureRange {
            min: 0.0,
            max: 10.0,
        };
        assert_eq!(
            min_max_normalize(&[0.0, 10.0, 5.0], r).unwrap(),
            vec![0.0, 1.0, 0.5]
        );
        let d = FeatureRange { min: 3.0, max: 3.0 };
        assert_eq!(
            min_max_normalize(&[3.0], d),
            Err(Error::DegenerateRange { value: 3.0 })
        );
    }

    #[test]
    fn zscore_example_hand_computed() {
        // mean = 20.8; deviations -19.8 (x4), 79.2; population var = 7840.8 / 5 = 1568.16; sd = 39.6.
        // Fence mean + 2 sd = 100.0: the 100 sits on the fence, so it maps to the fence value.
        let x = [1.0, 1.0, 1.0, 1.0, 100.0];
        let out = clip_outliers(&x, OutlierMethod::ZScore(2.0)).unwrap();
        let fence = 20.8 + 2.0 * 39.6;
        assert!((out[4] - fence).abs() <= 1e-9 * fence);
        assert_eq!(&out[..4], &[1.0; 4]);
        // With k = 1 it is strictly beyond the fence and gets pulled in.
        let out = clip_outliers(&x, OutlierMethod::ZScore(1.0)).unwrap();
        assert!((out[4] - (20.8 + 39.6)).abs() < 1e-9);
    }

    #[test]
    fn iqr_cases() {
        assert_eq!(
            clip_outliers(&[2.0; 6], OutlierMethod::Iqr(1.5)).unwrap(),
            vec![2.0; 6]
        );
        let clean = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(
            clip_outliers(&clean, OutlierMethod::Iqr(1.5)).unwrap(),
            clean.to_vec()
        );
        // q1 = 2, q3 = 4, fences [-1, 7].
        let out = clip_outliers(&[1.0, 2.0, 3.0, 4.0, 50.0], OutlierMethod::Iqr(1.5)).unwrap();
        assert_eq!(out[4], 7.0);
        assert!(matches!(
            clip_outliers(&[1.0, 2.0], OutlierMethod::Iqr(1.5)),
            Err(Error::TooShort { needed: 4, got: 2 })
        ));
    }

    #[test]
    fn features_on_constant_window() {
        let w: Vec<_> = (0..5).map(|t| sample(t as f64, 0.4)).collect();
        let f = extract_features(&w).unwrap();
        assert_eq!(f.len(), FEATURE_COUNT);
        assert_eq!(&f[0..5], &[0.4, 0.0, 0.0, 0.4, 0.0]);
    }

    #[test]
    fn features_on_linear_window() {
        let w: Vec<_> = (1..=3).map(|t| sample(t as f64, t as f64)).collect();
        let f = extract_features(&w).unwrap();
        assert!((f[0] - 2.0).abs() < 1e-12);
        assert!((f[4] - 1.0).abs() < 1e-12);
        assert!(f[2].abs() < 1e-12);
        assert!(extract_features(&w[..2]).is_err());
    }

    #[test]
    fn windowize_row_counts() {
        let cfg = WindowConfig {
            window_len: 4,
            horizon: 2,
            ..Default::default()
        };
        let s: Vec<_> = (0..6).map(|t| sample(t as f64, 0.5)).collect();
        assert_eq!(windowize(&s, &cfg).unwrap().rows(), 1);
        let s: Vec<_> = (0..10).map(|t| sample(t as f64, 0.5)).collect();
        let d = windowize(&s, &cfg).unwrap();
        assert_eq!(d.rows(), 5);
        for t in d.raw_targets() {
            assert_eq!(t, [0.5; 3]);
        }
        assert!(matches!(
            windowize(&s[..5], &cfg),
            Err(Error::TooShort { needed: 6, got: 5 })
        ));
    }

    #[test]
    fn preprocess_winsorizes_and_selects() {
        let mut samples: Vec<RawSample> = (0..60)
            .map(|i| sample(f64::from(i), 0.3 + 0.004 * f64::from(i % 7)))
            .collect();
        samples[30].utilization.cpu = 50.0;
        let cfg = PipelineConfig {
            outliers: OutlierMethod::Iqr(1.5),
            ..PipelineConfig::default()
        };
        let ds = preprocess(&samples, &cfg).unwrap();
        assert!(ds.raw_targets().all(|t| t[0] < 1.0));
        assert!(ds.columns.len() < FEATURE_COUNT);
        assert!(ds.columns.iter().all(|c| !ds.degenerate.contains(c)));
    }

    #[test]
    fn windowize_skips_anomalies() {
        let cfg = WindowConfig {
            window_len: 3,
            horizon: 1,
            ..Default::default()
        };
        let mut s: Vec<_> = (0..8).map(|t| sample(t as f64, t as f64 / 10.0)).collect();
        s[7].anomaly = true;
        assert_eq!(windowize(&s, &cfg).unwrap().rows(), 4);
        let keep = WindowConfig {
            exclude_anomalies: false,
            ..cfg
        };
        assert_eq!(windowize(&s, &keep).unwrap().rows(), 5);
    }

    #[test]
    fn select_features_threshold() {
        let cfg = WindowConfig {
            window_len: 3,
            horizon: 1,
            train_fraction: 1.0,
            exclude_anomalies: true,
        };
        let s: Vec<_> = (0..30)
            .map(|t| {
                let mut x = sample(t as f64, ((t * 7) % 11) as f64 / 11.0);
                x.utilization.memory = 0.25;
                x
            })
            .collect();
        let d = windowize(&s, &cfg).unwrap();
        assert_eq!(select_features(&d, 0.0).columns.len(), FEATURE_COUNT);
        let sel = select_features(&d, 1e-6);
        assert!(
            !sel.columns.contains(&5),
            "constant memory_mean should be dropped"
        );
        assert!(sel.columns.contains(&0));
        let all_gone = select_features(&d, 10.0);
        assert_eq!(all_gone.columns.len(), 1);
    }

    proptest! {
        #[test]
        fn clean_idempotent(ts in proptest::collection::vec(0u8..20, 0..40)) {
            let rows: Vec<_> = ts.iter().map(|&t| sample(t as f64, 0.5)).collect();
            let once = clean(&rows);
            prop_assert_eq!(clean(&once), once);
        }

        #[test]
        fn normalize_roundtrip(lo in -1e3..1e3f64, w in 1e-3..1e3f64, fr in proptest::collection::vec(0.0..=1.0f64, 1..20)) {
            let r = FeatureRange { min: lo, max: lo + w };
            let x: Vec<f64> = fr.iter().map(|f| lo + f * w).collect();
            let y = min_max_normalize(&x, r).unwrap();
            for (xi, yi) in x.iter().zip(&y) {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(yi));
                let back = r.denormalize(*yi);
                prop_assert!((back - xi).abs() <= 1e-9 * xi.abs().max(w));
            }
        }

        #[test]
        fn clipping_preserves_shape(x in proptest::collection::vec(-1e3..1e3f64, 4..50), k in 0.5..4.0f64, iqr in any::<bool>()) {
            let m = if iqr { OutlierMethod::Iqr(k) } else { OutlierMethod::ZScore(k) };
            let y = clip_outliers(&x, m).unwrap();
            prop_assert_eq!(y.len(), x.len());
            let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert!(max(&y) <= max(&x));
            prop_assert!(min(&y) >= min(&x));
        }

        #[test]
        fn symmetric_window_has_zero_skew(half in proptest::collection::vec(0.01..10.0f64, 1..10), centre in 0.0..10.0f64) {
            let mut vals: Vec<f64> = half.iter().map(|d| centre - d).collect();
            vals.extend(half.iter().map(|d| centre + d));
            vals.push(centre);
            let w: Vec<_> = vals.iter().enumerate().map(|(i, v)| sample(i as f64, *v)).collect();
            let f = extract_features(&w).unwrap();
            prop_assert!(f[2].abs() <= 1e-9);
        }
    }
}
