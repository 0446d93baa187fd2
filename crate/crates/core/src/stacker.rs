//! The stacking layer: a ridge-regularised linear model over the five module
//! scores followed by a threshold that maps onto {2, 5}.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix6, Vector6};

use crate::error::{Error, Result};
use crate::metrics;
use crate::tsv;

pub const N_FEATURES: usize = 5;

/// The five module outputs for one triple, in module order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; N_FEATURES]);

impl FeatureVector {
    const RANGES: [(f64, f64); N_FEATURES] = [(2.0, 5.0), (0.0, 7.0), (0.0, 7.0), (2.0, 7.0), (0.0, 7.0)];

    /// Checks finiteness and the per-module ranges.
    pub fn new(values: [f64; N_FEATURES]) -> Result<Self> {
        for (i, (v, (lo, hi))) in values.iter().zip(Self::RANGES).enumerate() {
            if !v.is_finite() || *v < lo || *v > hi {
                return Err(Error::InvalidInput(format!(
                    "feature s{} = {v} outside [{lo}, {hi}]",
                    i + 1
                )));
            }
        }
        if ![2.0, 3.0, 5.0].contains(&values[0]) {
            return Err(Error::InvalidInput(format!("s1 = {} is not one of 2, 3, 5", values[0])));
        }
        Ok(FeatureVector(values))
    }

    pub fn values(&self) -> &[f64; N_FEATURES] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeModel {
    pub weights: [f64; N_FEATURES],
    pub bias: f64,
    /// Ridge strength used for the fit.
    pub ridge: f64,
}

impl RidgeModel {
    /// The weights reported for the original system, fitted with `R = 1e-8`.
    pub fn published() -> Self {
        RidgeModel {
            weights: [0.5245, 0.4532, 0.3513, 0.3824, 0.3824],
            bias: -0.5606,
            ridge: 1e-8,
        }
    }

    /// `Σ wᵢ fᵢ + b`.
    pub fn score(&self, features: &[f64; N_FEATURES]) -> f64 {
        self.weights.iter().zip(features).fold(0.0, |acc, (w, f)| acc + w * f) + self.bias
    }
}

pub fn score_lr(model: &RidgeModel, f: &FeatureVector) -> f64 {
    model.score(&f.0)
}

/// Solves the ridge normal equations for five weights and an unpenalised
/// bias:
///
/// ```text
/// [XᵀX + R·I   Xᵀ1] [w]   [Xᵀy]
/// [1ᵀX         n  ] [b] = [1ᵀy]
/// ```
pub fn fit_ridge(x: &[[f64; N_FEATURES]], y: &[f64], ridge: f64) -> Result<RidgeModel> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} feature rows but {} targets",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::InvalidInput("cannot fit on zero samples".into()));
    }
    if !(ridge.is_finite() && ridge >= 0.0) {
        return Err(Error::InvalidInput(format!("ridge strength must be >= 0, got {ridge}")));
    }

    let mut gram = Matrix6::<f64>::zeros();
    let mut rhs = Vector6::<f64>::zeros();
    for (row, &target) in x.iter().zip(y) {
        let mut aug = [1.0; N_FEATURES + 1];
        aug[..N_FEATURES].copy_from_slice(row);
        for i in 0..=N_FEATURES {
            rhs[i] += aug[i] * target;
            for j in 0..=N_FEATURES {
                gram[(i, j)] += aug[i] * aug[j];
            }
        }
    }
    for i in 0..N_FEATURES {
        gram[(i, i)] += ridge;
    }

    if ridge == 0.0 {
        let sv = gram.singular_values();
        let (lo, hi) = sv
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        if hi == 0.0 || lo <= 1e-10 * hi {
            return Err(Error::Singular);
        }
    }
    let solution = gram.lu().solve(&rhs).ok_or(Error::Singular)?;
    if solution.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    let mut weights = [0.0; N_FEATURES];
    weights.copy_from_slice(&solution.as_slice()[..N_FEATURES]);
    Ok(RidgeModel {
        weights,
        bias: solution[N_FEATURES],
        ridge,
    })
}

/// Cut-off mapping a regression score to 5 (at or above `tau`) or 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdClassifier {
    tau: f64,
}

impl ThresholdClassifier {
    pub fn new(tau: f64) -> Result<Self> {
        if !(0.0..=7.0).contains(&tau) {
            return Err(Error::InvalidInput(format!("tau must be in [0, 7], got {tau}")));
        }
        Ok(ThresholdClassifier { tau })
    }

    pub fn published() -> Self {
        ThresholdClassifier { tau: 3.5 }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

pub fn classify(lr_score: f64, clf: &ThresholdClassifier) -> u8 {
    if lr_score >= clf.tau {
        5
    } else {
        2
    }
}

/// The candidate thresholds `0.0, 0.1, ..., 7.0`.
pub fn threshold_grid() -> impl Iterator<Item = f64> {
    (0..=70).map(|i| f64::from(i) / 10.0)
}

/// Grid-searches the threshold with the best Accuracy2 of the binarised
/// predictions; ties go to the smallest threshold.
pub fn fit_threshold(lr_scores: &[f64], truths: &[f64]) -> Result<ThresholdClassifier> {
    if lr_scores.is_empty() || lr_scores.len() != truths.len() {
        return Err(Error::InvalidInput(format!(
            "need equal non-empty inputs, got {} scores and {} truths",
            lr_scores.len(),
            truths.len()
        )));
    }
    let mut best: Option<(usize, f64)> = None;
    for tau in threshold_grid() {
        let clf = ThresholdClassifier { tau };
        let hits = lr_scores
            .iter()
            .zip(truths)
            .filter(|(s, t)| metrics::within_margin(f64::from(classify(**s, &clf)), **t))
            .count();
        if best.is_none_or(|(h, _)| hits > h) {
            best = Some((hits, tau));
        }
    }
    let (_, tau) = best.expect("grid is non-empty");
    Ok(ThresholdClassifier { tau })
}

/// A fitted ridge model plus threshold, and the seed that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperClassifier {
    pub ridge: RidgeModel,
    pub threshold: ThresholdClassifier,
    pub seed: u64,
}

const MODEL_KEYS: [&str; 9] = ["w1", "w2", "w3", "w4", "w5", "b", "R", "tau", "seed"];

impl SuperClassifier {
    pub fn published() -> Self {
        SuperClassifier {
            ridge: RidgeModel::published(),
            threshold: ThresholdClassifier::published(),
            seed: 0,
        }
    }

    pub fn lr_score(&self, f: &FeatureVector) -> f64 {
        score_lr(&self.ridge, f)
    }

    pub fn predict(&self, f: &FeatureVector) -> u8 {
        classify(self.lr_score(f), &self.threshold)
    }

    /// One `key = value` line per parameter. Floats use the shortest
    /// representation that parses back to the same bits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, w) in self.ridge.weights.iter().enumerate() {
            writeln!(out, "w{} = {w:?}", i + 1).unwrap();
        }
        writeln!(out, "b = {:?}", self.ridge.bias).unwrap();
        writeln!(out, "R = {:?}", self.ridge.ridge).unwrap();
        writeln!(out, "tau = {:?}", self.threshold.tau).unwrap();
        writeln!(out, "seed = {}", self.seed).unwrap();
        out
    }

    pub fn from_text(text: &str, context: &str) -> Result<Self> {
        let mut values: BTreeMap<&str, (usize, String)> = BTreeMap::new();
        for (line, fields) in tsv::records(text, true) {
            let raw = fields.join("\t");
            let Some((key, value)) = raw.split_once('=') else {
                return Err(Error::parse(context, line, "expected `key = value`"));
            };
            let key = MODEL_KEYS
                .iter()
                .find(|k| **k == key.trim())
                .ok_or_else(|| Error::parse(context, line, format!("unknown key {:?}", key.trim())))?;
            let value = value.trim();
            if values.insert(key, (line, value.to_string())).is_some() {
                return Err(Error::parse(context, line, format!("duplicate key {key}")));
            }
        }
        let float = |key: &str| -> Result<f64> {
            let (line, v) = values
                .get(key)
                .ok_or_else(|| Error::InvalidInput(format!("{context}: missing key {key}")))?;
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(context, *line, format!("{key}: bad number {v:?}")))
        };
        let mut weights = [0.0; N_FEATURES];
        for (i, w) in weights.iter_mut().enumerate() {
            *w = float(MODEL_KEYS[i])?;
        }
        let ridge = float("R")?;
        if ridge < 0.0 {
            return Err(Error::InvalidInput(format!("{context}: R must be >= 0")));
        }
        let (seed_line, seed) = values
            .get("seed")
            .ok_or_else(|| Error::InvalidInput(format!("{context}: missing key seed")))?;
        let seed = seed
            .parse::<u64>()
            .map_err(|_| Error::parse(context, *seed_line, "seed must be an unsigned integer"))?;
        Ok(SuperClassifier {
            ridge: RidgeModel {
                weights,
                bias: float("b")?,
                ridge,
            },
            threshold: ThresholdClassifier::new(float("tau")?)?,
            seed,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&tsv::read_to_string(path)?, &path.display().to_string())
    }
}
