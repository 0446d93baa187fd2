//! Seeded k-fold cross-validation of the stacker.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::{self, EvalReport};
use crate::stacker::{classify, fit_ridge, fit_threshold, ThresholdClassifier, N_FEATURES};

pub const DEFAULT_SEED: u64 = 2017;
pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvOptions {
    pub k: usize,
    pub seed: u64,
    pub ridge: f64,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            k: DEFAULT_FOLDS,
            seed: DEFAULT_SEED,
            ridge: DEFAULT_RIDGE,
        }
    }
}

/// Fold id of every sample: a seeded shuffle dealt round-robin, so fold
/// sizes differ by at most one.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n];
    for (pos, &sample) in order.iter().enumerate() {
        fold[sample] = pos % k;
    }
    fold
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// Accuracy2 and ASD averaged over folds; tau over pooled out-of-fold
    /// predictions grouped by subject; rho over pooled out-of-fold regression
    /// scores.
    pub report: EvalReport,
    pub oof_lr_scores: Vec<f64>,
    pub oof_predictions: Vec<u8>,
    pub fold_thresholds: Vec<f64>,
    /// Threshold fitted on the pooled out-of-fold regression scores.
    pub pooled_threshold: ThresholdClassifier,
}

/// Runs k-fold CV: per fold, fit ridge and threshold on the training part
/// and score the held-out part.
pub fn cross_validate<S: AsRef<str>>(
    x: &[[f64; N_FEATURES]],
    y: &[f64],
    subjects: &[S],
    opts: &CvOptions,
) -> Result<CvReport> {
    let n = x.len();
    if y.len() != n || subjects.len() != n {
        return Err(Error::InvalidInput(format!(
            "cross-validation inputs differ in length: {n} rows, {} truths, {} subjects",
            y.len(),
            subjects.len()
        )));
    }
    if opts.k < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 folds, got {}", opts.k)));
    }
    if n < opts.k {
        return Err(Error::InvalidInput(format!("{n} samples cannot fill {} folds", opts.k)));
    }

    let fold = fold_assignment(n, opts.k, opts.seed);
    let mut oof_lr = vec![0.0; n];
    let mut oof_pred = vec![0u8; n];
    let mut fold_thresholds = Vec::with_capacity(opts.k);
    let (mut acc_sum, mut asd_sum) = (0.0, 0.0);

    for f in 0..opts.k {
        let (train, test): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| fold[i] != f);
        let train_x: Vec<_> = train.iter().map(|&i| x[i]).collect();
        let train_y: Vec<_> = train.iter().map(|&i| y[i]).collect();
        let model = fit_ridge(&train_x, &train_y, opts.ridge)?;
        let train_lr: Vec<f64> = train_x.iter().map(|r| model.score(r)).collect();
        let clf = fit_threshold(&train_lr, &train_y)?;
        fold_thresholds.push(clf.tau());

        let mut pred = Vec::with_capacity(test.len());
        let mut truth = Vec::with_capacity(test.len());
        for &i in &test {
            oof_lr[i] = model.score(&x[i]);
            oof_pred[i] = classify(oof_lr[i], &clf);
            pred.push(f64::from(oof_pred[i]));
            truth.push(y[i]);
        }
        acc_sum += metrics::accuracy2(&pred, &truth)?;
        asd_sum += metrics::asd(&pred, &truth)?;
    }

    let pooled_pred: Vec<f64> = oof_pred.iter().map(|&p| f64::from(p)).collect();
    let groups = metrics::group_by_subject(subjects, &pooled_pred, y);
    let kendall_tau = metrics::kendall_tau_per_subject(groups.iter().map(|(p, t)| (p.as_slice(), t.as_slice())))
        .ok()
        .map(|s| s.mean);
    let rho = metrics::pearson(&oof_lr, y);
    let pooled_threshold = fit_threshold(&oof_lr, y)?;

    Ok(CvReport {
        report: EvalReport {
            accuracy2: acc_sum / opts.k as f64,
            asd: asd_sum / opts.k as f64,
            kendall_tau,
            rho: rho.unwrap_or(0.0),
            rho_defined: rho.is_some(),
        },
        oof_lr_scores: oof_lr,
        oof_predictions: oof_pred,
        fold_thresholds,
        pooled_threshold,
    })
}
