//! Evaluation metrics: Accuracy2, average score difference, per-subject
//! Kendall tau-b and Pearson correlation.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};

/// Inclusive error margin used by Accuracy2.
pub const MARGIN: f64 = 2.0;

pub fn within_margin(pred: f64, truth: f64) -> bool {
    (pred - truth).abs() <= MARGIN
}

fn check_pair(pred: &[f64], truth: &[f64]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} predictions, {} truths",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::InvalidInput("metrics need at least one item".into()));
    }
    Ok(())
}

/// Fraction of predictions within 2 (inclusive) of the truth.
pub fn accuracy2(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check_pair(pred, truth)?;
    let hits = pred.iter().zip(truth).filter(|(p, t)| within_margin(**p, **t)).count();
    Ok(hits as f64 / pred.len() as f64)
}

/// Mean absolute difference.
pub fn asd(pred: &[f64], truth: &[f64]) -> Result<f64> {
    check_pair(pred, truth)?;
    let total: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t).abs()).sum();
    Ok(total / pred.len() as f64)
}

/// Kendall tau-b in O(n log n) (Knight's algorithm). `None` when fewer than
/// two items or when either side is entirely tied.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "kendall_tau_b needs equal-length inputs");
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    let pairs = |t: u64| t * (t - 1) / 2;
    let n0 = pairs(n as u64);
    let (mut x_ties, mut joint_ties) = (0u64, 0u64);
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if x[a].total_cmp(&x[b]) == Ordering::Equal {
            run_x += 1;
            if y[a].total_cmp(&y[b]) == Ordering::Equal {
                run_xy += 1;
            } else {
                joint_ties += pairs(run_xy);
                run_xy = 1;
            }
        } else {
            x_ties += pairs(run_x);
            joint_ties += pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    x_ties += pairs(run_x);
    joint_ties += pairs(run_xy);

    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let swaps = count_inversions(&mut ys);

    let mut y_ties = 0u64;
    let mut run_y = 1u64;
    for w in ys.windows(2) {
        if w[0].total_cmp(&w[1]) == Ordering::Equal {
            run_y += 1;
        } else {
            y_ties += pairs(run_y);
            run_y = 1;
        }
    }
    y_ties += pairs(run_y);

    if x_ties == n0 || y_ties == n0 {
        return None;
    }
    let numerator = n0 as f64 - x_ties as f64 - y_ties as f64 + joint_ties as f64 - 2.0 * swaps as f64;
    let denominator = ((n0 - x_ties) as f64 * (n0 - y_ties) as f64).sqrt();
    Some(numerator / denominator)
}

// Sorts `v` ascending and returns the number of strictly inverted pairs.
fn count_inversions(v: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = count_inversions(&mut v[..mid]) + count_inversions(&mut v[mid..]);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j].total_cmp(&v[i]) == Ordering::Less {
            merged.push(v[j]);
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            merged.push(v[i]);
            i += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..]);
    v.copy_from_slice(&merged);
    swaps
}

/// Mean tau-b over subject groups, with how many groups were usable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSummary {
    pub mean: f64,
    pub groups_used: usize,
    pub groups_skipped: usize,
}

/// Averages Kendall tau-b between predictions and truths within each group
/// (one group per subject). Groups where tau is undefined (fewer than two
/// items, or all-tied truths or predictions) are skipped.
pub fn kendall_tau_per_subject<'a, I>(groups: I) -> Result<TauSummary>
where
    I: IntoIterator<Item = (&'a [f64], &'a [f64])>,
{
    let (mut sum, mut used, mut skipped) = (0.0, 0usize, 0usize);
    for (pred, truth) in groups {
        match kendall_tau_b(pred, truth) {
            Some(tau) => {
                sum += tau;
                used += 1;
            }
            None => skipped += 1,
        }
    }
    if used == 0 {
        return Err(Error::NoDefinedTau);
    }
    Ok(TauSummary {
        mean: sum / used as f64,
        groups_used: used,
        groups_skipped: skipped,
    })
}

/// Splits parallel `pred`/`truth` slices into per-subject groups, ordered by
/// each subject's first appearance.
pub fn group_by_subject<S: AsRef<str>>(subjects: &[S], pred: &[f64], truth: &[f64]) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut slot: HashMap<&str, usize> = HashMap::new();
    let mut groups: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for ((s, p), t) in subjects.iter().zip(pred).zip(truth) {
        let i = *slot.entry(s.as_ref()).or_insert_with(|| {
            groups.push((Vec::new(), Vec::new()));
            groups.len() - 1
        });
        groups[i].0.push(*p);
        groups[i].1.push(*t);
    }
    groups
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub accuracy2: f64,
    pub asd: f64,
    /// Mean per-subject tau-b; `None` when no subject had a defined tau.
    pub kendall_tau: Option<f64>,
    /// Pearson correlation of regression scores against truths; 0 when
    /// undefined, see `rho_defined`.
    pub rho: f64,
    pub rho_defined: bool,
}
