use super::{DigitDistribution, MnistError, DIGITS};

/// Area under the ROC curve for one class: the probability that a random
/// positive outscores a random negative, ties counting one half.
///
/// Returns `None` unless there is at least one positive and one negative.
pub fn auc_binary(scores: &[f64], positive: &[bool]) -> Option<f64> {
    assert_eq!(scores.len(), positive.len(), "one flag per score");
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Sum of (1-based, tie-averaged) ranks of the positives.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        let pos_in_group = order[i..=j].iter().filter(|&&k| positive[k]).count();
        rank_sum += avg_rank * pos_in_group as f64;
        i = j + 1;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Some((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroAuc {
    /// Mean over the classes that could be scored.
    pub value: f64,
    /// Per-digit AUC; `None` for skipped classes.
    pub per_class: [Option<f64>; DIGITS],
    /// Digits lacking either positives or negatives.
    pub skipped: Vec<u8>,
}

/// One-vs-rest AUC per digit on the normalised scores, averaged over digits.
pub fn auc_macro(scores: &[DigitDistribution], labels: &[u8]) -> Result<MacroAuc, MnistError> {
    if scores.len() != labels.len() {
        return Err(MnistError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    let normalized: Vec<[f64; DIGITS]> = scores.iter().map(DigitDistribution::normalized).collect();
    let mut per_class = [None; DIGITS];
    let mut skipped = Vec::new();
    for (digit, slot) in per_class.iter_mut().enumerate() {
        let s: Vec<f64> = normalized.iter().map(|row| row[digit]).collect();
        let pos: Vec<bool> = labels.iter().map(|&l| usize::from(l) == digit).collect();
        *slot = auc_binary(&s, &pos);
        if slot.is_none() {
            skipped.push(digit as u8);
        }
    }
    let scored: Vec<f64> = per_class.iter().flatten().copied().collect();
    if scored.is_empty() {
        return Err(MnistError::NoValidClass);
    }
    Ok(MacroAuc {
        value: scored.iter().sum::<f64>() / scored.len() as f64,
        per_class,
        skipped,
    })
}

/// ROC curve `(threshold, fpr, tpr)`, one point per distinct score in
/// descending order, preceded by `(inf, 0, 0)`.
pub fn roc_points(scores: &[f64], positive: &[bool]) -> Vec<(f64, f64, f64)> {
    assert_eq!(scores.len(), positive.len(), "one flag per score");
    let n_pos = positive.iter().filter(|&&p| p).count().max(1) as f64;
    let n_neg = positive.iter().filter(|&&p| !p).count().max(1) as f64;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![(f64::INFINITY, 0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if positive[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((threshold, fp as f64 / n_neg, tp as f64 / n_pos));
    }
    points
}
