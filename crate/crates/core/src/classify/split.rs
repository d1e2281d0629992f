use rand::seq::SliceRandom;

use super::{ClassifyError, LabeledExample};
use crate::seed::stream_rng;

/// Stratified, seeded train/validation split.
///
/// The training side receives `round(n * ratio)` examples. Each label class
/// contributes the floor of its share, and leftover slots go to the classes
/// with the largest fractional remainders (positives first on ties).
pub fn split_dataset(
    examples: Vec<LabeledExample>,
    ratio: f64,
    seed: u64,
) -> Result<(Vec<LabeledExample>, Vec<LabeledExample>), ClassifyError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(ClassifyError::Ratio(ratio));
    }
    if examples.len() < 2 {
        return Err(ClassifyError::TooFewExamples { needed: 2, got: examples.len() });
    }
    let n = examples.len();
    let (mut pos, mut neg): (Vec<_>, Vec<_>) = examples.into_iter().partition(|e| e.positive);
    let mut rng = stream_rng(seed, "split");
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);

    let target = (n as f64 * ratio).round() as usize;
    let shares = [pos.len() as f64 * ratio, neg.len() as f64 * ratio];
    let mut quotas = shares.map(|s| (s + 1e-9).floor() as usize);
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| {
        let ra = shares[a] - quotas[a] as f64;
        let rb = shares[b] - quotas[b] as f64;
        rb.partial_cmp(&ra).expect("finite").then(a.cmp(&b))
    });
    let sizes = [pos.len(), neg.len()];
    let mut remaining = target.saturating_sub(quotas[0] + quotas[1]);
    for &class in order.iter().cycle().take(4) {
        if remaining == 0 {
            break;
        }
        if quotas[class] < sizes[class] {
            quotas[class] += 1;
            remaining -= 1;
        }
    }

    let neg_valid = neg.split_off(quotas[1]);
    let pos_valid = pos.split_off(quotas[0]);
    let mut train = pos;
    train.extend(neg);
    let mut valid = pos_valid;
    valid.extend(neg_valid);
    if train.is_empty() || valid.is_empty() {
        return Err(ClassifyError::EmptySide);
    }
    Ok((train, valid))
}
