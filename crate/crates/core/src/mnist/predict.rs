use num_bigint::BigInt;
use num_rational::BigRational;

use crate::engine::{MismatchProfile, MuMode, QueryResult};
use crate::exec::Execution;

use super::{BinarizedItem, DigitDistribution, MnistError, PixelBits, DIGITS};

fn check_training_set(train: &[BinarizedItem], pixels: usize) -> Result<(), MnistError> {
    if train.is_empty() {
        return Err(MnistError::EmptyTrainingSet);
    }
    for (i, item) in train.iter().enumerate() {
        if item.label.is_none() {
            return Err(MnistError::MissingLabel(i));
        }
        if item.pixels.len() != pixels {
            return Err(MnistError::PixelCountMismatch {
                expected: pixels,
                found: item.pixels.len(),
            });
        }
    }
    Ok(())
}

/// Counts of training images per (Hamming distance, label); row `h` of the
/// result covers distance `h`.
pub fn mismatch_histogram(
    train: &[BinarizedItem],
    test: &PixelBits,
) -> Result<Vec<[u64; DIGITS]>, MnistError> {
    check_training_set(train, test.len())?;
    Ok(histogram_unchecked(train, test))
}

fn histogram_unchecked(train: &[BinarizedItem], test: &PixelBits) -> Vec<[u64; DIGITS]> {
    let mut hist = vec![[0u64; DIGITS]; test.len() + 1];
    for item in train {
        let h = item.pixels.hamming(test) as usize;
        if let Some(label) = item.label {
            hist[h][usize::from(label)] += 1;
        }
    }
    hist
}

fn distribution_from_histogram(
    hist: &[[u64; DIGITS]],
    mode: MuMode,
) -> Result<DigitDistribution, MnistError> {
    let totals: Vec<u64> = hist.iter().map(|row| row.iter().sum()).collect();
    let results: Vec<QueryResult> = (0..DIGITS)
        .map(|digit| {
            MismatchProfile::from_dense(totals.iter().zip(hist).map(|(&t, row)| (t, row[digit])))
                .evaluate(mode)
        })
        .collect();
    if results.iter().any(QueryResult::is_undefined) {
        return Err(MnistError::Undefined);
    }
    let conditionals = std::array::from_fn(|i| results[i].value().expect("defined"));
    let exact = results
        .iter()
        .all(QueryResult::is_exact)
        .then(|| std::array::from_fn(|i| results[i].exact().expect("exact").clone()));
    Ok(DigitDistribution::new(conditionals, exact))
}

/// `p(digit_i | all pixels of test)` for every digit.
///
/// At `mu -> 1` this is the label share among the training images at
/// minimal Hamming distance. At `mu = 1` only exact pixel matches count
/// and the result is [`MnistError::Undefined`] when there are none.
pub fn predict_digit(
    train: &[BinarizedItem],
    test: &PixelBits,
    mode: MuMode,
) -> Result<DigitDistribution, MnistError> {
    let hist = mismatch_histogram(train, test)?;
    distribution_from_histogram(&hist, mode)
}

/// [`predict_digit`] over many test images.
pub fn predict_batch(
    train: &[BinarizedItem],
    tests: &[PixelBits],
    mode: MuMode,
    exec: Execution,
) -> Result<Vec<DigitDistribution>, MnistError> {
    let Some(first) = tests.first() else {
        return Ok(Vec::new());
    };
    check_training_set(train, first.len())?;
    exec.try_map(tests, |test| {
        if test.len() != first.len() {
            return Err(MnistError::PixelCountMismatch {
                expected: first.len(),
                found: test.len(),
            });
        }
        distribution_from_histogram(&histogram_unchecked(train, test), mode)
    })
}

/// Minimal Hamming distance to `test` and the training indices attaining it.
pub fn nearest_neighbours(
    train: &[BinarizedItem],
    test: &PixelBits,
) -> Result<(u32, Vec<usize>), MnistError> {
    check_training_set(train, test.len())?;
    let mut best = u32::MAX;
    let mut at = Vec::new();
    for (i, item) in train.iter().enumerate() {
        let h = item.pixels.hamming(test);
        if h < best {
            best = h;
            at.clear();
        }
        if h == best {
            at.push(i);
        }
    }
    Ok((best, at))
}

fn knn_unchecked(train: &[BinarizedItem], test: &PixelBits, k: usize) -> DigitDistribution {
    // (distance, index) keys are unique, so the k smallest are well defined
    // and earlier training items win ties at the k-th distance.
    let mut keys: Vec<(u32, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, item)| (item.pixels.hamming(test), i))
        .collect();
    if k < keys.len() {
        keys.select_nth_unstable(k - 1);
        keys.truncate(k);
    }
    let mut votes = [0u64; DIGITS];
    for &(_, i) in &keys {
        if let Some(label) = train[i].label {
            votes[usize::from(label)] += 1;
        }
    }
    let conditionals = votes.map(|v| v as f64 / k as f64);
    let exact = votes.map(|v| BigRational::new(BigInt::from(v), BigInt::from(k)));
    DigitDistribution::new(conditionals, Some(exact))
}

/// Uniform-weight vote among the `k` nearest training images.
pub fn knn_predict(
    train: &[BinarizedItem],
    test: &PixelBits,
    k: usize,
) -> Result<DigitDistribution, MnistError> {
    check_training_set(train, test.len())?;
    if k == 0 || k > train.len() {
        return Err(MnistError::BadK { k, n: train.len() });
    }
    Ok(knn_unchecked(train, test, k))
}

pub fn knn_batch(
    train: &[BinarizedItem],
    tests: &[PixelBits],
    k: usize,
    exec: Execution,
) -> Result<Vec<DigitDistribution>, MnistError> {
    let Some(first) = tests.first() else {
        return Ok(Vec::new());
    };
    check_training_set(train, first.len())?;
    if k == 0 || k > train.len() {
        return Err(MnistError::BadK { k, n: train.len() });
    }
    exec.try_map(tests, |test| {
        if test.len() != first.len() {
            return Err(MnistError::PixelCountMismatch {
                expected: first.len(),
                found: test.len(),
            });
        }
        Ok(knn_unchecked(train, test, k))
    })
}
