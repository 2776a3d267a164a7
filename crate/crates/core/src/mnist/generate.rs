use num_rational::BigRational;

use crate::engine::{MismatchProfile, MuMode, QueryResult};

use super::{BinarizedItem, MnistError, PixelBits, SIDE};

/// Per-pixel probabilities for a set of pixel indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelProbImage {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    /// Exact values, present for `mu = 1` and `mu -> 1`.
    pub exact: Option<Vec<BigRational>>,
}

impl PixelProbImage {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// A full `len`-pixel image with the known pixels filled in from `base`
    /// and the predicted ones from `self`.
    pub fn overlay(&self, base: &[f64]) -> Vec<f64> {
        let mut out = base.to_vec();
        for (&j, &p) in self.indices.iter().zip(&self.values) {
            out[j] = p;
        }
        out
    }
}

/// Data grouped by mismatch count, with per-pixel on-counts.
struct PixelBins {
    bins: Vec<(u32, u64, Vec<u64>)>,
}

impl PixelBins {
    fn new() -> Self {
        PixelBins { bins: Vec::new() }
    }

    fn add(&mut self, h: u32, pixels: &PixelBits) {
        let at = match self.bins.binary_search_by_key(&h, |b| b.0) {
            Ok(i) => i,
            Err(i) => {
                self.bins.insert(i, (h, 0, vec![0; pixels.len()]));
                i
            }
        };
        let bin = &mut self.bins[at];
        bin.1 += 1;
        for j in pixels.ones() {
            bin.2[j] += 1;
        }
    }

    fn evaluate(&self, indices: Vec<usize>, mode: MuMode) -> Result<PixelProbImage, MnistError> {
        let results: Vec<QueryResult> = indices
            .iter()
            .map(|&j| {
                let mut profile = MismatchProfile::new();
                for (h, total, on) in &self.bins {
                    profile.add(*h, on[j], true);
                    profile.add(*h, total - on[j], false);
                }
                profile.evaluate(mode)
            })
            .collect();
        if results.iter().any(QueryResult::is_undefined) {
            return Err(MnistError::Undefined);
        }
        let values = results
            .iter()
            .map(|r| r.value().expect("defined"))
            .collect();
        let exact = results
            .iter()
            .map(|r| r.exact().cloned())
            .collect::<Option<Vec<_>>>();
        Ok(PixelProbImage {
            indices,
            values,
            exact,
        })
    }
}

/// `p(pixel_j | digit)` for every pixel, conditioning on the digit atom.
///
/// Items of the class have no mismatch and every other item has one, so
/// at `mu -> 1` this is the class mean of each pixel bit.
pub fn generate_class_image(
    items: &[BinarizedItem],
    digit: u8,
    mode: MuMode,
) -> Result<PixelProbImage, MnistError> {
    let Some(first) = items.first() else {
        return Err(MnistError::NoSuchClass(digit));
    };
    let len = first.pixels.len();
    let mut bins = PixelBins::new();
    for (i, item) in items.iter().enumerate() {
        if item.pixels.len() != len {
            return Err(MnistError::PixelCountMismatch {
                expected: len,
                found: item.pixels.len(),
            });
        }
        let label = item.label.ok_or(MnistError::MissingLabel(i))?;
        bins.add(u32::from(label != digit), &item.pixels);
    }
    if bins.bins.first().is_none_or(|b| b.0 != 0) {
        return Err(MnistError::NoSuchClass(digit));
    }
    bins.evaluate((0..len).collect(), mode)
}

/// `p(pixel_j | observed pixels)` for every unobserved pixel `j`.
///
/// The mismatch count of a training image is the number of observed pixels
/// it disagrees with. Labels are not used.
pub fn complete_image(
    train: &[BinarizedItem],
    observed: &[(usize, bool)],
    mode: MuMode,
) -> Result<PixelProbImage, MnistError> {
    let Some(first) = train.first() else {
        return Err(MnistError::EmptyTrainingSet);
    };
    let len = first.pixels.len();
    if let Some(item) = train.iter().find(|i| i.pixels.len() != len) {
        return Err(MnistError::PixelCountMismatch {
            expected: len,
            found: item.pixels.len(),
        });
    }
    let mut mask = PixelBits::zeros(len);
    let mut values = PixelBits::zeros(len);
    for &(j, bit) in observed {
        if j >= len {
            return Err(MnistError::BadIndex(j));
        }
        if mask.get(j) {
            return Err(MnistError::DuplicateIndex(j));
        }
        mask.set(j, true);
        values.set(j, bit);
    }
    let unobserved: Vec<usize> = (0..len).filter(|&j| !mask.get(j)).collect();
    if unobserved.is_empty() {
        return Ok(PixelProbImage {
            indices: Vec::new(),
            values: Vec::new(),
            exact: Some(Vec::new()),
        });
    }
    let distances: Vec<u32> = train
        .iter()
        .map(|item| item.pixels.masked_hamming(&values, &mask))
        .collect();
    // Only the closest bin matters unless mu is numeric.
    let keep = match mode {
        MuMode::Numeric(_) => u32::MAX,
        _ => distances.iter().copied().min().expect("nonempty"),
    };
    let mut bins = PixelBins::new();
    for (item, &h) in train.iter().zip(&distances) {
        if h <= keep {
            bins.add(h, &item.pixels);
        }
    }
    bins.evaluate(unobserved, mode)
}

/// Observation of the first `rows` image rows of `test`.
pub fn row_prefix(test: &PixelBits, rows: usize) -> Vec<(usize, bool)> {
    (0..(rows * SIDE).min(test.len()))
        .map(|j| (j, test.get(j)))
        .collect()
}
