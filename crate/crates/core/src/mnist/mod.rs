//! The data-based conditional applied to binarised handwritten digits.
//!
//! Each training image is a datum whose world sets one `digit_i` atom and
//! the 784 `pixel_j` atoms (pixel above threshold). Conditioning on all
//! pixels of a test image makes the mismatch count of a training image its
//! Hamming distance to the test image, so prediction is a histogram of
//! distances per label followed by the [`MismatchProfile`] kernel.
//!
//! [`MismatchProfile`]: crate::engine::MismatchProfile

mod auc;
mod bits;
mod curve;
mod generate;
mod idx;
mod output;
mod predict;

use std::io;

use num_rational::BigRational;
use thiserror::Error;

pub use auc::{auc_binary, auc_macro, roc_points, MacroAuc};
pub use bits::PixelBits;
pub use curve::{evaluate_method, learning_curve, CurveRow, Evaluation, Method};
pub use generate::{complete_image, generate_class_image, row_prefix, PixelProbImage};
pub use idx::{
    parse_idx, parse_idx_images, parse_idx_labels, read_idx, write_idx, IMAGE_MAGIC, LABEL_MAGIC,
};
pub use output::{
    curve_csv, predictions_csv, probabilities_to_grey, roc_csv, write_pgm, PredictionRow,
};
pub use predict::{
    knn_batch, knn_predict, mismatch_histogram, nearest_neighbours, predict_batch, predict_digit,
};

/// Image side length.
pub const SIDE: usize = 28;
/// Pixels per image.
pub const PIXELS: usize = SIDE * SIDE;
/// Number of digit classes.
pub const DIGITS: usize = 10;
/// Greyscale cut-off used unless configured otherwise.
pub const DEFAULT_THRESHOLD: u8 = 30;

#[derive(Debug, Error)]
pub enum MnistError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad magic number {found:#010x}, expected {expected:#010x}")]
    BadMagic { expected: u32, found: u32 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("truncated file: need {expected} bytes, found {found}")]
    TruncatedFile { expected: usize, found: usize },
    #[error("label {0} is not a digit")]
    BadLabel(u8),
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training item {0} has no label")]
    MissingLabel(usize),
    #[error("image has {found} pixels, expected {expected}")]
    PixelCountMismatch { expected: usize, found: usize },
    #[error("k = {k} must lie in 1..={n}")]
    BadK { k: usize, n: usize },
    #[error("{scores} score rows but {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("no class has both positive and negative examples")]
    NoValidClass,
    #[error("no item is labelled {0}")]
    NoSuchClass(u8),
    #[error("pixel index {0} out of range")]
    BadIndex(usize),
    #[error("pixel index {0} observed twice")]
    DuplicateIndex(usize),
    #[error("no training image matches the evidence exactly (mu = 1 is undefined)")]
    Undefined,
}

/// 28x28 greyscale image, 0 = black, 255 = white.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImage {
    pixels: Box<[u8; PIXELS]>,
    label: Option<u8>,
}

impl RawImage {
    pub fn new(pixels: [u8; PIXELS], label: Option<u8>) -> Self {
        assert!(label.is_none_or(|l| l < 10), "label must be a digit");
        RawImage {
            pixels: Box::new(pixels),
            label,
        }
    }

    pub fn pixels(&self) -> &[u8; PIXELS] {
        &self.pixels
    }

    pub fn label(&self) -> Option<u8> {
        self.label
    }
}

/// Binarised image: pixel bits plus the one-hot digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinarizedItem {
    pub pixels: PixelBits,
    pub label: Option<u8>,
}

impl BinarizedItem {
    pub fn new(pixels: PixelBits, label: Option<u8>) -> Self {
        assert!(label.is_none_or(|l| l < 10), "label must be a digit");
        BinarizedItem { pixels, label }
    }

    /// One-hot digit atoms, bit `i` for `digit_i`; zero when unlabelled.
    pub fn digit_bits(&self) -> u16 {
        self.label.map_or(0, |l| 1 << l)
    }
}

/// Pixel `j` is on iff its greyscale is strictly above `threshold`.
pub fn binarize(img: &RawImage, threshold: u8) -> BinarizedItem {
    let mut bits = PixelBits::zeros(PIXELS);
    for (j, &v) in img.pixels.iter().enumerate() {
        if v > threshold {
            bits.set(j, true);
        }
    }
    BinarizedItem::new(bits, img.label)
}

pub fn binarize_all(imgs: &[RawImage], threshold: u8) -> Vec<BinarizedItem> {
    imgs.iter().map(|i| binarize(i, threshold)).collect()
}

/// Per-digit scores for one test image.
///
/// `conditionals[i]` is `p(digit_i | pixels)` as defined by the model. At
/// `mu -> 1` these are label fractions among the nearest training images
/// and sum to one; at `mu < 1` every non-matching label still receives
/// `1 - mu` per datum so the raw values sum to `mu + 9 (1 - mu)`.
/// [`normalized`](Self::normalized) rescales them to a distribution for
/// ranking and output.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitDistribution {
    conditionals: [f64; DIGITS],
    exact: Option<[BigRational; DIGITS]>,
}

impl DigitDistribution {
    pub(crate) fn new(conditionals: [f64; DIGITS], exact: Option<[BigRational; DIGITS]>) -> Self {
        DigitDistribution {
            conditionals,
            exact,
        }
    }

    pub fn conditionals(&self) -> &[f64; DIGITS] {
        &self.conditionals
    }

    /// Exact values, present for `mu = 1`, `mu -> 1` and kNN votes.
    pub fn exact(&self) -> Option<&[BigRational; DIGITS]> {
        self.exact.as_ref()
    }

    /// Conditionals rescaled to sum to one.
    pub fn normalized(&self) -> [f64; DIGITS] {
        let sum: f64 = self.conditionals.iter().sum();
        if sum > 0.0 {
            self.conditionals.map(|p| p / sum)
        } else {
            [1.0 / DIGITS as f64; DIGITS]
        }
    }

    /// Most probable digit; the smallest digit wins ties.
    pub fn argmax(&self) -> u8 {
        let mut best = 0;
        for (i, &p) in self.conditionals.iter().enumerate() {
            if p > self.conditionals[best] {
                best = i;
            }
        }
        best as u8
    }
}
