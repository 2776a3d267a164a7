//! IDX container format: big-endian magic, dimension sizes, then the raw
//! unsigned-byte payload.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use super::{MnistError, RawImage, PIXELS, SIDE};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

fn be_u32(bytes: &[u8], at: usize) -> Result<u32, MnistError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(MnistError::TruncatedFile {
            expected: at + 4,
            found: bytes.len(),
        })
}

/// Decodes an image file; every image must be 28x28.
pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<[u8; PIXELS]>, MnistError> {
    let magic = be_u32(bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(MnistError::BadMagic {
            expected: IMAGE_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    if rows != SIDE || cols != SIDE {
        return Err(MnistError::DimensionMismatch(format!(
            "images are {rows}x{cols}, expected {SIDE}x{SIDE}"
        )));
    }
    let expected = 16 + count * PIXELS;
    if bytes.len() < expected {
        return Err(MnistError::TruncatedFile {
            expected,
            found: bytes.len(),
        });
    }
    Ok(bytes[16..expected]
        .chunks_exact(PIXELS)
        .map(|c| c.try_into().expect("chunk length"))
        .collect())
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>, MnistError> {
    let magic = be_u32(bytes, 0)?;
    if magic != LABEL_MAGIC {
        return Err(MnistError::BadMagic {
            expected: LABEL_MAGIC,
            found: magic,
        });
    }
    let count = be_u32(bytes, 4)? as usize;
    let expected = 8 + count;
    if bytes.len() < expected {
        return Err(MnistError::TruncatedFile {
            expected,
            found: bytes.len(),
        });
    }
    let labels = bytes[8..expected].to_vec();
    if let Some(&bad) = labels.iter().find(|&&l| l > 9) {
        return Err(MnistError::BadLabel(bad));
    }
    Ok(labels)
}

/// Pairs decoded images with labels; counts must agree.
pub fn parse_idx(images: &[u8], labels: &[u8]) -> Result<Vec<RawImage>, MnistError> {
    let images = parse_idx_images(images)?;
    let labels = parse_idx_labels(labels)?;
    if images.len() != labels.len() {
        return Err(MnistError::DimensionMismatch(format!(
            "{} images but {} labels",
            images.len(),
            labels.len()
        )));
    }
    Ok(images
        .into_iter()
        .zip(labels)
        .map(|(pixels, label)| RawImage::new(pixels, Some(label)))
        .collect())
}

/// Reads an image file and its label file, in file order.
pub fn read_idx(
    images_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
) -> Result<Vec<RawImage>, MnistError> {
    let images = fs::read(images_path.as_ref())?;
    let labels = fs::read(labels_path.as_ref())?;
    parse_idx(&images, &labels)
}

/// Encodes images and labels as an IDX pair.
pub fn write_idx<W1: Write, W2: Write>(
    images: &[RawImage],
    mut image_out: W1,
    mut label_out: W2,
) -> io::Result<()> {
    let n = u32::try_from(images.len()).expect("image count fits in u32");
    image_out.write_all(&IMAGE_MAGIC.to_be_bytes())?;
    image_out.write_all(&n.to_be_bytes())?;
    image_out.write_all(&(SIDE as u32).to_be_bytes())?;
    image_out.write_all(&(SIDE as u32).to_be_bytes())?;
    label_out.write_all(&LABEL_MAGIC.to_be_bytes())?;
    label_out.write_all(&n.to_be_bytes())?;
    for img in images {
        image_out.write_all(img.pixels())?;
        label_out.write_all(&[img.label().unwrap_or(0)])?;
    }
    Ok(())
}
