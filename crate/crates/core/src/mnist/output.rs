use std::fmt::Write as _;
use std::io::{self, Write};

use super::{roc_points, CurveRow, DigitDistribution, DIGITS};

/// Maps probabilities to greyscale `round(255 p)`, or `255 - round(255 p)`
/// when inverted.
pub fn probabilities_to_grey(values: &[f64], invert: bool) -> Vec<u8> {
    values
        .iter()
        .map(|&p| {
            let g = (255.0 * p.clamp(0.0, 1.0)).round() as u8;
            if invert {
                255 - g
            } else {
                g
            }
        })
        .collect()
}

/// Binary PGM (P5, maxval 255).
pub fn write_pgm<W: Write>(mut out: W, width: usize, height: usize, grey: &[u8]) -> io::Result<()> {
    assert_eq!(grey.len(), width * height, "pixel count");
    write!(out, "P5\n{width} {height}\n255\n")?;
    out.write_all(grey)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub test_index: usize,
    pub label: Option<u8>,
    pub distribution: DigitDistribution,
}

/// `test_index,label,p0..p9,argmax` with normalised probabilities.
pub fn predictions_csv(rows: &[PredictionRow]) -> String {
    let mut out = String::from("test_index,label");
    for d in 0..DIGITS {
        write!(out, ",p{d}").unwrap();
    }
    out.push_str(",argmax\n");
    for row in rows {
        write!(out, "{},", row.test_index).unwrap();
        if let Some(l) = row.label {
            write!(out, "{l}").unwrap();
        }
        for p in row.distribution.normalized() {
            write!(out, ",{p}").unwrap();
        }
        writeln!(out, ",{}", row.distribution.argmax()).unwrap();
    }
    out
}

/// One-vs-rest ROC points per digit: `class,threshold,fpr,tpr`.
pub fn roc_csv(scores: &[DigitDistribution], labels: &[u8]) -> String {
    assert_eq!(scores.len(), labels.len(), "one label per score row");
    let normalized: Vec<[f64; DIGITS]> = scores.iter().map(DigitDistribution::normalized).collect();
    let mut out = String::from("class,threshold,fpr,tpr\n");
    for digit in 0..DIGITS {
        let s: Vec<f64> = normalized.iter().map(|row| row[digit]).collect();
        let pos: Vec<bool> = labels.iter().map(|&l| usize::from(l) == digit).collect();
        if !pos.iter().any(|&p| p) || pos.iter().all(|&p| p) {
            continue;
        }
        for (t, fpr, tpr) in roc_points(&s, &pos) {
            writeln!(out, "{digit},{t},{fpr},{tpr}").unwrap();
        }
    }
    out
}

/// `method,size,auc`.
pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("method,size,auc\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.method, r.size, r.auc).unwrap();
    }
    out
}
