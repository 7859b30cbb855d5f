//! Binary PGM (P5, 8-bit) dumps of 2D maps for visual debugging.

use std::io::Write;

/// Encodes `values` (row-major, `rows x cols`) linearly mapped from
/// `[lo, hi]` to `[0, 255]`; values outside the range saturate.
pub fn encode_scaled(values: &[f64], rows: usize, cols: usize, lo: f64, hi: f64) -> Vec<u8> {
    assert_eq!(values.len(), rows * cols, "map shape mismatch");
    let span = if hi > lo { hi - lo } else { 1.0 };
    let pixels: Vec<u8> = values
        .iter()
        .map(|v| {
            let t = ((v - lo) / span).clamp(0.0, 1.0);
            (t * 255.0).round() as u8
        })
        .collect();
    encode_raw(&pixels, rows, cols)
}

/// Encodes class labels, spreading `0..n_classes` over the gray range.
pub fn encode_labels(labels: &[u16], rows: usize, cols: usize, n_classes: usize) -> Vec<u8> {
    assert_eq!(labels.len(), rows * cols, "map shape mismatch");
    let step = 255 / (n_classes.max(2) - 1);
    let pixels: Vec<u8> = labels
        .iter()
        .map(|l| (*l as usize * step).min(255) as u8)
        .collect();
    encode_raw(&pixels, rows, cols)
}

pub fn encode_raw(pixels: &[u8], rows: usize, cols: usize) -> Vec<u8> {
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

pub fn write_scaled<W: Write>(
    mut out: W,
    values: &[f64],
    rows: usize,
    cols: usize,
    lo: f64,
    hi: f64,
) -> std::io::Result<()> {
    out.write_all(&encode_scaled(values, rows, cols, lo, hi))
}
