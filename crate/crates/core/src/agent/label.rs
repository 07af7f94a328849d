//! Extended labels: the label's bits on odd positions, zeros on even positions,
//! and a terminating `1` at the last position.

use thiserror::Error;

/// Agent label.
pub type Label = u64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("labels {0} and {0} are equal; no distinguishing index exists")]
    NoDistinguisher(Label),
}

/// Number of bits used for `label`: `floor(log2 l) + 1`, and 1 for label 0.
pub fn bit_length(label: Label) -> usize {
    if label == 0 {
        1
    } else {
        (Label::BITS - label.leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedLabel {
    label: Label,
    bits: Vec<bool>,
}

impl ExtendedLabel {
    pub fn new(label: Label) -> Self {
        let k = bit_length(label);
        let mut bits = Vec::with_capacity(2 * k);
        for s in 1..=k {
            // Most significant bit first.
            bits.push((label >> (k - s)) & 1 == 1);
            bits.push(s == k);
        }
        ExtendedLabel { label, bits }
    }

    pub fn label(&self) -> Label {
        self.label
    }

    /// Bit length `k` of the source label; the extended label has `2k` bits.
    pub fn source_bits(&self) -> usize {
        self.bits.len() / 2
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit at 1-based position `j`.
    pub fn bit(&self, j: usize) -> bool {
        self.bits[j - 1]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

pub fn extend_label(label: Label) -> ExtendedLabel {
    ExtendedLabel::new(label)
}

/// Least 1-based position where the two extended labels differ. Always at most
/// the shorter length.
pub fn distinguishing_index(a: &ExtendedLabel, b: &ExtendedLabel) -> Result<usize, LabelError> {
    if a.label == b.label {
        return Err(LabelError::NoDistinguisher(a.label));
    }
    let j = a
        .bits
        .iter()
        .zip(&b.bits)
        .position(|(x, y)| x != y)
        .expect("distinct extended labels differ within the shorter length");
    Ok(j + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn as_bits(l: Label) -> Vec<u8> {
        ExtendedLabel::new(l).bits().iter().map(|&b| b as u8).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(as_bits(1), vec![1, 1]);
        assert_eq!(as_bits(5), vec![1, 0, 0, 0, 1, 1]);
        assert_eq!(as_bits(0), vec![0, 1]);
        assert_eq!(as_bits(2), vec![1, 0, 0, 1]);
        assert_eq!(as_bits(3), vec![1, 0, 1, 1]);
    }

    #[test]
    fn distinguishing_examples() {
        let e = ExtendedLabel::new;
        assert_eq!(distinguishing_index(&e(2), &e(5)), Ok(4));
        assert_eq!(distinguishing_index(&e(2), &e(3)), Ok(3));
        assert_eq!(
            distinguishing_index(&e(7), &e(7)),
            Err(LabelError::NoDistinguisher(7))
        );
    }

    #[test]
    fn bit_lengths() {
        assert_eq!(bit_length(0), 1);
        assert_eq!(bit_length(1), 1);
        assert_eq!(bit_length(2), 2);
        assert_eq!(bit_length(255), 8);
        assert_eq!(bit_length(256), 9);
        assert_eq!(bit_length(u64::MAX), 64);
    }
}
