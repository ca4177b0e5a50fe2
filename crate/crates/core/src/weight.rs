//! Digit weights on `Z_b^{s×n}`.
//!
//! A weight assigns each digit position `(i, j)` a real value `ν_{i,j}`; the
//! weight of a matrix is the sum over its nonzero positions. The merit of a
//! net damps each dual element by `b^{-2ν(A)}`, so position weights directly
//! express how severely high-order digits are discounted: the Dick weight
//! `ν_{i,j} = j` mirrors the `b^{-j}` scale of digit `j`, the Hamming weight
//! counts positions, and their sum is the weight under which the merit
//! bounds the root-mean-square integration error.

use crate::error::{Error, Result};
use crate::net::DigitMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    Dick,
    Hamming,
    DickPlusHamming,
    Custom,
}

impl std::fmt::Display for WeightKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WeightKind::Dick => "mu",
            WeightKind::Hamming => "h",
            WeightKind::DickPlusHamming => "mu+h",
            WeightKind::Custom => "custom",
        })
    }
}

/// A full `s×n` matrix of position weights.
#[derive(Clone, Debug)]
pub struct WeightSpec {
    s: usize,
    n: usize,
    nu: Vec<f64>,
    kind: WeightKind,
}

impl WeightSpec {
    fn fill(s: usize, n: usize, kind: WeightKind, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut nu = Vec::with_capacity(s * n);
        for i in 0..s {
            for j in 0..n {
                nu.push(f(i, j));
            }
        }
        WeightSpec { s, n, nu, kind }
    }

    /// Dick weight: `ν_{i,j} = j` with 1-based `j`.
    pub fn dick(s: usize, n: usize) -> Self {
        Self::fill(s, n, WeightKind::Dick, |_, j| (j + 1) as f64)
    }

    /// Hamming weight: `ν_{i,j} = 1`.
    pub fn hamming(s: usize, n: usize) -> Self {
        Self::fill(s, n, WeightKind::Hamming, |_, _| 1.0)
    }

    /// `ν_{i,j} = j + 1` (1-based `j`): the weight under which the merit
    /// bounds the RMS integration error.
    pub fn dick_plus_hamming(s: usize, n: usize) -> Self {
        Self::fill(s, n, WeightKind::DickPlusHamming, |_, j| (j + 2) as f64)
    }

    /// Arbitrary real position weights, one row per coordinate.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let s = rows.len();
        if s == 0 {
            return Err(Error::ShapeMismatch("weight matrix needs at least one row".into()));
        }
        let n = rows[0].len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(
                "weight rows must be non-empty and of equal length".into(),
            ));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("weight entries must be finite".into()));
        }
        Ok(WeightSpec {
            s,
            n,
            nu: rows.concat(),
            kind: WeightKind::Custom,
        })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    #[inline]
    pub fn nu(&self, i: usize, j: usize) -> f64 {
        self.nu[i * self.n + j]
    }

    /// Flattened weights in the same row-major layout as
    /// [`DigitMatrix::digits`].
    pub fn flat(&self) -> &[f64] {
        &self.nu
    }

    pub(crate) fn check_shape(&self, s: usize, n: usize) -> Result<()> {
        if self.s != s || self.n != n {
            return Err(Error::ShapeMismatch(format!(
                "weight matrix is {}x{}, net is {s}x{n}",
                self.s, self.n
            )));
        }
        Ok(())
    }
}

/// `ν(A)`: sum of position weights over the nonzero digits of `A`.
///
/// Exact whenever the weights are integers (every partial sum stays below
/// 2^53 for any shape this crate admits).
pub fn weight_of(a: &DigitMatrix, w: &WeightSpec) -> Result<f64> {
    w.check_shape(a.s(), a.n())?;
    Ok(a.digits()
        .iter()
        .zip(w.flat())
        .filter(|(&d, _)| d != 0)
        .map(|(_, &nu)| nu)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_on_the_identity_pair() {
        let a = DigitMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(weight_of(&a, &WeightSpec::dick(2, 2)).unwrap(), 3.0);
        assert_eq!(weight_of(&a, &WeightSpec::hamming(2, 2)).unwrap(), 2.0);
        assert_eq!(weight_of(&a, &WeightSpec::dick_plus_hamming(2, 2)).unwrap(), 5.0);
    }

    #[test]
    fn zero_matrix_has_zero_weight() {
        let a = DigitMatrix::zero(3, 4);
        assert_eq!(weight_of(&a, &WeightSpec::dick(3, 4)).unwrap(), 0.0);
    }

    #[test]
    fn dick_plus_hamming_is_the_sum_of_its_parts() {
        let a = DigitMatrix::from_rows(&[vec![0, 2, 1], vec![1, 0, 2]]).unwrap();
        let mu = weight_of(&a, &WeightSpec::dick(2, 3)).unwrap();
        let h = weight_of(&a, &WeightSpec::hamming(2, 3)).unwrap();
        let both = weight_of(&a, &WeightSpec::dick_plus_hamming(2, 3)).unwrap();
        assert_eq!(both, mu + h);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = DigitMatrix::zero(2, 3);
        assert!(weight_of(&a, &WeightSpec::dick(3, 2)).is_err());
    }

    #[test]
    fn custom_weights_reject_non_finite_entries() {
        assert!(WeightSpec::from_rows(&[vec![1.0, f64::NAN]]).is_err());
        assert!(WeightSpec::from_rows(&[vec![1.0], vec![2.0, 3.0]]).is_err());
        let w = WeightSpec::from_rows(&[vec![0.5, 1.25]]).unwrap();
        assert_eq!(w.nu(0, 1), 1.25);
        assert_eq!(w.kind(), WeightKind::Custom);
    }
}
