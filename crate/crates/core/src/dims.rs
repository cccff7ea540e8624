use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest supported product of local dimensions.
pub const MAX_TOTAL_DIM: usize = 4096;

/// Largest number of parties for which subsets are enumerated.
pub const MAX_PARTIES: usize = 16;

/// Ordered local dimensions `d_1, ..., d_N` of a tensor-product space.
///
/// Party 1 is the most significant digit of a flat index:
/// `index = sum_k j_k * prod_{m > k} d_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertDims {
    dims: Vec<usize>,
    total: usize,
}

impl HilbertDims {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::TooManyParties(0));
        }
        if dims.len() > MAX_PARTIES {
            return Err(Error::TooManyParties(dims.len()));
        }
        let mut total = 1usize;
        for &d in dims {
            if d < 2 {
                return Err(Error::BadDimension(d));
            }
            total = total.saturating_mul(d);
            if total > MAX_TOTAL_DIM {
                return Err(Error::DimensionTooLarge(total));
            }
        }
        Ok(Self {
            dims: dims.to_vec(),
            total,
        })
    }

    /// `n` parties of equal dimension `d`.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(&alloc::vec![d; n])
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, party: usize) -> usize {
        self.dims[party]
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// The common local dimension, if all parties agree.
    pub fn common_dim(&self) -> Option<usize> {
        let d = self.dims[0];
        self.dims.iter().all(|&x| x == d).then_some(d)
    }

    /// Row-major stride of every party.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = alloc::vec![1usize; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    /// Product of the dimensions of the parties in `mask`.
    pub fn subset_dim(&self, mask: SubsetMask) -> usize {
        mask.indices(self.parties()).map(|k| self.dims[k]).product()
    }

    /// Dimensions of the parties in `mask`, in party order.
    pub fn restrict(&self, mask: SubsetMask) -> Result<HilbertDims> {
        mask.check(self.parties())?;
        let d: Vec<usize> = mask.indices(self.parties()).map(|k| self.dims[k]).collect();
        HilbertDims::new(&d)
    }

    /// Concatenation `self ⊗ other`.
    pub fn concat(&self, other: &HilbertDims) -> Result<HilbertDims> {
        let mut d = self.dims.clone();
        d.extend_from_slice(&other.dims);
        HilbertDims::new(&d)
    }

    /// Mixed-radix digits of a flat index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = alloc::vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        out
    }

    /// Flat index of the given digits.
    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&j, &d)| acc * d + j)
    }

    /// Flat-index offsets of every basis state of the parties in `mask`,
    /// enumerated in the subsystem's own row-major order.
    pub(crate) fn offsets(&self, mask: SubsetMask) -> Vec<usize> {
        let strides = self.strides();
        let mut out = alloc::vec![0usize];
        for k in mask.indices(self.parties()) {
            let mut next = Vec::with_capacity(out.len() * self.dims[k]);
            for &base in &out {
                for j in 0..self.dims[k] {
                    next.push(base + j * strides[k]);
                }
            }
            out = next;
        }
        out
    }

    pub fn full_mask(&self) -> SubsetMask {
        SubsetMask::full(self.parties())
    }
}

impl fmt::Display for HilbertDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// A subset `A` of the parties; bit `k` is set when party `k + 1` is in `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetMask(u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    pub const fn from_bits(bits: u32) -> Self {
        Self(bits)
    }

    /// Builds a mask from 1-based party labels, e.g. `[1, 3]` for parties 1 and 3.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &l in labels {
            if l == 0 || l > MAX_PARTIES {
                return Err(Error::MaskOutOfRange {
                    mask: bits,
                    parties: MAX_PARTIES,
                });
            }
            bits |= 1 << (l - 1);
        }
        Ok(Self(bits))
    }

    /// Mask holding only the party with 0-based index `k`.
    pub const fn single(k: usize) -> Self {
        Self(1 << k)
    }

    pub const fn full(n: usize) -> Self {
        Self(((1u64 << n) - 1) as u32)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Whether the party with 0-based index `k` belongs to the subset.
    pub const fn contains(self, k: usize) -> bool {
        self.0 & (1 << k) != 0
    }

    pub const fn complement(self, n: usize) -> Self {
        Self(Self::full(n).0 ^ self.0)
    }

    pub const fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn intersects(self, other: SubsetMask) -> bool {
        self.0 & other.0 != 0
    }

    pub const fn union(self, other: SubsetMask) -> Self {
        Self(self.0 | other.0)
    }

    /// 0-based party indices in increasing order.
    pub fn indices(self, n: usize) -> impl Iterator<Item = usize> {
        (0..n).filter(move |&k| self.contains(k))
    }

    /// 1-based party labels in increasing order.
    pub fn labels(self, n: usize) -> Vec<usize> {
        self.indices(n).map(|k| k + 1).collect()
    }

    /// `(-1)^{|A|}`.
    pub fn parity_sign(self) -> f64 {
        if self.len().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    pub(crate) fn check(self, n: usize) -> Result<()> {
        if self.0 >> n != 0 {
            return Err(Error::MaskOutOfRange {
                mask: self.0,
                parties: n,
            });
        }
        Ok(())
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for k in 0..32 {
            if self.contains(k) {
                if !first {
                    write!(f, ",")?;
                }
                write!(f, "{}", k + 1)?;
                first = false;
            }
        }
        write!(f, "}}")
    }
}

/// All `2^N - 1` nonempty subsets of `N` parties, in increasing mask order.
pub fn subsets(n: usize) -> Result<Vec<SubsetMask>> {
    if n == 0 || n > MAX_PARTIES {
        return Err(Error::TooManyParties(n));
    }
    Ok((1..(1u32 << n)).map(SubsetMask).collect())
}

/// Nonempty subsets ordered by `(|A|, mask)`.
pub fn subsets_by_size(n: usize) -> Result<Vec<SubsetMask>> {
    let mut v = subsets(n)?;
    v.sort_by_key(|m| (m.len(), m.bits()));
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(1).unwrap(), alloc::vec![SubsetMask(1)]);
        assert_eq!(
            subsets(2).unwrap(),
            alloc::vec![SubsetMask(1), SubsetMask(2), SubsetMask(3)]
        );
        assert_eq!(subsets(4).unwrap().len(), 15);
        assert_eq!(subsets(0), Err(Error::TooManyParties(0)));
        assert_eq!(subsets(17), Err(Error::TooManyParties(17)));
    }

    #[test]
    fn dims_validation() {
        assert!(HilbertDims::new(&[]).is_err());
        assert_eq!(HilbertDims::new(&[2, 1]), Err(Error::BadDimension(1)));
        assert_eq!(
            HilbertDims::new(&[64, 64, 2]),
            Err(Error::DimensionTooLarge(8192))
        );
        let d = HilbertDims::new(&[4, 2, 2, 2]).unwrap();
        assert_eq!(d.total(), 32);
        assert_eq!(d.strides(), alloc::vec![8, 4, 2, 1]);
    }

    #[test]
    fn digit_round_trip() {
        let d = HilbertDims::new(&[3, 2, 4]).unwrap();
        for i in 0..d.total() {
            assert_eq!(d.index(&d.digits(i)), i);
        }
        // party 1 is most significant
        assert_eq!(d.digits(8), alloc::vec![1, 0, 0]);
    }

    #[test]
    fn mask_helpers() {
        let m = SubsetMask::from_labels(&[1, 3]).unwrap();
        assert_eq!(m.bits(), 0b101);
        assert_eq!(m.complement(4).bits(), 0b1010);
        assert_eq!(m.labels(4), alloc::vec![1, 3]);
        assert!(SubsetMask::from_labels(&[0]).is_err());
        let d = HilbertDims::new(&[2, 3, 4]).unwrap();
        assert_eq!(d.subset_dim(m), 8);
        assert_eq!(
            d.offsets(SubsetMask::from_bits(0b010)),
            alloc::vec![0, 4, 8]
        );
    }
}
