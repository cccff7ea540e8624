//! Dense complex linear algebra shared by every module.

use alloc::vec::Vec;

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::dims::{HilbertDims, SubsetMask};
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::NotSquare(r, c));
    }
    Ok(r)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues (ascending) and matching orthonormal eigenvector columns of
/// the Hermitian part of `m`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(0.0)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// `Tr_{Ā} m` for an operator `m` on the space described by `dims`.
pub fn partial_trace(m: &CMatrix, dims: &HilbertDims, keep: SubsetMask) -> Result<CMatrix> {
    keep.check(dims.parties())?;
    if keep.is_empty() {
        return Err(Error::EmptySubset);
    }
    let traced = keep.complement(dims.parties());
    let ok = dims.offsets(keep);
    let ot = dims.offsets(traced);
    let n = ok.len();
    let mut out = CMatrix::zeros(n, n);
    for (a, &ra) in ok.iter().enumerate() {
        for (b, &cb) in ok.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &ot {
                acc += m[(ra + t, cb + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Places `op` (acting on the parties in `mask`, in party order) on the full
/// space as `op ⊗ 1` on the complement. An empty mask is read as a scalar
/// `op[(0,0)]` times the identity.
pub fn embed(op: &CMatrix, dims: &HilbertDims, mask: SubsetMask) -> Result<CMatrix> {
    mask.check(dims.parties())?;
    let os = dims.offsets(mask);
    let expected = os.len();
    if op.nrows() != expected || op.ncols() != expected {
        return Err(Error::ShapeMismatch {
            expected,
            found: op.nrows(),
        });
    }
    let orest = dims.offsets(mask.complement(dims.parties()));
    let n = dims.total();
    let mut out = CMatrix::zeros(n, n);
    for &t in &orest {
        for (a, &ra) in os.iter().enumerate() {
            for (b, &cb) in os.iter().enumerate() {
                out[(ra + t, cb + t)] = op[(a, b)];
            }
        }
    }
    Ok(out)
}

/// `exp(-i h t)` for Hermitian `h`, via its eigendecomposition.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let (values, v) = hermitian_eigen(h);
    let phases = CVector::from_iterator(
        values.len(),
        values.iter().map(|&e| C64::from_polar(1.0, -e * t)),
    );
    let scaled = CMatrix::from_fn(v.nrows(), v.ncols(), |r, col| v[(r, col)] * phases[col]);
    scaled * v.adjoint()
}

/// `Tr(a b)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Recursive pairwise summation of `count` terms produced by `term`, in a
/// fixed tree order.
pub(crate) fn pairwise_sum<F>(count: usize, n: usize, term: &F) -> CMatrix
where
    F: Fn(usize) -> CMatrix,
{
    fn go<F: Fn(usize) -> CMatrix>(lo: usize, hi: usize, n: usize, term: &F) -> CMatrix {
        match hi - lo {
            0 => CMatrix::zeros(n, n),
            1 => term(lo),
            len => {
                let mid = lo + len / 2;
                go(lo, mid, n, term) + go(mid, hi, n, term)
            }
        }
    }
    go(0, count, n, term)
}
