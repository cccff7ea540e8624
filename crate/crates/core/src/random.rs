//! Seeded random states, unitaries and Hamiltonians.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dims::HilbertDims;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, CMatrix, CVector, C64};
use crate::state::{DensityOperator, PureState};

/// The generator used by every seeded routine in the crate.
pub type StdRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> StdRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random pure state: i.i.d. complex Gaussian amplitudes, normalized.
pub fn random_pure_with<R: Rng + ?Sized>(dims: &HilbertDims, rng: &mut R) -> PureState {
    let amp = CVector::from_fn(dims.total(), |_, _| complex_gaussian(rng));
    let n = amp.norm();
    PureState::new(dims.clone(), amp.unscale(n)).expect("length matches dims")
}

pub fn random_pure(dims: &HilbertDims, seed: u64) -> PureState {
    random_pure_with(dims, &mut rng_from_seed(seed))
}

/// Marginal of a Haar-random pure state on `dims ⊗ C^rank`.
pub fn random_mixed_with<R: Rng + ?Sized>(
    dims: &HilbertDims,
    rank: usize,
    rng: &mut R,
) -> Result<DensityOperator> {
    if rank == 0 {
        return Err(Error::BadDimension(0));
    }
    // rows: system index, columns: ancilla index (least significant)
    let g = ginibre(dims.total(), rank, rng);
    let norm2: f64 = g.iter().map(|z| z.norm_sqr()).sum();
    let mut mat = &g * g.adjoint();
    mat.unscale_mut(norm2);
    DensityOperator::new(dims.clone(), hermitian_part(&mat))
}

pub fn random_mixed(dims: &HilbertDims, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_mixed_with(dims, rank, &mut rng_from_seed(seed))
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(n, n, rng).qr();
    let (q, r) = qr.unpack();
    CMatrix::from_fn(n, n, |row, col| {
        let d = r[(col, col)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        q[(row, col)] * phase
    })
}

/// Random Hermitian matrix `(G + G†)/2` with Ginibre `G`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    hermitian_part(&ginibre(n, n, rng))
}

/// `U_1 ⊗ ... ⊗ U_N` with independent Haar factors.
pub fn random_local_unitary<R: Rng + ?Sized>(dims: &HilbertDims, rng: &mut R) -> CMatrix {
    let mut u = CMatrix::identity(1, 1);
    for &d in dims.as_slice() {
        u = u.kronecker(&random_unitary(d, rng));
    }
    u
}

/// Uniform point on the probability simplex with `n` vertices.
pub fn dirichlet_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> alloc::vec::Vec<f64> {
    let mut v: alloc::vec::Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(rand_distr::Exp1))
        .collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}
