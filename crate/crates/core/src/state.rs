use alloc::vec::Vec;

use crate::dims::{HilbertDims, SubsetMask};
use crate::error::{Error, Result};
use crate::linalg::{
    self, hermiticity_defect, max_abs_diff, min_eigenvalue, CMatrix, CVector, C64,
};

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Default absolute tolerance for equality checks on a space of the given
/// total dimension.
pub fn default_tolerance(total_dim: usize) -> f64 {
    if total_dim <= 256 {
        1e-10
    } else {
        1e-9
    }
}

/// Amplitude vector over `H_1 ⊗ ... ⊗ H_N`, party 1 most significant.
///
/// Subnormalized vectors (branch states after a Kraus operator) are allowed;
/// [`PureState::norm`] reports the actual norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: HilbertDims,
    amp: CVector,
}

impl PureState {
    pub fn new(dims: HilbertDims, amp: CVector) -> Result<Self> {
        if amp.len() != dims.total() {
            return Err(Error::ShapeMismatch {
                expected: dims.total(),
                found: amp.len(),
            });
        }
        Ok(Self { dims, amp })
    }

    pub fn from_amplitudes(dims: HilbertDims, amp: &[C64]) -> Result<Self> {
        Self::new(dims, CVector::from_column_slice(amp))
    }

    /// Computational basis state `|j_1 ... j_N>`.
    pub fn basis(dims: HilbertDims, digits: &[usize]) -> Result<Self> {
        if digits.len() != dims.parties() {
            return Err(Error::WrongPartyCount {
                expected: dims.parties(),
                found: digits.len(),
            });
        }
        for (&j, &d) in digits.iter().zip(dims.as_slice()) {
            if j >= d {
                return Err(Error::BadDimension(j));
            }
        }
        let mut amp = CVector::zeros(dims.total());
        amp[dims.index(digits)] = linalg::ONE;
        Ok(Self { dims, amp })
    }

    /// Normalized superposition of the given basis states with real weights.
    pub fn from_terms(dims: HilbertDims, terms: &[(&[usize], f64)]) -> Result<Self> {
        let mut amp = CVector::zeros(dims.total());
        for (digits, w) in terms {
            if digits.len() != dims.parties() {
                return Err(Error::WrongPartyCount {
                    expected: dims.parties(),
                    found: digits.len(),
                });
            }
            amp[dims.index(digits)] += C64::new(*w, 0.0);
        }
        Self { dims, amp }.normalized()
    }

    /// GHZ state `(|0...0> + |1...1>)/sqrt(2)` on `n` qubits.
    pub fn ghz(n: usize) -> Result<Self> {
        let dims = HilbertDims::uniform(2, n)?;
        let zeros = alloc::vec![0usize; n];
        let ones = alloc::vec![1usize; n];
        Self::from_terms(dims, &[(&zeros, 1.0), (&ones, 1.0)])
    }

    pub fn dims(&self) -> &HilbertDims {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amp
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amp
    }

    pub fn norm(&self) -> f64 {
        self.amp.norm()
    }

    pub fn normalized(self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(Self {
            dims: self.dims,
            amp: self.amp.unscale(n),
        })
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            dims: self.dims.clone(),
            amp: self.amp.map(|z| z * factor),
        }
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> CMatrix {
        &self.amp * self.amp.adjoint()
    }

    pub fn to_density(&self) -> DensityOperator {
        let normalized = (self.norm() - 1.0).abs() < default_tolerance(self.dims.total());
        DensityOperator {
            dims: self.dims.clone(),
            mat: self.projector(),
            normalized,
        }
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let dims = self.dims.concat(&other.dims)?;
        Ok(PureState {
            dims,
            amp: linalg::kron_vec(&self.amp, &other.amp),
        })
    }

    /// Amplitudes reshaped to an `N`-way array, flattened in the natural
    /// nested order `amp[j_1][j_2]...[j_N]`.
    pub fn to_tensor(&self) -> Vec<(Vec<usize>, C64)> {
        (0..self.dims.total())
            .map(|i| (self.dims.digits(i), self.amp[i]))
            .collect()
    }

    pub fn from_tensor(dims: HilbertDims, entries: &[(Vec<usize>, C64)]) -> Result<Self> {
        let mut amp = CVector::zeros(dims.total());
        for (digits, z) in entries {
            amp[dims.index(digits)] = *z;
        }
        Self::new(dims, amp)
    }

    /// Recovers the pure state behind a rank-one density operator, up to a
    /// global phase (largest-modulus amplitude made real and positive).
    pub fn from_density(rho: &DensityOperator) -> Result<Self> {
        let tol = default_tolerance(rho.dims().total()).max(1e-9);
        let tr = rho.trace().re;
        if (rho.purity() - tr * tr).abs() > tol {
            return Err(Error::PureStateRequired);
        }
        let (values, vectors) = linalg::hermitian_eigen(rho.matrix());
        let n = values.len();
        let lead = vectors.column(n - 1).into_owned();
        let (_, pivot) =
            lead.iter()
                .enumerate()
                .fold((0.0, C64::new(1.0, 0.0)), |(best, z), (_, &a)| {
                    if a.norm() > best {
                        (a.norm(), a)
                    } else {
                        (best, z)
                    }
                });
        let phase = pivot.conj() / pivot.norm();
        let scale = values[n - 1].max(0.0).sqrt();
        Self::new(rho.dims().clone(), lead.map(|a| a * phase * scale))
    }

    /// Reduced state on `keep`.
    pub fn marginal(&self, keep: SubsetMask) -> Result<DensityOperator> {
        self.to_density().partial_trace(keep)
    }
}

/// Complex square operator on `H_1 ⊗ ... ⊗ H_N`.
///
/// `normalized == true` marks a physical state (Hermitian, PSD, unit trace);
/// unnormalized operators such as tilde states skip the trace check.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dims: HilbertDims,
    mat: CMatrix,
    normalized: bool,
}

impl DensityOperator {
    /// Validated physical state.
    pub fn new(dims: HilbertDims, mat: CMatrix) -> Result<Self> {
        Self::check_shape(&dims, &mat)?;
        let tol = default_tolerance(dims.total());
        let herm = hermiticity_defect(&mat);
        if herm > tol {
            return Err(Error::NotHermitian(herm));
        }
        let tr = linalg::trace(&mat);
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::NotNormalized(tr.re));
        }
        let min = min_eigenvalue(&mat);
        if min < -tol {
            return Err(Error::NotPositive(min));
        }
        Ok(Self {
            dims,
            mat,
            normalized: true,
        })
    }

    /// Unvalidated operator, carried with `normalized = false`.
    pub fn from_raw(dims: HilbertDims, mat: CMatrix) -> Result<Self> {
        Self::check_shape(&dims, &mat)?;
        Ok(Self {
            dims,
            mat,
            normalized: false,
        })
    }

    fn check_shape(dims: &HilbertDims, mat: &CMatrix) -> Result<()> {
        linalg::ensure_square(mat)?;
        if mat.nrows() != dims.total() {
            return Err(Error::ShapeMismatch {
                expected: dims.total(),
                found: mat.nrows(),
            });
        }
        Ok(())
    }

    pub fn maximally_mixed(dims: HilbertDims) -> Self {
        let n = dims.total();
        let mat = CMatrix::identity(n, n).unscale(n as f64);
        Self {
            dims,
            mat,
            normalized: true,
        }
    }

    pub fn dims(&self) -> &HilbertDims {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.mat)
    }

    /// `Re Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        linalg::trace_of_product(&self.mat, &self.mat).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.mat)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.mat).0
    }

    /// `Tr_{Ā} rho`, retained parties in their original order.
    pub fn partial_trace(&self, keep: SubsetMask) -> Result<DensityOperator> {
        let dims = self.dims.restrict(keep)?;
        let mat = linalg::partial_trace(&self.mat, &self.dims, keep)?;
        Ok(Self {
            dims,
            mat,
            normalized: self.normalized,
        })
    }

    pub fn linear_entropy(&self) -> f64 {
        2.0 * (1.0 - self.purity())
    }

    /// `U rho U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<DensityOperator> {
        if u.nrows() != self.dims.total() || u.ncols() != self.dims.total() {
            return Err(Error::ShapeMismatch {
                expected: self.dims.total(),
                found: u.nrows(),
            });
        }
        let mat = u * &self.mat * u.adjoint();
        Ok(Self {
            dims: self.dims.clone(),
            mat,
            normalized: self.normalized,
        })
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let dims = self.dims.concat(&other.dims)?;
        Ok(Self {
            dims,
            mat: linalg::kron(&self.mat, &other.mat),
            normalized: self.normalized && other.normalized,
        })
    }

    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        max_abs_diff(&self.mat, &other.mat)
    }
}

/// `tau = 2 (1 - Tr rho^2)` of a square matrix.
pub fn linear_entropy(rho: &CMatrix) -> Result<f64> {
    linalg::ensure_square(rho).map_err(|_| Error::ShapeMismatch {
        expected: rho.nrows(),
        found: rho.ncols(),
    })?;
    Ok(2.0 * (1.0 - linalg::trace_of_product(rho, rho).re))
}

/// `Tr_{Ā} rho` as a free function.
pub fn partial_trace(rho: &DensityOperator, keep: SubsetMask) -> Result<DensityOperator> {
    rho.partial_trace(keep)
}
