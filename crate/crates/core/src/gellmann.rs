//! Generalized Gell-Mann generators normalized to `Tr(h_j h_k) = d δ_jk`,
//! with the identity at index 0, and the SWAP / maximally-entangled-state
//! identities built on them.

use alloc::boxed::Box;
use alloc::vec::Vec;

use once_cell::race::OnceBox;

use num_traits::Float;

use crate::dims::HilbertDims;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, C64, ONE, ZERO};
use crate::state::PureState;

pub const MAX_GENERATOR_DIM: usize = 64;

/// Nonzero entry `(row, col, value)` of a generator.
pub type Entry = (usize, usize, C64);

#[derive(Debug, Clone, PartialEq)]
pub struct GellMannBasis {
    d: usize,
    h: Vec<CMatrix>,
    nonzeros: Vec<Vec<Entry>>,
}

/// Which family a single-index generator belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    Identity,
    X { k: usize, l: usize },
    Y { k: usize, l: usize },
    Z { l: usize },
}

impl GeneratorKind {
    /// Decodes a single index into its family.
    pub fn of_index(j: usize) -> GeneratorKind {
        if j == 0 {
            return GeneratorKind::Identity;
        }
        let l = j.isqrt();
        let offset = j - l * l;
        if offset == 2 * l {
            GeneratorKind::Z { l }
        } else if offset.is_multiple_of(2) {
            GeneratorKind::X { k: offset / 2, l }
        } else {
            GeneratorKind::Y { k: offset / 2, l }
        }
    }
}

pub const fn index_x(k: usize, l: usize) -> usize {
    l * l + 2 * k
}

pub const fn index_y(k: usize, l: usize) -> usize {
    l * l + 2 * k + 1
}

pub const fn index_z(l: usize) -> usize {
    l * l + 2 * l
}

impl GellMannBasis {
    pub fn new(d: usize) -> Result<Self> {
        if !(2..=MAX_GENERATOR_DIM).contains(&d) {
            return Err(Error::BadDimension(d));
        }
        let df = d as f64;
        let s = Float::sqrt(df / 2.0);
        let mut h = alloc::vec![CMatrix::zeros(d, d); d * d];
        h[0] = CMatrix::identity(d, d);
        for l in 1..d {
            for k in 0..l {
                let x = &mut h[index_x(k, l)];
                x[(k, l)] = c(s, 0.0);
                x[(l, k)] = c(s, 0.0);
                let y = &mut h[index_y(k, l)];
                y[(k, l)] = c(0.0, -s);
                y[(l, k)] = c(0.0, s);
            }
            let lf = l as f64;
            let norm = Float::sqrt(df / (lf * (lf + 1.0)));
            let z = &mut h[index_z(l)];
            for j in 0..l {
                z[(j, j)] = c(norm, 0.0);
            }
            z[(l, l)] = c(-lf * norm, 0.0);
        }
        let nonzeros = h.iter().map(sparse_entries).collect();
        Ok(Self { d, h, nonzeros })
    }

    /// Shared immutable basis for dimension `d`, built on first use.
    pub fn cached(d: usize) -> Result<&'static GellMannBasis> {
        static CACHE: [OnceBox<GellMannBasis>; MAX_GENERATOR_DIM + 1] =
            [const { OnceBox::new() }; MAX_GENERATOR_DIM + 1];
        if !(2..=MAX_GENERATOR_DIM).contains(&d) {
            return Err(Error::BadDimension(d));
        }
        Ok(CACHE[d].get_or_init(|| Box::new(Self::new(d).expect("dimension checked"))))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of matrices, `d^2`.
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn h(&self, j: usize) -> &CMatrix {
        &self.h[j]
    }

    pub fn iter(&self) -> impl Iterator<Item = &CMatrix> {
        self.h.iter()
    }

    pub fn x(&self, k: usize, l: usize) -> &CMatrix {
        assert!(k < l && l < self.d);
        &self.h[index_x(k, l)]
    }

    pub fn y(&self, k: usize, l: usize) -> &CMatrix {
        assert!(k < l && l < self.d);
        &self.h[index_y(k, l)]
    }

    pub fn z(&self, l: usize) -> &CMatrix {
        assert!(0 < l && l < self.d);
        &self.h[index_z(l)]
    }

    /// Nonzero entries of `h_j`.
    pub fn nonzeros(&self, j: usize) -> &[Entry] {
        &self.nonzeros[j]
    }

    /// All pairs `k < l`, in the order `(0,1), (0,2), (1,2), (0,3), ...`.
    pub fn antisymmetric_pairs(&self) -> Vec<(usize, usize)> {
        (1..self.d)
            .flat_map(|l| (0..l).map(move |k| (k, l)))
            .collect()
    }

    /// Expansion coefficients `Tr(h_j A)`, so that `A = (1/d) Σ_j a_j h_j`.
    pub fn expand(&self, a: &CMatrix) -> Result<Vec<C64>> {
        self.check(a)?;
        Ok(self
            .nonzeros
            .iter()
            .map(|nz| nz.iter().map(|&(r, col, v)| v * a[(col, r)]).sum())
            .collect())
    }

    /// `(1/d) Σ_j a_j h_j`.
    pub fn reconstruct(&self, coeffs: &[C64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.d, self.d);
        for (nz, &a) in self.nonzeros.iter().zip(coeffs) {
            for &(r, col, v) in nz {
                out[(r, col)] += a * v;
            }
        }
        out.unscale(self.d as f64)
    }

    /// Copy with `eps` added to entry `(0,0)` of `h_j`. Negative control for
    /// the identity checks; never used in computations.
    #[doc(hidden)]
    pub fn perturbed(&self, j: usize, eps: f64) -> GellMannBasis {
        let mut out = self.clone();
        out.h[j][(0, 0)] += c(eps, 0.0);
        out.nonzeros[j] = sparse_entries(&out.h[j]);
        out
    }

    fn check(&self, a: &CMatrix) -> Result<()> {
        if a.nrows() != self.d || a.ncols() != self.d {
            return Err(Error::ShapeMismatch {
                expected: self.d,
                found: a.nrows(),
            });
        }
        Ok(())
    }
}

fn sparse_entries(m: &CMatrix) -> Vec<Entry> {
    let mut out = Vec::new();
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            if m[(r, col)] != ZERO {
                out.push((r, col, m[(r, col)]));
            }
        }
    }
    out
}

pub fn build_basis(d: usize) -> Result<GellMannBasis> {
    GellMannBasis::new(d)
}

/// `SWAP = Σ_jk |jk><kj|` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> Result<CMatrix> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let mut s = CMatrix::zeros(d * d, d * d);
    for j in 0..d {
        for k in 0..d {
            s[(j * d + k, k * d + j)] = ONE;
        }
    }
    Ok(s)
}

/// `(1/d) Σ_j h_j ⊗ h_j`.
pub fn swap_from_generators(basis: &GellMannBasis) -> CMatrix {
    let mut out = CMatrix::zeros(basis.d * basis.d, basis.d * basis.d);
    for h in basis.iter() {
        out += h.kronecker(h);
    }
    out.unscale(basis.d as f64)
}

/// `(1/d) Σ_j h_jᵀ ⊗ h_j`.
pub fn swap_transposed_from_generators(basis: &GellMannBasis) -> CMatrix {
    let mut out = CMatrix::zeros(basis.d * basis.d, basis.d * basis.d);
    for h in basis.iter() {
        out += h.transpose().kronecker(h);
    }
    out.unscale(basis.d as f64)
}

/// Partial transpose on the first factor of an operator on `C^d ⊗ C^d`.
pub fn partial_transpose_first(m: &CMatrix, d: usize) -> CMatrix {
    let n = d * d;
    CMatrix::from_fn(n, n, |r, col| {
        let (i, a) = (r / d, r % d);
        let (j, b) = (col / d, col % d);
        m[(j * d + a, i * d + b)]
    })
}

/// `Tr_[1]` of an operator on `C^d ⊗ C^d`.
pub fn trace_first(m: &CMatrix, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |a, b| (0..d).map(|i| m[(i * d + a, i * d + b)]).sum())
}

/// `|Φ+> = (1/sqrt d) Σ_j |jj>`.
pub fn maximally_entangled(d: usize) -> Result<PureState> {
    let dims = HilbertDims::new(&[d, d])?;
    let amp: Vec<C64> = (0..d * d)
        .map(|i| if i / d == i % d { ONE } else { ZERO })
        .collect();
    PureState::from_amplitudes(dims, &amp)?.normalized()
}

/// `(1/d) Σ_k h_k A h_k`, which equals `Tr(A) 1`.
pub fn trace_identity(a: &CMatrix, basis: &GellMannBasis) -> Result<CMatrix> {
    basis.check(a)?;
    let mut out = CMatrix::zeros(basis.d, basis.d);
    for h in basis.iter() {
        out += h * a * h;
    }
    Ok(out.unscale(basis.d as f64))
}

/// `(1/d) Σ_k h_kᵀ A h_k`, which equals `Aᵀ`.
pub fn transpose_identity(a: &CMatrix, basis: &GellMannBasis) -> Result<CMatrix> {
    basis.check(a)?;
    let mut out = CMatrix::zeros(basis.d, basis.d);
    for h in basis.iter() {
        out += h.transpose() * a * h;
    }
    Ok(out.unscale(basis.d as f64))
}

/// Max residuals of the generator identities for one basis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IdentityResiduals {
    /// `Tr(h_j h_k) = d δ_jk`.
    pub normalization: f64,
    /// `(1/d) Σ h A h = Tr(A) 1`, over the samples.
    pub trace: f64,
    /// `(1/d) Σ hᵀ A h = Aᵀ`, over the samples.
    pub transpose: f64,
    /// `(1/d) Σ h ⊗ h = SWAP`.
    pub swap: f64,
    /// `SWAP^{T_1} = d |Φ+><Φ+| = (1/d) Σ hᵀ ⊗ h`.
    pub bell_swap: f64,
}

pub fn identity_residuals(basis: &GellMannBasis, samples: &[CMatrix]) -> Result<IdentityResiduals> {
    let d = basis.d;
    let mut out = IdentityResiduals::default();
    for (j, hj) in basis.iter().enumerate() {
        for (k, hk) in basis.iter().enumerate() {
            let expected = if j == k { d as f64 } else { 0.0 };
            let t = linalg::trace_of_product(hj, hk);
            out.normalization = out.normalization.max((t - c(expected, 0.0)).norm());
        }
    }
    for a in samples {
        let tr = CMatrix::identity(d, d) * linalg::trace(a);
        out.trace = out
            .trace
            .max(linalg::max_abs_diff(&trace_identity(a, basis)?, &tr));
        let tt = transpose_identity(a, basis)?;
        out.transpose = out.transpose.max(linalg::max_abs_diff(&tt, &a.transpose()));
    }
    let swap = swap_operator(d)?;
    out.swap = linalg::max_abs_diff(&swap_from_generators(basis), &swap);
    let phi = maximally_entangled(d)?.projector() * c(d as f64, 0.0);
    out.bell_swap = linalg::max_abs_diff(&partial_transpose_first(&swap, d), &phi).max(
        linalg::max_abs_diff(&swap_transposed_from_generators(basis), &phi),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, max_abs_diff, trace, I};

    #[test]
    fn qubit_basis_is_pauli() {
        let b = build_basis(2).unwrap();
        let s1 = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        let s2 = CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
        let s3 = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        assert!(max_abs_diff(b.h(1), &s1) < 1e-15);
        assert!(max_abs_diff(b.h(2), &s2) < 1e-15);
        assert!(max_abs_diff(b.h(3), &s3) < 1e-15);
    }

    #[test]
    fn qutrit_orthonormality() {
        let b = build_basis(3).unwrap();
        for j in 0..9 {
            for k in 0..9 {
                let t = trace(&(b.h(j) * b.h(k)));
                let expected = if j == k { 3.0 } else { 0.0 };
                assert!((t - c(expected, 0.0)).norm() < 1e-12, "pair ({j},{k})");
            }
        }
    }

    #[test]
    fn antisymmetric_count() {
        let b = build_basis(4).unwrap();
        let antisym = b
            .iter()
            .filter(|h| max_abs(&(h.transpose() + *h)) < 1e-15)
            .count();
        assert_eq!(antisym, 6);
        assert_eq!(b.antisymmetric_pairs().len(), 6);
    }

    #[test]
    fn index_decoding() {
        assert_eq!(GeneratorKind::of_index(0), GeneratorKind::Identity);
        assert_eq!(GeneratorKind::of_index(1), GeneratorKind::X { k: 0, l: 1 });
        assert_eq!(GeneratorKind::of_index(2), GeneratorKind::Y { k: 0, l: 1 });
        assert_eq!(GeneratorKind::of_index(3), GeneratorKind::Z { l: 1 });
        assert_eq!(GeneratorKind::of_index(6), GeneratorKind::X { k: 1, l: 2 });
        assert_eq!(GeneratorKind::of_index(8), GeneratorKind::Z { l: 2 });
    }

    #[test]
    fn bad_dimension() {
        assert_eq!(build_basis(1), Err(Error::BadDimension(1)));
        assert_eq!(build_basis(65), Err(Error::BadDimension(65)));
        assert!(GellMannBasis::cached(0).is_err());
        let a = GellMannBasis::cached(3).unwrap();
        let b = GellMannBasis::cached(3).unwrap();
        assert!(core::ptr::eq(a, b));
    }

    #[test]
    fn qubit_swap() {
        let s = swap_operator(2).unwrap();
        assert_eq!(s[(1, 2)], ONE);
        assert_eq!(s[(2, 1)], ONE);
        assert_eq!(s[(0, 0)], ONE);
        assert_eq!(s[(3, 3)], ONE);
        assert_eq!(s[(1, 1)], ZERO);
    }

    #[test]
    fn trace_and_transpose_small_cases() {
        let b = build_basis(2).unwrap();
        let id = CMatrix::identity(2, 2);
        assert!(max_abs_diff(&trace_identity(&id, &b).unwrap(), &id.scale(2.0)) < 1e-15);
        let mut e01 = CMatrix::zeros(2, 2);
        e01[(0, 1)] = ONE;
        assert!(max_abs(&trace_identity(&e01, &b).unwrap()) < 1e-15);
        let y = b.y(0, 1).clone();
        assert!(max_abs_diff(&transpose_identity(&y, &b).unwrap(), &(-y)) < 1e-15);
        assert!(trace_identity(&CMatrix::zeros(3, 3), &b).is_err());
    }

    #[test]
    fn bell_amplitudes() {
        let phi = maximally_entangled(2).unwrap();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        let a = phi.amplitudes();
        assert!((a[0].re - r).abs() < 1e-15 && (a[3].re - r).abs() < 1e-15);
        assert_eq!(a[1], ZERO);
    }

    #[test]
    fn identity_residuals_small_and_perturbation_detected() {
        let mut rng = crate::random::rng_from_seed(1);
        let samples: Vec<CMatrix> = (0..5)
            .map(|_| crate::random::ginibre(3, 3, &mut rng))
            .collect();
        let b = build_basis(3).unwrap();
        let r = identity_residuals(&b, &samples).unwrap();
        for v in [r.normalization, r.trace, r.transpose, r.swap, r.bell_swap] {
            assert!(v < 1e-12, "{r:?}");
        }
        let bad = identity_residuals(&b.perturbed(1, 1e-6), &samples).unwrap();
        assert!(bad.normalization > 1e-7);
    }
}
