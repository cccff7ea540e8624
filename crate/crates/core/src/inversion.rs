//! Universal state inversion `ρ ↦ ρ̃` in four equivalent forms: the factor-wise
//! product, the alternating subset sum, the antilinear generator sum and the
//! Bloch-form expression for equal local dimensions.
//!
//! Tilde operators are never renormalized; `Tr ρ̃ = Π_k (d_k - 1) Tr ρ`.

use alloc::vec::Vec;

use num_traits::Float;

use crate::dims::{HilbertDims, SubsetMask};
use crate::error::{Error, Result};
use crate::gellmann::GellMannBasis;
use crate::linalg::{self, pairwise_sum, trace, CMatrix, C64, ZERO};
use crate::state::DensityOperator;

/// Single-system inverter: `Tr(O) 1 - O`, or `Tr(O†) 1 - O†` when
/// `hermitian` is false.
pub fn invert_single(o: &CMatrix, hermitian: bool) -> Result<CMatrix> {
    let n = linalg::ensure_square(o)?;
    let base = if hermitian { o.clone() } else { o.adjoint() };
    let tr = trace(&base);
    Ok(CMatrix::identity(n, n) * tr - base)
}

/// Linear map `Π_X (Tr_X(·) ⊗ 1_X - 1)` applied to an arbitrary operator.
pub fn invert_product_matrix(o: &CMatrix, dims: &HilbertDims) -> Result<CMatrix> {
    check_operator(o, dims)?;
    let strides = dims.strides();
    let mut m = o.clone();
    for (k, &s) in strides.iter().enumerate() {
        let d = dims.dim(k);
        let rest = dims.offsets(SubsetMask::single(k).complement(dims.parties()));
        let mut out = -&m;
        for &ra in &rest {
            for &cb in &rest {
                let t: C64 = (0..d).map(|j| m[(ra + j * s, cb + j * s)]).sum();
                for i in 0..d {
                    out[(ra + i * s, cb + i * s)] += t;
                }
            }
        }
        m = out;
    }
    Ok(m)
}

/// Product form of the inverter.
pub fn invert_product(rho: &DensityOperator) -> DensityOperator {
    let m = invert_product_matrix(rho.matrix(), rho.dims()).expect("shape checked on construction");
    DensityOperator::from_raw(rho.dims().clone(), m).expect("shape preserved")
}

/// Alternating sum over all subsets `A` (including `∅` and the full set) of
/// `(-1)^{|A|} (Tr_Ā ρ) ⊗ 1_Ā`.
pub fn invert_subsets(rho: &DensityOperator) -> DensityOperator {
    let dims = rho.dims();
    let n = dims.total();
    let mut out = CMatrix::identity(n, n) * rho.trace();
    for a in 1..=SubsetMask::full(dims.parties()).bits() {
        let a = SubsetMask::from_bits(a);
        let reduced = linalg::partial_trace(rho.matrix(), dims, a).expect("mask in range");
        let sign = a.parity_sign();
        let ok = dims.offsets(a);
        let orest = dims.offsets(a.complement(dims.parties()));
        for &t in &orest {
            for (i, &ri) in ok.iter().enumerate() {
                for (j, &cj) in ok.iter().enumerate() {
                    out[(ri + t, cj + t)] += reduced[(i, j)] * sign;
                }
            }
        }
    }
    DensityOperator::from_raw(dims.clone(), out).expect("shape preserved")
}

/// One nonzero row of a tensor product of antisymmetric generators:
/// `Y[row, partner] = value`.
#[derive(Clone, Copy)]
pub(crate) struct YEntry {
    pub(crate) row: usize,
    pub(crate) partner: usize,
    pub(crate) value: C64,
}

/// Support of `y_{k_1 l_1} ⊗ ... ⊗ y_{k_N l_N}`, ordered so that the entry at
/// position `b` has partner at position `!b` (within `2^N` bits).
pub(crate) fn y_tensor_support(dims: &HilbertDims, pairs: &[(usize, usize)]) -> Vec<YEntry> {
    let n = dims.parties();
    let strides = dims.strides();
    let mut out = Vec::with_capacity(1 << n);
    for choice in 0..(1usize << n) {
        let mut row = 0;
        let mut partner = 0;
        let mut value = C64::new(1.0, 0.0);
        for p in 0..n {
            let (k, l) = pairs[p];
            let s = Float::sqrt(dims.dim(p) as f64 / 2.0);
            // bit set: row digit is l, otherwise k (bit n-1-p so party 1 leads)
            let high = choice >> (n - 1 - p) & 1 == 1;
            let (r, c, v) = if high {
                (l, k, C64::new(0.0, s))
            } else {
                (k, l, C64::new(0.0, -s))
            };
            row += r * strides[p];
            partner += c * strides[p];
            value *= v;
        }
        out.push(YEntry {
            row,
            partner,
            value,
        });
    }
    out
}

/// Every choice of one pair `k < l` per party, party 1 slowest.
pub(crate) fn pair_choices(dims: &HilbertDims) -> Vec<Vec<(usize, usize)>> {
    let mut out: Vec<Vec<(usize, usize)>> = alloc::vec![Vec::new()];
    for &d in dims.as_slice() {
        let pairs: Vec<(usize, usize)> = (1..d).flat_map(|l| (0..l).map(move |k| (k, l))).collect();
        let mut next = Vec::with_capacity(out.len() * pairs.len());
        for prefix in &out {
            for &p in &pairs {
                let mut v = prefix.clone();
                v.push(p);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Antilinear generator form `(2^N/d_tot) Σ_{k<l} y_kl O* y_kl` for any
/// operator `O`, conjugating entrywise in the computational basis.
///
/// For non-Hermitian `O` this equals the composition of the single-system
/// maps `Tr(O†) 1 - O†`.
pub fn invert_generators_matrix(o: &CMatrix, dims: &HilbertDims) -> Result<CMatrix> {
    check_operator(o, dims)?;
    let n = dims.total();
    let choices = pair_choices(dims);
    let prefactor = (1u64 << dims.parties()) as f64 / n as f64;
    let mask = (1usize << dims.parties()) - 1;
    let term = |t: usize| {
        let support = y_tensor_support(dims, &choices[t]);
        let mut m = CMatrix::zeros(n, n);
        for ea in &support {
            for (b, eb) in support.iter().enumerate() {
                // Y[partner_b, row_b]: the entry whose row is eb.partner
                let back = support[!b & mask].value;
                m[(ea.row, eb.row)] += ea.value * o[(ea.partner, eb.partner)].conj() * back;
            }
        }
        m
    };
    Ok(pairwise_sum(choices.len(), n, &term) * C64::new(prefactor, 0.0))
}

/// Generator form of the inverter.
pub fn invert_generators(rho: &DensityOperator) -> DensityOperator {
    let m = invert_generators_matrix(rho.matrix(), rho.dims()).expect("shape checked");
    DensityOperator::from_raw(rho.dims().clone(), m).expect("shape preserved")
}

/// Antilinear inverter built from the product form: `Π_X(...)` applied to `O†`.
pub fn invert_nonhermitian(o: &CMatrix, dims: &HilbertDims) -> Result<CMatrix> {
    invert_product_matrix(&o.adjoint(), dims)
}

fn check_operator(o: &CMatrix, dims: &HilbertDims) -> Result<()> {
    let n = linalg::ensure_square(o)?;
    if n != dims.total() {
        return Err(Error::ShapeMismatch {
            expected: dims.total(),
            found: n,
        });
    }
    Ok(())
}

/// Coefficients `r_{j_1...j_N} = Tr(ρ g_{j_1} ⊗ ... ⊗ g_{j_N})` with the
/// generators normalized to `Tr(g_j g_k) = d δ_jk` and `g_0 = 1`, so that
/// `ρ = (1/d_tot) Σ r_J g_J`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochDecomposition {
    dims: HilbertDims,
    coeffs: Vec<C64>,
}

impl BlochDecomposition {
    pub fn dims(&self) -> &HilbertDims {
        &self.dims
    }

    /// All coefficients, multi-index flattened with party 1 most significant
    /// and radix `d_k^2`.
    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coefficient(&self, index: &[usize]) -> C64 {
        self.coeffs[self.flat(index)]
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let n = self.dims.parties();
        let mut out = alloc::vec![0; n];
        for k in (0..n).rev() {
            let r = self.dims.dim(k) * self.dims.dim(k);
            out[k] = flat % r;
            flat /= r;
        }
        out
    }

    fn flat(&self, index: &[usize]) -> usize {
        index
            .iter()
            .zip(self.dims.as_slice())
            .fold(0, |acc, (&j, &d)| acc * d * d + j)
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imaginary(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |a, z| a.max(z.im.abs()))
    }

    /// `(1/d_tot) Σ_J r_J g_J`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dims.total();
        let mut out = CMatrix::zeros(n, n);
        for (flat, &r) in self.coeffs.iter().enumerate() {
            if r == ZERO {
                continue;
            }
            for_each_entry(&self.dims, &self.multi_index(flat), |row, col, v| {
                out[(row, col)] += r * v;
            });
        }
        out.unscale(n as f64)
    }

    /// `P_q`: the sum of `r_J g_J` over multi-indices with exactly `q`
    /// nontrivial generators. `P_0 = r_0 1`. Needs equal local dimensions.
    pub fn grouped(&self, q: usize) -> Result<CMatrix> {
        self.dims.common_dim().ok_or(Error::UnequalDims)?;
        let n = self.dims.total();
        let mut out = CMatrix::zeros(n, n);
        for (flat, &r) in self.coeffs.iter().enumerate() {
            let idx = self.multi_index(flat);
            if idx.iter().filter(|&&j| j != 0).count() != q || r == ZERO {
                continue;
            }
            for_each_entry(&self.dims, &idx, |row, col, v| {
                out[(row, col)] += r * v;
            });
        }
        Ok(out)
    }
}

/// Calls `f(row, col, value)` for every nonzero entry of
/// `g_{j_1} ⊗ ... ⊗ g_{j_N}`.
fn for_each_entry<F: FnMut(usize, usize, C64)>(dims: &HilbertDims, index: &[usize], mut f: F) {
    let bases: Vec<&GellMannBasis> = dims
        .as_slice()
        .iter()
        .map(|&d| GellMannBasis::cached(d).expect("dims validated"))
        .collect();
    #[allow(clippy::too_many_arguments)]
    fn rec<F: FnMut(usize, usize, C64)>(
        p: usize,
        bases: &[&GellMannBasis],
        dims: &HilbertDims,
        index: &[usize],
        row: usize,
        col: usize,
        val: C64,
        f: &mut F,
    ) {
        if p == index.len() {
            f(row, col, val);
            return;
        }
        let d = dims.dim(p);
        for &(r, c, v) in bases[p].nonzeros(index[p]) {
            rec(
                p + 1,
                bases,
                dims,
                index,
                row * d + r,
                col * d + c,
                val * v,
                f,
            );
        }
    }
    rec(0, &bases, dims, index, 0, 0, C64::new(1.0, 0.0), &mut f);
}

/// Bloch coefficients of `ρ`. Unequal local dimensions are allowed here;
/// only [`BlochDecomposition::grouped`] requires them equal.
pub fn bloch_decompose(rho: &DensityOperator) -> BlochDecomposition {
    let dims = rho.dims().clone();
    let count: usize = dims.as_slice().iter().map(|d| d * d).product();
    let mut out = BlochDecomposition {
        dims,
        coeffs: alloc::vec![ZERO; count],
    };
    let m = rho.matrix();
    for flat in 0..count {
        let idx = out.multi_index(flat);
        let mut acc = ZERO;
        for_each_entry(&out.dims, &idx, |row, col, v| acc += v * m[(col, row)]);
        out.coeffs[flat] = acc;
    }
    out
}

/// `ρ̃ = (1/d^N) Σ_q (-1)^q (d-1)^{N-q} P_q` for equal local dimensions `d`.
pub fn invert_bloch(b: &BlochDecomposition) -> Result<DensityOperator> {
    let d = b.dims.common_dim().ok_or(Error::UnequalDims)?;
    let n = b.dims.parties();
    let mut out = CMatrix::zeros(b.dims.total(), b.dims.total());
    for q in 0..=n {
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        let weight = sign * ((d - 1) as f64).powi((n - q) as i32);
        out += b.grouped(q)? * C64::new(weight, 0.0);
    }
    let scale = (d as f64).powi(n as i32);
    DensityOperator::from_raw(b.dims.clone(), out.unscale(scale))
}

/// `Tr(ρ ρ̃)` including its (round-off) imaginary part.
pub fn tr_rho_rhotilde_complex(rho: &DensityOperator) -> C64 {
    linalg::trace_of_product(rho.matrix(), invert_product(rho).matrix())
}

/// `Tr(ρ ρ̃)`, nonnegative for every positive `ρ`.
pub fn tr_rho_rhotilde(rho: &DensityOperator) -> f64 {
    tr_rho_rhotilde_complex(rho).re
}

/// `Π_k (d_k - 1)`, the trace of the tilde of a unit-trace operator.
pub fn tilde_trace_factor(dims: &HilbertDims) -> f64 {
    dims.as_slice().iter().map(|&d| (d - 1) as f64).product()
}
