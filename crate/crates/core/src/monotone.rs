//! Two-outcome local channels on the first party and the monotonicity
//! conditions for `C_D` and `C_D²` they induce.
//!
//! A pure state is split as `ψ = Σ_j |e_j>|f_j>` along an orthonormal basis
//! `{e_j}` of party 1 that diagonalizes `A_1†A_1 = diag(D)`. The pair weights
//! `F_jkkj = <f_j| (|f_k><f_k|)~ |f_j>` then give
//! `C_D(ψ)² = 2 Σ F_jkkj` and `C_D(A_1 ψ)² = 2 Σ F_jkkj D_j D_k`.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use nalgebra::DMatrix;

use crate::correlation::{cd_squared_trace_form, distributed_concurrence};
use crate::dims::{HilbertDims, SubsetMask};
use crate::error::{Error, Result};
use crate::inversion::invert_generators_matrix;
use crate::linalg::{hermitian_eigen, CMatrix, CVector, C64, ZERO};
use crate::state::PureState;

pub type RMatrix = DMatrix<f64>;

/// Deficits below `-VIOLATION_THRESHOLD` count as violations.
pub const VIOLATION_THRESHOLD: f64 = 1e-8;

/// Basis of party 1 in which a channel is diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelFrame {
    /// Eigenbasis of `ρ_1`, weights descending.
    Schmidt,
    Computational,
}

/// Kraus pair `A_1 = diag(sqrt D)`, `A_2 = diag(sqrt(1 - D))` on party 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoOutcomeChannel {
    diag: Vec<f64>,
    frame: ChannelFrame,
}

impl TwoOutcomeChannel {
    pub fn new(diag: Vec<f64>, frame: ChannelFrame) -> Result<Self> {
        if diag.len() < 2 {
            return Err(Error::BadDimension(diag.len()));
        }
        if let Some(&bad) = diag.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::InvalidChannel(bad));
        }
        Ok(Self { diag, frame })
    }

    pub fn schmidt(diag: Vec<f64>) -> Result<Self> {
        Self::new(diag, ChannelFrame::Schmidt)
    }

    pub fn computational(diag: Vec<f64>) -> Result<Self> {
        Self::new(diag, ChannelFrame::Computational)
    }

    pub fn d1(&self) -> usize {
        self.diag.len()
    }

    /// `D_j`, the eigenvalues of `A_1†A_1`.
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// `1 - D_j`, the eigenvalues of `A_2†A_2`.
    pub fn complement(&self) -> Vec<f64> {
        self.diag.iter().map(|d| 1.0 - d).collect()
    }

    pub fn frame(&self) -> ChannelFrame {
        self.frame
    }

    /// `max_j |D_j + (1 - D_j) - 1|`.
    pub fn completeness_defect(&self) -> f64 {
        self.diag
            .iter()
            .zip(self.complement())
            .fold(0.0f64, |acc, (d, e)| acc.max((d + e - 1.0).abs()))
    }

    /// `(A_1, A_2)` as `d1 × d1` matrices in the computational basis, given
    /// the frame basis (columns `e_j`).
    pub fn kraus(&self, basis: &CMatrix) -> (CMatrix, CMatrix) {
        let build = |weights: &[f64]| {
            let scaled = CMatrix::from_fn(basis.nrows(), basis.ncols(), |r, c| {
                basis[(r, c)] * weights[c].sqrt()
            });
            scaled * basis.adjoint()
        };
        (build(&self.diag), build(&self.complement()))
    }
}

/// Schmidt decomposition of party 1 against the rest:
/// `ψ = Σ_j sqrt(λ_j) |e_j> |f̄_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    /// Descending, length `d_1`.
    pub lambdas: Vec<f64>,
    /// Columns `e_j`.
    pub basis: CMatrix,
    /// Subnormalized `f_j = sqrt(λ_j) f̄_j`.
    pub env: Vec<CVector>,
    pub env_dims: HilbertDims,
}

impl SchmidtDecomposition {
    /// Normalized `f̄_j`, when `λ_j` is nonzero.
    pub fn fbar(&self, j: usize) -> Option<CVector> {
        (self.lambdas[j] > 1e-14).then(|| self.env[j].unscale(self.lambdas[j].sqrt()))
    }

    /// `max |ψ - Σ_j e_j ⊗ f_j|`.
    pub fn reconstruction_residual(&self, psi: &PureState) -> f64 {
        let rebuilt = compose_first_party(&self.basis, &self.env);
        (psi.amplitudes() - rebuilt)
            .iter()
            .fold(0.0f64, |a, z| a.max(z.norm()))
    }
}

fn env_dims(psi: &PureState) -> Result<HilbertDims> {
    let dims = psi.dims();
    if dims.parties() < 2 {
        return Err(Error::WrongPartyCount {
            expected: 2,
            found: dims.parties(),
        });
    }
    HilbertDims::new(&dims.as_slice()[1..])
}

/// `f_j = (<e_j| ⊗ 1) ψ` for the basis columns `e_j`.
pub fn split_first_party(psi: &PureState, basis: &CMatrix) -> Result<Vec<CVector>> {
    let d1 = psi.dims().dim(0);
    let env = psi.dims().total() / d1;
    if basis.nrows() != d1 || basis.ncols() != d1 {
        return Err(Error::ShapeMismatch {
            expected: d1,
            found: basis.nrows(),
        });
    }
    let amp = psi.amplitudes();
    Ok((0..d1)
        .map(|j| {
            CVector::from_fn(env, |t, _| {
                (0..d1)
                    .map(|a| basis[(a, j)].conj() * amp[a * env + t])
                    .sum()
            })
        })
        .collect())
}

/// `Σ_j e_j ⊗ f_j`.
pub fn compose_first_party(basis: &CMatrix, env: &[CVector]) -> CVector {
    let d1 = basis.nrows();
    let n = env.first().map_or(0, |v| v.len());
    CVector::from_fn(d1 * n, |i, _| {
        let (a, t) = (i / n, i % n);
        env.iter()
            .enumerate()
            .map(|(j, f)| basis[(a, j)] * f[t])
            .sum()
    })
}

pub fn schmidt_first_party(psi: &PureState) -> Result<SchmidtDecomposition> {
    let env_dims = env_dims(psi)?;
    let rho1 = psi.to_density().partial_trace(SubsetMask::single(0))?;
    let (values, vectors) = hermitian_eigen(rho1.matrix());
    let d1 = values.len();
    let basis = CMatrix::from_fn(d1, d1, |r, c| vectors[(r, d1 - 1 - c)]);
    let lambdas = (0..d1).map(|j| values[d1 - 1 - j].max(0.0)).collect();
    let env = split_first_party(psi, &basis)?;
    Ok(SchmidtDecomposition {
        lambdas,
        basis,
        env,
        env_dims,
    })
}

/// `F_klmj = <f_k| (|f_l><f_m|)~ |f_j>` with the antilinear inverter.
#[derive(Debug, Clone, PartialEq)]
pub struct FTensor {
    r: usize,
    values: Vec<C64>,
}

impl FTensor {
    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn get(&self, k: usize, l: usize, m: usize, j: usize) -> C64 {
        let r = self.r;
        self.values[((k * r + l) * r + m) * r + j]
    }

    /// Real matrix `W[j][k] = F_jkkj`.
    pub fn pair_matrix(&self) -> RMatrix {
        RMatrix::from_fn(self.r, self.r, |j, k| self.get(j, k, k, j).re)
    }

    /// `max |F_klmj + F_lkmj|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        self.max_over(|t, k, l, m, j| (t.get(k, l, m, j) + t.get(l, k, m, j)).norm())
    }

    /// `max |F_klmj - F_lkjm|`.
    pub fn symmetry_residual(&self) -> f64 {
        self.max_over(|t, k, l, m, j| (t.get(k, l, m, j) - t.get(l, k, j, m)).norm())
    }

    fn max_over<F: Fn(&Self, usize, usize, usize, usize) -> f64>(&self, f: F) -> f64 {
        let r = self.r;
        let mut worst = 0.0f64;
        for k in 0..r {
            for l in 0..r {
                for m in 0..r {
                    for j in 0..r {
                        worst = worst.max(f(self, k, l, m, j));
                    }
                }
            }
        }
        worst
    }
}

fn check_vectors(f: &[CVector], env_dims: &HilbertDims) -> Result<()> {
    for v in f {
        if v.len() != env_dims.total() {
            return Err(Error::InconsistentVectors {
                expected: env_dims.total(),
                found: v.len(),
            });
        }
    }
    Ok(())
}

pub fn f_tensor(f: &[CVector], env_dims: &HilbertDims) -> Result<FTensor> {
    check_vectors(f, env_dims)?;
    let r = f.len();
    let mut values = alloc::vec![ZERO; r * r * r * r];
    for l in 0..r {
        for m in 0..r {
            let outer = &f[l] * f[m].adjoint();
            let tilde = invert_generators_matrix(&outer, env_dims)?;
            for k in 0..r {
                let left = f[k].adjoint() * &tilde;
                for j in 0..r {
                    values[((k * r + l) * r + m) * r + j] = (&left * &f[j])[(0, 0)];
                }
            }
        }
    }
    Ok(FTensor { r, values })
}

/// Only the slice `F_jkkj`, using `r` inversions instead of `r²`.
pub fn f_pair_matrix(f: &[CVector], env_dims: &HilbertDims) -> Result<RMatrix> {
    check_vectors(f, env_dims)?;
    let r = f.len();
    let mut w = RMatrix::zeros(r, r);
    for k in 0..r {
        let tilde = invert_generators_matrix(&(&f[k] * f[k].adjoint()), env_dims)?;
        for j in 0..r {
            w[(j, k)] = (f[j].adjoint() * &tilde * &f[j])[(0, 0)].re;
        }
    }
    Ok(w)
}

/// Outcome of one monotonicity check.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub deficit: f64,
    pub violated: bool,
    pub p1: f64,
    pub p2: f64,
    /// `C_D` of the normalized branch states (0 for empty branches).
    pub branch_cd: [f64; 2],
    /// Deficit evaluated from the pair weights and `D`.
    pub f_route_deficit: f64,
    /// `|deficit - f_route_deficit|`.
    pub route_residual: f64,
}

struct Branches {
    cd2_psi: f64,
    cd2: [f64; 2],
    p: [f64; 2],
    weights: RMatrix,
    diag: Vec<f64>,
}

fn branches(psi: &PureState, ch: &TwoOutcomeChannel) -> Result<Branches> {
    let d1 = psi.dims().dim(0);
    if ch.d1() != d1 {
        return Err(Error::ShapeMismatch {
            expected: d1,
            found: ch.d1(),
        });
    }
    let env_dims = env_dims(psi)?;
    let basis = match ch.frame() {
        ChannelFrame::Schmidt => schmidt_first_party(psi)?.basis,
        ChannelFrame::Computational => CMatrix::identity(d1, d1),
    };
    let f = split_first_party(psi, &basis)?;
    let (a1, a2) = ch.kraus(&basis);
    let env = env_dims.total();
    let apply = |a: &CMatrix| {
        let full = a.kronecker(&CMatrix::identity(env, env));
        PureState::new(psi.dims().clone(), full * psi.amplitudes()).expect("same dims")
    };
    let b1 = apply(&a1);
    let b2 = apply(&a2);
    Ok(Branches {
        cd2_psi: cd_squared_trace_form(psi),
        cd2: [cd_squared_trace_form(&b1), cd_squared_trace_form(&b2)],
        p: [b1.norm() * b1.norm(), b2.norm() * b2.norm()],
        weights: f_pair_matrix(&f, &env_dims)?,
        diag: ch.diag().to_vec(),
    })
}

fn quadratic(w: &RMatrix, x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for j in 0..x.len() {
        for k in 0..x.len() {
            acc += w[(j, k)] * x[j] * x[k];
        }
    }
    acc
}

fn ratio(num: f64, p: f64) -> f64 {
    if p > 0.0 {
        num / p
    } else {
        0.0
    }
}

fn sqrt0(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

/// `C_D(ψ) ≥ C_D(A_1ψ) + C_D(A_2ψ)`.
pub fn monotone_deficit_cd(psi: &PureState, ch: &TwoOutcomeChannel) -> Result<MonotoneVerdict> {
    let b = branches(psi, ch)?;
    let lhs = sqrt0(b.cd2_psi);
    let rhs = sqrt0(b.cd2[0]) + sqrt0(b.cd2[1]);
    let s: f64 = b.weights.iter().sum();
    let comp: Vec<f64> = b.diag.iter().map(|d| 1.0 - d).collect();
    let f_lhs = sqrt0(2.0 * s);
    let f_rhs =
        sqrt0(2.0 * quadratic(&b.weights, &b.diag)) + sqrt0(2.0 * quadratic(&b.weights, &comp));
    Ok(verdict(lhs, rhs, f_lhs - f_rhs, &b, |cd2, p| {
        ratio(sqrt0(cd2), p)
    }))
}

/// `C_D²(ψ) ≥ C_D²(A_1ψ)/p_1 + C_D²(A_2ψ)/p_2`.
pub fn monotone_deficit_cd2(psi: &PureState, ch: &TwoOutcomeChannel) -> Result<MonotoneVerdict> {
    let b = branches(psi, ch)?;
    let lhs = b.cd2_psi;
    let rhs = ratio(b.cd2[0], b.p[0]) + ratio(b.cd2[1], b.p[1]);
    let s: f64 = b.weights.iter().sum();
    let comp: Vec<f64> = b.diag.iter().map(|d| 1.0 - d).collect();
    let f_lhs = 2.0 * s;
    let f_rhs = ratio(2.0 * quadratic(&b.weights, &b.diag), b.p[0])
        + ratio(2.0 * quadratic(&b.weights, &comp), b.p[1]);
    Ok(verdict(lhs, rhs, f_lhs - f_rhs, &b, |cd2, p| {
        ratio(sqrt0(cd2), p)
    }))
}

fn verdict<F: Fn(f64, f64) -> f64>(
    lhs: f64,
    rhs: f64,
    f_route_deficit: f64,
    b: &Branches,
    branch: F,
) -> MonotoneVerdict {
    let deficit = lhs - rhs;
    MonotoneVerdict {
        lhs,
        rhs,
        deficit,
        violated: deficit < -VIOLATION_THRESHOLD,
        p1: b.p[0],
        p2: b.p[1],
        branch_cd: [branch(b.cd2[0], b.p[0]), branch(b.cd2[1], b.p[1])],
        f_route_deficit,
        route_residual: (deficit - f_route_deficit).abs(),
    }
}

/// `(Σ w_jk D_j)² - Σ w_jk D_j D_k`; negative means the `C_D` monotone
/// condition fails for these weights.
pub fn mon3_check(w: &RMatrix, d: &[f64]) -> Result<f64> {
    let r = d.len();
    if w.nrows() != r || w.ncols() != r {
        return Err(Error::ShapeMismatch {
            expected: r,
            found: w.nrows(),
        });
    }
    let asym = (0..r)
        .flat_map(|j| (0..r).map(move |k| (j, k)))
        .fold(0.0f64, |a, (j, k)| a.max((w[(j, k)] - w[(k, j)]).abs()));
    if asym > 1e-12 {
        return Err(Error::AsymmetricWeights(asym));
    }
    let total: f64 = w.iter().sum();
    let diag_ok = (0..r).all(|j| w[(j, j)].abs() <= 1e-12);
    if !diag_ok || w.iter().any(|&x| x < -1e-12) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidWeights);
    }
    if let Some(&bad) = d.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::InvalidChannel(bad));
    }
    Ok(mon3_margin(w, d))
}

/// Unchecked [`mon3_check`].
pub fn mon3_margin(w: &RMatrix, d: &[f64]) -> f64 {
    let r = d.len();
    let mut m = 0.0;
    for j in 0..r {
        for k in 0..r {
            m += w[(j, k)] * d[j];
        }
    }
    m * m - quadratic(w, d)
}

/// `w_jk = F_jkkj / Σ F`, or `None` when the sum vanishes.
pub fn normalized_weights(pairs: &RMatrix) -> Option<RMatrix> {
    let s: f64 = pairs.iter().sum();
    (s > 0.0).then(|| pairs / s)
}

/// `1 - a/p_1 - b/p_2` with `a = Σ w D D`, `b = Σ w (1-D)(1-D)` and
/// `p_1 = Σ λ_j D_j`: the `C_D²` deficit divided by `C_D²(ψ)`.
pub fn cd2_margin(w: &RMatrix, lambdas: &[f64], d: &[f64]) -> f64 {
    let comp: Vec<f64> = d.iter().map(|x| 1.0 - x).collect();
    let p1: f64 = lambdas.iter().zip(d).map(|(l, x)| l * x).sum();
    let p2: f64 = lambdas.iter().zip(&comp).map(|(l, x)| l * x).sum();
    1.0 - ratio(quadratic(w, d), p1) - ratio(quadratic(w, &comp), p2)
}

/// Four-party state on dims `(4,2,2,2)` violating both monotone conditions,
/// with the channel `diag(1,1,0,0)` / `diag(0,0,1,1)` on party 1.
pub fn builtin_counterexample() -> (PureState, TwoOutcomeChannel) {
    let dims = HilbertDims::new(&[4, 2, 2, 2]).expect("valid dims");
    let psi = PureState::from_terms(
        dims,
        &[
            (&[0, 0, 0, 0], 1.0),
            (&[0, 0, 1, 1], 1.0),
            (&[1, 1, 0, 0], 1.0),
            (&[1, 1, 1, 1], 1.0),
            (&[2, 0, 0, 0], 1.0),
            (&[2, 0, 1, 1], -1.0),
            (&[3, 1, 0, 0], -1.0),
            (&[3, 1, 1, 1], 1.0),
        ],
    )
    .expect("nonzero state");
    let ch = TwoOutcomeChannel::computational(alloc::vec![1.0, 1.0, 0.0, 0.0]).expect("valid");
    (psi, ch)
}

/// `C_D` of a possibly subnormalized branch state.
pub fn branch_cd(psi: &PureState) -> f64 {
    distributed_concurrence(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gellmann::maximally_entangled;
    use crate::random::{random_pure, rng_from_seed};
    use rand::Rng;

    #[test]
    fn schmidt_examples() {
        let prod = PureState::basis(HilbertDims::new(&[2, 2]).unwrap(), &[0, 0]).unwrap();
        let s = schmidt_first_party(&prod).unwrap();
        assert!((s.lambdas[0] - 1.0).abs() < 1e-14 && s.lambdas[1].abs() < 1e-14);
        let bell = maximally_entangled(2).unwrap();
        let s = schmidt_first_party(&bell).unwrap();
        assert!(s.lambdas.iter().all(|l| (l - 0.5).abs() < 1e-14));
        let (psi, _) = builtin_counterexample();
        let s = schmidt_first_party(&psi).unwrap();
        assert!(s.lambdas.iter().all(|l| (l - 0.25).abs() < 1e-14));
        assert!(s.reconstruction_residual(&psi) < 1e-14);
    }

    #[test]
    fn schmidt_vectors_are_orthonormal() {
        let psi = random_pure(&HilbertDims::new(&[3, 2, 3]).unwrap(), 5);
        let s = schmidt_first_party(&psi).unwrap();
        assert!((s.lambdas.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(s.lambdas.windows(2).all(|w| w[0] >= w[1]));
        let f: Vec<CVector> = (0..3).map(|j| s.fbar(j).unwrap()).collect();
        for j in 0..3 {
            for k in 0..3 {
                let ip = f[j].dotc(&f[k]);
                let e = if j == k { 1.0 } else { 0.0 };
                assert!((ip.re - e).abs() < 1e-10 && ip.im.abs() < 1e-10);
            }
        }
        assert!(s.reconstruction_residual(&psi) < 1e-12);
    }

    #[test]
    fn single_party_rejected() {
        let psi = random_pure(&HilbertDims::new(&[3]).unwrap(), 1);
        assert!(matches!(
            schmidt_first_party(&psi),
            Err(Error::WrongPartyCount { .. })
        ));
    }

    #[test]
    fn f_tensor_two_party_closed_form() {
        // one remaining party: F_jkkj = |f_j|²|f_k|² - |<f_j|f_k>|²
        let env = HilbertDims::new(&[3]).unwrap();
        let mut rng = rng_from_seed(2);
        let f: Vec<CVector> = (0..3)
            .map(|_| CVector::from_fn(3, |_, _| crate::random::complex_gaussian(&mut rng) * 0.3))
            .collect();
        let t = f_tensor(&f, &env).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let expected =
                    f[j].norm_squared() * f[k].norm_squared() - f[j].dotc(&f[k]).norm_sqr();
                assert!((t.get(j, k, k, j).re - expected).abs() < 1e-12);
            }
        }
        assert!(t.antisymmetry_residual() < 1e-12);
        assert!(t.symmetry_residual() < 1e-12);
        let w = f_pair_matrix(&f, &env).unwrap();
        assert!((w - t.pair_matrix()).amax() < 1e-12);
    }

    #[test]
    fn f_tensor_orthonormal_scaled() {
        let env = HilbertDims::new(&[4]).unwrap();
        let lambdas = [0.4, 0.3, 0.2, 0.1];
        let f: Vec<CVector> = (0..4)
            .map(|j| {
                let mut v = CVector::zeros(4);
                v[j] = C64::new(lambdas[j], 0.0).sqrt();
                v
            })
            .collect();
        let w = f_tensor(&f, &env).unwrap().pair_matrix();
        for j in 0..4 {
            for k in 0..4 {
                let e = if j == k { 0.0 } else { lambdas[j] * lambdas[k] };
                assert!((w[(j, k)] - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn f_tensor_rejects_bad_vectors() {
        let env = HilbertDims::new(&[2, 2]).unwrap();
        let f = alloc::vec![CVector::zeros(4), CVector::zeros(3)];
        assert!(matches!(
            f_tensor(&f, &env),
            Err(Error::InconsistentVectors { .. })
        ));
    }

    #[test]
    fn bell_is_monotone_for_any_channel() {
        let bell = maximally_entangled(2).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let ch = TwoOutcomeChannel::schmidt(alloc::vec![rng.random(), rng.random()]).unwrap();
            let v = monotone_deficit_cd(&bell, &ch).unwrap();
            assert!(v.deficit >= -1e-10 && v.route_residual < 1e-9);
            let v2 = monotone_deficit_cd2(&bell, &ch).unwrap();
            assert!(v2.deficit >= -1e-10 && v2.route_residual < 1e-9);
            assert!((v.p1 + v.p2 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_channel_has_zero_deficit() {
        let psi = random_pure(&HilbertDims::new(&[3, 3, 2, 2]).unwrap(), 6);
        let ch = TwoOutcomeChannel::schmidt(alloc::vec![1.0; 3]).unwrap();
        let v = monotone_deficit_cd(&psi, &ch).unwrap();
        assert!(v.deficit.abs() < 1e-12);
        assert_eq!(v.p2, 0.0);
        assert_eq!(v.branch_cd[1], 0.0);
    }

    #[test]
    fn counterexample_verdicts() {
        let (psi, ch) = builtin_counterexample();
        assert!((psi.norm() - 1.0).abs() < 1e-15);
        let v = monotone_deficit_cd(&psi, &ch).unwrap();
        assert!((v.lhs - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((v.rhs - 1.0).abs() < 1e-12);
        assert!(v.violated);
        assert!((v.p1 - 0.5).abs() < 1e-14 && (v.p2 - 0.5).abs() < 1e-14);
        assert!((v.branch_cd[0] - 1.0).abs() < 1e-12 && (v.branch_cd[1] - 1.0).abs() < 1e-12);
        assert!(v.route_residual < 1e-9);
        let v2 = monotone_deficit_cd2(&psi, &ch).unwrap();
        assert!((v2.lhs - 0.5).abs() < 1e-12 && (v2.rhs - 1.0).abs() < 1e-12);
        assert!(v2.violated && v2.route_residual < 1e-9);
    }

    #[test]
    fn channel_validation_and_completeness() {
        assert_eq!(
            TwoOutcomeChannel::schmidt(alloc::vec![0.5, 1.5]),
            Err(Error::InvalidChannel(1.5))
        );
        let ch = TwoOutcomeChannel::schmidt(alloc::vec![0.1, 0.7, 0.3]).unwrap();
        assert!(ch.completeness_defect() < 1e-15);
        let basis = crate::random::random_unitary(3, &mut rng_from_seed(4));
        let (a1, a2) = ch.kraus(&basis);
        let sum = a1.adjoint() * &a1 + a2.adjoint() * &a2;
        assert!(crate::linalg::max_abs_diff(&sum, &CMatrix::identity(3, 3)) < 1e-14);
    }

    #[test]
    fn mon3_cases() {
        // pairs (0,1) and (2,3) only; D = (1,1,0,0)
        let mut w = RMatrix::zeros(4, 4);
        for (j, k) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            w[(j, k)] = 0.25;
        }
        let m = mon3_check(&w, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((m + 0.25).abs() < 1e-15);
        let mut asym = w.clone();
        asym[(0, 1)] = 0.3;
        assert!(matches!(
            mon3_check(&asym, &[0.0; 4]),
            Err(Error::AsymmetricWeights(_))
        ));
        let mut q = RMatrix::zeros(2, 2);
        q[(0, 1)] = 0.5;
        q[(1, 0)] = 0.5;
        let mut rng = rng_from_seed(5);
        for _ in 0..1000 {
            let d = [rng.random::<f64>(), rng.random::<f64>()];
            assert!(mon3_check(&q, &d).unwrap() >= -1e-12);
        }
    }
}
