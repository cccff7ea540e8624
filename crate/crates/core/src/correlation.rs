//! Concurrence-type invariants and the linear-entropy relations between a
//! state and all of its marginals.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::dims::{subsets, subsets_by_size, HilbertDims, SubsetMask};
use crate::error::{Error, Result};
use crate::inversion::{invert_product_matrix, pair_choices, tr_rho_rhotilde, y_tensor_support};
use crate::linalg::{self, embed, expm_hermitian, hermiticity_defect, CMatrix, C64};
use crate::state::{default_tolerance, DensityOperator, PureState};

/// `sqrt(2 - Tr ρ_A² - Tr ρ_Ā²)` for a pure state and a proper split `A|Ā`.
pub fn concurrence_bipartite(psi: &PureState, split: SubsetMask) -> Result<f64> {
    Ok(concurrence_sq(psi, split)?.max(0.0).sqrt())
}

fn concurrence_sq(psi: &PureState, split: SubsetMask) -> Result<f64> {
    let n = psi.dims().parties();
    split.check(n)?;
    let rest = split.complement(n);
    if split.is_empty() || rest.is_empty() {
        return Err(Error::EmptySubset);
    }
    let rho = psi.to_density();
    let pa = rho.partial_trace(split)?.purity();
    let pb = rho.partial_trace(rest)?.purity();
    Ok(2.0 - pa - pb)
}

/// Like [`concurrence_bipartite`] for a density operator, which must be pure.
pub fn concurrence_bipartite_density(rho: &DensityOperator, split: SubsetMask) -> Result<f64> {
    concurrence_bipartite(&PureState::from_density(rho)?, split)
}

/// `Tr(Π Π̃)` from the product-form inverter.
pub fn cd_squared_trace_form(psi: &PureState) -> f64 {
    let pi = psi.projector();
    let tilde = invert_product_matrix(&pi, psi.dims()).expect("projector matches dims");
    let a = psi.amplitudes();
    (a.adjoint() * tilde * a)[(0, 0)].re
}

/// `(-1)^N (2^N/d_tot) Σ_{k<l} |<ψ*| y_kl |ψ>|²`.
pub fn cd_squared_generator_form(psi: &PureState) -> f64 {
    let dims = psi.dims();
    let a = psi.amplitudes();
    let n = dims.parties();
    let mut sum = 0.0;
    for pairs in pair_choices(dims) {
        let overlap: C64 = y_tensor_support(dims, &pairs)
            .iter()
            .map(|e| a[e.row] * e.value * a[e.partner])
            .sum();
        sum += overlap.norm_sqr();
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (1u64 << n) as f64 / dims.total() as f64 * sum
}

/// Distributed concurrence `C_D = sqrt(Tr(Π Π̃))`, evaluated with the
/// generator form, which vanishes exactly for an odd number of parties.
///
/// Homogeneous of degree two: `C_D(αψ) = |α|² C_D(ψ)`.
pub fn distributed_concurrence(psi: &PureState) -> f64 {
    cd_squared_generator_form(psi).max(0.0).sqrt()
}

/// Both routes to `C_D`, as `(trace form, generator form)`.
pub fn distributed_concurrence_routes(psi: &PureState) -> (f64, f64) {
    (
        cd_squared_trace_form(psi).max(0.0).sqrt(),
        cd_squared_generator_form(psi).max(0.0).sqrt(),
    )
}

/// `max |Π Π̃ Π - C_D² Π|`.
pub fn projector_identity_residual(psi: &PureState) -> f64 {
    let pi = psi.projector();
    let tilde = invert_product_matrix(&pi, psi.dims()).expect("projector matches dims");
    let lhs = &pi * tilde * &pi;
    let cd2 = cd_squared_trace_form(psi);
    linalg::max_abs_diff(&lhs, &(pi * C64::new(cd2, 0.0)))
}

/// Linear entropy of the marginal on `mask`.
pub fn tau(rho: &DensityOperator, mask: SubsetMask) -> Result<f64> {
    Ok(rho.partial_trace(mask)?.linear_entropy())
}

/// Linear entropies `τ_A` of every nonempty subset together with `Tr(ρρ̃)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyLedger {
    dims: HilbertDims,
    entries: BTreeMap<SubsetMask, f64>,
    tr_rho_rhotilde: f64,
}

impl EntropyLedger {
    /// Assembles a ledger from independently computed entries. Every
    /// nonempty subset must be present.
    pub fn from_parts(
        dims: HilbertDims,
        entries: BTreeMap<SubsetMask, f64>,
        tr_rho_rhotilde: f64,
    ) -> Result<Self> {
        let expected = (1usize << dims.parties()) - 1;
        if entries.len() != expected || entries.keys().any(|m| m.is_empty()) {
            return Err(Error::ShapeMismatch {
                expected,
                found: entries.len(),
            });
        }
        Ok(Self {
            dims,
            entries,
            tr_rho_rhotilde,
        })
    }

    pub fn dims(&self) -> &HilbertDims {
        &self.dims
    }

    pub fn tau(&self, mask: SubsetMask) -> Option<f64> {
        self.entries.get(&mask).copied()
    }

    pub fn tr_rho_rhotilde(&self) -> f64 {
        self.tr_rho_rhotilde
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in increasing mask order.
    pub fn iter(&self) -> impl Iterator<Item = (SubsetMask, f64)> + '_ {
        self.entries.iter().map(|(&m, &t)| (m, t))
    }

    /// Entries ordered by `(|A|, mask)`.
    pub fn by_size(&self) -> Vec<(SubsetMask, f64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by_key(|(m, _)| (m.len(), m.bits()));
        v
    }

    /// `Σ_{|A|>0} (-1)^{|A|+1} τ_A`.
    pub fn alternating_sum(&self) -> f64 {
        self.iter().map(|(m, t)| -m.parity_sign() * t).sum()
    }

    /// `|2 Tr(ρρ̃) - Σ (-1)^{|A|+1} τ_A|`.
    pub fn residual(&self) -> f64 {
        (2.0 * self.tr_rho_rhotilde - self.alternating_sum()).abs()
    }
}

pub fn entropy_ledger(rho: &DensityOperator) -> Result<EntropyLedger> {
    let masks = subsets(rho.dims().parties())?;
    let mut entries = BTreeMap::new();
    for m in masks {
        entries.insert(m, tau(rho, m)?);
    }
    EntropyLedger::from_parts(rho.dims().clone(), entries, tr_rho_rhotilde(rho))
}

/// Both sides of `2 Tr(ρρ̃) = Σ_{|A|>0} (-1)^{|A|+1} τ_A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedEquality {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

pub fn verify_mixed_equality(rho: &DensityOperator) -> Result<MixedEquality> {
    let ledger = entropy_ledger(rho)?;
    Ok(mixed_equality_from_ledger(&ledger))
}

pub fn mixed_equality_from_ledger(ledger: &EntropyLedger) -> MixedEquality {
    let lhs = 2.0 * ledger.tr_rho_rhotilde();
    let rhs = ledger.alternating_sum();
    MixedEquality {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    }
}

/// One row of a monogamy table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonogamyTerm {
    pub mask: SubsetMask,
    pub size: usize,
    pub tau: f64,
    /// `(-1)^{|A|+1}`.
    pub sign: f64,
}

/// Pure-state monogamy relation `2 C_D² = Σ_{N>|A|>0} (-1)^{|A|+1} C²_{A|Ā}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonogamyReport {
    pub cd_squared: f64,
    /// Generator-form value of `C_D²`, kept as a cross-check.
    pub cd_squared_generators: f64,
    pub alternating_sum: f64,
    pub residual: f64,
    /// All nonempty subsets, ordered by `(|A|, mask)`.
    pub terms: Vec<MonogamyTerm>,
}

impl MonogamyReport {
    pub fn cd(&self) -> f64 {
        self.cd_squared_generators.max(0.0).sqrt()
    }
}

pub fn monogamy_report(psi: &PureState) -> Result<MonogamyReport> {
    let n = psi.dims().parties();
    let rho = psi.to_density();
    let mut terms = Vec::new();
    let mut alternating_sum = 0.0;
    for m in subsets_by_size(n)? {
        let t = tau(&rho, m)?;
        let sign = -m.parity_sign();
        if m.len() < n {
            alternating_sum += sign * concurrence_sq(psi, m)?;
        }
        terms.push(MonogamyTerm {
            mask: m,
            size: m.len(),
            tau: t,
            sign,
        });
    }
    let cd_squared = cd_squared_trace_form(psi);
    Ok(MonogamyReport {
        cd_squared,
        cd_squared_generators: cd_squared_generator_form(psi),
        alternating_sum,
        residual: (2.0 * cd_squared - alternating_sum).abs(),
        terms,
    })
}

/// `(τ_A + τ_B + τ_C + τ_ABC) - (τ_AB + τ_AC + τ_BC)` for three parties.
pub fn three_party_inequality(rho: &DensityOperator) -> Result<f64> {
    let n = rho.dims().parties();
    if n != 3 {
        return Err(Error::WrongPartyCount {
            expected: 3,
            found: n,
        });
    }
    let mut margin = 0.0;
    for m in subsets(3)? {
        margin -= m.parity_sign() * tau(rho, m)?;
    }
    Ok(margin)
}

/// Subsets entering the conserved combination for dynamics on `s`: every
/// nonempty `A` with `S ⊆ A` or `S ∩ A = ∅`, paired with `(-1)^{|A|}`.
pub fn conservation_terms(n: usize, s: SubsetMask) -> Result<Vec<(SubsetMask, f64)>> {
    s.check(n)?;
    if s.is_empty() {
        return Err(Error::EmptySubset);
    }
    Ok(subsets_by_size(n)?
        .into_iter()
        .filter(|a| s.is_subset_of(*a) || !s.intersects(*a))
        .map(|a| (a, a.parity_sign()))
        .collect())
}

/// `Σ (-1)^{|A|} τ_A` over the subsets of [`conservation_terms`]; invariant
/// under any unitary acting on `s` alone.
pub fn conservation_combination(rho: &DensityOperator, s: SubsetMask) -> Result<f64> {
    let mut acc = 0.0;
    for (a, sign) in conservation_terms(rho.dims().parties(), s)? {
        acc += sign * tau(rho, a)?;
    }
    Ok(acc)
}

/// `U ρ U†` with `U = exp(-i H t)` acting on the parties in `s`.
pub fn evolve_subsystem(
    rho: &DensityOperator,
    s: SubsetMask,
    h: &CMatrix,
    t: f64,
) -> Result<DensityOperator> {
    let u = subsystem_propagator(rho.dims(), s, h, t)?;
    rho.conjugate_by(&u)
}

/// Full-space propagator `exp(-i H t) ⊗ 1` for a Hamiltonian on `s`.
pub fn subsystem_propagator(
    dims: &HilbertDims,
    s: SubsetMask,
    h: &CMatrix,
    t: f64,
) -> Result<CMatrix> {
    s.check(dims.parties())?;
    if s.is_empty() {
        return Err(Error::EmptySubset);
    }
    let n = linalg::ensure_square(h)?;
    let expected = dims.subset_dim(s);
    if n != expected {
        return Err(Error::ShapeMismatch { expected, found: n });
    }
    let scale = linalg::max_abs(h).max(1.0);
    let defect = hermiticity_defect(h);
    if defect > default_tolerance(n) * scale {
        return Err(Error::NotHermitian(defect));
    }
    embed(&expm_hermitian(h, t), dims, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gellmann::maximally_entangled;
    use crate::random::{random_mixed, random_pure};

    fn dims(d: &[usize]) -> HilbertDims {
        HilbertDims::new(d).unwrap()
    }

    #[test]
    fn bipartite_concurrence_examples() {
        let bell = maximally_entangled(2).unwrap();
        let a = SubsetMask::from_bits(1);
        assert!((concurrence_bipartite(&bell, a).unwrap() - 1.0).abs() < 1e-14);
        let prod = PureState::basis(dims(&[2, 2]), &[0, 0]).unwrap();
        assert!(concurrence_bipartite(&prod, a).unwrap().abs() < 1e-7);
        let qutrits = maximally_entangled(3).unwrap();
        let expected = (4.0f64 / 3.0).sqrt();
        assert!((concurrence_bipartite(&qutrits, a).unwrap() - expected).abs() < 1e-14);
        assert_eq!(
            concurrence_bipartite(&bell, SubsetMask::full(2)),
            Err(Error::EmptySubset)
        );
    }

    #[test]
    fn mixed_input_rejected() {
        let rho = DensityOperator::maximally_mixed(dims(&[2, 2]));
        assert_eq!(
            concurrence_bipartite_density(&rho, SubsetMask::from_bits(1)),
            Err(Error::PureStateRequired)
        );
    }

    #[test]
    fn ghz4_has_unit_cd() {
        let ghz = PureState::ghz(4).unwrap();
        let (t, g) = distributed_concurrence_routes(&ghz);
        assert!((t - 1.0).abs() < 1e-12 && (g - 1.0).abs() < 1e-12);
    }

    #[test]
    fn odd_party_cd_vanishes() {
        let psi = random_pure(&dims(&[2, 3, 4]), 3);
        assert!(distributed_concurrence(&psi) < 1e-6);
        assert!(cd_squared_generator_form(&psi).abs() < 1e-14);
        assert!(projector_identity_residual(&psi) < 1e-12);
    }

    #[test]
    fn ghz4_ledger() {
        let ledger = entropy_ledger(&PureState::ghz(4).unwrap().to_density()).unwrap();
        for (m, t) in ledger.iter() {
            let expected = if m.len() == 4 { 0.0 } else { 1.0 };
            assert!((t - expected).abs() < 1e-12, "{m}: {t}");
        }
        assert_eq!(ledger.len(), 15);
        assert!(ledger.residual() < 1e-12);
    }

    #[test]
    fn maximally_mixed_two_qubits() {
        let eq = verify_mixed_equality(&DensityOperator::maximally_mixed(dims(&[2, 2]))).unwrap();
        assert!((eq.lhs - 0.5).abs() < 1e-14 && (eq.rhs - 0.5).abs() < 1e-14);
    }

    #[test]
    fn pure_three_party_equality_is_trivial() {
        let psi = random_pure(&dims(&[2, 3, 2]), 17);
        let eq = verify_mixed_equality(&psi.to_density()).unwrap();
        assert!(eq.lhs.abs() < 1e-12 && eq.rhs.abs() < 1e-12);
    }

    #[test]
    fn ghz3_three_party_margin() {
        let m = three_party_inequality(&PureState::ghz(3).unwrap().to_density()).unwrap();
        assert!(m.abs() < 1e-12);
        let two = DensityOperator::maximally_mixed(dims(&[2, 2]));
        assert_eq!(
            three_party_inequality(&two),
            Err(Error::WrongPartyCount {
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn product_of_maximally_mixed_qubits_margin() {
        // τ_single = 1, τ_pair = 3/2, τ_triple = 7/4 → 3 + 7/4 - 9/2 = 1/4
        let rho = DensityOperator::maximally_mixed(dims(&[2, 2, 2]));
        assert!((three_party_inequality(&rho).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn conservation_subsets_for_13_of_4() {
        let s = SubsetMask::from_labels(&[1, 3]).unwrap();
        let terms = conservation_terms(4, s).unwrap();
        let labels: Vec<(Vec<usize>, f64)> =
            terms.iter().map(|(m, sg)| (m.labels(4), *sg)).collect();
        let expected: Vec<(Vec<usize>, f64)> = alloc::vec![
            (alloc::vec![2], -1.0),
            (alloc::vec![4], -1.0),
            (alloc::vec![1, 3], 1.0),
            (alloc::vec![2, 4], 1.0),
            (alloc::vec![1, 2, 3], -1.0),
            (alloc::vec![1, 3, 4], -1.0),
            (alloc::vec![1, 2, 3, 4], 1.0),
        ];
        assert_eq!(labels, expected);
        let full = conservation_terms(3, SubsetMask::full(3)).unwrap();
        assert_eq!(full, alloc::vec![(SubsetMask::full(3), -1.0)]);
    }

    #[test]
    fn two_party_pure_conservation() {
        let psi = random_pure(&dims(&[2, 3]), 2);
        let rho = psi.to_density();
        let v = conservation_combination(&rho, SubsetMask::from_bits(1)).unwrap();
        // -τ_1 - τ_2 + τ_12 with τ_12 = 0 and τ_1 = τ_2
        let tau2 = tau(&rho, SubsetMask::from_bits(2)).unwrap();
        assert!((v + 2.0 * tau2).abs() < 1e-12);
    }

    #[test]
    fn evolution_edge_cases() {
        let d = dims(&[2, 2, 2]);
        let rho = random_mixed(&d, 3, 4).unwrap();
        let s = SubsetMask::from_labels(&[1, 3]).unwrap();
        let h = CMatrix::identity(4, 4);
        let same = evolve_subsystem(&rho, s, &h, 0.0).unwrap();
        assert!(same.max_abs_diff(&rho) < 1e-15);
        let phase = evolve_subsystem(&rho, s, &h, 0.7).unwrap();
        assert!(phase.max_abs_diff(&rho) < 1e-14);
        let mut bad = CMatrix::identity(4, 4);
        bad[(0, 1)] = C64::new(0.0, 1.0);
        assert!(matches!(
            evolve_subsystem(&rho, s, &bad, 0.1),
            Err(Error::NotHermitian(_))
        ));
        assert!(matches!(
            evolve_subsystem(&rho, s, &CMatrix::identity(2, 2), 0.1),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
