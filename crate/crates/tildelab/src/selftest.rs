//! Built-in identity suite: generator identities for `d = 2..=5` and
//! agreement of the four inverter forms on random states.

use tildelab_core::correlation::{distributed_concurrence_routes, verify_mixed_equality};
use tildelab_core::gellmann::{build_basis, identity_residuals};
use tildelab_core::inversion::{
    bloch_decompose, invert_bloch, invert_generators, invert_product, invert_subsets,
    tilde_trace_factor,
};
use tildelab_core::random::{ginibre, random_mixed_with, rng_from_seed};
use tildelab_core::{HilbertDims, PureState, Result};

use crate::report::RunReport;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy)]
pub struct SelfTestOptions {
    pub tolerance: f64,
    pub seed: u64,
    /// Adds a small error to one generator of every basis.
    pub perturb: bool,
}

impl Default for SelfTestOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            seed: 0,
            perturb: false,
        }
    }
}

pub fn run(opts: SelfTestOptions) -> Result<RunReport> {
    let mut report = RunReport::new("self-test", opts.tolerance);
    report.seed = Some(opts.seed);
    let mut rng = rng_from_seed(opts.seed);

    for d in 2..=5 {
        let mut basis = build_basis(d)?;
        if opts.perturb {
            basis = basis.perturbed(1, 1e-6);
        }
        let samples: Vec<_> = (0..SAMPLES).map(|_| ginibre(d, d, &mut rng)).collect();
        let r = identity_residuals(&basis, &samples)?;
        report.check_residual(format!("d={d} generator normalization"), r.normalization);
        report.check_residual(format!("d={d} trace identity"), r.trace);
        report.check_residual(format!("d={d} transpose identity"), r.transpose);
        report.check_residual(format!("d={d} swap completeness"), r.swap);
        report.check_residual(format!("d={d} transposed swap"), r.bell_swap);
    }

    for profile in [&[2, 2][..], &[3, 3], &[2, 3, 2], &[2, 2, 2]] {
        let dims = HilbertDims::new(profile)?;
        let rho = random_mixed_with(&dims, dims.total(), &mut rng)?;
        let product = invert_product(&rho);
        report.check_residual(
            format!("{dims} subsets vs product"),
            invert_subsets(&rho).max_abs_diff(&product),
        );
        report.check_residual(
            format!("{dims} generators vs product"),
            invert_generators(&rho).max_abs_diff(&product),
        );
        if dims.common_dim().is_some() {
            let bloch = invert_bloch(&bloch_decompose(&rho))?;
            report.check_residual(
                format!("{dims} bloch vs product"),
                bloch.max_abs_diff(&product),
            );
        }
        report.check_eq(
            format!("{dims} tilde trace"),
            product.trace().re,
            tilde_trace_factor(&dims),
        );
        report.check_ge(
            format!("{dims} tilde positivity"),
            product.min_eigenvalue(),
            0.0,
        );
        let eq = verify_mixed_equality(&rho)?;
        report.check_eq(format!("{dims} mixed-state equality"), eq.lhs, eq.rhs);
    }

    let ghz = PureState::ghz(4)?;
    let (trace_form, generator_form) = distributed_concurrence_routes(&ghz);
    report.check_eq("GHZ4 distributed concurrence", trace_form, 1.0);
    report.check_eq("GHZ4 trace vs generator form", trace_form, generator_form);
    Ok(report.finish())
}
