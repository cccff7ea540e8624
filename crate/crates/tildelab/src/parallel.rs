//! Scoped-thread versions of the ledger and the violation search. Results
//! are identical for every worker count.

use std::collections::BTreeMap;
use std::thread;

use tildelab_core::correlation::{tau, EntropyLedger};
use tildelab_core::inversion::tr_rho_rhotilde;
use tildelab_core::search::{reduce, run_worker, SearchConfig, SearchOutcome};
use tildelab_core::{subsets, DensityOperator, Error, Result};

/// `Tr ρ_A²`-based entropies for every nonempty subset, split over workers.
pub fn entropy_ledger(rho: &DensityOperator, workers: usize) -> Result<EntropyLedger> {
    let masks = subsets(rho.dims().parties())?;
    let workers = workers.clamp(1, masks.len());
    let chunks: Vec<Result<Vec<_>>> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let masks = &masks;
                s.spawn(move || {
                    masks
                        .iter()
                        .skip(w)
                        .step_by(workers)
                        .map(|&m| tau(rho, m).map(|t| (m, t)))
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("ledger worker panicked"))
            .collect()
    });
    let mut entries = BTreeMap::new();
    for chunk in chunks {
        entries.extend(chunk?);
    }
    EntropyLedger::from_parts(rho.dims().clone(), entries, tr_rho_rhotilde(rho))
}

pub fn search(cfg: &SearchConfig, workers: usize) -> Result<SearchOutcome> {
    if cfg.trials == 0 {
        return Err(Error::NoTrials);
    }
    let workers = workers.max(1);
    let results: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| s.spawn(move || run_worker(cfg, w, workers)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search worker panicked"))
            .collect()
    });
    let mut found = Vec::new();
    for r in results {
        found.extend(r?);
    }
    let best = reduce(found).expect("nonzero trials");
    Ok(SearchOutcome {
        best,
        trials: cfg.trials,
        workers,
    })
}
