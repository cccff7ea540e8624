//! Randomized search for violations of the monotone conditions.
//!
//! Each restart draws a random pure state `ψ_1` on the environment, builds
//! the eigenbasis of `Π_{ψ_1}~`, takes `ψ_1` plus eigenvectors spread over
//! the spectrum as the normalized `f̄_j`, and then searches over Schmidt
//! weights `λ` and channel diagonals `D`. Restarts are seeded from
//! `(seed, restart)` so the result does not depend on how restarts are
//! spread over workers.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use rand::Rng;

use crate::dims::HilbertDims;
use crate::error::{Error, Result};
use crate::inversion::invert_product_matrix;
use crate::linalg::{hermitian_eigen, CVector};
use crate::monotone::{
    cd2_margin, f_pair_matrix, mon3_margin, normalized_weights, RMatrix, TwoOutcomeChannel,
    VIOLATION_THRESHOLD,
};
use crate::random::{dirichlet_uniform, random_pure_with, rng_stream, StdRng};
use crate::state::PureState;

/// Trials per restart.
pub const RESTART_LEN: u64 = 1000;
const RANDOM_PHASE: u64 = 600;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Cd,
    Cd2,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Cd => "cd",
            Target::Cd2 => "cd2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub d1: usize,
    pub target: Target,
    pub trials: u64,
    pub seed: u64,
    pub env: HilbertDims,
}

impl SearchConfig {
    /// Three-qubit environment.
    pub fn new(d1: usize, target: Target, trials: u64, seed: u64) -> Result<Self> {
        if !(2..=16).contains(&d1) {
            return Err(Error::BadDimension(d1));
        }
        let env = HilbertDims::uniform(2, 3)?;
        Ok(Self {
            d1,
            target,
            trials,
            seed,
            env,
        })
    }

    pub fn with_env(mut self, env: HilbertDims) -> Result<Self> {
        if env.total() < self.d1 {
            return Err(Error::DimensionTooLarge(self.d1));
        }
        self.env = env;
        Ok(self)
    }

    pub fn restarts(&self) -> u64 {
        self.trials.div_ceil(RESTART_LEN)
    }
}

/// Best point of a search.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// mon3 margin for [`Target::Cd`], `C_D²` deficit for [`Target::Cd2`].
    pub margin: f64,
    pub trial: u64,
    pub lambdas: Vec<f64>,
    pub diag: Vec<f64>,
    /// Orthonormal `f̄_j`.
    pub env_vectors: Vec<CVector>,
    pub env_dims: HilbertDims,
    /// `F̄_jkkj` of the normalized vectors.
    pub pairs: RMatrix,
}

impl Candidate {
    /// `Σ_j sqrt(λ_j) |j> |f̄_j>`.
    pub fn state(&self) -> PureState {
        let n = self.env_dims.total();
        let d1 = self.lambdas.len();
        let amp = CVector::from_fn(d1 * n, |i, _| {
            self.env_vectors[i / n][i % n] * self.lambdas[i / n].sqrt()
        });
        let mut parties = alloc::vec![d1];
        parties.extend_from_slice(self.env_dims.as_slice());
        PureState::new(HilbertDims::new(&parties).expect("valid dims"), amp).expect("consistent")
    }

    pub fn channel(&self) -> TwoOutcomeChannel {
        TwoOutcomeChannel::computational(self.diag.clone()).expect("diag in [0,1]")
    }

    pub fn is_violation(&self) -> bool {
        self.margin < -VIOLATION_THRESHOLD
    }

    fn better_than(&self, other: &Candidate) -> bool {
        (self.margin, self.trial) < (other.margin, other.trial)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: Candidate,
    pub trials: u64,
    pub workers: usize,
}

impl SearchOutcome {
    pub fn violation_found(&self) -> bool {
        self.best.is_violation()
    }
}

/// Orthonormal eigenvectors of `Π_{ψ}~` orthogonal to `ψ`, ascending by
/// eigenvalue, with their eigenvalues.
fn complement_eigenvectors(psi: &CVector, env: &HilbertDims) -> Result<Vec<(f64, CVector)>> {
    let tilde = invert_product_matrix(&(psi * psi.adjoint()), env)?;
    let (values, vectors) = hermitian_eigen(&tilde);
    let n = values.len();
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let nonzero = |i: usize| values[i] > 1e-10 * scale;
    // nonzero eigenvectors are already orthogonal to ψ; kernel vectors are
    // re-orthogonalized and the one closest to ψ dropped
    let mut kept: Vec<(f64, CVector)> = alloc::vec![(0.0, psi.clone())];
    let mut order: Vec<usize> = (0..n).filter(|&i| nonzero(i)).collect();
    order.extend((0..n).filter(|&i| !nonzero(i)));
    for i in order {
        let mut v = vectors.column(i).into_owned();
        for (_, u) in &kept {
            let c = u.dotc(&v);
            v -= u * c;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            kept.push((if nonzero(i) { values[i] } else { 0.0 }, v.unscale(norm)));
        }
    }
    kept.remove(0);
    kept.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(kept)
}

/// `ψ_1` followed by `d1 - 1` eigenvectors at evenly spread spectral ranks.
fn pick_vectors(rng: &mut StdRng, cfg: &SearchConfig) -> Result<Vec<CVector>> {
    let psi = random_pure_with(&cfg.env, rng).into_amplitudes();
    let rest = complement_eigenvectors(&psi, &cfg.env)?;
    let want = cfg.d1 - 1;
    let mut out = alloc::vec![psi];
    let last = rest.len() - 1;
    for i in 0..want {
        let idx = if want == 1 {
            last
        } else {
            (i * last + (want - 1) / 2) / (want - 1)
        };
        out.push(rest[idx].1.clone());
    }
    Ok(out)
}

struct Objective {
    pairs: RMatrix,
    target: Target,
}

impl Objective {
    fn margin(&self, lambdas: &[f64], diag: &[f64]) -> f64 {
        let r = lambdas.len();
        let w = RMatrix::from_fn(r, r, |j, k| self.pairs[(j, k)] * lambdas[j] * lambdas[k]);
        let total: f64 = w.iter().sum();
        let Some(w) = normalized_weights(&w) else {
            return 0.0;
        };
        match self.target {
            Target::Cd => mon3_margin(&w, diag),
            // raw C_D² deficit, bounded even when C_D(ψ) is tiny
            Target::Cd2 => 2.0 * total * cd2_margin(&w, lambdas, diag),
        }
    }
}

/// Runs one restart covering trials `[restart * RESTART_LEN, ..)` up to
/// `cfg.trials`.
pub fn run_restart(cfg: &SearchConfig, restart: u64) -> Result<Option<Candidate>> {
    let first = restart * RESTART_LEN;
    if first >= cfg.trials {
        return Ok(None);
    }
    let budget = (cfg.trials - first).min(RESTART_LEN);
    let mut rng = rng_stream(cfg.seed, restart);
    let vectors = pick_vectors(&mut rng, cfg)?;
    let obj = Objective {
        pairs: f_pair_matrix(&vectors, &cfg.env)?,
        target: cfg.target,
    };
    let r = cfg.d1;

    let mut best: Option<(f64, u64, Vec<f64>, Vec<f64>)> = None;
    let offer = |m: f64, t: u64, l: &[f64], d: &[f64], best: &mut Option<_>| {
        let replace = match best {
            Some((bm, bt, _, _)) => (m, t) < (*bm, *bt),
            None => true,
        };
        if replace {
            *best = Some((m, t, l.to_vec(), d.to_vec()));
        }
    };

    let random_phase = budget.min(RANDOM_PHASE);
    for i in 0..random_phase {
        let lambdas = dirichlet_uniform(r, &mut rng);
        let diag: Vec<f64> = (0..r).map(|_| rng.random::<f64>()).collect();
        let m = obj.margin(&lambdas, &diag);
        offer(m, first + i, &lambdas, &diag, &mut best);
    }

    let (mut cur_m, _, mut lambdas, mut diag) = best.clone().expect("at least one trial");
    let mut step = 0.25;
    let mut stale = 0;
    for i in random_phase..budget {
        let coord = rng.random_range(0..2 * r);
        let delta = if rng.random::<bool>() { step } else { -step };
        let (mut l2, mut d2) = (lambdas.clone(), diag.clone());
        if coord < r {
            l2[coord] = (l2[coord] * (1.0 + delta)).max(1e-12);
            let s: f64 = l2.iter().sum();
            l2.iter_mut().for_each(|x| *x /= s);
        } else {
            d2[coord - r] = (d2[coord - r] + delta).clamp(0.0, 1.0);
        }
        let m = obj.margin(&l2, &d2);
        if m < cur_m {
            cur_m = m;
            lambdas = l2;
            diag = d2;
            offer(m, first + i, &lambdas, &diag, &mut best);
            stale = 0;
        } else {
            stale += 1;
            if stale >= 4 * r {
                step *= 0.5;
                stale = 0;
            }
        }
    }

    let (margin, trial, lambdas, diag) = best.expect("at least one trial");
    Ok(Some(Candidate {
        margin,
        trial,
        lambdas,
        diag,
        env_vectors: vectors,
        env_dims: cfg.env.clone(),
        pairs: obj.pairs,
    }))
}

/// Keeps the candidate with the smallest `(margin, trial)`.
pub fn reduce<I: IntoIterator<Item = Candidate>>(candidates: I) -> Option<Candidate> {
    candidates.into_iter().fold(None, |acc, c| match acc {
        Some(b) if !c.better_than(&b) => Some(b),
        _ => Some(c),
    })
}

/// Restarts `worker, worker + workers, ...`, reduced.
pub fn run_worker(cfg: &SearchConfig, worker: usize, workers: usize) -> Result<Option<Candidate>> {
    let mut found = Vec::new();
    let mut restart = worker as u64;
    while restart < cfg.restarts() {
        if let Some(c) = run_restart(cfg, restart)? {
            found.push(c);
        }
        restart += workers.max(1) as u64;
    }
    Ok(reduce(found))
}

pub fn search_with(cfg: &SearchConfig) -> Result<SearchOutcome> {
    if cfg.trials == 0 {
        return Err(Error::NoTrials);
    }
    let best = run_worker(cfg, 0, 1)?.expect("nonzero trials");
    Ok(SearchOutcome {
        best,
        trials: cfg.trials,
        workers: 1,
    })
}

/// Minimal margin of the `target` condition over `trials` seeded trials.
pub fn search_violation(
    d1: usize,
    target: Target,
    trials: u64,
    seed: u64,
) -> Result<SearchOutcome> {
    search_with(&SearchConfig::new(d1, target, trials, seed)?)
}
