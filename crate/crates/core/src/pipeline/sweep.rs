use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use super::record::{cache_path, probe_cache_dir, read_record, write_record, Diagnostics, SweepRecord, FORMAT_VERSION};
use crate::entanglement::reduced_spectrum;
use crate::{ground_state, Error, HamiltonianSpec, RenyiCurve, Result};

/// A grid point that could not be produced; the rest of the sweep carries on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub n_sites: usize,
    pub h: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    /// Ordered by `N`, then `h`.
    pub records: Vec<SweepRecord>,
    pub failures: Vec<PointFailure>,
    /// Points that needed a ground-state solve.
    pub solved: usize,
    pub cache_hits: usize,
}

enum Outcome {
    Cached(SweepRecord),
    Solved(SweepRecord),
    Failed(PointFailure),
}

/// Ground state, two-site spectrum and Rényi curve for one grid point.
pub fn solve_point(config: &SweepConfig, n_sites: usize, h: f64) -> Result<SweepRecord> {
    let pair_block = config.pair_block(n_sites)?;
    let renyi_block = config.elocc_block(n_sites);
    let alphas = config.alpha_grid.alphas()?;
    let state = ground_state(&HamiltonianSpec::new(n_sites, h)?, &config.solver)?;
    let pair = reduced_spectrum(&state, pair_block)?;
    let wide = reduced_spectrum(&state, renyi_block)?;
    let record = SweepRecord {
        format_version: FORMAT_VERSION,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        tolerance: config.solver.tolerance,
        n_sites,
        h,
        energy: state.energy,
        pair_block,
        lambdas: pair.lambdas,
        renyi_block,
        renyi: RenyiCurve::compute(&wide.lambdas, &alphas)?,
        diagnostics: Diagnostics {
            method: state.method,
            iterations: state.iterations,
            residual_norm: state.residual_norm,
            gap: state.gap,
            near_degenerate: state.near_degenerate,
        },
    };
    record.validate()?;
    Ok(record)
}

fn process(config: &SweepConfig, alphas: &[f64], n_sites: usize, h: f64) -> Outcome {
    let path = config.cache_dir.as_ref().map(|d| cache_path(d, n_sites, h));
    if let Some(path) = &path {
        // unreadable or stale entries are recomputed and overwritten
        if let Ok(Some(rec)) = read_record(path) {
            if rec.matches(config, n_sites, h, alphas) {
                return Outcome::Cached(rec);
            }
        }
    }
    let fail = |e: Error| Outcome::Failed(PointFailure { n_sites, h, message: e.to_string() });
    let rec = match solve_point(config, n_sites, h) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Some(path) = &path {
        if let Err(e) = write_record(path, &rec) {
            return fail(e);
        }
    }
    Outcome::Solved(rec)
}

/// Runs every `(N, h)` point of `config` on a pool of `config.workers`
/// threads, reusing cached records where they match.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    if let Some(dir) = &config.cache_dir {
        probe_cache_dir(dir)?;
    }
    let alphas = config.alpha_grid.alphas()?;
    let grid = config.grid();
    let mut sizes = config.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let tasks: Vec<(usize, f64)> = sizes.iter().flat_map(|&n| grid.iter().map(move |&h| (n, h))).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", config.workers)))?;
    let outcomes: Vec<Outcome> =
        pool.install(|| tasks.par_iter().map(|&(n, h)| process(config, &alphas, n, h)).collect());

    let mut out = SweepOutput { records: Vec::new(), failures: Vec::new(), solved: 0, cache_hits: 0 };
    for o in outcomes {
        match o {
            Outcome::Cached(r) => {
                out.cache_hits += 1;
                out.records.push(r);
            }
            Outcome::Solved(r) => {
                out.solved += 1;
                out.records.push(r);
            }
            Outcome::Failed(f) => out.failures.push(f),
        }
    }
    Ok(out)
}
