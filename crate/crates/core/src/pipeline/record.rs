use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{snap, SweepConfig};
use crate::eigensolver::SolveMethod;
use crate::entanglement::Block;
use crate::{Error, RenyiCurve, Result};

/// Bumped whenever the record layout or its numerics change.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub method: SolveMethod,
    pub iterations: usize,
    pub residual_norm: f64,
    pub gap: Option<f64>,
    pub near_degenerate: bool,
}

/// Everything downstream analysis needs from one `(N, h)` ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub format_version: u32,
    pub code_version: String,
    /// Solver tolerance the record was produced with.
    pub tolerance: f64,
    pub n_sites: usize,
    pub h: f64,
    pub energy: f64,
    pub pair_block: Block,
    /// Descending two-site spectrum `λ₁ … λ₄`.
    pub lambdas: Vec<f64>,
    pub renyi_block: Block,
    pub renyi: RenyiCurve,
    pub diagnostics: Diagnostics,
}

impl SweepRecord {
    pub fn block_size(&self) -> usize {
        self.renyi_block.len
    }

    /// Descending normalized spectrum and an energy inside the variational
    /// window `[-N(1+h), -Nh]`.
    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.lambdas.iter().sum();
        if self.lambdas.len() != 4 || self.lambdas.windows(2).any(|w| w[1] > w[0]) || (sum - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "N={} h={}: bad two-site spectrum {:?}",
                self.n_sites, self.h, self.lambdas
            )));
        }
        let n = self.n_sites as f64;
        let slack = 1e-9 * n;
        if !(self.energy >= -n * (1.0 + self.h) - slack && self.energy <= -n * self.h + slack) {
            return Err(Error::Validation(format!(
                "N={} h={}: energy {} violates the variational bound",
                self.n_sites, self.h, self.energy
            )));
        }
        Ok(())
    }

    /// Whether a cached record can stand in for a fresh solve under `config`.
    pub(crate) fn matches(&self, config: &SweepConfig, n_sites: usize, h: f64, alphas: &[f64]) -> bool {
        self.format_version == FORMAT_VERSION
            && self.n_sites == n_sites
            && snap(self.h) == snap(h)
            && self.tolerance.to_bits() == config.solver.tolerance.to_bits()
            && config.pair_block(n_sites).is_ok_and(|b| b == self.pair_block)
            && self.renyi_block == config.elocc_block(n_sites)
            && self.renyi.alphas == alphas
            && self.validate().is_ok()
    }
}

/// `cache_dir/N{n}/h{h:.9}.rec`
pub fn cache_path(cache_dir: &Path, n_sites: usize, h: f64) -> PathBuf {
    cache_dir.join(format!("N{n_sites}")).join(format!("h{:.9}.rec", snap(h)))
}

pub(crate) fn read_record(path: &Path) -> Result<Option<SweepRecord>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::io(path, e)),
    };
    serde_json::from_str(&text).map(Some).map_err(|source| Error::Record { path: path.to_owned(), source })
}

/// Temp file in the same directory, then rename, so readers never see a
/// partial record.
pub(crate) fn write_record(path: &Path, record: &SweepRecord) -> Result<()> {
    let dir = path.parent().expect("cache path has a parent");
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tmp = dir.join(format!(
        ".{}.{}.{:?}.tmp",
        path.file_name().unwrap().to_string_lossy(),
        std::process::id(),
        std::thread::current().id()
    ));
    let body = serde_json::to_vec(record).map_err(|source| Error::Record { path: path.to_owned(), source })?;
    let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(&body).and_then(|_| file.sync_all()).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Fails early, as a configuration error, if `dir` cannot hold records.
pub(crate) fn probe_cache_dir(dir: &Path) -> Result<()> {
    let fail = |e: std::io::Error| Error::Config(format!("cache directory {} is not writable: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(fail)?;
    let probe = dir.join(format!(".probe.{}", std::process::id()));
    fs::write(&probe, b"").map_err(fail)?;
    fs::remove_file(&probe).map_err(fail)
}
