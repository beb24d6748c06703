use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::convertibility::DEFAULT_TOLERANCE;
use crate::entanglement::{validate_alpha_grid, Block};
use crate::{Error, Result, SolverOptions};

/// Grid values are snapped to this many decimals; it is also the cache key
/// resolution for `h`.
pub(crate) const H_DECIMALS: i32 = 9;

pub(crate) fn snap(h: f64) -> f64 {
    let s = 10f64.powi(H_DECIMALS);
    (h * s).round() / s
}

/// Log-spaced `α` points plus explicit extras (the `0`, `1`, `∞` limits are
/// always added by the Rényi curve itself).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaGridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub extra: Vec<f64>,
}

impl Default for AlphaGridSpec {
    fn default() -> Self {
        AlphaGridSpec { min: 0.05, max: 5.0, points: 60, extra: vec![10.0, 50.0] }
    }
}

impl AlphaGridSpec {
    pub fn alphas(&self) -> Result<Vec<f64>> {
        if !(self.min > 0.0 && self.max > self.min) || self.points < 2 {
            return Err(Error::Config(format!("bad alpha grid {self:?}")));
        }
        let mut grid: Vec<f64> = (0..self.points)
            .map(|k| self.min * (self.max / self.min).powf(k as f64 / (self.points - 1) as f64))
            .filter(|&a| a != 1.0)
            .collect();
        grid.extend(self.extra.iter().copied());
        validate_alpha_grid(&grid).map_err(|e| Error::Config(e.to_string()))?;
        Ok(grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Partial-sum band for LOCC verdicts.
    pub majorization: f64,
    /// Entropy band for ELOCC verdicts.
    pub elocc: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { majorization: DEFAULT_TOLERANCE, elocc: DEFAULT_TOLERANCE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub h_start: f64,
    pub h_end: f64,
    /// Also the `Δ` of adjacent-pair verdicts and the derivative stencil.
    pub h_step: f64,
    /// Ordered contiguous site pair for the majorization analysis.
    pub majorization_block: Vec<usize>,
    /// Rényi block is the first `round(N · fraction)` sites.
    pub elocc_block_fraction: f64,
    pub alpha_grid: AlphaGridSpec,
    pub solver: SolverOptions,
    pub tolerances: Tolerances,
    pub cache_dir: Option<PathBuf>,
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            sizes: (4..=22).step_by(2).collect(),
            h_start: 0.5,
            h_end: 2.5,
            h_step: 0.02,
            majorization_block: vec![0, 1],
            elocc_block_fraction: 0.5,
            alpha_grid: AlphaGridSpec::default(),
            solver: SolverOptions::default(),
            tolerances: Tolerances::default(),
            cache_dir: None,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl SweepConfig {
    /// `h_start, h_start + step, …` up to `h_end` (inclusive when it lands on
    /// the grid), snapped to 1e-9.
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.h_end - self.h_start) / self.h_step + 1e-9).floor() as usize;
        (0..=n).map(|i| snap(self.h_start + i as f64 * self.h_step)).collect()
    }

    pub fn pair_block(&self, n_sites: usize) -> Result<Block> {
        let block = Block::from_sites(&self.majorization_block, n_sites)?;
        if block.len != 2 {
            return Err(Error::Config(format!(
                "majorization block must be a site pair, got {:?}",
                self.majorization_block
            )));
        }
        Ok(block)
    }

    pub fn elocc_block(&self, n_sites: usize) -> Block {
        let len = ((n_sites as f64 * self.elocc_block_fraction).round() as usize).clamp(1, n_sites - 1);
        Block { start: 0, len }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.sizes.is_empty() {
            return bad("no system sizes".into());
        }
        if let Some(n) = self.sizes.iter().find(|&&n| !(4..=crate::basis::MAX_SITES).contains(&n)) {
            return bad(format!("system size {n} outside [4, {}]", crate::basis::MAX_SITES));
        }
        if !(self.h_start.is_finite() && self.h_end.is_finite() && self.h_start < self.h_end) {
            return bad(format!("need h_start < h_end, got {} and {}", self.h_start, self.h_end));
        }
        if !(self.h_step > 0.0 && self.h_step.is_finite()) {
            return bad(format!("h_step must be positive, got {}", self.h_step));
        }
        if self.h_start < 0.0 {
            return bad(format!("h_start must be non-negative, got {}", self.h_start));
        }
        if !(self.elocc_block_fraction > 0.0 && self.elocc_block_fraction < 1.0) {
            return bad(format!("elocc_block_fraction must lie in (0, 1), got {}", self.elocc_block_fraction));
        }
        if self.workers == 0 {
            return bad("workers must be at least 1".into());
        }
        if !(self.tolerances.majorization >= 0.0 && self.tolerances.elocc >= 0.0) {
            return bad("tolerances must be non-negative".into());
        }
        self.solver.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.alpha_grid.alphas()?;
        for &n in &self.sizes {
            self.pair_block(n).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.grid().len() < 2 {
            return bad("h grid has fewer than two points".into());
        }
        Ok(())
    }
}
