use serde::{Deserialize, Serialize};

use super::config::{snap, SweepConfig};
use super::record::SweepRecord;
use crate::convertibility::{build_profiles, classify_locc_pair, elocc_compare, find_minimum, Direction, Observable};
use crate::scaling::fit_power_law;
use crate::{
    EloccVerdict, Error, MajorizationVerdict, MinimumPoint, MonotonicityProfile, ReducedSpectrum, Result, ScalingFit,
};

/// Verdicts between `h_lo` and `h_hi = h_lo + Δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictStep {
    pub h_lo: f64,
    pub h_hi: f64,
    pub locc: MajorizationVerdict,
    pub elocc: EloccVerdict,
}

/// Where the adjacent-pair verdicts settle along the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    /// Smallest `h` from which every LOCC step is `a → b`.
    pub locc_boundary: Option<f64>,
    /// Largest `h` up to which every LOCC step is incomparable.
    pub incomparable_up_to: Option<f64>,
    /// Smallest `h` from which every ELOCC step is `a → b`.
    pub elocc_boundary: Option<f64>,
}

impl RegionSummary {
    pub fn from_steps(steps: &[VerdictStep]) -> Self {
        let tail_start = |ok: &dyn Fn(&VerdictStep) -> bool| {
            let k = steps.iter().rposition(|s| !ok(s)).map_or(0, |i| i + 1);
            steps.get(k).map(|s| s.h_lo)
        };
        let head = steps.iter().take_while(|s| s.locc.direction == Direction::Incomparable).last();
        RegionSummary {
            locc_boundary: tail_start(&|s| s.locc.direction.forward()),
            incomparable_up_to: head.map(|s| s.h_hi),
            elocc_boundary: tail_start(&|s| s.elocc.direction.forward()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub n_sites: usize,
    pub profile: MonotonicityProfile,
    pub minimum_f2: Option<MinimumPoint>,
    pub minimum_f3: Option<MinimumPoint>,
    pub steps: Vec<VerdictStep>,
    pub regions: RegionSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub h_step: f64,
    pub majorization_tolerance: f64,
    pub elocc_tolerance: f64,
    pub sizes: Vec<SizeReport>,
    pub fit_f2: Option<ScalingFit>,
    pub fit_f3: Option<ScalingFit>,
    /// Extrapolated critical field, the `c` of the `f₂` fit.
    pub h_c: Option<f64>,
}

impl ReportBundle {
    pub fn size(&self, n_sites: usize) -> Option<&SizeReport> {
        self.sizes.iter().find(|s| s.n_sites == n_sites)
    }

    pub fn fits(&self) -> impl Iterator<Item = &ScalingFit> {
        self.fit_f2.iter().chain(&self.fit_f3)
    }
}

fn fit_minima(
    sizes: &[SizeReport],
    pick: impl Fn(&SizeReport) -> Option<&MinimumPoint>,
    obs: Observable,
) -> Option<ScalingFit> {
    let points: Vec<(usize, f64)> = sizes.iter().filter_map(|s| pick(s).map(|m| (s.n_sites, m.h_min))).collect();
    fit_power_law(&points).ok().map(|f| f.with_observable(obs))
}

/// Profiles, minima, adjacent-pair verdicts and scaling fits for every
/// size in `config`. Every grid point must be present in `records`.
pub fn build_report(records: &[SweepRecord], config: &SweepConfig) -> Result<ReportBundle> {
    config.validate()?;
    let grid = config.grid();
    let mut sizes = config.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();

    let mut missing = Vec::new();
    let mut table: Vec<Vec<&SweepRecord>> = Vec::new();
    for &n in &sizes {
        let mut row = Vec::with_capacity(grid.len());
        for &h in &grid {
            match records.iter().find(|r| r.n_sites == n && snap(r.h) == h) {
                Some(r) => row.push(r),
                None => missing.push((n, h)),
            }
        }
        table.push(row);
    }
    if !missing.is_empty() {
        return Err(Error::Coverage { missing });
    }

    let mut reports = Vec::with_capacity(sizes.len());
    for (&n, row) in sizes.iter().zip(&table) {
        let spectra = row
            .iter()
            .map(|r| ReducedSpectrum::from_lambdas(n, r.h, r.pair_block, r.lambdas.clone()))
            .collect::<Result<Vec<_>>>()?;
        let profile = build_profiles(&spectra)?;
        let mut steps = Vec::with_capacity(row.len() - 1);
        for (k, pair) in spectra.windows(2).enumerate() {
            steps.push(VerdictStep {
                h_lo: pair[0].field,
                h_hi: pair[1].field,
                locc: classify_locc_pair(&pair[0], &pair[1], config.tolerances.majorization)?,
                elocc: elocc_compare(&row[k].renyi, &row[k + 1].renyi, config.tolerances.elocc)?,
            });
        }
        let (minimum_f2, minimum_f3) = if profile.len() >= 5 {
            (find_minimum(&profile, Observable::F2)?, find_minimum(&profile, Observable::F3)?)
        } else {
            (None, None)
        };
        reports.push(SizeReport {
            n_sites: n,
            regions: RegionSummary::from_steps(&steps),
            profile,
            minimum_f2,
            minimum_f3,
            steps,
        });
    }

    let fit_f2 = fit_minima(&reports, |s| s.minimum_f2.as_ref(), Observable::F2);
    let fit_f3 = fit_minima(&reports, |s| s.minimum_f3.as_ref(), Observable::F3);
    Ok(ReportBundle {
        h_step: config.h_step,
        majorization_tolerance: config.tolerances.majorization,
        elocc_tolerance: config.tolerances.elocc,
        h_c: fit_f2.as_ref().map(|f| f.c),
        sizes: reports,
        fit_f2,
        fit_f3,
    })
}
