//! Majorization (LOCC) and Rényi-ordering (ELOCC) verdicts between pure
//! bipartite states, and the partial-sum profiles `f₁, f₂, f₃` over a field
//! sweep.
//!
//! Direction convention: a verdict names who can be converted into whom.
//! `LowerToHigher` for the pair `(a, b)` means `a → b` succeeds with
//! certainty, which for LOCC is `λ_b ≻ λ_a` (every leading partial sum of
//! `b` dominates that of `a`). In a sweep `a` is the state at the lower
//! field.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entanglement::{Alpha, ReducedSpectrum, RenyiCurve};
use crate::{Error, Real, Result};

/// Absolute band for partial-sum and entropy comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Normalization slack accepted for Schmidt vectors.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;
/// Most negative entry accepted (round-off) before rejection.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;
/// Grid spacing uniformity required by [`build_profiles`].
pub const GRID_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LowerToHigher,
    HigherToLower,
    #[serde(rename = "both")]
    BothWays,
    Incomparable,
}

impl Direction {
    pub fn token(self) -> &'static str {
        match self {
            Direction::LowerToHigher => "lower_to_higher",
            Direction::HigherToLower => "higher_to_lower",
            Direction::BothWays => "both",
            Direction::Incomparable => "incomparable",
        }
    }

    /// True if the first state converts to the second.
    pub fn forward(self) -> bool {
        matches!(self, Direction::LowerToHigher | Direction::BothWays)
    }

    pub fn backward(self) -> bool {
        matches!(self, Direction::HigherToLower | Direction::BothWays)
    }

    fn from_flags(forward: bool, backward: bool) -> Self {
        match (forward, backward) {
            (true, true) => Direction::BothWays,
            (true, false) => Direction::LowerToHigher,
            (false, true) => Direction::HigherToLower,
            (false, false) => Direction::Incomparable,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Direction::LowerToHigher, Direction::HigherToLower, Direction::BothWays, Direction::Incomparable]
            .into_iter()
            .find(|d| d.token() == s)
            .ok_or_else(|| Error::Validation(format!("unknown verdict token {s:?}")))
    }
}

/// Descending, normalized probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtVector<T> {
    probs: Vec<T>,
}

impl<T: Real> SchmidtVector<T> {
    /// Validates and sorts. Entries may be given in any order; tiny negative
    /// round-off is clamped to zero.
    pub fn new(mut probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Validation("empty Schmidt vector".into()));
        }
        if let Some(bad) = probs.iter().find(|&&p| !p.is_finite() || p < -T::of(NEGATIVE_TOLERANCE)) {
            return Err(Error::Validation(format!("Schmidt coefficient {bad} is negative or not finite")));
        }
        let total = probs.iter().copied().fold(T::zero(), |a, b| a + b);
        if (total - T::one()).abs() > T::floor_tol(NORMALIZATION_TOLERANCE) {
            return Err(Error::Validation(format!("Schmidt vector sums to {total}, not 1")));
        }
        for p in probs.iter_mut() {
            *p = p.max(T::zero());
        }
        probs.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        Ok(SchmidtVector { probs })
    }

    pub fn from_spectrum(spectrum: &ReducedSpectrum<T>) -> Result<Self> {
        Self::new(spectrum.lambdas.clone())
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    /// Leading partial sums `Σ_{k≤l} λ_k` for `l = 1..=d`, zero-padded to `d`.
    pub fn partial_sums(&self, d: usize) -> Vec<T> {
        let mut acc = T::zero();
        (0..d)
            .map(|k| {
                acc = acc + self.probs.get(k).copied().unwrap_or(T::zero());
                acc
            })
            .collect()
    }
}

/// Majorization verdict plus the first failing partial sum in each
/// direction (1-based `l`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorizationVerdict {
    pub direction: Direction,
    /// First `l` where `a → b` fails, if it does.
    pub forward_witness: Option<usize>,
    /// First `l` where `b → a` fails, if it does.
    pub backward_witness: Option<usize>,
}

/// Compares all leading partial sums of `a` and `b` with an absolute band.
pub fn majorize<T: Real>(a: &SchmidtVector<T>, b: &SchmidtVector<T>, tol: T) -> MajorizationVerdict {
    let d = a.dim().max(b.dim());
    let (sa, sb) = (a.partial_sums(d), b.partial_sums(d));
    let mut forward_witness = None;
    let mut backward_witness = None;
    for (l, (&x, &y)) in sa.iter().zip(&sb).enumerate() {
        if forward_witness.is_none() && y < x - tol {
            forward_witness = Some(l + 1);
        }
        if backward_witness.is_none() && x < y - tol {
            backward_witness = Some(l + 1);
        }
    }
    MajorizationVerdict {
        direction: Direction::from_flags(forward_witness.is_none(), backward_witness.is_none()),
        forward_witness,
        backward_witness,
    }
}

fn check_same_setting<T: Real>(a: &ReducedSpectrum<T>, b: &ReducedSpectrum<T>) -> Result<()> {
    if a.n_sites != b.n_sites || a.block != b.block {
        return Err(Error::Validation(format!(
            "spectra differ in setting: N={} block={:?} vs N={} block={:?}",
            a.n_sites, a.block, b.n_sites, b.block
        )));
    }
    Ok(())
}

/// LOCC verdict between `|G(h)⟩` (`a`) and `|G(h+Δ)⟩` (`b`).
///
/// `LowerToHigher` is the case where every `f_k` is non-decreasing,
/// `HigherToLower` where every `f_k` is non-increasing, anything else is
/// `Incomparable`.
pub fn classify_locc_pair<T: Real>(
    a: &ReducedSpectrum<T>,
    b: &ReducedSpectrum<T>,
    tol: T,
) -> Result<MajorizationVerdict> {
    check_same_setting(a, b)?;
    if b.field < a.field {
        return Err(Error::Validation(format!(
            "second spectrum must be at the larger field ({} < {})",
            b.field, a.field
        )));
    }
    Ok(majorize(&SchmidtVector::from_spectrum(a)?, &SchmidtVector::from_spectrum(b)?, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    F1,
    F2,
    F3,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::F1 => "f1",
            Observable::F2 => "f2",
            Observable::F3 => "f3",
        }
    }

    /// Number of leading eigenvalues summed.
    pub fn terms(self) -> usize {
        match self {
            Observable::F1 => 1,
            Observable::F2 => 2,
            Observable::F3 => 3,
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(Observable::F1),
            "f2" => Ok(Observable::F2),
            "f3" => Ok(Observable::F3),
            _ => Err(Error::Validation(format!("unknown observable {s:?}"))),
        }
    }
}

/// `f₁ = λ₁`, `f₂ = λ₁+λ₂`, `f₃ = λ₁+λ₂+λ₃` and their field derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityProfile<T> {
    pub n_sites: usize,
    pub h_grid: Vec<T>,
    pub f1: Vec<T>,
    pub f2: Vec<T>,
    pub f3: Vec<T>,
    pub d1: Vec<T>,
    pub d2: Vec<T>,
    pub d3: Vec<T>,
}

impl<T: Real> MonotonicityProfile<T> {
    pub fn values(&self, obs: Observable) -> &[T] {
        match obs {
            Observable::F1 => &self.f1,
            Observable::F2 => &self.f2,
            Observable::F3 => &self.f3,
        }
    }

    pub fn derivative(&self, obs: Observable) -> &[T] {
        match obs {
            Observable::F1 => &self.d1,
            Observable::F2 => &self.d2,
            Observable::F3 => &self.d3,
        }
    }

    pub fn step(&self) -> T {
        (self.h_grid[self.h_grid.len() - 1] - self.h_grid[0]) / T::of_usize(self.h_grid.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.h_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_grid.is_empty()
    }
}

/// Central differences inside, one-sided at the two ends.
pub fn finite_difference<T: Real>(f: &[T], step: T) -> Vec<T> {
    let n = f.len();
    let two = T::of(2.0);
    (0..n)
        .map(|i| match i {
            _ if n < 2 => T::zero(),
            0 => (f[1] - f[0]) / step,
            _ if i == n - 1 => (f[n - 1] - f[n - 2]) / step,
            _ => (f[i + 1] - f[i - 1]) / (two * step),
        })
        .collect()
}

/// Checks strict increase and uniform spacing; returns the step.
pub fn check_uniform_grid<T: Real>(grid: &[T]) -> Result<T> {
    if grid.len() < 2 {
        return Err(Error::Grid(format!("need at least two grid points, got {}", grid.len())));
    }
    let step = (grid[grid.len() - 1] - grid[0]) / T::of_usize(grid.len() - 1);
    if !(step > T::zero()) {
        return Err(Error::Grid("grid is not increasing".into()));
    }
    let tol = T::floor_tol(GRID_TOLERANCE).max(step * T::epsilon() * T::of(64.0));
    for (i, w) in grid.windows(2).enumerate() {
        if ((w[1] - w[0]) - step).abs() > tol {
            return Err(Error::Grid(format!("spacing {} at index {i} differs from {step}", w[1] - w[0])));
        }
    }
    Ok(step)
}

/// Builds the partial-sum profile from spectra ordered by field.
pub fn build_profiles<T: Real>(spectra: &[ReducedSpectrum<T>]) -> Result<MonotonicityProfile<T>> {
    let first = spectra.first().ok_or_else(|| Error::Grid("no spectra".into()))?;
    for s in spectra {
        check_same_setting(first, s)?;
    }
    let h_grid: Vec<T> = spectra.iter().map(|s| s.field).collect();
    let step = check_uniform_grid(&h_grid)?;
    let partial = |k: usize| -> Vec<T> {
        spectra.iter().map(|s| s.lambdas.iter().take(k).copied().fold(T::zero(), |a, b| a + b)).collect()
    };
    let (f1, f2, f3) = (partial(1), partial(2), partial(3));
    Ok(MonotonicityProfile {
        n_sites: first.n_sites,
        d1: finite_difference(&f1, step),
        d2: finite_difference(&f2, step),
        d3: finite_difference(&f3, step),
        h_grid,
        f1,
        f2,
        f3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Refinement {
    Grid,
    Parabolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimumPoint<T> {
    pub observable: Observable,
    pub n_sites: usize,
    pub h_min: T,
    pub f_min: T,
    pub refinement: Refinement,
    /// Number of distinct interior minima seen; the reported one has the
    /// lowest `f`.
    pub multiplicity: usize,
}

/// Interior minimum of `observable`, or `None` for a profile without one.
///
/// Candidates are where the derivative turns from negative to
/// non-negative; each is snapped to the discrete local minimum next to it
/// and refined by the vertex of the parabola through its two neighbours.
pub fn find_minimum<T: Real>(
    profile: &MonotonicityProfile<T>,
    observable: Observable,
) -> Result<Option<MinimumPoint<T>>> {
    let n = profile.len();
    if n < 5 {
        return Err(Error::Grid(format!("need at least 5 grid points to locate a minimum, got {n}")));
    }
    let f = profile.values(observable);
    let d = profile.derivative(observable);
    let step = profile.step();

    let mut centers: Vec<usize> = Vec::new();
    for i in 0..n - 1 {
        if d[i] < T::zero() && d[i + 1] >= T::zero() {
            let lo = i.saturating_sub(1);
            let hi = (i + 2).min(n - 1);
            let c = (lo..=hi).fold(lo, |best, k| if f[k] < f[best] { k } else { best });
            if c > 0 && c < n - 1 && f[c] <= f[c - 1] && f[c] <= f[c + 1] && !centers.contains(&c) {
                centers.push(c);
            }
        }
    }

    let mut best: Option<MinimumPoint<T>> = None;
    for &c in &centers {
        let (fl, fc, fr) = (f[c - 1], f[c], f[c + 1]);
        let curvature = fl - T::of(2.0) * fc + fr;
        let point = if curvature > T::zero() {
            let offset = step * T::of(0.5) * (fl - fr) / curvature;
            let f_min = fc - (fl - fr) * (fl - fr) / (T::of(8.0) * curvature);
            (profile.h_grid[c] + offset, f_min, Refinement::Parabolic)
        } else {
            (profile.h_grid[c], fc, Refinement::Grid)
        };
        if best.as_ref().is_none_or(|b| point.1 < b.f_min) {
            best = Some(MinimumPoint {
                observable,
                n_sites: profile.n_sites,
                h_min: point.0,
                f_min: point.1,
                refinement: point.2,
                multiplicity: centers.len(),
            });
        }
    }
    Ok(best)
}

/// ELOCC verdict plus the first `α` at which the entropy ordering flips.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EloccVerdict<T> {
    pub direction: Direction,
    pub crossing_alpha: Option<Alpha<T>>,
}

/// `a → b` by ELOCC iff `S_α(a) ≥ S_α(b)` at every `α`, including the
/// `0`, `1` and `∞` limits.
pub fn elocc_compare<T: Real>(a: &RenyiCurve<T>, b: &RenyiCurve<T>, tol: T) -> Result<EloccVerdict<T>> {
    if a.alphas.len() != b.alphas.len()
        || a.alphas.iter().zip(&b.alphas).any(|(x, y)| (*x - *y).abs() > T::floor_tol(1e-12) * x.abs().max(T::one()))
    {
        return Err(Error::Validation("Rényi curves use different alpha grids".into()));
    }
    let pa = a.points();
    let pb = b.points();
    let mut forward = true;
    let mut backward = true;
    let mut first_sign: Option<bool> = None;
    let mut crossing = None;
    for ((alpha, sa), (_, sb)) in pa.iter().zip(&pb) {
        let diff = *sa - *sb;
        if diff < -tol {
            forward = false;
        }
        if diff > tol {
            backward = false;
        }
        if diff.abs() > tol {
            let positive = diff > T::zero();
            match first_sign {
                None => first_sign = Some(positive),
                Some(s) if s != positive && crossing.is_none() => crossing = Some(*alpha),
                _ => {}
            }
        }
    }
    Ok(EloccVerdict { direction: Direction::from_flags(forward, backward), crossing_alpha: crossing })
}
