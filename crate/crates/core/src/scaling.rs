//! Finite-size extrapolation `h_min(N) = a / N^b + c`.
//!
//! The model is linear in `(a, c)` for fixed `b`, so the residual is profiled
//! over `b` alone: a 400-point logarithmic scan on `[0.25, 3]` brackets the
//! optimum and golden-section search narrows the bracket to `1e-6`.

use serde::{Deserialize, Serialize};

use crate::convertibility::Observable;
use crate::{Error, Real, Result};

pub const EXPONENT_RANGE: (f64, f64) = (0.25, 3.0);
pub const SCAN_POINTS: usize = 400;
pub const EXPONENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit<T> {
    pub observable: Option<Observable>,
    pub a: T,
    pub b: T,
    /// Thermodynamic-limit value.
    pub c: T,
    pub rms_residual: T,
    pub points: Vec<(usize, T)>,
}

impl<T: Real> ScalingFit<T> {
    pub fn predict(&self, n_sites: usize) -> T {
        self.a / T::of_usize(n_sites).powf(self.b) + self.c
    }

    pub fn with_observable(mut self, obs: Observable) -> Self {
        self.observable = Some(obs);
        self
    }
}

/// Best `(a, c)` for fixed `b` and the residual sum of squares.
fn linear_part<T: Real>(points: &[(usize, T)], b: T) -> (T, T, T) {
    let n = T::of_usize(points.len());
    let xs: Vec<T> = points.iter().map(|&(size, _)| T::of_usize(size).powf(-b)).collect();
    let mean_x = xs.iter().copied().fold(T::zero(), |s, x| s + x) / n;
    let mean_y = points.iter().fold(T::zero(), |s, p| s + p.1) / n;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&x, &(_, y)) in xs.iter().zip(points) {
        sxx = sxx + (x - mean_x) * (x - mean_x);
        sxy = sxy + (x - mean_x) * (y - mean_y);
    }
    let a = sxy / sxx;
    let c = mean_y - a * mean_x;
    let ssr = xs.iter().zip(points).fold(T::zero(), |s, (&x, &(_, y))| {
        let r = y - a * x - c;
        s + r * r
    });
    (a, c, ssr)
}

pub fn fit_power_law<T: Real>(points: &[(usize, T)]) -> Result<ScalingFit<T>> {
    let mut sizes: Vec<usize> = points.iter().map(|p| p.0).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 distinct sizes, got {}", sizes.len())));
    }
    if sizes[0] == 0 {
        return Err(Error::Fit("system size must be positive".into()));
    }
    if let Some(p) = points.iter().find(|p| !p.1.is_finite()) {
        return Err(Error::Fit(format!("non-finite minimum location at N = {}", p.0)));
    }

    let (lo, hi) = (T::of(EXPONENT_RANGE.0), T::of(EXPONENT_RANGE.1));
    let ratio = (hi / lo).ln();
    let grid: Vec<T> =
        (0..SCAN_POINTS).map(|k| lo * (ratio * T::of_usize(k) / T::of_usize(SCAN_POINTS - 1)).exp()).collect();
    let ssr: Vec<T> = grid.iter().map(|&b| linear_part(points, b).2).collect();
    if ssr.iter().any(|s| !s.is_finite()) {
        return Err(Error::Fit("degenerate size set".into()));
    }
    let best = (0..SCAN_POINTS).fold(0, |k, j| if ssr[j] < ssr[k] { j } else { k });

    let mut left = grid[best.saturating_sub(1)];
    let mut right = grid[(best + 1).min(SCAN_POINTS - 1)];
    let inv_phi = T::of((5f64.sqrt() - 1.0) / 2.0);
    let cost = |b: T| linear_part(points, b).2;
    let mut x1 = right - inv_phi * (right - left);
    let mut x2 = left + inv_phi * (right - left);
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    let tol = T::of(EXPONENT_TOLERANCE).max(T::epsilon().sqrt());
    while right - left > tol {
        if f1 <= f2 {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - inv_phi * (right - left);
            f1 = cost(x1);
        } else {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + inv_phi * (right - left);
            f2 = cost(x2);
        }
    }
    let mut b = (left + right) / T::of(2.0);
    // keep the scan optimum if refinement did not improve on it
    if cost(b) > ssr[best] {
        b = grid[best];
    }
    let (a, c, ssr) = linear_part(points, b);
    Ok(ScalingFit {
        observable: None,
        a,
        b,
        c,
        rms_residual: (ssr / T::of_usize(points.len())).sqrt(),
        points: points.to_vec(),
    })
}
