//! Ground states of the even-parity sector.
//!
//! The Krylov path is a thick-restart Lanczos iteration with full
//! (two-pass classical Gram-Schmidt) reorthogonalization inside a bounded
//! window. When the window fills, the lowest Ritz vectors are kept together
//! with the current residual direction and the projected matrix restarts in
//! arrowhead form. The small projected matrix is rebuilt from the computed
//! projections rather than assumed tridiagonal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{build_sector_map, Parity, SectorMap};
use crate::hamiltonian::{apply_into, dense_matrix, HamiltonianSpec, DENSE_CAP};
use crate::linalg::{axpy, combine_many, dot, norm, project_out, scale, sym_eigen, SymMatrix};
use crate::{Error, Real, Result};

/// Gap below which the eigenvector is flagged as unreliable.
pub const NEAR_DEGENERATE_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Krylov,
    Dense,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions<T> {
    /// Residual 2-norm bound relative to `max(1, |E₀|)`.
    pub tolerance: T,
    /// Cap on Hamiltonian applications.
    pub max_iterations: usize,
    pub seed: u64,
    /// Reorthogonalization window (number of stored Krylov vectors).
    pub krylov_block: usize,
    /// Diagonalize the explicit matrix when the sector fits under the dense cap.
    pub prefer_dense: bool,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tolerance: T::floor_tol(1e-12),
            max_iterations: 1000,
            seed: 0x5eed_1a7c,
            krylov_block: 16,
            prefer_dense: false,
        }
    }
}

impl<T: Real> SolverOptions<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > T::zero()) {
            return Err(Error::Validation(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Validation("max_iterations must be at least 1".into()));
        }
        if self.krylov_block < 3 {
            return Err(Error::Validation(format!("krylov_block must be at least 3, got {}", self.krylov_block)));
        }
        Ok(())
    }
}

/// `|G(h)⟩` over the ascending even-sector labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState<T> {
    pub n_sites: usize,
    pub field: T,
    pub energy: T,
    pub amplitudes: Vec<T>,
    pub residual_norm: T,
    /// Hamiltonian applications (Krylov) or matrix dimension (dense).
    pub iterations: usize,
    pub method: SolveMethod,
    /// First excited in-sector value minus `energy`, when available.
    pub gap: Option<T>,
    pub near_degenerate: bool,
}

impl<T: Real> GroundState<T> {
    pub fn parity(&self) -> Parity {
        Parity::Even
    }
}

/// Lowest eigenpair of the even-sector Hamiltonian.
pub fn ground_state<T: Real>(spec: &HamiltonianSpec<T>, opts: &SolverOptions<T>) -> Result<GroundState<T>> {
    spec.validate()?;
    opts.validate()?;
    let sector = build_sector_map(spec.n_sites, Parity::Even)?;
    let masks = spec.bond_masks();
    let apply = |v: &[T], w: &mut [T]| apply_into(spec, &masks, sector.labels(), v, w);

    let (energy, mut amplitudes, iterations, method, gap) = if opts.prefer_dense && sector.dim() <= DENSE_CAP {
        let (e, x, gap) = dense_ground(spec, &sector)?;
        (e, x, sector.dim(), SolveMethod::Dense, gap)
    } else {
        let k = krylov_ground(sector.dim(), apply, opts)?;
        (k.value, k.vector, k.matvecs, SolveMethod::Krylov, k.gap)
    };

    fix_sign(&mut amplitudes);
    let mut hx = vec![T::zero(); amplitudes.len()];
    apply(&amplitudes, &mut hx);
    axpy(-energy, &amplitudes, &mut hx);
    let residual_norm = norm(&hx);

    let near_degenerate = gap.is_some_and(|g| g < T::of(NEAR_DEGENERATE_GAP));
    Ok(GroundState {
        n_sites: spec.n_sites,
        field: spec.field,
        energy,
        amplitudes,
        residual_norm,
        iterations,
        method,
        gap,
        near_degenerate,
    })
}

fn dense_ground<T: Real>(spec: &HamiltonianSpec<T>, sector: &SectorMap) -> Result<(T, Vec<T>, Option<T>)> {
    let m = dense_matrix(spec, sector)?;
    let eig = sym_eigen(&m, true)?;
    let vectors = eig.vectors.expect("vectors requested");
    let gap = eig.values.get(1).map(|&e1| e1 - eig.values[0]);
    Ok((eig.values[0], vectors.column(0).to_vec(), gap))
}

/// Largest-magnitude amplitude (first on ties) made positive.
fn fix_sign<T: Real>(x: &mut [T]) {
    let mut best = 0;
    for (i, v) in x.iter().enumerate() {
        if v.abs() > x[best].abs() {
            best = i;
        }
    }
    if x.get(best).is_some_and(|v| *v < T::zero()) {
        scale(-T::one(), x);
    }
}

pub(crate) struct KrylovResult<T> {
    pub value: T,
    pub vector: Vec<T>,
    pub matvecs: usize,
    pub gap: Option<T>,
}

fn start_vector<T: Real>(dim: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<T> = (0..dim).map(|_| T::of(rng.gen_range(-1.0..1.0))).collect();
    let nv = norm(&v);
    scale(T::one() / nv, &mut v);
    v
}

/// Removes the `basis` components of `w`; returns the accumulated
/// coefficients. The two most recent vectors are subtracted first, then a
/// full pass runs, and a second full pass only if it cancelled more than
/// `1/√2` of the norm.
fn orthogonalize<T: Real>(basis: &[Vec<T>], w: &mut [T]) -> Vec<T> {
    let k = basis.len();
    let mut coeffs = vec![T::zero(); k];
    for i in (k.saturating_sub(2)..k).rev() {
        let c = dot(&basis[i], w);
        axpy(-c, &basis[i], w);
        coeffs[i] = coeffs[i] + c;
    }
    let eta = T::of(std::f64::consts::FRAC_1_SQRT_2);
    for _pass in 0..2 {
        let before = norm(w);
        let c = project_out(basis, w);
        for (acc, ci) in coeffs.iter_mut().zip(c) {
            *acc = *acc + ci;
        }
        if norm(w) > eta * before {
            break;
        }
    }
    coeffs
}

/// Lowest eigenpair of a symmetric operator on `R^dim`.
pub(crate) fn krylov_ground<T: Real, F>(dim: usize, apply: F, opts: &SolverOptions<T>) -> Result<KrylovResult<T>>
where
    F: Fn(&[T], &mut [T]),
{
    let window = opts.krylov_block.min(dim).max(1);
    let keep = (window / 3).max(1).min(window.saturating_sub(2)).max(1);
    let tiny = T::epsilon() * T::of(16.0);

    let mut basis: Vec<Vec<T>> = Vec::with_capacity(window);
    basis.push(start_vector(dim, opts.seed));
    // Projected matrix, stored dense at full window size.
    let mut proj = SymMatrix::<T>::zeros(window);
    let mut matvecs = 0usize;
    let mut best_residual = f64::INFINITY;
    let mut scale_est = T::one();

    loop {
        let j = basis.len() - 1;
        let mut w = vec![T::zero(); dim];
        apply(&basis[j], &mut w);
        matvecs += 1;
        let coeffs = orthogonalize(&basis, &mut w);
        for (i, &c) in coeffs.iter().enumerate() {
            proj.set(i, j, c);
            proj.set(j, i, c);
        }
        let beta = norm(&w);

        let m = basis.len();
        let sub = SymMatrix::from_fn(m, |a, b| proj.get(a, b));
        let eig = sym_eigen(&sub, true)?;
        let ritz = eig.vectors.as_ref().expect("vectors requested");
        let theta = eig.values[0];
        scale_est = scale_est.max(theta.abs()).max(eig.values[m - 1].abs());
        let resid_est = (beta * ritz.get(m - 1, 0)).abs();
        let threshold = opts.tolerance * T::one().max(theta.abs());
        best_residual = best_residual.min(resid_est.to_f64().unwrap_or(f64::INFINITY));

        let exhausted = beta <= tiny * scale_est || m == dim;
        if resid_est <= threshold || exhausted {
            let x = combine(&basis, ritz.column(0));
            let mut hx = vec![T::zero(); dim];
            apply(&x, &mut hx);
            matvecs += 1;
            let value = dot(&x, &hx);
            axpy(-value, &x, &mut hx);
            let true_resid = norm(&hx);
            best_residual = best_residual.min(true_resid.to_f64().unwrap_or(f64::INFINITY));
            if true_resid <= opts.tolerance * T::one().max(value.abs()) || exhausted {
                let gap = (m > 1).then(|| eig.values[1] - theta);
                return Ok(KrylovResult { value, vector: x, matvecs, gap });
            }
        }
        if matvecs >= opts.max_iterations {
            return Err(Error::Convergence { iterations: matvecs, best_residual });
        }

        scale(T::one() / beta, &mut w);
        if m < window {
            proj.set(m, j, beta);
            proj.set(j, m, beta);
            basis.push(w);
            continue;
        }

        // Thick restart: lowest `keep` Ritz vectors plus the residual direction.
        let sets: Vec<Vec<T>> = (0..keep).map(|k| ritz.column(k).to_vec()).collect();
        let mut kept = combine_many(&basis, &sets);
        for v in kept.iter_mut() {
            let nv = norm(v);
            scale(T::one() / nv, v);
        }
        proj = SymMatrix::zeros(window);
        for k in 0..keep {
            proj.set(k, k, eig.values[k]);
            let coupling = beta * ritz.get(m - 1, k);
            proj.set(k, keep, coupling);
            proj.set(keep, k, coupling);
        }
        basis = kept;
        basis.push(w);
    }
}

fn combine<T: Real>(basis: &[Vec<T>], coeffs: &[T]) -> Vec<T> {
    let mut x = combine_many(basis, &[coeffs.to_vec()]).pop().expect("one set");
    let nx = norm(&x);
    scale(T::one() / nx, &mut x);
    x
}

/// Even-sector ground energy from the Jordan-Wigner solution,
/// `-Σ_m sqrt(1 + h² - 2h cos k_m)` with antiperiodic momenta `k_m = (2m+1)π/N`.
pub fn free_fermion_ground_energy<T: Real>(n_sites: usize, field: T) -> Result<T> {
    crate::basis::check_sites(n_sites)?;
    if !field.is_finite() || field < T::zero() {
        return Err(Error::Domain(format!("field must be finite and non-negative, got {field}")));
    }
    let n = T::of_usize(n_sites);
    let one = T::one();
    let two = T::of(2.0);
    let energy = (0..n_sites)
        .map(|m| {
            let k = (two * T::of_usize(m) + one) * T::PI() / n;
            (one + field * field - two * field * k.cos()).max(T::zero()).sqrt()
        })
        .fold(T::zero(), |acc, x| acc + x);
    Ok(-energy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(n: usize, h: f64, dense: bool) -> GroundState<f64> {
        let opts = SolverOptions { prefer_dense: dense, ..SolverOptions::default() };
        ground_state(&HamiltonianSpec::new(n, h).unwrap(), &opts).unwrap()
    }

    #[test]
    fn two_sites_unit_field() {
        for dense in [false, true] {
            let gs = solve(2, 1.0, dense);
            assert!((gs.energy + 2.0 * 2f64.sqrt()).abs() < 1e-13);
        }
    }

    #[test]
    fn classical_limit_is_even_ghz() {
        let gs = solve(4, 0.0, false);
        assert!((gs.energy + 4.0).abs() < 1e-12);
        let uniform = 1.0 / 8f64.sqrt();
        for a in &gs.amplitudes {
            assert!((a - uniform).abs() < 1e-10);
        }
    }

    #[test]
    fn eight_sites_critical() {
        let gs = solve(8, 1.0, false);
        assert!((gs.energy - (-10.2517)).abs() < 5e-5);
        let exact = free_fermion_ground_energy(8, 1.0).unwrap();
        assert!((gs.energy - exact).abs() / 8.0 < 1e-9);
        let dense = solve(8, 1.0, true);
        assert!((gs.energy - dense.energy).abs() < 1e-10 * dense.energy.abs());
        for (a, b) in gs.amplitudes.iter().zip(&dense.amplitudes) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn free_fermion_values() {
        for n in [2, 4, 10, 22] {
            assert!((free_fermion_ground_energy(n, 0.0).unwrap() + n as f64).abs() < 1e-12);
        }
        assert!((free_fermion_ground_energy(2, 1.0).unwrap() + 2.0 * 2f64.sqrt()).abs() < 1e-14);
        // closed form at h = 1: -2 / sin(π / 2N)
        let e8 = free_fermion_ground_energy(8, 1.0).unwrap();
        assert!((e8 + 2.0 / (std::f64::consts::PI / 16.0).sin()).abs() < 1e-12);
        // E/N -> -4/π, with a 1/N² correction
        let gaps: Vec<f64> = (4..=28)
            .step_by(4)
            .map(|n| (free_fermion_ground_energy(n, 1.0).unwrap() / n as f64 + 4.0 / std::f64::consts::PI).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(gaps[gaps.len() - 1] < 1e-3);
        assert!(free_fermion_ground_energy(4, -1.0).is_err());
    }

    #[test]
    fn invariants_hold() {
        for (n, h) in [(6, 0.5), (10, 1.0), (12, 2.5), (14, 0.9)] {
            let gs = solve(n, h, false);
            assert!((norm(&gs.amplitudes) - 1.0).abs() < 1e-12);
            assert!(gs.residual_norm <= 1e-12 * gs.energy.abs().max(1.0));
            assert!(gs.energy <= -(n as f64) * h.max(1.0) + 1e-9);
            assert_eq!(gs.method, SolveMethod::Krylov);
            assert!(gs.gap.unwrap() > 1e-3);
        }
    }

    #[test]
    fn deterministic() {
        let a = solve(12, 1.3, false);
        let b = solve(12, 1.3, false);
        assert_eq!(a, b);
        let bits = |g: &GroundState<f64>| g.amplitudes.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn energy_non_increasing_in_field() {
        let mut prev = f64::INFINITY;
        for k in 0..=20 {
            let e = solve(10, 0.5 + 0.1 * k as f64, false).energy;
            assert!(e <= prev);
            prev = e;
        }
    }

    #[test]
    fn small_window_restarts_converge() {
        let opts = SolverOptions { krylov_block: 6, max_iterations: 5000, ..SolverOptions::default() };
        let gs = ground_state(&HamiltonianSpec::new(12, 1.0).unwrap(), &opts).unwrap();
        let exact = free_fermion_ground_energy(12, 1.0f64).unwrap();
        assert!((gs.energy - exact).abs() / 12.0 < 1e-9);
        assert!(gs.iterations > 6);
    }

    #[test]
    fn convergence_error_reports_residual() {
        let opts = SolverOptions { max_iterations: 3, ..SolverOptions::default() };
        match ground_state(&HamiltonianSpec::new(12, 1.0).unwrap(), &opts) {
            Err(Error::Convergence { iterations, best_residual }) => {
                assert_eq!(iterations, 3);
                assert!(best_residual.is_finite() && best_residual > 0.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn single_precision_solve() {
        let opts = SolverOptions::<f32>::default();
        let gs = ground_state(&HamiltonianSpec::new(6, 1.5f32).unwrap(), &opts).unwrap();
        let exact = free_fermion_ground_energy(6, 1.5f64).unwrap();
        assert!((gs.energy as f64 - exact).abs() < 1e-4);
    }

    #[test]
    fn invalid_options() {
        let spec = HamiltonianSpec::new(4, 1.0).unwrap();
        let bad = SolverOptions { tolerance: 0.0, ..SolverOptions::default() };
        assert!(matches!(ground_state(&spec, &bad), Err(Error::Validation(_))));
        let bad = SolverOptions { max_iterations: 0, ..SolverOptions::default() };
        assert!(ground_state(&spec, &bad).is_err());
    }
}
