//! Reduced spectra of contiguous blocks and Rényi entropies.
//!
//! For a block `A` of `L` sites the state is reshaped into the coefficient
//! matrix `G[a][b]` (block bits `a`, remaining bits `b`) and the spectrum of
//! `ρ_A = G Gᵀ` is taken on the smaller side. Parity conservation makes `G`
//! block diagonal: an even-sector label splits into `a`, `b` of equal parity,
//! so the Gram matrix falls apart into two independent halves.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eigensolver::GroundState;
use crate::linalg::{dot, sym_eigen, SymMatrix};
use crate::{Error, Real, Result};

/// Eigenvalues at or below this count as zero for the `α = 0` rank.
pub const RANK_THRESHOLD: f64 = 1e-12;
/// Largest negative eigenvalue tolerated before clamping to zero.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// Contiguous run of sites on the ring; may wrap past site `N-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub start: usize,
    pub len: usize,
}

impl Block {
    pub fn pair(start: usize) -> Self {
        Block { start, len: 2 }
    }

    pub fn half_chain(n_sites: usize) -> Self {
        Block { start: 0, len: n_sites / 2 }
    }

    /// Accepts an ordered site list such as `[3, 4]` or `[7, 0]` on `N = 8`.
    pub fn from_sites(sites: &[usize], n_sites: usize) -> Result<Self> {
        let Some(&start) = sites.first() else {
            return Err(Error::Shape("empty block".into()));
        };
        if let Some(&s) = sites.iter().find(|&&s| s >= n_sites) {
            return Err(Error::Shape(format!("site {s} outside chain of {n_sites}")));
        }
        if sites.windows(2).any(|w| w[1] != (w[0] + 1) % n_sites) || sites.len() > n_sites {
            return Err(Error::UnsupportedBlock(format!("sites {sites:?} are not a contiguous run")));
        }
        let block = Block { start, len: sites.len() };
        block.validate(n_sites)?;
        Ok(block)
    }

    pub fn sites(&self, n_sites: usize) -> Vec<usize> {
        (0..self.len).map(|k| (self.start + k) % n_sites).collect()
    }

    pub fn validate(&self, n_sites: usize) -> Result<()> {
        if self.len == 0 || self.len >= n_sites {
            return Err(Error::Shape(format!("block length {} outside [1, {}]", self.len, n_sites - 1)));
        }
        if self.start >= n_sites {
            return Err(Error::Shape(format!("block start {} outside chain of {n_sites}", self.start)));
        }
        Ok(())
    }
}

/// Descending eigenvalues of a block's reduced density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedSpectrum<T> {
    pub n_sites: usize,
    pub field: T,
    pub block: Block,
    /// Length `2^min(L, N-L)`, descending, non-negative.
    pub lambdas: Vec<T>,
    /// Sum before clamping.
    pub trace: T,
}

impl<T: Real> ReducedSpectrum<T> {
    /// Wraps externally obtained eigenvalues (e.g. reloaded from disk).
    pub fn from_lambdas(n_sites: usize, field: T, block: Block, lambdas: Vec<T>) -> Result<Self> {
        let trace = lambdas.iter().copied().fold(T::zero(), |a, b| a + b);
        finish(n_sites, field, block, lambdas, trace)
    }

    pub fn block_size(&self) -> usize {
        self.block.len
    }
}

fn finish<T: Real>(
    n_sites: usize,
    field: T,
    block: Block,
    mut lambdas: Vec<T>,
    trace: T,
) -> Result<ReducedSpectrum<T>> {
    let neg = T::floor_tol(NEGATIVE_TOLERANCE);
    if let Some(bad) = lambdas.iter().find(|&&x| !(x >= -neg)) {
        return Err(Error::Validation(format!("reduced spectrum has eigenvalue {bad} below -{neg}")));
    }
    for x in lambdas.iter_mut() {
        *x = x.max(T::zero());
    }
    lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok(ReducedSpectrum { n_sites, field, block, lambdas, trace })
}

/// Spectrum of `Tr_rest |G⟩⟨G|` for a contiguous `block`.
pub fn reduced_spectrum<T: Real>(state: &GroundState<T>, block: Block) -> Result<ReducedSpectrum<T>> {
    let n = state.n_sites;
    block.validate(n)?;
    if state.amplitudes.len() != 1usize << (n - 1) {
        return Err(Error::Shape(format!(
            "state has {} amplitudes, expected {} for N = {n}",
            state.amplitudes.len(),
            1usize << (n - 1)
        )));
    }
    let l = block.len;
    let rest = n - l;
    let block_sites = block.sites(n);
    let mut in_block = vec![false; n];
    for &s in &block_sites {
        in_block[s] = true;
    }
    let rest_sites: Vec<usize> = (0..n).filter(|&s| !in_block[s]).collect();

    // Rows index the smaller side.
    let block_is_rows = l <= rest;
    let (row_bits, col_bits) = if block_is_rows { (l, rest) } else { (rest, l) };
    let rows = 1usize << (row_bits - 1);
    let cols = 1usize << (col_bits - 1);
    let mut mats = [vec![T::zero(); rows * cols], vec![T::zero(); rows * cols]];

    for (r, &amp) in state.amplitudes.iter().enumerate() {
        let label = crate::basis::label_bits(r as u32, crate::Parity::Even);
        let a = gather_bits(label, &block_sites);
        let b = gather_bits(label, &rest_sites);
        let (row, col) = if block_is_rows { (a, b) } else { (b, a) };
        // row and col share parity; `>> 1` is the rank within that parity.
        let p = (row.count_ones() & 1) as usize;
        mats[p][(row >> 1) as usize * cols + (col >> 1) as usize] = amp;
    }

    let mut lambdas = Vec::with_capacity(2 * rows);
    for m in &mats {
        let mut gram = SymMatrix::zeros(rows);
        for i in 0..rows {
            for j in 0..=i {
                let g = dot(&m[i * cols..(i + 1) * cols], &m[j * cols..(j + 1) * cols]);
                gram.set(i, j, g);
                gram.set(j, i, g);
            }
        }
        lambdas.extend(sym_eigen(&gram, false)?.values);
    }
    let trace = lambdas.iter().copied().fold(T::zero(), |a, b| a + b);
    finish(n, state.field, block, lambdas, trace)
}

#[inline]
fn gather_bits(label: u32, sites: &[usize]) -> u32 {
    sites.iter().enumerate().fold(0, |acc, (k, &s)| acc | ((label >> s) & 1) << k)
}

/// Rényi order, including the `0` and `∞` limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Alpha<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> Alpha<T> {
    pub fn as_real(self) -> T {
        match self {
            Alpha::Finite(a) => a,
            Alpha::Infinity => T::infinity(),
        }
    }
}

impl<T: Real> fmt::Display for Alpha<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(a) => write!(f, "{a}"),
            Alpha::Infinity => f.write_str("inf"),
        }
    }
}

impl<T: Real> FromStr for Alpha<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Alpha::Infinity);
        }
        let x: f64 = s.parse().map_err(|_| Error::Domain(format!("cannot parse alpha {s:?}")))?;
        if x.is_infinite() && x > 0.0 {
            return Ok(Alpha::Infinity);
        }
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("alpha must be non-negative, got {s}")));
        }
        Ok(Alpha::Finite(T::of(x)))
    }
}

/// `S_α = log₂(Σ λ^α) / (1 - α)` over eigenvalues above the rank threshold.
pub fn renyi_entropy<T: Real>(lambdas: &[T], alpha: Alpha<T>) -> Result<T> {
    let thr = T::of(RANK_THRESHOLD);
    let support = lambdas.iter().copied().filter(|&x| x > thr);
    let a = match alpha {
        Alpha::Infinity => {
            let top = lambdas.iter().copied().fold(T::zero(), T::max);
            return Ok(-top.log2());
        }
        Alpha::Finite(a) if !(a >= T::zero()) => {
            return Err(Error::Domain(format!("alpha must be non-negative, got {a}")));
        }
        Alpha::Finite(a) => a,
    };
    if a == T::zero() {
        return Ok(T::of_usize(support.count()).log2());
    }
    if a == T::one() {
        return Ok(-support.map(|x| x * x.log2()).fold(T::zero(), |s, v| s + v));
    }
    if a.is_infinite() {
        return renyi_entropy(lambdas, Alpha::Infinity);
    }
    let sum = support.map(|x| x.powf(a)).fold(T::zero(), |s, v| s + v);
    Ok(sum.log2() / (T::one() - a))
}

/// `α` grid with `0`, `1` and `∞` carried separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenyiCurve<T> {
    /// Strictly increasing, positive, finite, never exactly one.
    pub alphas: Vec<T>,
    pub values: Vec<T>,
    pub s_vn: T,
    pub s_zero: T,
    pub s_inf: T,
}

impl<T: Real> RenyiCurve<T> {
    pub fn compute(lambdas: &[T], alphas: &[T]) -> Result<Self> {
        validate_alpha_grid(alphas)?;
        let values = alphas.iter().map(|&a| renyi_entropy(lambdas, Alpha::Finite(a))).collect::<Result<Vec<_>>>()?;
        Ok(RenyiCurve {
            alphas: alphas.to_vec(),
            values,
            s_vn: renyi_entropy(lambdas, Alpha::Finite(T::one()))?,
            s_zero: renyi_entropy(lambdas, Alpha::Finite(T::zero()))?,
            s_inf: renyi_entropy(lambdas, Alpha::Infinity)?,
        })
    }

    /// All `(α, S_α)` points in increasing `α`, limits included.
    pub fn points(&self) -> Vec<(Alpha<T>, T)> {
        let mut out = vec![(Alpha::Finite(T::zero()), self.s_zero)];
        let mut vn_pending = true;
        for (&a, &s) in self.alphas.iter().zip(&self.values) {
            if vn_pending && a > T::one() {
                out.push((Alpha::Finite(T::one()), self.s_vn));
                vn_pending = false;
            }
            out.push((Alpha::Finite(a), s));
        }
        if vn_pending {
            out.push((Alpha::Finite(T::one()), self.s_vn));
        }
        out.push((Alpha::Infinity, self.s_inf));
        out
    }
}

pub fn validate_alpha_grid<T: Real>(alphas: &[T]) -> Result<()> {
    if alphas.iter().any(|&a| !(a > T::zero()) || !a.is_finite() || a == T::one()) {
        return Err(Error::Domain("alpha grid must be positive, finite and exclude 1".into()));
    }
    if alphas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("alpha grid must be strictly increasing".into()));
    }
    Ok(())
}

/// 60 log-spaced points on `[0.05, 5]` followed by `10` and `50`.
pub fn default_alpha_grid<T: Real>() -> Vec<T> {
    let (lo, hi, n) = (0.05f64, 5.0f64, 60);
    let mut grid: Vec<T> = (0..n)
        .map(|k| {
            let t = k as f64 / (n - 1) as f64;
            T::of(lo * (hi / lo).powf(t))
        })
        .collect();
    grid.push(T::of(10.0));
    grid.push(T::of(50.0));
    grid
}
