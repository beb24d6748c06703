//! Periodic transverse-field Ising chain
//!
//! ```text
//! H = -Σ_{i=1}^{N} (σˣᵢ σˣᵢ₊₁ + h σᶻᵢ),   site N+1 ≡ site 1
//! ```
//!
//! In the z-basis `σᶻ` is diagonal (`+1` up, `-1` down) and each bond term
//! flips two neighbouring spins, so `H` is real symmetric and commutes with
//! the global flip parity. For `N = 2` the bonds `(1,2)` and `(2,1)` are the
//! same pair and both are kept, as the literal sum prescribes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{check_sites, SectorMap};
use crate::linalg::SymMatrix;
use crate::{Error, Real, Result};

/// Largest sector dimension `dense_matrix` will assemble.
pub const DENSE_CAP: usize = 1 << 13;

const PAR_THRESHOLD: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec<T> {
    pub n_sites: usize,
    pub field: T,
}

impl<T: Real> HamiltonianSpec<T> {
    pub fn new(n_sites: usize, field: T) -> Result<Self> {
        let spec = HamiltonianSpec { n_sites, field };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_sites(self.n_sites)?;
        if !self.field.is_finite() {
            return Err(Error::Domain(format!("field must be finite, got {}", self.field)));
        }
        Ok(())
    }

    /// Ising coupling; fixed to one, `h` is measured in its units.
    pub fn coupling(&self) -> T {
        T::one()
    }

    /// Bit masks of the `N` periodic bonds `(i, i+1 mod N)`.
    pub fn bond_masks(&self) -> Vec<u32> {
        let n = self.n_sites;
        (0..n).map(|i| (1u32 << i) | (1u32 << ((i + 1) % n))).collect()
    }

    /// `⟨s|H|s⟩ = -h (N - 2·#down)`.
    #[inline]
    pub fn diagonal(&self, bits: u32) -> T {
        let down = bits.count_ones() as usize;
        -self.field * (T::of_usize(self.n_sites) - T::of_usize(2 * down))
    }
}

fn check_pair<T: Real>(spec: &HamiltonianSpec<T>, sector: &SectorMap) -> Result<()> {
    spec.validate()?;
    if spec.n_sites != sector.n_sites() {
        return Err(Error::Shape(format!(
            "Hamiltonian has {} sites but sector map has {}",
            spec.n_sites,
            sector.n_sites()
        )));
    }
    Ok(())
}

/// Matrix-free `w = H v` on one parity sector.
///
/// Each output element gathers its own contributions in a fixed bond order,
/// so the result is bit-identical for any thread count.
pub fn apply_hamiltonian<T: Real>(spec: &HamiltonianSpec<T>, sector: &SectorMap, v: &[T]) -> Result<Vec<T>> {
    check_pair(spec, sector)?;
    if v.len() != sector.dim() {
        return Err(Error::Shape(format!("vector length {} != sector dimension {}", v.len(), sector.dim())));
    }
    let mut w = vec![T::zero(); v.len()];
    apply_into(spec, &spec.bond_masks(), sector.labels(), v, &mut w);
    Ok(w)
}

/// Unchecked kernel shared with the eigensolver.
pub(crate) fn apply_into<T: Real>(spec: &HamiltonianSpec<T>, masks: &[u32], labels: &[u32], v: &[T], w: &mut [T]) {
    let coupling = spec.coupling();
    let row = |r: usize, s: u32| {
        let mut acc = spec.diagonal(s) * v[r];
        for &m in masks {
            acc = acc - coupling * v[SectorMap::rank_unchecked(s ^ m)];
        }
        acc
    };
    if w.len() < PAR_THRESHOLD {
        for (r, (wr, &s)) in w.iter_mut().zip(labels).enumerate() {
            *wr = row(r, s);
        }
    } else {
        w.par_chunks_mut(PAR_THRESHOLD).enumerate().for_each(|(c, chunk)| {
            let base = c * PAR_THRESHOLD;
            for (k, wr) in chunk.iter_mut().enumerate() {
                let r = base + k;
                *wr = row(r, labels[r]);
            }
        });
    }
}

/// Explicit sector matrix, for cross-validation at small `N`.
pub fn dense_matrix<T: Real>(spec: &HamiltonianSpec<T>, sector: &SectorMap) -> Result<SymMatrix<T>> {
    check_pair(spec, sector)?;
    let dim = sector.dim();
    if dim > DENSE_CAP {
        return Err(Error::Size(format!("sector dimension {dim} exceeds dense cap {DENSE_CAP}")));
    }
    let mut m = SymMatrix::zeros(dim);
    for (r, &s) in sector.labels().iter().enumerate() {
        m.set(r, r, spec.diagonal(s));
        for mask in spec.bond_masks() {
            let c = SectorMap::rank_unchecked(s ^ mask);
            m.set(c, r, m.get(c, r) - spec.coupling());
        }
    }
    Ok(m)
}
