//! z-basis of an `N`-site spin-1/2 chain restricted to one spin-flip parity
//! sector.
//!
//! Bit `i` of a label encodes site `i`: `0` is spin up along z, `1` is spin
//! down. The global flip `Π σᶻ` is diagonal with eigenvalue `(-1)^popcount`,
//! so a sector is the set of labels with fixed popcount parity. The all-up
//! state is label 0 of the even sector.
//!
//! Within each pair of labels `{2k, 2k+1}` exactly one has a given parity, so
//! the ascending label list of either sector satisfies `rank(s) = s >> 1`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MAX_SITES: usize = 28;
pub const MIN_SITES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_bits(bits: u32) -> Self {
        if bits.count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn bit(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// A computational basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLabel(pub u32);

impl BasisLabel {
    pub fn parity(self) -> Parity {
        Parity::of_bits(self.0)
    }

    /// Number of down spins.
    pub fn down_count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_down(self, site: usize) -> bool {
        self.0 >> site & 1 == 1
    }
}

/// Ascending labels of one parity sector with O(1) rank lookup.
#[derive(Debug, Clone)]
pub struct SectorMap {
    n_sites: usize,
    parity: Parity,
    labels: Vec<u32>,
}

impl SectorMap {
    pub fn new(n_sites: usize, parity: Parity) -> Result<Self> {
        check_sites(n_sites)?;
        let dim = 1usize << (n_sites - 1);
        let labels = (0..dim as u32).map(|r| label_bits(r, parity)).collect();
        Ok(SectorMap { n_sites, parity, labels })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label_of(&self, rank: usize) -> BasisLabel {
        BasisLabel(self.labels[rank])
    }

    /// Rank of `label`, or `None` if it lies outside this sector or chain.
    pub fn rank(&self, label: BasisLabel) -> Option<usize> {
        if (label.0 as u64) >> self.n_sites != 0 || label.parity() != self.parity {
            return None;
        }
        Some((label.0 >> 1) as usize)
    }

    /// Rank of a label already known to be in the sector.
    #[inline]
    pub(crate) fn rank_unchecked(bits: u32) -> usize {
        (bits >> 1) as usize
    }
}

/// Builds the sector map; `n_sites` must lie in `[2, 28]`.
pub fn build_sector_map(n_sites: usize, parity: Parity) -> Result<SectorMap> {
    SectorMap::new(n_sites, parity)
}

#[inline]
pub(crate) fn label_bits(rank: u32, parity: Parity) -> u32 {
    let low = (rank.count_ones() ^ parity.bit()) & 1;
    rank << 1 | low
}

pub(crate) fn check_sites(n_sites: usize) -> Result<()> {
    if !(MIN_SITES..=MAX_SITES).contains(&n_sites) {
        return Err(Error::Size(format!("n_sites = {n_sites} outside [{MIN_SITES}, {MAX_SITES}]")));
    }
    Ok(())
}
