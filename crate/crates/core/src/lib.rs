//! Majorization-based LOCC convertibility analysis of transverse-field Ising
//! ground states.
//!
//! The crate is organised bottom-up:
//!
//! * [`basis`]: parity-sector enumeration of the spin-1/2 z-basis.
//! * [`hamiltonian`]: matrix-free and dense forms of the periodic chain
//!   `H = -Σ (σˣᵢσˣᵢ₊₁ + h σᶻᵢ)`.
//! * [`eigensolver`]: thick-restart Krylov ground states plus a dense path and
//!   the free-fermion energy used as an independent check.
//! * [`entanglement`]: reduced spectra of contiguous blocks and Rényi entropies.
//! * [`convertibility`]: majorization / LOCC and Rényi / ELOCC verdicts, the
//!   partial-sum profiles and their minima.
//! * [`scaling`]: `h(N) = a/N^b + c` extrapolation.
//! * [`pipeline`]: cached sweeps, reports and the plot-ready file formats.
//!
//! Numerical modules are generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`, which is what the pipeline uses.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod basis;
pub mod convertibility;
pub mod eigensolver;
pub mod entanglement;
mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod pipeline;
mod scalar;
pub mod scaling;

pub use basis::{BasisLabel, Parity, SectorMap};
pub use convertibility::{Direction, Observable};
pub use eigensolver::{free_fermion_ground_energy, ground_state, SolveMethod};
pub use entanglement::{renyi_entropy, Alpha, Block};
pub use error::{Error, Result};
pub use scalar::Real;

pub type HamiltonianSpec = hamiltonian::HamiltonianSpec<f64>;
pub type SolverOptions = eigensolver::SolverOptions<f64>;
pub type GroundState = eigensolver::GroundState<f64>;
pub type ReducedSpectrum = entanglement::ReducedSpectrum<f64>;
pub type RenyiCurve = entanglement::RenyiCurve<f64>;
pub type SchmidtVector = convertibility::SchmidtVector<f64>;
pub type MajorizationVerdict = convertibility::MajorizationVerdict;
pub type EloccVerdict = convertibility::EloccVerdict<f64>;
pub type MonotonicityProfile = convertibility::MonotonicityProfile<f64>;
pub type MinimumPoint = convertibility::MinimumPoint<f64>;
pub type ScalingFit = scaling::ScalingFit<f64>;
