//! Time-dependent quantum Monte Carlo for few-electron lattices.
//!
//! Each electron carries an ensemble of walkers, and each walker carries its
//! own guide wave. Guide waves relax in imaginary time under the lattice
//! potential plus an electron-electron potential averaged over partner
//! walkers through a Gaussian kernel of width `sigma`. Finite `sigma` keeps
//! the guide waves distinct, so the ensemble describes a mixed one-particle
//! state whose purity measures electron-electron entanglement.

pub mod config;
pub mod ensemble;
pub mod error;
pub mod export;
pub mod grid;
pub mod kernel;
pub mod oracle;
pub mod potentials;
pub mod propagator;
pub mod quantum_info;
pub mod runner;
pub mod spectral;

pub use ensemble::{
    init_ensemble, optimize_sigma, relax, relax_in_potential, total_energy, InitOptions, InitialWave, RelaxParams,
    RelaxationReport, SigmaScan, TdqmcState,
};
pub use error::{Result, TdqmcError};
pub use grid::{Field, Grid, Position, RealField};
pub use kernel::{effective_potential, gaussian_kernel, PartnerSource, Sigma, SigmaParams};
pub use potentials::{lattice_potential, sample_on_grid, LatticeSpec};
pub use propagator::{drift_velocity, step_guide_wave, step_walker, GuideWaveStepper, StepParams};
pub use quantum_info::{
    coherence_map, linear_coherence, linear_entropy, local_density_matrix, local_entropy_map,
    mean_maps, purity, reduced_density_matrix, EntropyMap, ReducedDensityMatrix, ZonePartition,
};
