//! Periodically driven non-Hermitian lattice models: Floquet propagation,
//! time-periodic similarity deformations, chiral winding numbers,
//! frequency-space (Sambe) spectra and localization diagnostics.

pub mod deformation;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod freqspace;
pub mod linalg;
pub mod models;
pub mod spectrum;
pub mod topology;

pub use deformation::{DeformationSpec, DeformedModel};
pub use error::{Error, Result};
pub use evolution::{floquet_operator, floquet_spectrum, propagate, PropagatorRequest, DEFAULT_SLICES};
pub use linalg::{ComplexMatrix, C64};
pub use models::{
    BipartiteChainSpec, Boundary, ChainVariant, DriveSpec, FourierModel, Lattice, ModelSpec, StarkChainSpec,
    StepQuenchSpec,
};
pub use spectrum::FloquetSpectrum;
