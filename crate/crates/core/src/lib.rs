//! Temperley-Lieb quantum channels for `O_N^+` and `SU(2)`.
//!
//! Layers, bottom up: [`qalg`] scalars, [`tlrep`] irreps and intertwiners,
//! [`channels`] CPTP maps, [`infoquant`] entropies and capacities,
//! [`structure`] PPT and degradability checks, [`recoupling`] 6j-symbols and
//! tensor-product spectra, [`verify`] named invariant suites.

pub mod channels;
pub mod error;
pub mod infoquant;
pub mod linalg;
pub mod qalg;
pub mod recoupling;
pub mod structure;
pub mod tlrep;
pub mod verify;

pub use channels::{DensityMatrix, KrausMap, QuantumChannel, Stinespring, TlChannel, Traced};
pub use error::{Error, Result};
pub use infoquant::{CapacityBounds, Ensemble, MoeReport, MoeStrategy};
pub use linalg::{CMat, CVec, RMat, C64};
pub use qalg::{AdmissibleTriple, GroupKind, GroupSpec};
pub use recoupling::{Sextuple, SpectrumEntry, SpectrumReport, SpectrumSource};
pub use structure::{PPTReport, PptVerdict};
pub use tlrep::{IrrepBasis, LabeledOperator, SpaceDescriptor, TlRep, DEFAULT_MAX_AMBIENT};
