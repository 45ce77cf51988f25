//! Angle- and frequency-resolved light scattering by an atom in a coherent
//! superposition of two trap wells.
//!
//! All quantities are dimensionless: lengths in units of the ground-state
//! size a₀, wavevectors in 1/a₀, frequencies in units of the trap frequency ν
//! and times in 1/ν.

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod lineshape;
pub mod oracle;
pub mod params;
pub mod scattering;
pub mod wavepacket;

pub use analysis::{broadband_visibility, fit_fringe, visibility, visibility_vs_epsilon, FringeFit, FringeSample, VisibilityPoint};
pub use error::{Error, Result};
pub use geometry::{MomentumTransfer, ScatterGeometry, UnitSystem, Vec3};
pub use lineshape::{diffraction, ResolutionReport};
pub use params::{Emission, LaserConfig, ScatterChannel, ScatterParams, TrapConfig};
pub use scattering::{
    broadband_intensity, raman_intensity, raman_pattern, rayleigh_components, rayleigh_line_profile, rayleigh_spectrum,
    AngularProfile, AngularSpectrum, RamanIntensity, RayleighComponents, RayleighLine,
};
pub use wavepacket::{overlap_epsilon, AtomState, PacketOverlap};
