//! Near-field line-of-sight beamforming for circular planar phased arrays.
//!
//! This crate models a short-range wideband link between a large circular
//! planar transmit array and a single-antenna receiver. It provides:
//!
//! - array construction and receiver geometry ([`geometry`]),
//! - the equivalent post-beamforming SISO channel, its closed-form
//!   boresight approximation, and a quadrature oracle ([`channel`]),
//! - misfocus-robust spatial-chirp phase profiles built from an
//!   amplitude-modulated frequency profile ([`design`]),
//! - frequency-selective thermal noise, water-filling power allocation,
//!   achievable rate, and a thinned-array baseline ([`rate`]).
//!
//! All numerical code is generic over the scalar type through the [`Real`]
//! trait; the aliases at the crate root fix `f64`, which is what the CLI
//! and the test suites use.

pub mod channel;
pub mod constants;
pub mod design;
pub mod error;
pub mod geometry;
pub mod rate;
pub mod scalar;

pub use channel::{EquivalentChannel, PhaseProfile, SpatialFrequency};
pub use design::{ChirpDesign, DesignedBeam};
pub use error::{Error, Result};
pub use geometry::{ArrayGeometry, PlacementClass, RxPlacement, Scenario};
pub use rate::RateResult;
pub use scalar::Real;

// Concrete double-precision aliases for the common pipeline.
pub type ArrayGeometry64 = geometry::ArrayGeometry<f64>;
pub type RxPlacement64 = geometry::RxPlacement<f64>;
pub type Scenario64 = geometry::Scenario<f64>;
pub type PhaseProfile64 = channel::PhaseProfile<f64>;
pub type EquivalentChannel64 = channel::EquivalentChannel<f64>;
pub type ChirpDesign64 = design::ChirpDesign<f64>;
pub type DesignedBeam64 = design::DesignedBeam<f64>;
pub type RateResult64 = rate::RateResult<f64>;
