//! Error type for geometry, design and rate operations.

use std::fmt;

/// Errors raised by the beamforming pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// No lattice point fits inside the requested aperture.
    EmptyArray { radius: f64, spacing: f64 },
    /// A phase profile does not match the array it is applied to.
    ProfileLengthMismatch { expected: usize, got: usize },
    /// A boresight-only operation was called with an off-axis receiver.
    NotBoresight { gamma: f64 },
    /// An amplitude-modulation or phase lookup fell outside the chirp domain.
    OutsideChirpDomain { u: f64, lo: f64, hi: f64 },
    /// The receiver placement class does not match the requested design path.
    WrongPlacementClass { expected: &'static str, got: &'static str },
    /// The amplitude modulation integrates to zero; no chirp can be designed.
    DegenerateAmplitude,
    /// Water-filling over an all-zero channel.
    AllZeroGains,
    /// Thinning removed every antenna.
    NoActiveAntennas { delta: f64 },
    /// A scenario parameter violates its invariant.
    InvalidScenario(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyArray { radius, spacing } => write!(
                f,
                "no antenna fits: radius {radius} m, spacing {spacing} m"
            ),
            Error::ProfileLengthMismatch { expected, got } => write!(
                f,
                "phase profile has {got} entries, array has {expected} antennas"
            ),
            Error::NotBoresight { gamma } => write!(
                f,
                "closed-form response requires a boresight receiver, got gamma = {gamma} rad"
            ),
            Error::OutsideChirpDomain { u, lo, hi } => write!(
                f,
                "u = {u} m outside chirp domain [{lo}, {hi}] m"
            ),
            Error::WrongPlacementClass { expected, got } => write!(
                f,
                "operation expects placement class {expected}, scenario is {got}"
            ),
            Error::DegenerateAmplitude => {
                write!(f, "amplitude modulation is identically zero")
            }
            Error::AllZeroGains => write!(f, "water-filling requires a non-zero channel"),
            Error::NoActiveAntennas { delta } => {
                write!(f, "thinning fraction {delta} leaves no active antenna")
            }
            Error::InvalidScenario(msg) => write!(f, "invalid scenario: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
