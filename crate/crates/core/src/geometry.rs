//! Transmit-array construction and receiver geometry.
//!
//! The transmit array is a half-wavelength-style square lattice clipped to a
//! disc of radius `R` in the `z = 0` plane, with the lattice anchored at the
//! origin so the aperture is centred. The receiver sits at distance `ell`
//! from the array centre, tilted by `gamma` from boresight in the `xz`
//! plane, i.e. at `(-ell sin(gamma), 0, ell cos(gamma))`.

use crate::constants::light_speed;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Receivers closer to boresight than this angle (rad) use the analytic
/// radial design; the off-axis path divides by `sin(gamma)`.
pub const BORESIGHT_TOLERANCE: f64 = 1e-9;

/// Circular planar transmit array on a square lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry<R: Real> {
    /// Aperture radius (m).
    pub radius: R,
    /// Lattice spacing along x and y (m).
    pub spacing: R,
    /// Antenna coordinates `(x, y)` in the `z = 0` plane (m).
    pub coords: Vec<(R, R)>,
}

impl<R: Real> ArrayGeometry<R> {
    /// Number of antennas.
    pub fn n_tx(&self) -> usize {
        self.coords.len()
    }
}

/// Receiver placement relative to the array centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxPlacement<R: Real> {
    /// Distance from the array centre to the receiver (m), `> 0`.
    pub ell: R,
    /// Signed angle from boresight in the `xz` plane (rad), `|gamma| < pi/2`.
    pub gamma: R,
}

impl<R: Real> RxPlacement<R> {
    pub fn new(ell: R, gamma: R) -> Result<Self> {
        if !(ell > R::zero()) {
            return Err(Error::InvalidScenario(format!(
                "rx distance must be positive, got {ell}"
            )));
        }
        if !(gamma.abs() < R::FRAC_PI_2()) {
            return Err(Error::InvalidScenario(format!(
                "rx angle must satisfy |gamma| < pi/2, got {gamma}"
            )));
        }
        Ok(Self { ell, gamma })
    }

    /// Cartesian receiver position `(-ell sin(gamma), 0, ell cos(gamma))`.
    pub fn position(&self) -> (R, R, R) {
        (
            -self.ell * self.gamma.sin(),
            R::zero(),
            self.ell * self.gamma.cos(),
        )
    }
}

/// Classification of the receiver's projection onto the array plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementClass {
    /// Receiver on the array normal (`gamma = 0` within tolerance).
    Boresight,
    /// Projection falls outside the aperture disc (`ell sin|gamma| > R`).
    ProjectionOutside,
    /// Projection falls inside the aperture disc.
    ProjectionInside,
}

impl PlacementClass {
    pub fn label(&self) -> &'static str {
        match self {
            PlacementClass::Boresight => "boresight",
            PlacementClass::ProjectionOutside => "projection-outside",
            PlacementClass::ProjectionInside => "projection-inside",
        }
    }
}

/// Full link scenario: array, receiver, band and radio parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<R: Real> {
    pub geometry: ArrayGeometry<R>,
    pub rx: RxPlacement<R>,
    /// Carrier frequency (Hz).
    pub carrier_hz: R,
    /// Operating bandwidth (Hz), `< 2 f_c`.
    pub bandwidth_hz: R,
    /// Phase-shifter resolution in bits, `>= 1`.
    pub q_bits: u8,
    /// Number of rate-evaluation sub-bands, `>= 1`.
    pub n_sub: usize,
    /// Total transmit power (W), `> 0`.
    pub tx_power_w: R,
    /// System temperature (K), `> 0`.
    pub temperature_k: R,
}

impl<R: Real> Scenario<R> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        geometry: ArrayGeometry<R>,
        rx: RxPlacement<R>,
        carrier_hz: R,
        bandwidth_hz: R,
        q_bits: u8,
        n_sub: usize,
        tx_power_w: R,
        temperature_k: R,
    ) -> Result<Self> {
        if !(carrier_hz > R::zero()) {
            return Err(Error::InvalidScenario("carrier must be positive".into()));
        }
        if !(bandwidth_hz >= R::zero() && bandwidth_hz < R::of(2.0) * carrier_hz) {
            return Err(Error::InvalidScenario(format!(
                "bandwidth must satisfy 0 <= B < 2 f_c, got {bandwidth_hz}"
            )));
        }
        if q_bits < 1 {
            return Err(Error::InvalidScenario("q_bits must be >= 1".into()));
        }
        if n_sub < 1 {
            return Err(Error::InvalidScenario("n_sub must be >= 1".into()));
        }
        if !(tx_power_w > R::zero()) {
            return Err(Error::InvalidScenario("tx power must be positive".into()));
        }
        if !(temperature_k > R::zero()) {
            return Err(Error::InvalidScenario("temperature must be positive".into()));
        }
        Ok(Self {
            geometry,
            rx,
            carrier_hz,
            bandwidth_hz,
            q_bits,
            n_sub,
            tx_power_w,
            temperature_k,
        })
    }

    /// The `n_sub` equally spaced sub-band centres, inclusive of both band
    /// edges: `f_k = f_c - B/2 + (k-1) B/(n_sub-1)`.
    pub fn subband_freqs(&self) -> Vec<R> {
        let half = self.bandwidth_hz / R::of(2.0);
        let lo = self.carrier_hz - half;
        if self.n_sub == 1 {
            return vec![self.carrier_hz];
        }
        let step = self.bandwidth_hz / R::of_usize(self.n_sub - 1);
        (0..self.n_sub)
            .map(|k| lo + step * R::of_usize(k))
            .collect()
    }
}

/// Build the antenna coordinate set: all lattice points `(i*spacing,
/// j*spacing)` with `x^2 + y^2 <= radius^2`. The origin is always a lattice
/// point, so the centroid coincides with the array centre.
pub fn build_array<R: Real>(radius: R, spacing: R) -> Result<ArrayGeometry<R>> {
    if !(radius > R::zero()) || !(spacing > R::zero()) {
        return Err(Error::EmptyArray {
            radius: radius.as_f64(),
            spacing: spacing.as_f64(),
        });
    }
    let m = (radius / spacing).floor().as_f64() as i64;
    let r2 = radius * radius;
    let mut coords = Vec::new();
    for i in -m..=m {
        let x = spacing * R::of(i as f64);
        for j in -m..=m {
            let y = spacing * R::of(j as f64);
            if x * x + y * y <= r2 {
                coords.push((x, y));
            }
        }
    }
    if coords.is_empty() {
        return Err(Error::EmptyArray {
            radius: radius.as_f64(),
            spacing: spacing.as_f64(),
        });
    }
    Ok(ArrayGeometry {
        radius,
        spacing,
        coords,
    })
}

/// Euclidean distance from the antenna at `(x, y, 0)` to the receiver:
/// `sqrt((x + ell sin(gamma))^2 + y^2 + ell^2 cos^2(gamma))`.
pub fn distance_to_rx<R: Real>(x: R, y: R, rx: &RxPlacement<R>) -> R {
    let (sin_g, cos_g) = rx.gamma.sin_cos();
    let dx = x + rx.ell * sin_g;
    let h = rx.ell * cos_g;
    (dx * dx + y * y + h * h).sqrt()
}

/// Classify the receiver projection and report whether a negative `gamma`
/// was folded onto the positive-angle design (profiles for `gamma < 0` are
/// the positive-angle profiles flipped about the y-axis).
pub fn rx_projection_class<R: Real>(
    geometry: &ArrayGeometry<R>,
    rx: &RxPlacement<R>,
) -> (PlacementClass, bool) {
    let flipped = rx.gamma < R::zero();
    let g_abs = rx.gamma.abs();
    if g_abs < R::of(BORESIGHT_TOLERANCE) {
        return (PlacementClass::Boresight, false);
    }
    let proj = rx.ell * g_abs.sin();
    if proj > geometry.radius {
        (PlacementClass::ProjectionOutside, flipped)
    } else {
        (PlacementClass::ProjectionInside, flipped)
    }
}

/// Fraunhofer distance `8 R^2 / lambda_c` separating near- and far-field
/// operation for the given carrier.
pub fn fraunhofer_distance<R: Real>(geometry: &ArrayGeometry<R>, carrier_hz: R) -> R {
    let lambda = light_speed::<R>() / carrier_hz;
    R::of(8.0) * geometry.radius * geometry.radius / lambda
}
