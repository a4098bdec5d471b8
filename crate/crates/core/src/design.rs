//! Misfocus-robust phase-profile design.
//!
//! The designed profile adds a spatial chirp to the standard
//! centre-frequency profile: `phi = phi_std + psi_des`. The chirp lives on
//! the 1D coordinate `u`, the antenna-to-receiver distance, and its
//! instantaneous spatial frequency sweeps `[-pi B / c, +pi B / c]` so the
//! beamformed response spreads uniformly over the operating band instead of
//! collapsing away from the carrier.
//!
//! Three receiver placements yield three constructions:
//!
//! - boresight: an analytic linear-frequency chirp on
//!   `[ell, sqrt(ell^2 + R^2)]`,
//! - projection outside the aperture: a non-linear chirp whose curvature
//!   follows the squared arc-length amplitude modulation `a(u)` through the
//!   stationary-phase relation `psi'' = kappa a^2`,
//! - projection inside the aperture: the same machinery with the piecewise
//!   modulation `b(u)` (unity over the inner disc, `a(u)` beyond it).

use num_complex::Complex;
use rayon::prelude::*;

use crate::channel::{standard_phase_profile, wrap_phase, PhaseProfile};
use crate::constants::light_speed;
use crate::error::{Error, Result};
use crate::geometry::{
    distance_to_rx, rx_projection_class, ArrayGeometry, PlacementClass, RxPlacement, Scenario,
};
use crate::scalar::Real;

/// Grid resolution for numerically designed chirps. Doubling it changes the
/// designed phase by well under 1e-4 relative at the reference scenarios.
pub const U_GRID_POINTS: usize = 4096;

/// Tolerance applied before clamping the arc-cosine argument to `[-1, 1]`;
/// the endpoint arguments are analytically +-1 and float noise crosses the
/// branch cut.
const ACOS_CLAMP_TOL: f64 = 1e-12;

/// Absolute slack (m) accepted when evaluating at the chirp-domain
/// boundaries.
const DOMAIN_TOL_M: f64 = 1e-9;

/// A 1D spatial chirp: amplitude modulation, instantaneous frequency and
/// integrated phase sampled on a strictly increasing `u` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ChirpDesign<R: Real> {
    /// Sample coordinates (m), strictly increasing.
    pub u_grid: Vec<R>,
    /// Amplitude modulation in `[0, 1]` per sample.
    pub amp: Vec<R>,
    /// Instantaneous spatial frequency `psi'(u)` (rad/m), non-decreasing
    /// from `-pi B / c` to `+pi B / c`.
    pub freq: Vec<R>,
    /// Integrated phase `psi(u)` (rad) with `psi(u_start) = 0`.
    pub phase: Vec<R>,
    /// Bandwidth the chirp was designed for (Hz).
    pub bandwidth_hz: R,
}

impl<R: Real> ChirpDesign<R> {
    pub fn u_start(&self) -> R {
        self.u_grid[0]
    }

    pub fn u_end(&self) -> R {
        *self.u_grid.last().expect("non-empty grid")
    }

    /// `(omega_end - omega_start) * (u_end - u_start)`; above `20 pi` less
    /// than 5% of the chirp energy leaks outside the design band.
    pub fn dispersion_factor(&self) -> R {
        (*self.freq.last().expect("non-empty grid") - self.freq[0])
            * (self.u_end() - self.u_start())
    }

    /// Phase at `u` by linear interpolation, with a small boundary slack.
    pub fn phase_at(&self, u: R) -> Result<R> {
        let tol = R::of(DOMAIN_TOL_M);
        let (lo, hi) = (self.u_start(), self.u_end());
        if u < lo - tol || u > hi + tol {
            return Err(Error::OutsideChirpDomain {
                u: u.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        let uc = u.max(lo).min(hi);
        let idx = self
            .u_grid
            .partition_point(|&g| g <= uc)
            .clamp(1, self.u_grid.len() - 1);
        let (u0, u1) = (self.u_grid[idx - 1], self.u_grid[idx]);
        let t = (uc - u0) / (u1 - u0);
        Ok(self.phase[idx - 1] * (R::one() - t) + self.phase[idx] * t)
    }

    /// `integral of amp^2 du` by the trapezoid rule.
    pub fn energy(&self) -> R {
        let a2: Vec<R> = self.amp.iter().map(|&a| a * a).collect();
        *cumulative_trapezoid(&self.u_grid, &a2).last().unwrap()
    }

    /// Spectrum sample
    /// `integral of amp(u) exp(j psi(u)) exp(-j omega u) du`
    /// by the trapezoid rule on the design grid.
    pub fn spectrum(&self, omega: R) -> Complex<R> {
        let half = R::of(0.5);
        let mut acc = Complex::new(R::zero(), R::zero());
        let mut prev_val = Complex::new(R::zero(), R::zero());
        let mut prev_u = R::zero();
        for (i, ((&u, &a), &p)) in self
            .u_grid
            .iter()
            .zip(&self.amp)
            .zip(&self.phase)
            .enumerate()
        {
            let (s, c) = (p - omega * u).sin_cos();
            let val = Complex::new(a * c, a * s);
            if i > 0 {
                acc = acc + (val + prev_val) * Complex::new(half * (u - prev_u), R::zero());
            }
            prev_val = val;
            prev_u = u;
        }
        acc
    }
}

/// A designed beam: the applied phase profile plus the chirp metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignedBeam<R: Real> {
    /// `phi_std + psi_des`, wrapped into `[0, 2 pi)`.
    pub profile: PhaseProfile<R>,
    /// The underlying 1D chirp.
    pub chirp: Option<ChirpDesign<R>>,
    /// Receiver placement class the design dispatched on.
    pub placement: PlacementClass,
    /// Whether a negative angle was folded onto the positive-angle design.
    pub flipped: bool,
    /// Dispersion factor of the designed chirp.
    pub dispersion_factor: R,
}

/// Cumulative trapezoid integral of `values` over `grid`, starting at zero.
fn cumulative_trapezoid<R: Real>(grid: &[R], values: &[R]) -> Vec<R> {
    let half = R::of(0.5);
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = R::zero();
    out.push(acc);
    for i in 1..grid.len() {
        acc = acc + (values[i] + values[i - 1]) * half * (grid[i] - grid[i - 1]);
        out.push(acc);
    }
    out
}

fn linspace<R: Real>(start: R, end: R, n: usize) -> Vec<R> {
    let last = R::of_usize(n - 1);
    (0..n)
        .map(|i| start + (end - start) * (R::of_usize(i) / last))
        .collect()
}

/// Dispersion factor `2 pi B (sqrt(ell^2 + R^2) - ell) / c` of the boresight
/// chirp.
pub fn dispersion_factor<R: Real>(ell: R, radius: R, bandwidth_hz: R) -> R {
    let span = (ell * ell + radius * radius).sqrt() - ell;
    R::TAU() * bandwidth_hz * span / light_speed::<R>()
}

/// Analytic boresight chirp: quadratic phase `alpha s + beta s^2` on
/// `s in [ell, sqrt(ell^2 + R^2)]` whose linear instantaneous frequency runs
/// from `-pi B / c` to `+pi B / c`. The stored phase is shifted to start at
/// zero; the offset is a global phase with no effect on gain.
pub fn design_boresight_chirp<R: Real>(ell: R, radius: R, bandwidth_hz: R) -> ChirpDesign<R> {
    let c = light_speed::<R>();
    let d_max = (ell * ell + radius * radius).sqrt();
    let span = d_max - ell;
    let beta = R::PI() * bandwidth_hz / (c * span);
    let alpha = -R::PI() * bandwidth_hz * (d_max + ell) / (c * span);
    let u_grid = linspace(ell, d_max, U_GRID_POINTS);
    let amp = vec![R::one(); U_GRID_POINTS];
    let freq: Vec<R> = u_grid
        .iter()
        .map(|&u| alpha + R::of(2.0) * beta * u)
        .collect();
    let phase: Vec<R> = u_grid
        .iter()
        .map(|&u| alpha * (u - ell) + beta * (u * u - ell * ell))
        .collect();
    ChirpDesign {
        u_grid,
        amp,
        freq,
        phase,
        bandwidth_hz,
    }
}

/// `u` domain of the off-boresight chirp:
/// `u_i = sqrt(p_i^2 + ell^2 cos^2 gamma)` with `p_1 = |ell sin gamma - R|`
/// and `p_2 = ell sin gamma + R`.
pub fn offaxis_u_domain<R: Real>(ell: R, gamma: R, radius: R) -> (R, R) {
    let (sin_g, cos_g) = gamma.abs().sin_cos();
    let proj = ell * sin_g;
    let h = ell * cos_g;
    let p1 = (proj - radius).abs();
    let p2 = proj + radius;
    ((p1 * p1 + h * h).sqrt(), (p2 * p2 + h * h).sqrt())
}

/// Arc-length amplitude modulation for a receiver projection outside the
/// aperture: the normalised angle subtended at the projection point by the
/// disc points at distance `u` from the receiver,
///
/// `a(u) = acos((u^2 - l^2 cos^2 g + l^2 sin^2 g - R^2)
///              / (2 l sin g sqrt(u^2 - l^2 cos^2 g))) / pi`.
pub fn amplitude_modulation_a<R: Real>(u: R, ell: R, gamma: R, radius: R) -> Result<R> {
    let (u1, u2) = offaxis_u_domain(ell, gamma, radius);
    let tol = R::of(DOMAIN_TOL_M);
    if u < u1 - tol || u > u2 + tol {
        return Err(Error::OutsideChirpDomain {
            u: u.as_f64(),
            lo: u1.as_f64(),
            hi: u2.as_f64(),
        });
    }
    let (sin_g, cos_g) = gamma.abs().sin_cos();
    let proj = ell * sin_g;
    let h = ell * cos_g;
    let p2 = (u * u - h * h).max(R::zero());
    let p = p2.sqrt();
    if p == R::zero() {
        // The projection point itself; only reachable in the inside case,
        // where the full circle is contained in the disc.
        return Ok(R::one());
    }
    let arg = (p2 + proj * proj - radius * radius) / (R::of(2.0) * p * proj);
    let clamped = arg.max(-R::one()).min(R::one());
    if (arg - clamped).abs() > R::of(ACOS_CLAMP_TOL) {
        return Err(Error::OutsideChirpDomain {
            u: u.as_f64(),
            lo: u1.as_f64(),
            hi: u2.as_f64(),
        });
    }
    Ok(clamped.acos() / R::PI())
}

/// Piecewise amplitude modulation for a receiver projection inside the
/// aperture: unity while the circle of radius `p` around the projection
/// stays inside the disc, `a(u)` beyond.
pub fn amplitude_modulation_b<R: Real>(u: R, ell: R, gamma: R, radius: R) -> Result<R> {
    let (sin_g, cos_g) = gamma.abs().sin_cos();
    let proj = ell * sin_g;
    if proj <= R::zero() || proj >= radius {
        return Err(Error::WrongPlacementClass {
            expected: "projection-inside",
            got: if proj <= R::zero() {
                "boresight"
            } else {
                "projection-outside"
            },
        });
    }
    let h = ell * cos_g;
    let inner = radius - proj;
    let u_inner = (inner * inner + h * h).sqrt();
    let outer = radius + proj;
    let u_end = (outer * outer + h * h).sqrt();
    let tol = R::of(DOMAIN_TOL_M);
    if u < h - tol || u > u_end + tol {
        return Err(Error::OutsideChirpDomain {
            u: u.as_f64(),
            lo: h.as_f64(),
            hi: u_end.as_f64(),
        });
    }
    if u <= u_inner {
        Ok(R::one())
    } else {
        amplitude_modulation_a(u, ell, gamma, radius)
    }
}

/// Instantaneous frequency of the stationary-phase chirp:
///
/// `psi'(u) = 2 pi B int_{u1}^{u} amp^2 / (c int_{u1}^{u2} amp^2) - pi B / c`,
///
/// computed with the composite trapezoid rule on the sample grid. The
/// result is non-decreasing and hits the band edges exactly.
pub fn stationary_phase_frequency<R: Real>(
    u_grid: &[R],
    amp: &[R],
    bandwidth_hz: R,
) -> Result<Vec<R>> {
    assert_eq!(u_grid.len(), amp.len(), "amplitude sampled off-grid");
    let a2: Vec<R> = amp.iter().map(|&a| a * a).collect();
    let cum = cumulative_trapezoid(u_grid, &a2);
    let total = *cum.last().expect("non-empty grid");
    if !(total > R::zero()) {
        return Err(Error::DegenerateAmplitude);
    }
    let c = light_speed::<R>();
    let edge = R::PI() * bandwidth_hz / c;
    Ok(cum
        .iter()
        .map(|&v| R::of(2.0) * edge * (v / total) - edge)
        .collect())
}

/// Integrated chirp phase `psi(u) = int_{u1}^{u} psi'(v) dv` with
/// `psi(u1) = 0`, by the cumulative trapezoid rule.
pub fn integrate_phase<R: Real>(u_grid: &[R], freq: &[R]) -> Vec<R> {
    assert_eq!(u_grid.len(), freq.len(), "frequency sampled off-grid");
    cumulative_trapezoid(u_grid, freq)
}

/// Build a chirp on `[u_start, u_end]` from an amplitude-modulation
/// function, sampled at `U_GRID_POINTS`.
fn chirp_from_amplitude<R: Real>(
    u_start: R,
    u_end: R,
    amp_fn: impl Fn(R) -> Result<R>,
    bandwidth_hz: R,
) -> Result<ChirpDesign<R>> {
    let u_grid = linspace(u_start, u_end, U_GRID_POINTS);
    let amp = u_grid
        .iter()
        .map(|&u| amp_fn(u))
        .collect::<Result<Vec<R>>>()?;
    let freq = stationary_phase_frequency(&u_grid, &amp, bandwidth_hz)?;
    let phase = integrate_phase(&u_grid, &freq);
    Ok(ChirpDesign {
        u_grid,
        amp,
        freq,
        phase,
        bandwidth_hz,
    })
}

/// Evaluate the chirp phase at every antenna. The lookup coordinate is the
/// exact antenna-to-receiver distance, so antennas equidistant from the
/// receiver projection share one phase, and negative angles come out as the
/// positive-angle profile flipped about the y-axis.
pub fn map_chirp_to_2d<R: Real>(
    chirp: &ChirpDesign<R>,
    geometry: &ArrayGeometry<R>,
    rx: &RxPlacement<R>,
) -> Result<Vec<R>> {
    geometry
        .coords
        .par_iter()
        .map(|&(x, y)| chirp.phase_at(distance_to_rx(x, y, rx)))
        .collect()
}

/// Design the misfocus-robust beam for a scenario: pick the chirp
/// construction for the receiver's placement class, map it onto the array,
/// and add the standard centre-frequency profile.
pub fn design_infocus_beam<R: Real>(scenario: &Scenario<R>) -> Result<DesignedBeam<R>> {
    let geometry = &scenario.geometry;
    let rx = &scenario.rx;
    let (placement, flipped) = rx_projection_class(geometry, rx);
    let ell = rx.ell;
    let gamma = rx.gamma.abs();
    let radius = geometry.radius;
    let bw = scenario.bandwidth_hz;

    let chirp = match placement {
        PlacementClass::Boresight => design_boresight_chirp(ell, radius, bw),
        PlacementClass::ProjectionOutside => {
            let (u1, u2) = offaxis_u_domain(ell, gamma, radius);
            chirp_from_amplitude(u1, u2, |u| amplitude_modulation_a(u, ell, gamma, radius), bw)?
        }
        PlacementClass::ProjectionInside => {
            let h = ell * gamma.cos();
            let outer = radius + ell * gamma.sin();
            let u_end = (outer * outer + h * h).sqrt();
            chirp_from_amplitude(h, u_end, |u| amplitude_modulation_b(u, ell, gamma, radius), bw)?
        }
    };

    let psi = map_chirp_to_2d(&chirp, geometry, rx)?;
    let std = standard_phase_profile(geometry, rx, scenario.carrier_hz);
    let profile = PhaseProfile::new(
        std.phases
            .iter()
            .zip(&psi)
            .map(|(&a, &b)| a + b)
            .collect(),
    );
    let dispersion = chirp.dispersion_factor();
    Ok(DesignedBeam {
        profile,
        chirp: Some(chirp),
        placement,
        flipped,
        dispersion_factor: dispersion,
    })
}

/// Quantize a profile to the `2^q`-point uniform alphabet
/// `{2 pi k / 2^q : 0 <= k < 2^q}` by circular nearest-neighbour, breaking
/// ties toward the smaller alphabet index.
pub fn quantize_profile<R: Real>(profile: &PhaseProfile<R>, q_bits: u8) -> PhaseProfile<R> {
    assert!(
        (1..=32).contains(&q_bits),
        "quantizer resolution must be between 1 and 32 bits"
    );
    let m = 1u64 << q_bits;
    let step = R::TAU() / R::of(m as f64);
    let half = R::of(0.5);
    let phases = profile
        .phases
        .iter()
        .map(|&p| {
            let t = wrap_phase(p) / step;
            let k0f = t.floor();
            let frac = t - k0f;
            let k0 = k0f.as_f64() as u64;
            let k = if frac > half {
                k0 + 1
            } else if frac < half {
                k0
            } else {
                // Exact midpoint: prefer the smaller alphabet index, which
                // is zero when the upper neighbour wraps past the top.
                if (k0 + 1) % m == 0 {
                    k0 + 1
                } else {
                    k0
                }
            };
            step * R::of((k % m) as f64)
        })
        .collect();
    PhaseProfile {
        phases,
        quantized: true,
        q_bits: Some(q_bits),
    }
}
