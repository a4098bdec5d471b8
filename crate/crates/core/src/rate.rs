//! Achievable rate of the beamformed link.
//!
//! The band `[f_c - B/2, f_c + B/2]` is split into `n_sub` sub-bands; the
//! transmit power is spread over them by water-filling against the
//! frequency-selective thermal noise PSD
//! `n(f) = h f / (exp(h f / (k T)) - 1)`, and the rate is
//!
//! `R = (B / n_sub) * sum log2(1 + eta_k n_sub |g(f_k)|^2 / (n(f_k) B))`.
//!
//! A radially thinned array (outer antennas switched off, per-antenna power
//! unchanged) serves as the baseline misfocus mitigation.

use crate::channel::EquivalentChannel;
use crate::constants::{BOLTZMANN, PLANCK};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Scenario};
use crate::scalar::Real;

/// Relative bisection tolerance for the water level.
const WATER_LEVEL_TOL: f64 = 1e-12;

/// Water-filling outcome for one channel evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct RateResult<R: Real> {
    /// Achievable rate (bits/s).
    pub rate_bps: R,
    /// Per-sub-band transmit powers (W), summing to the total power.
    pub allocation: Vec<R>,
    /// Water level the allocation saturates to.
    pub water_level: R,
    /// Sub-band centre frequencies (Hz).
    pub subband_freqs: Vec<R>,
}

/// Quantum thermal noise PSD (W/Hz): `h f / (exp(h f / (k T)) - 1)`.
/// Strictly below `k T` for `f > 0` and monotone decreasing in `f`.
pub fn noise_psd<R: Real>(f: R, temperature_k: R) -> R {
    let hf = R::of(PLANCK) * f;
    let x = hf / (R::of(BOLTZMANN) * temperature_k);
    hf / x.exp_m1()
}

/// Rate-optimal power allocation across sub-bands: maximise
/// `sum log2(1 + eta_k c_k)` with `c_k = n_sub g_k / (noise_k B)` subject to
/// `sum eta_k = eta`, `eta_k >= 0`. Solved by bisecting the water level
/// `mu` in `eta_k = max(0, mu - 1/c_k)`; the allocation is rescaled at the
/// end so it sums to `eta` exactly.
///
/// Returns the allocation and the water level.
pub fn waterfill<R: Real>(
    gains_sq: &[R],
    noise: &[R],
    bandwidth_hz: R,
    eta: R,
) -> Result<(Vec<R>, R)> {
    assert_eq!(gains_sq.len(), noise.len(), "noise sampled off-grid");
    assert!(!gains_sq.is_empty(), "no sub-bands");
    if !(eta > R::zero()) {
        return Err(Error::InvalidScenario("tx power must be positive".into()));
    }
    let n_sub = R::of_usize(gains_sq.len());
    // Inverse SNR-per-watt for each sub-band; infinite for dead bands.
    let inv_c: Vec<R> = gains_sq
        .iter()
        .zip(noise)
        .map(|(&g, &n)| {
            if g > R::zero() {
                n * bandwidth_hz / (n_sub * g)
            } else {
                R::infinity()
            }
        })
        .collect();
    let max_finite = inv_c
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(R::neg_infinity(), R::max);
    if !max_finite.is_finite() {
        return Err(Error::AllZeroGains);
    }

    let allocated = |mu: R| -> R {
        inv_c
            .iter()
            .map(|&ic| (mu - ic).max(R::zero()))
            .fold(R::zero(), |a, b| a + b)
    };
    let mut lo = R::zero();
    let mut hi = max_finite + eta;
    let tol = R::of(WATER_LEVEL_TOL);
    for _ in 0..200 {
        if hi - lo <= tol * hi {
            break;
        }
        let mid = (lo + hi) / R::of(2.0);
        if allocated(mid) > eta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mu = (lo + hi) / R::of(2.0);
    let mut alloc: Vec<R> = inv_c.iter().map(|&ic| (mu - ic).max(R::zero())).collect();
    let total: R = alloc.iter().copied().sum();
    let scale = eta / total;
    for a in &mut alloc {
        *a = *a * scale;
    }
    Ok((alloc, mu))
}

/// `R = (B / n_sub) * sum log2(1 + eta_k n_sub g_k / (noise_k B))`.
pub fn rate_formula<R: Real>(gains_sq: &[R], noise: &[R], alloc: &[R], bandwidth_hz: R) -> R {
    let n_sub = R::of_usize(gains_sq.len());
    let sum: R = gains_sq
        .iter()
        .zip(noise)
        .zip(alloc)
        .map(|((&g, &n), &a)| (R::one() + a * n_sub * g / (n * bandwidth_hz)).log2())
        .fold(R::zero(), |x, y| x + y);
    bandwidth_hz / n_sub * sum
}

/// Water-fill the scenario's transmit power over the channel samples and
/// evaluate the rate. The channel must be sampled at the scenario's
/// `n_sub` sub-band frequencies. A dead channel yields zero rate with a
/// uniform allocation.
pub fn achievable_rate<R: Real>(
    channel: &EquivalentChannel<R>,
    scenario: &Scenario<R>,
) -> Result<RateResult<R>> {
    if channel.freqs.len() != scenario.n_sub {
        return Err(Error::InvalidScenario(format!(
            "channel sampled at {} frequencies, scenario expects {}",
            channel.freqs.len(),
            scenario.n_sub
        )));
    }
    let gains_sq = channel.gains_squared();
    let noise: Vec<R> = channel
        .freqs
        .iter()
        .map(|&f| noise_psd(f, scenario.temperature_k))
        .collect();
    if gains_sq.iter().all(|&g| g == R::zero()) {
        let uniform = scenario.tx_power_w / R::of_usize(scenario.n_sub);
        return Ok(RateResult {
            rate_bps: R::zero(),
            allocation: vec![uniform; scenario.n_sub],
            water_level: R::zero(),
            subband_freqs: channel.freqs.clone(),
        });
    }
    let (allocation, water_level) = waterfill(
        &gains_sq,
        &noise,
        scenario.bandwidth_hz,
        scenario.tx_power_w,
    )?;
    let rate_bps = rate_formula(&gains_sq, &noise, &allocation, scenario.bandwidth_hz);
    Ok(RateResult {
        rate_bps,
        allocation,
        water_level,
        subband_freqs: channel.freqs.clone(),
    })
}

/// Radially thinned array: keep the antennas inside `r = R sqrt(delta)`,
/// switch the rest off. Callers must keep the full-array weight
/// normalisation (`equivalent_channel_normalized` with the original count)
/// so the per-antenna power constraint is preserved.
pub fn thin_array<R: Real>(geometry: &ArrayGeometry<R>, delta: R) -> Result<ArrayGeometry<R>> {
    if !(delta > R::zero() && delta <= R::one()) {
        return Err(Error::InvalidScenario(format!(
            "thinning fraction must be in (0, 1], got {delta}"
        )));
    }
    let r = geometry.radius * delta.sqrt();
    let r2 = r * r;
    let coords: Vec<(R, R)> = geometry
        .coords
        .iter()
        .copied()
        .filter(|&(x, y)| x * x + y * y <= r2)
        .collect();
    if coords.is_empty() {
        return Err(Error::NoActiveAntennas {
            delta: delta.as_f64(),
        });
    }
    Ok(ArrayGeometry {
        radius: r,
        spacing: geometry.spacing,
        coords,
    })
}
