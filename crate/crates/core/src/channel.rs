//! The LoS MISO channel and the beamformed equivalent SISO channel.
//!
//! `g(f) = sum over antennas of w(x,y) h(x,y,f)` with unit-magnitude
//! phase-shifter weights `w = exp(j phi) / sqrt(N)` and the free-space
//! channel `h = (c / 2 pi f l) exp(-j 2 pi f l / c)` for antenna-receiver
//! distance `l`. Also provides the closed-form boresight response of the
//! standard centre-frequency beam, the misfocus bandwidth bound, and a
//! midpoint-quadrature oracle for the continuous-aperture approximation.

use num_complex::Complex;
use rayon::prelude::*;

use crate::constants::light_speed;
use crate::error::{Error, Result};
use crate::geometry::{distance_to_rx, ArrayGeometry, RxPlacement, BORESIGHT_TOLERANCE};
use crate::scalar::Real;

/// Wrap an angle into `[0, 2 pi)`.
pub fn wrap_phase<R: Real>(x: R) -> R {
    let tau = R::TAU();
    let t = x % tau;
    if t < R::zero() {
        t + tau
    } else {
        t
    }
}

/// `sin(x)/x` with a series fallback near zero.
pub fn sinc<R: Real>(x: R) -> R {
    if x.abs() < R::of(1e-6) {
        R::one() - x * x / R::of(6.0)
    } else {
        x.sin() / x
    }
}

/// Spatial frequency `omega = 2 pi (f - f_c) / c` in rad/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialFrequency<R: Real>(pub R);

impl<R: Real> SpatialFrequency<R> {
    pub fn from_rf(f: R, carrier_hz: R) -> Self {
        Self(R::TAU() * (f - carrier_hz) / light_speed::<R>())
    }

    pub fn value(self) -> R {
        self.0
    }
}

/// Per-antenna phase values aligned with `ArrayGeometry::coords`.
///
/// The implied beamforming weight is `exp(j phase) / sqrt(N)`; quantized
/// profiles hold values from the `2^q`-point uniform alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile<R: Real> {
    /// Phases in `[0, 2 pi)`, one per antenna.
    pub phases: Vec<R>,
    /// Whether the phases come from a finite alphabet.
    pub quantized: bool,
    /// Alphabet resolution in bits when quantized.
    pub q_bits: Option<u8>,
}

impl<R: Real> PhaseProfile<R> {
    /// Continuous profile; phases are wrapped into `[0, 2 pi)`.
    pub fn new(phases: Vec<R>) -> Self {
        Self {
            phases: phases.into_iter().map(wrap_phase).collect(),
            quantized: false,
            q_bits: None,
        }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Frequency response of the beamformed SISO link.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentChannel<R: Real> {
    /// Sample frequencies (Hz), strictly increasing.
    pub freqs: Vec<R>,
    /// Complex gains `g(f_k)`.
    pub gains: Vec<Complex<R>>,
}

impl<R: Real> EquivalentChannel<R> {
    /// `|g(f_k)|^2` per sample.
    pub fn gains_squared(&self) -> Vec<R> {
        self.gains.iter().map(|g| g.norm_sqr()).collect()
    }

    /// `20 log10 |g(f_k)|` per sample.
    pub fn gains_db(&self) -> Vec<R> {
        self.gains
            .iter()
            .map(|g| R::of(20.0) * g.norm().log10())
            .collect()
    }
}

/// Free-space LoS channel between the antenna at `(x, y, 0)` and the
/// receiver: magnitude `c / (2 pi f l)`, phase `-2 pi f l / c`.
pub fn los_channel<R: Real>(x: R, y: R, rx: &RxPlacement<R>, f: R) -> Complex<R> {
    let c = light_speed::<R>();
    let l = distance_to_rx(x, y, rx);
    let mag = c / (R::TAU() * f * l);
    let (s, co) = (-(R::TAU() * f * l / c)).sin_cos();
    Complex::new(mag * co, mag * s)
}

/// Standard centre-frequency profile `phi_std = 2 pi f_c l(x,y) / c`,
/// wrapped into `[0, 2 pi)`.
pub fn standard_phase_profile<R: Real>(
    geometry: &ArrayGeometry<R>,
    rx: &RxPlacement<R>,
    carrier_hz: R,
) -> PhaseProfile<R> {
    let c = light_speed::<R>();
    let k = R::TAU() * carrier_hz / c;
    PhaseProfile::new(
        geometry
            .coords
            .iter()
            .map(|&(x, y)| k * distance_to_rx(x, y, rx))
            .collect(),
    )
}

/// Beamformed equivalent channel over the given frequency grid, with the
/// weight normalisation `1/sqrt(n_tx)` taken from the geometry itself.
pub fn equivalent_channel<R: Real>(
    geometry: &ArrayGeometry<R>,
    rx: &RxPlacement<R>,
    profile: &PhaseProfile<R>,
    freqs: &[R],
) -> Result<EquivalentChannel<R>> {
    equivalent_channel_normalized(geometry, rx, profile, freqs, geometry.n_tx())
}

/// Beamformed equivalent channel with an explicit weight-normalisation
/// count. Thinned arrays keep the full-array `1/sqrt(N)` per active antenna,
/// so their beamformer norm equals the active fraction.
///
/// Each frequency is reduced sequentially in antenna order, so the result
/// does not depend on the number of worker threads.
pub fn equivalent_channel_normalized<R: Real>(
    geometry: &ArrayGeometry<R>,
    rx: &RxPlacement<R>,
    profile: &PhaseProfile<R>,
    freqs: &[R],
    norm_n_tx: usize,
) -> Result<EquivalentChannel<R>> {
    if profile.len() != geometry.n_tx() {
        return Err(Error::ProfileLengthMismatch {
            expected: geometry.n_tx(),
            got: profile.len(),
        });
    }
    if freqs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidScenario(
            "frequency grid must be strictly increasing".into(),
        ));
    }
    let c = light_speed::<R>();
    let norm = R::one() / R::of_usize(norm_n_tx).sqrt();

    // Distances and reciprocal distances are frequency independent.
    let dist: Vec<R> = geometry
        .coords
        .iter()
        .map(|&(x, y)| distance_to_rx(x, y, rx))
        .collect();
    let inv_dist: Vec<R> = dist.iter().map(|&d| R::one() / d).collect();

    let gains: Vec<Complex<R>> = freqs
        .par_iter()
        .map(|&f| {
            let k = R::TAU() * f / c;
            let mut re = R::zero();
            let mut im = R::zero();
            for ((&d, &inv), &p) in dist.iter().zip(&inv_dist).zip(&profile.phases) {
                let (s, co) = (p - k * d).sin_cos();
                re = re + co * inv;
                im = im + s * inv;
            }
            let scale = c / (R::TAU() * f) * norm;
            Complex::new(re * scale, im * scale)
        })
        .collect();

    Ok(EquivalentChannel {
        freqs: freqs.to_vec(),
        gains,
    })
}

/// Mean of the near and far aperture-edge distances for a boresight
/// receiver: `(ell + sqrt(ell^2 + R^2)) / 2`.
pub fn boresight_mean_distance<R: Real>(ell: R, radius: R) -> R {
    (ell + (ell * ell + radius * radius).sqrt()) / R::of(2.0)
}

/// Closed-form continuous-aperture response of the standard beam for a
/// boresight receiver:
///
/// `g = 2 c (d_avg - ell) exp(-j w d_avg) sinc(w (d_avg - ell)) / (sqrt(pi) R f spacing)`
///
/// where `w` is the spatial frequency of `f` about `f_c`.
pub fn closed_form_standard<R: Real>(
    rx: &RxPlacement<R>,
    radius: R,
    spacing: R,
    f: R,
    carrier_hz: R,
) -> Result<Complex<R>> {
    if rx.gamma.abs() >= R::of(BORESIGHT_TOLERANCE) {
        return Err(Error::NotBoresight {
            gamma: rx.gamma.as_f64(),
        });
    }
    let c = light_speed::<R>();
    let w = SpatialFrequency::from_rf(f, carrier_hz).value();
    let d_avg = boresight_mean_distance(rx.ell, radius);
    let half_span = d_avg - rx.ell;
    let mag = R::of(2.0) * c * half_span / (R::PI().sqrt() * radius * f * spacing);
    let (s, co) = (-(w * d_avg)).sin_cos();
    let sc = sinc(w * half_span);
    Ok(Complex::new(mag * sc * co, mag * sc * s))
}

/// Operating-bandwidth bound `c / (sqrt(ell^2 + R^2) - ell)` below which the
/// standard boresight beam loses at most 4 dB to misfocus at band edge.
/// Diverges (returns infinity) as the aperture shrinks.
pub fn misfocus_bandwidth_bound<R: Real>(ell: R, radius: R) -> R {
    let span = (ell * ell + radius * radius).sqrt() - ell;
    light_speed::<R>() / span
}

/// Continuous-aperture channel evaluated by midpoint quadrature on a
/// `grid_n x grid_n` mesh over the bounding square, masking points outside
/// the disc:
///
/// `g_a(f) = 1/(sqrt(pi R^2) spacing) * integral over disc of h(x,y,f) exp(j phase(x,y))`
///
/// Test oracle only; the evaluation path is independent of
/// [`equivalent_channel`].
pub fn itx_quadrature_oracle<R, F>(
    rx: &RxPlacement<R>,
    radius: R,
    spacing: R,
    phase_fn: F,
    f: R,
    grid_n: usize,
) -> Complex<R>
where
    R: Real,
    F: Fn(R, R) -> R + Sync,
{
    if radius <= R::zero() {
        return Complex::new(R::zero(), R::zero());
    }
    let c = light_speed::<R>();
    let n = R::of_usize(grid_n);
    let cell = R::of(2.0) * radius / n;
    let r2 = radius * radius;
    let k = R::TAU() * f / c;
    let amp = c / (R::TAU() * f);

    // Rows integrate sequentially; the row results are summed in index
    // order so the value does not depend on the thread count.
    let rows: Vec<Complex<R>> = (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let x = -radius + cell * (R::of_usize(i) + R::of(0.5));
            let mut acc = Complex::new(R::zero(), R::zero());
            for j in 0..grid_n {
                let y = -radius + cell * (R::of_usize(j) + R::of(0.5));
                if x * x + y * y > r2 {
                    continue;
                }
                let l = distance_to_rx(x, y, rx);
                let (s, co) = (phase_fn(x, y) - k * l).sin_cos();
                let m = amp / l;
                acc = acc + Complex::new(m * co, m * s);
            }
            acc
        })
        .collect();
    let integral = rows
        .into_iter()
        .fold(Complex::new(R::zero(), R::zero()), |a, b| a + b)
        * cell
        * cell;
    integral / ((R::PI() * r2).sqrt() * spacing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::SPEED_OF_LIGHT;
    use crate::geometry::build_array;

    fn rx(ell: f64, gamma_deg: f64) -> RxPlacement<f64> {
        RxPlacement::new(ell, gamma_deg.to_radians()).unwrap()
    }

    #[test]
    fn los_magnitude_and_phase() {
        let h = los_channel(0.0, 0.0, &rx(0.15, 0.0), 300e9);
        let expected = SPEED_OF_LIGHT / (std::f64::consts::TAU * 300e9 * 0.15);
        assert!((h.norm() - expected).abs() / expected < 1e-14);
        assert!((h.norm() - 1.061e-3).abs() / 1.061e-3 < 1e-3);

        // Distance an integer number of wavelengths: phase wraps to zero.
        let lambda = SPEED_OF_LIGHT / 300e9;
        let h0 = los_channel(0.0, 0.0, &rx(150.0 * lambda, 0.0), 300e9);
        assert!(h0.im.abs() / h0.norm() < 1e-9, "phase {}", h0.arg());
        assert!(h0.re > 0.0);

        // 1/l law: doubling the distance halves the magnitude.
        let h1 = los_channel(0.0, 0.0, &rx(0.2, 0.0), 300e9);
        let h2 = los_channel(0.0, 0.0, &rx(0.4, 0.0), 300e9);
        assert!((h1.norm() / h2.norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn single_antenna_channel_is_los() {
        let geom = build_array(0.4f64 * 0.5e-3, 0.5e-3).unwrap();
        assert_eq!(geom.n_tx(), 1);
        let p = rx(0.15, 0.0);
        let profile = PhaseProfile::new(vec![0.0]);
        let ch = equivalent_channel(&geom, &p, &profile, &[300e9]).unwrap();
        let h = los_channel(0.0, 0.0, &p, 300e9);
        assert!((ch.gains[0] - h).norm() / h.norm() < 1e-12);
    }

    #[test]
    fn profile_length_mismatch_is_an_error() {
        let geom = build_array(1.0e-3f64, 0.5e-3).unwrap();
        let profile = PhaseProfile::new(vec![0.0; 5]);
        assert!(matches!(
            equivalent_channel(&geom, &rx(0.15, 0.0), &profile, &[300e9]),
            Err(Error::ProfileLengthMismatch { expected: 13, got: 5 })
        ));
    }

    #[test]
    fn standard_profile_values_and_symmetry() {
        let geom = build_array(5.0e-3f64, 0.5e-3).unwrap();
        let p = rx(0.15, 25.0);
        let profile = standard_phase_profile(&geom, &p, 300e9);
        // Independent evaluation at the origin antenna.
        let idx = geom
            .coords
            .iter()
            .position(|&(x, y)| x == 0.0 && y == 0.0)
            .unwrap();
        let expected = wrap_phase(std::f64::consts::TAU * 300e9 * 0.15 / SPEED_OF_LIGHT);
        assert!((profile.phases[idx] - expected).abs() < 1e-9);
        assert!((expected - 0.6601965948701576).abs() < 1e-9);

        // y -> -y symmetry for any angle.
        for (i, &(x, y)) in geom.coords.iter().enumerate() {
            let j = geom
                .coords
                .iter()
                .position(|&(xx, yy)| xx == x && yy == -y)
                .unwrap();
            assert!((profile.phases[i] - profile.phases[j]).abs() < 1e-12);
        }

        // Vanishing carrier: all phases zero.
        let zero = standard_phase_profile(&geom, &p, 1e-30);
        assert!(zero.phases.iter().all(|&v| v.abs() < 1e-12));

        // A distance of an integer number of wavelengths wraps to zero.
        let lambda = SPEED_OF_LIGHT / 300e9;
        let p0 = standard_phase_profile(
            &build_array(0.4f64 * 0.5e-3, 0.5e-3).unwrap(),
            &rx(150.0 * lambda, 0.0),
            300e9,
        );
        let d = p0.phases[0].min(std::f64::consts::TAU - p0.phases[0]);
        assert!(d < 1e-9);
    }

    #[test]
    fn coherent_sum_is_maximal_at_carrier() {
        let geom = build_array(5.0e-3f64, 0.5e-3).unwrap();
        let p = rx(0.15, 0.0);
        let profile = standard_phase_profile(&geom, &p, 300e9);
        let ch = equivalent_channel(&geom, &p, &profile, &[300e9]).unwrap();
        let incoherent: f64 = geom
            .coords
            .iter()
            .map(|&(x, y)| los_channel(x, y, &p, 300e9).norm())
            .sum::<f64>()
            / (geom.n_tx() as f64).sqrt();
        assert!((ch.gains[0].norm() - incoherent).abs() / incoherent < 1e-12);
    }

    #[test]
    fn gain_invariant_under_global_phase_offset() {
        let geom = build_array(5.0e-3f64, 0.5e-3).unwrap();
        let p = rx(0.15, 30.0);
        let base = standard_phase_profile(&geom, &p, 300e9);
        let shifted = PhaseProfile::new(base.phases.iter().map(|&v| v + 1.234).collect());
        let freqs = [290e9, 300e9, 310e9];
        let a = equivalent_channel(&geom, &p, &base, &freqs).unwrap();
        let b = equivalent_channel(&geom, &p, &shifted, &freqs).unwrap();
        for (ga, gb) in a.gains.iter().zip(&b.gains) {
            assert!((ga.norm() - gb.norm()).abs() / ga.norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_reference_values() {
        let p = rx(0.15, 0.0);
        let d_avg = boresight_mean_distance(0.15f64, 0.10);
        assert!((d_avg - 0.15 - 0.0151389).abs() < 1e-6);

        // At the carrier the sinc factor is one.
        let g0 = closed_form_standard(&p, 0.10, 0.5e-3, 300e9, 300e9).unwrap();
        let expected = 2.0 * SPEED_OF_LIGHT * (d_avg - 0.15)
            / (std::f64::consts::PI.sqrt() * 0.10 * 300e9 * 0.5e-3);
        assert!((g0.norm() - expected).abs() / expected < 1e-12);

        // Loss decomposition at 310 GHz: sinc term near -40.7 dB (within the
        // +-1 dB acceptance window), 1/f term -0.28 dB.
        let w = SpatialFrequency::from_rf(310e9, 300e9).value();
        let sinc_db = 20.0 * sinc(w * (d_avg - 0.15)).abs().log10();
        assert!((sinc_db + 40.7).abs() < 1.0, "sinc factor {sinc_db} dB");
        let inv_f_db = 20.0 * (300e9f64 / 310e9).log10();
        assert!((inv_f_db + 0.28).abs() < 0.05, "1/f factor {inv_f_db} dB");

        // Even in omega about the carrier (up to the 1/f factor).
        let lo = closed_form_standard(&p, 0.10, 0.5e-3, 295e9, 300e9).unwrap();
        let hi = closed_form_standard(&p, 0.10, 0.5e-3, 305e9, 300e9).unwrap();
        let ratio = (lo.norm() * 295e9) / (hi.norm() * 305e9);
        assert!((ratio - 1.0).abs() < 1e-12);

        // Off-boresight call is rejected.
        assert!(matches!(
            closed_form_standard(&rx(0.15, 5.0), 0.10, 0.5e-3, 300e9, 300e9),
            Err(Error::NotBoresight { .. })
        ));
    }

    #[test]
    fn bandwidth_bound_values() {
        let b = misfocus_bandwidth_bound(0.15f64, 0.10);
        assert!((b - 9.9014e9).abs() < 0.01e9, "bound {b}");
        assert!(misfocus_bandwidth_bound(0.15f64, 0.0).is_infinite());
        // Far receivers squint less: the bound grows with distance.
        assert!(misfocus_bandwidth_bound(1.5f64, 0.10) > b);
    }

    #[test]
    fn sinc_series_fallback() {
        assert_eq!(sinc(0.0f64), 1.0);
        assert!((sinc(1e-7f64) - 1.0).abs() < 1e-14);
        assert!((sinc(1.0) - 1.0f64.sin()).abs() < 1e-15);
        let x = 1.0000001e-6f64;
        assert!((sinc(x) - x.sin() / x).abs() < 1e-15);
    }

    #[test]
    fn spatial_frequency_band_limits() {
        let b = 40e9;
        let lo = SpatialFrequency::from_rf(300e9 - b / 2.0, 300e9).value();
        let hi = SpatialFrequency::from_rf(300e9 + b / 2.0, 300e9).value();
        let edge = std::f64::consts::PI * b / SPEED_OF_LIGHT;
        assert!((lo + edge).abs() < 1e-6);
        assert!((hi - edge).abs() < 1e-6);
    }

    #[test]
    fn quadrature_oracle_basics() {
        let p = rx(0.15, 0.0);
        // Zero radius integrates to nothing.
        let z = itx_quadrature_oracle(&p, 0.0, 0.5e-3, |_, _| 0.0, 300e9, 256);
        assert_eq!(z, Complex::new(0.0, 0.0));

        // Standard phase at the carrier reproduces the closed form; 512
        // cells per side is enough for a 1% check at this aperture.
        let k = std::f64::consts::TAU * 300e9 / SPEED_OF_LIGHT;
        let phase = move |x: f64, y: f64| k * distance_to_rx(x, y, &p);
        let osc = itx_quadrature_oracle(&p, 0.10, 0.5e-3, phase, 300e9, 512);
        let cf = closed_form_standard(&p, 0.10, 0.5e-3, 300e9, 300e9).unwrap();
        assert!(
            (osc.norm() - cf.norm()).abs() / cf.norm() < 0.01,
            "oracle {} vs closed form {}",
            osc.norm(),
            cf.norm()
        );
    }

    #[test]
    fn discrete_sum_tracks_continuous_aperture() {
        // Half-wavelength lattice: the scaled discrete sum stays within 2%
        // of the closed form, normalised by the centre-frequency gain.
        let lambda = SPEED_OF_LIGHT / 300e9;
        let spacing = lambda / 2.0;
        let radius = 0.02f64;
        let geom = build_array(radius, spacing).unwrap();
        let p = rx(0.15, 0.0);
        let profile = standard_phase_profile(&geom, &p, 300e9);
        let freqs: Vec<f64> = (0..21).map(|i| 280e9 + 2e9 * i as f64).collect();
        let ch = equivalent_channel(&geom, &p, &profile, &freqs).unwrap();
        let scale = spacing * (geom.n_tx() as f64).sqrt()
            / (std::f64::consts::PI * radius * radius).sqrt();
        let center = closed_form_standard(&p, radius, spacing, 300e9, 300e9)
            .unwrap()
            .norm();
        for (i, &f) in freqs.iter().enumerate() {
            let cf = closed_form_standard(&p, radius, spacing, f, 300e9).unwrap();
            let err = (ch.gains[i].norm() * scale - cf.norm()).abs() / center;
            assert!(err < 0.02, "f = {f}: scaled error {err}");
        }
    }

    #[test]
    fn repeated_evaluation_is_bitwise_identical() {
        let geom = build_array(5.0e-3f64, 0.5e-3).unwrap();
        let p = rx(0.15, 45.0);
        let profile = standard_phase_profile(&geom, &p, 300e9);
        let freqs: Vec<f64> = (0..64).map(|i| 280e9 + 0.625e9 * i as f64).collect();
        let a = equivalent_channel(&geom, &p, &profile, &freqs).unwrap();
        let b = equivalent_channel(&geom, &p, &profile, &freqs).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_increasing_grid_is_rejected() {
        let geom = build_array(1.0e-3f64, 0.5e-3).unwrap();
        let profile = PhaseProfile::new(vec![0.0; geom.n_tx()]);
        assert!(equivalent_channel(&geom, &rx(0.15, 0.0), &profile, &[300e9, 300e9]).is_err());
    }
}
