//! Scenario evaluation and the design / sweep entry points.

use std::path::Path;

use rayon::prelude::*;

use nfbeam_core::channel::{
    equivalent_channel_normalized, standard_phase_profile, EquivalentChannel, PhaseProfile,
};
use nfbeam_core::design::{design_infocus_beam, quantize_profile};
use nfbeam_core::geometry::{build_array, rx_projection_class, ArrayGeometry, RxPlacement, Scenario};
use nfbeam_core::rate::{achievable_rate, thin_array};

use crate::config::{BeamKind, RunConfig, SweepVariable};
use crate::output::{fmt_e9, write_csv};

/// A runtime failure after configuration validation.
#[derive(Debug)]
pub struct RunError(pub String);

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for RunError {}

impl From<nfbeam_core::Error> for RunError {
    fn from(e: nfbeam_core::Error) -> Self {
        RunError(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError(e.to_string())
    }
}

/// Everything produced by evaluating one beam in one scenario.
pub struct BeamEvaluation {
    pub beam: BeamKind,
    /// Active-antenna coordinates and quantized phases, for profile dumps.
    pub geometry: ArrayGeometry<f64>,
    pub profile: PhaseProfile<f64>,
    /// Channel on the scenario's sub-band grid.
    pub channel: EquivalentChannel<f64>,
    pub rate_bps: f64,
    pub placement: &'static str,
    pub dispersion_factor: f64,
}

impl BeamEvaluation {
    pub fn gain_stats_db(&self) -> (f64, f64, f64) {
        let db = self.channel.gains_db();
        let min = db.iter().copied().fold(f64::INFINITY, f64::min);
        let max = db.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = db.iter().sum::<f64>() / db.len() as f64;
        (min, max, mean)
    }
}

/// Build the scenario for a config, reusing a prebuilt array when the
/// geometry parameters did not change.
pub fn scenario_from_config(
    cfg: &RunConfig,
    geometry: ArrayGeometry<f64>,
) -> Result<Scenario<f64>, RunError> {
    let rx = RxPlacement::new(cfg.distance_m, cfg.gamma_deg.to_radians())?;
    Ok(Scenario::new(
        geometry,
        rx,
        cfg.carrier_hz,
        cfg.bandwidth_hz,
        cfg.q_bits,
        cfg.n_sub,
        cfg.tx_power_w,
        cfg.temperature_k,
    )?)
}

pub fn build_geometry(cfg: &RunConfig) -> Result<ArrayGeometry<f64>, RunError> {
    Ok(build_array(cfg.radius_m, cfg.spacing_m)?)
}

/// Evaluate one beam on the given frequency grid: construct the profile,
/// quantize it to the scenario's phase-shifter resolution, run the channel,
/// and water-fill the rate on the scenario sub-band grid.
pub fn evaluate_beam(
    scenario: &Scenario<f64>,
    beam: BeamKind,
    freqs: &[f64],
) -> Result<BeamEvaluation, RunError> {
    let full_n = scenario.geometry.n_tx();
    let (geometry, raw_profile, placement, dispersion) = match beam {
        BeamKind::Standard => {
            let profile =
                standard_phase_profile(&scenario.geometry, &scenario.rx, scenario.carrier_hz);
            let (class, _) = rx_projection_class(&scenario.geometry, &scenario.rx);
            (scenario.geometry.clone(), profile, class.label(), 0.0)
        }
        BeamKind::InFocus => {
            let designed = design_infocus_beam(scenario)?;
            (
                scenario.geometry.clone(),
                designed.profile,
                designed.placement.label(),
                designed.dispersion_factor,
            )
        }
        BeamKind::ThinnedStandard(delta) => {
            let thin = thin_array(&scenario.geometry, delta)?;
            let profile = standard_phase_profile(&thin, &scenario.rx, scenario.carrier_hz);
            let (class, _) = rx_projection_class(&thin, &scenario.rx);
            (thin, profile, class.label(), 0.0)
        }
    };
    let profile = quantize_profile(&raw_profile, scenario.q_bits);
    let channel =
        equivalent_channel_normalized(&geometry, &scenario.rx, &profile, freqs, full_n)?;
    let rate = {
        let subband = scenario.subband_freqs();
        let rate_channel = if freqs == subband.as_slice() {
            channel.clone()
        } else {
            equivalent_channel_normalized(&geometry, &scenario.rx, &profile, &subband, full_n)?
        };
        achievable_rate(&rate_channel, scenario)?.rate_bps
    };
    Ok(BeamEvaluation {
        beam,
        geometry,
        profile,
        channel,
        rate_bps: rate,
        placement,
        dispersion_factor: dispersion,
    })
}

/// Dense response grid for channel-curve dumps: one and a half bands
/// centred on the carrier, odd point count so the carrier is sampled.
pub fn response_grid(cfg: &RunConfig) -> Vec<f64> {
    let half_span = 0.75 * cfg.bandwidth_hz;
    let n = 481usize;
    let step = 2.0 * half_span / (n - 1) as f64;
    (0..n)
        .map(|i| cfg.carrier_hz - half_span + step * i as f64)
        .collect()
}

/// `design` subcommand: per-antenna phase dumps and the channel response
/// curve over the dense grid, one row per (frequency, beam).
pub fn run_design(cfg: &RunConfig, out_dir: &Path) -> Result<(), RunError> {
    let geometry = build_geometry(cfg)?;
    let scenario = scenario_from_config(cfg, geometry)?;
    let freqs = response_grid(cfg);
    let evals: Vec<BeamEvaluation> = cfg
        .beams
        .iter()
        .map(|&beam| evaluate_beam(&scenario, beam, &freqs))
        .collect::<Result<_, _>>()?;

    let header = cfg.header_lines();
    for eval in &evals {
        let rows: Vec<Vec<String>> = eval
            .geometry
            .coords
            .iter()
            .zip(&eval.profile.phases)
            .map(|(&(x, y), &p)| vec![fmt_e9(x), fmt_e9(y), fmt_e9(p)])
            .collect();
        let name = format!("profile_{}.csv", file_tag(&eval.beam));
        write_csv(
            &out_dir.join(name),
            &header,
            &["x_m", "y_m", "phase_rad"],
            &rows,
        )?;
    }

    let mut rows = Vec::new();
    for eval in &evals {
        let label = eval.beam.label();
        for (f, db) in freqs.iter().zip(eval.channel.gains_db()) {
            rows.push(vec![fmt_e9(*f), fmt_e9(db), label.clone()]);
        }
    }
    write_csv(
        &out_dir.join("channel_response.csv"),
        &header,
        &["f_hz", "gain_db", "beam"],
        &rows,
    )?;
    Ok(())
}

fn file_tag(beam: &BeamKind) -> String {
    match beam {
        BeamKind::Standard => "standard".into(),
        BeamKind::InFocus => "infocus".into(),
        BeamKind::ThinnedStandard(_) => "thinned-standard".into(),
    }
}

/// Apply one sweep point to a copy of the base config.
fn apply_sweep(cfg: &RunConfig, variable: SweepVariable, value: f64) -> RunConfig {
    let mut point = cfg.clone();
    match variable {
        SweepVariable::Distance => point.distance_m = value,
        SweepVariable::Angle => point.gamma_deg = value,
        SweepVariable::Bandwidth => point.bandwidth_hz = value,
        SweepVariable::Quantizer => point.q_bits = value.round().max(1.0) as u8,
        SweepVariable::Thinning => {
            for beam in &mut point.beams {
                if let BeamKind::ThinnedStandard(d) = beam {
                    *d = value;
                }
            }
        }
    }
    point
}

/// One output row of a sweep.
struct SweepRecord {
    value: f64,
    beam: String,
    rate_bps: f64,
    gain_min_db: f64,
    gain_max_db: f64,
    gain_mean_db: f64,
    n_tx_active: usize,
    placement: &'static str,
    dispersion_factor: f64,
}

/// `sweep` subcommand: evaluate every sweep point for every selected beam
/// and write one record per (point, beam) in sweep order. Without a sweep
/// spec the configured scenario itself is the single point.
pub fn run_sweep(cfg: &RunConfig, out_dir: &Path) -> Result<(), RunError> {
    let geometry = build_geometry(cfg)?;
    let (variable_label, points): (&str, Vec<f64>) = match &cfg.sweep {
        Some(spec) => (spec.variable.label(), spec.values()),
        None => ("none", vec![0.0]),
    };

    // Beams untouched by the sweep variable produce identical records at
    // every thinning point; evaluate those once.
    let thinning_sweep = matches!(
        cfg.sweep.as_ref().map(|s| s.variable),
        Some(SweepVariable::Thinning)
    );

    let eval_point = |value: f64| -> Result<Vec<SweepRecord>, RunError> {
        let point_cfg = match &cfg.sweep {
            Some(spec) => apply_sweep(cfg, spec.variable, value),
            None => cfg.clone(),
        };
        let scenario = scenario_from_config(&point_cfg, geometry.clone())?;
        let freqs = scenario.subband_freqs();
        point_cfg
            .beams
            .iter()
            .map(|&beam| {
                let eval = evaluate_beam(&scenario, beam, &freqs)?;
                let (gmin, gmax, gmean) = eval.gain_stats_db();
                Ok(SweepRecord {
                    value,
                    beam: eval.beam.label(),
                    rate_bps: eval.rate_bps,
                    gain_min_db: gmin,
                    gain_max_db: gmax,
                    gain_mean_db: gmean,
                    n_tx_active: eval.geometry.n_tx(),
                    placement: eval.placement,
                    dispersion_factor: eval.dispersion_factor,
                })
            })
            .collect()
    };

    let mut records: Vec<Vec<SweepRecord>> = if thinning_sweep {
        // Split static and thinned beams so the static ones run once.
        let static_cfg = RunConfig {
            beams: cfg
                .beams
                .iter()
                .copied()
                .filter(|b| !matches!(b, BeamKind::ThinnedStandard(_)))
                .collect(),
            ..cfg.clone()
        };
        let static_records: Vec<SweepRecord> = if static_cfg.beams.is_empty() {
            Vec::new()
        } else {
            let scenario = scenario_from_config(&static_cfg, geometry.clone())?;
            let freqs = scenario.subband_freqs();
            static_cfg
                .beams
                .iter()
                .map(|&beam| {
                    let eval = evaluate_beam(&scenario, beam, &freqs)?;
                    let (gmin, gmax, gmean) = eval.gain_stats_db();
                    Ok(SweepRecord {
                        value: 0.0,
                        beam: eval.beam.label(),
                        rate_bps: eval.rate_bps,
                        gain_min_db: gmin,
                        gain_max_db: gmax,
                        gain_mean_db: gmean,
                        n_tx_active: eval.geometry.n_tx(),
                        placement: eval.placement,
                        dispersion_factor: eval.dispersion_factor,
                    })
                })
                .collect::<Result<_, RunError>>()?
        };
        points
            .par_iter()
            .map(|&value| {
                let point_cfg = apply_sweep(cfg, SweepVariable::Thinning, value);
                let scenario = scenario_from_config(&point_cfg, geometry.clone())?;
                let freqs = scenario.subband_freqs();
                let mut recs = Vec::new();
                for &beam in &point_cfg.beams {
                    if let BeamKind::ThinnedStandard(_) = beam {
                        let eval = evaluate_beam(&scenario, beam, &freqs)?;
                        let (gmin, gmax, gmean) = eval.gain_stats_db();
                        recs.push(SweepRecord {
                            value,
                            beam: eval.beam.label(),
                            rate_bps: eval.rate_bps,
                            gain_min_db: gmin,
                            gain_max_db: gmax,
                            gain_mean_db: gmean,
                            n_tx_active: eval.geometry.n_tx(),
                            placement: eval.placement,
                            dispersion_factor: eval.dispersion_factor,
                        });
                    } else {
                        let cached = static_records
                            .iter()
                            .find(|r| r.beam == beam.label())
                            .expect("static beam evaluated up front");
                        recs.push(SweepRecord {
                            value,
                            beam: cached.beam.clone(),
                            rate_bps: cached.rate_bps,
                            gain_min_db: cached.gain_min_db,
                            gain_max_db: cached.gain_max_db,
                            gain_mean_db: cached.gain_mean_db,
                            n_tx_active: cached.n_tx_active,
                            placement: cached.placement,
                            dispersion_factor: cached.dispersion_factor,
                        });
                    }
                }
                Ok(recs)
            })
            .collect::<Result<_, RunError>>()?
    } else {
        points
            .par_iter()
            .map(|&v| eval_point(v))
            .collect::<Result<_, RunError>>()?
    };

    let mut rows = Vec::new();
    for point_records in records.drain(..) {
        for r in point_records {
            rows.push(vec![
                variable_label.to_string(),
                fmt_e9(r.value),
                r.beam,
                fmt_e9(r.rate_bps),
                fmt_e9(r.gain_min_db),
                fmt_e9(r.gain_max_db),
                fmt_e9(r.gain_mean_db),
                r.n_tx_active.to_string(),
                r.placement.to_string(),
                fmt_e9(r.dispersion_factor),
            ]);
        }
    }
    write_csv(
        &out_dir.join(format!("sweep_{variable_label}.csv")),
        &cfg.header_lines(),
        &[
            "variable",
            "value",
            "beam",
            "rate_bps",
            "gain_min_db",
            "gain_max_db",
            "gain_mean_db",
            "n_tx_active",
            "placement",
            "dispersion_factor",
        ],
        &rows,
    )?;
    Ok(())
}
