//! Flat key-value run configuration.
//!
//! One `key = value` assignment per line, `#` starts a comment. Lengths are
//! in metres, frequencies in Hz, powers in watts, temperatures in kelvin;
//! the receiver angle is the one quantity taken in degrees at this
//! boundary. Unknown keys, malformed values and violated invariants come
//! back as a list of human-readable diagnostics naming the offending key.

use std::collections::BTreeMap;
use std::fmt;

use nfbeam_core::constants::SPEED_OF_LIGHT;

/// Beam selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamKind {
    Standard,
    InFocus,
    /// Standard beam on a radially thinned array with the given active
    /// fraction.
    ThinnedStandard(f64),
}

impl BeamKind {
    pub fn label(&self) -> String {
        match self {
            BeamKind::Standard => "standard".into(),
            BeamKind::InFocus => "infocus".into(),
            BeamKind::ThinnedStandard(d) => format!("thinned-standard({d})"),
        }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        let t = s.trim();
        match t {
            "standard" => Ok(BeamKind::Standard),
            "infocus" => Ok(BeamKind::InFocus),
            _ => {
                if let Some(rest) = t
                    .strip_prefix("thinned-standard(")
                    .and_then(|r| r.strip_suffix(')'))
                {
                    let d: f64 = rest
                        .trim()
                        .parse()
                        .map_err(|_| format!("beam '{t}': bad thinning fraction '{rest}'"))?;
                    if d <= 0.0 || d > 1.0 {
                        return Err(format!(
                            "beam '{t}': thinning fraction must be in (0, 1]"
                        ));
                    }
                    Ok(BeamKind::ThinnedStandard(d))
                } else {
                    Err(format!(
                        "unknown beam '{t}' (expected standard, infocus or thinned-standard(x))"
                    ))
                }
            }
        }
    }
}

/// Which scenario parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Distance,
    Angle,
    Bandwidth,
    Quantizer,
    Thinning,
}

impl SweepVariable {
    pub fn label(&self) -> &'static str {
        match self {
            SweepVariable::Distance => "distance",
            SweepVariable::Angle => "angle",
            SweepVariable::Bandwidth => "bandwidth",
            SweepVariable::Quantizer => "quantizer",
            SweepVariable::Thinning => "thinning",
        }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        match s.trim() {
            "distance" => Ok(SweepVariable::Distance),
            "angle" => Ok(SweepVariable::Angle),
            "bandwidth" => Ok(SweepVariable::Bandwidth),
            "quantizer" => Ok(SweepVariable::Quantizer),
            "thinning" => Ok(SweepVariable::Thinning),
            other => Err(format!(
                "unknown sweep variable '{other}' (expected distance, angle, bandwidth, quantizer or thinning)"
            )),
        }
    }

    /// Default range and step count, chosen to match desk-scale plots.
    pub fn default_range(&self) -> (f64, f64, usize) {
        match self {
            SweepVariable::Distance => (0.05, 0.60, 12),
            SweepVariable::Angle => (-75.0, 75.0, 31),
            SweepVariable::Bandwidth => (5e9, 40e9, 8),
            SweepVariable::Quantizer => (1.0, 6.0, 6),
            SweepVariable::Thinning => (0.1, 1.0, 10),
        }
    }
}

/// Resolved sweep request.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.start + step * i as f64)
            .collect()
    }
}

/// A fully resolved, invariant-checked run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub radius_m: f64,
    pub spacing_m: f64,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub distance_m: f64,
    pub gamma_deg: f64,
    pub q_bits: u8,
    pub n_sub: usize,
    pub tx_power_w: f64,
    pub temperature_k: f64,
    pub beams: Vec<BeamKind>,
    pub sweep: Option<SweepSpec>,
}

impl RunConfig {
    /// Render the resolved configuration as the `# key = value` header block
    /// embedded in every output file.
    pub fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# radius = {:e}", self.radius_m),
            format!("# spacing = {:e}", self.spacing_m),
            format!("# f_c = {:e}", self.carrier_hz),
            format!("# bandwidth = {:e}", self.bandwidth_hz),
            format!("# distance = {:e}", self.distance_m),
            format!("# gamma_deg = {:e}", self.gamma_deg),
            format!("# q_bits = {}", self.q_bits),
            format!("# n_sub = {}", self.n_sub),
            format!("# tx_power = {:e}", self.tx_power_w),
            format!("# temperature = {:e}", self.temperature_k),
            format!(
                "# beams = {}",
                self.beams
                    .iter()
                    .map(|b| b.label())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        ];
        if let Some(sweep) = &self.sweep {
            lines.push(format!(
                "# sweep = {} from {:e} to {:e} in {} steps",
                sweep.variable.label(),
                sweep.start,
                sweep.stop,
                sweep.steps
            ));
        }
        lines
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.header_lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Parse the raw key-value document; duplicate keys are diagnostics.
pub fn parse_raw(text: &str) -> Result<BTreeMap<String, String>, Vec<String>> {
    let mut map = BTreeMap::new();
    let mut errs = Vec::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                let key = k.trim().to_string();
                if map.insert(key.clone(), v.trim().to_string()).is_some() {
                    errs.push(format!("line {}: duplicate key '{key}'", lineno + 1));
                }
            }
            None => errs.push(format!(
                "line {}: expected 'key = value', got '{line}'",
                lineno + 1
            )),
        }
    }
    if errs.is_empty() {
        Ok(map)
    } else {
        Err(errs)
    }
}

fn take_f64(
    map: &mut BTreeMap<String, String>,
    key: &str,
    errs: &mut Vec<String>,
) -> Option<f64> {
    map.remove(key).and_then(|v| match v.parse::<f64>() {
        Ok(x) => Some(x),
        Err(_) => {
            errs.push(format!("{key}: not a number: '{v}'"));
            None
        }
    })
}

/// Validate and resolve a raw document into a `RunConfig`, or report every
/// problem found.
pub fn validate_config(text: &str) -> Result<RunConfig, Vec<String>> {
    let mut map = parse_raw(text)?;
    let mut errs = Vec::new();

    let radius = take_f64(&mut map, "radius", &mut errs);
    let carrier = take_f64(&mut map, "f_c", &mut errs);
    let bandwidth = take_f64(&mut map, "bandwidth", &mut errs);
    let distance = take_f64(&mut map, "distance", &mut errs);
    let gamma_deg = take_f64(&mut map, "gamma_deg", &mut errs).unwrap_or(0.0);
    let tx_power = take_f64(&mut map, "tx_power", &mut errs).unwrap_or(1e-3);
    let temperature = take_f64(&mut map, "temperature", &mut errs).unwrap_or(290.0);

    // Spacing defaults to half a carrier wavelength.
    let spacing = match map.remove("spacing") {
        None => None,
        Some(v) if v == "half-wavelength" => None,
        Some(v) => match v.parse::<f64>() {
            Ok(x) => Some(x),
            Err(_) => {
                errs.push(format!(
                    "spacing: expected a length in metres or 'half-wavelength', got '{v}'"
                ));
                None
            }
        },
    };

    let q_bits = match map.remove("q_bits") {
        None => 2u8,
        Some(v) => match v.parse::<u8>() {
            Ok(q) if (1..=32).contains(&q) => q,
            _ => {
                errs.push(format!("q_bits: expected an integer in 1..=32, got '{v}'"));
                2
            }
        },
    };
    let n_sub = match map.remove("n_sub") {
        None => 512usize,
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => {
                errs.push(format!("n_sub: expected an integer >= 1, got '{v}'"));
                512
            }
        },
    };

    let beams = match map.remove("beams") {
        None => vec![BeamKind::Standard, BeamKind::InFocus],
        Some(v) => {
            let mut beams = Vec::new();
            for part in v.split(',') {
                match BeamKind::parse(part) {
                    Ok(b) => beams.push(b),
                    Err(e) => errs.push(format!("beams: {e}")),
                }
            }
            if beams.is_empty() {
                errs.push("beams: at least one beam required".into());
            }
            beams
        }
    };

    let sweep = match map.remove("sweep") {
        None => {
            for k in ["sweep_start", "sweep_stop", "sweep_steps"] {
                if map.remove(k).is_some() {
                    errs.push(format!("{k}: set without a 'sweep' variable"));
                }
            }
            None
        }
        Some(v) => match SweepVariable::parse(&v) {
            Err(e) => {
                errs.push(format!("sweep: {e}"));
                None
            }
            Ok(variable) => {
                let (d_start, d_stop, d_steps) = variable.default_range();
                let start = take_f64(&mut map, "sweep_start", &mut errs).unwrap_or(d_start);
                let stop = take_f64(&mut map, "sweep_stop", &mut errs).unwrap_or(d_stop);
                let steps = match map.remove("sweep_steps") {
                    None => d_steps,
                    Some(v) => match v.parse::<usize>() {
                        Ok(n) if n >= 1 => n,
                        _ => {
                            errs.push(format!(
                                "sweep_steps: expected an integer >= 1, got '{v}'"
                            ));
                            d_steps
                        }
                    },
                };
                if stop < start {
                    errs.push("sweep_stop: must be >= sweep_start".into());
                }
                Some(SweepSpec {
                    variable,
                    start,
                    stop,
                    steps,
                })
            }
        },
    };

    for key in map.keys() {
        errs.push(format!("unknown key '{key}'"));
    }

    // Required scalars.
    let radius = match radius {
        Some(r) if r > 0.0 => r,
        Some(r) => {
            errs.push(format!("radius: must be positive, got {r}"));
            f64::NAN
        }
        None => {
            errs.push("radius: missing".into());
            f64::NAN
        }
    };
    let carrier = match carrier {
        Some(f) if f > 0.0 => f,
        Some(f) => {
            errs.push(format!("f_c: must be positive, got {f}"));
            f64::NAN
        }
        None => {
            errs.push("f_c: missing".into());
            f64::NAN
        }
    };
    let bandwidth = match bandwidth {
        Some(b) if b > 0.0 => b,
        Some(b) => {
            errs.push(format!("bandwidth: must be positive, got {b}"));
            f64::NAN
        }
        None => {
            errs.push("bandwidth: missing".into());
            f64::NAN
        }
    };
    let distance = match distance {
        Some(l) if l > 0.0 => l,
        Some(l) => {
            errs.push(format!("distance: must be positive, got {l}"));
            f64::NAN
        }
        None => {
            errs.push("distance: missing".into());
            f64::NAN
        }
    };

    if carrier.is_finite() && bandwidth.is_finite() && bandwidth >= 2.0 * carrier {
        errs.push(format!(
            "bandwidth: {bandwidth} violates the baseband condition B < 2 f_c = {}",
            2.0 * carrier
        ));
    }
    if gamma_deg.abs() >= 90.0 {
        errs.push(format!(
            "gamma_deg: must satisfy |gamma| < 90 degrees, got {gamma_deg}"
        ));
    }
    if tx_power <= 0.0 {
        errs.push(format!("tx_power: must be positive, got {tx_power}"));
    }
    if temperature <= 0.0 {
        errs.push(format!(
            "temperature: must be positive, got {temperature}"
        ));
    }

    let spacing = spacing.unwrap_or_else(|| {
        if carrier.is_finite() {
            SPEED_OF_LIGHT / carrier / 2.0
        } else {
            f64::NAN
        }
    });
    if spacing <= 0.0 {
        errs.push(format!("spacing: must be positive, got {spacing}"));
    }

    if !errs.is_empty() {
        return Err(errs);
    }
    Ok(RunConfig {
        radius_m: radius,
        spacing_m: spacing,
        carrier_hz: carrier,
        bandwidth_hz: bandwidth,
        distance_m: distance,
        gamma_deg,
        q_bits,
        n_sub,
        tx_power_w: tx_power,
        temperature_k: temperature,
        beams,
        sweep,
    })
}
