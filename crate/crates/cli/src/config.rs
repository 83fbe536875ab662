//! Scenario configuration: a flat-section `key = value` text format,
//! layered as built-in defaults → named preset → config file → flag
//! overrides, then parsed into typed core objects. The canonicalized
//! merged text (without the output section) is hashed into every CSV
//! footer for provenance.

use fsonet::error::Error as CoreError;
use fsonet::fso::link::Detection;
use fsonet::fso::pathloss;
use fsonet::fso::pointing::PointingError;
use fsonet::fso::{FsoLink, MalagaChannel};
use fsonet::geometry::DistanceModel;
use fsonet::irs::EnsembleConfig;
use fsonet::presets;
use fsonet::uplink::{db_to_linear, UplinkConfig};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

/// A configuration problem: malformed text, unknown names, or values that
/// do not describe a usable scenario. Mapped to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<CoreError> for ConfigError {
    fn from(e: CoreError) -> Self {
        ConfigError(e.to_string())
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

// ── Raw layer ────────────────────────────────────────────────────────────

/// Parsed but untyped configuration: ordered sections of ordered keys.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

const KNOWN_SECTIONS: &[(&str, &[&str])] = &[
    (
        "uplink",
        &[
            "density",
            "pathloss_exponent",
            "power_control",
            "fading_mean",
            "noise_power",
            "distance_model",
            "interferer_density",
            "window_radius",
        ],
    ),
    (
        "fso",
        &[
            "weather",
            "detection",
            "aperture_radius",
            "divergence",
            "wavelength",
            "length",
            "noise_power",
            "mean_snr_db",
        ],
    ),
    ("turbulence", &["alpha", "beta", "b0", "rho", "omega", "theta_a", "theta_b"]),
    ("pointing", &["beam_waist", "offset_x", "offset_y", "jitter_x", "jitter_y"]),
    ("hybrid", &["threshold_db", "half_duplex"]),
    ("irs", &["instances", "interferer_count", "snr0_db", "df_baseline"]),
    (
        "beamwaist",
        &["aperture_radius", "length", "wavelength", "jitter_ratio", "threshold"],
    ),
    ("sweep", &["variable", "grid", "mc_budget", "seed"]),
    ("output", &["path"]),
];

impl RawConfig {
    /// Parses the documented grammar: `[section]` headers, `key = value`
    /// lines, full-line `#` comments, blank lines ignored.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RawConfig::default();
        let mut section: Option<String> = None;
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return err(format!("line {}: unterminated section header", lineno + 1));
                };
                let name = name.trim();
                if !KNOWN_SECTIONS.iter().any(|(s, _)| *s == name) {
                    return err(format!("line {}: unknown section `[{name}]`", lineno + 1));
                }
                section = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected `key = value`, got `{line}`", lineno + 1));
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(section) = section.as_deref() else {
                return err(format!("line {}: `{key}` appears before any [section]", lineno + 1));
            };
            let allowed = KNOWN_SECTIONS
                .iter()
                .find(|(s, _)| *s == section)
                .map(|(_, keys)| *keys)
                .unwrap_or(&[]);
            if !allowed.contains(&key) {
                return err(format!("line {}: unknown key `{section}.{key}`", lineno + 1));
            }
            if value.is_empty() {
                return err(format!("line {}: `{section}.{key}` has an empty value", lineno + 1));
            }
            let entry = cfg.sections.entry(section.to_string()).or_default();
            if entry.insert(key.to_string(), value.to_string()).is_some() {
                return err(format!("line {}: duplicate key `{section}.{key}`", lineno + 1));
            }
        }
        Ok(cfg)
    }

    fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.into());
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(String::as_str)
    }

    /// Overlays `other` on top of `self`, key by key.
    pub fn merge_from(&mut self, other: &RawConfig) {
        for (section, keys) in &other.sections {
            for (key, value) in keys {
                self.set(section, key, value.clone());
            }
        }
    }

    /// Canonical flat text: `section.key=value` lines, sorted, with the
    /// output section excluded (the destination is not part of the
    /// scenario's identity).
    pub fn canonical(&self) -> String {
        let mut lines = Vec::new();
        for (section, keys) in &self.sections {
            if section == "output" {
                continue;
            }
            for (key, value) in keys {
                lines.push(format!("{section}.{key}={value}"));
            }
        }
        lines.join("\n")
    }

    pub fn sha256_hex(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Built-in defaults: the reference cellular network, optical terminal,
/// clear air, and the reference turbulence/pointing channels.
pub fn defaults() -> RawConfig {
    let mut cfg = RawConfig::default();
    cfg.set("uplink", "density", "0.25");
    cfg.set("uplink", "pathloss_exponent", "3.5");
    cfg.set("uplink", "power_control", "0.6");
    cfg.set("uplink", "fading_mean", "0.15");
    cfg.set("uplink", "noise_power", "1.250608150411006e-12");
    cfg.set("uplink", "distance_model", "ppp_rayleigh");
    cfg.set("fso", "weather", "clear_air");
    cfg.set("fso", "detection", "heterodyne");
    cfg.set("fso", "aperture_radius", "0.05");
    cfg.set("fso", "divergence", "0.01");
    cfg.set("fso", "wavelength", "1.55e-6");
    cfg.set("fso", "length", "1000");
    cfg.set("fso", "noise_power", "1e-7");
    cfg.set("turbulence", "alpha", "2.296");
    cfg.set("turbulence", "beta", "2");
    cfg.set("turbulence", "b0", "0.1079");
    cfg.set("turbulence", "rho", "0.596");
    cfg.set("turbulence", "omega", "1.3265");
    cfg.set("turbulence", "theta_a", "1.5707963267948966");
    cfg.set("turbulence", "theta_b", "0");
    cfg.set("pointing", "beam_waist", "0.5");
    cfg.set("pointing", "offset_x", "0.05");
    cfg.set("pointing", "offset_y", "0.05");
    cfg.set("pointing", "jitter_x", "0.15");
    cfg.set("pointing", "jitter_y", "0.15");
    cfg.set("hybrid", "threshold_db", "0");
    cfg.set("hybrid", "half_duplex", "false");
    cfg.set("irs", "instances", "2000");
    cfg.set("irs", "interferer_count", "3");
    cfg.set("irs", "snr0_db", "20");
    cfg.set("irs", "df_baseline", "auto");
    cfg.set("beamwaist", "aperture_radius", "0.002");
    cfg.set("beamwaist", "length", "100");
    cfg.set("beamwaist", "wavelength", "1.55e-6");
    cfg.set("beamwaist", "jitter_ratio", "3.5");
    cfg.set("beamwaist", "threshold", "1e-4");
    cfg.set("sweep", "seed", "0");
    cfg
}

/// Named preset fragments. `tableIII` restates the reference network,
/// `tableI` the optical terminal, and the weather names pick a condition.
pub fn preset(name: &str) -> Result<RawConfig, ConfigError> {
    let mut cfg = RawConfig::default();
    match name {
        "tableIII" => {
            cfg.set("uplink", "density", "0.25");
            cfg.set("uplink", "pathloss_exponent", "3.5");
            cfg.set("uplink", "power_control", "0.6");
            cfg.set("uplink", "fading_mean", "0.15");
            cfg.set("uplink", "noise_power", "1.250608150411006e-12");
        }
        "tableI" => {
            cfg.set("fso", "aperture_radius", "0.05");
            cfg.set("fso", "divergence", "0.01");
            cfg.set("fso", "wavelength", "1.55e-6");
            cfg.set("fso", "noise_power", "1e-7");
        }
        "clear_air" | "moderate_fog" | "moderate_rain" => {
            cfg.set("fso", "weather", name);
        }
        other => return err(format!("unknown preset `{other}`")),
    }
    Ok(cfg)
}

// ── Typed layer ──────────────────────────────────────────────────────────

/// The sweep axis: a strictly increasing grid over the subcommand's single
/// variable, an MC budget, and the master seed.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub grid: Vec<f64>,
    pub mc_budget: usize,
    pub seed: u64,
}

/// Fixed parameters of the beam-waist design scan.
#[derive(Debug, Clone, Copy)]
pub struct BeamWaistSettings {
    pub aperture_radius: f64,
    pub length: f64,
    pub wavelength: f64,
    pub jitter_ratio: f64,
    pub threshold: f64,
}

/// Everything a subcommand needs, fully typed and validated.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub uplink: UplinkConfig,
    pub detection: Detection,
    pub fso_link: FsoLink,
    pub weather_name: String,
    pub hybrid_threshold_db: f64,
    pub half_duplex: bool,
    pub irs_ensemble: EnsembleConfig,
    /// Fixed DF baseline rate in nats, or `None` to derive it from the
    /// configured chain.
    pub irs_df_baseline: Option<f64>,
    pub beamwaist: BeamWaistSettings,
    pub sweep: Sweep,
    pub out: Option<PathBuf>,
    pub config_sha256: String,
}

/// Per-subcommand sweep defaults: (variable, grid, MC budget).
fn sweep_defaults(subcommand: &str) -> (&'static str, &'static str, usize) {
    match subcommand {
        "coverage" => ("threshold_db", "-10:1:20", 20_000),
        "rate" => ("density", "0.1:0.1:0.5", 20_000),
        "fso" => ("threshold_snr_db", "-30:2:30", 100_000),
        "hybrid" => ("threshold_db", "-10:1:20", 20_000),
        "irs" => ("elements", "1:1:10", 2_000),
        "diversity" => ("snr_offset_db", "16:4:52", 20_000),
        "beamwaist" => ("waist_m", "0.01:0.001:0.06", 20_000),
        "distances" => ("distance", "0:0.25:5", 100_000),
        other => unreachable!("unknown subcommand `{other}`"),
    }
}

/// Parses `start:step:stop` (inclusive) or a comma-separated list into a
/// grid. Range endpoints are expanded in decimal-scaled integer steps so
/// grids like `0.1:0.1:0.5` land on exact decimals.
fn parse_grid(text: &str) -> Result<Vec<f64>, ConfigError> {
    let text = text.trim();
    if text.is_empty() {
        return err("sweep.grid: empty grid");
    }
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return err(format!("sweep.grid: expected `start:step:stop`, got `{text}`"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| parse_number(p, "sweep.grid"))
            .collect::<Result<_, _>>()?;
        let (start, step, stop) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) {
            return err("sweep.grid: step must be positive");
        }
        if stop < start {
            return err("sweep.grid: stop must not precede start");
        }
        let decimals = parts.iter().map(|p| decimal_places(p)).max().unwrap_or(0);
        let scale = 10f64.powi(decimals as i32);
        let start_i = (start * scale).round();
        let step_i = (step * scale).round();
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| (start_i + step_i * k as f64) / scale).collect()
    } else {
        text.split(',')
            .map(|p| parse_number(p, "sweep.grid"))
            .collect::<Result<Vec<f64>, _>>()?
    };
    if values.is_empty() {
        return err("sweep.grid: empty grid");
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return err("sweep.grid: grid must be strictly increasing");
    }
    Ok(values)
}

fn decimal_places(text: &str) -> usize {
    let t = text.trim();
    if t.contains(['e', 'E']) {
        return 12;
    }
    t.split_once('.').map(|(_, frac)| frac.len()).unwrap_or(0)
}

fn parse_number(text: &str, what: &str) -> Result<f64, ConfigError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("{what}: expected a number, got `{}`", text.trim())))?;
    if !v.is_finite() {
        return err(format!("{what}: must be finite"));
    }
    Ok(v)
}

struct Typed<'a>(&'a RawConfig);

impl Typed<'_> {
    fn f64(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        let text = self
            .0
            .get(section, key)
            .ok_or_else(|| ConfigError(format!("{section}.{key}: missing value")))?;
        parse_number(text, &format!("{section}.{key}"))
    }

    fn usize(&self, section: &str, key: &str) -> Result<usize, ConfigError> {
        let text = self
            .0
            .get(section, key)
            .ok_or_else(|| ConfigError(format!("{section}.{key}: missing value")))?;
        text.trim().parse().map_err(|_| {
            ConfigError(format!("{section}.{key}: expected a non-negative integer, got `{text}`"))
        })
    }

    fn str(&self, section: &str, key: &str) -> Result<&str, ConfigError> {
        self.0
            .get(section, key)
            .ok_or_else(|| ConfigError(format!("{section}.{key}: missing value")))
    }
}

impl Scenario {
    /// Builds the typed scenario for `subcommand` from the merged raw
    /// configuration, validating every field along the way.
    pub fn build(raw: &RawConfig, subcommand: &str) -> Result<Self, ConfigError> {
        let mut raw = raw.clone();
        let (default_var, default_grid, default_budget) = sweep_defaults(subcommand);
        let budget_explicit = raw.get("sweep", "mc_budget").is_some();
        if raw.get("sweep", "variable").is_none() {
            raw.set("sweep", "variable", default_var);
        }
        if raw.get("sweep", "grid").is_none() {
            raw.set("sweep", "grid", default_grid);
        }
        if raw.get("sweep", "mc_budget").is_none() {
            raw.set("sweep", "mc_budget", default_budget.to_string());
        }
        let t = Typed(&raw);

        // Sweep axis: the single variable must be the one the subcommand
        // sweeps, the grid strictly increasing, the budget at least 10³.
        let variable = t.str("sweep", "variable")?.to_string();
        if variable != default_var {
            return err(format!(
                "sweep.variable: `{subcommand}` sweeps `{default_var}`, got `{variable}`"
            ));
        }
        let grid = parse_grid(t.str("sweep", "grid")?)?;
        let mc_budget = t.usize("sweep", "mc_budget")?;
        if mc_budget < 1_000 {
            return err(format!("sweep.mc_budget: must be at least 1000, got {mc_budget}"));
        }
        let seed = t.str("sweep", "seed")?.trim().parse::<u64>().map_err(|_| {
            ConfigError("sweep.seed: expected an unsigned integer".to_string())
        })?;
        if variable == "elements" {
            for &v in &grid {
                if v.fract() != 0.0 || v < 1.0 {
                    return err("sweep.grid: element counts must be integers ≥ 1");
                }
            }
        }

        // Uplink network.
        let fading_mean = t.f64("uplink", "fading_mean")?;
        if !(fading_mean > 0.0) {
            return err("uplink.fading_mean: must be positive");
        }
        let distance_model = match t.str("uplink", "distance_model")? {
            "full_ppp" => DistanceModel::FullPpp,
            "ppp_rayleigh" => DistanceModel::PppRayleigh,
            "ppp_uniform" => DistanceModel::PppUniform,
            "hexagonal" => DistanceModel::Hexagonal,
            other => {
                return err(format!(
                    "uplink.distance_model: unknown model `{other}` (expected full_ppp, \
                     ppp_rayleigh, ppp_uniform, or hexagonal)"
                ))
            }
        };
        let interferer_density = match raw.get("uplink", "interferer_density") {
            Some(_) => Some(t.f64("uplink", "interferer_density")?),
            None => None,
        };
        let window_radius = match raw.get("uplink", "window_radius") {
            Some(_) => Some(t.f64("uplink", "window_radius")?),
            None => None,
        };
        let uplink = UplinkConfig {
            density: t.f64("uplink", "density")?,
            pathloss_exponent: t.f64("uplink", "pathloss_exponent")?,
            power_control: t.f64("uplink", "power_control")?,
            fading_rate: 1.0 / fading_mean,
            noise_power: t.f64("uplink", "noise_power")?,
            distance_model,
            interferer_density,
            window_radius,
        };
        uplink.validate()?;

        // Optical chain.
        let detection = match t.str("fso", "detection")? {
            "heterodyne" => Detection::Heterodyne,
            "im_dd" => Detection::ImDd,
            other => {
                return err(format!(
                    "fso.detection: unknown mode `{other}` (expected heterodyne or im_dd)"
                ))
            }
        };
        let weather_name = t.str("fso", "weather")?.to_string();
        let weather = presets::weather(&weather_name)?;
        let beta = t.usize("turbulence", "beta")?;
        if beta == 0 || beta > u32::MAX as usize {
            return err("turbulence.beta: must be a positive integer");
        }
        let turbulence = MalagaChannel::new(
            t.f64("turbulence", "alpha")?,
            beta as u32,
            t.f64("turbulence", "b0")?,
            t.f64("turbulence", "rho")?,
            t.f64("turbulence", "omega")?,
            t.f64("turbulence", "theta_a")?,
            t.f64("turbulence", "theta_b")?,
        )?;
        let pointing = PointingError::new(
            t.f64("fso", "aperture_radius")?,
            t.f64("pointing", "beam_waist")?,
            t.f64("pointing", "offset_x")?,
            t.f64("pointing", "offset_y")?,
            t.f64("pointing", "jitter_x")?,
            t.f64("pointing", "jitter_y")?,
        )?;
        let loss = pathloss::path_loss(
            t.f64("fso", "aperture_radius")?,
            t.f64("fso", "divergence")?,
            t.f64("fso", "length")?,
            weather.attenuation_db_per_km,
        )?;
        let mut fso_link =
            FsoLink::new(turbulence, pointing, loss, t.f64("fso", "noise_power")?)?;
        if raw.get("fso", "mean_snr_db").is_some() {
            let target = db_to_linear(t.f64("fso", "mean_snr_db")?);
            fso_link = fso_link.with_mean_snr(detection, target)?;
        }

        // Relay comparison settings.
        let half_duplex = match t.str("hybrid", "half_duplex")? {
            "true" => true,
            "false" => false,
            other => return err(format!("hybrid.half_duplex: expected true or false, got `{other}`")),
        };
        let hybrid_threshold_db = t.f64("hybrid", "threshold_db")?;

        // Reflecting-surface ensemble. An explicitly set MC budget is the
        // instance count for the `irs` subcommand; otherwise the section's
        // own `instances` applies.
        let instances = if subcommand == "irs" && budget_explicit {
            mc_budget
        } else {
            t.usize("irs", "instances")?
        };
        if instances == 0 {
            return err("irs.instances: must be at least 1");
        }
        let max_elements =
            if variable == "elements" { grid.last().copied().unwrap_or(10.0) as usize } else { 10 };
        let irs_ensemble = EnsembleConfig {
            density: uplink.density,
            pathloss_exponent: uplink.pathloss_exponent,
            power_control: uplink.power_control,
            interferer_count: t.usize("irs", "interferer_count")?,
            snr0_db: t.f64("irs", "snr0_db")?,
            instances,
            max_elements,
            seed,
        };
        let irs_df_baseline = match t.str("irs", "df_baseline")? {
            "auto" => None,
            text => Some(parse_number(text, "irs.df_baseline")?),
        };

        let beamwaist = BeamWaistSettings {
            aperture_radius: t.f64("beamwaist", "aperture_radius")?,
            length: t.f64("beamwaist", "length")?,
            wavelength: t.f64("beamwaist", "wavelength")?,
            jitter_ratio: t.f64("beamwaist", "jitter_ratio")?,
            threshold: t.f64("beamwaist", "threshold")?,
        };

        let out = raw.get("output", "path").map(PathBuf::from);
        let config_sha256 = raw.sha256_hex();
        Ok(Scenario {
            uplink,
            detection,
            fso_link,
            weather_name,
            hybrid_threshold_db,
            half_duplex,
            irs_ensemble,
            irs_df_baseline,
            beamwaist,
            sweep: Sweep { grid, mc_budget, seed },
            out,
            config_sha256,
        })
    }
}

// ── Tests ────────────────────────────────────────────────────────────────
