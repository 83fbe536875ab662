//! Named parameter sets shared by the examples, the integration tests, and
//! the CLI: the reference cellular network, the reference turbulence and
//! pointing channels, the optical terminal geometry, and standard weather
//! conditions.

use crate::error::{Error, Result};
use crate::fso::pathloss;
use crate::fso::{Detection, FsoLink, MalagaChannel, PointingError};
use crate::geometry::DistanceModel;
use crate::hybrid::HybridLink;
use crate::uplink::UplinkConfig;

// ── Weather ──────────────────────────────────────────────────────────────

/// Atmospheric condition: extinction plus refractive-index structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weather {
    pub name: &'static str,
    /// Extinction coefficient (dB/km).
    pub attenuation_db_per_km: f64,
    /// Refractive-index structure parameter Cn² (m^{−2/3}).
    pub cn2: f64,
}

pub const CLEAR_AIR: Weather =
    Weather { name: "clear_air", attenuation_db_per_km: 0.43, cn2: 5e-14 };
pub const MODERATE_FOG: Weather =
    Weather { name: "moderate_fog", attenuation_db_per_km: 42.2, cn2: 2e-15 };
pub const MODERATE_RAIN: Weather =
    Weather { name: "moderate_rain", attenuation_db_per_km: 5.8, cn2: 5e-15 };

/// Every named weather condition, mildest first.
pub fn all_weather() -> [&'static Weather; 3] {
    [&CLEAR_AIR, &MODERATE_RAIN, &MODERATE_FOG]
}

/// Look up a weather condition by its name.
pub fn weather(name: &str) -> Result<&'static Weather> {
    all_weather()
        .into_iter()
        .find(|w| w.name == name)
        .ok_or_else(|| Error::invalid("weather", format!("unknown condition `{name}`")))
}

// ── Optical terminal geometry ────────────────────────────────────────────

/// Receiver aperture radius (m) of the reference terminal.
pub const APERTURE_RADIUS: f64 = 0.05;
/// Transmit beam divergence (rad).
pub const DIVERGENCE: f64 = 0.01;
/// Carrier wavelength (m).
pub const WAVELENGTH: f64 = 1.55e-6;
/// Backhaul span (m).
pub const LINK_LENGTH: f64 = 1000.0;
/// Receiver thermal noise variance (W²ʳ-consistent units).
pub const RECEIVER_NOISE: f64 = 1e-7;

// ── Reference channels and network ───────────────────────────────────────

/// The reference cellular uplink: density 0.25, pathloss exponent 3.5,
/// fractional power control 0.6, mean fading power 0.15 W, thermal noise
/// for a 300 MHz front end.
pub fn reference_uplink() -> UplinkConfig {
    UplinkConfig {
        density: 0.25,
        pathloss_exponent: 3.5,
        power_control: 0.6,
        fading_rate: 1.0 / 0.15,
        noise_power: 1.250608150411006e-12,
        distance_model: DistanceModel::PppRayleigh,
        interferer_density: None,
        window_radius: None,
    }
}

/// The reference turbulence channel (moderate-coupling mixture with a
/// two-term scatter series).
pub fn reference_turbulence() -> MalagaChannel {
    MalagaChannel::new(2.296, 2, 0.1079, 0.596, 1.3265, std::f64::consts::FRAC_PI_2, 0.0)
        .expect("reference turbulence parameters are valid")
}

/// The reference misalignment: 5 cm aperture, 50 cm beam footprint,
/// 5 cm boresight offset and 15 cm jitter per axis.
pub fn reference_pointing() -> PointingError {
    PointingError::new(APERTURE_RADIUS, 0.5, 0.05, 0.05, 0.15, 0.15)
        .expect("reference pointing parameters are valid")
}

/// The reference optical backhaul under the given weather: reference
/// turbulence and pointing behind the terminal geometry's deterministic
/// gathering and extinction loss.
pub fn reference_fso_link(weather: &Weather) -> Result<FsoLink> {
    let loss = pathloss::path_loss(
        APERTURE_RADIUS,
        DIVERGENCE,
        LINK_LENGTH,
        weather.attenuation_db_per_km,
    )?;
    FsoLink::new(reference_turbulence(), reference_pointing(), loss, RECEIVER_NOISE)
}

/// The default decode-and-forward chain the element-count comparison is
/// benchmarked against: a clear-air reference backhaul with coherent
/// detection, and the uplink hop provisioned interference-free so the
/// optical hop sets the baseline rate. The comparison's per-hop SNRs are
/// configuration, not physics; this default is documented in the CLI.
pub fn reference_hybrid() -> Result<HybridLink> {
    let uplink = UplinkConfig { interferer_density: Some(0.0), ..reference_uplink() };
    Ok(HybridLink::new(uplink, reference_fso_link(&CLEAR_AIR)?, Detection::Heterodyne))
}

// ── Tests ────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weather_lookup_is_exact_and_rejects_unknown_names() {
        assert_eq!(weather("clear_air").unwrap(), &CLEAR_AIR);
        assert_eq!(weather("moderate_fog").unwrap(), &MODERATE_FOG);
        assert_eq!(weather("moderate_rain").unwrap(), &MODERATE_RAIN);
        assert!(weather("bogus").is_err());
    }

    #[test]
    fn clear_air_reference_link_reproduces_frozen_loss() {
        let link = reference_fso_link(&CLEAR_AIR).unwrap();
        assert!((link.path_loss() - 7.113616161731403e-5).abs() < 1e-18);
        assert_eq!(link.noise_power(), RECEIVER_NOISE);
        // Weather ordering: heavier extinction, smaller deterministic gain.
        let rain = reference_fso_link(&MODERATE_RAIN).unwrap();
        let fog = reference_fso_link(&MODERATE_FOG).unwrap();
        assert!(fog.path_loss() < rain.path_loss());
        assert!(rain.path_loss() < link.path_loss());
    }

    #[test]
    fn reference_network_and_channels_are_consistent() {
        let cfg = reference_uplink();
        cfg.validate().unwrap();
        assert!((cfg.fading_rate * 0.15 - 1.0).abs() < 1e-12);
        let turb = reference_turbulence();
        assert!((turb.mean() - 1.5423).abs() / 1.5423 < 1e-3);
        let point = reference_pointing();
        assert!((point.g2() - 2.550374354715977).abs() < 1e-9);
    }

    #[test]
    fn default_baseline_chain_is_backhaul_limited() {
        let chain = reference_hybrid().unwrap();
        let mean_snr = chain.backhaul.mean_snr(chain.detection);
        // Natural operating point in the low tens of dB.
        assert!(mean_snr > 3.0 && mean_snr < 100.0, "mean SNR {mean_snr}");
    }
}
