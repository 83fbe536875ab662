//! Deterministic attenuation of the optical link and turbulence-strength
//! helpers.
//!
//! The loss factor has two parts: geometric spreading of a diverging beam
//! over a circular aperture, `πa²/(θL)²` (a far-field approximation, valid
//! when the footprint dwarfs the aperture), and exponential weather
//! extinction with the conventional `4.343 dB ↔ neper` conversion.

use crate::error::{Error, Result};

/// dB-per-km to nepers-per-km conversion constant (`10/ln 10`, to the
/// customary number of digits used with visibility-derived tables).
const DB_PER_NEPER: f64 = 4.343;

/// Fraction of transmitted power gathered by an aperture of radius `a` (m)
/// from a beam of full divergence `theta` (rad) after `distance` (m):
/// `πa²/(θL)²`.
pub fn geometric_gathering(aperture_radius: f64, divergence: f64, distance: f64) -> Result<f64> {
    if !(aperture_radius > 0.0) || !(divergence > 0.0) || !(distance > 0.0) {
        return Err(Error::invalid(
            "geometric_gathering",
            "aperture, divergence, and distance must be positive",
        ));
    }
    let footprint = divergence * distance;
    Ok(std::f64::consts::PI * aperture_radius * aperture_radius / (footprint * footprint))
}

/// Deterministic loss factor `Iℓ`: geometric gathering times weather
/// extinction `exp(−σL)` for an attenuation coefficient given in dB/km.
pub fn path_loss(
    aperture_radius: f64,
    divergence: f64,
    distance: f64,
    attenuation_db_per_km: f64,
) -> Result<f64> {
    if !(attenuation_db_per_km >= 0.0) || !attenuation_db_per_km.is_finite() {
        return Err(Error::invalid("attenuation", "must be finite and non-negative"));
    }
    let geometric = geometric_gathering(aperture_radius, divergence, distance)?;
    let nepers = attenuation_db_per_km / DB_PER_NEPER * (distance / 1000.0);
    Ok(geometric * (-nepers).exp())
}

/// Rytov variance `σ_R² = 1.23·Cn²·k^{7/6}·L^{11/6}` for a plane wave —
/// the standard scintillation-strength figure used to pick turbulence
/// parameters (weak fluctuations below ≈ 1, strong above).
pub fn rytov_variance(cn2: f64, wavelength: f64, distance: f64) -> Result<f64> {
    if !(cn2 > 0.0) || !(wavelength > 0.0) || !(distance > 0.0) {
        return Err(Error::invalid(
            "rytov_variance",
            "structure constant, wavelength, and distance must be positive",
        ));
    }
    let k = std::f64::consts::TAU / wavelength;
    Ok(1.23 * cn2 * k.powf(7.0 / 6.0) * distance.powf(11.0 / 6.0))
}

// ── Tests ────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs()
    }

    #[test]
    fn clear_air_kilometre_link() {
        // a = 5 cm, θ = 10 mrad, L = 1 km, 0.43 dB/km.
        let loss = path_loss(0.05, 0.01, 1000.0, 0.43).unwrap();
        assert!(rel_err(loss, 7.113616161731403e-5) < 1e-12);
        // Zero attenuation leaves pure geometric spreading.
        let geo = geometric_gathering(0.05, 0.01, 1000.0).unwrap();
        assert!(rel_err(geo, std::f64::consts::PI * 0.0025 / 100.0) < 1e-15);
    }

    #[test]
    fn extinction_scales_exponentially_with_attenuation() {
        let clear = path_loss(0.05, 0.01, 1000.0, 0.43).unwrap();
        let fog = path_loss(0.05, 0.01, 1000.0, 42.2).unwrap();
        let expected_ratio = ((0.43 - 42.2) / DB_PER_NEPER).exp();
        assert!(rel_err(fog / clear, expected_ratio) < 1e-12);
        // Attenuation integrates over the path length in km.
        let two_km = path_loss(0.05, 0.01, 2000.0, 0.43).unwrap();
        let geo_ratio: f64 = 0.25;
        assert!(rel_err(two_km / clear, geo_ratio * (-0.43 / DB_PER_NEPER).exp()) < 1e-12);
    }

    #[test]
    fn rytov_variance_reference_point() {
        // Cn² = 5e-14, λ = 1550 nm, L = 1 km: just under the strong-
        // fluctuation boundary.
        let rytov = rytov_variance(5e-14, 1.55e-6, 1000.0).unwrap();
        assert!(rel_err(rytov, 0.9954771925563513) < 1e-12);
        // 11/6 power of distance.
        let double = rytov_variance(5e-14, 1.55e-6, 2000.0).unwrap();
        assert!(rel_err(double / rytov, 2f64.powf(11.0 / 6.0)) < 1e-12);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(geometric_gathering(0.0, 0.01, 1000.0).is_err());
        assert!(path_loss(0.05, 0.01, 1000.0, -1.0).is_err());
        assert!(rytov_variance(0.0, 1.55e-6, 1000.0).is_err());
    }
}
