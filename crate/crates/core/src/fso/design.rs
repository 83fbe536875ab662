//! Transmitter design studies: how the choice of transmit beam waist
//! trades beam-spread loss against misalignment sensitivity, and where the
//! resulting outage minimum sits.

use crate::error::{Error, Result};
use crate::fso::pointing::{beam_waist_at, PointingError};
use crate::fso::{FsoLink, MalagaChannel};

/// Outage against transmit beam waist at a fixed irradiance threshold.
#[derive(Debug, Clone)]
pub struct BeamWaistScan {
    /// Transmit waists scanned (m).
    pub waists: Vec<f64>,
    /// Outage probability at each waist.
    pub outage: Vec<f64>,
    /// Index of the smallest outage.
    pub optimum: usize,
    /// Whether the minimum is interior and the curve is strictly
    /// decreasing before it and strictly increasing after it.
    pub unique_interior_minimum: bool,
}

/// Scans `P(Ia·Ip < threshold)` over transmit waists: each waist spreads
/// to its footprint at the receiver, which sets the collected fraction and
/// the misalignment sensitivity at the given jitter. Deterministic loss is
/// left out so the scan isolates the geometric trade-off.
pub fn beam_waist_scan(
    turbulence: &MalagaChannel,
    aperture_radius: f64,
    link_length: f64,
    wavelength: f64,
    jitter: f64,
    threshold_irradiance: f64,
    waists: &[f64],
) -> Result<BeamWaistScan> {
    if waists.len() < 3 {
        return Err(Error::invalid("waists", "need at least three scan points"));
    }
    if waists.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("waists", "scan grid must be strictly increasing"));
    }
    if !(threshold_irradiance > 0.0) || !threshold_irradiance.is_finite() {
        return Err(Error::invalid("threshold", "must be finite and positive"));
    }
    let mut outage = Vec::with_capacity(waists.len());
    for &w0 in waists {
        let footprint = beam_waist_at(w0, wavelength, link_length)?;
        let pointing = PointingError::symmetric(aperture_radius, footprint, jitter)?;
        // Unit deterministic loss and unit noise: only the distribution of
        // Ia·Ip enters the threshold probability.
        let link = FsoLink::new(turbulence.clone(), pointing, 1.0, 1.0)?;
        outage.push(link.combined_cdf(threshold_irradiance)?);
    }
    let optimum = outage
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty scan");
    let interior = optimum > 0 && optimum + 1 < outage.len();
    let shaped = outage[..optimum].windows(2).all(|w| w[1] < w[0])
        && outage[optimum..].windows(2).all(|w| w[1] > w[0]);
    Ok(BeamWaistScan {
        waists: waists.to_vec(),
        outage,
        optimum,
        unique_interior_minimum: interior && shaped,
    })
}

// ── Tests ────────────────────────────────────────────────────────────────
