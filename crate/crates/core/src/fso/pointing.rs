//! Misalignment (pointing-error) loss between the optical beam footprint and
//! the receive aperture.
//!
//! The collected power fraction for a radial displacement ψ is approximated
//! by `A0·exp(−2ψ²/ω_zeq²)`, the standard Gaussian-aperture form. The
//! displacement itself follows a Beckmann law (independent Gaussian
//! horizontal/vertical components with distinct means and variances); the
//! analytical expressions approximate it by a modified Rayleigh law, which
//! turns the loss density into a pure power law on `(0, A0η]` with exponent
//! `g² − 1`. Both the exact Beckmann sampler and the power-law sampler are
//! provided, so tests can quantify the approximation gap.

use crate::error::{Error, Result};
use crate::numerics::special::erf;
use rand::Rng;
use rand_distr::StandardNormal;

// ── Geometry-derived constants ──────────────────────────────────────────

/// `(v, A0, ω_zeq²)` for an aperture of radius `a` and a received beam
/// waist `ω_z`: `v = √(π/2)·a/ω_z`, `A0 = erf²(v)` (peak collected
/// fraction), and the equivalent beam width `ω_zeq² = ω_z²·√π·erf(v) /
/// (2v·e^{−v²})`.
fn aperture_constants(aperture_radius: f64, beam_waist: f64) -> (f64, f64, f64) {
    let v = (std::f64::consts::PI / 2.0).sqrt() * aperture_radius / beam_waist;
    let e = erf(v);
    let a0 = e * e;
    let wzeq_sq =
        beam_waist * beam_waist * std::f64::consts::PI.sqrt() * e / (2.0 * v * (-v * v).exp());
    (v, a0, wzeq_sq)
}

/// Beam waist after propagating `distance` from a transmitter waist
/// `waist` (all lengths in meters): `ω_z = ω₀·√(1 + (λL/(πω₀²))²)`.
pub fn beam_waist_at(waist: f64, wavelength: f64, distance: f64) -> Result<f64> {
    if !(waist > 0.0) || !(wavelength > 0.0) || !(distance > 0.0) {
        return Err(Error::invalid("beam geometry", "waist, wavelength, and distance must be positive"));
    }
    let spread = wavelength * distance / (std::f64::consts::PI * waist * waist);
    Ok(waist * (1.0 + spread * spread).sqrt())
}

/// Jitter standard deviation that produces a target pointing exponent `g²`
/// for a symmetric, zero-offset platform: `σ = ω_zeq/(2g)`.
pub fn jitter_for_g2(aperture_radius: f64, beam_waist: f64, g2: f64) -> Result<f64> {
    if !(aperture_radius > 0.0) || !(beam_waist > 0.0) || !(g2 > 0.0) {
        return Err(Error::invalid("jitter_for_g2", "all arguments must be positive"));
    }
    let (_, _, wzeq_sq) = aperture_constants(aperture_radius, beam_waist);
    Ok((wzeq_sq / (4.0 * g2)).sqrt())
}

// ── Model ────────────────────────────────────────────────────────────────

/// Pointing loss `Ip ∈ (0, A0η]` for a circular aperture and a Gaussian
/// beam, under Beckmann-distributed displacement approximated by a modified
/// Rayleigh law.
#[derive(Debug, Clone)]
pub struct PointingError {
    aperture_radius: f64,
    beam_waist: f64,
    mu_x: f64,
    mu_y: f64,
    sigma_x: f64,
    sigma_y: f64,
    a0: f64,
    wzeq_sq: f64,
    jitter_sq: f64,
    g2: f64,
    eta: f64,
}

impl PointingError {
    /// Builds the model from the aperture radius, received beam waist, and
    /// the Beckmann displacement parameters (means and standard deviations
    /// of the horizontal/vertical pointing offsets, all in meters).
    pub fn new(
        aperture_radius: f64,
        beam_waist: f64,
        mu_x: f64,
        mu_y: f64,
        sigma_x: f64,
        sigma_y: f64,
    ) -> Result<Self> {
        if !(aperture_radius > 0.0) || !aperture_radius.is_finite() {
            return Err(Error::invalid("aperture_radius", "must be finite and positive"));
        }
        if !(beam_waist > 0.0) || !beam_waist.is_finite() {
            return Err(Error::invalid("beam_waist", "must be finite and positive"));
        }
        if !(sigma_x > 0.0) || !(sigma_y > 0.0) || !sigma_x.is_finite() || !sigma_y.is_finite() {
            return Err(Error::invalid("jitter sigma", "must be finite and positive"));
        }
        if !mu_x.is_finite() || !mu_y.is_finite() {
            return Err(Error::invalid("boresight offset", "must be finite"));
        }

        let (_, a0, wzeq_sq) = aperture_constants(aperture_radius, beam_waist);
        // Modified-Rayleigh jitter: σ_mod³ matches the Beckmann law's
        // first moments, blending offsets and asymmetric variances.
        let jitter_sq = (0.5
            * (3.0 * mu_x * mu_x * sigma_x.powi(4)
                + 3.0 * mu_y * mu_y * sigma_y.powi(4)
                + sigma_x.powi(6)
                + sigma_y.powi(6)))
        .cbrt();
        let g2 = wzeq_sq / (4.0 * jitter_sq);
        let phi_x_sq = wzeq_sq / (4.0 * sigma_x * sigma_x);
        let phi_y_sq = wzeq_sq / (4.0 * sigma_y * sigma_y);
        // Mean-power correction of the approximation; exactly 1 for a
        // symmetric, zero-offset platform.
        let eta = (1.0 / g2
            - 1.0 / (2.0 * phi_x_sq)
            - 1.0 / (2.0 * phi_y_sq)
            - mu_x * mu_x / (2.0 * sigma_x * sigma_x * phi_x_sq)
            - mu_y * mu_y / (2.0 * sigma_y * sigma_y * phi_y_sq))
            .exp();

        Ok(Self {
            aperture_radius,
            beam_waist,
            mu_x,
            mu_y,
            sigma_x,
            sigma_y,
            a0,
            wzeq_sq,
            jitter_sq,
            g2,
            eta,
        })
    }

    /// Symmetric zero-offset platform (`μ = 0`, `σx = σy = σ`), for which
    /// the modified-Rayleigh law is the displacement's exact distribution.
    pub fn symmetric(aperture_radius: f64, beam_waist: f64, sigma: f64) -> Result<Self> {
        Self::new(aperture_radius, beam_waist, 0.0, 0.0, sigma, sigma)
    }

    /// Aperture radius (m).
    pub fn aperture_radius(&self) -> f64 {
        self.aperture_radius
    }

    /// Received beam waist (m).
    pub fn beam_waist(&self) -> f64 {
        self.beam_waist
    }

    /// Peak collected fraction `A0 = erf²(v)` at zero displacement.
    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// Equivalent beam width squared `ω_zeq²`.
    pub fn equivalent_waist_sq(&self) -> f64 {
        self.wzeq_sq
    }

    /// Modified-Rayleigh jitter variance `σ_mod²`.
    pub fn jitter_sq(&self) -> f64 {
        self.jitter_sq
    }

    /// Pointing exponent `g² = ω_zeq²/(4σ_mod²)`; large values mean the beam
    /// dwarfs the jitter and the loss concentrates near `A0η`.
    pub fn g2(&self) -> f64 {
        self.g2
    }

    /// Mean-power correction η of the modified-Rayleigh approximation.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Upper end of the support, `A0η`.
    pub fn support_max(&self) -> f64 {
        self.a0 * self.eta
    }

    /// Power-law density `g²/(A0η)^{g²}·I^{g²−1}` on `(0, A0η]`.
    pub fn pdf(&self, loss: f64) -> f64 {
        let top = self.support_max();
        if !(loss > 0.0) || loss > top {
            return 0.0;
        }
        self.g2 / top.powf(self.g2) * loss.powf(self.g2 - 1.0)
    }

    /// Distribution function `(I/(A0η))^{g²}`, clamped to `[0, 1]`.
    pub fn cdf(&self, loss: f64) -> f64 {
        if !(loss > 0.0) {
            return 0.0;
        }
        (loss / self.support_max()).min(1.0).powf(self.g2)
    }

    /// `E[Ip^order] = g²(A0η)^order/(g² + order)`; diverges for
    /// `order ≤ −g²`, which is a `Domain` error.
    pub fn moment(&self, order: f64) -> Result<f64> {
        if order <= -self.g2 {
            return Err(Error::domain(
                "pointing moment",
                "order must exceed −g²; the power-law integral diverges",
            ));
        }
        Ok(self.g2 * self.support_max().powf(order) / (self.g2 + order))
    }

    /// Mean log-loss `E[ln Ip] = ln(A0η) − 1/g²`.
    pub fn log_moment(&self) -> f64 {
        self.support_max().ln() - 1.0 / self.g2
    }

    /// Draws from the modified-Rayleigh power law: `A0η·U^{1/g²}`. This is
    /// the law all the closed-form expressions integrate against.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.support_max() * rng.gen::<f64>().powf(1.0 / self.g2)
    }

    /// Draws from the exact Beckmann displacement: Gaussian offsets in both
    /// axes, then `A0·exp(−2ψ²/ω_zeq²)`. Differs from [`Self::sample`] by
    /// the approximation gap the analytic model accepts.
    pub fn sample_beckmann<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let x = self.mu_x + self.sigma_x * rng.sample::<f64, _>(StandardNormal);
        let y = self.mu_y + self.sigma_y * rng.sample::<f64, _>(StandardNormal);
        self.a0 * (-2.0 * (x * x + y * y) / self.wzeq_sq).exp()
    }
}

// ── Tests ────────────────────────────────────────────────────────────────
