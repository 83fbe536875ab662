//! End-to-end metrics when the base station decodes the uplink message and
//! forwards it over the optical backhaul (repetition-coded DF relay).
//!
//! With independent hops the end-to-end SINR is the per-hop minimum, so
//! coverage factorizes into a product of per-hop coverages and the ergodic
//! rate is the per-hop minimum rate. The reference rate expression carries
//! no half-duplex pre-log; an optional flag adds the 1/2 factor for
//! strict-repetition accounting. High-SNR outage curves from this module
//! feed the diversity-order estimate.

use crate::error::{Error, Result};
use crate::fso::{Detection, FsoLink};
use crate::numerics::RngStream;
use crate::stats::{linear_fit, MeanEstimate, RunningMoments};
use crate::uplink::{self, UplinkConfig};
use rayon::prelude::*;

/// End-to-end SINR of the decode-and-forward chain: the per-hop minimum.
pub fn hybrid_sinr(uplink_sinr: f64, backhaul_snr: f64) -> f64 {
    uplink_sinr.min(backhaul_snr)
}

/// A two-hop chain: stochastic-geometry uplink into an FSO backhaul.
#[derive(Debug, Clone)]
pub struct HybridLink {
    pub uplink: UplinkConfig,
    pub backhaul: FsoLink,
    pub detection: Detection,
    /// Apply the 1/2 half-duplex pre-log to the end-to-end rate. Off by
    /// default: the reference expressions carry no pre-log even though the
    /// relay uses two slots, and this flag documents the deviation point.
    pub half_duplex: bool,
}

/// Joint and per-hop metrics at one operating point.
#[derive(Debug, Clone, Copy)]
pub struct HybridResult {
    pub coverage: f64,
    pub rate: f64,
    pub uplink_coverage: f64,
    pub backhaul_coverage: f64,
    pub uplink_rate: f64,
    pub backhaul_rate: f64,
}

impl HybridLink {
    pub fn new(uplink: UplinkConfig, backhaul: FsoLink, detection: Detection) -> Self {
        Self { uplink, backhaul, detection, half_duplex: false }
    }

    /// Same chain with both hops' noise power divided by `factor` — the SNR
    /// sweep axis of outage/diversity curves.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::invalid("scale factor", "must be finite and positive"));
        }
        let mut scaled = self.clone();
        scaled.uplink.noise_power /= factor;
        let backhaul_noise = self.backhaul.noise_power() / factor;
        scaled.backhaul = FsoLink::new(
            self.backhaul.turbulence().clone(),
            self.backhaul.pointing().clone(),
            self.backhaul.path_loss(),
            backhaul_noise,
        )?;
        Ok(scaled)
    }

    /// End-to-end coverage `P(min(SINR_up, γ_bh) > Γ)`: the product of the
    /// per-hop coverages, exact under hop independence.
    pub fn coverage(&self, threshold: f64) -> Result<f64> {
        let up = uplink::coverage_analytic(&self.uplink, threshold)?;
        let bh = 1.0 - self.backhaul.outage_probability(self.detection, threshold)?;
        Ok(up * bh)
    }

    /// End-to-end outage `1 − coverage`.
    pub fn outage(&self, threshold: f64) -> Result<f64> {
        Ok(1.0 - self.coverage(threshold)?)
    }

    /// End-to-end ergodic rate: minimum of the per-hop ergodic rates, with
    /// the optional half-duplex pre-log.
    pub fn rate(&self) -> Result<f64> {
        let up = uplink::rate_analytic(&self.uplink)?;
        let bh = self.backhaul.rate_exact(self.detection)?;
        Ok(self.prelog() * up.min(bh))
    }

    /// Coverage, rate, and their per-hop breakdown at one threshold.
    pub fn evaluate(&self, threshold: f64) -> Result<HybridResult> {
        let uplink_coverage = uplink::coverage_analytic(&self.uplink, threshold)?;
        let backhaul_coverage =
            1.0 - self.backhaul.outage_probability(self.detection, threshold)?;
        let uplink_rate = uplink::rate_analytic(&self.uplink)?;
        let backhaul_rate = self.backhaul.rate_exact(self.detection)?;
        Ok(HybridResult {
            coverage: uplink_coverage * backhaul_coverage,
            rate: self.prelog() * uplink_rate.min(backhaul_rate),
            uplink_coverage,
            backhaul_coverage,
            uplink_rate,
            backhaul_rate,
        })
    }

    /// Monte Carlo end-to-end coverage over paired independent hop draws;
    /// returns the estimate with its Wilson 95% interval.
    pub fn coverage_mc(
        &self,
        threshold: f64,
        realizations: usize,
        seed: u64,
    ) -> Result<(f64, f64, f64)> {
        self.uplink.validate()?;
        if realizations == 0 {
            return Err(Error::invalid("realizations", "need at least one realization"));
        }
        let base = RngStream::new(seed);
        let hits = (0..realizations as u64)
            .into_par_iter()
            .try_fold(
                || 0u64,
                |acc, i| -> Result<u64> {
                    let mut rng = base.substream(i);
                    let net = uplink::sample_realization(&self.uplink, &mut rng)?;
                    let sinr = uplink::sinr_sample(&self.uplink, &net, &mut rng).sinr;
                    let snr = self.backhaul.sample_snr(self.detection, &mut rng);
                    Ok(acc + u64::from(hybrid_sinr(sinr, snr) > threshold))
                },
            )
            .try_reduce(|| 0u64, |a, b| Ok(a + b))?;
        let (lo, hi) = crate::stats::wilson_interval(hits, realizations as u64, 1.96);
        Ok((hits as f64 / realizations as f64, lo, hi))
    }

    /// Monte Carlo rate under per-realization minimum combining:
    /// `E[min(ln(1+SINR_up), ln(1+ϖγ_bh))]`, times the pre-log. Coincides
    /// with [`Self::rate`] whenever one hop dominates.
    pub fn rate_mc(&self, realizations: usize, seed: u64) -> Result<MeanEstimate> {
        self.uplink.validate()?;
        if realizations == 0 {
            return Err(Error::invalid("realizations", "need at least one realization"));
        }
        let varpi = self.detection.rate_offset();
        let prelog = self.prelog();
        let base = RngStream::new(seed);
        // Ordered fixed-size chunks merged sequentially by index keep the
        // floating-point sum independent of rayon's scheduling.
        const CHUNK: u64 = 1024;
        let chunks = (realizations as u64).div_ceil(CHUNK);
        let parts: Result<Vec<RunningMoments>> = (0..chunks)
            .into_par_iter()
            .map(|chunk| -> Result<RunningMoments> {
                let mut acc = RunningMoments::default();
                let lo = chunk * CHUNK;
                let hi = ((chunk + 1) * CHUNK).min(realizations as u64);
                for i in lo..hi {
                    let mut rng = base.substream(i);
                    let net = uplink::sample_realization(&self.uplink, &mut rng)?;
                    let sinr = uplink::sinr_sample(&self.uplink, &net, &mut rng).sinr;
                    let snr = self.backhaul.sample_snr(self.detection, &mut rng);
                    let rate = sinr.ln_1p().min((varpi * snr).ln_1p());
                    acc.push(prelog * rate);
                }
                Ok(acc)
            })
            .collect();
        let moments = parts?.into_iter().fold(RunningMoments::default(), RunningMoments::merge);
        Ok(moments.estimate())
    }

    /// Analytic outage at a fixed threshold across an SNR sweep: each point
    /// scales both hops' noise down by the dB offset.
    pub fn outage_curve(&self, offsets_db: &[f64], threshold: f64) -> Result<Vec<f64>> {
        offsets_db
            .iter()
            .map(|&db| self.scaled(uplink::db_to_linear(db))?.outage(threshold))
            .collect()
    }

    /// Diversity order predicted from the chain parameters:
    /// `min(1, g²/r, α/r, β/r)` — the uplink hop contributes the unit cap,
    /// the optical hop its smallest fading exponent over the detection
    /// exponent r. Exact for coherent detection and for Gamma-Gamma
    /// turbulence; see the diversity fit for the empirical check.
    pub fn predicted_diversity(&self) -> f64 {
        let r = self.detection.fading_exponent();
        let g2 = self.backhaul.pointing().g2();
        let alpha = self.backhaul.turbulence().alpha();
        let beta = f64::from(self.backhaul.turbulence().beta());
        1f64.min(g2 / r).min(alpha / r).min(beta / r)
    }

    fn prelog(&self) -> f64 {
        if self.half_duplex {
            0.5
        } else {
            1.0
        }
    }
}

// ── Diversity-order estimation ───────────────────────────────────────────

/// A fitted high-SNR outage slope.
#[derive(Debug, Clone, Copy)]
pub struct DiversityEstimate {
    /// Fitted decay order: −d log₁₀(outage)/d log₁₀(SNR).
    pub slope: f64,
    /// SNR window (dB) the fit used.
    pub window_db: (f64, f64),
    /// Number of curve points inside the window.
    pub points: usize,
}

/// Largest relative wobble of consecutive local slopes tolerated inside the
/// fitting window.
const SLOPE_STABILITY: f64 = 0.05;

/// Local decay this small at the top of the curve means the outage has hit
/// a floor and carries no slope information.
const FLOOR_SLOPE: f64 = 0.05;

/// Least-squares slope of `log₁₀(outage)` against `log₁₀(SNR)` over the
/// highest-SNR window in which consecutive local slopes agree within 5%.
///
/// The window grows downward from the top of the curve while the local
/// slope stays stable, which picks out the asymptotic decade and rejects
/// the transition region automatically.
pub fn diversity_estimate(snr_db: &[f64], outage: &[f64]) -> Result<DiversityEstimate> {
    if snr_db.len() != outage.len() {
        return Err(Error::invalid("diversity fit", "grid and curve lengths differ"));
    }
    if snr_db.len() < 5 {
        return Err(Error::invalid("diversity fit", "need at least five curve points"));
    }
    if snr_db.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("diversity fit", "SNR grid must be strictly increasing"));
    }
    if outage.iter().any(|&p| !(p > 0.0) || p > 1.0) {
        return Err(Error::invalid("diversity fit", "outage values must lie in (0, 1]"));
    }

    let x: Vec<f64> = snr_db.iter().map(|db| db / 10.0).collect();
    let y: Vec<f64> = outage.iter().map(|p| p.log10()).collect();
    let n = x.len();
    let local = |i: usize| (y[i + 1] - y[i]) / (x[i + 1] - x[i]);

    let top = local(n - 2);
    if top >= -FLOOR_SLOPE {
        return Err(Error::InsufficientDecay {
            why: format!(
                "outage curve flattens at high SNR (top local slope {top:.3}); raise the sweep or remove the floor"
            ),
        });
    }
    // Grow the window down from the top while local slopes stay within 5%
    // of the one above them.
    let mut start = n - 2;
    while start > 0 {
        let below = local(start - 1);
        if (below - top).abs() > SLOPE_STABILITY * top.abs() {
            break;
        }
        start -= 1;
    }
    if n - start < 4 {
        return Err(Error::InsufficientDecay {
            why: "fewer than four curve points in the stable high-SNR window".into(),
        });
    }
    let (slope, _) = linear_fit(&x[start..], &y[start..])?;
    Ok(DiversityEstimate {
        slope: -slope,
        window_db: (snr_db[start], snr_db[n - 1]),
        points: n - start,
    })
}

// ── Tests ────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fso::pointing::{jitter_for_g2, PointingError};
    use crate::fso::MalagaChannel;
    use crate::geometry::DistanceModel;

    fn uplink_noise_limited() -> UplinkConfig {
        UplinkConfig {
            density: 0.25,
            pathloss_exponent: 3.5,
            power_control: 0.6,
            fading_rate: 1.0 / 0.15,
            noise_power: 1.250608150411006e-12,
            distance_model: DistanceModel::PppRayleigh,
            interferer_density: Some(0.0),
            window_radius: None,
        }
    }

    fn uplink_with_interference() -> UplinkConfig {
        UplinkConfig { interferer_density: Some(0.25), ..uplink_noise_limited() }
    }

    /// Backhaul with a chosen pointing exponent, at a mean SNR (dB).
    fn backhaul(g2: f64, mu_db: f64, det: Detection) -> FsoLink {
        let turb = MalagaChannel::new(
            2.296,
            2,
            0.1079,
            0.596,
            1.3265,
            std::f64::consts::FRAC_PI_2,
            0.0,
        )
        .unwrap();
        let sigma = jitter_for_g2(0.05, 0.5, g2).unwrap();
        let point = PointingError::symmetric(0.05, 0.5, sigma).unwrap();
        FsoLink::new(turb, point, 7.113616161731403e-5, 1e-7)
            .unwrap()
            .with_mean_snr(det, uplink::db_to_linear(mu_db))
            .unwrap()
    }

    #[test]
    fn min_combining_basics() {
        assert_eq!(hybrid_sinr(3.0, 5.0), 3.0);
        assert_eq!(hybrid_sinr(3.0, f64::INFINITY), 3.0);
    }

    #[test]
    fn product_coverage_bounded_by_each_hop() {
        let link = HybridLink::new(
            uplink_with_interference(),
            backhaul(2.55, 15.0, Detection::Heterodyne),
            Detection::Heterodyne,
        );
        let result = link.evaluate(1.0).unwrap();
        assert!(result.coverage <= result.uplink_coverage);
        assert!(result.coverage <= result.backhaul_coverage);
        assert!(result.rate <= result.uplink_rate.min(result.backhaul_rate) + 1e-12);
        // A dead backhaul kills the chain.
        let dead = HybridLink::new(
            uplink_with_interference(),
            backhaul(2.55, -50.0, Detection::Heterodyne),
            Detection::Heterodyne,
        );
        assert!(dead.coverage(1.0).unwrap() < 1e-3);
    }

    #[test]
    fn coverage_is_monotone_in_hop_quality() {
        let base = HybridLink::new(
            uplink_with_interference(),
            backhaul(2.55, 10.0, Detection::Heterodyne),
            Detection::Heterodyne,
        );
        let better_backhaul = HybridLink::new(
            uplink_with_interference(),
            backhaul(2.55, 20.0, Detection::Heterodyne),
            Detection::Heterodyne,
        );
        assert!(better_backhaul.coverage(1.0).unwrap() > base.coverage(1.0).unwrap());
    }

    #[test]
    fn product_coverage_matches_min_sinr_monte_carlo() {
        let link = HybridLink::new(
            uplink_with_interference(),
            backhaul(2.55, 10.0, Detection::Heterodyne),
            Detection::Heterodyne,
        );
        let analytic = link.coverage(1.0).unwrap();
        let (mc, lo, hi) = link.coverage_mc(1.0, 20_000, 0x4859_4252).unwrap();
        assert!(
            analytic > lo - 0.01 && analytic < hi + 0.01,
            "analytic {analytic} vs MC {mc} [{lo}, {hi}]"
        );
    }

    #[test]
    fn rate_reduces_to_backhaul_when_backhaul_limited() {
        // Noise-limited uplink at thermal noise: hop SNR ~1e11, so the
        // backhaul draw binds in essentially every realization and the
        // per-realization minimum matches the minimum of means.
        let mut link = HybridLink::new(
            uplink_noise_limited(),
            backhaul(2.55, -10.0, Detection::ImDd),
            Detection::ImDd,
        );
        let result = link.evaluate(1.0).unwrap();
        assert!(result.backhaul_rate < result.uplink_rate);
        assert!((result.rate - result.backhaul_rate).abs() < 1e-12);
        // Per-realization min combining agrees when one hop dominates.
        let mc = link.rate_mc(20_000, 0x4d43_5254).unwrap();
        assert!(
            (result.rate - mc.mean).abs() / result.rate < 0.02,
            "rate {} vs MC {}",
            result.rate,
            mc.mean
        );
        // The half-duplex flag halves the end-to-end rate only.
        link.half_duplex = true;
        let halved = link.rate().unwrap();
        assert!((halved - 0.5 * result.rate).abs() < 1e-12);
    }

    #[test]
    fn predicted_diversity_formula_cases() {
        // Gamma-Gamma, IM/DD: pointing-limited 1.2/2.
        let turb = MalagaChannel::gamma_gamma(2.5, 2, 1.0).unwrap();
        let sigma = jitter_for_g2(0.05, 0.5, 1.2).unwrap();
        let point = PointingError::symmetric(0.05, 0.5, sigma).unwrap();
        let bh = FsoLink::new(turb, point, 1e-4, 1e-7).unwrap();
        let link = HybridLink::new(uplink_noise_limited(), bh.clone(), Detection::ImDd);
        assert!((link.predicted_diversity() - 0.6).abs() < 1e-12);
        // Same chain, heterodyne: uplink-limited cap at 1 when all
        // exponents exceed r.
        let het = HybridLink::new(uplink_noise_limited(), bh, Detection::Heterodyne);
        assert!((het.predicted_diversity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn synthetic_slope_recovery_and_floor_detection() {
        let grid: Vec<f64> = (0..12).map(|i| 20.0 + 4.0 * i as f64).collect();
        let clean: Vec<f64> = grid.iter().map(|db| 0.3 * 10f64.powf(-0.8 * db / 10.0)).collect();
        let fit = diversity_estimate(&grid, &clean).unwrap();
        assert!((fit.slope - 0.8).abs() < 1e-9, "slope {}", fit.slope);
        assert!(fit.points >= 4);

        let floored: Vec<f64> = grid
            .iter()
            .map(|db| 0.3 * 10f64.powf(-0.8 * db / 10.0) + 3e-4)
            .collect();
        assert!(matches!(
            diversity_estimate(&grid, &floored),
            Err(Error::InsufficientDecay { .. })
        ));
        assert!(diversity_estimate(&grid[..3], &clean[..3]).is_err());
    }

    #[test]
    fn fitted_slope_tracks_pointing_limited_prediction() {
        // ζ > 0 turbulence, heterodyne, g² = 0.8: predicted order 0.8 with
        // the uplink decaying faster (order 1) and turbulence exponents
        // above 1.
        let link = HybridLink::new(
            uplink_noise_limited(),
            backhaul(0.8, 10.0, Detection::Heterodyne),
            Detection::Heterodyne,
        );
        assert!((link.predicted_diversity() - 0.8).abs() < 1e-12);
        let grid: Vec<f64> = (0..10).map(|i| 16.0 + 4.0 * i as f64).collect();
        let curve = link.outage_curve(&grid, 1.0).unwrap();
        let fit = diversity_estimate(&grid, &curve).unwrap();
        assert!(
            (fit.slope - 0.8).abs() < 0.1,
            "fitted {} vs predicted 0.8 (window {:?})",
            fit.slope,
            fit.window_db
        );
    }
}
