//! Phase design for a passive reflecting surface serving the uplink:
//! SINR under weighted co-channel interference, the zero-forcing projection
//! that nulls the dominant interferer, elementwise phase extraction, and
//! spectral-efficiency comparison against the decode-and-forward baseline.
//!
//! The cascade is bilinear: element n contributes `h1_n e^{jφ_n} h2_n` to
//! the combined channel, and the aligned phase is `φ_n = −arg(h1_n h2_n)`
//! (checked against the hand-computable two-element example). The surface
//! applies unit-modulus coefficients only; the amplitude-relaxed projection
//! that achieves an exact null is reported alongside so the extraction gap
//! stays measurable.

use crate::error::{Error, Result};
use crate::numerics::RngStream;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

// ── Domain types ─────────────────────────────────────────────────────────

/// One channel instance seen by an N-element surface: the served user's
/// first hop `h1` (any deterministic signal weighting folded in), the
/// common second hop `h2` to the destination, and interferer first hops
/// with their pathloss/power-control weights.
#[derive(Debug, Clone)]
pub struct IrsChannels {
    signal: Vec<Complex64>,
    forward: Vec<Complex64>,
    interferers: Vec<Vec<Complex64>>,
    weights: Vec<f64>,
    noise_power: f64,
}

impl IrsChannels {
    pub fn new(
        signal: Vec<Complex64>,
        forward: Vec<Complex64>,
        interferers: Vec<Vec<Complex64>>,
        weights: Vec<f64>,
        noise_power: f64,
    ) -> Result<Self> {
        let n = signal.len();
        if n == 0 {
            return Err(Error::invalid("channels", "need at least one reflecting element"));
        }
        if forward.len() != n || interferers.iter().any(|h| h.len() != n) {
            return Err(Error::invalid("channels", "all channel vectors must share one length"));
        }
        if interferers.len() != weights.len() {
            return Err(Error::invalid("channels", "one weight per interferer required"));
        }
        let finite = |v: &[Complex64]| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite(&signal) || !finite(&forward) || !interferers.iter().all(|h| finite(h)) {
            return Err(Error::invalid("channels", "channel entries must be finite"));
        }
        if norm_sq(&signal) == 0.0 || norm_sq(&forward) == 0.0 {
            return Err(Error::invalid("channels", "signal and forward hops need nonzero norm"));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("weights", "interferer weights must be finite and positive"));
        }
        if !(noise_power > 0.0) || !noise_power.is_finite() {
            return Err(Error::invalid("noise power", "must be finite and positive"));
        }
        Ok(Self { signal, forward, interferers, weights, noise_power })
    }

    /// Number of reflecting elements.
    pub fn elements(&self) -> usize {
        self.signal.len()
    }

    pub fn signal(&self) -> &[Complex64] {
        &self.signal
    }

    pub fn forward(&self) -> &[Complex64] {
        &self.forward
    }

    pub fn interferers(&self) -> &[Vec<Complex64>] {
        &self.interferers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    /// Index of the largest-weight interferer, if any has nonzero norm.
    pub fn strongest_interferer(&self) -> Option<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|&(z, _)| norm_sq(&self.interferers[z]) > 0.0)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(z, _)| z)
    }
}

/// Per-element phase shifts; the induced surface matrix is
/// `diag(e^{jφ_1}, …, e^{jφ_N})` with exactly unit-modulus entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(Vec<f64>);

impl PhaseVector {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::invalid("phases", "need at least one element"));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("phases", "phases must be finite"));
        }
        Ok(Self(phases))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.0
    }

    /// The diagonal surface coefficients `e^{jφ_n}`.
    pub fn coefficients(&self) -> Vec<Complex64> {
        self.0.iter().map(|&p| Complex64::from_polar(1.0, p)).collect()
    }
}

/// Which phase schedule the surface applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseDesign {
    /// Zero-forcing projection against the strongest interferer, phases
    /// extracted elementwise.
    Optimal,
    /// I.i.d. uniform phases on [0, 2π).
    Random,
    /// All-zero phases (the surface reflects without steering).
    Fixed,
}

impl PhaseDesign {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseDesign::Optimal => "optimal",
            PhaseDesign::Random => "random",
            PhaseDesign::Fixed => "fixed",
        }
    }
}

// ── Core operations ──────────────────────────────────────────────────────

fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum()
}

/// `Σ_n a_n e^{jφ_n} b_n` — the combined bilinear cascade.
fn cascade(a: &[Complex64], phases: &[f64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(phases)
        .zip(b)
        .map(|((&an, &p), &bn)| an * Complex64::from_polar(1.0, p) * bn)
        .sum()
}

/// SINR of the reflected uplink under the given phases:
/// `|Σ h1 e^{jφ} h2|² / (Σ_z w_z |Σ hz e^{jφ} h2|² + σ²)`.
pub fn irs_sinr(ch: &IrsChannels, phases: &PhaseVector) -> Result<f64> {
    if phases.len() != ch.elements() {
        return Err(Error::invalid("phases", "one phase per reflecting element required"));
    }
    let num = cascade(&ch.signal, phases.phases(), &ch.forward).norm_sqr();
    let interference: f64 = ch
        .interferers
        .iter()
        .zip(&ch.weights)
        .map(|(hz, &w)| w * cascade(hz, phases.phases(), &ch.forward).norm_sqr())
        .sum();
    Ok(num / (interference + ch.noise_power))
}

/// Orthogonal projection of the signal hop onto the complement of one
/// interferer hop: `x̂ = (I − hz hzᴴ/‖hz‖²) h1`.
pub fn zf_solution(signal: &[Complex64], interferer: &[Complex64]) -> Result<Vec<Complex64>> {
    if signal.len() != interferer.len() {
        return Err(Error::invalid("projection", "vector lengths differ"));
    }
    let hz_norm_sq = norm_sq(interferer);
    if hz_norm_sq == 0.0 {
        return Err(Error::degenerate(
            "interferer hop",
            "zero norm admits no projection; use the interference-free phases",
        ));
    }
    let coupling = inner(interferer, signal) / hz_norm_sq;
    Ok(signal.iter().zip(interferer).map(|(&s, &z)| s - coupling * z).collect())
}

/// `⟨a, b⟩ = Σ conj(a_n) b_n`.
fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(&an, &bn)| an.conj() * bn).sum()
}

/// Projection of the signal hop onto the joint null space of several
/// interferer hops (Gram–Schmidt on the stacked constraints). Requires
/// strictly more elements than constraints.
pub fn zf_null_space(
    signal: &[Complex64],
    interferers: &[&[Complex64]],
) -> Result<Vec<Complex64>> {
    let n = signal.len();
    if interferers.iter().any(|h| h.len() != n) {
        return Err(Error::invalid("projection", "vector lengths differ"));
    }
    if interferers.len() >= n {
        return Err(Error::degenerate(
            "joint nulling",
            "needs more reflecting elements than interferer constraints",
        ));
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(interferers.len());
    for hz in interferers {
        let mut v = hz.to_vec();
        for b in &basis {
            let c = inner(b, &v);
            for (vn, bn) in v.iter_mut().zip(b) {
                *vn -= c * bn;
            }
        }
        let nrm = norm_sq(&v).sqrt();
        // A linearly dependent constraint is already nulled; skip it.
        if nrm > 1e-12 * norm_sq(hz).sqrt().max(1.0) {
            for vn in v.iter_mut() {
                *vn /= nrm;
            }
            basis.push(v);
        }
    }
    let mut x = signal.to_vec();
    for b in &basis {
        let c = inner(b, &x);
        for (xn, bn) in x.iter_mut().zip(b) {
            *xn -= c * bn;
        }
    }
    Ok(x)
}

/// One solved instance: the extracted unit-modulus phases plus the
/// amplitude-relaxed reference and the interference the extraction leaks.
#[derive(Debug, Clone)]
pub struct PhaseSolution {
    pub phases: PhaseVector,
    /// SINR the unit-modulus extraction achieves in the full formula.
    pub sinr: f64,
    /// SINR of the amplitude-relaxed projection, which nulls the targeted
    /// interferer exactly: `|⟨x̂, h1⟩|²/σ² = ‖x̂‖⁴/σ²` in the projected
    /// scale. Upper reference for the extraction gap.
    pub relaxed_sinr: f64,
    /// Reflected power `|Σ hz e^{jφ} h2|²` of the targeted interferer
    /// under the extracted phases (the term the relaxed solution zeroes).
    pub residual_interference: f64,
}

/// Aligned phases from a projected signal vector: `φ_n = −arg(x_n h2_n)`,
/// with zero entries contributing a zero phase.
fn extraction_phases(projected: &[Complex64], forward: &[Complex64]) -> Vec<f64> {
    projected
        .iter()
        .zip(forward)
        .map(|(&xn, &fwd)| {
            let term = xn * fwd;
            if term.norm_sqr() == 0.0 {
                0.0
            } else {
                -term.arg()
            }
        })
        .collect()
}

/// Phase schedule maximizing the aligned cascade of the zero-forcing
/// projection against the strongest interferer; falls back to the
/// interference-free alignment of the signal hop itself when no usable
/// interferer is present.
pub fn optimal_phases(ch: &IrsChannels) -> Result<PhaseVector> {
    Ok(solve(ch)?.phases)
}

/// Full solve: extraction phases plus the relaxed reference and leaked
/// interference of the targeted constraint.
pub fn solve(ch: &IrsChannels) -> Result<PhaseSolution> {
    let (projected, target) = match ch.strongest_interferer() {
        Some(z) => (zf_solution(&ch.signal, &ch.interferers[z])?, Some(z)),
        None => (ch.signal.clone(), None),
    };
    let phases = PhaseVector::new(extraction_phases(&projected, &ch.forward))?;
    let sinr = irs_sinr(ch, &phases)?;
    let relaxed_sinr = norm_sq(&projected).powi(2) / ch.noise_power;
    let residual_interference = match target {
        Some(z) => cascade(&ch.interferers[z], phases.phases(), &ch.forward).norm_sqr(),
        None => 0.0,
    };
    Ok(PhaseSolution { phases, sinr, relaxed_sinr, residual_interference })
}

/// Like [`solve`] but nulling every interferer jointly (needs
/// `N > interferer count`); extension beyond the single-constraint design.
pub fn solve_jointly_nulled(ch: &IrsChannels) -> Result<PhaseSolution> {
    let stacked: Vec<&[Complex64]> = ch.interferers.iter().map(Vec::as_slice).collect();
    let projected = zf_null_space(&ch.signal, &stacked)?;
    let phases = PhaseVector::new(extraction_phases(&projected, &ch.forward))?;
    let sinr = irs_sinr(ch, &phases)?;
    let relaxed_sinr = norm_sq(&projected).powi(2) / ch.noise_power;
    let residual_interference = ch
        .interferers
        .iter()
        .map(|hz| cascade(hz, phases.phases(), &ch.forward).norm_sqr())
        .fold(0.0, f64::max);
    Ok(PhaseSolution { phases, sinr, relaxed_sinr, residual_interference })
}

/// The named phase schedules compared in the spectral-efficiency study.
pub fn phase_designs<R: Rng + ?Sized>(
    ch: &IrsChannels,
    kind: PhaseDesign,
    rng: &mut R,
) -> Result<PhaseVector> {
    match kind {
        PhaseDesign::Optimal => optimal_phases(ch),
        PhaseDesign::Random => {
            PhaseVector::new((0..ch.elements()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect())
        }
        PhaseDesign::Fixed => PhaseVector::zeros(ch.elements()),
    }
}

// ── Ensemble study ───────────────────────────────────────────────────────

/// Random-network ensemble for the element-count sweep: serving and
/// interfering distances follow the uplink geometry (Rayleigh own-cell
/// radii, uniform interferers outside the serving distance) and the
/// fractional-power-control weights they induce; fading is i.i.d.
/// unit-variance complex Gaussian per element.
#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    /// Network density λ (points per unit area).
    pub density: f64,
    /// Pathloss exponent α.
    pub pathloss_exponent: f64,
    /// Fractional power-control exponent ε.
    pub power_control: f64,
    /// Interferers kept per instance (largest weights).
    pub interferer_count: usize,
    /// Interference-free anchor SNR (dB): noise is scaled to the signal
    /// weight so an unobstructed single element averages this SNR.
    pub snr0_db: f64,
    /// Channel instances averaged per element count.
    pub instances: usize,
    /// Largest element count; the sweep covers 1..=max_elements with
    /// prefix-nested draws so curves differ only by added elements.
    pub max_elements: usize,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            density: 0.25,
            pathloss_exponent: 3.5,
            power_control: 0.6,
            interferer_count: 3,
            snr0_db: 20.0,
            instances: 2000,
            max_elements: 10,
            seed: 0x5253_4945,
        }
    }
}

/// Mean spectral efficiency per design per element count, with the
/// decode-and-forward baseline and the first element count beating it.
#[derive(Debug, Clone)]
pub struct SeComparison {
    pub elements: Vec<usize>,
    pub optimal: Vec<f64>,
    pub random: Vec<f64>,
    pub fixed: Vec<f64>,
    /// Mean leaked interferer power of the extraction, per element count.
    pub residual_optimal: Vec<f64>,
    /// Same statistic under random phases, for scale.
    pub residual_random: Vec<f64>,
    pub df_baseline: f64,
    /// Smallest element count whose optimal-design SE reaches the
    /// baseline, if any within the sweep.
    pub min_elements_beating_df: Option<usize>,
}

struct InstanceAccumulator {
    optimal: Vec<f64>,
    random: Vec<f64>,
    fixed: Vec<f64>,
    residual_optimal: Vec<f64>,
    residual_random: Vec<f64>,
}

/// Spectral efficiency of the three designs across element counts against
/// a decode-and-forward baseline rate (nats).
pub fn se_comparison(cfg: &EnsembleConfig, df_baseline: f64) -> Result<SeComparison> {
    if cfg.instances == 0 || cfg.max_elements == 0 {
        return Err(Error::invalid("ensemble", "need at least one instance and one element"));
    }
    if !(cfg.density > 0.0) || !(cfg.pathloss_exponent > 2.0) {
        return Err(Error::invalid("ensemble", "density must be positive and α > 2"));
    }
    if !(0.0..=1.0).contains(&cfg.power_control) {
        return Err(Error::invalid("ensemble", "power-control exponent must lie in [0, 1]"));
    }
    if !df_baseline.is_finite() || df_baseline < 0.0 {
        return Err(Error::invalid("baseline", "DF baseline rate must be finite and nonnegative"));
    }
    let nmax = cfg.max_elements;
    let base = RngStream::new(cfg.seed);
    // Per-instance contributions are collected by index and summed
    // sequentially so the result is independent of thread scheduling.
    let parts: Result<Vec<InstanceAccumulator>> = (0..cfg.instances as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = base.substream(t);
            instance_contribution(cfg, &mut rng)
        })
        .collect();
    let mut acc = InstanceAccumulator {
        optimal: vec![0.0; nmax],
        random: vec![0.0; nmax],
        fixed: vec![0.0; nmax],
        residual_optimal: vec![0.0; nmax],
        residual_random: vec![0.0; nmax],
    };
    for part in parts? {
        for i in 0..nmax {
            acc.optimal[i] += part.optimal[i];
            acc.random[i] += part.random[i];
            acc.fixed[i] += part.fixed[i];
            acc.residual_optimal[i] += part.residual_optimal[i];
            acc.residual_random[i] += part.residual_random[i];
        }
    }
    let scale = 1.0 / cfg.instances as f64;
    let optimal: Vec<f64> = acc.optimal.iter().map(|v| v * scale).collect();
    let min_elements_beating_df =
        optimal.iter().position(|&se| se >= df_baseline).map(|i| i + 1);
    Ok(SeComparison {
        elements: (1..=nmax).collect(),
        random: acc.random.iter().map(|v| v * scale).collect(),
        fixed: acc.fixed.iter().map(|v| v * scale).collect(),
        residual_optimal: acc.residual_optimal.iter().map(|v| v * scale).collect(),
        residual_random: acc.residual_random.iter().map(|v| v * scale).collect(),
        optimal,
        df_baseline,
        min_elements_beating_df,
    })
}

/// Signal weight and the strongest interferer weights of one geometry draw:
/// the served user contributes `r^{α(ε−1)}`, each interferer
/// `r_z^{αε} d_z^{−α}` with its own-cell radius `r_z` and distance `d_z`
/// uniform outside the serving distance.
fn draw_weights<R: Rng + ?Sized>(cfg: &EnsembleConfig, rng: &mut R) -> (f64, Vec<f64>) {
    let lam = cfg.density;
    let alpha = cfg.pathloss_exponent;
    let eps = cfg.power_control;
    let rayleigh = |rng: &mut R| -> f64 {
        let e: f64 = rand_distr::Exp1.sample(rng);
        (e / (std::f64::consts::PI * lam)).sqrt()
    };
    let serving = rayleigh(rng);
    let window = 40.0 / (std::f64::consts::PI * lam).sqrt();
    let mean = lam * std::f64::consts::PI * window * window;
    let count = Poisson::new(mean).expect("positive finite mean").sample(rng) as usize;
    let mut weights: Vec<f64> = (0..count)
        .map(|_| {
            let d = (rng.gen_range(0.0..1.0) * window * window).sqrt();
            (d, rayleigh(rng))
        })
        .filter(|&(d, _)| d >= serving)
        .map(|(d, rz)| rz.powf(alpha * eps) * d.powf(-alpha))
        .collect();
    weights.sort_by(|a, b| b.total_cmp(a));
    weights.truncate(cfg.interferer_count);
    (serving.powf(alpha * (eps - 1.0)), weights)
}

fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rand_distr::StandardNormal.sample(rng);
    let im: f64 = rand_distr::StandardNormal.sample(rng);
    Complex64::new(re, im) / std::f64::consts::SQRT_2
}

/// One instance's spectral-efficiency contribution at every element count,
/// with prefix-nested channel draws.
fn instance_contribution<R: Rng + ?Sized>(
    cfg: &EnsembleConfig,
    rng: &mut R,
) -> Result<InstanceAccumulator> {
    let nmax = cfg.max_elements;
    let (w0, weights) = draw_weights(cfg, rng);
    // Noise anchored to the signal weight: a lone aligned element with
    // unit fading would average snr0.
    let noise = w0 / 10f64.powf(cfg.snr0_db / 10.0);
    let h1: Vec<Complex64> =
        (0..nmax).map(|_| standard_complex(rng) * w0.sqrt()).collect();
    let h2: Vec<Complex64> = (0..nmax).map(|_| standard_complex(rng)).collect();
    let hz: Vec<Vec<Complex64>> =
        weights.iter().map(|_| (0..nmax).map(|_| standard_complex(rng)).collect()).collect();
    let random_phases: Vec<f64> =
        (0..nmax).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();

    let mut out = InstanceAccumulator {
        optimal: vec![0.0; nmax],
        random: vec![0.0; nmax],
        fixed: vec![0.0; nmax],
        residual_optimal: vec![0.0; nmax],
        residual_random: vec![0.0; nmax],
    };
    for n in 1..=nmax {
        let ch = IrsChannels::new(
            h1[..n].to_vec(),
            h2[..n].to_vec(),
            hz.iter().map(|h| h[..n].to_vec()).collect(),
            weights.clone(),
            noise,
        )?;
        let solved = solve(&ch)?;
        let random = PhaseVector::new(random_phases[..n].to_vec())?;
        let fixed = PhaseVector::zeros(n)?;
        out.optimal[n - 1] = solved.sinr.ln_1p();
        out.random[n - 1] = irs_sinr(&ch, &random)?.ln_1p();
        out.fixed[n - 1] = irs_sinr(&ch, &fixed)?.ln_1p();
        out.residual_optimal[n - 1] = solved.residual_interference;
        out.residual_random[n - 1] = match ch.strongest_interferer() {
            Some(z) => cascade(&ch.interferers[z], random.phases(), &ch.forward).norm_sqr(),
            None => 0.0,
        };
    }
    Ok(out)
}

// ── Tests ────────────────────────────────────────────────────────────────
