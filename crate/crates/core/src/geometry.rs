//! Spatial sampling for the uplink: the nearest-BS serving law, four
//! interferer distance models, and the closed-form densities consumed by
//! the analytic layer.
//!
//! Distances are in km and densities in points per km². Every sampled
//! realization enforces the association exclusion: an interfering UE is
//! never closer to the receiving BS than the served UE (it would have
//! associated there instead).

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// Default Monte Carlo truncation window in units of 1/√(πλ); wide enough
/// that the discarded far-field interference shifts coverage by < 3e-3.
pub const DEFAULT_WINDOW_FACTOR: f64 = 40.0;

/// Smallest accepted window in the same units; below this the truncation
/// bias is no longer negligible for pathloss exponents near 3.5.
pub const MIN_WINDOW_FACTOR: f64 = 15.0;

/// How interfering-UE link distances are generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceModel {
    /// Full spatial model: one UE placed uniformly in each Voronoi cell
    /// of a realized BS process; both link distances come from geometry.
    FullPpp,
    /// Own-cell distance drawn from the nearest-neighbor (Rayleigh) law.
    PppRayleigh,
    /// Own-cell distance uniform over a disk of the mean cell area.
    PppUniform,
    /// Own-cell distance of a UE uniform in a hexagonal cell.
    Hexagonal,
}

impl DistanceModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            DistanceModel::FullPpp => "full-ppp",
            DistanceModel::PppRayleigh => "ppp-rayleigh",
            DistanceModel::PppUniform => "ppp-uniform",
            DistanceModel::Hexagonal => "hexagonal",
        }
    }
}

/// One interfering UE, reduced to the two distances that set its power
/// and its pathloss toward the BS of interest.
#[derive(Clone, Copy, Debug)]
pub struct Interferer {
    /// Distance to its own serving BS (drives its transmit power under
    /// fractional power control).
    pub own_distance: f64,
    /// Distance to the BS of interest (drives the interference pathloss).
    pub distance: f64,
}

/// A sampled uplink neighborhood around one BS of interest.
#[derive(Clone, Debug)]
pub struct NetworkRealization {
    /// Distance from the served UE to its BS.
    pub serving_distance: f64,
    pub interferers: Vec<Interferer>,
    /// BS density the realization was drawn at.
    pub density: f64,
}

/// Validity floor for the truncation window at the given density.
pub fn min_window_radius(density: f64) -> f64 {
    MIN_WINDOW_FACTOR / (PI * density).sqrt()
}

/// Default truncation window at the given density.
pub fn default_window_radius(density: f64) -> f64 {
    DEFAULT_WINDOW_FACTOR / (PI * density).sqrt()
}

/// Radius of the disk whose area equals the mean cell area 1/λ.
pub fn mean_cell_radius(density: f64) -> f64 {
    1.0 / (PI * density).sqrt()
}

/// Center-to-center spacing of a hexagonal deployment of density λ
/// (cell area 1/λ).
pub fn hexagonal_spacing(density: f64) -> f64 {
    (2.0 / (3f64.sqrt() * density)).sqrt()
}

/// Nearest-BS distance density 2πλ r e^{−πλr²} (zero off-support).
pub fn serving_distance_pdf(density: f64, r: f64) -> f64 {
    if density <= 0.0 || r <= 0.0 || !r.is_finite() {
        return 0.0;
    }
    2.0 * PI * density * r * (-PI * density * r * r).exp()
}

/// CDF of the nearest-BS distance.
pub fn serving_distance_cdf(density: f64, r: f64) -> f64 {
    if density <= 0.0 || r <= 0.0 {
        return 0.0;
    }
    -(-PI * density * r * r).exp_m1()
}

/// Joint density of two independent nearest-BS distances; zero whenever
/// either coordinate (or the density) leaves the support.
pub fn joint_own_distance_density(r1: f64, r2: f64, density: f64) -> f64 {
    serving_distance_pdf(density, r1) * serving_distance_pdf(density, r2)
}

fn validate_density(density: f64) -> Result<()> {
    if !(density > 0.0) || !density.is_finite() {
        return Err(Error::invalid("density", "must be positive and finite"));
    }
    Ok(())
}

/// Draw a nearest-BS distance: πλr² is unit-exponential.
pub fn sample_serving_distance(density: f64, rng: &mut RngStream) -> Result<f64> {
    validate_density(density)?;
    let e: f64 = rand_distr::Exp1.sample(rng);
    Ok((e / (PI * density)).sqrt())
}

// ── Low-level position sampling ──────────────────────────────────────────

fn uniform_in_disk(radius: f64, rng: &mut RngStream) -> (f64, f64) {
    let r = radius * rng.gen::<f64>().sqrt();
    let th = 2.0 * PI * rng.gen::<f64>();
    (r * th.cos(), r * th.sin())
}

fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

fn poisson_count(mean: f64, rng: &mut RngStream) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(rng) as usize
}

/// Offset of a uniform point in a hexagonal cell centered at the origin,
/// flat-to-flat width `spacing`: rejection from the circumscribed disk
/// (acceptance 3√3/(2π) ≈ 0.83).
fn sample_hex_offset(spacing: f64, rng: &mut RngStream) -> (f64, f64) {
    let circum = spacing / 3f64.sqrt();
    loop {
        let p = uniform_in_disk(circum, rng);
        if hex_contains(spacing, p) {
            return p;
        }
    }
}

/// Point-in-hexagon test via the three flat-to-flat axes.
fn hex_contains(spacing: f64, p: (f64, f64)) -> bool {
    let half = spacing / 2.0;
    let (x, y) = p;
    let s3 = 3f64.sqrt() / 2.0;
    x.abs() <= half && (0.5 * x + s3 * y).abs() <= half && (-0.5 * x + s3 * y).abs() <= half
}

/// Own-cell distance draw for the three closed-form models.
fn model_own_distance(model: DistanceModel, density: f64, rng: &mut RngStream) -> f64 {
    match model {
        DistanceModel::PppRayleigh => {
            let e: f64 = rand_distr::Exp1.sample(rng);
            (e / (PI * density)).sqrt()
        }
        DistanceModel::PppUniform => mean_cell_radius(density) * rng.gen::<f64>().sqrt(),
        DistanceModel::Hexagonal => {
            let p = sample_hex_offset(hexagonal_spacing(density), rng);
            dist2(p, (0.0, 0.0)).sqrt()
        }
        DistanceModel::FullPpp => unreachable!("full model places UEs geometrically"),
    }
}

/// Uniform point in the Voronoi cell of `nuclei[target]` by rejection
/// from a covering disk of radius `cap`. A candidate is kept iff no other
/// nucleus lies strictly closer. Falls back to the inscribed disk (always
/// inside the cell) if the cell is so stretched the cap disk misses it.
fn place_uniform_in_cell(
    nuclei: &[(f64, f64)],
    target: usize,
    cap: f64,
    rng: &mut RngStream,
) -> (f64, f64) {
    let b = nuclei[target];
    for _ in 0..4096 {
        let off = uniform_in_disk(cap, rng);
        let cand = (b.0 + off.0, b.1 + off.1);
        let d2b = dist2(cand, b);
        let mut nearest = true;
        for (j, &p) in nuclei.iter().enumerate() {
            if j != target && dist2(cand, p) < d2b {
                nearest = false;
                break;
            }
        }
        if nearest {
            return cand;
        }
    }
    let nn2 = nuclei
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != target)
        .map(|(_, &p)| dist2(b, p))
        .fold(f64::INFINITY, f64::min);
    let radius = if nn2.is_finite() { 0.5 * nn2.sqrt() } else { cap };
    let off = uniform_in_disk(radius, rng);
    (b.0 + off.0, b.1 + off.1)
}

// ── Network realizations ─────────────────────────────────────────────────

/// Sample one uplink neighborhood: serving distance, then interfering UEs
/// inside the window with the association exclusion `distance ≥ serving`.
///
/// Interferer counts are Poisson with mean λπ·window² before exclusion.
/// Under the three reduced models the positions are uniform in the window
/// and each UE carries an own-cell distance drawn from the model law;
/// under [`DistanceModel::FullPpp`] a BS process is realized and one UE
/// is placed uniformly in every other cell.
pub fn sample_network(
    model: DistanceModel,
    density: f64,
    window_radius: f64,
    rng: &mut RngStream,
) -> Result<NetworkRealization> {
    sample_network_decoupled(model, density, density, window_radius, rng)
}

/// As [`sample_network`] but with the interfering-UE intensity decoupled
/// from the BS density; only the reduced PPP models support that split.
pub(crate) fn sample_network_decoupled(
    model: DistanceModel,
    density: f64,
    interferer_density: f64,
    window_radius: f64,
    rng: &mut RngStream,
) -> Result<NetworkRealization> {
    validate_density(density)?;
    if interferer_density < 0.0 || !interferer_density.is_finite() {
        return Err(Error::invalid("interferer_density", "must be finite and non-negative"));
    }
    if interferer_density != density
        && !matches!(model, DistanceModel::PppRayleigh | DistanceModel::PppUniform)
    {
        return Err(Error::invalid(
            "interferer_density",
            "decoupled interferer intensity requires a reduced PPP model",
        ));
    }
    if !window_radius.is_finite() || window_radius < min_window_radius(density) {
        return Err(Error::InvalidWindow {
            why: format!(
                "window {window_radius} km is below the validity floor {:.4} km at density {density}",
                min_window_radius(density)
            ),
        });
    }
    if model == DistanceModel::FullPpp {
        return sample_full_ppp(density, window_radius, rng);
    }

    let serving = match model {
        DistanceModel::Hexagonal => model_own_distance(model, density, rng),
        _ => sample_serving_distance(density, rng)?,
    };
    let n = poisson_count(interferer_density * PI * window_radius * window_radius, rng);
    let mut interferers = Vec::with_capacity(n);
    for _ in 0..n {
        let d = window_radius * rng.gen::<f64>().sqrt();
        let own = model_own_distance(model, density, rng);
        if d >= serving {
            interferers.push(Interferer { own_distance: own, distance: d });
        }
    }
    Ok(NetworkRealization { serving_distance: serving, interferers, density })
}

/// Full spatial model: BSs ~ PPP(λ) in the window, conditioned so none is
/// closer to the served UE than its serving BS at the origin; one UE
/// uniform in each other BS's Voronoi cell.
fn sample_full_ppp(
    density: f64,
    window_radius: f64,
    rng: &mut RngStream,
) -> Result<NetworkRealization> {
    let serving = sample_serving_distance(density, rng)?;
    let ue = (serving, 0.0);
    let n = poisson_count(density * PI * window_radius * window_radius, rng);
    // Nucleus 0 is the serving BS at the origin.
    let mut nuclei = Vec::with_capacity(n + 1);
    nuclei.push((0.0, 0.0));
    for _ in 0..n {
        let p = uniform_in_disk(window_radius, rng);
        if dist2(p, ue) >= serving * serving {
            nuclei.push(p);
        }
    }
    let cap = 4.0 * mean_cell_radius(density);
    let mut interferers = Vec::with_capacity(nuclei.len() - 1);
    for i in 1..nuclei.len() {
        let u = place_uniform_in_cell(&nuclei, i, cap, rng);
        let d = dist2(u, (0.0, 0.0)).sqrt();
        if d >= serving {
            interferers.push(Interferer {
                own_distance: dist2(u, nuclei[i]).sqrt(),
                distance: d,
            });
        }
    }
    Ok(NetworkRealization { serving_distance: serving, interferers, density })
}

/// Draw `count` own-cell distances under the given model, for comparing
/// the reduced laws against the full spatial one. For [`DistanceModel::FullPpp`]
/// whole BS processes are realized and every interior cell (margin of
/// 4 mean-cell radii from the edge) contributes its UE.
pub fn sample_own_cell_distances(
    model: DistanceModel,
    density: f64,
    count: usize,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    validate_density(density)?;
    if model != DistanceModel::FullPpp {
        return Ok((0..count).map(|_| model_own_distance(model, density, rng)).collect());
    }
    let rc = mean_cell_radius(density);
    let window = 10.0 * rc;
    let margin2 = (6.0 * rc) * (6.0 * rc);
    let cap = 4.0 * rc;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = poisson_count(density * PI * window * window, rng);
        let nuclei: Vec<(f64, f64)> = (0..n).map(|_| uniform_in_disk(window, rng)).collect();
        for i in 0..nuclei.len() {
            if dist2(nuclei[i], (0.0, 0.0)) > margin2 {
                continue;
            }
            let u = place_uniform_in_cell(&nuclei, i, cap, rng);
            out.push(dist2(u, nuclei[i]).sqrt());
            if out.len() == count {
                break;
            }
        }
    }
    Ok(out)
}

// ── Tests ────────────────────────────────────────────────────────────────
