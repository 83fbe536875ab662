//! Sweep execution: each subcommand turns a [`Scenario`](crate::config::Scenario)
//! into one CSV table — header row, data rows, and `#`-prefixed footer
//! lines carrying scalar results and provenance (seed, tool version,
//! configuration hash).

use crate::config::Scenario;
use fsonet::error::Error as CoreError;
use fsonet::fso::design::beam_waist_scan;
use fsonet::geometry::{sample_own_cell_distances, DistanceModel};
use fsonet::hybrid::{diversity_estimate, HybridLink};
use fsonet::irs::se_comparison;
use fsonet::numerics::RngStream;
use fsonet::uplink::{self, db_to_linear};

/// A rendered sweep result: column names, pre-formatted cells, and extra
/// footer notes in insertion order.
pub struct CsvTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl CsvTable {
    fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), notes: Vec::new() }
    }

    fn push_row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

/// Shortest-roundtrip decimal form; `Display` for `f64` is deterministic
/// and locale-independent, so identical numbers render identically.
fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Serializes the table with the standard provenance footer.
pub fn render(table: &CsvTable, seed: u64, config_sha256: &str) -> String {
    let mut out = String::new();
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    for note in &table.notes {
        out.push_str("# ");
        out.push_str(note);
        out.push('\n');
    }
    out.push_str(&format!("# seed={seed}\n"));
    out.push_str(&format!("# artifact=fsonet v{}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("# config_sha256={config_sha256}\n"));
    out
}

/// Dispatches a subcommand name to its table builder.
pub fn run(subcommand: &str, sc: &Scenario) -> Result<CsvTable, CoreError> {
    match subcommand {
        "coverage" => coverage(sc),
        "rate" => rate(sc),
        "fso" => fso(sc),
        "hybrid" => hybrid(sc),
        "irs" => irs(sc),
        "diversity" => diversity(sc),
        "beamwaist" => beamwaist(sc),
        "distances" => distances(sc),
        other => unreachable!("unknown subcommand `{other}`"),
    }
}

/// Uplink coverage versus SINR threshold: closed form next to Monte
/// Carlo with a Wilson confidence band.
fn coverage(sc: &Scenario) -> Result<CsvTable, CoreError> {
    let grid = &sc.sweep.grid;
    let analytic = uplink::coverage_curve_analytic(&sc.uplink, grid)?;
    let mc = uplink::coverage_mc(&sc.uplink, grid, sc.sweep.mc_budget, sc.sweep.seed)?;
    let mut table = CsvTable::new(vec![
        "threshold_db",
        "coverage_analytic",
        "coverage_mc",
        "ci_low",
        "ci_high",
    ]);
    for (k, &t) in grid.iter().enumerate() {
        table.push_row(vec![
            fmt(t),
            fmt(analytic[k]),
            fmt(mc.coverage[k]),
            fmt(mc.ci_low[k]),
            fmt(mc.ci_high[k]),
        ]);
    }
    table.note(format!("realizations={}", mc.realizations));
    Ok(table)
}

/// Mean uplink spectral efficiency versus user density, three ways: the
/// closed form, the threshold-integral of coverage, and Monte Carlo.
fn rate(sc: &Scenario) -> Result<CsvTable, CoreError> {
    let mut table = CsvTable::new(vec![
        "density",
        "rate_analytic",
        "rate_threshold_integral",
        "rate_mc",
        "mc_stderr",
    ]);
    for (k, &density) in sc.sweep.grid.iter().enumerate() {
        let cfg = fsonet::uplink::UplinkConfig { density, ..sc.uplink.clone() };
        cfg.validate()?;
        let analytic = uplink::rate_analytic(&cfg)?;
        let integral = uplink::rate_from_coverage(&cfg)?;
        let mc = uplink::rate_mc(&cfg, sc.sweep.mc_budget, sc.sweep.seed.wrapping_add(k as u64))?;
        table.push_row(vec![
            fmt(density),
            fmt(analytic),
            fmt(integral),
            fmt(mc.mean),
            fmt(mc.std_error),
        ]);
    }
    Ok(table)
}

/// Optical-link outage versus electrical SNR threshold: quadrature CDF of
/// the composite channel next to the empirical CDF of sampled SNRs.
fn fso(sc: &Scenario) -> Result<CsvTable, CoreError> {
    let link = &sc.fso_link;
    let mut rng = RngStream::new(sc.sweep.seed);
    let mut samples: Vec<f64> =
        (0..sc.sweep.mc_budget).map(|_| link.sample_snr(sc.detection, &mut rng)).collect();
    samples.sort_by(f64::total_cmp);
    let mut table =
        CsvTable::new(vec!["threshold_snr_db", "outage_analytic", "outage_empirical"]);
    for &t_db in &sc.sweep.grid {
        let threshold = db_to_linear(t_db);
        let analytic = link.outage_probability(sc.detection, threshold)?;
        let below = samples.partition_point(|&s| s <= threshold);
        table.push_row(vec![fmt(t_db), fmt(analytic), fmt(below as f64 / samples.len() as f64)]);
    }
    table.note(format!("weather={}", sc.weather_name));
    table.note(format!("detection={}", sc.detection.as_str()));
    table.note(format!("mean_snr={}", link.mean_snr(sc.detection)));
    Ok(table)
}

fn hybrid_link(sc: &Scenario) -> HybridLink {
    let mut link = HybridLink::new(sc.uplink.clone(), sc.fso_link.clone(), sc.detection);
    link.half_duplex = sc.half_duplex;
    link
}

/// Relayed end-to-end coverage versus SINR threshold: the per-hop product
/// form against a joint Monte Carlo of min(SINR) with a Wilson band.
fn hybrid(sc: &Scenario) -> Result<CsvTable, CoreError> {
    let link = hybrid_link(sc);
    let mut table = CsvTable::new(vec![
        "threshold_db",
        "coverage_analytic",
        "uplink_coverage",
        "backhaul_coverage",
        "coverage_mc",
        "ci_low",
        "ci_high",
    ]);
    for (k, &t_db) in sc.sweep.grid.iter().enumerate() {
        let threshold = db_to_linear(t_db);
        let exact = link.evaluate(threshold)?;
        let (est, lo, hi) =
            link.coverage_mc(threshold, sc.sweep.mc_budget, sc.sweep.seed.wrapping_add(k as u64))?;
        table.push_row(vec![
            fmt(t_db),
            fmt(exact.coverage),
            fmt(exact.uplink_coverage),
            fmt(exact.backhaul_coverage),
            fmt(est),
            fmt(lo),
            fmt(hi),
        ]);
    }
    table.note(format!("rate_nats={}", link.rate()?));
    Ok(table)
}

/// Reflecting-surface spectral efficiency versus element count for the
/// three phase designs, in long format, with the relay baseline and the
/// crossover element count in the footer.
fn irs(sc: &Scenario) -> Result<CsvTable, CoreError> {
    let baseline = match sc.irs_df_baseline {
        Some(v) => v,
        // Documented default: the configured chain with interference
        // switched off, so the relay is judged on its own links.
        None => {
            let mut up = sc.uplink.clone();
            up.interferer_density = Some(0.0);
            let mut link = HybridLink::new(up, sc.fso_link.clone(), sc.detection);
            link.half_duplex = sc.half_duplex;
            link.rate()?
        }
    };
    let comparison = se_comparison(&sc.irs_ensemble, baseline)?;
    let mut table =
        CsvTable::new(vec!["elements", "design", "spectral_efficiency", "residual_interference"]);
    for &n in &sc.sweep.grid {
        let idx = n as usize - 1;
        table.push_row(vec![
            fmt(n),
            "optimal".to_string(),
            fmt(comparison.optimal[idx]),
            fmt(comparison.residual_optimal[idx]),
        ]);
        table.push_row(vec![
            fmt(n),
            "random".to_string(),
            fmt(comparison.random[idx]),
            fmt(comparison.residual_random[idx]),
        ]);
        table.push_row(vec![
            fmt(n),
            "fixed".to_string(),
            fmt(comparison.fixed[idx]),
            fmt(f64::NAN),
        ]);
    }
    table.note(format!("df_baseline_nats={}", fmt(comparison.df_baseline)));
    table.note(format!(
        "min_elements_beating_df={}",
        comparison.min_elements_beating_df.map_or("none".to_string(), |n| n.to_string())
    ));
    table.note(format!("instances={}", sc.irs_ensemble.instances));
    Ok(table)
}

/// End-to-end outage versus SNR offset with a log–log slope fit. Runs
/// noise-limited unless an interferer density is set explicitly, since an
/// interference floor defeats the decay-order reading.
fn diversity(sc: &Scenario) -> Result<CsvTable, CoreError> {
    let mut up = sc.uplink.clone();
    let mut table = CsvTable::new(vec!["snr_offset_db", "outage"]);
    if up.interferer_density.is_none() {
        up.interferer_density = Some(0.0);
        table.note("interferer_density=0 (noise-limited sweep)");
    }
    let mut link = HybridLink::new(up, sc.fso_link.clone(), sc.detection);
    link.half_duplex = sc.half_duplex;
    let threshold = db_to_linear(sc.hybrid_threshold_db);
    let outages = link.outage_curve(&sc.sweep.grid, threshold)?;
    for (k, &offset) in sc.sweep.grid.iter().enumerate() {
        table.push_row(vec![fmt(offset), fmt(outages[k])]);
    }
    let fit = diversity_estimate(&sc.sweep.grid, &outages)?;
    table.note(format!("fitted_slope={}", fmt(fit.slope)));
    table.note(format!("fit_window_db={}..{}", fmt(fit.window_db.0), fmt(fit.window_db.1)));
    table.note(format!("fit_points={}", fit.points));
    table.note(format!("predicted_slope={}", fmt(link.predicted_diversity())));
    table.note(format!("threshold_db={}", fmt(sc.hybrid_threshold_db)));
    Ok(table)
}

/// Pointing-versus-turbulence design scan: outage as a function of the
/// transmit beam waist at fixed jitter-to-aperture ratio.
fn beamwaist(sc: &Scenario) -> Result<CsvTable, CoreError> {
    let bw = &sc.beamwaist;
    let scan = beam_waist_scan(
        sc.fso_link.turbulence(),
        bw.aperture_radius,
        bw.length,
        bw.wavelength,
        bw.jitter_ratio * bw.aperture_radius,
        bw.threshold,
        &sc.sweep.grid,
    )?;
    let mut table = CsvTable::new(vec!["waist_m", "outage"]);
    for (k, &w) in scan.waists.iter().enumerate() {
        table.push_row(vec![fmt(w), fmt(scan.outage[k])]);
    }
    table.note(format!("optimum_waist_m={}", fmt(scan.waists[scan.optimum])));
    table.note(format!("unique_interior_minimum={}", scan.unique_interior_minimum));
    table.note(format!("jitter_ratio={}", fmt(bw.jitter_ratio)));
    Ok(table)
}

/// Empirical complementary CDF of the serving-link distance under each
/// interferer-distance model, in long format.
fn distances(sc: &Scenario) -> Result<CsvTable, CoreError> {
    let models = [
        DistanceModel::FullPpp,
        DistanceModel::PppRayleigh,
        DistanceModel::PppUniform,
        DistanceModel::Hexagonal,
    ];
    let root = RngStream::new(sc.sweep.seed);
    let mut table = CsvTable::new(vec!["distance", "model", "ccdf"]);
    for (m, model) in models.into_iter().enumerate() {
        let mut rng = root.substream(m as u64);
        let mut draws =
            sample_own_cell_distances(model, sc.uplink.density, sc.sweep.mc_budget, &mut rng)?;
        draws.sort_by(f64::total_cmp);
        for &d in &sc.sweep.grid {
            let below = draws.partition_point(|&x| x <= d);
            let ccdf = 1.0 - below as f64 / draws.len() as f64;
            table.push_row(vec![fmt(d), model.as_str().to_string(), fmt(ccdf)]);
        }
    }
    table.note(format!("density={}", fmt(sc.uplink.density)));
    table.note(format!("samples_per_model={}", sc.sweep.mc_budget));
    Ok(table)
}

// ── Tests ────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{defaults, RawConfig, Scenario};

    fn scenario(subcommand: &str, extra: &str) -> Scenario {
        let mut raw = defaults();
        raw.merge_from(&RawConfig::parse(extra).unwrap());
        Scenario::build(&raw, subcommand).unwrap()
    }

    /// Small budgets throughout: these exercise plumbing, not statistics.
    #[test]
    fn every_subcommand_renders_a_consistent_table() {
        let cases = [
            ("coverage", "[sweep]\nmc_budget = 1000\ngrid = -5:5:10\n"),
            ("rate", "[sweep]\nmc_budget = 1000\ngrid = 0.2,0.4\n"),
            ("fso", "[sweep]\nmc_budget = 1000\ngrid = -10:10:10\n"),
            ("hybrid", "[sweep]\nmc_budget = 1000\ngrid = -5:5:5\n"),
            ("irs", "[irs]\ninstances = 40\n[sweep]\ngrid = 1:1:4\n"),
            ("diversity", "[sweep]\ngrid = 16:4:52\n"),
            ("beamwaist", "[sweep]\ngrid = 0.018:0.004:0.034\n"),
            ("distances", "[sweep]\nmc_budget = 1000\ngrid = 0:0.5:2\n"),
        ];
        for (sub, extra) in cases {
            let sc = scenario(sub, extra);
            let table = run(sub, &sc).unwrap_or_else(|e| panic!("{sub}: {e}"));
            assert!(!table.rows.is_empty(), "{sub}: empty table");
            for row in &table.rows {
                assert_eq!(row.len(), table.columns.len(), "{sub}: ragged row");
            }
            let text = render(&table, sc.sweep.seed, &sc.config_sha256);
            assert!(text.contains("# seed=0\n"), "{sub}");
            assert!(text.contains("# artifact=fsonet v"), "{sub}");
            assert!(text.contains(&format!("# config_sha256={}", sc.config_sha256)), "{sub}");
        }
    }

    /// Rendering the same scenario twice must produce identical bytes,
    /// including through the parallel Monte Carlo paths.
    #[test]
    fn repeated_runs_render_identical_bytes() {
        for (sub, extra) in [
            ("hybrid", "[sweep]\nmc_budget = 1000\ngrid = -5:5:5\n"),
            ("irs", "[irs]\ninstances = 40\n[sweep]\ngrid = 1:1:4\n"),
        ] {
            let sc = scenario(sub, extra);
            let a = render(&run(sub, &sc).unwrap(), sc.sweep.seed, &sc.config_sha256);
            let b = render(&run(sub, &sc).unwrap(), sc.sweep.seed, &sc.config_sha256);
            assert_eq!(a, b, "{sub}: nondeterministic output");
        }
    }

    #[test]
    fn diversity_footer_carries_both_slopes() {
        let sc = scenario("diversity", "[sweep]\ngrid = 16:4:52\n");
        let table = run("diversity", &sc).unwrap();
        let notes = table.notes.join("\n");
        assert!(notes.contains("fitted_slope="));
        assert!(notes.contains("predicted_slope="));
        assert!(notes.contains("interferer_density=0"));
    }
}
