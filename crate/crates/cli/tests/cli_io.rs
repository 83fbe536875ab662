//! Behavioral tests of the `fsonet` binary itself: exit codes, output
//! file handling, configuration layering, and error reporting.

use std::path::Path;
use std::process::{Command, Output};

fn fsonet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsonet")).args(args).output().unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("terminated by signal")
}

#[test]
fn successful_run_writes_csv_with_header_and_provenance_footer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.cfg");
    std::fs::write(&cfg, "[sweep]\nmc_budget = 1000\ngrid = -5:5:5\n").unwrap();
    let out = dir.path().join("coverage.csv");
    let result = fsonet(&[
        "coverage",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&result), 0, "stderr: {}", String::from_utf8_lossy(&result.stderr));
    assert!(result.stdout.is_empty(), "nothing should reach stdout when --out is given");
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("threshold_db,coverage_analytic,coverage_mc,ci_low,ci_high\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3);
    assert!(text.contains("\n# seed=5\n"));
    assert!(text.contains("\n# artifact=fsonet v"));
    let sha = text.lines().find_map(|l| l.strip_prefix("# config_sha256=")).unwrap();
    assert_eq!(sha.len(), 64);
    assert!(sha.chars().all(|c| c.is_ascii_hexdigit()));
}

#[test]
fn stdout_carries_the_table_when_no_output_path_is_given() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.cfg");
    std::fs::write(&cfg, "[sweep]\ngrid = 0.018:0.004:0.034\n").unwrap();
    let result = fsonet(&["beamwaist", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&result), 0);
    let text = String::from_utf8(result.stdout).unwrap();
    assert!(text.starts_with("waist_m,outage\n"));
    assert!(text.contains("# optimum_waist_m="));
    assert!(text.trim_end().ends_with(&format!("# config_sha256={}", {
        let line = text.lines().find(|l| l.starts_with("# config_sha256=")).unwrap();
        line.strip_prefix("# config_sha256=").unwrap()
    })));
}

#[test]
fn configuration_problems_exit_two_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    let out_s = out.to_str().unwrap();

    // Unknown preset.
    let r = fsonet(&["coverage", "--preset", "bogus", "--out", out_s]);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("unknown preset"));

    // Degenerate sweep grid.
    let cfg = dir.path().join("bad_grid.cfg");
    std::fs::write(&cfg, "[sweep]\ngrid = 5:1:4\n").unwrap();
    let r = fsonet(&["coverage", "--config", cfg.to_str().unwrap(), "--out", out_s]);
    assert_eq!(code(&r), 2);

    // Undersized Monte Carlo budget.
    let r = fsonet(&["coverage", "--mc-budget", "999", "--out", out_s]);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("at least 1000"));

    // Unknown key, with the line number in the message.
    let cfg = dir.path().join("bad_key.cfg");
    std::fs::write(&cfg, "[uplink]\nbogus_knob = 1\n").unwrap();
    let r = fsonet(&["coverage", "--config", cfg.to_str().unwrap(), "--out", out_s]);
    assert_eq!(code(&r), 2);
    let stderr = String::from_utf8_lossy(&r.stderr).to_string();
    assert!(stderr.contains("line 2") && stderr.contains("bogus_knob"), "{stderr}");

    // Wrong sweep variable for the subcommand.
    let cfg = dir.path().join("bad_var.cfg");
    std::fs::write(&cfg, "[sweep]\nvariable = density\n").unwrap();
    let r = fsonet(&["coverage", "--config", cfg.to_str().unwrap(), "--out", out_s]);
    assert_eq!(code(&r), 2);

    // Missing config file.
    let r = fsonet(&["coverage", "--config", "/nonexistent/path.cfg", "--out", out_s]);
    assert_eq!(code(&r), 2);

    // Unusable channel parameters.
    let cfg = dir.path().join("bad_chan.cfg");
    std::fs::write(&cfg, "[turbulence]\nalpha = -1\n").unwrap();
    let r = fsonet(&["fso", "--config", cfg.to_str().unwrap(), "--out", out_s]);
    assert_eq!(code(&r), 2);

    assert!(!Path::new(out_s).exists(), "a failing run must not leave an output file");
}

#[test]
fn interference_floor_in_the_decay_fit_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("floored.cfg");
    // An explicit interferer field caps the end-to-end SINR, so the
    // outage curve flattens and the decay fit must refuse to report an
    // order: a numerical failure, not a configuration one.
    std::fs::write(&cfg, "[uplink]\ninterferer_density = 0.25\n").unwrap();
    let out = dir.path().join("never.csv");
    let r = fsonet(&[
        "diversity",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 3, "stderr: {}", String::from_utf8_lossy(&r.stderr));
    assert!(!out.exists());
}

#[test]
fn flag_overrides_take_precedence_over_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("seeded.cfg");
    std::fs::write(
        &cfg,
        "[sweep]\nseed = 1\ngrid = 0.018:0.004:0.034\n[output]\npath = ignored.csv\n",
    )
    .unwrap();
    let out = dir.path().join("actual.csv");
    let r = fsonet(&[
        "beamwaist",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&r), 0, "stderr: {}", String::from_utf8_lossy(&r.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\n# seed=9\n"), "seed flag must beat the file");
    assert!(!dir.path().join("ignored.csv").exists());
}

#[test]
fn presets_layer_beneath_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("thin.cfg");
    std::fs::write(&cfg, "[sweep]\nmc_budget = 1000\ngrid = -10,0,10\n").unwrap();
    // Same scenario through the preset and through an explicit key must
    // hash identically; a different weather must not.
    let run = |preset: Option<&str>, extra: &str| -> String {
        let merged = dir.path().join("merged.cfg");
        std::fs::write(&merged, format!("[sweep]\nmc_budget = 1000\ngrid = -10,0,10\n{extra}"))
            .unwrap();
        let mut args = vec!["fso", "--config", merged.to_str().unwrap()];
        if let Some(p) = preset {
            args.extend(["--preset", p]);
        }
        let r = fsonet(&args);
        assert_eq!(code(&r), 0, "stderr: {}", String::from_utf8_lossy(&r.stderr));
        String::from_utf8(r.stdout)
            .unwrap()
            .lines()
            .find(|l| l.starts_with("# config_sha256="))
            .unwrap()
            .to_string()
    };
    let via_preset = run(Some("moderate_rain"), "");
    let via_key = run(None, "[fso]\nweather = moderate_rain\n");
    let clear = run(None, "");
    assert_eq!(via_preset, via_key);
    assert_ne!(via_preset, clear);
}
