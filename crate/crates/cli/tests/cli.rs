use std::path::Path;
use std::process::{Command, Output};

use meic::link_sim::{energy_per_bit, simulate_link};
use meic_cli::config::RunConfig;

fn meic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meic")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn trajectory_crosses_before_500_ps() {
    let o = meic(&["trajectory", "--v-me", "0.2", "--duration-ns", "1", "--temperature", "0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("time_ps,mx,my,mz,v_me_mv\n"));
    let rows = csv_rows(&text);
    let cross = rows.iter().find(|r| r[1] >= 0.9).expect("m_x reaches +0.9");
    assert!(cross[0] <= 500.0, "{}", cross[0]);
}

#[test]
fn trajectory_without_drive_stays_reversed() {
    let o = meic(&["trajectory", "--v-me", "0", "--temperature", "0", "--duration-ns", "0.5"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert!(rows.iter().all(|r| r[1] < -0.99));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["trajectory", "--duration-ns", "0"][..],
        &["sweep", "--trials", "0"],
        &["variation", "--spread", "0.9"],
        &["compare", "--lengths", ""],
        &["compare", "--lengths", ",,"],
        &["link", "--pattern", "10x1"],
        &["trajectory", "--set", "nosuch.key=1"],
        &["trajectory", "--set", "wire.n_segments=3"],
        &["sweep", "--no-such-flag"],
    ] {
        let o = meic(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn unknown_config_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[wire]\nlength_mm = 5\nbogus = 1\n").unwrap();
    let o = meic(&["--config", cfg.to_str().unwrap(), "trajectory"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn sweep_is_reproducible() {
    let args = ["sweep", "--v-min", "0.14", "--v-max", "0.16", "--step", "0.01", "--trials", "100", "--seed", "4"];
    let a = meic(&args);
    let b = meic(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("v_me_mv,n_trials,n_switched,probability,ci_low,ci_high\n"));
    assert_eq!(text.lines().count(), 4);
    let c = meic(&[&args[..], &["--threads", "3"]].concat());
    assert_eq!(text.as_bytes(), &c.stdout[..]);
}

#[test]
fn link_output_follows_input_one_cycle_late() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("link.csv");
    let o = meic(&["link", "--pattern", "10110", "--length-mm", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("time_ps,v_in_mv,v_me_mv,mx,v_node_m_mv,v_out_bit\n"));
    let rows = csv_rows(&text);
    let per_cycle = 2500;
    let pattern = [1.0, 0.0, 1.0, 1.0, 0.0];
    for k in 0..5 {
        let expect = if k == 0 { 0.0 } else { pattern[k - 1] };
        assert_eq!(rows[k * per_cycle + 100][5], expect, "cycle {k}");
    }

    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(summary["method"], "capacitive ME");
    assert_eq!(summary["bits_sensed"], "10110");
    assert_eq!(summary["bit_errors"], 0);
    assert_eq!(summary["length_mm"], 5.0);
    for key in ["energy_fj_per_bit_per_mm", "delay_ns", "energy_breakdown"] {
        assert!(!summary[key].is_null(), "{key}");
    }

    let cfg = RunConfig::default().link().unwrap();
    let bits: Vec<bool> = "10110".chars().map(|c| c == '1').collect();
    let e = energy_per_bit(&simulate_link(&cfg, &bits).unwrap()).unwrap();
    let reported = summary["energy_fj_per_bit_per_mm"].as_f64().unwrap();
    assert!((reported - e.total).abs() <= 1e-12 * e.total);
}

#[test]
fn all_zero_pattern_gives_zero_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.csv");
    let o = meic(&["link", "--pattern", "00000", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert!(rows.iter().all(|r| r[5] == 0.0));
}

#[test]
fn link_failure_exits_one_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fail.csv");
    let o = meic(&["link", "--pattern", "1", "--set", "device.alpha_me_s_per_m=1e-9", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("write"));
    assert_no_files(dir.path());
}

fn assert_no_files(dir: &Path) {
    let left: Vec<_> = std::fs::read_dir(dir).unwrap().collect();
    assert!(left.is_empty(), "{left:?}");
}

#[test]
fn invalid_input_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = meic(&["sweep", "--trials", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_no_files(dir.path());
}

#[test]
fn compare_reports_six_rows_and_ratios() {
    let o = meic(&["compare", "--lengths", "5,10", "--bits", "8"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for l in [5.0, 10.0] {
        let e = |m: &str| {
            rows.iter()
                .find(|r| r["method"] == m && r["length_mm"] == l)
                .unwrap()["energy_fj_per_bit_per_mm"]
                .as_f64()
                .unwrap()
        };
        let (fs, ls, me) = (e("full-swing CMOS"), e("low-swing capacitive CMOS"), e("capacitive ME"));
        assert!(me < ls && ls < fs, "{l} mm");
    }
    let ratios = report["ratios"].as_array().unwrap();
    assert_eq!(ratios.len(), 2);
    assert!(ratios[0]["full_swing_over_me"].as_f64().unwrap() > 1.0);

    let csv = meic(&["compare", "--lengths", "5", "--bits", "8", "--csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("length_mm,method,energy_fj_per_bit_per_mm,delay_ns\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn variation_zero_spread_has_identical_peaks() {
    let o = meic(&["variation", "--spread", "0", "--trials", "100"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("trial,peak_v_me_mv,pass\n"));
    let peaks: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(peaks.len(), 100);
    assert!(peaks.iter().all(|p| *p == peaks[0]));
}

#[test]
fn variation_failures_exit_one() {
    let o = meic(&["variation", "--spread", "0.5", "--trials", "200"]);
    assert_eq!(code(&o), 1);
    assert!(!o.stdout.is_empty());
}

#[test]
fn convergence_table() {
    let o = meic(&["convergence", "--dt-ps", "0.4,0.2,0.1", "--duration-ns", "0.2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("dt_ps,max_angle_error_rad,observed_order\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn help_for_every_subcommand() {
    let top = meic(&["--help"]);
    assert_eq!(code(&top), 0);
    for sub in ["trajectory", "sweep", "link", "compare", "variation", "convergence"] {
        let o = meic(&[sub, "--help"]);
        assert_eq!(code(&o), 0, "{sub}");
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.contains("Usage"), "{sub}");
        assert!(String::from_utf8_lossy(&top.stdout).contains(sub));
    }
}
