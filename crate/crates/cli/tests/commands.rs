use std::path::Path;
use std::process::{Command, Output};

use fracid_cli::checks;
use fracid_cli::config::RunConfig;
use fracid_core::fixtures::FixtureBank;
use fracid_core::fotf::DiscreteTf;
use fracid_core::io::{self, Model};

fn fracid(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracid"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(o: &Output) -> String {
    format!(
        "{}{}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    )
}

fn files_under(dir: &Path) -> usize {
    if !dir.exists() {
        return 0;
    }
    std::fs::read_dir(dir).unwrap().count()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(fracid(&out, &["--help"]).status.code(), Some(0));
    assert_eq!(fracid(&out, &["no-such-command"]).status.code(), Some(1));
    assert_eq!(fracid(&out, &["analyze", "G99_100"]).status.code(), Some(1));
    assert_eq!(fracid(&out, &["tune", "--q", "0/4"]).status.code(), Some(1));
    assert_eq!(
        files_under(&out),
        0,
        "validation failures must not write output"
    );

    // a fit with more unknowns than equations in summed mode is numerical
    let csv = dir.path().join("one.csv");
    std::fs::write(&csv, "omega,re,im\n1,0.5,-0.25\n").unwrap();
    let o = fracid(
        &out,
        &[
            "identify-fo",
            csv.to_str().unwrap(),
            "--q",
            "1/2",
            "--aggregation",
            "summed",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(std::fs::read_to_string(out.join("sweep_one.txt"))
        .unwrap()
        .contains("failed"));
}

#[test]
fn numerical_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("flat.csv");
    let mut csv = String::from("t,u,y\n");
    for k in 0..40 {
        csv.push_str(&format!("{k},0,0\n"));
    }
    std::fs::write(&data, csv).unwrap();
    let out = dir.path().join("out");
    let o = fracid(
        &out,
        &[
            "identify-discrete",
            data.to_str().unwrap(),
            "--spec",
            "arx:1,1,1",
        ],
    );
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
    assert_eq!(files_under(&out), 0);
}

#[test]
fn malformed_csv_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    std::fs::write(&data, "t,u,y\n0,1,0\n0.1,abc,0.2\n").unwrap();
    let o = fracid(
        &dir.path().join("out"),
        &["identify-discrete", data.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("line 3"), "{}", text(&o));
    let o = fracid(
        &dir.path().join("out"),
        &[
            "identify-discrete",
            data.to_str().unwrap(),
            "--spec",
            "arx:1,x,1",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn regenerated_record_identifies_back_to_its_dc_gain() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = fracid(out, &["regen", "G30_90"]);
    assert!(o.status.success(), "{}", text(&o));
    let data = out.join("regen_G30_90.csv");
    let o = fracid(out, &["identify-discrete", data.to_str().unwrap()]);
    assert!(o.status.success(), "{}", text(&o));
    let best =
        Model::from_json(&std::fs::read_to_string(out.join("best_model.json")).unwrap()).unwrap();
    let Model::Discrete(g) = best else {
        panic!("expected a discrete model")
    };
    let want = FixtureBank::published()
        .get("G30_90")
        .unwrap()
        .discrete
        .dc_gain();
    assert!(
        (g.dc_gain() - want).abs() <= 0.05 * want.abs(),
        "{} vs {want}",
        g.dc_gain()
    );
    let ranking = std::fs::read_to_string(out.join("ranking.csv")).unwrap();
    assert!(ranking.lines().count() > 2);
}

#[test]
fn freqresp_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracid(dir.path(), &["freqresp", "G30_100"]);
    assert!(o.status.success(), "{}", text(&o));
    let csv = std::fs::read_to_string(dir.path().join("freqresp_G30_100.csv")).unwrap();
    let data = io::freq_response_from_csv(&csv).unwrap();
    assert_eq!(data.len(), 100);
    assert!((data.values()[0].norm() - 185.937).abs() < 1e-3 * 185.937);
    assert!(dir.path().join("freqresp_G30_100.svg").exists());
}

#[test]
fn analyze_reproduces_the_published_pole_angles() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracid(dir.path(), &["analyze", "G30_90"]);
    assert!(o.status.success(), "{}", text(&o));
    let csv = std::fs::read_to_string(dir.path().join("poles_G30_90.csv")).unwrap();
    let mut args: Vec<f64> = csv
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(1) == Some("pole"))
        .map(|l| l.split(',').nth(5).unwrap().parse::<f64>().unwrap().abs())
        .collect();
    args.sort_by(f64::total_cmp);
    args.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    let want = [22.8461, 26.2987, 30.4573, 44.9721, 140.7488];
    assert_eq!(args.len(), want.len(), "{args:?}");
    for (g, w) in args.iter().zip(want) {
        assert!((g - w).abs() < 0.1, "{g} vs {w}");
    }
    assert!(dir.path().join("polezero_G30_90.svg").exists());
}

#[test]
fn analyze_a_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let lag = dir.path().join("lag.json");
    std::fs::write(
        &lag,
        r#"{"kind": "fo", "q": "1/2", "num": [1.0], "den": [1.0, 1.0]}"#,
    )
    .unwrap();
    let o = fracid(dir.path(), &["analyze", lag.to_str().unwrap()]);
    assert!(o.status.success(), "{}", text(&o));
    let txt = std::fs::read_to_string(dir.path().join("poles_lag.txt")).unwrap();
    assert!(txt.contains("ultradamped"), "{txt}");

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"kind": "fo", "q": "1/2", "num": [1.0], "den": [1.0, -2.0, 1.0]}"#,
    )
    .unwrap();
    let o = fracid(dir.path(), &["analyze", bad.to_str().unwrap()]);
    assert!(o.status.success());
    let txt = std::fs::read_to_string(dir.path().join("poles_bad.txt")).unwrap();
    assert!(txt.contains("unstable"), "{txt}");
}

#[test]
fn verify_writes_the_angle_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracid(dir.path(), &["verify"]);
    assert!(o.status.success(), "{}", text(&o));
    let csv = std::fs::read_to_string(dir.path().join("verify_angles.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert!(csv.starts_with("plant,min_angle_deg,stable,hyperdamped\n"));
    assert!(text(&o).contains("stable false"));
}

#[test]
fn identify_fo_rejects_orders_that_do_not_divide_the_top() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = fracid(&out, &["identify-fo", "G30_100", "--q", "1/3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("does not divide"), "{}", text(&o));
    assert_eq!(files_under(&out), 0);
}

#[test]
fn identify_fo_on_a_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracid(
        dir.path(),
        &[
            "identify-fo",
            "G30_100",
            "--q",
            "1/4",
            "--weighting",
            "vinagre",
        ],
    );
    assert!(o.status.success(), "{}", text(&o));
    let model = Model::from_json(
        &std::fs::read_to_string(dir.path().join("models/G30_100_q1-4_vinagre.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(model.kind(), "fo");
    let sweep = std::fs::read_to_string(dir.path().join("sweep_G30_100.csv")).unwrap();
    let row = sweep.lines().nth(1).unwrap();
    let j: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!(j > 3.6721e-8 && j < 3.6721e-4, "{row}");
}

#[test]
fn self_test_recovers_in_class_models() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracid(dir.path(), &["identify-fo", "--self-test", "--seed", "3"]);
    assert!(o.status.success(), "{}", text(&o));
    assert!(text(&o).contains("self-test PASS"));
    let csv = std::fs::read_to_string(dir.path().join("self_test.csv")).unwrap();
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn simulate_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[sim]\nh = 0.1\nhorizon = 300.0\n").unwrap();
    let o = fracid(
        dir.path(),
        &[
            "--config",
            cfg.to_str().unwrap(),
            "simulate",
            "G30_100",
            "--scenario",
            "disturb",
        ],
    );
    assert!(o.status.success(), "{}", text(&o));
    let csv = std::fs::read_to_string(dir.path().join("sim_G30_100_disturb.csv")).unwrap();
    assert!(csv.starts_with("t,y,u_ctrl,e\n"));
    assert_eq!(csv.lines().count(), 3002);
    assert!(dir.path().join("sim_G30_100_disturb.svg").exists());

    std::fs::write(&cfg, "[sim]\nh = -1.0\n").unwrap();
    let o = fracid(
        &dir.path().join("x"),
        &["--config", cfg.to_str().unwrap(), "simulate", "G30_100"],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn export_and_reimport_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let o = fracid(dir.path(), &["export-fixtures"]);
    assert!(o.status.success(), "{}", text(&o));
    assert_eq!(files_under(&dir.path().join("fixtures")), 17);
    let bank = FixtureBank::published();
    for f in &bank.fixtures {
        let path = dir.path().join(format!("fixtures/{}_fo.json", f.label));
        let m = Model::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(m, Model::Fo(f.fo.clone()));
    }
    // a controller file round-trips through verify
    let c = dir.path().join("fixtures/controller.json");
    let o = fracid(
        &dir.path().join("v"),
        &[
            "verify",
            "--controller",
            c.to_str().unwrap(),
            "--plant",
            "G50_100",
        ],
    );
    assert!(o.status.success(), "{}", text(&o));
}

#[test]
fn corrupted_bank_aborts_the_report() {
    let mut bank = FixtureBank::published();
    let f = &mut bank.fixtures[2];
    let mut num = f.discrete.num().to_vec();
    num[0] *= 1.001;
    f.discrete = DiscreteTf::new(num, f.discrete.den().to_vec(), f.discrete.ts()).unwrap();
    let err = checks::report(&bank, &RunConfig::default()).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("checksum"), "{err}");
}

#[test]
fn angle_tolerances_follow_the_typography_flag() {
    let bank = FixtureBank::published();
    let flagged: Vec<&str> = bank
        .fixtures
        .iter()
        .filter(|f| f.typography_flag)
        .map(|f| f.label)
        .collect();
    assert_eq!(flagged, vec!["G50_80"]);
    for f in &bank.fixtures {
        let tol = checks::angle_tolerance(f);
        assert_eq!(tol, if f.typography_flag { 0.5 } else { 0.1 });
    }
}
