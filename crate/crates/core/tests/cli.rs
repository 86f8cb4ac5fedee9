use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qmem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmem"))
        .args(args)
        .env("QMEM_THREADS", "2")
        .output()
        .expect("run qmem")
}

fn out_prefix(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn every_preset_runs_through_its_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("benchmark", "fig3", vec!["fig3.csv"]),
        ("benchmark", "fig4", vec!["fig4.csv"]),
        ("simulate", "fig5", vec!["fig5.csv"]),
        ("sweep", "fig6", vec!["fig6.csv"]),
        ("simulate", "fig7", vec!["fig7.csv"]),
        ("sweep", "fig8", vec!["fig8.csv"]),
        ("simulate", "fig9", vec!["fig9.csv"]),
    ];
    for (cmd, preset, files) in cases {
        let o = qmem(&[
            cmd,
            "--preset",
            preset,
            "--out",
            &out_prefix(dir.path(), preset),
        ]);
        assert!(
            o.status.success(),
            "{cmd} {preset}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        for f in files {
            let text = fs::read_to_string(dir.path().join(f)).unwrap();
            assert!(text.lines().count() > 1, "{f} is empty");
        }
    }
}

#[test]
fn summaries_report_measured_analytic_and_difference() {
    let dir = tempfile::tempdir().unwrap();
    let o = qmem(&[
        "simulate",
        "--preset",
        "fig8",
        "--out",
        &out_prefix(dir.path(), "f8"),
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 3);
    for line in s.lines() {
        assert!(line.contains("measured_sqrt_eta=") && line.contains("analytic_sqrt_eta="));
        assert!(
            line.contains("diff=") && line.contains("flag=agrees"),
            "{line}"
        );
    }
    for t in ["4", "8", "15"] {
        assert!(dir.path().join(format!("f8_T{t}.csv")).exists());
    }
}

#[test]
fn fig6_flags_the_quoted_loss_curve_as_discrepant() {
    let o = qmem(&["sweep", "--preset", "fig6"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].ends_with(",agrees"));
    assert!(rows[1].ends_with(",discrepant"));
    assert!(rows[1].starts_with("5.00000000000e-2,7.70"));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = out_prefix(dir.path(), name);
        let o = qmem(&[
            "benchmark",
            "--set",
            "alphabet=bounded",
            "--set",
            "n_max=5",
            "--set",
            "values=0.2,0.7",
            "--mc-samples",
            "2000",
            "--seed",
            "9",
            "--out",
            &p,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let sim = qmem(&["simulate", "--preset", "fig7", "--out", &format!("{p}_sim")]);
        assert!(sim.status.success());
        (
            fs::read(format!("{p}.csv")).unwrap(),
            fs::read(format!("{p}_sim.csv")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn config_file_and_overrides_are_applied() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.cfg");
    fs::write(
        &cfg,
        "# detuned gate at higher loss\nstrategy = detuning_gate\nkappa = 4\ngamma = 0.02\n\
         g = critical\ndelta_l = 27pi\nT = 2\n",
    )
    .unwrap();
    let o = qmem(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "T=3",
        "--out",
        &out_prefix(dir.path(), "cfg"),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(
        s.contains("strategy=detuning_gate") && s.contains("T=3"),
        "{s}"
    );
}

#[test]
fn modes_writes_input_output_and_laguerre_tables() {
    let dir = tempfile::tempdir().unwrap();
    let p = out_prefix(dir.path(), "m");
    let o = qmem(&[
        "modes",
        "--preset",
        "fig5",
        "--set",
        "laguerre_count=2",
        "--out",
        &p,
    ]);
    assert!(o.status.success());
    for suffix in ["_in", "_out", "_laguerre0", "_laguerre1"] {
        let text = fs::read_to_string(format!("{p}{suffix}.csv")).unwrap();
        assert_eq!(text.lines().next(), Some("t,re,im"));
    }
}

#[test]
fn empty_sweep_writes_only_the_header() {
    let o = qmem(&["sweep", "--preset", "fig8", "--set", "range=4:15:0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn exit_codes_distinguish_config_and_numerical_failures() {
    let bad_key = qmem(&["simulate", "--set", "kapa=2"]);
    assert_eq!(bad_key.status.code(), Some(2));
    let bad_preset = qmem(&["simulate", "--preset", "fig10"]);
    assert_eq!(bad_preset.status.code(), Some(2));
    let negative = qmem(&["simulate", "--preset", "fig7", "--set", "gamma=-1"]);
    assert_eq!(negative.status.code(), Some(2));
    let coarse = qmem(&["simulate", "--preset", "fig7", "--dt", "0.5"]);
    assert_eq!(coarse.status.code(), Some(3));
    let usage = qmem(&["frobnicate"]);
    assert_eq!(usage.status.code(), Some(2));
}
