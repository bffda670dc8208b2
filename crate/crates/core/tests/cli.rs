use std::fs;
use std::process::Command;

use georobust_core::harness::sweep::CSV_HEADER;
use georobust_core::Error;

fn georobust() -> Command {
    Command::new(env!("CARGO_BIN_EXE_georobust"))
}

fn code(cmd: &mut Command) -> i32 {
    cmd.output().unwrap().status.code().unwrap()
}

#[test]
fn build_writes_schedule_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sr.sched");
    assert_eq!(code(georobust().args(["build", "--family", "sr-ngqc", "--out"]).arg(&out)), 0);
    let schedule = georobust_core::PulseSchedule::from_text(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(schedule.segments().len(), 3);
    let report = fs::read_to_string(dir.path().join("sr.sched.report")).unwrap();
    assert!(report.contains("residual_src"));
}

#[test]
fn sweep_is_byte_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.cfg");
    fs::write(
        &config,
        "# small sweep\nfamilies = dg, sr-nhqc\nbeta_min = -0.1\nbeta_max = 0.1\nbeta_points = 5\ngammas = 0, 1e-4\nsteps_per_pi = 200\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "3"] {
        let out = dir.path().join(format!("out{jobs}.csv"));
        let status = georobust()
            .args(["sweep-beta", "--config"])
            .arg(&config)
            .args(["--jobs", jobs, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), 2 * 5 * 2);
    assert!(!text.contains('\r'));
}

#[test]
fn grid_sweep_reports_differences() {
    let out = georobust()
        .args(["sweep-grid", "--beta-points", "3", "--gamma", "0", "--steps-per-pi", "200"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("comparison,beta,gamma"));
    assert_eq!(text.lines().count(), 1 + 2 * 3);
}

#[test]
fn check_src_passes_for_not() {
    let out = georobust().args(["check-src"]).output().unwrap();
    assert!(out.status.success());
    assert!(!String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn configuration_errors_exit_with_four() {
    assert_eq!(code(georobust().args(["sweep-beta", "--family", "qgate"])), 4);
    assert_eq!(code(georobust().args(["sweep-beta", "--steps-per-pi", "50"])), 4);
    assert_eq!(code(georobust().args(["build", "--family", "dg", "--gate", "z"])), 4);
    assert_eq!(code(georobust().args(["frobnicate"])), 4);
    assert_eq!(code(georobust().args(["build", "--family", "ngqc"]).env("GEOROBUST_SEED_GRID", "x")), 4);
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    fs::write(&config, "colour = blue\n").unwrap();
    assert_eq!(code(georobust().args(["sweep-beta", "--config"]).arg(&config)), 4);
}

#[test]
fn exit_code_mapping() {
    assert_eq!(Error::SolverFailed { family: "ngqc".into(), residual_src: 0.0, residual_gate: 1.0 }.exit_code(), 2);
    assert_eq!(Error::InvariantViolation("x".into()).exit_code(), 3);
    assert_eq!(Error::Config("x".into()).exit_code(), 4);
}
