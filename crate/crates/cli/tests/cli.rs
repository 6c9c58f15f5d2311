use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hexrl(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hexrl"))
        .args(args)
        .env("HEXRL_OUT_DIR", out)
        .output()
        .expect("spawn hexrl")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_reports_the_empty_board() {
    let tmp = tempfile::tempdir().unwrap();
    let board = tmp.path().join("empty.txt");
    fs::write(&board, "...\n ...\n  ...\nturn: R\n").unwrap();
    let text = stdout(&hexrl(tmp.path(), &["solve", board.to_str().unwrap()]));
    assert!(text.contains("Red to move wins"), "{text}");
    assert!(text.contains("(1,1)"), "{text}");

    fs::write(&board, "..\nturn: R\n").unwrap();
    assert!(!hexrl(tmp.path(), &["solve", board.to_str().unwrap()]).status.success());
}

#[test]
fn run_writes_under_the_out_dir_and_bad_fields_fail() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("tiny.cfg");
    fs::write(&cfg, "algorithm = qlearn\narchitecture = tabular\nalpha = 0.1\nepisodes = 4\nseed = 0\n").unwrap();
    let out = tmp.path().join("out");
    stdout(&hexrl(&out, &["run", cfg.to_str().unwrap()]));
    let csv = fs::read_to_string(out.join("tiny/metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(out.join("tiny/checkpoint.bin").exists());

    let svg = tmp.path().join("tiny.svg");
    let metrics = out.join("tiny/metrics.csv");
    stdout(&hexrl(&out, &["plot", metrics.to_str().unwrap(), "-o", svg.to_str().unwrap()]));
    assert!(fs::read_to_string(svg).unwrap().contains("<polyline"));

    fs::write(&cfg, "algorithm = dqn\narchitecture = tabular\nalpha = 0.1\nepisodes = 4\nseed = 0\n").unwrap();
    let o = hexrl(&out, &["run", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("algorithm"));
}

#[test]
fn sweep_makes_one_directory_per_point() {
    let tmp = tempfile::tempdir().unwrap();
    let grid = tmp.path().join("g.grid");
    fs::write(
        &grid,
        "algorithm = sarsa\narchitecture = tabular\nalpha = 0.1\nepisodes = 2\nseed = 0\naxis.epsilon = 0.1, 0.5\n",
    )
    .unwrap();
    stdout(&hexrl(tmp.path(), &["sweep", grid.to_str().unwrap()]));
    for d in ["run_000", "run_001"] {
        assert!(tmp.path().join("g").join(d).join("metrics.csv").exists(), "{d}");
    }
}

#[test]
fn baird_prints_one_row_per_step() {
    let tmp = tempfile::tempdir().unwrap();
    let text = stdout(&hexrl(tmp.path(), &["baird", "tdc", "5"]));
    assert_eq!(text.lines().count(), 6);
    assert_eq!(text.lines().next(), Some("step,norm,pbe"));
    assert!(!hexrl(tmp.path(), &["baird", "dqn", "5"]).status.success());
}

#[test]
fn manifest_lists_every_figure() {
    let tmp = tempfile::tempdir().unwrap();
    let text = stdout(&hexrl(tmp.path(), &["manifest"]));
    for n in 5..=19 {
        assert!(text.contains(&format!("# Figure {n}:")), "figure {n}");
    }
    let grids = tmp.path().join("grids");
    let listed = stdout(&hexrl(tmp.path(), &["grids", grids.to_str().unwrap(), "--episodes", "3"]));
    assert_eq!(listed.lines().count(), fs::read_dir(grids).unwrap().count());
}
