use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use d2d_core::sdr::dump::{read_solution, write_solution};

const SMALL: &str = r#"
[grid]
horizon_s = 3.0

[solver.rounding]
trials = 10

[revenue]
due_counts = [0, 3]
edge_radii_m = [50.0, 100.0]
replications = 2

[capacity]
cue_counts = [0, 30, 50]
n_cue = 5
due_devices = 4
active_counts = [0, 3]
replications = 2

[fairness]
n_cue = 5
due_counts = [3, 4]
replications = 2

[simulate]
n_cue = 6
due_devices = 5
"#;

fn d2dsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d2dsim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn d2dsim")
}

fn ok(args: &[&str], dir: &Path) -> Output {
    let out = d2dsim(args, dir);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    dir
}

#[test]
fn experiments_are_reproducible() {
    let dir = setup();
    let p = dir.path();
    for (cmd, schema) in [
        ("revenue", "#schema=revenue.v1"),
        ("capacity", "#schema=capacity.v1"),
        ("fairness", "#schema=fairness.v1"),
    ] {
        ok(&[cmd, "--config", "small.toml", "--out", "a.csv"], p);
        ok(&[cmd, "--config", "small.toml", "--out", "b.csv"], p);
        let a = fs::read(p.join("a.csv")).unwrap();
        assert_eq!(a, fs::read(p.join("b.csv")).unwrap(), "{cmd}");
        assert!(String::from_utf8(a).unwrap().starts_with(schema));
    }
}

#[test]
fn stdout_matches_out_file() {
    let dir = setup();
    let p = dir.path();
    ok(&["fairness", "--config", "small.toml", "--out", "f.csv"], p);
    let out = ok(&["fairness", "--config", "small.toml"], p);
    assert_eq!(out.stdout, fs::read(p.join("f.csv")).unwrap());
}

#[test]
fn seed_flag_changes_results() {
    let dir = setup();
    let p = dir.path();
    let a = ok(&["simulate", "--config", "small.toml", "--seed", "5"], p).stdout;
    let b = ok(&["simulate", "--config", "small.toml", "--seed", "6"], p).stdout;
    assert_ne!(a, b);
}

#[test]
fn simulate_chain_verifies_and_reencodes() {
    let dir = setup();
    let p = dir.path();
    for fmt in ["binary", "text"] {
        let args = ["simulate", "--config", "small.toml", "--chain-format", fmt, "--chain-out"];
        ok(&[&args[..], &["c1", "--out", "t1.csv"]].concat(), p);
        ok(&[&args[..], &["c2", "--out", "t2.csv"]].concat(), p);
        assert_eq!(fs::read(p.join("c1")).unwrap(), fs::read(p.join("c2")).unwrap());
        assert_eq!(fs::read(p.join("t1.csv")).unwrap(), fs::read(p.join("t2.csv")).unwrap());

        let out = ok(&["ledger-verify", "c1", "--out", "c3"], p);
        assert!(String::from_utf8_lossy(&out.stdout).contains("valid chain"));
        assert_eq!(fs::read(p.join("c1")).unwrap(), fs::read(p.join("c3")).unwrap(), "{fmt}");
    }
}

#[test]
fn corrupt_chain_reports_bad_index() {
    let dir = setup();
    let p = dir.path();
    ok(&["simulate", "--config", "small.toml", "--chain-out", "c.bin", "--out", "t.csv"], p);
    let mut bytes = fs::read(p.join("c.bin")).unwrap();
    // Last byte belongs to the final block's stored hash.
    let last = bytes.len() - 1;
    bytes[last] ^= 0x40;
    fs::write(p.join("bad.bin"), &bytes).unwrap();
    let out = d2dsim(&["ledger-verify", "bad.bin"], p);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("first bad block at index"), "{err}");

    fs::write(p.join("junk.bin"), b"not a chain").unwrap();
    assert_eq!(d2dsim(&["ledger-verify", "junk.bin"], p).status.code(), Some(4));
}

#[test]
fn solve_round_trip_and_oracle() {
    let dir = setup();
    let p = dir.path();
    ok(&["instance", "--synthetic", "--n", "10", "--seed", "4", "--out", "i.json"], p);
    ok(&["solve", "i.json", "--seed", "2", "--out", "s1.json"], p);
    ok(&["solve", "i.json", "--seed", "2", "--out", "s2.json"], p);
    let s1 = fs::read_to_string(p.join("s1.json")).unwrap();
    assert_eq!(s1, fs::read_to_string(p.join("s2.json")).unwrap());
    let dump = read_solution(&s1).unwrap();
    assert_eq!(write_solution(&dump).unwrap(), s1);
    assert!(dump.oracle.is_none());
    assert_eq!(dump.seed, 2);

    let out = ok(&["solve", "i.json", "--oracle", "--out", "s3.json"], p);
    assert!(String::from_utf8_lossy(&out.stderr).contains("oracle"));
    let dump = read_solution(&fs::read_to_string(p.join("s3.json")).unwrap()).unwrap();
    let oracle = dump.oracle.expect("oracle recorded");
    assert!(dump.solution.selected_objective <= oracle.value + 1e-9);
    assert!(oracle.value <= dump.solution.objective_bound + 1e-6);
}

#[test]
fn live_instance_dump() {
    let dir = setup();
    let p = dir.path();
    ok(&["instance", "--n", "5", "--seed", "7", "--out", "i.json"], p);
    let out = ok(&["solve", "i.json"], p);
    assert!(read_solution(&String::from_utf8(out.stdout).unwrap()).is_ok());
}

#[test]
fn exit_codes() {
    let dir = setup();
    let p = dir.path();
    fs::write(p.join("bad.toml"), "[scenario]\nradius = 1\n").unwrap();
    assert_eq!(d2dsim(&["revenue", "--config", "bad.toml"], p).status.code(), Some(2));
    assert_eq!(d2dsim(&["revenue", "--config", "missing.toml"], p).status.code(), Some(2));

    fs::write(p.join("tight.toml"), "[solver.sdp]\nmax_iter = 1\n").unwrap();
    ok(&["instance", "--synthetic", "--n", "6", "--out", "i.json"], p);
    let out = d2dsim(&["solve", "i.json", "--config", "tight.toml"], p);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    assert_eq!(d2dsim(&["solve", "nope.json"], p).status.code(), Some(1));
}
