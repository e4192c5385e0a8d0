//! The command-line tool end to end: generate, train, sample, evaluate,
//! search, export, import and benchmark, plus the documented exit codes.

use std::path::Path;
use std::process::{Command, Output};

use edgecloud::model::io::{write_instance, write_scheme};
use edgecloud::{AllocationScheme, DemandTensor, Instance, LinkCaps, Topology};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgecloud")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn full_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["gen", "--users", "2", "--slots", "12", "--types", "3", "--count", "3", "--seed", "5", "--out", "train"]);
    ok(
        dir,
        &[
            "gen", "--users", "2", "--slots", "12", "--types", "3", "--count", "2", "--first", "10", "--seed", "5",
            "--out", "held",
        ],
    );
    let manifest = std::fs::read_to_string(dir.join("train/manifest.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 4, "{manifest}");
    assert!(manifest.starts_with("id,seed,N,T"));

    ok(dir, &["train", "--instances", "train", "--validation", "held", "--epochs", "3", "--out", "model.json"]);
    let history = std::fs::read_to_string(dir.join("loss_history.csv")).unwrap();
    assert_eq!(history.lines().count(), 4, "{history}");

    let instance = "train/s5-0000.json";
    let sampled = ok(
        dir,
        &["sample", "--instance", instance, "--model", "model.json", "--samples", "20", "--out", "scheme.json"],
    );
    assert!(sampled.contains("best cost"), "{sampled}");
    let cost: f64 = sampled.lines().find_map(|l| l.strip_prefix("best cost: ")).unwrap().parse().unwrap();
    let evaluated = ok(dir, &["eval", "--instance", instance, "--scheme", "scheme.json"]);
    let recomputed: f64 = evaluated.lines().find_map(|l| l.strip_prefix("cost: ")).unwrap().parse().unwrap();
    assert_eq!(cost, recomputed);

    ok(dir, &["export-milp", "--instance", instance, "--warmstart", "scheme.json", "--out", "model.lp"]);
    assert!(std::fs::read_to_string(dir.join("model.lp")).unwrap().contains("Minimize"));
    let imported =
        ok(dir, &["import-solution", "--instance", instance, "--solution", "model.mst", "--out", "back.json"]);
    assert!(imported.contains(&format!("recomputed cost: {cost}")), "{imported}");
    assert_eq!(
        std::fs::read_to_string(dir.join("back.json")).unwrap(),
        std::fs::read_to_string(dir.join("scheme.json")).unwrap()
    );

    ok(dir, &["bench", "--instances", "held", "--policy", "rsn", "--samples", "10", "--out", "rsn.csv"]);
    let csv = std::fs::read_to_string(dir.join("rsn.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3, "{csv}");
    ok(
        dir,
        &[
            "generalize",
            "--model",
            "model.json",
            "--axis",
            "slots",
            "--grid",
            "12,24",
            "--per-point",
            "2",
            "--samples",
            "5",
        ],
    );
}

#[test]
fn oracle_on_a_tiny_instance() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["gen", "--users", "1", "--slots", "3", "--types", "2", "--links", "2", "--seed", "9", "--out", "tiny"]);
    let out = ok(dir, &["oracle", "--instance", "tiny/s9-0000.json", "--out", "best.json"]);
    assert!(out.contains("optimal cost"), "{out}");
    ok(dir, &["eval", "--instance", "tiny/s9-0000.json", "--scheme", "best.json"]);

    let big = ok(dir, &["gen", "--users", "2", "--slots", "12", "--seed", "9", "--out", "big"]);
    assert!(big.contains("wrote 1"));
    let refused = run(dir, &["oracle", "--instance", "big/s9-0000.json"]);
    assert_eq!(refused.status.code(), Some(1));
}

#[test]
fn malformed_files_exit_with_format_code() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["gen", "--users", "1", "--slots", "6", "--seed", "2", "--out", "inst"]);
    let text = std::fs::read_to_string(dir.join("inst/s2-0000.json")).unwrap();
    std::fs::write(dir.join("broken.json"), &text[..text.len() / 2]).unwrap();
    let out = run(dir, &["export-milp", "--instance", "broken.json", "--out", "x.lp"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    std::fs::write(dir.join("bad.sol"), "x_0 1\n").unwrap();
    let out = run(dir, &["import-solution", "--instance", "inst/s2-0000.json", "--solution", "bad.sol"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn infeasible_scheme_exits_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    // Routing all traffic through one link exceeds its physical capacity.
    let link = |cap_max, cap_phys| LinkCaps { cap_basic: 5.0, cap_max, cap_phys, rate: 5.0 };
    let topology = Topology {
        n_users: 1,
        n_slots: 4,
        n_types: 1,
        n_links: 2,
        edge_links: vec![vec![link(40.0, 50.0), link(400.0, 500.0)]],
        isp_links: vec![link(400.0, 500.0), link(400.0, 500.0)],
        admissible: vec![vec![0b11]],
    };
    let mut demands = DemandTensor::zeros(1, 1, 4);
    demands.inbound.fill(80.0);
    let instance = Instance::new(topology, demands, 0, "overload").unwrap();
    write_instance(&instance, dir.join("overload.json")).unwrap();
    write_scheme(&AllocationScheme::uniform_option(4, 1, 1, 0), dir.join("link0.json")).unwrap();
    write_scheme(&AllocationScheme::uniform_option(4, 1, 1, 1), dir.join("link1.json")).unwrap();

    let out = run(dir, &["eval", "--instance", "overload.json", "--scheme", "link0.json"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("edge_physical"));
    ok(dir, &["eval", "--instance", "overload.json", "--scheme", "link1.json"]);
}
