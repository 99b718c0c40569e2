use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn plslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plslab"))
        .args(args)
        .env("PLSLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn ok(args: &[&str]) -> String {
    let out = plslab(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn code(args: &[&str]) -> i32 {
    plslab(args).status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_reports_membership_and_distance() {
    assert_eq!(ok(&["check", path(&fixture("st_tree.json")), "--lang", "st_l"]), "member, distance 0\n");
    assert_eq!(ok(&["check", path(&fixture("st_broken.json")), "--lang", "ST_L"]), "nonmember, distance 3\n");
    assert_eq!(ok(&["check", path(&fixture("path10/instance.json")), "--lang", "st_p"]), "nonmember, distance 5\n");
    assert_eq!(ok(&["check", path(&fixture("leader_two.json")), "--lang", "leader"]), "nonmember, distance 1\n");
    assert_eq!(ok(&["check", path(&fixture("mst_member.json")), "--lang", "mst_l"]), "member, distance 0\n");
}

#[test]
fn exit_codes_follow_the_failure_class() {
    let k8 = fixture("k8_empty.json");
    assert_eq!(code(&["check", path(&k8), "--lang", "st_l", "--budget", "1000"]), 3);
    assert_eq!(code(&["check", path(&fixture("not_json.json")), "--lang", "acyclic"]), 2);
    assert_eq!(code(&["check", path(&fixture("st_tree.json")), "--lang", "acyclic"]), 2);
    assert_eq!(code(&["prove", path(&fixture("st_broken.json")), "--scheme", "st"]), 2);
    assert_eq!(code(&["verify", path(&fixture("st_tree.json")), "--scheme", "universal"]), 2);
    assert_eq!(code(&["check", path(&fixture("missing.json")), "--lang", "acyclic"]), 1);
}

#[test]
fn verify_counts_rejections() {
    let inst = fixture("path10/instance.json");
    let spliced = ok(&["verify", path(&inst), "--scheme", "stp", "--certs", path(&fixture("path10/certs.json"))]);
    assert!(spliced.ends_with("k = 2\n"));
    assert!(spliced.contains("5 reject") && spliced.contains("6 reject"));
    let garbage = ok(&["verify", path(&inst), "--scheme", "stp", "--certs", path(&fixture("path10/garbage_certs.json"))]);
    assert!(garbage.ends_with("k = 10\n"));
    let cycle = fixture("cycle12/instance.json");
    let faked = ok(&["verify", path(&cycle), "--scheme", "wrapped-acyclic", "--certs", path(&fixture("cycle12/certs.json"))]);
    assert!(faked.ends_with("k = 1\n"));
}

#[test]
fn prover_certificates_verify_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for (inst, scheme) in [("st_tree.json", "st"), ("mst_member.json", "mst"), ("st_tree.json", "wrapped-st")] {
        let certs = dir.path().join(format!("{scheme}.json"));
        let verdict = dir.path().join(format!("{scheme}-verdict.json"));
        ok(&["prove", path(&fixture(inst)), "--scheme", scheme, "--out", path(&certs)]);
        let out = ok(&[
            "verify",
            path(&fixture(inst)),
            "--scheme",
            scheme,
            "--certs",
            path(&certs),
            "--out",
            path(&verdict),
        ]);
        assert!(out.ends_with("k = 0\n"), "{scheme}: {out}");
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&verdict).unwrap()).unwrap();
        assert_eq!(v["k"], 0);
    }
    let stdout = ok(&["prove", path(&fixture("st_tree.json")), "--scheme", "st"]);
    assert!(stdout.contains("\"scheme\": \"st\""));
}

#[test]
fn constructions_match_the_committed_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    assert_eq!(ok(&["construct", "path-splice", "--n", "10", "--out", path(&out)]), "n = 10, scheme stp, k = 2\n");
    for f in ["instance.json", "certs.json"] {
        assert_eq!(
            fs::read_to_string(out.join(f)).unwrap(),
            fs::read_to_string(fixture("path10").join(f)).unwrap()
        );
    }
    let cyc = dir.path().join("c");
    ok(&["construct", "wrapper-cycle", "--n", "12", "--out", path(&cyc)]);
    assert_eq!(
        fs::read_to_string(cyc.join("certs.json")).unwrap(),
        fs::read_to_string(fixture("cycle12/certs.json")).unwrap()
    );
    let glue = dir.path().join("g");
    let line = ok(&["construct", "regular-glue", "--d1", "2", "--m1", "6", "--d2", "3", "--m2", "6", "--out", path(&glue)]);
    assert_eq!(line, "n = 12, scheme universal, k = 10\n");
    assert_eq!(ok(&["check", path(&glue.join("instance.json")), "--lang", "regular"]), "nonmember, distance 6\n");
    let paired = dir.path().join("q");
    assert!(ok(&["construct", "paired-cycle", "--n", "8", "--out", path(&paired)]).ends_with("k = 1\n"));
    assert_eq!(code(&["construct", "path-splice", "--n", "7", "--out", path(&out)]), 2);
}

#[test]
fn attack_finds_the_minimum_and_writes_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        ok(&["attack", path(&fixture("acyclic_triangle.json")), "--scheme", "acyclic"]),
        "distance 1, k_min 1 (exhaustive)\n"
    );
    let out = dir.path().join("a");
    ok(&["attack", path(&fixture("st_broken.json")), "--scheme", "st", "--out", path(&out)]);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("attack.json")).unwrap()).unwrap();
    assert_eq!(summary["k_min"], 2);
    assert_eq!(summary["distance"], 3);
    let rerun = ok(&["verify", path(&fixture("st_broken.json")), "--scheme", "st", "--certs", path(&out.join("witness.json"))]);
    assert!(rerun.ends_with("k = 2\n"));
    let seeded = ok(&[
        "attack",
        path(&fixture("path10/instance.json")),
        "--scheme",
        "stp",
        "--certs",
        path(&fixture("path10/certs.json")),
        "--budget",
        "100000",
    ]);
    assert!(seeded.starts_with("distance 5, k_min "));
    let k: usize = seeded.split("k_min ").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
    assert!(k <= 2);
}

#[test]
fn sensitivity_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(&["sensitivity", "--scheme", "st", "--max-n", "6", "--count", "20", "--seed", "5", "--out", path(&out)]);
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["report.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    let csv = fs::read_to_string(a.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 23);
    assert_eq!(csv.lines().nth(2).unwrap(), "instance-id,n,edit-distance,k-min,ratio,exhaustive,witness-file");
    let first = csv.lines().nth(3).unwrap();
    let witness = first.rsplit(',').next().unwrap();
    assert!(a.join(witness).exists());
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    assert!(summary["min_ratio"].as_f64().unwrap() >= 0.25);
}

#[test]
fn sensitivity_presets_meet_their_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let acyclic = dir.path().join("acyclic");
    ok(&["sensitivity", "--scheme", "acyclic", "--max-n", "3", "--out", path(&acyclic)]);
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(acyclic.join("summary.json")).unwrap()).unwrap();
    assert!(s["min_ratio"].as_f64().unwrap() >= 1.0);
    let mst = dir.path().join("mst");
    ok(&["sensitivity", "--scheme", "mst", "--max-n", "5", "--count", "15", "--budget", "200000", "--out", path(&mst)]);
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(mst.join("summary.json")).unwrap()).unwrap();
    assert!(s["max_distance_per_rejection"].as_f64().unwrap() <= 7.0);
    assert_eq!(
        code(&["sensitivity", "--scheme", "stp", "--corpus", "corrupted", "--out", path(&dir.path().join("x"))]),
        2
    );
}

#[test]
fn probe_writes_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("probe.json");
    let text = ok(&["probe", "--lang", "regular", "--max-n", "4", "--beta", "1", "--out", path(&out)]);
    assert!(text.starts_with("beta 1: violation on n = 3"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let w = &v["results"][0]["witness"];
    assert!(w["distance"].as_u64().unwrap() > w["boundary"].as_u64().unwrap());
    assert!(ok(&["probe", "--lang", "leader", "--max-n", "4", "--beta", "2"]).starts_with("beta 2: none up to n = 4"));
}
