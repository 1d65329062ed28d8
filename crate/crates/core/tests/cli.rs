use fpp_lab::cli::run;
use tempfile::TempDir;

fn fixtures_dir() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let out = run(["fpp-lab", "fixtures", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    dir
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    std::fs::write(dir.path().join(name), body).unwrap();
    path(dir, name)
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s.trim()).unwrap()
}

#[test]
fn classify_bad_fixture() {
    let d = fixtures_dir();
    let out = run(["fpp-lab", "classify", &path(&d, "example22.json")]);
    assert_eq!(out.code, 0);
    let v = json(&out.stdout);
    assert_eq!(v["classification"]["is_bad"], true);
    assert_eq!(v["witnesses"]["is_bad"], "def:bad-hyperplane");
    assert!(v["citations"]["def:bad-hyperplane"].as_str().unwrap().contains("bad"));
}

#[test]
fn exit_codes() {
    let d = fixtures_dir();
    let half = write(&d, "half.json", r#"{"finite":{"1":"1/4","2":"1/4"}}"#);
    let out = run(["fpp-lab", "classify", &half]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("norm-one hypothesis violated"));
    let out = run(["fpp-lab", "classify", &half, "--normalize"]);
    assert_eq!(out.code, 0);

    let broken = write(&d, "broken.json", r#"{"finite":{"1":"x"}}"#);
    assert_eq!(run(["fpp-lab", "classify", &broken]).code, 1);
    assert_eq!(run(["fpp-lab", "classify", "/nonexistent/f.json"]).code, 1);
    assert_eq!(run(["fpp-lab", "no-such-command"]).code, 1);

    // the infimum is not attained, so a zero margin has no finite witness
    let v = write(&d, "v.json", r#"{"prefix":{"1":"7/3"},"limit":"1"}"#);
    let out = run(["fpp-lab", "quotient", "norm", &path(&d, "example31.json"), "2:2", &v, "--margin", "0"]);
    assert_eq!(out.code, 3, "{}", out.stderr);
    let out = run(["fpp-lab", "quotient", "norm", &path(&d, "example31.json"), "2:2", &v, "--margin", "1/100"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let j = json(&out.stdout);
    assert_eq!(j["quotient"]["value"], "1");
    assert_eq!(j["oracle"], json(r#"[[16,"1"],[32,"1"],[64,"1"]]"#));

    let out = run(["fpp-lab", "extract", "run", &path(&d, "mixed_family.json"), "--targets", "3/4,-1/2"]);
    assert_eq!(out.code, 2);
}

#[test]
fn witness_iterate_vertex_shift() {
    let out = run(["fpp-lab", "witness-iterate", "shift", "--steps", "5", "--seed", "7"]);
    assert_eq!(out.code, 0);
    let rows: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(rows[0], "step,displacement,via");
    assert_eq!(rows.len(), 6);
    assert!(rows[1..].iter().all(|r| r.split(',').nth(1) == Some("2")));
    let out = run(["fpp-lab", "witness", "iterate", "contraction", "--steps", "1"]);
    assert_eq!(out.stdout.lines().nth(1).unwrap().split(',').nth(1), Some("1"));
}

#[test]
fn aliases_match_subcommands() {
    let d = fixtures_dir();
    let fam = path(&d, "unit_family.json");
    let a = run(["fpp-lab", "extract", "run", &fam, "--depth", "6"]);
    let b = run(["fpp-lab", "extract-run", &fam, "--depth", "6"]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a, b);
    let x = write(&d, "x.json", r#"{"prefix":{"2":"3"},"limit":"-1"}"#);
    let a = run(["fpp-lab", "quotient", "example31", &x]);
    let b = run(["fpp-lab", "quotient-example31", &x]);
    assert_eq!(a, b);
    assert_eq!(json(&a.stdout)["image"]["quotient"]["value"], "3");
}

#[test]
fn seed_sources_agree() {
    let d = fixtures_dir();
    let f = path(&d, "example22.json");
    let flag = run(["fpp-lab", "witness", "build", &f, "--seed", "11"]);
    std::env::set_var("FPP_LAB_SEED", "11");
    let env = run(["fpp-lab", "witness", "build", &f]);
    std::env::remove_var("FPP_LAB_SEED");
    assert_eq!(flag.code, 0);
    assert_eq!(flag, env);
}

#[test]
fn fixture_files_are_stable() {
    let a = fixtures_dir();
    let b = fixtures_dir();
    for name in ["example22.json", "example31.json", "c_like.json", "f_eps.json", "unit_family.json", "c_projection.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(name)).unwrap());
    }
    let f_eps = std::fs::read_to_string(a.path().join("f_eps.json")).unwrap();
    assert_eq!(json(&f_eps), json(r#"{"finite": {"1": "2/3", "2": "-1/3"}}"#));
}

#[test]
fn projection_command() {
    let d = fixtures_dir();
    let x = write(&d, "x.json", r#"{"prefix":{"1":"5","2":"-3"},"limit":"1"}"#);
    let out = run(["fpp-lab", "project", &path(&d, "c_projection.json"), &x]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(json(&out.stdout)["px"], json(r#"{"prefix":{"2":"-3"},"limit":"1"}"#));
}
