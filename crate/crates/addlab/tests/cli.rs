use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn addlab(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_addlab"));
    cmd.args(args).env_remove("ADDLAB_THREADS");
    if let Some(t) = threads {
        cmd.env("ADDLAB_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn doubling_of_a_progression() {
    let dir = TempDir::new().unwrap();
    let ap4 = write(&dir, "ap4.txt", "group z:1\n0\n1\n2\n3\n");
    let o = addlab(&["doubling", "--set", s(&ap4)], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("7/4"));
    let j = json(&addlab(&["doubling", "--set", s(&ap4), "--json"], None));
    assert_eq!(j["outputs"]["doubling"], "7/4");
    assert_eq!(j["command"], "doubling");
    assert_eq!(j["inputs"]["files"]["set"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(addlab(&["estar", "--set", "/nonexistent/missing.txt"], None).status.code(), Some(2));
    assert_eq!(addlab(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(addlab(&[], None).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "group z:1\n1,2\n");
    assert_eq!(addlab(&["doubling", "--set", s(&bad)], None).status.code(), Some(2));
    let one = write(&dir, "one.txt", "group z:1\n5\n");
    assert_eq!(addlab(&["estar", "--set", s(&one)], None).status.code(), Some(2));
    assert_eq!(addlab(&["doubling", "--set", s(&one)], Some("zero")).status.code(), Some(2));
    assert_eq!(addlab(&["--help"], None).status.code(), Some(0));
}

#[test]
fn energies() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "group z:1\n0\n1\n2\n");
    let o = addlab(&["energy", "--set-a", s(&a), "--set-b", s(&a), "--json"], None);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    assert_eq!(j["outputs"]["energy2"], 19);
    assert!(j["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    let b = write(&dir, "b.txt", "group z:1\n0\n1\n");
    let args = ["energy", "--set-a", s(&b), "--set-b", s(&b), "--four", "--set-c", s(&b), "--set-d", s(&b), "--json"];
    assert_eq!(json(&addlab(&args, None))["outputs"]["energy4"], 6);
    let f = write(&dir, "f.txt", "group fp:5:2\n0,0\n");
    assert_eq!(addlab(&["energy", "--set-a", s(&a), "--set-b", s(&f)], None).status.code(), Some(2));
}

#[test]
fn sumset_file_round_trips() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "group fp:5:2\n# a line\n0,1\n1,0\n");
    let out = dir.path().join("sum.txt");
    let o = addlab(&["sumset", "--set-a", s(&a), "--out", s(&out), "--json"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["outputs"]["size"], 3);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text, "group fp:5:2\n0,2\n1,1\n2,0\n");
    let again = dir.path().join("again.txt");
    let b = write(&dir, "zero.txt", "group fp:5:2\n0,0\n");
    addlab(&["sumset", "--set-a", s(&out), "--set-b", s(&b), "--out", s(&again)], None);
    assert_eq!(fs::read_to_string(&again).unwrap(), text);
}

#[test]
fn partition_quantities() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "group z:1\n0\n1\n2\n");
    let j = json(&addlab(&["estar", "--set", s(&a), "--json"], None));
    assert_eq!(j["outputs"]["estar"]["value"], "2/3");
    assert_eq!(j["outputs"]["estar"]["mode"], "exact");
    let j = json(&addlab(&["estar", "--set", s(&a), "--budget", "5", "--seed", "3", "--json"], None));
    assert_eq!(j["outputs"]["estar"]["mode"], "heuristic-lower-bound");
    let b = write(&dir, "b.txt", "group z:1\n0\n1\n");
    let j = json(&addlab(&["et", "--set", s(&b), "--t", "2", "--json"], None));
    assert_eq!(j["outputs"]["et"]["value"], "4/3");
    assert_eq!(addlab(&["et", "--set", s(&b), "--t", "1/2"], None).status.code(), Some(2));
    let wide =
        write(&dir, "wide.txt", &(0..30).fold("group z:1\n".to_string(), |acc, i| acc + &format!("{}\n", i * i)));
    assert_eq!(addlab(&["estar", "--set", s(&wide)], None).status.code(), Some(2));
    assert_eq!(addlab(&["estar", "--set", s(&wide), "--budget", "2"], None).status.code(), Some(0));
}

#[test]
fn procedures_certify() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "group z:1\n0\n1\n2\n3\n4\n5\n6\n7\n");
    let b = write(&dir, "b.txt", "group z:1\n0\n1\n");
    let j = json(&addlab(&["schoen", "--set-a", s(&a), "--set-b", s(&b), "--json"], None));
    assert_eq!(j["outputs"]["k"], "16/15");
    assert_eq!(j["outputs"]["translates"], serde_json::json!(["0", "2"]));
    assert_eq!(addlab(&["cover", "--set", s(&a), "--subset", s(&b)], None).status.code(), Some(0));
    let c = write(&dir, "c.txt", "group z:1\n0\n1\n100\n");
    let o = addlab(&["saturate", "--set", s(&c), "--subset", s(&b), "--t", "4", "--json"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["outputs"]["z"]["elements"], serde_json::json!([]));
    let far = write(&dir, "far.txt", "group z:1\n50\n");
    assert_eq!(addlab(&["cover", "--set", s(&a), "--subset", s(&far)], None).status.code(), Some(2));
}

#[test]
fn construct_writes_set_and_plan() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("desk.txt");
    let args = ["construct", "--p", "3", "--k", "2", "--m", "8", "--a", "6", "--out", s(&out), "--validate", "--json"];
    let o = addlab(&args, None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&o);
    assert_eq!(j["outputs"]["size"], 11);
    assert_eq!(j["outputs"]["sumset_size"], 27);
    assert_eq!(j["outputs"]["doubling"], "27/11");
    let plan: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("desk.txt.plan.json")).unwrap()).unwrap();
    assert_eq!(plan["parts"].as_array().unwrap().len(), 2);
    let d = addlab(&["doubling", "--set", s(&out)], None);
    assert_eq!(stdout(&d).lines().next(), Some("27/11"));
    assert_eq!(addlab(&["construct", "--p", "4", "--k", "2", "--m", "15", "--a", "6"], None).status.code(), Some(2));
}

#[test]
fn decomposition_round_trip() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "blocks.txt", "group z:1\n0\n1\n2\n100\n101\n102\n");
    let o = addlab(&["decompose", "--set", s(&a), "--epsilon", "1/4", "--omega", "1/4", "--json"], None);
    assert_eq!(o.status.code(), Some(0));
    let result = write(&dir, "result.json", &stdout(&o));
    let v = addlab(&["verify-decomposition", "--set", s(&a), "--result", s(&result), "--json"], None);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    assert!(json(&v)["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "structured.0" && c["status"] == "pass"));

    // overlapping parts
    let mut doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    doc["outputs"]["parts"] = serde_json::json!([
        { "group": "z:1", "elements": ["0", "1", "2", "100"] },
        { "group": "z:1", "elements": ["100", "101", "102"] }
    ]);
    doc["outputs"]["parts_status"] = serde_json::json!(["certified-exact", "certified-exact"]);
    let bad = write(&dir, "bad.json", &doc.to_string());
    assert_eq!(addlab(&["verify-decomposition", "--set", s(&a), "--result", s(&bad)], None).status.code(), Some(1));

    let junk = write(&dir, "junk.json", "{}");
    assert_eq!(addlab(&["verify-decomposition", "--set", s(&a), "--result", s(&junk)], None).status.code(), Some(2));
    let eps = addlab(&["decompose", "--set", s(&a), "--epsilon", "1/2", "--omega", "1/4"], None);
    assert_eq!(eps.status.code(), Some(2));
}

#[test]
fn verify_suite_and_mutation_hook() {
    let o = addlab(&["verify-suite", "--seed", "7", "--trials", "100"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let bad = addlab(&["verify-suite", "--trials", "3", "--corrupt-energy", "--json"], None);
    assert_eq!(bad.status.code(), Some(1));
    assert!(json(&bad)["outputs"]["failures"]["energy2.oracle"]["fast"].is_number());
    assert_eq!(addlab(&["verify-suite", "--trials", "0"], None).status.code(), Some(2));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let text = [0, 1, 3, 4, 9, 10, 12, 20, 21, 25, 30, 33, 40, 41, 47, 50]
        .iter()
        .fold("group z:1\n".to_string(), |acc, v| acc + &format!("{v}\n"));
    let a = write(&dir, "a.txt", &text);
    let args = ["estar", "--set", s(&a), "--json"];
    let one = addlab(&args, Some("1"));
    let eight = addlab(&args, Some("8"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, eight.stdout);
    let timed = json(&addlab(&["estar", "--set", s(&a), "--json", "--timing"], None));
    assert!(timed["timing"]["elapsed_ms"].is_number());
}
