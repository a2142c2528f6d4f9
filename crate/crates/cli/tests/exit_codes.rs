use std::process::{Command, Output};

fn zastava(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zastava")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn compute_term_count_and_validation() {
    let out = zastava(&["compute", "--pi", "1,1", "--cap", "3", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["terms"].as_array().unwrap().len(), 4);
    let out = zastava(&["compute", "--pi", "2,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parts must be weakly increasing"));
}

#[test]
fn csv_uses_dash_keys() {
    let out = zastava(&["compute", "--pi", "1,1,1", "--cap", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,value");
    assert!(lines[1].starts_with("0-0,1"));
    assert_eq!(lines.len(), 7);
}

#[test]
fn verify_examples() {
    let ok = zastava(&["verify", "--pi", "1,2", "--cap", "2", "--checks", "relations,shapovalov,whittaker,sl2"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = zastava(&["verify", "--checks", "relations", "--mutate", "b"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stdout_json(&bad)["checks"][0]["detail"]["witness"]["relation"], "b");
    assert_eq!(zastava(&["verify", "--checks", "sl2", "--pi", "1,1", "--cap", "5"]).status.code(), Some(0));
    assert_eq!(zastava(&["verify", "--checks", "nonsense"]).status.code(), Some(2));
}

#[test]
fn virasoro_examples() {
    let out = zastava(&["virasoro", "--a", "0", "--eps1", "1", "--eps2", "-1", "--cap", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate Gram at level 1"));

    let out = zastava(&["virasoro", "--delta", "3/8", "--c", "-2", "--cap", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["levels"].as_array().unwrap().len(), 4);

    let out = zastava(&["virasoro", "--a", "1", "--eps1", "1", "--eps2", "-1", "--cap", "1"]);
    let v = stdout_json(&out);
    let norms: Vec<&str> = v["levels"].as_array().unwrap().iter().map(|l| l["norm"].as_str().unwrap()).collect();
    assert_eq!(norms, ["1", "1/2"]);
    assert_eq!(v["dictionary"]["agrees"], true);

    assert_eq!(zastava(&["virasoro", "--delta", "1", "--c", "2", "--a", "1"]).status.code(), Some(2));
    assert_eq!(zastava(&["virasoro", "--cap", "2"]).status.code(), Some(2));
}

#[test]
fn agt_dict_and_threads() {
    let out = zastava(&["agt-dict", "--a", "0", "--eps1", "1", "--eps2", "-1"]);
    let v = stdout_json(&out);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(v["dictionary"]["chi"], "-1");
    assert_eq!(v["dictionary"]["k"], "-1");
    let bad = Command::new(env!("CARGO_BIN_EXE_zastava"))
        .args(["compute"])
        .env("ZASTAVA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
