use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fused(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fused"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("stdout is JSON")
}

fn temp_file(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("fused-cli-{}-{name}", std::process::id()))
}

#[test]
fn canon_prints_stable_canonical_json() {
    let first = fused(&["canon", "s1 s1 s1"]);
    let second = fused(&["canon", "s1 s1 s1"]);
    assert_eq!(code(&first), 0);
    assert_eq!(stdout(&first), stdout(&second));
    let value = json(&first);
    assert_eq!(value["n"], 1);
    assert_eq!(value["beta"], "");
    assert_eq!(value["lambda"], serde_json::json!([[0]]));
}

#[test]
fn equiv_answers_with_exit_codes() {
    let same = fused(&["equiv", "s1 s1 s1", "s1 S2 s1 S2"]);
    assert_eq!(code(&same), 0);
    assert_eq!(stdout(&same).trim(), "equivalent");

    let different = fused(&["equiv", "s1 s1", "n=2"]);
    assert_eq!(code(&different), 1);
    assert_eq!(stdout(&different).trim(), "inequivalent");
}

#[test]
fn virtual_words_are_refused_with_exit_2() {
    let refused = fused(&["equiv", "s1 t1 S1 t1", "n=2"]);
    assert_eq!(code(&refused), 2);
    assert!(stderr(&refused).contains("virtual crossing"));

    let canon = fused(&["canon", "t1"]);
    assert_eq!(code(&canon), 2);

    let reduce = fused(&["reduce", "s1 t2"]);
    assert_eq!(code(&reduce), 2);
}

#[test]
fn invariants_describe_any_word() {
    let hopf = fused(&["invariants", "s1 s1"]);
    assert_eq!(code(&hopf), 0);
    let value = json(&hopf);
    assert_eq!(value["classical"], true);
    assert_eq!(value["pure"], true);
    assert_eq!(value["components"], 2);
    assert_eq!(value["lambda"], serde_json::json!([[0, 1], [1, 0]]));

    let virtual_word = fused(&["invariants", "t1"]);
    assert_eq!(code(&virtual_word), 0);
    let value = json(&virtual_word);
    assert_eq!(value["classical"], false);
    assert_eq!(value["components"], 1);
    assert!(value.get("lambda").is_none());
}

#[test]
fn reduce_emits_a_verifiable_certificate() {
    let path = temp_file("cert.json");
    let reduced = fused(&[
        "reduce",
        "s1 s2 s3",
        "--certificate",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&reduced), 0);
    assert_eq!(json(&reduced)["n"], 1);

    let verified = fused(&["verify-cert", path.to_str().unwrap()]);
    assert_eq!(code(&verified), 0);
    let value = json(&verified);
    assert_eq!(value["valid"], true);
    assert!(value["steps"].as_u64().unwrap() > 0);

    let mut cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    cert["output"] = serde_json::json!("s1");
    fs::write(&path, serde_json::to_string(&cert).unwrap()).unwrap();
    let rejected = fused(&["verify-cert", path.to_str().unwrap()]);
    assert_eq!(code(&rejected), 1);
    let value = json(&rejected);
    assert_eq!(value["valid"], false);
    assert!(value["step"].is_number());
    assert!(value["reason"].is_string());

    fs::remove_file(&path).ok();
}

#[test]
fn reduce_without_a_path_prints_both_parts() {
    let out = fused(&["reduce", "s1 s1 s1"]);
    assert_eq!(code(&out), 0);
    let value = json(&out);
    assert_eq!(value["canonical"]["n"], 1);
    assert!(value["certificate"]["steps"].as_array().unwrap().len() >= 3);
}

#[test]
fn bfs_prints_traces_and_reports_misses() {
    let found = fused(&["bfs", "s1 s2 s1", "s2 s1 s2"]);
    assert_eq!(code(&found), 0);
    let value = json(&found);
    assert_eq!(value["start"], "s1 s2 s1");
    assert!(!value["moves"].as_array().unwrap().is_empty());

    let missed = fused(&["bfs", "s1", "S1"]);
    assert_eq!(code(&missed), 1);
    assert_eq!(stdout(&missed).trim(), "not found");
}

#[test]
fn words_load_from_files_with_the_at_prefix() {
    let path = temp_file("word.txt");
    fs::write(&path, "s1 s1\n").unwrap();
    let arg = format!("@{}", path.display());
    let out = fused(&["canon", &arg]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["n"], 2);
    fs::remove_file(&path).ok();

    let missing = fused(&["canon", "@/definitely/not/here.txt"]);
    assert_eq!(code(&missing), 65);
}

#[test]
fn parse_errors_exit_65() {
    assert_eq!(code(&fused(&["canon", "s0"])), 65);
    assert_eq!(code(&fused(&["canon", "x7"])), 65);
    assert_eq!(code(&fused(&["equiv", "s1", "n=0"])), 65);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&fused(&[])), 64);
    assert_eq!(code(&fused(&["nonsense"])), 64);
    assert_eq!(code(&fused(&["canon"])), 64);
    assert_eq!(code(&fused(&["canon", "s1", "--bogus"])), 64);
}

#[test]
fn random_test_is_reproducible_and_reports_its_seed() {
    let first = fused(&["random-test", "--seed", "7", "--iterations", "3"]);
    let second = fused(&["random-test", "--seed", "7", "--iterations", "3"]);
    assert_eq!(code(&first), 0);
    assert_eq!(stdout(&first), stdout(&second));
    let value = json(&first);
    assert_eq!(value["seed"], 7);
    assert_eq!(value["violations"], serde_json::json!([]));
}

#[test]
fn lemma_suite_passes_from_the_command_line() {
    let out = fused(&["lemmas", "--max-strands", "3"]);
    assert_eq!(code(&out), 0);
    let value = json(&out);
    assert!(value["report"]["checked"].as_u64().unwrap() > 0);
    assert_eq!(value["report"]["failures"], serde_json::json!([]));
}
