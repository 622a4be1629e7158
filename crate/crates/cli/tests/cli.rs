// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const CLI: &str = env!("CARGO_BIN_EXE_mqclass");
const FIXTURE: &str = env!("CARGO_BIN_EXE_mqclass-fixture-responder");
const KURODA: &str = env!("CARGO_BIN_EXE_mqclass-kuroda-responder");

fn mq(dir: &Path, args: &[&str]) -> Output {
    Command::new(CLI).arg("--data-dir").arg(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ask(bin: &str, input: &str) -> String {
    let mut child = Command::new(bin).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    String::from_utf8(child.wait_with_output().unwrap().stdout).unwrap()
}

#[test]
fn census_levels() {
    let dir = tempfile::tempdir().unwrap();
    let o = mq(dir.path(), &["census", "--bound", "4", "--max-level", "0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "Q_0: 2");
    assert_eq!(stdout(&mq(dir.path(), &["census", "--bound", "700", "--max-level", "0"])).trim(), "Q_0: 9");
    let o = mq(dir.path(), &["census", "--bound", "2000", "--max-level", "1"]);
    assert!(stdout(&o).contains("Q_1: 18"), "{}", stdout(&o));
    assert!(dir.path().join("census.tsv").exists() && dir.path().join("levels.txt").exists());
}

#[test]
fn bound_floor() {
    let dir = tempfile::tempdir().unwrap();
    let floors: Vec<String> = ["5", "6", "7", "8", "9"]
        .iter()
        .map(|n| stdout(&mq(dir.path(), &["bound", "--n", n])).trim().to_string())
        .collect();
    assert_eq!(floors, ["0", "7", "37", "99", "222"]);
}

#[test]
fn missing_oracle_then_resume() {
    let dir = tempfile::tempdir().unwrap();
    let o = mq(dir.path(), &["--m", "0", "run"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(dir.path().join("n3/pending.tsv").exists());
    assert!(!dir.path().join("n3/fields.tsv").exists());
    let o = mq(dir.path(), &["--m", "0", "--oracle-cmd", KURODA, "segment", "--n", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("fields: 17"));
    let o = mq(dir.path(), &["--m", "0", "verify", "--table", "feaver"]);
    assert!(o.status.success(), "{}", stdout(&o));
    // answers were cached, so the segment reruns without a responder
    let o = mq(dir.path(), &["--m", "0", "segment", "--n", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn run_with_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, format!("# m = 0 run\nm = 0\noracle_cmd = {KURODA}\n")).unwrap();
    let o = Command::new(CLI).arg("--config").arg(&cfg).arg("--data-dir").arg(dir.path().join("d")).arg("run").output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().last(), Some("n=2:47 n=3:17 n=4:0"));
    let summary = std::fs::read_to_string(dir.path().join("d/summary.txt")).unwrap();
    assert!(summary.contains("n=2:47 n=3:17 n=4:0"));
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let o = Command::new(CLI).arg("--config").arg(&cfg).arg("bound").arg("--n").arg("3").output().unwrap();
    assert!(o.status.success(), "bound does not read the config");
    let o = Command::new(CLI).arg("--config").arg(&cfg).arg("census").output().unwrap();
    assert!(!o.status.success());
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = mq(dir.path(), &["verify", "--table", "brown-parry"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("MISMATCH"));
    let o = mq(dir.path(), &["verify", "--table", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
    let o = mq(dir.path(), &["--m", "0", "--bound", "2000", "--max-level", "1", "biquad"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("fields: 47"));
    let o = mq(dir.path(), &["--bound", "2000", "--max-level", "1", "verify", "--table", "brown-parry"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn io_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "x").unwrap();
    let o = mq(&file, &["census", "--bound", "4", "--max-level", "0"]);
    assert_eq!(o.status.code(), Some(4));
    let d = dir.path().join("d");
    std::fs::create_dir_all(d.join("n2")).unwrap();
    std::fs::write(d.join("census.tsv"), "not a census\n").unwrap();
    let o = mq(&d, &["census"]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn responders_speak_the_protocol() {
    assert_eq!(ask(FIXTURE, "-1 2 3\n-1 2 3 5\n\n-1 2 7\n").lines().collect::<Vec<_>>()[..2], ["1", "2"]);
    assert!(ask(FIXTURE, "-1 2 7\n").starts_with("ERR"));
    assert!(ask(FIXTURE, "x y\n").starts_with("ERR"));
    assert_eq!(ask(KURODA, "-1 2 3 5\n-5 -7 -11\n").lines().collect::<Vec<_>>(), ["2", "8"]);
    assert!(ask(KURODA, "2 3 5\n").starts_with("ERR"));
    assert!(ask(KURODA, "-1 2 -2\n").starts_with("ERR"));
}
