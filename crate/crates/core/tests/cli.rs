use std::path::Path;
use std::process::{Command, Output};

use losekit::games::chsh_game;
use losekit::io::GameFile;

fn losekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_losekit"))
        .args(args)
        .env_remove("LOSEKIT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn zoo_list_names_every_channel() {
    let o = losekit(&["zoo", "list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for name in ["pr", "phhh", "shsa", "bgnp", "dfp", "bennett"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{} missing", name);
    }
}

#[test]
fn show_check_and_score_the_pr_box() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "pr.json");
    assert_eq!(losekit(&["zoo", "show", "pr", "--out", &file]).status.code(), Some(0));
    let check = losekit(&["check", &file]);
    assert_eq!(check.status.code(), Some(0), "{}", stdout(&check));
    assert!(!stdout(&check).contains("FAIL"));
    let score = losekit(&["score", "chsh", &file]);
    assert_eq!(score.status.code(), Some(0));
    assert_eq!(stdout(&score).trim(), "4.000000000000");
}

#[test]
fn dfp_fails_ppt_check() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "dfp.json");
    assert_eq!(losekit(&["zoo", "show", "dfp", "--param", "alpha=1/6", "--out", &file]).status.code(), Some(0));
    let o = losekit(&["check", &file, "--ppt"]);
    assert_eq!(o.status.code(), Some(1));
    let line = stdout(&o).lines().find(|l| l.starts_with("ppt")).unwrap().to_string();
    assert!(line.contains("FAIL") && line.contains("-8."), "{}", line);
    assert_eq!(losekit(&["check", &file, "--cptp", "--nonsignaling"]).status.code(), Some(0));
}

#[test]
fn bennett_is_written_but_reported() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "bennett.json");
    let o = losekit(&["zoo", "show", "bennett", "--out", &file]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("signaling"));
    assert!(Path::new(&file).exists());
    assert_eq!(losekit(&["check", &file, "--nonsignaling"]).status.code(), Some(1));
}

#[test]
fn convert_is_deterministic_and_type_checked() {
    let dir = tempfile::tempdir().unwrap();
    let (f1, f2) = (path(dir.path(), "a.json"), path(dir.path(), "b.json"));
    for f in [&f1, &f2] {
        assert_eq!(losekit(&["convert", "pr", "pr_to_phhh", "--out", f]).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&f1).unwrap(), std::fs::read(&f2).unwrap());
    // PHHH has quantum outputs, so it is not a CHSH strategy
    let o = losekit(&["score", "chsh", &f1]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("type mismatch"));

    let boxed = path(dir.path(), "box.json");
    assert_eq!(losekit(&["convert", &f1, "dephase", "--out", &boxed]).status.code(), Some(0));
    assert_eq!(stdout(&losekit(&["score", "chsh", &boxed])).trim(), "4.000000000000");
}

#[test]
fn out_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_losekit"))
        .args(["zoo", "show", "shsa"])
        .env("LOSEKIT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("shsa.json").exists());
    assert!(stdout(&o).is_empty());
}

#[test]
fn games_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let game = path(dir.path(), "chsh.json");
    GameFile { game: chsh_game(), metadata: Default::default() }
        .write(Path::new(&game))
        .unwrap();
    let o = losekit(&["lhv", &game]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2");
    assert_eq!(stdout(&losekit(&["lhv", "chsh"])).trim(), "2");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(losekit(&["zoo", "show", "nope"]).status.code(), Some(2));
    assert_eq!(losekit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(losekit(&["convert", "pr", "nope"]).status.code(), Some(2));
    assert_eq!(losekit(&["lhv", "/no/such/game.json"]).status.code(), Some(2));
    assert_eq!(losekit(&["--tol", "abc", "zoo", "list"]).status.code(), Some(2));
}

#[test]
fn tolerance_flag_is_global() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "phhh.json");
    assert_eq!(losekit(&["zoo", "show", "phhh", "--out", &file]).status.code(), Some(0));
    assert_eq!(losekit(&["check", &file, "--tol", "1e-12"]).status.code(), Some(0));
    // a negative tolerance rejects even exact channels
    assert_eq!(losekit(&["--tol=-1", "check", &file, "--cptp"]).status.code(), Some(1));
}

#[test]
fn verify_paper_with_untwisted_basis() {
    let o = losekit(&["verify-paper", "--ub", "identity", "--seed", "7"]);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with('[')).count(), 14);
    let line9 = text.lines().find(|l| l.starts_with("[ 9]")).unwrap();
    assert!(line9.contains("twisted consistent"), "{}", line9);
    // the eigenstate check expects a violation, so this run cannot pass
    assert_eq!(o.status.code(), Some(1));
}
