//! Recorded outputs that must not drift. Set `LIMITLEARN_BLESS=1` to rewrite
//! the reorder file after an intended change.

use std::path::{Path, PathBuf};

use limitlearn::presentation::{fair_text, reorder_to_informant, take_prefix};
use limitlearn::{Character, Fin};

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

#[test]
fn reorder_matches_golden_file() {
    let c = Character::listed(&[(2, Fin(2)), (3, Fin(1))]).with_omega_count(Fin(1));
    let text = take_prefix(&mut fair_text(&c, 3).unwrap(), 60).unwrap();
    let got = reorder_to_informant(&text).to_trace();
    let path = golden().join("reorder.txt");
    if std::env::var_os("LIMITLEARN_BLESS").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(got, want);
}

#[test]
fn recorded_runs_replay_byte_for_byte() {
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(golden().join("runs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    dirs.sort();
    assert!(dirs.len() >= 5);
    for dir in dirs {
        let code = limitlearn::cli::run(["limitlearn", "replay", dir.to_str().unwrap()]);
        assert_eq!(code, 0, "{} drifted", dir.display());
    }
}
