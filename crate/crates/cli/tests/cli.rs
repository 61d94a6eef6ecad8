use std::path::Path;
use std::process::{Command, Output};

use morphosyn_core::toy;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morphosyn"))
        .args(args)
        .output()
        .unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn hebma_then_joint() {
    let dir = tempfile::tempdir().unwrap();
    let (raw, ma) = (path(dir.path(), "in.txt"), path(dir.path(), "in.lattice"));
    std::fs::write(&raw, "hbn\n/snm\nb.sl\n\n").unwrap();
    assert!(run(&["hebma", "-raw", &raw, "-out", &ma]).status.success());
    assert_eq!(std::fs::read_to_string(&ma).unwrap(), toy::GOLDEN_LATTICE);

    let (os, om, oc) = (
        path(dir.path(), "o.seg"),
        path(dir.path(), "o.map"),
        path(dir.path(), "o.conll"),
    );
    assert!(
        run(&["joint", "-in", &ma, "-os", &os, "-om", &om, "-oc", &oc])
            .status
            .success()
    );
    let seg = std::fs::read_to_string(&os).unwrap();
    assert_eq!(seg.lines().filter(|l| l.is_empty()).count(), 1);
    let conll = std::fs::read_to_string(&oc).unwrap();
    assert_eq!(
        conll
            .lines()
            .filter(|l| l.split('\t').nth(7) == Some("ROOT"))
            .count(),
        1
    );
    let ma_rows = std::fs::read_to_string(&ma).unwrap();
    let ma_rows: Vec<&str> = ma_rows.lines().collect();
    assert!(std::fs::read_to_string(&om)
        .unwrap()
        .lines()
        .all(|l| ma_rows.contains(&l)));
}

#[test]
fn empty_input_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let (raw, ma) = (path(dir.path(), "in.txt"), path(dir.path(), "in.lattice"));
    std::fs::write(&raw, "").unwrap();
    assert!(run(&["hebma", "-raw", &raw, "-out", &ma]).status.success());
    assert_eq!(std::fs::read_to_string(&ma).unwrap(), "");
}

#[test]
fn exit_codes() {
    let usage = run(&["hebma", "-raw", "x.txt"]);
    assert_eq!(usage.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let lattice = path(dir.path(), "in.lattice");
    std::fs::write(&lattice, toy::GOLDEN_LATTICE).unwrap();
    let out = |n| path(dir.path(), n);
    let missing = run(&[
        "joint",
        "-in",
        &lattice,
        "-model",
        &out("nope.model"),
        "-os",
        &out("a"),
        "-om",
        &out("b"),
        "-oc",
        &out("c"),
    ]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("model not found"));
    assert!(!dir.path().join("a").exists());

    let raw = out("crlf.txt");
    std::fs::write(&raw, "hbn\r\n\r\n").unwrap();
    let bad = run(&["hebma", "-raw", &raw, "-out", &out("x")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("CRLF"));
}

#[test]
fn train_reproduces_the_bundled_model() {
    let dir = tempfile::tempdir().unwrap();
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/toy");
    let d = |n: &str| data.join(n).to_str().unwrap().to_string();
    let model = path(dir.path(), "m.model");
    let o = run(&[
        "train",
        "-train",
        &d("train.conll"),
        "-md",
        &d("train.md"),
        "-lattice",
        &d("train.ma"),
        "-out",
        &model,
        "-epochs",
        "50",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("epoch\tupdates\t"));
    assert_eq!(std::fs::read_to_string(&model).unwrap(), toy::DEFAULT_MODEL);
}
