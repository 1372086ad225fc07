use std::fs;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_levelcross"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn chessboard_from_file_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("board.json");
    fs::write(&input, r#"{"n":2,"k":2,"d":1,"values":[[1],[2],[2],[1]]}"#).unwrap();
    let svg = dir.path().join("board.svg");
    let o = run(&[
        "chessboard",
        "--input",
        input.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(doc["kind"], "chessboard");
    assert_eq!(doc["cells"].as_array().unwrap().len(), 2);
    roxmltree::Document::parse(&fs::read_to_string(svg).unwrap()).unwrap();
}

#[test]
fn random_chessboard_is_reproducible() {
    let args = ["chessboard", "--random", "3", "--n", "3", "--k", "4"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn solve_discrete_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("l.json");
    fs::write(
        &input,
        r#"{"n":2,"k":3,"d":1,"values":[[1],[1],[2],[1],[2],[2],[2],[3],[3]]}"#,
    )
    .unwrap();
    let out = dir.path().join("w.json");
    let o = run(&[
        "solve-discrete",
        "--input",
        input.to_str().unwrap(),
        "--m",
        "1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["kind"], "discrete");
    assert!(doc["bound"].as_u64().unwrap() >= doc["p"].as_array().unwrap().len() as u64);
}

#[test]
fn invalid_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(&input, r#"{"n":2,"k":2,"d":1,"values":[[0],[5],[0],[0]]}"#).unwrap();
    let o = run(&[
        "solve-discrete",
        "--input",
        input.to_str().unwrap(),
        "--m",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("violates"));

    fs::write(&input, r#"{"n":2,"k":2,"d":1,"values":[[1]],"x":1}"#).unwrap();
    let o = run(&["chessboard", "--input", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));

    assert_eq!(
        run(&["chessboard", "--input", "/nonexistent/file.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["levelset", "--fn", "nope"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn levelset_reports_certificate() {
    let o = run(&[
        "levelset",
        "--fn",
        "linear",
        "--n",
        "2",
        "--epsilon",
        "0.4",
        "--steps",
        "2",
    ]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 2);
    for line in &lines {
        let doc: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(doc["kind"], "continuous");
    }
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("certified sup"));
    assert!(err.contains("step 0"));
}

#[test]
fn levelset_from_piecewise_spec() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("f.json");
    fs::write(
        &spec,
        r#"{"n":2,"pieces":[{"lo":[0,0],"hi":[1,1],"outputs":[[[1,1,0],[-0.5,0,0]]]}]}"#,
    )
    .unwrap();
    let o = run(&[
        "levelset",
        "--spec",
        spec.to_str().unwrap(),
        "--epsilon",
        "0.3",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!((doc["p"][0].as_f64().unwrap()).abs() < 0.3);
    let again = run(&[
        "levelset",
        "--fn",
        spec.to_str().unwrap(),
        "--epsilon",
        "0.3",
    ]);
    assert_eq!(again.stdout, o.stdout);
}

#[test]
fn color_prints_grid_and_json() {
    let o = run(&["color", "--n", "2", "--m", "1", "--box", "-2..2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[..5]
        .iter()
        .all(|l| l.len() == 5 && l.chars().all(|c| ('1'..='3').contains(&c))));
    let doc: serde_json::Value = serde_json::from_str(lines[5]).unwrap();
    assert_eq!(doc["rows_top_down"].as_array().unwrap().len(), 5);
    assert_eq!(
        run(&["color", "--n", "2", "--m", "1", "--box", "3..1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn constants_small_enumeration() {
    let o = run(&["constants", "--k", "2", "--m", "0", "--radius", "1"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(doc["enumerated"], doc["verified"]);
    assert!(doc["counterexample"].is_null());
    let o = run(&[
        "constants",
        "--k",
        "5",
        "--m",
        "3",
        "--radius",
        "50",
        "--budget",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_subset() {
    let o = run(&["verify", "--only", "6"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("[PASS]"));
}
