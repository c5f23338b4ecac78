use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clement-lab"))
        .args(args)
        .output()
        .expect("failed to run binary")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["gen", "--n", "3"]).status.code(), Some(0));
    assert_eq!(run(&["gen", "--n", "3", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["gen", "--n", "3", "--special-a", "1", "--b", "1"])
            .status
            .code(),
        Some(2)
    );
    let o = run(&["gen", "--n", "2", "--a", "-2", "--b", "0", "--symmetric"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("non-positive product"));
    assert_eq!(
        run(&["solve", "--matrix", "/nonexistent/m.txt"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn gen_then_solve_from_file() {
    let dir = std::env::temp_dir().join(format!("clement-lab-it-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("h.txt");
    let o = run(&[
        "gen",
        "--n",
        "11",
        "--special-a",
        "-6",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let from_file = run(&["solve", "--matrix", path.to_str().unwrap()]);
    let direct = run(&["solve", "--n", "11", "--a", "-6", "--b", "-6"]);
    assert_eq!(from_file.stdout, direct.stdout);
    let text = stdout(&direct);
    assert_eq!(text.lines().count(), 13);
    assert!(text.lines().last().unwrap().contains("converged=true"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sweep_grid_size() {
    let o = run(&[
        "sweep",
        "--n",
        "101",
        "--family",
        "special-a",
        "--a-range",
        "-10:5:0.25",
        "--solver",
        "unsymmetric",
        "--no-timing",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 62);
    assert_eq!(
        text.lines().next().unwrap(),
        "n,a,b,solver,balance,rel_error,max_imag,converged,runtime_ms"
    );
}

#[test]
fn verify_recurrence_suite() {
    let o = run(&["verify", "--suite", "recurrence", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS recurrence.lemma"));
}
