use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gl3perm"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn eval_examples() {
    for (args, expected) in [
        (["eval", "9", "3"], "21730032\n"),
        (["eval", "6", "0"], "0\n"),
        (["eval", "13", "0"], "739964160\n"),
        (["eval", "9", "-6"], "21730032\n"),
    ] {
        let out = run(&args);
        assert!(out.status.success());
        assert_eq!(stdout(&out), expected, "{args:?}");
    }
    let out = run(&["eval", "6", "1", "--format", "json"]);
    assert_eq!(stdout(&out), "{\"g\":665280,\"n\":6,\"x\":1}\n");
}

#[test]
fn oracle_examples() {
    assert_eq!(stdout(&run(&["oracle", "3", "--x", "0"])), "3312\n");
    assert_eq!(stdout(&run(&["oracle", "7", "--x", "0"])), "4653936\n");
    let csv = stdout(&run(&[
        "oracle",
        "9",
        "--classes",
        "--x",
        "0",
        "--format",
        "csv",
    ]));
    assert_eq!(
        csv,
        "x,g(n,x),g(n,x,1,1),g(n,x,1,2),g(n,x,1,3),g(n,x,2,1),g(n,x,2,2)\n0,21730032,14486688,3779136,629856,2519424,314928\n"
    );
}

#[test]
fn tables() {
    let out = run(&[
        "table",
        "--section",
        "4.2",
        "--p-list",
        "3",
        "--format",
        "csv",
    ]);
    assert_eq!(
        stdout(&out),
        "n,g(n,0),g(n,0,1,1),g(n,0,1,2),g(n,0,1,3),g(n,0,2,1),g(n,0,2,2)\n3,3312,2208,576,96,384,48\n"
    );

    let out = run(&[
        "table",
        "--section",
        "4-cases",
        "--p-list",
        "5",
        "--oracle",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 7);
    let sum: u64 = rows
        .iter()
        .map(|r| r.split(',').nth(4).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(sum, 288_000);
    assert!(rows.iter().all(|r| r.ends_with(",agree")));
}

#[test]
fn exit_codes() {
    let out = run(&["oracle", "17"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bound of 16"));

    assert_eq!(run(&["eval", "9"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "0", "1"]).status.code(), Some(2));
    assert_eq!(run(&["oracle", "6", "--classes"]).status.code(), Some(2));
    assert_eq!(run(&["table", "--section", "nope"]).status.code(), Some(2));
    assert_eq!(
        run(&["table", "--section", "cases", "--p-list", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_quick_and_negative_control() {
    let good = run(&["verify", "--profile", "quick", "--format", "json"]);
    assert_eq!(good.status.code(), Some(0));
    let bad = run(&[
        "verify",
        "--profile",
        "quick",
        "--format",
        "json",
        "--inject-fault",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let failing: Vec<String> = stdout(&bad)
        .lines()
        .filter(|l| l.contains("\"status\":\"fail\""))
        .map(String::from)
        .collect();
    assert_eq!(
        failing,
        ["{\"check_id\":\"closed_vs_oracle\",\"params\":{\"n\":3,\"x\":0},\"expected\":3313,\"actual\":3312,\"status\":\"fail\"}"]
    );
}
