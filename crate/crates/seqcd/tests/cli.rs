//! End-to-end tests of the command-line driver: exit-code contract,
//! machine-readable output, trace round trips, and corpus stability.

use seqcd::surface::{parse_program, print_program};
use seqcd::syntax::alpha_eq_command;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_seqcd")
}

fn corpus(sub: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(sub)
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(bin()).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn misaligned_command_fails_naming_the_cut_rule() {
    let f = corpus("bad").join("misaligned.cd");
    let (code, _, err) = run_cli(&["check", f.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("[Cut]"), "error must name the Cut rule: {err}");
    // machine-readable diagnostics
    let (code, out, _) = run_cli(&["check", f.to_str().unwrap(), "--json"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v[0]["ok"], false);
    assert_eq!(v[0]["rule"], "Cut");
}

#[test]
fn exit_codes_cover_the_contract() {
    // 0: well-typed corpus file checks and runs
    let f = corpus("typed").join("sums_basic.cd");
    assert_eq!(run_cli(&["check", f.to_str().unwrap()]).0, 0);
    assert_eq!(run_cli(&["run", f.to_str().unwrap()]).0, 0);
    // 3: timeout on the loop
    let loopf = corpus("disc").join("loop_selfapp.cd");
    assert_eq!(
        run_cli(&[
            "run",
            loopf.to_str().unwrap(),
            "--entry",
            "loop",
            "--fuel",
            "50"
        ])
        .0,
        3
    );
    // 1: typed check rejects the loop, discipline-only accepts it
    assert_eq!(run_cli(&["check", loopf.to_str().unwrap()]).0, 1);
    assert_eq!(
        run_cli(&["check", loopf.to_str().unwrap(), "--discipline-only"]).0,
        0
    );
    // the fixed-point combinator: discipline-only accepts, typed rejects,
    // and bounded runs time out
    let fixf = corpus("slow").join("fix_combinator.cd");
    assert_eq!(
        run_cli(&["check", fixf.to_str().unwrap(), "--discipline-only"]).0,
        0
    );
    assert_eq!(run_cli(&["check", fixf.to_str().unwrap()]).0, 1);
    assert_eq!(
        run_cli(&[
            "run",
            fixf.to_str().unwrap(),
            "--entry",
            "diverge",
            "--fuel",
            "60"
        ])
        .0,
        3
    );
    // 2: a stuck command
    let dir = tempdir();
    let stuck = dir.join("stuck.cd");
    std::fs::write(
        &stuck,
        "cmd main (|- out : One : v) = < Inl(Unit) | Sum One One : v | case { Inr(y) => < y | One : v | out > } > ;\n",
    )
    .unwrap();
    assert_eq!(run_cli(&["run", stuck.to_str().unwrap()]).0, 2);
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("seqcd-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn trace_commands_reparse() {
    let f = corpus("disc").join("need_iexample.cd");
    let (code, out, _) = run_cli(&["run", f.to_str().unwrap(), "--trace"]);
    assert_eq!(code, 0);
    let src = std::fs::read_to_string(&f).unwrap();
    let prog = parse_program(&src).unwrap();
    let mut steps = 0;
    for line in out.lines() {
        let v: serde_json::Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if let Some(cmd) = v.get("command").and_then(|c| c.as_str()) {
            seqcd::surface::parse_command_with(cmd, &prog.declarations)
                .unwrap_or_else(|e| panic!("trace step does not reparse: {e}\n{cmd}"));
            steps += 1;
        }
    }
    assert_eq!(steps, 6, "expected the six golden steps in the trace");
}

#[test]
fn corpus_print_parse_round_trip() {
    for sub in ["typed", "disc"] {
        let dir = corpus(sub);
        for entry in std::fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.extension().map_or(true, |x| x != "cd") {
                continue;
            }
            let src = std::fs::read_to_string(&p).unwrap();
            let prog1 = parse_program(&src).unwrap();
            let printed = print_program(&prog1);
            let prog2 = parse_program(&printed)
                .unwrap_or_else(|e| panic!("{}: reprint does not parse: {e}\n{printed}", p.display()));
            assert_eq!(prog1.commands.len(), prog2.commands.len());
            for (a, b) in prog1.commands.iter().zip(&prog2.commands) {
                assert!(
                    alpha_eq_command(&a.body, &b.body),
                    "{}: entry {} changed across print/parse",
                    p.display(),
                    a.name
                );
            }
            // and printing is a fixed point from the first reprint on
            let printed2 = print_program(&prog2);
            assert_eq!(printed, printed2, "{}: printing is not stable", p.display());
        }
    }
}

#[test]
fn compile_stages_produce_checkable_output() {
    let dir = tempdir();
    let f = corpus("typed").join("either3.cd");
    let lift = dir.join("either3.lift.cd");
    let core = dir.join("either3.core.cd");
    assert_eq!(
        run_cli(&[
            "compile",
            f.to_str().unwrap(),
            "--stage",
            "lift",
            "-o",
            lift.to_str().unwrap()
        ])
        .0,
        0
    );
    assert_eq!(
        run_cli(&[
            "compile",
            f.to_str().unwrap(),
            "--stage",
            "core",
            "-o",
            core.to_str().unwrap()
        ])
        .0,
        0
    );
    assert_eq!(run_cli(&["check", lift.to_str().unwrap()]).0, 0);
    assert_eq!(run_cli(&["check", core.to_str().unwrap()]).0, 0);
    // core output mentions no declared connectives
    let text = std::fs::read_to_string(&core).unwrap();
    assert!(!text.contains("Either3"));
    assert!(!text.contains("E1"));
    // and it still runs to the same observable
    assert_eq!(run_cli(&["run", core.to_str().unwrap()]).0, 0);
}

#[test]
fn diffrun_and_isotest_succeed() {
    let f = corpus("typed").join("fun_apply.cd");
    assert_eq!(run_cli(&["diffrun", f.to_str().unwrap()]).0, 0);
    let (code, out, _) = run_cli(&["isotest", "--laws", "plus-comm"]);
    assert_eq!(code, 0);
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 4);
    assert!(out.lines().any(|l| l.contains("A->B->A")));
    assert!(out.lines().any(|l| l.contains("B->A->B")));
}

#[test]
fn polarize_emits_checkable_programs_and_matching_runs() {
    let dir = tempdir();
    let f = corpus("lmtm").join("i_example.lmtm");
    let out = dir.join("i_need.cd");
    let (code, _, _) = run_cli(&[
        "polarize",
        f.to_str().unwrap(),
        "--strategy",
        "need",
        "--scheme",
        "generic",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        run_cli(&["check", out.to_str().unwrap(), "--discipline-only"]).0,
        0
    );
    let (code, stdout, _) = run_cli(&[
        "polarize",
        f.to_str().unwrap(),
        "--strategy",
        "need",
        "--run",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("equal"), "{stdout}");
}
