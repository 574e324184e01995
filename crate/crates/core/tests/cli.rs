use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};

use hytw::cli::run;

static N: AtomicU64 = AtomicU64::new(0);

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir =
        std::env::temp_dir().join(format!("hytw-cli-{}-{}", std::process::id(), N.fetch_add(1, Ordering::Relaxed)));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn hytw_in(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut argv = vec!["hytw"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn hytw(args: &[&str]) -> (i32, String, String) {
    hytw_in(args, "")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn leaf_only_tree() {
    let g = scratch("g.tree", ".\n");
    let (code, out, _) = hytw(&["solve", "--game", s(&g)]);
    assert_eq!(code, 0);
    assert!(out.contains("winner: II") && out.contains("rank: 0"), "{out}");
}

#[test]
fn normalize_with_trace() {
    let t = scratch("t.term", "((lam (f (-> 0 0)) (f 3)) (lam (y 0) (succ y)))\n");
    let (code, out, _) = hytw(&["--format", "machine", "normalize", s(&t), "--trace"]);
    assert_eq!(code, 0);
    assert!(out.contains("normal 0 4\n") && out.contains("steps 0 3\n"), "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("step 0 ")).count(), 3);
}

#[test]
fn seed_is_echoed_first() {
    let t = scratch("t.term", "(+ 1 2)\n");
    for (fmt, first) in [("machine", "seed 41"), ("human", "seed: 41")] {
        let (_, out, _) = hytw(&["--seed", "41", "--format", fmt, "typecheck", s(&t)]);
        assert_eq!(out.lines().next(), Some(first));
    }
    let (_, out, _) = hytw(&["--seed", "41", "parse", s(&t)]);
    assert!(out.starts_with("; seed 41\n"));
}

#[test]
fn insufficient_headroom_is_a_domain_error() {
    let q = scratch("q.cond", ". inf inf\n0 3 inf\n");
    let (code, _, err) = hytw(&["retag", "--p", s(&q), "--q", s(&q), "--r", s(&q), "--alpha", "4", "--gamma", "3"]);
    assert_eq!(code, 1);
    assert!(err.contains("InsufficientHeadroom"), "{err}");
}

#[test]
fn retag_output_is_a_condition() {
    let p = scratch("p.cond", ". inf inf\n0 w+1 inf\n");
    let r = scratch("r.cond", ". inf inf\n0 w+1 inf\n0.0 w+1 5\n0.0.0 2 5\n");
    let (code, out, err) = hytw(&["retag", "--p", s(&p), "--q", s(&p), "--r", s(&r), "--alpha", "w*2", "--gamma", "1"]);
    assert_eq!(code, 0, "{err}");
    let body: String = out.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let c = scratch("out.cond", &body);
    assert_eq!(hytw(&["check-condition", s(&c)]).0, 0);
}

#[test]
fn bad_condition_exits_one() {
    let c = scratch("c.cond", ". 5 0\n");
    let (code, out, err) = hytw(&["check-condition", s(&c)]);
    assert_eq!(code, 1);
    assert!(out.contains("violation") && err.contains("InvalidCondition"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hytw(&["frobnicate"]).0, 2);
    assert_eq!(hytw(&["solve", "--rule", "X", "--alpha", "w"]).0, 2);
    assert_eq!(hytw(&["solve", "--rule", "G", "--alpha", "w+"]).0, 2);
    assert_eq!(hytw(&["eval", "/nonexistent/file"]).0, 2);
    assert_eq!(hytw(&["--budget", "0", "kb", "--game", "x"]).0, 2);
    assert_eq!(hytw(&["selftest", "--only", "9"]).0, 2);
    assert_eq!(hytw(&["play", "--rule", "G", "--alpha", "w", "--horizon", "0", "--moves", "1"]).0, 2);
}

#[test]
fn budget_exceeded_exits_one() {
    let g = scratch("g.tree", "0\n1\n0 0\n");
    let (code, _, err) = hytw(&["--budget", "2", "solve", "--game", s(&g)]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: BudgetExceeded"), "{err}");
}

#[test]
fn help_names_format_and_module() {
    for cmd in [
        "parse",
        "typecheck",
        "normalize",
        "eval",
        "lower",
        "solve",
        "rank",
        "kb",
        "retag",
        "project",
        "check-condition",
        "play",
        "selftest",
    ] {
        let (code, out, _) = hytw(&[cmd, "--help"]);
        assert_eq!(code, 0);
        assert!(out.starts_with('['), "{cmd}: {out}");
        if cmd != "selftest" {
            assert!(out.contains("Input"), "{cmd}: {out}");
        }
    }
}

#[test]
fn copy_engine_wins_g3() {
    let tr = std::env::temp_dir().join(format!("hytw-g3-{}.txt", std::process::id()));
    let (code, out, _) =
        hytw(&["play", "--rule", "G", "--alpha", "3", "--full", "--moves", "2,1,0", "--transcript", s(&tr)]);
    assert_eq!(code, 0);
    assert!(out.contains("no winner yet"), "{out}");
    // the script is spent after 0; interactively I is then stuck
    let (code, out, _) = hytw_in(&["play", "--rule", "G", "--alpha", "3", "--full", "--interactive"], "2\n1\n0\n");
    assert_eq!(code, 0);
    let moves: Vec<&str> = out.lines().filter(|l| l.contains(" plays ")).collect();
    assert_eq!(moves, ["I plays 2", "II plays 2", "I plays 1", "II plays 1", "I plays 0", "II plays 0"]);
    assert!(out.contains("II wins: I has no legal move"), "{out}");
    let _ = std::fs::remove_file(tr);
}

#[test]
fn illegal_move_reprompts_and_eof_resigns() {
    let (code, out, _) = hytw_in(&["play", "--rule", "G", "--alpha", "w", "--interactive"], "w\nw+3\n7\n");
    assert_eq!(code, 0);
    assert_eq!(out.matches("IllegalMove").count(), 2, "{out}");
    assert!(out.contains("I plays 7") && out.contains("II plays 7"));
    assert!(out.contains("II wins: I resigned"));
}

#[test]
fn restarts_are_announced_and_replay_is_verbatim() {
    let tr = std::env::temp_dir().join(format!("hytw-o-{}.txt", std::process::id()));
    let base = ["play", "--rule", "O", "--alpha", "w*2"];
    let mut a = base.to_vec();
    a.extend(["--moves", "w+1,5,w", "--transcript", s(&tr)]);
    assert_eq!(hytw(&a).0, 0);
    let saved = std::fs::read_to_string(&tr).unwrap();
    assert_eq!(saved, "I w+1 restart\nII w+1\nI 5\nII 5\nI w restart\nII w\nresult none script ended\n");
    let mut b = base.to_vec();
    b.extend(["--replay", s(&tr)]);
    let (code, out, _) = hytw(&b);
    assert_eq!(code, 0);
    assert!(out.contains("replay: identical"));
    std::fs::write(&tr, saved.replace("II 5", "II 4")).unwrap();
    assert_eq!(hytw(&b).0, 1);
    let _ = std::fs::remove_file(tr);
}

#[test]
fn machine_output_is_deterministic() {
    hytw::cli::determinism_check(3).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_hytw");
    let g = scratch("g.tree", ".\n0\n");
    let ok = Command::new(bin).args(["--format", "machine", "solve", "--game", s(&g)]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "seed 0\nwinner I\nrank 1\nstrategy . -> 0\n");
    let bad = Command::new(bin).args(["solve"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let env = Command::new(bin).env("HYTW_BUDGET", "1").args(["solve", "--game", s(&g)]).output().unwrap();
    assert_eq!(env.status.code(), Some(1));
}
