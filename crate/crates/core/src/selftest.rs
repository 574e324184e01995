//! The acceptance suites as library functions, shared by `hytw selftest`
//! and the `acceptance` test target. Each returns a one-line report.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::{diag_real, even_row, Evaluator, Fuel, Functional2, Oracle1, ParamEnv, Value, DEFAULT_FUEL};
use crate::games::{
    bar_recursion, safety_table, simulate_copy, solve, strategy_from_labels, synthesize_strategy, verify_winning,
    ExplicitTree, OrdinalGame, Player, RuleKind, Shape, Slice, DEFAULT_NODE_BUDGET,
};
use crate::gen::{default_signature, TermGen};
use crate::lower::{helpers, lower_closed, purity_violations};
use crate::normalize::{canonicalize, check_normal_structure, normalize_with, Options, Strategy};
use crate::ordinal::{parse_ordinal, print_ordinal, Ordinal, Tag};
use crate::tagged::{
    extend_randomly, extends, is_condition, parse_condition, print_condition, project, random_condition,
    random_instance, retag, retag_equiv, violations, Condition,
};
use crate::term::{parse_term, print_term, Type};

#[derive(Clone, Debug)]
pub struct Config {
    pub seed: u64,
    pub jobs: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { seed: 0, jobs: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub id: u8,
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.elapsed <= self.limit
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} {}: {} ({} cases, {} failures, {:.1}s of {}s)",
            self.id,
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.cases,
            self.failures,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        )?;
        if let Some(m) = &self.first_failure {
            write!(f, "; first failure: {m}")?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Tally {
    cases: u64,
    failures: u64,
    first: Option<(u64, String)>,
}

impl Tally {
    fn record(&mut self, i: u64, r: Result<(), String>) {
        self.cases += 1;
        if let Err(m) = r {
            self.failures += 1;
            if self.first.as_ref().is_none_or(|(j, _)| i < *j) {
                self.first = Some((i, m));
            }
        }
    }

    fn merge(&mut self, o: Tally) {
        self.cases += o.cases;
        self.failures += o.failures;
        if let Some((i, m)) = o.first {
            if self.first.as_ref().is_none_or(|(j, _)| i < *j) {
                self.first = Some((i, m));
            }
        }
    }
}

/// Runs `f` on `0..n`, worker `w` taking the indices congruent to `w`.
fn run_indexed(jobs: usize, n: u64, f: &(dyn Fn(u64) -> Result<(), String> + Sync)) -> Tally {
    let jobs = jobs.max(1) as u64;
    let total = Mutex::new(Tally::default());
    std::thread::scope(|s| {
        for w in 0..jobs {
            let total = &total;
            s.spawn(move || {
                let mut t = Tally::default();
                let mut i = w;
                while i < n {
                    t.record(i, f(i));
                    i += jobs;
                }
                total.lock().expect("no poisoning").merge(t);
            });
        }
    });
    total.into_inner().expect("no poisoning")
}

/// Independent stream per (criterion, instance), so results do not depend
/// on the number of workers.
fn rng_for(seed: u64, crit: u64, i: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream((crit << 48) | i);
    r
}

fn report(id: u8, name: &'static str, t: Tally, start: Instant, limit_s: u64) -> Report {
    Report {
        id,
        name,
        cases: t.cases,
        failures: t.failures,
        first_failure: t.first.map(|(i, m)| format!("#{i}: {m}")),
        elapsed: start.elapsed(),
        limit: Duration::from_secs(limit_s),
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Random terms normalize, both strategies agree, normal forms of
/// standard type have the structural properties.
pub fn normalization(cfg: &Config) -> Report {
    let start = Instant::now();
    let sig = default_signature();
    let t = run_indexed(cfg.jobs, 2000, &|i| {
        let mut rng = rng_for(cfg.seed, 1, i);
        let ty = TermGen::random_type(&mut rng);
        let size = rng.random_range(1..=60);
        let term = TermGen::new(&sig).term(&mut rng, &ty, size);
        let run = |strategy| {
            normalize_with(&term, Options { strategy, budget: 1_000_000, record: false })
                .map_err(|e| format!("{e}: {term}"))
        };
        let (a, _) = run(Strategy::LeftmostOutermost)?;
        let (b, _) = run(Strategy::RightmostInnermost)?;
        check(canonicalize(&a) == canonicalize(&b), || format!("strategies disagree on {term}"))?;
        let rep = check_normal_structure(&a).map_err(|e| e.to_string())?;
        let v = rep.violations(&ty);
        check(v.is_empty(), || format!("{v:?} in normal form {a} of {term}"))
    });
    report(1, "normalization", t, start, 60)
}

fn random_prefix(rng: &mut ChaCha8Rng, len: usize, max: u64) -> Vec<u64> {
    (0..len).map(|_| rng.random_range(0..=max)).collect()
}

/// Lowered type-2 terms denote the same functional as the originals.
pub fn lowering(cfg: &Config) -> Report {
    let start = Instant::now();
    let sig = default_signature();
    let t = run_indexed(cfg.jobs, 500, &|i| {
        let mut rng = rng_for(cfg.seed, 2, i);
        let size = rng.random_range(1..=40);
        let term = TermGen::new(&sig).term(&mut rng, &Type::two(), size);
        let low = lower_closed(&term, &sig).map_err(|e| format!("{e}: {term}"))?;
        let impure = purity_violations(&low.code().code);
        check(impure.is_empty(), || format!("nonstandard subterms {impure:?} in lowering of {term}"))?;
        for _ in 0..20 {
            let mut env = ParamEnv::new();
            env.insert("n".into(), Value::Nat(rng.random_range(0..5)));
            env.insert("m".into(), Value::Nat(rng.random_range(0..5)));
            env.insert("r".into(), Value::Stream(Oracle1::table(random_prefix(&mut rng, 10, 5), 1)));
            let (a, b) = (rng.random_range(0..4u64), rng.random_range(0..4u64));
            env.insert(
                "G".into(),
                Value::Functional(Functional2::new("G", move |s| Ok(s.at(a)?.wrapping_add(s.at(b)?)))),
            );
            let c = rng.random_range(1..6u64);
            env.insert(
                "H".into(),
                Value::Functional(Functional2::new("H", move |s| Ok(s.at(s.at(0)? % 5)?.wrapping_mul(c)))),
            );
            let f = Oracle1::table(random_prefix(&mut rng, 10, 5), 0);
            let ev = Evaluator::new(env, Fuel::new(DEFAULT_FUEL));
            let x = ev.eval(&term).and_then(|v| v.to_functional()?.apply(&f));
            ev.fuel().reset();
            let y = low.value(&ev).and_then(|v| v.to_functional()?.apply(&f));
            match (x, y) {
                (Ok(x), Ok(y)) if x == y => {}
                (x, y) => return Err(format!("{x:?} vs {y:?} for {term}")),
            }
        }
        Ok(())
    });
    report(2, "lowering", t, start, 120)
}

/// A stream with a random table and its plain-vector twin.
fn random_stream(rng: &mut ChaCha8Rng) -> (Oracle1, impl Fn(u64) -> u64 + Clone) {
    let table = random_prefix(rng, 120, 9);
    let default = rng.random_range(0..10);
    let direct = table.clone();
    (Oracle1::table(table, default), move |i: u64| direct.get(i as usize).copied().unwrap_or(default))
}

/// A continuous functional and a direct evaluation of it on plain
/// functions.
type DirectF = Box<dyn Fn(&dyn Fn(u64) -> u64) -> u64>;

fn random_functional(rng: &mut ChaCha8Rng) -> (Functional2, DirectF) {
    let (a, b) = (rng.random_range(0..6u64), rng.random_range(0..6u64));
    let c = rng.random_range(1..5u64);
    match rng.random_range(0..5) {
        0 => (Functional2::constant(c), Box::new(move |_| c)),
        1 => (Functional2::new("s(a)+s(b)", move |s| Ok(s.at(a)? + s.at(b)?)), Box::new(move |s| s(a) + s(b))),
        2 => (Functional2::new("s(s(0)%c)", move |s| s.at(s.at(0)? % c)), Box::new(move |s| s(s(0) % c))),
        3 => {
            (Functional2::new("c*s(a)+s(b)", move |s| Ok(c * s.at(a)? + s.at(b)?)), Box::new(move |s| c * s(a) + s(b)))
        }
        _ => (
            Functional2::new("sum", move |s| (1..=s.at(0)? % 5).map(|i| s.at(i)).sum()),
            Box::new(move |s| (1..=s(0) % 5).map(s).sum()),
        ),
    }
}

fn eval_functional(t: &crate::term::Term) -> Result<Functional2, String> {
    let ev = Evaluator::new(ParamEnv::new(), Fuel::new(DEFAULT_FUEL));
    ev.eval(t).and_then(|v| v.to_functional()).map_err(|e| e.to_string())
}

fn pointwise(
    what: &str,
    got: impl Fn(u64) -> Result<u64, crate::eval::EvalError>,
    want: impl Fn(u64) -> u64,
) -> Result<(), String> {
    for i in 0..50 {
        let g = got(i).map_err(|e| format!("{what} at {i}: {e}"))?;
        check(g == want(i), || format!("{what} at {i}: {g} != {}", want(i)))?;
    }
    Ok(())
}

/// Defining equations of ⌢ and *, the diagonal and even-row constructions,
/// and the shift and rearranger laws.
pub fn coding_laws(cfg: &Config) -> Report {
    let start = Instant::now();
    let t = run_indexed(cfg.jobs, 500, &|i| {
        let mut rng = rng_for(cfg.seed, 3, i);
        let (r, rd) = random_stream(&mut rng);
        let k = rng.random_range(0..20u64);
        let kr = Oracle1::concat(k, &r);
        check(kr.at(0) == Ok(k), || "(k^r)(0) != k".into())?;
        pointwise("(k^r)(n+1)", |n| kr.at(n + 1), &rd)?;

        let (f, fd) = random_functional(&mut rng);
        let star = Oracle1::star(&f, &r);
        pointwise("(F*r)(k)", |k| star.at(k), |k| fd(&|n| if n == 0 { k } else { rd(n - 1) }))?;

        let diag = diag_real(&f);
        pointwise("diagonal real", |n| diag.at(n), |n| fd(&|_| n))?;

        let g = even_row(&f);
        let got = g.apply(&r).map_err(|e| e.to_string())?;
        let want = fd(&|j| rd(2 * j));
        check(got == want, || format!("even row: {got} != {want}"))?;

        let n = rng.random_range(0..=6u64);
        let pn = helpers::shift(n);
        let pn_term = eval_functional(&helpers::shift_term(n))?;
        pointwise("P_n", |j| Oracle1::star(&pn, &r).at(j), |j| rd(n + j))?;
        pointwise("P_n term", |j| Oracle1::star(&pn_term, &r).at(j), |j| rd(n + j))?;

        let len = rng.random_range(0..=6usize);
        let mut perm: Vec<u64> = (0..len as u64).collect();
        for a in (1..len).rev() {
            perm.swap(a, rng.random_range(0..=a));
        }
        let want = |j: u64| rd(perm.get(j as usize).copied().unwrap_or(j));
        let rp = helpers::permute(&perm);
        let rp_term = eval_functional(&helpers::permute_term(&perm))?;
        pointwise("R_pi", |j| Oracle1::star(&rp, &r).at(j), want)?;
        pointwise("R_pi term", |j| Oracle1::star(&rp_term, &r).at(j), want)
    });
    report(3, "coding laws", t, start, 30)
}

/// Independent minimax over a node list: `(mover wins, rank)` per node.
fn oracle_labels(nodes: &[Vec<u64>]) -> HashMap<Vec<u64>, (bool, u64)> {
    let mut kids: HashMap<&[u64], Vec<&Vec<u64>>> = HashMap::new();
    for n in nodes.iter().filter(|n| !n.is_empty()) {
        kids.entry(&n[..n.len() - 1]).or_default().push(n);
    }
    let mut by_len: Vec<&Vec<u64>> = nodes.iter().collect();
    by_len.sort_by_key(|n| std::cmp::Reverse(n.len()));
    let mut out: HashMap<Vec<u64>, (bool, u64)> = HashMap::new();
    for n in by_len {
        let cs = kids.get(n.as_slice()).map(Vec::as_slice).unwrap_or(&[]);
        let wins = cs.iter().any(|c| !out[*c].0);
        let rank = cs.iter().map(|c| out[*c].1 + 1).max().unwrap_or(0);
        out.insert(n.clone(), (wins, rank));
    }
    out
}

fn check_tree(t: &ExplicitTree) -> Result<(), String> {
    let e = |e: crate::games::GameError| e.to_string();
    let oracle = oracle_labels(t.nodes());
    let h = bar_recursion(t, DEFAULT_NODE_BUDGET).map_err(e)?;
    let table = safety_table(t, DEFAULT_NODE_BUDGET).map_err(e)?;
    for n in t.nodes() {
        let (wins, rank) = oracle[n];
        check(h[n] == u8::from(wins), || format!("h differs at {n:?}"))?;
        let (rk, safe) = &table[n];
        check(*rk == Ordinal::nat(rank), || format!("rank differs at {n:?}"))?;
        // I wins the padded residual game: at odd length II moves first
        let i_wins = if n.len() % 2 == 0 { wins } else { !wins };
        check(*safe == u8::from(i_wins), || format!("safety differs at {n:?}"))?;
    }
    let (w, strat) = synthesize_strategy(t, DEFAULT_NODE_BUDGET).map_err(e)?;
    let expected = if oracle[&Vec::new()].0 { Player::I } else { Player::II };
    check(w == expected, || format!("winner {w}, oracle says {expected}"))?;
    check(verify_winning(t, w, &strat, DEFAULT_NODE_BUDGET).map_err(e)?, || {
        format!("strategy for {w} loses on {:?}", t.nodes())
    })?;
    let other = strategy_from_labels(&solve(t, DEFAULT_NODE_BUDGET).map_err(e)?, w.other());
    check(!verify_winning(t, w.other(), &other, DEFAULT_NODE_BUDGET).map_err(e)?, || {
        format!("both players certified on {:?}", t.nodes())
    })
}

/// Number of trees in the exhaustive family.
pub fn exhaustive_family_size() -> u64 {
    Shape::count(3, 3) + Shape::count(4, 2)
}

/// Solver versus an independent minimax on every small tree and on random
/// trees.
pub fn game_solver(cfg: &Config) -> Report {
    let start = Instant::now();
    let jobs = cfg.jobs.max(1);
    let total = Mutex::new(Tally::default());
    std::thread::scope(|s| {
        for w in 0..jobs {
            let total = &total;
            s.spawn(move || {
                let mut t = Tally::default();
                let mut i = 0u64;
                for (depth, branching) in [(3, 3), (4, 2)] {
                    Shape::for_each(depth, branching, |shape| {
                        if i % jobs as u64 == w as u64 {
                            t.record(i, check_tree(&ExplicitTree::from_shape(shape)));
                        }
                        i += 1;
                    });
                }
                let base = i;
                let mut j = w as u64;
                while j < 1000 {
                    let mut rng = rng_for(cfg.seed, 4, j);
                    let tree = crate::games::random_tree(&mut rng, 300, 4);
                    t.record(base + j, check_tree(&tree));
                    j += jobs as u64;
                }
                total.lock().expect("no poisoning").merge(t);
            });
        }
    });
    report(4, "game solver", total.into_inner().expect("no poisoning"), start, 300)
}

fn ord(s: &str) -> Ordinal {
    parse_ordinal(s).expect("literal")
}

/// Copy strategy for II in `G_α` and `O_α`, and II winning the finite
/// games.
pub fn ordinal_games(_cfg: &Config) -> Report {
    let start = Instant::now();
    let mut t = Tally::default();
    let probes: Vec<Ordinal> = ["1", "2", "w", "w+1", "w*2", "w*2+1", "w^2"].iter().map(|s| ord(s)).collect();
    let mut i = 0;
    for alpha in ["5", "w", "w*2+3", "w^2"] {
        for kind in [RuleKind::G, RuleKind::O] {
            let slice = Slice::Probes { probes: probes.clone(), max_branching: 4 };
            let game = OrdinalGame::new(kind, ord(alpha), slice).expect("positive alpha");
            let r = simulate_copy(&game, 16);
            t.record(
                i,
                check(r.copy_wins() && r.plays() > 0, || {
                    format!("{kind}_{alpha}: copy fails at {:?}", r.failures.first())
                }),
            );
            i += 1;
            if kind == RuleKind::G {
                let won = solve(&game, DEFAULT_NODE_BUDGET).map(|l| l.winner());
                t.record(i, check(won == Ok(Player::II), || format!("sliced G_{alpha}: {won:?}")));
                i += 1;
            }
        }
    }
    let g5 = OrdinalGame::new(RuleKind::G, Ordinal::nat(5), Slice::Full).expect("positive alpha");
    let lab = solve(&g5, DEFAULT_NODE_BUDGET);
    t.record(i, check(lab.as_ref().map(|l| l.winner()) == Ok(Player::II), || "I wins G_5".into()));
    let copy_ok = verify_winning(&g5, Player::II, &crate::games::CopyStrategy, DEFAULT_NODE_BUDGET);
    t.record(i + 1, check(copy_ok == Ok(true), || "copy strategy loses G_5".into()));
    report(5, "ordinal games", t, start, 120)
}

/// A tag-by-tag variation of `p` that may or may not be an α-retagging.
fn vary(rng: &mut ChaCha8Rng, p: &Condition, alpha: &Ordinal) -> Condition {
    let mut out = p.clone();
    for (n, (a, b)) in p.iter() {
        let v = |t: &Tag, rng: &mut ChaCha8Rng| match rng.random_range(0..6) {
            0 => Tag::Inf,
            1 => Tag::Fin(alpha.add(&Ordinal::nat(rng.random_range(0..3)))),
            2 if rng.random_bool(0.3) => Tag::nat(rng.random_range(0..4)),
            _ => t.clone(),
        };
        let t = (v(a, rng), v(b, rng));
        let t = if n.is_empty() { (Tag::Inf, Tag::Inf) } else { t };
        out.insert(n.clone(), t);
    }
    out
}

/// Retagging conclusions, projection laws and ≈_α as an equivalence.
pub fn tagged_trees(cfg: &Config) -> Report {
    let start = Instant::now();
    let mut t = run_indexed(cfg.jobs, 10_000, &|i| {
        let mut rng = rng_for(cfg.seed, 6, i);
        let inst = random_instance(&mut rng, 14);
        let out = retag(&inst).map_err(|e| e.to_string())?;
        let v = violations(&out.r_hat);
        check(v.is_empty(), || format!("retag output not a condition: {v:?}"))?;
        check(extends(&out.r_hat, &inst.p), || "retag output does not extend p".into())?;
        check(retag_equiv(&out.r_hat, &inst.r, &out.gamma_tilde), || "retag output not equivalent to r".into())
    });
    let proj = run_indexed(cfg.jobs, 10_000, &|i| {
        let mut rng = rng_for(cfg.seed, 7, i);
        let ceiling = ord("w^3");
        let alpha = Ordinal::random(&mut rng, 2, 2, 4);
        let p = random_condition(&mut rng, 14, &ceiling);
        let extra = rng.random_range(0..8);
        let q = extend_randomly(&mut rng, &p, extra, &ceiling);
        let pa = project(&p, &alpha);
        check(is_condition(&pa), || "projection is not a condition".into())?;
        check(pa.tags().all(|t| t.is_inf() || t.below(&alpha)), || "projection has a tag at or above alpha".into())?;
        check(retag_equiv(&pa, &p, &alpha), || "projection is not an alpha-retagging".into())?;
        check(extends(&project(&q, &alpha), &pa), || "projection is not monotone".into())
    });
    let equiv = run_indexed(cfg.jobs, 1000, &|i| {
        let mut rng = rng_for(cfg.seed, 8, i);
        let alpha = ord(["3", "w", "w*2", "w^2"][rng.random_range(0..4)]);
        let p = random_condition(&mut rng, 10, &ord("w^2*2"));
        let q = if rng.random_bool(0.5) {
            project(&p, &alpha.add(&Ordinal::nat(rng.random_range(0..3))))
        } else {
            vary(&mut rng, &p, &alpha)
        };
        let r = if rng.random_bool(0.5) { project(&q, &alpha) } else { vary(&mut rng, &q, &alpha) };
        let e = |a: &Condition, b: &Condition| retag_equiv(a, b, &alpha);
        for x in [&p, &q, &r] {
            check(e(x, x), || "not reflexive".into())?;
        }
        for (x, y) in [(&p, &q), (&q, &r), (&p, &r)] {
            check(e(x, y) == e(y, x), || "not symmetric".into())?;
        }
        check(!(e(&p, &q) && e(&q, &r)) || e(&p, &r), || "not transitive".into())
    });
    t.merge(proj);
    t.merge(equiv);
    report(6, "tagged trees", t, start, 120)
}

/// Parse/print identities and byte-identical machine output.
pub fn round_trip(cfg: &Config) -> Report {
    let start = Instant::now();
    let sig = default_signature();
    let mut t = run_indexed(cfg.jobs, 1000, &|i| {
        let mut rng = rng_for(cfg.seed, 9, i);
        let ty = TermGen::random_type(&mut rng);
        let size = rng.random_range(1..=60);
        let term = TermGen::new(&sig).term(&mut rng, &ty, size);
        let text = print_term(&term);
        let back = parse_term(&text, &sig).map_err(|e| format!("{e}: {text}"))?;
        check(back == term, || format!("term changed: {text}"))?;
        check(print_term(&back) == text, || format!("reprint differs: {text}"))
    });
    let ords = run_indexed(cfg.jobs, 200, &|i| {
        let mut rng = rng_for(cfg.seed, 10, i);
        let o = Ordinal::random(&mut rng, 3, 4, 9);
        let text = print_ordinal(&o);
        let back = parse_ordinal(&text).map_err(|e| format!("{e}: {text}"))?;
        check(back == o && print_ordinal(&back) == text, || format!("ordinal changed: {text}"))
    });
    let conds = run_indexed(cfg.jobs, 200, &|i| {
        let mut rng = rng_for(cfg.seed, 11, i);
        let size = rng.random_range(1..=25);
        let c = random_condition(&mut rng, size, &ord("w^w"));
        let text = print_condition(&c);
        let back = parse_condition(&text).map_err(|e| format!("{e}: {text}"))?;
        check(back == c && print_condition(&back) == text, || format!("condition changed: {text}"))
    });
    t.merge(ords);
    t.merge(conds);
    let det = crate::cli::determinism_check(cfg.seed);
    t.record(u64::MAX, det);
    report(7, "round trip and determinism", t, start, 30)
}

pub type Criterion = fn(&Config) -> Report;

pub const CRITERIA: [(u8, &str, Criterion); 7] = [
    (1, "normalization", normalization),
    (2, "lowering", lowering),
    (3, "coding laws", coding_laws),
    (4, "game solver", game_solver),
    (5, "ordinal games", ordinal_games),
    (6, "tagged trees", tagged_trees),
    (7, "round trip and determinism", round_trip),
];

/// Runs the selected criteria (all when `only` is empty).
pub fn run(cfg: &Config, only: &[u8]) -> Vec<Report> {
    CRITERIA.iter().filter(|(id, _, _)| only.is_empty() || only.contains(id)).map(|(_, _, f)| f(cfg)).collect()
}
