//! The `hytw` command line. [`run`] is the whole program with its streams
//! passed in, so tests drive it in-process.

use std::fmt::Display;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::{parse_env, Evaluator, Fuel, Functional2, Oracle1, ParamEnv, Value, DEFAULT_FUEL};
use crate::games::{
    fmt_node, kleene_brouwer, parse_game, rank, safety_table, solve, strategy_from_labels, CopyStrategy, ExplicitTree,
    Game, OrdinalGame, Player, RuleKind, Slice, DEFAULT_NODE_BUDGET,
};
use crate::games::{print_game, random_tree};
use crate::gen::{default_signature, TermGen};
use crate::lower::{lower_closed, Lowered};
use crate::normalize::{canonicalize, format_trace, normalize_with, Options, Strategy, DEFAULT_STEP_BUDGET};
use crate::ordinal::{parse_ordinal, Ordinal};
use crate::selftest;
use crate::tagged::{
    fmt_path, parse_condition, print_condition, project, random_instance, retag, violations, Condition, RetagInstance,
};
use crate::term::{parse_file, print_file, print_term, type_of, Signature, TermFile, Type};

#[derive(Parser, Debug)]
#[command(name = "hytw", version, about = "Finite-type terms, continuous functionals, game solving and tagged trees")]
pub struct Cli {
    /// `human` for prose, `machine` for stable space-separated lines.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    /// Seed for every random choice; echoed in the output.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Step, fuel and node budget; overrides HYTW_BUDGET.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=1_000_000_000))]
    pub budget: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StrategyArg {
    Outermost,
    Innermost,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// [term_language] Parse a term file and print it canonically.
    /// Input: term file, `param NAME TYPE` headers then one S-expression per term.
    Parse { file: PathBuf },
    /// [term_language] Print the type of every term. Input: term file.
    Typecheck { file: PathBuf },
    /// [normalizer] Normal form and step count of every term. Input: term file.
    Normalize {
        file: PathBuf,
        /// Print one line per reduction step.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value_t = StrategyArg::Outermost)]
        strategy: StrategyArg,
    },
    /// [model_eval] Evaluate terms of type at most 2. Inputs: term file and an
    /// environment file of `NAME = N`, `NAME = prefix A B .. default D` or
    /// `NAME = term SEXPR` lines.
    Eval {
        file: PathBuf,
        #[arg(long)]
        env: Option<PathBuf>,
        /// Stream positions to print.
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(0..=100_000))]
        positions: u64,
    },
    /// [lowering] Code closed terms of type at most 2 as type-2 terms.
    /// Input: term file; output: term file of codes.
    Lower {
        file: PathBuf,
        /// Run this many differential tests per term against random parameters.
        #[arg(long, value_parser = clap::value_parser!(u64).range(0..=100_000))]
        check: Option<u64>,
    },
    /// [games] Winner, root rank and strategy table. Input: game file (one
    /// node per line as space-separated moves) or a rule game.
    Solve {
        #[command(flatten)]
        game: GameArgs,
        /// Also print rank, bar-recursion label and safety of every node.
        #[arg(long)]
        table: bool,
    },
    /// [games] Rank of the subtree below a node. Input: game file or rule game.
    Rank {
        #[command(flatten)]
        game: GameArgs,
        /// Space-separated moves; the root by default.
        #[arg(long, default_value = "")]
        node: String,
    },
    /// [games] Nodes in Kleene-Brouwer order. Input: game file.
    Kb {
        #[arg(long)]
        game: PathBuf,
    },
    /// [tagged_trees] Retag r to extend p. Inputs: condition files with
    /// `PATH TAG0 TAG1` lines, paths dot-separated, `.` for the root.
    Retag {
        /// Condition to extend.
        #[arg(long)]
        p: PathBuf,
        /// Condition alpha-equivalent to p.
        #[arg(long)]
        q: PathBuf,
        /// Extension of q to retag.
        #[arg(long)]
        r: PathBuf,
        /// Ordinal, e.g. "w*2".
        #[arg(long)]
        alpha: String,
        /// Ordinal below alpha; the result agrees with r below it.
        #[arg(long)]
        gamma: String,
    },
    /// [tagged_trees] The alpha-projection of a condition. Input: condition file.
    Project {
        file: PathBuf,
        /// Tags at or above this ordinal become inf.
        #[arg(long)]
        alpha: String,
    },
    /// [tagged_trees] List the violations of a condition. Input: condition file.
    CheckCondition { file: PathBuf },
    /// [games, cli] Play as player I against the engine. Input: game file or
    /// rule game; transcripts are `I MOVE` / `II MOVE` lines and a result line.
    Play {
        #[command(flatten)]
        game: GameArgs,
        /// Read moves from standard input, listing legal moves each turn.
        #[arg(long, conflicts_with_all = ["moves", "replay"])]
        interactive: bool,
        /// Comma-separated moves for player I.
        #[arg(long, conflicts_with = "replay")]
        moves: Option<String>,
        /// Replay a saved transcript and confirm it is reproduced.
        #[arg(long)]
        replay: Option<PathBuf>,
        /// Write the transcript here.
        #[arg(long)]
        transcript: Option<PathBuf>,
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..=10_000))]
        horizon: u64,
    },
    /// [cli] Run the acceptance suites and print one line per criterion.
    Selftest {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
        jobs: u64,
        /// Comma-separated criterion numbers; all by default.
        #[arg(long, default_value = "")]
        only: String,
    },
}

#[derive(Args, Debug, Clone)]
pub struct GameArgs {
    /// Game file.
    #[arg(long, conflicts_with = "rule")]
    pub game: Option<PathBuf>,
    /// Rule game `G` or `O`.
    #[arg(long, requires = "alpha")]
    pub rule: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    /// Comma-separated ordinals offered as moves, e.g. "0,1,w,w+1".
    #[arg(long, default_value = "0,1,w,w+1")]
    pub probes: String,
    /// Largest number of moves listed per node.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=64))]
    pub branching: u64,
    /// List every ordinal below the bound (finite alpha only).
    #[arg(long)]
    pub full: bool,
}

enum CliError {
    Usage(String),
    Domain(String),
}

fn domain(e: impl Display) -> CliError {
    CliError::Domain(e.to_string())
}

type Res<T> = Result<T, CliError>;

struct Out<'a> {
    w: &'a mut dyn Write,
    machine: bool,
}

impl Out<'_> {
    fn line(&mut self, s: impl Display) -> Res<()> {
        writeln!(self.w, "{s}").map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
    }

    /// `key value` in machine mode, `key: value` otherwise.
    fn kv(&mut self, key: &str, value: impl Display) -> Res<()> {
        if self.machine {
            self.line(format!("{key} {value}"))
        } else {
            self.line(format!("{key}: {value}"))
        }
    }
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Res<()> {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn ordinal_arg(name: &str, s: &str) -> Res<Ordinal> {
    parse_ordinal(s).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

fn budget(cli: &Cli) -> Res<Option<u64>> {
    if cli.budget.is_some() {
        return Ok(cli.budget);
    }
    match std::env::var("HYTW_BUDGET") {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(n) if (1..=1_000_000_000).contains(&n) => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("HYTW_BUDGET must be an integer in 1..=1000000000, got '{v}'"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs the program on `args` (including the program name) and returns the
/// exit code: 0 success, 1 domain error, 2 usage error.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    let mut o = Out { w: out, machine: cli.format == Format::Machine };
    match dispatch(&cli, input, &mut o) {
        Ok(code) => code,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "usage error: {m}");
            2
        }
        Err(CliError::Domain(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

fn dispatch(cli: &Cli, input: &mut dyn BufRead, o: &mut Out) -> Res<i32> {
    let budget = budget(cli)?;
    let seed = cli.seed;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match &cli.command {
        Command::Parse { file } => {
            let f = parse_file(&read(file)?).map_err(domain)?;
            o.line(format!("; seed {seed}"))?;
            o.line(print_file(&f).trim_end())?;
        }
        Command::Typecheck { file } => {
            let f = parse_file(&read(file)?).map_err(domain)?;
            o.kv("seed", seed)?;
            for (i, t) in f.terms.iter().enumerate() {
                o.kv(&format!("type {i}"), type_of(t, &f.sig).map_err(domain)?)?;
            }
        }
        Command::Normalize { file, trace, strategy } => {
            let f = parse_file(&read(file)?).map_err(domain)?;
            let strategy = match strategy {
                StrategyArg::Outermost => Strategy::LeftmostOutermost,
                StrategyArg::Innermost => Strategy::RightmostInnermost,
            };
            let opts = Options { strategy, budget: budget.unwrap_or(DEFAULT_STEP_BUDGET), record: *trace };
            o.kv("seed", seed)?;
            for (i, t) in f.terms.iter().enumerate() {
                let (nf, tr) = normalize_with(t, opts).map_err(domain)?;
                if *trace {
                    for l in format_trace(&tr).lines() {
                        o.kv(&format!("step {i}"), l)?;
                    }
                }
                o.kv(&format!("normal {i}"), print_term(&canonicalize(&nf)))?;
                o.kv(&format!("steps {i}"), tr.count)?;
            }
        }
        Command::Eval { file, env, positions } => {
            let f = parse_file(&read(file)?).map_err(domain)?;
            let fuel = Fuel::new(budget.unwrap_or(DEFAULT_FUEL));
            let penv = match env {
                Some(p) => parse_env(&read(p)?, &fuel).map_err(domain)?.1,
                None => ParamEnv::new(),
            };
            o.kv("seed", seed)?;
            for (i, t) in f.terms.iter().enumerate() {
                fuel.reset();
                let v = Evaluator::new(penv.clone(), fuel.clone()).eval(t).map_err(domain)?;
                match &v {
                    Value::Functional(g) => {
                        let (x, modulus) = g.apply_tracked(&Oracle1::constant(0)).map_err(domain)?;
                        let m: Vec<String> = modulus.iter().map(u64::to_string).collect();
                        o.kv(&format!("value {i}"), format!("F(0...) = {x}, queried {{{}}}", m.join(",")))?;
                    }
                    _ => o.kv(&format!("value {i}"), v.render(*positions).map_err(domain)?)?,
                }
            }
        }
        Command::Lower { file, check } => {
            let f = parse_file(&read(file)?).map_err(domain)?;
            return lower_cmd(&f, *check, budget, &mut rng, seed, o);
        }
        Command::Solve { game, table } => {
            let b = budget.unwrap_or(DEFAULT_NODE_BUDGET);
            o.kv("seed", seed)?;
            match load_game(game)? {
                Loaded::Tree(t) => solve_cmd(&t, b, *table, o)?,
                Loaded::Rule(g) => solve_cmd(&g, b, *table, o)?,
            }
        }
        Command::Rank { game, node } => {
            let b = budget.unwrap_or(DEFAULT_NODE_BUDGET);
            o.kv("seed", seed)?;
            let r = match load_game(game)? {
                Loaded::Tree(t) => rank(&t, &parse_moves::<u64>(node)?, b),
                Loaded::Rule(g) => rank(&g, &parse_moves::<Ordinal>(node)?, b),
            }
            .map_err(domain)?;
            o.kv("rank", r)?;
        }
        Command::Kb { game } => {
            let t = parse_game(&read(game)?).map_err(domain)?;
            o.kv("seed", seed)?;
            for (i, n) in kleene_brouwer(&t).iter().enumerate() {
                o.kv(&format!("kb {i}"), fmt_node(n))?;
            }
        }
        Command::Retag { p, q, r, alpha, gamma } => {
            let cond = |path: &PathBuf| parse_condition(&read(path)?).map_err(domain);
            let inst = RetagInstance {
                p: cond(p)?,
                q: cond(q)?,
                r: cond(r)?,
                alpha: ordinal_arg("alpha", alpha)?,
                gamma: ordinal_arg("gamma", gamma)?,
            };
            let out = retag(&inst).map_err(domain)?;
            o.line(format!("# seed {seed}"))?;
            o.line(format!("# gamma~ {}", out.gamma_tilde))?;
            for (s, rk) in &out.ranks {
                o.line(format!("# rank {} {rk}", fmt_path(s)))?;
            }
            o.line(print_condition(&out.r_hat).trim_end())?;
        }
        Command::Project { file, alpha } => {
            let c = parse_condition(&read(file)?).map_err(domain)?;
            let a = ordinal_arg("alpha", alpha)?;
            o.line(format!("# seed {seed}"))?;
            o.line(print_condition(&project(&c, &a)).trim_end())?;
        }
        Command::CheckCondition { file } => {
            let c = parse_condition(&read(file)?).map_err(domain)?;
            o.kv("seed", seed)?;
            let v = violations(&c);
            if v.is_empty() {
                o.kv("valid", c.len())?;
            } else {
                for x in &v {
                    o.kv("violation", x)?;
                }
                return Err(CliError::Domain(format!("InvalidCondition: {} violation(s)", v.len())));
            }
        }
        Command::Play { game, interactive, moves, replay, transcript, horizon } => {
            o.kv("seed", seed)?;
            let b = budget.unwrap_or(DEFAULT_NODE_BUDGET);
            let script = match (moves, replay) {
                (Some(m), _) => {
                    Script::Moves(m.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
                }
                (_, Some(p)) => Script::Replay(read(p)?),
                _ if *interactive => Script::Interactive,
                _ => return Err(CliError::Usage("play needs --interactive, --moves or --replay".into())),
            };
            let h = *horizon as usize;
            let text = match load_game(game)? {
                Loaded::Tree(t) => {
                    let lab = solve(&t, b).map_err(domain)?;
                    let engine = strategy_from_labels(&lab, Player::II);
                    play_session(&t, &engine, &|_, _| false, script.clone(), h, input, o)?
                }
                Loaded::Rule(g) => {
                    let restart = |pos: &[Ordinal], i: usize| g.is_restart(pos, i);
                    play_session(&g, &CopyStrategy, &restart, script.clone(), h, input, o)?
                }
            };
            if let Some(p) = transcript {
                write_file(p, &text)?;
            }
            if let Script::Replay(saved) = script {
                if saved != text {
                    return Err(CliError::Domain(
                        "ReplayMismatch: the replayed game differs from the transcript".into(),
                    ));
                }
                o.kv("replay", "identical")?;
            }
        }
        Command::Selftest { jobs, only } => {
            let only: Vec<u8> = only
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<u8>().ok().filter(|n| (1..=7).contains(n)))
                .collect::<Option<_>>()
                .ok_or_else(|| CliError::Usage("--only takes criterion numbers 1 to 7".into()))?;
            o.kv("seed", seed)?;
            let reports = selftest::run(&selftest::Config { seed, jobs: *jobs as usize }, &only);
            for r in &reports {
                o.line(r)?;
            }
            if reports.iter().any(|r| !r.passed()) {
                return Err(CliError::Domain("SelftestFailed: see the criterion lines above".into()));
            }
        }
    }
    Ok(0)
}

fn parse_moves<M: FromStr>(s: &str) -> Res<Vec<M>>
where
    M::Err: Display,
{
    s.split_whitespace().map(|w| w.parse::<M>().map_err(|e| CliError::Usage(format!("bad move '{w}': {e}")))).collect()
}

enum Loaded {
    Tree(ExplicitTree),
    Rule(OrdinalGame),
}

fn load_game(a: &GameArgs) -> Res<Loaded> {
    if let Some(p) = &a.game {
        return parse_game(&read(p)?).map(Loaded::Tree).map_err(domain);
    }
    let Some(rule) = &a.rule else {
        return Err(CliError::Usage("give --game FILE or --rule G|O with --alpha".into()));
    };
    let kind = match rule.as_str() {
        "G" => RuleKind::G,
        "O" => RuleKind::O,
        other => return Err(CliError::Usage(format!("--rule must be G or O, got '{other}'"))),
    };
    let alpha = ordinal_arg("alpha", a.alpha.as_deref().unwrap_or(""))?;
    let slice = if a.full {
        Slice::Full
    } else {
        let probes = a
            .probes
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| ordinal_arg("probes", s))
            .collect::<Res<_>>()?;
        Slice::Probes { probes, max_branching: a.branching as usize }
    };
    OrdinalGame::new(kind, alpha, slice).map(Loaded::Rule).map_err(|e| CliError::Usage(e.to_string()))
}

fn solve_cmd<G: Game>(g: &G, b: u64, table: bool, o: &mut Out) -> Res<()> {
    let lab = solve(g, b).map_err(domain)?;
    let w = lab.winner();
    o.kv("winner", w)?;
    o.kv("rank", lab.root_info().rank)?;
    let strat = strategy_from_labels(&lab, w);
    for (node, mv) in strat.table.iter().filter(|(n, m)| g.is_legal(n, m)) {
        o.kv("strategy", format!("{} -> {mv}", fmt_node(node)))?;
    }
    if table {
        for (node, (rk, safe)) in safety_table(g, b).map_err(domain)? {
            let h = lab.get(&node).map(|i| i.h).unwrap_or(0);
            o.kv("node", format!("{} rank {rk} h {h} safe {safe}", fmt_node(&node)))?;
        }
    }
    Ok(())
}

/// A random value for a parameter of type 0, 1 or 2.
fn random_value(ty: &Type, rng: &mut ChaCha8Rng) -> Value {
    match ty.level() {
        Some(0) => Value::Nat(rng.random_range(0..6)),
        Some(1) => {
            let pre = (0..12).map(|_| rng.random_range(0..8)).collect();
            Value::Stream(Oracle1::table(pre, rng.random_range(0..3)))
        }
        _ => {
            let (a, b) = (rng.random_range(0..5u64), rng.random_range(0..5u64));
            Value::Functional(Functional2::new("random", move |s| Ok(s.at(a)?.wrapping_add(s.at(b)?))))
        }
    }
}

fn same_value(x: &Value, y: &Value, rng: &mut ChaCha8Rng) -> Result<bool, crate::eval::EvalError> {
    Ok(match (x, y) {
        (Value::Nat(a), Value::Nat(b)) => a == b,
        (Value::Stream(a), Value::Stream(b)) => a.prefix(20)? == b.prefix(20)?,
        (Value::Functional(f), Value::Functional(g)) => {
            for _ in 0..5 {
                let pre: Vec<u64> = (0..12).map(|_| rng.random_range(0..8)).collect();
                let s = Oracle1::table(pre, 0);
                if f.apply(&s)? != g.apply(&s)? {
                    return Ok(false);
                }
            }
            true
        }
        _ => false,
    })
}

fn lower_cmd(
    f: &TermFile,
    check: Option<u64>,
    budget: Option<u64>,
    rng: &mut ChaCha8Rng,
    seed: u64,
    o: &mut Out,
) -> Res<i32> {
    o.line(format!("; seed {seed}"))?;
    let mut codes = Vec::new();
    let mut lowered = Vec::new();
    for t in &f.terms {
        let l = lower_closed(t, &f.sig).map_err(domain)?;
        codes.push(canonicalize(&l.code().code));
        lowered.push(l);
    }
    for (i, l) in lowered.iter().enumerate() {
        let how = match l {
            Lowered::Type0(_) => "type 0, value F(0...)",
            Lowered::Type1(_) => "type 1, stream k -> F(k^0...)",
            Lowered::Type2(_) => "type 2",
        };
        o.line(format!("; term {i}: {how}"))?;
    }
    o.line(print_file(&TermFile { sig: f.sig.clone(), terms: codes }).trim_end())?;
    let Some(n) = check else { return Ok(0) };
    let mut failed = 0;
    for (i, (t, l)) in f.terms.iter().zip(&lowered).enumerate() {
        let (mut pass, mut fail) = (0u64, 0u64);
        for _ in 0..n {
            let env: ParamEnv = f.sig.iter().map(|(name, ty)| (name.to_string(), random_value(ty, rng))).collect();
            let fuel = Fuel::new(budget.unwrap_or(DEFAULT_FUEL));
            let ev = Evaluator::new(env, fuel.clone());
            let x = ev.eval(t);
            fuel.reset();
            let y = l.value(&ev);
            let ok = match (x, y) {
                (Ok(x), Ok(y)) => same_value(&x, &y, rng).unwrap_or(false),
                _ => false,
            };
            if ok {
                pass += 1;
            } else {
                fail += 1;
            }
        }
        failed += fail;
        o.line(format!("; check {i}: {pass} passed, {fail} failed"))?;
    }
    if failed > 0 {
        return Err(CliError::Domain(format!("LoweringMismatch: {failed} differential test(s) failed")));
    }
    Ok(0)
}

#[derive(Clone)]
enum Script {
    Interactive,
    Moves(Vec<String>),
    Replay(String),
}

/// Plays I (human or script) against `engine` as II and returns the
/// transcript.
#[allow(clippy::too_many_arguments)]
fn play_session<G: Game>(
    g: &G,
    engine: &dyn crate::games::Policy<G::Move>,
    is_restart: &dyn Fn(&[G::Move], usize) -> bool,
    script: Script,
    horizon: usize,
    input: &mut dyn BufRead,
    o: &mut Out,
) -> Res<String>
where
    G::Move: FromStr,
    <G::Move as FromStr>::Err: Display,
{
    let mut scripted: std::collections::VecDeque<String> = match &script {
        Script::Moves(m) => m.iter().cloned().collect(),
        Script::Replay(text) => text
            .lines()
            .filter_map(|l| l.strip_prefix("I "))
            .map(|l| l.split_whitespace().next().unwrap_or("").to_string())
            .collect(),
        Script::Interactive => Default::default(),
    };
    let interactive = matches!(script, Script::Interactive);
    let mut pos: Vec<G::Move> = Vec::new();
    let mut text = String::new();
    let show = |o: &mut Out, human: String, machine: String| if o.machine { o.line(machine) } else { o.line(human) };
    let result = loop {
        if pos.len() >= horizon {
            break ("none", format!("horizon {horizon} reached"));
        }
        let legal = g.moves(&pos);
        match Player::to_move(pos.len()) {
            Player::I => {
                if legal.is_empty() && interactive {
                    break ("II", "I has no legal move".into());
                }
                let mv = if interactive {
                    loop {
                        let list: Vec<String> = legal.iter().map(|m| m.to_string()).collect();
                        show(
                            o,
                            format!("your move (legal include: {})", list.join(", ")),
                            format!("prompt {}", list.join(",")),
                        )?;
                        let mut line = String::new();
                        let n = input.read_line(&mut line).map_err(|e| CliError::Usage(e.to_string()))?;
                        if n == 0 {
                            break None;
                        }
                        match line.trim().parse::<G::Move>() {
                            Ok(m) if g.is_legal(&pos, &m) => break Some(m),
                            Ok(m) => show(o, format!("IllegalMove: {m} is not legal here"), format!("illegal {m}"))?,
                            Err(e) => show(o, format!("IllegalMove: {e}"), format!("illegal {}", line.trim()))?,
                        }
                    }
                } else {
                    match scripted.pop_front() {
                        Some(s) => {
                            Some(s.parse::<G::Move>().map_err(|e| CliError::Usage(format!("bad move '{s}': {e}")))?)
                        }
                        None => break ("none", "script ended".into()),
                    }
                };
                let Some(mv) = mv else { break ("II", "I resigned".into()) };
                let legal_move = g.is_legal(&pos, &mv);
                pos.push(mv.clone());
                let restart = legal_move && is_restart(&pos, pos.len() - 1);
                let tag = if restart { " restart" } else { "" };
                text.push_str(&format!("I {mv}{tag}\n"));
                show(
                    o,
                    format!("I plays {mv}{}", if restart { " (restart)" } else { "" }),
                    format!("move I {mv}{tag}"),
                )?;
                if !legal_move {
                    break ("II", format!("{mv} is illegal for I"));
                }
            }
            Player::II => {
                let Some(mv) = engine.choose(&pos).filter(|m| g.is_legal(&pos, m)) else {
                    break ("I", "II has no legal move".into());
                };
                pos.push(mv.clone());
                text.push_str(&format!("II {mv}\n"));
                show(o, format!("II plays {mv}"), format!("move II {mv}"))?;
            }
        }
    };
    text.push_str(&format!("result {} {}\n", result.0, result.1));
    if result.0 == "none" {
        show(o, format!("no winner yet: {}", result.1), format!("result none {}", result.1))?;
    } else {
        show(o, format!("{} wins: {}", result.0, result.1), format!("result {} {}", result.0, result.1))?;
    }
    Ok(text)
}

static SCRATCH: AtomicU64 = AtomicU64::new(0);

/// Runs a fixed battery of subcommands twice in machine format with the
/// same seed and compares the outputs byte for byte.
pub fn determinism_check(seed: u64) -> Result<(), String> {
    let dir = std::env::temp_dir().join(format!(
        "hytw-det-{}-{}-{seed}",
        std::process::id(),
        SCRATCH.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = default_signature();
    let mut gen = TermGen::new(&sig);
    let mut terms = Vec::new();
    for _ in 0..6 {
        let size = rng.random_range(5..=40);
        terms.push(gen.term(&mut rng, &Type::two(), size));
    }
    let zero: Signature = sig.clone();
    let files = [
        ("terms.txt", print_file(&TermFile { sig: zero, terms })),
        ("env.txt", "n = 3\nm = 1\nr = prefix 3 1 4 1 5 default 9\nG = term (lam (s (-> 0 0)) (+ (s 0) (s 2)))\nH = term (lam (s (-> 0 0)) (s (s 1)))\n".to_string()),
        ("game.txt", print_game(&random_tree(&mut rng, 40, 3))),
    ];
    let inst = random_instance(&mut rng, 12);
    let conds: [(&str, &Condition); 3] = [("p.txt", &inst.p), ("q.txt", &inst.q), ("r.txt", &inst.r)];
    for (name, text) in &files {
        std::fs::write(dir.join(name), text).map_err(|e| e.to_string())?;
    }
    for (name, c) in conds {
        std::fs::write(dir.join(name), print_condition(c)).map_err(|e| e.to_string())?;
    }
    let f = |n: &str| dir.join(n).display().to_string();
    let alpha = inst.alpha.to_string();
    let gamma = inst.gamma.to_string();
    let commands: Vec<Vec<String>> = vec![
        vec!["typecheck".into(), f("terms.txt")],
        vec!["normalize".into(), "--trace".into(), f("terms.txt")],
        vec!["eval".into(), f("terms.txt"), "--env".into(), f("env.txt")],
        vec!["lower".into(), f("terms.txt"), "--check".into(), "5".into()],
        vec!["solve".into(), "--game".into(), f("game.txt"), "--table".into()],
        vec!["kb".into(), "--game".into(), f("game.txt")],
        vec!["solve".into(), "--rule".into(), "G".into(), "--alpha".into(), "w+2".into()],
        vec![
            "play".into(),
            "--rule".into(),
            "O".into(),
            "--alpha".into(),
            "w*2".into(),
            "--moves".into(),
            "w+1,5,3,w,2".into(),
        ],
        vec![
            "retag".into(),
            "--p".into(),
            f("p.txt"),
            "--q".into(),
            f("q.txt"),
            "--r".into(),
            f("r.txt"),
            "--alpha".into(),
            alpha.clone(),
            "--gamma".into(),
            gamma,
        ],
        vec!["project".into(), f("r.txt"), "--alpha".into(), alpha],
        vec!["check-condition".into(), f("r.txt")],
    ];
    let once = || -> Result<Vec<(i32, Vec<u8>)>, String> {
        let mut outs = Vec::new();
        for c in &commands {
            let mut args: Vec<String> =
                vec!["hytw".into(), "--format".into(), "machine".into(), "--seed".into(), seed.to_string()];
            args.extend(c.iter().cloned());
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let code = run(args, &mut std::io::empty(), &mut out, &mut err);
            if code != 0 {
                return Err(format!("{c:?} exited {code}: {}", String::from_utf8_lossy(&err)));
            }
            outs.push((code, out));
        }
        Ok(outs)
    };
    let first = once();
    let second = once();
    let _ = std::fs::remove_dir_all(&dir);
    let (a, b) = (first?, second?);
    for (c, (x, y)) in commands.iter().zip(a.iter().zip(&b)) {
        if x != y {
            return Err(format!("output of {c:?} differs between runs"));
        }
    }
    Ok(())
}
