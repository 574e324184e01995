//! Runs the seven acceptance criteria and prints one line each.
//! `HYTW_SEED` and `HYTW_JOBS` override the defaults; a criterion number
//! as the first free argument restricts the run.

use std::process::ExitCode;
use std::thread::available_parallelism;

use hytw::selftest::{run, Config};

fn env_num(key: &str) -> Option<u64> {
    std::env::var(key).ok().and_then(|v| v.parse().ok())
}

fn main() -> ExitCode {
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let jobs =
        env_num("HYTW_JOBS").map(|n| n as usize).unwrap_or_else(|| available_parallelism().map_or(1, |n| n.get()));
    let cfg = Config { seed: env_num("HYTW_SEED").unwrap_or(0), jobs };
    println!("acceptance: seed {}, {} job(s)", cfg.seed, cfg.jobs);
    let reports = run(&cfg, &only);
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("acceptance: {} passed, {failed} failed", reports.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
