//! The `rlab` command line.

use std::io::Write;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::classes::{post_simple, simple_dweu, ContractReport, Verdict};
use crate::coding::{FinSet, Nat};
use crate::ips::{encode, eval, parse_program, Outcome};
use crate::priority::{
    dnotnd_run_bounded, fm_reordered_run, fm_run, ijd_run_bounded, requirement_report, PriorityState, Schedule,
    DEFAULT_MAX_REQUIREMENT,
};
use crate::re_sets::w_stage;
use crate::verify::{run_suite, Suite, VerifyConfig};

/// Environment variable capping every fuel and stage budget.
pub const FUEL_CAP_VAR: &str = "RLAB_FUEL_CAP";

const STACK: usize = 512 << 20;

#[derive(Parser, Debug)]
#[command(name = "rlab", about = "Indexed programs, r.e. sets and priority constructions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a program given as an s-expression or an index.
    Eval {
        program: String,
        args: Vec<Nat>,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        /// Comma-separated oracle elements.
        #[arg(long, value_delimiter = ',')]
        oracle: Vec<u64>,
    },
    /// Print `W_{e,s}`.
    Enum {
        e: Nat,
        #[arg(long, default_value_t = 100)]
        stage: u64,
    },
    /// Run a construction and print its trace followed by the final sets.
    Construct {
        name: String,
        #[arg(long, default_value_t = 1000)]
        stages: u64,
        #[arg(long)]
        max_req: Option<u64>,
        #[arg(long, default_value_t = 1)]
        i: u64,
        #[arg(long, default_value_t = 2)]
        j: u64,
        /// Comma-separated block sizes for `fm-reordered`.
        #[arg(long, value_delimiter = ',')]
        schedule: Vec<u64>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Run an invariant suite; exits 0 iff every check passes.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 2000)]
        stages: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn fuel_cap() -> Option<u64> {
    std::env::var(FUEL_CAP_VAR).ok().and_then(|v| v.trim().parse().ok())
}

fn capped(x: u64) -> u64 {
    fuel_cap().map_or(x, |c| x.min(c))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    // deep simulations recurse further than the default main stack allows
    let worker = std::thread::Builder::new().stack_size(STACK).spawn(move || {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        match execute(cli.command, &mut out) {
            Ok(code) => code,
            Err(msg) => {
                eprintln!("rlab: {msg}");
                1
            }
        }
    });
    worker.expect("spawn worker").join().unwrap_or(101)
}

/// Executes one command, writing its report to `out`.
pub fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    match cmd {
        Command::Eval { program, args, fuel, oracle } => {
            let index = match program.trim().parse::<Nat>() {
                Ok(e) => e,
                Err(_) => encode(&parse_program(&program).map_err(|e| e.to_string())?),
            };
            let oracle = FinSet::from_iter(oracle);
            let outcome = eval(&index, &args, Some(&oracle), capped(fuel));
            writeln!(out, "{}", serde_json::to_string(&outcome).expect("outcome serializes")).map_err(io)?;
            Ok(match outcome {
                Outcome::Converged { .. } => 0,
                Outcome::OutOfFuel => 2,
            })
        }
        Command::Enum { e, stage } => {
            let s = capped(stage);
            let line = json!({ "e": e, "s": s, "elements": w_stage(&e, s).elements() });
            writeln!(out, "{line}").map_err(io)?;
            Ok(0)
        }
        Command::Construct { name, stages, max_req, i, j, schedule, out: path } => {
            let text = construct(&name, capped(stages), max_req, i, j, &schedule)?;
            match path {
                Some(p) => std::fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display()))?,
                None => out.write_all(text.as_bytes()).map_err(io)?,
            }
            Ok(0)
        }
        Command::Verify { suite, stages, seed } => {
            let cfg = VerifyConfig { fuel_cap: fuel_cap().unwrap_or(u64::MAX), stages: capped(stages), seed };
            let reports = run_suite(suite, &cfg);
            for r in &reports {
                writeln!(out, "{}", serde_json::to_string(r).expect("report serializes")).map_err(io)?;
            }
            Ok(exit_code(&reports))
        }
    }
}

fn priority_text(st: &PriorityState) -> String {
    let mut text = st.trace();
    for r in requirement_report(st) {
        text.push_str(&serde_json::to_string(&json!({ "report": r })).expect("report serializes"));
        text.push('\n');
    }
    let fin = json!({ "final": { "stage": st.stage, "A": st.a.elements(), "B": st.b.elements() } });
    text.push_str(&format!("{fin}\n"));
    text
}

/// Trace and final sets of a named construction as JSON lines.
pub fn construct(name: &str, stages: u64, max_req: Option<u64>, i: u64, j: u64, schedule: &[u64]) -> Result<String, String> {
    let lines = |members: Vec<serde_json::Value>, set: &FinSet| {
        let mut text = String::new();
        for m in members {
            text.push_str(&format!("{m}\n"));
        }
        text.push_str(&format!("{}\n", json!({ "final": { "stage": stages, "A": set.elements() } })));
        text
    };
    match name {
        "post-simple" => {
            let p = post_simple(stages);
            let mut ms = p.members.clone();
            ms.sort_by_key(|m| (m.discovery, m.e));
            let events = ms.iter().map(|m| json!({ "stage": m.discovery, "event": "placed", "requirement": format!("e{}", m.e), "data": { "x": m.x } }));
            Ok(lines(events.collect(), &p.set()))
        }
        "simple-dweu" => {
            let d = simple_dweu(stages);
            let mut ms = d.members.clone();
            ms.sort_by_key(|m| (m.discovery, m.e, m.x));
            let events = ms.iter().map(|m| json!({ "stage": m.discovery, "event": "placed", "requirement": format!("e{}", m.e), "data": { "x": m.x, "rule": m.rule } }));
            Ok(lines(events.collect(), &d.set()))
        }
        "fm" => Ok(priority_text(&fm_run(max_req.unwrap_or(6), stages))),
        "fm-reordered" => {
            if schedule.is_empty() {
                return Err("fm-reordered needs --schedule".into());
            }
            Ok(priority_text(&fm_reordered_run(&Schedule(schedule.to_vec()), stages)))
        }
        "ijd" => {
            if i >= j {
                return Err(format!("ijd needs i < j, got i = {i}, j = {j}"));
            }
            Ok(priority_text(&ijd_run_bounded(i, j, stages, max_req.unwrap_or(DEFAULT_MAX_REQUIREMENT))))
        }
        "dnotnd" => Ok(priority_text(&dnotnd_run_bounded(stages, max_req.unwrap_or(DEFAULT_MAX_REQUIREMENT)))),
        other => Err(format!("unknown construction '{other}'")),
    }
}

/// Exit code of a list of verification reports.
pub fn exit_code(reports: &[ContractReport]) -> i32 {
    i32::from(reports.iter().any(|r| r.verdict == Verdict::Fail))
}
